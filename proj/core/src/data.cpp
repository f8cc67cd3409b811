#include "spoofguard/data.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "spoofguard/binio.hpp"
#include "spoofguard/error.hpp"
#include "spoofguard/fft.hpp"
#include "spoofguard/rng.hpp"

namespace spoofguard {

const char* to_string(TrialKey key) {
  return key == TrialKey::bonafide ? "bonafide" : "spoof";
}

// ---------------------------------------------------------------------------
// Protocol files

std::vector<Trial> parse_protocol(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open protocol file: " + path.string());

  std::vector<Trial> trials;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::istringstream fields(line);
    std::vector<std::string> parts;
    std::string part;
    while (fields >> part) parts.push_back(part);
    if (parts.size() != 5) {
      fail(path.string() + ":" + std::to_string(line_no) + ": expected 5 fields, got " +
           std::to_string(parts.size()));
    }

    Trial t;
    t.speaker_id = parts[0];
    t.utt_id = parts[1];
    t.system_id = parts[2];
    t.attack_id = parts[3];
    if (parts[4] == "bonafide") {
      t.key = TrialKey::bonafide;
    } else if (parts[4] == "spoof") {
      t.key = TrialKey::spoof;
    } else {
      fail(path.string() + ":" + std::to_string(line_no) + ": unknown key label '" +
           parts[4] + "'");
    }
    if (!seen.insert(t.utt_id).second) {
      fail(path.string() + ":" + std::to_string(line_no) + ": duplicate utt_id '" +
           t.utt_id + "'");
    }
    trials.push_back(std::move(t));
  }
  return trials;
}

void write_protocol(const std::vector<Trial>& trials, const std::filesystem::path& path) {
  std::string out;
  for (const auto& t : trials) {
    out += t.speaker_id + " " + t.utt_id + " " + t.system_id + " " + t.attack_id + " " +
           to_string(t.key) + "\n";
  }
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(out.data()),
                                    out.size()));
}

// ---------------------------------------------------------------------------
// Score files

std::vector<ScoreEntry> read_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open score file: " + path.string());

  std::vector<ScoreEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::istringstream fields(line);
    ScoreEntry e;
    std::string score_text, extra;
    if (!(fields >> e.utt_id >> score_text) || (fields >> extra)) {
      fail(path.string() + ":" + std::to_string(line_no) + ": expected '<utt_id> <score>'");
    }
    std::size_t parsed = 0;
    try {
      e.score = std::stod(score_text, &parsed);
    } catch (const std::exception&) {
      parsed = 0;
    }
    if (parsed != score_text.size() || !std::isfinite(e.score)) {
      fail(path.string() + ":" + std::to_string(line_no) + ": bad score '" + score_text + "'");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_scores(const std::vector<ScoreEntry>& entries, const std::filesystem::path& path) {
  std::string out;
  for (const auto& e : entries) {
    out += e.utt_id + " " + format_fixed(e.score, 6) + "\n";
  }
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(out.data()),
                                    out.size()));
}

ScoreSet join_scores(const std::vector<Trial>& trials, const std::vector<ScoreEntry>& entries,
                     MissingScorePolicy policy) {
  std::map<std::string, double> by_utt;
  std::set<std::string> known;
  for (const auto& t : trials) known.insert(t.utt_id);
  for (const auto& e : entries) {
    if (!known.count(e.utt_id)) {
      fail("score for unknown utterance '" + e.utt_id + "'");
    }
    if (!by_utt.emplace(e.utt_id, e.score).second) {
      fail("duplicate score for utterance '" + e.utt_id + "'");
    }
  }

  ScoreSet scores;
  for (const auto& t : trials) {
    auto it = by_utt.find(t.utt_id);
    if (it == by_utt.end()) {
      if (policy == MissingScorePolicy::error) {
        fail("missing score for protocol trial '" + t.utt_id + "'");
      }
      continue;
    }
    (t.key == TrialKey::bonafide ? scores.bonafide : scores.spoof).push_back(it->second);
  }
  return scores;
}

// ---------------------------------------------------------------------------
// Synthetic corpus

void SynthConfig::validate() const {
  require(n_bonafide >= 1 && n_spoof >= 1, "synthetic corpus needs counts >= 1");
  require(sample_rate_hz >= 8000, "synthetic sample rate must be >= 8000 Hz");
  require(min_duration_s > 0 && max_duration_s >= min_duration_s, "bad duration range");
  require(bandpass_low_hz > 0 && bandpass_high_hz > bandpass_low_hz &&
              bandpass_high_hz < sample_rate_hz / 2.0,
          "bad replay bandpass range");
  require(reverb_decay_s > 0, "reverb decay must be positive");
  require(requant_bits >= 4 && requant_bits <= 16, "requant bits must lie in [4, 16]");
  require(dev_fraction >= 0.0 && dev_fraction < 1.0, "dev_fraction must lie in [0, 1)");
}

namespace {

// RBJ audio-EQ biquad, direct form II transposed, zero initial state.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;

  static Biquad lowpass(double f_hz, double fs, double q) {
    const double w = 2.0 * std::numbers::pi * f_hz / fs;
    const double alpha = std::sin(w) / (2.0 * q);
    const double c = std::cos(w);
    const double a0 = 1.0 + alpha;
    Biquad bq;
    bq.b0 = (1.0 - c) / 2.0 / a0;
    bq.b1 = (1.0 - c) / a0;
    bq.b2 = bq.b0;
    bq.a1 = -2.0 * c / a0;
    bq.a2 = (1.0 - alpha) / a0;
    return bq;
  }

  static Biquad highpass(double f_hz, double fs, double q) {
    const double w = 2.0 * std::numbers::pi * f_hz / fs;
    const double alpha = std::sin(w) / (2.0 * q);
    const double c = std::cos(w);
    const double a0 = 1.0 + alpha;
    Biquad bq;
    bq.b0 = (1.0 + c) / 2.0 / a0;
    bq.b1 = -(1.0 + c) / a0;
    bq.b2 = bq.b0;
    bq.a1 = -2.0 * c / a0;
    bq.a2 = (1.0 - alpha) / a0;
    return bq;
  }

  static Biquad bandpass(double f_hz, double fs, double q) {
    const double w = 2.0 * std::numbers::pi * f_hz / fs;
    const double alpha = std::sin(w) / (2.0 * q);
    const double c = std::cos(w);
    const double a0 = 1.0 + alpha;
    Biquad bq;
    bq.b0 = alpha / a0;
    bq.b1 = 0.0;
    bq.b2 = -alpha / a0;
    bq.a1 = -2.0 * c / a0;
    bq.a2 = (1.0 - alpha) / a0;
    return bq;
  }

  void process(std::vector<double>& x) const {
    double s1 = 0.0, s2 = 0.0;
    for (double& v : x) {
      const double in = v;
      const double out = b0 * in + s1;
      s1 = b1 * in - a1 * out + s2;
      s2 = b2 * in - a2 * out;
      v = out;
    }
  }
};

// Overlap-add FFT convolution; output truncated to the input length.
std::vector<double> convolve_truncated(const std::vector<double>& x,
                                       const std::vector<double>& ir) {
  std::size_t fft_len = 1;
  while (fft_len < 4 * ir.size()) fft_len <<= 1;
  fft_len = std::max<std::size_t>(fft_len, 1024);
  const std::size_t block = fft_len - ir.size() + 1;

  std::vector<std::complex<double>> ir_f(fft_len);
  for (std::size_t i = 0; i < ir.size(); ++i) ir_f[i] = ir[i];
  fft_radix2(ir_f);

  std::vector<double> y(x.size(), 0.0);
  std::vector<std::complex<double>> buf(fft_len);
  for (std::size_t start = 0; start < x.size(); start += block) {
    const std::size_t n = std::min(block, x.size() - start);
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) buf[i] = x[start + i];
    fft_radix2(buf);
    for (std::size_t i = 0; i < fft_len; ++i) buf[i] *= ir_f[i];
    fft_radix2(buf, /*inverse=*/true);
    const std::size_t limit = std::min(x.size() - start, fft_len);
    for (std::size_t i = 0; i < limit; ++i) y[start + i] += buf[i].real();
  }
  return y;
}

void scale_to_peak(std::vector<double>& x, double target) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    const double g = target / peak;
    for (double& v : x) v *= g;
  }
}

// Seeded harmonic voice: f0 with vibrato, 1/k harmonic rolloff, two
// formant-like resonances, attack/release envelope, -40 dB noise floor.
std::vector<double> bonafide_signal(const SynthConfig& cfg, int index) {
  Rng rng(Rng::mix({cfg.seed, static_cast<std::uint64_t>(index), 0x766f696365ULL}));
  const double fs = cfg.sample_rate_hz;
  const double duration = rng.uniform(cfg.min_duration_s, cfg.max_duration_s);
  const std::size_t n = static_cast<std::size_t>(duration * fs);

  const double f0 = rng.uniform(100.0, 300.0);
  const double vibrato_hz = rng.uniform(4.0, 6.0);
  const double vibrato_depth = rng.uniform(0.005, 0.015);
  double phases[8];
  for (auto& p : phases) p = rng.uniform(0.0, 2.0 * std::numbers::pi);

  const double formant1 = rng.uniform(350.0, 900.0);
  const double formant2 = rng.uniform(1100.0, 2600.0);
  const double q1 = rng.uniform(4.0, 8.0);
  const double q2 = rng.uniform(4.0, 8.0);
  const double am_hz = rng.uniform(2.0, 4.0);
  const double am_depth = rng.uniform(0.1, 0.2);

  std::vector<double> x(n, 0.0);
  double phase0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double inst_f0 =
        f0 * (1.0 + vibrato_depth * std::sin(2.0 * std::numbers::pi * vibrato_hz * t));
    phase0 += 2.0 * std::numbers::pi * inst_f0 / fs;
    double v = 0.0;
    for (int k = 1; k <= 8; ++k) {
      v += std::sin(phase0 * k + phases[k - 1]) / k;
    }
    x[i] = v;
  }

  // Formant shaping.
  std::vector<double> shaped = x;
  Biquad::bandpass(formant1, fs, q1).process(shaped);
  std::vector<double> shaped2 = x;
  Biquad::bandpass(formant2, fs, q2).process(shaped2);
  for (std::size_t i = 0; i < n; ++i) x[i] = 0.3 * x[i] + 1.2 * shaped[i] + 0.8 * shaped2[i];

  // Attack/release ramps plus slow amplitude modulation.
  const std::size_t attack = static_cast<std::size_t>(0.06 * fs);
  const std::size_t release = static_cast<std::size_t>(0.12 * fs);
  for (std::size_t i = 0; i < n; ++i) {
    double env = 1.0;
    if (i < attack) {
      env *= 0.5 * (1.0 - std::cos(std::numbers::pi * i / attack));
    }
    if (i + release >= n) {
      env *= 0.5 * (1.0 - std::cos(std::numbers::pi * (n - 1 - i) / release));
    }
    const double t = static_cast<double>(i) / fs;
    env *= 1.0 - am_depth * 0.5 * (1.0 + std::sin(2.0 * std::numbers::pi * am_hz * t));
    x[i] *= env;
  }

  scale_to_peak(x, 1.0);
  for (std::size_t i = 0; i < n; ++i) x[i] += 0.01 * (2.0 * rng.uniform() - 1.0);
  scale_to_peak(x, 0.9);
  return x;
}

// Replay channel: bandpass to telephone-like width, convolve with a
// decaying noise impulse response, requantize. Per-utterance jitter stands
// in for the varied rooms/loudspeakers of a real replay setup.
std::vector<double> replay_channel(const SynthConfig& cfg, int index, std::vector<double> x) {
  Rng rng(Rng::mix({cfg.seed, static_cast<std::uint64_t>(index), 0x7265706c6179ULL}));
  const double fs = cfg.sample_rate_hz;

  const double decay = cfg.reverb_decay_s * rng.uniform(0.75, 1.25);
  const double wet = rng.uniform(0.3, 0.6);
  const double low = cfg.bandpass_low_hz * rng.uniform(0.9, 1.1);
  const double high = cfg.bandpass_high_hz * rng.uniform(0.95, 1.05);

  Biquad::highpass(low, fs, std::numbers::sqrt2 / 2.0).process(x);
  // 6th-order Butterworth lowpass as three cascaded biquads.
  for (double q : {0.5176, 0.7071, 1.9319}) {
    Biquad::lowpass(high, fs, q).process(x);
  }

  std::vector<double> ir(std::max<std::size_t>(8, static_cast<std::size_t>(decay * fs)));
  ir[0] = 1.0;
  for (std::size_t i = 1; i < ir.size(); ++i) {
    const double t = static_cast<double>(i) / fs;
    const double env = std::pow(10.0, -3.0 * t / decay);  // -60 dB at the decay time
    ir[i] = wet * env * (2.0 * rng.uniform() - 1.0);
  }
  x = convolve_truncated(x, ir);

  scale_to_peak(x, 0.85);
  const double levels = static_cast<double>(1 << (cfg.requant_bits - 1));
  for (double& v : x) {
    v = std::clamp(std::round(v * levels) / levels, -1.0, 1.0);
  }
  return x;
}

}  // namespace

AudioBuffer synth_utterance(const SynthConfig& cfg, int index, TrialKey label) {
  cfg.validate();
  std::vector<double> x = bonafide_signal(cfg, index);
  if (label == TrialKey::spoof) {
    x = replay_channel(cfg, index, std::move(x));
  }

  AudioBuffer buf;
  buf.sample_rate_hz = cfg.sample_rate_hz;
  buf.samples.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    buf.samples[i] = static_cast<float>(std::clamp(x[i], -1.0, 1.0));
  }
  return buf;
}

CorpusLayout build_corpus(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  const std::filesystem::path wav_dir = out_dir / "wav";
  std::filesystem::create_directories(wav_dir);

  const int dev_bona = static_cast<int>(cfg.n_bonafide * cfg.dev_fraction);
  const int dev_spoof = static_cast<int>(cfg.n_spoof * cfg.dev_fraction);
  const int train_bona = cfg.n_bonafide - dev_bona;
  const int train_spoof = cfg.n_spoof - dev_spoof;
  require(train_bona >= 1 && train_spoof >= 1, "train split would be missing a class");

  const int train_speakers = std::max(2, (train_bona + train_spoof) / 10);
  const int dev_speakers = std::max(2, (dev_bona + dev_spoof) / 10);

  auto make_trial = [&](int index, TrialKey key, bool is_train) {
    char utt[32];
    std::snprintf(utt, sizeof(utt), "SYN_%c_%06d", is_train ? 'T' : 'D', index);
    char spk[32];
    if (is_train) {
      std::snprintf(spk, sizeof(spk), "S_TR_%02d", index % train_speakers);
    } else {
      std::snprintf(spk, sizeof(spk), "S_DV_%02d", index % dev_speakers);
    }
    Trial t;
    t.speaker_id = spk;
    t.utt_id = utt;
    t.system_id = key == TrialKey::spoof ? "REPLAY" : "-";
    t.attack_id = key == TrialKey::spoof ? "R01" : "-";
    t.key = key;
    return t;
  };

  std::vector<Trial> train, dev;
  std::vector<std::pair<Trial, int>> jobs;  // trial + synth index
  for (int i = 0; i < cfg.n_bonafide; ++i) {
    const bool is_train = i < train_bona;
    Trial t = make_trial(i, TrialKey::bonafide, is_train);
    (is_train ? train : dev).push_back(t);
    jobs.emplace_back(std::move(t), i);
  }
  for (int i = 0; i < cfg.n_spoof; ++i) {
    const int index = cfg.n_bonafide + i;
    const bool is_train = i < train_spoof;
    Trial t = make_trial(index, TrialKey::spoof, is_train);
    (is_train ? train : dev).push_back(t);
    jobs.emplace_back(std::move(t), index);
  }

  for (const auto& [trial, index] : jobs) {
    AudioBuffer buf = synth_utterance(cfg, index, trial.key);
    buf.source_id = trial.utt_id;
    write_wav_pcm16(buf, wav_dir / (trial.utt_id + ".wav"));
  }

  CorpusLayout layout;
  layout.train_protocol = out_dir / "train.txt";
  layout.dev_protocol = out_dir / "dev.txt";
  layout.wav_dir = wav_dir;
  write_protocol(train, layout.train_protocol);
  write_protocol(dev, layout.dev_protocol);
  return layout;
}

}  // namespace spoofguard
