#include "spoofguard/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spoofguard/binio.hpp"
#include "spoofguard/error.hpp"
#include "spoofguard/fft.hpp"

namespace spoofguard {

double FrontEndConfig::resolved_fmax(int sample_rate_hz) const {
  return fmax_hz < 0.0 ? sample_rate_hz / 2.0 : fmax_hz;
}

void FrontEndConfig::validate(int sample_rate_hz) const {
  require(n_fft >= 2 && (n_fft & (n_fft - 1)) == 0,
          "n_fft must be a power of two, got " + std::to_string(n_fft));
  require(hop > 0 && hop <= n_fft, "hop must satisfy 0 < hop <= n_fft");
  require(n_mels >= 2, "n_mels must be >= 2");
  require(out_height >= 1 && out_width >= 1, "output dimensions must be >= 1");
  require(db_floor < 0.0, "db_floor must be negative");
  const double fmax = resolved_fmax(sample_rate_hz);
  require(fmin_hz >= 0.0 && fmin_hz < fmax && fmax <= sample_rate_hz / 2.0 + 1e-9,
          "filterbank range must satisfy 0 <= fmin < fmax <= sample_rate/2");
}

double hz_to_mel(double f_hz) {
  require(f_hz >= 0.0, "hz_to_mel: negative frequency " + std::to_string(f_hz));
  return 2595.0 * std::log10(1.0 + f_hz / 700.0);
}

double mel_to_hz(double mel) {
  require(mel >= 0.0, "mel_to_hz: negative Mel value " + std::to_string(mel));
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<double> hann_window(int n) {
  require(n >= 2, "hann_window length must be >= 2");
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / n));
  }
  return w;
}

std::vector<std::vector<double>> frame_signal(std::span<const float> samples,
                                              int n_fft, int hop) {
  require(n_fft >= 1 && hop >= 1, "frame_signal: n_fft and hop must be positive");
  const std::size_t len = samples.size();
  const std::size_t n_frames =
      len >= static_cast<std::size_t>(n_fft)
          ? 1 + (len - static_cast<std::size_t>(n_fft)) / static_cast<std::size_t>(hop)
          : 1;

  std::vector<std::vector<double>> frames(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) {
    frames[f].assign(static_cast<std::size_t>(n_fft), 0.0);
    const std::size_t start = f * static_cast<std::size_t>(hop);
    const std::size_t avail = len > start ? std::min<std::size_t>(n_fft, len - start) : 0;
    for (std::size_t i = 0; i < avail; ++i) {
      frames[f][i] = static_cast<double>(samples[start + i]);
    }
  }
  return frames;
}

std::vector<double> mel_filter_centers_hz(const FrontEndConfig& cfg, int sample_rate_hz) {
  const double mel_lo = hz_to_mel(cfg.fmin_hz);
  const double mel_hi = hz_to_mel(cfg.resolved_fmax(sample_rate_hz));
  std::vector<double> centers(cfg.n_mels);
  for (int k = 0; k < cfg.n_mels; ++k) {
    const double mel = mel_lo + (mel_hi - mel_lo) * (k + 1) / (cfg.n_mels + 1);
    centers[k] = mel_to_hz(mel);
  }
  return centers;
}

std::vector<std::vector<double>> mel_filterbank(const FrontEndConfig& cfg,
                                                int sample_rate_hz) {
  cfg.validate(sample_rate_hz);
  const int n_bins = cfg.n_fft / 2 + 1;

  // n_mels + 2 break frequencies, equally spaced on the Mel scale.
  const double mel_lo = hz_to_mel(cfg.fmin_hz);
  const double mel_hi = hz_to_mel(cfg.resolved_fmax(sample_rate_hz));
  std::vector<double> breaks_hz(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i) {
    breaks_hz[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1));
  }

  std::vector<std::vector<double>> bank(cfg.n_mels, std::vector<double>(n_bins, 0.0));
  const double bin_hz = static_cast<double>(sample_rate_hz) / cfg.n_fft;
  for (int k = 0; k < cfg.n_mels; ++k) {
    const double left = breaks_hz[k];
    const double center = breaks_hz[k + 1];
    const double right = breaks_hz[k + 2];
    bool any = false;
    for (int b = 0; b < n_bins; ++b) {
      const double f = b * bin_hz;
      double w = 0.0;
      if (f > left && f < center) {
        w = (f - left) / (center - left);
      } else if (f == center) {
        w = 1.0;
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      bank[k][b] = w;
      any = any || w > 0.0;
    }
    if (!any) {
      fail("mel_filterbank: filter " + std::to_string(k) +
           " covers no FFT bin; reduce n_mels or increase n_fft");
    }
  }
  return bank;
}

Grid power_to_db(const Grid& power, double db_floor) {
  require(db_floor < 0.0, "db_floor must be negative");
  constexpr double kRatioFloor = 1e-10;

  double ref = 0.0;
  for (double p : power.v) {
    require(p >= 0.0, "power_to_db: negative power value " + std::to_string(p));
    require(std::isfinite(p), "power_to_db: non-finite power value");
    ref = std::max(ref, p);
  }

  Grid db(power.rows, power.cols);
  for (std::size_t i = 0; i < power.v.size(); ++i) {
    const double ratio = ref > 0.0 ? power.v[i] / ref : 0.0;
    const double d = 10.0 * std::log10(std::max(ratio, kRatioFloor));
    db.v[i] = std::max(d, db_floor);
  }
  return db;
}

Grid resize_bilinear(const Grid& in, int out_h, int out_w) {
  require(in.rows >= 1 && in.cols >= 1, "resize_bilinear: empty input grid");
  require(out_h >= 1 && out_w >= 1, "resize_bilinear: empty output shape");

  Grid out(out_h, out_w);
  for (int i = 0; i < out_h; ++i) {
    const double sy = std::clamp((i + 0.5) * in.rows / out_h - 0.5, 0.0,
                                 static_cast<double>(in.rows - 1));
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, in.rows - 1);
    const double fy = sy - y0;
    for (int j = 0; j < out_w; ++j) {
      const double sx = std::clamp((j + 0.5) * in.cols / out_w - 0.5, 0.0,
                                   static_cast<double>(in.cols - 1));
      const int x0 = static_cast<int>(std::floor(sx));
      const int x1 = std::min(x0 + 1, in.cols - 1);
      const double fx = sx - x0;

      const double top = in.at(y0, x0) * (1.0 - fx) + in.at(y0, x1) * fx;
      const double bot = in.at(y1, x0) * (1.0 - fx) + in.at(y1, x1) * fx;
      out.at(i, j) = top * (1.0 - fy) + bot * fy;
    }
  }
  return out;
}

Grid mel_power_grid(const AudioBuffer& buf, const FrontEndConfig& cfg) {
  validate(buf);
  cfg.validate(buf.sample_rate_hz);

  const auto window = hann_window(cfg.n_fft);
  const auto bank = mel_filterbank(cfg, buf.sample_rate_hz);
  auto frames = frame_signal(buf.samples, cfg.n_fft, cfg.hop);
  const int n_frames = static_cast<int>(frames.size());

  Grid grid(cfg.n_mels, n_frames);
  for (int t = 0; t < n_frames; ++t) {
    auto& frame = frames[t];
    for (int i = 0; i < cfg.n_fft; ++i) frame[i] *= window[i];
    const auto power = fft_power(frame);
    for (int k = 0; k < cfg.n_mels; ++k) {
      double acc = 0.0;
      const auto& filt = bank[k];
      for (std::size_t b = 0; b < power.size(); ++b) acc += filt[b] * power[b];
      // Row 0 holds the highest band: frequency increases upward in
      // exported images.
      grid.at(cfg.n_mels - 1 - k, t) = acc;
    }
  }
  return grid;
}

MelSpectrogram extract_mel_spectrogram(const AudioBuffer& buf, const FrontEndConfig& cfg) {
  const Grid db = power_to_db(mel_power_grid(buf, cfg), cfg.db_floor);
  const Grid resized = resize_bilinear(db, cfg.out_height, cfg.out_width);

  MelSpectrogram mels;
  mels.rows = resized.rows;
  mels.cols = resized.cols;
  mels.values.resize(resized.v.size());
  for (std::size_t i = 0; i < resized.v.size(); ++i) {
    mels.values[i] = static_cast<float>(resized.v[i]);
  }
  mels.config = cfg;
  mels.config.fmax_hz = cfg.resolved_fmax(buf.sample_rate_hz);
  mels.sample_rate_hz = buf.sample_rate_hz;
  mels.source_id = buf.source_id;
  return mels;
}

void export_pgm(const MelSpectrogram& mels, const std::filesystem::path& path) {
  require(mels.rows >= 1 && mels.cols >= 1, "export_pgm: empty spectrogram");
  const double floor = mels.config.db_floor;

  ByteWriter w;
  w.str("P5\n" + std::to_string(mels.cols) + " " + std::to_string(mels.rows) + "\n255\n");
  for (float v : mels.values) {
    const long px = std::lround(255.0 * (static_cast<double>(v) - floor) / (0.0 - floor));
    w.u8(static_cast<std::uint8_t>(std::clamp<long>(px, 0, 255)));
  }
  write_file_atomic(path, w.data());
}

namespace {

constexpr std::uint32_t kMelsVersion = 1;

std::map<std::string, std::string> mels_metadata(const MelSpectrogram& mels) {
  std::map<std::string, std::string> md;
  md["db_floor"] = format_double(mels.config.db_floor);
  md["fmax_hz"] = format_double(mels.config.fmax_hz);
  md["fmin_hz"] = format_double(mels.config.fmin_hz);
  md["hop"] = std::to_string(mels.config.hop);
  md["n_fft"] = std::to_string(mels.config.n_fft);
  md["n_mels"] = std::to_string(mels.config.n_mels);
  md["out_height"] = std::to_string(mels.config.out_height);
  md["out_width"] = std::to_string(mels.config.out_width);
  md["sample_rate_hz"] = std::to_string(mels.sample_rate_hz);
  md["source_id"] = mels.source_id;
  return md;
}

}  // namespace

void write_mels(const MelSpectrogram& mels, const std::filesystem::path& path) {
  require(mels.rows >= 1 && mels.cols >= 1, "write_mels: empty spectrogram");
  require(mels.values.size() == static_cast<std::size_t>(mels.rows) * mels.cols,
          "write_mels: value count does not match rows*cols");

  ByteWriter w;
  w.str("MELS");
  w.u32(kMelsVersion);
  w.u32(static_cast<std::uint32_t>(mels.rows));
  w.u32(static_cast<std::uint32_t>(mels.cols));
  for (float v : mels.values) w.f32(v);

  std::string meta;
  for (const auto& [k, v] : mels_metadata(mels)) meta += k + "=" + v + "\n";
  w.u32(static_cast<std::uint32_t>(meta.size()));
  w.str(meta);

  write_file_atomic(path, w.data());
}

MelSpectrogram read_mels(const std::filesystem::path& path) {
  const auto raw = read_file(path);
  ByteReader r(raw, path.string());

  if (r.str(4) != "MELS") {
    ByteReader at(raw, path.string());
    at.fail_at("bad MELS magic");
  }
  const std::uint32_t version = r.u32();
  if (version != kMelsVersion) {
    fail(path.string() + ": unsupported MELS version " + std::to_string(version));
  }

  MelSpectrogram mels;
  mels.rows = static_cast<int>(r.u32());
  mels.cols = static_cast<int>(r.u32());
  require(mels.rows >= 1 && mels.cols >= 1, path.string() + ": degenerate MELS shape");
  const std::size_t count = static_cast<std::size_t>(mels.rows) * mels.cols;
  mels.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) mels.values[i] = r.f32();

  const std::uint32_t meta_len = r.u32();
  const std::string meta = r.str(meta_len);
  if (r.remaining() != 0) r.fail_at("trailing bytes after metadata block");

  std::map<std::string, std::string> md;
  std::size_t pos = 0;
  while (pos < meta.size()) {
    const std::size_t eol = meta.find('\n', pos);
    const std::string line = meta.substr(pos, eol == std::string::npos ? std::string::npos
                                                                       : eol - pos);
    pos = eol == std::string::npos ? meta.size() : eol + 1;
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(path.string() + ": malformed metadata line '" + line + "'");
    md[line.substr(0, eq)] = line.substr(eq + 1);
  }

  auto get_num = [&](const char* key, double fallback) {
    auto it = md.find(key);
    return it == md.end() ? fallback : std::stod(it->second);
  };
  mels.config.n_fft = static_cast<int>(get_num("n_fft", mels.config.n_fft));
  mels.config.hop = static_cast<int>(get_num("hop", mels.config.hop));
  mels.config.n_mels = static_cast<int>(get_num("n_mels", mels.config.n_mels));
  mels.config.fmin_hz = get_num("fmin_hz", mels.config.fmin_hz);
  mels.config.fmax_hz = get_num("fmax_hz", mels.config.fmax_hz);
  mels.config.out_height = static_cast<int>(get_num("out_height", mels.rows));
  mels.config.out_width = static_cast<int>(get_num("out_width", mels.cols));
  mels.config.db_floor = get_num("db_floor", mels.config.db_floor);
  mels.sample_rate_hz = static_cast<int>(get_num("sample_rate_hz", 0));
  if (auto it = md.find("source_id"); it != md.end()) mels.source_id = it->second;
  return mels;
}

}  // namespace spoofguard
