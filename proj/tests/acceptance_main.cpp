// Acceptance suite: every release-gating property of the toolkit, one
// printed PASS/FAIL line per criterion. Exit code is the number of
// failures. The end-to-end criteria drive the installed CLI binary.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "spoofguard/audio.hpp"
#include "spoofguard/binio.hpp"
#include "spoofguard/data.hpp"
#include "spoofguard/features.hpp"
#include "spoofguard/fft.hpp"
#include "spoofguard/layers.hpp"
#include "spoofguard/metrics.hpp"
#include "spoofguard/network.hpp"
#include "spoofguard/rng.hpp"
#include "spoofguard/trainer.hpp"
#include "spoofguard/weights_io.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

#ifndef SPOOFGUARD_CLI_PATH
#error "SPOOFGUARD_CLI_PATH must point at the spoofguard binary"
#endif

using namespace spoofguard;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int run_cli(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd =
      std::string(SPOOFGUARD_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---------------------------------------------------------------------------

Criterion criterion_1_mel_scale() {
  Criterion c;
  const auto start = Clock::now();

  for (int i = 0; i <= 1000 && c.ok; ++i) {
    const double f = 24000.0 * i / 1000.0;
    const double expected = 2595.0 * std::log10(1.0 + f / 700.0);
    c.expect(std::abs(hz_to_mel(f) - expected) <= 1e-9 * std::max(expected, 1.0),
             "hz_to_mel deviates from the defining formula at " + std::to_string(f) + " Hz");

    const double back = mel_to_hz(hz_to_mel(f));
    c.expect(std::abs(back - f) <= 1e-6 * std::max(f, 1.0),
             "round trip off at " + std::to_string(f) + " Hz");
  }
  c.expect(hz_to_mel(6300.0) == 2595.0, "hz_to_mel(6300) != 2595");
  c.expect(std::abs(mel_to_hz(2595.0) - 6300.0) < 1e-9, "mel_to_hz(2595) != 6300");
  c.expect(seconds_since(start) < 1.0, "runtime exceeded 1 s");
  return c;
}

Criterion criterion_2_fft_oracle() {
  Criterion c;
  const auto start = Clock::now();
  Rng rng(20240131);

  const int sizes[] = {2, 4, 8, 16, 32, 64};
  for (int rep = 0; rep < 200 && c.ok; ++rep) {
    const int n = sizes[rep % 6];
    std::vector<double> frame(n);
    for (auto& v : frame) v = rng.uniform(-1.0, 1.0);

    const auto fast = fft_power(frame);
    const auto slow = oracle::naive_dft_power(frame);
    double scale = 1.0;
    for (double p : slow) scale = std::max(scale, p);
    for (std::size_t k = 0; k < fast.size(); ++k) {
      c.expect(std::abs(fast[k] - slow[k]) <= 1e-9 * scale,
               "FFT bin " + std::to_string(k) + " disagrees with the naive DFT at n=" +
                   std::to_string(n));
    }

    std::vector<std::complex<double>> x(n);
    double time_energy = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] = frame[i];
      time_energy += frame[i] * frame[i];
    }
    fft_radix2(x);
    double freq_energy = 0.0;
    for (const auto& v : x) freq_energy += std::norm(v);
    c.expect(std::abs(freq_energy - n * time_energy) <= 1e-6 * std::max(n * time_energy, 1.0),
             "Parseval violated at n=" + std::to_string(n));
  }
  c.expect(seconds_since(start) < 5.0, "runtime exceeded 5 s");
  return c;
}

Criterion criterion_3_filterbank_oracle() {
  Criterion c;

  FrontEndConfig cfg;
  cfg.n_fft = 16;
  cfg.hop = 8;
  cfg.n_mels = 4;
  cfg.fmin_hz = 0.0;
  cfg.fmax_hz = 4000.0;
  const auto bank = mel_filterbank(cfg, 8000);

  for (int k = 0; k < 4; ++k) {
    for (int b = 0; b < 9; ++b) {
      const double f = b * 500.0;
      const double expected = oracle::mel_triangle_weight(0.0, 4000.0, 4, k, f);
      c.expect(bank[k][b] == expected,
               "filter " + std::to_string(k) + " bin " + std::to_string(b) +
                   " disagrees with the pointwise construction");
    }
    c.expect(oracle::mel_triangle_weight(0.0, 4000.0, 4, k, [&] {
               auto to_mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
               auto to_hz = [](double mel) {
                 return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
               };
               return to_hz(to_mel(4000.0) * (k + 1) / 5.0);
             }()) == 1.0,
             "apex of filter " + std::to_string(k) + " is not exactly 1");
  }
  return c;
}

Criterion criterion_4_gradient_suite() {
  Criterion c;
  const auto start = Clock::now();
  constexpr double kStep = 1e-5;

  auto weighted = [](Rng& rng, std::size_t n) {
    std::vector<double> w(n);
    for (auto& v : w) v = rng.uniform(-1.0, 1.0);
    return w;
  };
  auto dot = [](const std::vector<double>& w, const Tensor<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < y.numel(); ++i) acc += w[i] * y.data[i];
    return acc;
  };
  auto as_grad = [](const std::vector<double>& w, const std::vector<int>& shape) {
    Tensor<double> g(shape);
    for (std::size_t i = 0; i < g.numel(); ++i) g.data[i] = w[i];
    return g;
  };
  auto check = [&](const char* who, const std::function<double()>& loss,
                   std::span<double> values, std::span<const double> analytic, double tol) {
    const auto r = oracle::finite_difference_check(loss, values, analytic, kStep, tol);
    c.expect(r.ok, std::string(who) + ": worst relative error " + std::to_string(r.worst_rel) +
                       " (analytic " + std::to_string(r.analytic) + ", numeric " +
                       std::to_string(r.numeric) + ")");
  };

  for (std::uint64_t seed = 0; seed < 20 && c.ok; ++seed) {
    Rng rng(Rng::mix({seed, 0xacce97ULL}));
    auto fill = [&](Tensor<double>& t, double lo, double hi) {
      for (auto& v : t.data) v = rng.uniform(lo, hi);
    };
    auto fill_nonzero = [&](Tensor<double>& t) {
      for (auto& v : t.data) {
        const double mag = rng.uniform(0.1, 1.0);
        v = rng.uniform() < 0.5 ? -mag : mag;
      }
    };

    {  // conv2d
      Conv2d<double> conv(2, 3, 3, seed % 2 ? 2 : 1, 1, true);
      fill(conv.weight, -0.7, 0.7);
      fill(conv.bias, -0.5, 0.5);
      Tensor<double> x({1, 2, 5, 5});
      fill(x, -1.0, 1.0);
      const auto w = weighted(rng, conv.forward(x).numel());
      auto loss = [&] { return dot(w, conv.forward(x)); };
      conv.weight.zero_grad();
      conv.bias.zero_grad();
      const Tensor<double> y = conv.forward(x);
      const Tensor<double> gx = conv.backward(as_grad(w, y.shape));
      check("conv2d/x", loss, x.data, gx.data, 1e-4);
      check("conv2d/w", loss, conv.weight.data, conv.weight.grad, 1e-4);
      check("conv2d/b", loss, conv.bias.data, conv.bias.grad, 1e-4);
    }
    {  // batchnorm2d (train mode, batch statistics)
      BatchNorm2d<double> bn(3);
      fill(bn.gamma, 0.5, 1.5);
      fill(bn.beta, -0.5, 0.5);
      Tensor<double> x({2, 3, 4, 4});
      fill(x, -1.0, 1.0);
      const auto w = weighted(rng, x.numel());
      auto loss = [&] { return dot(w, bn.forward(x, true)); };
      bn.gamma.zero_grad();
      bn.beta.zero_grad();
      const Tensor<double> y = bn.forward(x, true);
      const Tensor<double> gx = bn.backward(as_grad(w, y.shape));
      check("batchnorm2d/x", loss, x.data, gx.data, 1e-3);
      check("batchnorm2d/gamma", loss, bn.gamma.data, bn.gamma.grad, 1e-3);
      check("batchnorm2d/beta", loss, bn.beta.data, bn.beta.grad, 1e-3);
    }
    {  // relu composition
      Relu<double> relu;
      Tensor<double> x({2, 2, 4, 4});
      fill_nonzero(x);
      const auto w = weighted(rng, x.numel());
      auto loss = [&] { return dot(w, relu.forward(x)); };
      const Tensor<double> y = relu.forward(x);
      const Tensor<double> gx = relu.backward(as_grad(w, y.shape));
      check("relu/x", loss, x.data, gx.data, 1e-4);
    }
    {  // residual block
      ResidualBlock<double> block(3, 3, false);
      fill(block.conv1.weight, -0.5, 0.5);
      fill(block.conv2.weight, -0.5, 0.5);
      fill(block.bn1.gamma, 0.5, 1.5);
      fill(block.bn2.gamma, 0.5, 1.5);
      fill(block.bn1.beta, -0.2, 0.2);
      fill(block.bn2.beta, -0.2, 0.2);
      Tensor<double> x({2, 3, 5, 5});
      fill(x, -1.0, 1.0);
      const auto w = weighted(rng, x.numel());
      auto loss = [&] { return dot(w, block.forward(x, true)); };
      block.conv1.weight.zero_grad();
      block.conv2.weight.zero_grad();
      const Tensor<double> y = block.forward(x, true);
      const Tensor<double> gx = block.backward(as_grad(w, y.shape));
      check("residual_block/x", loss, x.data, gx.data, 1e-3);
      check("residual_block/conv1.w", loss, block.conv1.weight.data, block.conv1.weight.grad,
            1e-3);
      check("residual_block/conv2.w", loss, block.conv2.weight.data, block.conv2.weight.grad,
            1e-3);
    }
    {  // linear
      Linear<double> fc(6, 4);
      fill(fc.weight, -1.0, 1.0);
      fill(fc.bias, -1.0, 1.0);
      Tensor<double> x({3, 6});
      fill(x, -1.0, 1.0);
      const auto w = weighted(rng, 12);
      auto loss = [&] { return dot(w, fc.forward(x)); };
      fc.weight.zero_grad();
      fc.bias.zero_grad();
      const Tensor<double> y = fc.forward(x);
      const Tensor<double> gx = fc.backward(as_grad(w, y.shape));
      check("linear/x", loss, x.data, gx.data, 1e-4);
      check("linear/w", loss, fc.weight.data, fc.weight.grad, 1e-4);
      check("linear/b", loss, fc.bias.data, fc.bias.grad, 1e-4);
    }
    {  // softmax cross entropy
      Tensor<double> logits({4, 2});
      fill(logits, -2.0, 2.0);
      std::vector<int> labels;
      for (int i = 0; i < 4; ++i) labels.push_back(rng.uniform_int(0, 1));
      auto loss = [&] { return softmax_cross_entropy<double>(logits, labels).loss; };
      const auto result = softmax_cross_entropy<double>(logits, labels);
      check("softmax_cross_entropy/logits", loss, logits.data, result.grad_logits.data, 1e-4);
    }
  }
  c.expect(seconds_since(start) < 120.0, "runtime exceeded 2 min");
  return c;
}

Criterion criterion_5_residual_identity() {
  Criterion c;
  Rng rng(555);

  ResidualBlock<float> block(4, 4, false);  // fresh: zero convs, gamma 1, beta 0
  Tensor<float> x({2, 4, 6, 6});
  for (auto& v : x.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));

  for (bool train : {true, false}) {
    ResidualBlock<float> fresh(4, 4, false);
    const Tensor<float> y = fresh.forward(x, train);
    for (std::size_t i = 0; i < x.numel(); ++i) {
      const float expected = x.data[i] > 0.0f ? x.data[i] : 0.0f;
      c.expect(std::memcmp(&y.data[i], &expected, sizeof(float)) == 0,
               std::string("zero-F output differs from ReLU(x) in ") +
                   (train ? "train" : "eval") + " mode");
    }
  }

  Tensor<float> upstream(x.shape);
  for (auto& v : upstream.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  block.forward(x, true);
  const Tensor<float> gx = block.backward(upstream);
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const float expected = x.data[i] > 0.0f ? upstream.data[i] : 0.0f;
    c.expect(gx.data[i] == expected,
             "shortcut gradient is not the ReLU-gated upstream gradient");
  }
  return c;
}

Criterion criterion_6_metrics_oracle() {
  Criterion c;
  Rng rng(6606);

  for (int rep = 0; rep < 1000 && c.ok; ++rep) {
    ScoreSet s;
    const int nb = rng.uniform_int(1, 6);
    const int ns = rng.uniform_int(1, 6);
    const bool ties = rep % 4 == 0;
    auto draw = [&] {
      return ties ? 0.25 * rng.uniform_int(-4, 4) : rng.uniform(-1.0, 1.0);
    };
    for (int i = 0; i < nb; ++i) s.bonafide.push_back(draw());
    for (int i = 0; i < ns; ++i) s.spoof.push_back(draw());

    const double eer = compute_eer(s).eer;
    const double oracle_eer = oracle::BruteForceMetrics::eer(s.bonafide, s.spoof);
    c.expect(eer == oracle_eer, "EER " + std::to_string(eer) + " != brute force " +
                                    std::to_string(oracle_eer) + " at rep " +
                                    std::to_string(rep));

    const double tdcf = min_tdcf_normalized(s, {1.0, 1.0});
    const double oracle_tdcf =
        oracle::BruteForceMetrics::min_tdcf_normalized(s.bonafide, s.spoof, 1.0, 1.0);
    c.expect(tdcf == oracle_tdcf, "min t-DCF " + std::to_string(tdcf) + " != brute force " +
                                      std::to_string(oracle_tdcf) + " at rep " +
                                      std::to_string(rep));
  }

  const ScoreSet worked{{0.8, 0.7, 0.3}, {0.2, 0.6, 0.4}};
  c.expect(compute_eer(worked).eer == 1.0 / 3.0, "worked 3+3 example: EER != 1/3");
  c.expect(min_tdcf_normalized(worked, {1.0, 1.0}) == 1.0 / 3.0,
           "worked 3+3 example: min t-DCF != 1/3");
  return c;
}

Criterion criterion_7_rank_invariance() {
  Criterion c;
  Rng rng(7707);
  const TdcfCosts costs{0.9405, 0.5};

  for (int rep = 0; rep < 100 && c.ok; ++rep) {
    ScoreSet s;
    const int nb = rng.uniform_int(2, 10);
    const int ns = rng.uniform_int(2, 10);
    for (int i = 0; i < nb; ++i) s.bonafide.push_back(rng.uniform(-2.0, 2.0));
    for (int i = 0; i < ns; ++i) s.spoof.push_back(rng.uniform(-2.0, 2.0));

    const double eer = compute_eer(s).eer;
    const double tdcf = min_tdcf_normalized(s, costs);

    for (int which = 0; which < 2; ++which) {
      ScoreSet mapped = s;
      auto f = [&](double v) { return which == 0 ? 2.0 * v + 1.0 : std::tanh(v); };
      for (auto& v : mapped.bonafide) v = f(v);
      for (auto& v : mapped.spoof) v = f(v);
      c.expect(compute_eer(mapped).eer == eer,
               std::string("EER changed under ") + (which == 0 ? "2x+1" : "tanh"));
      c.expect(min_tdcf_normalized(mapped, costs) == tdcf,
               std::string("min t-DCF changed under ") + (which == 0 ? "2x+1" : "tanh"));
    }
  }
  return c;
}

struct PipelineFiles {
  std::filesystem::path corpus, feats, weights, scores, log;
};

int run_pipeline(const std::filesystem::path& root, PipelineFiles& files) {
  files.corpus = root / "corpus";
  files.feats = root / "feats";
  files.weights = root / "model.sgw";
  files.scores = root / "dev_scores.txt";
  files.log = root / "cli.log";
  std::filesystem::create_directories(root);

  int rc = run_cli("synth --seed 7 --bonafide 80 --spoof 80 --out " + files.corpus.string(),
                   files.log);
  if (rc != 0) return rc;
  rc = run_cli("featurize --protocol " + (files.corpus / "train.txt").string() +
                   " --protocol " + (files.corpus / "dev.txt").string() + " --out " +
                   files.feats.string() + " --height 64 --width 64",
               files.log);
  if (rc != 0) return rc;
  rc = run_cli("train --protocol " + (files.corpus / "train.txt").string() + " --mels " +
                   files.feats.string() + " --out " + files.weights.string() +
                   " --preset tiny --epochs 8 --seed 7",
               files.log);
  if (rc != 0) return rc;
  rc = run_cli("score --protocol " + (files.corpus / "dev.txt").string() + " --mels " +
                   files.feats.string() + " --weights " + files.weights.string() + " --out " +
                   files.scores.string(),
               files.log);
  return rc;
}

Criterion criterion_8_end_to_end(const TempDir& scratch, PipelineFiles& files) {
  Criterion c;
  const auto start = Clock::now();

  const int rc = run_pipeline(scratch / "run1", files);
  c.expect(rc == 0, "pipeline stage failed with exit code " + std::to_string(rc));
  if (!c.ok) return c;

  const auto eval_log = scratch / "eval.log";
  const int eval_rc = run_cli("evaluate --protocol " + (files.corpus / "dev.txt").string() +
                                  " --scores " + files.scores.string(),
                              eval_log);
  c.expect(eval_rc == 0, "evaluate failed");

  std::ifstream in(eval_log);
  std::string line;
  double eer_percent = 1e9;
  while (std::getline(in, line)) {
    if (line.rfind("eer=", 0) == 0) eer_percent = std::stod(line.substr(4));
  }
  c.expect(eer_percent <= 5.0,
           "dev EER " + std::to_string(eer_percent) + "% exceeds the 5% gate");

  // Sanity: the protocol really is 100 train + 60 dev, scored one-to-one.
  c.expect(parse_protocol(files.corpus / "train.txt").size() == 100, "train split != 100");
  c.expect(parse_protocol(files.corpus / "dev.txt").size() == 60, "dev split != 60");
  c.expect(read_scores(files.scores).size() == 60,
           "score file line count != protocol trial count");

  c.expect(seconds_since(start) < 600.0, "runtime exceeded 10 minutes");
  return c;
}

Criterion criterion_9_determinism(const TempDir& scratch, const PipelineFiles& first) {
  Criterion c;

  PipelineFiles second;
  const int rc = run_pipeline(scratch / "run2", second);
  c.expect(rc == 0, "repeat pipeline failed with exit code " + std::to_string(rc));
  if (!c.ok) return c;

  c.expect(read_file(first.weights) == read_file(second.weights),
           "weight files differ between identical runs");
  c.expect(read_file(first.scores) == read_file(second.scores),
           "score files differ between identical runs");

  std::vector<std::filesystem::path> feats;
  for (const auto& entry : std::filesystem::directory_iterator(first.feats)) {
    if (entry.path().extension() == ".mels") feats.push_back(entry.path());
  }
  std::sort(feats.begin(), feats.end());
  c.expect(!feats.empty(), "no feature files produced");
  for (const auto& f : feats) {
    if (read_file(f) != read_file(second.feats / f.filename())) {
      c.expect(false, "feature file " + f.filename().string() + " differs between runs");
      break;
    }
  }
  return c;
}

Criterion criterion_10_format_round_trips() {
  Criterion c;
  TempDir dir("acc_formats");

  {  // MELS
    AudioBuffer buf;
    buf.sample_rate_hz = 16000;
    buf.source_id = "fmt";
    Rng rng(1);
    buf.samples.resize(9000);
    for (auto& v : buf.samples) v = static_cast<float>(rng.uniform(-0.5, 0.5));
    FrontEndConfig cfg;
    cfg.out_height = 32;
    cfg.out_width = 32;
    const MelSpectrogram mels = extract_mel_spectrogram(buf, cfg);

    write_mels(mels, dir / "a.mels");
    write_mels(read_mels(dir / "a.mels"), dir / "b.mels");
    c.expect(read_file(dir / "a.mels") == read_file(dir / "b.mels"),
             "MELS write-read-write is not byte-identical");

    auto bytes = read_file(dir / "a.mels");
    bytes[1] = 'X';
    write_file_atomic(dir / "bad.mels", bytes);
    try {
      read_mels(dir / "bad.mels");
      c.expect(false, "corrupted MELS magic accepted");
    } catch (const Error&) {
    }
  }

  {  // SGW1
    Network<float> net(NetworkConfig::tiny());
    net.init_parameters(10);
    save_weights(net, dir / "a.sgw");
    Network<float> back = load_network(dir / "a.sgw");
    save_weights(back, dir / "b.sgw");
    c.expect(read_file(dir / "a.sgw") == read_file(dir / "b.sgw"),
             "SGW1 write-read-write is not byte-identical");

    auto bytes = read_file(dir / "a.sgw");
    bytes[0] = 'Q';
    write_file_atomic(dir / "bad_magic.sgw", bytes);
    try {
      load_network(dir / "bad_magic.sgw");
      c.expect(false, "corrupted SGW1 magic accepted");
    } catch (const Error&) {
    }

    bytes = read_file(dir / "a.sgw");
    bytes[bytes.size() / 3] ^= 0x10;
    write_file_atomic(dir / "bad_crc.sgw", bytes);
    try {
      load_network(dir / "bad_crc.sgw");
      c.expect(false, "CRC corruption not detected");
    } catch (const Error&) {
    }
  }

  {  // protocol
    std::vector<Trial> trials;
    for (int i = 0; i < 20; ++i) {
      Trial t;
      t.speaker_id = "spk" + std::to_string(i % 3);
      t.utt_id = "utt" + std::to_string(i);
      t.key = i % 2 ? TrialKey::spoof : TrialKey::bonafide;
      if (t.key == TrialKey::spoof) {
        t.system_id = "REPLAY";
        t.attack_id = "R01";
      }
      trials.push_back(t);
    }
    write_protocol(trials, dir / "a.txt");
    write_protocol(parse_protocol(dir / "a.txt"), dir / "b.txt");
    c.expect(read_file(dir / "a.txt") == read_file(dir / "b.txt"),
             "protocol write-read-write is not byte-identical");
  }

  {  // scores
    Rng rng(2);
    std::vector<ScoreEntry> entries;
    for (int i = 0; i < 50; ++i) {
      entries.push_back({"utt" + std::to_string(i), rng.uniform(-9.0, 9.0)});
    }
    write_scores(entries, dir / "s_a.txt");
    write_scores(read_scores(dir / "s_a.txt"), dir / "s_b.txt");
    c.expect(read_file(dir / "s_a.txt") == read_file(dir / "s_b.txt"),
             "score write-read-write is not byte-identical");
  }
  return c;
}

}  // namespace

int main() {
  TempDir scratch("acceptance");
  PipelineFiles pipeline;

  std::vector<std::pair<std::string, std::function<Criterion()>>> criteria{
      {"criterion 1: Mel scale forward/inverse vs analytic formula",
       criterion_1_mel_scale},
      {"criterion 2: radix-2 FFT vs naive DFT + Parseval", criterion_2_fft_oracle},
      {"criterion 3: Mel filterbank vs pointwise triangle oracle",
       criterion_3_filterbank_oracle},
      {"criterion 4: finite-difference gradient suite (20 seeds/layer)",
       criterion_4_gradient_suite},
      {"criterion 5: residual zero-F identity and shortcut gradient",
       criterion_5_residual_identity},
      {"criterion 6: EER/min t-DCF vs exhaustive brute force", criterion_6_metrics_oracle},
      {"criterion 7: rank invariance under 2x+1 and tanh", criterion_7_rank_invariance},
      {"criterion 8: desk-scale synth->featurize->train->score->evaluate, dev EER <= 5%",
       [&] { return criterion_8_end_to_end(scratch, pipeline); }},
      {"criterion 9: bitwise determinism of features, weights, and scores",
       [&] { return criterion_9_determinism(scratch, pipeline); }},
      {"criterion 10: MELS/SGW1/protocol/score round-trips and corruption detection",
       criterion_10_format_round_trips},
  };

  int failures = 0;
  for (auto& [name, fn] : criteria) {
    Criterion result;
    try {
      result = fn();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    if (result.ok) {
      std::cout << "[PASS] " << name << "\n";
    } else {
      ++failures;
      std::cout << "[FAIL] " << name << " -- " << result.detail << "\n";
    }
    std::cout.flush();
  }

  if (failures == 0) {
    std::cout << "all 10 acceptance criteria passed\n";
  } else {
    std::cout << failures << " acceptance criterion(s) failed\n";
  }
  return failures;
}
