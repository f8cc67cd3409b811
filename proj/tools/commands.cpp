#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "spoofguard/binio.hpp"
#include "spoofguard/error.hpp"
#include "spoofguard/trainer.hpp"
#include "spoofguard/version.hpp"
#include "spoofguard/weights_io.hpp"

namespace spoofguard::cli {

namespace {

using Clock = std::chrono::steady_clock;

using Fields = std::vector<std::pair<std::string, std::string>>;

void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const Fields& fields, Clock::time_point started) {
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);

  std::ofstream out(dir / "MANIFEST", std::ios::app);
  if (!out) {
    std::cerr << "warning: cannot append manifest in " << dir << "\n";
    return;
  }
  out << "command=" << command << "\n";
  for (const auto& [k, v] : fields) out << k << "=" << v << "\n";
  out << "tool_version=" << kVersion << "\n";
  out << "duration_ms=" << elapsed.count() << "\n\n";
}

// Runs fn(i) for i in [0, n) on `workers` threads. The first exception
// wins and is rethrown after all workers have drained.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };

  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string path_str(const std::filesystem::path& p) { return p.string(); }

}  // namespace

int worker_count(std::size_t jobs) {
  int cap = 0;
  if (const char* env = std::getenv("SPOOFGUARD_THREADS")) {
    cap = std::atoi(env);
  }
  if (cap <= 0) {
    cap = static_cast<int>(std::thread::hardware_concurrency());
    if (cap <= 0) cap = 1;
  }
  return static_cast<int>(std::min<std::size_t>(cap, std::max<std::size_t>(jobs, 1)));
}

int run_synth(const SynthArgs& args) {
  const auto started = Clock::now();
  const CorpusLayout layout = build_corpus(args.config, args.out_dir);

  Fields fields{
      {"seed", std::to_string(args.config.seed)},
      {"n_bonafide", std::to_string(args.config.n_bonafide)},
      {"n_spoof", std::to_string(args.config.n_spoof)},
      {"sample_rate_hz", std::to_string(args.config.sample_rate_hz)},
      {"dev_fraction", format_double(args.config.dev_fraction)},
      {"reverb_decay_s", format_double(args.config.reverb_decay_s)},
      {"requant_bits", std::to_string(args.config.requant_bits)},
      {"out", path_str(args.out_dir)},
      {"train_protocol", path_str(layout.train_protocol)},
      {"dev_protocol", path_str(layout.dev_protocol)},
  };
  write_manifest(args.out_dir, "synth", fields, started);

  std::cout << "synth: wrote " << args.config.n_bonafide + args.config.n_spoof
            << " utterances under " << args.out_dir.string() << "\n";
  return 0;
}

int run_featurize(const FeaturizeArgs& args) {
  const auto started = Clock::now();
  require(!args.protocols.empty(), "featurize: need at least one --protocol");

  const std::filesystem::path wav_dir =
      args.wav_dir.empty() ? args.protocols.front().parent_path() / "wav" : args.wav_dir;

  std::vector<Trial> trials;
  for (const auto& protocol : args.protocols) {
    auto part = parse_protocol(protocol);
    trials.insert(trials.end(), part.begin(), part.end());
  }
  require(!trials.empty(), "featurize: protocols list no trials");

  std::filesystem::create_directories(args.out_dir);

  std::vector<std::filesystem::path> outputs;
  for (const auto& t : trials) {
    outputs.push_back(args.out_dir / (t.utt_id + ".mels"));
  }

  try {
    parallel_for(trials.size(), worker_count(trials.size()), [&](std::size_t i) {
      const AudioBuffer buf = read_wav(wav_dir / (trials[i].utt_id + ".wav"));
      const MelSpectrogram mels = extract_mel_spectrogram(buf, args.front_end);
      write_mels(mels, outputs[i]);
      if (args.export_pgm) {
        export_pgm(mels, args.out_dir / (trials[i].utt_id + ".pgm"));
      }
    });
  } catch (...) {
    // Leave no partial artifact set behind.
    for (std::size_t i = 0; i < trials.size(); ++i) {
      std::error_code ec;
      std::filesystem::remove(outputs[i], ec);
      if (args.export_pgm) {
        std::filesystem::remove(args.out_dir / (trials[i].utt_id + ".pgm"), ec);
      }
    }
    throw;
  }

  Fields fields{
      {"protocols", std::to_string(args.protocols.size())},
      {"wav_dir", path_str(wav_dir)},
      {"out", path_str(args.out_dir)},
      {"n_fft", std::to_string(args.front_end.n_fft)},
      {"hop", std::to_string(args.front_end.hop)},
      {"n_mels", std::to_string(args.front_end.n_mels)},
      {"out_height", std::to_string(args.front_end.out_height)},
      {"out_width", std::to_string(args.front_end.out_width)},
      {"db_floor", format_double(args.front_end.db_floor)},
      {"pgm", args.export_pgm ? "1" : "0"},
      {"utterances", std::to_string(trials.size())},
  };
  write_manifest(args.out_dir, "featurize", fields, started);

  std::cout << "featurize: wrote " << trials.size() << " feature files to "
            << args.out_dir.string() << "\n";
  return 0;
}

int run_train(const TrainArgs& args) {
  const auto started = Clock::now();

  NetworkConfig net_cfg = NetworkConfig::from_preset(args.preset);
  net_cfg.in_channels = args.in_channels;

  const std::vector<Trial> trials = parse_protocol(args.protocol);
  require(!trials.empty(), "train: protocol lists no trials");

  FeatureDataset dataset;
  for (const auto& t : trials) {
    const auto mels_path = args.mels_dir / (t.utt_id + ".mels");
    if (!std::filesystem::exists(mels_path)) {
      fail("train: missing features for protocol entry '" + t.utt_id + "' (" +
           mels_path.string() + ")");
    }
    dataset.add(read_mels(mels_path), t.key == TrialKey::bonafide ? 1 : 0);
  }

  Network<float> net(net_cfg);
  net.init_parameters(args.seed);

  TrainRunConfig run;
  run.epochs = args.epochs;
  run.batch_size = args.batch_size;
  run.seed = args.seed;
  run.lr = args.lr;
  run.checkpoint_path = args.out_weights;

  const TrainResult result = train(net, dataset, run, [](int epoch, double loss) {
    std::cout << "epoch=" << epoch + 1 << " loss=" << format_fixed(loss, 6) << "\n";
  });

  std::string loss_log;
  for (std::size_t e = 0; e < result.epoch_losses.size(); ++e) {
    loss_log += "epoch=" + std::to_string(e + 1) +
                " loss=" + format_fixed(result.epoch_losses[e], 6) + "\n";
  }
  const std::filesystem::path loss_path = args.out_weights.string() + ".loss.txt";
  write_file_atomic(loss_path, std::span(reinterpret_cast<const std::uint8_t*>(loss_log.data()),
                                         loss_log.size()));

  Fields fields{
      {"protocol", path_str(args.protocol)},
      {"mels", path_str(args.mels_dir)},
      {"preset", args.preset},
      {"epochs", std::to_string(args.epochs)},
      {"batch_size", std::to_string(args.batch_size)},
      {"lr", format_double(args.lr)},
      {"seed", std::to_string(args.seed)},
      {"utterances", std::to_string(trials.size())},
      {"out", path_str(args.out_weights)},
      {"loss_log", path_str(loss_path)},
  };
  write_manifest(args.out_weights.parent_path().empty() ? "." : args.out_weights.parent_path(),
                 "train", fields, started);

  std::cout << "train: wrote weights to " << args.out_weights.string() << "\n";
  return 0;
}

int run_score(const ScoreArgs& args) {
  const auto started = Clock::now();

  Network<float> net = load_network(args.weights);
  const std::vector<Trial> trials = parse_protocol(args.protocol);
  require(!trials.empty(), "score: protocol lists no trials");

  std::vector<ScoreEntry> entries;
  entries.reserve(trials.size());
  for (const auto& t : trials) {
    const auto mels_path = args.mels_dir / (t.utt_id + ".mels");
    if (!std::filesystem::exists(mels_path)) {
      fail("score: missing features for protocol entry '" + t.utt_id + "'");
    }
    entries.push_back({t.utt_id, score_utterance(net, read_mels(mels_path))});
  }
  write_scores(entries, args.out_scores);

  Fields fields{
      {"protocol", path_str(args.protocol)},
      {"mels", path_str(args.mels_dir)},
      {"weights", path_str(args.weights)},
      {"utterances", std::to_string(trials.size())},
      {"out", path_str(args.out_scores)},
  };
  write_manifest(args.out_scores.parent_path().empty() ? "." : args.out_scores.parent_path(),
                 "score", fields, started);

  std::cout << "score: wrote " << entries.size() << " scores to "
            << args.out_scores.string() << "\n";
  return 0;
}

int run_evaluate(const EvaluateArgs& args) {
  const auto started = Clock::now();
  require(args.have_c1 == args.have_c2, "evaluate: --c1 and --c2 must be given together");

  const std::vector<Trial> trials = parse_protocol(args.protocol);
  const std::vector<ScoreEntry> entries = read_scores(args.scores);
  const ScoreSet scores = join_scores(trials, entries);

  const TdcfCosts costs =
      args.have_c1 ? TdcfCosts{args.c1, args.c2} : tdcf_constants(args.params);
  const EerResult eer = compute_eer(scores);
  const double min_tdcf = min_tdcf_normalized(scores, costs);

  std::string report;
  report += "eer=" + format_fixed(eer.eer * 100.0, 4) + "\n";
  report += "min_tdcf=" + format_fixed(min_tdcf, 6) + "\n";
  report += "threshold=" + format_fixed(eer.threshold, 6) + "\n";
  report += "c1=" + format_fixed(costs.c1, 6) + "\n";
  report += "c2=" + format_fixed(costs.c2, 6) + "\n";
  report += "trials_bonafide=" + std::to_string(scores.bonafide.size()) + "\n";
  report += "trials_spoof=" + std::to_string(scores.spoof.size()) + "\n";
  std::cout << report;

  std::filesystem::path manifest_dir = args.scores.parent_path();
  if (!args.out_report.empty()) {
    write_file_atomic(args.out_report,
                      std::span(reinterpret_cast<const std::uint8_t*>(report.data()),
                                report.size()));
    manifest_dir = args.out_report.parent_path();
  }

  Fields fields{
      {"protocol", path_str(args.protocol)},
      {"scores", path_str(args.scores)},
      {"c1", format_double(costs.c1)},
      {"c2", format_double(costs.c2)},
      {"eer_percent", format_fixed(eer.eer * 100.0, 4)},
      {"min_tdcf", format_fixed(min_tdcf, 6)},
  };
  write_manifest(manifest_dir.empty() ? "." : manifest_dir, "evaluate", fields, started);
  return 0;
}

}  // namespace spoofguard::cli
