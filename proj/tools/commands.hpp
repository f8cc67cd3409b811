#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spoofguard/data.hpp"
#include "spoofguard/features.hpp"

namespace spoofguard::cli {

// Each command writes exactly one manifest block (append-only MANIFEST
// file next to its primary output) and either produces its artifact
// completely or leaves nothing behind.

struct SynthArgs {
  SynthConfig config;
  std::filesystem::path out_dir;
};
int run_synth(const SynthArgs& args);

struct FeaturizeArgs {
  std::vector<std::filesystem::path> protocols;
  std::filesystem::path wav_dir;  // empty: wav/ next to the first protocol
  std::filesystem::path out_dir;
  FrontEndConfig front_end;
  bool export_pgm = false;
};
int run_featurize(const FeaturizeArgs& args);

struct TrainArgs {
  std::filesystem::path protocol;
  std::filesystem::path mels_dir;
  std::filesystem::path out_weights;
  std::string preset = "resnet34";
  int in_channels = 1;
  int epochs = 8;
  int batch_size = 64;
  double lr = 1e-3;
  std::uint64_t seed = 0;
};
int run_train(const TrainArgs& args);

struct ScoreArgs {
  std::filesystem::path protocol;
  std::filesystem::path mels_dir;
  std::filesystem::path weights;
  std::filesystem::path out_scores;
};
int run_score(const ScoreArgs& args);

struct EvaluateArgs {
  std::filesystem::path protocol;
  std::filesystem::path scores;
  std::filesystem::path out_report;  // optional
  // Direct cost overrides; both or neither.
  bool have_c1 = false, have_c2 = false;
  double c1 = 0.0, c2 = 0.0;
  TdcfParameters params;
};
int run_evaluate(const EvaluateArgs& args);

// Worker cap for per-utterance fan-out: SPOOFGUARD_THREADS when set,
// otherwise the hardware concurrency, never more than `jobs`.
int worker_count(std::size_t jobs);

}  // namespace spoofguard::cli
