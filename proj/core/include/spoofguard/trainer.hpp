#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "spoofguard/features.hpp"
#include "spoofguard/network.hpp"
#include "spoofguard/optimizer.hpp"

namespace spoofguard {

// In-memory training/scoring set: one normalized feature grid per
// utterance. Labels: 0 = spoof, 1 = bonafide.
struct FeatureDataset {
  int height = 0;
  int width = 0;
  std::vector<std::vector<float>> grids;  // row-major, values in [0, 1]
  std::vector<int> labels;
  std::vector<std::string> utt_ids;

  std::size_t size() const { return grids.size(); }
  void add(const MelSpectrogram& mels, int label);
};

// dB values mapped to [0, 1] against the recorded floor, replicated across
// in_channels. Shape [1, in_channels, rows, cols].
Tensor<float> input_from_spectrogram(const MelSpectrogram& mels, int in_channels);

struct TrainRunConfig {
  int epochs = 8;
  int batch_size = 64;
  std::uint64_t seed = 0;
  double lr = kScratchLearningRate;
  std::filesystem::path checkpoint_path;  // written after every epoch when set
};

struct TrainResult {
  std::vector<double> epoch_losses;  // mean loss per epoch, in epoch order
};

// Seeded-shuffle minibatch training with Adam. The batch traversal order is
// a pure function of the seed, so identical runs produce bitwise identical
// weights. Rejects empty and single-class datasets.
TrainResult train(Network<float>& net, const FeatureDataset& dataset,
                  const TrainRunConfig& run,
                  const std::function<void(int, double)>& on_epoch = {});

// Detection score: logit(bonafide) - logit(spoof); higher means more bona
// fide. Runs the network in eval mode.
double score_utterance(Network<float>& net, const MelSpectrogram& mels);

}  // namespace spoofguard
