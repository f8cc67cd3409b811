#include "spoofguard/trainer.hpp"

#include <algorithm>

#include "spoofguard/rng.hpp"
#include "spoofguard/weights_io.hpp"

namespace spoofguard {

void FeatureDataset::add(const MelSpectrogram& mels, int label) {
  require(label == 0 || label == 1, "dataset label must be 0 (spoof) or 1 (bonafide)");
  if (grids.empty()) {
    height = mels.rows;
    width = mels.cols;
  } else {
    require(mels.rows == height && mels.cols == width,
            "dataset feature shapes are inconsistent: got " + std::to_string(mels.rows) +
                "x" + std::to_string(mels.cols) + " for '" + mels.source_id + "'");
  }

  const double floor = mels.config.db_floor;
  std::vector<float> grid(mels.values.size());
  for (std::size_t i = 0; i < mels.values.size(); ++i) {
    const double v01 = (static_cast<double>(mels.values[i]) - floor) / (0.0 - floor);
    grid[i] = static_cast<float>(std::clamp(v01, 0.0, 1.0));
  }
  grids.push_back(std::move(grid));
  labels.push_back(label);
  utt_ids.push_back(mels.source_id);
}

Tensor<float> input_from_spectrogram(const MelSpectrogram& mels, int in_channels) {
  Tensor<float> x({1, in_channels, mels.rows, mels.cols});
  const double floor = mels.config.db_floor;
  for (int r = 0; r < mels.rows; ++r) {
    for (int c = 0; c < mels.cols; ++c) {
      const double v01 = (static_cast<double>(mels.at(r, c)) - floor) / (0.0 - floor);
      const float v = static_cast<float>(std::clamp(v01, 0.0, 1.0));
      for (int ch = 0; ch < in_channels; ++ch) x.at4(0, ch, r, c) = v;
    }
  }
  return x;
}

namespace {

Tensor<float> batch_tensor(const FeatureDataset& ds, std::span<const int> indices,
                           int in_channels) {
  Tensor<float> x({static_cast<int>(indices.size()), in_channels, ds.height, ds.width});
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const auto& grid = ds.grids[indices[b]];
    for (int ch = 0; ch < in_channels; ++ch) {
      std::copy(grid.begin(), grid.end(),
                x.data.begin() +
                    (static_cast<std::size_t>(b) * in_channels + ch) * grid.size());
    }
  }
  return x;
}

}  // namespace

TrainResult train(Network<float>& net, const FeatureDataset& dataset,
                  const TrainRunConfig& run,
                  const std::function<void(int, double)>& on_epoch) {
  require(run.epochs >= 1, "epochs must be >= 1");
  require(run.batch_size >= 1, "batch_size must be >= 1");
  require(dataset.size() > 0, "training dataset is empty");
  require(dataset.height == net.config().input_hw && dataset.width == net.config().input_hw,
          "dataset feature size " + std::to_string(dataset.height) + "x" +
              std::to_string(dataset.width) + " does not match network input " +
              std::to_string(net.config().input_hw));

  const bool has_bona = std::find(dataset.labels.begin(), dataset.labels.end(), 1) !=
                        dataset.labels.end();
  const bool has_spoof = std::find(dataset.labels.begin(), dataset.labels.end(), 0) !=
                         dataset.labels.end();
  require(has_bona && has_spoof, "training dataset must contain both classes");

  auto params = net.parameters();
  AdamState<float> opt;
  opt.config.lr = run.lr;
  opt.init(params);

  std::vector<int> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  TrainResult result;
  for (int epoch = 0; epoch < run.epochs; ++epoch) {
    Rng rng(Rng::mix({run.seed, 0x73687566ULL, static_cast<std::uint64_t>(epoch)}));
    deterministic_shuffle(order, rng);

    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += run.batch_size) {
      const std::size_t end = std::min(order.size(), start + run.batch_size);
      const std::span<const int> batch(order.data() + start, end - start);

      Tensor<float> x = batch_tensor(dataset, batch, net.config().in_channels);
      std::vector<int> labels(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i) labels[i] = dataset.labels[batch[i]];

      net.zero_grads();
      Tensor<float> logits = net.forward(x, /*train=*/true);
      LossResult<float> loss = softmax_cross_entropy<float>(logits, labels);
      net.backward(loss.grad_logits);
      adam_step(params, opt);

      epoch_loss += loss.loss * static_cast<double>(batch.size());
      seen += batch.size();
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(seen));

    if (!run.checkpoint_path.empty()) save_weights(net, run.checkpoint_path);
    if (on_epoch) on_epoch(epoch, result.epoch_losses.back());
  }
  return result;
}

double score_utterance(Network<float>& net, const MelSpectrogram& mels) {
  require(mels.rows == net.config().input_hw && mels.cols == net.config().input_hw,
          "feature size " + std::to_string(mels.rows) + "x" + std::to_string(mels.cols) +
              " does not match network input " + std::to_string(net.config().input_hw));
  const Tensor<float> x = input_from_spectrogram(mels, net.config().in_channels);
  const Tensor<float> logits = net.forward(x, /*train=*/false);
  return static_cast<double>(logits.at2(0, 1)) - static_cast<double>(logits.at2(0, 0));
}

}  // namespace spoofguard
