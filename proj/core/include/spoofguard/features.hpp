#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "spoofguard/audio.hpp"

namespace spoofguard {

// Front-end parameters. fmax_hz < 0 means "sample_rate / 2, resolved at
// extraction time".
struct FrontEndConfig {
  int n_fft = 2048;
  int hop = 512;
  int n_mels = 128;
  double fmin_hz = 0.0;
  double fmax_hz = -1.0;
  int out_height = 224;
  int out_width = 224;
  double db_floor = -80.0;

  double resolved_fmax(int sample_rate_hz) const;
  void validate(int sample_rate_hz) const;
};

// Dense 2-D grid of doubles, row-major. Working type of the front-end
// pipeline before the final 32-bit feature map.
struct Grid {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Grid() = default;
  Grid(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

// Decibel-scaled Mel feature map. Rows are Mel bands ordered highest band
// first (so exported images have frequency increasing upward), columns are
// time.
struct MelSpectrogram {
  int rows = 0;
  int cols = 0;
  std::vector<float> values;  // row-major
  FrontEndConfig config;
  int sample_rate_hz = 0;
  std::string source_id;

  float at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

// Mel = 2595 * log10(1 + hz/700). Rejects negative input.
double hz_to_mel(double f_hz);

// Hz = 700 * (10^(mel/2595) - 1). Exact inverse of hz_to_mel.
double mel_to_hz(double mel);

// Periodic Hann window, w[i] = 0.5 * (1 - cos(2*pi*i/n)), n >= 2.
std::vector<double> hann_window(int n);

// Frames at offsets 0, hop, 2*hop, ... Each frame lies fully inside the
// signal; a signal shorter than n_fft yields one zero-padded frame.
std::vector<std::vector<double>> frame_signal(std::span<const float> samples,
                                              int n_fft, int hop);

// Triangular Mel filterbank, n_mels x (n_fft/2 + 1). Break frequencies are
// equally spaced on the Mel scale between fmin and fmax; triangles are
// unnormalized (apex weight 1). A filter whose support covers no FFT bin is
// a configuration error.
std::vector<std::vector<double>> mel_filterbank(const FrontEndConfig& cfg,
                                                int sample_rate_hz);

// Per-filter center frequencies in Hz (break point k+1 of filter k).
std::vector<double> mel_filter_centers_hz(const FrontEndConfig& cfg,
                                          int sample_rate_hz);

// Decibels relative to the grid maximum: 10*log10(S/max(S)) with the ratio
// floored at 1e-10, then clamped below at db_floor. The result is scale
// invariant, tops out at 0 dB for any non-degenerate input, and maps an
// all-zero grid uniformly to db_floor. Negative power values are rejected.
Grid power_to_db(const Grid& power, double db_floor);

// Center-aligned bilinear resampling with edge clamp: source coordinate of
// output row i is (i + 0.5) * rows / out_h - 0.5.
Grid resize_bilinear(const Grid& in, int out_h, int out_w);

// The pre-dB stage of the pipeline: frame -> Hann window -> fft_power ->
// filterbank multiply. Row 0 of the result is the highest Mel band.
Grid mel_power_grid(const AudioBuffer& buf, const FrontEndConfig& cfg);

// Full front-end: mel_power_grid -> power_to_db -> resize to
// (out_height, out_width).
MelSpectrogram extract_mel_spectrogram(const AudioBuffer& buf, const FrontEndConfig& cfg);

// Binary PGM (P5), 8-bit: pixel = round(255 * (v - db_floor) / -db_floor).
// Row 0 of the grid is written as the top image row.
void export_pgm(const MelSpectrogram& mels, const std::filesystem::path& path);

// "MELS" v1 feature file: magic, u32 version, u32 rows, u32 cols, f32
// values row-major, then a u32-length-prefixed key=value metadata block.
// Round-trips bit-exactly.
void write_mels(const MelSpectrogram& mels, const std::filesystem::path& path);
MelSpectrogram read_mels(const std::filesystem::path& path);

}  // namespace spoofguard
