#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace spoofguard {

// Mono waveform in [-1, 1]. The native sample rate travels with the data;
// nothing downstream assumes 16 kHz.
struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate_hz = 0;
  std::string source_id;
};

// Reads a RIFF/WAVE file with PCM16 or IEEE-float32 samples, 1 or 2
// channels. Chunks may come in any order and unknown chunks are skipped,
// but `fmt ` must precede `data`. Stereo is averaged to mono. PCM16
// sample s maps to s/32768; float samples are clamped to [-1, 1].
// Malformed input is rejected with the byte offset of the problem.
AudioBuffer read_wav(const std::filesystem::path& path);

// Writes mono PCM16. Samples are quantized as clamp(round(s * 32768),
// -32768, 32767), the inverse of the read_wav scaling to within 1/32768.
void write_wav_pcm16(const AudioBuffer& buf, const std::filesystem::path& path);

// Scales so the former peak maps to exactly +/-1. All-zero input is
// returned unchanged. Idempotent.
AudioBuffer peak_normalize(AudioBuffer buf);

// Throws unless the buffer satisfies the AudioBuffer invariants.
void validate(const AudioBuffer& buf);

}  // namespace spoofguard
