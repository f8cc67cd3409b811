#include "spoofguard/audio.hpp"

#include <algorithm>
#include <cmath>

#include "spoofguard/binio.hpp"
#include "spoofguard/error.hpp"

namespace spoofguard {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatIeeeFloat = 0x0003;

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
};

FmtChunk parse_fmt(ByteReader& r, std::uint32_t chunk_size) {
  if (chunk_size < 16) r.fail_at("fmt chunk too short (" + std::to_string(chunk_size) + " bytes)");
  FmtChunk fmt;
  fmt.format = r.u16();
  fmt.channels = r.u16();
  fmt.sample_rate = r.u32();
  r.u32();  // byte rate
  r.u16();  // block align
  fmt.bits_per_sample = r.u16();

  if (fmt.format != kFormatPcm && fmt.format != kFormatIeeeFloat) {
    r.fail_at("unsupported encoding " + std::to_string(fmt.format) +
              " (PCM16 and IEEE-float32 only)");
  }
  if (fmt.format == kFormatPcm && fmt.bits_per_sample != 16) {
    r.fail_at("unsupported PCM bit depth " + std::to_string(fmt.bits_per_sample));
  }
  if (fmt.format == kFormatIeeeFloat && fmt.bits_per_sample != 32) {
    r.fail_at("unsupported float bit depth " + std::to_string(fmt.bits_per_sample));
  }
  if (fmt.channels != 1 && fmt.channels != 2) {
    r.fail_at("unsupported channel count " + std::to_string(fmt.channels));
  }
  if (fmt.sample_rate == 0) r.fail_at("zero sample rate");

  r.skip(chunk_size - 16);
  return fmt;
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> raw = read_file(path);
  ByteReader r(raw, path.string());

  if (r.str(4) != "RIFF") {
    ByteReader at(raw, path.string());
    at.fail_at("bad RIFF magic");
  }
  r.u32();  // declared RIFF size; files in the wild lie about it, ignore
  if (r.str(4) != "WAVE") {
    fail(path.string() + ": bad WAVE magic at offset 8");
  }

  FmtChunk fmt;
  bool have_fmt = false;
  AudioBuffer buf;
  buf.source_id = path.stem().string();

  while (!r.exhausted()) {
    if (r.remaining() < 8) r.fail_at("truncated chunk header");
    const std::string id = r.str(4);
    const std::uint32_t size = r.u32();

    if (id == "fmt ") {
      fmt = parse_fmt(r, size);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) r.fail_at("data chunk before fmt chunk");
      if (size > r.remaining()) r.fail_at("truncated data chunk");

      const int bytes_per_sample = fmt.bits_per_sample / 8;
      const std::uint32_t frame_bytes =
          static_cast<std::uint32_t>(bytes_per_sample) * fmt.channels;
      const std::uint32_t n_frames = size / frame_bytes;
      if (n_frames == 0) r.fail_at("empty data chunk");

      buf.samples.reserve(n_frames);
      for (std::uint32_t i = 0; i < n_frames; ++i) {
        double acc = 0.0;
        for (std::uint16_t c = 0; c < fmt.channels; ++c) {
          if (fmt.format == kFormatPcm) {
            acc += static_cast<double>(r.i16()) / 32768.0;
          } else {
            const float v = r.f32();
            if (!std::isfinite(v)) r.fail_at("non-finite float sample");
            acc += std::clamp(v, -1.0f, 1.0f);
          }
        }
        buf.samples.push_back(static_cast<float>(acc / fmt.channels));
      }
      r.skip(size - n_frames * frame_bytes);
      buf.sample_rate_hz = static_cast<int>(fmt.sample_rate);
      if (size % 2 == 1 && r.remaining() > 0) r.skip(1);  // chunk padding
    } else {
      // Unknown chunk: skip payload plus the pad byte that keeps chunks
      // 2-byte aligned.
      if (size > r.remaining()) r.fail_at("truncated '" + id + "' chunk");
      r.skip(size);
      if (size % 2 == 1 && r.remaining() > 0) r.skip(1);
    }
  }

  if (!have_fmt) fail(path.string() + ": missing fmt chunk");
  if (buf.samples.empty()) fail(path.string() + ": missing data chunk");
  validate(buf);
  return buf;
}

void write_wav_pcm16(const AudioBuffer& buf, const std::filesystem::path& path) {
  validate(buf);
  ByteWriter w;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(buf.samples.size()) * 2;

  w.str("RIFF");
  w.u32(36 + data_bytes);
  w.str("WAVE");

  w.str("fmt ");
  w.u32(16);
  w.u16(kFormatPcm);
  w.u16(1);  // mono
  w.u32(static_cast<std::uint32_t>(buf.sample_rate_hz));
  w.u32(static_cast<std::uint32_t>(buf.sample_rate_hz) * 2);  // byte rate
  w.u16(2);                                                   // block align
  w.u16(16);

  w.str("data");
  w.u32(data_bytes);
  for (float s : buf.samples) {
    const long q = std::lround(static_cast<double>(s) * 32768.0);
    w.i16(static_cast<std::int16_t>(std::clamp<long>(q, -32768, 32767)));
  }

  write_file_atomic(path, w.data());
}

AudioBuffer peak_normalize(AudioBuffer buf) {
  float peak = 0.0f;
  for (float s : buf.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.0f) {
    // Division by the peak itself makes the former peak exactly +/-1.
    for (float& s : buf.samples) s /= peak;
  }
  return buf;
}

void validate(const AudioBuffer& buf) {
  require(!buf.samples.empty(), "audio buffer is empty");
  require(buf.sample_rate_hz > 0, "audio sample rate must be positive");
  for (float s : buf.samples) {
    if (!std::isfinite(s) || s < -1.0f || s > 1.0f) {
      fail("audio sample out of range [-1, 1]: " + std::to_string(s));
    }
  }
}

}  // namespace spoofguard
