#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spoofguard/audio.hpp"
#include "spoofguard/metrics.hpp"

namespace spoofguard {

enum class TrialKey { bonafide, spoof };

const char* to_string(TrialKey key);

// One protocol line: speaker, utterance, system, attack, key. The field
// layout matches the public ASVspoof 2019 convention, so real protocol
// files parse unchanged.
struct Trial {
  std::string speaker_id;
  std::string utt_id;
  std::string system_id = "-";
  std::string attack_id = "-";
  TrialKey key = TrialKey::bonafide;
};

// Five whitespace-separated fields per non-empty line; duplicate utt_ids
// and unknown key labels are rejected with the line number.
std::vector<Trial> parse_protocol(const std::filesystem::path& path);
void write_protocol(const std::vector<Trial>& trials, const std::filesystem::path& path);

struct ScoreEntry {
  std::string utt_id;
  double score = 0.0;
};

// Lines of "<utt_id> <score>"; scores round-trip to 6 decimal places.
std::vector<ScoreEntry> read_scores(const std::filesystem::path& path);
void write_scores(const std::vector<ScoreEntry>& entries, const std::filesystem::path& path);

enum class MissingScorePolicy { error, skip };

// Joins scores with a protocol by utt_id. A score naming an unknown
// utterance is always an error; a protocol trial without a score follows
// the policy (silently dropping trials skews EER, so the default is hard
// error).
ScoreSet join_scores(const std::vector<Trial>& trials,
                     const std::vector<ScoreEntry>& entries,
                     MissingScorePolicy policy = MissingScorePolicy::error);

// Synthetic desk-scale corpus. Bona fide utterances are seeded harmonic
// voices; spoofed utterances are the same voices pushed through a replay
// channel (bandpass, exponentially decaying reverb, requantization).
// n_bonafide/n_spoof are corpus totals, split train/dev by dev_fraction.
struct SynthConfig {
  std::uint64_t seed = 0;
  int n_bonafide = 50;
  int n_spoof = 50;
  int sample_rate_hz = 16000;
  double min_duration_s = 2.0;
  double max_duration_s = 4.0;
  double bandpass_low_hz = 300.0;
  double bandpass_high_hz = 3400.0;
  double reverb_decay_s = 0.3;
  int requant_bits = 12;
  double dev_fraction = 0.375;

  void validate() const;
};

// Fully deterministic in (seed, index, label): the per-utterance stream is
// derived by hashing, so generation parallelizes without coordination.
AudioBuffer synth_utterance(const SynthConfig& cfg, int index, TrialKey label);

struct CorpusLayout {
  std::filesystem::path train_protocol;
  std::filesystem::path dev_protocol;
  std::filesystem::path wav_dir;
};

// Emits train.txt, dev.txt and one PCM16 WAV per utterance under
// out_dir/wav/. Train and dev speaker id sets are disjoint.
CorpusLayout build_corpus(const SynthConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace spoofguard
