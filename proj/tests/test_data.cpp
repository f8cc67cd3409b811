#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "spoofguard/binio.hpp"
#include "spoofguard/data.hpp"
#include "spoofguard/error.hpp"
#include "spoofguard/fft.hpp"
#include "spoofguard/rng.hpp"
#include "support/helpers.hpp"

using namespace spoofguard;

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                    text.size()));
}

}  // namespace

TEST_CASE("parse_protocol") {
  TempDir dir("proto");

  SUBCASE("parses the 5-field layout") {
    write_text(dir / "p.txt",
               "LA_0079 LA_T_1138215 - - bonafide\n"
               "LA_0079 LA_T_1271820 - A01 spoof\n");
    const auto trials = parse_protocol(dir / "p.txt");
    REQUIRE(trials.size() == 2);
    CHECK(trials[0].speaker_id == "LA_0079");
    CHECK(trials[0].utt_id == "LA_T_1138215");
    CHECK(trials[0].key == TrialKey::bonafide);
    CHECK(trials[1].attack_id == "A01");
    CHECK(trials[1].key == TrialKey::spoof);
  }
  SUBCASE("tolerates CRLF line endings") {
    write_text(dir / "crlf.txt", "spk utt - - bonafide\r\nspk utt2 - A01 spoof\r\n");
    const auto trials = parse_protocol(dir / "crlf.txt");
    REQUIRE(trials.size() == 2);
    CHECK(trials[1].key == TrialKey::spoof);
  }
  SUBCASE("wrong field count names the line") {
    write_text(dir / "bad.txt", "spk utt - bonafide\n");
    CHECK_THROWS_WITH_AS(parse_protocol(dir / "bad.txt"), doctest::Contains(":1:"), Error);
  }
  SUBCASE("unknown key label rejected") {
    write_text(dir / "key.txt", "spk utt - - genuine\n");
    CHECK_THROWS_WITH_AS(parse_protocol(dir / "key.txt"),
                         doctest::Contains("unknown key label"), Error);
  }
  SUBCASE("duplicate utt_id rejected") {
    write_text(dir / "dup.txt",
               "spk utt1 - - bonafide\n"
               "spk utt1 - - spoof\n");
    CHECK_THROWS_WITH_AS(parse_protocol(dir / "dup.txt"), doctest::Contains("duplicate"),
                         Error);
  }
  SUBCASE("per-label counts at the real corpus scale") {
    std::string text;
    for (int i = 0; i < 2580; ++i) {
      text += "spk bona_" + std::to_string(i) + " - - bonafide\n";
    }
    for (int i = 0; i < 22800; ++i) {
      text += "spk spoof_" + std::to_string(i) + " - A0" + std::to_string(i % 6 + 1) +
              " spoof\n";
    }
    write_text(dir / "big.txt", text);
    const auto trials = parse_protocol(dir / "big.txt");
    const auto bona = std::count_if(trials.begin(), trials.end(), [](const Trial& t) {
      return t.key == TrialKey::bonafide;
    });
    CHECK(bona == 2580);
    CHECK(static_cast<int>(trials.size()) - bona == 22800);
  }
  SUBCASE("parse -> write -> parse is the identity") {
    write_text(dir / "id.txt",
               "spkA u1 - - bonafide\n"
               "spkB u2 SYS A03 spoof\n"
               "spkA u3 - - bonafide\n");
    const auto first = parse_protocol(dir / "id.txt");
    write_protocol(first, dir / "round.txt");
    const auto second = parse_protocol(dir / "round.txt");
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
      CHECK(first[i].speaker_id == second[i].speaker_id);
      CHECK(first[i].utt_id == second[i].utt_id);
      CHECK(first[i].system_id == second[i].system_id);
      CHECK(first[i].attack_id == second[i].attack_id);
      CHECK(first[i].key == second[i].key);
    }
    // Canonical writers round-trip byte-identically.
    write_protocol(second, dir / "round2.txt");
    CHECK(read_file(dir / "round.txt") == read_file(dir / "round2.txt"));
  }
}

TEST_CASE("score files") {
  TempDir dir("scores");

  SUBCASE("basic parse") {
    write_text(dir / "s.txt", "utt1 1.25\nutt2 -0.5\n");
    const auto entries = read_scores(dir / "s.txt");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].utt_id == "utt1");
    CHECK(entries[0].score == doctest::Approx(1.25));
    CHECK(entries[1].score == doctest::Approx(-0.5));
  }
  SUBCASE("malformed lines rejected") {
    write_text(dir / "bad1.txt", "utt1\n");
    CHECK_THROWS_AS(read_scores(dir / "bad1.txt"), Error);
    write_text(dir / "bad2.txt", "utt1 abc\n");
    CHECK_THROWS_AS(read_scores(dir / "bad2.txt"), Error);
    write_text(dir / "bad3.txt", "utt1 1.0 extra\n");
    CHECK_THROWS_AS(read_scores(dir / "bad3.txt"), Error);
  }
  SUBCASE("write -> read round-trips 1000 random entries within 1e-6") {
    Rng rng(55);
    std::vector<ScoreEntry> entries;
    for (int i = 0; i < 1000; ++i) {
      entries.push_back({"utt_" + std::to_string(i), rng.uniform(-50.0, 50.0)});
    }
    write_scores(entries, dir / "rt.txt");
    const auto back = read_scores(dir / "rt.txt");
    REQUIRE(back.size() == entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      CHECK(back[i].utt_id == entries[i].utt_id);
      CHECK(std::abs(back[i].score - entries[i].score) <= 1e-6);
    }
    // And the canonical form is byte-stable.
    write_scores(back, dir / "rt2.txt");
    CHECK(read_file(dir / "rt.txt") == read_file(dir / "rt2.txt"));
  }
}

TEST_CASE("join_scores") {
  std::vector<Trial> trials;
  for (int i = 0; i < 4; ++i) {
    Trial t;
    t.speaker_id = "s";
    t.utt_id = "u" + std::to_string(i);
    t.key = i % 2 == 0 ? TrialKey::bonafide : TrialKey::spoof;
    trials.push_back(t);
  }

  SUBCASE("separable scores give EER 0 downstream") {
    std::vector<ScoreEntry> entries{
        {"u0", 1.0}, {"u1", -1.0}, {"u2", 1.0}, {"u3", -1.0}};
    const ScoreSet s = join_scores(trials, entries);
    CHECK(s.bonafide == std::vector<double>{1.0, 1.0});
    CHECK(s.spoof == std::vector<double>{-1.0, -1.0});
    CHECK(compute_eer(s).eer == 0.0);
  }
  SUBCASE("score for unknown utterance rejected") {
    CHECK_THROWS_WITH_AS(join_scores(trials, {{"ghost", 0.0}}),
                         doctest::Contains("unknown utterance"), Error);
  }
  SUBCASE("missing score is a hard error by default") {
    CHECK_THROWS_WITH_AS(join_scores(trials, {{"u0", 1.0}}),
                         doctest::Contains("missing score"), Error);
  }
  SUBCASE("skip policy drops unscored trials") {
    const ScoreSet s = join_scores(trials, {{"u0", 1.0}, {"u1", -1.0}},
                                   MissingScorePolicy::skip);
    CHECK(s.bonafide.size() == 1);
    CHECK(s.spoof.size() == 1);
  }
}

TEST_CASE("synth_utterance") {
  SynthConfig cfg;
  cfg.seed = 99;

  SUBCASE("deterministic per (seed, index, label)") {
    const AudioBuffer a = synth_utterance(cfg, 3, TrialKey::bonafide);
    const AudioBuffer b = synth_utterance(cfg, 3, TrialKey::bonafide);
    CHECK(a.samples == b.samples);

    const AudioBuffer s1 = synth_utterance(cfg, 3, TrialKey::spoof);
    const AudioBuffer s2 = synth_utterance(cfg, 3, TrialKey::spoof);
    CHECK(s1.samples == s2.samples);

    CHECK(a.samples != s1.samples);
  }
  SUBCASE("samples stay inside [-1, 1]") {
    for (int index : {0, 1, 2}) {
      for (TrialKey key : {TrialKey::bonafide, TrialKey::spoof}) {
        const AudioBuffer buf = synth_utterance(cfg, index, key);
        CHECK(!buf.samples.empty());
        for (float v : buf.samples) {
          CHECK(v <= 1.0f);
          CHECK(v >= -1.0f);
        }
      }
    }
  }
  SUBCASE("replay channel suppresses energy above 5 kHz by at least 20 dB") {
    auto band_energy_above = [&](const AudioBuffer& buf, double hz) {
      std::size_t n = 1;
      while (n < buf.samples.size()) n <<= 1;
      std::vector<double> frame(n, 0.0);
      for (std::size_t i = 0; i < buf.samples.size(); ++i) frame[i] = buf.samples[i];
      const auto power = fft_power(frame);
      const double bin_hz = static_cast<double>(buf.sample_rate_hz) / static_cast<double>(n);
      double acc = 0.0;
      for (std::size_t k = static_cast<std::size_t>(hz / bin_hz); k < power.size(); ++k) {
        acc += power[k];
      }
      return acc;
    };

    for (int index : {0, 5, 11}) {
      const AudioBuffer bona = synth_utterance(cfg, index, TrialKey::bonafide);
      const AudioBuffer spoof = synth_utterance(cfg, index, TrialKey::spoof);
      const double gap_db = 10.0 * std::log10(band_energy_above(bona, 5000.0) /
                                              band_energy_above(spoof, 5000.0));
      CHECK(gap_db >= 20.0);
    }
  }
}

TEST_CASE("build_corpus") {
  SynthConfig cfg;
  cfg.seed = 7;
  cfg.n_bonafide = 8;
  cfg.n_spoof = 8;

  TempDir dir("corpus");
  const CorpusLayout layout = build_corpus(cfg, dir.path());

  const auto train = parse_protocol(layout.train_protocol);
  const auto dev = parse_protocol(layout.dev_protocol);

  SUBCASE("cardinalities and label counts") {
    CHECK(train.size() + dev.size() == 16);
    int bona = 0, spoof = 0;
    for (const auto& t : train) (t.key == TrialKey::bonafide ? bona : spoof) += 1;
    for (const auto& t : dev) (t.key == TrialKey::bonafide ? bona : spoof) += 1;
    CHECK(bona == 8);
    CHECK(spoof == 8);

    std::size_t wavs = 0;
    for (const auto& entry : std::filesystem::directory_iterator(layout.wav_dir)) {
      wavs += entry.path().extension() == ".wav" ? 1 : 0;
    }
    CHECK(wavs == 16);
  }

  SUBCASE("speaker sets are disjoint across splits") {
    std::set<std::string> train_speakers, dev_speakers;
    for (const auto& t : train) train_speakers.insert(t.speaker_id);
    for (const auto& t : dev) dev_speakers.insert(t.speaker_id);
    for (const auto& s : train_speakers) CHECK(dev_speakers.count(s) == 0);
    CHECK(!train_speakers.empty());
    CHECK(!dev_speakers.empty());
  }

  SUBCASE("regeneration with the same seed is byte-identical") {
    TempDir dir2("corpus2");
    build_corpus(cfg, dir2.path());
    CHECK(read_file(layout.train_protocol) == read_file(dir2 / "train.txt"));
    CHECK(read_file(layout.dev_protocol) == read_file(dir2 / "dev.txt"));
    for (const auto& t : train) {
      CHECK(read_file(layout.wav_dir / (t.utt_id + ".wav")) ==
            read_file(dir2.path() / "wav" / (t.utt_id + ".wav")));
    }
  }

  SUBCASE("a band-energy linear classifier separates the classes") {
    // Well-posedness oracle for the end-to-end pipeline: mean energy above
    // vs below 4 kHz, best single threshold on the difference.
    struct Sample {
      double feature;
      TrialKey key;
    };
    std::vector<Sample> samples;

    auto band_split_db = [](const AudioBuffer& buf) {
      std::size_t n = 1;
      while (n < buf.samples.size()) n <<= 1;
      std::vector<double> frame(n, 0.0);
      for (std::size_t i = 0; i < buf.samples.size(); ++i) frame[i] = buf.samples[i];
      const auto power = fft_power(frame);
      const double bin_hz = static_cast<double>(buf.sample_rate_hz) / static_cast<double>(n);
      const std::size_t split = static_cast<std::size_t>(4000.0 / bin_hz);
      double low = 1e-30, high = 1e-30;
      for (std::size_t k = 0; k < power.size(); ++k) {
        (k < split ? low : high) += power[k];
      }
      return 10.0 * std::log10(high / low);
    };

    for (const auto* split : {&train, &dev}) {
      for (const auto& t : *split) {
        const AudioBuffer buf = read_wav(layout.wav_dir / (t.utt_id + ".wav"));
        samples.push_back({band_split_db(buf), t.key});
      }
    }

    std::size_t best_correct = 0;
    for (const auto& pivot : samples) {
      std::size_t correct = 0;
      for (const auto& s : samples) {
        const bool predicted_bona = s.feature >= pivot.feature;
        correct += predicted_bona == (s.key == TrialKey::bonafide) ? 1 : 0;
      }
      best_correct = std::max(best_correct, correct);
    }
    const double accuracy = static_cast<double>(best_correct) / samples.size();
    CHECK(accuracy >= 0.95);
  }
}
