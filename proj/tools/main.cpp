#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "spoofguard/error.hpp"
#include "spoofguard/version.hpp"

namespace {

std::string g_config_path;

void add_config_option(CLI::App* cmd) {
  cmd->add_option("--config", g_config_path,
                  "Read key=value defaults from a file; explicit flags win");
}

// Turns "key=value" lines into trailing "--key value" tokens for every key
// not already present on the command line, so flags always win.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) spoofguard::fail("cannot open config file: " + path);

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    const std::size_t end = line.find_last_not_of(" \t\r");
    const std::string trimmed = line.substr(start, end - start + 1);

    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos || eq == 0) {
      spoofguard::fail(path + ":" + std::to_string(line_no) +
                       ": expected key=value, got '" + trimmed + "'");
    }
    const std::string key = trimmed.substr(0, eq);
    const std::string value = trimmed.substr(eq + 1);
    if (key == "config") continue;

    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : args) {
      given = given || a == flag || a.rfind(flag + "=", 0) == 0;
    }
    if (!given) {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spoofguard: synthetic replay-spoofing corpus, Mel-spectrogram "
               "front-end, residual CNN countermeasure, and EER/t-DCF scoring"};
  app.set_version_flag("--version", spoofguard::kVersion);
  app.require_subcommand(1);

  // synth ------------------------------------------------------------------
  spoofguard::cli::SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate the synthetic corpus");
  synth_cmd->add_option("--seed", synth.config.seed, "RNG seed")->capture_default_str();
  synth_cmd->add_option("--bonafide", synth.config.n_bonafide,
                        "Total bona fide utterances (train+dev)")
      ->capture_default_str();
  synth_cmd->add_option("--spoof", synth.config.n_spoof, "Total spoofed utterances (train+dev)")
      ->capture_default_str();
  synth_cmd->add_option("--out", synth.out_dir, "Output corpus directory")->required();
  synth_cmd->add_option("--sample-rate", synth.config.sample_rate_hz, "Sample rate in Hz")
      ->capture_default_str();
  synth_cmd->add_option("--dev-frac", synth.config.dev_fraction,
                        "Fraction of each class held out as the dev split")
      ->capture_default_str();
  synth_cmd->add_option("--duration-min", synth.config.min_duration_s, "Min duration (s)")
      ->capture_default_str();
  synth_cmd->add_option("--duration-max", synth.config.max_duration_s, "Max duration (s)")
      ->capture_default_str();
  synth_cmd->add_option("--bandpass-low", synth.config.bandpass_low_hz,
                        "Replay channel highpass corner (Hz)")
      ->capture_default_str();
  synth_cmd->add_option("--bandpass-high", synth.config.bandpass_high_hz,
                        "Replay channel lowpass corner (Hz)")
      ->capture_default_str();
  synth_cmd->add_option("--reverb-decay", synth.config.reverb_decay_s,
                        "Reverb decay time (s)")
      ->capture_default_str();
  synth_cmd->add_option("--requant-bits", synth.config.requant_bits,
                        "Replay requantization bit depth")
      ->capture_default_str();
  add_config_option(synth_cmd);

  // featurize ---------------------------------------------------------------
  spoofguard::cli::FeaturizeArgs feat;
  CLI::App* feat_cmd =
      app.add_subcommand("featurize", "Extract dB Mel-spectrograms into MELS files");
  feat_cmd->add_option("--protocol", feat.protocols, "Protocol file(s) naming the utterances")
      ->required();
  feat_cmd->add_option("--wav-dir", feat.wav_dir,
                       "WAV directory (default: wav/ next to the first protocol)");
  feat_cmd->add_option("--out", feat.out_dir, "Output feature directory")->required();
  feat_cmd->add_option("--n-fft", feat.front_end.n_fft, "FFT window size")->capture_default_str();
  feat_cmd->add_option("--hop", feat.front_end.hop, "Samples between successive frames")
      ->capture_default_str();
  feat_cmd->add_option("--n-mels", feat.front_end.n_mels, "Mel bands")->capture_default_str();
  feat_cmd->add_option("--fmin", feat.front_end.fmin_hz, "Filterbank low edge (Hz)")
      ->capture_default_str();
  feat_cmd->add_option("--fmax", feat.front_end.fmax_hz,
                       "Filterbank high edge (Hz); negative means sample_rate/2")
      ->capture_default_str();
  feat_cmd->add_option("--height", feat.front_end.out_height, "Output rows")
      ->capture_default_str();
  feat_cmd->add_option("--width", feat.front_end.out_width, "Output columns")
      ->capture_default_str();
  feat_cmd->add_option("--db-floor", feat.front_end.db_floor, "Decibel clamp")
      ->capture_default_str();
  feat_cmd->add_flag("--pgm", feat.export_pgm, "Also export one PGM image per utterance");
  add_config_option(feat_cmd);

  // train --------------------------------------------------------------------
  spoofguard::cli::TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train the residual CNN countermeasure");
  train_cmd->add_option("--protocol", train.protocol, "Training protocol")->required();
  train_cmd->add_option("--mels", train.mels_dir, "Directory of MELS feature files")->required();
  train_cmd->add_option("--out", train.out_weights, "Output SGW1 weight file")->required();
  train_cmd->add_option("--preset", train.preset, "Network preset: resnet34 or tiny")
      ->check(CLI::IsMember({"resnet34", "tiny"}))
      ->capture_default_str();
  train_cmd->add_option("--channels", train.in_channels,
                        "Input channels (1, or 3 to replicate the map)")
      ->check(CLI::IsMember({1, 3}))
      ->capture_default_str();
  train_cmd->add_option("--epochs", train.epochs, "Training epochs")->capture_default_str();
  train_cmd->add_option("--batch", train.batch_size, "Batch size")->capture_default_str();
  train_cmd->add_option("--lr", train.lr,
                        "Learning rate (1e-3 scratch preset; 1e-6 fine-tune preset)")
      ->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "RNG seed")->capture_default_str();
  add_config_option(train_cmd);

  // score ----------------------------------------------------------------
  spoofguard::cli::ScoreArgs score;
  CLI::App* score_cmd = app.add_subcommand("score", "Score protocol utterances with a model");
  score_cmd->add_option("--protocol", score.protocol, "Protocol file")->required();
  score_cmd->add_option("--mels", score.mels_dir, "Directory of MELS feature files")->required();
  score_cmd->add_option("--weights", score.weights, "SGW1 weight file")->required();
  score_cmd->add_option("--out", score.out_scores, "Output score file")->required();
  add_config_option(score_cmd);

  // evaluate ----------------------------------------------------------------
  spoofguard::cli::EvaluateArgs eval;
  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "Report EER and min normalized t-DCF for a score file");
  eval_cmd->add_option("--protocol", eval.protocol, "Protocol file")->required();
  eval_cmd->add_option("--scores", eval.scores, "Score file to evaluate")->required();
  eval_cmd->add_option("--out", eval.out_report, "Also write the report to this file");
  auto* c1_opt = eval_cmd->add_option("--c1", eval.c1, "t-DCF miss cost constant (overrides)");
  auto* c2_opt =
      eval_cmd->add_option("--c2", eval.c2, "t-DCF false-alarm cost constant (overrides)");
  eval_cmd->add_option("--pi-tar", eval.params.pi_tar, "Target prior")->capture_default_str();
  eval_cmd->add_option("--pi-non", eval.params.pi_non, "Non-target prior")->capture_default_str();
  eval_cmd->add_option("--pi-spoof", eval.params.pi_spoof, "Spoof prior")->capture_default_str();
  eval_cmd->add_option("--cmiss-asv", eval.params.cmiss_asv, "ASV miss cost")
      ->capture_default_str();
  eval_cmd->add_option("--cfa-asv", eval.params.cfa_asv, "ASV false-alarm cost")
      ->capture_default_str();
  eval_cmd->add_option("--cmiss-cm", eval.params.cmiss_cm, "CM miss cost")
      ->capture_default_str();
  eval_cmd->add_option("--cfa-cm", eval.params.cfa_cm, "CM false-alarm cost")
      ->capture_default_str();
  eval_cmd->add_option("--pmiss-asv", eval.params.pmiss_asv, "ASV miss rate")
      ->capture_default_str();
  eval_cmd->add_option("--pfa-asv", eval.params.pfa_asv, "ASV false-alarm rate")
      ->capture_default_str();
  eval_cmd->add_option("--pmiss-spoof-asv", eval.params.pmiss_spoof_asv,
                       "ASV miss rate on spoof trials")
      ->capture_default_str();
  add_config_option(eval_cmd);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = apply_config_file(std::move(args));
  } catch (const spoofguard::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    std::vector<const char*> argv2;
    argv2.push_back(argv[0]);
    for (const auto& a : args) argv2.push_back(a.c_str());
    app.parse(static_cast<int>(argv2.size()), argv2.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n";
    CLI::App* focus = &app;
    for (CLI::App* sub : app.get_subcommands()) focus = sub;
    std::cerr << focus->help();
    return 2;
  }

  try {
    eval.have_c1 = c1_opt->count() > 0;
    eval.have_c2 = c2_opt->count() > 0;
    if (synth_cmd->parsed()) return spoofguard::cli::run_synth(synth);
    if (feat_cmd->parsed()) return spoofguard::cli::run_featurize(feat);
    if (train_cmd->parsed()) return spoofguard::cli::run_train(train);
    if (score_cmd->parsed()) return spoofguard::cli::run_score(score);
    if (eval_cmd->parsed()) return spoofguard::cli::run_evaluate(eval);
  } catch (const spoofguard::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
