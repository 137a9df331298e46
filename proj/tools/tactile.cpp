// tactile: synthesize taxel gesture data, train and evaluate classifiers,
// characterize the simulated sensor and stream frames over TCP.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstring>
#include <fstream>
#include <iostream>
#include <stop_token>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "tactile/app/commands.hpp"
#include "tactile/errors.hpp"

namespace {

using nlohmann::json;
using namespace tactile;
using namespace tactile::app;

enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kUsage = 2,
  kConfig = 3,
  kIo = 4,
  kKindMismatch = 5,
  kNoContact = 6,
  kDivergence = 7,
  kNetwork = 8,
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Bounds:
    case ErrorKind::Stratification:
      return kConfig;
    case ErrorKind::Io: return kIo;
    case ErrorKind::KindMismatch: return kKindMismatch;
    case ErrorKind::NoContact: return kNoContact;
    case ErrorKind::Divergence: return kDivergence;
    case ErrorKind::Protocol:
    case ErrorKind::Framing:
    case ErrorKind::Network:
      return kNetwork;
  }
  return kOther;
}

void report_error(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump()
            << std::endl;
}

// --config is read before the flags are parsed so its values become the
// defaults that explicit flags then override.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return {};
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  try {
    auto j = json::parse(in);
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
}

template <class T>
T from_config(const json& j) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
}

void add_pipeline_flags(CLI::App* cmd, PipelineConfig& p) {
  cmd->add_option("--threshold", p.activation_threshold,
                  "Activation threshold; a taxel is active when reading > this")
      ->capture_default_str();
  cmd->add_option("--frames", p.target_frames,
                  "Frames per sample after trimming (truncate or zero-pad)")
      ->capture_default_str();
  cmd->add_option("--smoothing", p.smoothing_window,
                  "Moving-average window for the per-taxel ablation features")
      ->capture_default_str();
  cmd->add_option("--sample-rate", p.sample_rate_hz, "Frame rate in Hz")
      ->capture_default_str();
}

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

// Turns SIGINT/SIGTERM into a stop request for the blocking commands.
struct InterruptWatcher {
  std::stop_source source;
  std::jthread watcher;

  InterruptWatcher()
      : watcher([this](std::stop_token done) {
          while (!done.stop_requested()) {
            if (g_interrupted) {
              source.request_stop();
              return;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
          }
        }) {
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
  }
};

}  // namespace

int main(int argc, char** argv) {
  json config;
  try {
    config = load_config(find_config_path(argc, argv));
  } catch (const Error& e) {
    report_error(std::string(to_string(e.kind())), e.what(), exit_code(e.kind()));
    return exit_code(e.kind());
  }

  CLI::App app{
      "Taxel gesture toolkit: synthetic data, feature pipeline, classifiers, "
      "sensor characterization and frame streaming.\n"
      "Defaults: activation threshold 10 (reading > 10), 150 frames per sample, "
      "smoothing window 3, 50 Hz frames, MLP learning rate 0.00025, 60 trees."};
  app.require_subcommand(1);
  app.fallthrough();  // --config may follow the subcommand
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON file with option values; command-line flags take precedence");

  SynthOptions synth;
  TrainOptions train;
  EvalOptions eval;
  AblateOptions ablate;
  CharacterizeOptions characterize;
  ServeOptions serve;
  ListenOptions listen;
  try {
    synth = from_config<SynthOptions>(config);
    train = from_config<TrainOptions>(config);
    eval = from_config<EvalOptions>(config);
    ablate = from_config<AblateOptions>(config);
    characterize = from_config<CharacterizeOptions>(config);
    serve = from_config<ServeOptions>(config);
    listen = from_config<ListenOptions>(config);
  } catch (const Error& e) {
    report_error("config", e.what(), kConfig);
    return kConfig;
  }
  const bool config_has_seed = config.contains("seed");

  auto* c_synth = app.add_subcommand("synth", "Generate a participant-split synthetic dataset");
  c_synth->add_option("--out", synth.out, "Output directory")->capture_default_str();
  auto* synth_seed = c_synth->add_option("--seed", synth.seed, "Random seed");
  if (!config_has_seed) synth_seed->required();
  c_synth->add_option("--gesture-params", synth.gesture_params,
                      "JSON file overriding gesture parameters");
  c_synth->add_option("--train-participants", synth.train_participants)->capture_default_str();
  c_synth->add_option("--test-participants", synth.test_participants)->capture_default_str();
  c_synth->add_flag("--nominal-sensor", synth.nominal_sensor,
                    "Use section-mean taxel models instead of sampled ones");

  auto* c_train = app.add_subcommand("train", "Train a classifier on the train split");
  c_train->add_option("--data", train.data, "Dataset directory")->capture_default_str();
  c_train->add_option("--out", train.out, "Output directory")->capture_default_str();
  c_train->add_option("--model", train.model, "mlp | lstm | cnn1d | rf")
      ->capture_default_str();
  c_train->add_option("--feature", train.feature,
                      "activated-count | max-taxel-trace | principal-frequency | "
                      "taxel-mean | taxel-std")
      ->capture_default_str();
  auto* train_seed = c_train->add_option("--seed", train.seed, "Random seed");
  if (!config_has_seed) train_seed->required();
  add_pipeline_flags(c_train, train.pipeline);
  c_train->add_option("--lr", train.learning_rate,
                      "Learning rate; 0 keeps the model default "
                      "(mlp 0.00025, cnn1d 0.001, lstm 0.0001)")
      ->capture_default_str();
  c_train->add_option("--batch", train.batch_size, "Mini-batch size")->capture_default_str();
  c_train->add_option("--epochs", train.max_epochs, "Maximum epochs")->capture_default_str();
  c_train->add_option("--patience", train.patience,
                      "Early-stopping patience in epochs")
      ->capture_default_str();
  c_train->add_option("--train-fraction", train.train_fraction,
                      "Fraction of the train split used for fitting; the rest validates")
      ->capture_default_str();
  c_train->add_option("--trees", train.trees, "Random forest size")->capture_default_str();

  auto* c_eval = app.add_subcommand("eval", "Evaluate a model on the test split");
  c_eval->add_option("--data", eval.data, "Dataset directory")->capture_default_str();
  c_eval->add_option("--model", eval.model, "Model file")->capture_default_str();
  c_eval->add_option("--out", eval.out, "Output directory")->capture_default_str();
  c_eval->add_option("--feature", eval.feature,
                     "Feature kind to extract; must match the model's");
  add_pipeline_flags(c_eval, eval.pipeline);
  c_eval->add_flag("--svg,!--no-svg", eval.svg, "Write confusion.svg");

  auto* c_ablate = app.add_subcommand("ablate", "Compare the five feature kinds with the MLP");
  c_ablate->add_option("--data", ablate.data, "Dataset directory")->capture_default_str();
  c_ablate->add_option("--out", ablate.out, "Output directory")->capture_default_str();
  c_ablate->add_option("--seed", ablate.seed, "Random seed")->capture_default_str();
  add_pipeline_flags(c_ablate, ablate.pipeline);
  c_ablate->add_option("--lr", ablate.learning_rate, "Learning rate")->capture_default_str();
  c_ablate->add_option("--batch", ablate.batch_size)->capture_default_str();
  c_ablate->add_option("--epochs", ablate.max_epochs)->capture_default_str();
  c_ablate->add_option("--patience", ablate.patience)->capture_default_str();
  c_ablate->add_option("--train-fraction", ablate.train_fraction)->capture_default_str();

  auto* c_char = app.add_subcommand("characterize", "Simulated indentation test of the taxels");
  c_char->add_option("--out", characterize.out, "Output directory")->capture_default_str();
  c_char->add_option("--seed", characterize.seed, "Random seed")->capture_default_str();
  c_char->add_flag("--sampled-sensor", characterize.sampled_sensor,
                   "Characterize per-taxel sampled models instead of nominal ones");
  c_char->add_option("--sensor-seed", characterize.sensor_seed)->capture_default_str();
  c_char->add_flag("--noise", characterize.noise, "Enable taxel and force sensor noise");
  c_char->add_option("--repetitions", characterize.repetitions)->capture_default_str();
  c_char->add_option("--taxels", characterize.taxels, "Flat taxel indices")
      ->capture_default_str();
  c_char->add_option("--start-height", characterize.start_height_mm, "mm")
      ->capture_default_str();
  c_char->add_option("--speed", characterize.approach_speed_mm_s, "mm/s")
      ->capture_default_str();
  c_char->add_option("--depth", characterize.press_depth_mm, "Press depth in mm")
      ->capture_default_str();
  c_char->add_option("--stiffness", characterize.stiffness_n_per_mm, "N/mm")
      ->capture_default_str();
  c_char->add_option("--rate", characterize.sample_rate_hz, "Hz")->capture_default_str();
  c_char->add_option("--force-noise", characterize.force_noise_n, "N")
      ->capture_default_str();
  c_char->add_option("--threshold", characterize.threshold,
                     "Detection threshold (reading > this)")
      ->capture_default_str();

  auto* c_serve = app.add_subcommand("serve", "Stream frames over TCP");
  c_serve->add_option("--source", serve.source, "replay | synth")->capture_default_str();
  c_serve->add_option("--data", serve.data, "Dataset directory for replay")
      ->capture_default_str();
  c_serve->add_option("--split", serve.split, "train | test | all")->capture_default_str();
  c_serve->add_option("--host", serve.host)->capture_default_str();
  c_serve->add_option("--port", serve.port, "0 picks a free port")->capture_default_str();
  c_serve->add_option("--rate", serve.rate_hz, "Frames per second")->capture_default_str();
  c_serve->add_option("--idle-frames", serve.idle_frames,
                      "Idle frames around each gesture")
      ->capture_default_str();
  c_serve->add_flag("--loop", serve.loop, "Repeat the replay forever");
  c_serve->add_option("--max-frames", serve.max_frames, "0 = until the source ends")
      ->capture_default_str();
  c_serve->add_option("--seed", serve.seed, "Seed for the synth source")
      ->capture_default_str();

  auto* c_listen = app.add_subcommand("listen", "Classify a live frame stream");
  c_listen->add_option("--host", listen.host)->capture_default_str();
  c_listen->add_option("--port", listen.port)->capture_default_str();
  c_listen->add_option("--model", listen.model, "Model file")->capture_default_str();
  c_listen->add_option("--out", listen.out, "Output directory")->capture_default_str();
  add_pipeline_flags(c_listen, listen.pipeline);
  c_listen->add_option("--onset", listen.onset_frames,
                       "Active frames that open a segment")
      ->capture_default_str();
  c_listen->add_option("--offset", listen.offset_frames,
                       "Inactive frames that close a segment (25 = 0.5 s at 50 Hz)")
      ->capture_default_str();
  c_listen->add_option("--min-segment", listen.min_segment_frames)->capture_default_str();
  c_listen->add_option("--max-reconnects", listen.max_reconnects)->capture_default_str();
  c_listen->add_flag("--reconnect-on-eof", listen.reconnect_on_eof,
                     "Reconnect when the server closes the stream");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what(), kUsage);
    return kUsage;
  }

  try {
    CommandResult result;
    if (c_synth->parsed()) {
      result = cmd_synth(synth);
    } else if (c_train->parsed()) {
      result = cmd_train(train);
    } else if (c_eval->parsed()) {
      result = cmd_eval(eval);
    } else if (c_ablate->parsed()) {
      result = cmd_ablate(ablate);
    } else if (c_char->parsed()) {
      result = cmd_characterize(characterize);
    } else if (c_serve->parsed()) {
      InterruptWatcher interrupt;
      result = cmd_serve(
          serve,
          [](std::uint16_t port) {
            std::cout << json{{"listening", port}}.dump() << std::endl;
          },
          interrupt.source.get_token());
    } else if (c_listen->parsed()) {
      InterruptWatcher interrupt;
      result = cmd_listen(
          listen,
          [](const stream::LiveEvent& e) { std::cout << e.to_json().dump() << std::endl; },
          interrupt.source.get_token());
    }
    std::cout << result.summary.dump() << std::endl;
    return kOk;
  } catch (const Error& e) {
    const int code = exit_code(e.kind());
    report_error(std::string(to_string(e.kind())), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    report_error("internal", e.what(), kOther);
    return kOther;
  }
}
