#pragma once

// Workflow commands behind the `tactile` executable. Each writes its
// artifacts and a run manifest under its output directory and returns a
// JSON summary of what it did.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stop_token>
#include <string>
#include <vector>

#include <json.hpp>

#include "tactile/pipeline.hpp"
#include "tactile/stream/client.hpp"

namespace tactile {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PipelineConfig, activation_threshold,
                                                target_frames, smoothing_window,
                                                sample_rate_hz)
}  // namespace tactile

namespace tactile::app {

struct SynthOptions {
  std::string out = "data";
  std::uint64_t seed = 0;
  std::string gesture_params;  // JSON overrides, empty = defaults
  std::size_t train_participants = 10;
  std::size_t test_participants = 6;
  bool nominal_sensor = false;  // every taxel at its section mean
};

struct TrainOptions {
  std::string data = "data";
  std::string out = "model";
  std::string model = "mlp";  // mlp | lstm | cnn1d | rf
  std::string feature = "activated-count";
  std::uint64_t seed = 0;
  PipelineConfig pipeline;
  double learning_rate = 0.0;  // 0 keeps the model's default
  std::size_t batch_size = 32;
  std::size_t max_epochs = 300;
  std::size_t patience = 20;
  double train_fraction = 0.8;
  std::size_t trees = 60;
};

struct EvalOptions {
  std::string data = "data";
  std::string model = "model/model.json";
  std::string out = "eval";
  std::string feature;  // empty = the model's feature kind
  PipelineConfig pipeline;
  bool svg = true;
};

struct AblateOptions {
  std::string data = "data";
  std::string out = "ablation";
  std::uint64_t seed = 0;
  PipelineConfig pipeline;
  double learning_rate = 0.00025;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 300;
  std::size_t patience = 20;
  double train_fraction = 0.8;
};

struct CharacterizeOptions {
  std::string out = "characterization";
  std::uint64_t seed = 0;
  bool sampled_sensor = false;  // draw per-taxel models instead of nominal
  std::uint64_t sensor_seed = 0;
  bool noise = false;
  std::size_t repetitions = 10;
  std::vector<std::size_t> taxels{6, 13, 21, 28, 40, 45, 52, 57};
  double start_height_mm = 60.0;
  double approach_speed_mm_s = 17.0;
  double press_depth_mm = 4.0;
  double stiffness_n_per_mm = 3.5;
  double sample_rate_hz = 5000.0;
  double force_noise_n = 0.05;
  int threshold = 10;
};

struct ServeOptions {
  std::string source = "replay";  // replay | synth
  std::string data = "data";
  std::string split = "test";     // train | test | all
  std::string host = "127.0.0.1";
  std::uint16_t port = 7878;
  double rate_hz = kNominalSampleRateHz;
  std::size_t idle_frames = 50;
  bool loop = false;
  std::size_t max_frames = 0;
  std::uint64_t seed = 0;
};

struct ListenOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 7878;
  std::string model = "model/model.json";
  std::string out = "live";
  PipelineConfig pipeline;
  std::size_t onset_frames = 2;
  std::size_t offset_frames = 25;
  std::size_t min_segment_frames = 5;
  std::size_t max_reconnects = 5;
  bool reconnect_on_eof = false;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SynthOptions, out, seed, gesture_params,
                                                train_participants, test_participants,
                                                nominal_sensor)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainOptions, data, out, model, feature,
                                                seed, pipeline, learning_rate,
                                                batch_size, max_epochs, patience,
                                                train_fraction, trees)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EvalOptions, data, model, out, feature,
                                                pipeline, svg)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(AblateOptions, data, out, seed, pipeline,
                                                learning_rate, batch_size, max_epochs,
                                                patience, train_fraction)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CharacterizeOptions, out, seed,
                                                sampled_sensor, sensor_seed, noise,
                                                repetitions, taxels, start_height_mm,
                                                approach_speed_mm_s, press_depth_mm,
                                                stiffness_n_per_mm, sample_rate_hz,
                                                force_noise_n, threshold)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ServeOptions, source, data, split, host,
                                                port, rate_hz, idle_frames, loop,
                                                max_frames, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ListenOptions, host, port, model, out,
                                                pipeline, onset_frames, offset_frames,
                                                min_segment_frames, max_reconnects,
                                                reconnect_on_eof)

struct CommandResult {
  std::filesystem::path out_dir;
  std::filesystem::path manifest;  // empty for commands without artifacts
  nlohmann::json summary = nlohmann::json::object();
};

CommandResult cmd_synth(const SynthOptions& options);
CommandResult cmd_train(const TrainOptions& options);
/// KindMismatchError when --feature differs from the model's feature kind.
CommandResult cmd_eval(const EvalOptions& options);
CommandResult cmd_ablate(const AblateOptions& options);
CommandResult cmd_characterize(const CharacterizeOptions& options);
/// Blocks while streaming. `on_listening` receives the bound port.
CommandResult cmd_serve(const ServeOptions& options,
                        const std::function<void(std::uint16_t)>& on_listening = {},
                        std::stop_token stop = {});
/// Writes events.jsonl under the output directory; `on_event` sees each
/// event as it is emitted.
CommandResult cmd_listen(const ListenOptions& options,
                         const std::function<void(const stream::LiveEvent&)>& on_event = {},
                         std::stop_token stop = {});

}  // namespace tactile::app
