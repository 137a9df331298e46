#include "tactile/app/commands.hpp"

#include <fstream>

#include "tactile/app/manifest.hpp"
#include "tactile/dataset_io.hpp"
#include "tactile/errors.hpp"
#include "tactile/learn/ablation.hpp"
#include "tactile/learn/evaluate.hpp"
#include "tactile/learn/model_io.hpp"
#include "tactile/sensorsim/characterization.hpp"
#include "tactile/sensorsim/gestures.hpp"
#include "tactile/stream/server.hpp"

namespace tactile::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path prepare_out(const std::string& out) {
  if (out.empty()) throw ConfigError("output directory must not be empty");
  const fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IoError("missing input file " + path.string());
}

void require_dataset(const fs::path& dir) {
  require_file(dir / "recordings.jsonl");
  require_file(dir / "split.json");
}

// Dataset files plus the manifest of the run that produced them, if any.
void add_dataset_inputs(RunManifest& m, const fs::path& dir) {
  m.add_input(dir / "recordings.jsonl");
  m.add_input(dir / "split.json");
  if (fs::is_regular_file(dir / kManifestName)) m.add_input(dir / kManifestName);
}

void add_model_inputs(RunManifest& m, const fs::path& model_path) {
  m.add_input(model_path);
  const auto sibling = model_path.parent_path() / kManifestName;
  if (fs::is_regular_file(sibling)) m.add_input(sibling);
}

template <class F>
void write_text(const fs::path& path, F&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  body(out);
  if (!out) throw IoError("failed writing " + path.string());
}

FeatureKind feature_from(const std::string& name) {
  auto k = parse_feature_kind(name);
  if (!k) throw ConfigError("unknown feature kind '" + name + "'");
  return *k;
}

learn::TrainConfig train_config(double lr, std::size_t batch, std::size_t epochs,
                                std::size_t patience, double fraction,
                                std::uint64_t seed, double default_lr) {
  learn::TrainConfig c;
  c.learning_rate = lr > 0.0 ? lr : default_lr;
  c.batch_size = batch;
  c.max_epochs = epochs;
  c.patience = patience;
  c.train_fraction = fraction;
  c.seed = seed;
  c.validate();
  return c;
}

CommandResult finish(const fs::path& dir, const RunManifest& manifest, json summary) {
  CommandResult r;
  r.out_dir = dir;
  r.manifest = manifest.write(dir);
  summary["manifest"] = r.manifest.generic_string();
  summary["manifest_sha256"] = sha256_file(r.manifest);
  r.summary = std::move(summary);
  return r;
}

}  // namespace

CommandResult cmd_synth(const SynthOptions& o) {
  auto params = o.gesture_params.empty() ? sim::GestureParams::defaults()
                                         : sim::GestureParams::load(o.gesture_params);
  sim::DatasetPlan plan;
  plan.train_participants = o.train_participants;
  plan.test_participants = o.test_participants;
  plan.validate();
  const auto sensor = o.nominal_sensor ? sim::SensorModel::nominal()
                                       : sim::SensorModel::sample(mix_seed(o.seed, 100));
  const auto dir = prepare_out(o.out);
  const auto ds = sim::synthesize_dataset(SensorLayout::standard(), params, sensor,
                                          plan, o.seed);
  save_dataset(dir, ds);
  write_text(dir / "gesture_params.json",
             [&](std::ostream& out) { out << params.to_json().dump(2) << '\n'; });

  RunManifest m;
  m.command = "synth";
  m.seed = o.seed;
  m.config = o;
  if (!o.gesture_params.empty()) m.add_input(o.gesture_params);
  for (const char* name : {"recordings.jsonl", "split.json", "gesture_params.json"}) {
    m.add_output(dir, name);
  }
  const auto counts = split_counts(ds);
  return finish(dir, m,
                {{"command", "synth"},
                 {"recordings", ds.recordings.size()},
                 {"train", counts.train_total()},
                 {"test", counts.test_total()}});
}

CommandResult cmd_train(const TrainOptions& o) {
  const auto kind = learn::parse_model_kind(o.model);
  if (!kind) throw ConfigError("unknown model kind '" + o.model + "'");
  const auto feature = feature_from(o.feature);
  o.pipeline.validate();
  require_dataset(o.data);
  const auto dir = prepare_out(o.out);

  const auto ds = load_dataset(o.data);
  const auto train = ds.subset(Split::Train);
  const auto table = build_feature_table(train, feature, o.pipeline);
  const auto labels = table.required_labels();

  learn::TrainedModel model;
  switch (*kind) {
    case learn::ModelKind::MLP: {
      learn::DenseNetConfig c;
      c.train = train_config(o.learning_rate, o.batch_size, o.max_epochs, o.patience,
                             o.train_fraction, o.seed, c.train.learning_rate);
      model = learn::train_mlp(table.features, labels, c);
      break;
    }
    case learn::ModelKind::LSTM: {
      learn::LstmConfig c;
      c.train = train_config(o.learning_rate, o.batch_size, o.max_epochs, o.patience,
                             o.train_fraction, o.seed, c.train.learning_rate);
      model = learn::train_lstm(table.features, labels, c);
      break;
    }
    case learn::ModelKind::CNN1D: {
      learn::CnnConfig c;
      c.train = train_config(o.learning_rate, o.batch_size, o.max_epochs, o.patience,
                             o.train_fraction, o.seed, c.train.learning_rate);
      model = learn::train_cnn1d(table.features, labels, c);
      break;
    }
    case learn::ModelKind::RF: {
      learn::ForestConfig c;
      c.n_estimators = o.trees;
      c.seed = o.seed;
      model = learn::train_rf(table.features, labels, c);
      break;
    }
  }
  learn::save_model(dir / "model.json", model);
  write_text(dir / "history.csv", [&](std::ostream& out) { model.history.write_csv(out); });

  RunManifest m;
  m.command = "train";
  m.seed = o.seed;
  m.config = o;
  add_dataset_inputs(m, o.data);
  m.add_output(dir, "model.json");
  m.add_output(dir, "history.csv");
  return finish(dir, m,
                {{"command", "train"},
                 {"model", std::string(learn::to_string(*kind))},
                 {"feature", std::string(to_string(feature))},
                 {"train_samples", table.features.size()},
                 {"dropped", table.dropped},
                 {"epochs", model.history.epochs.size()},
                 {"best_epoch", model.history.best_epoch}});
}

CommandResult cmd_eval(const EvalOptions& o) {
  o.pipeline.validate();
  require_dataset(o.data);
  require_file(o.model);
  const auto model = learn::load_model(o.model);
  const auto feature = o.feature.empty() ? model.feature_kind : feature_from(o.feature);
  if (feature != model.feature_kind) {
    throw KindMismatchError("model was trained on '" +
                            std::string(to_string(model.feature_kind)) +
                            "' features, evaluation requested '" +
                            std::string(to_string(feature)) + "'");
  }
  const auto dir = prepare_out(o.out);
  const auto ds = load_dataset(o.data);
  const auto test = ds.subset(Split::Test);
  const auto table = build_feature_table(test, feature, o.pipeline);
  const auto labels = table.required_labels();
  const auto report = learn::evaluate(model, table.features, labels);

  json report_json = report.to_json();
  report_json["model_kind"] = std::string(learn::to_string(model.kind));
  report_json["feature"] = std::string(to_string(feature));
  report_json["dropped"] = table.dropped;
  write_text(dir / "report.json",
             [&](std::ostream& out) { out << report_json.dump(2) << '\n'; });
  write_text(dir / "confusion.txt",
             [&](std::ostream& out) { out << report.render_table(); });

  RunManifest m;
  m.command = "eval";
  m.config = o;
  add_dataset_inputs(m, o.data);
  add_model_inputs(m, o.model);
  m.add_output(dir, "report.json");
  m.add_output(dir, "confusion.txt");
  if (o.svg) {
    write_text(dir / "confusion.svg",
               [&](std::ostream& out) { learn::write_confusion_svg(out, report); });
    m.add_output(dir, "confusion.svg");
  }
  return finish(dir, m,
                {{"command", "eval"},
                 {"accuracy", report.accuracy},
                 {"correct", report.trace()},
                 {"total", report.total}});
}

CommandResult cmd_ablate(const AblateOptions& o) {
  o.pipeline.validate();
  require_dataset(o.data);
  const auto dir = prepare_out(o.out);
  const auto ds = load_dataset(o.data);
  learn::DenseNetConfig c;
  c.train = train_config(o.learning_rate, o.batch_size, o.max_epochs, o.patience,
                         o.train_fraction, o.seed, c.train.learning_rate);
  const auto result = learn::ablation_run(ds, kAllFeatureKinds, o.pipeline, c);
  write_text(dir / "ablation.json",
             [&](std::ostream& out) { out << result.to_json().dump(2) << '\n'; });
  write_text(dir / "ablation.txt",
             [&](std::ostream& out) { out << result.render_table(); });

  RunManifest m;
  m.command = "ablate";
  m.seed = o.seed;
  m.config = o;
  add_dataset_inputs(m, o.data);
  m.add_output(dir, "ablation.json");
  m.add_output(dir, "ablation.txt");
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"label", r.label},
                    {"feature", std::string(to_string(r.kind))},
                    {"accuracy", r.report.accuracy}});
  }
  return finish(dir, m, {{"command", "ablate"}, {"rows", rows}});
}

CommandResult cmd_characterize(const CharacterizeOptions& o) {
  sim::IndentationProtocol p;
  p.start_height_mm = o.start_height_mm;
  p.approach_speed_mm_s = o.approach_speed_mm_s;
  p.press_depth_mm = o.press_depth_mm;
  p.repetitions = o.repetitions;
  p.taxels = o.taxels;
  p.stiffness_n_per_mm = o.stiffness_n_per_mm;
  p.sample_rate_hz = o.sample_rate_hz;
  p.noise = o.noise;
  p.force_noise_n = o.force_noise_n;
  if (o.threshold < 0 || o.threshold > kMaxReading) {
    throw ConfigError("threshold outside the ADC range");
  }
  p.threshold = static_cast<Reading>(o.threshold);
  p.validate();
  const auto sensor = o.sampled_sensor ? sim::SensorModel::sample(o.sensor_seed)
                                       : sim::SensorModel::nominal();
  const auto dir = prepare_out(o.out);
  const auto report = sim::run_characterization(sensor, p, o.seed);
  report.write_csv(dir / "characterization.csv");
  const auto report_json = report.to_json();
  write_text(dir / "characterization.json",
             [&](std::ostream& out) { out << report_json.dump(2) << '\n'; });

  RunManifest m;
  m.command = "characterize";
  m.seed = o.seed;
  m.config = o;
  m.add_output(dir, "characterization.csv");
  m.add_output(dir, "characterization.json");
  return finish(dir, m, {{"command", "characterize"}, {"sections", report_json.at("sections")}});
}

CommandResult cmd_serve(const ServeOptions& o,
                        const std::function<void(std::uint16_t)>& on_listening,
                        std::stop_token stop) {
  std::unique_ptr<stream::FrameSource> source;
  if (o.source == "replay") {
    require_dataset(o.data);
    auto ds = load_dataset(o.data);
    std::vector<GestureRecording> recs;
    if (o.split == "all") {
      recs = std::move(ds.recordings);
    } else {
      const auto split = parse_split(o.split);
      if (!split) throw ConfigError("unknown split '" + o.split + "'");
      recs = ds.subset(*split);
    }
    source = std::make_unique<stream::ReplaySource>(std::move(recs), o.idle_frames, o.loop);
  } else if (o.source == "synth") {
    source = std::make_unique<stream::LiveSynthSource>(
        sim::GestureParams::defaults(), sim::SensorModel::sample(mix_seed(o.seed, 100)),
        mix_seed(o.seed, 300), o.idle_frames);
  } else {
    throw ConfigError("unknown source '" + o.source + "' (replay | synth)");
  }
  stream::ServerConfig sc;
  sc.host = o.host;
  sc.port = o.port;
  sc.rate_hz = o.rate_hz;
  sc.max_frames = o.max_frames;
  stream::StreamServer server(sc);
  std::stop_callback on_stop(stop, [&] { server.stop(); });
  if (on_listening) on_listening(server.port());
  const auto stats = server.serve(*source);
  CommandResult r;
  r.summary = {{"command", "serve"},
               {"port", server.port()},
               {"frames_sent", stats.frames_sent},
               {"connections", stats.connections},
               {"elapsed_s", std::chrono::duration<double>(stats.elapsed).count()}};
  return r;
}

CommandResult cmd_listen(const ListenOptions& o,
                         const std::function<void(const stream::LiveEvent&)>& on_event,
                         std::stop_token stop) {
  require_file(o.model);
  const auto model = learn::load_model(o.model);
  stream::ClientConfig cc;
  cc.host = o.host;
  cc.port = o.port;
  cc.max_reconnects = o.max_reconnects;
  cc.reconnect_on_eof = o.reconnect_on_eof;
  stream::SegmenterConfig sc;
  sc.onset_frames = o.onset_frames;
  sc.offset_frames = o.offset_frames;
  sc.min_segment_frames = o.min_segment_frames;
  sc.threshold = static_cast<Reading>(std::max(0, o.pipeline.activation_threshold));
  sc.sample_rate_hz = o.pipeline.sample_rate_hz;
  sc.validate();

  const auto dir = prepare_out(o.out);
  std::ofstream events(dir / "events.jsonl", std::ios::binary);
  if (!events) throw IoError("cannot write " + (dir / "events.jsonl").string());
  const auto stats = stream::classify_live(
      cc, model, o.pipeline, sc,
      [&](const stream::LiveEvent& e) {
        events << e.to_json().dump() << '\n';
        events.flush();
        if (on_event) on_event(e);
      },
      stop);
  events.close();

  RunManifest m;
  m.command = "listen";
  m.config = o;
  add_model_inputs(m, o.model);
  m.add_output(dir, "events.jsonl");
  return finish(dir, m,
                {{"command", "listen"},
                 {"frames", stats.frames},
                 {"events", stats.events},
                 {"reconnects", stats.reconnects},
                 {"protocol_errors", stats.protocol_errors},
                 {"out_of_order", stats.out_of_order}});
}

}  // namespace tactile::app
