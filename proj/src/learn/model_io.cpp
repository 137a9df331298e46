#include "tactile/learn/model_io.hpp"

#include <fstream>

#include "tactile/errors.hpp"

namespace tactile::learn {

using nlohmann::json;

json model_to_json(const TrainedModel& model) {
  json history = json::array();
  for (const auto& e : model.history.epochs) {
    history.push_back({{"epoch", e.epoch},
                       {"train_loss", e.train_loss},
                       {"train_accuracy", e.train_accuracy},
                       {"val_loss", e.val_loss},
                       {"val_accuracy", e.val_accuracy}});
  }
  json j = {{"format", kModelFormat},
            {"version", kModelFormatVersion},
            {"kind", std::string(to_string(model.kind))},
            {"feature_kind", std::string(tactile::to_string(model.feature_kind))},
            {"input_dim", model.input_dim},
            {"scaler", {{"mean", model.scaler.mean}, {"scale", model.scaler.scale}}},
            {"history", {{"epochs", history}, {"best_epoch", model.history.best_epoch}}}};
  if (model.network) j["network"] = model.network->to_json();
  if (model.forest) j["forest"] = model.forest->to_json();
  return j;
}

TrainedModel model_from_json(const json& j) {
  TrainedModel model;
  try {
    if (j.at("format").get<std::string>() != kModelFormat) {
      throw ConfigError("not a tactile model file");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw ConfigError("unsupported model file version");
    }
    auto kind = parse_model_kind(j.at("kind").get<std::string>());
    auto feature = parse_feature_kind(j.at("feature_kind").get<std::string>());
    if (!kind || !feature) throw ConfigError("unknown model or feature kind");
    model.kind = *kind;
    model.feature_kind = *feature;
    model.input_dim = j.at("input_dim").get<std::size_t>();
    model.scaler.mean = j.at("scaler").at("mean").get<Vec>();
    model.scaler.scale = j.at("scaler").at("scale").get<Vec>();
    if (model.scaler.mean.size() != model.input_dim ||
        model.scaler.scale.size() != model.input_dim) {
      throw ConfigError("scaler size does not match input_dim");
    }
    for (const auto& e : j.at("history").at("epochs")) {
      model.history.epochs.push_back({e.at("epoch").get<std::size_t>(),
                                      e.at("train_loss").get<double>(),
                                      e.at("train_accuracy").get<double>(),
                                      e.at("val_loss").get<double>(),
                                      e.at("val_accuracy").get<double>()});
    }
    model.history.best_epoch = j.at("history").at("best_epoch").get<std::size_t>();
    if (j.contains("network")) {
      model.network = Network::from_json(j.at("network"));
      if (model.network->input_size() != model.input_dim ||
          model.network->output_size() != kNumClasses) {
        throw ConfigError("network shape does not match model header");
      }
    }
    if (j.contains("forest")) model.forest = RandomForest::from_json(j.at("forest"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model file: ") + e.what());
  }
  if (model.network.has_value() == model.forest.has_value()) {
    throw ConfigError("model file must hold exactly one of network or forest");
  }
  return model;
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file " + path.string());
  out << model_to_json(model).dump() << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read model file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("model file " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace tactile::learn
