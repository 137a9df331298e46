#pragma once

// Versioned JSON model files. Doubles are written in shortest round-trip
// form, so save -> load reproduces parameters bit-for-bit.

#include <filesystem>

#include <json.hpp>

#include "tactile/learn/trainer.hpp"

namespace tactile::learn {

inline constexpr const char* kModelFormat = "tactile-model";
inline constexpr int kModelFormatVersion = 1;

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace tactile::learn
