#pragma once

// Simulated indentation test for the taxel response models.
//
// A probe starts above the skin, descends at constant speed, presses a fixed
// depth into the surface and retracts at the same speed. Indentation depth
// maps to force through a linear stiffness. Each sample pairs the force
// sensor value with the taxel reading.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "tactile/core.hpp"
#include "tactile/sensorsim/taxel_model.hpp"

namespace tactile::sim {

struct IndentationProtocol {
  double start_height_mm = 60.0;
  double approach_speed_mm_s = 17.0;
  double press_depth_mm = 4.0;
  std::size_t repetitions = 10;
  std::vector<std::size_t> taxels = default_taxels();
  double stiffness_n_per_mm = 3.5;  // zero models a surface that never loads
  double sample_rate_hz = 5000.0;
  bool noise = false;               // taxel noise plus force sensor noise
  double force_noise_n = 0.05;
  Reading threshold = 10;
  double saturation_fraction = 0.99;

  /// Four taxels on each section, spread over the rows.
  static std::vector<std::size_t> default_taxels();
  /// Throws BoundsError for a taxel outside the layout, ConfigError otherwise.
  void validate() const;

  nlohmann::json to_json() const;
  static IndentationProtocol from_json(const nlohmann::json& j);
  static IndentationProtocol from_json(const nlohmann::json& j,
                                       const IndentationProtocol& base);
};

struct IndentationSample {
  double time_s;
  double force_n;
  Reading reading;
  bool pressing;  // false once the probe retracts
};

struct RepetitionResult {
  std::vector<IndentationSample> samples;  // only while in contact
  std::optional<double> min_detect;        // N; empty = not reached
  std::optional<double> max_sat;
};

struct Stat {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // sample std, 0 for a single value
};

/// Mean and std of the values that were reached; empty when none were.
std::optional<Stat> summarize(const std::vector<std::optional<double>>& values);

struct TaxelCharacterization {
  std::size_t taxel;
  ArmSection section;
  TaxelModel model;
  std::vector<RepetitionResult> repetitions;
  std::optional<Stat> min_detect;
  std::optional<Stat> max_sat;
};

struct SectionCharacterization {
  ArmSection section;
  std::optional<Stat> min_detect;  // over all repetitions of its taxels
  std::optional<Stat> max_sat;
};

struct CharacterizationReport {
  IndentationProtocol protocol;
  std::vector<TaxelCharacterization> taxels;
  std::vector<SectionCharacterization> sections;

  nlohmann::json to_json() const;
  /// One row per sample: taxel,section,repetition,phase,time_s,force_n,reading.
  void write_csv(const std::filesystem::path& path) const;
};

CharacterizationReport run_characterization(const SensorModel& sensor,
                                            const IndentationProtocol& protocol,
                                            std::uint64_t seed);

}  // namespace tactile::sim
