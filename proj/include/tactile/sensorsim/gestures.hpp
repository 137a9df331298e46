#pragma once

// Synthetic social-touch gestures on the taxel skin.
//
// A gesture is a hand footprint (a rectangle of cells) pressing with a
// time envelope. Static gestures hold the footprint in place, oscillating
// ones modulate the force periodically and translating ones slide the
// footprint back and forth along the columns. The force each taxel sees is
// peak force x cell overlap x per-cell weight x envelope, and readings come
// from the sensor's per-taxel response models.

#include <array>
#include <cstdint>
#include <filesystem>

#include <json.hpp>

#include "tactile/core.hpp"
#include "tactile/sensorsim/taxel_model.hpp"

namespace tactile::sim {

enum class MotionModel : std::uint8_t { Static, Oscillating, Translating };

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct IntRange {
  int lo = 0;
  int hi = 0;
};

struct GestureSpec {
  MotionModel motion = MotionModel::Static;
  Range duration_s;       // contact time (per burst when repetitions > 1)
  IntRange footprint_rows;
  IntRange footprint_cols;  // {0, 0} spans the full section width
  Range peak_force_n;
  Range ramp_s;           // envelope rise and fall time
  IntRange repetitions{1, 1};
  Range gap_s{0.0, 0.0};  // between repetitions
  Range motion_hz{0.0, 0.0};  // oscillation or stroke frequency
};

struct GestureParams {
  std::array<GestureSpec, kNumClasses> classes;
  Range idle_before_s{0.3, 1.0};
  Range idle_after_s{0.3, 0.8};
  Range force_style{0.85, 1.2};  // per-participant multiplicative factors
  Range tempo_style{0.85, 1.2};
  double cell_weight_min = 0.6;  // per-cell pressure share inside a footprint
  double sample_rate_hz = kNominalSampleRateHz;

  static GestureParams defaults();
  /// Durations > 0, footprints within the section, forces in [0, 2 x 13.95 N].
  void validate() const;

  const GestureSpec& spec(GestureClass g) const { return classes[index_of(g)]; }

  nlohmann::json to_json() const;
  /// Keys present in `j` override the corresponding fields of `base`.
  static GestureParams from_json(const nlohmann::json& j,
                                 const GestureParams& base = defaults());
  static GestureParams load(const std::filesystem::path& path);
};

/// Per-participant performance style.
struct ParticipantStyle {
  double force = 1.0;
  double tempo = 1.0;
};

ParticipantStyle draw_style(const GestureParams& params, std::uint64_t seed);

/// Generates one recording, deterministic in `seed`. Readings of the other
/// arm section are zero.
GestureRecording synthesize_gesture(GestureClass gesture,
                                    const SensorLayout& layout,
                                    const GestureParams& params,
                                    const SensorModel& sensor,
                                    ArmSection section, std::uint64_t seed,
                                    ParticipantStyle style = {});

/// Trial counts per participant and gesture.
struct DatasetPlan {
  std::size_t train_participants = 10;
  std::size_t test_participants = 6;
  std::size_t train_upper_trials = 9;
  std::size_t train_lower_trials = 6;
  std::size_t test_upper_trials = 3;
  std::size_t test_lower_trials = 2;

  void validate() const;
};

/// Builds a participant-disjoint dataset: participant ids P01.. are split
/// with assign_participants and each performs every gesture with the
/// planned number of upper and lower arm trials.
Dataset synthesize_dataset(const SensorLayout& layout,
                           const GestureParams& params,
                           const SensorModel& sensor, const DatasetPlan& plan,
                           std::uint64_t seed);

/// Sensor drawn from `seed` and default plan.
Dataset synthesize_dataset(const SensorLayout& layout,
                           const GestureParams& params, std::uint64_t seed);

}  // namespace tactile::sim
