#pragma once

// Force -> ADC response of a resistive taxel.
//
// Below min_force the taxel reads zero (plus noise). At min_force the
// reading steps to onset_reading and then rises sub-linearly,
//   onset + gain * (f - min_force)^nonlinearity,
// until sat_force, beyond which it stays at the plateau. Everything is
// clamped to the 10-bit ADC range.

#include <array>
#include <cstdint>

#include <json.hpp>

#include "tactile/core.hpp"
#include "tactile/random.hpp"

namespace tactile::sim {

struct TaxelModel {
  double min_force = 1.15;     // N
  double sat_force = 13.95;    // N
  double gain = 115.0;         // counts per N^nonlinearity
  double noise_std = 1.5;      // counts
  double nonlinearity = 0.8;
  double onset_reading = 20.0;

  /// 0 < min_force < sat_force, gain > 0, noise_std >= 0,
  /// nonlinearity > 0, onset_reading in [0, 1023].
  void validate() const;

  double plateau() const;
  /// Noise-free, real-valued response; monotone non-decreasing in force.
  double ideal_reading(double force) const;
};

/// Rounded response with additive Gaussian noise, clamped to [0, 1023].
Reading reading_from_force(const TaxelModel& model, double force, Rng& rng);
/// Same without noise.
Reading reading_from_force(const TaxelModel& model, double force);

/// Section-level statistics the per-taxel parameters are drawn from.
struct SectionResponse {
  double min_force_mean;
  double min_force_std;
  double sat_force_mean;
  double sat_force_std;
};

struct SensorModelParams {
  SectionResponse upper{1.15, 0.728, 13.95, 5.099};
  SectionResponse lower{1.975, 0.492, 13.95, 5.244};
  double nominal_plateau = 900.0;  // counts at sat_force for a nominal taxel
  double gain_jitter = 0.3;        // relative, uniform
  double nonlinearity_lo = 0.65;
  double nonlinearity_hi = 0.95;
  double noise_std = 1.5;
  double onset_reading = 20.0;
  double min_force_floor = 0.3;
  double min_force_ceiling = 3.0;
  double sat_margin = 3.0;         // sat_force >= min_force + margin
};

/// One response model per taxel of the standard layout.
struct SensorModel {
  std::array<TaxelModel, kNumTaxels> taxels;

  /// Every taxel at its section mean, nominal gain, no jitter.
  static SensorModel nominal(const SensorModelParams& params = {});
  /// Per-taxel parameters drawn around the section means.
  static SensorModel sample(std::uint64_t seed,
                            const SensorModelParams& params = {});

  SensorModel with_noise(double noise_std) const;
};

}  // namespace tactile::sim
