#include "tactile/sensorsim/taxel_model.hpp"

#include <algorithm>
#include <cmath>

#include "tactile/errors.hpp"

namespace tactile::sim {

void TaxelModel::validate() const {
  if (!(min_force > 0.0 && min_force < sat_force)) {
    throw ConfigError("taxel model needs 0 < min_force < sat_force");
  }
  if (!(gain > 0.0)) throw ConfigError("taxel gain must be positive");
  if (!(noise_std >= 0.0)) throw ConfigError("noise std must be >= 0");
  if (!(nonlinearity > 0.0)) throw ConfigError("nonlinearity must be positive");
  if (!(onset_reading >= 0.0 && onset_reading <= kMaxReading)) {
    throw ConfigError("onset reading outside ADC range");
  }
}

double TaxelModel::plateau() const {
  return std::min<double>(
      kMaxReading, onset_reading + gain * std::pow(sat_force - min_force,
                                                   nonlinearity));
}

double TaxelModel::ideal_reading(double force) const {
  if (!(force >= min_force)) return 0.0;
  if (force >= sat_force) return plateau();
  return std::min(plateau(),
                  onset_reading + gain * std::pow(force - min_force, nonlinearity));
}

namespace {

Reading to_adc(double value) {
  const double clamped = std::clamp(std::round(value), 0.0,
                                    static_cast<double>(kMaxReading));
  return static_cast<Reading>(clamped);
}

}  // namespace

Reading reading_from_force(const TaxelModel& model, double force, Rng& rng) {
  double value = model.ideal_reading(force);
  if (model.noise_std > 0.0) value += rng.normal(0.0, model.noise_std);
  return to_adc(value);
}

Reading reading_from_force(const TaxelModel& model, double force) {
  return to_adc(model.ideal_reading(force));
}

namespace {

const SectionResponse& section_params(const SensorModelParams& p,
                                      ArmSection s) {
  return s == ArmSection::Upper ? p.upper : p.lower;
}

double nominal_gain(const SensorModelParams& p, double min_force,
                    double sat_force, double nonlinearity) {
  return (p.nominal_plateau - p.onset_reading) /
         std::pow(sat_force - min_force, nonlinearity);
}

}  // namespace

SensorModel SensorModel::nominal(const SensorModelParams& params) {
  SensorModel model;
  const auto& layout = SensorLayout::standard();
  const double nl = 0.5 * (params.nonlinearity_lo + params.nonlinearity_hi);
  for (std::size_t i = 0; i < kNumTaxels; ++i) {
    const auto& sp = section_params(params, layout.locate(i).section);
    auto& t = model.taxels[i];
    t.min_force = sp.min_force_mean;
    t.sat_force = sp.sat_force_mean;
    t.nonlinearity = nl;
    t.gain = nominal_gain(params, t.min_force, t.sat_force, nl);
    t.noise_std = params.noise_std;
    t.onset_reading = params.onset_reading;
    t.validate();
  }
  return model;
}

SensorModel SensorModel::sample(std::uint64_t seed,
                                const SensorModelParams& params) {
  SensorModel model;
  const auto& layout = SensorLayout::standard();
  Rng rng(seed);
  for (std::size_t i = 0; i < kNumTaxels; ++i) {
    const auto& sp = section_params(params, layout.locate(i).section);
    auto& t = model.taxels[i];
    t.min_force = std::clamp(rng.normal(sp.min_force_mean, sp.min_force_std),
                             params.min_force_floor, params.min_force_ceiling);
    t.sat_force = std::max(rng.normal(sp.sat_force_mean, sp.sat_force_std),
                           t.min_force + params.sat_margin);
    t.nonlinearity = rng.uniform(params.nonlinearity_lo, params.nonlinearity_hi);
    // Gain is referenced to the section's nominal span so that a taxel with
    // a late saturation point also reaches a higher plateau.
    const double base = nominal_gain(params, sp.min_force_mean,
                                     sp.sat_force_mean, t.nonlinearity);
    t.gain = base * (1.0 + rng.uniform(-params.gain_jitter, params.gain_jitter));
    t.noise_std = params.noise_std;
    t.onset_reading = params.onset_reading;
    t.validate();
  }
  return model;
}

SensorModel SensorModel::with_noise(double noise_std) const {
  SensorModel copy = *this;
  for (auto& t : copy.taxels) t.noise_std = noise_std;
  return copy;
}

}  // namespace tactile::sim
