#include "tactile/sensorsim/characterization.hpp"

#include <cmath>
#include <fstream>

#include "tactile/errors.hpp"
#include "tactile/random.hpp"

namespace tactile::sim {

using nlohmann::json;

std::vector<std::size_t> IndentationProtocol::default_taxels() {
  return {6, 13, 21, 28, 40, 45, 52, 57};
}

void IndentationProtocol::validate() const {
  if (!(start_height_mm > 0.0 && approach_speed_mm_s > 0.0 &&
        press_depth_mm > 0.0)) {
    throw ConfigError("indentation geometry must be positive");
  }
  if (repetitions < 1) throw ConfigError("need at least one repetition");
  if (taxels.empty()) throw ConfigError("no taxels to characterize");
  for (auto t : taxels) {
    if (t >= kNumTaxels) {
      throw BoundsError("taxel " + std::to_string(t) +
                        " does not exist (layout has " +
                        std::to_string(kNumTaxels) + ")");
    }
  }
  if (!(stiffness_n_per_mm >= 0.0)) throw ConfigError("stiffness must be >= 0");
  if (!(sample_rate_hz > 0.0)) throw ConfigError("sample rate must be > 0");
  if (!(force_noise_n >= 0.0)) throw ConfigError("force noise must be >= 0");
  if (!(saturation_fraction > 0.0 && saturation_fraction <= 1.0)) {
    throw ConfigError("saturation fraction must lie in (0, 1]");
  }
}

json IndentationProtocol::to_json() const {
  return {{"start_height_mm", start_height_mm},
          {"approach_speed_mm_s", approach_speed_mm_s},
          {"press_depth_mm", press_depth_mm},
          {"repetitions", repetitions},
          {"taxels", taxels},
          {"stiffness_n_per_mm", stiffness_n_per_mm},
          {"sample_rate_hz", sample_rate_hz},
          {"noise", noise},
          {"force_noise_n", force_noise_n},
          {"threshold", threshold},
          {"saturation_fraction", saturation_fraction}};
}

IndentationProtocol IndentationProtocol::from_json(const json& j,
                                                   const IndentationProtocol& base) {
  IndentationProtocol p = base;
  try {
    auto get = [&](const char* key, auto& out) {
      if (j.contains(key)) j.at(key).get_to(out);
    };
    get("start_height_mm", p.start_height_mm);
    get("approach_speed_mm_s", p.approach_speed_mm_s);
    get("press_depth_mm", p.press_depth_mm);
    get("repetitions", p.repetitions);
    get("taxels", p.taxels);
    get("stiffness_n_per_mm", p.stiffness_n_per_mm);
    get("sample_rate_hz", p.sample_rate_hz);
    get("noise", p.noise);
    get("force_noise_n", p.force_noise_n);
    get("threshold", p.threshold);
    get("saturation_fraction", p.saturation_fraction);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed indentation protocol: ") + e.what());
  }
  p.validate();
  return p;
}

IndentationProtocol IndentationProtocol::from_json(const json& j) {
  return from_json(j, IndentationProtocol{});
}

std::optional<Stat> summarize(const std::vector<std::optional<double>>& values) {
  std::vector<double> reached;
  for (const auto& v : values) {
    if (v) reached.push_back(*v);
  }
  if (reached.empty()) return std::nullopt;
  Stat s;
  s.count = reached.size();
  for (double v : reached) s.mean += v;
  s.mean /= static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : reached) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  return s;
}

namespace {

RepetitionResult indent_once(const TaxelModel& model,
                             const IndentationProtocol& p, Rng& rng) {
  RepetitionResult rep;
  const double travel = p.start_height_mm + p.press_depth_mm;
  const double turn_s = travel / p.approach_speed_mm_s;
  const auto n = static_cast<std::size_t>(std::floor(2.0 * turn_s * p.sample_rate_hz));
  const double threshold_sat = p.saturation_fraction * model.plateau();

  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / p.sample_rate_hz;
    const bool pressing = t <= turn_s;
    const double travelled = pressing ? p.approach_speed_mm_s * t
                                      : travel - p.approach_speed_mm_s * (t - turn_s);
    const double depth = travelled - p.start_height_mm;
    if (depth <= 0.0) continue;

    const double force = p.stiffness_n_per_mm * depth;
    IndentationSample s{t, force, 0, pressing};
    if (p.noise) {
      s.reading = reading_from_force(model, force, rng);
      s.force_n = force + rng.normal(0.0, p.force_noise_n);
    } else {
      s.reading = reading_from_force(model, force);
    }
    if (pressing) {
      if (!rep.min_detect && s.reading > p.threshold) rep.min_detect = s.force_n;
      if (!rep.max_sat && s.reading >= threshold_sat) rep.max_sat = s.force_n;
    }
    rep.samples.push_back(s);
  }
  return rep;
}

json stat_json(const std::optional<Stat>& s) {
  if (!s) return "not reached";
  return {{"count", s->count}, {"mean", s->mean}, {"std", s->std}};
}

json optional_json(const std::optional<double>& v) {
  if (!v) return "not reached";
  return *v;
}

}  // namespace

CharacterizationReport run_characterization(const SensorModel& sensor,
                                            const IndentationProtocol& protocol,
                                            std::uint64_t seed) {
  protocol.validate();
  const auto& layout = SensorLayout::standard();
  CharacterizationReport report;
  report.protocol = protocol;

  std::array<std::vector<std::optional<double>>, 2> section_min, section_sat;
  for (auto taxel : protocol.taxels) {
    TaxelCharacterization tc;
    tc.taxel = taxel;
    tc.section = layout.locate(taxel).section;
    tc.model = sensor.taxels[taxel];
    tc.model.validate();
    std::vector<std::optional<double>> mins, sats;
    for (std::size_t r = 0; r < protocol.repetitions; ++r) {
      Rng rng(mix_seed(mix_seed(seed, taxel), r));
      auto rep = indent_once(tc.model, protocol, rng);
      mins.push_back(rep.min_detect);
      sats.push_back(rep.max_sat);
      tc.repetitions.push_back(std::move(rep));
    }
    tc.min_detect = summarize(mins);
    tc.max_sat = summarize(sats);
    const auto s = static_cast<std::size_t>(tc.section);
    section_min[s].insert(section_min[s].end(), mins.begin(), mins.end());
    section_sat[s].insert(section_sat[s].end(), sats.begin(), sats.end());
    report.taxels.push_back(std::move(tc));
  }
  for (auto section : {ArmSection::Upper, ArmSection::Lower}) {
    const auto s = static_cast<std::size_t>(section);
    if (section_min[s].empty()) continue;
    report.sections.push_back(
        {section, summarize(section_min[s]), summarize(section_sat[s])});
  }
  return report;
}

json CharacterizationReport::to_json() const {
  json taxels_json = json::array();
  for (const auto& t : taxels) {
    json reps = json::array();
    for (const auto& r : t.repetitions) {
      reps.push_back({{"min_detect_n", optional_json(r.min_detect)},
                      {"max_sat_n", optional_json(r.max_sat)},
                      {"samples", r.samples.size()}});
    }
    taxels_json.push_back({{"taxel", t.taxel},
                           {"section", std::string(tactile::to_string(t.section))},
                           {"configured_min_force_n", t.model.min_force},
                           {"configured_sat_force_n", t.model.sat_force},
                           {"min_detect_n", stat_json(t.min_detect)},
                           {"max_sat_n", stat_json(t.max_sat)},
                           {"repetitions", reps}});
  }
  json sections_json = json::array();
  for (const auto& s : sections) {
    sections_json.push_back({{"section", std::string(tactile::to_string(s.section))},
                             {"min_detect_n", stat_json(s.min_detect)},
                             {"max_sat_n", stat_json(s.max_sat)}});
  }
  return {{"protocol", protocol.to_json()},
          {"taxels", taxels_json},
          {"sections", sections_json}};
}

void CharacterizationReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "taxel,section,repetition,phase,time_s,force_n,reading\n";
  out.precision(9);
  for (const auto& t : taxels) {
    for (std::size_t r = 0; r < t.repetitions.size(); ++r) {
      for (const auto& s : t.repetitions[r].samples) {
        out << t.taxel << ',' << tactile::to_string(t.section) << ',' << r << ','
            << (s.pressing ? "press" : "retract") << ',' << s.time_s << ','
            << s.force_n << ',' << s.reading << '\n';
      }
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace tactile::sim
