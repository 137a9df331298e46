#include "tactile/sensorsim/gestures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "tactile/errors.hpp"

namespace tactile::sim {

using nlohmann::json;

namespace {

constexpr double kMaxPeakForce = 2.0 * 13.95;

std::string_view to_string(MotionModel m) {
  switch (m) {
    case MotionModel::Static: return "static";
    case MotionModel::Oscillating: return "oscillating";
    case MotionModel::Translating: return "translating";
  }
  return "static";
}

MotionModel parse_motion(const std::string& name) {
  if (name == "static") return MotionModel::Static;
  if (name == "oscillating") return MotionModel::Oscillating;
  if (name == "translating") return MotionModel::Translating;
  throw ConfigError("unknown motion model '" + name + "'");
}

json range_json(Range r) { return json::array({r.lo, r.hi}); }
json range_json(IntRange r) { return json::array({r.lo, r.hi}); }

template <class R>
void read_range(const json& j, const char* key, R& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) {
    throw ConfigError(std::string("'") + key + "' must be a [lo, hi] pair");
  }
  v[0].get_to(out.lo);
  v[1].get_to(out.hi);
}

void check_range(const char* what, GestureClass g, Range r, double min_lo,
                 double max_hi) {
  if (!(r.lo >= min_lo && r.lo <= r.hi && r.hi <= max_hi)) {
    throw ConfigError(std::string(tactile::to_string(g)) + ": " + what +
                      " range invalid");
  }
}

// Envelope of one contact burst: linear ramps of length `ramp` at both ends.
double burst_envelope(double local, double duration, double ramp) {
  if (local <= 0.0 || local >= duration) return 0.0;
  const double r = std::min(ramp, duration / 2.0);
  return std::min({1.0, local / r, (duration - local) / r});
}

double overlap(double a_lo, double a_hi, double b_lo, double b_hi) {
  return std::max(0.0, std::min(a_hi, b_hi) - std::max(a_lo, b_lo));
}

struct Burst {
  double start;
  double duration;
};

}  // namespace

GestureParams GestureParams::defaults() {
  GestureParams p;
  auto& hit = p.classes[index_of(GestureClass::Hit)];
  hit.duration_s = {0.15, 0.4};
  hit.footprint_rows = {2, 3};
  hit.footprint_cols = {2, 3};
  hit.peak_force_n = {9.0, 16.0};
  hit.ramp_s = {0.04, 0.08};

  auto& poke = p.classes[index_of(GestureClass::Poke)];
  poke.duration_s = {0.2, 0.5};
  poke.footprint_rows = {1, 1};
  poke.footprint_cols = {1, 2};
  poke.peak_force_n = {3.5, 7.0};
  poke.ramp_s = {0.06, 0.12};

  auto& grab = p.classes[index_of(GestureClass::Grab)];
  grab.duration_s = {1.5, 3.0};
  grab.footprint_rows = {2, 3};
  grab.footprint_cols = {0, 0};
  grab.peak_force_n = {5.0, 10.0};
  grab.ramp_s = {0.15, 0.3};

  auto& rub = p.classes[index_of(GestureClass::Rub)];
  rub.motion = MotionModel::Translating;
  rub.duration_s = {4.5, 6.0};
  rub.footprint_rows = {1, 2};
  rub.footprint_cols = {2, 2};
  rub.peak_force_n = {6.0, 9.0};
  rub.ramp_s = {0.2, 0.4};
  rub.motion_hz = {0.8, 1.5};

  auto& shake = p.classes[index_of(GestureClass::Shake)];
  shake.motion = MotionModel::Oscillating;
  shake.duration_s = {1.0, 3.0};
  shake.footprint_rows = {2, 3};
  shake.footprint_cols = {0, 0};
  shake.peak_force_n = {6.0, 12.0};
  shake.ramp_s = {0.1, 0.2};
  shake.motion_hz = {3.0, 6.0};

  auto& tap = p.classes[index_of(GestureClass::Tap)];
  tap.duration_s = {0.1, 0.2};
  tap.footprint_rows = {1, 2};
  tap.footprint_cols = {1, 2};
  tap.peak_force_n = {5.0, 8.0};
  tap.ramp_s = {0.03, 0.05};
  tap.repetitions = {2, 5};
  tap.gap_s = {0.15, 0.4};
  return p;
}

void GestureParams::validate() const {
  const auto& layout = SensorLayout::standard();
  std::size_t max_rows = 0, max_cols = 0;
  for (const auto& s : layout.sections()) {
    max_rows = std::max(max_rows, s.rows);
    max_cols = std::max(max_cols, s.cols);
  }
  for (auto g : kAllGestures) {
    const auto& s = spec(g);
    check_range("duration", g, s.duration_s, 1e-9, 1e9);
    if (s.duration_s.lo <= 0.0) {
      throw ConfigError(std::string(tactile::to_string(g)) +
                        ": durations must be positive");
    }
    check_range("peak force", g, s.peak_force_n, 0.0, kMaxPeakForce);
    check_range("ramp", g, s.ramp_s, 1e-9, 1e9);
    check_range("gap", g, s.gap_s, 0.0, 1e9);
    if (s.footprint_rows.lo < 1 || s.footprint_rows.hi < s.footprint_rows.lo ||
        static_cast<std::size_t>(s.footprint_rows.hi) > max_rows) {
      throw ConfigError(std::string(tactile::to_string(g)) +
                        ": footprint rows invalid");
    }
    const bool full_width = s.footprint_cols.lo == 0 && s.footprint_cols.hi == 0;
    if (!full_width &&
        (s.footprint_cols.lo < 1 || s.footprint_cols.hi < s.footprint_cols.lo ||
         static_cast<std::size_t>(s.footprint_cols.hi) > max_cols)) {
      throw ConfigError(std::string(tactile::to_string(g)) +
                        ": footprint cols invalid");
    }
    if (s.repetitions.lo < 1 || s.repetitions.hi < s.repetitions.lo) {
      throw ConfigError(std::string(tactile::to_string(g)) +
                        ": repetitions invalid");
    }
    if (s.motion != MotionModel::Static) {
      check_range("motion frequency", g, s.motion_hz, 1e-9, 1e9);
    }
  }
  auto positive_range = [](Range r, const char* what) {
    if (!(r.lo >= 0.0 && r.lo <= r.hi)) {
      throw ConfigError(std::string(what) + " range invalid");
    }
  };
  positive_range(idle_before_s, "idle_before_s");
  positive_range(idle_after_s, "idle_after_s");
  if (!(force_style.lo > 0.0 && force_style.lo <= force_style.hi) ||
      !(tempo_style.lo > 0.0 && tempo_style.lo <= tempo_style.hi)) {
    throw ConfigError("style ranges must be positive");
  }
  if (!(cell_weight_min > 0.0 && cell_weight_min <= 1.0)) {
    throw ConfigError("cell_weight_min must lie in (0, 1]");
  }
  if (!(sample_rate_hz > 0.0)) throw ConfigError("sample rate must be > 0");
}

json GestureParams::to_json() const {
  json classes_json = json::object();
  for (auto g : kAllGestures) {
    const auto& s = spec(g);
    classes_json[std::string(tactile::to_string(g))] = {
        {"motion", std::string(sim::to_string(s.motion))},
        {"duration_s", range_json(s.duration_s)},
        {"footprint_rows", range_json(s.footprint_rows)},
        {"footprint_cols", range_json(s.footprint_cols)},
        {"peak_force_n", range_json(s.peak_force_n)},
        {"ramp_s", range_json(s.ramp_s)},
        {"repetitions", range_json(s.repetitions)},
        {"gap_s", range_json(s.gap_s)},
        {"motion_hz", range_json(s.motion_hz)}};
  }
  return {{"classes", classes_json},
          {"idle_before_s", range_json(idle_before_s)},
          {"idle_after_s", range_json(idle_after_s)},
          {"force_style", range_json(force_style)},
          {"tempo_style", range_json(tempo_style)},
          {"cell_weight_min", cell_weight_min},
          {"sample_rate_hz", sample_rate_hz}};
}

GestureParams GestureParams::from_json(const json& j,
                                       const GestureParams& base) {
  GestureParams p = base;
  try {
    if (j.contains("classes")) {
      for (const auto& [name, js] : j.at("classes").items()) {
        auto g = parse_gesture(name);
        if (!g) throw ConfigError("unknown gesture '" + name + "'");
        auto& s = p.classes[index_of(*g)];
        if (js.contains("motion")) s.motion = parse_motion(js.at("motion"));
        read_range(js, "duration_s", s.duration_s);
        read_range(js, "footprint_rows", s.footprint_rows);
        read_range(js, "footprint_cols", s.footprint_cols);
        read_range(js, "peak_force_n", s.peak_force_n);
        read_range(js, "ramp_s", s.ramp_s);
        read_range(js, "repetitions", s.repetitions);
        read_range(js, "gap_s", s.gap_s);
        read_range(js, "motion_hz", s.motion_hz);
      }
    }
    read_range(j, "idle_before_s", p.idle_before_s);
    read_range(j, "idle_after_s", p.idle_after_s);
    read_range(j, "force_style", p.force_style);
    read_range(j, "tempo_style", p.tempo_style);
    if (j.contains("cell_weight_min")) j.at("cell_weight_min").get_to(p.cell_weight_min);
    if (j.contains("sample_rate_hz")) j.at("sample_rate_hz").get_to(p.sample_rate_hz);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed gesture parameters: ") + e.what());
  }
  p.validate();
  return p;
}

GestureParams GestureParams::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read gesture parameter file " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("gesture parameter file " + path.string() + ": " + e.what());
  }
}

ParticipantStyle draw_style(const GestureParams& params, std::uint64_t seed) {
  Rng rng(seed);
  ParticipantStyle s;
  s.force = rng.uniform(params.force_style.lo, params.force_style.hi);
  s.tempo = rng.uniform(params.tempo_style.lo, params.tempo_style.hi);
  return s;
}

GestureRecording synthesize_gesture(GestureClass gesture,
                                    const SensorLayout& layout,
                                    const GestureParams& params,
                                    const SensorModel& sensor,
                                    ArmSection section, std::uint64_t seed,
                                    ParticipantStyle style) {
  params.validate();
  const auto& spec = params.spec(gesture);
  const auto& geom = layout.section(section);
  Rng rng(seed);

  // Style shifts draws but every quantity stays inside its class range.
  auto styled = [&](Range r, double factor) {
    return std::clamp(rng.uniform(r.lo, r.hi) * factor, r.lo, r.hi);
  };

  const double idle_before = rng.uniform(params.idle_before_s.lo, params.idle_before_s.hi);
  const double idle_after = rng.uniform(params.idle_after_s.lo, params.idle_after_s.hi);
  const int repetitions = rng.integer(spec.repetitions.lo, spec.repetitions.hi);
  std::vector<Burst> bursts;
  double t = idle_before;
  for (int r = 0; r < repetitions; ++r) {
    const double d = styled(spec.duration_s, style.tempo);
    bursts.push_back({t, d});
    t += d;
    if (r + 1 < repetitions) t += styled(spec.gap_s, style.tempo);
  }
  const double total = t + idle_after;
  const double peak = styled(spec.peak_force_n, style.force);
  const double ramp = rng.uniform(spec.ramp_s.lo, spec.ramp_s.hi);
  const double motion_hz =
      spec.motion == MotionModel::Static ? 0.0 : styled(spec.motion_hz, 1.0 / style.tempo);

  const bool full_width = spec.footprint_cols.lo == 0 && spec.footprint_cols.hi == 0;
  const auto rows = static_cast<int>(geom.rows);
  const auto cols = static_cast<int>(geom.cols);
  const int fp_rows = std::min(rows, rng.integer(spec.footprint_rows.lo, spec.footprint_rows.hi));
  const int fp_cols = full_width
                          ? cols
                          : std::min(cols, rng.integer(spec.footprint_cols.lo,
                                                       spec.footprint_cols.hi));
  const int row0 = rng.integer(0, rows - fp_rows);
  const int col0 = rng.integer(0, cols - fp_cols);

  // Per-cell pressure share. Static footprints get one cell at full share;
  // a translating footprint gets one per column so whichever column it fully
  // covers has a full-share cell.
  std::vector<double> weight(geom.size());
  for (auto& w : weight) w = rng.uniform(params.cell_weight_min, 1.0);
  if (spec.motion == MotionModel::Translating) {
    for (int c = 0; c < cols; ++c) {
      const int r = row0 + rng.integer(0, fp_rows - 1);
      weight[static_cast<std::size_t>(r * cols + c)] = 1.0;
    }
  } else {
    const int r = row0 + rng.integer(0, fp_rows - 1);
    const int c = col0 + rng.integer(0, fp_cols - 1);
    weight[static_cast<std::size_t>(r * cols + c)] = 1.0;
  }

  GestureRecording rec;
  rec.label = gesture;
  rec.participant_id = "synthetic";
  rec.arm_section = section;
  rec.sample_rate_hz = params.sample_rate_hz;
  const auto n_frames =
      static_cast<std::size_t>(std::floor(total * params.sample_rate_hz)) + 1;
  rec.frames.reserve(n_frames);
  const double travel = static_cast<double>(cols - fp_cols);

  for (std::size_t k = 0; k < n_frames; ++k) {
    TaxelFrame frame;
    frame.timestamp = static_cast<double>(k) / params.sample_rate_hz;
    const double now = frame.timestamp;

    double envelope = 0.0;
    double since_start = 0.0;
    for (const auto& b : bursts) {
      const double e = burst_envelope(now - b.start, b.duration, ramp);
      if (e > 0.0) {
        envelope = e;
        since_start = now - b.start;
      }
    }
    double modulation = 1.0;
    double x = static_cast<double>(col0);
    const double phase = 2.0 * std::numbers::pi * motion_hz * since_start;
    if (spec.motion == MotionModel::Oscillating) {
      modulation = 0.5 - 0.5 * std::cos(phase);
    } else if (spec.motion == MotionModel::Translating) {
      x = travel * (0.5 - 0.5 * std::cos(phase));
    }
    const double force_scale = peak * envelope * modulation;

    for (int r = 0; r < rows; ++r) {
      const bool in_rows = r >= row0 && r < row0 + fp_rows;
      for (int c = 0; c < cols; ++c) {
        const auto local = static_cast<std::size_t>(r * cols + c);
        double force = 0.0;
        if (in_rows && force_scale > 0.0) {
          const double cover = overlap(c, c + 1.0, x, x + fp_cols);
          force = force_scale * cover * weight[local];
        }
        const std::size_t idx = geom.offset + local;
        frame.readings[idx] = reading_from_force(sensor.taxels[idx], force, rng);
      }
    }
    rec.frames.push_back(frame);
  }
  return rec;
}

void DatasetPlan::validate() const {
  if (train_participants < 1 || test_participants < 1) {
    throw ConfigError("need at least one train and one test participant");
  }
  if (train_upper_trials + train_lower_trials < 1 ||
      test_upper_trials + test_lower_trials < 1) {
    throw ConfigError("every participant needs at least one trial");
  }
}

Dataset synthesize_dataset(const SensorLayout& layout,
                           const GestureParams& params,
                           const SensorModel& sensor, const DatasetPlan& plan,
                           std::uint64_t seed) {
  plan.validate();
  params.validate();
  const std::size_t n = plan.train_participants + plan.test_participants;
  std::vector<std::string> ids;
  for (std::size_t p = 0; p < n; ++p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "P%02zu", p + 1);
    ids.emplace_back(buf);
  }
  Dataset ds;
  ds.split_assignment = assign_participants(ids, plan.train_participants,
                                            plan.test_participants,
                                            mix_seed(seed, 101));
  for (std::size_t p = 0; p < n; ++p) {
    const auto side = ds.split_assignment.at(ids[p]);
    const auto style = draw_style(params, mix_seed(seed, 200 + p));
    const std::uint64_t participant_seed = mix_seed(seed, 1000 + p);
    const std::size_t upper = side == Split::Train ? plan.train_upper_trials
                                                   : plan.test_upper_trials;
    const std::size_t lower = side == Split::Train ? plan.train_lower_trials
                                                   : plan.test_lower_trials;
    for (auto g : kAllGestures) {
      for (std::size_t k = 0; k < upper + lower; ++k) {
        const auto section = k < upper ? ArmSection::Upper : ArmSection::Lower;
        auto rec = synthesize_gesture(
            g, layout, params, sensor, section,
            mix_seed(participant_seed, index_of(g) * 1024 + k), style);
        rec.participant_id = ids[p];
        rec.trial_index = k;
        ds.recordings.push_back(std::move(rec));
      }
    }
  }
  return ds;
}

Dataset synthesize_dataset(const SensorLayout& layout,
                           const GestureParams& params, std::uint64_t seed) {
  return synthesize_dataset(layout, params,
                            SensorModel::sample(mix_seed(seed, 100)),
                            DatasetPlan{}, seed);
}

}  // namespace tactile::sim
