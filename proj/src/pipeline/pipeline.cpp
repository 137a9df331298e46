#include "tactile/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tactile/errors.hpp"

namespace tactile {

namespace {

constexpr std::array<std::string_view, 5> kKindNames = {
    "activated-count", "max-taxel-trace", "principal-frequency", "taxel-mean",
    "taxel-std"};
constexpr std::array<std::string_view, 5> kShortLabels = {"Ours", "F1", "F2",
                                                          "F3", "F4"};

double period_of(const GestureRecording& rec) {
  return 1.0 / rec.sample_rate_hz;
}

// Trimmed and length-normalized frames, shared by all extractors.
std::vector<TaxelFrame> normalized_frames(const GestureRecording& recording,
                                          const PipelineConfig& config) {
  config.validate();
  const auto trimmed = trim_precontact(recording, config);
  return fix_length(trimmed.frames, config.target_frames, period_of(trimmed));
}

}  // namespace

std::string_view to_string(FeatureKind k) {
  return kKindNames[static_cast<std::size_t>(k)];
}

std::optional<FeatureKind> parse_feature_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<FeatureKind>(i);
  }
  return std::nullopt;
}

std::string_view short_label(FeatureKind k) {
  return kShortLabels[static_cast<std::size_t>(k)];
}

void PipelineConfig::validate() const {
  if (activation_threshold < 0) {
    throw ConfigError("activation threshold must be >= 0");
  }
  if (target_frames < 1) throw ConfigError("target frames must be >= 1");
  if (smoothing_window < 1 || smoothing_window % 2 == 0) {
    throw ConfigError("smoothing window must be odd and >= 1");
  }
  if (!(sample_rate_hz > 0.0)) throw ConfigError("sample rate must be > 0");
}

std::size_t feature_length(FeatureKind kind, const PipelineConfig& config) {
  switch (kind) {
    case FeatureKind::ActivatedCount:
    case FeatureKind::MaxTaxelTrace:
      return config.target_frames;
    default:
      return kNumTaxels;
  }
}

void FeatureVector::validate(const PipelineConfig& config) const {
  if (values.size() != feature_length(kind, config)) {
    throw ConfigError(std::string(to_string(kind)) + " feature has length " +
                      std::to_string(values.size()) + ", expected " +
                      std::to_string(feature_length(kind, config)));
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw ConfigError(std::string(to_string(kind)) +
                        " feature has a non-finite value");
    }
  }
}

std::size_t activated_taxels(const TaxelFrame& frame, int threshold) {
  return static_cast<std::size_t>(
      std::count_if(frame.readings.begin(), frame.readings.end(),
                    [threshold](Reading r) { return r > threshold; }));
}

std::optional<std::size_t> first_contact_frame(
    std::span<const TaxelFrame> frames, int threshold) {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (activated_taxels(frames[i], threshold) > 0) return i;
  }
  return std::nullopt;
}

GestureRecording trim_precontact(const GestureRecording& recording,
                                 const PipelineConfig& config) {
  if (recording.frames.empty()) {
    throw ConfigError("cannot trim an empty recording");
  }
  const auto first =
      first_contact_frame(recording.frames, config.activation_threshold);
  if (!first) {
    throw NoContactError("recording of '" + recording.participant_id +
                         "' trial " + std::to_string(recording.trial_index) +
                         " never exceeds the activation threshold");
  }
  GestureRecording out = recording;
  out.frames.erase(out.frames.begin(),
                   out.frames.begin() + static_cast<std::ptrdiff_t>(*first));
  return out;
}

std::vector<double> smooth_taxel(std::span<const double> series,
                                 std::size_t window) {
  if (window < 1 || window % 2 == 0) {
    throw ConfigError("smoothing window must be odd and >= 1");
  }
  const std::size_t n = series.size();
  const std::size_t half = window / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += series[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::vector<TaxelFrame> fix_length(std::span<const TaxelFrame> frames,
                                   std::size_t target, double sample_period) {
  if (frames.empty()) throw ConfigError("cannot fix length of empty frames");
  if (frames.size() >= target) {
    return {frames.begin(), frames.begin() + static_cast<std::ptrdiff_t>(target)};
  }
  std::vector<TaxelFrame> out(frames.begin(), frames.end());
  const double last = frames.back().timestamp;
  for (std::size_t k = 1; out.size() < target; ++k) {
    TaxelFrame pad;
    pad.timestamp = last + static_cast<double>(k) * sample_period;
    out.push_back(pad);
  }
  return out;
}

TaxelSeries prepare_taxel_series(const GestureRecording& recording,
                                 const PipelineConfig& config) {
  const auto frames = normalized_frames(recording, config);
  TaxelSeries series;
  std::vector<double> raw(frames.size());
  for (std::size_t t = 0; t < kNumTaxels; ++t) {
    for (std::size_t i = 0; i < frames.size(); ++i) {
      raw[i] = frames[i].readings[t];
    }
    series[t] = smooth_taxel(raw, config.smoothing_window);
  }
  return series;
}

std::size_t principal_bin(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 3) return 0;
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (*lo == *hi) return 0;

  // Twiddle table indexed by (k * j) mod n.
  std::vector<double> cos_table(n), sin_table(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) /
                         static_cast<double>(n);
    cos_table[m] = std::cos(angle);
    sin_table[m] = std::sin(angle);
  }
  const double floor_value = *lo;
  std::size_t best_bin = 0;
  double best_power = -1.0;
  const std::size_t last_bin = (n - 1) / 2;  // excludes Nyquist for even n
  for (std::size_t k = 1; k <= last_bin; ++k) {
    double re = 0.0, im = 0.0;
    std::size_t m = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = series[j] - floor_value;
      re += x * cos_table[m];
      im -= x * sin_table[m];
      m += k;
      if (m >= n) m -= n;
    }
    const double power = re * re + im * im;
    if (power > best_power) {
      best_power = power;
      best_bin = k;
    }
  }
  return best_bin;
}

FeatureVector feature_activated_count(const GestureRecording& recording,
                                      const PipelineConfig& config) {
  const auto frames = normalized_frames(recording, config);
  FeatureVector fv{FeatureKind::ActivatedCount, {}};
  fv.values.reserve(frames.size());
  for (const auto& f : frames) {
    fv.values.push_back(
        static_cast<double>(activated_taxels(f, config.activation_threshold)));
  }
  return fv;
}

std::size_t max_mean_taxel(const GestureRecording& trimmed) {
  std::array<double, kNumTaxels> sums{};
  for (const auto& f : trimmed.frames) {
    for (std::size_t t = 0; t < kNumTaxels; ++t) sums[t] += f.readings[t];
  }
  // Every taxel shares the frame count, so the largest sum is the largest
  // mean; max_element keeps the first (lowest index) maximum.
  return static_cast<std::size_t>(
      std::max_element(sums.begin(), sums.end()) - sums.begin());
}

FeatureVector feature_max_taxel_trace(const GestureRecording& recording,
                                      const PipelineConfig& config) {
  config.validate();
  const auto trimmed = trim_precontact(recording, config);
  const std::size_t taxel = max_mean_taxel(trimmed);
  const auto frames =
      fix_length(trimmed.frames, config.target_frames, period_of(trimmed));
  std::vector<double> raw;
  raw.reserve(frames.size());
  for (const auto& f : frames) raw.push_back(f.readings[taxel]);
  return {FeatureKind::MaxTaxelTrace,
          smooth_taxel(raw, config.smoothing_window)};
}

FeatureVector feature_principal_frequency(const GestureRecording& recording,
                                          const PipelineConfig& config) {
  const auto series = prepare_taxel_series(recording, config);
  FeatureVector fv{FeatureKind::PrincipalFrequency, {}};
  fv.values.reserve(kNumTaxels);
  for (const auto& s : series) {
    const auto bin = principal_bin(s);
    fv.values.push_back(static_cast<double>(bin) * config.sample_rate_hz /
                        static_cast<double>(s.size()));
  }
  return fv;
}

FeatureVector feature_taxel_mean(const GestureRecording& recording,
                                 const PipelineConfig& config) {
  const auto series = prepare_taxel_series(recording, config);
  FeatureVector fv{FeatureKind::TaxelMean, {}};
  for (const auto& s : series) {
    double sum = 0.0;
    for (double v : s) sum += v;
    fv.values.push_back(sum / static_cast<double>(s.size()));
  }
  return fv;
}

FeatureVector feature_taxel_std(const GestureRecording& recording,
                                const PipelineConfig& config) {
  const auto series = prepare_taxel_series(recording, config);
  FeatureVector fv{FeatureKind::TaxelStd, {}};
  for (const auto& s : series) {
    const double n = static_cast<double>(s.size());
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : s) ss += (v - mean) * (v - mean);
    fv.values.push_back(std::sqrt(ss / n));
  }
  return fv;
}

FeatureVector extract_feature(const GestureRecording& recording,
                              FeatureKind kind, const PipelineConfig& config) {
  switch (kind) {
    case FeatureKind::ActivatedCount:
      return feature_activated_count(recording, config);
    case FeatureKind::MaxTaxelTrace:
      return feature_max_taxel_trace(recording, config);
    case FeatureKind::PrincipalFrequency:
      return feature_principal_frequency(recording, config);
    case FeatureKind::TaxelMean:
      return feature_taxel_mean(recording, config);
    case FeatureKind::TaxelStd:
      return feature_taxel_std(recording, config);
  }
  throw ConfigError("unknown feature kind");
}

std::vector<GestureClass> FeatureTable::required_labels() const {
  std::vector<GestureClass> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    if (!l) throw ConfigError("feature table contains unlabeled samples");
    out.push_back(*l);
  }
  return out;
}

FeatureTable build_feature_table(std::span<const GestureRecording> recordings,
                                 FeatureKind kind,
                                 const PipelineConfig& config) {
  FeatureTable table;
  table.kind = kind;
  for (const auto& rec : recordings) {
    try {
      table.features.push_back(extract_feature(rec, kind, config));
    } catch (const NoContactError&) {
      ++table.dropped;
      continue;
    }
    table.labels.push_back(rec.label);
    table.participants.push_back(rec.participant_id);
  }
  return table;
}

}  // namespace tactile
