#pragma once

// Preprocessing chain and feature extractors.
//
// Every extractor starts from the raw recording: it trims pre-contact
// frames (idempotent, so passing an already trimmed recording is fine),
// normalizes to `target_frames` and then computes its feature. The four
// ablation features additionally smooth each taxel series after the length
// normalization. NoContactError propagates when a recording never crosses
// the activation threshold.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tactile/core.hpp"

namespace tactile {

enum class FeatureKind : std::uint8_t {
  ActivatedCount = 0,
  MaxTaxelTrace = 1,
  PrincipalFrequency = 2,
  TaxelMean = 3,
  TaxelStd = 4,
};

inline constexpr std::array<FeatureKind, 5> kAllFeatureKinds = {
    FeatureKind::ActivatedCount, FeatureKind::MaxTaxelTrace,
    FeatureKind::PrincipalFrequency, FeatureKind::TaxelMean,
    FeatureKind::TaxelStd};

std::string_view to_string(FeatureKind k);  // e.g. "activated-count"
std::optional<FeatureKind> parse_feature_kind(std::string_view name);
/// Short row label used in ablation tables: "Ours", "F1" .. "F4".
std::string_view short_label(FeatureKind k);

struct PipelineConfig {
  int activation_threshold = 10;  // a taxel is active when reading > this
  std::size_t target_frames = 150;
  std::size_t smoothing_window = 3;
  double sample_rate_hz = kNominalSampleRateHz;

  void validate() const;
};

/// Length a feature of `kind` has under `config`.
std::size_t feature_length(FeatureKind kind, const PipelineConfig& config);

struct FeatureVector {
  FeatureKind kind = FeatureKind::ActivatedCount;
  std::vector<double> values;

  /// Throws ConfigError when the length does not match the kind or a value
  /// is not finite.
  void validate(const PipelineConfig& config) const;

  bool operator==(const FeatureVector&) const = default;
};

std::size_t activated_taxels(const TaxelFrame& frame, int threshold);

std::optional<std::size_t> first_contact_frame(
    std::span<const TaxelFrame> frames, int threshold);

/// Drops every frame before the first one with an active taxel.
GestureRecording trim_precontact(const GestureRecording& recording,
                                 const PipelineConfig& config);

/// Centered moving average whose window shrinks at the series ends.
std::vector<double> smooth_taxel(std::span<const double> series,
                                 std::size_t window);

/// Keeps the first `target` frames, or appends all-zero frames whose
/// timestamps continue at `sample_period` seconds.
std::vector<TaxelFrame> fix_length(std::span<const TaxelFrame> frames,
                                   std::size_t target, double sample_period);

/// Per-taxel series after trimming, length normalization and smoothing.
/// Element [taxel][frame].
using TaxelSeries = std::array<std::vector<double>, kNumTaxels>;
TaxelSeries prepare_taxel_series(const GestureRecording& recording,
                                 const PipelineConfig& config);

/// Index of the maximum-magnitude DFT bin in 1..N/2-1 (N = series length,
/// ties go to the lower bin). Returns 0 for a constant series.
std::size_t principal_bin(std::span<const double> series);

FeatureVector feature_activated_count(const GestureRecording& recording,
                                      const PipelineConfig& config);
FeatureVector feature_max_taxel_trace(const GestureRecording& recording,
                                      const PipelineConfig& config);
FeatureVector feature_principal_frequency(const GestureRecording& recording,
                                          const PipelineConfig& config);
FeatureVector feature_taxel_mean(const GestureRecording& recording,
                                 const PipelineConfig& config);
FeatureVector feature_taxel_std(const GestureRecording& recording,
                                const PipelineConfig& config);

/// Index chosen by feature_max_taxel_trace: highest mean raw reading over
/// the trimmed recording, lowest index on ties.
std::size_t max_mean_taxel(const GestureRecording& trimmed);

FeatureVector extract_feature(const GestureRecording& recording,
                              FeatureKind kind, const PipelineConfig& config);

/// Features for a batch of recordings. Recordings without contact are
/// skipped and counted in `dropped`.
struct FeatureTable {
  FeatureKind kind = FeatureKind::ActivatedCount;
  std::vector<FeatureVector> features;
  std::vector<std::optional<GestureClass>> labels;
  std::vector<std::string> participants;
  std::size_t dropped = 0;

  /// Labels of all rows; throws ConfigError if any row is unlabeled.
  std::vector<GestureClass> required_labels() const;
};

FeatureTable build_feature_table(std::span<const GestureRecording> recordings,
                                 FeatureKind kind,
                                 const PipelineConfig& config);

/// CSV with header `participant,label,kind,v0,...` and one row per sample.
void write_feature_csv(std::ostream& out, const FeatureTable& table);

}  // namespace tactile
