#pragma once

// Domain types for the two-section taxel skin: gesture labels, sensor
// geometry, frames, recordings and participant-wise datasets.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tactile {

inline constexpr std::size_t kNumClasses = 6;
inline constexpr std::size_t kNumTaxels = 63;
inline constexpr std::uint16_t kMaxReading = 1023;  // 10-bit ADC
inline constexpr double kNominalSampleRateHz = 50.0;

enum class GestureClass : std::uint8_t {
  Hit = 0,
  Poke = 1,
  Grab = 2,
  Rub = 3,
  Shake = 4,
  Tap = 5,
};

inline constexpr std::array<GestureClass, kNumClasses> kAllGestures = {
    GestureClass::Hit,   GestureClass::Poke,  GestureClass::Grab,
    GestureClass::Rub,   GestureClass::Shake, GestureClass::Tap};

constexpr std::size_t index_of(GestureClass g) {
  return static_cast<std::size_t>(g);
}
GestureClass gesture_from_index(std::size_t code);
std::string_view to_string(GestureClass g);
std::optional<GestureClass> parse_gesture(std::string_view name);

enum class ArmSection : std::uint8_t { Upper = 0, Lower = 1 };

std::string_view to_string(ArmSection s);
std::optional<ArmSection> parse_section(std::string_view name);

struct SectionGeometry {
  ArmSection id;
  std::size_t rows;
  std::size_t cols;
  std::size_t offset;  // first flat index of this section

  std::size_t size() const { return rows * cols; }
};

struct TaxelPosition {
  ArmSection section;
  std::size_t row;
  std::size_t col;
};

/// Geometry of the skin: upper section 7 rows x 5 cols followed by the lower
/// section 7 rows x 4 cols. Flat indices are row-major within a section,
/// upper first, so upper spans 0..34 and lower 35..62.
class SensorLayout {
 public:
  static const SensorLayout& standard();

  std::span<const SectionGeometry> sections() const { return sections_; }
  const SectionGeometry& section(ArmSection id) const;
  std::size_t total_taxels() const;

  /// Throws BoundsError naming the section when row/col is out of range.
  std::size_t flatten_index(ArmSection section, std::size_t row,
                            std::size_t col) const;
  TaxelPosition locate(std::size_t index) const;

 private:
  SensorLayout();
  std::array<SectionGeometry, 2> sections_;
};

using Reading = std::uint16_t;
using Readings = std::array<Reading, kNumTaxels>;

struct TaxelFrame {
  double timestamp = 0.0;  // seconds
  Readings readings{};

  bool operator==(const TaxelFrame&) const = default;
};

struct GestureRecording {
  std::vector<TaxelFrame> frames;
  std::optional<GestureClass> label;
  std::string participant_id;
  ArmSection arm_section = ArmSection::Upper;
  std::size_t trial_index = 0;
  double sample_rate_hz = kNominalSampleRateHz;

  /// Non-empty, strictly increasing timestamps, readings within ADC range.
  void validate() const;

  bool operator==(const GestureRecording&) const = default;
};

enum class Split : std::uint8_t { Train = 0, Test = 1 };

std::string_view to_string(Split s);
std::optional<Split> parse_split(std::string_view name);

using SplitAssignment = std::map<std::string, Split>;

struct Dataset {
  std::vector<GestureRecording> recordings;
  SplitAssignment split_assignment;

  /// Every recording valid and every participant assigned.
  void validate() const;

  std::vector<GestureRecording> subset(Split which) const;
  std::vector<std::string> participants() const;  // sorted, distinct

  bool operator==(const Dataset&) const = default;
};

struct SplitCounts {
  std::array<std::size_t, kNumClasses> train{};
  std::array<std::size_t, kNumClasses> test{};
  std::size_t train_total() const;
  std::size_t test_total() const;
};

/// Shuffles the sorted participant roster with `seed`; the first
/// `n_train` become train and the next `n_test` test.
SplitAssignment assign_participants(std::vector<std::string> participants,
                                    std::size_t n_train, std::size_t n_test,
                                    std::uint64_t seed);

/// Participant-disjoint split. Recordings of participants that land in
/// neither side are dropped. Throws ConfigError when the roster is too small.
Dataset split_by_participant(Dataset dataset, std::size_t n_train,
                             std::size_t n_test, std::uint64_t seed);

SplitCounts split_counts(const Dataset& dataset);

struct IndexSplit {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
};

/// Stratified by class: each class contributes round(fraction * n_c)
/// samples to `first` (clamped to [1, n_c - 1]). Both sides come back in
/// ascending index order. Throws StratificationError for classes with fewer
/// than two samples.
IndexSplit stratified_split(std::span<const GestureClass> labels,
                            double fraction, std::uint64_t seed);

std::pair<std::vector<GestureRecording>, std::vector<GestureRecording>>
train_val_split(std::span<const GestureRecording> train_set, double fraction,
                std::uint64_t seed);

}  // namespace tactile
