#include "tactile/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "tactile/errors.hpp"
#include "tactile/random.hpp"

namespace tactile {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Bounds: return "BoundsError";
    case ErrorKind::Stratification: return "StratificationError";
    case ErrorKind::NoContact: return "NoContact";
    case ErrorKind::Divergence: return "Divergence";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::Protocol: return "ProtocolError";
    case ErrorKind::Framing: return "FramingError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Network: return "NetworkError";
  }
  return "Error";
}

namespace {

constexpr std::array<std::string_view, kNumClasses> kGestureNames = {
    "hit", "poke", "grab", "rub", "shake", "tap"};

}  // namespace

GestureClass gesture_from_index(std::size_t code) {
  if (code >= kNumClasses) {
    throw BoundsError("gesture code " + std::to_string(code) +
                      " outside 0..5");
  }
  return static_cast<GestureClass>(code);
}

std::string_view to_string(GestureClass g) {
  return kGestureNames[index_of(g)];
}

std::optional<GestureClass> parse_gesture(std::string_view name) {
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (kGestureNames[i] == name) return static_cast<GestureClass>(i);
  }
  return std::nullopt;
}

std::string_view to_string(ArmSection s) {
  return s == ArmSection::Upper ? "upper" : "lower";
}

std::optional<ArmSection> parse_section(std::string_view name) {
  if (name == "upper") return ArmSection::Upper;
  if (name == "lower") return ArmSection::Lower;
  return std::nullopt;
}

std::string_view to_string(Split s) {
  return s == Split::Train ? "train" : "test";
}

std::optional<Split> parse_split(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "test") return Split::Test;
  return std::nullopt;
}

SensorLayout::SensorLayout()
    : sections_{SectionGeometry{ArmSection::Upper, 7, 5, 0},
                SectionGeometry{ArmSection::Lower, 7, 4, 35}} {}

const SensorLayout& SensorLayout::standard() {
  static const SensorLayout layout;
  return layout;
}

const SectionGeometry& SensorLayout::section(ArmSection id) const {
  return sections_[static_cast<std::size_t>(id)];
}

std::size_t SensorLayout::total_taxels() const {
  std::size_t n = 0;
  for (const auto& s : sections_) n += s.size();
  return n;
}

std::size_t SensorLayout::flatten_index(ArmSection id, std::size_t row,
                                        std::size_t col) const {
  const auto& s = section(id);
  if (row >= s.rows || col >= s.cols) {
    std::ostringstream msg;
    msg << "taxel (" << row << ", " << col << ") outside " << to_string(id)
        << " section of " << s.rows << "x" << s.cols;
    throw BoundsError(msg.str());
  }
  return s.offset + row * s.cols + col;
}

TaxelPosition SensorLayout::locate(std::size_t index) const {
  for (const auto& s : sections_) {
    if (index >= s.offset && index < s.offset + s.size()) {
      const std::size_t local = index - s.offset;
      return {s.id, local / s.cols, local % s.cols};
    }
  }
  throw BoundsError("taxel index " + std::to_string(index) +
                    " outside 0.." + std::to_string(total_taxels() - 1));
}

void GestureRecording::validate() const {
  if (frames.empty()) {
    throw ConfigError("recording of '" + participant_id + "' has no frames");
  }
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i > 0 && !(frames[i].timestamp > frames[i - 1].timestamp)) {
      throw ConfigError("recording of '" + participant_id +
                        "': timestamps not strictly increasing at frame " +
                        std::to_string(i));
    }
    for (Reading r : frames[i].readings) {
      if (r > kMaxReading) {
        throw BoundsError("reading " + std::to_string(r) +
                          " exceeds ADC range at frame " + std::to_string(i));
      }
    }
  }
  if (!(sample_rate_hz > 0.0)) {
    throw ConfigError("sample rate must be positive");
  }
}

void Dataset::validate() const {
  for (const auto& rec : recordings) {
    rec.validate();
    if (!split_assignment.contains(rec.participant_id)) {
      throw ConfigError("participant '" + rec.participant_id +
                        "' missing from split assignment");
    }
  }
}

std::vector<GestureRecording> Dataset::subset(Split which) const {
  std::vector<GestureRecording> out;
  for (const auto& rec : recordings) {
    auto it = split_assignment.find(rec.participant_id);
    if (it != split_assignment.end() && it->second == which) {
      out.push_back(rec);
    }
  }
  return out;
}

std::vector<std::string> Dataset::participants() const {
  std::set<std::string> ids;
  for (const auto& rec : recordings) ids.insert(rec.participant_id);
  return {ids.begin(), ids.end()};
}

std::size_t SplitCounts::train_total() const {
  std::size_t n = 0;
  for (auto c : train) n += c;
  return n;
}

std::size_t SplitCounts::test_total() const {
  std::size_t n = 0;
  for (auto c : test) n += c;
  return n;
}

SplitAssignment assign_participants(std::vector<std::string> participants,
                                    std::size_t n_train, std::size_t n_test,
                                    std::uint64_t seed) {
  std::sort(participants.begin(), participants.end());
  participants.erase(std::unique(participants.begin(), participants.end()),
                     participants.end());
  if (n_train + n_test > participants.size()) {
    throw ConfigError("requested " + std::to_string(n_train) + " train + " +
                      std::to_string(n_test) + " test participants but only " +
                      std::to_string(participants.size()) + " exist");
  }
  Rng rng(seed);
  rng.shuffle(participants);
  SplitAssignment out;
  for (std::size_t i = 0; i < n_train + n_test; ++i) {
    out.emplace(participants[i], i < n_train ? Split::Train : Split::Test);
  }
  return out;
}

Dataset split_by_participant(Dataset dataset, std::size_t n_train,
                             std::size_t n_test, std::uint64_t seed) {
  dataset.split_assignment =
      assign_participants(dataset.participants(), n_train, n_test, seed);
  std::erase_if(dataset.recordings, [&](const GestureRecording& r) {
    return !dataset.split_assignment.contains(r.participant_id);
  });
  return dataset;
}

SplitCounts split_counts(const Dataset& dataset) {
  SplitCounts counts;
  for (const auto& rec : dataset.recordings) {
    if (!rec.label) continue;
    auto it = dataset.split_assignment.find(rec.participant_id);
    if (it == dataset.split_assignment.end()) continue;
    auto& side = it->second == Split::Train ? counts.train : counts.test;
    ++side[index_of(*rec.label)];
  }
  return counts;
}

IndexSplit stratified_split(std::span<const GestureClass> labels,
                            double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("split fraction must lie in (0, 1)");
  }
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[index_of(labels[i])].push_back(i);
  }
  Rng rng(seed);
  IndexSplit out;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& idx = by_class[c];
    if (idx.empty()) continue;
    if (idx.size() < 2) {
      throw StratificationError(
          "class '" + std::string(to_string(gesture_from_index(c))) +
          "' has fewer than 2 samples");
    }
    rng.shuffle(idx);
    auto n_first = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(idx.size())));
    n_first = std::clamp<std::size_t>(n_first, 1, idx.size() - 1);
    out.first.insert(out.first.end(), idx.begin(), idx.begin() + n_first);
    out.second.insert(out.second.end(), idx.begin() + n_first, idx.end());
  }
  std::sort(out.first.begin(), out.first.end());
  std::sort(out.second.begin(), out.second.end());
  return out;
}

std::pair<std::vector<GestureRecording>, std::vector<GestureRecording>>
train_val_split(std::span<const GestureRecording> train_set, double fraction,
                std::uint64_t seed) {
  std::vector<GestureClass> labels;
  labels.reserve(train_set.size());
  for (const auto& rec : train_set) {
    if (!rec.label) {
      throw StratificationError("cannot stratify an unlabeled recording");
    }
    labels.push_back(*rec.label);
  }
  const auto split = stratified_split(labels, fraction, seed);
  std::pair<std::vector<GestureRecording>, std::vector<GestureRecording>> out;
  for (auto i : split.first) out.first.push_back(train_set[i]);
  for (auto i : split.second) out.second.push_back(train_set[i]);
  return out;
}

}  // namespace tactile
