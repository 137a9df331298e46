#include "tactile/stream/segmenter.hpp"

#include <algorithm>

#include "tactile/errors.hpp"

namespace tactile::stream {

void SegmenterConfig::validate() const {
  if (onset_frames < 1) throw ConfigError("onset_frames must be >= 1");
  if (offset_frames < 1) throw ConfigError("offset_frames must be >= 1");
  if (!(sample_rate_hz > 0.0)) throw ConfigError("sample rate must be > 0");
}

Segmenter::Segmenter(SegmenterConfig config) : config_(config) {
  config_.validate();
}

std::optional<GestureRecording> Segmenter::push(const TaxelFrame& frame) {
  if (last_timestamp_ && !(frame.timestamp > *last_timestamp_)) {
    ++out_of_order_;
    return std::nullopt;
  }
  last_timestamp_ = frame.timestamp;

  const bool active = std::any_of(frame.readings.begin(), frame.readings.end(),
                                  [&](Reading r) { return r > config_.threshold; });
  if (phase_ == Phase::Idle) {
    if (!active) {
      segment_.clear();
      return std::nullopt;
    }
    segment_.push_back(frame);
    if (segment_.size() >= config_.onset_frames) phase_ = Phase::Active;
    return std::nullopt;
  }
  if (active) {
    segment_.insert(segment_.end(), held_.begin(), held_.end());
    held_.clear();
    segment_.push_back(frame);
    return std::nullopt;
  }
  held_.push_back(frame);
  if (held_.size() >= config_.offset_frames) return close();
  return std::nullopt;
}

std::optional<GestureRecording> Segmenter::flush() {
  last_timestamp_.reset();
  if (phase_ != Phase::Active) {
    segment_.clear();
    return std::nullopt;
  }
  return close();
}

std::optional<GestureRecording> Segmenter::close() {
  std::vector<TaxelFrame> frames;
  frames.swap(segment_);
  held_.clear();
  phase_ = Phase::Idle;
  if (frames.size() < config_.min_segment_frames) {
    ++dropped_short_;
    return std::nullopt;
  }
  GestureRecording rec;
  rec.frames = std::move(frames);
  rec.participant_id = "live";
  rec.sample_rate_hz = config_.sample_rate_hz;
  return rec;
}

std::vector<GestureRecording> segment_stream(const std::vector<TaxelFrame>& frames,
                                             const SegmenterConfig& config) {
  Segmenter seg(config);
  std::vector<GestureRecording> out;
  for (const auto& f : frames) {
    if (auto s = seg.push(f)) out.push_back(std::move(*s));
  }
  if (auto s = seg.flush()) out.push_back(std::move(*s));
  return out;
}

}  // namespace tactile::stream
