#pragma once

// Online contact segmentation of a frame stream.
//
// A segment opens after `onset_frames` consecutive frames with at least one
// activated taxel and includes those frames. It closes after
// `offset_frames` consecutive inactive frames, which are not part of it.
// Shorter inactive stretches inside a segment are kept, so multi-burst
// gestures stay whole.

#include <optional>
#include <vector>

#include "tactile/core.hpp"

namespace tactile::stream {

struct SegmenterConfig {
  std::size_t onset_frames = 2;
  std::size_t offset_frames = 25;  // 0.5 s at 50 Hz
  std::size_t min_segment_frames = 5;
  Reading threshold = 10;
  double sample_rate_hz = kNominalSampleRateHz;

  void validate() const;
};

class Segmenter {
 public:
  enum class Phase { Idle, Active };

  explicit Segmenter(SegmenterConfig config = {});

  /// Returns a segment when this frame closes one.
  std::optional<GestureRecording> push(const TaxelFrame& frame);
  /// Closes an open segment at end of stream. Timestamps may restart
  /// afterwards.
  std::optional<GestureRecording> flush();

  Phase phase() const { return phase_; }
  std::size_t out_of_order() const { return out_of_order_; }
  std::size_t dropped_short() const { return dropped_short_; }
  const SegmenterConfig& config() const { return config_; }

 private:
  std::optional<GestureRecording> close();

  SegmenterConfig config_;
  Phase phase_ = Phase::Idle;
  std::vector<TaxelFrame> segment_;  // onset run while idle
  std::vector<TaxelFrame> held_;     // trailing inactive frames while active
  std::optional<double> last_timestamp_;
  std::size_t out_of_order_ = 0;
  std::size_t dropped_short_ = 0;
};

/// Runs the segmenter over a finite stream, flushing at the end.
std::vector<GestureRecording> segment_stream(const std::vector<TaxelFrame>& frames,
                                             const SegmenterConfig& config = {});

}  // namespace tactile::stream
