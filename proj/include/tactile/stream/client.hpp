#pragma once

// Stream client: frame reception, online segmentation and live
// classification with the offline feature pipeline.

#include <array>
#include <functional>
#include <optional>
#include <stop_token>
#include <string>

#include <json.hpp>

#include "tactile/learn/trainer.hpp"
#include "tactile/pipeline.hpp"
#include "tactile/stream/protocol.hpp"
#include "tactile/stream/segmenter.hpp"

namespace tactile::stream {

struct ClientConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  std::size_t max_reconnects = 5;   // consecutive failed attempts before giving up
  double backoff_initial_s = 0.05;  // doubled per failed attempt
  double backoff_max_s = 2.0;
  bool reconnect_on_eof = false;    // treat an orderly close as a lost link

  void validate() const;
};

/// One TCP connection yielding assembled skin frames.
class FrameClient {
 public:
  explicit FrameClient(ClientConfig config);
  ~FrameClient();
  FrameClient(const FrameClient&) = delete;
  FrameClient& operator=(const FrameClient&) = delete;

  /// Throws NetworkError when the server cannot be reached.
  void connect();
  void disconnect();
  bool connected() const { return fd_ >= 0; }

  /// Next frame; nullopt on orderly close or when `stop` is requested.
  /// NetworkError on a broken connection. Corrupt messages are skipped and
  /// counted.
  std::optional<TaxelFrame> next(std::stop_token stop = {});

  std::size_t protocol_errors() const { return decoder_.protocol_errors(); }
  std::size_t incomplete_frames() const { return assembler_.incomplete_frames(); }

 private:
  ClientConfig config_;
  int fd_ = -1;
  FrameDecoder decoder_;
  FrameAssembler assembler_;
};

struct LiveEvent {
  double timestamp = 0.0;  // stream time of the segment's last frame
  GestureClass predicted = GestureClass::Hit;
  std::array<double, kNumClasses> probabilities{};
  std::size_t segment_frames = 0;
  bool gap = false;  // a reconnect happened since the previous event

  nlohmann::json to_json() const;
};

/// Segmenter plus model; a pure function of the frames it is fed.
class LiveClassifier {
 public:
  LiveClassifier(const learn::TrainedModel& model, PipelineConfig pipeline,
                 SegmenterConfig segmenter = {});

  std::optional<LiveEvent> on_frame(const TaxelFrame& frame);
  std::optional<LiveEvent> finish();
  /// Closes any open segment and tags the next event as following a gap.
  std::optional<LiveEvent> mark_gap();

  /// Classifies one segment with the offline pipeline.
  LiveEvent classify(const GestureRecording& segment) const;

  const Segmenter& segmenter() const { return segmenter_; }

 private:
  std::optional<LiveEvent> emit(std::optional<GestureRecording> segment);

  const learn::TrainedModel* model_;
  PipelineConfig pipeline_;
  Segmenter segmenter_;
  bool gap_pending_ = false;
};

struct ListenStats {
  std::size_t frames = 0;
  std::size_t events = 0;
  std::size_t reconnects = 0;
  std::size_t protocol_errors = 0;
  std::size_t incomplete_frames = 0;
  std::size_t out_of_order = 0;
  std::size_t dropped_short = 0;
};

/// Connects, classifies every closed segment and calls `on_event` in
/// segment-close order. Returns when the stream ends, `stop` is requested
/// or reconnection attempts run out (NetworkError if the first connect
/// never succeeds).
ListenStats classify_live(const ClientConfig& client,
                          const learn::TrainedModel& model,
                          const PipelineConfig& pipeline,
                          const SegmenterConfig& segmenter,
                          const std::function<void(const LiveEvent&)>& on_event,
                          std::stop_token stop = {});

}  // namespace tactile::stream
