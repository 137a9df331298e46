#include "tactile/stream/client.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "tactile/errors.hpp"

namespace tactile::stream {

void ClientConfig::validate() const {
  if (host.empty()) throw ConfigError("empty host");
  if (port == 0) throw ConfigError("client needs a server port");
  if (!(backoff_initial_s > 0.0 && backoff_max_s >= backoff_initial_s)) {
    throw ConfigError("backoff must be positive and max >= initial");
  }
}

FrameClient::FrameClient(ClientConfig config) : config_(std::move(config)) {
  config_.validate();
}

FrameClient::~FrameClient() { disconnect(); }

void FrameClient::connect() {
  disconnect();
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw NetworkError(std::string("socket: ") + std::strerror(errno));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(config_.port);
  if (::inet_pton(AF_INET, config_.host.c_str(), &addr.sin_addr) != 1) {
    disconnect();
    throw NetworkError("cannot parse server address '" + config_.host + "'");
  }
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string why = std::strerror(errno);
    disconnect();
    throw NetworkError("cannot connect to " + config_.host + ":" +
                       std::to_string(config_.port) + ": " + why);
  }
  decoder_.reset();
  assembler_.reset();
}

void FrameClient::disconnect() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

std::optional<TaxelFrame> FrameClient::next(std::stop_token stop) {
  std::array<std::uint8_t, 4096> chunk{};
  for (;;) {
    for (;;) {
      std::optional<FrameMessage> m;
      try {
        m = decoder_.next();
      } catch (const ProtocolError&) {
        continue;  // counted by the decoder, already resynchronized
      }
      if (!m) break;
      try {
        if (auto frame = assembler_.add(*m)) return frame;
      } catch (const ProtocolError&) {
        // geometry mismatch: drop the message
      }
    }
    if (fd_ < 0) throw NetworkError("not connected");
    if (stop.stop_requested()) return std::nullopt;
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 100);
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw NetworkError(std::string("poll: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    const auto n = ::recv(fd_, chunk.data(), chunk.size(), 0);
    if (n == 0) return std::nullopt;
    if (n < 0) {
      if (errno == EINTR) continue;
      throw NetworkError(std::string("connection lost: ") + std::strerror(errno));
    }
    decoder_.feed(std::span<const std::uint8_t>(chunk.data(), static_cast<std::size_t>(n)));
  }
}

nlohmann::json LiveEvent::to_json() const {
  return {{"timestamp", timestamp},
          {"predicted", std::string(tactile::to_string(predicted))},
          {"probabilities", probabilities},
          {"segment_frames", segment_frames},
          {"gap", gap}};
}

LiveClassifier::LiveClassifier(const learn::TrainedModel& model,
                               PipelineConfig pipeline,
                               SegmenterConfig segmenter)
    : model_(&model), pipeline_(pipeline), segmenter_(segmenter) {
  pipeline_.validate();
}

LiveEvent LiveClassifier::classify(const GestureRecording& segment) const {
  const auto features = extract_feature(segment, model_->feature_kind, pipeline_);
  LiveEvent e;
  e.probabilities = model_->predict_proba(features);
  e.predicted = model_->predict(features);
  e.segment_frames = segment.frames.size();
  e.timestamp = segment.frames.back().timestamp;
  return e;
}

std::optional<LiveEvent> LiveClassifier::emit(std::optional<GestureRecording> segment) {
  if (!segment) return std::nullopt;
  LiveEvent e;
  try {
    e = classify(*segment);
  } catch (const NoContactError&) {
    // Segmenter and pipeline thresholds can differ; nothing to classify.
    return std::nullopt;
  }
  e.gap = gap_pending_;
  gap_pending_ = false;
  return e;
}

std::optional<LiveEvent> LiveClassifier::on_frame(const TaxelFrame& frame) {
  return emit(segmenter_.push(frame));
}

std::optional<LiveEvent> LiveClassifier::finish() { return emit(segmenter_.flush()); }

std::optional<LiveEvent> LiveClassifier::mark_gap() {
  auto e = emit(segmenter_.flush());
  gap_pending_ = true;
  return e;
}

ListenStats classify_live(const ClientConfig& client_config,
                          const learn::TrainedModel& model,
                          const PipelineConfig& pipeline,
                          const SegmenterConfig& segmenter,
                          const std::function<void(const LiveEvent&)>& on_event,
                          std::stop_token stop) {
  ListenStats stats;
  LiveClassifier classifier(model, pipeline, segmenter);
  FrameClient client(client_config);
  auto deliver = [&](std::optional<LiveEvent> e) {
    if (!e) return;
    ++stats.events;
    on_event(*e);
  };

  client.connect();
  for (;;) {
    bool lost = false;
    try {
      while (auto frame = client.next(stop)) {
        ++stats.frames;
        deliver(classifier.on_frame(*frame));
      }
      lost = client_config.reconnect_on_eof && !stop.stop_requested();
    } catch (const NetworkError&) {
      lost = !stop.stop_requested();
    }
    client.disconnect();
    if (!lost) break;

    deliver(classifier.mark_gap());
    double backoff = client_config.backoff_initial_s;
    bool reconnected = false;
    for (std::size_t attempt = 0; attempt < client_config.max_reconnects; ++attempt) {
      if (stop.stop_requested()) break;
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff = std::min(backoff * 2.0, client_config.backoff_max_s);
      try {
        client.connect();
        reconnected = true;
        break;
      } catch (const NetworkError&) {
      }
    }
    if (!reconnected) break;
    ++stats.reconnects;
  }
  deliver(classifier.finish());
  stats.protocol_errors = client.protocol_errors();
  stats.incomplete_frames = client.incomplete_frames();
  stats.out_of_order = classifier.segmenter().out_of_order();
  stats.dropped_short = classifier.segmenter().dropped_short();
  return stats;
}

}  // namespace tactile::stream
