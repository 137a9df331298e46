#pragma once

// Paced TCP frame server.
//
// Frames come from a FrameSource and go out as section message pairs, one
// pair per tick of a monotonic clock running at `rate_hz`. Frames are
// restamped with the stream clock (tick / rate), so replayed recordings keep
// their frame spacing scaled to the stream rate.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tactile/core.hpp"
#include "tactile/sensorsim/gestures.hpp"

namespace tactile::stream {

class FrameSource {
 public:
  virtual ~FrameSource() = default;
  /// Next frame, or nullopt when the source is exhausted.
  virtual std::optional<TaxelFrame> next() = 0;
};

/// Plays recordings back to back with all-zero idle frames before, between
/// and after them.
class ReplaySource : public FrameSource {
 public:
  ReplaySource(std::vector<GestureRecording> recordings, std::size_t idle_frames,
               bool loop = false);
  std::optional<TaxelFrame> next() override;

 private:
  std::vector<GestureRecording> recordings_;
  std::size_t idle_frames_;
  bool loop_;
  std::size_t recording_ = 0;
  std::size_t frame_ = 0;
  std::size_t idle_left_;
  bool trailing_idle_ = false;
};

/// Endless random gestures separated by idle frames carrying sensor noise.
class LiveSynthSource : public FrameSource {
 public:
  LiveSynthSource(sim::GestureParams params, sim::SensorModel sensor,
                  std::uint64_t seed, std::size_t idle_frames);
  std::optional<TaxelFrame> next() override;

 private:
  void start_gesture();

  sim::GestureParams params_;
  sim::SensorModel sensor_;
  Rng rng_;
  std::size_t idle_frames_;
  std::size_t idle_left_;
  GestureRecording current_;
  std::size_t frame_ = 0;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  double rate_hz = kNominalSampleRateHz;
  std::size_t max_frames = 0;  // 0 = until the source ends

  void validate() const;
};

struct ServeStats {
  std::size_t frames_sent = 0;
  std::size_t connections = 0;
  std::chrono::steady_clock::duration elapsed{};
};

/// Listening socket bound at construction (NetworkError when it cannot
/// bind). Serves one client at a time; a client that disconnects is
/// replaced by the next one and the source continues where it stopped.
class StreamServer {
 public:
  explicit StreamServer(ServerConfig config);
  ~StreamServer();
  StreamServer(const StreamServer&) = delete;
  StreamServer& operator=(const StreamServer&) = delete;

  std::uint16_t port() const { return port_; }

  /// Blocks until the source is exhausted, max_frames are sent or stop()
  /// is called. The client connection is closed on return.
  ServeStats serve(FrameSource& source);
  void stop() { stop_ = true; }

 private:
  int accept_client();

  ServerConfig config_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stop_{false};
};

}  // namespace tactile::stream
