#include "tactile/stream/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "tactile/errors.hpp"
#include "tactile/stream/protocol.hpp"

namespace tactile::stream {

ReplaySource::ReplaySource(std::vector<GestureRecording> recordings,
                           std::size_t idle_frames, bool loop)
    : recordings_(std::move(recordings)),
      idle_frames_(idle_frames),
      loop_(loop),
      idle_left_(idle_frames) {}

std::optional<TaxelFrame> ReplaySource::next() {
  for (;;) {
    if (idle_left_ > 0) {
      --idle_left_;
      return TaxelFrame{};
    }
    if (trailing_idle_) return std::nullopt;
    if (recording_ >= recordings_.size()) {
      if (loop_ && !recordings_.empty()) {
        recording_ = 0;
        continue;
      }
      return std::nullopt;
    }
    const auto& frames = recordings_[recording_].frames;
    if (frame_ < frames.size()) return frames[frame_++];
    frame_ = 0;
    ++recording_;
    idle_left_ = idle_frames_;
    if (recording_ >= recordings_.size() && !loop_) trailing_idle_ = true;
  }
}

LiveSynthSource::LiveSynthSource(sim::GestureParams params,
                                 sim::SensorModel sensor, std::uint64_t seed,
                                 std::size_t idle_frames)
    : params_(std::move(params)),
      sensor_(sensor),
      rng_(seed),
      idle_frames_(idle_frames),
      idle_left_(idle_frames) {
  params_.validate();
}

void LiveSynthSource::start_gesture() {
  const auto g = gesture_from_index(rng_.index(kNumClasses));
  const auto section = rng_.index(2) == 0 ? ArmSection::Upper : ArmSection::Lower;
  current_ = sim::synthesize_gesture(g, SensorLayout::standard(), params_,
                                     sensor_, section, rng_.next_u64());
  frame_ = 0;
}

std::optional<TaxelFrame> LiveSynthSource::next() {
  if (idle_left_ > 0) {
    --idle_left_;
    TaxelFrame f;
    for (std::size_t i = 0; i < kNumTaxels; ++i) {
      f.readings[i] = sim::reading_from_force(sensor_.taxels[i], 0.0, rng_);
    }
    if (idle_left_ == 0) start_gesture();
    return f;
  }
  TaxelFrame f = current_.frames[frame_++];
  if (frame_ >= current_.frames.size()) idle_left_ = idle_frames_;
  return f;
}

void ServerConfig::validate() const {
  if (!(rate_hz > 0.0)) throw ConfigError("stream rate must be > 0");
  if (host.empty()) throw ConfigError("empty host");
}

StreamServer::StreamServer(ServerConfig config) : config_(std::move(config)) {
  config_.validate();
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw NetworkError(std::string("socket: ") + std::strerror(errno));
  int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(config_.port);
  if (::inet_pton(AF_INET, config_.host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw NetworkError("cannot parse listen address '" + config_.host + "'");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 4) != 0) {
    const std::string why = std::strerror(errno);
    ::close(listen_fd_);
    throw NetworkError("cannot listen on " + config_.host + ":" +
                       std::to_string(config_.port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

StreamServer::~StreamServer() {
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

int StreamServer::accept_client() {
  while (!stop_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 100);
    if (ready < 0 && errno != EINTR) {
      throw NetworkError(std::string("poll: ") + std::strerror(errno));
    }
    if (ready <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    int yes = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof yes);
    return fd;
  }
  return -1;
}

namespace {

bool send_all(int fd, const std::vector<std::uint8_t>& bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const auto n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

ServeStats StreamServer::serve(FrameSource& source) {
  using clock = std::chrono::steady_clock;
  ServeStats stats;
  const auto& layout = SensorLayout::standard();
  const auto period = std::chrono::duration<double>(1.0 / config_.rate_hz);

  int client = accept_client();
  if (client < 0) return stats;
  ++stats.connections;
  auto start = clock::now();
  std::optional<TaxelFrame> pending;
  std::vector<std::uint8_t> buffer;

  while (!stop_) {
    if (config_.max_frames > 0 && stats.frames_sent >= config_.max_frames) break;
    if (!pending) pending = source.next();
    if (!pending) break;

    const auto tick = stats.frames_sent;
    std::this_thread::sleep_until(
        start + std::chrono::duration_cast<clock::duration>(
                    period * static_cast<double>(tick)));
    TaxelFrame frame = *pending;
    frame.timestamp = static_cast<double>(tick) / config_.rate_hz;
    buffer.clear();
    for (const auto& m : split_frame(frame, layout)) append_encoded(m, buffer);

    if (!send_all(client, buffer)) {
      // Keep the frame for whoever connects next.
      ::close(client);
      client = accept_client();
      if (client < 0) break;
      ++stats.connections;
      // Resume pacing from now rather than bursting to catch up.
      start = clock::now() - std::chrono::duration_cast<clock::duration>(
                                 period * static_cast<double>(tick));
      continue;
    }
    pending.reset();
    ++stats.frames_sent;
  }
  stats.elapsed = clock::now() - start;
  if (client >= 0) {
    ::shutdown(client, SHUT_WR);
    ::close(client);
  }
  return stats;
}

}  // namespace tactile::stream
