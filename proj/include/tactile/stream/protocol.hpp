#pragma once

// Binary wire format for taxel frames.
//
// One message carries one arm section at one instant:
//   "TXL1" | version u8 | section u8 | rows u8 | cols u8 | timestamp_us u64 LE
//   | rows*cols readings u16 LE
// A full skin frame travels as an upper message followed by a lower message
// with the same timestamp.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tactile/core.hpp"

namespace tactile::stream {

inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::size_t kHeaderSize = 16;
inline constexpr std::array<std::uint8_t, 4> kMagic = {'T', 'X', 'L', '1'};

struct FrameMessage {
  std::uint8_t section_id = 0;  // ArmSection value
  std::uint8_t rows = 0;
  std::uint8_t cols = 0;
  std::uint64_t timestamp_us = 0;
  std::vector<Reading> readings;  // row-major, rows*cols entries

  bool operator==(const FrameMessage&) const = default;
};

constexpr std::size_t encoded_size(std::size_t rows, std::size_t cols) {
  return kHeaderSize + 2 * rows * cols;
}

/// Throws ProtocolError for a message that violates the format invariants.
void validate(const FrameMessage& message);

std::vector<std::uint8_t> encode_frame(const FrameMessage& message);
void append_encoded(const FrameMessage& message, std::vector<std::uint8_t>& out);

/// Decodes exactly one message. ProtocolError on bad magic, version or
/// contents; FramingError when the bytes are shorter or longer than the
/// header announces.
FrameMessage decode_frame(std::span<const std::uint8_t> bytes);

/// Splits a skin frame into its upper and lower section messages.
std::array<FrameMessage, 2> split_frame(const TaxelFrame& frame,
                                        const SensorLayout& layout);
std::uint64_t to_microseconds(double seconds);

/// Incremental decoder over a byte stream. After a corrupt header it throws
/// ProtocolError once and resumes at the next magic.
class FrameDecoder {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  /// Next complete message, or nullopt when more bytes are needed.
  std::optional<FrameMessage> next();
  void reset();

  std::size_t buffered() const { return buffer_.size() - pos_; }
  std::size_t protocol_errors() const { return errors_; }

 private:
  void compact();

  std::vector<std::uint8_t> buffer_;
  std::size_t pos_ = 0;
  std::size_t errors_ = 0;
};

/// Joins section messages back into skin frames. A frame is complete once
/// every section has arrived with the same timestamp; an incomplete frame
/// is discarded when a newer timestamp shows up.
class FrameAssembler {
 public:
  explicit FrameAssembler(const SensorLayout& layout = SensorLayout::standard());

  std::optional<TaxelFrame> add(const FrameMessage& message);
  void reset();

  std::size_t incomplete_frames() const { return incomplete_; }

 private:
  const SensorLayout* layout_;
  std::optional<std::uint64_t> timestamp_us_;
  TaxelFrame pending_;
  std::array<bool, 2> seen_{};
  std::size_t incomplete_ = 0;
};

}  // namespace tactile::stream
