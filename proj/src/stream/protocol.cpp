#include "tactile/stream/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "tactile/errors.hpp"

namespace tactile::stream {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

bool has_magic(const std::uint8_t* p) {
  return std::equal(kMagic.begin(), kMagic.end(), p);
}

// Checks the fixed header; returns the total message size.
std::size_t check_header(const std::uint8_t* p) {
  if (!has_magic(p)) throw ProtocolError("bad frame magic");
  if (p[4] != kProtocolVersion) {
    throw ProtocolError("unsupported protocol version " + std::to_string(p[4]));
  }
  if (p[5] > 1) throw ProtocolError("unknown section id " + std::to_string(p[5]));
  if (p[6] == 0 || p[7] == 0) throw ProtocolError("empty section geometry");
  return encoded_size(p[6], p[7]);
}

FrameMessage parse_body(const std::uint8_t* p) {
  FrameMessage m;
  m.section_id = p[5];
  m.rows = p[6];
  m.cols = p[7];
  m.timestamp_us = get_u64(p + 8);
  const std::size_t n = std::size_t{m.rows} * m.cols;
  m.readings.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.readings[i] = get_u16(p + kHeaderSize + 2 * i);
    if (m.readings[i] > kMaxReading) {
      throw ProtocolError("reading " + std::to_string(m.readings[i]) +
                          " exceeds the ADC range");
    }
  }
  return m;
}

}  // namespace

void validate(const FrameMessage& m) {
  if (m.section_id > 1) throw ProtocolError("unknown section id");
  if (m.rows == 0 || m.cols == 0) throw ProtocolError("empty section geometry");
  if (m.readings.size() != std::size_t{m.rows} * m.cols) {
    throw ProtocolError("reading count does not match rows x cols");
  }
  for (auto r : m.readings) {
    if (r > kMaxReading) throw ProtocolError("reading exceeds the ADC range");
  }
}

void append_encoded(const FrameMessage& m, std::vector<std::uint8_t>& out) {
  validate(m);
  out.reserve(out.size() + encoded_size(m.rows, m.cols));
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  out.push_back(kProtocolVersion);
  out.push_back(m.section_id);
  out.push_back(m.rows);
  out.push_back(m.cols);
  put_u64(out, m.timestamp_us);
  for (auto r : m.readings) put_u16(out, r);
}

std::vector<std::uint8_t> encode_frame(const FrameMessage& m) {
  std::vector<std::uint8_t> out;
  append_encoded(m, out);
  return out;
}

FrameMessage decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) {
    if (bytes.size() >= kMagic.size() && !has_magic(bytes.data())) {
      throw ProtocolError("bad frame magic");
    }
    throw FramingError("truncated frame header (" + std::to_string(bytes.size()) +
                       " bytes)");
  }
  const std::size_t size = check_header(bytes.data());
  if (bytes.size() != size) {
    throw FramingError("frame announces " + std::to_string(size) +
                       " bytes, got " + std::to_string(bytes.size()));
  }
  return parse_body(bytes.data());
}

std::uint64_t to_microseconds(double seconds) {
  return static_cast<std::uint64_t>(std::llround(std::max(0.0, seconds) * 1e6));
}

std::array<FrameMessage, 2> split_frame(const TaxelFrame& frame,
                                        const SensorLayout& layout) {
  std::array<FrameMessage, 2> out;
  for (std::size_t s = 0; s < 2; ++s) {
    const auto& g = layout.sections()[s];
    auto& m = out[s];
    m.section_id = static_cast<std::uint8_t>(g.id);
    m.rows = static_cast<std::uint8_t>(g.rows);
    m.cols = static_cast<std::uint8_t>(g.cols);
    m.timestamp_us = to_microseconds(frame.timestamp);
    m.readings.assign(frame.readings.begin() + static_cast<std::ptrdiff_t>(g.offset),
                      frame.readings.begin() +
                          static_cast<std::ptrdiff_t>(g.offset + g.size()));
  }
  return out;
}

void FrameDecoder::feed(std::span<const std::uint8_t> bytes) {
  compact();
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

void FrameDecoder::compact() {
  if (pos_ > 0 && pos_ * 2 >= buffer_.size()) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
}

std::optional<FrameMessage> FrameDecoder::next() {
  if (buffered() < kHeaderSize) {
    // A partial header can still be rejected early on its magic.
    const std::size_t n = std::min(buffered(), kMagic.size());
    if (std::equal(buffer_.begin() + static_cast<std::ptrdiff_t>(pos_),
                   buffer_.begin() + static_cast<std::ptrdiff_t>(pos_ + n),
                   kMagic.begin())) {
      return std::nullopt;
    }
  }
  const std::uint8_t* p = buffer_.data() + pos_;
  std::string problem;
  if (buffered() >= kHeaderSize) {
    try {
      const std::size_t size = check_header(p);
      if (buffered() < size) return std::nullopt;
      auto m = parse_body(p);
      pos_ += size;
      return m;
    } catch (const ProtocolError& e) {
      problem = e.what();
    }
  } else {
    problem = "bad frame magic";
  }
  // Skip past the corrupt start and resume at the next magic (or keep a
  // tail that could be the beginning of one).
  std::size_t resume = pos_ + 1;
  while (resume < buffer_.size()) {
    const std::size_t n = std::min(buffer_.size() - resume, kMagic.size());
    if (std::equal(buffer_.begin() + static_cast<std::ptrdiff_t>(resume),
                   buffer_.begin() + static_cast<std::ptrdiff_t>(resume + n),
                   kMagic.begin())) {
      break;
    }
    ++resume;
  }
  pos_ = resume;
  ++errors_;
  throw ProtocolError(problem + "; resynchronizing");
}

void FrameDecoder::reset() {
  buffer_.clear();
  pos_ = 0;
}

FrameAssembler::FrameAssembler(const SensorLayout& layout) : layout_(&layout) {}

std::optional<TaxelFrame> FrameAssembler::add(const FrameMessage& m) {
  const auto& g = layout_->sections()[m.section_id];
  if (m.rows != g.rows || m.cols != g.cols) {
    throw ProtocolError("section geometry " + std::to_string(m.rows) + "x" +
                        std::to_string(m.cols) + " does not match the layout");
  }
  if (timestamp_us_ != m.timestamp_us) {
    if (timestamp_us_) ++incomplete_;
    timestamp_us_ = m.timestamp_us;
    pending_ = TaxelFrame{};
    pending_.timestamp = static_cast<double>(m.timestamp_us) / 1e6;
    seen_ = {};
  }
  std::copy(m.readings.begin(), m.readings.end(),
            pending_.readings.begin() + static_cast<std::ptrdiff_t>(g.offset));
  seen_[m.section_id] = true;
  if (seen_[0] && seen_[1]) {
    timestamp_us_.reset();
    seen_ = {};
    return pending_;
  }
  return std::nullopt;
}

void FrameAssembler::reset() {
  timestamp_us_.reset();
  seen_ = {};
}

}  // namespace tactile::stream
