#pragma once

// PSRQ / PSRS framing between the engine and an external scorer process.
// All integers little-endian.
//
//   request : "PSRQ" u32 version u32 height u32 width u8 channels  u8[h*w*c]
//   response: "PSRS" u32 version u32 height u32 width              f32[h*w]

#include <cstdint>
#include <span>
#include <vector>

namespace patchseg::wire {

inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::size_t kRequestHeaderSize = 17;
inline constexpr std::size_t kResponseHeaderSize = 16;
// Guard against absurd headers before allocating payload buffers.
inline constexpr std::uint32_t kMaxSide = 1u << 15;

struct Request {
  std::uint32_t version = kVersion;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint8_t channels = 3;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Request&, const Request&) = default;
};

struct Response {
  std::uint32_t version = kVersion;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<float> payload;

  friend bool operator==(const Response&, const Response&) = default;
};

struct RequestHeader {
  std::uint32_t version = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint8_t channels = 0;
  std::size_t payload_bytes() const { return std::size_t{height} * width * channels; }
};

struct ResponseHeader {
  std::uint32_t version = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::size_t payload_bytes() const { return std::size_t{height} * width * 4; }
};

std::vector<std::uint8_t> encode(const Request& r);
std::vector<std::uint8_t> encode(const Response& r);

// Header parsers check magic, version and size limits; throw ProtocolError.
RequestHeader parse_request_header(std::span<const std::uint8_t> bytes);
ResponseHeader parse_response_header(std::span<const std::uint8_t> bytes);

// Whole-message decoders; the byte count must match the header exactly.
Request decode_request(std::span<const std::uint8_t> bytes);
Response decode_response(std::span<const std::uint8_t> bytes);

}  // namespace patchseg::wire
