#include "patchseg/wire.hpp"

#include <string>

#include "endian.hpp"
#include "patchseg/errors.hpp"

namespace patchseg::wire {

namespace {

void check_dims(std::uint32_t version, std::uint32_t height, std::uint32_t width) {
  if (version != kVersion) {
    throw Error(ErrorCode::ProtocolError, "unsupported version " + std::to_string(version));
  }
  if (height == 0 || width == 0 || height > kMaxSide || width > kMaxSide) {
    throw Error(ErrorCode::ProtocolError,
                "bad dimensions " + std::to_string(height) + "x" + std::to_string(width));
  }
}

}  // namespace

std::vector<std::uint8_t> encode(const Request& r) {
  std::vector<std::uint8_t> out;
  out.reserve(kRequestHeaderSize + r.payload.size());
  detail::put_magic(out, "PSRQ");
  detail::put_u32(out, r.version);
  detail::put_u32(out, r.height);
  detail::put_u32(out, r.width);
  out.push_back(r.channels);
  out.insert(out.end(), r.payload.begin(), r.payload.end());
  return out;
}

std::vector<std::uint8_t> encode(const Response& r) {
  std::vector<std::uint8_t> out;
  out.reserve(kResponseHeaderSize + r.payload.size() * 4);
  detail::put_magic(out, "PSRS");
  detail::put_u32(out, r.version);
  detail::put_u32(out, r.height);
  detail::put_u32(out, r.width);
  for (const float v : r.payload) detail::put_f32(out, v);
  return out;
}

RequestHeader parse_request_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kRequestHeaderSize) throw Error(ErrorCode::ProtocolError, "short request header");
  if (!detail::has_magic(bytes, "PSRQ")) throw Error(ErrorCode::ProtocolError, "bad request magic");
  RequestHeader h;
  h.version = detail::get_u32(bytes, 4);
  h.height = detail::get_u32(bytes, 8);
  h.width = detail::get_u32(bytes, 12);
  h.channels = bytes[16];
  check_dims(h.version, h.height, h.width);
  if (h.channels == 0 || h.channels > 4) {
    throw Error(ErrorCode::ProtocolError, "bad channel count " + std::to_string(h.channels));
  }
  return h;
}

ResponseHeader parse_response_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kResponseHeaderSize) throw Error(ErrorCode::ProtocolError, "short response header");
  if (!detail::has_magic(bytes, "PSRS")) throw Error(ErrorCode::ProtocolError, "bad response magic");
  ResponseHeader h;
  h.version = detail::get_u32(bytes, 4);
  h.height = detail::get_u32(bytes, 8);
  h.width = detail::get_u32(bytes, 12);
  check_dims(h.version, h.height, h.width);
  return h;
}

Request decode_request(std::span<const std::uint8_t> bytes) {
  const RequestHeader h = parse_request_header(bytes);
  if (bytes.size() != kRequestHeaderSize + h.payload_bytes()) {
    throw Error(ErrorCode::ProtocolError, "request payload length does not match header");
  }
  Request r;
  r.version = h.version;
  r.height = h.height;
  r.width = h.width;
  r.channels = h.channels;
  r.payload.assign(bytes.begin() + kRequestHeaderSize, bytes.end());
  return r;
}

Response decode_response(std::span<const std::uint8_t> bytes) {
  const ResponseHeader h = parse_response_header(bytes);
  if (bytes.size() != kResponseHeaderSize + h.payload_bytes()) {
    throw Error(ErrorCode::ProtocolError, "response payload length does not match header");
  }
  Response r;
  r.version = h.version;
  r.height = h.height;
  r.width = h.width;
  r.payload.resize(std::size_t{h.height} * h.width);
  for (std::size_t i = 0; i < r.payload.size(); ++i) {
    r.payload[i] = detail::get_f32(bytes, kResponseHeaderSize + i * 4);
  }
  return r;
}

}  // namespace patchseg::wire
