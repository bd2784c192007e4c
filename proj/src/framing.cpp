#include "smate/framing.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>

#include "smate/errors.hpp"

namespace smate {

namespace {

constexpr std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1U) ? 0xEDB88320U ^ (c >> 1) : c >> 1;
    table[i] = c;
  }
  return table;
}

constexpr auto kCrcTable = make_crc_table();

void put16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put32(Bytes& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put64(Bytes& out, std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint16_t get16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

std::uint32_t get32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
         std::uint32_t{b[at + 3]};
}

}  // namespace

const char* to_string(WireFault f) {
  switch (f) {
    case WireFault::Truncated: return "truncated frame";
    case WireFault::Integrity: return "checksum mismatch";
    case WireFault::BadMagic: return "bad magic";
    case WireFault::BadVersion: return "unsupported version";
    case WireFault::BadKind: return "unknown payload kind";
    case WireFault::LengthMismatch: return "payload length mismatch";
  }
  return "unknown fault";
}

std::uint32_t crc32(std::span<const std::uint8_t> data) {
  std::uint32_t c = 0xFFFFFFFFU;
  for (auto b : data) c = kCrcTable[(c ^ b) & 0xFFU] ^ (c >> 8);
  return c ^ 0xFFFFFFFFU;
}

Bytes encode_wire(const Packet& p) {
  if (p.payload.size() > 0xFFFF) throw EncodingError("payload longer than 65535 bytes");
  Bytes out;
  out.reserve(kWireOverhead + p.payload.size());
  out.push_back(kWireMagic0);
  out.push_back(kWireMagic1);
  out.push_back(kWireVersion);
  put16(out, p.sender_id);
  out.push_back(p.path_index);
  put16(out, p.session);
  put16(out, p.round);
  out.push_back(static_cast<std::uint8_t>(p.kind));
  put16(out, static_cast<std::uint16_t>(p.payload.size()));
  out.insert(out.end(), p.payload.begin(), p.payload.end());
  put32(out, crc32(out));
  return out;
}

DecodeResult decode_wire(std::span<const std::uint8_t> frame) {
  if (frame.size() < kWireOverhead) return WireFault::Truncated;
  // The checksum is verified first so that damage anywhere in the frame,
  // including the magic and length fields, reads as an integrity failure.
  const std::size_t body = frame.size() - 4;
  if (crc32(frame.first(body)) != get32(frame, body)) return WireFault::Integrity;
  if (frame[0] != kWireMagic0 || frame[1] != kWireMagic1) return WireFault::BadMagic;
  if (frame[2] != kWireVersion) return WireFault::BadVersion;
  if (frame[10] > 1) return WireFault::BadKind;
  const std::size_t len = get16(frame, 11);
  if (len != body - kWireHeaderSize) return WireFault::LengthMismatch;

  Packet p;
  p.sender_id = get16(frame, 3);
  p.path_index = frame[5];
  p.session = get16(frame, 6);
  p.round = get16(frame, 8);
  p.kind = static_cast<PayloadKind>(frame[10]);
  p.payload.assign(frame.begin() + kWireHeaderSize, frame.begin() + static_cast<std::ptrdiff_t>(body));
  return p;
}

KeyRing::KeyRing(std::vector<Bytes> keys) : keys_(std::move(keys)) {
  if (keys_.empty()) throw UsageError("key ring needs at least one key");
  for (const auto& k : keys_) {
    if (k.empty()) throw UsageError("empty key in key ring");
  }
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : data) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Bytes encrypt(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message, std::uint64_t nonce) {
  if (key.empty()) throw UsageError("encryption key must not be empty");
  Bytes block(key.begin(), key.end());
  put64(block, nonce);
  const std::size_t counter_at = block.size();
  put64(block, 0);

  Bytes out(message.begin(), message.end());
  for (std::size_t i = 0; i < out.size(); i += 8) {
    const std::uint64_t counter = i / 8;
    for (int s = 0; s < 8; ++s) block[counter_at + s] = static_cast<std::uint8_t>(counter >> (56 - 8 * s));
    const std::uint64_t ks = fnv1a64(block);
    for (std::size_t j = 0; j < 8 && i + j < out.size(); ++j) {
      out[i + j] ^= static_cast<std::uint8_t>(ks >> (56 - 8 * j));
    }
  }
  return out;
}

Chunker::Chunker(std::size_t size) : chunk_size(size) {
  if (chunk_size == 0) throw UsageError("chunk size must be positive");
}

std::vector<Bytes> chunk(std::span<const std::uint8_t> message, const Chunker& c) {
  std::vector<Bytes> out;
  for (std::size_t at = 0; at < message.size(); at += c.chunk_size) {
    const std::size_t n = std::min(c.chunk_size, message.size() - at);
    Bytes piece(message.begin() + static_cast<std::ptrdiff_t>(at),
                message.begin() + static_cast<std::ptrdiff_t>(at + n));
    piece.resize(c.chunk_size, c.pad_byte);
    out.push_back(std::move(piece));
  }
  return out;
}

Bytes unchunk(const std::vector<Bytes>& chunks, std::size_t length) {
  Bytes out;
  out.reserve(length);
  for (const auto& c : chunks) {
    if (out.size() >= length) break;
    const std::size_t n = std::min(c.size(), length - out.size());
    out.insert(out.end(), c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n));
  }
  if (out.size() != length) throw UsageError("chunks hold fewer bytes than the recorded length");
  return out;
}

void append_trace_frame(Bytes& trace, std::span<const std::uint8_t> frame) {
  put32(trace, static_cast<std::uint32_t>(frame.size()));
  trace.insert(trace.end(), frame.begin(), frame.end());
}

std::vector<Bytes> split_trace(std::span<const std::uint8_t> trace) {
  std::vector<Bytes> frames;
  std::size_t at = 0;
  while (at < trace.size()) {
    if (trace.size() - at < 4) throw EncodingError("truncated trace length prefix");
    const std::size_t len = get32(trace, at);
    at += 4;
    if (trace.size() - at < len) throw EncodingError("truncated trace frame");
    frames.emplace_back(trace.begin() + static_cast<std::ptrdiff_t>(at),
                        trace.begin() + static_cast<std::ptrdiff_t>(at + len));
    at += len;
  }
  return frames;
}

void write_trace_file(const std::string& path, std::span<const Bytes> frames) {
  Bytes trace;
  for (const auto& f : frames) append_trace_frame(trace, f);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EncodingError("cannot open trace file " + path);
  out.write(reinterpret_cast<const char*>(trace.data()), static_cast<std::streamsize>(trace.size()));
  if (!out) throw EncodingError("failed writing trace file " + path);
}

std::vector<Bytes> read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EncodingError("cannot open trace file " + path);
  Bytes trace((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return split_trace(trace);
}

}  // namespace smate
