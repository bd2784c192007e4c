#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace smate {

using Bytes = std::vector<std::uint8_t>;

enum class PayloadKind : std::uint8_t { Plain = 0, Encoded = 1 };

struct Packet {
  std::uint16_t sender_id = 0;
  std::uint8_t path_index = 0;
  std::uint16_t session = 0;
  /// Slot label within the session's cycle, 0-based.
  std::uint16_t round = 0;
  PayloadKind kind = PayloadKind::Plain;
  Bytes payload;

  friend bool operator==(const Packet&, const Packet&) = default;
};

// Frame layout (big-endian):
//   magic "SM" | version | sender(2) | path(1) | session(2) | round(2) |
//   kind(1) | payload_len(2) | payload | crc32(4)
inline constexpr std::uint8_t kWireMagic0 = 0x53;
inline constexpr std::uint8_t kWireMagic1 = 0x4D;
inline constexpr std::uint8_t kWireVersion = 0x01;
inline constexpr std::size_t kWireHeaderSize = 13;
inline constexpr std::size_t kWireOverhead = kWireHeaderSize + 4;

enum class WireFault : std::uint8_t {
  Truncated,     // shorter than the fixed overhead
  Integrity,     // checksum mismatch
  BadMagic,
  BadVersion,
  BadKind,
  LengthMismatch,
};

const char* to_string(WireFault f);

/// True for faults that indicate a damaged frame rather than a foreign one.
inline bool is_integrity_failure(WireFault f) { return f == WireFault::Integrity; }

using DecodeResult = std::variant<Packet, WireFault>;

/// CRC-32 (reflected polynomial 0xEDB88320, init and xorout 0xFFFFFFFF).
std::uint32_t crc32(std::span<const std::uint8_t> data);

/// Throws EncodingError if the payload exceeds 65535 bytes.
Bytes encode_wire(const Packet& p);
/// Never throws; every malformed input maps to a WireFault.
DecodeResult decode_wire(std::span<const std::uint8_t> frame);

/// Per-path shared symmetric keys.
class KeyRing {
 public:
  /// Throws UsageError if `keys` is empty or any key is empty.
  explicit KeyRing(std::vector<Bytes> keys);

  std::size_t size() const { return keys_.size(); }
  const Bytes& key(std::size_t path) const { return keys_.at(path); }

 private:
  std::vector<Bytes> keys_;
};

/// Keystream stub: byte i of the output is message[i] XOR KS[i], where KS is
/// the concatenation of big-endian FNV-1a-64 digests of
/// key || nonce(8, BE) || counter(8, BE) for counter = 0, 1, ...
/// Applying it twice with the same key and nonce returns the message.
Bytes encrypt(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message, std::uint64_t nonce);
inline Bytes decrypt(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message, std::uint64_t nonce) {
  return encrypt(key, message, nonce);
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> data);

struct Chunker {
  /// Throws UsageError for chunk_size == 0.
  explicit Chunker(std::size_t chunk_size);

  std::size_t chunk_size;
  std::uint8_t pad_byte = 0x00;
};

/// Splits into ceil(len / chunk_size) pieces, the last padded with pad_byte.
std::vector<Bytes> chunk(std::span<const std::uint8_t> message, const Chunker& c);
/// Concatenates and truncates to `length`. Throws UsageError if the chunks
/// hold fewer than `length` bytes.
Bytes unchunk(const std::vector<Bytes>& chunks, std::size_t length);

// Trace files: repeated [frame length (4, BE)][frame bytes].
void append_trace_frame(Bytes& trace, std::span<const std::uint8_t> frame);
/// Throws EncodingError on a truncated trace.
std::vector<Bytes> split_trace(std::span<const std::uint8_t> trace);
void write_trace_file(const std::string& path, std::span<const Bytes> frames);
std::vector<Bytes> read_trace_file(const std::string& path);

}  // namespace smate
