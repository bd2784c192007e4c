#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace smate {

enum class FieldKind : std::uint8_t { Binary, Ext256 };

/// Identifies the field an element belongs to. Two elements may only be
/// combined when their tags compare equal.
struct FieldTag {
  FieldKind kind = FieldKind::Ext256;
  std::uint16_t reduction_poly = 0;

  friend bool operator==(const FieldTag&, const FieldTag&) = default;
};

struct FieldElement {
  std::uint8_t value = 0;
  FieldTag tag;

  friend bool operator==(const FieldElement&, const FieldElement&) = default;
};

/// F_2 or F_{2^8} with precomputed log/antilog tables.
///
/// Construction validates the field: for F_{2^8} the reduction polynomial
/// must be irreducible of degree 8 and the generator must have
/// multiplicative order 255. Instances are immutable.
class Field {
 public:
  static Field binary();
  /// Throws UsageError if `reduction_poly` is not irreducible of degree 8 or
  /// `generator` is not primitive.
  static Field ext256(std::uint16_t reduction_poly = 0x11D, std::uint8_t generator = 0x02);

  FieldKind kind() const { return tag_.kind; }
  FieldTag tag() const { return tag_; }
  std::uint16_t reduction_poly() const { return tag_.reduction_poly; }
  /// Number of elements q.
  std::size_t order() const { return tag_.kind == FieldKind::Binary ? 2 : 256; }
  FieldElement generator() const { return {generator_, tag_}; }

  /// Throws UsageError if `value` does not fit the field's bit width.
  FieldElement element(unsigned value) const;
  FieldElement zero() const { return {0, tag_}; }
  FieldElement one() const { return {1, tag_}; }

  FieldElement add(FieldElement a, FieldElement b) const;
  FieldElement mul(FieldElement a, FieldElement b) const;
  /// Throws DomainError for a == 0.
  FieldElement inv(FieldElement a) const;
  FieldElement pow(FieldElement a, std::uint64_t e) const;
  /// Multiplicative order of a nonzero element.
  unsigned multiplicative_order(FieldElement a) const;

  // Raw byte operations for bulk payload coding. No tag checks.
  std::uint8_t mul_raw(std::uint8_t a, std::uint8_t b) const;
  std::uint8_t inv_raw(std::uint8_t a) const;

  /// dst[i] ^= c * src[i]. Spans must have equal length.
  void axpy(std::span<std::uint8_t> dst, std::uint8_t c, std::span<const std::uint8_t> src) const;
  /// dst[i] = c * dst[i].
  void scale(std::span<std::uint8_t> dst, std::uint8_t c) const;

 private:
  Field() = default;
  void check(FieldElement a) const;

  FieldTag tag_;
  std::uint8_t generator_ = 1;
  std::array<std::uint8_t, 512> exp_{};
  std::array<std::uint16_t, 256> log_{};
};

/// The field used by every coding scheme: 0x11D with generator 0x02.
const Field& default_field();

/// True iff `poly` (degree 8, bit 8 set) has no factor of degree 1..4 over F_2.
bool is_irreducible_deg8(std::uint16_t poly);

}  // namespace smate
