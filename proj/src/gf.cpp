#include "smate/gf.hpp"

#include <cassert>
#include <string>

#include "smate/errors.hpp"

namespace smate {

namespace {

// Shift-and-add product reduced modulo `poly`. Only used to build tables.
std::uint8_t slow_mul(std::uint8_t a, std::uint8_t b, std::uint16_t poly) {
  std::uint16_t acc = 0;
  std::uint16_t x = a;
  while (b != 0) {
    if (b & 1U) acc ^= x;
    b >>= 1;
    x <<= 1;
    if (x & 0x100U) x ^= poly;
  }
  return static_cast<std::uint8_t>(acc);
}

int degree(unsigned p) {
  int d = -1;
  while (p != 0) {
    p >>= 1;
    ++d;
  }
  return d;
}

// Remainder of carry-less division a mod b.
unsigned poly_mod(unsigned a, unsigned b) {
  const int db = degree(b);
  for (int da = degree(a); da >= db; da = degree(a)) a ^= b << (da - db);
  return a;
}

}  // namespace

bool is_irreducible_deg8(std::uint16_t poly) {
  if (degree(poly) != 8) return false;
  // Any reducible degree-8 polynomial has a factor of degree <= 4.
  for (unsigned d = 2; d < 32; ++d) {
    if (poly_mod(poly, d) == 0) return false;
  }
  return true;
}

Field Field::binary() {
  Field f;
  f.tag_ = {FieldKind::Binary, 0};
  f.generator_ = 1;
  f.exp_.fill(1);
  f.log_.fill(0);
  return f;
}

Field Field::ext256(std::uint16_t reduction_poly, std::uint8_t generator) {
  if (!is_irreducible_deg8(reduction_poly)) {
    throw UsageError("reduction polynomial " + std::to_string(reduction_poly) +
                     " is not irreducible of degree 8");
  }
  Field f;
  f.tag_ = {FieldKind::Ext256, reduction_poly};
  f.generator_ = generator;

  std::uint8_t x = 1;
  for (unsigned i = 0; i < 255; ++i) {
    if (i > 0 && x == 1) {
      throw UsageError("generator " + std::to_string(generator) + " has order " + std::to_string(i) +
                       ", not 255");
    }
    f.exp_[i] = x;
    f.log_[x] = static_cast<std::uint16_t>(i);
    x = slow_mul(x, generator, reduction_poly);
  }
  if (x != 1 || generator == 0) throw UsageError("generator is not primitive");
  for (unsigned i = 255; i < f.exp_.size(); ++i) f.exp_[i] = f.exp_[i - 255];
  f.log_[0] = 0;
  return f;
}

const Field& default_field() {
  static const Field field = Field::ext256(0x11D, 0x02);
  return field;
}

void Field::check(FieldElement a) const {
  if (a.tag != tag_) throw UsageError("field element belongs to a different field");
}

FieldElement Field::element(unsigned value) const {
  if (value >= order()) throw UsageError("value " + std::to_string(value) + " does not fit the field");
  return {static_cast<std::uint8_t>(value), tag_};
}

FieldElement Field::add(FieldElement a, FieldElement b) const {
  check(a);
  check(b);
  return {static_cast<std::uint8_t>(a.value ^ b.value), tag_};
}

std::uint8_t Field::mul_raw(std::uint8_t a, std::uint8_t b) const {
  if (tag_.kind == FieldKind::Binary) return a & b & 1U;
  if (a == 0 || b == 0) return 0;
  return exp_[log_[a] + log_[b]];
}

std::uint8_t Field::inv_raw(std::uint8_t a) const {
  if (a == 0) throw DomainError("zero has no multiplicative inverse");
  if (tag_.kind == FieldKind::Binary) return 1;
  return exp_[255 - log_[a]];
}

FieldElement Field::mul(FieldElement a, FieldElement b) const {
  check(a);
  check(b);
  return {mul_raw(a.value, b.value), tag_};
}

FieldElement Field::inv(FieldElement a) const {
  check(a);
  return {inv_raw(a.value), tag_};
}

FieldElement Field::pow(FieldElement a, std::uint64_t e) const {
  check(a);
  if (e == 0) return one();
  if (a.value == 0) return zero();
  if (tag_.kind == FieldKind::Binary) return one();
  const auto l = static_cast<std::uint64_t>(log_[a.value]) * (e % 255);
  return {exp_[l % 255], tag_};
}

unsigned Field::multiplicative_order(FieldElement a) const {
  check(a);
  if (a.value == 0) throw DomainError("zero has no multiplicative order");
  unsigned order = 1;
  for (std::uint8_t x = a.value; x != 1; x = mul_raw(x, a.value)) ++order;
  return order;
}

void Field::axpy(std::span<std::uint8_t> dst, std::uint8_t c, std::span<const std::uint8_t> src) const {
  assert(dst.size() == src.size());
  if (c == 0) return;
  if (c == 1) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
    return;
  }
  const unsigned lc = log_[c];
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (src[i] != 0) dst[i] ^= exp_[lc + log_[src[i]]];
  }
}

void Field::scale(std::span<std::uint8_t> dst, std::uint8_t c) const {
  if (c == 1) return;
  for (auto& b : dst) b = mul_raw(b, c);
}

}  // namespace smate
