#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles/gf_oracle.hpp"
#include "smate/errors.hpp"
#include "smate/gf.hpp"

using namespace smate;

namespace {

const Field& aes_field() {
  static const Field f = Field::ext256(0x11B, 0x03);
  return f;
}

}  // namespace

TEST_CASE("add is carry-free xor") {
  const Field& f = default_field();
  CHECK(f.add(f.element(0x0A), f.element(0x05)).value == 0x0F);
  for (unsigned x = 0; x < 256; ++x) {
    CHECK(f.add(f.element(x), f.element(x)) == f.zero());
    CHECK(f.add(f.element(x), f.zero()) == f.element(x));
  }
}

TEST_CASE("mul examples") {
  const Field& aes = aes_field();
  CHECK(aes.mul(aes.element(0x02), aes.element(0x80)).value == 0x1B);
  CHECK(aes.mul(aes.element(0x0A), aes.element(0x0A)).value == 0x44);
  // x^3 + x squared never reaches degree 8, so the result is poly-independent.
  CHECK(default_field().mul(default_field().element(0x0A), default_field().element(0x0A)).value == 0x44);
  for (unsigned x = 0; x < 256; ++x) CHECK(aes.mul(aes.element(x), aes.one()).value == x);
}

TEST_CASE("mul agrees with the long-division oracle") {
  for (const Field* f : {&default_field(), &aes_field()}) {
    for (unsigned a = 0; a < 256; ++a) {
      for (unsigned b = 0; b < 256; ++b) {
        REQUIRE(f->mul_raw(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)) ==
                oracle::gf_mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b), f->reduction_poly()));
      }
    }
  }
}

TEST_CASE("inv") {
  const Field& f = default_field();
  CHECK(f.inv(f.one()) == f.one());
  CHECK(f.inv(f.element(0x0A)).value == oracle::gf_inv(0x0A, 0x11D));
  CHECK(aes_field().inv(aes_field().element(0x0A)).value == oracle::gf_inv(0x0A, 0x11B));
  for (unsigned x = 1; x < 256; ++x) {
    const auto e = f.element(x);
    CHECK(f.mul(e, f.inv(e)) == f.one());
    CHECK(f.inv(f.inv(e)) == e);
  }
  CHECK_THROWS_AS(f.inv(f.zero()), DomainError);
}

TEST_CASE("pow") {
  const Field& f = default_field();
  CHECK(f.pow(f.generator(), 255) == f.one());
  CHECK(aes_field().pow(aes_field().generator(), 255) == aes_field().one());
  CHECK(f.pow(f.element(0x02), 3).value == 0x08);
  CHECK(aes_field().pow(aes_field().element(0x02), 3).value == 0x08);
  for (unsigned x = 0; x < 256; ++x) {
    CHECK(f.pow(f.element(x), 1).value == x);
    CHECK(f.pow(f.element(x), 0) == f.one());
    for (unsigned e : {2U, 7U, 254U, 256U, 1000U}) {
      REQUIRE(f.pow(f.element(x), e).value == oracle::gf_pow(static_cast<std::uint8_t>(x), e, 0x11D));
    }
  }
}

TEST_CASE("field laws on random triples") {
  const Field& f = default_field();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<unsigned> byte(0, 255);
  for (int i = 0; i < 10000; ++i) {
    const auto a = f.element(byte(rng));
    const auto b = f.element(byte(rng));
    const auto c = f.element(byte(rng));
    REQUIRE(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)));
    REQUIRE(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
    REQUIRE(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
  }
  for (unsigned a = 0; a < 256; ++a) {
    for (unsigned b = 0; b < 256; ++b) {
      REQUIRE(f.add(f.element(a), f.element(b)) == f.add(f.element(b), f.element(a)));
      REQUIRE(f.mul(f.element(a), f.element(b)) == f.mul(f.element(b), f.element(a)));
    }
  }
}

TEST_CASE("generator is primitive") {
  CHECK(default_field().multiplicative_order(default_field().generator()) == 255);
  CHECK(aes_field().multiplicative_order(aes_field().generator()) == 255);
  // 0x02 is not primitive modulo 0x11B.
  CHECK(aes_field().multiplicative_order(aes_field().element(0x02)) == 51);
  CHECK_THROWS_AS(Field::ext256(0x11B, 0x02), UsageError);
}

TEST_CASE("irreducibility check") {
  CHECK(is_irreducible_deg8(0x11B));
  CHECK(is_irreducible_deg8(0x11D));
  CHECK_FALSE(is_irreducible_deg8(0x101));  // (x+1)^8
  CHECK_FALSE(is_irreducible_deg8(0x1FF));
  CHECK_FALSE(is_irreducible_deg8(0x3F));
  // Necklace count: (2^8 - 2^4) / 8 = 30 irreducible polynomials of degree 8.
  int count = 0;
  for (unsigned p = 0x100; p < 0x200; ++p) count += is_irreducible_deg8(static_cast<std::uint16_t>(p)) ? 1 : 0;
  CHECK(count == 30);
  CHECK_THROWS_AS(Field::ext256(0x101, 0x02), UsageError);
}

TEST_CASE("field mismatch is a usage error") {
  const Field& f = default_field();
  const Field& g = aes_field();
  CHECK_THROWS_AS(f.add(f.one(), g.one()), UsageError);
  CHECK_THROWS_AS(f.mul(g.one(), f.one()), UsageError);
  CHECK_THROWS_AS(f.element(256), UsageError);
}

TEST_CASE("binary field") {
  const Field b = Field::binary();
  CHECK(b.order() == 2);
  CHECK(b.mul(b.one(), b.one()) == b.one());
  CHECK(b.mul(b.one(), b.zero()) == b.zero());
  CHECK(b.add(b.one(), b.one()) == b.zero());
  CHECK(b.inv(b.one()) == b.one());
  CHECK_THROWS_AS(b.inv(b.zero()), DomainError);
  CHECK_THROWS_AS(b.element(2), UsageError);
  CHECK_THROWS_AS(b.add(b.one(), default_field().one()), UsageError);
}

TEST_CASE("bulk axpy matches scalar multiply") {
  const Field& f = default_field();
  std::mt19937_64 rng(7);
  std::vector<std::uint8_t> src(97), dst(97);
  for (auto& v : src) v = static_cast<std::uint8_t>(rng());
  for (auto& v : dst) v = static_cast<std::uint8_t>(rng());
  for (unsigned c = 0; c < 256; ++c) {
    auto out = dst;
    f.axpy(out, static_cast<std::uint8_t>(c), src);
    for (std::size_t i = 0; i < out.size(); ++i) {
      REQUIRE(out[i] == (dst[i] ^ oracle::gf_mul(static_cast<std::uint8_t>(c), src[i], 0x11D)));
    }
  }
}
