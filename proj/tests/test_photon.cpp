#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qkdsim/photon.hpp"

using namespace qkdsim;

TEST_CASE("basis_of owns each polarization") {
  CHECK(basis_of(Polarization::Deg90) == Basis::Rectilinear);
  CHECK(basis_of(Polarization::Deg45) == Basis::Diagonal);
  CHECK(basis_of(Polarization::SpinR) == Basis::Circular);
  CHECK(basis_of(Polarization::Deg0) == Basis::Rectilinear);
  CHECK(basis_of(Polarization::Deg135) == Basis::Diagonal);
  CHECK(basis_of(Polarization::SpinL) == Basis::Circular);
}

TEST_CASE("encode follows the fixed convention") {
  CHECK(encode(0, Basis::Rectilinear) == Polarization::Deg0);
  CHECK(encode(1, Basis::Diagonal) == Polarization::Deg135);
  CHECK(encode(1, Basis::Circular) == Polarization::SpinR);
  CHECK(encode(1, Basis::Rectilinear) == Polarization::Deg90);
  CHECK(encode(0, Basis::Diagonal) == Polarization::Deg45);
  CHECK(encode(0, Basis::Circular) == Polarization::SpinL);
  for (Basis b : kAllBases) {
    for (Bit x : {Bit{0}, Bit{1}}) {
      CHECK(basis_of(encode(x, b)) == b);
      CHECK(encoded_bit(encode(x, b)) == x);
    }
  }
}

TEST_CASE("matching-basis measurement is the identity and leaves rng untouched") {
  Rng rng(7);
  Rng untouched(7);
  auto m = measure(Photon{Polarization::Deg0, 1}, Basis::Rectilinear, rng);
  CHECK(m.bit == 0);
  CHECK(m.collapsed == Polarization::Deg0);
  m = measure(Photon{Polarization::Deg135, 2}, Basis::Diagonal, rng);
  CHECK(m.bit == 1);
  CHECK(m.collapsed == Polarization::Deg135);
  CHECK(rng.next_u64() == untouched.next_u64());
}

TEST_CASE("round trip and collapse idempotence for every bit and basis") {
  Rng rng(11);
  for (Basis encode_basis : kAllBases) {
    for (Bit x : {Bit{0}, Bit{1}}) {
      const auto m = measure(Photon{encode(x, encode_basis), 0}, encode_basis, rng);
      CHECK(m.bit == x);
      CHECK(m.collapsed == encode(x, encode_basis));
      for (Basis probe : kAllBases) {
        const auto first = measure(Photon{encode(x, encode_basis), 0}, probe, rng);
        CHECK(basis_of(first.collapsed) == probe);
        for (int again = 0; again < 4; ++again) {
          const auto second = measure(Photon{first.collapsed, 0}, probe, rng);
          CHECK(second.bit == first.bit);
          CHECK(second.collapsed == first.collapsed);
        }
      }
    }
  }
}

TEST_CASE("Deg0 measured circularly: bit-1 frequency 0.5 +- 0.015 over 10000 trials") {
  Rng rng(2024);
  const int n = 10000;
  int ones = 0;
  for (int i = 0; i < n; ++i) {
    ones += measure(Photon{Polarization::Deg0, 0}, Basis::Circular, rng).bit;
  }
  CHECK(std::abs(ones / double(n) - 0.5) <= 0.015);
}

TEST_CASE("conjugacy: every mismatched ordered basis pair randomizes") {
  const std::size_t n = 10000;
  const double tol = oracle::four_sigma(0.5, n);
  std::uint64_t seed = 100;
  for (Basis from : kAllBases) {
    for (Basis to : kAllBases) {
      if (from == to) continue;
      for (Bit x : {Bit{0}, Bit{1}}) {
        Rng rng(seed++);
        std::size_t ones = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const auto m = measure(Photon{encode(x, from), 0}, to, rng);
          ones += m.bit;
          REQUIRE(m.collapsed == encode(m.bit, to));
        }
        CAPTURE(to_string(from));
        CAPTURE(to_string(to));
        CHECK(std::abs(ones / double(n) - 0.5) <= tol);
      }
    }
  }
}

TEST_CASE("identical seeds give identical outcome sequences") {
  Rng a(99);
  Rng b(99);
  for (int i = 0; i < 1000; ++i) {
    const Polarization p = kAllPolarizations[i % 6];
    const Basis basis = kAllBases[(i / 6) % 3];
    const auto ma = measure(Photon{p, 0}, basis, a);
    const auto mb = measure(Photon{p, 0}, basis, b);
    CHECK(ma.bit == mb.bit);
    CHECK(ma.collapsed == mb.collapsed);
  }
}

TEST_CASE("trace serialization names") {
  CHECK(to_string(Polarization::Deg0) == "0deg");
  CHECK(to_string(Polarization::Deg90) == "90deg");
  CHECK(to_string(Polarization::Deg45) == "45deg");
  CHECK(to_string(Polarization::Deg135) == "135deg");
  CHECK(to_string(Polarization::SpinL) == "spinL");
  CHECK(to_string(Polarization::SpinR) == "spinR");
  CHECK(to_string(Basis::Rectilinear) == "R");
  CHECK(to_string(Basis::Diagonal) == "D");
  CHECK(to_string(Basis::Circular) == "C");
  for (Polarization p : kAllPolarizations) {
    CHECK(parse_polarization(to_string(p)) == p);
  }
  CHECK_THROWS(parse_polarization("30deg"));
  CHECK_THROWS(parse_basis("X"));
}

TEST_CASE("BasisSet parsing and drawing") {
  CHECK(BasisSet::parse("DR").to_string() == "RD");
  CHECK(BasisSet::parse("R,D,C") == BasisSet::all());
  CHECK_THROWS(BasisSet::parse(""));
  Rng rng(5);
  const BasisSet only_c{Basis::Circular};
  for (int i = 0; i < 10; ++i) CHECK(only_c.draw(rng) == Basis::Circular);
}
