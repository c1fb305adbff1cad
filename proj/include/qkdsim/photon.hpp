#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "qkdsim/bits.hpp"
#include "qkdsim/random.hpp"

namespace qkdsim {

enum class Basis : std::uint8_t { Rectilinear, Diagonal, Circular };

inline constexpr std::array<Basis, 3> kAllBases = {Basis::Rectilinear, Basis::Diagonal,
                                                   Basis::Circular};

enum class Polarization : std::uint8_t { Deg0, Deg90, Deg45, Deg135, SpinL, SpinR };

inline constexpr std::array<Polarization, 6> kAllPolarizations = {
    Polarization::Deg0,   Polarization::Deg90, Polarization::Deg45,
    Polarization::Deg135, Polarization::SpinL, Polarization::SpinR};

struct Photon {
  Polarization polarization = Polarization::Deg0;
  std::uint64_t tag = 0;

  friend bool operator==(const Photon&, const Photon&) = default;
};

// Nonempty-or-empty set of bases with a fixed iteration order R, D, C.
class BasisSet {
 public:
  BasisSet() = default;
  BasisSet(std::initializer_list<Basis> bases);

  static BasisSet all() { return {Basis::Rectilinear, Basis::Diagonal, Basis::Circular}; }
  // Parses letters such as "RD" or "R,D,C".
  static BasisSet parse(std::string_view text);

  void insert(Basis b);
  bool contains(Basis b) const;
  bool empty() const { return members_.empty(); }
  std::size_t size() const { return members_.size(); }
  const std::vector<Basis>& members() const { return members_; }

  Basis draw(Rng& rng) const;

  std::string to_string() const;

  friend bool operator==(const BasisSet&, const BasisSet&) = default;

 private:
  std::vector<Basis> members_;
};

Basis basis_of(Polarization p);

// Fixed convention: 0 -> {0deg, 45deg, spinL}, 1 -> {90deg, 135deg, spinR}.
Polarization encode(Bit bit, Basis basis);

// Bit carried by a polarization within its own basis.
Bit encoded_bit(Polarization p);

struct Measurement {
  Bit bit = 0;
  Polarization collapsed = Polarization::Deg0;
};

// Matching basis reads the encoded bit without touching rng. Any other basis
// yields a uniform bit and leaves the photon in encode(bit, basis).
Measurement measure(const Photon& photon, Basis basis, Rng& rng);

std::string_view to_string(Polarization p);
std::string_view to_string(Basis b);
char basis_letter(Basis b);
Polarization parse_polarization(std::string_view text);
Basis parse_basis(std::string_view text);
Basis basis_from_letter(char c);

}  // namespace qkdsim
