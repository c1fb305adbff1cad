#include "qkdsim/photon.hpp"

#include <algorithm>

#include "qkdsim/error.hpp"

namespace qkdsim {

BasisSet::BasisSet(std::initializer_list<Basis> bases) {
  for (Basis b : bases) {
    insert(b);
  }
}

BasisSet BasisSet::parse(std::string_view text) {
  BasisSet out;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '{' || c == '}') {
      continue;
    }
    out.insert(basis_from_letter(c));
  }
  if (out.empty()) {
    throw InvalidArgument("basis set must not be empty");
  }
  return out;
}

void BasisSet::insert(Basis b) {
  if (contains(b)) {
    return;
  }
  members_.push_back(b);
  std::sort(members_.begin(), members_.end());
}

bool BasisSet::contains(Basis b) const {
  return std::find(members_.begin(), members_.end(), b) != members_.end();
}

Basis BasisSet::draw(Rng& rng) const {
  if (members_.empty()) {
    throw InvalidArgument("cannot draw from an empty basis set");
  }
  if (members_.size() == 1) {
    return members_.front();
  }
  return members_[rng.below(members_.size())];
}

std::string BasisSet::to_string() const {
  std::string s;
  for (Basis b : members_) {
    s.push_back(basis_letter(b));
  }
  return s;
}

Basis basis_of(Polarization p) {
  switch (p) {
    case Polarization::Deg0:
    case Polarization::Deg90:
      return Basis::Rectilinear;
    case Polarization::Deg45:
    case Polarization::Deg135:
      return Basis::Diagonal;
    case Polarization::SpinL:
    case Polarization::SpinR:
      return Basis::Circular;
  }
  throw ContractViolation("unknown polarization");
}

Polarization encode(Bit bit, Basis basis) {
  switch (basis) {
    case Basis::Rectilinear:
      return bit ? Polarization::Deg90 : Polarization::Deg0;
    case Basis::Diagonal:
      return bit ? Polarization::Deg135 : Polarization::Deg45;
    case Basis::Circular:
      return bit ? Polarization::SpinR : Polarization::SpinL;
  }
  throw ContractViolation("unknown basis");
}

Bit encoded_bit(Polarization p) {
  switch (p) {
    case Polarization::Deg0:
    case Polarization::Deg45:
    case Polarization::SpinL:
      return 0;
    case Polarization::Deg90:
    case Polarization::Deg135:
    case Polarization::SpinR:
      return 1;
  }
  throw ContractViolation("unknown polarization");
}

Measurement measure(const Photon& photon, Basis basis, Rng& rng) {
  if (basis_of(photon.polarization) == basis) {
    return {encoded_bit(photon.polarization), photon.polarization};
  }
  const Bit bit = rng.bit();
  return {bit, encode(bit, basis)};
}

std::string_view to_string(Polarization p) {
  switch (p) {
    case Polarization::Deg0: return "0deg";
    case Polarization::Deg90: return "90deg";
    case Polarization::Deg45: return "45deg";
    case Polarization::Deg135: return "135deg";
    case Polarization::SpinL: return "spinL";
    case Polarization::SpinR: return "spinR";
  }
  throw ContractViolation("unknown polarization");
}

std::string_view to_string(Basis b) {
  switch (b) {
    case Basis::Rectilinear: return "R";
    case Basis::Diagonal: return "D";
    case Basis::Circular: return "C";
  }
  throw ContractViolation("unknown basis");
}

char basis_letter(Basis b) { return to_string(b).front(); }

Polarization parse_polarization(std::string_view text) {
  for (Polarization p : kAllPolarizations) {
    if (to_string(p) == text) {
      return p;
    }
  }
  throw InvalidArgument("unknown polarization: " + std::string(text));
}

Basis parse_basis(std::string_view text) {
  if (text.size() != 1) {
    throw InvalidArgument("unknown basis: " + std::string(text));
  }
  return basis_from_letter(text.front());
}

Basis basis_from_letter(char c) {
  switch (c) {
    case 'R': return Basis::Rectilinear;
    case 'D': return Basis::Diagonal;
    case 'C': return Basis::Circular;
    default: break;
  }
  throw InvalidArgument(std::string("unknown basis letter: ") + c);
}

}  // namespace qkdsim
