#include "qkdsim/bits.hpp"

#include "qkdsim/error.hpp"

namespace qkdsim {

BitString::BitString(std::vector<Bit> bits) : bits_(std::move(bits)) {
  for (Bit b : bits_) {
    if (b > 1) {
      throw InvalidArgument("bit value out of range");
    }
  }
}

BitString::BitString(std::initializer_list<int> bits) {
  bits_.reserve(bits.size());
  for (int b : bits) {
    push_back(static_cast<Bit>(b));
  }
}

BitString BitString::parse(std::string_view text) {
  BitString out;
  out.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw InvalidArgument("bit string may contain only '0' and '1': " + std::string(text));
    }
    out.bits_.push_back(static_cast<Bit>(c - '0'));
  }
  return out;
}

Bit BitString::at(std::size_t position) const {
  if (position < 1 || position > bits_.size()) {
    throw InvalidArgument("bit position " + std::to_string(position) + " outside 1.." +
                          std::to_string(bits_.size()));
  }
  return bits_[position - 1];
}

void BitString::push_back(Bit bit) {
  if (bit > 1) {
    throw InvalidArgument("bit value out of range");
  }
  bits_.push_back(bit);
}

BitString BitString::slice(std::size_t lo, std::size_t hi) const {
  if (lo < 1 || lo > hi || hi > bits_.size()) {
    throw InvalidArgument("bad slice range");
  }
  return BitString(std::vector<Bit>(bits_.begin() + static_cast<std::ptrdiff_t>(lo - 1),
                                    bits_.begin() + static_cast<std::ptrdiff_t>(hi)));
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (Bit b : bits_) {
    s.push_back(static_cast<char>('0' + b));
  }
  return s;
}

std::size_t hamming_distance(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("hamming_distance: length mismatch");
  }
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] != b[i];
  }
  return d;
}

}  // namespace qkdsim
