#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qkdsim {

using Bit = std::uint8_t;

// Ordered bit sequence. operator[] is 0-based for internal loops; at() takes
// the 1-based positions used in protocol messages and reports.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::vector<Bit> bits);
  BitString(std::initializer_list<int> bits);

  // Parses a string of '0'/'1' characters.
  static BitString parse(std::string_view text);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  Bit operator[](std::size_t index) const { return bits_[index]; }
  Bit at(std::size_t position) const;

  void push_back(Bit bit);
  void reserve(std::size_t n) { bits_.reserve(n); }

  std::span<const Bit> bits() const { return bits_; }
  std::vector<Bit>::const_iterator begin() const { return bits_.begin(); }
  std::vector<Bit>::const_iterator end() const { return bits_.end(); }

  // Bits at 1-based positions lo..hi inclusive.
  BitString slice(std::size_t lo, std::size_t hi) const;

  std::string to_string() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<Bit> bits_;
};

// Number of 0-based indices where the two strings differ; sizes must match.
std::size_t hamming_distance(const BitString& a, const BitString& b);

}  // namespace qkdsim
