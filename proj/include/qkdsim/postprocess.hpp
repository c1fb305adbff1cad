#pragma once

#include <cstddef>
#include <vector>

#include "qkdsim/bits.hpp"
#include "qkdsim/channels.hpp"
#include "qkdsim/random.hpp"

namespace qkdsim {

struct ReconciliationParams {
  std::size_t initial_block_size = 16;
  std::size_t passes_without_error_to_stop = 2;
  std::size_t max_passes = 32;

  void validate() const;
};

struct ReconciliationResult {
  BitString key_a;
  BitString key_b;
  std::vector<std::size_t> discarded_positions;  // original 1-based positions, ascending
  std::size_t leaked_parity_count = 0;
  std::size_t passes_run = 0;
  std::size_t bisections = 0;
};

// XOR of bits at 1-based positions lo..hi.
Bit block_parity(const BitString& bits, std::size_t lo, std::size_t hi);

// Binary search over [lo, hi] for a position where a and b differ. The Sender
// discloses the parity of each left half ("parity"); the Receiver answers
// with match/mismatch ("parity_result"). Each Sender parity increments
// *leaked when given. The block's parities must differ on entry.
std::size_t bisect_error(const BitString& a, const BitString& b, std::size_t lo, std::size_t hi,
                         Link& link, std::size_t* leaked = nullptr, std::size_t pass = 0);

// Multi-pass parity bisection. Every pass both sides apply the same fresh
// permutation (its seed is announced as "perm_seed"), split into blocks of
// initial_block_size, and drop one bit per mismatching block. Output keys keep
// the original order of the surviving bits.
ReconciliationResult reconcile(const BitString& a, const BitString& b,
                               const ReconciliationParams& params, Link& link, Rng& shared_rng);

// One-bit full-string parity comparison ("parity_check").
bool confirm_parity(const BitString& a, const BitString& b, Link& link);

inline constexpr std::size_t kAmplifySafetyBits = 16;

// Shared permutation, then the first discard_count positions are dropped.
BitString privacy_amplify(const BitString& key, std::size_t discard_count, Rng& shared_rng);

}  // namespace qkdsim
