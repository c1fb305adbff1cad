#include "qkdsim/postprocess.hpp"

#include <algorithm>
#include <string>

#include "qkdsim/error.hpp"

namespace qkdsim {

void ReconciliationParams::validate() const {
  if (initial_block_size < 1 || passes_without_error_to_stop < 1 || max_passes < 1) {
    throw InvalidArgument("reconciliation parameters must all be at least 1");
  }
}

Bit block_parity(const BitString& bits, std::size_t lo, std::size_t hi) {
  if (lo < 1 || lo > hi || hi > bits.size()) {
    throw InvalidArgument("block_parity: bad range [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "] for length " + std::to_string(bits.size()));
  }
  Bit p = 0;
  for (std::size_t i = lo - 1; i < hi; ++i) {
    p ^= bits[i];
  }
  return p;
}

namespace {

Json parity_body(std::size_t pass, std::size_t lo, std::size_t hi, Bit parity) {
  return Json{{"pass", pass}, {"block_lo", lo}, {"block_hi", hi}, {"parity", parity}};
}

// Sender's parity out, Receiver's verdict back. Returns true on match.
bool exchange_parity(const BitString& a, const BitString& b, std::size_t lo, std::size_t hi,
                     std::size_t pass, Link& link, std::size_t* leaked) {
  const Bit pa = block_parity(a, lo, hi);
  const Bit pb = block_parity(b, lo, hi);
  link.send(Party::Sender, "parity", parity_body(pass, lo, hi, pa));
  if (leaked != nullptr) {
    ++*leaked;
  }
  const bool match = pa == pb;
  link.send(Party::Receiver, "parity_result", Json{{"match", match}});
  return match;
}

}  // namespace

std::size_t bisect_error(const BitString& a, const BitString& b, std::size_t lo, std::size_t hi,
                         Link& link, std::size_t* leaked, std::size_t pass) {
  if (a.size() != b.size()) {
    throw InvalidArgument("bisect_error: length mismatch");
  }
  if (block_parity(a, lo, hi) == block_parity(b, lo, hi)) {
    throw ContractViolation("bisect_error called on a block whose parities agree");
  }
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (exchange_parity(a, b, lo, mid, pass, link, leaked)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

ReconciliationResult reconcile(const BitString& a, const BitString& b,
                               const ReconciliationParams& params, Link& link, Rng& shared_rng) {
  params.validate();
  if (a.size() != b.size()) {
    throw InvalidArgument("reconcile: key lengths differ");
  }
  if (a.empty()) {
    throw InvalidArgument("reconcile: empty keys");
  }
  if (params.initial_block_size > a.size()) {
    throw InvalidArgument("reconcile: initial_block_size exceeds key length");
  }

  ReconciliationResult out;
  // Surviving original positions (1-based), in original order.
  std::vector<std::size_t> alive(a.size());
  for (std::size_t i = 0; i < alive.size(); ++i) {
    alive[i] = i + 1;
  }
  std::vector<bool> dropped(a.size() + 1, false);

  std::size_t clean_streak = 0;
  while (out.passes_run < params.max_passes && clean_streak < params.passes_without_error_to_stop &&
         !alive.empty()) {
    const std::size_t pass = ++out.passes_run;
    const std::uint64_t seed = shared_rng.next_u64();
    link.send(Party::Sender, "perm_seed", Json{{"pass", pass}, {"seed", seed}});
    Rng perm_rng(seed);
    const std::vector<std::size_t> perm = random_permutation(alive.size(), perm_rng);

    // perm[k] is the index into alive of the k-th bit in shuffled order.
    std::vector<Bit> wa(alive.size());
    std::vector<Bit> wb(alive.size());
    for (std::size_t k = 0; k < perm.size(); ++k) {
      const std::size_t orig = alive[perm[k]];
      wa[k] = a.at(orig);
      wb[k] = b.at(orig);
    }
    const BitString pa(std::move(wa));
    const BitString pb(std::move(wb));

    bool clean = true;
    const std::size_t m = perm.size();
    for (std::size_t lo = 1; lo <= m; lo += params.initial_block_size) {
      const std::size_t hi = std::min(m, lo + params.initial_block_size - 1);
      if (exchange_parity(pa, pb, lo, hi, pass, link, &out.leaked_parity_count)) {
        continue;
      }
      clean = false;
      ++out.bisections;
      const std::size_t hit = bisect_error(pa, pb, lo, hi, link, &out.leaked_parity_count, pass);
      const std::size_t orig = alive[perm[hit - 1]];
      dropped[orig] = true;
      out.discarded_positions.push_back(orig);
      link.send(Party::Sender, "discard", Json{{"position", orig}});
      link.record_discard(orig);
    }

    if (!clean) {
      std::erase_if(alive, [&](std::size_t pos) { return dropped[pos]; });
    }
    clean_streak = clean ? clean_streak + 1 : 0;
  }

  std::sort(out.discarded_positions.begin(), out.discarded_positions.end());
  out.key_a.reserve(alive.size());
  out.key_b.reserve(alive.size());
  for (std::size_t pos : alive) {
    out.key_a.push_back(a.at(pos));
    out.key_b.push_back(b.at(pos));
  }
  return out;
}

bool confirm_parity(const BitString& a, const BitString& b, Link& link) {
  if (a.size() != b.size()) {
    throw InvalidArgument("confirm_parity: length mismatch");
  }
  if (a.empty()) {
    return true;
  }
  const Bit pa = block_parity(a, 1, a.size());
  const Bit pb = block_parity(b, 1, b.size());
  link.send(Party::Sender, "parity_check", Json{{"parity", pa}});
  link.send(Party::Receiver, "parity_result", Json{{"match", pa == pb}});
  return pa == pb;
}

BitString privacy_amplify(const BitString& key, std::size_t discard_count, Rng& shared_rng) {
  if (discard_count > key.size()) {
    throw InvalidArgument("privacy_amplify: discard_count exceeds key length");
  }
  const std::vector<std::size_t> perm = random_permutation(key.size(), shared_rng);
  BitString out;
  out.reserve(key.size() - discard_count);
  for (std::size_t k = discard_count; k < perm.size(); ++k) {
    out.push_back(key[perm[k]]);
  }
  return out;
}

}  // namespace qkdsim
