#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qkdsim/bits.hpp"
#include "qkdsim/channels.hpp"
#include "qkdsim/photon.hpp"
#include "qkdsim/random.hpp"

namespace qkdsim {

using BasisString = std::vector<Basis>;

std::string bases_to_string(const BasisString& bases);
BasisString parse_bases(std::string_view text);

inline BasisSet default_bb84_pool() { return {Basis::Rectilinear, Basis::Diagonal}; }

struct PreparedPhotons {
  BitString bits;        // s
  BasisString bases;     // b
  std::vector<Photon> photons;
};

// Tags photons 1..n.
PreparedPhotons sender_prepare(std::size_t n, const BasisSet& basis_pool, Rng& rng);

struct ReceiverRecord {
  BasisString bases;  // b'
  BitString bits;     // s'
};

// One photon: draws the basis, then measures. receiver_measure is this in a loop.
Measurement receive_photon(const Photon& photon, const BasisSet& basis_pool, Rng& rng,
                           ReceiverRecord& record);

ReceiverRecord receiver_measure(std::span<const Photon> photons, const BasisSet& basis_pool,
                                Rng& rng);

struct SiftResult {
  std::vector<std::size_t> kept_indices;  // 1-based photon positions, ascending
  BitString sender_key;
  BitString receiver_key;

  std::size_t size() const { return kept_indices.size(); }
};

// Sender announces b ("basis_reveal"), Receiver answers which positions
// matched ("basis_match").
SiftResult sift(const BitString& s, const BasisString& b, const BasisString& b_prime,
                const BitString& s_prime, Link& link);

struct QberEstimate {
  double qber = 0.0;
  std::size_t sample_size = 0;
  std::size_t disagreements = 0;
  SiftResult remaining;
};

// Both sides disclose the sampled positions ("qber_sample"); those bits are
// removed from the returned key. An empty sample reports qber 0.
QberEstimate estimate_qber(const SiftResult& sifted, std::size_t sample_size, Link& link,
                           Rng& rng);

enum class Decision { Proceed, Abort };

std::string_view to_string(Decision d);

inline constexpr double kDefaultQberThreshold = 0.11;

// Abort iff qber > threshold.
Decision detect_eve(double qber, double threshold);
// Same, and records an "eve_detection" decision in the trace.
Decision detect_eve(double qber, double threshold, Link& link);

struct Bb84Params {
  std::size_t photons = 4096;
  BasisSet basis_pool = default_bb84_pool();
  std::size_t sample_size = 200;
  double qber_threshold = kDefaultQberThreshold;
};

struct Bb84Outcome {
  PreparedPhotons sent;
  ReceiverRecord received;
  SiftResult sifted;
  QberEstimate estimate;
  Decision decision = Decision::Proceed;
};

// Steps 1-7 plus sampling and detection. One photon per clock tick.
Bb84Outcome run_bb84(const Bb84Params& params, Link& link, Rng& sender_rng, Rng& receiver_rng,
                     Rng& sample_rng);

}  // namespace qkdsim
