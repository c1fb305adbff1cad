#include "qkdsim/bb84.hpp"

#include <algorithm>

#include "qkdsim/error.hpp"

namespace qkdsim {

std::string bases_to_string(const BasisString& bases) {
  std::string s;
  s.reserve(bases.size());
  for (Basis b : bases) {
    s.push_back(basis_letter(b));
  }
  return s;
}

BasisString parse_bases(std::string_view text) {
  BasisString out;
  out.reserve(text.size());
  for (char c : text) {
    out.push_back(basis_from_letter(c));
  }
  return out;
}

PreparedPhotons sender_prepare(std::size_t n, const BasisSet& basis_pool, Rng& rng) {
  if (n == 0) {
    throw InvalidArgument("sender_prepare: n must be at least 1");
  }
  if (basis_pool.empty()) {
    throw InvalidArgument("sender_prepare: empty basis pool");
  }
  PreparedPhotons out;
  out.bits.reserve(n);
  out.bases.reserve(n);
  out.photons.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Bit bit = rng.bit();
    const Basis basis = basis_pool.draw(rng);
    out.bits.push_back(bit);
    out.bases.push_back(basis);
    out.photons.push_back(Photon{encode(bit, basis), i + 1});
  }
  return out;
}

Measurement receive_photon(const Photon& photon, const BasisSet& basis_pool, Rng& rng,
                           ReceiverRecord& record) {
  const Basis basis = basis_pool.draw(rng);
  const Measurement m = measure(photon, basis, rng);
  record.bases.push_back(basis);
  record.bits.push_back(m.bit);
  return m;
}

ReceiverRecord receiver_measure(std::span<const Photon> photons, const BasisSet& basis_pool,
                                Rng& rng) {
  if (photons.empty()) {
    throw InvalidArgument("receiver_measure: no photons");
  }
  if (basis_pool.empty()) {
    throw InvalidArgument("receiver_measure: empty basis pool");
  }
  ReceiverRecord record;
  record.bases.reserve(photons.size());
  record.bits.reserve(photons.size());
  for (const Photon& p : photons) {
    receive_photon(p, basis_pool, rng, record);
  }
  return record;
}

SiftResult sift(const BitString& s, const BasisString& b, const BasisString& b_prime,
                const BitString& s_prime, Link& link) {
  const std::size_t n = s.size();
  if (b.size() != n || b_prime.size() != n || s_prime.size() != n) {
    throw InvalidArgument("sift: sequences must have equal length");
  }
  link.send(Party::Sender, "basis_reveal", Json{{"bases", bases_to_string(b)}});

  SiftResult out;
  std::string matches(n, '0');
  for (std::size_t i = 0; i < n; ++i) {
    if (b[i] == b_prime[i]) {
      matches[i] = '1';
      out.kept_indices.push_back(i + 1);
      out.sender_key.push_back(s[i]);
      out.receiver_key.push_back(s_prime[i]);
    }
  }
  link.send(Party::Receiver, "basis_match", Json{{"matches", matches}});
  return out;
}

QberEstimate estimate_qber(const SiftResult& sifted, std::size_t sample_size, Link& link,
                           Rng& rng) {
  const std::size_t n = sifted.size();
  if (sample_size > n) {
    throw InvalidArgument("estimate_qber: sample_size exceeds key length");
  }

  // Partial Fisher-Yates: the first sample_size slots are a uniform sample.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = i;
  }
  for (std::size_t i = 0; i < sample_size; ++i) {
    std::swap(order[i], order[i + rng.below(n - i)]);
  }
  std::vector<std::size_t> sample(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sample_size));
  std::sort(sample.begin(), sample.end());

  Json sender_pairs = Json::array();
  Json receiver_pairs = Json::array();
  std::vector<bool> burned(n, false);
  QberEstimate est;
  est.sample_size = sample_size;
  for (std::size_t idx : sample) {
    burned[idx] = true;
    const std::size_t pos = sifted.kept_indices[idx];
    sender_pairs.push_back(Json::array({pos, sifted.sender_key[idx]}));
    receiver_pairs.push_back(Json::array({pos, sifted.receiver_key[idx]}));
    est.disagreements += sifted.sender_key[idx] != sifted.receiver_key[idx];
  }
  link.send(Party::Sender, "qber_sample", Json{{"pairs", std::move(sender_pairs)}});
  link.send(Party::Receiver, "qber_sample", Json{{"pairs", std::move(receiver_pairs)}});

  est.qber = sample_size == 0 ? 0.0
                              : static_cast<double>(est.disagreements) /
                                    static_cast<double>(sample_size);
  for (std::size_t i = 0; i < n; ++i) {
    if (!burned[i]) {
      est.remaining.kept_indices.push_back(sifted.kept_indices[i]);
      est.remaining.sender_key.push_back(sifted.sender_key[i]);
      est.remaining.receiver_key.push_back(sifted.receiver_key[i]);
    }
  }
  return est;
}

std::string_view to_string(Decision d) { return d == Decision::Abort ? "Abort" : "Proceed"; }

Decision detect_eve(double qber, double threshold) {
  if (!(qber >= 0.0 && qber <= 1.0) || !(threshold >= 0.0 && threshold <= 1.0)) {
    throw InvalidArgument("detect_eve: qber and threshold must lie in [0,1]");
  }
  return qber > threshold ? Decision::Abort : Decision::Proceed;
}

Decision detect_eve(double qber, double threshold, Link& link) {
  const Decision d = detect_eve(qber, threshold);
  link.record_decision("eve_detection", std::string(to_string(d)));
  return d;
}

Bb84Outcome run_bb84(const Bb84Params& params, Link& link, Rng& sender_rng, Rng& receiver_rng,
                     Rng& sample_rng) {
  Bb84Outcome out;
  out.sent = sender_prepare(params.photons, params.basis_pool, sender_rng);
  out.received.bases.reserve(params.photons);
  out.received.bits.reserve(params.photons);
  for (Photon& p : out.sent.photons) {
    link.tick();
    p.tag = link.next_tag();
    const Photon arrived = link.transmit(p);
    const Measurement m = receive_photon(arrived, params.basis_pool, receiver_rng, out.received);
    link.record_measurement(p.tag, out.received.bases.back(), m.bit);
  }
  link.tick();
  out.sifted = sift(out.sent.bits, out.sent.bases, out.received.bases, out.received.bits, link);
  out.estimate = estimate_qber(out.sifted, params.sample_size, link, sample_rng);
  out.decision = detect_eve(out.estimate.qber, params.qber_threshold, link);
  return out;
}

}  // namespace qkdsim
