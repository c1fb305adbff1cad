#include "qkdsim/bsts.hpp"

#include <string>
#include <unordered_map>

#include "qkdsim/error.hpp"

namespace qkdsim {

std::string_view to_string(TimingRule rule) {
  return rule == TimingRule::Table2 ? "table2" : "example9";
}

TimingRule parse_timing_rule(std::string_view text) {
  if (text == "table2") return TimingRule::Table2;
  if (text == "example9") return TimingRule::Example9;
  throw InvalidArgument("unknown timing rule: " + std::string(text));
}

BasePair select_bases(Bit bit1, Bit bit2) {
  if (bit1 > 1 || bit2 > 1) {
    throw InvalidArgument("select_bases: bits must be 0 or 1");
  }
  switch ((bit1 << 1) | bit2) {
    case 0b00: return {Basis::Rectilinear, Basis::Diagonal};
    case 0b01: return {Basis::Rectilinear, Basis::Circular};
    case 0b10: return {Basis::Circular, Basis::Diagonal};
    default: return {Basis::Rectilinear, Basis::Diagonal};
  }
}

int timing_interval(std::span<const Bit> bits3_6, TimingRule rule) {
  if (bits3_6.size() != 4) {
    throw InvalidArgument("timing_interval: exactly four bits required");
  }
  int value = 0;
  for (Bit b : bits3_6) {
    if (b > 1) {
      throw InvalidArgument("timing_interval: bits must be 0 or 1");
    }
    value = (value << 1) | b;
  }
  if (rule == TimingRule::Table2) {
    return value + 1;
  }
  if (value == 0) {
    throw InvalidArgument("timing_interval: bits 0000 give a 0 ms interval under example9");
  }
  return value;
}

PrimaryKey::PrimaryKey(BitString bits) : bits_(std::move(bits)) {
  if (bits_.size() < kMinPrimaryKeyBits) {
    throw KeyTooShort("primary key needs at least 7 bits, got " + std::to_string(bits_.size()));
  }
}

SessionParams derive_session(const PrimaryKey& key, TimingRule rule) {
  const BitString& k = key.bits();
  const BasePair pair = select_bases(k.at(1), k.at(2));
  SessionParams p;
  p.base1 = pair.base1;
  p.base2 = pair.base2;
  p.interval_ms = timing_interval(k.bits().subspan(2, 4), rule);
  p.schedule.reserve(k.size() - 6);
  for (std::size_t pos = 7; pos <= k.size(); ++pos) {
    p.schedule.push_back(k.at(pos) == 0 ? p.base1 : p.base2);
  }
  return p;
}

Basis schedule_basis(const SessionParams& params, std::size_t i) {
  if (i < 1) {
    throw InvalidArgument("schedule_basis: photon index is 1-based");
  }
  if (params.schedule.empty()) {
    throw InvalidArgument("schedule_basis: empty schedule");
  }
  return params.schedule[(i - 1) % params.schedule.size()];
}

BstsSender::BstsSender(SessionParams params, BitString message, Rng rng)
    : params_(std::move(params)), message_(std::move(message)), rng_(std::move(rng)) {
  if (message_.empty()) {
    throw InvalidArgument("bsts: message must not be empty");
  }
  if (params_.interval_ms < 1 || params_.schedule.empty()) {
    throw InvalidArgument("bsts: invalid session parameters");
  }
}

void BstsSender::start(Link& link) {
  start_ms_ = link.now();
  started_ = true;
  link.send(Party::Sender, "bsts_start", Json{{"t_ms", start_ms_}});
}

Photon BstsSender::emit(Link& link) {
  if (!started_) {
    throw ContractViolation("bsts sender: emit before start");
  }
  const std::int64_t elapsed = link.now() - start_ms_;
  Photon photon;
  photon.tag = link.next_tag();
  last_real_ = elapsed > 0 && elapsed % params_.interval_ms == 0 && !all_real_sent();
  if (last_real_) {
    const Basis basis = schedule_basis(params_, next_bit_ + 1);
    photon.polarization = encode(message_[next_bit_], basis);
    ++next_bit_;
    real_tags_.push_back(photon.tag);
    real_times_.push_back(link.now());
  } else {
    photon.polarization = kAllPolarizations[rng_.below(kAllPolarizations.size())];
    ++fakes_;
  }
  return link.transmit(photon, last_real_);
}

void BstsSender::finish(Link& link) {
  if (!all_real_sent()) {
    throw ContractViolation("bsts sender: end mark before the last real photon");
  }
  link.send(Party::Sender, "bsts_end", Json{{"t_ms", link.now()}});
}

BstsReceiver::BstsReceiver(SessionParams params, Rng rng)
    : params_(std::move(params)), rng_(std::move(rng)) {}

void BstsReceiver::on_classical(const ClassicalMessage& msg) {
  if (msg.type == "bsts_start") {
    if (started_) {
      throw ProtocolViolation("bsts: duplicate start mark");
    }
    started_ = true;
    start_ms_ = msg.body.at("t_ms").get<std::int64_t>();
  } else if (msg.type == "bsts_end") {
    if (!started_) {
      throw ProtocolViolation("bsts: end mark before start mark");
    }
    if (ended_) {
      throw ProtocolViolation("bsts: duplicate end mark");
    }
    ended_ = true;
  }
}

bool BstsReceiver::on_photon(std::int64_t t_ms, const Photon& photon, Link& link) {
  const std::int64_t elapsed = t_ms - start_ms_;
  if (!started_ || ended_ || elapsed <= 0 || elapsed % params_.interval_ms != 0) {
    ++ignored_;
    return false;
  }
  const Basis basis = schedule_basis(params_, decoded_.size() + 1);
  const Measurement m = measure(photon, basis, rng_);
  link.record_measurement(photon.tag, basis, m.bit);
  decoded_.push_back(m.bit);
  return true;
}

BstsTransfer run_bsts(const BitString& message, const SessionParams& params, Link& link,
                      Rng& sender_rng, Rng& receiver_rng) {
  BstsSender sender(params, message, sender_rng);
  BstsReceiver receiver(params, receiver_rng);

  sender.start(link);
  receiver.on_classical(link.public_view().back());
  std::size_t sent = 0;
  while (!sender.all_real_sent()) {
    link.tick();
    const Photon arrived = sender.emit(link);
    ++sent;
    receiver.on_photon(link.now(), arrived, link);
  }
  sender.finish(link);
  receiver.on_classical(link.public_view().back());

  BstsTransfer out;
  out.decoded = receiver.decoded();
  out.real_tags = sender.real_tags();
  out.real_times = sender.real_times();
  out.photons_sent = sent;
  out.fake_count = sender.fake_count();
  out.ignored_by_receiver = receiver.ignored();
  return out;
}

BstsEveStats bsts_eve_stats(const BitString& message, const BstsTransfer& transfer,
                            const Link& link) {
  if (transfer.decoded.size() != message.size()) {
    throw ContractViolation("bsts_eve_stats: decoded length differs from message");
  }
  BstsEveStats stats;
  stats.receiver_error = static_cast<double>(hamming_distance(message, transfer.decoded)) /
                         static_cast<double>(message.size());
  if (!link.config().eavesdropper) {
    return stats;
  }
  std::unordered_map<std::uint64_t, Bit> eve_bits;
  eve_bits.reserve(link.eve_log().size());
  for (const EveRecord& r : link.eve_log()) {
    eve_bits.emplace(r.tag, r.bit);
  }
  std::size_t correct = 0;
  for (std::size_t k = 0; k < transfer.real_tags.size(); ++k) {
    const auto it = eve_bits.find(transfer.real_tags[k]);
    correct += it != eve_bits.end() && it->second == message[k];
  }
  stats.eve_accuracy = static_cast<double>(correct) / static_cast<double>(message.size());
  return stats;
}

BstsEveStats simulate_bsts_eve(const BitString& message, const SessionParams& params,
                               const std::optional<BasisSet>& eve_basis_set, std::uint64_t seed) {
  if (message.empty()) {
    throw InvalidArgument("simulate_bsts_eve: empty message");
  }
  Rng root(seed);
  Link link(QuantumChannelConfig{0.0, eve_basis_set}, mix_seed(seed, 1));
  Rng sender_rng = root.split(2);
  Rng receiver_rng = root.split(3);
  const BstsTransfer transfer = run_bsts(message, params, link, sender_rng, receiver_rng);
  return bsts_eve_stats(message, transfer, link);
}

}  // namespace qkdsim
