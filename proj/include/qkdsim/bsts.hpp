#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qkdsim/bits.hpp"
#include "qkdsim/channels.hpp"
#include "qkdsim/photon.hpp"
#include "qkdsim/random.hpp"

namespace qkdsim {

// How bits 3..6 of the primary key become a slot interval.
//   Table2:   binary value + 1, so 0000 -> 1 ms and 1111 -> 16 ms.
//   Example9: binary value as is, so 1001 -> 9 ms; 0000 is rejected.
enum class TimingRule { Table2, Example9 };

std::string_view to_string(TimingRule rule);
TimingRule parse_timing_rule(std::string_view text);

struct BasePair {
  Basis base1 = Basis::Rectilinear;
  Basis base2 = Basis::Diagonal;
  friend bool operator==(const BasePair&, const BasePair&) = default;
};

// 00 -> (R, D), 01 -> (R, C), 10 -> (C, D), 11 -> (R, D).
BasePair select_bases(Bit bit1, Bit bit2);

// Takes exactly four bits, most significant first.
int timing_interval(std::span<const Bit> bits3_6, TimingRule rule = TimingRule::Table2);

inline constexpr std::size_t kMinPrimaryKeyBits = 7;

class PrimaryKey {
 public:
  // Throws KeyTooShort below 7 bits.
  explicit PrimaryKey(BitString bits);

  const BitString& bits() const { return bits_; }
  std::size_t size() const { return bits_.size(); }

 private:
  BitString bits_;
};

struct SessionParams {
  Basis base1 = Basis::Rectilinear;
  Basis base2 = Basis::Diagonal;
  int interval_ms = 1;
  // One basis per key position 7..L: bit 0 -> base1, bit 1 -> base2.
  std::vector<Basis> schedule;

  friend bool operator==(const SessionParams&, const SessionParams&) = default;
};

SessionParams derive_session(const PrimaryKey& key, TimingRule rule = TimingRule::Table2);

// Basis for the i-th real photon (1-based); the schedule repeats from key bit 7.
Basis schedule_basis(const SessionParams& params, std::size_t i);

// Sender side. Start is announced at the current clock time; afterwards one
// photon goes out per tick. Ticks that are multiples of interval_ms (counted
// from the start mark) carry the next message bit, all others a fake photon
// of uniformly random polarization.
class BstsSender {
 public:
  BstsSender(SessionParams params, BitString message, Rng rng);

  void start(Link& link);
  // Emits this tick's photon through the link; returns what reaches the receiver.
  Photon emit(Link& link);
  // Announces the end mark; only valid once every message bit has been sent.
  void finish(Link& link);

  bool all_real_sent() const { return next_bit_ == message_.size(); }
  const std::vector<std::uint64_t>& real_tags() const { return real_tags_; }
  const std::vector<std::int64_t>& real_times() const { return real_times_; }
  std::size_t fake_count() const { return fakes_; }
  bool last_emission_real() const { return last_real_; }

 private:
  SessionParams params_;
  BitString message_;
  Rng rng_;
  std::int64_t start_ms_ = 0;
  bool started_ = false;
  std::size_t next_bit_ = 0;
  std::size_t fakes_ = 0;
  bool last_real_ = false;
  std::vector<std::uint64_t> real_tags_;
  std::vector<std::int64_t> real_times_;
};

// Receiver side. Reads only photons at real slots between the start and end
// marks, each in its scheduled basis; everything else is left unmeasured.
class BstsReceiver {
 public:
  BstsReceiver(SessionParams params, Rng rng);

  // Throws ProtocolViolation on an end mark without a start, or a repeated mark.
  void on_classical(const ClassicalMessage& msg);
  // Returns true if the photon was measured.
  bool on_photon(std::int64_t t_ms, const Photon& photon, Link& link);

  bool started() const { return started_; }
  bool ended() const { return ended_; }
  const BitString& decoded() const { return decoded_; }
  std::size_t ignored() const { return ignored_; }

 private:
  SessionParams params_;
  Rng rng_;
  bool started_ = false;
  bool ended_ = false;
  std::int64_t start_ms_ = 0;
  BitString decoded_;
  std::size_t ignored_ = 0;
};

struct BstsTransfer {
  BitString decoded;
  std::vector<std::uint64_t> real_tags;
  std::vector<std::int64_t> real_times;
  std::size_t photons_sent = 0;
  std::size_t fake_count = 0;
  std::size_t ignored_by_receiver = 0;
};

// Drives sender and receiver tick by tick over the link.
BstsTransfer run_bsts(const BitString& message, const SessionParams& params, Link& link,
                      Rng& sender_rng, Rng& receiver_rng);

struct BstsEveStats {
  std::optional<double> eve_accuracy;  // absent when there is no eavesdropper
  double receiver_error = 0.0;
};

// Fraction of real message bits Eve reads correctly and fraction the receiver
// decodes wrongly, from a finished transfer on this link.
BstsEveStats bsts_eve_stats(const BitString& message, const BstsTransfer& transfer,
                            const Link& link);

// Noiseless session with intercept-resend Eve measuring every photon (real or
// fake) in a basis drawn from eve_basis_set; no Eve when the set is absent.
BstsEveStats simulate_bsts_eve(const BitString& message, const SessionParams& params,
                               const std::optional<BasisSet>& eve_basis_set, std::uint64_t seed);

}  // namespace qkdsim
