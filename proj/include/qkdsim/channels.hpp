#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qkdsim/photon.hpp"
#include "qkdsim/random.hpp"

namespace qkdsim {

using Json = nlohmann::ordered_json;

enum class Party : std::uint8_t { Sender, Receiver };

std::string_view to_string(Party p);
Party parse_party(std::string_view text);

struct QuantumChannelConfig {
  double noise_flip_prob = 0.0;
  // Intercept-resend eavesdropper measuring in a basis drawn from this set.
  std::optional<BasisSet> eavesdropper;

  void validate() const;
};

// One entry of the eavesdropper's private notebook.
struct EveRecord {
  std::uint64_t tag = 0;
  std::int64_t t_ms = 0;
  Basis basis = Basis::Rectilinear;
  Bit bit = 0;
};

struct Interception {
  Photon resent;
  Bit eve_bit = 0;
  Basis eve_basis = Basis::Rectilinear;
};

Interception eve_intercept(const Photon& photon, const BasisSet& basis_set, Rng& rng);

// Eve (if configured) acts first, then the basis-preserving noise flip. When
// eve_log is given, Eve's reading is appended to it.
Photon transmit_quantum(const Photon& photon, const QuantumChannelConfig& cfg, Rng& rng,
                        std::vector<EveRecord>* eve_log = nullptr, std::int64_t t_ms = 0);

struct ClassicalMessage {
  Party from = Party::Sender;
  std::string type;
  Json body = Json::object();
  std::int64_t t_ms = 0;

  friend bool operator==(const ClassicalMessage&, const ClassicalMessage&) = default;
};

struct Clock {
  std::int64_t now_ms = 0;
};

Clock tick(Clock clock);

struct PhotonSentEvent {
  std::uint64_t tag = 0;
  Polarization polarization = Polarization::Deg0;
  bool real = true;
  friend bool operator==(const PhotonSentEvent&, const PhotonSentEvent&) = default;
};

struct PhotonMeasuredEvent {
  std::uint64_t tag = 0;
  Basis basis = Basis::Rectilinear;
  Bit bit = 0;
  friend bool operator==(const PhotonMeasuredEvent&, const PhotonMeasuredEvent&) = default;
};

struct ClassicalEvent {
  Party from = Party::Sender;
  std::string type;
  Json body = Json::object();
  friend bool operator==(const ClassicalEvent&, const ClassicalEvent&) = default;
};

struct DiscardEvent {
  std::size_t position = 0;
  friend bool operator==(const DiscardEvent&, const DiscardEvent&) = default;
};

struct DecisionEvent {
  std::string name;
  Json value;
  friend bool operator==(const DecisionEvent&, const DecisionEvent&) = default;
};

using EventDetail =
    std::variant<PhotonSentEvent, PhotonMeasuredEvent, ClassicalEvent, DiscardEvent, DecisionEvent>;

struct TraceEvent {
  std::int64_t t_ms = 0;
  EventDetail detail;

  std::string_view kind() const;
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

class SessionTrace {
 public:
  // Throws ContractViolation if t_ms would go backwards.
  void append(TraceEvent event);

  const std::vector<TraceEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  std::size_t count_classical(std::string_view type) const;
  std::size_t count_kind(std::string_view kind) const;

  friend bool operator==(const SessionTrace&, const SessionTrace&) = default;

 private:
  std::vector<TraceEvent> events_;
};

// {"events":[{"t_ms":..,"kind":..,...}]}
Json trace_to_json(const SessionTrace& trace);
SessionTrace trace_from_json(const Json& doc);

// Delivers msg verbatim: appends it to the trace and to Eve's public view.
ClassicalMessage send_classical(const ClassicalMessage& msg, SessionTrace& trace,
                                std::vector<ClassicalMessage>& public_view);

// The two-channel link between Sender and Receiver: owns the clock, the
// trace, Eve's public view of classical traffic and her private notebook.
class Link {
 public:
  Link(QuantumChannelConfig cfg, std::uint64_t seed);

  std::int64_t now() const { return clock_.now_ms; }
  void tick() { clock_ = qkdsim::tick(clock_); }

  std::uint64_t next_tag() { return ++last_tag_; }

  // Records photon_sent at the current time and returns what reaches the
  // receiver.
  Photon transmit(const Photon& photon, bool real = true);
  void record_measurement(std::uint64_t tag, Basis basis, Bit bit);
  void record_discard(std::size_t position);
  void record_decision(std::string name, Json value);

  ClassicalMessage send(Party from, std::string type, Json body);

  const QuantumChannelConfig& config() const { return cfg_; }
  const SessionTrace& trace() const { return trace_; }
  const std::vector<ClassicalMessage>& public_view() const { return public_view_; }
  const std::vector<EveRecord>& eve_log() const { return eve_log_; }

 private:
  QuantumChannelConfig cfg_;
  Rng rng_;
  Clock clock_;
  SessionTrace trace_;
  std::vector<ClassicalMessage> public_view_;
  std::vector<EveRecord> eve_log_;
  std::uint64_t last_tag_ = 0;
};

}  // namespace qkdsim
