#include "qkdsim/channels.hpp"

#include <algorithm>

#include "qkdsim/error.hpp"

namespace qkdsim {

std::string_view to_string(Party p) { return p == Party::Sender ? "Sender" : "Receiver"; }

Party parse_party(std::string_view text) {
  if (text == "Sender") return Party::Sender;
  if (text == "Receiver") return Party::Receiver;
  throw InvalidArgument("unknown party: " + std::string(text));
}

void QuantumChannelConfig::validate() const {
  if (!(noise_flip_prob >= 0.0 && noise_flip_prob <= 1.0)) {
    throw InvalidArgument("noise_flip_prob must lie in [0,1]");
  }
  if (eavesdropper && eavesdropper->empty()) {
    throw InvalidArgument("intercept-resend basis set must be nonempty");
  }
}

Interception eve_intercept(const Photon& photon, const BasisSet& basis_set, Rng& rng) {
  if (basis_set.empty()) {
    throw InvalidArgument("eve_intercept: empty basis set");
  }
  const Basis eve_basis = basis_set.draw(rng);
  const Measurement m = measure(photon, eve_basis, rng);
  return {Photon{m.collapsed, photon.tag}, m.bit, eve_basis};
}

Photon transmit_quantum(const Photon& photon, const QuantumChannelConfig& cfg, Rng& rng,
                        std::vector<EveRecord>* eve_log, std::int64_t t_ms) {
  Photon out = photon;
  if (cfg.eavesdropper) {
    const Interception hit = eve_intercept(out, *cfg.eavesdropper, rng);
    if (eve_log != nullptr) {
      eve_log->push_back({photon.tag, t_ms, hit.eve_basis, hit.eve_bit});
    }
    out = hit.resent;
  }
  if (rng.chance(cfg.noise_flip_prob)) {
    const Polarization p = out.polarization;
    out.polarization = encode(static_cast<Bit>(1 - encoded_bit(p)), basis_of(p));
  }
  return out;
}

Clock tick(Clock clock) { return Clock{clock.now_ms + 1}; }

std::string_view TraceEvent::kind() const {
  struct Visitor {
    std::string_view operator()(const PhotonSentEvent&) const { return "photon_sent"; }
    std::string_view operator()(const PhotonMeasuredEvent&) const { return "photon_measured"; }
    std::string_view operator()(const ClassicalEvent&) const { return "classical"; }
    std::string_view operator()(const DiscardEvent&) const { return "discard"; }
    std::string_view operator()(const DecisionEvent&) const { return "decision"; }
  };
  return std::visit(Visitor{}, detail);
}

void SessionTrace::append(TraceEvent event) {
  if (!events_.empty() && event.t_ms < events_.back().t_ms) {
    throw ContractViolation("trace timestamps must be non-decreasing");
  }
  events_.push_back(std::move(event));
}

std::size_t SessionTrace::count_classical(std::string_view type) const {
  return static_cast<std::size_t>(std::count_if(events_.begin(), events_.end(), [&](const TraceEvent& e) {
    const auto* c = std::get_if<ClassicalEvent>(&e.detail);
    return c != nullptr && c->type == type;
  }));
}

std::size_t SessionTrace::count_kind(std::string_view kind) const {
  return static_cast<std::size_t>(std::count_if(
      events_.begin(), events_.end(), [&](const TraceEvent& e) { return e.kind() == kind; }));
}

namespace {

Json event_to_json(const TraceEvent& e) {
  Json j;
  j["t_ms"] = e.t_ms;
  j["kind"] = e.kind();
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PhotonSentEvent>) {
          j["tag"] = d.tag;
          j["polarization"] = to_string(d.polarization);
          j["real"] = d.real;
        } else if constexpr (std::is_same_v<T, PhotonMeasuredEvent>) {
          j["tag"] = d.tag;
          j["basis"] = to_string(d.basis);
          j["bit"] = d.bit;
        } else if constexpr (std::is_same_v<T, ClassicalEvent>) {
          j["from"] = to_string(d.from);
          j["type"] = d.type;
          j["body"] = d.body;
        } else if constexpr (std::is_same_v<T, DiscardEvent>) {
          j["position"] = d.position;
        } else {
          j["name"] = d.name;
          j["value"] = d.value;
        }
      },
      e.detail);
  return j;
}

TraceEvent event_from_json(const Json& j) {
  TraceEvent e;
  e.t_ms = j.at("t_ms").get<std::int64_t>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "photon_sent") {
    e.detail = PhotonSentEvent{j.at("tag").get<std::uint64_t>(),
                               parse_polarization(j.at("polarization").get<std::string>()),
                               j.at("real").get<bool>()};
  } else if (kind == "photon_measured") {
    const auto bit = j.at("bit").get<int>();
    if (bit != 0 && bit != 1) {
      throw InvalidArgument("photon_measured: bit must be 0 or 1");
    }
    e.detail = PhotonMeasuredEvent{j.at("tag").get<std::uint64_t>(),
                                   parse_basis(j.at("basis").get<std::string>()),
                                   static_cast<Bit>(bit)};
  } else if (kind == "classical") {
    e.detail = ClassicalEvent{parse_party(j.at("from").get<std::string>()),
                              j.at("type").get<std::string>(), j.at("body")};
  } else if (kind == "discard") {
    e.detail = DiscardEvent{j.at("position").get<std::size_t>()};
  } else if (kind == "decision") {
    e.detail = DecisionEvent{j.at("name").get<std::string>(), j.at("value")};
  } else {
    throw InvalidArgument("unknown trace event kind: " + kind);
  }
  return e;
}

}  // namespace

Json trace_to_json(const SessionTrace& trace) {
  Json events = Json::array();
  for (const auto& e : trace.events()) {
    events.push_back(event_to_json(e));
  }
  Json doc;
  doc["events"] = std::move(events);
  return doc;
}

SessionTrace trace_from_json(const Json& doc) {
  SessionTrace trace;
  try {
    for (const auto& j : doc.at("events")) {
      trace.append(event_from_json(j));
    }
  } catch (const Json::exception& ex) {
    throw InvalidArgument(std::string("malformed trace: ") + ex.what());
  }
  return trace;
}

ClassicalMessage send_classical(const ClassicalMessage& msg, SessionTrace& trace,
                                std::vector<ClassicalMessage>& public_view) {
  trace.append(TraceEvent{msg.t_ms, ClassicalEvent{msg.from, msg.type, msg.body}});
  public_view.push_back(msg);
  return msg;
}

Link::Link(QuantumChannelConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
  cfg_.validate();
}

Photon Link::transmit(const Photon& photon, bool real) {
  trace_.append(TraceEvent{clock_.now_ms, PhotonSentEvent{photon.tag, photon.polarization, real}});
  return transmit_quantum(photon, cfg_, rng_, &eve_log_, clock_.now_ms);
}

void Link::record_measurement(std::uint64_t tag, Basis basis, Bit bit) {
  trace_.append(TraceEvent{clock_.now_ms, PhotonMeasuredEvent{tag, basis, bit}});
}

void Link::record_discard(std::size_t position) {
  trace_.append(TraceEvent{clock_.now_ms, DiscardEvent{position}});
}

void Link::record_decision(std::string name, Json value) {
  trace_.append(TraceEvent{clock_.now_ms, DecisionEvent{std::move(name), std::move(value)}});
}

ClassicalMessage Link::send(Party from, std::string type, Json body) {
  return send_classical(ClassicalMessage{from, std::move(type), std::move(body), clock_.now_ms},
                        trace_, public_view_);
}

}  // namespace qkdsim
