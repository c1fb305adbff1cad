#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qkdsim/bb84.hpp"
#include "qkdsim/channels.hpp"
#include "qkdsim/error.hpp"

using namespace qkdsim;

TEST_CASE("identity quantum channel") {
  Rng rng(1);
  const QuantumChannelConfig cfg{};
  CHECK(transmit_quantum(Photon{Polarization::Deg45, 3}, cfg, rng).polarization == Polarization::Deg45);
  for (Polarization p : kAllPolarizations) {
    for (int i = 0; i < 50; ++i) {
      CHECK(transmit_quantum(Photon{p, 0}, cfg, rng).polarization == p);
    }
  }
}

TEST_CASE("noise 1 flips within the basis") {
  Rng rng(1);
  const QuantumChannelConfig cfg{1.0, std::nullopt};
  CHECK(transmit_quantum(Photon{Polarization::Deg0, 0}, cfg, rng).polarization == Polarization::Deg90);
  CHECK(transmit_quantum(Photon{Polarization::SpinR, 0}, cfg, rng).polarization == Polarization::SpinL);
  CHECK(transmit_quantum(Photon{Polarization::Deg45, 0}, cfg, rng).polarization == Polarization::Deg135);
}

TEST_CASE("noise 0.1: flip fraction 0.1 +- 0.012 over 10000 photons") {
  Rng rng(31);
  Rng bits(32);
  const QuantumChannelConfig cfg{0.1, std::nullopt};
  const int n = 10000;
  int flips = 0;
  for (int i = 0; i < n; ++i) {
    const Basis b = kAllBases[bits.below(3)];
    const Bit x = bits.bit();
    const Photon out = transmit_quantum(Photon{encode(x, b), 0}, cfg, rng);
    REQUIRE(basis_of(out.polarization) == b);
    Rng unused(0);
    flips += measure(out, b, unused).bit != x;
  }
  CHECK(std::abs(flips / double(n) - 0.1) <= 0.012);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS((QuantumChannelConfig{1.5, std::nullopt}.validate()), InvalidArgument);
  CHECK_THROWS_AS((QuantumChannelConfig{-0.1, std::nullopt}.validate()), InvalidArgument);
  CHECK_THROWS_AS((QuantumChannelConfig{0.0, BasisSet{}}.validate()), InvalidArgument);
  CHECK_NOTHROW((QuantumChannelConfig{0.0, BasisSet{Basis::Diagonal}}.validate()));
}

TEST_CASE("eve_intercept") {
  Rng rng(8);
  SUBCASE("matching basis is invisible") {
    const auto hit = eve_intercept(Photon{Polarization::Deg0, 4}, {Basis::Rectilinear}, rng);
    CHECK(hit.resent.polarization == Polarization::Deg0);
    CHECK(hit.resent.tag == 4);
    CHECK(hit.eve_bit == 0);
    CHECK(hit.eve_basis == Basis::Rectilinear);
  }
  SUBCASE("forced mismatch collapses into Eve's basis with a uniform bit") {
    int ones = 0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
      const auto hit = eve_intercept(Photon{Polarization::Deg0, 0}, {Basis::Diagonal}, rng);
      REQUIRE((hit.resent.polarization == Polarization::Deg45 ||
               hit.resent.polarization == Polarization::Deg135));
      REQUIRE(hit.resent.polarization == encode(hit.eve_bit, Basis::Diagonal));
      ones += hit.eve_bit;
    }
    CHECK(std::abs(ones / double(n) - 0.5) <= oracle::four_sigma(0.5, n));
  }
  SUBCASE("empty basis set rejected") {
    CHECK_THROWS_AS(eve_intercept(Photon{}, BasisSet{}, rng), InvalidArgument);
  }
}

TEST_CASE("intercept-resend on R/D traffic: receiver error 0.25 +- 0.017") {
  Rng traffic(40);
  Rng channel(41);
  Rng receiver(42);
  const QuantumChannelConfig cfg{0.0, BasisSet{Basis::Rectilinear, Basis::Diagonal}};
  std::vector<EveRecord> log;
  const int n = 10000;
  int errors = 0;
  for (int i = 0; i < n; ++i) {
    const Basis b = traffic.bit() ? Basis::Diagonal : Basis::Rectilinear;
    const Bit x = traffic.bit();
    const Photon out = transmit_quantum(Photon{encode(x, b), std::uint64_t(i)}, cfg, channel, &log, i);
    errors += measure(out, b, receiver).bit != x;
  }
  CHECK(log.size() == std::size_t(n));
  CHECK(std::abs(errors / double(n) - oracle::induced_error_uniform(2)) <= 0.017);
}

TEST_CASE("Eve acts before noise") {
  // With noise 1 and a matching-basis Eve, Eve reads the original bit and the
  // receiver sees it flipped afterwards.
  Rng rng(3);
  const QuantumChannelConfig cfg{1.0, BasisSet{Basis::Rectilinear}};
  std::vector<EveRecord> log;
  const Photon out = transmit_quantum(Photon{Polarization::Deg0, 9}, cfg, rng, &log, 5);
  REQUIRE(log.size() == 1);
  CHECK(log[0].bit == 0);
  CHECK(log[0].tag == 9);
  CHECK(log[0].t_ms == 5);
  CHECK(out.polarization == Polarization::Deg90);
}

TEST_CASE("classical channel delivers verbatim and exposes everything to Eve") {
  SessionTrace trace;
  std::vector<ClassicalMessage> view;
  const ClassicalMessage reveal{Party::Sender, "basis_reveal", Json{{"bases", "RDDR"}}, 0};
  const ClassicalMessage got = send_classical(reveal, trace, view);
  CHECK(got == reveal);
  CHECK(trace.size() == 1);
  CHECK(trace.events()[0].kind() == "classical");

  const ClassicalMessage reply{Party::Receiver, "parity", Json{{"pass", 1}, {"block_lo", 1}, {"block_hi", 4}, {"parity", 0}}, 0};
  CHECK(send_classical(reply, trace, view) == reply);
  CHECK(view.size() == 2);
  CHECK(view[0] == reveal);
  CHECK(view[1] == reply);

  Link link(QuantumChannelConfig{}, 1);
  link.send(Party::Sender, "bsts_start", Json{{"t_ms", 0}});
  for (int i = 0; i < 30; ++i) link.tick();
  link.send(Party::Sender, "bsts_end", Json{{"t_ms", 30}});
  REQUIRE(link.trace().size() == 2);
  CHECK(link.trace().events()[0].t_ms == 0);
  CHECK(link.trace().events()[1].t_ms == 30);
  CHECK(link.trace().count_classical("bsts_start") == 1);
}

TEST_CASE("clock ticks by one millisecond") {
  CHECK(tick(Clock{0}).now_ms == 1);
  CHECK(tick(Clock{9}).now_ms == 10);
  Clock c{};
  for (int i = 0; i < 30; ++i) c = tick(c);
  CHECK(c.now_ms == 30);
}

TEST_CASE("trace rejects time going backwards") {
  SessionTrace trace;
  trace.append(TraceEvent{5, DiscardEvent{1}});
  trace.append(TraceEvent{5, DiscardEvent{2}});
  CHECK_THROWS_AS(trace.append(TraceEvent{4, DiscardEvent{3}}), ContractViolation);
}

TEST_CASE("trace JSON schema") {
  SessionTrace empty;
  CHECK(trace_to_json(empty).dump() == R"({"events":[]})");

  SessionTrace one;
  one.append(TraceEvent{3, ClassicalEvent{Party::Receiver, "basis_match", Json{{"matches", "101"}}}});
  CHECK(trace_to_json(one).dump() ==
        R"({"events":[{"t_ms":3,"kind":"classical","from":"Receiver","type":"basis_match","body":{"matches":"101"}}]})");

  SessionTrace all;
  all.append(TraceEvent{1, PhotonSentEvent{1, Polarization::SpinL, false}});
  all.append(TraceEvent{1, PhotonMeasuredEvent{1, Basis::Circular, 0}});
  all.append(TraceEvent{2, DiscardEvent{17}});
  all.append(TraceEvent{2, DecisionEvent{"eve_detection", "Proceed"}});
  const Json j = trace_to_json(all);
  CHECK(j["events"][0].dump() == R"({"t_ms":1,"kind":"photon_sent","tag":1,"polarization":"spinL","real":false})");
  CHECK(j["events"][1].dump() == R"({"t_ms":1,"kind":"photon_measured","tag":1,"basis":"C","bit":0})");
  CHECK(j["events"][2].dump() == R"({"t_ms":2,"kind":"discard","position":17})");
  CHECK(j["events"][3].dump() == R"({"t_ms":2,"kind":"decision","name":"eve_detection","value":"Proceed"})");
  CHECK(trace_from_json(j) == all);

  CHECK_THROWS_AS(trace_from_json(Json::parse(R"({"events":[{"t_ms":0,"kind":"teleport"}]})")), InvalidArgument);
  CHECK_THROWS_AS(trace_from_json(Json::parse(R"({"events":[{"t_ms":0}]})")), InvalidArgument);
}

TEST_CASE("replaying photon events with the same seeds reproduces measurements") {
  auto run = [](std::uint64_t seed) {
    Link link(QuantumChannelConfig{0.05, BasisSet{Basis::Rectilinear, Basis::Diagonal}}, seed);
    Rng s(seed + 1), r(seed + 2), q(seed + 3);
    Bb84Params p;
    p.photons = 512;
    p.sample_size = 20;
    run_bb84(p, link, s, r, q);
    return link.trace();
  };
  const SessionTrace a = run(77);
  const SessionTrace b = run(77);
  CHECK(a == b);
  for (std::size_t i = 1; i < a.size(); ++i) {
    REQUIRE(a.events()[i - 1].t_ms <= a.events()[i].t_ms);
  }
  CHECK(a.count_kind("photon_measured") == 512);
}
