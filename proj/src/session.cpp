#include "qkdsim/session.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qkdsim/error.hpp"

namespace qkdsim {

std::string_view to_string(EveMode mode) {
  return mode == EveMode::None ? "none" : "intercept_resend";
}

EveMode parse_eve_mode(std::string_view text) {
  if (text == "none") return EveMode::None;
  if (text == "intercept_resend" || text == "intercept-resend") return EveMode::InterceptResend;
  throw InvalidArgument("unknown eve mode: " + std::string(text));
}

void SessionConfig::validate() const {
  auto ratio = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument(std::string(name) + " must lie in [0,1]");
    }
  };
  ratio(noise_flip_prob, "noise_flip_prob");
  ratio(qber_threshold, "qber_threshold");
  if (photons < sample_size + kMinPrimaryKeyBits) {
    throw InvalidArgument("photons must be at least sample_size + 7");
  }
  if (eve_mode == EveMode::InterceptResend && eve_basis_set.empty()) {
    throw InvalidArgument("eve_basis_set must be nonempty");
  }
  if (message.empty() && message_bits == 0) {
    throw InvalidArgument("message must not be empty");
  }
  recon.validate();
}

QuantumChannelConfig SessionConfig::channel() const {
  QuantumChannelConfig q;
  q.noise_flip_prob = noise_flip_prob;
  if (eve_mode == EveMode::InterceptResend) {
    q.eavesdropper = eve_basis_set;
  }
  return q;
}

std::uint64_t stage_seed(std::uint64_t root, SeedStream stream) {
  return mix_seed(root, static_cast<std::uint64_t>(stream));
}

namespace {

BitString random_bits(std::size_t n, Rng& rng) {
  BitString out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(rng.bit());
  }
  return out;
}

}  // namespace

SessionOutcome run_full_session(const SessionConfig& cfg) {
  SessionOutcome out;
  try {
    cfg.validate();
  } catch (const InvalidArgument& ex) {
    out.exit_code = kExitInvalid;
    out.error = ex.what();
    return out;
  }

  const std::uint64_t root = cfg.seed;
  Link link(cfg.channel(), stage_seed(root, SeedStream::Link));
  Rng sender_rng(stage_seed(root, SeedStream::Bb84Sender));
  Rng receiver_rng(stage_seed(root, SeedStream::Bb84Receiver));
  Rng sample_rng(stage_seed(root, SeedStream::QberSample));
  Rng message_rng(stage_seed(root, SeedStream::Message));
  const BitString message = cfg.message.empty() ? random_bits(cfg.message_bits, message_rng)
                                                 : cfg.message;

  SessionReport& r = out.report;
  auto finish = [&](int code, std::string error = {}) {
    out.exit_code = code;
    out.error = std::move(error);
    out.trace = link.trace();
    return out;
  };

  try {
    Bb84Params bb84;
    bb84.photons = cfg.photons;
    bb84.sample_size = cfg.sample_size;
    bb84.qber_threshold = cfg.qber_threshold;
    const Bb84Outcome key = run_bb84(bb84, link, sender_rng, receiver_rng, sample_rng);
    r.sifted_len = key.sifted.size();
    r.qber = key.estimate.qber;
    r.eve_decision = key.decision;
    if (key.decision == Decision::Abort) {
      return finish(kExitEveDetected);
    }

    const SiftResult& raw = key.estimate.remaining;
    if (raw.size() < kMinPrimaryKeyBits) {
      return finish(kExitInvalid, "too few sifted bits survive sampling for a primary key");
    }
    Rng recon_rng(stage_seed(root, SeedStream::Reconcile));
    const ReconciliationResult rec =
        reconcile(raw.sender_key, raw.receiver_key, cfg.recon, link, recon_rng);
    r.reconciled_len = rec.key_a.size();
    r.leaked_parity_count = rec.leaked_parity_count;
    if (!confirm_parity(rec.key_a, rec.key_b, link)) {
      link.record_decision("reconciliation", "failed");
      return finish(kExitReconciliationFailed, "final parity check failed after reconciliation");
    }
    link.record_decision("reconciliation", "ok");

    BitString key_a = rec.key_a;
    BitString key_b = rec.key_b;
    if (cfg.amplify) {
      const std::size_t discard =
          std::min(key_a.size(), rec.leaked_parity_count + kAmplifySafetyBits);
      Rng shared_a(stage_seed(root, SeedStream::Amplify));
      Rng shared_b(stage_seed(root, SeedStream::Amplify));
      key_a = privacy_amplify(key_a, discard, shared_a);
      key_b = privacy_amplify(key_b, discard, shared_b);
    }
    r.amplified_len = key_a.size();

    // Each endpoint derives its own parameters from its own copy of the key.
    // The comparison is a harness-side check: a residual even number of
    // errors passes the parity check but leaves the endpoints desynchronized.
    const SessionParams params = derive_session(PrimaryKey(key_a), cfg.timing_rule);
    const SessionParams receiver_params = derive_session(PrimaryKey(key_b), cfg.timing_rule);
    if (!(params == receiver_params)) {
      link.record_decision("bsts_params", "mismatch");
      return finish(kExitReconciliationFailed, "endpoints derived different BSTS parameters");
    }
    r.bsts_interval_ms = params.interval_ms;
    r.bsts_bases = BasePair{params.base1, params.base2};
    link.record_decision("bsts_params", Json{{"interval_ms", params.interval_ms},
                                             {"base1", to_string(params.base1)},
                                             {"base2", to_string(params.base2)}});

    Rng bsts_sender_rng(stage_seed(root, SeedStream::BstsSender));
    Rng bsts_receiver_rng(stage_seed(root, SeedStream::BstsReceiver));
    const BstsTransfer transfer =
        run_bsts(message, params, link, bsts_sender_rng, bsts_receiver_rng);
    const BstsEveStats stats = bsts_eve_stats(message, transfer, link);
    r.message_delivered = transfer.decoded == message;
    r.receiver_error = stats.receiver_error;
    r.eve_accuracy = stats.eve_accuracy;
    return finish(kExitOk);
  } catch (const InvalidArgument& ex) {
    return finish(kExitInvalid, ex.what());
  }
}

Json report_to_json(const SessionReport& r) {
  Json j;
  j["sifted_len"] = r.sifted_len;
  j["qber"] = r.qber;
  j["eve_decision"] = to_string(r.eve_decision);
  j["reconciled_len"] = r.reconciled_len;
  j["leaked_parity_count"] = r.leaked_parity_count;
  j["amplified_len"] = r.amplified_len;
  j["bsts_interval_ms"] = r.bsts_interval_ms ? Json(*r.bsts_interval_ms) : Json(nullptr);
  if (r.bsts_bases) {
    j["bsts_bases"] = Json::array({to_string(r.bsts_bases->base1), to_string(r.bsts_bases->base2)});
  } else {
    j["bsts_bases"] = nullptr;
  }
  j["message_delivered"] = r.message_delivered;
  j["receiver_error"] = r.receiver_error ? Json(*r.receiver_error) : Json(nullptr);
  j["eve_accuracy"] = r.eve_accuracy ? Json(*r.eve_accuracy) : Json(nullptr);
  return j;
}

std::string format_report(const SessionReport& r) {
  std::ostringstream os;
  os << "sifted_len          " << r.sifted_len << '\n'
     << "qber                " << r.qber << '\n'
     << "eve_decision        " << to_string(r.eve_decision) << '\n'
     << "reconciled_len      " << r.reconciled_len << '\n'
     << "leaked_parity_count " << r.leaked_parity_count << '\n'
     << "amplified_len       " << r.amplified_len << '\n';
  os << "bsts_interval_ms    ";
  if (r.bsts_interval_ms) {
    os << *r.bsts_interval_ms << " ms";
  } else {
    os << '-';
  }
  os << "\nbsts_bases          ";
  if (r.bsts_bases) {
    os << to_string(r.bsts_bases->base1) << ',' << to_string(r.bsts_bases->base2);
  } else {
    os << '-';
  }
  os << "\nmessage_delivered   " << (r.message_delivered ? "true" : "false") << '\n';
  os << "receiver_error      ";
  if (r.receiver_error) {
    os << *r.receiver_error;
  } else {
    os << '-';
  }
  os << "\neve_accuracy        ";
  if (r.eve_accuracy) {
    os << *r.eve_accuracy;
  } else {
    os << '-';
  }
  os << '\n';
  return os.str();
}

void emit_trace(const SessionTrace& trace, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw std::runtime_error("cannot open trace file for writing: " + path);
  }
  f << trace_to_json(trace).dump() << '\n';
  if (!f) {
    throw std::runtime_error("failed writing trace file: " + path);
  }
}

SessionTrace read_trace(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot open trace file: " + path);
  }
  Json doc;
  try {
    doc = Json::parse(f);
  } catch (const Json::exception& ex) {
    throw InvalidArgument(std::string("trace is not valid JSON: ") + ex.what());
  }
  return trace_from_json(doc);
}

std::map<std::string, FieldStats> summarize(std::span<const SessionReport> reports) {
  if (reports.empty()) {
    throw InvalidArgument("summarize: no reports");
  }
  std::map<std::string, std::vector<double>> samples;
  for (const SessionReport& r : reports) {
    samples["sifted_len"].push_back(static_cast<double>(r.sifted_len));
    samples["qber"].push_back(r.qber);
    samples["abort_rate"].push_back(r.eve_decision == Decision::Abort ? 1.0 : 0.0);
    samples["reconciled_len"].push_back(static_cast<double>(r.reconciled_len));
    samples["leaked_parity_count"].push_back(static_cast<double>(r.leaked_parity_count));
    samples["amplified_len"].push_back(static_cast<double>(r.amplified_len));
    samples["message_delivered"].push_back(r.message_delivered ? 1.0 : 0.0);
    if (r.bsts_interval_ms) {
      samples["bsts_interval_ms"].push_back(static_cast<double>(*r.bsts_interval_ms));
    }
    if (r.receiver_error) {
      samples["receiver_error"].push_back(*r.receiver_error);
    }
    if (r.eve_accuracy) {
      samples["eve_accuracy"].push_back(*r.eve_accuracy);
    }
  }

  std::map<std::string, FieldStats> out;
  for (const auto& [name, xs] : samples) {
    FieldStats s;
    s.count = xs.size();
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count > 1) {
      double ss = 0.0;
      for (double x : xs) ss += (x - s.mean) * (x - s.mean);
      const double var = ss / static_cast<double>(s.count - 1);
      s.std_error = std::sqrt(var / static_cast<double>(s.count));
    }
    out[name] = s;
  }
  return out;
}

Json summary_to_json(const std::map<std::string, FieldStats>& summary) {
  Json j = Json::object();
  for (const auto& [name, s] : summary) {
    j[name] = Json{{"mean", s.mean}, {"stderr", s.std_error}, {"count", s.count}};
  }
  return j;
}

}  // namespace qkdsim
