// qkdsim: command-line harness for the BB84 + BSTS simulator.
//
//   qkdsim bb84         BB84 exchange, sifting, QBER sample and detection
//   qkdsim postprocess  parity-bisection reconciliation (+ amplification)
//   qkdsim bsts-derive  session parameters from a primary key
//   qkdsim bsts-run     one BSTS message transfer
//   qkdsim session      the full pipeline
//   qkdsim sweep        many seeded sessions, aggregated
//
// Exit codes: 0 ok, 2 eavesdropper detected, 3 reconciliation failure,
// 4 invalid config or I/O error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qkdsim/bb84.hpp"
#include "qkdsim/bsts.hpp"
#include "qkdsim/channels.hpp"
#include "qkdsim/error.hpp"
#include "qkdsim/postprocess.hpp"
#include "qkdsim/session.hpp"

using namespace qkdsim;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BSTS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string("BSTS_SEED is not an unsigned integer: ") + env);
    }
  }
  return 1;
}

struct ChannelFlags {
  double noise_flip_prob = 0.0;
  std::string eve_mode = "none";
  std::string eve_basis_set = "RD";

  void add(CLI::App* cmd) {
    cmd->add_option("--noise-flip-prob", noise_flip_prob, "Basis-preserving flip probability");
    cmd->add_option("--eve-mode", eve_mode, "none | intercept_resend")->capture_default_str();
    cmd->add_option("--eve-basis-set", eve_basis_set, "Eve's bases, e.g. RD or RDC")
        ->capture_default_str();
  }

  QuantumChannelConfig config() const {
    QuantumChannelConfig q;
    q.noise_flip_prob = noise_flip_prob;
    if (parse_eve_mode(eve_mode) == EveMode::InterceptResend) {
      q.eavesdropper = BasisSet::parse(eve_basis_set);
    }
    q.validate();
    return q;
  }
};

void print(const Json& j, bool as_json, const std::string& text) {
  if (as_json) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << text;
  }
}

void maybe_write_trace(const std::optional<std::string>& path, const SessionTrace& trace) {
  if (path) {
    emit_trace(trace, *path);
  }
}

BitString random_bits(std::size_t n, Rng& rng) {
  BitString out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(rng.bit());
  return out;
}

struct SessionFlags {
  ChannelFlags channel;
  std::size_t photons = 4096;
  std::size_t sample_size = 200;
  double qber_threshold = kDefaultQberThreshold;
  std::string timing_rule = "table2";
  std::string message;
  std::size_t message_bits = 64;
  std::size_t initial_block_size = 16;
  std::size_t passes_without_error_to_stop = 2;
  std::size_t max_passes = 32;
  std::string amplify = "off";

  void add(CLI::App* cmd) {
    channel.add(cmd);
    cmd->add_option("--photons", photons)->capture_default_str();
    cmd->add_option("--sample-size", sample_size)->capture_default_str();
    cmd->add_option("--qber-threshold", qber_threshold)->capture_default_str();
    cmd->add_option("--timing-rule", timing_rule, "table2 | example9")->capture_default_str();
    cmd->add_option("--message", message, "Message bits, e.g. 0110");
    cmd->add_option("--message-bits", message_bits, "Random message length when --message is absent")
        ->capture_default_str();
    cmd->add_option("--initial-block-size", initial_block_size)->capture_default_str();
    cmd->add_option("--passes-without-error-to-stop", passes_without_error_to_stop)
        ->capture_default_str();
    cmd->add_option("--max-passes", max_passes)->capture_default_str();
    cmd->add_option("--amplify", amplify, "on | off")->capture_default_str();
  }

  SessionConfig config(std::uint64_t seed) const {
    SessionConfig cfg;
    cfg.photons = photons;
    cfg.noise_flip_prob = channel.noise_flip_prob;
    cfg.eve_mode = parse_eve_mode(channel.eve_mode);
    cfg.eve_basis_set = BasisSet::parse(channel.eve_basis_set);
    cfg.seed = seed;
    cfg.sample_size = sample_size;
    cfg.qber_threshold = qber_threshold;
    cfg.timing_rule = parse_timing_rule(timing_rule);
    cfg.message = BitString::parse(message);
    cfg.message_bits = message_bits;
    cfg.recon = {initial_block_size, passes_without_error_to_stop, max_passes};
    if (amplify != "on" && amplify != "off") {
      throw InvalidArgument("--amplify must be on or off");
    }
    cfg.amplify = amplify == "on";
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BB84 key distribution and BSTS transfer simulator"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  bool seed_given = false;
  bool as_json = false;
  std::optional<std::string> trace_path;

  auto add_common = [&](CLI::App* cmd, bool with_trace) {
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { seed = s; seed_given = true; },
        "Root seed (default: $BSTS_SEED or 1)");
    cmd->add_flag("--json", as_json, "Print a JSON object instead of text");
    if (with_trace) {
      cmd->add_option("--trace-path", trace_path, "Write the session trace as JSON");
    }
  };

  // bb84
  auto* bb84_cmd = app.add_subcommand("bb84", "BB84 exchange with sifting and detection");
  ChannelFlags bb84_channel;
  Bb84Params bb84_params;
  std::string basis_pool = "RD";
  add_common(bb84_cmd, true);
  bb84_channel.add(bb84_cmd);
  bb84_cmd->add_option("--photons", bb84_params.photons)->capture_default_str();
  bb84_cmd->add_option("--sample-size", bb84_params.sample_size)->capture_default_str();
  bb84_cmd->add_option("--qber-threshold", bb84_params.qber_threshold)->capture_default_str();
  bb84_cmd->add_option("--basis-pool", basis_pool, "Bases used by both endpoints")
      ->capture_default_str();

  // postprocess
  auto* pp_cmd = app.add_subcommand("postprocess", "Reconcile two keys, optionally amplify");
  std::string key_a_text;
  std::string key_b_text;
  std::size_t pp_bits = 1024;
  double pp_error_rate = 0.05;
  ReconciliationParams pp_params;
  std::string pp_amplify = "off";
  std::optional<std::size_t> pp_discard;
  add_common(pp_cmd, true);
  pp_cmd->add_option("--key-a", key_a_text, "Sender key bits");
  pp_cmd->add_option("--key-b", key_b_text, "Receiver key bits");
  pp_cmd->add_option("--bits", pp_bits, "Random key length when keys are not given")
      ->capture_default_str();
  pp_cmd->add_option("--error-rate", pp_error_rate, "Independent flip rate for random keys")
      ->capture_default_str();
  pp_cmd->add_option("--initial-block-size", pp_params.initial_block_size)->capture_default_str();
  pp_cmd->add_option("--passes-without-error-to-stop", pp_params.passes_without_error_to_stop)
      ->capture_default_str();
  pp_cmd->add_option("--max-passes", pp_params.max_passes)->capture_default_str();
  pp_cmd->add_option("--amplify", pp_amplify, "on | off")->capture_default_str();
  pp_cmd->add_option("--discard-count", pp_discard, "Bits dropped by amplification");

  // bsts-derive
  auto* derive_cmd = app.add_subcommand("bsts-derive", "Derive BSTS parameters from a primary key");
  std::string derive_key;
  std::string derive_rule = "table2";
  derive_cmd->add_option("--key", derive_key, "Primary key bits")->required();
  derive_cmd->add_option("--timing-rule", derive_rule, "table2 | example9")->capture_default_str();
  derive_cmd->add_flag("--json", as_json);

  // bsts-run
  auto* run_cmd = app.add_subcommand("bsts-run", "Transfer one message with BSTS");
  ChannelFlags run_channel;
  std::string run_key;
  std::string run_rule = "table2";
  std::string run_message;
  std::size_t run_message_bits = 64;
  add_common(run_cmd, true);
  run_channel.add(run_cmd);
  run_cmd->add_option("--key", run_key, "Primary key bits")->required();
  run_cmd->add_option("--timing-rule", run_rule)->capture_default_str();
  run_cmd->add_option("--message", run_message, "Message bits");
  run_cmd->add_option("--message-bits", run_message_bits)->capture_default_str();

  // session
  auto* session_cmd = app.add_subcommand("session", "Run the full pipeline");
  SessionFlags session_flags;
  add_common(session_cmd, true);
  session_flags.add(session_cmd);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Run many seeded sessions and aggregate");
  SessionFlags sweep_flags;
  std::size_t runs = 100;
  std::size_t workers = 1;
  add_common(sweep_cmd, false);
  sweep_flags.add(sweep_cmd);
  sweep_cmd->add_option("--runs", runs, "Seeds seed, seed+1, ...")->capture_default_str();
  sweep_cmd->add_option("--workers", workers, "Parallel worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (!seed_given) {
      seed = default_seed();
    }

    if (*bb84_cmd) {
      bb84_params.basis_pool = BasisSet::parse(basis_pool);
      if (bb84_params.photons == 0) {
        throw InvalidArgument("--photons must be at least 1");
      }
      Link link(bb84_channel.config(), stage_seed(seed, SeedStream::Link));
      Rng s(stage_seed(seed, SeedStream::Bb84Sender));
      Rng r(stage_seed(seed, SeedStream::Bb84Receiver));
      Rng q(stage_seed(seed, SeedStream::QberSample));
      const Bb84Outcome o = run_bb84(bb84_params, link, s, r, q);
      maybe_write_trace(trace_path, link.trace());
      Json j{{"photons", bb84_params.photons},
             {"sifted_len", o.sifted.size()},
             {"qber", o.estimate.qber},
             {"remaining_len", o.estimate.remaining.size()},
             {"eve_decision", to_string(o.decision)}};
      std::ostringstream text;
      text << "photons       " << bb84_params.photons << "\nsifted_len    " << o.sifted.size()
           << "\nqber          " << o.estimate.qber << "\nremaining_len "
           << o.estimate.remaining.size() << "\neve_decision  " << to_string(o.decision) << '\n';
      print(j, as_json, text.str());
      return o.decision == Decision::Abort ? kExitEveDetected : kExitOk;
    }

    if (*pp_cmd) {
      BitString a;
      BitString b;
      if (!key_a_text.empty() || !key_b_text.empty()) {
        a = BitString::parse(key_a_text);
        b = BitString::parse(key_b_text);
      } else {
        Rng rng(seed);
        a = random_bits(pp_bits, rng);
        std::vector<Bit> flipped(a.begin(), a.end());
        for (Bit& bit : flipped) {
          if (rng.chance(pp_error_rate)) bit ^= 1;
        }
        b = BitString(std::move(flipped));
      }
      Link link(QuantumChannelConfig{}, stage_seed(seed, SeedStream::Link));
      Rng shared(stage_seed(seed, SeedStream::Reconcile));
      const ReconciliationResult rec = reconcile(a, b, pp_params, link, shared);
      const bool match = confirm_parity(rec.key_a, rec.key_b, link);
      Json j{{"input_len", a.size()},
             {"initial_errors", hamming_distance(a, b)},
             {"reconciled_len", rec.key_a.size()},
             {"leaked_parity_count", rec.leaked_parity_count},
             {"passes", rec.passes_run},
             {"discarded_positions", rec.discarded_positions},
             {"keys_equal", rec.key_a == rec.key_b},
             {"final_parity_match", match}};
      std::ostringstream text;
      text << "input_len           " << a.size() << "\ninitial_errors      "
           << hamming_distance(a, b) << "\nreconciled_len      " << rec.key_a.size()
           << "\nleaked_parity_count " << rec.leaked_parity_count << "\npasses              "
           << rec.passes_run << "\nkeys_equal          " << (rec.key_a == rec.key_b ? "true" : "false")
           << "\nfinal_parity_match  " << (match ? "true" : "false") << '\n';
      if (pp_amplify == "on") {
        const std::size_t discard =
            pp_discard.value_or(std::min(rec.key_a.size(), rec.leaked_parity_count + kAmplifySafetyBits));
        Rng sa(stage_seed(seed, SeedStream::Amplify));
        Rng sb(stage_seed(seed, SeedStream::Amplify));
        const BitString out_a = privacy_amplify(rec.key_a, discard, sa);
        const BitString out_b = privacy_amplify(rec.key_b, discard, sb);
        j["amplified_len"] = out_a.size();
        j["amplified_equal"] = out_a == out_b;
        j["amplified_key"] = out_a.to_string();
        text << "amplified_len       " << out_a.size() << "\namplified_key       "
             << out_a.to_string() << '\n';
      } else if (pp_amplify != "off") {
        throw InvalidArgument("--amplify must be on or off");
      }
      maybe_write_trace(trace_path, link.trace());
      print(j, as_json, text.str());
      return match && rec.key_a == rec.key_b ? kExitOk : kExitReconciliationFailed;
    }

    if (*derive_cmd) {
      const SessionParams p =
          derive_session(PrimaryKey(BitString::parse(derive_key)), parse_timing_rule(derive_rule));
      std::string schedule;
      for (Basis b : p.schedule) schedule.push_back(basis_letter(b));
      Json j{{"base1", to_string(p.base1)},
             {"base2", to_string(p.base2)},
             {"interval_ms", p.interval_ms},
             {"schedule", schedule}};
      std::ostringstream text;
      text << "base1       " << to_string(p.base1) << "\nbase2       " << to_string(p.base2)
           << "\ninterval_ms " << p.interval_ms << "\nschedule    " << schedule << '\n';
      print(j, as_json, text.str());
      return kExitOk;
    }

    if (*run_cmd) {
      const SessionParams p =
          derive_session(PrimaryKey(BitString::parse(run_key)), parse_timing_rule(run_rule));
      Rng msg_rng(stage_seed(seed, SeedStream::Message));
      const BitString message =
          run_message.empty() ? random_bits(run_message_bits, msg_rng) : BitString::parse(run_message);
      if (message.empty()) {
        throw InvalidArgument("message must not be empty");
      }
      Link link(run_channel.config(), stage_seed(seed, SeedStream::Link));
      Rng s(stage_seed(seed, SeedStream::BstsSender));
      Rng r(stage_seed(seed, SeedStream::BstsReceiver));
      const BstsTransfer t = run_bsts(message, p, link, s, r);
      const BstsEveStats stats = bsts_eve_stats(message, t, link);
      maybe_write_trace(trace_path, link.trace());
      Json j{{"message", message.to_string()},
             {"decoded", t.decoded.to_string()},
             {"interval_ms", p.interval_ms},
             {"photons_sent", t.photons_sent},
             {"fake_photons", t.fake_count},
             {"receiver_error", stats.receiver_error},
             {"eve_accuracy", stats.eve_accuracy ? Json(*stats.eve_accuracy) : Json(nullptr)}};
      std::ostringstream text;
      text << "message        " << message.to_string() << "\ndecoded        "
           << t.decoded.to_string() << "\ninterval_ms    " << p.interval_ms
           << "\nphotons_sent   " << t.photons_sent << "\nfake_photons   " << t.fake_count
           << "\nreceiver_error " << stats.receiver_error << '\n';
      if (stats.eve_accuracy) {
        text << "eve_accuracy   " << *stats.eve_accuracy << '\n';
      }
      print(j, as_json, text.str());
      return kExitOk;
    }

    if (*session_cmd) {
      SessionConfig cfg = session_flags.config(seed);
      cfg.trace_path = trace_path;
      const SessionOutcome o = run_full_session(cfg);
      if (o.exit_code == kExitInvalid && o.trace.empty()) {
        std::cerr << "error: " << o.error << '\n';
        return kExitInvalid;
      }
      maybe_write_trace(cfg.trace_path, o.trace);
      Json j = report_to_json(o.report);
      print(j, as_json, format_report(o.report));
      if (!o.error.empty()) {
        std::cerr << "error: " << o.error << '\n';
      }
      return o.exit_code;
    }

    if (*sweep_cmd) {
      if (runs == 0) {
        throw InvalidArgument("--runs must be at least 1");
      }
      workers = std::clamp<std::size_t>(workers, 1, runs);
      const SessionConfig base = sweep_flags.config(seed);
      base.validate();
      std::vector<SessionOutcome> outcomes(runs);
      // Static striping; results land at their seed's index so the merge is
      // independent of scheduling.
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < runs; i += workers) {
            SessionConfig cfg = base;
            cfg.seed = seed + i;
            outcomes[i] = run_full_session(cfg);
            outcomes[i].trace = {};
          }
        });
      }
      for (auto& t : pool) t.join();

      std::vector<SessionReport> reports;
      std::size_t aborted = 0;
      std::size_t failed = 0;
      std::size_t invalid = 0;
      for (const auto& o : outcomes) {
        reports.push_back(o.report);
        aborted += o.exit_code == kExitEveDetected;
        failed += o.exit_code == kExitReconciliationFailed;
        invalid += o.exit_code == kExitInvalid;
      }
      const auto summary = summarize(reports);
      Json j{{"runs", runs},
             {"first_seed", seed},
             {"exit_counts", {{"eve_detected", aborted}, {"reconciliation_failed", failed}, {"invalid", invalid}}},
             {"summary", summary_to_json(summary)}};
      std::ostringstream text;
      text << "runs " << runs << " (seeds " << seed << ".." << seed + runs - 1 << ")\n"
           << "eve_detected " << aborted << "  reconciliation_failed " << failed << "  invalid "
           << invalid << '\n';
      for (const auto& [name, s] : summary) {
        text << name << std::string(name.size() < 20 ? 20 - name.size() : 1, ' ') << s.mean
             << " +- " << s.std_error << "  (n=" << s.count << ")\n";
      }
      print(j, as_json, text.str());
      return kExitOk;
    }
  } catch (const ProtocolViolation& ex) {
    std::cerr << "protocol violation: " << ex.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitInvalid;
  } catch (const std::runtime_error& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}
