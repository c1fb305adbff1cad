#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkdsim/bb84.hpp"
#include "qkdsim/bits.hpp"
#include "qkdsim/bsts.hpp"
#include "qkdsim/channels.hpp"
#include "qkdsim/postprocess.hpp"

namespace qkdsim {

enum ExitCode : int {
  kExitOk = 0,
  kExitEveDetected = 2,
  kExitReconciliationFailed = 3,
  kExitInvalid = 4,
};

enum class EveMode { None, InterceptResend };

std::string_view to_string(EveMode mode);
EveMode parse_eve_mode(std::string_view text);

struct SessionConfig {
  std::size_t photons = 4096;
  double noise_flip_prob = 0.0;
  EveMode eve_mode = EveMode::None;
  BasisSet eve_basis_set = {Basis::Rectilinear, Basis::Diagonal};
  std::uint64_t seed = 1;
  std::size_t sample_size = 200;
  double qber_threshold = kDefaultQberThreshold;
  TimingRule timing_rule = TimingRule::Table2;
  // Empty means message_bits random bits drawn from the session seed.
  BitString message;
  std::size_t message_bits = 64;
  ReconciliationParams recon;
  bool amplify = false;
  std::optional<std::string> trace_path;

  // Throws InvalidArgument.
  void validate() const;
  QuantumChannelConfig channel() const;
};

struct SessionReport {
  std::size_t sifted_len = 0;
  double qber = 0.0;
  Decision eve_decision = Decision::Proceed;
  std::size_t reconciled_len = 0;
  std::size_t leaked_parity_count = 0;
  std::size_t amplified_len = 0;
  std::optional<int> bsts_interval_ms;
  std::optional<BasePair> bsts_bases;
  bool message_delivered = false;
  std::optional<double> receiver_error;
  std::optional<double> eve_accuracy;
};

struct SessionOutcome {
  SessionReport report;
  SessionTrace trace;
  int exit_code = kExitOk;
  std::string error;  // set when exit_code is 3 or 4
};

// Sub-seed streams split from the root seed, one per pipeline stage.
enum class SeedStream : std::uint64_t {
  Link = 1,
  Bb84Sender,
  Bb84Receiver,
  QberSample,
  Reconcile,
  Amplify,
  BstsSender,
  BstsReceiver,
  Message,
};

std::uint64_t stage_seed(std::uint64_t root, SeedStream stream);

// BB84 -> detection -> reconciliation -> optional amplification -> BSTS.
// Never throws for a bad config; the outcome carries exit code 4 instead.
SessionOutcome run_full_session(const SessionConfig& cfg);

Json report_to_json(const SessionReport& report);
std::string format_report(const SessionReport& report);

// Throws std::runtime_error when the file cannot be written or read.
void emit_trace(const SessionTrace& trace, const std::string& path);
SessionTrace read_trace(const std::string& path);

struct FieldStats {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

// Per numeric field: mean and standard error of the mean. Optional fields are
// averaged over the reports that carry them; eve_decision is reported as
// abort_rate and message_delivered as a 0/1 rate.
std::map<std::string, FieldStats> summarize(std::span<const SessionReport> reports);
Json summary_to_json(const std::map<std::string, FieldStats>& summary);

}  // namespace qkdsim
