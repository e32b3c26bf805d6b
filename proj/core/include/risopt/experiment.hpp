#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "risopt/channel_model.hpp"
#include "risopt/smm.hpp"
#include "risopt/ssca.hpp"
#include "risopt/system_model.hpp"

namespace risopt {

enum class Scheme { kSsca, kSmm, kRandom };

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);

enum class SweepMode {
  kTxPower,   // values are transmit powers in dBm
  kRisCount,  // values are RIS counts K with N = total_elements / K
};

std::string_view to_string(SweepMode mode);
std::optional<SweepMode> parse_sweep_mode(std::string_view name);

enum class InitMode { kZeros, kRandom };

struct Sweep {
  SweepMode mode = SweepMode::kTxPower;
  std::vector<double> values;
  int total_elements = 64;  // only used for kRisCount

  bool operator==(const Sweep&) const = default;
};

struct ExperimentSpec {
  SystemConfig system;
  int num_snapshots = 100;
  int num_eval_realizations = 100;
  Sweep sweep;
  std::vector<Scheme> schemes{Scheme::kSsca, Scheme::kSmm, Scheme::kRandom};
  std::uint64_t seed = 1;
  SscaParams ssca;
  SmmParams smm;
  InitMode ssca_init = InitMode::kZeros;

  // Throws ConfigError.
  void validate() const;

  // System configuration at one sweep point.
  SystemConfig config_at(std::size_t point) const;

  // M=4, K=2, N=20, P_T from -10 to 20 dBm in 5 dB steps.
  static ExperimentSpec power_sweep_defaults();
  // M=4, P_T=-5 dBm, NK=64, K in {1, 2, 4, 8}.
  static ExperimentSpec ris_count_sweep_defaults();

  bool operator==(const ExperimentSpec&) const = default;
};

struct SchemeRecord {
  Scheme scheme = Scheme::kRandom;
  std::size_t point = 0;
  double sweep_value = 0.0;
  double mean_rate = 0.0;  // bits/s/Hz, averaged over snapshots
  double std_error = 0.0;
  std::vector<double> per_snapshot_rates;
  std::vector<int> iterations;  // optimizer iterations per snapshot, 0 for random
  std::vector<StopReason> stop_reasons;
  double wall_seconds = 0.0;
  // Diagnostics: worst surrogate increase over all SMM steps and worst
  // deviation from unit modulus over every emitted theta.
  double max_surrogate_increase = 0.0;
  double max_relative_surrogate_increase = 0.0;
  double max_modulus_error = 0.0;
};

struct ExperimentResult {
  ExperimentSpec spec;
  // Scheme-major: all sweep points of schemes[0], then schemes[1], ...
  std::vector<SchemeRecord> records;

  const SchemeRecord* find(Scheme scheme, std::size_t point) const;
};

struct RunOptions {
  int threads = 1;
  // Called after each finished snapshot with (done, total). Invoked from
  // worker threads under a lock.
  std::function<void(int, int)> progress;
};

// Runs every scheme at every sweep point on every snapshot and aggregates.
// Deterministic in spec.seed regardless of thread count.
ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

// Each phi_n uniform on (0, 2*pi].
PhaseVector random_phase_baseline(int nk, RandomStream& rng);

// Names of the sub-streams derived from the master seed. Keys are
// (purpose, snapshot index, configuration key), where the configuration key
// is the sweep point in K-sweep mode and zero otherwise so that a power sweep
// reuses geometry and samples across its points.
namespace streams {
inline constexpr std::string_view kSnapshot = "snapshot";
inline constexpr std::string_view kEvaluation = "evaluation";
inline constexpr std::string_view kTrainSsca = "train-ssca";
inline constexpr std::string_view kTrainSmm = "train-smm";
inline constexpr std::string_view kBaselinePhase = "baseline-phase";
inline constexpr std::string_view kSscaInit = "ssca-init";
}  // namespace streams

// Everything shared by the schemes for one (snapshot, sweep point).
struct SnapshotContext {
  SystemConfig config;
  Snapshot snapshot;
  std::vector<ChannelRealization> evaluation;
  LinkBudget budget;
  std::size_t snapshot_index = 0;
  std::uint64_t config_key = 0;
};

SnapshotContext make_snapshot_context(const ExperimentSpec& spec, std::size_t snapshot_index,
                                      std::size_t point);

// Training runs on fresh realizations from the snapshot's distribution.
SscaResult train_ssca(const ExperimentSpec& spec, const SnapshotContext& ctx);
SmmResult train_smm(const ExperimentSpec& spec, const SnapshotContext& ctx);

// Random baseline: one fresh phase vector per evaluation realization.
double evaluate_random_baseline(const ExperimentSpec& spec, const SnapshotContext& ctx,
                                double* max_modulus_error = nullptr);

}  // namespace risopt
