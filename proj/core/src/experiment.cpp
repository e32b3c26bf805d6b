#include "risopt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "risopt/analysis.hpp"
#include "risopt/errors.hpp"

namespace risopt {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kSsca: return "ssca";
    case Scheme::kSmm: return "smm";
    case Scheme::kRandom: return "random";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  if (name == "ssca") return Scheme::kSsca;
  if (name == "smm") return Scheme::kSmm;
  if (name == "random") return Scheme::kRandom;
  return std::nullopt;
}

std::string_view to_string(SweepMode mode) {
  return mode == SweepMode::kTxPower ? "tx_power" : "ris_count";
}

std::optional<SweepMode> parse_sweep_mode(std::string_view name) {
  if (name == "tx_power") return SweepMode::kTxPower;
  if (name == "ris_count") return SweepMode::kRisCount;
  return std::nullopt;
}

void ExperimentSpec::validate() const {
  if (num_snapshots < 1) throw ConfigError("num_snapshots must be >= 1");
  if (num_eval_realizations < 1) throw ConfigError("num_eval_realizations must be >= 1");
  if (sweep.values.empty()) throw ConfigError("sweep must contain at least one value");
  if (schemes.empty()) throw ConfigError("at least one scheme is required");
  if (std::set<Scheme>(schemes.begin(), schemes.end()).size() != schemes.size()) {
    throw ConfigError("schemes must not repeat");
  }
  for (double v : sweep.values) {
    if (!std::isfinite(v)) throw ConfigError("sweep values must be finite");
  }
  if (sweep.mode == SweepMode::kRisCount) {
    if (sweep.total_elements < 1) throw ConfigError("sweep.total_elements must be >= 1");
    for (double v : sweep.values) {
      if (v < 1.0 || v != std::floor(v)) {
        throw ConfigError("ris_count sweep values must be positive integers");
      }
      if (sweep.total_elements % static_cast<int>(v) != 0) {
        throw ConfigError("ris_count sweep: total_elements must be divisible by every K");
      }
    }
  }
  for (std::size_t p = 0; p < sweep.values.size(); ++p) config_at(p).validate();
  ssca.validate();
  smm.validate();
}

SystemConfig ExperimentSpec::config_at(std::size_t point) const {
  SystemConfig config = system;
  const double v = sweep.values.at(point);
  if (sweep.mode == SweepMode::kTxPower) {
    config.tx_power_dbm = v;
  } else {
    config.ris_count = static_cast<int>(v);
    config.elements_per_ris = config.ris_count > 0 ? sweep.total_elements / config.ris_count : 0;
  }
  return config;
}

ExperimentSpec ExperimentSpec::power_sweep_defaults() {
  ExperimentSpec spec;
  spec.sweep.mode = SweepMode::kTxPower;
  spec.sweep.values = {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
  return spec;
}

ExperimentSpec ExperimentSpec::ris_count_sweep_defaults() {
  ExperimentSpec spec;
  spec.system.tx_power_dbm = -5.0;
  spec.sweep.mode = SweepMode::kRisCount;
  spec.sweep.values = {1.0, 2.0, 4.0, 8.0};
  spec.sweep.total_elements = 64;
  spec.system.ris_count = 1;
  spec.system.elements_per_ris = 64;
  return spec;
}

const SchemeRecord* ExperimentResult::find(Scheme scheme, std::size_t point) const {
  for (const SchemeRecord& r : records) {
    if (r.scheme == scheme && r.point == point) return &r;
  }
  return nullptr;
}

PhaseVector random_phase_baseline(int nk, RandomStream& rng) {
  RVector phi(nk);
  for (int n = 0; n < nk; ++n) phi[n] = rng.angle();
  return PhaseVector::from_angles(phi);
}

namespace {

std::uint64_t config_key(const ExperimentSpec& spec, std::size_t point) {
  return spec.sweep.mode == SweepMode::kRisCount ? point : 0;
}

}  // namespace

SnapshotContext make_snapshot_context(const ExperimentSpec& spec, std::size_t snapshot_index,
                                      std::size_t point) {
  SnapshotContext ctx;
  ctx.config = spec.config_at(point);
  ctx.snapshot_index = snapshot_index;
  ctx.config_key = config_key(spec, point);

  RandomStream geometry = derive_stream(spec.seed, streams::kSnapshot, snapshot_index, ctx.config_key);
  ctx.snapshot = sample_snapshot(ctx.config, geometry);

  RandomStream fading = derive_stream(spec.seed, streams::kEvaluation, snapshot_index, ctx.config_key);
  ctx.evaluation.reserve(spec.num_eval_realizations);
  for (int i = 0; i < spec.num_eval_realizations; ++i) {
    ctx.evaluation.push_back(sample_realization(ctx.snapshot, ctx.config, fading));
  }
  ctx.budget = LinkBudget::from_config(ctx.config);
  return ctx;
}

SscaResult train_ssca(const ExperimentSpec& spec, const SnapshotContext& ctx) {
  const int nk = ctx.config.total_elements();
  RVector init = RVector::Zero(nk);
  if (spec.ssca_init == InitMode::kRandom) {
    RandomStream rng = derive_stream(spec.seed, streams::kSscaInit, ctx.snapshot_index, ctx.config_key);
    for (int n = 0; n < nk; ++n) init[n] = rng.angle();
  }
  RealizationStream stream = make_channel_stream(
      ctx.snapshot, ctx.config,
      derive_stream(spec.seed, streams::kTrainSsca, ctx.snapshot_index, ctx.config_key));
  return run_ssca(stream, spec.ssca, ctx.budget, init);
}

SmmResult train_smm(const ExperimentSpec& spec, const SnapshotContext& ctx) {
  RealizationStream stream = make_channel_stream(
      ctx.snapshot, ctx.config,
      derive_stream(spec.seed, streams::kTrainSmm, ctx.snapshot_index, ctx.config_key));
  return run_smm(stream, spec.smm, PhaseVector::ones(ctx.config.total_elements()));
}

double evaluate_random_baseline(const ExperimentSpec& spec, const SnapshotContext& ctx,
                                double* max_modulus_error) {
  RandomStream rng =
      derive_stream(spec.seed, streams::kBaselinePhase, ctx.snapshot_index, ctx.config_key);
  const int nk = ctx.config.total_elements();
  double total = 0.0;
  double worst = 0.0;
  for (const ChannelRealization& chan : ctx.evaluation) {
    const PhaseVector theta = random_phase_baseline(nk, rng);
    worst = std::max(worst, theta.max_modulus_error());
    total += instantaneous_rate(theta, chan, ctx.budget);
  }
  if (max_modulus_error) *max_modulus_error = worst;
  return total / static_cast<double>(ctx.evaluation.size());
}

namespace {

struct Cell {
  double rate = 0.0;
  int iterations = 0;
  StopReason reason = StopReason::kMaxIterations;
  double seconds = 0.0;
  double surrogate_increase = 0.0;
  double relative_surrogate_increase = 0.0;
  double modulus_error = 0.0;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Fills cells[scheme][point] for one snapshot.
void run_snapshot(const ExperimentSpec& spec, std::size_t s,
                  std::vector<std::vector<Cell>>& cells) {
  using Clock = std::chrono::steady_clock;
  const std::size_t points = spec.sweep.values.size();
  const bool power_sweep = spec.sweep.mode == SweepMode::kTxPower;

  std::optional<SnapshotContext> shared;
  // SNR maximization does not depend on transmit power, so one SMM run per
  // snapshot serves every point of a power sweep.
  std::optional<SmmResult> smm_cache;
  double smm_cache_seconds = 0.0;

  for (std::size_t p = 0; p < points; ++p) {
    SnapshotContext ctx;
    if (power_sweep) {
      if (!shared) shared = make_snapshot_context(spec, s, 0);
      ctx = *shared;
      ctx.config = spec.config_at(p);
      ctx.budget = LinkBudget::from_config(ctx.config);
    } else {
      ctx = make_snapshot_context(spec, s, p);
    }

    for (std::size_t j = 0; j < spec.schemes.size(); ++j) {
      Cell& cell = cells[j * points + p][s];
      const auto start = Clock::now();
      switch (spec.schemes[j]) {
        case Scheme::kSsca: {
          SscaResult r = train_ssca(spec, ctx);
          cell.rate = average_metric(r.theta, ctx.evaluation, Metric::kRate, ctx.budget);
          cell.iterations = r.iterations;
          cell.reason = r.reason;
          cell.modulus_error = r.theta.max_modulus_error();
          cell.seconds = seconds_since(start);
          break;
        }
        case Scheme::kSmm: {
          if (!power_sweep || !smm_cache) {
            smm_cache = train_smm(spec, ctx);
            smm_cache_seconds = seconds_since(start);
          }
          const SmmResult& r = *smm_cache;
          cell.rate = average_metric(r.theta, ctx.evaluation, Metric::kRate, ctx.budget);
          cell.iterations = r.iterations;
          cell.reason = r.reason;
          cell.surrogate_increase = r.max_surrogate_increase;
          cell.relative_surrogate_increase = r.max_relative_surrogate_increase;
          cell.modulus_error = r.max_modulus_error;
          cell.seconds = smm_cache_seconds + seconds_since(start);
          break;
        }
        case Scheme::kRandom: {
          cell.rate = evaluate_random_baseline(spec, ctx, &cell.modulus_error);
          cell.iterations = 0;
          cell.reason = StopReason::kConverged;
          cell.seconds = seconds_since(start);
          break;
        }
      }
    }
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  spec.validate();
  const std::size_t points = spec.sweep.values.size();
  const std::size_t snapshots = static_cast<std::size_t>(spec.num_snapshots);
  std::vector<std::vector<Cell>> cells(spec.schemes.size() * points,
                                       std::vector<Cell>(snapshots));

  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  int done = 0;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t s = next.fetch_add(1);
      if (s >= snapshots) return;
      try {
        run_snapshot(spec, s, cells);
      } catch (...) {
        std::lock_guard lock(progress_mutex);
        if (!failure) failure = std::current_exception();
        next = snapshots;
        return;
      }
      std::lock_guard lock(progress_mutex);
      ++done;
      if (options.progress) options.progress(done, static_cast<int>(snapshots));
    }
  };

  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(snapshots)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  result.spec = spec;
  for (std::size_t j = 0; j < spec.schemes.size(); ++j) {
    for (std::size_t p = 0; p < points; ++p) {
      const std::vector<Cell>& column = cells[j * points + p];
      SchemeRecord rec;
      rec.scheme = spec.schemes[j];
      rec.point = p;
      rec.sweep_value = spec.sweep.values[p];
      for (const Cell& c : column) {
        rec.per_snapshot_rates.push_back(c.rate);
        rec.iterations.push_back(c.iterations);
        rec.stop_reasons.push_back(c.reason);
        rec.wall_seconds += c.seconds;
        rec.max_surrogate_increase = std::max(rec.max_surrogate_increase, c.surrogate_increase);
        rec.max_relative_surrogate_increase =
            std::max(rec.max_relative_surrogate_increase, c.relative_surrogate_increase);
        rec.max_modulus_error = std::max(rec.max_modulus_error, c.modulus_error);
      }
      rec.mean_rate = mean(rec.per_snapshot_rates);
      rec.std_error = standard_error(rec.per_snapshot_rates);
      result.records.push_back(std::move(rec));
    }
  }
  return result;
}

}  // namespace risopt
