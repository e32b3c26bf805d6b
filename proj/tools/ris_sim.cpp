// ris_sim: statistical-CSI phase optimization for multi-RIS MISO links.
//
//   ris_sim fig2      average rate versus transmit power
//   ris_sim fig3      average rate versus RIS count at fixed total elements
//   ris_sim converge  optimizer traces for one snapshot
//   ris_sim selftest  randomized invariant checks
//
// Exit codes: 0 success, 1 selftest failure, 2 invalid configuration,
// 3 I/O error.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "risopt/analysis.hpp"
#include "risopt/errors.hpp"
#include "risopt/experiment.hpp"
#include "risopt/results_io.hpp"
#include "risopt/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSelftestFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::optional<int> snapshots;
  std::optional<int> eval_realizations;
  std::optional<std::string> schemes;
  std::optional<int> max_iters;
  std::optional<double> tau_ssca;
  std::optional<double> tau_smm;
  std::optional<std::vector<double>> sweep;
  int threads = 1;
  bool quiet = false;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON experiment spec; flags below override it");
  cmd->add_option("--seed", o.seed, "Master random seed");
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--snapshots", o.snapshots, "Number of channel snapshots");
  cmd->add_option("--eval-realizations", o.eval_realizations,
                  "Evaluation realizations per snapshot");
  cmd->add_option("--schemes", o.schemes, "Comma separated subset of ssca,smm,random");
  cmd->add_option("--max-iters", o.max_iters, "Iteration cap for both optimizers");
  cmd->add_option("--tau-ssca", o.tau_ssca, "SSCA surrogate curvature");
  cmd->add_option("--tau-smm", o.tau_smm, "SMM proximal weight (relative)");
  cmd->add_option("--sweep", o.sweep, "Sweep values (dBm for fig2, K for fig3)")->delimiter(',');
  cmd->add_option("--threads", o.threads, "Worker threads over snapshots")->capture_default_str();
  cmd->add_flag("--quiet", o.quiet, "Suppress progress output");
}

risopt::ExperimentSpec resolve_spec(const Overrides& o, risopt::ExperimentSpec defaults) {
  using namespace risopt;
  ExperimentSpec spec = o.config.empty() ? defaults : load_spec_file(o.config, defaults);
  if (o.seed) spec.seed = *o.seed;
  if (o.snapshots) spec.num_snapshots = *o.snapshots;
  if (o.eval_realizations) spec.num_eval_realizations = *o.eval_realizations;
  if (o.max_iters) {
    spec.ssca.max_iters = *o.max_iters;
    spec.smm.max_iters = *o.max_iters;
  }
  if (o.tau_ssca) spec.ssca.tau = *o.tau_ssca;
  if (o.tau_smm) spec.smm.tau = *o.tau_smm;
  if (o.sweep) spec.sweep.values = *o.sweep;
  if (o.schemes) {
    spec.schemes.clear();
    std::stringstream ss(*o.schemes);
    std::string name;
    while (std::getline(ss, name, ',')) {
      const auto scheme = parse_scheme(name);
      if (!scheme) throw ConfigError("unknown scheme '" + name + "'");
      spec.schemes.push_back(*scheme);
    }
  }
  spec.validate();
  return spec;
}

void print_summary(const risopt::ExperimentResult& result) {
  std::printf("%-8s %12s %14s %10s %10s\n", "scheme", "sweep_value", "rate[bps/Hz]", "stderr",
              "iters");
  for (const risopt::SchemeRecord& r : result.records) {
    double iters = 0.0;
    for (int i : r.iterations) iters += i;
    iters /= static_cast<double>(r.iterations.size());
    std::printf("%-8s %12g %14.4f %10.4f %10.1f\n", std::string(risopt::to_string(r.scheme)).c_str(),
                r.sweep_value, r.mean_rate, r.std_error, iters);
  }
}

int run_sweep(const Overrides& o, risopt::SweepMode mode, const char* stem) {
  using namespace risopt;
  const ExperimentSpec defaults = mode == SweepMode::kTxPower
                                      ? ExperimentSpec::power_sweep_defaults()
                                      : ExperimentSpec::ris_count_sweep_defaults();
  const ExperimentSpec spec = resolve_spec(o, defaults);
  if (spec.sweep.mode != mode) {
    throw ConfigError(std::string(stem) + " requires sweep.mode = " + std::string(to_string(mode)));
  }

  RunOptions options;
  options.threads = o.threads;
  if (!o.quiet) {
    options.progress = [](int done, int total) {
      std::fprintf(stderr, "\rsnapshot %d/%d", done, total);
      if (done == total) std::fputc('\n', stderr);
    };
  }
  const ExperimentResult result = run_experiment(spec, options);
  const EmittedFiles files = emit_results(result, o.out, stem);
  print_summary(result);

  if (mode == SweepMode::kTxPower && !o.quiet) {
    const auto& values = spec.sweep.values;
    const bool has_random =
        std::find(spec.schemes.begin(), spec.schemes.end(), Scheme::kRandom) != spec.schemes.end();
    const bool has_ref = std::find(values.begin(), values.end(), 10.0) != values.end();
    if (has_random && has_ref) {
      for (Scheme s : spec.schemes) {
        if (s == Scheme::kRandom) continue;
        const PowerGain g = power_gain(result, s, Scheme::kRandom, 10.0);
        std::printf("power gain of %s over random at 10 dBm: %s%.2f dB\n",
                    std::string(to_string(s)).c_str(), g.saturated ? ">= " : "", g.gain_db);
      }
    }
  }
  std::printf("wrote %s, %s, %s\n", files.summary_csv.string().c_str(),
              files.snapshots_csv.string().c_str(), files.sidecar_json.string().c_str());
  return kExitOk;
}

int run_converge(const Overrides& o, std::size_t snapshot, std::size_t point) {
  using namespace risopt;
  const ExperimentSpec spec = resolve_spec(o, ExperimentSpec::power_sweep_defaults());
  if (static_cast<int>(snapshot) >= spec.num_snapshots) throw ConfigError("--snapshot out of range");
  if (point >= spec.sweep.values.size()) throw ConfigError("--point out of range");

  const SnapshotContext ctx = make_snapshot_context(spec, snapshot, point);
  std::error_code ec;
  std::filesystem::create_directories(o.out, ec);
  if (ec) throw IoError("cannot create output directory", o.out);

  const std::filesystem::path dir(o.out);
  for (Scheme s : spec.schemes) {
    if (s == Scheme::kSsca) {
      const SscaResult r = train_ssca(spec, ctx);
      write_text_file(dir / "ssca_trace.csv", ssca_trace_csv(r.trace));
      std::printf("ssca: %d iterations (%s), evaluation rate %.4f bps/Hz\n", r.iterations,
                  std::string(to_string(r.reason)).c_str(),
                  average_metric(r.theta, ctx.evaluation, Metric::kRate, ctx.budget));
    } else if (s == Scheme::kSmm) {
      const SmmResult r = train_smm(spec, ctx);
      write_text_file(dir / "smm_trace.csv", smm_trace_csv(r.trace));
      std::printf("smm:  %d iterations (%s), evaluation rate %.4f bps/Hz\n", r.iterations,
                  std::string(to_string(r.reason)).c_str(),
                  average_metric(r.theta, ctx.evaluation, Metric::kRate, ctx.budget));
    } else {
      std::printf("random: evaluation rate %.4f bps/Hz\n", evaluate_random_baseline(spec, ctx));
    }
  }
  return kExitOk;
}

int run_selftest(std::uint64_t seed) {
  bool all = true;
  for (const risopt::SelftestCheck& c : risopt::run_selftest(seed)) {
    std::printf("[%s] %s (%s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    all = all && c.passed;
  }
  return all ? kExitOk : kExitSelftestFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical-CSI phase optimization for multi-RIS MISO downlinks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(risopt::version_string()));

  Overrides fig2_opts;
  Overrides fig3_opts;
  Overrides converge_opts;
  std::size_t converge_snapshot = 0;
  std::size_t converge_point = 0;
  std::uint64_t selftest_seed = 1;

  CLI::App* fig2 = app.add_subcommand("fig2", "Average rate versus transmit power");
  add_common_options(fig2, fig2_opts);
  CLI::App* fig3 = app.add_subcommand("fig3", "Average rate versus RIS count at fixed N*K");
  add_common_options(fig3, fig3_opts);
  CLI::App* converge = app.add_subcommand("converge", "Emit optimizer traces for one snapshot");
  add_common_options(converge, converge_opts);
  converge->add_option("--snapshot", converge_snapshot, "Snapshot index")->capture_default_str();
  converge->add_option("--point", converge_point, "Sweep point index")->capture_default_str();
  CLI::App* selftest = app.add_subcommand("selftest", "Run the invariant self-test");
  selftest->add_option("--seed", selftest_seed, "Seed for random instances")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*fig2) return run_sweep(fig2_opts, risopt::SweepMode::kTxPower, "fig2");
    if (*fig3) return run_sweep(fig3_opts, risopt::SweepMode::kRisCount, "fig3");
    if (*converge) return run_converge(converge_opts, converge_snapshot, converge_point);
    if (*selftest) return run_selftest(selftest_seed);
  } catch (const risopt::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const risopt::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
