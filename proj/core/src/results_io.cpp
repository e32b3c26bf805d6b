#include "risopt/results_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "risopt/errors.hpp"

#ifndef RISOPT_VERSION_STRING
#define RISOPT_VERSION_STRING "v0.1.0"
#endif

namespace risopt {

using Json = nlohmann::ordered_json;

std::string_view version_string() { return RISOPT_VERSION_STRING; }

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

namespace {

Json system_to_json(const SystemConfig& c) {
  return Json{{"antennas", c.antennas},
              {"ris_count", c.ris_count},
              {"elements_per_ris", c.elements_per_ris},
              {"rician_factor", c.rician_factor},
              {"num_paths", c.num_paths},
              {"distance_m", c.distance_m},
              {"bandwidth_hz", c.bandwidth_hz},
              {"noise_psd_dbm_hz", c.noise_psd_dbm_hz},
              {"tx_power_dbm", c.tx_power_dbm}};
}

Json spec_to_json_value(const ExperimentSpec& spec) {
  Json schemes = Json::array();
  for (Scheme s : spec.schemes) schemes.push_back(std::string(to_string(s)));
  return Json{
      {"system", system_to_json(spec.system)},
      {"num_snapshots", spec.num_snapshots},
      {"num_eval_realizations", spec.num_eval_realizations},
      {"sweep",
       {{"mode", std::string(to_string(spec.sweep.mode))},
        {"values", spec.sweep.values},
        {"total_elements", spec.sweep.total_elements}}},
      {"schemes", schemes},
      {"seed", spec.seed},
      {"ssca",
       {{"tau", spec.ssca.tau},
        {"alpha", spec.ssca.alpha},
        {"beta", spec.ssca.beta},
        {"epsilon", spec.ssca.epsilon},
        {"max_iters", spec.ssca.max_iters},
        {"init", spec.ssca_init == InitMode::kRandom ? "random" : "zeros"}}},
      {"smm",
       {{"tau", spec.smm.tau}, {"epsilon", spec.smm.epsilon}, {"max_iters", spec.smm.max_iters}}}};
}

void reject_unknown(const Json& obj, std::initializer_list<std::string_view> allowed,
                    std::string_view where) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->template get<T>();
}

void read_system(const Json& j, SystemConfig& c) {
  reject_unknown(j,
                 {"antennas", "ris_count", "elements_per_ris", "rician_factor", "num_paths",
                  "distance_m", "bandwidth_hz", "noise_psd_dbm_hz", "tx_power_dbm"},
                 "system");
  read(j, "antennas", c.antennas);
  read(j, "ris_count", c.ris_count);
  read(j, "elements_per_ris", c.elements_per_ris);
  read(j, "rician_factor", c.rician_factor);
  read(j, "num_paths", c.num_paths);
  read(j, "distance_m", c.distance_m);
  read(j, "bandwidth_hz", c.bandwidth_hz);
  read(j, "noise_psd_dbm_hz", c.noise_psd_dbm_hz);
  read(j, "tx_power_dbm", c.tx_power_dbm);
}

}  // namespace

std::string spec_to_json(const ExperimentSpec& spec) { return spec_to_json_value(spec).dump(2); }

ExperimentSpec spec_from_json(std::string_view text, const ExperimentSpec& defaults) {
  ExperimentSpec spec = defaults;
  try {
    const Json j = Json::parse(text);
    reject_unknown(j,
                   {"system", "num_snapshots", "num_eval_realizations", "sweep", "schemes", "seed",
                    "ssca", "smm"},
                   "spec");
    if (auto it = j.find("system"); it != j.end()) read_system(*it, spec.system);
    read(j, "num_snapshots", spec.num_snapshots);
    read(j, "num_eval_realizations", spec.num_eval_realizations);
    read(j, "seed", spec.seed);
    if (auto it = j.find("sweep"); it != j.end()) {
      reject_unknown(*it, {"mode", "values", "total_elements"}, "sweep");
      if (auto m = it->find("mode"); m != it->end()) {
        const auto mode = parse_sweep_mode(m->get<std::string>());
        if (!mode) throw ConfigError("sweep.mode must be 'tx_power' or 'ris_count'");
        spec.sweep.mode = *mode;
      }
      read(*it, "values", spec.sweep.values);
      read(*it, "total_elements", spec.sweep.total_elements);
    }
    if (auto it = j.find("schemes"); it != j.end()) {
      spec.schemes.clear();
      for (const auto& name : *it) {
        const auto scheme = parse_scheme(name.get<std::string>());
        if (!scheme) throw ConfigError("unknown scheme '" + name.get<std::string>() + "'");
        spec.schemes.push_back(*scheme);
      }
    }
    if (auto it = j.find("ssca"); it != j.end()) {
      reject_unknown(*it, {"tau", "alpha", "beta", "epsilon", "max_iters", "init"}, "ssca");
      read(*it, "tau", spec.ssca.tau);
      read(*it, "alpha", spec.ssca.alpha);
      read(*it, "beta", spec.ssca.beta);
      read(*it, "epsilon", spec.ssca.epsilon);
      read(*it, "max_iters", spec.ssca.max_iters);
      if (auto init = it->find("init"); init != it->end()) {
        const std::string mode = init->get<std::string>();
        if (mode == "zeros") spec.ssca_init = InitMode::kZeros;
        else if (mode == "random") spec.ssca_init = InitMode::kRandom;
        else throw ConfigError("ssca.init must be 'zeros' or 'random'");
      }
    }
    if (auto it = j.find("smm"); it != j.end()) {
      reject_unknown(*it, {"tau", "epsilon", "max_iters"}, "smm");
      read(*it, "tau", spec.smm.tau);
      read(*it, "epsilon", spec.smm.epsilon);
      read(*it, "max_iters", spec.smm.max_iters);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid spec JSON: ") + e.what());
  }
  return spec;
}

ExperimentSpec load_spec_file(const std::filesystem::path& path, const ExperimentSpec& defaults) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return spec_from_json(buf.str(), defaults);
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing", path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw IoError("write failed", path.string());
}

std::string summary_csv(const ExperimentResult& result) {
  std::string out = "scheme,sweep_value,mean_rate_bps_hz,stderr,n_snapshots\n";
  for (const SchemeRecord& r : result.records) {
    out += std::string(to_string(r.scheme)) + ',' + format_double(r.sweep_value) + ',' +
           format_double(r.mean_rate) + ',' + format_double(r.std_error) + ',' +
           std::to_string(r.per_snapshot_rates.size()) + '\n';
  }
  return out;
}

std::string snapshots_csv(const ExperimentResult& result) {
  std::string out = "scheme,sweep_value,snapshot,rate_bps_hz,iterations,stop_reason\n";
  for (const SchemeRecord& r : result.records) {
    for (std::size_t s = 0; s < r.per_snapshot_rates.size(); ++s) {
      out += std::string(to_string(r.scheme)) + ',' + format_double(r.sweep_value) + ',' +
             std::to_string(s) + ',' + format_double(r.per_snapshot_rates[s]) + ',' +
             std::to_string(r.iterations[s]) + ',' + std::string(to_string(r.stop_reasons[s])) +
             '\n';
    }
  }
  return out;
}

std::string sidecar_json(const ExperimentResult& result) {
  Json records = Json::array();
  for (const SchemeRecord& r : result.records) {
    std::map<std::string, int> reasons;
    for (StopReason reason : r.stop_reasons) ++reasons[std::string(to_string(reason))];
    double iters = 0.0;
    for (int i : r.iterations) iters += i;
    records.push_back(Json{
        {"scheme", std::string(to_string(r.scheme))},
        {"sweep_value", r.sweep_value},
        {"mean_rate_bps_hz", r.mean_rate},
        {"stderr", r.std_error},
        {"n_snapshots", r.per_snapshot_rates.size()},
        {"mean_iterations", r.iterations.empty() ? 0.0 : iters / r.iterations.size()},
        {"stop_reasons", reasons},
        {"max_surrogate_increase", r.max_surrogate_increase},
        {"max_modulus_error", r.max_modulus_error}});
  }
  const Json doc{{"tool", "risopt"},
                 {"version", std::string(version_string())},
                 {"seed", result.spec.seed},
                 {"spec", spec_to_json_value(result.spec)},
                 {"records", records}};
  return doc.dump(2) + '\n';
}

EmittedFiles emit_results(const ExperimentResult& result, const std::filesystem::path& dir,
                          std::string_view stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory", dir.string());
  EmittedFiles files;
  files.summary_csv = dir / (std::string(stem) + ".csv");
  files.snapshots_csv = dir / (std::string(stem) + "_snapshots.csv");
  files.sidecar_json = dir / (std::string(stem) + ".json");
  write_text_file(files.summary_csv, summary_csv(result));
  write_text_file(files.snapshots_csv, snapshots_csv(result));
  write_text_file(files.sidecar_json, sidecar_json(result));
  return files;
}

std::string ssca_trace_csv(const std::vector<SscaTraceRow>& trace) {
  std::string out = "iteration,surrogate_gap,rate_estimate\n";
  for (const SscaTraceRow& row : trace) {
    out += std::to_string(row.iteration) + ',' + format_double(row.surrogate_gap) + ',' +
           format_double(row.rate_estimate) + '\n';
  }
  return out;
}

std::string smm_trace_csv(const std::vector<SmmTraceRow>& trace) {
  std::string out = "t,g_tilde,snr_estimate,surrogate_change\n";
  for (const SmmTraceRow& row : trace) {
    out += std::to_string(row.t) + ',' + format_double(row.g_tilde) + ',' +
           format_double(row.snr_estimate) + ',' + format_double(row.surrogate_change) + '\n';
  }
  return out;
}

}  // namespace risopt
