#include "risopt/channel_model.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "risopt/errors.hpp"

namespace risopt {

void SystemConfig::validate() const {
  if (antennas < 1) throw ConfigError("antennas (M) must be >= 1");
  if (ris_count < 1) throw ConfigError("ris_count (K) must be >= 1");
  if (elements_per_ris < 1) throw ConfigError("elements_per_ris (N) must be >= 1");
  if (num_paths < 1) throw ConfigError("num_paths (L) must be >= 1");
  if (!(rician_factor >= 0.0)) throw ConfigError("rician_factor must be >= 0");
  if (!(distance_m > 0.0)) throw ConfigError("distance_m must be > 0");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth_hz must be > 0");
  if (!std::isfinite(noise_psd_dbm_hz)) throw ConfigError("noise_psd_dbm_hz must be finite");
  if (!std::isfinite(tx_power_dbm)) throw ConfigError("tx_power_dbm must be finite");
}

ChannelRealization ChannelRealization::assemble(std::vector<CMatrix> g, std::vector<CVector> h) {
  if (g.empty() || g.size() != h.size()) {
    throw DimensionError("assemble: need one G and one h per RIS");
  }
  const Eigen::Index n = g.front().rows();
  const Eigen::Index m = g.front().cols();
  ChannelRealization out;
  out.h_stack.resize(n * static_cast<Eigen::Index>(g.size()), m);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g[k].rows() != n || g[k].cols() != m || h[k].size() != n) {
      throw DimensionError("assemble: inconsistent per-RIS shapes at k=" + std::to_string(k));
    }
    out.h_stack.middleRows(static_cast<Eigen::Index>(k) * n, n) =
        h[k].conjugate().asDiagonal() * g[k];
  }
  out.per_ris_g = std::move(g);
  out.per_ris_h = std::move(h);
  return out;
}

ChannelRealization ChannelRealization::from_effective(const CMatrix& h_stack, int ris_count) {
  if (ris_count < 1 || h_stack.rows() % ris_count != 0) {
    throw DimensionError("from_effective: row count not divisible by ris_count");
  }
  const Eigen::Index n = h_stack.rows() / ris_count;
  std::vector<CMatrix> g;
  std::vector<CVector> h;
  for (int k = 0; k < ris_count; ++k) {
    g.emplace_back(h_stack.middleRows(k * n, n));
    h.emplace_back(CVector::Ones(n));
  }
  return assemble(std::move(g), std::move(h));
}

CVector ula_steering(int n_elems, double angle) {
  const double step = kPi * std::sin(angle);
  CVector a(n_elems);
  for (int m = 0; m < n_elems; ++m) {
    a[m] = std::polar(1.0, step * m);
  }
  return a;
}

Snapshot sample_snapshot(const SystemConfig& config, RandomStream& rng) {
  config.validate();
  const int k_count = config.ris_count;
  const int paths = config.num_paths;

  Snapshot snap;
  snap.aoa_ris.resize(k_count);
  snap.aod_ap.resize(k_count);
  snap.user_path_angles.resize(k_count, paths);
  snap.path_gain_vars.resize(k_count, paths);

  for (int k = 0; k < k_count; ++k) {
    snap.aoa_ris[k] = rng.angle();
    snap.aod_ap[k] = rng.angle();
    for (int l = 0; l < paths; ++l) snap.user_path_angles(k, l) = rng.angle();

    double total = 0.0;
    for (int l = 0; l < paths; ++l) {
      snap.path_gain_vars(k, l) = rng.exponential();
      total += snap.path_gain_vars(k, l);
    }
    snap.path_gain_vars.row(k) /= total;

    snap.los_components.push_back(ula_steering(config.elements_per_ris, snap.aoa_ris[k]) *
                                  ula_steering(config.antennas, snap.aod_ap[k]).adjoint());
  }
  return snap;
}

ChannelRealization sample_realization(const Snapshot& snapshot, const SystemConfig& config,
                                      RandomStream& rng) {
  const int k_count = config.ris_count;
  const int n = config.elements_per_ris;
  const int m = config.antennas;
  const int paths = config.num_paths;
  if (snapshot.ris_count() != k_count || snapshot.user_path_angles.cols() != paths ||
      snapshot.path_gain_vars.rows() != k_count || snapshot.path_gain_vars.cols() != paths ||
      static_cast<int>(snapshot.los_components.size()) != k_count) {
    throw DimensionError("sample_realization: snapshot does not match config (K or L)");
  }
  for (const CMatrix& los : snapshot.los_components) {
    if (los.rows() != n || los.cols() != m) {
      throw DimensionError("sample_realization: LoS component is not N x M");
    }
  }

  const double amp = hop_amplitude(config);
  const double rho = config.rician_factor;
  const double los_weight = std::sqrt(rho / (rho + 1.0));
  const double nlos_weight = std::sqrt(1.0 / (rho + 1.0));

  std::vector<CMatrix> g;
  std::vector<CVector> h;
  g.reserve(k_count);
  h.reserve(k_count);
  for (int k = 0; k < k_count; ++k) {
    CMatrix scatter(n, m);
    for (int c = 0; c < m; ++c) {
      for (int r = 0; r < n; ++r) scatter(r, c) = rng.complex_normal(1.0);
    }
    g.emplace_back(amp * (los_weight * snapshot.los_components[k] + nlos_weight * scatter));

    CVector user = CVector::Zero(n);
    for (int l = 0; l < paths; ++l) {
      const Complex beta = rng.complex_normal(snapshot.path_gain_vars(k, l));
      user += beta * ula_steering(n, snapshot.user_path_angles(k, l));
    }
    h.emplace_back(amp * user);
  }
  return ChannelRealization::assemble(std::move(g), std::move(h));
}

double path_loss_db(double distance_m) {
  if (!(distance_m > 0.0)) throw ConfigError("path_loss_db: distance must be > 0");
  return 38.46 + 20.0 * std::log10(distance_m);
}

double hop_amplitude(const SystemConfig& config) {
  return std::pow(10.0, -path_loss_db(config.distance_m) / 20.0);
}

double noise_power_dbm(const SystemConfig& config) {
  return config.noise_psd_dbm_hz + 10.0 * std::log10(config.bandwidth_hz);
}

RealizationStream make_channel_stream(Snapshot snapshot, SystemConfig config, RandomStream rng) {
  struct Source {
    Snapshot snapshot;
    SystemConfig config;
    RandomStream rng;
  };
  auto source = std::make_shared<Source>(Source{std::move(snapshot), config, std::move(rng)});
  return [source]() -> std::optional<ChannelRealization> {
    return sample_realization(source->snapshot, source->config, source->rng);
  };
}

RealizationStream make_repeating_stream(ChannelRealization realization) {
  auto held = std::make_shared<const ChannelRealization>(std::move(realization));
  return [held]() -> std::optional<ChannelRealization> { return *held; };
}

RealizationStream make_sequence_stream(std::vector<ChannelRealization> realizations) {
  struct Cursor {
    std::vector<ChannelRealization> items;
    std::size_t next = 0;
  };
  auto cursor = std::make_shared<Cursor>(Cursor{std::move(realizations), 0});
  return [cursor]() -> std::optional<ChannelRealization> {
    if (cursor->next >= cursor->items.size()) return std::nullopt;
    return cursor->items[cursor->next++];
  };
}

}  // namespace risopt
