#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "risopt/rng.hpp"
#include "risopt/types.hpp"

namespace risopt {

// Physical and link-level parameters of the multi-RIS MISO downlink.
struct SystemConfig {
  int antennas = 4;           // M, AP antenna count
  int ris_count = 2;          // K
  int elements_per_ris = 20;  // N
  double rician_factor = 10.0;
  int num_paths = 5;          // L, RIS-to-user paths
  double distance_m = 10.0;   // AP-RIS and RIS-user hop length
  double bandwidth_hz = 2e5;
  double noise_psd_dbm_hz = -170.0;
  double tx_power_dbm = 10.0;

  int total_elements() const noexcept { return ris_count * elements_per_ris; }

  // Throws ConfigError on any violated invariant.
  void validate() const;

  bool operator==(const SystemConfig&) const = default;
};

// Long-term channel geometry, held fixed while small-scale fading varies.
struct Snapshot {
  RVector aoa_ris;                     // K angles of arrival at each RIS
  RVector aod_ap;                      // K angles of departure at the AP
  RMatrix user_path_angles;            // K x L, RIS-to-user path angles
  RMatrix path_gain_vars;              // K x L, each row sums to one
  std::vector<CMatrix> los_components; // K matrices, N x M, rank one

  int ris_count() const noexcept { return static_cast<int>(aoa_ris.size()); }
};

// One small-scale fading sample of every link plus the stacked effective
// channel. Row block k of h_stack is diag(conj(h_k)) * G_k.
struct ChannelRealization {
  CMatrix h_stack;               // (N*K) x M
  std::vector<CMatrix> per_ris_g;  // K matrices, N x M
  std::vector<CVector> per_ris_h;  // K vectors, N

  int total_elements() const noexcept { return static_cast<int>(h_stack.rows()); }
  int antennas() const noexcept { return static_cast<int>(h_stack.cols()); }

  // Builds h_stack from per-link channels. All G_k must share a shape and
  // each h_k must match the row count of its G_k.
  static ChannelRealization assemble(std::vector<CMatrix> g, std::vector<CVector> h);

  // Wraps an effective channel directly, splitting it into ris_count row
  // blocks with h_k = 1. Useful for synthetic test channels.
  static ChannelRealization from_effective(const CMatrix& h_stack, int ris_count = 1);
};

// ULA response [1, e^{j pi sin a}, ..., e^{j pi (n-1) sin a}].
CVector ula_steering(int n_elems, double angle);

Snapshot sample_snapshot(const SystemConfig& config, RandomStream& rng);

// Draws one realization of all links for the given geometry. Each hop is
// attenuated by the amplitude factor 10^(-path_loss_db / 20).
ChannelRealization sample_realization(const Snapshot& snapshot, const SystemConfig& config,
                                      RandomStream& rng);

// 38.46 + 20 lg d.
double path_loss_db(double distance_m);

// Amplitude scaling applied to a single hop of length config.distance_m.
double hop_amplitude(const SystemConfig& config);

double noise_power_dbm(const SystemConfig& config);

// Source of channel realizations. Returns std::nullopt once exhausted.
using RealizationStream = std::function<std::optional<ChannelRealization>()>;

// Endless i.i.d. realizations conditioned on one snapshot. The stream owns
// its copies of the snapshot, config and rng.
RealizationStream make_channel_stream(Snapshot snapshot, SystemConfig config, RandomStream rng);

// Yields the same realization forever.
RealizationStream make_repeating_stream(ChannelRealization realization);

// Yields each element once, in order, then runs dry.
RealizationStream make_sequence_stream(std::vector<ChannelRealization> realizations);

}  // namespace risopt
