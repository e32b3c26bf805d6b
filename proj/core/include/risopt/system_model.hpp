#pragma once

#include <cmath>
#include <span>

#include "risopt/channel_model.hpp"
#include "risopt/types.hpp"

namespace risopt {

// Unit-modulus reflection vector theta with theta_n = exp(j phi_n).
class PhaseVector {
 public:
  PhaseVector() = default;

  static PhaseVector from_angles(const RVector& phi);
  // Accepts theta only if every entry has modulus one within 1e-9.
  static PhaseVector from_unit(const CVector& theta);
  static PhaseVector ones(int size);

  const CVector& theta() const noexcept { return theta_; }
  RVector phi() const;
  int size() const noexcept { return static_cast<int>(theta_.size()); }

  // Largest | |theta_n| - 1 |.
  double max_modulus_error() const;

 private:
  explicit PhaseVector(CVector theta) : theta_(std::move(theta)) {}

  CVector theta_;
};

// Transmit power over noise power, folded into one dimensionless scalar.
struct LinkBudget {
  double snr_scale = 1.0;

  static LinkBudget from_config(const SystemConfig& config);
  static LinkBudget from_dbm(double tx_power_dbm, double noise_power_dbm);
};

inline double dbm_to_linear(double dbm) { return std::pow(10.0, dbm / 10.0); }

// ||theta^H H||^2, the effective channel gain seen by MRT.
double effective_gain(const CVector& theta, const CMatrix& h_stack);

// w = sqrt(P) (theta^H H)^H / ||theta^H H||. Throws DegenerateChannelError
// when theta^H H vanishes.
CVector mrt_beamformer(const PhaseVector& theta, const ChannelRealization& chan,
                       double tx_power_linear);

// log2(1 + snr_scale * ||theta^H H||^2), in bits/s/Hz.
double instantaneous_rate(const PhaseVector& theta, const ChannelRealization& chan,
                          const LinkBudget& budget);

// ||theta^H H||^2 (equivalently -theta^H B theta with B = -H H^H).
double instantaneous_snr(const PhaseVector& theta, const ChannelRealization& chan);

enum class Metric { kRate, kSnr };

// Arithmetic mean of the chosen metric over the realizations. Throws
// std::invalid_argument for an empty set.
double average_metric(const PhaseVector& theta, std::span<const ChannelRealization> realizations,
                      Metric metric, const LinkBudget& budget);

}  // namespace risopt
