#include "risopt/system_model.hpp"

#include <cmath>
#include <algorithm>
#include <stdexcept>
#include <string>

#include "risopt/errors.hpp"

namespace risopt {

PhaseVector PhaseVector::from_angles(const RVector& phi) {
  CVector theta(phi.size());
  for (Eigen::Index n = 0; n < phi.size(); ++n) theta[n] = std::polar(1.0, phi[n]);
  return PhaseVector(std::move(theta));
}

PhaseVector PhaseVector::from_unit(const CVector& theta) {
  for (Eigen::Index n = 0; n < theta.size(); ++n) {
    if (std::abs(std::abs(theta[n]) - 1.0) > 1e-9) {
      throw std::invalid_argument("PhaseVector: entry " + std::to_string(n) +
                                  " is not unit modulus");
    }
  }
  return PhaseVector(theta);
}

PhaseVector PhaseVector::ones(int size) { return PhaseVector(CVector::Ones(size)); }

RVector PhaseVector::phi() const {
  RVector out(theta_.size());
  for (Eigen::Index n = 0; n < theta_.size(); ++n) out[n] = std::arg(theta_[n]);
  return out;
}

double PhaseVector::max_modulus_error() const {
  double worst = 0.0;
  for (Eigen::Index n = 0; n < theta_.size(); ++n) {
    worst = std::max(worst, std::abs(std::abs(theta_[n]) - 1.0));
  }
  return worst;
}

LinkBudget LinkBudget::from_config(const SystemConfig& config) {
  return from_dbm(config.tx_power_dbm, noise_power_dbm(config));
}

LinkBudget LinkBudget::from_dbm(double tx_power_dbm, double noise_power_dbm) {
  return LinkBudget{std::pow(10.0, (tx_power_dbm - noise_power_dbm) / 10.0)};
}

double effective_gain(const CVector& theta, const CMatrix& h_stack) {
  if (theta.size() != h_stack.rows()) {
    throw DimensionError("phase vector length does not match channel rows");
  }
  return (h_stack.adjoint() * theta).squaredNorm();
}

CVector mrt_beamformer(const PhaseVector& theta, const ChannelRealization& chan,
                       double tx_power_linear) {
  if (theta.size() != chan.total_elements()) {
    throw DimensionError("phase vector length does not match channel rows");
  }
  // (theta^H H)^H = H^H theta
  const CVector direction = chan.h_stack.adjoint() * theta.theta();
  const double norm = direction.norm();
  if (norm == 0.0) throw DegenerateChannelError("mrt_beamformer: theta^H H is zero");
  return std::sqrt(tx_power_linear) * direction / norm;
}

double instantaneous_rate(const PhaseVector& theta, const ChannelRealization& chan,
                          const LinkBudget& budget) {
  return std::log2(1.0 + budget.snr_scale * effective_gain(theta.theta(), chan.h_stack));
}

double instantaneous_snr(const PhaseVector& theta, const ChannelRealization& chan) {
  return effective_gain(theta.theta(), chan.h_stack);
}

double average_metric(const PhaseVector& theta, std::span<const ChannelRealization> realizations,
                      Metric metric, const LinkBudget& budget) {
  if (realizations.empty()) throw std::invalid_argument("average_metric: no realizations");
  double total = 0.0;
  for (const ChannelRealization& chan : realizations) {
    total += metric == Metric::kRate ? instantaneous_rate(theta, chan, budget)
                                     : instantaneous_snr(theta, chan);
  }
  return total / static_cast<double>(realizations.size());
}

}  // namespace risopt
