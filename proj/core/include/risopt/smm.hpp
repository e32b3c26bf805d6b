#pragma once

#include <optional>
#include <vector>

#include "risopt/channel_model.hpp"
#include "risopt/system_model.hpp"
#include "risopt/types.hpp"

namespace risopt {

// Stochastic majorization-minimization for average received SNR.
//
// Minimizes g(theta) = E[theta^H B_i theta], B_i = -H_i H_i^H, over the unit
// disk |theta_n| <= 1 (equivalent to the unit circle because g is concave).
// Each sample is majorized at the previous iterate by the linearization
//   g_hat_i(theta, theta') = -theta'^H B_i theta' + 2 Re{theta'^H B_i theta}
//                            + tau ||theta - theta'||^2,
// the running average of these surrogates decouples per element, and each
// element is set to the unit-modulus minimizer in closed form.
//
// Both tau and epsilon are expressed in units of the mean per-element gain
// of the first sample, -mean(diag(B_1)), which is fixed for the rest of the
// run. This keeps the iteration independent of the channel's absolute scale
// (path loss), as if the channel were normalized to unit per-element gain.
struct SmmParams {
  double tau = 1e-6;
  // Stop once |g~(theta^t) - g~(theta^(t-1))| < epsilon * gain_scale.
  double epsilon = 0.01;
  int max_iters = 5000;

  void validate() const;

  bool operator==(const SmmParams&) const = default;
};

struct SmmState {
  PhaseVector theta;
  CMatrix b_tilde;     // running mean of B_i
  CVector d;           // running mean of B_i theta^(i-1)
  CVector theta_ddot;  // running mean of theta^(i-1)
  // Running mean of -theta'^H B_i theta' + tau ||theta'||^2, the part of the
  // averaged surrogate that does not depend on theta.
  double surrogate_offset = 0.0;
  int t = 0;
  double gain_scale = 0.0;     // -mean(diag(B_1)), set at t = 1 (1 if B_1 = 0)

  double last_objective = 0.0;       // g~(theta^t) = theta^H B~_t theta
  double previous_objective = 0.0;   // g~(theta^(t-1)) under the same B~_t
  double last_surrogate_change = 0.0;  // g_bar_t(theta^t) - g_bar_t(theta^(t-1))
  int stalled_elements = 0;          // elements kept at their previous value

  static SmmState initial(const PhaseVector& init_theta);
};

// B = -H H^H (Hermitian, negative semidefinite).
CMatrix build_B(const ChannelRealization& chan);

// g_hat(theta, theta_prev) for a single sample.
double mm_surrogate(const CVector& theta, const CVector& theta_prev, const CMatrix& b,
                    double tau);

// Sample objective theta^H B theta.
double quadratic_objective(const CVector& theta, const CMatrix& b);

// Averaged surrogate g_bar_t evaluated from the running statistics.
double averaged_surrogate(const SmmState& state, const CVector& theta, double tau);

// -mean(diag(B)), or 1 when B vanishes.
double gain_scale(const CMatrix& b);

// Advances t and folds B_t, B_t theta^(t-1) and theta^(t-1) into the running
// means with weight 1/t. theta itself is left untouched.
SmmState update_saa(const SmmState& state, const CMatrix& b_t, double tau);

struct PhaseUpdate {
  PhaseVector theta;
  int stalled_elements = 0;
};

// Per element, the unit-modulus minimizer of
//   -2 Re{conj(v_n) theta_n} + tau |theta_n - theta_ddot_n|^2,
// i.e. theta_n = (v_n + tau theta_ddot_n) / |v_n + tau theta_ddot_n|. An
// element whose combined direction is exactly zero keeps its previous value
// (or 1 when no previous vector is given).
PhaseUpdate smm_phase_update(const CVector& v, const CVector& theta_ddot, double tau,
                             const std::optional<CVector>& previous = std::nullopt);

// Builds B_t, updates the running means, and moves theta to the minimizer
// of the averaged surrogate. The absolute proximal weight is
// params.tau * state.gain_scale.
SmmState smm_step(const SmmState& state, const ChannelRealization& chan, const SmmParams& params);

struct SmmTraceRow {
  int t = 0;
  double g_tilde = 0.0;
  double snr_estimate = 0.0;      // running mean of ||theta^(t-1)^H H_t||^2
  double surrogate_change = 0.0;  // must stay <= 0 up to round-off
};

struct SmmResult {
  PhaseVector theta;
  std::vector<SmmTraceRow> trace;
  StopReason reason = StopReason::kMaxIterations;
  int iterations = 0;
  double max_surrogate_increase = 0.0;
  // Same, divided by |g_bar_t(theta^(t-1))| (scale-free).
  double max_relative_surrogate_increase = 0.0;
  double max_modulus_error = 0.0;
};

SmmResult run_smm(const RealizationStream& stream, const SmmParams& params,
                  const PhaseVector& init_theta);

}  // namespace risopt
