#pragma once

#include <vector>

#include "risopt/channel_model.hpp"
#include "risopt/system_model.hpp"
#include "risopt/types.hpp"

namespace risopt {

// Stochastic successive convex approximation over unconstrained phase
// angles, maximizing the average achievable rate.
//
// Each iteration draws one realization, folds its rate gradient into a
// recursively averaged estimate f (weight iter^-beta), minimizes the
// quadratic surrogate <phi - phi_prev, f> + tau/2 ||phi - phi_prev||^2 in
// closed form, and smooths the iterate toward the minimizer with weight
// iter^-alpha. Convergence requires 0.5 <= beta < alpha <= 1.
struct SscaParams {
  // Tuned on the default M=4, K=2, N=20 geometry; larger values slow the
  // ascent enough that the epsilon rule fires far from a stationary point.
  double tau = 0.03;
  double alpha = 0.9;
  double beta = 0.6;
  double epsilon = 0.01;
  int max_iters = 5000;

  void validate() const;

  bool operator==(const SscaParams&) const = default;
};

struct SscaState {
  RVector phi;
  RVector grad_est;
  int iter = 0;
  double last_surrogate_gap = 0.0;

  // phi^(0) = init_phi, f^(0) = 0.
  static SscaState initial(const RVector& init_phi);
};

// Gradient of ln(1 + theta^H A theta), A = snr_scale H H^H, with respect to
// the complex vector theta: 2 A theta / (1 + theta^H A theta).
CVector grad_rate_theta(const CVector& theta, const ChannelRealization& chan,
                        const LinkBudget& budget);

// Gradient of the natural-log rate with respect to phi, obtained through
// theta = exp(j phi): Re{-j conj(theta) .* grad_theta}.
RVector grad_rate_phi(const RVector& phi, const ChannelRealization& chan,
                      const LinkBudget& budget);

// f^(i) = (1 - rho) f^(i-1) - rho * sample_grad with rho = iter^-beta.
// iter counts from one.
RVector update_gradient_estimate(const RVector& prev_estimate, const RVector& sample_grad,
                                 int iter, const SscaParams& params);

// Closed-form minimizer phi_prev - grad_est / tau of the quadratic surrogate.
RVector surrogate_minimizer(const RVector& phi_prev, const RVector& grad_est, double tau);

// <phi - phi_prev, f> + tau/2 ||phi - phi_prev||^2.
double ssca_surrogate(const RVector& phi, const RVector& phi_prev, const RVector& grad_est,
                      double tau);

// Step sizes rho^(i) = i^-beta and gamma^(i) = i^-alpha.
double gradient_weight(int iter, const SscaParams& params);
double smoothing_weight(int iter, const SscaParams& params);

// One pass of gradient update, surrogate minimization and smoothing.
SscaState ssca_step(const SscaState& state, const ChannelRealization& chan,
                    const SscaParams& params, const LinkBudget& budget);

struct SscaTraceRow {
  int iteration = 0;
  double surrogate_gap = 0.0;
  // Running mean (bits/s/Hz) of the rate of each pre-step iterate on the
  // sample that drove that step.
  double rate_estimate = 0.0;
};

struct SscaResult {
  PhaseVector theta;
  RVector phi;
  std::vector<SscaTraceRow> trace;
  StopReason reason = StopReason::kMaxIterations;
  int iterations = 0;
};

// Iterates until the surrogate gap drops below epsilon, max_iters is hit,
// or the stream runs dry.
SscaResult run_ssca(const RealizationStream& stream, const SscaParams& params,
                    const LinkBudget& budget, const RVector& init_phi);

}  // namespace risopt
