#include "risopt/ssca.hpp"

#include <cmath>

#include "risopt/errors.hpp"

namespace risopt {

void SscaParams::validate() const {
  if (!(tau > 0.0)) throw ConfigError("ssca.tau must be > 0");
  if (!(beta >= 0.5 && beta <= 1.0)) throw ConfigError("ssca.beta must lie in [0.5, 1]");
  if (!(alpha > beta && alpha <= 1.0)) throw ConfigError("ssca.alpha must satisfy beta < alpha <= 1");
  if (!(epsilon > 0.0)) throw ConfigError("ssca.epsilon must be > 0");
  if (max_iters < 0) throw ConfigError("ssca.max_iters must be >= 0");
}

SscaState SscaState::initial(const RVector& init_phi) {
  SscaState s;
  s.phi = init_phi;
  s.grad_est = RVector::Zero(init_phi.size());
  return s;
}

CVector grad_rate_theta(const CVector& theta, const ChannelRealization& chan,
                        const LinkBudget& budget) {
  const CMatrix& h = chan.h_stack;
  // A theta = s H (H^H theta); theta^H A theta = s ||H^H theta||^2
  const CVector projected = h.adjoint() * theta;
  const double quad = budget.snr_scale * projected.squaredNorm();
  return (2.0 * budget.snr_scale / (1.0 + quad)) * (h * projected);
}

RVector grad_rate_phi(const RVector& phi, const ChannelRealization& chan,
                      const LinkBudget& budget) {
  const CVector theta = PhaseVector::from_angles(phi).theta();
  const CVector g = grad_rate_theta(theta, chan, budget);
  RVector out(phi.size());
  for (Eigen::Index n = 0; n < phi.size(); ++n) {
    // Re{-j conj(theta_n) g_n} = Im{conj(theta_n) g_n}
    out[n] = (std::conj(theta[n]) * g[n]).imag();
  }
  return out;
}

double gradient_weight(int iter, const SscaParams& params) {
  return std::pow(static_cast<double>(iter), -params.beta);
}

double smoothing_weight(int iter, const SscaParams& params) {
  return std::pow(static_cast<double>(iter), -params.alpha);
}

RVector update_gradient_estimate(const RVector& prev_estimate, const RVector& sample_grad,
                                 int iter, const SscaParams& params) {
  const double rho = gradient_weight(iter, params);
  if (rho == 1.0) return -sample_grad;
  return (1.0 - rho) * prev_estimate - rho * sample_grad;
}

RVector surrogate_minimizer(const RVector& phi_prev, const RVector& grad_est, double tau) {
  return phi_prev - grad_est / tau;
}

double ssca_surrogate(const RVector& phi, const RVector& phi_prev, const RVector& grad_est,
                      double tau) {
  const RVector delta = phi - phi_prev;
  return delta.dot(grad_est) + 0.5 * tau * delta.squaredNorm();
}

SscaState ssca_step(const SscaState& state, const ChannelRealization& chan,
                    const SscaParams& params, const LinkBudget& budget) {
  SscaState next;
  next.iter = state.iter + 1;
  const RVector sample_grad = grad_rate_phi(state.phi, chan, budget);
  next.grad_est = update_gradient_estimate(state.grad_est, sample_grad, next.iter, params);

  const RVector target = surrogate_minimizer(state.phi, next.grad_est, params.tau);
  const double gamma = smoothing_weight(next.iter, params);
  next.phi = gamma == 1.0 ? target : RVector((1.0 - gamma) * state.phi + gamma * target);

  // f_hat(phi^(i), phi^(i-1)) - f_hat(phi^(i-1), phi^(i-1)); the latter is 0.
  next.last_surrogate_gap =
      std::abs(ssca_surrogate(next.phi, state.phi, next.grad_est, params.tau));
  return next;
}

SscaResult run_ssca(const RealizationStream& stream, const SscaParams& params,
                    const LinkBudget& budget, const RVector& init_phi) {
  params.validate();
  SscaState state = SscaState::initial(init_phi);
  SscaResult result;
  result.reason = StopReason::kMaxIterations;

  double rate_sum = 0.0;
  while (state.iter < params.max_iters) {
    std::optional<ChannelRealization> chan = stream();
    if (!chan) {
      result.reason = StopReason::kStreamExhausted;
      break;
    }
    rate_sum += instantaneous_rate(PhaseVector::from_angles(state.phi), *chan, budget);
    state = ssca_step(state, *chan, params, budget);
    result.trace.push_back({state.iter, state.last_surrogate_gap,
                            rate_sum / static_cast<double>(state.iter)});
    if (state.last_surrogate_gap < params.epsilon) {
      result.reason = StopReason::kConverged;
      break;
    }
  }
  result.iterations = state.iter;
  result.phi = state.phi;
  result.theta = PhaseVector::from_angles(state.phi);
  return result;
}

}  // namespace risopt
