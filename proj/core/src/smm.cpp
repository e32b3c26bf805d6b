#include "risopt/smm.hpp"

#include <algorithm>
#include <cmath>

#include "risopt/errors.hpp"

namespace risopt {

void SmmParams::validate() const {
  if (!(tau > 0.0)) throw ConfigError("smm.tau must be > 0");
  if (!(epsilon > 0.0)) throw ConfigError("smm.epsilon must be > 0");
  if (max_iters < 0) throw ConfigError("smm.max_iters must be >= 0");
}

SmmState SmmState::initial(const PhaseVector& init_theta) {
  const Eigen::Index nk = init_theta.size();
  SmmState s;
  s.theta = init_theta;
  s.b_tilde = CMatrix::Zero(nk, nk);
  s.d = CVector::Zero(nk);
  s.theta_ddot = CVector::Zero(nk);
  return s;
}

CMatrix build_B(const ChannelRealization& chan) {
  CMatrix b(chan.total_elements(), chan.total_elements());
  b.setZero();
  b.selfadjointView<Eigen::Lower>().rankUpdate(chan.h_stack, -1.0);
  b.triangularView<Eigen::StrictlyUpper>() = b.adjoint();
  return b;
}

double quadratic_objective(const CVector& theta, const CMatrix& b) {
  return theta.dot(b * theta).real();
}

double mm_surrogate(const CVector& theta, const CVector& theta_prev, const CMatrix& b,
                    double tau) {
  const CVector b_prev = b * theta_prev;
  // theta'^H B theta = (B theta')^H theta for Hermitian B
  return -theta_prev.dot(b_prev).real() + 2.0 * b_prev.dot(theta).real() +
         tau * (theta - theta_prev).squaredNorm();
}

double averaged_surrogate(const SmmState& state, const CVector& theta, double tau) {
  return state.surrogate_offset + 2.0 * state.d.dot(theta).real() +
         tau * (theta.squaredNorm() - 2.0 * state.theta_ddot.dot(theta).real());
}

SmmState update_saa(const SmmState& state, const CMatrix& b_t, double tau) {
  const Eigen::Index nk = state.theta.size();
  if (b_t.rows() != nk || b_t.cols() != nk) {
    throw DimensionError("update_saa: B has wrong shape");
  }
  SmmState next = state;
  next.t = state.t + 1;
  const double w = 1.0 / static_cast<double>(next.t);
  const CVector& prev = state.theta.theta();
  const CVector b_prev = b_t * prev;
  const double offset_sample = -prev.dot(b_prev).real() + tau * prev.squaredNorm();

  if (next.t == 1) {
    next.b_tilde = b_t;
    next.d = b_prev;
    next.theta_ddot = prev;
    next.surrogate_offset = offset_sample;
  } else {
    next.b_tilde = (1.0 - w) * state.b_tilde + w * b_t;
    next.d = (1.0 - w) * state.d + w * b_prev;
    next.theta_ddot = (1.0 - w) * state.theta_ddot + w * prev;
    next.surrogate_offset = (1.0 - w) * state.surrogate_offset + w * offset_sample;
  }
  return next;
}

PhaseUpdate smm_phase_update(const CVector& v, const CVector& theta_ddot, double tau,
                             const std::optional<CVector>& previous) {
  if (theta_ddot.size() != v.size() || (previous && previous->size() != v.size())) {
    throw DimensionError("smm_phase_update: vector lengths differ");
  }
  PhaseUpdate out;
  CVector theta(v.size());
  for (Eigen::Index n = 0; n < v.size(); ++n) {
    const Complex direction = v[n] + tau * theta_ddot[n];
    const double mag = std::abs(direction);
    if (mag == 0.0) {
      theta[n] = previous ? (*previous)[n] : Complex(1.0, 0.0);
      ++out.stalled_elements;
    } else {
      theta[n] = direction / mag;
    }
  }
  // Re-normalize so the stored vector is unit modulus to the last ulp.
  for (Eigen::Index n = 0; n < theta.size(); ++n) theta[n] = std::polar(1.0, std::arg(theta[n]));
  out.theta = PhaseVector::from_unit(theta);
  return out;
}

double gain_scale(const CMatrix& b) {
  const double scale = -b.diagonal().real().mean();
  return scale > 0.0 ? scale : 1.0;
}

SmmState smm_step(const SmmState& state, const ChannelRealization& chan, const SmmParams& params) {
  const CMatrix b = build_B(chan);
  const double scale = state.t == 0 ? gain_scale(b) : state.gain_scale;
  const double tau = params.tau * scale;
  SmmState next = update_saa(state, b, tau);
  next.gain_scale = scale;

  // With d_t the running mean of B_i theta^(i-1), the averaged surrogate is
  // 2 Re{d^H theta} + tau |theta - theta_ddot|^2 + const, so each element
  // aligns with tau * theta_ddot - d.
  PhaseUpdate update = smm_phase_update(-next.d, next.theta_ddot, tau, state.theta.theta());
  const CVector& before = state.theta.theta();
  const CVector& after = update.theta.theta();

  next.last_surrogate_change =
      averaged_surrogate(next, after, tau) - averaged_surrogate(next, before, tau);
  next.previous_objective = quadratic_objective(before, next.b_tilde);
  next.last_objective = quadratic_objective(after, next.b_tilde);
  next.stalled_elements = update.stalled_elements;
  next.theta = std::move(update.theta);
  return next;
}

SmmResult run_smm(const RealizationStream& stream, const SmmParams& params,
                  const PhaseVector& init_theta) {
  params.validate();
  SmmState state = SmmState::initial(init_theta);
  SmmResult result;
  result.reason = StopReason::kMaxIterations;
  result.max_modulus_error = init_theta.max_modulus_error();

  double snr_sum = 0.0;
  while (state.t < params.max_iters) {
    std::optional<ChannelRealization> chan = stream();
    if (!chan) {
      result.reason = StopReason::kStreamExhausted;
      break;
    }
    snr_sum += instantaneous_snr(state.theta, *chan);
    const CVector previous_theta = state.theta.theta();
    state = smm_step(state, *chan, params);

    result.max_surrogate_increase =
        std::max(result.max_surrogate_increase, state.last_surrogate_change);
    const double reference =
        std::abs(averaged_surrogate(state, previous_theta, params.tau * state.gain_scale));
    if (reference > 0.0) {
      result.max_relative_surrogate_increase = std::max(
          result.max_relative_surrogate_increase, state.last_surrogate_change / reference);
    }
    result.max_modulus_error = std::max(result.max_modulus_error, state.theta.max_modulus_error());
    result.trace.push_back({state.t, state.last_objective,
                            snr_sum / static_cast<double>(state.t),
                            state.last_surrogate_change});

    const double change = std::abs(state.last_objective - state.previous_objective);
    if (change < params.epsilon * state.gain_scale) {
      result.reason = StopReason::kConverged;
      break;
    }
  }
  result.iterations = state.t;
  result.theta = state.theta;
  return result;
}

}  // namespace risopt
