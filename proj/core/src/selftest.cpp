#include "risopt/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "risopt/channel_model.hpp"
#include "risopt/rng.hpp"
#include "risopt/smm.hpp"
#include "risopt/ssca.hpp"
#include "risopt/system_model.hpp"

namespace risopt {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

CMatrix random_channel(RandomStream& rng, int rows, int cols) {
  CMatrix h(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) h(r, c) = rng.complex_normal(1.0);
  return h;
}

CVector random_unit(RandomStream& rng, int n) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = std::polar(1.0, rng.angle());
  return v;
}

}  // namespace

std::vector<SelftestCheck> run_selftest(std::uint64_t seed) {
  std::vector<SelftestCheck> checks;
  RandomStream rng = derive_stream(seed, "selftest");

  {
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 1 + trial % 16;
      const CVector a = ula_steering(n, rng.angle());
      for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(std::abs(a[i]) - 1.0));
      worst = std::max(worst, std::abs(a.squaredNorm() - n) / n);
    }
    checks.push_back({"steering vectors are unit modulus", worst < 1e-12, "max error " + fmt(worst)});
  }

  SystemConfig config;
  config.elements_per_ris = 6;
  config.ris_count = 3;
  {
    double worst_norm = 0.0;
    double worst_stack = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Snapshot snap = sample_snapshot(config, rng);
      for (int k = 0; k < config.ris_count; ++k) {
        worst_norm = std::max(worst_norm, std::abs(snap.path_gain_vars.row(k).sum() - 1.0));
      }
      const ChannelRealization chan = sample_realization(snap, config, rng);
      const int n = config.elements_per_ris;
      for (int k = 0; k < config.ris_count; ++k) {
        CMatrix block = chan.per_ris_g[k];
        for (int r = 0; r < n; ++r) block.row(r) *= std::conj(chan.per_ris_h[k][r]);
        const double ref = std::max(block.norm(), 1e-300);
        worst_stack =
            std::max(worst_stack, (chan.h_stack.middleRows(k * n, n) - block).norm() / ref);
      }
    }
    checks.push_back({"path gain variances sum to one", worst_norm < 1e-12,
                      "max error " + fmt(worst_norm)});
    checks.push_back({"stacked channel identity", worst_stack < 1e-12,
                      "max relative error " + fmt(worst_stack)});
  }

  {
    double worst = 0.0;
    const LinkBudget budget{3.0};
    for (int trial = 0; trial < 30; ++trial) {
      const int nk = 2 + trial % 6;
      const ChannelRealization chan = ChannelRealization::from_effective(
          random_channel(rng, nk, 1 + trial % 4));
      RVector phi(nk);
      for (int i = 0; i < nk; ++i) phi[i] = rng.angle();
      const RVector g = grad_rate_phi(phi, chan, budget);
      auto rate = [&](const RVector& p) {
        return std::log(1.0 + budget.snr_scale *
                                  effective_gain(PhaseVector::from_angles(p).theta(), chan.h_stack));
      };
      for (int i = 0; i < nk; ++i) {
        RVector up = phi;
        RVector down = phi;
        up[i] += 1e-6;
        down[i] -= 1e-6;
        const double fd = (rate(up) - rate(down)) / 2e-6;
        worst = std::max(worst, std::abs(fd - g[i]) / std::max(g.norm(), 1e-12));
      }
    }
    checks.push_back({"phase gradient matches finite differences", worst < 1e-5,
                      "max relative error " + fmt(worst)});
  }

  {
    double worst_touch = 0.0;
    double worst_bound = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const int nk = 1 + trial % 8;
      const CMatrix b = build_B(ChannelRealization::from_effective(random_channel(rng, nk, 3)));
      const CVector x = random_unit(rng, nk);
      const CVector y = random_unit(rng, nk);
      worst_touch = std::max(worst_touch, std::abs(mm_surrogate(x, x, b, 1e-3) -
                                                   quadratic_objective(x, b)));
      worst_bound = std::max(worst_bound, quadratic_objective(x, b) - mm_surrogate(x, y, b, 1e-3));
    }
    checks.push_back({"surrogate touches objective", worst_touch < 1e-9, "max gap " + fmt(worst_touch)});
    checks.push_back({"surrogate upper-bounds objective", worst_bound <= 1e-9,
                      "max violation " + fmt(worst_bound)});
  }

  {
    const Snapshot snap = sample_snapshot(config, rng);
    SmmParams params;
    params.max_iters = 300;
    params.epsilon = 1e-12;
    const SmmResult r = run_smm(make_channel_stream(snap, config, derive_stream(seed, "selftest-smm")),
                                params, PhaseVector::ones(config.total_elements()));
    checks.push_back({"smm surrogate descends every step", r.max_relative_surrogate_increase <= 1e-9,
                      "max relative increase " + fmt(r.max_relative_surrogate_increase)});
    checks.push_back({"smm iterates are unit modulus", r.max_modulus_error <= 1e-12,
                      "max error " + fmt(r.max_modulus_error)});
  }

  {
    const RVector phi = RVector::LinSpaced(5, 0.1, 1.3);
    RVector f(5);
    for (int i = 0; i < 5; ++i) f[i] = rng.normal();
    const double tau = 0.7;
    const RVector opt = surrogate_minimizer(phi, f, tau);
    const double stationarity = (f + tau * (opt - phi)).norm();
    checks.push_back({"ssca surrogate minimizer is stationary", stationarity < 1e-12,
                      "gradient norm " + fmt(stationarity)});
  }

  return checks;
}

}  // namespace risopt
