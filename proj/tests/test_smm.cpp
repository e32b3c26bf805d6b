#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "oracles.hpp"
#include "risopt/smm.hpp"

using namespace risopt;

namespace {

double max_eigenvalue(const CMatrix& m) {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(m, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

// A random point strictly inside the unit disk in every coordinate.
CVector disk_point(oracle::Gen& gen, int n) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = std::polar(std::sqrt(gen.uniform(0.0, 1.0)), gen.uniform(0.0, 2.0 * oracle::kPi));
  return v;
}

}  // namespace

TEST_SUITE("smm") {

TEST_CASE("build_B") {
  CHECK(build_B(ChannelRealization::from_effective(CMatrix::Zero(3, 2))).norm() == 0.0);

  oracle::Gen gen(31);
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix h = gen.matrix(gen.integer(1, 8), gen.integer(1, 4));
    const CMatrix b = build_B(ChannelRealization::from_effective(h));
    CHECK((b - b.adjoint()).norm() == 0.0);
    CHECK(max_eigenvalue(b) <= 1e-12 * b.norm());
    const CVector theta = gen.unit(static_cast<int>(h.rows()));
    CHECK(quadratic_objective(theta, b) ==
          doctest::Approx(oracle::neg_quadratic_loops(theta, h)).epsilon(1e-12));
  }
}

TEST_CASE("update_saa at t = 1 takes the single sample") {
  oracle::Gen gen(32);
  const CMatrix b = build_B(ChannelRealization::from_effective(gen.matrix(4, 2)));
  const PhaseVector theta0 = PhaseVector::from_unit(gen.unit(4));
  const SmmState s = update_saa(SmmState::initial(theta0), b, 0.5);
  CHECK(s.t == 1);
  CHECK((s.b_tilde - b).norm() == 0.0);
  CHECK((s.d - b * theta0.theta()).norm() == 0.0);
  CHECK((s.theta_ddot - theta0.theta()).norm() == 0.0);
  CHECK((s.theta.theta() - theta0.theta()).norm() == 0.0);
  CHECK_THROWS_AS(update_saa(SmmState::initial(theta0), CMatrix::Zero(3, 3), 0.5), std::invalid_argument);
}

TEST_CASE("update_saa with a constant sample keeps the mean fixed") {
  oracle::Gen gen(33);
  const CMatrix b = build_B(ChannelRealization::from_effective(gen.matrix(3, 2)));
  SmmState s = SmmState::initial(PhaseVector::from_unit(gen.unit(3)));
  for (int i = 0; i < 200; ++i) s = update_saa(s, b, 0.1);
  CHECK((s.b_tilde - b).norm() < 1e-12 * b.norm());
  CHECK((s.theta_ddot - s.theta.theta()).norm() < 1e-12);
}

TEST_CASE("running means match explicit sums") {
  oracle::Gen gen(34);
  const int nk = 5;
  std::vector<ChannelRealization> samples;
  for (int i = 0; i < 300; ++i) samples.push_back(ChannelRealization::from_effective(gen.matrix(nk, 3)));

  SmmState s = SmmState::initial(PhaseVector::from_unit(gen.unit(nk)));
  oracle::SaaAccumulator acc(nk);
  const SmmParams params;
  for (const auto& c : samples) {
    const CVector before = s.theta.theta();
    CMatrix b = CMatrix::Zero(nk, nk);
    for (int i = 0; i < nk; ++i)
      for (int j = 0; j < nk; ++j)
        for (int m = 0; m < c.h_stack.cols(); ++m) b(i, j) -= c.h_stack(i, m) * std::conj(c.h_stack(j, m));
    acc.add(b, before);
    s = smm_step(s, c, params);
    CHECK((s.b_tilde - acc.b_mean()).norm() < 1e-10 * acc.b_mean().norm());
    CHECK((s.d - acc.d_mean()).norm() < 1e-10 * acc.d_mean().norm());
    CHECK((s.theta_ddot - acc.theta_mean()).norm() < 1e-10 * std::max(1.0, acc.theta_mean().norm()));
  }
}

TEST_CASE("smm_phase_update closed form") {
  CVector zero = CVector::Zero(2);
  CVector ref(2);
  ref << std::polar(1.0, 0.7), std::polar(1.0, -2.0);
  const PhaseUpdate a = smm_phase_update(zero, ref, 1.0);
  CHECK((a.theta.theta() - ref).norm() < 1e-15);
  CHECK(a.stalled_elements == 0);

  CVector v(2);
  v << Complex(3.0, 4.0), Complex(0.0, -2.0);
  const PhaseUpdate b = smm_phase_update(v, zero, 1.0);
  CHECK(std::abs(b.theta.theta()[0] - Complex(0.6, 0.8)) < 1e-15);
  CHECK(std::abs(b.theta.theta()[1] - Complex(0.0, -1.0)) < 1e-15);

  CHECK_THROWS_AS(smm_phase_update(v, CVector::Zero(3), 1.0), std::invalid_argument);
}

TEST_CASE("smm_phase_update matches a fine phase grid") {
  oracle::Gen gen(35);
  for (int trial = 0; trial < 200; ++trial) {
    const Complex v = gen.cn() * gen.uniform(0.0, 3.0);
    const Complex ref = std::polar(gen.uniform(0.0, 1.0), gen.uniform(0.0, 2.0 * oracle::kPi));
    const double tau = gen.uniform(0.0, 3.0);
    auto cost = [&](Complex th) { return -2.0 * std::real(std::conj(v) * th) + tau * std::norm(th - ref); };
    CVector vv(1), rr(1);
    vv[0] = v;
    rr[0] = ref;
    const Complex got = smm_phase_update(vv, rr, tau).theta.theta()[0];
    CHECK(cost(got) <= oracle::grid_min_phase(cost, 3600) + 1e-12);
  }
}

TEST_CASE("smm_phase_update keeps stalled elements") {
  CVector ref(2), v(2), prev(2);
  ref << Complex(1.0, 0.0), Complex(0.0, 1.0);
  v << Complex(-2.0, 0.0), Complex(1.0, 0.0);
  prev << std::polar(1.0, 0.3), std::polar(1.0, 1.1);
  const PhaseUpdate u = smm_phase_update(v, ref, 2.0, prev);
  CHECK(u.stalled_elements == 1);
  CHECK(std::abs(u.theta.theta()[0] - prev[0]) < 1e-15);

  const PhaseUpdate w = smm_phase_update(v, ref, 2.0);
  CHECK(std::abs(w.theta.theta()[0] - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("single-element channel is already optimal") {
  oracle::Gen gen(36);
  const ChannelRealization c = ChannelRealization::from_effective(gen.matrix(1, 3));
  const PhaseVector init = PhaseVector::from_unit(gen.unit(1));
  const SmmResult r = run_smm(make_repeating_stream(c), SmmParams{}, init);
  CHECK(r.reason == StopReason::kConverged);
  CHECK(r.iterations == 1);
  CHECK(std::abs(r.theta.theta()[0] - init.theta()[0]) < 1e-14);
}

TEST_CASE("fixed channel reaches the grid optimum") {
  oracle::Gen gen(37);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix h = gen.matrix(3, 2);
    SmmParams params;
    params.epsilon = 1e-12;
    params.max_iters = 20000;
    const SmmResult r = run_smm(make_repeating_stream(ChannelRealization::from_effective(h)), params,
                                PhaseVector::from_unit(gen.unit(3)));
    CHECK(oracle::gain_loops(r.theta.theta(), h) >= 0.99 * oracle::grid_max_gain(h, 64));
  }
}

TEST_CASE("run_smm bookkeeping") {
  SystemConfig config;
  RandomStream g(5);
  const Snapshot snap = sample_snapshot(config, g);
  const PhaseVector init = PhaseVector::ones(config.total_elements());

  SUBCASE("zero iterations") {
    SmmParams params;
    params.max_iters = 0;
    const SmmResult r = run_smm(make_channel_stream(snap, config, RandomStream(1)), params, init);
    CHECK(r.iterations == 0);
    CHECK(r.trace.empty());
    CHECK((r.theta.theta() - init.theta()).norm() == 0.0);
  }

  SUBCASE("deterministic for a fixed stream seed") {
    SmmParams params;
    params.max_iters = 200;
    params.epsilon = 1e-12;
    const SmmResult a = run_smm(make_channel_stream(snap, config, RandomStream(8)), params, init);
    const SmmResult b = run_smm(make_channel_stream(snap, config, RandomStream(8)), params, init);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].g_tilde == b.trace[i].g_tilde);
    CHECK(a.theta.theta() == b.theta.theta());
  }

  SUBCASE("stream exhaustion") {
    ChannelRealization c = sample_realization(snap, config, g);
    SmmParams params;
    params.epsilon = 1e-300;
    const SmmResult r = run_smm(make_sequence_stream({c, c}), params, init);
    CHECK(r.reason == StopReason::kStreamExhausted);
    CHECK(r.iterations == 2);
  }

  SUBCASE("invalid parameters") {
    SmmParams params;
    params.tau = 0.0;
    CHECK_THROWS(run_smm(make_repeating_stream(sample_realization(snap, config, g)), params, init));
  }
}

TEST_CASE("stop statistic compares both iterates under the current average") {
  SystemConfig config;
  RandomStream g(6);
  const Snapshot snap = sample_snapshot(config, g);
  RandomStream samples(7);
  SmmState s = SmmState::initial(PhaseVector::ones(config.total_elements()));
  for (int i = 0; i < 50; ++i) {
    const CVector before = s.theta.theta();
    s = smm_step(s, sample_realization(snap, config, samples), SmmParams{});
    CHECK(s.previous_objective == doctest::Approx(quadratic_objective(before, s.b_tilde)).epsilon(1e-12));
    CHECK(s.last_objective == doctest::Approx(quadratic_objective(s.theta.theta(), s.b_tilde)).epsilon(1e-12));
  }
}

TEST_CASE("linearized surrogate majorizes and touches the sample objective") {
  oracle::Gen gen(38);
  for (int trial = 0; trial < 1000; ++trial) {
    const int nk = gen.integer(1, 8);
    const CMatrix h = gen.matrix(nk, gen.integer(1, 4));
    const CMatrix b = build_B(ChannelRealization::from_effective(h));
    const double tau = gen.uniform(0.0, 2.0);
    const CVector prev = gen.unit(nk);
    const CVector theta = disk_point(gen, nk);
    const double scale = 1.0 + b.norm();

    CHECK(mm_surrogate(prev, prev, b, tau) ==
          doctest::Approx(quadratic_objective(prev, b)).epsilon(1e-12).scale(scale));
    CHECK(mm_surrogate(theta, prev, b, tau) >= quadratic_objective(theta, b) - 1e-12 * scale);

    const CVector g_sur = oracle::complex_fd_gradient(
        [&](const CVector& t) { return mm_surrogate(t, prev, b, tau); }, prev, 1e-6);
    const CVector g_obj = oracle::complex_fd_gradient(
        [&](const CVector& t) { return quadratic_objective(t, b); }, prev, 1e-6);
    CHECK((g_sur - g_obj).norm() < 1e-5 * scale);
  }
}

TEST_CASE("disk relaxation optimum lies on the unit circle") {
  oracle::Gen gen(39);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix h = gen.matrix(2, 2);
    const CMatrix b = build_B(ChannelRealization::from_effective(h));
    const double circle_min = -oracle::grid_max_gain(h, 360);
    for (int k = 0; k < 2000; ++k) {
      CHECK(quadratic_objective(disk_point(gen, 2), b) >= circle_min - 1e-9);
    }
    SmmParams params;
    params.epsilon = 1e-13;
    params.max_iters = 5000;
    const SmmResult r = run_smm(make_repeating_stream(ChannelRealization::from_effective(h)), params,
                                PhaseVector::ones(2));
    const CVector opt = r.theta.theta();
    CHECK(quadratic_objective(0.99 * opt, b) > quadratic_objective(opt, b));
  }
}

TEST_CASE("each step descends the averaged surrogate and keeps the average NSD") {
  SystemConfig config;
  config.elements_per_ris = 4;
  RandomStream g(9);
  const Snapshot snap = sample_snapshot(config, g);
  RandomStream samples(10);
  SmmState s = SmmState::initial(PhaseVector::ones(config.total_elements()));
  for (int i = 0; i < 300; ++i) {
    const CVector before = s.theta.theta();
    s = smm_step(s, sample_realization(snap, config, samples), SmmParams{});
    const double tau = SmmParams{}.tau * s.gain_scale;
    const double at_before = averaged_surrogate(s, before, tau);
    CHECK(s.last_surrogate_change <= 1e-12 * std::abs(at_before));
    CHECK(max_eigenvalue(s.b_tilde) <= 1e-12 * s.b_tilde.norm());
    CHECK(s.theta.max_modulus_error() <= 1e-12);
  }
}

}  // TEST_SUITE
