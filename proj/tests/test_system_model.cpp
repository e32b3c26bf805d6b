#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "risopt/errors.hpp"
#include "risopt/system_model.hpp"

using namespace risopt;

TEST_SUITE("system_model") {

TEST_CASE("PhaseVector keeps theta and phi consistent") {
  oracle::Gen gen(1);
  const RVector phi = gen.angles(9);
  const PhaseVector p = PhaseVector::from_angles(phi);
  CHECK(p.max_modulus_error() < 1e-12);
  const PhaseVector q = PhaseVector::from_angles(p.phi());
  CHECK((p.theta() - q.theta()).norm() < 1e-12);

  CVector bad = CVector::Ones(3);
  bad[1] = 0.5;
  CHECK_THROWS_AS(PhaseVector::from_unit(bad), std::invalid_argument);
}

TEST_CASE("link budget folds power and noise") {
  const LinkBudget b = LinkBudget::from_dbm(10.0, -110.0);
  CHECK(b.snr_scale == doctest::Approx(1e12));
  CHECK(b.snr_scale > 0.0);
}

TEST_CASE("MRT on a single antenna is a normalized conjugate") {
  const Complex c(0.3, -1.2);
  CMatrix h(1, 1);
  h(0, 0) = c;
  const ChannelRealization chan = ChannelRealization::from_effective(h);
  const double power = 2.5;
  const CVector w = mrt_beamformer(PhaseVector::ones(1), chan, power);
  CHECK(std::abs(w[0] - std::sqrt(power) * std::conj(c) / std::abs(c)) < 1e-14);
}

TEST_CASE("MRT meets the power constraint and delivers P * gain") {
  oracle::Gen gen(2);
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix h = gen.matrix(4, 4);
    const PhaseVector theta = PhaseVector::from_unit(gen.unit(4));
    const double power = gen.uniform(0.1, 10.0);
    const ChannelRealization chan = ChannelRealization::from_effective(h);
    const CVector w = mrt_beamformer(theta, chan, power);
    CHECK(std::abs(w.squaredNorm() - power) <= 1e-10 * power);
    const Complex received = theta.theta().dot(h * w);  // theta^H H w
    CHECK(std::norm(received) ==
          doctest::Approx(power * oracle::gain_loops(theta.theta(), h)).epsilon(1e-10));
  }
}

TEST_CASE("MRT rejects a vanishing effective channel") {
  const ChannelRealization chan = ChannelRealization::from_effective(CMatrix::Zero(3, 2));
  CHECK_THROWS_AS(mrt_beamformer(PhaseVector::ones(3), chan, 1.0), DegenerateChannelError);
}

TEST_CASE("instantaneous rate") {
  const ChannelRealization zero = ChannelRealization::from_effective(CMatrix::Zero(2, 2));
  CHECK(instantaneous_rate(PhaseVector::ones(2), zero, LinkBudget{5.0}) == 0.0);

  CMatrix h(1, 1);
  h(0, 0) = std::polar(1.0, 0.7);
  const ChannelRealization unit = ChannelRealization::from_effective(h);
  CHECK(instantaneous_rate(PhaseVector::ones(1), unit, LinkBudget{1.0}) ==
        doctest::Approx(1.0).epsilon(1e-15));

  oracle::Gen gen(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int nk = gen.integer(1, 12);
    const int m = gen.integer(1, 4);
    const CMatrix hh = gen.matrix(nk, m);
    const CVector t = gen.unit(nk);
    const double s = gen.uniform(0.01, 100.0);
    const double expected = std::log2(1.0 + s * oracle::gain_loops(t, hh));
    const double got = instantaneous_rate(PhaseVector::from_unit(t),
                                          ChannelRealization::from_effective(hh), LinkBudget{s});
    CHECK(std::abs(got - expected) <= 1e-12 * expected);
  }
}

TEST_CASE("instantaneous snr") {
  const ChannelRealization zero = ChannelRealization::from_effective(CMatrix::Zero(3, 2));
  CHECK(instantaneous_snr(PhaseVector::ones(3), zero) == 0.0);

  oracle::Gen gen(4);
  CMatrix row = gen.matrix(1, 3);
  const ChannelRealization single = ChannelRealization::from_effective(row);
  for (double a : {0.0, 1.0, 2.5, -3.0}) {
    RVector phi(1);
    phi[0] = a;
    CHECK(instantaneous_snr(PhaseVector::from_angles(phi), single) ==
          doctest::Approx(row.squaredNorm()).epsilon(1e-12));
  }

  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix h = gen.matrix(gen.integer(1, 10), gen.integer(1, 4));
    const CVector t = gen.unit(static_cast<int>(h.rows()));
    const double snr = instantaneous_snr(PhaseVector::from_unit(t), ChannelRealization::from_effective(h));
    const double neg_quad = oracle::neg_quadratic_loops(t, h);
    CHECK(std::abs(snr + neg_quad) <= 1e-12 * std::max(1.0, snr));
  }
}

TEST_CASE("average metric") {
  oracle::Gen gen(5);
  const ChannelRealization c = ChannelRealization::from_effective(gen.matrix(4, 2));
  const PhaseVector t = PhaseVector::from_unit(gen.unit(4));
  const LinkBudget b{2.0};
  const std::vector<ChannelRealization> one{c};
  CHECK(average_metric(t, one, Metric::kRate, b) == instantaneous_rate(t, c, b));
  CHECK(average_metric(t, one, Metric::kSnr, b) == instantaneous_snr(t, c));

  const std::vector<ChannelRealization> many(7, c);
  CHECK(average_metric(t, many, Metric::kRate, b) ==
        doctest::Approx(instantaneous_rate(t, c, b)).epsilon(1e-14));

  CHECK_THROWS_AS(average_metric(t, std::vector<ChannelRealization>{}, Metric::kRate, b),
                  std::invalid_argument);
}

TEST_CASE("Monte-Carlo standard error shrinks as 1/sqrt(n)") {
  SystemConfig config;
  config.elements_per_ris = 4;
  const PhaseVector t = PhaseVector::ones(config.total_elements());
  const LinkBudget b = LinkBudget::from_config(config);
  RandomStream geometry(1);
  const Snapshot snap = sample_snapshot(config, geometry);

  auto spread = [&](int n) {
    std::vector<double> estimates;
    for (int seed = 0; seed < 200; ++seed) {
      RandomStream rng = derive_stream(1234, "se-test", seed, n);
      std::vector<ChannelRealization> reals;
      for (int i = 0; i < n; ++i) reals.push_back(sample_realization(snap, config, rng));
      estimates.push_back(average_metric(t, reals, Metric::kRate, b));
    }
    double mu = 0.0;
    for (double e : estimates) mu += e;
    mu /= estimates.size();
    double var = 0.0;
    for (double e : estimates) var += (e - mu) * (e - mu);
    return std::sqrt(var / (estimates.size() - 1));
  };
  const double ratio = spread(16) / spread(256);
  // sqrt(256 / 16) = 4
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.3);
}

TEST_CASE("rate is invariant to a global phase rotation") {
  oracle::Gen gen(6);
  for (int trial = 0; trial < 100; ++trial) {
    const int nk = gen.integer(1, 10);
    const ChannelRealization c = ChannelRealization::from_effective(gen.matrix(nk, 3));
    const RVector phi = gen.angles(nk);
    const double shift = gen.uniform(-10.0, 10.0);
    const LinkBudget b{gen.uniform(0.1, 50.0)};
    const double r0 = instantaneous_rate(PhaseVector::from_angles(phi), c, b);
    const double r1 = instantaneous_rate(
        PhaseVector::from_angles((phi.array() + shift).matrix()), c, b);
    CHECK(std::abs(r0 - r1) <= 1e-10 * std::max(r0, 1e-300));
  }
}

TEST_CASE("rate is nondecreasing in snr_scale") {
  oracle::Gen gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const ChannelRealization c = ChannelRealization::from_effective(gen.matrix(5, 2));
    const PhaseVector t = PhaseVector::from_unit(gen.unit(5));
    double prev = -1.0;
    for (double s = 1e-3; s < 1e6; s *= 3.7) {
      const double r = instantaneous_rate(t, c, LinkBudget{s});
      CHECK(r >= prev);
      prev = r;
    }
  }
}

TEST_CASE("snr is bounded by the squared sum of row norms") {
  oracle::Gen gen(8);
  for (int trial = 0; trial < 200; ++trial) {
    const CMatrix h = gen.matrix(gen.integer(1, 10), gen.integer(1, 4));
    const CVector t = gen.unit(static_cast<int>(h.rows()));
    double row_sum = 0.0;
    for (Eigen::Index n = 0; n < h.rows(); ++n) row_sum += h.row(n).norm();
    CHECK(instantaneous_snr(PhaseVector::from_unit(t), ChannelRealization::from_effective(h)) <=
          row_sum * row_sum * (1.0 + 1e-12));
  }
}

}  // TEST_SUITE
