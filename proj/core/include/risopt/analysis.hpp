#pragma once

#include <optional>
#include <span>
#include <vector>

#include "risopt/experiment.hpp"

namespace risopt {

double mean(std::span<const double> values);
// Standard error of the mean (sample standard deviation / sqrt(n)); zero
// for fewer than two values.
double standard_error(std::span<const double> values);

// Mean rate of one scheme at each sweep point, in sweep order.
std::vector<double> mean_curve(const ExperimentResult& result, Scheme scheme);
std::vector<double> error_curve(const ExperimentResult& result, Scheme scheme);

// Smallest x on the piecewise-linear curve (xs, ys) at which ys reaches
// target. std::nullopt when the curve never reaches it. xs ascending.
std::optional<double> crossing_point(std::span<const double> xs, std::span<const double> ys,
                                     double target);

struct PowerGain {
  // Power saved (dB) to match the reference rate; a lower bound when
  // `saturated` is set (the scheme exceeds the target at every sweep point).
  double gain_db = 0.0;
  bool saturated = false;
  bool reachable = true;
};

// Rate of `reference` at `reference_power_dbm` is the target; returns how
// much less power `scheme` needs to reach it. Requires a power sweep.
PowerGain power_gain(const ExperimentResult& result, Scheme scheme, Scheme reference,
                     double reference_power_dbm);

// Fraction of (snapshot, sweep point) pairs where the two schemes' rates
// agree within rel_tol relative to the larger one.
double parity_fraction(const ExperimentResult& result, Scheme a, Scheme b, double rel_tol);

struct TrendCheck {
  int inversions = 0;          // adjacent increases
  bool inversions_ok = false;  // at most one, and it is within one standard error
  double end_margin_sigmas = 0.0;  // (first - last) / combined standard error
};

// Checks that the curve is nonincreasing along the sweep.
TrendCheck nonincreasing_trend(std::span<const double> means, std::span<const double> errors);

}  // namespace risopt
