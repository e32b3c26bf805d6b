#include "risopt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace risopt {

namespace {

// Summation in sorted order makes the result independent of input order.
double ordered_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

}  // namespace

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return ordered_sum({values.begin(), values.end()}) / static_cast<double>(values.size());
}

double standard_error(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double mu = mean(values);
  std::vector<double> sq;
  sq.reserve(n);
  for (double v : values) sq.push_back((v - mu) * (v - mu));
  const double variance = ordered_sum(std::move(sq)) / static_cast<double>(n - 1);
  return std::sqrt(variance / static_cast<double>(n));
}

std::vector<double> mean_curve(const ExperimentResult& result, Scheme scheme) {
  std::vector<double> out;
  for (std::size_t p = 0; p < result.spec.sweep.values.size(); ++p) {
    const SchemeRecord* r = result.find(scheme, p);
    if (!r) throw std::invalid_argument("mean_curve: scheme not in result");
    out.push_back(r->mean_rate);
  }
  return out;
}

std::vector<double> error_curve(const ExperimentResult& result, Scheme scheme) {
  std::vector<double> out;
  for (std::size_t p = 0; p < result.spec.sweep.values.size(); ++p) {
    const SchemeRecord* r = result.find(scheme, p);
    if (!r) throw std::invalid_argument("error_curve: scheme not in result");
    out.push_back(r->std_error);
  }
  return out;
}

std::optional<double> crossing_point(std::span<const double> xs, std::span<const double> ys,
                                     double target) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw std::invalid_argument("crossing_point: xs and ys must be nonempty and equal length");
  }
  if (ys[0] >= target) return xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (ys[i] >= target) {
      const double frac = (target - ys[i - 1]) / (ys[i] - ys[i - 1]);
      return xs[i - 1] + frac * (xs[i] - xs[i - 1]);
    }
  }
  return std::nullopt;
}

PowerGain power_gain(const ExperimentResult& result, Scheme scheme, Scheme reference,
                     double reference_power_dbm) {
  const Sweep& sweep = result.spec.sweep;
  if (sweep.mode != SweepMode::kTxPower) {
    throw std::invalid_argument("power_gain: requires a transmit power sweep");
  }
  const auto it = std::find(sweep.values.begin(), sweep.values.end(), reference_power_dbm);
  if (it == sweep.values.end()) {
    throw std::invalid_argument("power_gain: reference power is not a sweep point");
  }
  const std::size_t ref_point = static_cast<std::size_t>(it - sweep.values.begin());
  const double target = result.find(reference, ref_point)->mean_rate;
  const std::vector<double> curve = mean_curve(result, scheme);

  PowerGain gain;
  const std::optional<double> needed = crossing_point(sweep.values, curve, target);
  if (!needed) {
    gain.reachable = false;
    gain.gain_db = reference_power_dbm - sweep.values.back();
    return gain;
  }
  gain.saturated = curve.front() >= target;
  gain.gain_db = reference_power_dbm - *needed;
  return gain;
}

double parity_fraction(const ExperimentResult& result, Scheme a, Scheme b, double rel_tol) {
  std::size_t agree = 0;
  std::size_t total = 0;
  for (std::size_t p = 0; p < result.spec.sweep.values.size(); ++p) {
    const SchemeRecord* ra = result.find(a, p);
    const SchemeRecord* rb = result.find(b, p);
    if (!ra || !rb) throw std::invalid_argument("parity_fraction: scheme not in result");
    for (std::size_t s = 0; s < ra->per_snapshot_rates.size(); ++s) {
      const double x = ra->per_snapshot_rates[s];
      const double y = rb->per_snapshot_rates[s];
      const double scale = std::max(std::abs(x), std::abs(y));
      if (std::abs(x - y) <= rel_tol * scale) ++agree;
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(total);
}

TrendCheck nonincreasing_trend(std::span<const double> means, std::span<const double> errors) {
  if (means.size() != errors.size() || means.size() < 2) {
    throw std::invalid_argument("nonincreasing_trend: need at least two points with errors");
  }
  TrendCheck check;
  bool within_error = true;
  for (std::size_t i = 1; i < means.size(); ++i) {
    const double rise = means[i] - means[i - 1];
    if (rise > 0.0) {
      ++check.inversions;
      const double se = std::hypot(errors[i], errors[i - 1]);
      if (rise > se) within_error = false;
    }
  }
  check.inversions_ok = check.inversions == 0 || (check.inversions == 1 && within_error);
  const double se_ends = std::hypot(errors.front(), errors.back());
  const double drop = means.front() - means.back();
  check.end_margin_sigmas = se_ends > 0.0 ? drop / se_ends : (drop > 0.0 ? INFINITY : 0.0);
  return check;
}

}  // namespace risopt
