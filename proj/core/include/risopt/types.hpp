#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace risopt {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Why an iterative optimizer stopped.
enum class StopReason {
  kConverged,        // stopping statistic fell below epsilon
  kMaxIterations,    // iteration cap reached
  kStreamExhausted,  // realization source ran dry (truncation, not failure)
};

constexpr std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kConverged: return "converged";
    case StopReason::kMaxIterations: return "max_iterations";
    case StopReason::kStreamExhausted: return "stream_exhausted";
  }
  return "unknown";
}

}  // namespace risopt
