#ifndef GSQ_JACOBIAN_CHECK_H_
#define GSQ_JACOBIAN_CHECK_H_

#include <cstdint>
#include <string>

namespace gsq {

struct JacobianCheckReport {
  int samples = 0;
  double tolerance = 0.0;
  double step = 0.0;
  double max_relative_error = 0.0;
  double max_epsilon = 0.0;
  int worst_sample = -1;
  bool passed = false;
};

inline constexpr double kJacobianTolerance = 1e-6;
inline constexpr double kFiniteDiffStep = 1e-5;

// Compares JacobianExact against central differences on `samples` seeded
// random configurations with epsilon < 0.5. Each row's error is measured
// relative to max(|row|, natural row scale): f*rho/|P| for the angular rows
// and f*|p0|/|P|^2 for the radial row.
JacobianCheckReport CheckJacobians(int samples, std::uint64_t seed,
                                   double tolerance = kJacobianTolerance,
                                   double step = kFiniteDiffStep);

std::string FormatJacobianReport(const JacobianCheckReport& report);

}  // namespace gsq

#endif  // GSQ_JACOBIAN_CHECK_H_
