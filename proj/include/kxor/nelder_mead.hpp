#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kxor {

struct NelderMeadOptions {
  double initial_step = 0.1;
  /// Converged when the objective spread across the simplex drops below this...
  double f_tolerance = 1e-6;
  /// ...and the simplex fits in a box of this half-width.
  double x_tolerance = 1e-5;
  std::size_t max_evaluations = 5000;
  /// Converged runs are restarted around the best vertex until a restart gains
  /// less than f_tolerance; guards against simplex collapse.
  int max_restarts = 3;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Minimizes `objective` starting from `start`. The returned point is never worse
/// than `start`.
NelderMeadResult nelder_mead_minimize(const std::function<double(std::span<const double>)>& objective,
                                      std::span<const double> start, const NelderMeadOptions& options = {});

}  // namespace kxor
