#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kxor/qaoa.hpp"

namespace kxor {

struct OptimizerConfig {
  int n_random_starts = 1000;
  /// Depths up to this use random multistart; deeper layers are warm-started.
  int shallow_depth_cutoff = 3;
  double local_tolerance = 1e-6;
  /// Looser tolerance for the individual random starts; the best start is then
  /// polished at local_tolerance. Equal values disable screening.
  double screening_tolerance = 1e-4;
  std::size_t max_evaluations = 5000;
  /// Simplex rebuilds around the incumbent after convergence (screening runs use none).
  int simplex_restarts = 3;
  /// Initial simplex edge in radians.
  double initial_step = 0.1;
  double gamma_range = 2.0 * 3.14159265358979323846;
  double beta_range = 3.14159265358979323846;
  /// Workers for independent restarts (0 = hardware).
  int threads = 1;
};

/// Throws Error("invalid_config") on non-positive counts or tolerances.
void validate(const OptimizerConfig& config);

struct OptResult {
  AngleSchedule schedule;
  double f_value = 0.0;
  double ratio = 0.0;
  std::size_t n_evaluations = 0;
  int n_restarts_used = 0;
  bool converged = false;
};

/// Derivative-free local maximization of F_p starting at `init`. The result is
/// never below F_p(init). Throws Error("degenerate_spectrum") when the diagonal is
/// constant, since no approximation ratio exists.
OptResult local_optimize(const CostDiagonal& diag, const AngleSchedule& init, const OptimizerConfig& config);

/// Best of config.n_random_starts local runs from uniform random angles, each run
/// at screening_tolerance, followed by a polish of the winner at local_tolerance.
/// Start i draws from a stream keyed by (seed, i), so the result does not depend
/// on the thread count and the first m starts are shared by any larger budget.
OptResult multistart_optimize(const CostDiagonal& diag, std::size_t p, const OptimizerConfig& config,
                              std::uint64_t seed);

/// Linear-interpolation warm start: depth p -> p+1 with zero boundary values.
AngleSchedule interp_extend(const AngleSchedule& schedule);

/// Appends a layer with zero angles; leaves the prepared state unchanged.
AngleSchedule zero_padded(const AngleSchedule& schedule);

/// Maps angles onto gamma in (-pi, pi], beta in (-pi/2, pi/2] and applies the
/// conjugation symmetry (gamma, beta) -> (-gamma, -beta) so the first nonzero
/// gamma is positive. F_p is unchanged.
///
/// With a flip symmetry beta is folded further into (-pi/4, pi/4]. Shifting
/// beta_j by pi/2 applies X on every qubit after layer j; moving it back onto
/// |+> negates gamma_1..gamma_j when the flip mirrors the cost.
AngleSchedule canonical_angles(const AngleSchedule& schedule, FlipSymmetry flip = FlipSymmetry::none);

/// Results for p = 1..p_max (element p-1 is depth p). F_p is non-decreasing in p.
std::vector<OptResult> optimize_depth_ladder(const CostDiagonal& diag, std::size_t p_max,
                                             const OptimizerConfig& config, std::uint64_t seed);

/// Approximation ratio of a fixed schedule on `instance`, without optimization.
double transfer_evaluate(const AngleSchedule& schedule, const Instance& instance);
double transfer_evaluate(const AngleSchedule& schedule, const CostDiagonal& diag);

struct AngleStatistics {
  std::vector<double> mean_gamma;
  std::vector<double> mean_beta;
  std::vector<double> std_gamma;
  std::vector<double> std_beta;

  AngleSchedule mean_schedule() const { return {mean_gamma, mean_beta}; }
};

/// Per-layer mean and sample standard deviation (zero for a single result).
/// All results must share one depth; throws Error("invalid_argument") otherwise.
AngleStatistics average_angles(const std::vector<OptResult>& results);

}  // namespace kxor
