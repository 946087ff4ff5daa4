#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "kxor/exact.hpp"
#include "kxor/instance.hpp"

namespace kxor {

/// Behaviour of the cost under flipping every bit: unchanged (even k) or
/// mirrored to n_clauses - C (odd k). Each gives an extra angle symmetry.
enum class FlipSymmetry { none, invariant, mirrored };

/// Satisfied-clause count for every computational basis state. Variable i maps
/// to bit i of the index, and bit value 0 is the Z = +1 eigenstate.
struct CostDiagonal {
  int n_vars = 0;
  int n_clauses = 0;
  int e_min = 0;
  int e_max = 0;
  FlipSymmetry flip = FlipSymmetry::none;
  std::vector<std::int32_t> values;
};

FlipSymmetry flip_symmetry(const CostDiagonal& diag);

using Amplitude = std::complex<double>;

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(int n_vars);

  int n_vars() const noexcept { return n_vars_; }
  std::size_t size() const noexcept { return amplitudes_.size(); }

  std::span<Amplitude> amplitudes() noexcept { return amplitudes_; }
  std::span<const Amplitude> amplitudes() const noexcept { return amplitudes_; }
  Amplitude& operator[](std::size_t z) noexcept { return amplitudes_[z]; }
  const Amplitude& operator[](std::size_t z) const noexcept { return amplitudes_[z]; }

  double norm_squared() const noexcept;

  /// Resets to the uniform superposition |+>^N.
  void set_plus();

 private:
  int n_vars_ = 0;
  std::vector<Amplitude> amplitudes_;
};

/// Layer angles in radians; layer j applies the phase gammas[j] and then the mixer betas[j].
struct AngleSchedule {
  std::vector<double> gammas;
  std::vector<double> betas;

  std::size_t depth() const noexcept { return gammas.size(); }

  static AngleSchedule zeros(std::size_t p) { return {std::vector<double>(p, 0.0), std::vector<double>(p, 0.0)}; }

  friend bool operator==(const AngleSchedule&, const AngleSchedule&) = default;
};

/// Evaluates every clause as (1 - parity * prod Z) / 2 over all 2^N basis states.
/// Throws Error("n_over_cap") for N > max_vars.
CostDiagonal build_cost_diagonal(const Instance& instance, int max_vars = kDefaultMaxVars);

StateVector plus_state(int n_vars);

/// amplitude[z] *= exp(-i gamma diag[z])
void apply_phase(StateVector& state, const CostDiagonal& diag, double gamma);

/// Applies exp(-i beta X) to every qubit.
void apply_mixer(StateVector& state, double beta);

/// Prepares |+>^N and applies the layers of `schedule` in order, phase first.
StateVector evolve(const CostDiagonal& diag, const AngleSchedule& schedule);

/// In-place variant reusing an existing buffer.
void evolve_into(StateVector& state, const CostDiagonal& diag, const AngleSchedule& schedule);

/// <psi| C |psi>
double expectation(const StateVector& state, const CostDiagonal& diag);

/// F_p at `schedule` using `work` as scratch space.
double evaluate(const CostDiagonal& diag, const AngleSchedule& schedule, StateVector& work);
double evaluate(const CostDiagonal& diag, const AngleSchedule& schedule);

/// (f - e_min) / (e_max - e_min). Throws Error("degenerate_spectrum") when e_max == e_min.
double approximation_ratio(double f_value, int e_min, int e_max);

/// Central-difference gradient of F_p, ordered (d/dgamma_1..p, d/dbeta_1..p).
std::vector<double> gradient_fd(const CostDiagonal& diag, const AngleSchedule& schedule, double step = 1e-5);

/// Probability mass on each energy level of `sol` (level 0 = optimal).
std::vector<double> level_distribution(const StateVector& state, const CostDiagonal& diag, const ExactSolution& sol);

/// Same, using the cost table stored in `sol` (solve_exact with keep_table).
std::vector<double> level_distribution(const StateVector& state, const ExactSolution& sol);

}  // namespace kxor
