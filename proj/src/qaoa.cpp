#include "kxor/qaoa.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "kxor/error.hpp"

namespace kxor {

StateVector::StateVector(int n_vars) : n_vars_(n_vars), amplitudes_(std::size_t{1} << n_vars) {}

double StateVector::norm_squared() const noexcept {
  double total = 0.0;
  for (const auto& a : amplitudes_) total += std::norm(a);
  return total;
}

void StateVector::set_plus() {
  const double amp = std::ldexp(1.0, -n_vars_ / 2) * ((n_vars_ % 2) ? std::sqrt(0.5) : 1.0);
  std::fill(amplitudes_.begin(), amplitudes_.end(), Amplitude(amp, 0.0));
}

CostDiagonal build_cost_diagonal(const Instance& instance, int max_vars) {
  if (instance.n_vars > max_vars || instance.n_vars > 62) {
    throw Error("n_over_cap", "n_vars=" + std::to_string(instance.n_vars) +
                                  " exceeds the state-vector cap of " + std::to_string(max_vars));
  }
  CostDiagonal diag;
  diag.n_vars = instance.n_vars;
  diag.n_clauses = static_cast<int>(instance.clauses.size());
  const std::uint64_t dim = std::uint64_t{1} << instance.n_vars;
  diag.values.assign(dim, 0);

  // Work in doubled units: each clause adds 1 - parity * (-1)^popcount(z & mask).
  for (const auto& clause : instance.clauses) {
    const std::uint64_t mask = clause.mask();
    const int parity = clause.parity;
    for (std::uint64_t z = 0; z < dim; ++z) {
      const int eigen = (std::popcount(z & mask) & 1) ? -1 : 1;
      diag.values[z] += 1 - parity * eigen;
    }
  }
  for (auto& v : diag.values) v /= 2;

  const auto [lo, hi] = std::minmax_element(diag.values.begin(), diag.values.end());
  diag.e_min = *lo;
  diag.e_max = *hi;
  diag.flip = flip_symmetry(diag);
  return diag;
}

FlipSymmetry flip_symmetry(const CostDiagonal& diag) {
  const std::uint64_t dim = diag.values.size();
  if (dim == 0) return FlipSymmetry::none;
  const std::uint64_t all = dim - 1;
  bool invariant = true, mirrored = true;
  for (std::uint64_t z = 0; z < dim && (invariant || mirrored); ++z) {
    const int v = diag.values[z], w = diag.values[z ^ all];
    invariant = invariant && v == w;
    mirrored = mirrored && v == diag.n_clauses - w;
  }
  if (invariant) return FlipSymmetry::invariant;
  return mirrored ? FlipSymmetry::mirrored : FlipSymmetry::none;
}

StateVector plus_state(int n_vars) {
  StateVector s(n_vars);
  s.set_plus();
  return s;
}

void apply_phase(StateVector& state, const CostDiagonal& diag, double gamma) {
  // Integer spectrum: one exponential per distinct cost value.
  thread_local std::vector<double> table;
  table.resize(2 * (static_cast<std::size_t>(diag.n_clauses) + 1));
  for (std::size_t c = 0; 2 * c < table.size(); ++c) {
    const double angle = -gamma * static_cast<double>(c);
    table[2 * c] = std::cos(angle);
    table[2 * c + 1] = std::sin(angle);
  }
  auto amps = state.amplitudes();
  double* __restrict a = reinterpret_cast<double*>(amps.data());
  const double* __restrict ph = table.data();
  const auto* values = diag.values.data();
  for (std::size_t z = 0; z < amps.size(); ++z) {
    const double pr = ph[2 * values[z]];
    const double pi = ph[2 * values[z] + 1];
    const double re = a[2 * z];
    const double im = a[2 * z + 1];
    a[2 * z] = re * pr - im * pi;
    a[2 * z + 1] = re * pi + im * pr;
  }
}

namespace {

// One X rotation on a block pair: (c a0 - i s a1, -i s a0 + c a1), interleaved re/im.
inline void rotate_pairs(double* __restrict lo, double* __restrict hi, std::size_t n_doubles, double c, double s) {
  for (std::size_t j = 0; j < n_doubles; j += 2) {
    const double r0 = lo[j], i0 = lo[j + 1];
    const double r1 = hi[j], i1 = hi[j + 1];
    lo[j] = c * r0 + s * i1;
    lo[j + 1] = c * i0 - s * r1;
    hi[j] = c * r1 + s * i0;
    hi[j + 1] = c * i1 - s * r0;
  }
}

}  // namespace

void apply_mixer(StateVector& state, double beta) {
  const double c = std::cos(beta);
  const double s = std::sin(beta);
  auto amps = state.amplitudes();
  double* a = reinterpret_cast<double*>(amps.data());
  const std::size_t dim = amps.size();
  if (state.n_vars() > 0) {
    // Qubit 0 pairs are adjacent; a flat loop avoids one call per pair.
    for (std::size_t j = 0; j < 2 * dim; j += 4) {
      const double r0 = a[j], i0 = a[j + 1], r1 = a[j + 2], i1 = a[j + 3];
      a[j] = c * r0 + s * i1;
      a[j + 1] = c * i0 - s * r1;
      a[j + 2] = c * r1 + s * i0;
      a[j + 3] = c * i1 - s * r0;
    }
  }
  for (int q = 1; q < state.n_vars(); ++q) {
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
      rotate_pairs(a + 2 * block, a + 2 * (block + stride), 2 * stride, c, s);
    }
  }
}

void evolve_into(StateVector& state, const CostDiagonal& diag, const AngleSchedule& schedule) {
  if (schedule.gammas.size() != schedule.betas.size()) {
    throw Error("invalid_schedule", "gamma and beta arrays differ in length");
  }
  if (state.n_vars() != diag.n_vars || state.size() != diag.values.size()) state = StateVector(diag.n_vars);
  state.set_plus();
  for (std::size_t j = 0; j < schedule.depth(); ++j) {
    apply_phase(state, diag, schedule.gammas[j]);
    apply_mixer(state, schedule.betas[j]);
  }
}

StateVector evolve(const CostDiagonal& diag, const AngleSchedule& schedule) {
  StateVector state(diag.n_vars);
  evolve_into(state, diag, schedule);
  return state;
}

double expectation(const StateVector& state, const CostDiagonal& diag) {
  // Accumulate probability per cost value, then weight; keeps the sum exact for integer costs.
  std::vector<double> mass(static_cast<std::size_t>(diag.n_clauses) + 1, 0.0);
  const auto amps = state.amplitudes();
  for (std::size_t z = 0; z < amps.size(); ++z) mass[static_cast<std::size_t>(diag.values[z])] += std::norm(amps[z]);
  double total = 0.0;
  for (std::size_t c = 1; c < mass.size(); ++c) total += static_cast<double>(c) * mass[c];
  return total;
}

double evaluate(const CostDiagonal& diag, const AngleSchedule& schedule, StateVector& work) {
  evolve_into(work, diag, schedule);
  return expectation(work, diag);
}

double evaluate(const CostDiagonal& diag, const AngleSchedule& schedule) {
  StateVector work(diag.n_vars);
  return evaluate(diag, schedule, work);
}

double approximation_ratio(double f_value, int e_min, int e_max) {
  if (e_max <= e_min) {
    throw Error("degenerate_spectrum", "approximation ratio undefined: e_max == e_min == " + std::to_string(e_min));
  }
  return (f_value - e_min) / static_cast<double>(e_max - e_min);
}

std::vector<double> gradient_fd(const CostDiagonal& diag, const AngleSchedule& schedule, double step) {
  const std::size_t p = schedule.depth();
  std::vector<double> grad(2 * p);
  StateVector work(diag.n_vars);
  AngleSchedule probe = schedule;
  for (std::size_t i = 0; i < 2 * p; ++i) {
    double& angle = i < p ? probe.gammas[i] : probe.betas[i - p];
    const double saved = angle;
    angle = saved + step;
    const double up = evaluate(diag, probe, work);
    angle = saved - step;
    const double down = evaluate(diag, probe, work);
    angle = saved;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

std::vector<double> level_distribution(const StateVector& state, const CostDiagonal& diag, const ExactSolution& sol) {
  std::vector<int> level_of_cost(static_cast<std::size_t>(diag.n_clauses) + 1, -1);
  for (std::size_t j = 0; j < sol.level_values.size(); ++j) {
    level_of_cost[static_cast<std::size_t>(sol.level_values[j])] = static_cast<int>(j);
  }
  std::vector<double> probs(sol.level_values.size(), 0.0);
  const auto amps = state.amplitudes();
  for (std::size_t z = 0; z < amps.size(); ++z) {
    const int level = level_of_cost[static_cast<std::size_t>(diag.values[z])];
    if (level < 0) throw Error("unknown_level", "state has support on a cost value absent from the spectrum");
    probs[static_cast<std::size_t>(level)] += std::norm(amps[z]);
  }
  return probs;
}

std::vector<double> level_distribution(const StateVector& state, const ExactSolution& sol) {
  if (sol.table.size() != state.size()) {
    throw Error("missing_table", "level_distribution needs an exact solution computed with keep_table");
  }
  CostDiagonal diag;
  diag.n_vars = state.n_vars();
  diag.n_clauses = sol.level_values.empty() ? 0 : sol.level_values.front();
  diag.values = sol.table;
  return level_distribution(state, diag, sol);
}

}  // namespace kxor
