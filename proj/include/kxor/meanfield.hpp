#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "kxor/exact.hpp"
#include "kxor/instance.hpp"

namespace kxor {

/// Classical Bloch vectors (n^x, n^y, n^z) per variable at time t, in units of
/// the inverse initial transverse field.
struct SpinState {
  std::vector<std::array<double, 3>> spins;
  double time = 0.0;
};

/// Random local fields lambda_i ~ N(0, sigma^2) switched on with the envelope
/// s^2 (1 - s), which vanishes at both ends of the sweep.
struct Catalyst {
  std::vector<double> lambdas;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  static double envelope(double s) noexcept { return s * s * (1.0 - s); }
  double field(std::size_t i, double s) const noexcept { return lambdas[i] * envelope(s); }
};

struct MfConfig {
  double t_final = 32768.0;
  double rel_tol = 1e-6;
  double abs_tol = 1e-8;
  double initial_dt = 1e-2;
  /// Accepted steps below this size abort the run as stiff.
  double min_dt = 1e-10;
  std::size_t max_steps = 50'000'000;
  /// Called after every accepted step when set (trajectory dumps, diagnostics).
  std::function<void(const SpinState&)> observer;
};

struct EnergyBounds {
  int e_min = 0;
  int e_max = 0;
};

struct MfResult {
  Assignment bitstring;
  int e_star = 0;
  double ratio = 0.0;
  /// (e_star - e_max) / e_max, with E_max taken as the reference optimum.
  double rel_deviation = 0.0;
  SpinState final_spins;
  std::size_t n_steps = 0;
  std::size_t n_rejected = 0;
  /// Some final n^z was exactly zero; those variables were set to 0.
  bool tie = false;
  /// Largest | |n_i| - 1 | seen before per-step renormalization.
  double max_norm_residual = 0.0;
  double catalyst_sigma = 0.0;
  std::uint64_t catalyst_seed = 0;
};

/// s = t / t_final
double schedule_s(double t, double t_final);

/// Catalyst width for (k, r). k must lie in [3, 10]; r snaps to the nearer of
/// the tabulated rows 0.5 and 1.5 (ties go to 0.5).
double sigma_lookup(int k, double r);

Catalyst sample_catalyst(int n_vars, double sigma, std::uint64_t seed);

/// m_i = Lambda_i(s) + sum over clauses containing i of J * prod_{j != i} n^z_j,
/// with J = -parity / 2.
std::vector<double> magnetization(const Instance& instance, const SpinState& spins, const Catalyst& catalyst,
                                  double s);

/// Right-hand side of the 3N spin equations, laid out as (x0, y0, z0, x1, ...).
void eom_rhs(const Instance& instance, const Catalyst& catalyst, double t, double t_final,
             std::span<const double> state, std::span<double> derivative);

/// Integrates from all spins along +x to t_final with adaptive Dormand-Prince
/// steps, renormalizing each spin after every accepted step, and projects the
/// final n^z onto bits (n^z > 0 -> bit 0). Throws Error("step_underflow") if the
/// step size collapses.
MfResult integrate(const Instance& instance, const Catalyst& catalyst, const MfConfig& config,
                   EnergyBounds bounds);

/// Uses solve_exact for the energy bounds.
MfResult integrate(const Instance& instance, const Catalyst& catalyst, const MfConfig& config = {});

/// Best ratio over n_catalysts independent catalysts drawn from seed-keyed
/// streams. sigma defaults to sigma_lookup(k, target_ratio).
MfResult mf_solve(const Instance& instance, int n_catalysts, std::uint64_t seed, std::optional<double> sigma,
                  const MfConfig& config, EnergyBounds bounds);
MfResult mf_solve(const Instance& instance, int n_catalysts, std::uint64_t seed,
                  std::optional<double> sigma = std::nullopt, const MfConfig& config = {});

/// (e_star - e_best) / e_best. Throws Error("invalid_argument") for e_best == 0.
double rel_deviation(double e_star, double e_best);

/// Writes "t x0 y0 z0 x1 ..." rows; header line starts with '#'.
void write_trajectory_header(std::ostream& out, int n_vars);
void write_trajectory_row(std::ostream& out, const SpinState& state);

}  // namespace kxor
