#include "kxor/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "kxor/error.hpp"
#include "kxor/rng.hpp"

namespace kxor {

namespace odeint = boost::numeric::odeint;

namespace {

// Catalyst widths for k = 3..10 at r = 0.5 and r = 1.5.
constexpr std::array<double, 8> kSigmaSparse = {0.2, 0.5, 1.0, 1.0, 1.5, 1.5, 2.0, 3.0};
constexpr std::array<double, 8> kSigmaDense = {0.5, 1.0, 1.0, 1.0, 1.5, 1.5, 1.5, 3.0};

// Flattened clause structure for the hot loop.
struct SpinSystem {
  std::vector<std::uint32_t> vars;     // concatenated clause variables
  std::vector<std::uint32_t> offsets;  // clause c occupies [offsets[c], offsets[c+1])
  std::vector<double> couplings;       // J = -parity / 2
  const Catalyst* catalyst = nullptr;
  double t_final = 1.0;
  std::size_t n = 0;
  mutable std::vector<double> field;
  mutable std::vector<double> prefix;

  SpinSystem(const Instance& inst, const Catalyst& cat, double tf)
      : catalyst(&cat), t_final(tf), n(static_cast<std::size_t>(inst.n_vars)) {
    offsets.push_back(0);
    for (const auto& c : inst.clauses) {
      vars.insert(vars.end(), c.vars.begin(), c.vars.end());
      offsets.push_back(static_cast<std::uint32_t>(vars.size()));
      couplings.push_back(-0.5 * c.parity);
    }
    field.resize(n);
    prefix.resize(static_cast<std::size_t>(std::max(inst.k, 1)) + 1);
  }

  // field[i] = m_i for spins packed as (x, y, z) triples.
  void compute_field(const double* state, double s) const {
    for (std::size_t i = 0; i < n; ++i) field[i] = catalyst->field(i, s);
    const std::size_t n_clauses = couplings.size();
    for (std::size_t c = 0; c < n_clauses; ++c) {
      const std::uint32_t begin = offsets[c];
      const std::uint32_t len = offsets[c + 1] - begin;
      const std::uint32_t* v = vars.data() + begin;
      prefix[0] = 1.0;
      for (std::uint32_t a = 0; a < len; ++a) prefix[a + 1] = prefix[a] * state[3 * v[a] + 2];
      double suffix = couplings[c];
      for (std::uint32_t a = len; a-- > 0;) {
        field[v[a]] += prefix[a] * suffix;
        suffix *= state[3 * v[a] + 2];
      }
    }
  }

  void rhs(const double* x, double* dxdt, double t) const {
    const double s = schedule_s(t, t_final);
    compute_field(x, s);
    const double transverse = 2.0 * (1.0 - s);
    for (std::size_t i = 0; i < n; ++i) {
      const double longitudinal = 2.0 * s * field[i];
      const double nx = x[3 * i], ny = x[3 * i + 1], nz = x[3 * i + 2];
      dxdt[3 * i] = -longitudinal * ny;
      dxdt[3 * i + 1] = longitudinal * nx - transverse * nz;
      dxdt[3 * i + 2] = transverse * ny;
    }
  }

  void operator()(const std::vector<double>& x, std::vector<double>& dxdt, double t) const {
    rhs(x.data(), dxdt.data(), t);
  }
};

SpinState unpack_state(const std::vector<double>& x, double t) {
  SpinState st;
  st.time = t;
  st.spins.resize(x.size() / 3);
  for (std::size_t i = 0; i < st.spins.size(); ++i) st.spins[i] = {x[3 * i], x[3 * i + 1], x[3 * i + 2]};
  return st;
}

}  // namespace

double schedule_s(double t, double t_final) { return t / t_final; }

double sigma_lookup(int k, double r) {
  if (k < 3 || k > 10) throw Error("invalid_argument", "catalyst table covers k = 3..10, got k=" + std::to_string(k));
  const auto& row = std::abs(r - 1.5) < std::abs(r - 0.5) ? kSigmaDense : kSigmaSparse;
  return row[static_cast<std::size_t>(k - 3)];
}

Catalyst sample_catalyst(int n_vars, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw Error("invalid_argument", "catalyst sigma must be non-negative");
  Catalyst cat;
  cat.sigma = sigma;
  cat.seed = seed;
  cat.lambdas.resize(static_cast<std::size_t>(n_vars));
  CounterRng rng(seed);
  for (auto& l : cat.lambdas) l = sigma * rng.normal();
  return cat;
}

std::vector<double> magnetization(const Instance& instance, const SpinState& spins, const Catalyst& catalyst,
                                  double s) {
  SpinSystem sys(instance, catalyst, 1.0);
  std::vector<double> packed(3 * spins.spins.size());
  for (std::size_t i = 0; i < spins.spins.size(); ++i) {
    for (int a = 0; a < 3; ++a) packed[3 * i + a] = spins.spins[i][a];
  }
  sys.compute_field(packed.data(), s);
  return sys.field;
}

void eom_rhs(const Instance& instance, const Catalyst& catalyst, double t, double t_final,
             std::span<const double> state, std::span<double> derivative) {
  SpinSystem sys(instance, catalyst, t_final);
  sys.rhs(state.data(), derivative.data(), t);
}

MfResult integrate(const Instance& instance, const Catalyst& catalyst, const MfConfig& config, EnergyBounds bounds) {
  if (!(config.t_final > 0.0)) throw Error("invalid_argument", "t_final must be positive");
  if (catalyst.lambdas.size() != static_cast<std::size_t>(instance.n_vars)) {
    throw Error("invalid_argument", "catalyst size does not match n_vars");
  }
  const SpinSystem sys(instance, catalyst, config.t_final);
  const std::size_t n = sys.n;

  std::vector<double> x(3 * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) x[3 * i] = 1.0;

  using State = std::vector<double>;
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(config.abs_tol, config.rel_tol);

  MfResult result;
  double t = 0.0;
  double dt = std::min(config.initial_dt, config.t_final);
  const auto system = std::cref(sys);
  while (t < config.t_final) {
    if (result.n_steps >= config.max_steps) {
      throw Error("step_limit", "step budget exhausted at t=" + std::to_string(t));
    }
    dt = std::min(dt, config.t_final - t);
    if (stepper.try_step(system, x, t, dt) == odeint::fail) {
      ++result.n_rejected;
      if (dt < config.min_dt) {
        throw Error("step_underflow", "step size fell below " + std::to_string(config.min_dt) +
                                          " at t=" + std::to_string(t));
      }
      continue;
    }
    ++result.n_steps;
    for (std::size_t i = 0; i < n; ++i) {
      double* v = x.data() + 3 * i;
      const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      result.max_norm_residual = std::max(result.max_norm_residual, std::abs(norm - 1.0));
      v[0] /= norm;
      v[1] /= norm;
      v[2] /= norm;
    }
    // The stored first-same-as-last derivative predates renormalization.
    stepper.reset();
    if (config.t_final - t < 1e-12 * config.t_final) t = config.t_final;
    if (config.observer) config.observer(unpack_state(x, t));
  }

  result.final_spins = unpack_state(x, t);
  result.bitstring.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double nz = x[3 * i + 2];
    if (nz < 0.0) {
      result.bitstring[i] = 1;
    } else if (nz == 0.0) {
      result.tie = true;
    }
  }
  result.e_star = cost(instance, result.bitstring);
  result.ratio = bounds.e_max > bounds.e_min
                     ? static_cast<double>(result.e_star - bounds.e_min) / (bounds.e_max - bounds.e_min)
                     : std::numeric_limits<double>::quiet_NaN();
  result.rel_deviation = bounds.e_max != 0 ? rel_deviation(result.e_star, bounds.e_max)
                                           : std::numeric_limits<double>::quiet_NaN();
  result.catalyst_sigma = catalyst.sigma;
  result.catalyst_seed = catalyst.seed;
  return result;
}

MfResult integrate(const Instance& instance, const Catalyst& catalyst, const MfConfig& config) {
  const auto sol = solve_exact(instance);
  return integrate(instance, catalyst, config, EnergyBounds{sol.e_min, sol.e_max});
}

MfResult mf_solve(const Instance& instance, int n_catalysts, std::uint64_t seed, std::optional<double> sigma,
                  const MfConfig& config, EnergyBounds bounds) {
  if (n_catalysts < 1) throw Error("invalid_argument", "n_catalysts must be at least 1");
  const double width = sigma ? *sigma : sigma_lookup(instance.k, instance.target_ratio);
  std::optional<MfResult> best;
  for (int c = 0; c < n_catalysts; ++c) {
    const auto cat = sample_catalyst(instance.n_vars, width, mix_seed(seed, static_cast<std::uint64_t>(c)));
    auto run = integrate(instance, cat, config, bounds);
    if (!best || run.e_star > best->e_star) best = std::move(run);
  }
  return std::move(*best);
}

MfResult mf_solve(const Instance& instance, int n_catalysts, std::uint64_t seed, std::optional<double> sigma,
                  const MfConfig& config) {
  const auto sol = solve_exact(instance);
  return mf_solve(instance, n_catalysts, seed, sigma, config, EnergyBounds{sol.e_min, sol.e_max});
}

double rel_deviation(double e_star, double e_best) {
  if (e_best == 0.0) throw Error("invalid_argument", "relative deviation needs a nonzero reference energy");
  return (e_star - e_best) / e_best;
}

void write_trajectory_header(std::ostream& out, int n_vars) {
  out << "# t";
  for (int i = 0; i < n_vars; ++i) out << " x" << i << " y" << i << " z" << i;
  out << '\n';
}

void write_trajectory_row(std::ostream& out, const SpinState& state) {
  out << state.time;
  for (const auto& s : state.spins) out << ' ' << s[0] << ' ' << s[1] << ' ' << s[2];
  out << '\n';
}

}  // namespace kxor
