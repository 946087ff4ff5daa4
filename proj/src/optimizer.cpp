#include "kxor/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kxor/error.hpp"
#include "kxor/nelder_mead.hpp"
#include "kxor/parallel.hpp"
#include "kxor/rng.hpp"

namespace kxor {

namespace {

std::vector<double> pack(const AngleSchedule& s) {
  std::vector<double> x(s.gammas);
  x.insert(x.end(), s.betas.begin(), s.betas.end());
  return x;
}

AngleSchedule unpack(std::span<const double> x) {
  const std::size_t p = x.size() / 2;
  return {std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(p)),
          std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(p), x.end())};
}

// Wraps x into (-half_period, half_period].
double wrap(double x, double period) {
  double y = std::fmod(x, period);
  if (y > 0.5 * period) y -= period;
  if (y <= -0.5 * period) y += period;
  return y;
}

void require_nondegenerate(const CostDiagonal& diag) {
  if (diag.e_max <= diag.e_min) {
    throw Error("degenerate_spectrum", "cost function is constant; nothing to optimize");
  }
}

}  // namespace

void validate(const OptimizerConfig& c) {
  if (c.n_random_starts < 1 || c.shallow_depth_cutoff < 1 || !(c.local_tolerance > 0.0) ||
      !(c.screening_tolerance > 0.0) ||
      c.max_evaluations < 1 || c.simplex_restarts < 0 || !(c.initial_step > 0.0) || !(c.gamma_range > 0.0) || !(c.beta_range > 0.0)) {
    throw Error("invalid_config", "optimizer counts, tolerances and ranges must be positive");
  }
}

OptResult local_optimize(const CostDiagonal& diag, const AngleSchedule& init, const OptimizerConfig& config) {
  validate(config);
  require_nondegenerate(diag);
  if (init.depth() < 1 || init.gammas.size() != init.betas.size()) {
    throw Error("invalid_schedule", "initial schedule needs p >= 1 equal-length gamma/beta arrays");
  }

  StateVector work(diag.n_vars);
  const auto objective = [&](std::span<const double> x) { return -evaluate(diag, unpack(x), work); };

  NelderMeadOptions nm;
  nm.initial_step = config.initial_step;
  nm.f_tolerance = config.local_tolerance;
  nm.x_tolerance = std::sqrt(config.local_tolerance);
  nm.max_evaluations = config.max_evaluations;
  nm.max_restarts = config.simplex_restarts;
  const auto start = pack(init);
  const auto found = nelder_mead_minimize(objective, start, nm);

  OptResult out;
  out.schedule = canonical_angles(unpack(found.x), diag.flip);
  out.f_value = evaluate(diag, out.schedule, work);
  out.ratio = approximation_ratio(out.f_value, diag.e_min, diag.e_max);
  out.n_evaluations = found.evaluations + 1;
  out.n_restarts_used = 1;
  out.converged = found.converged;
  return out;
}

OptResult multistart_optimize(const CostDiagonal& diag, std::size_t p, const OptimizerConfig& config,
                              std::uint64_t seed) {
  validate(config);
  require_nondegenerate(diag);
  if (p < 1) throw Error("invalid_argument", "depth must be at least 1");

  const auto starts = static_cast<std::size_t>(config.n_random_starts);
  std::vector<OptResult> runs(starts);
  OptimizerConfig local = config;
  local.threads = 1;
  local.local_tolerance = std::max(config.local_tolerance, config.screening_tolerance);
  if (local.local_tolerance > config.local_tolerance) local.simplex_restarts = 0;
  parallel_for(starts, config.threads, [&](std::size_t i) {
    CounterRng rng(mix_seed(seed, i));
    AngleSchedule init = AngleSchedule::zeros(p);
    for (auto& g : init.gammas) g = rng.uniform(0.0, config.gamma_range);
    for (auto& b : init.betas) b = rng.uniform(0.0, config.beta_range);
    runs[i] = local_optimize(diag, init, local);
  });

  // Ties resolve to the lowest start index.
  std::size_t best = 0;
  std::size_t evaluations = 0;
  for (std::size_t i = 0; i < starts; ++i) {
    evaluations += runs[i].n_evaluations;
    if (runs[i].f_value > runs[best].f_value) best = i;
  }
  OptResult out = std::move(runs[best]);
  if (local.local_tolerance > config.local_tolerance) {
    OptimizerConfig polish = config;
    polish.threads = 1;
    OptResult refined = local_optimize(diag, out.schedule, polish);
    evaluations += refined.n_evaluations;
    if (refined.f_value >= out.f_value) out = std::move(refined);
  }
  out.n_evaluations = evaluations;
  out.n_restarts_used = static_cast<int>(starts);
  return out;
}

AngleSchedule interp_extend(const AngleSchedule& schedule) {
  const std::size_t p = schedule.depth();
  if (p < 1) throw Error("invalid_argument", "cannot extend an empty schedule");
  auto extend = [p](const std::vector<double>& a) {
    std::vector<double> out(p + 1);
    for (std::size_t i = 1; i <= p + 1; ++i) {
      const double prev = i >= 2 ? a[i - 2] : 0.0;
      const double here = i <= p ? a[i - 1] : 0.0;
      out[i - 1] = static_cast<double>(i - 1) / p * prev + static_cast<double>(p - i + 1) / p * here;
    }
    return out;
  };
  return {extend(schedule.gammas), extend(schedule.betas)};
}

AngleSchedule zero_padded(const AngleSchedule& schedule) {
  AngleSchedule out = schedule;
  out.gammas.push_back(0.0);
  out.betas.push_back(0.0);
  return out;
}

AngleSchedule canonical_angles(const AngleSchedule& schedule, FlipSymmetry flip) {
  constexpr double pi = std::numbers::pi;
  AngleSchedule out = schedule;
  auto fold = [&] {
    for (std::size_t j = 0; j < out.depth(); ++j) {
      double& b = out.betas[j];
      if (flip == FlipSymmetry::none) {
        b = wrap(b, pi);
        continue;
      }
      const double q = wrap(b, 0.5 * pi);
      const long shifts = std::lround((b - q) / (0.5 * pi));
      b = q;
      if (flip == FlipSymmetry::mirrored && shifts % 2 != 0) {
        for (std::size_t i = 0; i <= j; ++i) out.gammas[i] = -out.gammas[i];
      }
    }
    for (auto& g : out.gammas) g = wrap(g, 2.0 * pi);
  };
  fold();
  for (double g : out.gammas) {
    if (g == 0.0) continue;
    if (g < 0.0) {
      // Complex conjugation maps the state at (gamma, beta) to the state at (-gamma, -beta).
      for (auto& x : out.gammas) x = -x;
      for (auto& x : out.betas) x = -x;
      fold();
    }
    break;
  }
  return out;
}

std::vector<OptResult> optimize_depth_ladder(const CostDiagonal& diag, std::size_t p_max,
                                             const OptimizerConfig& config, std::uint64_t seed) {
  validate(config);
  require_nondegenerate(diag);
  if (p_max < 1) throw Error("invalid_argument", "p_max must be at least 1");

  std::vector<OptResult> ladder;
  ladder.reserve(p_max);
  for (std::size_t p = 1; p <= p_max; ++p) {
    OptResult candidate;
    if (p <= static_cast<std::size_t>(config.shallow_depth_cutoff)) {
      candidate = multistart_optimize(diag, p, config, mix_seed(seed, p));
      if (!ladder.empty()) {
        // The warm start competes with the random starts at shallow depth too.
        OptResult warm = local_optimize(diag, interp_extend(ladder.back().schedule), config);
        const std::size_t evaluations = candidate.n_evaluations + warm.n_evaluations;
        if (warm.f_value > candidate.f_value) {
          warm.n_restarts_used = candidate.n_restarts_used + 1;
          candidate = std::move(warm);
        } else {
          candidate.n_restarts_used += 1;
        }
        candidate.n_evaluations = evaluations;
      }
    } else {
      candidate = local_optimize(diag, interp_extend(ladder.back().schedule), config);
    }
    if (!ladder.empty() && candidate.f_value < ladder.back().f_value) {
      const OptResult& prev = ladder.back();
      OptResult padded;
      padded.schedule = zero_padded(prev.schedule);
      padded.f_value = prev.f_value;
      padded.ratio = prev.ratio;
      padded.n_evaluations = candidate.n_evaluations;
      padded.n_restarts_used = candidate.n_restarts_used;
      padded.converged = candidate.converged;
      candidate = std::move(padded);
    }
    ladder.push_back(std::move(candidate));
  }
  return ladder;
}

double transfer_evaluate(const AngleSchedule& schedule, const CostDiagonal& diag) {
  return approximation_ratio(evaluate(diag, schedule), diag.e_min, diag.e_max);
}

double transfer_evaluate(const AngleSchedule& schedule, const Instance& instance) {
  return transfer_evaluate(schedule, build_cost_diagonal(instance));
}

AngleStatistics average_angles(const std::vector<OptResult>& results) {
  if (results.empty()) throw Error("invalid_argument", "no results to average");
  const std::size_t p = results.front().schedule.depth();
  for (const auto& r : results) {
    if (r.schedule.depth() != p) throw Error("invalid_argument", "results have different depths");
  }
  const double n = static_cast<double>(results.size());
  AngleStatistics st;
  st.mean_gamma.assign(p, 0.0);
  st.mean_beta.assign(p, 0.0);
  st.std_gamma.assign(p, 0.0);
  st.std_beta.assign(p, 0.0);
  for (const auto& r : results) {
    for (std::size_t j = 0; j < p; ++j) {
      st.mean_gamma[j] += r.schedule.gammas[j] / n;
      st.mean_beta[j] += r.schedule.betas[j] / n;
    }
  }
  if (results.size() > 1) {
    for (const auto& r : results) {
      for (std::size_t j = 0; j < p; ++j) {
        st.std_gamma[j] += std::pow(r.schedule.gammas[j] - st.mean_gamma[j], 2);
        st.std_beta[j] += std::pow(r.schedule.betas[j] - st.mean_beta[j], 2);
      }
    }
    for (std::size_t j = 0; j < p; ++j) {
      st.std_gamma[j] = std::sqrt(st.std_gamma[j] / (n - 1.0));
      st.std_beta[j] = std::sqrt(st.std_beta[j] / (n - 1.0));
    }
  }
  return st;
}

}  // namespace kxor
