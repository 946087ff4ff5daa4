#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kxor/error.hpp"
#include "kxor/nelder_mead.hpp"
#include "kxor/optimizer.hpp"
#include "kxor/rng.hpp"

using namespace kxor;
using std::numbers::pi;

namespace {

struct GridBest {
  double f = -1.0;
  double gamma = 0.0;
  double beta = 0.0;
};

// p=1 grid search: coarse pass over the full period, then 1e-3 refinement around
// the best few coarse cells.
GridBest grid_oracle(const CostDiagonal& d) {
  StateVector work(d.n_vars);
  const double coarse = 0.02;
  std::vector<GridBest> cells;
  for (double g = 0.0; g < 2 * pi; g += coarse) {
    for (double b = 0.0; b < pi; b += coarse) {
      cells.push_back({evaluate(d, {{g}, {b}}, work), g, b});
    }
  }
  std::partial_sort(cells.begin(), cells.begin() + 6, cells.end(),
                    [](const GridBest& a, const GridBest& b) { return a.f > b.f; });
  GridBest best;
  for (int c = 0; c < 6; ++c) {
    for (double g = cells[c].gamma - coarse; g <= cells[c].gamma + coarse; g += 1e-3) {
      for (double b = cells[c].beta - coarse; b <= cells[c].beta + coarse; b += 1e-3) {
        const double f = evaluate(d, {{g}, {b}}, work);
        if (f > best.f) best = {f, g, b};
      }
    }
  }
  return best;
}

Instance single_clause() {
  Instance inst;
  inst.n_vars = 3;
  inst.k = 3;
  inst.clauses = {{{0, 1, 2}, 1}};
  return inst;
}

OptimizerConfig small_config(int starts) {
  OptimizerConfig c;
  c.n_random_starts = starts;
  return c;
}

}  // namespace

TEST_CASE("nelder-mead finds a quadratic minimum") {
  const auto f = [](std::span<const double> x) {
    return (x[0] - 1.0) * (x[0] - 1.0) + 4.0 * (x[1] + 2.0) * (x[1] + 2.0) + 0.5;
  };
  const std::vector<double> start{0.0, 0.0};
  const auto r = nelder_mead_minimize(f, start, {});
  CHECK(r.converged);
  CHECK(r.f == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-2));

  NelderMeadOptions tight;
  tight.max_evaluations = 10;
  const auto capped = nelder_mead_minimize(f, start, tight);
  CHECK(!capped.converged);
  CHECK(capped.evaluations <= 10u);
}

TEST_CASE("local optimum on a single clause matches the grid") {
  const auto d = build_cost_diagonal(single_clause());
  const auto grid = grid_oracle(d);
  const auto r = local_optimize(d, {{grid.gamma + 0.05}, {grid.beta - 0.05}}, small_config(1));
  CHECK(std::abs(r.f_value - grid.f) < 1e-4);
  CHECK(r.f_value >= grid.f - 1e-4);

  // starting at the grid optimum never loses ground
  const auto again = local_optimize(d, {{grid.gamma}, {grid.beta}}, small_config(1));
  CHECK(again.f_value >= grid.f - 1e-12);
}

TEST_CASE("local result never drops below its start") {
  const auto d = build_cost_diagonal(sample_instance(8, 3, 1.5, 5));
  for (int trial = 0; trial < 10; ++trial) {
    const AngleSchedule init{{0.3 * trial, 0.1}, {0.2, 0.05 * trial}};
    const auto r = local_optimize(d, init, small_config(1));
    CHECK(r.f_value >= evaluate(d, init) - 1e-12);
    CHECK(r.f_value == doctest::Approx(evaluate(d, r.schedule)).epsilon(1e-12));
    CHECK(r.ratio == doctest::Approx(approximation_ratio(r.f_value, d.e_min, d.e_max)));
  }
}

TEST_CASE("multistart p=1 reaches the grid optimum") {
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = build_cost_diagonal(sample_instance(8, 3, 1.5, 900 + trial));
    const auto grid = grid_oracle(d);
    const auto r = multistart_optimize(d, 1, small_config(20), trial);
    CHECK(r.f_value > grid.f - 1e-3);
  }
}

TEST_CASE("multistart is deterministic and monotone in starts") {
  const auto d = build_cost_diagonal(sample_instance(9, 4, 1.5, 31));
  const auto a = multistart_optimize(d, 2, small_config(6), 77);
  const auto b = multistart_optimize(d, 2, small_config(6), 77);
  CHECK(a.schedule == b.schedule);
  CHECK(a.f_value == b.f_value);

  auto threaded = small_config(6);
  threaded.threads = 3;
  const auto c = multistart_optimize(d, 2, threaded, 77);
  CHECK(c.schedule == a.schedule);

  double previous = -1.0;
  for (int starts : {1, 3, 6, 12}) {
    auto cfg = small_config(starts);
    cfg.screening_tolerance = cfg.local_tolerance;  // plain best-of
    const auto r = multistart_optimize(d, 2, cfg, 77);
    CHECK(r.f_value >= previous);
    previous = r.f_value;
  }
}

TEST_CASE("one start without screening equals a single local run") {
  const auto d = build_cost_diagonal(sample_instance(8, 3, 1.0, 2));
  auto cfg = small_config(1);
  cfg.screening_tolerance = cfg.local_tolerance;
  const auto multi = multistart_optimize(d, 2, cfg, 5);
  CounterRng rng(mix_seed(5, 0));
  AngleSchedule init = AngleSchedule::zeros(2);
  for (auto& g : init.gammas) g = rng.uniform(0.0, cfg.gamma_range);
  for (auto& b : init.betas) b = rng.uniform(0.0, cfg.beta_range);
  const auto single = local_optimize(d, init, cfg);
  CHECK(multi.schedule == single.schedule);
  CHECK(multi.f_value == single.f_value);
}

TEST_CASE("interpolation warm start") {
  const auto one = interp_extend({{0.7}, {0.3}});
  CHECK(one.gammas == std::vector<double>{0.7, 0.7});
  CHECK(one.betas == std::vector<double>{0.3, 0.3});

  // p=4 ramp c*i: gamma'_i = ((i-1)/4) c (i-1) + ((5-i)/4) c i, with zero boundaries
  const double c = 0.1;
  const auto ramp = interp_extend({{c, 2 * c, 3 * c, 4 * c}, {0, 0, 0, 0}});
  REQUIRE(ramp.depth() == 5u);
  for (int i = 1; i <= 5; ++i) {
    const double prev = i >= 2 ? c * (i - 1) : 0.0;
    const double here = i <= 4 ? c * i : 0.0;
    CHECK(ramp.gammas[i - 1] == doctest::Approx((i - 1) / 4.0 * prev + (5 - i) / 4.0 * here));
  }
  // c, 1.75c, 2.5c, 3.25c, 4c: still a ramp, step 3c/4
  for (std::size_t i = 1; i < 5; ++i) CHECK(ramp.gammas[i] - ramp.gammas[i - 1] == doctest::Approx(0.75 * c));
  CHECK(ramp.gammas[4] == doctest::Approx(4 * c));
  CHECK(interp_extend(AngleSchedule::zeros(3)) == AngleSchedule::zeros(4));
  CHECK_THROWS_AS(interp_extend(AngleSchedule{}), Error);
}

TEST_CASE("zero padding keeps the state") {
  const auto d = build_cost_diagonal(sample_instance(8, 3, 1.5, 12));
  const AngleSchedule s{{0.4, 0.9}, {0.5, 0.2}};
  CHECK(evaluate(d, zero_padded(s)) == doctest::Approx(evaluate(d, s)).epsilon(1e-13));
}

TEST_CASE("canonical angles preserve F_p") {
  CounterRng rng(4);
  for (int k : {3, 4}) {
    const auto d = build_cost_diagonal(sample_instance(8, k, 1.5, 13));
    for (FlipSymmetry flip : {FlipSymmetry::none, d.flip}) {
      const double bound = flip == FlipSymmetry::none ? pi / 2 : pi / 4;
      for (int trial = 0; trial < 20; ++trial) {
        AngleSchedule s = AngleSchedule::zeros(3);
        for (auto& g : s.gammas) g = rng.uniform(-10, 10);
        for (auto& b : s.betas) b = rng.uniform(-10, 10);
        const auto c = canonical_angles(s, flip);
        CHECK(std::abs(evaluate(d, c) - evaluate(d, s)) < 1e-9);
        for (double g : c.gammas) CHECK((g > -pi && g <= pi));
        for (double b : c.betas) CHECK((b > -bound && b <= bound));
        CHECK(c.gammas[0] >= 0.0);
        // idempotent
        const auto again = canonical_angles(c, flip);
        for (std::size_t j = 0; j < 3; ++j) {
          CHECK(again.gammas[j] == doctest::Approx(c.gammas[j]));
          CHECK(again.betas[j] == doctest::Approx(c.betas[j]));
        }
      }
    }
  }
}

TEST_CASE("p=1 optima fall on one branch") {
  // For odd k the two p=1 optima (gamma, beta) and (gamma, pi/2 - beta) are
  // symmetry partners; after canonicalization all instances agree on beta.
  auto cfg = small_config(6);
  double lo = pi, hi = -pi;
  for (int i = 0; i < 8; ++i) {
    const auto d = build_cost_diagonal(sample_instance(8, 3, 1.5, 300 + i));
    const auto best = multistart_optimize(d, 1, cfg, 9);
    lo = std::min(lo, best.schedule.betas[0]);
    hi = std::max(hi, best.schedule.betas[0]);
  }
  CHECK(hi - lo < 0.3);
}

TEST_CASE("depth ladder is non-decreasing") {
  const auto d = build_cost_diagonal(sample_instance(8, 3, 1.5, 14));
  auto cfg = small_config(5);
  cfg.shallow_depth_cutoff = 2;
  const auto ladder = optimize_depth_ladder(d, 5, cfg, 3);
  REQUIRE(ladder.size() == 5u);
  for (std::size_t p = 0; p < ladder.size(); ++p) {
    CHECK(ladder[p].schedule.depth() == p + 1);
    CHECK(ladder[p].f_value == doctest::Approx(evaluate(d, ladder[p].schedule)).epsilon(1e-9));
    if (p > 0) CHECK(ladder[p].f_value >= ladder[p - 1].f_value);
  }
  CHECK(transfer_evaluate(ladder[2].schedule, d) == doctest::Approx(ladder[2].ratio).epsilon(1e-12));

  const auto single = optimize_depth_ladder(d, 1, cfg, 3);
  CHECK(single.front().schedule == multistart_optimize(d, 1, cfg, mix_seed(3, 1)).schedule);
}

TEST_CASE("zero schedule transfers to the uniform-state ratio") {
  const auto inst = sample_instance(10, 3, 1.5, 15);
  const auto d = build_cost_diagonal(inst);
  const double uniform = approximation_ratio(0.5 * static_cast<double>(inst.clauses.size()), d.e_min, d.e_max);
  CHECK(transfer_evaluate(AngleSchedule::zeros(3), inst) == doctest::Approx(uniform));
}

TEST_CASE("degenerate landscape is refused") {
  Instance empty;
  empty.n_vars = 4;
  empty.k = 3;
  const auto d = build_cost_diagonal(empty);
  try {
    local_optimize(d, {{0.1}, {0.1}}, small_config(1));
    FAIL("expected degenerate spectrum");
  } catch (const Error& e) {
    CHECK(e.code() == "degenerate_spectrum");
  }
  CHECK_THROWS_AS(multistart_optimize(d, 1, small_config(2), 0), Error);
}

TEST_CASE("config validation") {
  auto bad = small_config(0);
  CHECK_THROWS_AS(validate(bad), Error);
  bad = small_config(1);
  bad.local_tolerance = 0.0;
  CHECK_THROWS_AS(validate(bad), Error);
  CHECK_NOTHROW(validate(small_config(1)));
}

TEST_CASE("angle averaging") {
  OptResult a, b, c;
  a.schedule = {{0.1, 0.2}, {0.3, 0.4}};
  b.schedule = {{0.3, 0.2}, {0.5, 0.4}};
  c.schedule = {{0.5, 0.2}, {0.7, 0.4}};

  const auto one = average_angles({a});
  CHECK(one.mean_gamma == a.schedule.gammas);
  CHECK(one.std_gamma == std::vector<double>{0.0, 0.0});

  const auto same = average_angles({a, a});
  CHECK(same.mean_beta[0] == doctest::Approx(0.3));
  CHECK(same.std_beta[0] == doctest::Approx(0.0));

  // values 0.1, 0.3, 0.5: mean 0.3, sample std 0.2
  const auto st = average_angles({a, b, c});
  CHECK(st.mean_gamma[0] == doctest::Approx(0.3));
  CHECK(st.std_gamma[0] == doctest::Approx(0.2));
  CHECK(st.mean_beta[0] == doctest::Approx(0.5));
  CHECK(st.std_beta[0] == doctest::Approx(0.2));
  CHECK(st.std_gamma[1] == doctest::Approx(0.0));
  CHECK(st.mean_schedule().gammas == st.mean_gamma);

  OptResult shallow;
  shallow.schedule = {{0.1}, {0.1}};
  CHECK_THROWS_AS(average_angles({a, shallow}), Error);
  CHECK_THROWS_AS(average_angles({}), Error);
}
