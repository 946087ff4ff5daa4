#include <algorithm>
#include <map>
#include <numeric>

#include "doctest.h"
#include "kxor/error.hpp"
#include "kxor/exact.hpp"
#include "kxor/instance.hpp"

using namespace kxor;

namespace {

Instance triangle() {
  Instance t;
  t.n_vars = 3;
  t.k = 2;
  t.clauses = {{{0, 1}, 1}, {{0, 2}, 1}, {{1, 2}, 1}};
  return t;
}

// Naive enumeration straight from the clause definition.
std::map<int, std::uint64_t, std::greater<>> naive_levels(const Instance& inst) {
  std::map<int, std::uint64_t, std::greater<>> levels;
  for (std::uint64_t z = 0; z < (std::uint64_t{1} << inst.n_vars); ++z) {
    int sat = 0;
    for (const auto& c : inst.clauses) {
      int ones = 0;
      for (auto v : c.vars) ones += (z >> v) & 1;
      sat += (c.parity == 1) == (ones % 2 == 1);
    }
    ++levels[sat];
  }
  return levels;
}

}  // namespace

TEST_CASE("triangle spectrum") {
  const auto sol = solve_exact(triangle());
  CHECK(sol.e_min == 0);
  CHECK(sol.e_max == 2);
  CHECK(sol.n_optimal == 6u);
  CHECK(sol.level_values == std::vector<int>{2, 0});
  CHECK(sol.level_counts == std::vector<std::uint64_t>{6, 2});
  CHECK(optimal_fraction(sol, 3) == doctest::Approx(0.75));
  CHECK(level_index(sol, 2) == 0u);
  CHECK(level_index(sol, 0) == 1u);
  CHECK_THROWS_AS(level_index(sol, 1), Error);
}

TEST_CASE("single 3-variable clause") {
  Instance inst;
  inst.n_vars = 3;
  inst.k = 3;
  inst.clauses = {{{0, 1, 2}, 1}};
  const auto sol = solve_exact(inst);
  CHECK(sol.e_max == 1);
  CHECK(sol.e_min == 0);
  CHECK(sol.n_optimal == 4u);
  CHECK(level_index(sol, 0) == 1u);
}

TEST_CASE("empty instance") {
  Instance inst;
  inst.n_vars = 5;
  inst.k = 3;
  const auto sol = solve_exact(inst);
  CHECK(sol.e_min == 0);
  CHECK(sol.e_max == 0);
  CHECK(sol.n_optimal == 32u);
  CHECK(optimal_fraction(sol, 5) == 1.0);
}

TEST_CASE("cap") {
  Instance inst;
  inst.n_vars = 13;
  inst.k = 3;
  try {
    solve_exact(inst, false, 12);
    FAIL("expected cap error");
  } catch (const Error& e) {
    CHECK(e.code() == "n_over_cap");
  }
}

TEST_CASE("table and levels agree with naive enumeration") {
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 6 + trial % 7;
    const auto inst = sample_instance(n, 3, 0.3 + 0.05 * trial, 1000 + trial);
    const auto sol = solve_exact(inst, true);
    REQUIRE(sol.table.size() == (std::size_t{1} << n));
    for (std::uint64_t z = 0; z < sol.table.size(); ++z) {
      if (sol.table[z] != cost(inst, assignment_from_bits(z, n))) {
        FAIL("table mismatch at z=" << z);
      }
    }
    const auto naive = naive_levels(inst);
    std::vector<int> values;
    std::vector<std::uint64_t> counts;
    for (auto [v, c] : naive) {
      values.push_back(v);
      counts.push_back(c);
    }
    CHECK(sol.level_values == values);
    CHECK(sol.level_counts == counts);
    CHECK(sol.e_max == values.front());
    CHECK(sol.e_min == values.back());
    CHECK(sol.n_optimal == counts.front());
    CHECK(std::accumulate(sol.level_counts.begin(), sol.level_counts.end(), std::uint64_t{0}) ==
          (std::uint64_t{1} << n));
  }
}

TEST_CASE("mean cost is half the clause count") {
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = sample_instance(12, 3 + trial % 5, 1.5, trial);
    const auto sol = solve_exact(inst);
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < sol.level_values.size(); ++j) {
      total += static_cast<std::uint64_t>(sol.level_values[j]) * sol.level_counts[j];
    }
    CHECK(2 * total == inst.clauses.size() << 12);
  }
}

TEST_CASE("thread count does not change the result") {
  const auto inst = sample_instance(17, 3, 1.5, 77);
  const auto one = solve_exact(inst, true, kDefaultMaxVars, 1);
  const auto four = solve_exact(inst, true, kDefaultMaxVars, 4);
  CHECK(one.level_values == four.level_values);
  CHECK(one.level_counts == four.level_counts);
  CHECK(one.table == four.table);
}
