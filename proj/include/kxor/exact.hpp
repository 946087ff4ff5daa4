#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kxor/instance.hpp"

namespace kxor {

inline constexpr int kDefaultMaxVars = 26;

/// Spectrum summary from exhaustive enumeration. Level 0 is the set of
/// assignments achieving e_max; higher levels follow in decreasing cost.
struct ExactSolution {
  int e_min = 0;
  int e_max = 0;
  std::uint64_t n_optimal = 0;
  std::vector<int> level_values;            // strictly decreasing, level_values[0] == e_max
  std::vector<std::uint64_t> level_counts;  // assignments per level
  std::vector<std::int32_t> table;          // cost of assignment z; empty unless requested
};

/// Enumerates all 2^N assignments in Gray-code order (one flipped variable per
/// step), splitting the range across `threads` workers (0 = hardware).
/// Throws Error("n_over_cap") when N > max_vars.
ExactSolution solve_exact(const Instance& instance, bool keep_table = false,
                          int max_vars = kDefaultMaxVars, int threads = 0);

/// Fraction of assignments that are optimal, n_optimal / 2^N.
double optimal_fraction(const ExactSolution& sol, int n_vars);

/// Position of cost_value among the distinct levels. Throws Error("unknown_level").
std::size_t level_index(const ExactSolution& sol, int cost_value);

}  // namespace kxor
