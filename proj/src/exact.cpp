#include "kxor/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "kxor/error.hpp"
#include "kxor/parallel.hpp"

namespace kxor {

namespace {

constexpr int kMinChunkBits = 16;

struct Incidence {
  std::vector<std::vector<std::uint32_t>> clauses_of_var;
};

Incidence build_incidence(const Instance& inst) {
  Incidence inc;
  inc.clauses_of_var.resize(static_cast<std::size_t>(inst.n_vars));
  for (std::size_t c = 0; c < inst.clauses.size(); ++c) {
    for (auto v : inst.clauses[c].vars) inc.clauses_of_var[v].push_back(static_cast<std::uint32_t>(c));
  }
  return inc;
}

// Walks Gray indices [begin, end), accumulating a histogram of costs and
// optionally writing table[z] for each visited assignment z.
void enumerate_range(const Instance& inst, const Incidence& inc, std::uint64_t begin, std::uint64_t end,
                     std::vector<std::uint64_t>& histogram, std::int32_t* table) {
  const std::uint64_t first = begin ^ (begin >> 1);
  std::vector<std::uint8_t> satisfied(inst.clauses.size());
  int current = 0;
  for (std::size_t c = 0; c < inst.clauses.size(); ++c) {
    const auto& clause = inst.clauses[c];
    const bool odd = (std::popcount(first & clause.mask()) & 1) != 0;
    satisfied[c] = (clause.parity > 0) == odd ? 1 : 0;
    current += satisfied[c];
  }
  std::uint64_t z = first;
  for (std::uint64_t g = begin;;) {
    ++histogram[static_cast<std::size_t>(current)];
    if (table != nullptr) table[z] = current;
    if (++g == end) break;
    // Gray step g-1 -> g flips the lowest set bit of g.
    const int flip = std::countr_zero(g);
    z ^= std::uint64_t{1} << flip;
    for (auto c : inc.clauses_of_var[static_cast<std::size_t>(flip)]) {
      current += satisfied[c] ? -1 : 1;
      satisfied[c] ^= 1;
    }
  }
}

}  // namespace

ExactSolution solve_exact(const Instance& instance, bool keep_table, int max_vars, int threads) {
  if (instance.n_vars > max_vars || instance.n_vars > 62) {
    throw Error("n_over_cap", "n_vars=" + std::to_string(instance.n_vars) +
                                  " exceeds the exact-enumeration cap of " + std::to_string(max_vars));
  }
  if (instance.n_vars <= 0) throw Error("invalid_instance", "n_vars must be positive");

  const int n = instance.n_vars;
  const std::uint64_t total = std::uint64_t{1} << n;
  const Incidence inc = build_incidence(instance);
  const std::size_t n_levels_max = instance.clauses.size() + 1;

  ExactSolution sol;
  if (keep_table) sol.table.assign(total, 0);
  std::int32_t* table = keep_table ? sol.table.data() : nullptr;

  const int chunk_bits = std::max(0, n - kMinChunkBits);
  const std::uint64_t n_chunks = std::min<std::uint64_t>(std::uint64_t{1} << chunk_bits, 256);
  const std::uint64_t chunk = total / n_chunks;
  std::vector<std::vector<std::uint64_t>> partial(n_chunks, std::vector<std::uint64_t>(n_levels_max, 0));
  parallel_for(static_cast<std::size_t>(n_chunks), threads, [&](std::size_t i) {
    enumerate_range(instance, inc, i * chunk, (i + 1) * chunk, partial[i], table);
  });

  std::vector<std::uint64_t> histogram(n_levels_max, 0);
  for (const auto& h : partial) {
    for (std::size_t c = 0; c < n_levels_max; ++c) histogram[c] += h[c];
  }

  for (std::size_t c = n_levels_max; c-- > 0;) {
    if (histogram[c] == 0) continue;
    sol.level_values.push_back(static_cast<int>(c));
    sol.level_counts.push_back(histogram[c]);
  }
  sol.e_max = sol.level_values.front();
  sol.e_min = sol.level_values.back();
  sol.n_optimal = sol.level_counts.front();
  return sol;
}

double optimal_fraction(const ExactSolution& sol, int n_vars) {
  return std::ldexp(static_cast<double>(sol.n_optimal), -n_vars);
}

std::size_t level_index(const ExactSolution& sol, int cost_value) {
  const auto it = std::find(sol.level_values.begin(), sol.level_values.end(), cost_value);
  if (it == sol.level_values.end()) {
    throw Error("unknown_level", "cost value " + std::to_string(cost_value) + " does not occur");
  }
  return static_cast<std::size_t>(it - sol.level_values.begin());
}

}  // namespace kxor
