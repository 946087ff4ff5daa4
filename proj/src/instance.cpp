#include "kxor/instance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kxor/error.hpp"
#include "kxor/rng.hpp"

namespace kxor {

std::uint64_t Clause::mask() const noexcept {
  std::uint64_t m = 0;
  for (auto v : vars) m |= std::uint64_t{1} << v;
  return m;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return std::round(result);
}

double clause_probability(int n_vars, int k, double r) {
  if (k < 1 || k > n_vars) {
    throw Error("invalid_argument", "clause arity k=" + std::to_string(k) +
                                        " must lie in [1, n_vars=" + std::to_string(n_vars) + "]");
  }
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error("invalid_argument", "clause-to-variable ratio must be positive");
  }
  const double subsets = binomial(n_vars, k);
  const double p = r * n_vars / subsets;
  if (p > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "ratio " << r << " needs " << r * n_vars << " clauses but only " << subsets
        << " subsets of size " << k << " exist for n_vars=" << n_vars;
    throw Error("ratio_too_dense", msg.str());
  }
  return std::min(p, 1.0);
}

namespace {

// Advances `combo` to the next k-subset of [0, n) in lexicographic order.
bool next_combination(std::vector<std::uint32_t>& combo, int n) {
  const int k = static_cast<int>(combo.size());
  int i = k - 1;
  while (i >= 0 && combo[i] == static_cast<std::uint32_t>(n - k + i)) --i;
  if (i < 0) return false;
  ++combo[i];
  for (int j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
  return true;
}

}  // namespace

Instance sample_instance(int n_vars, int k, double r, std::uint64_t seed) {
  if (k < 3) {
    throw Error("invalid_argument", "generation requires k >= 3, got k=" + std::to_string(k));
  }
  const double p = clause_probability(n_vars, k, r);

  Instance inst;
  inst.n_vars = n_vars;
  inst.k = k;
  inst.seed = seed;
  inst.target_ratio = r;

  for (int attempt = 0;; ++attempt) {
    const CounterRng stream(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    std::vector<std::uint32_t> combo(k);
    for (int i = 0; i < k; ++i) combo[i] = static_cast<std::uint32_t>(i);
    std::uint64_t rank = 0;
    do {
      // Two stream entries per subset rank: inclusion draw, then parity.
      if (to_unit(stream.at(2 * rank)) < p) {
        const int parity = (stream.at(2 * rank + 1) >> 63) ? -1 : 1;
        inst.clauses.push_back(Clause{combo, parity});
      }
      ++rank;
    } while (next_combination(combo, n_vars));

    if (!inst.clauses.empty()) {
      inst.resamples = attempt;
      return inst;
    }
  }
}

bool clause_satisfied(const Clause& clause, std::span<const std::uint8_t> bits) {
  unsigned ones = 0;
  for (auto v : clause.vars) ones += bits[v] & 1u;
  const bool odd = (ones & 1u) != 0;
  return clause.parity > 0 ? odd : !odd;
}

int cost(const Instance& instance, std::span<const std::uint8_t> bits) {
  int satisfied = 0;
  for (const auto& c : instance.clauses) satisfied += clause_satisfied(c, bits) ? 1 : 0;
  return satisfied;
}

int cost_of_bits(const Instance& instance, std::uint64_t bits) {
  int satisfied = 0;
  for (const auto& c : instance.clauses) {
    const bool odd = (std::popcount(bits & c.mask()) & 1) != 0;
    satisfied += (c.parity > 0) == odd ? 1 : 0;
  }
  return satisfied;
}

Assignment assignment_from_bits(std::uint64_t bits, int n_vars) {
  Assignment a(static_cast<std::size_t>(n_vars));
  for (int i = 0; i < n_vars; ++i) a[i] = static_cast<std::uint8_t>((bits >> i) & 1u);
  return a;
}

std::uint64_t bits_from_assignment(std::span<const std::uint8_t> bits) {
  std::uint64_t z = 0;
  for (std::size_t i = 0; i < bits.size() && i < 64; ++i) {
    if (bits[i] & 1u) z |= std::uint64_t{1} << i;
  }
  return z;
}

Instance parity_flipped(Instance instance) {
  for (auto& c : instance.clauses) c.parity = -c.parity;
  return instance;
}

void validate(const Instance& inst, int min_k) {
  auto fail = [](const std::string& what) { throw Error("invalid_instance", what); };
  if (inst.n_vars <= 0) fail("n_vars must be positive");
  if (inst.k < min_k) fail("clause arity k=" + std::to_string(inst.k) + " below minimum " + std::to_string(min_k));
  if (inst.k > inst.n_vars) fail("clause arity exceeds n_vars");
  const std::vector<std::uint32_t>* previous = nullptr;
  for (std::size_t ci = 0; ci < inst.clauses.size(); ++ci) {
    const auto& c = inst.clauses[ci];
    const std::string where = "clause " + std::to_string(ci) + ": ";
    if (static_cast<int>(c.vars.size()) != inst.k) {
      fail(where + "has " + std::to_string(c.vars.size()) + " variables, expected k=" + std::to_string(inst.k));
    }
    if (c.parity != 1 && c.parity != -1) fail(where + "parity must be +1 or -1");
    for (std::size_t i = 0; i < c.vars.size(); ++i) {
      if (c.vars[i] >= static_cast<std::uint32_t>(inst.n_vars)) fail(where + "variable index out of range");
      if (i > 0 && c.vars[i] <= c.vars[i - 1]) fail(where + "variables must be strictly increasing");
    }
    if (previous != nullptr) {
      if (*previous == c.vars) fail(where + "duplicate variable subset");
      if (!std::lexicographical_compare(previous->begin(), previous->end(), c.vars.begin(), c.vars.end())) {
        fail(where + "clauses must be sorted lexicographically");
      }
    }
    previous = &c.vars;
  }
}

nlohmann::json to_json(const Instance& inst) {
  nlohmann::json clauses = nlohmann::json::array();
  for (const auto& c : inst.clauses) {
    clauses.push_back({{"vars", c.vars}, {"parity", c.parity}});
  }
  return nlohmann::json{{"n_vars", inst.n_vars},
                        {"k", inst.k},
                        {"target_ratio", inst.target_ratio},
                        {"seed", inst.seed},
                        {"resamples", inst.resamples},
                        {"clauses", std::move(clauses)}};
}

Instance instance_from_json(const nlohmann::json& doc) {
  Instance inst;
  try {
    inst.n_vars = doc.at("n_vars").get<int>();
    inst.k = doc.at("k").get<int>();
    inst.target_ratio = doc.at("target_ratio").get<double>();
    inst.seed = doc.at("seed").get<std::uint64_t>();
    inst.resamples = doc.value("resamples", 0);
    for (const auto& c : doc.at("clauses")) {
      inst.clauses.push_back(Clause{c.at("vars").get<std::vector<std::uint32_t>>(), c.at("parity").get<int>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed_instance", e.what());
  }
  // Files may list clauses in any order; duplicates are still rejected.
  std::vector<std::vector<std::uint32_t>> seen;
  for (const auto& c : inst.clauses) seen.push_back(c.vars);
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw Error("invalid_instance", "duplicate variable subset");
  }
  std::sort(inst.clauses.begin(), inst.clauses.end(),
            [](const Clause& a, const Clause& b) { return a.vars < b.vars; });
  validate(inst, 2);
  return inst;
}

void write_instance(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot open " + path.string() + " for writing");
  out << to_json(instance).dump(1) << '\n';
  if (!out) throw Error("io", "write failed for " + path.string());
}

Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed_instance", path.string() + ": " + e.what());
  }
  return instance_from_json(doc);
}

}  // namespace kxor
