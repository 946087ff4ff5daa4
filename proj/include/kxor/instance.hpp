#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace kxor {

/// One XOR constraint over `vars` (strictly increasing indices).
/// parity = +1: satisfied when an odd number of the variables are 1.
/// parity = -1: satisfied when an even number are 1.
struct Clause {
  std::vector<std::uint32_t> vars;
  int parity = 1;

  /// Bitmask of the clause variables; valid only when every index is < 64.
  std::uint64_t mask() const noexcept;

  friend bool operator==(const Clause&, const Clause&) = default;
};

/// A random Max-kXOR instance. Clauses are kept in lexicographic order of
/// their variable subsets and no subset appears twice.
struct Instance {
  int n_vars = 0;
  int k = 0;
  std::vector<Clause> clauses;
  std::uint64_t seed = 0;
  double target_ratio = 0.0;
  /// Number of draws rejected because they produced no clauses.
  int resamples = 0;

  double realized_ratio() const noexcept {
    return n_vars > 0 ? static_cast<double>(clauses.size()) / n_vars : 0.0;
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Bit i of an assignment is variable x_i.
using Assignment = std::vector<std::uint8_t>;

/// Per-subset inclusion probability r*N / C(N,k). Throws Error("ratio_too_dense")
/// when that exceeds 1 and Error("invalid_argument") for k outside [1, N] or r <= 0.
double clause_probability(int n_vars, int k, double r);

/// Binomial coefficient as a double (exact up to 2^53).
double binomial(int n, int k);

/// Includes each k-subset independently with clause_probability and gives it a
/// uniformly random parity. Deterministic in (n_vars, k, r, seed); draws with zero
/// clauses are rejected and redrawn with the next sub-seed. Requires k >= 3.
Instance sample_instance(int n_vars, int k, double r, std::uint64_t seed);

bool clause_satisfied(const Clause& clause, std::span<const std::uint8_t> bits);

/// Number of satisfied clauses.
int cost(const Instance& instance, std::span<const std::uint8_t> bits);

/// cost() for an assignment packed little-endian into an integer (bit i = x_i).
int cost_of_bits(const Instance& instance, std::uint64_t bits);

Assignment assignment_from_bits(std::uint64_t bits, int n_vars);
std::uint64_t bits_from_assignment(std::span<const std::uint8_t> bits);

/// Same clauses with every parity negated.
Instance parity_flipped(Instance instance);

/// Throws Error("invalid_instance") if any structural invariant is violated.
/// `min_k` is the smallest clause arity accepted (2 for evaluation, 3 for generation).
void validate(const Instance& instance, int min_k = 2);

nlohmann::json to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& doc);

/// Writes the JSON instance document. Throws Error("io") on failure.
void write_instance(const Instance& instance, const std::filesystem::path& path);

/// Reads and validates an instance file. Throws Error("malformed_instance") for
/// unparsable files and Error("invalid_instance") for invariant violations.
Instance read_instance(const std::filesystem::path& path);

}  // namespace kxor
