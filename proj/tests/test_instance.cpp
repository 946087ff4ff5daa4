#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "kxor/error.hpp"
#include "kxor/instance.hpp"
#include "kxor/rng.hpp"

using namespace kxor;

namespace {

Instance triangle() {
  Instance t;
  t.n_vars = 3;
  t.k = 2;
  t.clauses = {{{0, 1}, 1}, {{0, 2}, 1}, {{1, 2}, 1}};
  return t;
}

std::string error_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "kxor_test_instance";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("clause probability") {
  CHECK(clause_probability(15, 3, 1.0) == doctest::Approx(15.0 / 455.0).epsilon(1e-14));
  CHECK(clause_probability(5, 5, 0.2) == doctest::Approx(1.0));
  CHECK(error_code([] { clause_probability(4, 3, 2.0); }) == "ratio_too_dense");
  CHECK(error_code([] { clause_probability(4, 5, 0.5); }) == "invalid_argument");
  CHECK(error_code([] { clause_probability(4, 3, 0.0); }) == "invalid_argument");
  CHECK(binomial(15, 3) == 455.0);
  CHECK(binomial(12, 0) == 1.0);
}

TEST_CASE("3-variable truth table, parity +1") {
  const Clause c{{0, 1, 2}, 1};
  // rows x1 x2 x3 -> outcome, in table order
  const int expect[8] = {0, 1, 1, 0, 1, 0, 0, 1};
  for (int row = 0; row < 8; ++row) {
    const Assignment a{static_cast<std::uint8_t>((row >> 2) & 1), static_cast<std::uint8_t>((row >> 1) & 1),
                       static_cast<std::uint8_t>(row & 1)};
    CHECK(clause_satisfied(c, a) == (expect[row] == 1));
  }
  CHECK(clause_satisfied(Clause{{0, 1, 2}, -1}, Assignment{0, 0, 0}));
}

TEST_CASE("triangle cost") {
  const auto t = triangle();
  CHECK(cost(t, Assignment{0, 1, 1}) == 2);
  CHECK(cost(t, Assignment{0, 0, 0}) == 0);
  CHECK(cost(t, Assignment{1, 1, 1}) == 0);
  Instance empty;
  empty.n_vars = 4;
  empty.k = 3;
  CHECK(cost(empty, Assignment{1, 0, 1, 1}) == 0);
}

TEST_CASE("bit packing is little-endian") {
  const auto a = assignment_from_bits(0b1101, 5);
  CHECK(a == Assignment{1, 0, 1, 1, 0});
  CHECK(bits_from_assignment(a) == 0b1101u);
  const auto inst = sample_instance(9, 3, 1.0, 5);
  for (std::uint64_t z = 0; z < (1u << 9); z += 7) CHECK(cost_of_bits(inst, z) == cost(inst, assignment_from_bits(z, 9)));
}

TEST_CASE("sampling is deterministic, sorted and distinct") {
  const auto a = sample_instance(12, 4, 1.5, 99);
  const auto b = sample_instance(12, 4, 1.5, 99);
  CHECK(a == b);
  CHECK(a.clauses != sample_instance(12, 4, 1.5, 100).clauses);
  CHECK_NOTHROW(validate(a, 3));
  for (const auto& c : a.clauses) CHECK(c.vars.size() == 4u);
  CHECK(a.target_ratio == 1.5);
  CHECK(a.seed == 99u);
}

TEST_CASE("boundary density yields the single full subset") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = sample_instance(5, 5, 0.2, seed);
    REQUIRE(inst.clauses.size() == 1u);
    CHECK(inst.clauses[0].vars == std::vector<std::uint32_t>{0, 1, 2, 3, 4});
  }
}

TEST_CASE("generation rejects k below 3") {
  CHECK(error_code([] { sample_instance(6, 2, 0.5, 1); }) == "invalid_argument");
  CHECK(error_code([] { sample_instance(4, 3, 2.0, 1); }) == "ratio_too_dense");
}

TEST_CASE("clause count is binomial") {
  // N=15, k=3, r=1.5: C(15,3)=455 subsets, mean 22.5
  const int n = 15, k = 3;
  const double r = 1.5;
  const double subsets = 455.0;
  const double prob = r * n / subsets;
  const int seeds = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const auto inst = sample_instance(n, k, r, mix_seed(17, s));
    const double m = static_cast<double>(inst.clauses.size());
    sum += m;
    sum_sq += m * m;
  }
  const double mean = sum / seeds;
  const double var = sum_sq / seeds - mean * mean;
  const double se = std::sqrt(subsets * prob * (1.0 - prob) / seeds);
  CHECK(std::abs(mean - 22.5) < 3.0 * se);
  CHECK(var == doctest::Approx(subsets * prob * (1.0 - prob)).epsilon(0.1));
}

TEST_CASE("parities are balanced") {
  int plus = 0, total = 0;
  for (int s = 0; s < 500; ++s) {
    for (const auto& c : sample_instance(10, 3, 2.0, s).clauses) {
      plus += c.parity == 1;
      ++total;
    }
  }
  const double frac = static_cast<double>(plus) / total;
  CHECK(std::abs(frac - 0.5) < 3.0 * std::sqrt(0.25 / total));
}

TEST_CASE("sparse draws never come back empty") {
  int resampled = 0;
  for (int s = 0; s < 300; ++s) {
    const auto inst = sample_instance(6, 3, 0.05, s);
    CHECK(!inst.clauses.empty());
    resampled += inst.resamples > 0;
  }
  // (1 - 0.3/20)^20 ~ 0.74 of first draws are empty
  CHECK(resampled > 150);
}

TEST_CASE("flipping a variable inside a clause flips satisfaction") {
  CounterRng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = sample_instance(10, 3 + trial % 4, 1.0, trial);
    for (const auto& c : inst.clauses) {
      auto a = assignment_from_bits(rng() & 0x3ff, 10);
      const bool before = clause_satisfied(c, a);
      const auto v = c.vars[rng() % c.vars.size()];
      a[v] ^= 1;
      CHECK(clause_satisfied(c, a) != before);
    }
  }
}

TEST_CASE("opposite parities partition the assignments") {
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = sample_instance(8, 3 + trial % 3, 1.5, trial);
    const auto flipped = parity_flipped(inst);
    const int m = static_cast<int>(inst.clauses.size());
    for (std::uint64_t z = 0; z < 256; ++z) CHECK(cost_of_bits(inst, z) + cost_of_bits(flipped, z) == m);
  }
}

TEST_CASE("total cost over all assignments is |M| 2^(N-1)") {
  const auto inst = sample_instance(9, 4, 1.5, 8);
  long total = 0;
  for (std::uint64_t z = 0; z < 512; ++z) total += cost_of_bits(inst, z);
  CHECK(total == static_cast<long>(inst.clauses.size()) * 256);
}

TEST_CASE("file round trip") {
  const auto inst = sample_instance(11, 3, 1.2, 4242);
  const auto path = scratch("roundtrip.json");
  write_instance(inst, path);
  CHECK(read_instance(path) == inst);

  const auto t = triangle();
  write_instance(t, scratch("triangle.json"));
  CHECK(read_instance(scratch("triangle.json")) == t);
}

TEST_CASE("loading sorts clauses") {
  auto doc = to_json(triangle());
  std::swap(doc["clauses"][0], doc["clauses"][2]);
  CHECK(instance_from_json(doc) == triangle());
}

TEST_CASE("load errors") {
  auto doc = to_json(sample_instance(8, 3, 1.0, 1));
  SUBCASE("duplicate subset") {
    doc["clauses"].push_back(doc["clauses"][0]);
    doc["clauses"].back()["parity"] = -doc["clauses"][0]["parity"].get<int>();
    CHECK(error_code([&] { instance_from_json(doc); }) == "invalid_instance");
  }
  SUBCASE("clause of size k-1") {
    doc["clauses"].push_back(nlohmann::json{{"vars", {5, 6}}, {"parity", 1}});
    CHECK(error_code([&] { instance_from_json(doc); }) == "invalid_instance");
  }
  SUBCASE("variable out of range") {
    doc["clauses"].push_back(nlohmann::json{{"vars", {5, 6, 8}}, {"parity", 1}});
    CHECK(error_code([&] { instance_from_json(doc); }) == "invalid_instance");
  }
  SUBCASE("bad parity") {
    doc["clauses"][0]["parity"] = 0;
    CHECK(error_code([&] { instance_from_json(doc); }) == "invalid_instance");
  }
  SUBCASE("missing field") {
    doc.erase("n_vars");
    CHECK(error_code([&] { instance_from_json(doc); }) == "malformed_instance");
  }
  SUBCASE("not json") {
    const auto path = scratch("garbage.json");
    std::ofstream(path) << "{ n_vars: ";
    CHECK(error_code([&] { read_instance(path); }) == "malformed_instance");
  }
}
