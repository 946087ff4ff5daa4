#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kxor/meanfield.hpp"
#include "kxor/optimizer.hpp"
#include "kxor/records.hpp"

namespace kxor {

enum class Algorithm { qaoa, mf, both };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct SweepConfig {
  std::vector<int> n_vars{12};
  std::vector<int> k{3};
  std::vector<double> r{1.5};
  std::vector<int> p{1};
  int ensemble = 10;
  Algorithm algorithm = Algorithm::qaoa;
  std::uint64_t base_seed = 1;

  OptimizerConfig optimizer;
  MfConfig meanfield;
  int n_catalysts = 1;
  /// Overrides the tabulated catalyst width when set.
  std::optional<double> sigma;

  /// Wall-clock times vary between runs; without this flag wall_ms is written as 0
  /// so reruns are byte-identical.
  bool record_timing = false;
  int threads = 1;
};

/// Throws Error("invalid_config") on empty lists or non-positive sizes.
void validate(const SweepConfig& config);

nlohmann::json to_json(const SweepConfig& config);
/// Missing keys keep their defaults. Throws Error("invalid_config").
SweepConfig sweep_config_from_json(const nlohmann::json& doc, SweepConfig base = {});

/// Seed of instance `index` in cell (n_vars, k, r); independent of p so every
/// depth sees the same ensemble.
std::uint64_t cell_seed(std::uint64_t base_seed, int n_vars, int k, double r, int index);

/// Runs every (n_vars, k, r, instance) cell and returns records in canonical order.
/// Cells whose records are all present in `existing` are not recomputed; the
/// returned list contains them unchanged. When `sink` is set, each finished
/// cell's records are appended to it as they complete.
std::vector<EnsembleRecord> run_sweep(const SweepConfig& config, const std::vector<EnsembleRecord>& existing = {},
                                      const std::filesystem::path* sink = nullptr);

/// run_sweep against a CSV file: reloads `path` and its ".partial" sidecar,
/// resumes, then rewrites `path` canonically and removes the sidecar.
std::vector<EnsembleRecord> run_sweep_to_file(const SweepConfig& config, const std::filesystem::path& path);

}  // namespace kxor
