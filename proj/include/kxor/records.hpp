#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kxor/fit.hpp"

namespace kxor {

inline constexpr const char* kRecordHeader =
    "n_vars,k,r,p,instance_seed,algorithm,ratio,value,e_min,e_max,n_optimal,wall_ms,evals,extra";

/// One (instance, algorithm, depth) result row. `value` is F_p for qaoa and E*
/// for mf; mean-field rows carry p = 0. `extra` holds schedule or catalyst
/// metadata as '|'-separated key=value pairs, lists joined with ';'.
struct EnsembleRecord {
  int n_vars = 0;
  int k = 0;
  double r = 0.0;
  int p = 0;
  std::uint64_t instance_seed = 0;
  std::string algorithm;
  double ratio = 0.0;
  double value = 0.0;
  int e_min = 0;
  int e_max = 0;
  std::uint64_t n_optimal = 0;
  double wall_ms = 0.0;
  std::uint64_t evals = 0;
  std::string extra;

  friend bool operator==(const EnsembleRecord&, const EnsembleRecord&) = default;
};

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

std::string to_csv_row(const EnsembleRecord& record);
/// Throws Error("malformed_records") on a bad row.
EnsembleRecord parse_csv_row(const std::string& line);

void write_records_csv(const std::filesystem::path& path, const std::vector<EnsembleRecord>& records);
/// Missing file -> empty list.
std::vector<EnsembleRecord> read_records_csv(const std::filesystem::path& path);

/// Looks up a value from a record's `extra` field ("" if absent).
std::string extra_field(const EnsembleRecord& record, const std::string& key);

struct Group {
  std::vector<std::string> key;  // formatted values of the group-by columns
  Summary ratio;
};

/// Groups by any of n_vars, k, r, p, algorithm (in the given order) and
/// summarizes the ratio column. Groups appear in first-seen order.
std::vector<Group> aggregate(const std::vector<EnsembleRecord>& records, const std::vector<std::string>& keys);

}  // namespace kxor
