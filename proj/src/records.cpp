#include "kxor/records.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "kxor/error.hpp"

namespace kxor {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

template <typename T>
T parse_number(const std::string& text, const char* column) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error("malformed_records", std::string("bad value '") + text + "' in column " + column);
  }
  return value;
}

double parse_real(const std::string& text, const char* column) {
  if (text == "nan") return std::nan("");
  return parse_number<double>(text, column);
}

std::string column_value(const EnsembleRecord& r, const std::string& key) {
  if (key == "n_vars") return std::to_string(r.n_vars);
  if (key == "k") return std::to_string(r.k);
  if (key == "r") return format_double(r.r);
  if (key == "p") return std::to_string(r.p);
  if (key == "algorithm") return r.algorithm;
  throw Error("invalid_argument", "cannot group by '" + key + "'");
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string to_csv_row(const EnsembleRecord& r) {
  std::ostringstream out;
  out << r.n_vars << ',' << r.k << ',' << format_double(r.r) << ',' << r.p << ',' << r.instance_seed << ','
      << r.algorithm << ',' << format_double(r.ratio) << ',' << format_double(r.value) << ',' << r.e_min << ','
      << r.e_max << ',' << r.n_optimal << ',' << format_double(r.wall_ms) << ',' << r.evals << ',' << r.extra;
  return out.str();
}

EnsembleRecord parse_csv_row(const std::string& line) {
  const auto f = split(line, ',');
  if (f.size() != 14) {
    throw Error("malformed_records", "expected 14 columns, found " + std::to_string(f.size()));
  }
  EnsembleRecord r;
  r.n_vars = parse_number<int>(f[0], "n_vars");
  r.k = parse_number<int>(f[1], "k");
  r.r = parse_real(f[2], "r");
  r.p = parse_number<int>(f[3], "p");
  r.instance_seed = parse_number<std::uint64_t>(f[4], "instance_seed");
  r.algorithm = f[5];
  r.ratio = parse_real(f[6], "ratio");
  r.value = parse_real(f[7], "value");
  r.e_min = parse_number<int>(f[8], "e_min");
  r.e_max = parse_number<int>(f[9], "e_max");
  r.n_optimal = parse_number<std::uint64_t>(f[10], "n_optimal");
  r.wall_ms = parse_real(f[11], "wall_ms");
  r.evals = parse_number<std::uint64_t>(f[12], "evals");
  r.extra = f[13];
  return r;
}

void write_records_csv(const std::filesystem::path& path, const std::vector<EnsembleRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot open " + path.string() + " for writing");
  out << kRecordHeader << '\n';
  for (const auto& r : records) out << to_csv_row(r) << '\n';
  if (!out) throw Error("io", "write failed for " + path.string());
}

std::vector<EnsembleRecord> read_records_csv(const std::filesystem::path& path) {
  std::vector<EnsembleRecord> records;
  std::ifstream in(path, std::ios::binary);
  if (!in) return records;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      first = false;
      if (line != kRecordHeader) throw Error("malformed_records", path.string() + ": unexpected header");
      continue;
    }
    if (line.empty()) continue;
    records.push_back(parse_csv_row(line));
  }
  return records;
}

std::string extra_field(const EnsembleRecord& record, const std::string& key) {
  for (const auto& item : split(record.extra, '|')) {
    const auto eq = item.find('=');
    if (eq != std::string::npos && item.compare(0, eq, key) == 0) return item.substr(eq + 1);
  }
  return {};
}

std::vector<Group> aggregate(const std::vector<EnsembleRecord>& records, const std::vector<std::string>& keys) {
  std::vector<std::vector<std::string>> order;
  std::map<std::vector<std::string>, std::vector<double>> values;
  for (const auto& r : records) {
    std::vector<std::string> key;
    key.reserve(keys.size());
    for (const auto& k : keys) key.push_back(column_value(r, k));
    auto [it, inserted] = values.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(r.ratio);
  }
  std::vector<Group> groups;
  groups.reserve(order.size());
  for (auto& key : order) {
    groups.push_back(Group{key, summarize(values[key])});
  }
  return groups;
}

}  // namespace kxor
