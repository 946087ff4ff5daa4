#include "kxor/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <tuple>

#include "kxor/error.hpp"
#include "kxor/exact.hpp"
#include "kxor/instance.hpp"
#include "kxor/parallel.hpp"
#include "kxor/rng.hpp"

namespace kxor {

namespace {

using RecordKey = std::tuple<int, int, std::uint64_t, std::uint64_t, std::string, int>;

RecordKey key_of(const EnsembleRecord& r) {
  return {r.n_vars, r.k, double_bits(r.r), r.instance_seed, r.algorithm, r.p};
}

struct Cell {
  int n_vars;
  int k;
  double r;
  int index;
  std::uint64_t seed;
};

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ';';
    out += format_double(xs[i]);
  }
  return out;
}

std::vector<int> sorted_depths(const std::vector<int>& p) {
  std::vector<int> depths(p);
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  return depths;
}

// Records a cell is expected to produce, in emission order.
std::vector<RecordKey> expected_keys(const SweepConfig& config, const Cell& cell) {
  std::vector<RecordKey> keys;
  if (config.algorithm != Algorithm::mf) {
    for (int p : sorted_depths(config.p)) keys.emplace_back(cell.n_vars, cell.k, double_bits(cell.r), cell.seed, "qaoa", p);
  }
  if (config.algorithm != Algorithm::qaoa) {
    keys.emplace_back(cell.n_vars, cell.k, double_bits(cell.r), cell.seed, "mf", 0);
  }
  return keys;
}

std::vector<EnsembleRecord> run_cell(const SweepConfig& config, const Cell& cell, int inner_threads) {
  using Clock = std::chrono::steady_clock;
  const Instance instance = sample_instance(cell.n_vars, cell.k, cell.r, cell.seed);
  const ExactSolution exact = solve_exact(instance, false, kDefaultMaxVars, 1);

  EnsembleRecord base;
  base.n_vars = cell.n_vars;
  base.k = cell.k;
  base.r = cell.r;
  base.instance_seed = cell.seed;
  base.e_min = exact.e_min;
  base.e_max = exact.e_max;
  base.n_optimal = exact.n_optimal;

  std::vector<EnsembleRecord> out;
  if (config.algorithm != Algorithm::mf) {
    const auto depths = sorted_depths(config.p);
    OptimizerConfig opt = config.optimizer;
    opt.threads = inner_threads;
    const auto start = Clock::now();
    const CostDiagonal diag = build_cost_diagonal(instance);
    const auto ladder = optimize_depth_ladder(diag, static_cast<std::size_t>(depths.back()), opt, mix_seed(cell.seed, 0x9a0aULL));
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    for (int p : depths) {
      const OptResult& res = ladder[static_cast<std::size_t>(p - 1)];
      EnsembleRecord rec = base;
      rec.p = p;
      rec.algorithm = "qaoa";
      rec.ratio = res.ratio;
      rec.value = res.f_value;
      rec.evals = res.n_evaluations;
      rec.wall_ms = config.record_timing ? ms : 0.0;
      rec.extra = "g=" + join(res.schedule.gammas) + "|b=" + join(res.schedule.betas) +
                  "|restarts=" + std::to_string(res.n_restarts_used) + "|converged=" + (res.converged ? "1" : "0");
      out.push_back(std::move(rec));
    }
  }
  if (config.algorithm != Algorithm::qaoa) {
    const auto start = Clock::now();
    const MfResult res = mf_solve(instance, config.n_catalysts, mix_seed(cell.seed, 0x3fULL), config.sigma,
                                  config.meanfield, EnergyBounds{exact.e_min, exact.e_max});
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    EnsembleRecord rec = base;
    rec.p = 0;
    rec.algorithm = "mf";
    rec.ratio = res.ratio;
    rec.value = res.e_star;
    rec.evals = res.n_steps;
    rec.wall_ms = config.record_timing ? ms : 0.0;
    rec.extra = "sigma=" + format_double(res.catalyst_sigma) + "|catalyst_seed=" + std::to_string(res.catalyst_seed) +
                "|tie=" + (res.tie ? "1" : "0") + "|rel_dev=" + format_double(res.rel_deviation) +
                "|rejected=" + std::to_string(res.n_rejected);
    out.push_back(std::move(rec));
  }
  return out;
}

template <typename T>
void read_list(const nlohmann::json& doc, const char* key, std::vector<T>& out) {
  if (!doc.contains(key)) return;
  const auto& v = doc.at(key);
  out = v.is_array() ? v.get<std::vector<T>>() : std::vector<T>{v.get<T>()};
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::qaoa:
      return "qaoa";
    case Algorithm::mf:
      return "mf";
    case Algorithm::both:
      return "both";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "qaoa") return Algorithm::qaoa;
  if (name == "mf") return Algorithm::mf;
  if (name == "both") return Algorithm::both;
  throw Error("invalid_config", "unknown algorithm '" + name + "' (expected qaoa, mf or both)");
}

void validate(const SweepConfig& c) {
  auto fail = [](const std::string& what) { throw Error("invalid_config", what); };
  if (c.n_vars.empty() || c.k.empty() || c.r.empty()) fail("n_vars, k and r lists must be non-empty");
  if (c.algorithm != Algorithm::mf && c.p.empty()) fail("p list must be non-empty for qaoa sweeps");
  for (int p : c.p) {
    if (p < 1) fail("depths must be >= 1");
  }
  if (c.ensemble < 1) fail("ensemble size must be positive");
  if (c.n_catalysts < 1) fail("n_catalysts must be positive");
  validate(c.optimizer);
}

nlohmann::json to_json(const SweepConfig& c) {
  nlohmann::json doc{{"n_vars", c.n_vars},
                     {"k", c.k},
                     {"r", c.r},
                     {"p", c.p},
                     {"ensemble", c.ensemble},
                     {"algorithm", to_string(c.algorithm)},
                     {"base_seed", c.base_seed},
                     {"n_catalysts", c.n_catalysts},
                     {"record_timing", c.record_timing},
                     {"threads", c.threads},
                     {"optimizer",
                      {{"n_random_starts", c.optimizer.n_random_starts},
                       {"shallow_depth_cutoff", c.optimizer.shallow_depth_cutoff},
                       {"local_tolerance", c.optimizer.local_tolerance},
                       {"screening_tolerance", c.optimizer.screening_tolerance},
                       {"simplex_restarts", c.optimizer.simplex_restarts},
                       {"max_evaluations", c.optimizer.max_evaluations},
                       {"initial_step", c.optimizer.initial_step}}},
                     {"meanfield",
                      {{"t_final", c.meanfield.t_final},
                       {"rel_tol", c.meanfield.rel_tol},
                       {"abs_tol", c.meanfield.abs_tol}}}};
  doc["sigma"] = c.sigma ? nlohmann::json(*c.sigma) : nlohmann::json(nullptr);
  return doc;
}

SweepConfig sweep_config_from_json(const nlohmann::json& doc, SweepConfig c) {
  try {
    read_list(doc, "n_vars", c.n_vars);
    read_list(doc, "k", c.k);
    read_list(doc, "r", c.r);
    read_list(doc, "p", c.p);
    c.ensemble = doc.value("ensemble", c.ensemble);
    if (doc.contains("algorithm")) c.algorithm = parse_algorithm(doc.at("algorithm").get<std::string>());
    c.base_seed = doc.value("base_seed", c.base_seed);
    c.n_catalysts = doc.value("n_catalysts", c.n_catalysts);
    c.record_timing = doc.value("record_timing", c.record_timing);
    c.threads = doc.value("threads", c.threads);
    if (doc.contains("sigma") && !doc.at("sigma").is_null()) c.sigma = doc.at("sigma").get<double>();
    if (doc.contains("optimizer")) {
      const auto& o = doc.at("optimizer");
      c.optimizer.n_random_starts = o.value("n_random_starts", c.optimizer.n_random_starts);
      c.optimizer.shallow_depth_cutoff = o.value("shallow_depth_cutoff", c.optimizer.shallow_depth_cutoff);
      c.optimizer.local_tolerance = o.value("local_tolerance", c.optimizer.local_tolerance);
      c.optimizer.screening_tolerance = o.value("screening_tolerance", c.optimizer.screening_tolerance);
      c.optimizer.simplex_restarts = o.value("simplex_restarts", c.optimizer.simplex_restarts);
      c.optimizer.max_evaluations = o.value("max_evaluations", c.optimizer.max_evaluations);
      c.optimizer.initial_step = o.value("initial_step", c.optimizer.initial_step);
    }
    if (doc.contains("meanfield")) {
      const auto& m = doc.at("meanfield");
      c.meanfield.t_final = m.value("t_final", c.meanfield.t_final);
      c.meanfield.rel_tol = m.value("rel_tol", c.meanfield.rel_tol);
      c.meanfield.abs_tol = m.value("abs_tol", c.meanfield.abs_tol);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid_config", e.what());
  }
  return c;
}

std::uint64_t cell_seed(std::uint64_t base_seed, int n_vars, int k, double r, int index) {
  return mix_seed(base_seed, static_cast<std::uint64_t>(n_vars), static_cast<std::uint64_t>(k), double_bits(r),
                  static_cast<std::uint64_t>(index));
}

std::vector<EnsembleRecord> run_sweep(const SweepConfig& config, const std::vector<EnsembleRecord>& existing,
                                      const std::filesystem::path* sink) {
  validate(config);

  std::vector<Cell> cells;
  for (int n : config.n_vars) {
    for (int k : config.k) {
      for (double r : config.r) {
        for (int i = 0; i < config.ensemble; ++i) cells.push_back({n, k, r, i, cell_seed(config.base_seed, n, k, r, i)});
      }
    }
  }

  std::map<RecordKey, const EnsembleRecord*> have;
  for (const auto& r : existing) have.emplace(key_of(r), &r);

  std::vector<std::vector<EnsembleRecord>> results(cells.size());
  std::vector<std::size_t> todo;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto keys = expected_keys(config, cells[c]);
    const bool done = std::all_of(keys.begin(), keys.end(), [&](const RecordKey& k) { return have.count(k) > 0; });
    if (done) {
      for (const auto& k : keys) results[c].push_back(*have.at(k));
    } else {
      todo.push_back(c);
    }
  }

  std::mutex sink_mutex;
  std::ofstream sink_stream;
  if (sink != nullptr && !todo.empty()) {
    const bool fresh = !std::filesystem::exists(*sink) || std::filesystem::file_size(*sink) == 0;
    sink_stream.open(*sink, std::ios::binary | std::ios::app);
    if (!sink_stream) throw Error("io", "cannot open " + sink->string());
    if (fresh) sink_stream << kRecordHeader << '\n' << std::flush;
  }

  const int outer = std::max(1, config.threads);
  const int inner = todo.size() >= static_cast<std::size_t>(outer) ? 1 : outer;
  parallel_for(todo.size(), outer, [&](std::size_t t) {
    const std::size_t c = todo[t];
    results[c] = run_cell(config, cells[c], inner);
    if (sink_stream.is_open()) {
      std::lock_guard lock(sink_mutex);
      for (const auto& r : results[c]) sink_stream << to_csv_row(r) << '\n';
      sink_stream.flush();
    }
  });

  std::vector<EnsembleRecord> out;
  std::set<RecordKey> emitted;
  for (auto& cell_records : results) {
    for (auto& r : cell_records) {
      emitted.insert(key_of(r));
      out.push_back(std::move(r));
    }
  }
  // Rows from earlier sweeps outside this config are kept after the canonical block.
  for (const auto& r : existing) {
    if (emitted.insert(key_of(r)).second) out.push_back(r);
  }
  return out;
}

std::vector<EnsembleRecord> run_sweep_to_file(const SweepConfig& config, const std::filesystem::path& path) {
  const std::filesystem::path partial = path.string() + ".partial";
  auto existing = read_records_csv(path);
  for (auto& r : read_records_csv(partial)) existing.push_back(std::move(r));
  auto records = run_sweep(config, existing, &partial);
  write_records_csv(path, records);
  std::error_code ec;
  std::filesystem::remove(partial, ec);
  return records;
}

}  // namespace kxor
