// kxor: command-line driver for Max-kXOR instance generation, exact solving,
// QAOA and mean-field runs, ensemble sweeps and fits.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kxor/error.hpp"
#include "kxor/exact.hpp"
#include "kxor/fit.hpp"
#include "kxor/instance.hpp"
#include "kxor/meanfield.hpp"
#include "kxor/optimizer.hpp"
#include "kxor/qaoa.hpp"
#include "kxor/records.hpp"
#include "kxor/sweep.hpp"

namespace fs = std::filesystem;
using namespace kxor;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct OptimizerFlags {
  int starts = 50;
  int cutoff = 3;
  double tolerance = 1e-6;
  double screen_tolerance = 1e-4;
  std::size_t max_evals = 5000;
  int threads = 1;

  void add_to(CLI::App* app) {
    app->add_option("--starts", starts, "random starting points per shallow depth")->check(CLI::PositiveNumber);
    app->add_option("--cutoff", cutoff, "deepest layer optimized by random multistart")->check(CLI::PositiveNumber);
    app->add_option("--tol", tolerance, "local stopping tolerance on F_p")->check(CLI::PositiveNumber);
    app->add_option("--screen-tol", screen_tolerance, "looser tolerance for the random starts before polishing")
        ->check(CLI::PositiveNumber);
    app->add_option("--max-evals", max_evals, "evaluation budget per local run")->check(CLI::PositiveNumber);
    app->add_option("--threads", threads, "worker threads (0 = all cores)");
  }

  OptimizerConfig config() const {
    OptimizerConfig c;
    c.n_random_starts = starts;
    c.shallow_depth_cutoff = cutoff;
    c.local_tolerance = tolerance;
    c.screening_tolerance = screen_tolerance;
    c.max_evaluations = max_evals;
    c.threads = threads;
    return c;
  }
};

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ";" : "") + format_double(xs[i]);
  return out;
}

EnsembleRecord base_record(const Instance& inst, const ExactSolution& sol) {
  EnsembleRecord rec;
  rec.n_vars = inst.n_vars;
  rec.k = inst.k;
  rec.r = inst.target_ratio;
  rec.instance_seed = inst.seed;
  rec.e_min = sol.e_min;
  rec.e_max = sol.e_max;
  rec.n_optimal = sol.n_optimal;
  return rec;
}

void emit(const EnsembleRecord& rec, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << kRecordHeader << '\n' << to_csv_row(rec) << '\n';
  } else {
    write_records_csv(out_path, {rec});
  }
}

std::string instance_filename(int n, int k, double r, std::uint64_t seed, int index) {
  std::ostringstream name;
  name << "kxor_n" << n << "_k" << k << "_r" << format_double(r) << "_s" << seed << "_" << index << ".json";
  return name.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-kXOR benchmark harness: QAOA simulation, mean-field dynamics and ensemble analysis"};
  app.require_subcommand(1);

  // generate
  int gen_n = 12, gen_k = 3, gen_count = 1;
  double gen_r = 1.5;
  std::uint64_t gen_seed = 1;
  std::string gen_out = ".";
  auto* generate = app.add_subcommand("generate", "sample random instances into JSON files");
  generate->add_option("--n-vars", gen_n, "number of variables")->required();
  generate->add_option("--k", gen_k, "variables per clause")->required();
  generate->add_option("--ratio", gen_r, "clause-to-variable ratio")->required();
  generate->add_option("--count", gen_count, "number of instances")->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen_seed, "base seed");
  generate->add_option("--out", gen_out, "output directory");

  // exact
  std::string exact_path;
  int exact_cap = kDefaultMaxVars;
  bool exact_header = false;
  auto* exact = app.add_subcommand("exact", "brute-force spectrum summary: e_min,e_max,n_optimal,P0");
  exact->add_option("instance", exact_path, "instance file")->required();
  exact->add_option("--max-vars", exact_cap, "enumeration cap");
  exact->add_flag("--header", exact_header, "print a header line first");

  // qaoa
  std::string qaoa_path, qaoa_out, qaoa_levels;
  int qaoa_depth = 1;
  std::uint64_t qaoa_seed = 1;
  std::vector<double> qaoa_gammas, qaoa_betas;
  OptimizerFlags qaoa_opt;
  auto* qaoa = app.add_subcommand("qaoa", "optimize (or evaluate fixed) QAOA angles on one instance");
  qaoa->add_option("instance", qaoa_path, "instance file")->required();
  qaoa->add_option("--depth", qaoa_depth, "number of layers p")->check(CLI::PositiveNumber);
  qaoa->add_option("--seed", qaoa_seed, "optimizer seed");
  qaoa->add_option("--gammas", qaoa_gammas, "fixed phase angles; skips optimization")->delimiter(',');
  qaoa->add_option("--betas", qaoa_betas, "fixed mixer angles; skips optimization")->delimiter(',');
  qaoa->add_option("--out", qaoa_out, "write the record CSV here instead of stdout");
  qaoa->add_option("--levels", qaoa_levels, "also write the final level distribution (JSON) here");
  qaoa_opt.add_to(qaoa);

  // mf
  std::string mf_path, mf_out, mf_traj;
  std::optional<double> mf_sigma;
  int mf_catalysts = 1, mf_dump_every = 100;
  std::uint64_t mf_seed = 1;
  MfConfig mf_config;
  auto* mf = app.add_subcommand("mf", "mean-field spin dynamics with a random catalyst");
  mf->add_option("instance", mf_path, "instance file")->required();
  mf->add_option("--sigma", mf_sigma, "catalyst width (default: table value for k, r)");
  mf->add_option("--catalysts", mf_catalysts, "independent catalysts; best result is kept")->check(CLI::PositiveNumber);
  mf->add_option("--seed", mf_seed, "catalyst seed");
  mf->add_option("--t-final", mf_config.t_final, "final time")->check(CLI::PositiveNumber);
  mf->add_option("--rtol", mf_config.rel_tol, "relative step tolerance")->check(CLI::PositiveNumber);
  mf->add_option("--atol", mf_config.abs_tol, "absolute step tolerance")->check(CLI::PositiveNumber);
  mf->add_option("--trajectory", mf_traj, "dump spin components to this file (single catalyst only)");
  mf->add_option("--dump-every", mf_dump_every, "steps between trajectory rows")->check(CLI::PositiveNumber);
  mf->add_option("--out", mf_out, "write the record CSV here instead of stdout");

  // sweep
  std::string sweep_config_path, sweep_out = "sweep_out", sweep_algorithm;
  std::vector<int> sweep_n, sweep_k, sweep_p;
  std::vector<double> sweep_r;
  int sweep_ensemble = 0, sweep_threads = 1, sweep_starts = 0, sweep_catalysts = 0;
  std::uint64_t sweep_seed = 0;
  double sweep_t_final = 0.0;
  bool sweep_timing = false;
  auto* sweep = app.add_subcommand("sweep", "run an ensemble sweep into <out>/records.csv (resumable)");
  sweep->add_option("--config", sweep_config_path, "JSON sweep configuration");
  auto* o_n = sweep->add_option("--n-vars", sweep_n, "system sizes")->delimiter(',');
  auto* o_k = sweep->add_option("--k", sweep_k, "clause sizes")->delimiter(',');
  auto* o_r = sweep->add_option("--ratio", sweep_r, "clause-to-variable ratios")->delimiter(',');
  auto* o_p = sweep->add_option("--depth", sweep_p, "QAOA depths")->delimiter(',');
  auto* o_e = sweep->add_option("--ensemble", sweep_ensemble, "instances per cell");
  auto* o_s = sweep->add_option("--seed", sweep_seed, "base seed");
  auto* o_a = sweep->add_option("--algorithm", sweep_algorithm, "qaoa | mf | both");
  auto* o_st = sweep->add_option("--starts", sweep_starts, "random starts per shallow depth");
  auto* o_c = sweep->add_option("--catalysts", sweep_catalysts, "catalysts per mean-field run");
  auto* o_tf = sweep->add_option("--t-final", sweep_t_final, "mean-field final time");
  auto* o_t = sweep->add_option("--threads", sweep_threads, "worker threads");
  auto* o_tm = sweep->add_flag("--record-timing", sweep_timing, "store wall-clock times (breaks byte-identical reruns)");
  sweep->add_option("--out", sweep_out, "output directory");

  // fit
  std::string fit_records, fit_model = "log", fit_out, fit_algorithm = "qaoa";
  std::vector<double> fit_targets{0.99};
  bool fit_exclude_first = false;
  auto* fit = app.add_subcommand("fit", "log fits of ratio vs depth per k, depth extrapolation, growth fits");
  fit->add_option("records", fit_records, "records CSV from sweep")->required();
  fit->add_option("--model", fit_model, "log | exponential | power");
  fit->add_option("--targets", fit_targets, "ratio targets for depth extrapolation")->delimiter(',');
  fit->add_flag("--exclude-first", fit_exclude_first, "drop the smallest depth from each log fit");
  fit->add_option("--algorithm", fit_algorithm, "record algorithm to fit");
  fit->add_option("--out", fit_out, "write the JSON report here instead of stdout");

  // poisson
  std::optional<double> poisson_mu;
  int poisson_levels = 8, poisson_depth = 1;
  std::string poisson_instance;
  std::uint64_t poisson_seed = 1;
  OptimizerFlags poisson_opt;
  auto* poisson = app.add_subcommand("poisson", "Poisson reference for energy-level distributions");
  poisson->add_option("--mu", poisson_mu, "mean level index");
  poisson->add_option("--instance", poisson_instance, "optimize QAOA on this instance and compare its levels");
  poisson->add_option("--depth", poisson_depth, "QAOA depth for --instance")->check(CLI::PositiveNumber);
  poisson->add_option("--seed", poisson_seed, "optimizer seed for --instance");
  poisson->add_option("--max-level", poisson_levels, "highest level reported")->check(CLI::NonNegativeNumber);
  poisson_opt.add_to(poisson);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*generate) {
      fs::create_directories(gen_out);
      for (int i = 0; i < gen_count; ++i) {
        const auto seed = cell_seed(gen_seed, gen_n, gen_k, gen_r, i);
        const auto inst = sample_instance(gen_n, gen_k, gen_r, seed);
        const auto path = fs::path(gen_out) / instance_filename(gen_n, gen_k, gen_r, gen_seed, i);
        write_instance(inst, path);
        std::cout << path.string() << '\n';
      }
    } else if (*exact) {
      const auto inst = read_instance(exact_path);
      const auto sol = solve_exact(inst, false, exact_cap);
      if (exact_header) std::cout << "e_min,e_max,n_optimal,p0\n";
      std::cout << sol.e_min << ',' << sol.e_max << ',' << sol.n_optimal << ','
                << format_double(optimal_fraction(sol, inst.n_vars)) << '\n';
    } else if (*qaoa) {
      const auto inst = read_instance(qaoa_path);
      const auto sol = solve_exact(inst);
      const auto diag = build_cost_diagonal(inst);
      EnsembleRecord rec = base_record(inst, sol);
      rec.algorithm = "qaoa";
      OptResult res;
      if (!qaoa_gammas.empty() || !qaoa_betas.empty()) {
        if (qaoa_gammas.size() != qaoa_betas.size() || qaoa_gammas.empty()) {
          throw Error("invalid_schedule", "--gammas and --betas need the same nonzero length");
        }
        res.schedule = AngleSchedule{qaoa_gammas, qaoa_betas};
        res.f_value = evaluate(diag, res.schedule);
        res.ratio = approximation_ratio(res.f_value, sol.e_min, sol.e_max);
        res.n_evaluations = 1;
        res.converged = true;
        rec.extra = "mode=fixed";
      } else {
        const auto ladder =
            optimize_depth_ladder(diag, static_cast<std::size_t>(qaoa_depth), qaoa_opt.config(), qaoa_seed);
        res = ladder.back();
        rec.extra = "mode=optimized";
      }
      rec.p = static_cast<int>(res.schedule.depth());
      rec.ratio = res.ratio;
      rec.value = res.f_value;
      rec.evals = res.n_evaluations;
      rec.extra += "|g=" + join(res.schedule.gammas) + "|b=" + join(res.schedule.betas) +
                   "|converged=" + (res.converged ? "1" : "0");
      emit(rec, qaoa_out);
      if (!qaoa_levels.empty()) {
        const auto probs = level_distribution(evolve(diag, res.schedule), diag, sol);
        std::ofstream out(qaoa_levels);
        out << nlohmann::json{{"level_values", sol.level_values}, {"probabilities", probs},
                              {"mean_index", mean_level_index(probs)}}.dump(1)
            << '\n';
      }
    } else if (*mf) {
      const auto inst = read_instance(mf_path);
      const auto sol = solve_exact(inst);
      std::ofstream traj;
      if (!mf_traj.empty()) {
        if (mf_catalysts != 1) throw Error("invalid_argument", "--trajectory needs --catalysts 1");
        traj.open(mf_traj);
        if (!traj) throw Error("io", "cannot open " + mf_traj);
        traj.precision(10);
        write_trajectory_header(traj, inst.n_vars);
        std::size_t step = 0;
        mf_config.observer = [&](const SpinState& s) {
          if (step++ % static_cast<std::size_t>(mf_dump_every) == 0) write_trajectory_row(traj, s);
        };
      }
      const auto res = mf_solve(inst, mf_catalysts, mf_seed, mf_sigma, mf_config, EnergyBounds{sol.e_min, sol.e_max});
      if (traj.is_open()) write_trajectory_row(traj, res.final_spins);
      EnsembleRecord rec = base_record(inst, sol);
      rec.algorithm = "mf";
      rec.ratio = res.ratio;
      rec.value = res.e_star;
      rec.evals = res.n_steps;
      std::string bits;
      for (auto b : res.bitstring) bits += static_cast<char>('0' + b);
      rec.extra = "sigma=" + format_double(res.catalyst_sigma) + "|catalyst_seed=" + std::to_string(res.catalyst_seed) +
                  "|tie=" + (res.tie ? "1" : "0") + "|rel_dev=" + format_double(res.rel_deviation) + "|bits=" + bits;
      emit(rec, mf_out);
      if (res.tie) std::cerr << "warning: tie: some final n^z were exactly zero; assigned bit 0\n";
    } else if (*sweep) {
      SweepConfig config;
      if (!sweep_config_path.empty()) {
        std::ifstream in(sweep_config_path);
        if (!in) throw Error("io", "cannot open " + sweep_config_path);
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw Error("invalid_config", e.what());
        }
        config = sweep_config_from_json(doc);
      }
      if (o_n->count()) config.n_vars = sweep_n;
      if (o_k->count()) config.k = sweep_k;
      if (o_r->count()) config.r = sweep_r;
      if (o_p->count()) config.p = sweep_p;
      if (o_e->count()) config.ensemble = sweep_ensemble;
      if (o_s->count()) config.base_seed = sweep_seed;
      if (o_a->count()) config.algorithm = parse_algorithm(sweep_algorithm);
      if (o_st->count()) config.optimizer.n_random_starts = sweep_starts;
      if (o_c->count()) config.n_catalysts = sweep_catalysts;
      if (o_tf->count()) config.meanfield.t_final = sweep_t_final;
      if (o_t->count()) config.threads = sweep_threads;
      if (o_tm->count()) config.record_timing = sweep_timing;
      validate(config);

      fs::create_directories(sweep_out);
      {
        // Thread count does not affect results, so it is left out of the echoed config.
        auto resolved = to_json(config);
        resolved.erase("threads");
        std::ofstream echo(fs::path(sweep_out) / "config.resolved.json");
        echo << resolved.dump(1) << '\n';
      }
      const auto path = fs::path(sweep_out) / "records.csv";
      const auto records = run_sweep_to_file(config, path);
      std::cout << path.string() << ": " << records.size() << " records\n";
    } else if (*fit) {
      const auto model = parse_fit_model(fit_model);
      const auto records = read_records_csv(fit_records);
      if (records.empty()) throw Error("malformed_records", "no records in " + fit_records);

      // Mean ratio per (k, p) for the selected algorithm.
      std::map<int, std::vector<EnsembleRecord>> by_k;
      for (const auto& r : records) {
        if (r.algorithm == fit_algorithm) by_k[r.k].push_back(r);
      }
      nlohmann::json report{{"model", to_string(model)},
                            {"algorithm", fit_algorithm},
                            {"exclude_first", fit_exclude_first},
                            {"weighting", "unweighted ensemble means"},
                            {"per_k", nlohmann::json::array()}};
      std::map<double, std::vector<Point>> crossings;  // target -> (k, p*)
      for (const auto& [k, rows] : by_k) {
        std::vector<Point> pts;
        for (const auto& g : aggregate(rows, {"p"})) pts.push_back({std::stod(g.key[0]), g.ratio.mean});
        nlohmann::json entry{{"k", k}};
        nlohmann::json points = nlohmann::json::array();
        for (const auto& p : pts) points.push_back({p.x, p.y});
        entry["points"] = points;
        try {
          const auto lf = fit_log(pts, fit_exclude_first);
          entry["log_fit"] = to_json(lf);
          nlohmann::json depths = nlohmann::json::object();
          for (double target : fit_targets) {
            try {
              const double p_star = extrapolate_depth(lf, target);
              depths[format_double(target)] = p_star;
              crossings[target].push_back({static_cast<double>(k), p_star});
            } catch (const Error& e) {
              depths[format_double(target)] = e.code();
            }
          }
          entry["p_star"] = depths;
        } catch (const Error& e) {
          entry["log_fit"] = e.code();
        }
        report["per_k"].push_back(entry);
      }
      if (model != FitModel::log) {
        nlohmann::json growth = nlohmann::json::object();
        for (const auto& [target, pts] : crossings) {
          try {
            growth[format_double(target)] = to_json(fit_growth(pts, model));
          } catch (const Error& e) {
            growth[format_double(target)] = e.code();
          }
        }
        report["growth_fits"] = growth;
      }
      if (fit_out.empty()) {
        std::cout << report.dump(1) << '\n';
      } else {
        std::ofstream out(fit_out);
        out << report.dump(1) << '\n';
      }
    } else if (*poisson) {
      if (poisson_mu.has_value() == !poisson_instance.empty()) {
        throw Error("invalid_argument", "give exactly one of --mu or --instance");
      }
      std::vector<double> observed;
      double mu = poisson_mu.value_or(0.0);
      if (!poisson_instance.empty()) {
        const auto inst = read_instance(poisson_instance);
        const auto sol = solve_exact(inst);
        const auto diag = build_cost_diagonal(inst);
        const auto ladder = optimize_depth_ladder(diag, static_cast<std::size_t>(poisson_depth), poisson_opt.config(),
                                                  poisson_seed);
        observed = level_distribution(evolve(diag, ladder.back().schedule), diag, sol);
        mu = mean_level_index(observed);
      }
      const auto pmf = poisson_reference(mu, poisson_levels);
      std::cout << "# mean_index " << format_double(mu) << '\n';
      std::cout << (observed.empty() ? "level,poisson\n" : "level,observed,poisson\n");
      for (std::size_t j = 0; j < pmf.size(); ++j) {
        std::cout << j;
        if (!observed.empty()) std::cout << ',' << format_double(j < observed.size() ? observed[j] : 0.0);
        std::cout << ',' << format_double(pmf[j]) << '\n';
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
