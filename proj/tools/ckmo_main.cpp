#include <CLI11.hpp>
#include <chrono>
#include <functional>
#include <iostream>

#include "ckmo/fair.hpp"
#include "ckmo/io.hpp"
#include "ckmo/solver.hpp"
#include "ckmo/verify.hpp"

namespace {

using namespace ckmo;

struct InputOptions {
  std::string json_path;
  std::string csv_path;
  std::vector<int> facility_rows;
  std::int64_t csv_capacity = 1;
  int csv_k = 1;
  std::int64_t csv_m = 0;
  double csv_z = 1.0;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  auto* json = cmd->add_option("--input", in.json_path, "Instance JSON file");
  auto* csv = cmd->add_option("--csv-input", in.csv_path,
                              "Points CSV file (one point per row)");
  json->excludes(csv);
  csv->excludes(json);
  cmd->add_option("--facility-rows", in.facility_rows,
                  "CSV rows that are facilities (comma separated)")
      ->delimiter(',');
  cmd->add_option("--capacity", in.csv_capacity,
                  "Capacity given to every CSV facility");
  cmd->add_option("--k", in.csv_k, "Facility budget for CSV input");
  cmd->add_option("--m", in.csv_m, "Outlier budget for CSV input");
  cmd->add_option("--z", in.csv_z, "Cost exponent for CSV input");
}

Instance load_input(const InputOptions& in) {
  if (!in.json_path.empty()) return load_instance(in.json_path);
  if (!in.csv_path.empty())
    return instance_from_csv_points(in.csv_path, in.facility_rows,
                                    in.csv_capacity, in.csv_k, in.csv_m,
                                    in.csv_z);
  throw ParseError("no input given: pass --input or --csv-input");
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

class Stopwatch {
 public:
  explicit Stopwatch(std::string label) : label_(std::move(label)) {}
  ~Stopwatch() {
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start_);
    // stderr only: output files must not depend on wall time.
    std::cerr << label_ << " took " << elapsed.count() << " ms\n";
  }

 private:
  std::string label_;
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const InvalidSolution& e) {
    std::cerr << "invalid solution: " << e.what() << "\n";
    return 3;
  } catch (const LimitExceeded& e) {
    std::cerr << "limit exceeded: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 70;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Capacitated k-median with outliers: coreset construction, guess "
      "sweep solving, fair assignment, solution checking, experiments"};
  app.require_subcommand(1);

  // ---- solve ----
  auto* solve_cmd =
      app.add_subcommand("solve", "Run the full pipeline on an instance");
  InputOptions solve_in;
  add_input_options(solve_cmd, solve_in);
  std::string solve_out, solve_mode = "exact";
  std::uint64_t solve_seed = 0;
  SolveConfig solve_cfg;
  bool solve_fair = false, solve_no_sampling = false;
  std::int64_t solve_coreset_s = 0;
  solve_cmd->add_option("--out", solve_out, "Write solution JSON here");
  solve_cmd->add_option("--seed", solve_seed, "Root random seed");
  solve_cmd->add_option("--epsilon", solve_cfg.epsilon,
                        "Coreset accuracy target in (0, 1)");
  solve_cmd
      ->add_option("--mode", solve_mode,
                   "Facility subproblem: exact or local-search")
      ->check(CLI::IsMember({"exact", "local-search"}));
  solve_cmd->add_option("--max-guesses", solve_cfg.max_guesses,
                        "Abort after this many outlier guesses");
  solve_cmd->add_option("--exact-subset-limit",
                        solve_cfg.plugin.exact_subset_limit,
                        "Abort when a guess needs more facility subsets");
  solve_cmd->add_option("--threads", solve_cfg.threads,
                        "Worker threads for the guess sweep");
  solve_cmd->add_option("--timeout-seconds", solve_cfg.timeout_seconds,
                        "Stop between guesses after this long (0: never)");
  solve_cmd->add_option("--retries", solve_cfg.retries,
                        "Extra passes with derived seeds, keep the best");
  solve_cmd->add_option("--coreset-s", solve_coreset_s,
                        "Per-ring sample size (0: formula value)");
  solve_cmd->add_flag("--no-sampling", solve_no_sampling,
                      "Keep every client at weight 1 in the coreset");
  solve_cmd->add_flag("--no-coreset", solve_cfg.no_coreset,
                      "Skip the coreset stage entirely");
  solve_cmd->add_flag("--fair", solve_fair,
                      "Use the per-group fair pipeline (instance must carry "
                      "groups/alpha/beta/m_vec)");

  // ---- coreset ----
  auto* coreset_cmd =
      app.add_subcommand("coreset", "Build and print a coreset");
  InputOptions coreset_in;
  add_input_options(coreset_cmd, coreset_in);
  std::string coreset_out;
  std::uint64_t coreset_seed = 0;
  double coreset_epsilon = 0.5;
  bool coreset_fair = false, coreset_no_sampling = false;
  std::int64_t coreset_s = 0;
  coreset_cmd->add_option("--out", coreset_out, "Write coreset JSON here");
  coreset_cmd->add_option("--seed", coreset_seed, "Root random seed");
  coreset_cmd->add_option("--epsilon", coreset_epsilon,
                          "Coreset accuracy target in (0, 1)");
  coreset_cmd->add_option("--coreset-s", coreset_s,
                          "Per-ring sample size (0: formula value)");
  coreset_cmd->add_flag("--no-sampling", coreset_no_sampling,
                        "Keep every client at weight 1");
  coreset_cmd->add_flag("--fair", coreset_fair,
                        "Sample per (ring, group) cell");

  // ---- verify ----
  auto* verify_cmd = app.add_subcommand(
      "verify", "Check a solution file against its instance");
  InputOptions verify_in;
  add_input_options(verify_cmd, verify_in);
  std::string verify_solution, verify_out;
  verify_cmd
      ->add_option("--solution", verify_solution, "Solution JSON to check")
      ->required();
  verify_cmd->add_option("--out", verify_out, "Write the violation report");

  // ---- oracle ----
  auto* oracle_cmd = app.add_subcommand(
      "oracle", "Reference optimum by exhaustive facility enumeration");
  InputOptions oracle_in;
  add_input_options(oracle_cmd, oracle_in);
  std::string oracle_out;
  bool oracle_fair = false;
  BruteForceConfig oracle_cfg;
  oracle_cmd->add_option("--out", oracle_out, "Write solution JSON here");
  oracle_cmd->add_option("--subset-limit", oracle_cfg.subset_limit,
                         "Abort when more facility subsets would be needed");
  oracle_cmd->add_flag("--fair", oracle_fair,
                       "Brute-force the fair variant");

  // ---- bench ----
  auto* bench_cmd = app.add_subcommand(
      "bench", "Run a statistical experiment on generated instances");
  bench_cmd->alias("experiment");
  std::string bench_name, bench_out, bench_csv;
  std::uint64_t bench_seed = 0;
  int bench_trials = 50, bench_instances = 20, bench_pairs = 100;
  double bench_epsilon = 0.5, bench_required = 0.9;
  bool bench_no_sampling = false;
  std::int64_t bench_s = 0;
  GeneratorParams gen;
  bench_cmd
      ->add_option("--experiment", bench_name,
                   "Which experiment: coreset-error, lipschitz, "
                   "mcfo-consistency, ratio")
      ->required()
      ->check(CLI::IsMember(
          {"coreset-error", "lipschitz", "mcfo-consistency", "ratio"}));
  bench_cmd->add_option("--out", bench_out, "Write the report JSON here");
  bench_cmd->add_option("--csv", bench_csv,
                        "Also write per-trial measurements as CSV");
  bench_cmd->add_option("--seed", bench_seed, "Root random seed");
  bench_cmd->add_option("--trials", bench_trials, "Trial count");
  bench_cmd->add_option("--instances", bench_instances,
                        "Instances for the demand-bump experiment");
  bench_cmd->add_option("--pairs", bench_pairs,
                        "Perturbation pairs per instance");
  bench_cmd->add_option("--epsilon", bench_epsilon,
                        "Accuracy target / ratio bound parameter");
  bench_cmd->add_option("--required-fraction", bench_required,
                        "Fraction of trials that must pass");
  bench_cmd->add_option("--coreset-s", bench_s,
                        "Per-ring sample size (0: formula value)");
  bench_cmd->add_flag("--no-sampling", bench_no_sampling,
                      "Disable coreset sampling in the experiment");
  bench_cmd->add_option("--gen-n", gen.n, "Generated clients per instance");
  bench_cmd->add_option("--gen-facilities", gen.num_facilities,
                        "Generated facilities per instance");
  bench_cmd->add_option("--gen-k", gen.k, "Generated facility budget");
  bench_cmd->add_option("--gen-m", gen.m, "Generated outlier budget");
  bench_cmd->add_option("--gen-z", gen.z, "Generated cost exponent");
  bench_cmd->add_option("--gen-clusters", gen.planted_clusters,
                        "Planted clusters per instance");
  bench_cmd->add_option("--gen-spread", gen.cluster_spread,
                        "Within-cluster point spread");
  bench_cmd->add_option("--gen-margin", gen.capacity_margin_max,
                        "Max slack of the best k facilities over the demand");
  bench_cmd->add_flag("--gen-opening", gen.opening_costs,
                      "Generate opening costs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems are exit 1, help is 0
  }

  if (solve_cmd->parsed()) {
    return run_guarded([&] {
      const Instance inst = load_input(solve_in);
      solve_cfg.plugin.mode =
          solve_mode == "exact" ? CkmMode::exact : CkmMode::local_search;
      solve_cfg.coreset.s_override = solve_coreset_s;
      solve_cfg.coreset.disable_sampling = solve_no_sampling;
      SolveResult res;
      {
        Stopwatch watch("solve");
        res = solve_fair ? solve_fair_ckmo(inst, solve_seed, solve_cfg)
                         : solve_ckmo(inst, solve_seed, solve_cfg);
      }
      Json out;
      out["solution"] = solution_to_json(res.solution);
      out["report"] = report_to_json(res.report);
      emit(solve_out, dump_json(out));
      return 0;
    });
  }

  if (coreset_cmd->parsed()) {
    return run_guarded([&] {
      const Instance inst = load_input(coreset_in);
      CoresetConfig cfg;
      cfg.s_override = coreset_s;
      cfg.disable_sampling = coreset_no_sampling;
      CoresetResult cs;
      {
        Stopwatch watch("coreset");
        cs = coreset_fair
                 ? build_fair_coreset(inst, coreset_epsilon, coreset_seed, cfg)
                 : build_coreset(inst, coreset_epsilon, coreset_seed, cfg);
      }
      emit(coreset_out, dump_json(coreset_to_json(cs)));
      return 0;
    });
  }

  if (verify_cmd->parsed()) {
    return run_guarded([&] {
      const Instance inst = load_input(verify_in);
      const Solution sol = load_solution(verify_solution, inst);
      const WeightedClientSet ones =
          WeightedClientSet::all_ones(inst.num_clients());
      const std::vector<std::string> violations =
          inst.fairness ? validate_fair_solution(inst, sol, ones)
                        : validate_solution(inst, sol, ones);
      Json out;
      out["valid"] = violations.empty();
      out["violations"] = violations;
      emit(verify_out, dump_json(out));
      if (!violations.empty()) {
        for (const std::string& v : violations)
          std::cerr << "violation: " << v << "\n";
        return 3;
      }
      return 0;
    });
  }

  if (oracle_cmd->parsed()) {
    return run_guarded([&] {
      const Instance inst = load_input(oracle_in);
      SolveResult res;
      {
        Stopwatch watch("oracle");
        res = oracle_fair ? brute_force_fair_ckmo(inst, oracle_cfg)
                          : brute_force_ckmo(inst, oracle_cfg);
      }
      Json out;
      out["solution"] = solution_to_json(res.solution);
      out["report"] = report_to_json(res.report);
      emit(oracle_out, dump_json(out));
      return 0;
    });
  }

  return run_guarded([&] {  // bench
    const std::int64_t s = bench_no_sampling ? -1 : bench_s;
    ExperimentReport rep;
    {
      Stopwatch watch("bench");
      if (bench_name == "coreset-error") {
        rep = coreset_error_experiment(gen, bench_epsilon, s, bench_trials,
                                       bench_seed, bench_required);
      } else if (bench_name == "lipschitz") {
        rep = lipschitz_experiment(gen, bench_instances, bench_pairs,
                                   bench_seed);
      } else if (bench_name == "mcfo-consistency") {
        rep = mcfo_consistency_experiment(bench_trials, bench_seed);
      } else {
        rep = ratio_experiment(gen, bench_epsilon, s, bench_trials,
                               bench_seed, bench_required);
      }
    }
    emit(bench_out, dump_json(experiment_to_json(rep)));
    if (!bench_csv.empty()) write_text_file(bench_csv, experiment_csv(rep));
    return 0;
  });
}
