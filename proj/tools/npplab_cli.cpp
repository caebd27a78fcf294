#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "npplab/enumerate.hpp"
#include "npplab/experiments.hpp"
#include "npplab/heuristics.hpp"
#include "npplab/sampler.hpp"

using namespace npplab;

namespace {

// Flags that map one-to-one onto experiment config keys.
struct ExperimentFlags {
  std::map<std::string, std::string> values;
  std::string config_path;
  bool planted = false;
  bool unplanted = false;
};

void add_experiment_flags(CLI::App* app, ExperimentFlags& flags) {
  static const std::vector<std::pair<std::string, std::string>> keys{
      {"n", "n_list"},        {"trials", "trials"},           {"seed", "seed"},
      {"c", "base_c"},        {"eps", "eps"},                 {"rho", "rho"},
      {"Q", "Q"},             {"algorithm", "algorithm"},     {"output-dir", "output_dir"},
      {"m", "m"},             {"delta", "delta"},             {"beta", "beta"},
      {"beta-entropy", "beta_entropy"}, {"f", "f"},           {"L", "L"},
      {"statistic", "statistic"}, {"threads", "threads"},     {"max-n", "max_n"},
      {"frac-bits", "frac_bits"}, {"level-set-cap", "level_set_cap"}};
  for (const auto& [flag, key] : keys) {
    app->add_option_function<std::string>(
        "--" + flag, [&flags, key = key](const std::string& v) { flags.values[key] = v; }, "sets " + key);
  }
  app->add_option("--config", flags.config_path, "key=value config file; flags override it");
  app->add_flag("--planted", flags.planted, "use planted instances");
  app->add_flag("--unplanted", flags.unplanted, "use unplanted instances");
}

ExperimentConfig build_config(const ExperimentFlags& flags, std::optional<ExperimentKind> kind) {
  ExperimentConfig cfg = flags.config_path.empty() ? ExperimentConfig{} : load_config(flags.config_path);
  for (const auto& [k, v] : flags.values) apply_setting(cfg, k, v);
  if (flags.planted && flags.unplanted) throw ConfigError("--planted and --unplanted are exclusive");
  if (flags.planted) cfg.planted = true;
  if (flags.unplanted) cfg.planted = false;
  if (kind) cfg.experiment = *kind;
  return cfg;
}

int run_config(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::predict && !cfg.seed) throw ConfigError("--seed is required");
  const RunRecord rec = run_experiment(cfg);
  if (cfg.experiment == ExperimentKind::predict) {
    for (const auto& row : rec.tables[0].rows) std::cout << row[0] << '=' << row[1] << '\n';
  }
  for (const auto& p : write_run(rec, cfg.output_dir)) std::cerr << "wrote " << p.string() << '\n';
  return 0;
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open instance file " + path);
  return read_instance(in);
}

struct InstanceFlags {
  int n = 0;
  std::optional<std::uint64_t> seed;
  bool planted = false;
  double c = 3.0;
  int frac_bits = kDefaultFracBits;
  std::string instance_path;
};

void add_instance_flags(CLI::App* app, InstanceFlags& f) {
  app->add_option("--n", f.n, "instance size");
  app->add_option("--seed", f.seed, "RNG seed");
  app->add_flag("--planted", f.planted, "planted instance");
  app->add_option("--c", f.c, "planting base");
  app->add_option("--frac-bits", f.frac_bits, "fixed-point fraction bits");
  app->add_option("--instance", f.instance_path, "read the instance from a file instead of sampling");
}

Instance make_instance(const InstanceFlags& f) {
  if (!f.instance_path.empty()) return load_instance_file(f.instance_path);
  if (!f.seed) throw ConfigError("--seed is required");
  if (f.n < 1) throw ConfigError("--n must be >= 1");
  if (!f.planted) return sample_unplanted(f.n, *f.seed, f.frac_bits);
  PlantedSpec s;
  s.n = f.n;
  s.base_c = f.c;
  s.seed = *f.seed;
  s.frac_bits = f.frac_bits;
  return sample_planted(s);
}

std::string real(double v) { return format_real(v); }

int cli_main(int argc, char** argv) {
  CLI::App app{"Planted number-partitioning lab"};
  app.require_subcommand(1);

  InstanceFlags sample_f;
  std::string sample_out;
  auto* sample = app.add_subcommand("sample", "sample an instance");
  add_instance_flags(sample, sample_f);
  sample->add_option("--out", sample_out, "output file (default stdout)");

  InstanceFlags solve_f;
  std::string solve_alg = "ldm";
  auto* solve = app.add_subcommand("solve", "run a solver on an instance");
  add_instance_flags(solve, solve_f);
  solve->add_option("--algorithm", solve_alg, "ldm, greedy, random, exact or constant");

  InstanceFlags scan_f;
  std::string scan_dir = "out";
  int scan_max_n = kDefaultMaxScanN;
  auto* scan = app.add_subcommand("scan", "exhaustive distance-resolved scan of one instance");
  add_instance_flags(scan, scan_f);
  scan->add_option("--output-dir", scan_dir, "output directory");
  scan->add_option("--max-n", scan_max_n, "scan budget");

  const std::vector<std::pair<std::string, ExperimentKind>> experiment_cmds{
      {"ground", ExperimentKind::ground_state_scaling},
      {"zeta", ExperimentKind::zeta_scaling},
      {"isolate", ExperimentKind::isolation},
      {"ogp", ExperimentKind::level_set_ogp},
      {"interpolate", ExperimentKind::interpolation_trajectory},
      {"chaos", ExperimentKind::chaos},
      {"stability", ExperimentKind::stability},
      {"distinguish", ExperimentKind::distinguish},
      {"predict", ExperimentKind::predict}};
  std::vector<ExperimentFlags> exp_flags(experiment_cmds.size());
  std::vector<CLI::App*> exp_apps;
  for (std::size_t i = 0; i < experiment_cmds.size(); ++i) {
    auto* sub = app.add_subcommand(experiment_cmds[i].first, "run the " + to_string(experiment_cmds[i].second) +
                                                                 " experiment");
    add_experiment_flags(sub, exp_flags[i]);
    exp_apps.push_back(sub);
  }
  ExperimentFlags run_flags;
  auto* run = app.add_subcommand("run", "run the experiment named in a config file");
  add_experiment_flags(run, run_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (sample->parsed()) {
    const Instance inst = make_instance(sample_f);
    if (sample_out.empty()) {
      write_instance(std::cout, inst);
    } else {
      std::ofstream out(sample_out, std::ios::binary);
      if (!out) throw ConfigError("cannot write " + sample_out);
      write_instance(out, inst);
    }
    return 0;
  }
  if (solve->parsed()) {
    const Algorithm alg = algorithm_by_name(solve_alg);
    if (solve_alg == "random" && !solve_f.seed) throw ConfigError("--seed is required for the random solver");
    const Instance inst = make_instance(solve_f);
    const Partition sigma = alg(inst, solve_f.seed.value_or(0));
    const Energy e = hamiltonian(sigma, inst);
    std::cout << "sigma=" << sigma.to_string() << '\n'
              << "energy_numerator=" << e.numerator().to_string() << '\n'
              << "log2_energy=" << real(e.log2()) << '\n';
    return 0;
  }
  if (scan->parsed()) {
    const Instance inst = make_instance(scan_f);
    const int n = inst.size();
    const Partition star = inst.planted() ? inst.planted()->sigma_star : Partition(n);
    ScanOptions opt;
    opt.max_n = scan_max_n;
    const ScanResult r = full_scan(inst, star, {}, opt);
    Table t{"zeta", {"k", "zeta_numerator", "log2_zeta", "argmin"}, {}};
    for (int k = 1; k < n; ++k) {
      const Energy& z = r.zeta[static_cast<std::size_t>(k)];
      t.rows.push_back({std::to_string(k), z.numerator().to_string(), real(z.log2()),
                        r.zeta_arg[static_cast<std::size_t>(k)].to_string()});
    }
    std::filesystem::create_directories(scan_dir);
    const auto csv = std::filesystem::path(scan_dir) / "scan.csv";
    std::ofstream out(csv, std::ios::binary);
    write_csv(out, t);
    nlohmann::json js;
    js["n"] = n;
    js["planted"] = inst.planted().has_value();
    js["seed"] = scan_f.seed ? nlohmann::json(*scan_f.seed) : nlohmann::json(nullptr);
    js["global_min_numerator"] = r.global_min.energy.numerator().to_string();
    js["global_min_log2"] = r.global_min.energy.log2();
    js["global_min_argmin"] = r.global_min.sigma.to_string();
    js["min_excluding_reference_numerator"] = r.global_min_excl.energy.numerator().to_string();
    js["min_excluding_reference_log2"] = r.global_min_excl.energy.log2();
    const auto summary = std::filesystem::path(scan_dir) / "scan_summary.json";
    std::ofstream sj(summary, std::ios::binary);
    sj << js.dump(2) << '\n';
    std::cerr << "wrote " << csv.string() << "\nwrote " << summary.string() << '\n';
    return 0;
  }
  for (std::size_t i = 0; i < exp_apps.size(); ++i) {
    if (exp_apps[i]->parsed()) return run_config(build_config(exp_flags[i], experiment_cmds[i].second));
  }
  if (run->parsed()) {
    if (run_flags.config_path.empty()) throw ConfigError("run needs --config");
    return run_config(build_config(run_flags, std::nullopt));
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return cli_main(argc, argv);
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
