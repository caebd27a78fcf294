#include "npplab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "npplab/analytics.hpp"
#include "npplab/heuristics.hpp"
#include "npplab/parallel.hpp"
#include "npplab/rng.hpp"
#include "npplab/sampler.hpp"
#include "npplab/stats.hpp"

#ifndef NPPLAB_GIT_DESCRIBE
#define NPPLAB_GIT_DESCRIBE "unknown"
#endif

namespace npplab {

namespace {

using Row = std::vector<std::string>;
using json = nlohmann::json;

struct TrialOutput {
  std::vector<std::vector<Row>> tables;
  std::vector<double> values;
};

struct Plan;
using TrialFn = std::function<TrialOutput(const ExperimentConfig&, const Plan&, int n, std::uint64_t trial,
                                          std::uint64_t trial_seed)>;

struct Plan {
  std::vector<Table> tables;  // headers only
  int trials_per_n = 0;
  TrialFn trial;
  // Fills summary and may append aggregate tables.
  std::function<void(const ExperimentConfig&, const Plan&, const std::vector<TrialOutput>&,
                     const std::vector<RunRecord::TaskRows>&, RunRecord&)>
      summarize;
  std::optional<Algorithm> alg;
  double eta_star = 0.0;
  OgpParams ogp;
};

std::string str(std::int64_t v) { return std::to_string(v); }
std::string ustr(std::uint64_t v) { return std::to_string(v); }

double log2_of(const Energy& e) { return e.is_infinite() ? std::numeric_limits<double>::infinity() : e.log2(); }

Row prefix(int n, std::uint64_t trial, std::uint64_t seed) { return {str(n), ustr(trial), ustr(seed)}; }

Row cat(Row a, const Row& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<std::string> with_prefix(std::vector<std::string> cols) {
  std::vector<std::string> h{"n", "trial", "trial_seed"};
  h.insert(h.end(), cols.begin(), cols.end());
  return h;
}

PlantedSpec planted_spec(const ExperimentConfig& cfg, int n, std::uint64_t seed) {
  PlantedSpec s;
  s.n = n;
  s.base_c = cfg.base_c;
  s.seed = seed;
  s.frac_bits = cfg.frac_bits;
  s.bound_scale_sq = cfg.bound_scale_sq;
  return s;
}

ScanOptions scan_options(const ExperimentConfig& cfg) {
  ScanOptions o;
  o.max_n = cfg.max_n;
  return o;
}

double tau_at(int k, int Q) { return k == Q ? std::numbers::pi / 2 : std::numbers::pi * k / (2.0 * Q); }

double isolation_beta(const ExperimentConfig& cfg) {
  return cfg.beta > 0.0 ? cfg.beta : binary_entropy_inverse(cfg.beta_entropy);
}

int isolation_radius(const ExperimentConfig& cfg, int n) {
  return static_cast<int>(std::floor(isolation_beta(cfg) * n + 1e-9));
}

// Medians of values[idx] grouped by n, in n_list order.
std::vector<double> medians_by_n(const ExperimentConfig& cfg, const std::vector<TrialOutput>& out,
                                 const std::vector<RunRecord::TaskRows>& tasks, std::size_t idx) {
  std::vector<double> med;
  for (int n : cfg.n_list) {
    std::vector<double> v;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (tasks[i].n == n) v.push_back(out[i].values[idx]);
    }
    med.push_back(median(v));
  }
  return med;
}

json fit_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"slope_se", f.slope_se},
          {"intercept_se", f.intercept_se}, {"r", f.r}};
}

std::vector<double> n_values(const ExperimentConfig& cfg) { return {cfg.n_list.begin(), cfg.n_list.end()}; }

// ---------------------------------------------------------------- scaling

Plan ground_state_plan(const ExperimentConfig& cfg) {
  Plan p;
  p.trials_per_n = cfg.trials;
  p.tables.push_back({"trials", with_prefix({"planted", "energy_numerator", "log2_energy", "argmin"}), {}});
  p.trial = [](const ExperimentConfig& c, const Plan&, int n, std::uint64_t t, std::uint64_t seed) {
    const Instance inst = c.planted ? sample_planted(planted_spec(c, n, seed)) : sample_unplanted(n, seed, c.frac_bits);
    const Partition star = c.planted ? inst.planted()->sigma_star : Partition(n);
    const ScanResult r = full_scan(inst, star, {}, scan_options(c));
    const Minimizer& m = c.planted ? r.global_min_excl : r.global_min;
    TrialOutput o;
    o.tables.push_back({cat(prefix(n, t, seed), {c.planted ? "1" : "0", m.energy.numerator().to_string(),
                                                 format_real(log2_of(m.energy)), m.sigma.to_string()})});
    o.values = {log2_of(m.energy)};
    return o;
  };
  p.summarize = [](const ExperimentConfig& c, const Plan&, const std::vector<TrialOutput>& out,
                   const std::vector<RunRecord::TaskRows>& tasks, RunRecord& rec) {
    const auto med = medians_by_n(c, out, tasks, 0);
    Table t{"medians", {"n", "median_log2_energy"}, {}};
    json rows = json::array();
    for (std::size_t i = 0; i < med.size(); ++i) {
      t.rows.push_back({str(c.n_list[i]), format_real(med[i])});
      rows.push_back({{"n", c.n_list[i]}, {"median_log2_energy", med[i]}});
    }
    rec.tables.push_back(std::move(t));
    rec.summary["medians"] = rows;
    rec.summary["statistic"] = c.planted ? "min over sigma != +-sigma*" : "global min";
    if (med.size() >= 2) rec.summary["fit"] = fit_json(ols(n_values(c), med));
  };
  return p;
}

int zeta_index(const ExperimentConfig& cfg, int n) {
  const double k = cfg.rho * n;
  const auto ki = static_cast<int>(std::llround(k));
  if (std::fabs(k - ki) > 1e-9 || ki < 1 || ki > n - 1) {
    throw ConfigError("zeta_scaling: rho * n must be an integer in [1, n-1] for n = " + std::to_string(n));
  }
  return ki;
}

Plan zeta_plan(const ExperimentConfig& cfg) {
  Plan p;
  p.trials_per_n = cfg.trials;
  p.tables.push_back({"trials", with_prefix({"k", "zeta_numerator", "log2_zeta", "log2_zeta_mirror", "argmin"}), {}});
  p.trial = [](const ExperimentConfig& c, const Plan&, int n, std::uint64_t t, std::uint64_t seed) {
    const int k = zeta_index(c, n);
    const Instance inst = sample_planted(planted_spec(c, n, seed));
    const ScanResult r = full_scan(inst, inst.planted()->sigma_star, {}, scan_options(c));
    const Energy& z = r.zeta[static_cast<std::size_t>(k)];
    const Energy& zm = r.zeta[static_cast<std::size_t>(n - k)];
    TrialOutput o;
    o.tables.push_back({cat(prefix(n, t, seed), {str(k), z.numerator().to_string(), format_real(log2_of(z)),
                                                 format_real(log2_of(zm)),
                                                 r.zeta_arg[static_cast<std::size_t>(k)].to_string()})});
    o.values = {log2_of(z), log2_of(zm)};
    return o;
  };
  p.summarize = [](const ExperimentConfig& c, const Plan&, const std::vector<TrialOutput>& out,
                   const std::vector<RunRecord::TaskRows>& tasks, RunRecord& rec) {
    const auto med = medians_by_n(c, out, tasks, 0);
    const auto mir = medians_by_n(c, out, tasks, 1);
    Table t{"medians", {"n", "k", "median_log2_zeta", "median_log2_zeta_mirror"}, {}};
    json rows = json::array();
    for (std::size_t i = 0; i < med.size(); ++i) {
      const int n = c.n_list[i];
      t.rows.push_back({str(n), str(zeta_index(c, n)), format_real(med[i]), format_real(mir[i])});
      rows.push_back({{"n", n}, {"median_log2_zeta", med[i]}, {"median_log2_zeta_mirror", mir[i]}});
    }
    rec.tables.push_back(std::move(t));
    rec.summary["medians"] = rows;
    rec.summary["target_slope"] = -binary_entropy(c.rho);
    if (med.size() >= 2) {
      rec.summary["fit"] = fit_json(ols(n_values(c), med));
      rec.summary["fit_mirror"] = fit_json(ols(n_values(c), mir));
    }
  };
  return p;
}

// ---------------------------------------------------------------- isolation

Plan isolation_plan(const ExperimentConfig& cfg) {
  Plan p;
  p.trials_per_n = cfg.trials;
  p.tables.push_back({"trials", with_prefix({"d", "min_numerator", "log2_min", "violation"}), {}});
  p.trial = [](const ExperimentConfig& c, const Plan&, int n, std::uint64_t t, std::uint64_t seed) {
    const int d = isolation_radius(c, n);
    const Instance inst = sample_planted(planted_spec(c, n, seed));
    const Energy thr = Energy::at_most_pow2(-c.eps * n, n, c.frac_bits);
    TrialOutput o;
    if (d < 1) {
      o.tables.push_back({cat(prefix(n, t, seed), {"0", "", "inf", "0"})});
      o.values = {0.0};
      return o;
    }
    const Minimizer m = ball_min(inst, inst.planted()->sigma_star, d);
    const bool bad = m.energy <= thr;
    o.tables.push_back({cat(prefix(n, t, seed), {str(d), m.energy.numerator().to_string(),
                                                 format_real(log2_of(m.energy)), bad ? "1" : "0"})});
    o.values = {bad ? 1.0 : 0.0};
    return o;
  };
  p.summarize = [](const ExperimentConfig& c, const Plan&, const std::vector<TrialOutput>& out,
                   const std::vector<RunRecord::TaskRows>&, RunRecord& rec) {
    int violations = 0;
    for (const auto& o : out) violations += o.values[0] > 0.5 ? 1 : 0;
    rec.summary["violations"] = violations;
    rec.summary["beta"] = isolation_beta(c);
    rec.summary["entropy_below_eps"] = binary_entropy(isolation_beta(c)) < c.eps;
    json radii = json::array();
    for (int n : c.n_list) radii.push_back({{"n", n}, {"d", isolation_radius(c, n)}});
    rec.summary["radii"] = radii;
    rec.summary["log2_threshold_per_n"] = -c.eps;
  };
  return p;
}

// ---------------------------------------------------------------- interpolation

Plan interpolation_plan(const ExperimentConfig& cfg) {
  Plan p;
  p.trials_per_n = cfg.trials;
  p.alg = algorithm_by_name(cfg.algorithm);
  p.tables.push_back({"trials", with_prefix({"i", "j", "k", "tau", "overlap_numerator"}), {}});
  p.trial = [](const ExperimentConfig& c, const Plan& plan, int n, std::uint64_t t, std::uint64_t seed) {
    EnsembleSpec es{planted_spec(c, n, seed), c.m};
    const auto xs = sample_planted_ensemble(es);
    const std::uint64_t omega = trial_algorithm_seed(seed);
    const int T = c.m;
    std::vector<std::vector<Partition>> out(static_cast<std::size_t>(T) + 1);
    double sxy = 0, sxx = 0, syy = 0;
    for (int i = 1; i <= T; ++i) {
      std::vector<double> prev;
      for (int k = 0; k <= c.Q; ++k) {
        const Instance y = interpolated_instance(xs[0], xs[static_cast<std::size_t>(i)], tau_at(k, c.Q));
        out[static_cast<std::size_t>(i)].push_back((*plan.alg)(y, omega));
        std::vector<double> cur = dequantize(y);
        if (!prev.empty()) {
          for (std::size_t q = 0; q < cur.size(); ++q) {
            sxy += prev[q] * cur[q];
            sxx += prev[q] * prev[q];
            syy += cur[q] * cur[q];
          }
        }
        prev = std::move(cur);
      }
    }
    TrialOutput o;
    o.tables.emplace_back();
    double max_jump = 0.0;
    bool start_identical = true;
    for (int i = 1; i <= T; ++i) {
      for (int j = i + 1; j <= T; ++j) {
        int last = 0;
        for (int k = 0; k <= c.Q; ++k) {
          const int ov = overlap(out[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                                 out[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)])
                             .numerator;
          if (k == 0 && ov != n) start_identical = false;
          if (k > 0) max_jump = std::max(max_jump, std::fabs(static_cast<double>(ov - last)) / n);
          last = ov;
          o.tables[0].push_back(
              cat(prefix(n, t, seed), {str(i), str(j), str(k), format_real(tau_at(k, c.Q)), str(ov)}));
        }
      }
    }
    o.values = {max_jump, start_identical ? 1.0 : 0.0, sxy, sxx, syy};
    return o;
  };
  p.summarize = [](const ExperimentConfig& c, const Plan&, const std::vector<TrialOutput>& out,
                   const std::vector<RunRecord::TaskRows>&, RunRecord& rec) {
    double jump = 0, sxy = 0, sxx = 0, syy = 0;
    int identical = 0;
    for (const auto& o : out) {
      jump = std::max(jump, o.values[0]);
      identical += o.values[1] > 0.5 ? 1 : 0;
      sxy += o.values[2];
      sxx += o.values[3];
      syy += o.values[4];
    }
    rec.summary["max_adjacent_overlap_jump"] = jump;
    rec.summary["trials_with_identical_start"] = identical;
    rec.summary["adjacent_correlation"] = sxy / std::sqrt(sxx * syy);
    rec.summary["adjacent_correlation_target"] = std::cos(std::numbers::pi / (2.0 * c.Q));
  };
  return p;
}

// ---------------------------------------------------------------- chaos

Plan chaos_plan(const ExperimentConfig& cfg) {
  Plan p;
  p.trials_per_n = cfg.trials;
  p.alg = algorithm_by_name(cfg.algorithm);
  p.eta_star = chaos_eta_star(cfg.eps);
  p.tables.push_back(
      {"trials", with_prefix({"i", "j", "overlap_numerator", "below_i", "below_j", "exceeds"}), {}});
  p.trial = [](const ExperimentConfig& c, const Plan& plan, int n, std::uint64_t t, std::uint64_t seed) {
    EnsembleSpec es{planted_spec(c, n, seed), c.m - 1};
    const auto xs = sample_planted_ensemble(es);
    const std::uint64_t omega = trial_algorithm_seed(seed);
    const Energy thr = Energy::at_most_pow2(-c.eps * n, n, c.frac_bits);
    std::vector<Partition> sol;
    std::vector<bool> below;
    for (const auto& x : xs) {
      sol.push_back((*plan.alg)(x, omega));
      below.push_back(hamiltonian(sol.back(), x) <= thr);
    }
    TrialOutput o;
    o.tables.emplace_back();
    double pairs = 0, exceed = 0, pairs_below = 0, exceed_below = 0;
    std::vector<double> overlaps;
    for (std::size_t i = 0; i < sol.size(); ++i) {
      for (std::size_t j = i + 1; j < sol.size(); ++j) {
        const int ov = overlap(sol[i], sol[j]).numerator;
        const bool ex = static_cast<double>(ov) / n >= 1.0 - plan.eta_star;
        pairs += 1;
        exceed += ex;
        if (below[i] && below[j]) {
          pairs_below += 1;
          exceed_below += ex;
        }
        overlaps.push_back(ov);
        o.tables[0].push_back(cat(prefix(n, t, seed), {str(static_cast<int>(i)), str(static_cast<int>(j)), str(ov),
                                                       below[i] ? "1" : "0", below[j] ? "1" : "0", ex ? "1" : "0"}));
      }
    }
    o.values = {pairs, exceed, pairs_below, exceed_below};
    o.values.insert(o.values.end(), overlaps.begin(), overlaps.end());
    return o;
  };
  p.summarize = [](const ExperimentConfig& c, const Plan& plan, const std::vector<TrialOutput>& out,
                   const std::vector<RunRecord::TaskRows>& tasks, RunRecord& rec) {
    double pairs = 0, exceed = 0, pairs_below = 0, exceed_below = 0;
    std::map<std::pair<int, int>, std::uint64_t> hist;
    for (std::size_t i = 0; i < out.size(); ++i) {
      pairs += out[i].values[0];
      exceed += out[i].values[1];
      pairs_below += out[i].values[2];
      exceed_below += out[i].values[3];
      for (std::size_t q = 4; q < out[i].values.size(); ++q) ++hist[{tasks[i].n, static_cast<int>(out[i].values[q])}];
    }
    Table t{"histogram", {"n", "overlap_numerator", "count"}, {}};
    for (const auto& [key, count] : hist) t.rows.push_back({str(key.first), str(key.second), ustr(count)});
    rec.tables.push_back(std::move(t));
    rec.summary["eta_star"] = plan.eta_star;
    rec.summary["overlap_cutoff"] = 1.0 - plan.eta_star;
    rec.summary["pairs"] = pairs;
    rec.summary["fraction_exceeding"] = pairs > 0 ? exceed / pairs : 0.0;
    rec.summary["pairs_both_below_threshold"] = pairs_below;
    rec.summary["fraction_exceeding_among_successful"] = pairs_below > 0 ? exceed_below / pairs_below : 0.0;
    rec.summary["chaos_violating"] = exceed > 0;
    (void)c;
  };
  return p;
}

// ---------------------------------------------------------------- stability

Plan stability_plan(const ExperimentConfig& cfg) {
  Plan p;
  p.trials_per_n = cfg.trials;
  p.alg = algorithm_by_name(cfg.algorithm);
  p.tables.push_back({"trials", with_prefix({"rho", "dist_sq", "d_h", "bound_ok"}), {}});
  p.tables.push_back({"records", {"trial", "rho", "dist_sq", "d_h", "bound_ok"}, {}});
  p.trial = [](const ExperimentConfig& c, const Plan& plan, int n, std::uint64_t t, std::uint64_t seed) {
    std::pair<Instance, Instance> pair =
        c.planted ? planted_correlated_pair(planted_spec(c, n, seed), c.rho) : correlated_pair(n, c.rho, seed, c.frac_bits);
    const std::uint64_t omega = trial_algorithm_seed(seed);
    BigInt acc = 0;
    for (int i = 0; i < n; ++i) {
      const BigInt d = (pair.first.numerators()[static_cast<std::size_t>(i)] -
                        pair.second.numerators()[static_cast<std::size_t>(i)])
                           .to_big();
      acc += d * d;
    }
    const double dist = std::ldexp(static_cast<double>(acc), -2 * c.frac_bits);
    const int dh = hamming_distance((*plan.alg)(pair.first, omega), (*plan.alg)(pair.second, omega));
    const bool ok = dh <= c.f + c.L * dist;
    TrialOutput o;
    const Row tail{format_real(c.rho), format_real(dist), str(dh), ok ? "1" : "0"};
    o.tables.push_back({cat(prefix(n, t, seed), tail)});
    o.tables.push_back({cat({ustr(t)}, tail)});
    o.values = {static_cast<double>(dh), dist / n, ok ? 1.0 : 0.0};
    return o;
  };
  p.summarize = [](const ExperimentConfig&, const Plan&, const std::vector<TrialOutput>& out,
                   const std::vector<RunRecord::TaskRows>&, RunRecord& rec) {
    double dh = 0, dist = 0, ok = 0, moved = 0;
    for (const auto& o : out) {
      dh += o.values[0];
      dist += o.values[1];
      ok += o.values[2];
      moved += o.values[0] > 0 ? 1 : 0;
    }
    const double k = static_cast<double>(out.size());
    rec.summary["mean_d_h"] = dh / k;
    rec.summary["mean_dist_sq_per_n"] = dist / k;
    rec.summary["fraction_bound_ok"] = ok / k;
    rec.summary["fraction_d_h_positive"] = moved / k;
  };
  return p;
}

// ---------------------------------------------------------------- distinguish

double distinguish_statistic(const ExperimentConfig& c, const Instance& inst) {
  const int n = inst.size();
  const Partition star(n);  // the planted sigma* of planted_spec; any fixed sign vector for null draws
  if (c.statistic == "exact_min") return log2_of(full_scan(inst, star, {}, scan_options(c)).global_min.energy);
  if (c.statistic == "ldm_value") return log2_of(hamiltonian(ldm(inst), inst));
  if (c.statistic == "ball_min") {
    const int d = std::max(1, isolation_radius(c, n));
    return log2_of(ball_min(inst, star, d).energy);
  }
  if (c.statistic == "planted_energy") return log2_of(hamiltonian(star, inst));
  throw ConfigError("unknown statistic: " + c.statistic);
}

Plan distinguish_plan(const ExperimentConfig& cfg) {
  Plan p;
  p.trials_per_n = 2 * cfg.trials;
  p.tables.push_back({"trials", with_prefix({"planted", "statistic", "log2_value"}), {}});
  p.trial = [](const ExperimentConfig& c, const Plan&, int n, std::uint64_t t, std::uint64_t seed) {
    const bool planted = t % 2 == 0;
    const Instance inst = planted ? sample_planted(planted_spec(c, n, seed)) : sample_unplanted(n, seed, c.frac_bits);
    const double v = distinguish_statistic(c, inst);
    TrialOutput o;
    o.tables.push_back({cat(prefix(n, t, seed), {planted ? "1" : "0", c.statistic, format_real(v)})});
    o.values = {planted ? 1.0 : 0.0, v};
    return o;
  };
  p.summarize = [](const ExperimentConfig& c, const Plan&, const std::vector<TrialOutput>& out,
                   const std::vector<RunRecord::TaskRows>& tasks, RunRecord& rec) {
    json per_n = json::array();
    Rng shuffle_rng(*c.seed, 7);
    for (int n : c.n_list) {
      std::vector<double> pos, neg, all;
      std::vector<int> labels;
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (tasks[i].n != n) continue;
        // Lower energy is evidence for planting.
        const double score = -out[i].values[1];
        (out[i].values[0] > 0.5 ? pos : neg).push_back(score);
        all.push_back(score);
        labels.push_back(out[i].values[0] > 0.5 ? 1 : 0);
      }
      for (std::size_t i = labels.size(); i > 1; --i) {
        std::swap(labels[i - 1], labels[static_cast<std::size_t>(shuffle_rng.below(i))]);
      }
      std::vector<double> sp, sn;
      for (std::size_t i = 0; i < all.size(); ++i) (labels[i] ? sp : sn).push_back(all[i]);
      per_n.push_back({{"n", n},
                       {"auc", auc(pos, neg)},
                       {"best_threshold_accuracy", best_threshold_accuracy(pos, neg)},
                       {"auc_label_shuffled", auc(sp, sn)},
                       {"trivial_baseline", 0.5}});
    }
    rec.summary["statistic"] = c.statistic;
    rec.summary["per_n"] = per_n;
    rec.summary["note"] = "exploratory: no ground truth is asserted for the AUC";
  };
  return p;
}

// ---------------------------------------------------------------- level-set OGP

struct OgpWindow {
  double beta;
  double eta;
  std::string label;
};

std::vector<OgpWindow> ogp_windows(const Plan& plan) {
  std::vector<OgpWindow> w{{plan.ogp.beta, plan.ogp.eta, "prescribed"}};
  for (int b = 1; b <= 10; ++b) w.push_back({b / 10.0, 0.1, "sweep"});
  return w;
}

Plan ogp_plan(const ExperimentConfig& cfg) {
  Plan p;
  p.trials_per_n = cfg.trials;
  p.ogp = ogp_parameters(cfg.eps, cfg.delta);
  p.tables.push_back({"trials", with_prefix({"window", "beta", "eta", "found", "tuple"}), {}});
  p.tables.push_back({"level_sets", with_prefix({"replica", "k", "tau", "size", "truncated"}), {}});
  p.tables.push_back({"histogram", with_prefix({"replica", "k", "overlap_numerator", "count"}), {}});
  p.trial = [](const ExperimentConfig& c, const Plan& plan, int n, std::uint64_t t, std::uint64_t seed) {
    EnsembleSpec es{planted_spec(c, n, seed), c.m};
    const auto xs = sample_planted_ensemble(es);
    const Partition star = xs[0].planted()->sigma_star;
    const Energy thr = Energy::at_most_pow2(-c.eps * n, n, c.frac_bits);
    TrialOutput o;
    o.tables.resize(3);
    std::vector<std::vector<Partition>> sets;
    for (int i = 1; i <= c.m; ++i) {
      std::vector<Partition> uni;
      for (int k = 0; k <= c.Q; ++k) {
        const Instance y = interpolated_instance(xs[0], xs[static_cast<std::size_t>(i)], tau_at(k, c.Q));
        const LevelSet ls = extract_level_set(y, thr, c.level_set_cap, c.max_n);
        const Row head = cat(prefix(n, t, seed), {str(i), str(k)});
        o.tables[1].push_back(cat(head, {format_real(tau_at(k, c.Q)), str(static_cast<std::int64_t>(ls.members.size())),
                                         ls.truncated ? "1" : "0"}));
        if (ls.members.size() >= 2) {
          for (const auto& [ov, count] : overlap_histogram(ls)) o.tables[2].push_back(cat(head, {str(ov), ustr(count)}));
        }
        uni.insert(uni.end(), ls.members.begin(), ls.members.end());
      }
      std::sort(uni.begin(), uni.end());
      uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
      sets.push_back(i == 1 ? uni : sign_closure(uni));
    }
    std::size_t w = 0;
    for (const auto& win : ogp_windows(plan)) {
      const auto tuple = find_m_tuple(sets, win.beta, win.eta, star);
      std::string text;
      if (tuple) {
        for (const auto& s : *tuple) text += (text.empty() ? "" : ";") + s.to_string();
      }
      o.tables[0].push_back(cat(prefix(n, t, seed), {win.label + "_" + std::to_string(w), format_real(win.beta),
                                                     format_real(win.eta), tuple ? "1" : "0", text}));
      o.values.push_back(tuple ? 1.0 : 0.0);
      ++w;
    }
    return o;
  };
  p.summarize = [](const ExperimentConfig& c, const Plan& plan, const std::vector<TrialOutput>& out,
                   const std::vector<RunRecord::TaskRows>&, RunRecord& rec) {
    const auto wins = ogp_windows(plan);
    json windows = json::array();
    for (std::size_t w = 0; w < wins.size(); ++w) {
      int found = 0;
      for (const auto& o : out) found += o.values[w] > 0.5 ? 1 : 0;
      windows.push_back({{"beta", wins[w].beta}, {"eta", wins[w].eta}, {"kind", wins[w].label},
                         {"trials_with_tuple", found}});
    }
    rec.summary["windows"] = windows;
    rec.summary["ogp_parameters"] = {{"m", plan.ogp.m},       {"c", plan.ogp.c},     {"beta", plan.ogp.beta},
                                     {"eta", plan.ogp.eta},   {"eps", plan.ogp.eps}, {"delta", plan.ogp.delta}};
    rec.summary["tuple_size"] = c.m;
    rec.summary["note"] = "emptiness is exact for the realized level sets; asymptotic emptiness needs m ~ 42";
  };
  return p;
}

Plan make_plan(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::ground_state_scaling:
      return ground_state_plan(cfg);
    case ExperimentKind::zeta_scaling:
      return zeta_plan(cfg);
    case ExperimentKind::isolation:
      return isolation_plan(cfg);
    case ExperimentKind::interpolation_trajectory:
      return interpolation_plan(cfg);
    case ExperimentKind::chaos:
      return chaos_plan(cfg);
    case ExperimentKind::stability:
      return stability_plan(cfg);
    case ExperimentKind::distinguish:
      return distinguish_plan(cfg);
    case ExperimentKind::level_set_ogp:
      return ogp_plan(cfg);
    case ExperimentKind::predict:
      break;
  }
  throw ConfigError("no trial plan for experiment " + to_string(cfg.experiment));
}

void run_predict(const ExperimentConfig& cfg, RunRecord& rec) {
  Table t{"predict", {"key", "value"}, {}};
  auto put = [&](const std::string& k, double v) {
    t.rows.push_back({k, format_real(v)});
    rec.summary["predictions"][k] = v;
  };
  const int n = cfg.n_list.front();
  put("binary_entropy_rho", binary_entropy(cfg.rho));
  if (cfg.rho > 0.0 && cfg.rho < 1.0) put("lambda_rho", lambda_rho(cfg.rho));
  const double k = cfg.rho * n;
  if (cfg.rho > 0.0 && cfg.rho <= 0.5 && std::fabs(k - std::round(k)) < 1e-9) {
    const auto mp = first_moment_zeta(n, cfg.rho, 1.0);
    put("first_moment_zeta_expected_count", mp.expected_count);
    put("first_moment_zeta_log2", mp.log2_expected_count);
  }
  const OgpParams og = ogp_parameters(cfg.eps, cfg.delta);
  put("ogp_m", og.m);
  put("ogp_c", og.c);
  put("ogp_beta", og.beta);
  put("ogp_eta", og.eta);
  const HardnessParams h = theorem42_parameters(cfg.eps, cfg.L, og.eta, og.m);
  put("hardness_C1", h.C1);
  put("hardness_Q", h.Q);
  put("hardness_log2_log2_T", h.log2_log2_T);
  put("hardness_loglog_pf_times_3n", h.loglog_pf_times_3n);
  put("hardness_loglog_pst", h.loglog_pst);
  put("hardness_loglog_pl", h.loglog_pl);
  put("hardness_rho", h.rho);
  put("chaos_eta_star", chaos_eta_star(cfg.eps));
  put("isolation_beta", isolation_beta(cfg));
  rec.tables.push_back(std::move(t));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  std::istringstream is(v);
  is >> out;
  if (!is || !is.eof()) throw ConfigError("bad value for " + key + ": '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string l = lower(v);
  if (l == "1" || l == "true" || l == "yes") return true;
  if (l == "0" || l == "false" || l == "no") return false;
  throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

}  // namespace

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::ground_state_scaling:
      return "ground_state_scaling";
    case ExperimentKind::zeta_scaling:
      return "zeta_scaling";
    case ExperimentKind::isolation:
      return "isolation";
    case ExperimentKind::level_set_ogp:
      return "level_set_ogp";
    case ExperimentKind::interpolation_trajectory:
      return "interpolation_trajectory";
    case ExperimentKind::chaos:
      return "chaos";
    case ExperimentKind::stability:
      return "stability";
    case ExperimentKind::distinguish:
      return "distinguish";
    case ExperimentKind::predict:
      return "predict";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::ground_state_scaling, ExperimentKind::zeta_scaling, ExperimentKind::isolation,
                 ExperimentKind::level_set_ogp, ExperimentKind::interpolation_trajectory, ExperimentKind::chaos,
                 ExperimentKind::stability, ExperimentKind::distinguish, ExperimentKind::predict}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown experiment: " + name);
}

void apply_setting(ExperimentConfig& cfg, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string v = trim(value_in);
  if (key == "experiment") {
    cfg.experiment = parse_experiment_kind(v);
  } else if (key == "n_list" || key == "n") {
    cfg.n_list.clear();
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ',')) cfg.n_list.push_back(parse_number<int>(key, trim(item)));
    if (cfg.n_list.empty()) throw ConfigError("n_list is empty");
  } else if (key == "trials") {
    cfg.trials = parse_number<int>(key, v);
  } else if (key == "seed") {
    if (v.empty() || v[0] == '-') throw ConfigError("bad value for seed: '" + v + "'");
    cfg.seed = parse_number<std::uint64_t>(key, v);
  } else if (key == "base_c" || key == "c") {
    cfg.base_c = parse_number<double>(key, v);
  } else if (key == "eps") {
    cfg.eps = parse_number<double>(key, v);
  } else if (key == "rho") {
    cfg.rho = parse_number<double>(key, v);
  } else if (key == "Q") {
    cfg.Q = parse_number<int>(key, v);
  } else if (key == "algorithm") {
    cfg.algorithm = v;
  } else if (key == "output_dir") {
    cfg.output_dir = v;
  } else if (key == "planted") {
    cfg.planted = parse_bool(key, v);
  } else if (key == "m") {
    cfg.m = parse_number<int>(key, v);
  } else if (key == "delta") {
    cfg.delta = parse_number<double>(key, v);
  } else if (key == "beta") {
    cfg.beta = parse_number<double>(key, v);
  } else if (key == "beta_entropy") {
    cfg.beta_entropy = parse_number<double>(key, v);
  } else if (key == "f") {
    cfg.f = parse_number<double>(key, v);
  } else if (key == "L") {
    cfg.L = parse_number<double>(key, v);
  } else if (key == "bound_scale_sq") {
    cfg.bound_scale_sq = parse_number<double>(key, v);
  } else if (key == "statistic") {
    cfg.statistic = v;
  } else if (key == "threads") {
    cfg.threads = parse_number<int>(key, v);
  } else if (key == "max_n") {
    cfg.max_n = parse_number<int>(key, v);
  } else if (key == "frac_bits") {
    cfg.frac_bits = parse_number<int>(key, v);
  } else if (key == "level_set_cap") {
    cfg.level_set_cap = parse_number<std::size_t>(key, v);
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.experiment != ExperimentKind::predict && !cfg.seed) throw ConfigError("seed is required");
  if (cfg.n_list.empty()) throw ConfigError("n_list is empty");
  for (int n : cfg.n_list) {
    if (n < 2) throw ConfigError("every n must be >= 2");
  }
  if (!(cfg.base_c > 2.0)) throw ConfigError("base_c must exceed 2");
  if (cfg.frac_bits < 0 || cfg.frac_bits > kMaxFracBits) throw ConfigError("frac_bits out of range");
  if (cfg.Q < 1) throw ConfigError("Q must be >= 1");
  if (cfg.threads < 0) throw ConfigError("threads must be >= 0");
  const bool scans = cfg.experiment == ExperimentKind::ground_state_scaling ||
                     cfg.experiment == ExperimentKind::zeta_scaling ||
                     cfg.experiment == ExperimentKind::level_set_ogp ||
                     (cfg.experiment == ExperimentKind::distinguish && cfg.statistic == "exact_min");
  if (scans) {
    for (int n : cfg.n_list) {
      if (n > cfg.max_n || n > 63) {
        throw BudgetError("n = " + std::to_string(n) + " exceeds the exhaustive scan budget max_n = " +
                          std::to_string(cfg.max_n));
      }
    }
  }
  switch (cfg.experiment) {
    case ExperimentKind::zeta_scaling:
      if (!(cfg.rho > 0.0 && cfg.rho < 1.0)) throw ConfigError("rho must lie in (0, 1)");
      for (int n : cfg.n_list) zeta_index(cfg, n);
      break;
    case ExperimentKind::isolation:
      if (!(cfg.beta_entropy > 0.0 && cfg.beta_entropy <= 1.0)) throw ConfigError("beta_entropy must lie in (0, 1]");
      if (cfg.beta < 0.0 || cfg.beta > 0.5) throw ConfigError("beta must lie in [0, 1/2]");
      if (cfg.beta == 0.0 && !(binary_entropy_inverse(cfg.beta_entropy) >= 0)) throw ConfigError("bad beta_entropy");
      if (!std::isfinite(cfg.eps)) throw ConfigError("eps must be finite");
      break;
    case ExperimentKind::level_set_ogp:
      if (cfg.m != 2 && cfg.m != 3) throw ConfigError("level_set_ogp supports m in {2, 3}");
      if (!(cfg.delta >= 0.0 && cfg.delta < cfg.eps && cfg.eps <= 1.0)) throw ConfigError("need 0 <= delta < eps <= 1");
      break;
    case ExperimentKind::interpolation_trajectory:
      if (cfg.m < 2) throw ConfigError("interpolation needs m >= 2 replicas");
      algorithm_by_name(cfg.algorithm);
      break;
    case ExperimentKind::chaos:
      if (cfg.m < 2) throw ConfigError("chaos needs m >= 2 replicas");
      if (!(cfg.eps > 0.0 && cfg.eps <= 2.0)) throw ConfigError("eps must lie in (0, 2]");
      algorithm_by_name(cfg.algorithm);
      break;
    case ExperimentKind::stability:
      if (!(cfg.rho >= 0.0 && cfg.rho < 1.0)) throw ConfigError("rho must lie in [0, 1)");
      algorithm_by_name(cfg.algorithm);
      break;
    case ExperimentKind::distinguish:
      if (cfg.statistic != "exact_min" && cfg.statistic != "ldm_value" && cfg.statistic != "ball_min" &&
          cfg.statistic != "planted_energy") {
        throw ConfigError("statistic must be exact_min, ldm_value, ball_min or planted_energy");
      }
      break;
    case ExperimentKind::predict:
      if (!(cfg.rho >= 0.0 && cfg.rho <= 1.0)) throw ConfigError("rho must lie in [0, 1]");
      if (!(cfg.delta >= 0.0 && cfg.delta < cfg.eps && cfg.eps <= 1.0)) throw ConfigError("need 0 <= delta < eps <= 1");
      if (!(cfg.L > 0.0)) throw ConfigError("L must be positive");
      break;
    default:
      break;
  }
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  std::string ns;
  for (int n : cfg.n_list) ns += (ns.empty() ? "" : ",") + std::to_string(n);
  os << "experiment=" << to_string(cfg.experiment) << '\n'
     << "n_list=" << ns << '\n'
     << "trials=" << cfg.trials << '\n'
     << "seed=" << (cfg.seed ? std::to_string(*cfg.seed) : std::string("none")) << '\n'
     << "base_c=" << format_real(cfg.base_c) << '\n'
     << "eps=" << format_real(cfg.eps) << '\n'
     << "rho=" << format_real(cfg.rho) << '\n'
     << "Q=" << cfg.Q << '\n'
     << "algorithm=" << cfg.algorithm << '\n'
     << "planted=" << (cfg.planted ? 1 : 0) << '\n'
     << "m=" << cfg.m << '\n'
     << "delta=" << format_real(cfg.delta) << '\n'
     << "beta=" << format_real(cfg.beta) << '\n'
     << "beta_entropy=" << format_real(cfg.beta_entropy) << '\n'
     << "f=" << format_real(cfg.f) << '\n'
     << "L=" << format_real(cfg.L) << '\n'
     << "bound_scale_sq=" << format_real(cfg.bound_scale_sq) << '\n'
     << "statistic=" << cfg.statistic << '\n'
     << "max_n=" << cfg.max_n << '\n'
     << "frac_bits=" << cfg.frac_bits << '\n'
     << "level_set_cap=" << cfg.level_set_cap << '\n';
  return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_config(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::uint64_t experiment_trial_seed(std::uint64_t seed, int n, std::uint64_t trial) {
  return substream_seed(substream_seed(seed, static_cast<std::uint64_t>(n)), trial);
}

RunRecord run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.config = cfg;
  rec.hash = config_hash(cfg);
  if (cfg.experiment == ExperimentKind::predict) {
    run_predict(cfg, rec);
  } else {
    const Plan plan = make_plan(cfg);
    for (int n : cfg.n_list) {
      for (int t = 0; t < plan.trials_per_n; ++t) {
        RunRecord::TaskRows task;
        task.n = n;
        task.trial = static_cast<std::uint64_t>(t);
        task.trial_seed = experiment_trial_seed(*cfg.seed, n, task.trial);
        rec.tasks.push_back(task);
      }
    }
    std::vector<TrialOutput> out(rec.tasks.size());
    parallel_for(out.size(), cfg.threads, [&](std::size_t i) {
      const auto& task = rec.tasks[i];
      out[i] = plan.trial(cfg, plan, task.n, task.trial, task.trial_seed);
    });
    rec.tables = plan.tables;
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t tb = 0; tb < plan.tables.size(); ++tb) {
        auto& rows = rec.tables[tb].rows;
        const std::size_t begin = rows.size();
        if (tb < out[i].tables.size()) rows.insert(rows.end(), out[i].tables[tb].begin(), out[i].tables[tb].end());
        rec.tasks[i].spans.emplace_back(begin, rows.size() - begin);
      }
    }
    plan.summarize(cfg, plan, out, rec.tasks, rec);
  }
  rec.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json cfg_echo;
  std::istringstream lines(canonical_config(cfg));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    cfg_echo[line.substr(0, eq)] = line.substr(eq + 1);
  }
  cfg_echo["output_dir"] = cfg.output_dir;
  cfg_echo["threads"] = std::to_string(cfg.threads);
  rec.summary["experiment"] = to_string(cfg.experiment);
  rec.summary["config"] = cfg_echo;
  rec.summary["config_hash"] = rec.hash;
  rec.summary["git_describe"] = NPPLAB_GIT_DESCRIBE;
  rec.summary["wall_clock_seconds"] = rec.wall_clock_seconds;
  rec.summary["tolerance_note"] = "finite-n tolerances are engineering choices";
  return rec;
}

void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

std::vector<std::filesystem::path> write_run(const RunRecord& rec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string base = to_string(rec.config.experiment);
  std::vector<std::filesystem::path> paths;
  for (std::size_t i = 0; i < rec.tables.size(); ++i) {
    const auto path = dir / (i == 0 ? base + ".csv" : base + "_" + rec.tables[i].name + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_csv(out, rec.tables[i]);
    paths.push_back(path);
  }
  const auto jpath = dir / (base + "_summary.json");
  std::ofstream js(jpath, std::ios::binary);
  if (!js) throw std::runtime_error("cannot write " + jpath.string());
  js << rec.summary.dump(2) << '\n';
  paths.push_back(jpath);
  return paths;
}

SpotCheck spot_check(const RunRecord& rec, double fraction) {
  SpotCheck sc;
  if (rec.tasks.empty()) return sc;
  const Plan plan = make_plan(rec.config);
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::floor(1.0 / std::max(fraction, 1e-12))));
  for (std::size_t i = 0; i < rec.tasks.size(); i += stride) {
    const auto& task = rec.tasks[i];
    const TrialOutput o = plan.trial(rec.config, plan, task.n, task.trial, task.trial_seed);
    ++sc.tasks_checked;
    for (std::size_t tb = 0; tb < task.spans.size(); ++tb) {
      const auto [begin, count] = task.spans[tb];
      const std::vector<Row> empty;
      const auto& fresh = tb < o.tables.size() ? o.tables[tb] : empty;
      if (fresh.size() != count) {
        sc.mismatches += std::max(fresh.size(), count);
        continue;
      }
      for (std::size_t r = 0; r < count; ++r) sc.mismatches += fresh[r] != rec.tables[tb].rows[begin + r] ? 1 : 0;
    }
  }
  return sc;
}

}  // namespace npplab
