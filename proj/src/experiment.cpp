#include "prfopt/experiment.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "prfopt/baselines.hpp"
#include "prfopt/egd.hpp"
#include "prfopt/ssa.hpp"

namespace prf {

namespace {

using nlohmann::json;

volatile double g_timing_sink = 0.0;  // defeats dead-code elimination

// ---------------------------------------------------------------------------
// Formatting helpers
// ---------------------------------------------------------------------------

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

double watt2dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// ---------------------------------------------------------------------------
// Spec parsing
// ---------------------------------------------------------------------------

const std::array<const char*, 5> kExperiments = {
    "capacity_vs_N", "runtime_vs_N", "ee_vs_p", "rate_vs_p",
    "element_count_table"};

bool is_power_experiment(const std::string& e) {
  return e == "ee_vs_p" || e == "rate_vs_p" || e == "element_count_table";
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* ctx) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw std::invalid_argument("unknown key '" + it.key() + "' in " + ctx);
  }
}

ScenarioConfig parse_scenario(const json& j, ScenarioConfig c) {
  check_keys(j,
             {"N", "N_I", "kappa", "p_dBm", "delta_PL_dB", "B_Hz",
              "N0_dBm_per_Hz", "blocked_direct", "los_only", "seed"},
             "scenario");
  if (j.contains("N")) c.N = j.at("N").get<int>();
  if (j.contains("N_I")) c.N_I = j.at("N_I").get<int>();
  if (j.contains("kappa")) c.kappa = j.at("kappa").get<double>();
  if (j.contains("p_dBm")) c.p_dBm = j.at("p_dBm").get<double>();
  if (j.contains("delta_PL_dB")) c.delta_PL_dB = j.at("delta_PL_dB").get<double>();
  if (j.contains("B_Hz")) c.B_Hz = j.at("B_Hz").get<double>();
  if (j.contains("N0_dBm_per_Hz"))
    c.N0_dBm_per_Hz = j.at("N0_dBm_per_Hz").get<double>();
  if (j.contains("blocked_direct"))
    c.blocked_direct = j.at("blocked_direct").get<bool>();
  if (j.contains("los_only")) c.los_only = j.at("los_only").get<bool>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

OverheadModel parse_overhead(const json& j, OverheadModel m) {
  check_keys(j,
             {"T_ms", "T0_ms", "b_F", "B_F_Hz", "p_F_dBm", "h_F2", "B_Hz",
              "N0_dBm_per_Hz", "P0_dBm", "p_dBm", "mu", "mu_F", "P_cn_dBm",
              "P_c0_dBm", "N_max"},
             "overhead");
  if (j.contains("T_ms")) m.T = j.at("T_ms").get<double>() * 1e-3;
  if (j.contains("T0_ms")) m.T0 = j.at("T0_ms").get<double>() * 1e-3;
  if (j.contains("b_F")) m.b_F = j.at("b_F").get<double>();
  if (j.contains("B_F_Hz")) m.B_F = j.at("B_F_Hz").get<double>();
  if (j.contains("p_F_dBm")) m.p_F = dbm2watt(j.at("p_F_dBm").get<double>());
  if (j.contains("h_F2")) m.h_F2 = j.at("h_F2").get<double>();
  if (j.contains("B_Hz")) m.B = j.at("B_Hz").get<double>();
  if (j.contains("N0_dBm_per_Hz"))
    m.N0_psd = dbm2watt(j.at("N0_dBm_per_Hz").get<double>());
  if (j.contains("P0_dBm")) m.P0 = dbm2watt(j.at("P0_dBm").get<double>());
  if (j.contains("p_dBm")) m.p = dbm2watt(j.at("p_dBm").get<double>());
  if (j.contains("mu")) m.mu = j.at("mu").get<double>();
  if (j.contains("mu_F")) m.mu_F = j.at("mu_F").get<double>();
  if (j.contains("P_cn_dBm")) m.P_cn = dbm2watt(j.at("P_cn_dBm").get<double>());
  if (j.contains("P_c0_dBm")) m.P_c0 = dbm2watt(j.at("P_c0_dBm").get<double>());
  if (j.contains("N_max")) m.N_max = j.at("N_max").get<int>();
  return m;
}

std::map<std::string, double> parse_overrides(
    const json& j, std::initializer_list<const char*> allowed,
    const char* ctx) {
  check_keys(j, allowed, ctx);
  std::map<std::string, double> out;
  for (auto it = j.begin(); it != j.end(); ++it)
    out[it.key()] = it.value().get<double>();
  return out;
}

std::vector<std::string> default_solvers(const std::string& experiment) {
  if (experiment == "capacity_vs_N")
    return {"E-GD-1", "E-GD-2", "SSA-B", "CPP-1", "CPP-2", "SA"};
  if (experiment == "runtime_vs_N") return {"E-GD-1", "E-GD-2"};
  return {"SSA-T", "UA"};
}

bool solver_allowed(const std::string& experiment, const std::string& solver) {
  if (is_power_experiment(experiment)) return solver == "SSA-T" || solver == "UA";
  return solver == "E-GD-1" || solver == "E-GD-2" || solver == "SSA-B" ||
         solver == "CPP-1" || solver == "CPP-2" || solver == "SA";
}

// ---------------------------------------------------------------------------
// Solver construction (desk-scale defaults, overridable from the spec)
// ---------------------------------------------------------------------------

void apply_egd_overrides(const std::map<std::string, double>& o, EgdConfig& c) {
  const auto get = [&o](const char* k, auto& v) {
    const auto it = o.find(k);
    if (it != o.end()) v = static_cast<std::decay_t<decltype(v)>>(it->second);
  };
  get("rho", c.rho);
  get("eps_armijo", c.eps_armijo);
  get("eps_th", c.eps_th);
  get("beta_init", c.beta_init);
  get("G", c.G);
  get("max_iter", c.max_iter);
  get("temper", c.temper);
}

void apply_ssa_overrides(const std::map<std::string, double>& o, SsaConfig& c) {
  const auto get = [&o](const char* k, auto& v) {
    const auto it = o.find(k);
    if (it != o.end()) v = static_cast<std::decay_t<decltype(v)>>(it->second);
  };
  get("t_max", c.t_max);
  get("eps_t", c.eps_t);
  get("beta_s", c.beta_s);
  get("N_e", c.N_e);
  get("b_m", c.b_m);
  get("r_max", c.r_max);
  get("G_s", c.G_s);
  get("eps_bcd", c.eps_bcd);
  get("max_rounds", c.max_rounds);
  get("temper", c.temper);
}

EgdConfig make_egd(const ExperimentSpec& spec, int order) {
  EgdConfig c;
  c.order = order;
  c.qs_impl = spec.qs_impl;
  apply_egd_overrides(spec.egd_over, c);
  return c;
}

EgdConfig make_cpp1(const ExperimentSpec& spec) {
  EgdConfig c;
  c.beta_init = 0.1;  // phase steps live on a wider scale than box steps
  apply_egd_overrides(spec.egd_over, c);
  return c;
}

SsaConfig make_ssab(const ExperimentSpec& spec) {
  SsaConfig c;
  c.beta_s = 0.01;  // rate-type objective step; other knobs at defaults
  apply_ssa_overrides(spec.ssa_over, c);
  return c;
}

SsaConfig make_ssat(const ExperimentSpec& spec, int N, bool rate_metric) {
  SsaConfig c;
  c.eps_bcd = 1e-3;
  c.beta_s = rate_metric ? 0.01 : 0.5;
  if (N <= 16) {  // small problems afford the full sampling budget
    c.t_max = 300;
    c.N_e = 200;
    c.b_m = 10;
    c.G_s = 10000;
    c.max_rounds = 10;
  } else {
    c.t_max = 60;
    c.N_e = 200;
    c.b_m = 5;
    c.G_s = 2000;
    c.max_rounds = 6;
  }
  apply_ssa_overrides(spec.ssa_over, c);
  return c;
}

struct SinrOutcome {
  Eigen::VectorXd theta;
  int iterations = -1;  // -1: solver does not expose a count
};

SinrOutcome solve_sinr(const std::string& name, const SinrProblem& prob,
                       const ChannelSet& ch, const ExperimentSpec& spec,
                       Rng& rng) {
  SinrOutcome out;
  if (name == "E-GD-1" || name == "E-GD-2") {
    const auto res =
        egd_solve(prob, ch, make_egd(spec, name == "E-GD-1" ? 1 : 2), rng);
    out.theta = res.theta_best;
    out.iterations = res.iterations;
  } else if (name == "SSA-B") {
    out.theta = ssa_b_solve(prob, make_ssab(spec), rng);
  } else if (name == "CPP-1") {
    out.theta = cpp1(ch, make_cpp1(spec));
  } else if (name == "CPP-2") {
    out.theta = cpp2(prob, sa_init(ch), make_egd(spec, 1));
  } else if (name == "SA") {
    out.theta = sa_project(ch);
  } else {
    throw std::invalid_argument("unknown SINR solver '" + name + "'");
  }
  return out;
}

Eigen::VectorXd solve_overhead(const std::string& name, const ChannelSet& ch,
                               const OverheadModel& m, bool rate_metric,
                               const ExperimentSpec& spec, Rng& rng) {
  if (name == "UA")
    return ua(ch, m, rate_metric ? UaMetric::Rate : UaMetric::EE);
  if (name != "SSA-T")
    throw std::invalid_argument("unknown overhead solver '" + name + "'");
  const int N = ch.N();
  // Minimization convention: negated metric, Mbit scaling.
  const BatchObjective J = [&ch, &m, rate_metric](const Eigen::MatrixXd& t) {
    const Eigen::VectorXd v = rate_metric ? rate_batch(t, ch, m)
                                          : ee_batch(t, ch, m);
    return (-v / 1e6).eval();
  };
  return ssa_t_bcd(J, N, make_ssat(spec, N, rate_metric), rng).theta;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

void push_stat_row(ExperimentResult& out, const ExperimentSpec& spec,
                   const std::string& label, const std::string& solver,
                   const std::string& sweep_var, double sweep_value,
                   const std::string& metric, const std::vector<double>& v) {
  ResultRow row;
  row.experiment = label;
  row.solver = solver;
  row.sweep_var = sweep_var;
  row.sweep_value = sweep_value;
  row.metric = metric;
  row.R = static_cast<int>(v.size());
  row.seed = spec.seed;
  if (v.empty()) {
    row.mean = std::numeric_limits<double>::quiet_NaN();
    row.stderr_ = std::numeric_limits<double>::quiet_NaN();
  } else {
    double sum = 0.0;
    for (double x : v) sum += x;
    row.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - row.mean) * (x - row.mean);
    row.stderr_ = v.size() > 1
                      ? std::sqrt(ss / static_cast<double>(v.size() - 1)) /
                            std::sqrt(static_cast<double>(v.size()))
                      : 0.0;
  }
  out.rows.push_back(std::move(row));
}

void push_value_row(ExperimentResult& out, const ExperimentSpec& spec,
                    const std::string& label, const std::string& solver,
                    const std::string& sweep_var, double sweep_value,
                    const std::string& metric, double value, double stderr_v,
                    int R) {
  ResultRow row;
  row.experiment = label;
  row.solver = solver;
  row.sweep_var = sweep_var;
  row.sweep_value = sweep_value;
  row.metric = metric;
  row.mean = value;
  row.stderr_ = stderr_v;
  row.R = R;
  row.seed = spec.seed;
  out.rows.push_back(std::move(row));
}

int count_active(const Eigen::VectorXd& theta) {
  int n = 0;
  for (int i = 0; i < theta.size(); ++i)
    if (theta(i) != 0.0) ++n;
  return n;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) /
         std::sqrt(static_cast<double>(v.size()));
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

void run_capacity(const ExperimentSpec& spec, ExperimentResult& out) {
  const std::size_t S = spec.solvers.size();
  for (std::size_t si = 0; si < spec.sweep.size(); ++si) {
    const int N = static_cast<int>(spec.sweep[si]);
    const std::uint64_t m2 = derive_seed(spec.seed, si, 9999);
    std::vector<std::vector<double>> vals(S);
    std::vector<int> fails(S, 0);
    for (int r = 0; r < spec.realizations; ++r) {
      ScenarioConfig sc = spec.scenario;
      sc.N = N;
      sc.seed = derive_seed(m2, static_cast<std::uint64_t>(r), 0);
      Rng crng(sc.seed);
      const ChannelSet ch = gen_rician(sc, crng);
      const SinrProblem prob = build_problem(ch);
      for (std::size_t s = 0; s < S; ++s) {
        Rng srng(derive_seed(m2, static_cast<std::uint64_t>(r),
                             static_cast<std::uint64_t>(
                                 solver_id(spec.solvers[s]))));
        try {
          const auto res = solve_sinr(spec.solvers[s], prob, ch, spec, srng);
          vals[s].push_back(capacity(res.theta, prob));
        } catch (const std::exception&) {
          ++fails[s];
          ++out.failures;
        }
      }
    }
    for (std::size_t s = 0; s < S; ++s) {
      push_stat_row(out, spec, spec.experiment, spec.solvers[s], "N",
                    static_cast<double>(N), "capacity_bit_per_s_per_Hz",
                    vals[s]);
      if (fails[s] > 0)
        push_value_row(out, spec, spec.experiment, spec.solvers[s], "N",
                       static_cast<double>(N), "failures",
                       static_cast<double>(fails[s]), 0.0, spec.realizations);
    }
  }
}

void run_power_sweep(const ExperimentSpec& spec, ExperimentResult& out,
                     bool rate_metric) {
  const std::size_t S = spec.solvers.size();
  const char* primary = rate_metric ? "rate_Mbit_per_s" : "ee_Mbit_per_J";
  const char* secondary = rate_metric ? "ee_Mbit_per_J" : "rate_Mbit_per_s";
  for (std::size_t si = 0; si < spec.sweep.size(); ++si) {
    const double p_dBm = spec.sweep[si];
    const std::uint64_t m2 = derive_seed(spec.seed, si, 9999);
    OverheadModel m = spec.overhead;
    m.p = dbm2watt(p_dBm);
    const int N_use = max_elements(m);
    std::vector<std::vector<double>> v_primary(S), v_secondary(S), v_nact(S);
    std::vector<int> fails(S, 0);
    if (N_use < 1) {
      // Overhead fills the slot before the first element: every realization
      // of every solver is infeasible at this sweep point.
      for (std::size_t s = 0; s < S; ++s) fails[s] = spec.realizations;
      out.failures += static_cast<int>(S) * spec.realizations;
    } else {
      for (int r = 0; r < spec.realizations; ++r) {
        ScenarioConfig sc = spec.scenario;
        sc.N = N_use;
        sc.p_dBm = p_dBm;
        sc.seed = derive_seed(m2, static_cast<std::uint64_t>(r), 0);
        Rng crng(sc.seed);
        const ChannelSet ch = gen_rician(sc, crng);
        for (std::size_t s = 0; s < S; ++s) {
          Rng srng(derive_seed(m2, static_cast<std::uint64_t>(r),
                               static_cast<std::uint64_t>(
                                   solver_id(spec.solvers[s]))));
          try {
            const Eigen::VectorXd theta = solve_overhead(
                spec.solvers[s], ch, m, rate_metric, spec, srng);
            const double rate_v = rate(theta, ch, m) / 1e6;
            const double ee_v = ee(theta, ch, m) / 1e6;
            v_primary[s].push_back(rate_metric ? rate_v : ee_v);
            v_secondary[s].push_back(rate_metric ? ee_v : rate_v);
            v_nact[s].push_back(static_cast<double>(count_active(theta)));
          } catch (const std::exception&) {
            ++fails[s];
            ++out.failures;
          }
        }
      }
    }
    for (std::size_t s = 0; s < S; ++s) {
      push_stat_row(out, spec, spec.experiment, spec.solvers[s], "p_dBm",
                    p_dBm, primary, v_primary[s]);
      push_stat_row(out, spec, spec.experiment, spec.solvers[s], "p_dBm",
                    p_dBm, secondary, v_secondary[s]);
      push_stat_row(out, spec, spec.experiment, spec.solvers[s], "p_dBm",
                    p_dBm, "n_active", v_nact[s]);
      if (fails[s] > 0)
        push_value_row(out, spec, spec.experiment, spec.solvers[s], "p_dBm",
                       p_dBm, "failures", static_cast<double>(fails[s]), 0.0,
                       spec.realizations);
    }
  }
}

void run_element_table(const ExperimentSpec& spec, ExperimentResult& out) {
  const std::size_t S = spec.solvers.size();
  for (std::size_t si = 0; si < spec.sweep.size(); ++si) {
    const double p_dBm = spec.sweep[si];
    const std::uint64_t sweep_master = derive_seed(spec.seed, si, 9999);
    for (std::size_t ti = 0; ti < spec.T0_ms.size(); ++ti) {
      const double T0_ms = spec.T0_ms[ti];
      const std::uint64_t m2 = derive_seed(sweep_master, ti, 8888);
      OverheadModel m = spec.overhead;
      m.T0 = T0_ms * 1e-3;
      m.p = dbm2watt(p_dBm);
      const int N_use = max_elements(m);
      const std::string suffix = "_T0_" + fmt_short(T0_ms) + "ms";
      std::vector<std::vector<double>> v_nact(S), v_ee(S);
      std::vector<int> fails(S, 0);
      if (N_use < 1) {
        for (std::size_t s = 0; s < S; ++s) fails[s] = spec.realizations;
        out.failures += static_cast<int>(S) * spec.realizations;
      } else {
        for (int r = 0; r < spec.realizations; ++r) {
          ScenarioConfig sc = spec.scenario;
          sc.N = N_use;
          sc.p_dBm = p_dBm;
          sc.seed = derive_seed(m2, static_cast<std::uint64_t>(r), 0);
          Rng crng(sc.seed);
          const ChannelSet ch = gen_rician(sc, crng);
          for (std::size_t s = 0; s < S; ++s) {
            Rng srng(derive_seed(m2, static_cast<std::uint64_t>(r),
                                 static_cast<std::uint64_t>(
                                     solver_id(spec.solvers[s]))));
            try {
              const Eigen::VectorXd theta = solve_overhead(
                  spec.solvers[s], ch, m, /*rate_metric=*/false, spec, srng);
              v_nact[s].push_back(static_cast<double>(count_active(theta)));
              v_ee[s].push_back(ee(theta, ch, m) / 1e6);
            } catch (const std::exception&) {
              ++fails[s];
              ++out.failures;
            }
          }
        }
      }
      for (std::size_t s = 0; s < S; ++s) {
        push_stat_row(out, spec, spec.experiment, spec.solvers[s], "p_dBm",
                      p_dBm, "n_active" + suffix, v_nact[s]);
        push_stat_row(out, spec, spec.experiment, spec.solvers[s], "p_dBm",
                      p_dBm, "ee_Mbit_per_J" + suffix, v_ee[s]);
        if (fails[s] > 0)
          push_value_row(out, spec, spec.experiment, spec.solvers[s], "p_dBm",
                         p_dBm, "failures" + suffix,
                         static_cast<double>(fails[s]), 0.0,
                         spec.realizations);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Timing (runtime_vs_N and bench)
// ---------------------------------------------------------------------------

template <typename F>
double time_once(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

struct TimingUnit {
  std::function<void()> grad;  // empty when the solver has no isolated grad
  std::function<void()> iter;
  int iterations = -1;
};

TimingUnit make_timing_unit(const std::string& name, const SinrProblem& prob,
                            const ChannelSet& ch, const ExperimentSpec& spec,
                            Rng& rng) {
  TimingUnit unit;
  if (name == "E-GD-1" || name == "E-GD-2" || name == "CPP-2") {
    const EgdConfig cfg = make_egd(spec, name == "E-GD-2" ? 2 : 1);
    const Eigen::VectorXd y0 = sa_init(ch);
    std::function<double(const Eigen::VectorXd&)> J;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> g;
    if (name == "CPP-2") {
      J = [&prob](const Eigen::VectorXd& y) {
        return (y.dot(prob.R0 * y) + prob.c0.dot(y)) /
               (y.dot(prob.K * y) + prob.s.dot(y));
      };
      g = [&prob](const Eigen::VectorXd& y) {
        const double fs = y.dot(prob.R0 * y) + prob.c0.dot(y);
        const double fI = y.dot(prob.K * y) + prob.s.dot(y);
        const Eigen::VectorXd gs = 2.0 * (prob.R0 * y) + prob.c0;
        const Eigen::VectorXd gI = 2.0 * (prob.K * y) + prob.s;
        return ((gs * fI - fs * gI) / (fI * fI)).eval();
      };
    } else if (name == "E-GD-1") {
      J = [&prob](const Eigen::VectorXd& y) { return taylor1(y, prob); };
      g = [&prob](const Eigen::VectorXd& y) { return grad_taylor1(y, prob); };
    } else {
      J = [&prob, &cfg](const Eigen::VectorXd& y) {
        return taylor2(y, prob, cfg.qs_impl);
      };
      g = [&prob, &cfg](const Eigen::VectorXd& y) {
        return grad_taylor2(y, prob, cfg.qs_impl);
      };
    }
    unit.grad = [y0, g]() { g_timing_sink = g_timing_sink + g(y0).sum(); };
    unit.iter = [y0, g, J, cfg]() {
      const Eigen::VectorXd gv = g(y0);
      const double beta = ag_line_search(y0, gv, J, cfg);
      g_timing_sink = g_timing_sink + project_box(y0 + beta * gv).sum();
    };
    if (name != "CPP-2") {
      Rng solve_rng(rng.next_u64());
      unit.iterations = egd_solve(prob, ch, cfg, solve_rng).iterations;
    }
  } else if (name == "SSA-B") {
    const SsaConfig cfg = make_ssab(spec);
    const int N = prob.N();
    auto Jb = [&prob](const Eigen::MatrixXd& t) {
      const Eigen::VectorXd fs =
          ((t * prob.R0).cwiseProduct(t)).rowwise().sum() + t * prob.c0;
      const Eigen::VectorXd fI =
          ((t * prob.K).cwiseProduct(t)).rowwise().sum() + t * prob.s;
      return (-(fs.array() / fI.array())).matrix().eval();
    };
    const Eigen::VectorXd p0 = Eigen::VectorXd::Constant(N, 0.5);
    unit.grad = [Jb, p0, cfg, &rng]() {
      const auto b = grad_estimate_binary(Jb, p0, cfg.N_e, 0.0, rng);
      g_timing_sink = g_timing_sink + b.g_hat.sum();
    };
    unit.iter = [Jb, p0, cfg, &rng]() {
      std::vector<EstimatorBatch> batches;
      batches.reserve(static_cast<std::size_t>(cfg.b_m));
      Eigen::VectorXd g_mean = Eigen::VectorXd::Zero(p0.size());
      Eigen::VectorXd d_mean = Eigen::VectorXd::Zero(p0.size());
      for (int b = 0; b < cfg.b_m; ++b) {
        batches.push_back(grad_estimate_binary(Jb, p0, cfg.N_e, 0.0, rng));
        g_mean += batches.back().g_hat;
        d_mean += batches.back().d;
      }
      g_mean /= static_cast<double>(cfg.b_m);
      d_mean /= static_cast<double>(cfg.b_m);
      const double b_star = optimal_baseline_binary(p0, batches);
      const Eigen::VectorXd p_next =
          (p0 - cfg.beta_s * (g_mean - b_star * d_mean))
              .cwiseMax(1e-3)
              .cwiseMin(1.0 - 1e-3);
      g_timing_sink = g_timing_sink + p_next.sum();
    };
  } else if (name == "CPP-1") {
    EgdConfig cfg = make_cpp1(spec);
    cfg.max_iter = 1;
    unit.iter = [&ch, cfg]() { g_timing_sink = g_timing_sink + cpp1(ch, cfg).sum(); };
  } else if (name == "SA") {
    unit.iter = [&ch]() { g_timing_sink = g_timing_sink + sa_init(ch).sum(); };
  } else {
    throw std::invalid_argument("solver '" + name + "' is not benchable");
  }
  return unit;
}

void run_timing(const ExperimentSpec& spec, const std::string& label,
                ExperimentResult& out) {
  if (is_power_experiment(spec.experiment))
    throw std::invalid_argument(
        "timing runs need an element-count sweep (capacity_vs_N or "
        "runtime_vs_N spec)");
  const int reps = std::max(spec.realizations, 30);
  for (std::size_t si = 0; si < spec.sweep.size(); ++si) {
    const int N = static_cast<int>(spec.sweep[si]);
    const std::uint64_t m2 = derive_seed(spec.seed, si, 9999);
    ScenarioConfig sc = spec.scenario;
    sc.N = N;
    sc.seed = derive_seed(m2, 0, 0);
    Rng crng(sc.seed);
    const ChannelSet ch = gen_rician(sc, crng);
    const SinrProblem prob = build_problem(ch);
    for (const std::string& solver : spec.solvers) {
      Rng srng(derive_seed(m2, 0,
                           static_cast<std::uint64_t>(solver_id(solver))));
      const TimingUnit unit = make_timing_unit(solver, prob, ch, spec, srng);
      if (unit.grad) {
        for (int w = 0; w < 3; ++w) unit.grad();
        std::vector<double> t(static_cast<std::size_t>(reps));
        for (int i = 0; i < reps; ++i) t[static_cast<std::size_t>(i)] =
            time_once(unit.grad);
        push_value_row(out, spec, label, solver, "N", static_cast<double>(N),
                       "grad_time_s", median_of(t), stderr_of(t), reps);
      }
      {
        for (int w = 0; w < 3; ++w) unit.iter();
        std::vector<double> t(static_cast<std::size_t>(reps));
        for (int i = 0; i < reps; ++i) t[static_cast<std::size_t>(i)] =
            time_once(unit.iter);
        push_value_row(out, spec, label, solver, "N", static_cast<double>(N),
                       "iter_time_s", median_of(t), stderr_of(t), reps);
      }
      if (unit.iterations >= 0)
        push_value_row(out, spec, label, solver, "N", static_cast<double>(N),
                       "iterations", static_cast<double>(unit.iterations), 0.0,
                       1);
    }
  }
}

json spec_to_json(const ExperimentSpec& spec) {
  json j;
  j["experiment"] = spec.experiment;
  j["sweep"] = spec.sweep;
  j["realizations"] = spec.realizations;
  j["seed"] = spec.seed;
  j["solvers"] = spec.solvers;
  j["out"] = spec.out;
  j["second_moment_impl"] =
      spec.qs_impl == SecondMomentImpl::Direct ? "direct" : "literal_kron";
  json sc;
  sc["N"] = spec.scenario.N;
  sc["N_I"] = spec.scenario.N_I;
  sc["kappa"] = spec.scenario.kappa;
  sc["p_dBm"] = spec.scenario.p_dBm;
  sc["delta_PL_dB"] = spec.scenario.delta_PL_dB;
  sc["B_Hz"] = spec.scenario.B_Hz;
  sc["N0_dBm_per_Hz"] = spec.scenario.N0_dBm_per_Hz;
  sc["blocked_direct"] = spec.scenario.blocked_direct;
  sc["los_only"] = spec.scenario.los_only;
  sc["seed"] = spec.scenario.seed;
  j["scenario"] = sc;
  json ov;
  ov["T_ms"] = spec.overhead.T * 1e3;
  ov["T0_ms"] = spec.overhead.T0 * 1e3;
  ov["b_F"] = spec.overhead.b_F;
  ov["B_F_Hz"] = spec.overhead.B_F;
  ov["p_F_dBm"] = watt2dbm(spec.overhead.p_F);
  ov["h_F2"] = spec.overhead.h_F2;
  ov["B_Hz"] = spec.overhead.B;
  ov["N0_dBm_per_Hz"] = watt2dbm(spec.overhead.N0_psd);
  ov["P0_dBm"] = watt2dbm(spec.overhead.P0);
  ov["p_dBm"] = watt2dbm(spec.overhead.p);
  ov["mu"] = spec.overhead.mu;
  ov["mu_F"] = spec.overhead.mu_F;
  ov["P_cn_dBm"] = watt2dbm(spec.overhead.P_cn);
  ov["P_c0_dBm"] = watt2dbm(spec.overhead.P_c0);
  ov["N_max"] = spec.overhead.N_max;
  j["overhead"] = ov;
  j["T0_ms"] = spec.T0_ms;
  j["egd"] = spec.egd_over;
  j["ssa"] = spec.ssa_over;
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public interface
// ---------------------------------------------------------------------------

int solver_id(const std::string& name) {
  if (name == "E-GD-1") return 1;
  if (name == "E-GD-2") return 2;
  if (name == "SSA-B") return 3;
  if (name == "SSA-T") return 4;
  if (name == "CPP-1") return 5;
  if (name == "CPP-2") return 6;
  if (name == "SA") return 7;
  if (name == "UA") return 8;
  throw std::invalid_argument("unknown solver '" + name + "'");
}

ExperimentSpec parse_spec_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("spec is not valid JSON: ") +
                                e.what());
  }
  check_keys(j,
             {"experiment", "sweep", "realizations", "seed", "solvers",
              "scenario", "overhead", "T0_ms", "out", "second_moment_impl",
              "egd", "ssa"},
             "spec");
  ExperimentSpec spec;
  if (!j.contains("experiment"))
    throw std::invalid_argument("spec is missing 'experiment'");
  spec.experiment = j.at("experiment").get<std::string>();
  if (std::find_if(kExperiments.begin(), kExperiments.end(),
                   [&spec](const char* e) { return spec.experiment == e; }) ==
      kExperiments.end())
    throw std::invalid_argument("unknown experiment '" + spec.experiment + "'");
  if (!j.contains("sweep")) throw std::invalid_argument("spec is missing 'sweep'");
  spec.sweep = j.at("sweep").get<std::vector<double>>();
  if (spec.sweep.empty()) throw std::invalid_argument("sweep must be non-empty");
  if (!is_power_experiment(spec.experiment)) {
    for (double v : spec.sweep)
      if (v < 1.0 || v != std::floor(v))
        throw std::invalid_argument(
            "element-count sweeps need positive integer values");
  }
  if (j.contains("realizations"))
    spec.realizations = j.at("realizations").get<int>();
  if (spec.realizations < 1)
    throw std::invalid_argument("realizations must be >= 1");
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  spec.solvers = j.contains("solvers")
                     ? j.at("solvers").get<std::vector<std::string>>()
                     : default_solvers(spec.experiment);
  if (spec.solvers.empty())
    throw std::invalid_argument("solvers must be non-empty");
  for (const std::string& s : spec.solvers) {
    solver_id(s);  // known name
    if (!solver_allowed(spec.experiment, s))
      throw std::invalid_argument("solver '" + s + "' does not apply to " +
                                  spec.experiment);
  }
  if (j.contains("scenario"))
    spec.scenario = parse_scenario(j.at("scenario"), spec.scenario);
  if (j.contains("overhead"))
    spec.overhead = parse_overhead(j.at("overhead"), spec.overhead);
  if (j.contains("T0_ms")) {
    spec.T0_ms = j.at("T0_ms").get<std::vector<double>>();
    if (spec.T0_ms.empty())
      throw std::invalid_argument("T0_ms must be non-empty");
  }
  if (j.contains("out")) spec.out = j.at("out").get<std::string>();
  if (j.contains("second_moment_impl")) {
    const std::string v = j.at("second_moment_impl").get<std::string>();
    if (v == "direct")
      spec.qs_impl = SecondMomentImpl::Direct;
    else if (v == "literal_kron")
      spec.qs_impl = SecondMomentImpl::LiteralKron;
    else
      throw std::invalid_argument("second_moment_impl must be 'direct' or "
                                  "'literal_kron'");
  }
  if (j.contains("egd"))
    spec.egd_over = parse_overrides(
        j.at("egd"),
        {"rho", "eps_armijo", "eps_th", "beta_init", "G", "max_iter", "temper"},
        "egd");
  if (j.contains("ssa"))
    spec.ssa_over = parse_overrides(
        j.at("ssa"),
        {"t_max", "eps_t", "beta_s", "N_e", "b_m", "r_max", "G_s", "eps_bcd",
         "max_rounds", "temper"},
        "ssa");
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec_json(ss.str());
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  ExperimentResult out;
  if (spec.experiment == "capacity_vs_N") {
    run_capacity(spec, out);
  } else if (spec.experiment == "runtime_vs_N") {
    run_timing(spec, spec.experiment, out);
  } else if (spec.experiment == "ee_vs_p") {
    run_power_sweep(spec, out, /*rate_metric=*/false);
  } else if (spec.experiment == "rate_vs_p") {
    run_power_sweep(spec, out, /*rate_metric=*/true);
  } else if (spec.experiment == "element_count_table") {
    run_element_table(spec, out);
  } else {
    throw std::invalid_argument("unknown experiment '" + spec.experiment + "'");
  }
  return out;
}

ExperimentResult bench_experiment(const ExperimentSpec& spec) {
  ExperimentResult out;
  run_timing(spec, "bench", out);
  return out;
}

double time_gradient_median(int N, int order, SecondMomentImpl impl, int reps,
                            std::uint64_t seed) {
  ScenarioConfig sc;
  sc.N = N;
  sc.seed = seed;
  Rng rng(seed);
  const ChannelSet ch = gen_rician(sc, rng);
  const SinrProblem prob = build_problem(ch);
  const Eigen::VectorXd y0 = sa_init(ch);
  const auto eval = [&]() {
    const Eigen::VectorXd g =
        order == 1 ? grad_taylor1(y0, prob) : grad_taylor2(y0, prob, impl);
    g_timing_sink = g_timing_sink + g.sum();
  };
  for (int w = 0; w < 3; ++w) eval();
  std::vector<double> t(static_cast<std::size_t>(std::max(reps, 1)));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = time_once(eval);
  return median_of(t);
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out =
      "experiment,solver,sweep_var,sweep_value,metric,mean,stderr,R,seed\n";
  for (const ResultRow& r : rows) {
    out += r.experiment;
    out += ',';
    out += r.solver;
    out += ',';
    out += r.sweep_var;
    out += ',';
    out += fmt17(r.sweep_value);
    out += ',';
    out += r.metric;
    out += ',';
    out += fmt17(r.mean);
    out += ',';
    out += fmt17(r.stderr_);
    out += ',';
    out += std::to_string(r.R);
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

namespace {

std::uint32_t rotl32(std::uint32_t x, int s) {
  return (x << s) | (x >> (32 - s));
}

std::array<std::uint32_t, 5> sha1_digest(const std::string& msg) {
  std::string m = msg;
  const std::uint64_t ml = static_cast<std::uint64_t>(msg.size()) * 8ULL;
  m.push_back(static_cast<char>(0x80));
  while (m.size() % 64 != 56) m.push_back('\0');
  for (int i = 7; i >= 0; --i)
    m.push_back(static_cast<char>((ml >> (8 * i)) & 0xffULL));

  std::array<std::uint32_t, 5> h = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu,
                                    0x10325476u, 0xC3D2E1F0u};
  std::uint32_t w[80];
  for (std::size_t off = 0; off < m.size(); off += 64) {
    for (int i = 0; i < 16; ++i) {
      w[i] = (static_cast<std::uint32_t>(
                  static_cast<unsigned char>(m[off + 4 * i]))
              << 24) |
             (static_cast<std::uint32_t>(
                  static_cast<unsigned char>(m[off + 4 * i + 1]))
              << 16) |
             (static_cast<std::uint32_t>(
                  static_cast<unsigned char>(m[off + 4 * i + 2]))
              << 8) |
             static_cast<std::uint32_t>(
                 static_cast<unsigned char>(m[off + 4 * i + 3]));
    }
    for (int i = 16; i < 80; ++i)
      w[i] = rotl32(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      const std::uint32_t temp = rotl32(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rotl32(b, 30);
      b = a;
      a = temp;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }
  return h;
}

}  // namespace

std::string sha1_git_blob(const std::string& content) {
  std::string msg = "blob " + std::to_string(content.size());
  msg.push_back('\0');
  msg += content;
  const auto h = sha1_digest(msg);
  char buf[41];
  std::snprintf(buf, sizeof(buf), "%08x%08x%08x%08x%08x", h[0], h[1], h[2],
                h[3], h[4]);
  return buf;
}

void write_outputs(const ExperimentSpec& spec, const ExperimentResult& result,
                   const std::string& out_base) {
  const std::filesystem::path base(out_base);
  if (base.has_parent_path())
    std::filesystem::create_directories(base.parent_path());
  const std::string csv = to_csv(result.rows);
  {
    std::ofstream f(out_base + ".csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + out_base + ".csv'");
    f << csv;
  }
  json side;
  side["experiment"] = spec.experiment;
  side["csv"] = base.filename().string() + ".csv";
  side["csv_sha1"] = sha1_git_blob(csv);
  side["rows"] = result.rows.size();
  side["failures"] = result.failures;
  side["config"] = spec_to_json(spec);
  std::ofstream f(out_base + ".json", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + out_base + ".json'");
  f << side.dump(2) << "\n";
}

int run_cli(const std::string& command, const std::string& spec_path,
            const CliOverrides& overrides) {
  ExperimentSpec spec = load_spec(spec_path);
  if (overrides.seed) spec.seed = *overrides.seed;
  if (overrides.realizations) {
    if (*overrides.realizations < 1)
      throw std::invalid_argument("realizations must be >= 1");
    spec.realizations = *overrides.realizations;
  }
  if (overrides.out) spec.out = *overrides.out;

  ExperimentResult result;
  if (command == "run") {
    result = run_experiment(spec);
  } else if (command == "bench") {
    result = bench_experiment(spec);
  } else {
    throw std::invalid_argument("unknown command '" + command + "'");
  }
  write_outputs(spec, result, spec.out);
  std::cout << spec.out << ".csv: " << result.rows.size() << " rows, "
            << result.failures << " solver failures\n";
  return result.failures > 0 ? 2 : 0;
}

}  // namespace prf
