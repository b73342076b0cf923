// Python bindings for the core operations: closed-form +-1 moments and
// gradients, exact categorical expectations, seeded channel instances, and
// the discrete phase solvers with their experiment-default budgets.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>
#include <string>

#include "prfopt/baselines.hpp"
#include "prfopt/binary_moments.hpp"
#include "prfopt/categorical.hpp"
#include "prfopt/egd.hpp"
#include "prfopt/overhead.hpp"
#include "prfopt/rng.hpp"
#include "prfopt/sinr_scenario.hpp"
#include "prfopt/ssa.hpp"

namespace py = pybind11;
using namespace prf;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

SecondMomentImpl impl_of(const std::string& name) {
  if (name == "direct") return SecondMomentImpl::Direct;
  if (name == "literal_kron") return SecondMomentImpl::LiteralKron;
  throw std::invalid_argument("impl must be 'direct' or 'literal_kron'");
}

CategoricalParams params_of(const MatrixXd& probs,
                            const std::vector<double>& values) {
  CategoricalParams P;
  P.probs = probs;
  P.alphabet.values = values;
  P.validate();
  return P;
}

ScenarioConfig scenario_of(int N, int N_I, std::uint64_t seed, double kappa,
                           double p_dBm, bool blocked_direct, bool los_only) {
  ScenarioConfig sc;
  sc.N = N;
  sc.N_I = N_I;
  sc.seed = seed;
  sc.kappa = kappa;
  sc.p_dBm = p_dBm;
  sc.blocked_direct = blocked_direct;
  sc.los_only = los_only;
  return sc;
}

ChannelSet channels_of(const ScenarioConfig& sc) {
  Rng rng(sc.seed);
  return gen_rician(sc, rng);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Probabilistic reformulation of discrete phase optimization: exact "
      "moment oracles, analytical and sampled gradient solvers, and the "
      "reflecting-surface case-study objectives.";

  // -- Closed-form +-1 moments and gradients -------------------------------
  m.def("mean_qf", &mean_qf, py::arg("G"), py::arg("z"), py::arg("y"),
        "E[x^T G x + z^T x] for independent +-1 entries with mean y.");
  m.def("grad_qf", &grad_qf, py::arg("G"), py::arg("z"), py::arg("y"));
  m.def("mean_ql", &mean_ql, py::arg("G"), py::arg("z"), py::arg("y"),
        "E[(x^T G x)(z^T x)].");
  m.def("grad_ql", &grad_ql, py::arg("G"), py::arg("z"), py::arg("y"));
  m.def(
      "mean_qs",
      [](const MatrixXd& G, const VectorXd& y, const std::string& impl) {
        return mean_qs(G, y, impl_of(impl));
      },
      py::arg("G"), py::arg("y"), py::arg("impl") = "direct",
      "E[(x^T G x)^2].");
  m.def(
      "grad_qs",
      [](const MatrixXd& G, const VectorXd& y, const std::string& impl) {
        return grad_qs(G, y, impl_of(impl));
      },
      py::arg("G"), py::arg("y"), py::arg("impl") = "direct");

  // -- Exact categorical expectations ---------------------------------------
  m.def(
      "expectation_exact",
      [](const std::function<double(const VectorXd&)>& f, const MatrixXd& probs,
         const std::vector<double>& values, std::uint64_t cap) {
        return expectation_exact(f, params_of(probs, values), cap);
      },
      py::arg("f"), py::arg("probs"), py::arg("values"),
      py::arg("cap") = (1ULL << 24),
      "Exact E[f(x)] over the product categorical distribution given by the "
      "row-stochastic matrix probs over the alphabet values.");
  m.def(
      "sample_categorical",
      [](const MatrixXd& probs, const std::vector<double>& values,
         std::uint64_t seed, int draws) {
        Rng rng(seed);
        return sample(params_of(probs, values), rng, draws);
      },
      py::arg("probs"), py::arg("values"), py::arg("seed"), py::arg("draws"),
      "Seeded i.i.d. draws, one sampled vector per row.");
  m.def("boxqp_transform", &boxqp_transform, py::arg("W"),
        "Zero-diagonal rewrite (W_wd, trace) with x^T W x = x^T W_wd x + "
        "trace for +-1 x.");
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("a"),
        py::arg("b"), "Deterministic child-seed derivation.");

  // -- Seeded SINR instances ------------------------------------------------
  m.def(
      "sinr_instance",
      [](int N, int N_I, std::uint64_t seed, double kappa, double p_dBm,
         bool blocked_direct, bool los_only) {
        const ChannelSet ch = channels_of(
            scenario_of(N, N_I, seed, kappa, p_dBm, blocked_direct, los_only));
        const SinrProblem prob = build_problem(ch);
        py::dict d;
        d["R0"] = prob.R0;
        d["c0"] = prob.c0;
        d["K"] = prob.K;
        d["s"] = prob.s;
        d["sigma_w2"] = ch.sigma_w2;
        return d;
      },
      py::arg("N"), py::arg("N_I") = 1, py::arg("seed") = 1,
      py::arg("kappa") = 4.0, py::arg("p_dBm") = 0.0,
      py::arg("blocked_direct") = true, py::arg("los_only") = false,
      "Quadratic-form representation (R0, c0, K, s) of a seeded channel "
      "realization; SINR(theta) = (theta^T R0 theta + c0^T theta) / "
      "(theta^T K theta + s^T theta) for +-1 theta.");
  m.def(
      "taylor_surrogate",
      [](const VectorXd& y, const MatrixXd& R0, const VectorXd& c0,
         const MatrixXd& K, const VectorXd& s, int order,
         const std::string& impl) {
        SinrProblem prob{R0, K, c0, s};
        if (order == 1) return taylor1(y, prob);
        if (order == 2) return taylor2(y, prob, impl_of(impl));
        throw std::invalid_argument("order must be 1 or 2");
      },
      py::arg("y"), py::arg("R0"), py::arg("c0"), py::arg("K"), py::arg("s"),
      py::arg("order") = 1, py::arg("impl") = "direct",
      "Expectation surrogate of the SINR ratio at mean vector y.");

  // -- Solvers with the experiment-default budgets --------------------------
  m.def(
      "solve_sinr",
      [](int N, int N_I, std::uint64_t channel_seed, const std::string& solver,
         std::uint64_t solver_seed) {
        const ChannelSet ch = channels_of(
            scenario_of(N, N_I, channel_seed, 4.0, 0.0, true, false));
        const SinrProblem prob = build_problem(ch);
        Rng rng(solver_seed);
        VectorXd theta;
        if (solver == "E-GD-1" || solver == "E-GD-2") {
          EgdConfig cfg;
          cfg.order = solver == "E-GD-2" ? 2 : 1;
          theta = egd_solve(prob, ch, cfg, rng).theta_best;
        } else if (solver == "SSA-B") {
          SsaConfig cfg;
          cfg.beta_s = 0.01;
          theta = ssa_b_solve(prob, cfg, rng);
        } else if (solver == "CPP-1") {
          EgdConfig cfg;
          cfg.beta_init = 0.1;
          theta = cpp1(ch, cfg);
        } else if (solver == "CPP-2") {
          theta = cpp2(prob, sa_init(ch), EgdConfig{});
        } else if (solver == "SA") {
          theta = sa_project(ch);
        } else {
          throw std::invalid_argument("unknown solver '" + solver + "'");
        }
        return py::make_tuple(theta, capacity(theta, prob));
      },
      py::arg("N"), py::arg("N_I"), py::arg("channel_seed"), py::arg("solver"),
      py::arg("solver_seed") = 1,
      "Run one solver on a seeded instance; returns (theta, capacity).");
  m.def(
      "solve_ee",
      [](int N, int N_I, std::uint64_t channel_seed, const std::string& solver,
         std::uint64_t solver_seed, double T0_ms, double p_dBm) {
        OverheadModel m;
        m.T0 = T0_ms * 1e-3;
        m.p = dbm2watt(p_dBm);
        const ChannelSet ch = channels_of(
            scenario_of(N, N_I, channel_seed, 4.0, p_dBm, true, false));
        VectorXd theta;
        if (solver == "UA") {
          theta = ua(ch, m, UaMetric::EE);
        } else if (solver == "SSA-T") {
          SsaConfig cfg;
          cfg.eps_bcd = 1e-3;
          if (N > 16) {
            cfg.t_max = 60;
            cfg.b_m = 5;
            cfg.G_s = 2000;
            cfg.max_rounds = 6;
          } else {
            cfg.max_rounds = 10;
          }
          const BatchObjective J = [&ch, &m](const MatrixXd& thetas) {
            return (-ee_batch(thetas, ch, m) / 1e6).eval();
          };
          Rng rng(solver_seed);
          theta = ssa_t_bcd(J, N, cfg, rng).theta;
        } else {
          throw std::invalid_argument("unknown solver '" + solver + "'");
        }
        return py::make_tuple(theta, ee(theta, ch, m));
      },
      py::arg("N"), py::arg("N_I"), py::arg("channel_seed"), py::arg("solver"),
      py::arg("solver_seed") = 1, py::arg("T0_ms") = 1.0,
      py::arg("p_dBm") = 30.0,
      "Overhead-aware energy-efficiency solve; returns (ternary theta, EE in "
      "bit/J).");
  m.def(
      "exhaustive_capacity",
      [](int N, int N_I, std::uint64_t channel_seed) {
        const ChannelSet ch = channels_of(
            scenario_of(N, N_I, channel_seed, 4.0, 0.0, true, false));
        const SinrProblem prob = build_problem(ch);
        const Alphabet bin{{-1.0, 1.0}};
        const auto best = exhaustive(
            [&prob](const VectorXd& x) { return capacity(x, prob); }, bin, N);
        return py::make_tuple(best.first, best.second);
      },
      py::arg("N"), py::arg("N_I"), py::arg("channel_seed"),
      "Global capacity optimum of a seeded instance by enumeration "
      "(small N only).");
}
