// Batch experiment runner: seeded sweeps over element count or transmit
// power, paired channel realizations across solvers, CSV output with a
// JSON sidecar carrying the resolved configuration and a content hash, and
// a per-iteration timing bench.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prfopt/binary_moments.hpp"
#include "prfopt/overhead.hpp"
#include "prfopt/sinr_scenario.hpp"

namespace prf {

// One CSV data row. Doubles are printed with %.17g so equal results are
// byte-equal.
struct ResultRow {
  std::string experiment;
  std::string solver;
  std::string sweep_var;
  double sweep_value = 0.0;
  std::string metric;
  double mean = 0.0;
  double stderr_ = 0.0;
  int R = 0;
  std::uint64_t seed = 0;
};

struct ExperimentSpec {
  // capacity_vs_N | runtime_vs_N | ee_vs_p | rate_vs_p | element_count_table
  std::string experiment;
  std::vector<double> sweep;          // N values or p values (dBm)
  int realizations = 1;               // R >= 1
  std::uint64_t seed = 1;             // master seed
  std::vector<std::string> solvers;   // run in the given order
  ScenarioConfig scenario;            // N / p_dBm overridden per sweep point
  OverheadModel overhead;             // p (and T0) overridden per sweep point
  std::vector<double> T0_ms{1.0};     // element_count_table pilot durations
  std::string out = "results/experiment";
  SecondMomentImpl qs_impl = SecondMomentImpl::Direct;
  std::map<std::string, double> egd_over;  // numeric overrides of solver knobs
  std::map<std::string, double> ssa_over;
};

// Parse from JSON text / file. Unknown keys, unknown solver names, an empty
// sweep, or R < 1 raise std::invalid_argument.
ExperimentSpec parse_spec_json(const std::string& json_text);
ExperimentSpec load_spec(const std::string& path);

// Stable small integers per solver name, used in per-realization seed
// derivation so solver sets stay comparable on identical channels.
int solver_id(const std::string& name);

struct ExperimentResult {
  std::vector<ResultRow> rows;
  int failures = 0;  // solver errors recorded per-row; run continues
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

// Per-iteration timing: for each sweep element count and solver, the median
// over max(R, 30) repetitions (3 discarded warm-ups) of one gradient
// evaluation and of one full iteration (gradient + line search +
// projection), plus deterministic iteration counts where exposed.
ExperimentResult bench_experiment(const ExperimentSpec& spec);

// Median wall-clock seconds of one expectation-gradient evaluation at the
// signal-aligned start of a fresh N-element instance (exposed for the
// complexity-scaling test).
double time_gradient_median(int N, int order, SecondMomentImpl impl, int reps,
                            std::uint64_t seed);

std::string to_csv(const std::vector<ResultRow>& rows);

// Hex SHA-1 of "blob <size>\0<content>" (the git blob object id).
std::string sha1_git_blob(const std::string& content);

// Write <out_base>.csv and <out_base>.json (resolved config, row count,
// failure count, and the CSV's content hash), creating directories.
void write_outputs(const ExperimentSpec& spec, const ExperimentResult& result,
                   const std::string& out_base);

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> realizations;
  std::optional<std::string> out;
};

// `run` or `bench` on a spec file; returns the process exit code
// (0 success, 2 when some solver runs failed).
int run_cli(const std::string& command, const std::string& spec_path,
            const CliOverrides& overrides);

}  // namespace prf
