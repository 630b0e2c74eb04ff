#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "czdo/oracle.hpp"
#include "czdo/sim.hpp"

namespace czdo::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kNotExistent = 3,
  kRuntimeFailure = 4,
  kOptimalityGap = 5,
};

struct Options {
  std::string config_path;
  std::optional<int> delta;
  std::optional<int> steps;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> tol_rank, tol_lp, tol_contain;
  int threads = 0;  // 0 = auto
};

// Each command writes its report to --out when given, else to `out`;
// diagnostics go to `err`. The return value is the process exit code.
int cmd_check(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_montecarlo(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_oracle_compare(const Options& opt, std::ostream& out, std::ostream& err);

/// 17 significant digits; "inf" / "-inf" / "nan" tokens.
std::string format_number(double x);

void write_trace_csv(std::ostream& os, const sim::Trace& trace);
void write_montecarlo_csv(std::ostream& os, const sim::MonteCarloSummary& mc);

/// CZDO_THREADS, 0 (auto) when unset or unparsable.
int threads_from_env();

}  // namespace czdo::cli
