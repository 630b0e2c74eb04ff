#include "czdo/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "czdo/config.hpp"
#include "czdo/error.hpp"

namespace czdo::cli {

namespace {

constexpr double kGapTol = 1e-6;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config:
    case ErrorCode::Dimension:
    case ErrorCode::MixedBound:
    case ErrorCode::DeltaTooSmall:
      return kUsage;
    case ErrorCode::NotExistent:
      return kNotExistent;
    default:
      return kRuntimeFailure;
  }
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}

config::Config load_with_overrides(const Options& opt) {
  config::Config c = config::load(opt.config_path);
  if (opt.tol_rank) c.observer.tol.rank = *opt.tol_rank;
  if (opt.tol_lp) c.observer.tol.lp = *opt.tol_lp;
  if (opt.tol_contain) c.observer.tol.contain = *opt.tol_contain;
  if (opt.runs) c.experiment.runs = *opt.runs;
  if (opt.seed) c.experiment.seed = *opt.seed;
  return c;
}

int resolve_delta(const Options& opt, const config::Config& c) {
  if (opt.delta) return *opt.delta;
  if (c.observer.delta) return *c.observer.delta;
  if (!c.observer.delta_list.empty()) return c.observer.delta_list.front();
  throw Error(ErrorCode::Config, "observer.delta: missing (pass --delta)");
}

// Writes to --out if given, otherwise to the fallback stream.
void emit(const Options& opt, std::ostream& fallback, const std::function<void(std::ostream&)>& write) {
  if (!opt.out) {
    write(fallback);
    return;
  }
  std::ofstream f(*opt.out, std::ios::binary);
  if (!f) throw Error(ErrorCode::Config, "cannot open output file '" + *opt.out + "'");
  write(f);
  if (!f) throw Error(ErrorCode::Config, "failed writing '" + *opt.out + "'");
}

double endpoint_gap(double a, double b) {
  if (a == b) return 0.0;  // includes matching infinities
  return std::abs(a - b);
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int threads_from_env() {
  const char* v = std::getenv("CZDO_THREADS");
  if (v == nullptr) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || n < 0) return 0;
  return static_cast<int>(n);
}

void write_trace_csv(std::ostream& os, const sim::Trace& tr) {
  const Eigen::Index q = tr.size() > 0 ? tr.d_true.front().size() : 0;
  os << "k";
  for (const char* name : {"d_true", "d_hat"})
    for (Eigen::Index i = 1; i <= q; ++i) os << ',' << name << '_' << i;
  os << ",err_inf";
  for (const char* name : {"hull_lo", "hull_hi"})
    for (Eigen::Index i = 1; i <= q; ++i) os << ',' << name << '_' << i;
  os << ",hull_diam,bounded_flags\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    os << k;
    for (Eigen::Index i = 0; i < q; ++i) os << ',' << format_number(tr.d_true[k](i));
    for (Eigen::Index i = 0; i < q; ++i) os << ',' << format_number(tr.d_hat[k](i));
    os << ',' << format_number(tr.err_inf[k]);
    for (Eigen::Index i = 0; i < q; ++i) os << ',' << format_number(tr.hull[k].lower(i));
    for (Eigen::Index i = 0; i < q; ++i) os << ',' << format_number(tr.hull[k].upper(i));
    os << ',' << format_number(tr.hull_diam[k]) << ',';
    for (bool b : tr.bounded[k]) os << (b ? '1' : '0');
    os << '\n';
  }
}

void write_montecarlo_csv(std::ostream& os, const sim::MonteCarloSummary& mc) {
  os << "# seed=" << mc.seed << ",runs=" << mc.runs << ",horizon=" << mc.horizon
     << ",distribution=" << mc.distribution << '\n';
  os << "delta,k,mean_err_inf,max_err_inf\n";
  for (const auto& d : mc.per_delta) {
    for (std::size_t k = 0; k < d.mean_err.size(); ++k)
      os << d.delta << ',' << k << ',' << format_number(d.mean_err[k]) << ','
         << format_number(d.max_err[k]) << '\n';
  }
  for (const auto& d : mc.per_delta)
    os << d.delta << ",agg," << format_number(d.mean_agg) << ',' << format_number(d.max_agg) << '\n';
}

int cmd_check(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const config::Config c = load_with_overrides(opt);
    const ExistenceReport r = existence_check(c.plant_model(), c.observer.tol.rank);
    nlohmann::json j = {
        {"exists", r.exists},
        {"depth", r.depth},
        {"rank_O", r.rank_O},
        {"rank_O_aug", r.rank_O_aug},
        {"n_o", r.n_o},
        {"N_o", r.N_o},
        {"mu_o", r.mu_o},
        {"corollary1_reject", r.corollary1_reject},
        {"n_block_check",
         {{"depth", c.plant.phi.rows()},
          {"rank_O", r.rank_O_nblock},
          {"rank_O_aug", r.rank_O_aug_nblock},
          {"exists", r.exists_nblock}}},
    };
    emit(opt, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    return r.exists ? kOk : kNotExistent;
  });
}

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const config::Config c = load_with_overrides(opt);
    sim::Scenario s = c.scenario();
    if (opt.steps) s.horizon = *opt.steps;
    const int delta = resolve_delta(opt, c);
    const sim::Trace tr = sim::run_trace(s, delta, 0);
    emit(opt, out, [&](std::ostream& os) { write_trace_csv(os, tr); });
    return kOk;
  });
}

int cmd_montecarlo(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const config::Config c = load_with_overrides(opt);
    sim::Scenario s = c.scenario();
    if (opt.steps) s.horizon = *opt.steps;
    if (opt.delta) s.deltas = {*opt.delta};
    if (s.deltas.empty()) throw Error(ErrorCode::Config, "observer.delta: missing (pass --delta)");
    const int threads = opt.threads > 0 ? opt.threads : threads_from_env();
    const sim::MonteCarloSummary mc = sim::monte_carlo(s, threads);
    emit(opt, out, [&](std::ostream& os) { write_montecarlo_csv(os, mc); });
    return kOk;
  });
}

int cmd_oracle_compare(const Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const config::Config c = load_with_overrides(opt);
    sim::Scenario s = c.scenario();
    const int delta = resolve_delta(opt, c);
    const int steps = opt.steps.value_or(delta - 1);
    if (steps < 0) throw Error(ErrorCode::Config, "--steps must be non-negative");
    if (steps >= delta)
      throw Error(ErrorCode::Config, "--steps " + std::to_string(steps) + " must be below delta = " +
                                         std::to_string(delta) +
                                         ": hulls are exact only before the first window restart");
    s.horizon = steps;
    const sim::Trajectory traj = sim::generate_trajectory(s, 0);
    DisturbanceObserver obs = DisturbanceObserver::build(s.plant, s.dist, s.x0_box, delta, s.tol);
    const lp::Options lpo = s.tol.lp_options();

    oracle::TrajectoryLp tlp{&s.plant, &s.dist.step_set, s.x0_box, {}, {}};
    std::ostringstream csv;
    csv << "k,dim,obs_lo,obs_hi,oracle_lo,oracle_hi,gap\n";
    double worst = 0.0;
    for (int k = 0; k <= steps; ++k) {
      std::optional<Vector> u;
      if (k > 0) {
        u = traj.u[static_cast<std::size_t>(k - 1)];
        tlp.inputs.push_back(*u);
      }
      tlp.measurements.push_back(traj.y[static_cast<std::size_t>(k)]);
      const DisturbanceEstimate est = obs.step(u, traj.y[static_cast<std::size_t>(k)]);
      const Box exact = oracle::exact_posterior_hull(tlp, lpo);
      for (Eigen::Index i = 0; i < exact.dim(); ++i) {
        const double gap = std::max(endpoint_gap(est.hull.lower(i), exact.lower(i)),
                                    endpoint_gap(est.hull.upper(i), exact.upper(i)));
        worst = std::max(worst, gap);
        csv << k << ',' << i + 1 << ',' << format_number(est.hull.lower(i)) << ','
            << format_number(est.hull.upper(i)) << ',' << format_number(exact.lower(i)) << ','
            << format_number(exact.upper(i)) << ',' << format_number(gap) << '\n';
      }
    }
    emit(opt, out, [&](std::ostream& os) { os << csv.str(); });
    if (worst > kGapTol) {
      err << "optimality gap " << format_number(worst) << " exceeds " << format_number(kGapTol) << "\n";
      return kOptimalityGap;
    }
    return kOk;
  });
}

}  // namespace czdo::cli
