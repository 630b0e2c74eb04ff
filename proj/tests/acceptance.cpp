// Acceptance suite: one PASS/FAIL line per criterion.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "czdo/config.hpp"
#include "czdo/czono.hpp"
#include "czdo/error.hpp"
#include "czdo/lp.hpp"
#include "czdo/observer.hpp"
#include "czdo/oracle.hpp"
#include "czdo/sim.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_cases.hpp"

using namespace czdo;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string config_path(const char* name) { return std::string(CZDO_CONFIG_DIR) + "/" + name; }

std::string fmt(double x, const char* f = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

struct Shell {
  int code;
  std::string out;
};

Shell shell(const std::string& cmd) {
  Shell r{-1, {}};
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool endpoints_close(double a, double b, double tol) { return a == b || std::abs(a - b) <= tol; }

bool hulls_close(const Box& a, const Box& b, double tol, double* worst) {
  bool ok = a.dim() == b.dim();
  for (Eigen::Index i = 0; ok && i < a.dim(); ++i) {
    for (auto [x, y] : {std::pair{a.lower(i), b.lower(i)}, std::pair{a.upper(i), b.upper(i)}}) {
      if (x == y) continue;
      const double gap = std::abs(x - y);
      if (!std::isfinite(gap)) return false;
      *worst = std::max(*worst, gap);
      ok = ok && gap <= tol;
    }
  }
  return ok;
}

// 1. Existence verdicts through the command-line tool.
Verdict existence_verdicts() {
  Verdict v;
  struct Case {
    const char* file;
    int exit_code;
    bool exists;
    int n_o_expect;  // -1 when not fixed
    bool corollary;
  };
  const Case cases[] = {{"example3.json", 0, true, 5, false},
                        {"example3_blind.json", 3, false, -1, true},
                        {"scalar_cz.json", 0, true, -1, false}};
  for (const auto& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = shell(std::string(CZDO_CLI) + " check " + config_path(c.file) + " 2>/dev/null");
    const double dt = seconds_since(t0);
    std::ostringstream d;
    d << c.file << ": exit " << r.code << ", " << fmt(dt, "%.3f") << " s";
    bool ok = r.code == c.exit_code && dt < 1.0;
    try {
      const auto j = nlohmann::json::parse(r.out);
      const auto plant = config::load(config_path(c.file)).plant_model();
      const Matrix oa = augmented_observability(plant, static_cast<int>(plant.n() + plant.q()));
      const int ro = oracle_support::gauss_rank(oa.leftCols(plant.n()));
      const int ra = oracle_support::gauss_rank(oa);
      ok = ok && j["exists"] == c.exists && j["rank_O"] == ro && j["rank_O_aug"] == ra;
      if (c.n_o_expect >= 0) ok = ok && j["N_o"] == c.n_o_expect;
      if (c.corollary) ok = ok && j["corollary1_reject"] == true;
      d << ", exists=" << j["exists"] << ", N_o=" << j["N_o"] << ", ranks " << j["rank_O"] << "/" << j["rank_O_aug"]
        << " (elimination " << ro << "/" << ra << ")";
    } catch (const std::exception& e) {
      ok = false;
      d << ", " << e.what();
    }
    v.pass = v.pass && ok;
    v.detail += (v.detail.empty() ? "" : "; ") + d.str();
  }
  return v;
}

// 2. Containment, boundedness and diameter plateau on the benchmark.
Verdict boundedness() {
  Verdict v;
  auto s = config::load(config_path("example3.json")).scenario();
  s.runs = 100;
  s.horizon = 100;
  const int delta = 3;
  const auto proto = DisturbanceObserver::build(s.plant, s.dist, s.x0_box, delta, s.tol);
  const int mu = proto.existence().mu_o;
  const int k0 = 2 * mu;
  std::vector<double> max_diam(static_cast<std::size_t>(s.horizon + 1), 0.0);
  int violations = 0, unbounded = 0, runs_over = 0;
  for (int r = 0; r < s.runs; ++r) {
    sim::Trace tr;
    try {
      tr = sim::run_trace(s, proto, sim::generate_trajectory(s, r));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ContainmentViolation) throw;
      ++violations;
      continue;
    }
    double run_sup = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      const bool all_bounded = std::all_of(tr.bounded[k].begin(), tr.bounded[k].end(), [](bool b) { return b; });
      if (static_cast<int>(k) >= mu - 1 && !all_bounded) ++unbounded;
      max_diam[k] = std::max(max_diam[k], tr.hull_diam[k]);
      if (static_cast<int>(k) >= k0) run_sup = std::max(run_sup, tr.hull_diam[k]);
    }
    if (run_sup > 1.05 * tr.hull_diam[static_cast<std::size_t>(k0)]) ++runs_over;
  }
  double sup = 0.0;
  for (int k = k0; k <= s.horizon; ++k) sup = std::max(sup, max_diam[static_cast<std::size_t>(k)]);
  const double base = max_diam[static_cast<std::size_t>(k0)];
  v.pass = violations == 0 && unbounded == 0 && sup <= 1.05 * base;
  v.detail = "violations=" + std::to_string(violations) + ", unbounded after k=" + std::to_string(mu - 1) + ": " +
             std::to_string(unbounded) + ", worst-case diameter at k=" + std::to_string(k0) + " " + fmt(base) +
             ", sup over [" + std::to_string(k0) + "," + std::to_string(s.horizon) + "] " + fmt(sup) + " (ratio " +
             fmt(sup / base) + "); single runs above 1.05: " + std::to_string(runs_over) + "/" +
             std::to_string(s.runs);
  return v;
}

// 3. Observer hulls equal the full-information LP hulls before the first restart.
Verdict worst_case_optimality() {
  Verdict v;
  std::mt19937_64 rng(3003);
  double worst = 0.0;
  int mismatches = 0, steps = 0;
  for (int sys = 0; sys < 50; ++sys) {
    const int delta = 2 + sys % 2;
    auto s = fixtures::random_scenario(rng, delta - 1, 9000 + static_cast<std::uint64_t>(sys));
    auto obs = DisturbanceObserver::build(s.plant, s.dist, s.x0_box, delta, s.tol);
    const auto traj = sim::generate_trajectory(s, 0);
    oracle::TrajectoryLp t{&s.plant, &s.dist.step_set, s.x0_box, {}, {}};
    for (std::size_t k = 0; k < traj.y.size(); ++k) {
      std::optional<Vector> u;
      if (k > 0) {
        u = traj.u[k - 1];
        t.inputs.push_back(*u);
      }
      t.measurements.push_back(traj.y[k]);
      const Box observed = obs.step(u, traj.y[k]).hull;
      const Box exact = oracle::exact_posterior_hull(t);
      ++steps;
      if (!hulls_close(observed, exact, 1e-6, &worst)) ++mismatches;
    }
  }
  v.pass = mismatches == 0;
  v.detail = "50 systems, " + std::to_string(steps) + " steps, mismatches=" + std::to_string(mismatches) +
             ", worst finite gap " + fmt(worst, "%.3g");
  return v;
}

// 4. Error is non-increasing in delta with diminishing returns.
Verdict delta_behaviour() {
  Verdict v;
  auto s = config::load(config_path("example3.json")).scenario();
  s.runs = 200;
  s.horizon = 100;
  s.deltas = {3, 10, 20};
  const auto mc = sim::monte_carlo(s, 0);
  const double e3 = mc.per_delta[0].mean_agg, e10 = mc.per_delta[1].mean_agg, e20 = mc.per_delta[2].mean_agg;
  const bool monotone = e10 <= 1.05 * e3 && e20 <= 1.05 * e10;
  const double gain_a = (e3 - e10) / e3, gain_b = (e10 - e20) / e10;
  v.pass = monotone && gain_b < gain_a;
  v.detail = "mean err: delta=3 " + fmt(e3) + ", delta=10 " + fmt(e10) + ", delta=20 " + fmt(e20) +
             "; improvement 3->10 " + fmt(100 * gain_a, "%.1f") + "%, 10->20 " + fmt(100 * gain_b, "%.1f") + "%";
  return v;
}

CZ random_cz(std::mt19937_64& rng, int dim) {
  const int ng = std::uniform_int_distribution<int>(dim, dim + 3)(rng);
  const int nc = std::uniform_int_distribution<int>(0, std::min(2, ng - dim))(rng);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Matrix G = fixtures::random_matrix(rng, dim, ng, 1.0);
  const Vector c = fixtures::random_matrix(rng, dim, 1, 0.5);
  const Matrix A = fixtures::random_matrix(rng, nc, ng, 1.0);
  Vector h(ng), xi(ng);
  for (int j = 0; j < ng; ++j) h(j) = 0.3 + 0.7 * std::abs(u(rng));
  for (int j = 0; j < ng; ++j) xi(j) = 0.7 * h(j) * u(rng);
  return CZ(G, c, A, A * xi, h);
}

std::vector<oracle_support::Point2> polygon(const std::vector<Vector>& verts, const CZ& z) {
  std::vector<oracle_support::Point2> pts;
  for (const Vector& xi : verts) {
    const Vector p = z.G() * xi + z.c();
    pts.push_back({p(0), p(1)});
  }
  return oracle_support::convex_hull(pts);
}

// 5. Grid membership and hull tightness of CZ operation results.
Verdict cz_algebra() {
  Verdict v;
  std::mt19937_64 rng(5005);
  std::size_t agree = 0, total = 0;
  int loose = 0, hulls = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const CZ z = random_cases::random_cz2(rng);
    const CZ w = random_cases::random_cz2(rng);
    const Matrix r = fixtures::random_matrix(rng, 2, 2);
    // Slice a 3-D set through one of its points and view the slice in the first two coordinates,
    // so the intersection result has a 2-D interior.
    const CZ z3 = random_cz(rng, 3);
    lp::Polyhedron gens(z3.A(), z3.b(), -z3.h(), z3.h());
    const Vector on = z3.G() * gens.feasible_point() + z3.c();
    const Matrix cut = fixtures::random_matrix(rng, 1, 3);
    Matrix drop = Matrix::Zero(2, 3);
    drop(0, 0) = drop(1, 1) = 1.0;
    const CZ results[] = {cz::affine_image(r, z, Vector::Constant(2, 0.1)), cz::minkowski_sum(z, w),
                          cz::affine_image(drop, cz::intersect_affine(z3, cut, cut * on))};
    for (const CZ& res : results) {
      const auto verts = oracle_support::enumerate_vertices(res.A(), res.b(), -res.h(), res.h());
      const auto poly = polygon(verts, res);
      const auto hw = cz::interval_hull_witnessed(res);
      const Box& hb = hw.box;
      ++hulls;
      for (int i = 0; i < 2; ++i) {
        double vmin = kInf, vmax = -kInf;
        for (const auto& vx : verts) {
          const double val = res.G().row(i).dot(vx) + res.c()(i);
          vmin = std::min(vmin, val);
          vmax = std::max(vmax, val);
        }
        const double at_lo = res.G().row(i).dot(hw.argmin[static_cast<std::size_t>(i)]) + res.c()(i);
        const double at_hi = res.G().row(i).dot(hw.argmax[static_cast<std::size_t>(i)]) + res.c()(i);
        if (std::abs(vmin - hb.lower(i)) > 1e-7 || std::abs(vmax - hb.upper(i)) > 1e-7 ||
            std::abs(at_lo - hb.lower(i)) > 1e-7 || std::abs(at_hi - hb.upper(i)) > 1e-7) {
          ++loose;
          break;
        }
      }
      const double mx = 0.1 * (hb.upper(0) - hb.lower(0)) + 1e-3, my = 0.1 * (hb.upper(1) - hb.lower(1)) + 1e-3;
      for (int gx = 0; gx <= 100; ++gx) {
        for (int gy = 0; gy <= 100; ++gy) {
          const double x = hb.lower(0) - mx + (hb.upper(0) - hb.lower(0) + 2 * mx) * gx / 100.0;
          const double y = hb.lower(1) - my + (hb.upper(1) - hb.lower(1) + 2 * my) * gy / 100.0;
          const auto q = oracle_support::query_polygon(poly, {x, y});
          if (q.boundary_distance < 1e-6) continue;
          ++total;
          Vector p(2);
          p << x, y;
          agree += cz::contains_point(res, p, 1e-9) == q.inside;
        }
      }
    }
  }
  const double rate = total ? static_cast<double>(agree) / static_cast<double>(total) : 0.0;
  v.pass = rate >= 0.999 && loose == 0;
  v.detail = std::to_string(total) + " grid points, agreement " + fmt(100 * rate, "%.4f") + "%, loose hulls " +
             std::to_string(loose) + "/" + std::to_string(hulls);
  return v;
}

// 6. Recursive and monolithic window assembly agree.
Verdict window_equivalence() {
  Verdict v;
  std::mt19937_64 rng(6006);
  double worst = 0.0;
  int mismatches = 0, steps = 0;
  for (int sys = 0; sys < 25; ++sys) {
    const int delta = 2 + sys % 2;
    auto s = fixtures::random_scenario(rng, 15, 6000 + static_cast<std::uint64_t>(sys));
    auto rec = DisturbanceObserver::build(s.plant, s.dist, s.x0_box, delta, s.tol, WindowMode::Recursive);
    auto mono = DisturbanceObserver::build(s.plant, s.dist, s.x0_box, delta, s.tol, WindowMode::Monolithic);
    const auto traj = sim::generate_trajectory(s, 0);
    for (std::size_t k = 0; k < traj.y.size(); ++k) {
      std::optional<Vector> u;
      if (k > 0) u = traj.u[k - 1];
      const Box a = rec.step(u, traj.y[k]).hull;
      const Box b = mono.step(u, traj.y[k]).hull;
      ++steps;
      if (!hulls_close(a, b, 1e-7, &worst)) ++mismatches;
    }
  }
  v.pass = mismatches == 0;
  v.detail = "25 systems, " + std::to_string(steps) + " steps, mismatches=" + std::to_string(mismatches) +
             ", worst gap " + fmt(worst, "%.3g");
  return v;
}

// 7. Simplex against vertex enumeration.
Verdict lp_correctness() {
  Verdict v;
  std::mt19937_64 rng(7007);
  int status_mismatch = 0, value_mismatch = 0, counts[3] = {0, 0, 0};
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_cases::random_lp(rng);
    const auto ref = oracle_support::brute_force_lp(p.objective, p.eq_lhs, p.eq_rhs, p.lower, p.upper);
    const auto got = lp::solve(p);
    lp::Status expect = lp::Status::Infeasible;
    if (ref.verdict == oracle_support::LpVerdict::Optimal) expect = lp::Status::Optimal;
    if (ref.verdict == oracle_support::LpVerdict::Unbounded) expect = lp::Status::Unbounded;
    ++counts[static_cast<int>(expect)];
    if (got.status != expect) {
      ++status_mismatch;
    } else if (expect == lp::Status::Optimal && std::abs(got.value - ref.value) > 1e-7) {
      ++value_mismatch;
    }
  }
  v.pass = status_mismatch == 0 && value_mismatch == 0;
  v.detail = "optimal/unbounded/infeasible = " + std::to_string(counts[0]) + "/" + std::to_string(counts[1]) + "/" +
             std::to_string(counts[2]) + ", status mismatches " + std::to_string(status_mismatch) +
             ", value mismatches " + std::to_string(value_mismatch);
  return v;
}

// 8. montecarlo output is byte-identical across repetitions and thread counts.
Verdict determinism() {
  Verdict v;
  const std::string args = " montecarlo " + config_path("example3.json") + " --runs 24 --steps 60 2>/dev/null";
  std::vector<std::string> outs;
  for (const char* threads : {"1", "4", "1", "4"}) {
    const auto r = shell(std::string("CZDO_THREADS=") + threads + " " + CZDO_CLI + args);
    if (r.code != 0) {
      v.pass = false;
      v.detail = "montecarlo exited with " + std::to_string(r.code);
      return v;
    }
    outs.push_back(r.out);
  }
  for (const auto& o : outs) v.pass = v.pass && o == outs[0];
  v.detail = "4 invocations (CZDO_THREADS 1,4,1,4; 24 runs x 60 steps x 3 deltas), " +
             std::to_string(outs[0].size()) + " bytes each, " + (v.pass ? "identical" : "differ");
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
    double budget_s;  // 0 when the criterion has no runtime bound of its own
  };
  const Criterion criteria[] = {
      {"1 existence verdicts", existence_verdicts, 0.0},
      {"2 boundedness on the benchmark", boundedness, 120.0},
      {"3 worst-case optimality vs oracle", worst_case_optimality, 60.0},
      {"4 delta behaviour", delta_behaviour, 0.0},
      {"5 CZ algebra oracle equivalence", cz_algebra, 120.0},
      {"6 window equivalence", window_equivalence, 0.0},
      {"7 LP solver correctness", lp_correctness, 0.0},
      {"8 montecarlo determinism", determinism, 0.0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double dt = seconds_since(t0);
    if (c.budget_s > 0 && dt > c.budget_s) {
      v.pass = false;
      v.detail += "; over the " + fmt(c.budget_s, "%.0f") + " s budget";
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << c.name << " [" << fmt(dt, "%.2f") << " s]: "
              << v.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
