#include "czdo/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "czdo/error.hpp"

namespace czdo::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long kStallWindow = 100000;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform doubles from the top 53 bits of mt19937_64, identical on every
// conforming standard library.
class RunRng {
 public:
  RunRng(std::uint64_t seed, int run_index)
      : gen_(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(run_index) + 1))) {}

  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo == hi ? lo : lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 gen_;
};

// Axis-aligned box step sets are sampled per axis.
bool is_box_set(const CZ& z) {
  if (z.num_constraints() != 0 || z.G().rows() != z.G().cols()) return false;
  const Matrix& g = z.G();
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      if ((i == j) != (g(i, j) != 0.0)) return false;
  return true;
}

class StepSampler {
 public:
  StepSampler(const CZ& set, const Tolerances& tol) : set_(set), tol_(tol), box_(is_box_set(set)) {
    if (!box_) hull_ = cz::interval_hull(set, tol.lp_options());
  }

  Vector sample(RunRng& rng) {
    const Eigen::Index q = set_.dim();
    Vector out(q);
    if (box_) {
      for (Eigen::Index i = 0; i < q; ++i) {
        const double r = std::abs(set_.G()(i, i)) * set_.h()(i);
        out(i) = rng.uniform(set_.c()(i) - r, set_.c()(i) + r);
      }
      return out;
    }
    for (;;) {
      for (Eigen::Index i = 0; i < q; ++i) out(i) = rng.uniform(hull_.lower(i), hull_.upper(i));
      ++proposals_;
      if (cz::contains_point(set_, out, 1e-12, tol_.lp_options())) {
        ++accepted_;
        return out;
      }
      if (proposals_ >= kStallWindow &&
          static_cast<double>(accepted_) < 0.01 * static_cast<double>(proposals_))
        throw Error(ErrorCode::RejectionStall,
                    "rejection sampler acceptance below 1% over " + std::to_string(proposals_) +
                        " proposals");
    }
  }

 private:
  const CZ& set_;
  Tolerances tol_;
  bool box_;
  Box hull_;
  long proposals_ = 0;
  long accepted_ = 0;
};

double inf_norm_error(const DisturbanceEstimate& est, const Vector& d) {
  for (bool b : est.bounded)
    if (!b) return kInf;
  return (est.d_hat - d).cwiseAbs().maxCoeff();
}

}  // namespace

Vector Scenario::input(int k) const {
  if (inputs.empty()) return Vector::Zero(plant.p());
  return inputs.at(static_cast<std::size_t>(k));
}

std::string sampling_description(const Scenario& s) {
  return is_box_set(s.dist.step_set) ? "uniform" : "uniform-rejection";
}

Trajectory generate_trajectory(const Scenario& s, int run_index) {
  if (s.horizon < 0) throw Error(ErrorCode::Dimension, "horizon must be non-negative");
  if (!s.x0_box.all_bounded() || !s.d0_range.all_bounded())
    throw Error(ErrorCode::Dimension, "sampling boxes for x0 and d0 must be bounded");
  if (!s.inputs.empty() && static_cast<int>(s.inputs.size()) < s.horizon)
    throw Error(ErrorCode::Dimension, "input sequence shorter than the horizon");

  const PlantModel& pl = s.plant;
  RunRng rng(s.seed, run_index);
  StepSampler sampler(s.dist.step_set, s.tol);
  Trajectory t;
  const auto K = static_cast<std::size_t>(s.horizon);
  t.x.reserve(K + 1);
  t.d.reserve(K + 1);
  t.y.reserve(K + 1);

  Vector x(pl.n()), d(pl.q());
  for (Eigen::Index i = 0; i < pl.n(); ++i) x(i) = rng.uniform(s.x0_box.lower(i), s.x0_box.upper(i));
  for (Eigen::Index i = 0; i < pl.q(); ++i) d(i) = rng.uniform(s.d0_range.lower(i), s.d0_range.upper(i));
  for (std::size_t k = 0;; ++k) {
    t.x.push_back(x);
    t.d.push_back(d);
    t.y.push_back(pl.Xi() * x);
    if (k == K) break;
    const Vector u = s.input(static_cast<int>(k));
    const Vector dd = sampler.sample(rng);
    t.u.push_back(u);
    t.dd.push_back(dd);
    x = pl.Phi() * x + pl.Gamma() * u + pl.G() * d;
    d = d + dd;
  }
  return t;
}

Trace run_trace(const Scenario& s, const DisturbanceObserver& prototype, const Trajectory& traj) {
  DisturbanceObserver obs = prototype;
  Trace tr;
  for (std::size_t k = 0; k < traj.y.size(); ++k) {
    std::optional<Vector> u;
    if (k > 0) u = traj.u[k - 1];
    const DisturbanceEstimate est = obs.step(u, traj.y[k]);
    const Vector& d = traj.d[k];
    if (!cz::contains_point(obs.disturbance_set(), d, s.tol.contain, s.tol.lp_options())) {
      std::ostringstream msg;
      msg << "true disturbance left the estimated set at k = " << k << " (d = "
          << d.transpose() << ", hull lower = " << est.hull.lower.transpose()
          << ", upper = " << est.hull.upper.transpose() << ")";
      throw Error(ErrorCode::ContainmentViolation, msg.str());
    }
    tr.d_true.push_back(d);
    tr.d_hat.push_back(est.d_hat);
    tr.err_inf.push_back(inf_norm_error(est, d));
    tr.hull.push_back(est.hull);
    tr.hull_diam.push_back(est.diameter);
    tr.bounded.push_back(est.bounded);
  }
  return tr;
}

Trace run_trace(const Scenario& s, int delta, int run_index) {
  const auto proto = DisturbanceObserver::build(s.plant, s.dist, s.x0_box, delta, s.tol);
  return run_trace(s, proto, generate_trajectory(s, run_index));
}

MonteCarloSummary monte_carlo(const Scenario& s, int threads) {
  if (s.runs < 1) throw Error(ErrorCode::Dimension, "runs must be at least 1");
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, s.runs);

  MonteCarloSummary out;
  out.seed = s.seed;
  out.runs = s.runs;
  out.horizon = s.horizon;
  out.distribution = sampling_description(s);

  // Trajectories do not depend on delta; generate once per run.
  std::vector<Trajectory> trajs(static_cast<std::size_t>(s.runs));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(s.runs));
  auto parallel_for = [&](auto&& body) {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int r; (r = next.fetch_add(1)) < s.runs;) {
        try {
          body(r);
        } catch (...) {
          errors[static_cast<std::size_t>(r)] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  };

  parallel_for([&](int r) { trajs[static_cast<std::size_t>(r)] = generate_trajectory(s, r); });

  const auto steps = static_cast<std::size_t>(s.horizon) + 1;
  for (int delta : s.deltas) {
    const auto proto = DisturbanceObserver::build(s.plant, s.dist, s.x0_box, delta, s.tol);
    std::vector<std::vector<double>> errs(static_cast<std::size_t>(s.runs));
    parallel_for([&](int r) {
      errs[static_cast<std::size_t>(r)] =
          run_trace(s, proto, trajs[static_cast<std::size_t>(r)]).err_inf;
    });

    DeltaSummary ds;
    ds.delta = delta;
    ds.warmup = std::max(0, proto.existence().mu_o - 1);
    ds.mean_err.assign(steps, 0.0);
    ds.max_err.assign(steps, 0.0);
    double agg_sum = 0.0;
    std::size_t agg_count = 0;
    // Fixed reduction order: run-major, then k.
    for (const auto& e : errs) {
      for (std::size_t k = 0; k < steps; ++k) {
        ds.mean_err[k] += e[k];
        ds.max_err[k] = std::max(ds.max_err[k], e[k]);
        if (static_cast<int>(k) >= ds.warmup) {
          agg_sum += e[k];
          ++agg_count;
          ds.max_agg = std::max(ds.max_agg, e[k]);
        }
      }
    }
    for (auto& m : ds.mean_err) m /= static_cast<double>(s.runs);
    ds.mean_agg = agg_count > 0 ? agg_sum / static_cast<double>(agg_count) : 0.0;
    out.per_delta.push_back(std::move(ds));
  }
  return out;
}

}  // namespace czdo::sim
