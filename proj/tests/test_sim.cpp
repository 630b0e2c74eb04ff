#include <doctest.h>

#include <algorithm>

#include "czdo/error.hpp"
#include "czdo/sim.hpp"
#include "support/fixtures.hpp"

using namespace czdo;

namespace {

sim::Scenario hand_trace_scenario() {
  sim::Scenario s{fixtures::scalar(1.0),
                  DisturbanceStepModel::from_box(fixtures::cube(1, 1.0)),
                  Box::point(Vector::Zero(1)),
                  Box::point(Vector::Constant(1, 0.3)),
                  {},
                  5,
                  {3},
                  1,
                  7,
                  {}};
  return s;
}

}  // namespace

TEST_CASE("box step sets are sampled uniformly per axis") {
  auto s = fixtures::example3_scenario(2000, 1, 5);
  const auto t = sim::generate_trajectory(s, 0);
  REQUIRE(t.dd.size() == 2000);
  int bins[2][4] = {};
  for (const auto& dd : t.dd) {
    for (int i = 0; i < 2; ++i) {
      REQUIRE(dd(i) >= -1.0);
      REQUIRE(dd(i) <= 1.0);
      ++bins[i][std::min(3, static_cast<int>((dd(i) + 1.0) * 2.0))];
    }
  }
  for (auto& axis : bins)
    for (int b : axis) CHECK(std::abs(b - 500) < 100);
  CHECK(sim::sampling_description(s) == "uniform");
}

TEST_CASE("trajectory recursion and zero-width initial disturbance") {
  auto s = fixtures::example3_scenario(10, 1, 6);
  s.d0_range = Box::point(Vector::Zero(2));
  const auto t = sim::generate_trajectory(s, 3);
  CHECK(t.d[0] == Vector::Zero(2));
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK((t.x[k + 1] - (s.plant.Phi() * t.x[k] + s.plant.G() * t.d[k])).norm() < 1e-15);
    CHECK((t.d[k + 1] - (t.d[k] + t.dd[k])).norm() == 0.0);
    CHECK((t.y[k] - s.plant.Xi() * t.x[k]).norm() == 0.0);
  }
}

TEST_CASE("same seed and run index reproduce the same trajectory") {
  auto s = fixtures::example3_scenario(30, 1, 77);
  const auto a = sim::generate_trajectory(s, 4);
  const auto b = sim::generate_trajectory(s, 4);
  const auto c = sim::generate_trajectory(s, 5);
  for (std::size_t k = 0; k < a.y.size(); ++k) {
    CHECK(a.x[k] == b.x[k]);
    CHECK(a.d[k] == b.d[k]);
  }
  CHECK(a.x[1] != c.x[1]);
}

TEST_CASE("hand-trace scenario") {
  const auto tr = sim::run_trace(hand_trace_scenario(), 3, 0);
  REQUIRE(tr.size() == 6);
  CHECK(tr.d_hat[1](0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(tr.hull[1].lower(0) == doctest::Approx(-0.7).epsilon(1e-12));
  CHECK(tr.err_inf[0] == std::numeric_limits<double>::infinity());
}

TEST_CASE("zero horizon gives a single entry") {
  auto s = hand_trace_scenario();
  s.horizon = 0;
  const auto tr = sim::run_trace(s, 3, 0);
  CHECK(tr.size() == 1);
}

TEST_CASE("constrained step sets use rejection sampling") {
  Matrix g(1, 2), a(1, 2);
  g << 1, 0.5;
  a << 1, -1;
  Vector h(2);
  h << 1, 1;
  CZ set(g, Vector::Zero(1), a, Vector::Zero(1), h);  // the interval [-1.5, 1.5]
  sim::Scenario s{fixtures::scalar(0.5), DisturbanceStepModel(set), fixtures::cube(1, 1.0), fixtures::cube(1, 1.0),
                  {}, 400, {1}, 1, 3, {}};
  CHECK(sim::sampling_description(s) == "uniform-rejection");
  const auto t = sim::generate_trajectory(s, 0);
  double lo = 0, hi = 0;
  for (const auto& dd : t.dd) {
    lo = std::min(lo, dd(0));
    hi = std::max(hi, dd(0));
  }
  CHECK(lo >= -1.5);
  CHECK(hi <= 1.5);
  CHECK(lo < -1.3);
  CHECK(hi > 1.3);
}

TEST_CASE("measure-zero step set stalls the rejection sampler") {
  Matrix a(1, 2);
  a << 1, -1;
  CZ diagonal(Matrix::Identity(2, 2), Vector::Zero(2), a, Vector::Zero(1), Vector::Ones(2));
  sim::Scenario s{fixtures::example3(), DisturbanceStepModel(diagonal), fixtures::cube(3, 1.0), fixtures::cube(2, 1.0),
                  {}, 3, {3}, 1, 1, {}};
  try {
    sim::generate_trajectory(s, 0);
    FAIL("expected RejectionStall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RejectionStall);
  }
}

TEST_CASE("single-run summary matches the trace") {
  auto s = fixtures::example3_scenario(30, 1, 12, {3});
  const auto mc = sim::monte_carlo(s, 1);
  const auto tr = sim::run_trace(s, 3, 0);
  REQUIRE(mc.per_delta.size() == 1);
  const auto& d = mc.per_delta[0];
  double sum = 0, mx = 0;
  int cnt = 0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    CHECK(d.mean_err[k] == tr.err_inf[k]);
    CHECK(d.max_err[k] == tr.err_inf[k]);
    if (static_cast<int>(k) >= d.warmup) {
      sum += tr.err_inf[k];
      mx = std::max(mx, tr.err_inf[k]);
      ++cnt;
    }
  }
  CHECK(d.warmup == 2);
  CHECK(d.mean_agg == doctest::Approx(sum / cnt).epsilon(1e-15));
  CHECK(d.max_agg == mx);
}

TEST_CASE("monte carlo is independent of the thread count") {
  auto s = fixtures::example3_scenario(25, 9, 99, {3, 5});
  const auto a = sim::monte_carlo(s, 1);
  const auto b = sim::monte_carlo(s, 3);
  REQUIRE(a.per_delta.size() == b.per_delta.size());
  for (std::size_t i = 0; i < a.per_delta.size(); ++i) {
    CHECK(a.per_delta[i].mean_err == b.per_delta[i].mean_err);
    CHECK(a.per_delta[i].max_err == b.per_delta[i].max_err);
    CHECK(a.per_delta[i].mean_agg == b.per_delta[i].mean_agg);
  }
}

TEST_CASE("different seeds change numbers but not boundedness") {
  auto s1 = fixtures::example3_scenario(30, 4, 1, {3});
  auto s2 = fixtures::example3_scenario(30, 4, 2, {3});
  const auto a = sim::monte_carlo(s1, 1).per_delta[0];
  const auto b = sim::monte_carlo(s2, 1).per_delta[0];
  CHECK(a.mean_agg != b.mean_agg);
  for (std::size_t k = 0; k < a.mean_err.size(); ++k)
    CHECK(std::isfinite(a.mean_err[k]) == std::isfinite(b.mean_err[k]));
}

TEST_CASE("containment audit over many runs") {
  auto s = fixtures::example3_scenario(60, 10, 2024, {3, 6});
  CHECK_NOTHROW(sim::monte_carlo(s, 1));
}
