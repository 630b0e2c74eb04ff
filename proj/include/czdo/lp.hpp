#pragma once

#include <memory>

#include "czdo/linalg.hpp"

namespace czdo::lp {

inline constexpr double kDefaultFeasTol = 1e-8;
inline constexpr double kDefaultOptTol = 1e-8;

// minimize objective' x  s.t.  eq_lhs x = eq_rhs,  lower <= x <= upper.
// Bounds may be -inf / +inf; a variable with both infinite is free.
struct LinearProgram {
  Vector objective;
  Matrix eq_lhs;
  Vector eq_rhs;
  Vector lower;
  Vector upper;
};

enum class Status { Optimal, Unbounded, Infeasible };

const char* to_string(Status s);

struct Outcome {
  Status status = Status::Infeasible;
  double value = 0.0;  // valid when Optimal
  Vector point;        // valid when Optimal
};

struct Options {
  double feas_tol = kDefaultFeasTol;
  double opt_tol = kDefaultOptTol;
  int max_iterations = 0;  // 0 picks a limit from the problem size
};

/// Bounded-variable primal simplex. Throws Error(IterationLimit) on stalling.
Outcome solve(const LinearProgram& lp, const Options& opts = {});

// Repeated optimization over one feasible set {A x = b, lower <= x <= upper}.
// Phase 1 runs once at construction; each minimize() starts from the last
// optimal basis.
class Polyhedron {
 public:
  Polyhedron(const Matrix& eq_lhs, const Vector& eq_rhs, const Vector& lower, const Vector& upper,
             const Options& opts = {});
  ~Polyhedron();
  Polyhedron(Polyhedron&&) noexcept;
  Polyhedron& operator=(Polyhedron&&) noexcept;

  bool feasible() const;

  /// Any feasible point found by phase 1 (empty when infeasible).
  Vector feasible_point() const;

  /// Minimizes c' x; Infeasible when the set is empty.
  Outcome minimize(const Vector& c);

 private:
  class Engine;
  std::unique_ptr<Engine> engine_;
};

}  // namespace czdo::lp
