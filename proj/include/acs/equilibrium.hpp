// Nash equilibria of the routing-only and coding-pair games.
//
// Users anticipate the effect of their own rate on the posted price, so each
// user on a link priced a*load/k has marginal surplus r_i - a*(load + x_i)/k.
// The closed-form solvers resolve these first-order conditions with an
// active-set sweep; best_response_iterate and verify_epsilon_nash are
// independent checks that only use the payoff layer.
#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "acs/model.hpp"

namespace acs {

enum class SolveMethod { ClosedForm, BestResponse };
std::string_view to_string(SolveMethod m);

struct EquilibriumResult {
  Allocation x_star;
  std::vector<std::size_t> active_set;  // sorted positions with x_i > 0
  double q = 0.0;
  bool capacity_feasible = false;
  double foc_residual = 0.0;
  SolveMethod method = SolveMethod::ClosedForm;
  std::size_t iterations = 0;  // full best-response sweeps; 0 for closed form
};

/// Solution of value_j * scale = y_j + sum(y) over y >= 0, i.e. the
/// first-order conditions of users sharing one link with price slope
/// 1/scale. Ties with the posted price resolve to y_j = 0.
struct SharedLinkSolution {
  std::vector<double> rates;  // indexed like the input values
  double load = 0.0;          // sum of rates
  std::size_t active = 0;     // number of users with a positive rate
};
SharedLinkSolution solve_shared_link(std::span<const double> values, double scale);

EquilibriumResult solve_routing_equilibrium(const Instance& instance);

/// Throws SolverError when neither coder orientation yields a Nash
/// equilibrium (happens e.g. for n = 2 with r_2 > r_1 / sqrt(2)).
EquilibriumResult solve_coding_equilibrium(const Instance& instance);

EquilibriumResult solve_equilibrium(const Instance& instance);

/// Largest first-order-condition violation at x, in marginal-surplus units.
/// Coding-pair roles are taken from the realized rates; at x_0 == x_{n-1}
/// both one-sided conditions are checked.
double foc_residual(const Instance& instance, const Allocation& x);

struct BestResponse {
  double rate = 0.0;
  double surplus = 0.0;
};

/// Exact best response of one user to the others' rates. Coding-pair coders
/// maximize each piece of their surplus separately (below and above the
/// other coder's rate) and keep the better one, preferring the lower rate
/// on ties.
BestResponse best_response(const Instance& instance, const Allocation& x,
                           std::size_t user);

struct BestResponseOptions {
  std::size_t max_iters = 10000;
  double tol = 1e-10;
};

class NonConvergenceError : public SolverError {
 public:
  NonConvergenceError(Allocation last, double step, std::size_t iterations);
  const Allocation& last_iterate() const { return last_; }
  double last_step() const { return step_; }
  std::size_t iterations() const { return iterations_; }

 private:
  Allocation last_;
  double step_;
  std::size_t iterations_;
};

/// Cyclic (Gauss-Seidel) best responses from x0 until a full sweep moves no
/// rate by more than tol.
EquilibriumResult best_response_iterate(const Instance& instance,
                                        const Allocation& x0,
                                        const BestResponseOptions& options = {});

struct Deviation {
  std::size_t user = 0;
  double rate = 0.0;
  double gain = 0.0;
};

struct EpsilonNashReport {
  bool passed = false;
  Deviation worst;  // largest unilateral gain found on the grid
};

/// Checks every unilateral deviation to {0, h, 2h, ..., C}.
EpsilonNashReport verify_epsilon_nash(const Instance& instance,
                                      const Allocation& x, double grid_step,
                                      double epsilon);

}  // namespace acs
