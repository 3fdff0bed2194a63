// Social optimum: the allocation maximizing aggregate surplus subject to
// x >= 0 and total rate <= capacity.
//
// With linear utilities the cost depends only on link loads, so the whole
// routing load goes to the single user with the best per-unit value. The
// routing-only problem reduces to one variable (total rate q) and the
// coding-pair problem to two (routing load L, coded rate c).
#pragma once

#include <cstddef>
#include <string_view>

#include "acs/model.hpp"

namespace acs {

enum class Binding { Interior, CapacityBinding };
std::string_view to_string(Binding b);

struct OptimumResult {
  Allocation x_opt;
  double value = 0.0;
  double routing_load = 0.0;
  double coded_rate = 0.0;  // always 0 for routing-only
  Binding binding = Binding::Interior;
};

OptimumResult solve_routing_optimum(const Instance& instance);
OptimumResult solve_coding_optimum(const Instance& instance);
OptimumResult solve_optimum(const Instance& instance);

/// Upper bound on coding-pair aggregate surplus at total rate q with coded
/// rate x_n, obtained by valuing every routed unit at d and every coded unit
/// at 2d:  d*q + d*x_n - a*(q - x_n)^2/(n-1) - a*x_n^2.
double coding_surplus_bound(std::size_t n, double d, double a, double q, double x_n);

/// Best point of the reduced decision space on a grid of the given step
/// (q for routing-only; (L, c) with L + c <= C for the coding pair).
/// Brute force, intended as a test oracle.
OptimumResult grid_optimum(const Instance& instance, double grid_step);

}  // namespace acs
