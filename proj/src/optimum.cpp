#include "acs/optimum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "acs/mechanism.hpp"

namespace acs {

std::string_view to_string(Binding b) {
  return b == Binding::Interior ? "interior" : "capacity_binding";
}

namespace {

// User whose utility slope is the best value for routed traffic; ties go to
// the lower index. In the coding pair only the first coder and the middle
// users are considered.
std::size_t routing_recipient(const Instance& instance) {
  const std::size_t end =
      instance.scenario() == Scenario::RoutingOnly ? instance.n() : instance.n() - 1;
  std::size_t best = 0;
  for (std::size_t i = 1; i < end; ++i)
    if (instance.r(i) > instance.r(best)) best = i;
  return best;
}

Allocation coding_allocation(const Instance& instance, std::size_t recipient,
                             double load, double coded) {
  std::vector<double> x(instance.n(), 0.0);
  x.front() = coded;
  x.back() = coded;
  x[recipient] += load;
  return Allocation(std::move(x));
}

void grid_points(double cap, double step, std::vector<double>& out) {
  out.clear();
  const auto count = static_cast<std::size_t>(std::floor(cap / step + 1e-9));
  for (std::size_t k = 0; k <= count; ++k)
    out.push_back(std::min(cap, static_cast<double>(k) * step));
  if (out.back() < cap) out.push_back(cap);
}

}  // namespace

OptimumResult solve_routing_optimum(const Instance& instance) {
  if (instance.scenario() != Scenario::RoutingOnly)
    throw ValidationError("solve_routing_optimum requires scenario routing_only");
  const double n = static_cast<double>(instance.n());
  const double d = instance.d();
  const double a = instance.a();

  // Maximize d*q - a*q^2/n over [0, C].
  const double unconstrained = d * n / (2.0 * a);
  const double q = std::min(instance.capacity(), unconstrained);

  OptimumResult out;
  std::vector<double> x(instance.n(), 0.0);
  x[routing_recipient(instance)] = q;
  out.x_opt = Allocation(std::move(x));
  out.value = d * q - a * q * q / n;
  out.routing_load = q;
  out.binding = unconstrained >= instance.capacity() ? Binding::CapacityBinding
                                                     : Binding::Interior;
  return out;
}

OptimumResult solve_coding_optimum(const Instance& instance) {
  if (instance.scenario() != Scenario::CodingPair)
    throw ValidationError("solve_coding_optimum requires scenario coding_pair");
  const double divisor = static_cast<double>(instance.n() - 1);
  const double a = instance.a();
  const double cap = instance.capacity();
  const std::size_t recipient = routing_recipient(instance);
  const double routed_value = instance.r(recipient);
  const double coded_value = instance.r(0) + instance.r(instance.n() - 1);

  auto objective = [&](double load, double coded) {
    return routed_value * load + coded_value * coded - a * load * load / divisor -
           a * coded * coded;
  };

  double load = routed_value * divisor / (2.0 * a);
  double coded = coded_value / (2.0 * a);
  Binding binding = Binding::Interior;
  if (load + coded > cap) {
    // On L + c = C the objective is a concave quadratic in c.
    binding = Binding::CapacityBinding;
    coded = (divisor * (coded_value - routed_value) + 2.0 * a * cap) /
            (2.0 * a * (divisor + 1.0));
    coded = std::clamp(coded, 0.0, cap);
    load = cap - coded;
  }

  OptimumResult out;
  out.x_opt = coding_allocation(instance, recipient, load, coded);
  out.value = objective(load, coded);
  out.routing_load = load;
  out.coded_rate = coded;
  out.binding = binding;
  return out;
}

OptimumResult solve_optimum(const Instance& instance) {
  return instance.scenario() == Scenario::RoutingOnly ? solve_routing_optimum(instance)
                                                      : solve_coding_optimum(instance);
}

double coding_surplus_bound(std::size_t n, double d, double a, double q, double x_n) {
  if (n < 2) throw ValidationError("at least two users are required");
  if (!std::isfinite(d) || !std::isfinite(a) || !std::isfinite(q) || !std::isfinite(x_n))
    throw ValidationError("bound arguments must be finite");
  if (x_n < 0.0 || x_n > q) throw ValidationError("coded rate must lie in [0, q]");
  const double routed = q - x_n;
  return d * q + d * x_n - a * routed * routed / static_cast<double>(n - 1) -
         a * x_n * x_n;
}

OptimumResult grid_optimum(const Instance& instance, double grid_step) {
  if (!(grid_step > 0.0) || !std::isfinite(grid_step))
    throw ValidationError("grid step must be positive and finite");
  const double cap = instance.capacity();
  std::vector<double> grid;
  grid_points(cap, grid_step, grid);

  OptimumResult best;
  best.value = -std::numeric_limits<double>::infinity();

  if (instance.scenario() == Scenario::RoutingOnly) {
    // Concentrate q on each user in turn and evaluate the real payoffs.
    for (std::size_t i = 0; i < instance.n(); ++i) {
      for (double q : grid) {
        const Allocation x = Allocation::zeros(instance.n()).with(i, q);
        const double value = aggregate_surplus(instance, x);
        if (value > best.value) {
          best.value = value;
          best.x_opt = x;
          best.routing_load = q;
        }
      }
    }
    best.binding = best.routing_load >= cap ? Binding::CapacityBinding : Binding::Interior;
    return best;
  }

  const double divisor = static_cast<double>(instance.n() - 1);
  const double a = instance.a();
  double routed_value = 0.0;
  for (std::size_t i = 0; i + 1 < instance.n(); ++i)
    routed_value = std::max(routed_value, instance.r(i));
  const double coded_value = instance.r(0) + instance.r(instance.n() - 1);

  double best_load = 0.0;
  double best_coded = 0.0;
  for (double coded : grid) {
    const double coded_part = coded_value * coded - a * coded * coded;
    for (double load : grid) {
      if (load + coded > cap * (1.0 + 1e-12)) break;
      const double value = coded_part + routed_value * load - a * load * load / divisor;
      if (value > best.value) {
        best.value = value;
        best_load = load;
        best_coded = coded;
      }
    }
  }
  best.x_opt = coding_allocation(instance, routing_recipient(instance), best_load, best_coded);
  best.routing_load = best_load;
  best.coded_rate = best_coded;
  best.binding = best_load + best_coded >= cap ? Binding::CapacityBinding : Binding::Interior;
  return best;
}

}  // namespace acs
