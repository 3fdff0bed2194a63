#include "acs/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "acs/mechanism.hpp"

namespace acs {

std::string_view to_string(SolveMethod m) {
  return m == SolveMethod::ClosedForm ? "closed_form" : "best_response";
}

SharedLinkSolution solve_shared_link(std::span<const double> values, double scale) {
  const std::size_t m = values.size();
  SharedLinkSolution out;
  out.rates.assign(m, 0.0);
  if (m == 0) return out;

  std::vector<std::size_t> by_value(m);
  std::iota(by_value.begin(), by_value.end(), std::size_t{0});
  std::stable_sort(by_value.begin(), by_value.end(), [&](std::size_t i, std::size_t j) {
    return values[i] > values[j];
  });

  // Rates are increasing in value, so the active set is a prefix of
  // by_value. The first prefix whose successor cannot profit is the answer.
  double prefix_sum = 0.0;
  for (std::size_t k = 1; k <= m; ++k) {
    prefix_sum += values[by_value[k - 1]];
    const double load = scale * prefix_sum / static_cast<double>(k + 1);
    if (k < m) {
      const double next = scale * values[by_value[k]];
      if (next - load > 1e-12 * load) continue;
    }
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t idx = by_value[j];
      const double y = scale * values[idx] - load;
      if (!(y > 0.0))
        throw SolverError("active-set sweep produced a nonpositive active rate");
      out.rates[idx] = y;
    }
    out.load = load;
    out.active = k;
    return out;
  }
  throw SolverError("active-set sweep accepted no candidate set");
}

namespace {

void require_scenario(const Instance& instance, Scenario expected, const char* op) {
  if (instance.scenario() != expected)
    throw ValidationError(std::string(op) + " requires scenario " +
                          std::string(to_string(expected)));
}

EquilibriumResult finish(const Instance& instance, Allocation x, SolveMethod method,
                         std::size_t iterations) {
  EquilibriumResult out;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0) out.active_set.push_back(i);
  out.q = total_rate(instance, x);
  out.capacity_feasible = out.q <= instance.capacity();
  out.foc_residual = foc_residual(instance, x);
  out.method = method;
  out.iterations = iterations;
  out.x_star = std::move(x);
  return out;
}

// Candidate equilibrium in which `big` carries the routing excess and
// `small` sets the coded rate. Empty when either coder would rather switch
// to the other piece of its surplus.
std::optional<Allocation> coding_orientation(const Instance& instance, std::size_t big,
                                         std::size_t small) {
  const std::size_t n = instance.n();
  const double a = instance.a();

  std::vector<std::size_t> users{big};
  for (std::size_t i = 1; i + 1 < n; ++i) users.push_back(i);
  std::vector<double> values;
  for (std::size_t u : users) values.push_back(instance.r(u));
  const SharedLinkSolution link =
      solve_shared_link(values, static_cast<double>(n - 1) / a);

  std::vector<double> x(n, 0.0);
  x[small] = instance.r(small) / a;
  for (std::size_t j = 0; j < users.size(); ++j) x[users[j]] = link.rates[j];
  x[big] += x[small];
  Allocation candidate(std::move(x));

  for (std::size_t coder : {big, small}) {
    const double current = user_surplus(instance, candidate, coder);
    const BestResponse br = best_response(instance, candidate, coder);
    if (br.surplus - current > 1e-12 * std::max(1.0, std::abs(current)))
      return std::nullopt;
  }
  return candidate;
}

}  // namespace

EquilibriumResult solve_routing_equilibrium(const Instance& instance) {
  require_scenario(instance, Scenario::RoutingOnly, "solve_routing_equilibrium");
  const double scale = static_cast<double>(instance.n()) / instance.a();
  SharedLinkSolution link = solve_shared_link(instance.r(), scale);
  return finish(instance, Allocation(std::move(link.rates)), SolveMethod::ClosedForm, 0);
}

EquilibriumResult solve_coding_equilibrium(const Instance& instance) {
  require_scenario(instance, Scenario::CodingPair, "solve_coding_equilibrium");
  const std::size_t last = instance.n() - 1;
  if (auto x = coding_orientation(instance, 0, last))
    return finish(instance, std::move(*x), SolveMethod::ClosedForm, 0);
  if (auto x = coding_orientation(instance, last, 0))
    return finish(instance, std::move(*x), SolveMethod::ClosedForm, 0);
  throw SolverError(
      "unsupported instance: no pure Nash equilibrium in either coder orientation");
}

EquilibriumResult solve_equilibrium(const Instance& instance) {
  return instance.scenario() == Scenario::RoutingOnly ? solve_routing_equilibrium(instance)
                                                      : solve_coding_equilibrium(instance);
}

double foc_residual(const Instance& instance, const Allocation& x) {
  require_matching(instance, x);
  const std::size_t n = instance.n();
  const double a = instance.a();
  double worst = 0.0;
  // Interior rates need a zero gradient; zero rates need a nonpositive one.
  auto account = [&](double rate, double gradient) {
    worst = std::max(worst, rate > 0.0 ? std::abs(gradient) : std::max(0.0, gradient));
  };

  if (instance.scenario() == Scenario::RoutingOnly) {
    const double q = total_rate(instance, x);
    const double divisor = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) account(x[i], instance.r(i) - a * (q + x[i]) / divisor);
    return worst;
  }

  const std::size_t last = n - 1;
  const double divisor = static_cast<double>(n - 1);
  const double load = coding_pair_routing_load(x);
  for (std::size_t i = 1; i < last; ++i)
    account(x[i], instance.r(i) - a * (load + x[i]) / divisor);

  for (std::size_t coder : {std::size_t{0}, last}) {
    const std::size_t other = coder == 0 ? last : 0;
    const double r = instance.r(coder);
    if (x[coder] > x[other]) {
      account(1.0, r - a * (load + x[coder] - x[other]) / divisor);
    } else if (x[coder] < x[other]) {
      account(x[coder], r - a * x[coder]);
    } else {
      // Kink: the coded-rate piece must not be decreasing from the left and
      // the routing piece must not be increasing to the right.
      if (x[coder] > 0.0) worst = std::max(worst, std::max(0.0, -(r - a * x[coder])));
      worst = std::max(worst, std::max(0.0, r - a * load / divisor));
    }
  }
  return worst;
}

BestResponse best_response(const Instance& instance, const Allocation& x,
                           std::size_t user) {
  require_matching(instance, x);
  const std::size_t n = instance.n();
  if (user >= n) throw ValidationError("user index out of range");
  const double a = instance.a();
  const double r = instance.r(user);

  if (instance.scenario() == Scenario::RoutingOnly) {
    const double divisor = static_cast<double>(n);
    const double others = total_rate(instance, x) - x[user];
    const double rate = std::max(0.0, (divisor * r / a - others) / 2.0);
    return {rate, r * rate - rate * a * (others + rate) / divisor};
  }

  const std::size_t last = n - 1;
  const double divisor = static_cast<double>(n - 1);
  if (user != 0 && user != last) {
    const double others = coding_pair_routing_load(x) - x[user];
    const double rate = std::max(0.0, (divisor * r / a - others) / 2.0);
    return {rate, r * rate - rate * a * (others + rate) / divisor};
  }

  const double other_coder = x[user == 0 ? last : 0];
  double middle = 0.0;
  for (std::size_t i = 1; i < last; ++i) middle += x[i];

  // At or below the other coder: pay only the coding-link price a*x/2.
  const double low_rate = std::min(r / a, other_coder);
  const double low_value = r * low_rate - a * low_rate * low_rate / 2.0;

  // Above it: the excess t shares the routing link with the middle users.
  const double excess = std::max(0.0, (divisor * r / a - middle) / 2.0);
  const double high_rate = other_coder + excess;
  const double high_value = r * high_rate - excess * a * (middle + excess) / divisor -
                            a * other_coder * other_coder / 2.0;

  if (high_value > low_value) return {high_rate, high_value};
  return {low_rate, low_value};
}

NonConvergenceError::NonConvergenceError(Allocation last, double step,
                                         std::size_t iterations)
    : SolverError("best-response iteration did not converge after " +
                  std::to_string(iterations) + " sweeps (last step " +
                  std::to_string(step) + ")"),
      last_(std::move(last)),
      step_(step),
      iterations_(iterations) {}

EquilibriumResult best_response_iterate(const Instance& instance, const Allocation& x0,
                                        const BestResponseOptions& options) {
  require_matching(instance, x0);
  if (!(options.tol > 0.0)) throw ValidationError("tolerance must be positive");
  if (options.max_iters == 0) throw ValidationError("max_iters must be positive");

  std::vector<double> x(x0.values().begin(), x0.values().end());
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t sweep = 1; sweep <= options.max_iters; ++sweep) {
    step = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const BestResponse br = best_response(instance, Allocation(x), i);
      step = std::max(step, std::abs(br.rate - x[i]));
      x[i] = br.rate;
    }
    if (step < options.tol)
      return finish(instance, Allocation(std::move(x)), SolveMethod::BestResponse, sweep);
  }
  throw NonConvergenceError(Allocation(std::move(x)), step, options.max_iters);
}

EpsilonNashReport verify_epsilon_nash(const Instance& instance, const Allocation& x,
                                      double grid_step, double epsilon) {
  require_matching(instance, x);
  if (!(grid_step > 0.0) || !std::isfinite(grid_step))
    throw ValidationError("grid step must be positive and finite");
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");

  const double cap = instance.capacity();
  std::vector<double> grid;
  const auto points = static_cast<std::size_t>(std::floor(cap / grid_step + 1e-9));
  for (std::size_t k = 0; k <= points; ++k)
    grid.push_back(std::min(cap, static_cast<double>(k) * grid_step));
  if (grid.back() < cap) grid.push_back(cap);

  EpsilonNashReport report;
  report.worst.gain = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < instance.n(); ++i) {
    const double base = user_surplus(instance, x, i);
    for (double rate : grid) {
      const double gain = user_surplus(instance, x.with(i, rate), i) - base;
      if (gain > report.worst.gain) report.worst = {i, rate, gain};
    }
  }
  report.passed = report.worst.gain <= epsilon;
  return report;
}

}  // namespace acs
