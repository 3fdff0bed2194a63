#include "acs/mechanism.hpp"

#include <algorithm>

namespace acs {

namespace {

void require_scenario(const Instance& instance, Scenario expected) {
  if (instance.scenario() != expected)
    throw ValidationError("operation requires scenario " +
                          std::string(to_string(expected)) + ", got " +
                          std::string(to_string(instance.scenario())));
}

double user_cost(const Instance& instance, const Allocation& x,
                 const PriceQuote& p, std::size_t i) {
  const std::size_t last = instance.n() - 1;
  if (instance.scenario() == Scenario::RoutingOnly || (i != 0 && i != last))
    return x[i] * p.mu;
  // Coded pair: both carry the shared coded rate; the larger one also pays
  // for its excess on the routing link. Side links are free.
  const double coded = std::min(x[0], x[last]);
  return (x[i] - coded) * p.mu + coded * *p.delta;
}

}  // namespace

double coding_pair_routing_load(const Allocation& x) {
  const std::size_t last = x.size() - 1;
  double load = std::max(x[0], x[last]) - std::min(x[0], x[last]);
  for (std::size_t i = 1; i < last; ++i) load += x[i];
  return load;
}

PriceQuote price_routing_only(const Instance& instance, const Allocation& x) {
  require_scenario(instance, Scenario::RoutingOnly);
  require_matching(instance, x);
  double load = 0.0;
  for (double v : x.values()) load += v;
  return PriceQuote{instance.a() * load / static_cast<double>(instance.n()),
                    std::nullopt, std::nullopt};
}

PriceQuote price_coding_pair(const Instance& instance, const Allocation& x) {
  require_scenario(instance, Scenario::CodingPair);
  require_matching(instance, x);
  const std::size_t n = instance.n();
  const double load = coding_pair_routing_load(x);
  const double coded = std::min(x[0], x[n - 1]);

  PriceQuote p;
  p.mu = instance.a() * load / static_cast<double>(n - 1);
  p.delta = instance.a() * coded / 2.0;
  if (p.mu > 0.0) p.beta = *p.delta / p.mu;
  return p;
}

PriceQuote prices(const Instance& instance, const Allocation& x) {
  return instance.scenario() == Scenario::RoutingOnly
             ? price_routing_only(instance, x)
             : price_coding_pair(instance, x);
}

SurplusBreakdown surplus(const Instance& instance, const Allocation& x) {
  const PriceQuote p = prices(instance, x);
  const std::size_t n = instance.n();
  SurplusBreakdown out;
  out.per_user_surplus.resize(n);
  out.per_user_cost.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double utility = instance.r(i) * x[i];
    const double cost = user_cost(instance, x, p, i);
    out.per_user_cost[i] = cost;
    out.per_user_surplus[i] = utility - cost;
    out.total_utility += utility;
    out.total_cost += cost;
  }
  out.aggregate_surplus = out.total_utility - out.total_cost;
  return out;
}

double aggregate_surplus(const Instance& instance, const Allocation& x) {
  return surplus(instance, x).aggregate_surplus;
}

double user_surplus(const Instance& instance, const Allocation& x, std::size_t i) {
  const PriceQuote p = prices(instance, x);
  return instance.r(i) * x[i] - user_cost(instance, x, p, i);
}

}  // namespace acs
