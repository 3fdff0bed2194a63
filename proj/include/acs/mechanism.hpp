// Average-cost-sharing prices and the resulting payoffs.
//
// With the linear price function p(z) = a*z, each link charges every unit of
// traffic a * (link load) / (number of users sharing that link).
#pragma once

#include <optional>
#include <vector>

#include "acs/model.hpp"

namespace acs {

struct PriceQuote {
  double mu = 0.0;               // routing link
  std::optional<double> delta;   // coding link (coding pair only)
  std::optional<double> beta;    // delta / mu, only when mu > 0
};

struct SurplusBreakdown {
  std::vector<double> per_user_surplus;
  std::vector<double> per_user_cost;
  double total_utility = 0.0;
  double total_cost = 0.0;
  double aggregate_surplus = 0.0;
};

PriceQuote price_routing_only(const Instance& instance, const Allocation& x);
PriceQuote price_coding_pair(const Instance& instance, const Allocation& x);
/// Dispatches on the instance scenario.
PriceQuote prices(const Instance& instance, const Allocation& x);

/// Load carried by the routing link in the coding-pair game.
double coding_pair_routing_load(const Allocation& x);

SurplusBreakdown surplus(const Instance& instance, const Allocation& x);
double aggregate_surplus(const Instance& instance, const Allocation& x);

/// Surplus of a single user; avoids building the full breakdown.
double user_surplus(const Instance& instance, const Allocation& x, std::size_t i);

}  // namespace acs
