#include "acs/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace acs {

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::RoutingOnly:
      return "routing_only";
    case Scenario::CodingPair:
      return "coding_pair";
  }
  return "unknown";
}

Scenario scenario_from_string(std::string_view name) {
  if (name == "routing_only") return Scenario::RoutingOnly;
  if (name == "coding_pair") return Scenario::CodingPair;
  throw ValidationError("unknown scenario '" + std::string(name) +
                        "' (expected routing_only or coding_pair)");
}

namespace {

void require_finite_positive(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(std::string(what) + " must be finite");
  if (v <= 0.0) throw ValidationError(std::string(what) + " must be positive");
}

}  // namespace

Instance::Instance(Scenario scenario, double a, std::vector<double> r,
                   double capacity)
    : scenario_(scenario), a_(a), capacity_(capacity) {
  if (r.size() < 2) throw ValidationError("at least two users are required");
  require_finite_positive(a, "price slope a");
  require_finite_positive(capacity, "capacity");
  for (double v : r) require_finite_positive(v, "utility slope r_i");

  order_.resize(r.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t i, std::size_t j) { return r[i] > r[j]; });
  r_.reserve(r.size());
  for (std::size_t k : order_) r_.push_back(r[k]);
}

Instance Instance::scaled(double gamma) const {
  require_finite_positive(gamma, "scale factor");
  Instance out = *this;
  out.a_ *= gamma;
  for (double& v : out.r_) v *= gamma;
  return out;
}

Instance Instance::with_price_slope(double a) const {
  require_finite_positive(a, "price slope a");
  Instance out = *this;
  out.a_ = a;
  return out;
}

std::vector<double> Instance::to_caller_order(std::span<const double> sorted) const {
  if (sorted.size() != n()) throw ValidationError("vector length does not match user count");
  std::vector<double> out(n());
  for (std::size_t k = 0; k < n(); ++k) out[order_[k]] = sorted[k];
  return out;
}

std::vector<double> Instance::from_caller_order(std::span<const double> caller) const {
  if (caller.size() != n()) throw ValidationError("vector length does not match user count");
  std::vector<double> out(n());
  for (std::size_t k = 0; k < n(); ++k) out[k] = caller[order_[k]];
  return out;
}

Allocation::Allocation(std::vector<double> x) : x_(std::move(x)) {
  for (double v : x_) {
    if (!std::isfinite(v)) throw ValidationError("rates must be finite");
    if (v < 0.0) throw ValidationError("rates must be nonnegative");
  }
}

Allocation Allocation::with(std::size_t i, double rate) const {
  Allocation out = *this;
  if (!std::isfinite(rate) || rate < 0.0)
    throw ValidationError("rates must be finite and nonnegative");
  out.x_.at(i) = rate;
  return out;
}

void require_matching(const Instance& instance, const Allocation& x) {
  if (x.size() != instance.n())
    throw ValidationError("allocation has " + std::to_string(x.size()) +
                          " rates but the instance has " +
                          std::to_string(instance.n()) + " users");
}

double total_rate(const Instance& instance, const Allocation& x) {
  require_matching(instance, x);
  const std::size_t n = instance.n();
  if (instance.scenario() == Scenario::RoutingOnly) {
    double q = 0.0;
    for (double v : x.values()) q += v;
    return q;
  }
  double q = std::max(x[0], x[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) q += x[i];
  return q;
}

bool capacity_feasible(const Instance& instance, const Allocation& x) {
  return total_rate(instance, x) <= instance.capacity();
}

}  // namespace acs
