// Game instances and rate allocations for a single shared link priced by
// average cost sharing.
//
// Two scenarios are supported. In the routing-only game every user forwards
// its traffic over the shared link. In the coding-pair game the users with
// the largest and smallest utility slopes (positions 0 and n-1 after sorting)
// jointly perform inter-session network coding: min(x_0, x_{n-1}) travels on
// a coding link and the larger coder's excess travels on the routing link
// together with everyone else.
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace acs {

enum class Scenario { RoutingOnly, CodingPair };

std::string_view to_string(Scenario s);
Scenario scenario_from_string(std::string_view name);

// Bad caller input: non-finite numbers, wrong sizes, violated preconditions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A solver could not produce a result for a valid input.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A validated game. Utility slopes are held sorted in descending order;
/// order()[k] is the caller's index of the user stored at position k.
class Instance {
 public:
  Instance(Scenario scenario, double a, std::vector<double> r,
           double capacity = 1.0);

  Scenario scenario() const { return scenario_; }
  std::size_t n() const { return r_.size(); }
  double a() const { return a_; }
  double capacity() const { return capacity_; }
  std::span<const double> r() const { return r_; }
  double r(std::size_t i) const { return r_[i]; }
  /// Largest utility slope.
  double d() const { return r_.front(); }
  std::span<const std::size_t> order() const { return order_; }

  /// Same instance with a and every r_i multiplied by gamma.
  Instance scaled(double gamma) const;
  /// Same utilities and capacity with a different price slope.
  Instance with_price_slope(double a) const;

  /// Maps values indexed by sorted position back to the caller's order.
  std::vector<double> to_caller_order(std::span<const double> sorted) const;
  /// Maps values in the caller's order to sorted positions.
  std::vector<double> from_caller_order(std::span<const double> caller) const;

 private:
  Scenario scenario_;
  double a_;
  double capacity_;
  std::vector<double> r_;
  std::vector<std::size_t> order_;
};

/// Nonnegative rate vector, indexed like Instance::r().
class Allocation {
 public:
  Allocation() = default;
  explicit Allocation(std::vector<double> x);
  static Allocation zeros(std::size_t n) {
    return Allocation(std::vector<double>(n, 0.0));
  }

  std::size_t size() const { return x_.size(); }
  double operator[](std::size_t i) const { return x_[i]; }
  std::span<const double> values() const { return x_; }

  /// Copy with one coordinate replaced.
  Allocation with(std::size_t i, double rate) const;

 private:
  std::vector<double> x_;
};

/// Total link rate: plain sum for routing-only; for the coding pair the
/// middle users plus max(x_0, x_{n-1}).
double total_rate(const Instance& instance, const Allocation& x);

bool capacity_feasible(const Instance& instance, const Allocation& x);

// Throws ValidationError unless x.size() == instance.n().
void require_matching(const Instance& instance, const Allocation& x);

}  // namespace acs
