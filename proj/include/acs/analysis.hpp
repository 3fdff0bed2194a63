// Price of anarchy, the published efficiency bounds and their parameter
// windows, seeded Monte Carlo sweeps, and the bound audit.
//
// The audit measures and reports; it never asserts that a published bound
// holds.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acs/model.hpp"

namespace acs {

// Published worst-case POA values: routing only, two coders alone, and the
// large-population coding case.
inline constexpr double kRoutingClaim = 1.0 / 2.0;
inline constexpr double kTwoUserCodingClaim = 1.0 / 3.0;
inline constexpr double kLargeCodingClaim = 4.0 / 9.0;
inline constexpr std::array<double, 3> kClaims{kRoutingClaim, kTwoUserCodingClaim,
                                               kLargeCodingClaim};
std::string_view claim_label(double claim);  // "1/2", "1/3", "4/9"

enum class CodingWindow { HighDemand, LowDemandFiniteN, LowDemandAsymptotic, Outside };
std::string_view to_string(CodingWindow w);

/// Routing-only lower bound (a q^2 / n^2) / (d - a/n); empty when d <= a/n.
std::optional<double> routing_poa_bound(std::size_t n, double q, double d, double a);

/// True iff (q^2 + n)/n^2 <= d/a <= (2 q^2 + n)/n^2 (closed).
bool in_routing_window(std::size_t n, double q, double d, double a);

/// Case analysis for the coding-pair bounds. The first matching case wins:
///   HighDemand            d/a >= 2q
///   LowDemandFiniteN      q/(n-1) <= d/a <= 2(n-2)q/(n-1)^2
///   LowDemandAsymptotic   q/(n-1) <= d/a <= q/2
CodingWindow classify_coding_window(std::size_t n, double q, double d, double a);

/// Claimed floor on coding-pair equilibrium surplus,
/// g(x) = a n q x/(n-1)^2 - a x^2/(n-1) evaluated at x = q - x_n.
double coding_ne_surplus_floor(std::size_t n, double q, double x_n, double a);

/// Closed-form coding-pair optimum value stated for the low-demand case,
/// (4 n a d + (n-3) d^2) / (4 (n-1) a). Reported next to the exact optimum,
/// never used to compute it.
double stated_low_demand_optimum(std::size_t n, double d, double a);

struct PoaReport {
  Scenario scenario = Scenario::RoutingOnly;
  std::size_t n = 0;
  double a = 0.0;
  double d = 0.0;
  double q_ne = 0.0;
  double q_opt = 0.0;
  double coded_rate_ne = 0.0;  // min coder rate at equilibrium (coding pair)
  double ne_surplus = 0.0;
  double opt_surplus = 0.0;
  std::optional<double> poa;  // empty when the optimum value is zero
  bool capacity_feasible = false;
  // Routing only.
  std::optional<double> routing_bound;
  std::optional<bool> in_routing_window;
  // Coding pair.
  std::optional<double> claimed_constant;
  std::optional<CodingWindow> coding_window;
  std::optional<double> surplus_floor;
};

/// Throws SolverError when the coding-pair game has no pure equilibrium.
PoaReport poa(const Instance& instance);

/// Window label used in CSV rows: "in_window"/"outside" for routing only,
/// the CodingWindow name for the coding pair.
std::string window_label(const PoaReport& report);

struct SweepRecord {
  std::uint64_t seed = 0;
  std::size_t index = 0;
  std::size_t redraws = 0;  // utility draws discarded for lack of equilibrium
  PoaReport report;
};

struct SweepResult {
  std::vector<SweepRecord> records;  // in index order
  std::size_t skipped = 0;           // samples with no usable draw
};

struct SweepOptions {
  Scenario scenario = Scenario::RoutingOnly;
  std::size_t n = 2;
  std::size_t samples = 1;
  std::uint64_t seed = 0;
  double target_q = 1.0;
  double capacity = 1.0;
  std::size_t jobs = 1;
};

/// Per-sample seed derived from (seed, index) so samples are independent of
/// scheduling.
std::uint64_t sample_seed(std::uint64_t seed, std::size_t index);

/// Price slope at which the equilibrium total rate equals target_q for the
/// given utilities. Equilibrium rates scale as 1/a, so one solve suffices.
Instance calibrate_price_slope(const Instance& instance, double target_q);

/// r_i i.i.d. uniform on (0, 1]; a calibrated so the equilibrium total rate
/// hits target_q.
SweepResult monte_carlo_sweep(const SweepOptions& options);

struct AuditAggregate {
  std::string name;
  std::size_t admissible = 0;
  std::size_t rejected = 0;
  double min_poa = 0.0;
  double mean_poa = 0.0;
  double max_poa = 0.0;
  std::array<std::size_t, 3> below{};  // per entry of kClaims
};

struct AuditReport {
  Scenario scenario = Scenario::RoutingOnly;
  std::size_t n = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double applicable_claim = 0.0;
  std::size_t feasible = 0;
  std::size_t capacity_infeasible = 0;
  std::size_t unsupported = 0;
  // "all_feasible", then window membership judged at the equilibrium total
  // rate and at the optimal total rate.
  std::vector<AuditAggregate> aggregates;
  std::vector<SweepRecord> records;
  // Coding pair only: feasible samples whose equilibrium surplus falls below
  // the claimed floor, and the gap between the stated low-demand optimum
  // and the exact one over samples where that case applies.
  std::size_t floor_checked = 0;
  std::size_t floor_violations = 0;
  std::size_t stated_optimum_checked = 0;
  double stated_optimum_max_rel_gap = 0.0;

  std::string summary() const;
};

struct AuditOptions {
  Scenario scenario = Scenario::RoutingOnly;
  std::size_t n = 2;
  std::size_t samples = 1;
  std::uint64_t seed = 0;
  double capacity = 1.0;
  std::size_t jobs = 1;
};

/// Draws r_i uniform on (0, 1] and an equilibrium total rate uniform on
/// (0, C], then keeps the draws whose parameters fall in the published
/// windows (rejection sampling) and summarizes their POA.
AuditReport audit_bounds(const AuditOptions& options);

}  // namespace acs
