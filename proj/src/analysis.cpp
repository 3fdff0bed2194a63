#include "acs/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "acs/equilibrium.hpp"
#include "acs/mechanism.hpp"
#include "acs/optimum.hpp"

namespace acs {

std::string_view claim_label(double claim) {
  if (claim == kRoutingClaim) return "1/2";
  if (claim == kTwoUserCodingClaim) return "1/3";
  if (claim == kLargeCodingClaim) return "4/9";
  return "?";
}

std::string_view to_string(CodingWindow w) {
  switch (w) {
    case CodingWindow::HighDemand:
      return "high_demand";
    case CodingWindow::LowDemandFiniteN:
      return "low_demand_finite_n";
    case CodingWindow::LowDemandAsymptotic:
      return "low_demand_asymptotic";
    case CodingWindow::Outside:
      return "outside";
  }
  return "outside";
}

namespace {

constexpr double kWindowSlack = 1e-12;

bool within(double lo, double v, double hi) {
  return v >= lo * (1.0 - kWindowSlack) && v <= hi * (1.0 + kWindowSlack);
}

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || !(v > 0.0))
    throw ValidationError(std::string(what) + " must be positive and finite");
}

}  // namespace

std::optional<double> routing_poa_bound(std::size_t n, double q, double d, double a) {
  if (n < 2) throw ValidationError("at least two users are required");
  require_positive(a, "a");
  const double nn = static_cast<double>(n);
  // n d - a in one rounding; d - a/n loses digits near the window edge.
  const double denominator = std::fma(nn, d, -a);
  if (!(denominator > 0.0)) return std::nullopt;
  return a * q * q / (nn * denominator);
}

bool in_routing_window(std::size_t n, double q, double d, double a) {
  if (n < 2) throw ValidationError("at least two users are required");
  require_positive(a, "a");
  const double nn = static_cast<double>(n);
  const double ratio = d / a;
  return within((q * q + nn) / (nn * nn), ratio, (2.0 * q * q + nn) / (nn * nn));
}

CodingWindow classify_coding_window(std::size_t n, double q, double d, double a) {
  if (n < 2) throw ValidationError("at least two users are required");
  require_positive(a, "a");
  const double ratio = d / a;
  if (ratio >= 2.0 * q * (1.0 - kWindowSlack)) return CodingWindow::HighDemand;
  const double m = static_cast<double>(n - 1);
  const double lower = q / m;
  if (within(lower, ratio, 2.0 * (m - 1.0) * q / (m * m)))
    return CodingWindow::LowDemandFiniteN;
  if (within(lower, ratio, q / 2.0)) return CodingWindow::LowDemandAsymptotic;
  return CodingWindow::Outside;
}

double coding_ne_surplus_floor(std::size_t n, double q, double x_n, double a) {
  if (n < 2) throw ValidationError("at least two users are required");
  if (!(x_n >= 0.0) || !(x_n <= q)) throw ValidationError("coded rate must lie in [0, q]");
  const double m = static_cast<double>(n - 1);
  const double x = q - x_n;
  return a * static_cast<double>(n) * q * x / (m * m) - a * x * x / m;
}

double stated_low_demand_optimum(std::size_t n, double d, double a) {
  if (n < 2) throw ValidationError("at least two users are required");
  require_positive(a, "a");
  const double nn = static_cast<double>(n);
  return (4.0 * nn * a * d + (nn - 3.0) * d * d) / (4.0 * (nn - 1.0) * a);
}

PoaReport poa(const Instance& instance) {
  const EquilibriumResult ne = solve_equilibrium(instance);
  const OptimumResult opt = solve_optimum(instance);

  PoaReport out;
  out.scenario = instance.scenario();
  out.n = instance.n();
  out.a = instance.a();
  out.d = instance.d();
  out.q_ne = ne.q;
  out.q_opt = opt.routing_load + opt.coded_rate;
  out.ne_surplus = aggregate_surplus(instance, ne.x_star);
  out.opt_surplus = opt.value;
  out.capacity_feasible = ne.capacity_feasible;
  if (opt.value > 0.0) out.poa = out.ne_surplus / opt.value;

  if (instance.scenario() == Scenario::RoutingOnly) {
    out.routing_bound = routing_poa_bound(out.n, out.q_ne, out.d, out.a);
    out.in_routing_window = in_routing_window(out.n, out.q_ne, out.d, out.a);
  } else {
    const double x_first = ne.x_star[0];
    const double x_last = ne.x_star[out.n - 1];
    out.coded_rate_ne = std::min(x_first, x_last);
    out.claimed_constant = out.n == 2 ? kTwoUserCodingClaim : kLargeCodingClaim;
    out.coding_window = classify_coding_window(out.n, out.q_ne, out.d, out.a);
    out.surplus_floor = coding_ne_surplus_floor(out.n, out.q_ne, out.coded_rate_ne, out.a);
  }
  return out;
}

std::string window_label(const PoaReport& report) {
  if (report.scenario == Scenario::RoutingOnly)
    return report.in_routing_window.value_or(false) ? "in_window" : "outside";
  return std::string(to_string(report.coding_window.value_or(CodingWindow::Outside)));
}

std::uint64_t sample_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 over the pair.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

// Uniform on (0, 1] from the top 53 bits; independent of the standard
// library's distribution implementations.
double unit_interval(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

std::vector<double> draw_utilities(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> r(n);
  for (double& v : r) v = unit_interval(rng);
  std::sort(r.begin(), r.end(), std::greater<>());
  return r;
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

constexpr std::size_t kMaxRedraws = 100;

}  // namespace

Instance calibrate_price_slope(const Instance& instance, double target_q) {
  require_positive(target_q, "target total rate");
  const Instance unit = instance.with_price_slope(1.0);
  const double q_at_unit = solve_equilibrium(unit).q;
  return instance.with_price_slope(q_at_unit / target_q);
}

SweepResult monte_carlo_sweep(const SweepOptions& options) {
  if (options.samples == 0) throw ValidationError("samples must be at least 1");
  if (options.n < 2) throw ValidationError("at least two users are required");
  require_positive(options.capacity, "capacity");
  if (!(options.target_q > 0.0) || !(options.target_q <= options.capacity))
    throw ValidationError("target total rate must lie in (0, capacity]");

  std::vector<std::optional<SweepRecord>> slots(options.samples);
  parallel_for(options.samples, options.jobs, [&](std::size_t i) {
    std::mt19937_64 rng(sample_seed(options.seed, i));
    for (std::size_t attempt = 0; attempt < kMaxRedraws; ++attempt) {
      const Instance drawn(options.scenario, 1.0, draw_utilities(rng, options.n),
                           options.capacity);
      try {
        const Instance calibrated = calibrate_price_slope(drawn, options.target_q);
        slots[i] = SweepRecord{options.seed, i, attempt, poa(calibrated)};
        return;
      } catch (const NonConvergenceError&) {
        throw;
      } catch (const SolverError&) {
        // No pure equilibrium for this draw; try the next one from the same stream.
      }
    }
  });

  SweepResult out;
  for (auto& slot : slots) {
    if (slot) {
      out.records.push_back(std::move(*slot));
    } else {
      ++out.skipped;
    }
  }
  return out;
}

namespace {

AuditAggregate aggregate(std::string name, const std::vector<double>& values,
                         std::size_t rejected) {
  AuditAggregate agg;
  agg.name = std::move(name);
  agg.admissible = values.size();
  agg.rejected = rejected;
  if (values.empty()) return agg;
  agg.min_poa = *std::min_element(values.begin(), values.end());
  agg.max_poa = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  agg.mean_poa = sum / static_cast<double>(values.size());
  for (std::size_t k = 0; k < kClaims.size(); ++k)
    agg.below[k] = static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [&](double v) { return v < kClaims[k]; }));
  return agg;
}

bool admissible(const PoaReport& report, double q) {
  if (report.scenario == Scenario::RoutingOnly)
    return in_routing_window(report.n, q, report.d, report.a);
  return classify_coding_window(report.n, q, report.d, report.a) != CodingWindow::Outside;
}

}  // namespace

AuditReport audit_bounds(const AuditOptions& options) {
  if (options.samples == 0) throw ValidationError("samples must be at least 1");
  if (options.n < 2) throw ValidationError("at least two users are required");
  require_positive(options.capacity, "capacity");

  std::vector<std::optional<SweepRecord>> slots(options.samples);
  parallel_for(options.samples, options.jobs, [&](std::size_t i) {
    std::mt19937_64 rng(sample_seed(options.seed, i));
    const Instance drawn(options.scenario, 1.0, draw_utilities(rng, options.n),
                         options.capacity);
    const double target_q = options.capacity * unit_interval(rng);
    try {
      slots[i] = SweepRecord{options.seed, i, 0, poa(calibrate_price_slope(drawn, target_q))};
    } catch (const NonConvergenceError&) {
      throw;
    } catch (const SolverError&) {
    }
  });

  AuditReport out;
  out.scenario = options.scenario;
  out.n = options.n;
  out.samples = options.samples;
  out.seed = options.seed;
  out.applicable_claim = options.scenario == Scenario::RoutingOnly
                             ? kRoutingClaim
                             : (options.n == 2 ? kTwoUserCodingClaim : kLargeCodingClaim);

  std::vector<double> all;
  std::vector<double> at_ne;
  std::vector<double> at_opt;
  for (auto& slot : slots) {
    if (!slot) {
      ++out.unsupported;
      continue;
    }
    const PoaReport& rep = slot->report;
    out.records.push_back(*slot);
    if (!rep.capacity_feasible || !rep.poa) {
      ++out.capacity_infeasible;
      continue;
    }
    ++out.feasible;
    const double value = *rep.poa;
    all.push_back(value);
    if (admissible(rep, rep.q_ne)) at_ne.push_back(value);
    if (admissible(rep, rep.q_opt)) at_opt.push_back(value);

    if (rep.scenario == Scenario::CodingPair) {
      ++out.floor_checked;
      if (rep.ne_surplus < *rep.surplus_floor * (1.0 - 1e-12)) ++out.floor_violations;
      if (rep.d / rep.a < 2.0 * rep.q_ne) {
        ++out.stated_optimum_checked;
        const double stated = stated_low_demand_optimum(rep.n, rep.d, rep.a);
        out.stated_optimum_max_rel_gap =
            std::max(out.stated_optimum_max_rel_gap,
                     std::abs(stated - rep.opt_surplus) / rep.opt_surplus);
      }
    }
  }
  out.aggregates.push_back(aggregate("all_feasible", all, 0));
  out.aggregates.push_back(aggregate("window_at_ne_rate", at_ne, out.feasible - at_ne.size()));
  out.aggregates.push_back(
      aggregate("window_at_optimal_rate", at_opt, out.feasible - at_opt.size()));
  return out;
}

std::string AuditReport::summary() const {
  std::ostringstream os;
  char buf[256];
  os << "audit scenario=" << to_string(scenario) << " n=" << n << " samples=" << samples
     << " seed=" << seed << '\n';
  os << "draws: feasible=" << feasible << " capacity_infeasible=" << capacity_infeasible
     << " unsupported=" << unsupported << '\n';
  std::snprintf(buf, sizeof buf, "applicable claimed lower bound: %s = %.17g\n",
                std::string(claim_label(applicable_claim)).c_str(), applicable_claim);
  os << buf;
  for (const AuditAggregate& agg : aggregates) {
    os << '[' << agg.name << "] ";
    if (agg.admissible == 0) {
      os << "0 admissible samples (rejected " << agg.rejected << ")\n";
      continue;
    }
    std::snprintf(buf, sizeof buf, "admissible=%zu rejected=%zu min=%.17g mean=%.17g max=%.17g",
                  agg.admissible, agg.rejected, agg.min_poa, agg.mean_poa, agg.max_poa);
    os << buf;
    for (std::size_t k = 0; k < kClaims.size(); ++k) {
      std::snprintf(buf, sizeof buf, " below_%s=%zu (%.6g)",
                    std::string(claim_label(kClaims[k])).c_str(), agg.below[k],
                    static_cast<double>(agg.below[k]) / static_cast<double>(agg.admissible));
      os << buf;
    }
    os << '\n';
  }
  if (scenario == Scenario::CodingPair) {
    os << "equilibrium surplus below claimed floor: " << floor_violations << " of "
       << floor_checked << '\n';
    std::snprintf(buf, sizeof buf,
                  "stated low-demand optimum vs exact: %zu samples, max relative gap %.6g\n",
                  stated_optimum_checked, stated_optimum_max_rel_gap);
    os << buf;
  }
  return os.str();
}

}  // namespace acs
