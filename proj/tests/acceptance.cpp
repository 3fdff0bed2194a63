// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "acs/analysis.hpp"
#include "acs/cli.hpp"
#include "acs/equilibrium.hpp"
#include "acs/io.hpp"
#include "acs/mechanism.hpp"
#include "acs/optimum.hpp"
#include "oracles.hpp"

using namespace acs;
using oracle::near;

namespace {

struct Check {
  bool ok = true;
  std::string first_failure;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) first_failure = what;
    ok = ok && cond;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Seeded suite of instances with n in 2..6, a in [0.5, 5], r in (0, 1].
// Coding-pair draws without a pure equilibrium are discarded and counted.
struct Suite {
  std::vector<Instance> instances;
  std::size_t unsupported = 0;
};

Suite build_suite(Scenario scenario, std::uint64_t seed, std::size_t size) {
  std::mt19937_64 rng(seed);
  Suite suite;
  while (suite.instances.size() < size) {
    Instance inst = oracle::random_instance(rng, scenario, 2, 6);
    try {
      solve_equilibrium(inst);
    } catch (const SolverError&) {
      ++suite.unsupported;
      continue;
    }
    suite.instances.push_back(std::move(inst));
  }
  return suite;
}

Check worked_routing() {
  Check c;
  const auto start = Clock::now();
  const Instance inst(Scenario::RoutingOnly, 2.0, {1.0, 1.0});
  const EquilibriumResult e = solve_equilibrium(inst);
  const PoaReport r = poa(inst);
  c.expect(near(e.x_star[0], 1.0 / 3.0, 1e-9) && near(e.x_star[1], 1.0 / 3.0, 1e-9), "x*");
  c.expect(near(r.ne_surplus, 2.0 / 9.0, 1e-9), "NE surplus");
  c.expect(near(r.opt_surplus, 0.25, 1e-9), "optimum");
  c.expect(r.poa && near(*r.poa, 8.0 / 9.0, 1e-9), "POA");

  const EquilibriumResult br = best_response_iterate(inst, Allocation::zeros(2));
  c.expect(oracle::sup_distance(br.x_star, e.x_star) <= 1e-9, "best-response oracle");
  c.expect(verify_epsilon_nash(inst, e.x_star, 1e-3, 1e-9).passed, "epsilon-Nash oracle");
  c.expect(near(grid_optimum(inst, 1e-4).value, 0.25, 1e-9), "grid optimum");
  c.expect(seconds_since(start) < 1.0, "runtime");
  return c;
}

Check worked_coding() {
  Check c;
  const auto start = Clock::now();
  const Instance inst(Scenario::CodingPair, 1.0, {1.0, 0.4});
  const EquilibriumResult e = solve_equilibrium(inst);
  const OptimumResult o = solve_optimum(inst);
  const PoaReport r = poa(inst);
  c.expect(near(e.x_star[0], 0.9, 1e-6) && near(e.x_star[1], 0.4, 1e-6), "x*");
  c.expect(near(r.ne_surplus, 0.65, 1e-6), "NE surplus");
  c.expect(near(o.value, 0.72, 1e-6), "optimum");
  c.expect(near(o.routing_load, 0.4, 1e-6) && near(o.coded_rate, 0.6, 1e-6), "(L, c)");
  c.expect(r.poa && near(*r.poa, 0.65 / 0.72, 1e-6), "POA");

  const OptimumResult g = grid_optimum(inst, 1e-4);
  c.expect(near(g.value, 0.72, 1e-6), "grid optimum at step 1e-4");
  c.expect(verify_epsilon_nash(inst, e.x_star, 1e-4, 1e-9).passed, "epsilon-Nash oracle");
  for (std::size_t i = 0; i < 2; ++i) {
    const auto best = oracle::scan_best_response(inst, e.x_star, i, 1.0);
    c.expect(best.surplus <= user_surplus(inst, e.x_star, i) + 1e-9, "scanned best response");
  }
  c.expect(seconds_since(start) < 1.0, "runtime");
  return c;
}

Check oracle_equivalence(const Suite& g1, const Suite& g2) {
  Check c;
  const auto start = Clock::now();
  for (const Suite* suite : {&g1, &g2}) {
    for (const Instance& inst : suite->instances) {
      const EquilibriumResult e = solve_equilibrium(inst);
      try {
        const EquilibriumResult br = best_response_iterate(inst, Allocation::zeros(inst.n()));
        c.expect(oracle::sup_distance(br.x_star, e.x_star) <= 1e-6, "best-response agreement");
      } catch (const NonConvergenceError&) {
        c.expect(false, "best-response convergence");
      }
      c.expect(verify_epsilon_nash(inst, e.x_star, 1e-3, 1e-4).passed, "epsilon-Nash");
    }
  }
  c.expect(seconds_since(start) < 30.0, "runtime");
  return c;
}

Check optimum_equivalence(const Suite& g1, const Suite& g2) {
  Check c;
  for (const Suite* suite : {&g1, &g2}) {
    for (const Instance& inst : suite->instances) {
      const double exact = solve_optimum(inst).value;
      const double grid = grid_optimum(inst, 1e-3).value;
      c.expect(std::abs(exact - grid) <= 5e-3, "grid agreement");
    }
  }
  return c;
}

Check invariants(const Suite& g1, const Suite& g2) {
  Check c;
  for (const Suite* suite : {&g1, &g2}) {
    for (const Instance& inst : suite->instances) {
      const EquilibriumResult e = solve_equilibrium(inst);
      const PoaReport r = poa(inst);
      if (r.capacity_feasible)
        c.expect(r.poa && *r.poa > 0.0 && *r.poa <= 1.0 + 1e-9, "POA range");

      const std::size_t n = inst.n();
      if (inst.scenario() == Scenario::RoutingOnly) {
        double sum_r = 0.0, sum_x = 0.0, weighted = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          sum_r += inst.r(i);
          sum_x += e.x_star[i];
          weighted += inst.r(i) * e.x_star[i];
        }
        c.expect(weighted - sum_r * sum_x / static_cast<double>(n) >= -1e-12, "Chebyshev");
      } else {
        const double x_min = std::min(e.x_star[0], e.x_star[n - 1]);
        c.expect(near(x_min, inst.r(n - 1) / inst.a(), 1e-12), "min coder rate");
        const OptimumResult o = solve_optimum(inst);
        const double bound = coding_surplus_bound(n, inst.d(), inst.a(),
                                                  o.routing_load + o.coded_rate, o.coded_rate);
        c.expect(bound >= o.value - 1e-9, "surplus bound dominance");
      }

      for (double gamma : {0.1, 3.0, 100.0}) {
        const Instance scaled = inst.scaled(gamma);
        c.expect(oracle::sup_distance(solve_equilibrium(scaled).x_star, e.x_star) <= 1e-9,
                 "x* scaling");
        const PoaReport rs = poa(scaled);
        c.expect(r.poa && rs.poa && near(*rs.poa, *r.poa, 1e-9), "POA scaling");
      }
    }
  }
  return c;
}

Check bound_identities() {
  Check c;
  std::mt19937_64 rng(2026);
  // The rounding of d is amplified by about n/(2 q^2); these ranges keep the
  // identity testable at 1e-12.
  std::uniform_int_distribution<std::size_t> nd(2, 100);
  std::uniform_real_distribution<double> qd(0.1, 1.0), ad(0.1, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = nd(rng);
    const double q = qd(rng), a = ad(rng);
    const double nn = static_cast<double>(n);
    const double d = a * (2.0 * q * q + nn) / (nn * nn);
    const auto b = routing_poa_bound(n, q, d, a);
    c.expect(b && near(*b, 0.5, 1e-12), "upper-edge identity");
  }
  const PoaReport two = poa(Instance(Scenario::CodingPair, 1.0, {1.0, 0.4}));
  c.expect(two.claimed_constant && *two.claimed_constant == 1.0 / 3.0, "1/3 surfaced");
  const PoaReport many = poa(Instance(Scenario::CodingPair, 1.0, {1.0, 0.9, 0.8, 0.4}));
  c.expect(many.claimed_constant && *many.claimed_constant == 4.0 / 9.0, "4/9 surfaced");
  c.expect(io::poa_json(two)["claimed_bound"].get<double>() == 1.0 / 3.0, "1/3 in JSON report");
  c.expect(io::poa_json(many)["claimed_bound"].get<double>() == 4.0 / 9.0, "4/9 in JSON report");
  return c;
}

Check figure_sweep() {
  Check c;
  const std::vector<std::string> args = {"sweep", "--scenario", "routing_only", "--n",
                                         "100", "--samples", "100", "--seed", "42",
                                         "--target-q", "0.99", "--format", "csv"};
  std::string first;
  for (int run = 0; run < 2; ++run) {
    const auto start = Clock::now();
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    c.expect(seconds_since(start) < 60.0, "runtime");
    c.expect(code == cli::kOk, "exit code");
    if (run == 0) {
      first = out.str();
    } else {
      c.expect(out.str() == first, "byte-identical rerun");
    }
  }
  std::istringstream is(first);
  const auto rows = io::read_sweep_csv(is);
  c.expect(rows.size() == 100, "100 records");
  for (const auto& row : rows) c.expect(row.poa && *row.poa > 0.0 && *row.poa <= 1.0, "POA range");
  return c;
}

Check audit_honesty() {
  Check c;
  struct Case {
    Scenario scenario;
    std::size_t n;
    double claim;
  };
  for (const Case& k : {Case{Scenario::RoutingOnly, 10, kRoutingClaim},
                        Case{Scenario::CodingPair, 2, kTwoUserCodingClaim},
                        Case{Scenario::CodingPair, 100, kLargeCodingClaim}}) {
    AuditOptions opts;
    opts.scenario = k.scenario;
    opts.n = k.n;
    opts.samples = 1000;
    opts.seed = 1;
    opts.jobs = 4;
    const AuditReport rep = audit_bounds(opts);
    c.expect(rep.applicable_claim == k.claim, "applicable claim");
    c.expect(rep.feasible + rep.capacity_infeasible + rep.unsupported == rep.samples,
             "counts sum to samples");
    c.expect(rep.aggregates.size() == 3, "aggregates present");
    for (const AuditAggregate& agg : rep.aggregates) {
      c.expect(agg.admissible + agg.rejected == rep.feasible, "admissible + rejected");
      if (agg.admissible > 0)
        c.expect(agg.min_poa <= agg.mean_poa && agg.mean_poa <= agg.max_poa, "min <= mean <= max");
      for (std::size_t b : agg.below) c.expect(b <= agg.admissible, "below counts");
    }
    const std::string summary = rep.summary();
    for (double claim : kClaims)
      c.expect(summary.find(std::string(claim_label(claim))) != std::string::npos,
               "summary lists every claim");
    c.expect(summary.find("min") != std::string::npos, "summary reports min POA");
  }
  return c;
}

}  // namespace

int main() {
  const Suite g1 = build_suite(Scenario::RoutingOnly, 101, 200);
  const Suite g2 = build_suite(Scenario::CodingPair, 202, 200);
  std::printf("suites: 200 routing_only, 200 coding_pair (%zu coding_pair draws discarded: no pure equilibrium)\n",
              g2.unsupported);

  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"worked example, routing only", worked_routing},
      {"worked example, coding pair", worked_coding},
      {"equilibrium oracle equivalence", [&] { return oracle_equivalence(g1, g2); }},
      {"optimum oracle equivalence", [&] { return optimum_equivalence(g1, g2); }},
      {"invariant suite", [&] { return invariants(g1, g2); }},
      {"bound-formula identities and constants", bound_identities},
      {"routing-only POA sweep, n=100", figure_sweep},
      {"bound audit completeness", audit_honesty},
  };

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = Clock::now();
    Check c;
    try {
      c = criteria[k].second();
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = seconds_since(start);
    std::printf("%s %zu %s (%.2fs)%s%s\n", c.ok ? "PASS" : "FAIL", k + 1,
                criteria[k].first.c_str(), secs, c.ok ? "" : ": ", c.first_failure.c_str());
    if (!c.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
