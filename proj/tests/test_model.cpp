#include "doctest.h"

#include <random>

#include "acs/model.hpp"

using namespace acs;

TEST_SUITE("model") {
  TEST_CASE("symmetric routing instance") {
    const Instance inst(Scenario::RoutingOnly, 2.0, {1.0, 1.0}, 1.0);
    CHECK(inst.n() == 2);
    CHECK(inst.d() == 1.0);
    CHECK(inst.capacity() == 1.0);
    CHECK(inst.order()[0] == 0);
    CHECK(inst.order()[1] == 1);
  }

  TEST_CASE("utilities are sorted descending and the permutation is kept") {
    const Instance inst(Scenario::CodingPair, 1.0, {0.4, 1.0});
    CHECK(inst.r(0) == 1.0);
    CHECK(inst.r(1) == 0.4);
    // 1-based permutation [2, 1]
    CHECK(inst.order()[0] == 1);
    CHECK(inst.order()[1] == 0);
    const auto back = inst.to_caller_order(inst.r());
    CHECK(back == std::vector<double>{0.4, 1.0});
  }

  TEST_CASE("ties keep caller order") {
    const Instance inst(Scenario::RoutingOnly, 1.0, {0.5, 0.9, 0.5, 0.9});
    CHECK(inst.order()[0] == 1);
    CHECK(inst.order()[1] == 3);
    CHECK(inst.order()[2] == 0);
    CHECK(inst.order()[3] == 2);
  }

  TEST_CASE("rejections") {
    CHECK_THROWS_AS(Instance(Scenario::RoutingOnly, 0.0, {1.0}, 1.0), ValidationError);
    CHECK_THROWS_AS(Instance(Scenario::RoutingOnly, 1.0, {1.0}, 1.0), ValidationError);
    CHECK_THROWS_AS(Instance(Scenario::RoutingOnly, 0.0, {1.0, 1.0}, 1.0), ValidationError);
    CHECK_THROWS_AS(Instance(Scenario::RoutingOnly, -1.0, {1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(Instance(Scenario::RoutingOnly, 1.0, {1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(Instance(Scenario::RoutingOnly, 1.0, {1.0, -0.2}), ValidationError);
    CHECK_THROWS_AS(Instance(Scenario::RoutingOnly, 1.0, {1.0, 1.0}, 0.0), ValidationError);
    CHECK_THROWS_AS(Instance(Scenario::RoutingOnly, NAN, {1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(Instance(Scenario::RoutingOnly, 1.0, {1.0, INFINITY}), ValidationError);
    CHECK_THROWS_AS(Allocation({0.1, -0.1}), ValidationError);
    CHECK_THROWS_AS(scenario_from_string("coding"), ValidationError);
  }

  TEST_CASE("total rate") {
    const Instance g1(Scenario::RoutingOnly, 1.0, {1.0, 1.0});
    CHECK(total_rate(g1, Allocation({0.5, 0.3})) == doctest::Approx(0.8).epsilon(1e-15));

    const Instance g2(Scenario::CodingPair, 1.0, {1.0, 0.8, 0.6, 0.4});
    // 0.3 + 0.2 + max(0.4, 0.1)
    CHECK(total_rate(g2, Allocation({0.4, 0.3, 0.2, 0.1})) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(total_rate(g2, Allocation::zeros(4)) == 0.0);
    CHECK(total_rate(g1, Allocation::zeros(2)) == 0.0);
    CHECK_THROWS_AS(total_rate(g1, Allocation({0.1, 0.1, 0.1})), ValidationError);
    CHECK(capacity_feasible(g2, Allocation({0.4, 0.3, 0.2, 0.1})));
    CHECK_FALSE(capacity_feasible(g1, Allocation({0.7, 0.4})));
  }

  TEST_CASE("construction from sorted input yields the identity permutation") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> r(2 + trial % 7);
      for (double& v : r) v = u(rng);
      const Instance first(Scenario::CodingPair, 1.0, r);
      const Instance again(Scenario::CodingPair, 1.0,
                           std::vector<double>(first.r().begin(), first.r().end()));
      for (std::size_t k = 0; k < again.n(); ++k) CHECK(again.order()[k] == k);
    }
  }

  TEST_CASE("routing-only total rate is permutation invariant; coding pair only via coder roles") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Instance g1(Scenario::RoutingOnly, 1.0, {1.0, 0.9, 0.8, 0.7, 0.6});
    const Instance g2(Scenario::CodingPair, 1.0, {1.0, 0.9, 0.8, 0.7, 0.6});
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(5);
      for (double& v : x) v = u(rng);
      std::vector<double> shuffled = x;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      CHECK(total_rate(g1, Allocation(x)) == doctest::Approx(total_rate(g1, Allocation(shuffled))));
      // Permuting the middle users or swapping the two coders leaves q alone.
      std::vector<double> middle = x;
      std::shuffle(middle.begin() + 1, middle.end() - 1, rng);
      std::swap(middle.front(), middle.back());
      CHECK(total_rate(g2, Allocation(x)) == doctest::Approx(total_rate(g2, Allocation(middle))));
    }
  }
}
