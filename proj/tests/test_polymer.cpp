#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "polylab/polymer.hpp"

using namespace polylab;

namespace {

Environment gaussian_env(std::uint64_t seed) { return make_environment({2.0, 0.5, seed}); }

PolymerParams random_params(std::mt19937_64& rng, long n, double alpha) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PolymerParams p;
  p.alpha = alpha;
  p.n = n;
  p.beta_hat = 2.0 * u(rng);
  p.h_hat = 4.0 * u(rng) - 2.0;
  p.gamma = u(rng) < 0.15 ? pos_inf : 2.0 * u(rng) - 1.0;
  p.zeta = u(rng) < 0.15 ? pos_inf : 2.0 * u(rng) - 1.0;
  return p;
}

}  // namespace

TEST(Partition, TrivialCases) {
  auto env = gaussian_env(3);
  PolymerParams p{2.0, 0.0, 0.7, pos_inf, 0.0, 1};
  EXPECT_NEAR(log_partition(env, p), -2 * p.h_n(), 1e-15);
  p.zeta = 0.5;
  EXPECT_NEAR(log_partition(env, p), -2 * p.h_n(), 1e-15);
  PolymerParams z{2.0, 0.0, 0.0, pos_inf, pos_inf, 2};
  EXPECT_EQ(log_partition(env, z), 0.0);
  EXPECT_EQ(z.beta_n(), 0.0);
  EXPECT_EQ(z.h_n(), 0.0);
  // N = 1: the two paths
  PolymerParams one{2.0, 1.3, 0.4, 0.0, 0.0, 1};
  double b = one.beta_n(), h = one.h_n();
  double ref = std::log(0.5 * std::exp(b * (env.omega(0) + env.omega(1)) - 2 * h) +
                        0.5 * std::exp(b * (env.omega(0) + env.omega(-1)) - 2 * h));
  EXPECT_NEAR(log_partition(env, one), ref, 1e-15);
  EXPECT_NEAR(oracle_log_partition(env, one), ref, 1e-15);
}

TEST(Partition, MatchesEnumeration) {
  std::mt19937_64 rng(11);
  int draws = 0;
  for (double alpha : {2.0, 1.5, 0.7})
    for (int i = 0; i < 20; ++i) {
      long n = 1 + static_cast<long>(rng() % 16);
      auto p = random_params(rng, n, alpha);
      auto env = make_environment({alpha, 0.7, rng()});
      double ref = oracle_log_partition(env, p);
      double got = log_partition(env, p);
      EXPECT_LE(std::fabs(got - ref), 1e-12 * std::max(1.0, std::fabs(ref))) << n << " " << alpha;
      ++draws;
    }
  EXPECT_GE(draws, 50);
}

TEST(Partition, OracleRefusesLargeN) {
  PolymerParams p{2.0, 1.0, 1.0, 0.0, 0.0, 21};
  EXPECT_THROW(oracle_log_partition(gaussian_env(1), p), ParameterError);
}

TEST(Partition, RestrictedToTwoSites) {
  for (long n : {1L, 5L, 40L, 1000L}) {
    auto env = gaussian_env(7 + n);
    PolymerParams p{2.0, 1.0, 1.0, 0.0, -0.3, n};
    double b = p.beta_n(), h = p.h_n();
    double ref = -2 * h + log_add(b * (env.omega(0) + env.omega(1)), b * (env.omega(0) + env.omega(-1))) -
                 n * std::numbers::ln2;
    double got = log_partition_restricted(env, p, [](long a, long bb) { return a + bb + 1 == 2; });
    EXPECT_NEAR(got, ref, 1e-12 * std::fabs(ref)) << n;
  }
  auto env = gaussian_env(2);
  PolymerParams p{2.0, 1.0, 0.5, 0.0, 0.0, 12};
  EXPECT_NEAR(log_partition_restricted(env, p, [](long, long) { return true; }), log_partition(env, p), 1e-14);
  EXPECT_EQ(log_partition_restricted(env, p, [](long a, long b) { return a + b > 12; }), neg_inf);
}

TEST(Partition, RestrictedMatchesEnumeration) {
  for (int n = 1; n <= 14; ++n) {
    auto env = gaussian_env(100 + n);
    PolymerParams p{2.0, 0.8, 0.3, 0.0, 0.0, n};
    double z = 0.0;
    oracle::for_each_path(n, [&](const oracle::PathStats& s) {
      if (s.max <= 2) z += std::exp(oracle::path_log_weight(env, p.beta_n(), p.h_n(), s) - n * std::numbers::ln2);
    });
    double got = log_partition_restricted(env, p, [](long, long b) { return b <= 2; });
    EXPECT_NEAR(got, std::log(z), 1e-12 * std::max(1.0, std::fabs(std::log(z)))) << n;
  }
}

TEST(PolymerMarginal, MatchesEnumerationCellwise) {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 14; ++n) {
    auto p = random_params(rng, n, 2.0);
    auto env = gaussian_env(rng());
    auto ref = oracle::polymer_law(env, p.beta_n(), p.h_n(), n);
    std::map<std::pair<long, long>, double> cells;
    std::map<long, double> ends;
    for (auto& [k, v] : ref) {
      cells[{std::get<0>(k), std::get<1>(k)}] += v;
      ends[std::get<2>(k)] += v;
    }
    auto m = polymer_range_marginal(env, p);
    double total = 0.0;
    for (const auto& c : m.cells) total += std::exp(c.log_prob);
    EXPECT_NEAR(total, 1.0, 1e-10);
    for (auto& [k, v] : cells) EXPECT_NEAR(std::exp(m.log_at(k.first, k.second)), v, 1e-10) << n;
    auto e = polymer_endpoint_marginal(env, p, EndpointMethod::per_cell);
    for (long x = -n; x <= n; ++x) EXPECT_NEAR(e.at(x), ends.count(x) ? ends[x] : 0.0, 1e-10) << n << " " << x;
  }
}

// The linear-space box decomposition is meant for weights of order Z.
TEST(PolymerMarginal, BoxEndpointMatchesEnumerationForMildWeights) {
  for (int n = 1; n <= 14; ++n) {
    auto env = gaussian_env(40 + n);
    PolymerParams p{2.0, 1.0, 0.5, 0.5, 1.0, n};
    std::map<long, double> ends;
    for (auto& [k, v] : oracle::polymer_law(env, p.beta_n(), p.h_n(), n)) ends[std::get<2>(k)] += v;
    auto e = polymer_endpoint_marginal(env, p, EndpointMethod::box);
    for (long x = -n; x <= n; ++x) EXPECT_NEAR(e.at(x), ends.count(x) ? ends[x] : 0.0, 1e-12) << n << " " << x;
  }
  PolymerParams strong{2.0, 2.0, 2.0, -1.0, -1.0, 14};
  EXPECT_THROW(polymer_endpoint_marginal(gaussian_env(1), strong, EndpointMethod::box), ConvergenceError);
}

TEST(PolymerMarginal, FreeWalkLimits) {
  long n = 60;
  auto env = gaussian_env(9);
  PolymerParams p{2.0, 0.0, 0.0, pos_inf, pos_inf, n};
  WalkKernel k(n);
  auto m = polymer_range_marginal(env, p, k);
  for (const auto& c : m.cells) EXPECT_NEAR(c.log_prob, k.log_cell(c.a, c.b), 1e-13);
  auto e = polymer_endpoint_marginal(env, p, k);
  auto s = srw_endpoint_law(k);
  EXPECT_LT(ks_distance(e, s), 1e-13);
  // large positive field concentrates on the smallest ranges
  p.h_hat = 30.0;
  p.zeta = 0.0;
  auto big = polymer_range_marginal(env, p, k);
  EXPECT_GT(big.mass([](long a, long b) { return a + b == 1; }), 0.999);
}

TEST(PolymerMarginal, SymmetricEnvironmentGivesSymmetricEndpoint) {
  DisorderSpec spec{2.0, 0.5, 4};
  Environment env(spec, [spec](std::int64_t x) { return counter_normal(spec.seed, x < 0 ? -x : x, 0); });
  PolymerParams p{2.0, 1.0, 0.5, 0.0, 0.5, 40};
  for (auto method : {EndpointMethod::per_cell, EndpointMethod::box}) {
    auto e = polymer_endpoint_marginal(env, p, method);
    for (long x = 0; x <= 40; ++x) EXPECT_NEAR(e.at(x), e.at(-x), 1e-13);
  }
}

TEST(Partition, PruningAndWindowsAgree) {
  for (long n : {64L, 400L, 1500L}) {
    auto env = gaussian_env(21 + n);
    PolymerParams p{2.0, 1.0, 1.0, 0.25, 0.5, n};
    WalkKernel k(n);
    auto pruned = partition(env, p, k);
    auto full = partition(env, p, k, Window{n, n});
    EXPECT_EQ(full.log_neglected, neg_inf);
    EXPECT_LT(pruned.neglected_relative(), 1e-14);
    EXPECT_NEAR(pruned.log_z, full.log_z, 1e-13 * std::max(1.0, std::fabs(full.log_z))) << n;
    // any window: the reported bound covers the change
    for (long w : {3L, 10L, 30L}) {
      auto r = partition(env, p, k, Window{w, 2 * w});
      double missing = std::exp(full.log_z) - std::exp(r.log_z);
      EXPECT_LE(missing, std::exp(r.log_neglected) * (1 + 1e-12) + 1e-14 * std::exp(full.log_z)) << n << " " << w;
    }
  }
}

TEST(Partition, OverflowIsReported) {
  DisorderSpec spec{0.3, 1.0, 5};
  Environment env(spec, [](std::int64_t x) { return x == 3 ? pos_inf : 1.0; });
  PolymerParams p{0.3, 1.0, 0.0, 0.0, pos_inf, 20};
  EXPECT_THROW(log_partition(env, p), ConvergenceError);
}
