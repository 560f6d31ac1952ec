#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polylab/varsolve.hpp"

using namespace polylab;

namespace {

VariationalResult brute(const PathGrid& g, const Functional& f) {
  VariationalResult r;
  for (long a = 0; a <= g.k_max; ++a)
    for (long b = 0; b <= g.k_max; ++b) r.value = std::max(r.value, f(g, a, b));
  for (long a = 0; a <= g.k_max; ++a)
    for (long b = 0; b <= g.k_max; ++b)
      if (f(g, a, b) >= r.value - tie_tolerance) r.maximizers.push_back({a, b});
  std::sort(r.maximizers.begin(), r.maximizers.end());
  return r;
}

PathGrid zero_path(double n, double a) {
  return PathGrid::from_function(n, a, [](double) { return 0.0; });
}
PathGrid identity_path(double n, double a) {
  return PathGrid::from_function(n, a, [](double t) { return t; });
}

}  // namespace

TEST(PathGridTest, MatchesCoupledPath) {
  auto env = make_environment({1.5, 0.5, 3});
  auto g = PathGrid::from_environment(env, 37.0, 2.0);
  EXPECT_EQ(g.k_max, 74);
  for (long k = 1; k <= g.k_max; ++k) {
    EXPECT_EQ(g.plus[static_cast<std::size_t>(k)], coupled_path(env, 37.0, static_cast<double>(k) / 37.0));
    EXPECT_EQ(g.minus[static_cast<std::size_t>(k)], coupled_path(env, 37.0, -static_cast<double>(k) / 37.0));
  }
  EXPECT_EQ(g.plus[0], std::pow(37.0, -1 / 1.5) * env.omega(0));
  EXPECT_EQ(g.minus[0], 0.0);
}

TEST(Solvers, HandPaths) {
  auto z = zero_path(16, 4);
  auto r = solve_R2(z, 1.0);
  EXPECT_EQ(r.value, 0.0);
  ASSERT_EQ(r.maximizers.size(), 1u);
  EXPECT_EQ(r.maximizers[0], (LatticePair{0, 0}));
  EXPECT_EQ(solve_R3(z, 1.0).value, 0.0);

  auto id = identity_path(16, 4);
  r = solve_R2(id, 1.0);
  EXPECT_NEAR(r.value, 0.5, 1e-15);
  EXPECT_EQ(r.points(), (std::vector<std::pair<double, double>>{{-1.0, 0.0}, {0.0, 1.0}}));
  r = solve_R3(id, 1.0);
  EXPECT_NEAR(r.value, 1.0, 1e-15);
  EXPECT_EQ(r.points(), (std::vector<std::pair<double, double>>{{-1.0, 0.0}, {0.0, 1.0}}));

  r = solve_R4(id, 1.0, 2.0);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.maximizers, (std::vector<LatticePair>{{0, 0}}));
  EXPECT_FALSE(r.unconverged);
  r = solve_R4(id, 2.0, 1.0);
  EXPECT_NEAR(r.value, 8.0, 1e-12);
  EXPECT_EQ(r.maximizers, (std::vector<LatticePair>{{64, 64}}));
  EXPECT_TRUE(r.unconverged);

  auto heavy = PathGrid::from_function(8, 2, [](double t) { return t; }, 0.7);
  EXPECT_THROW(solve_R4(heavy, 1.0, 1.0), ParameterError);
}

TEST(Solvers, MatchExhaustiveSearch) {
  for (std::uint64_t seed = 0; seed < 30; ++seed)
    for (double n : {5.0, 17.0, 64.0, 10.5})
      for (double a : {1.0, 1.5, 2.0}) {
        auto env = make_environment({seed % 2 ? 1.5 : 2.0, 0.6, seed});
        auto g = PathGrid::from_environment(env, n, a);
        for (Functional f : {Functional{Variant::R2, 1.3}, Functional{Variant::R3, 0.7}, Functional{Variant::R4, 1.0, 0.8},
                             Functional{Variant::R2, 1.0, 0.0, true}, Functional{Variant::R4, 1.0, 0.5, true}}) {
          auto got = solve(g, f);
          auto ref = brute(g, f);
          EXPECT_NEAR(got.value, ref.value, 1e-12) << seed << " " << n << " " << variant_name(f.variant);
          EXPECT_EQ(got.maximizers, ref.maximizers) << seed << " " << n << " " << variant_name(f.variant);
          EXPECT_GE(got.value, f(g, 0, 0));
        }
      }
}

TEST(Solvers, TiesAreReportedAsSets) {
  DisorderSpec spec{2.0, 0.5, 8};
  Environment env(spec, [spec](std::int64_t x) { return counter_normal(spec.seed, x < 0 ? -x - 1 : x, 0); });
  // mirror image about -1/2: sum over [0, b] equals sum over [-b-1, -1]
  auto g = PathGrid::from_environment(env, 20, 3);
  auto r = solve_R4(g, 1.0, 0.3, true);
  auto two = solve_R3(g, 1.0);
  EXPECT_GE(two.maximizers.size(), 1u);
  EXPECT_FALSE(r.maximizers.empty());
}

TEST(AdaptiveWindow, Policy) {
  auto zero = [](double a) { return zero_path(32, a); };
  EXPECT_EQ(adaptive_window(zero, {Variant::R2, 1.0}).window, 4.0);
  auto id = [](double a) { return identity_path(8, a); };
  auto w = adaptive_window(id, {Variant::R4, 1.0, 2.0});
  EXPECT_EQ(w.window, 4.0);
  EXPECT_FALSE(w.unconverged);
  w = adaptive_window(id, {Variant::R4, 2.0, 1.0}, 4.0, 64.0);
  EXPECT_TRUE(w.unconverged);
  EXPECT_EQ(w.window, 64.0);
  EXPECT_THROW(adaptive_window(id, {Variant::R3, 1.0}), ParameterError);
}

TEST(AdaptiveWindow, GaussianPathsArePositiveAndFinite) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto env = make_environment({2.0, 0.5, 1000 + seed});
    auto src = [&](double a) { return PathGrid::from_environment(env, 1024, a); };
    auto r2 = solve_adaptive(src, {Variant::R2, 1.0});
    auto r4 = solve_adaptive(src, {Variant::R4, 1.0, 1.0});
    EXPECT_FALSE(r2.unconverged) << seed;
    EXPECT_FALSE(r4.unconverged) << seed;
    // site 0 is in every range, so the trivial pair carries n^{-1/2} w_0 rather than 0
    auto g = src(r2.window);
    EXPECT_GT(r2.value, (Functional{Variant::R2, 1.0}(g, 0, 0))) << seed;
    EXPECT_GT(r4.value, (Functional{Variant::R4, 1.0, 1.0}(g, 0, 0))) << seed;
    EXPECT_TRUE(std::isfinite(r2.value));
  }
}

TEST(QuasiMaximizers, BoxNeighbourhoods) {
  auto z = zero_path(10, 2);
  auto m = quasi_maximizers(z, {Variant::R2, 1.0}, 0.5);
  EXPECT_TRUE(std::count(m.begin(), m.end(), LatticePair{0, 0}));

  auto id = identity_path(10, 2);
  Functional f{Variant::R2, 1.0};
  auto q = quasi_maximizers(id, f, 0.3);
  for (long k = 7; k <= 13; ++k) {
    EXPECT_TRUE(std::count(q.begin(), q.end(), LatticePair{0, k})) << k;
    EXPECT_TRUE(std::count(q.begin(), q.end(), LatticePair{k, 0})) << k;
  }
  // exactly the union of the two boxes around (0,1) and (-1,0)
  std::size_t expected = 0;
  for (long a = 0; a <= 20; ++a)
    for (long b = 0; b <= 20; ++b) {
      bool in = (a <= 3 && b >= 7 && b <= 13) || (b <= 3 && a >= 7 && a <= 13);
      expected += in;
      EXPECT_EQ(static_cast<bool>(std::count(q.begin(), q.end(), LatticePair{a, b})), in) << a << " " << b;
    }
  EXPECT_EQ(q.size(), expected);
  auto small = quasi_maximizers(id, f, 0.1);
  for (auto p : small) EXPECT_TRUE(std::count(q.begin(), q.end(), p));
}

TEST(ClosedForms, Constants) {
  auto r5 = closed_form_limit(Region::R5, 1.0, 1.0);
  EXPECT_NEAR(r5.value, -1.5 * std::pow(std::numbers::pi, 2.0 / 3.0), 1e-15);
  EXPECT_NEAR(r5.value, -3.2175441, 1e-7);
  EXPECT_NEAR(r5.width, 2.1450294, 1e-7);
  EXPECT_NEAR(closed_form_limit(Region::R4t, 1.0, -1.0).value, 0.5, 1e-15);
  EXPECT_EQ(closed_form_limit(Region::R4t, 1.0, -1.0).maximizers.size(), 2u);
  EXPECT_EQ(closed_form_limit(Region::R6, 1.0, 1.0).value, -2.0);
  EXPECT_EQ(closed_form_limit(Region::R5t, 1.0, -0.7).value, 0.7);
  auto b = closed_form_limit(Region::BoundaryR4tR5t, 1.0, -1.0);
  EXPECT_NEAR(b.velocity, 0.7615942, 1e-7);
  EXPECT_NEAR(b.value, 0.4337808, 1e-7);
  // the limit is the Legendre value sup_t (t - kappa(t)), attained at the velocity
  double best = neg_inf;
  for (int i = 0; i <= 100000; ++i) best = std::max(best, i * 1e-5 - kappa(i * 1e-5));
  EXPECT_NEAR(b.value, best, 1e-9);
  EXPECT_NEAR(b.velocity - kappa(b.velocity), b.value, 1e-12);
  EXPECT_THROW(closed_form_limit(Region::R2, 1.0, 1.0), ParameterError);
  EXPECT_THROW(closed_form_limit(Region::R3, 1.0, 1.0), ParameterError);
  EXPECT_THROW(closed_form_limit(Region::R4, 1.0, 1.0), ParameterError);
}
