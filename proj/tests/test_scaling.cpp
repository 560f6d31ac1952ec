#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "polylab/parallel.hpp"
#include "polylab/scaling.hpp"

using namespace polylab;

namespace {

std::vector<Point> sample(const std::vector<double>& ns, double (*f)(double)) {
  std::vector<Point> pts;
  for (double n : ns) pts.push_back({n, f(n)});
  return pts;
}

const std::vector<double> powers{1e2, 1e3, 1e4, 1e5, 1e6, 1e7};

}  // namespace

TEST(FitExponent, ExactPower) {
  auto f = fit_exponent(sample(powers, [](double n) { return 3.0 * std::pow(n, 0.6); }));
  EXPECT_NEAR(f.theta, 0.6, 1e-12);
}

TEST(FitExponent, LogCorrection) {
  auto f = fit_exponent(sample(powers, [](double n) { return std::pow(n, 1.0 / 3.0) * std::log(n); }));
  EXPECT_NEAR(f.theta, 1.0 / 3.0, 0.15);
  EXPECT_GT(f.theta, 1.0 / 3.0);
}

TEST(FitExponent, Constant) {
  auto f = fit_exponent(sample(powers, [](double) { return 7.0; }));
  EXPECT_NEAR(f.theta, 0.0, 1e-12);
}

TEST(FitExponent, RejectsBadInput) {
  EXPECT_THROW(fit_exponent({{10.0, 1.0}}), ParameterError);
}

TEST(Extrapolate, PowerCorrection) {
  auto e = extrapolate(sample(powers, [](double n) { return 5.0 + std::pow(n, -1.0 / 3.0); }));
  EXPECT_FALSE(e.failed);
  EXPECT_NEAR(e.limit, 5.0, 1e-3);
  EXPECT_EQ(e.model, ExtrapolationModel::power_correction);
  EXPECT_NEAR(e.theta, 1.0 / 3.0, 1e-2);
}

TEST(Extrapolate, ConstantSequence) {
  auto e = extrapolate(sample(powers, [](double) { return -1.25; }));
  EXPECT_FALSE(e.failed);
  EXPECT_DOUBLE_EQ(e.limit, -1.25);
}

TEST(Extrapolate, InverseLogFallback) {
  auto e = extrapolate(sample(powers, [](double n) { return 2.0 + 3.0 / std::log(n); }));
  EXPECT_NEAR(e.limit, 2.0, 0.1);
}

TEST(Extrapolate, NeedsFourPoints) {
  EXPECT_THROW(extrapolate({{1.0, 1.0}, {2.0, 1.0}, {3.0, 1.0}}), ParameterError);
}

TEST(Extrapolate, RawModelReturnsLastValue) {
  auto e = extrapolate(sample(powers, [](double n) { return 1.0 / n; }), ExtrapolationModel::raw);
  EXPECT_DOUBLE_EQ(e.limit, 1e-7);
}

TEST(KsStatistic, UniformGrid) {
  std::vector<double> xs;
  for (int i = 0; i < 100; ++i) xs.push_back((i + 0.5) / 100.0);
  EXPECT_NEAR(ks_statistic(xs, [](double x) { return std::clamp(x, 0.0, 1.0); }), 0.005, 1e-12);
  EXPECT_NEAR(ks_statistic(xs, [](double) { return 0.0; }), 1.0, 1e-12);
}

TEST(Ldp, VisitsBothMatchesEnumeration) {
  for (int n : {6, 11, 14})
    for (long a = 0; a <= 4; ++a)
      for (long b = 0; b <= 4; ++b) {
        double ref = 0.0, w = std::ldexp(1.0, -n);
        oracle::for_each_path(n, [&](const oracle::PathStats& s) {
          if (s.min <= -a && s.max >= b) ref += w;
        });
        double got = log_visits_both(n, a, b);
        if (ref == 0.0)
          EXPECT_EQ(got, neg_inf) << n << " " << a << " " << b;
        else
          EXPECT_NEAR(std::exp(got), ref, 1e-12 * std::max(1.0, ref)) << n << " " << a << " " << b;
      }
}

TEST(Ldp, RowsMatchEnumeration) {
  const int n = 16;
  auto r = ldp_row(0.25, -0.5, 0.5, n);  // confined to [-1, 1]
  EXPECT_NEAR(std::exp(-r.neg_log_p), oracle::confined(n, 1, 1), 1e-12);
  auto s = ldp_row(1.0, 0.0, 0.5, n);  // max >= 8
  EXPECT_NEAR(std::exp(-s.neg_log_p), oracle::max_tail(n, 8), 1e-12);
  EXPECT_NEAR(s.normalized, s.neg_log_p / n, 1e-15);
}

TEST(Ldp, LinearScale) {
  auto r = run_ldp_validation(1.0, 0.0, 0.5, {256, 1024, 4096, 16384, 65536});
  EXPECT_EQ(r.rate, "kappa");
  EXPECT_TRUE(r.pass) << r.rel_error;
}

TEST(Ldp, RejectsBadLevels) {
  EXPECT_THROW(run_ldp_validation(0.5, -1, 1, {10, 20, 30, 40}), ParameterError);
  EXPECT_THROW(run_ldp_validation(0.25, 1, 2, {10, 20, 30, 40}), ParameterError);
  EXPECT_THROW(run_ldp_validation(1.0, -1, 1, {10, 20, 30, 40}), ParameterError);
}

namespace {

SweepConfig r6_config() {
  SweepConfig c;
  c.alpha = 2.0;
  c.beta_hat = 1.0;
  c.h_hat = 1.0;
  c.gamma = 0.0;
  c.zeta = -2.0;
  c.n_list = {1000};
  c.seeds = {0, 1, 2, 3};
  c.tolerance = 1e-3;
  c.absolute = true;
  return c;
}

}  // namespace

TEST(Sweep, ValidateRejects) {
  auto c = r6_config();
  c.n_list = {};
  EXPECT_THROW(c.validate(), ParameterError);
  c = r6_config();
  c.n_list = {100, 50};
  EXPECT_THROW(c.validate(), ParameterError);
  c = r6_config();
  c.seeds = {1, 1};
  EXPECT_THROW(c.validate(), ParameterError);
  c = r6_config();
  c.alpha = 1.0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = r6_config();
  c.tolerance = 0.0;
  EXPECT_THROW(c.validate(), ParameterError);
}

TEST(Sweep, R6ReachesConstant) {
  auto rep = run_logz_sweep(r6_config());
  EXPECT_EQ(rep.label.region, Region::R6);
  ASSERT_EQ(rep.rows.size(), 4u);
  for (const auto& row : rep.rows) EXPECT_NEAR(row.normalized, -2.0, 1e-3);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.verdict(), "pass");
}

TEST(Sweep, IndependentOfThreadCount) {
  auto c = r6_config();
  c.gamma = 0.1;
  c.zeta = 0.3;
  c.n_list = {64, 128};
  set_thread_budget(1);
  auto a = run_logz_sweep(c);
  set_thread_budget(3);
  auto b = run_logz_sweep(c);
  set_thread_budget(0);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].log_z, b.rows[i].log_z);
    EXPECT_EQ(a.rows[i].seed, b.rows[i].seed);
  }
}

TEST(Sweep, NoCouplingGivesUnitPartitionFunction) {
  SweepConfig c;
  c.beta_hat = 0.0;
  c.h_hat = 0.0;
  c.n_list = {50, 100};
  c.seeds = {0, 1};
  c.tolerance = 1e-12;
  c.absolute = true;
  auto rep = run_logz_sweep(c);
  EXPECT_EQ(rep.label.region, Region::R1);
  for (const auto& row : rep.rows) EXPECT_NEAR(row.log_z, 0.0, 1e-12);
  EXPECT_TRUE(rep.pass);
}

TEST(ParallelMap, OrderAndErrors) {
  auto v = parallel_map<int>(50, [](std::size_t i) { return static_cast<int>(i * i); }, 4);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], static_cast<int>(i * i));
  EXPECT_THROW(parallel_map<int>(10, [](std::size_t i) -> int {
    if (i == 7) throw ParameterError("x");
    return 0;
  }, 3),
               ParameterError);
}

TEST(Distributional, SmallRunIsSane) {
  auto r = run_distributional(Variant::R3, 1.0, 0.0, 24, 0, 256.0, 1.0);
  EXPECT_EQ(r.samples, 24u);
  EXPECT_GE(r.ks, 0.0);
  EXPECT_LE(r.ks, 1.0);
  EXPECT_THROW(run_distributional(Variant::R2, 1.0, 1.0, 4), ParameterError);
}
