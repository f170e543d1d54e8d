#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stabletail/errors.hpp"
#include "stabletail/mc_estimation.hpp"
#include "stabletail/repro/examples.hpp"
#include "stabletail/stable_univariate.hpp"
#include "stabletail/tail_asymptotics.hpp"

using namespace stabletail;
using namespace stabletail::repro;

namespace {

constexpr double kPi = std::numbers::pi;

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

Region empty_region() {
  return Region::intersection_of({Region::halfspace(vec({1, 0}), 1.0), Region::halfspace(vec({-1, 0}), -0.5)});
}

ConditionalOptions smoothing_on(int column, bool stratified = true) {
  ConditionalOptions o;
  o.smoothing_index = column;
  o.sampling = stratified ? ConditionalOptions::Sampling::stratified : ConditionalOptions::Sampling::iid;
  return o;
}

double cauchy_sf(double h) { return 0.5 - std::atan(h) / kPi; }

EstimateReport synthetic(double h, double p) {
  EstimateReport r;
  r.h = h;
  r.p_hat = p;
  r.ci_lo = 0.99 * p;
  r.ci_hi = 1.01 * p;
  r.std_error = 0.005 * p;
  r.n = 1000;
  return r;
}

}  // namespace

TEST(EstimateCrude, EmptyRegion) {
  const auto r = estimate_crude(independent_model(1.0), empty_region(), 10.0, 100000, 1);
  EXPECT_EQ(r.p_hat, 0.0);
  EXPECT_GE(r.ci_lo, 0.0);
  EXPECT_LE(r.ci_hi, 1.0);
}

TEST(EstimateCrude, IndependentQuadrantCauchy) {
  const double exact = std::pow(cauchy_sf(10.0), 2);
  EXPECT_NEAR(exact, 1.00651e-3, 1e-8);
  const auto r = estimate_crude(independent_model(1.0), quadrant_region(), 10.0, 10000000, 2);
  EXPECT_LE(r.ci_lo, exact);
  EXPECT_GE(r.ci_hi, exact);
  EXPECT_LE(r.ci_lo, r.p_hat);
  EXPECT_GE(r.ci_hi, r.p_hat);
}

TEST(EstimateCrude, HalfStripCauchy) {
  const double exact = cauchy_sf(100.0) * 0.5;
  EXPECT_NEAR(exact, 1.592e-3, 1e-6);
  const auto r = estimate_crude(independent_model(1.0), half_strip_region(), 100.0, 10000000, 3);
  EXPECT_LE(r.ci_lo, exact);
  EXPECT_GE(r.ci_hi, exact);
}

TEST(EstimateCrude, IndependentOfWorkerCount) {
  const auto a = estimate_crude(shared_factor_model(0.8), corner_region(), 5.0, 100000, 4, 1);
  const auto b = estimate_crude(shared_factor_model(0.8), corner_region(), 5.0, 100000, 4, 3);
  EXPECT_EQ(a.p_hat, b.p_hat);
  EXPECT_EQ(a.ci_lo, b.ci_lo);
}

TEST(EstimateConditional, EmptyRegionAndEmptyClip) {
  EXPECT_EQ(estimate_conditional(independent_model(1.0), empty_region(), 10.0, 10000, 1).p_hat, 0.0);
  const auto far = Region::intersection_of({Region::halfspace(vec({0, 1}), 1.0), Region::halfspace(vec({0, -1}), -1.0)});
  EXPECT_EQ(estimate_conditional(independent_model(1.0), far, 10.0, 10000, 1, smoothing_on(0)).p_hat, 0.0);
}

TEST(EstimateConditional, IndependentQuadrantExact) {
  const double exact = std::pow(cauchy_sf(100.0), 2);
  EXPECT_NEAR(exact, 1.0132e-5, 1e-9);
  const auto strat = estimate_conditional(independent_model(1.0), quadrant_region(), 100.0, 100000, 5, smoothing_on(0));
  EXPECT_NEAR(strat.p_hat, exact, 2e-2 * exact);
  const auto iid =
      estimate_conditional(independent_model(1.0), quadrant_region(), 100.0, 100000, 5, smoothing_on(0, false));
  EXPECT_NEAR(iid.p_hat, exact, 3.0 * iid.std_error);
  for (const auto& r : {strat, iid}) {
    EXPECT_LE(r.ci_lo, r.p_hat);
    EXPECT_GE(r.ci_hi, r.p_hat);
  }
}

TEST(EstimateConditional, SharedFactorNormalized) {
  const double h = 1e4;
  const auto r = estimate_conditional(shared_factor_model(0.5), corner_region(), h, 100000, 6, smoothing_on(0));
  const double ref = closed_form_reference("ex2_lowalpha", 0.5).value;
  EXPECT_NEAR(h * r.p_hat, ref, 0.1 * ref);
}

TEST(EstimateConditional, AgreesWithCrudeAndReducesVariance) {
  const auto m = shared_factor_model(1.2);
  const double h = 3.0;
  const auto crude = estimate_crude(m, corner_region(), h, 1000000, 7);
  const auto cond = estimate_conditional(m, corner_region(), h, 100000, 7, smoothing_on(0));
  EXPECT_NEAR(cond.p_hat, crude.p_hat, 3.0 * std::hypot(cond.std_error, crude.std_error));
  const auto crude_same = estimate_crude(m, corner_region(), h, 100000, 7);
  EXPECT_LT(cond.ci_hi - cond.ci_lo, 0.2 * (crude_same.ci_hi - crude_same.ci_lo));
}

TEST(EstimateConditional, MaxPartitionAgrees) {
  const auto m = permutation_model(0.5, 0.5);
  ConditionalOptions mp;
  mp.smoothing = ConditionalOptions::Smoothing::max_partition;
  mp.sampling = ConditionalOptions::Sampling::stratified;
  const auto a = estimate_conditional(m, permutation_region(), 4.0, 100000, 8, mp);
  const auto c = estimate_crude(m, permutation_region(), 4.0, 2000000, 8);
  EXPECT_NEAR(a.p_hat, c.p_hat, 3.0 * std::hypot(a.std_error, c.std_error));
}

TEST(EstimateConditional, ReproducibleAndWorkerIndependent) {
  auto o = smoothing_on(0);
  const auto a = estimate_conditional(shared_factor_model(0.9), corner_region(), 50.0, 20000, 9, o);
  o.workers = 3;
  const auto b = estimate_conditional(shared_factor_model(0.9), corner_region(), 50.0, 20000, 9, o);
  EXPECT_EQ(a.p_hat, b.p_hat);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_EQ(a.seed, 9u);
  EXPECT_EQ(a.method, EstimateMethod::conditional);
}

TEST(EstimateConditional, RejectsBadInput) {
  EXPECT_THROW(estimate_conditional(independent_model(1.0), quadrant_region(), -1.0, 1000, 1), DomainError);
  EXPECT_THROW(estimate_conditional(independent_model(1.0), quadrant_region(), 10.0, 1000, 1, smoothing_on(5)),
               DomainError);
  EXPECT_THROW(estimate_conditional(permutation_model(1.0, 0.5), quadrant_region(), 10.0, 1000, 1), DomainError);
}

TEST(SlopeFit, SyntheticPowerLaw) {
  std::vector<EstimateReport> rs;
  for (double h : {10.0, 100.0, 1000.0}) rs.push_back(synthetic(h, std::pow(h, -2.0)));
  const auto f = slope_fit(rs, false);
  EXPECT_NEAR(f.slope, -2.0, 1e-9);
  EXPECT_FALSE(f.log_model);
}

TEST(SlopeFit, SyntheticLogCorrection) {
  std::vector<EstimateReport> rs;
  for (double e = 3.0; e <= 6.0; e += 0.5) {
    const double h = std::pow(10.0, e);
    rs.push_back(synthetic(h, 0.1 * std::log(h) / (h * h)));
  }
  const auto f = slope_fit(rs, true);
  ASSERT_TRUE(f.log_model);
  EXPECT_NEAR(f.base_slope, -2.0, 1e-6);
  EXPECT_NEAR(f.log_coefficient, 1.0, 1e-5);
  EXPECT_TRUE(f.log_significant);
}

TEST(SlopeFit, InsufficientData) {
  EXPECT_THROW(slope_fit({synthetic(10, 0.01), synthetic(100, 0.001)}), InsufficientDataError);
  auto z = synthetic(1000, 0.0);
  z.ci_lo = 0.0;
  EXPECT_THROW(slope_fit({synthetic(10, 0.01), synthetic(100, 0.001), z}), InsufficientDataError);
}

TEST(SlopeFit, PowerRegionAboveSigma) {
  std::vector<EstimateReport> rs;
  for (double e : {2.0, 2.5, 3.0, 3.5})
    rs.push_back(estimate_conditional(independent_model(1.0), Region::power_region(0.5), std::pow(10.0, e), 200000,
                                      10, smoothing_on(0)));
  EXPECT_NEAR(slope_fit(rs, false).slope, -1.5, 0.1);
}

TEST(SlopeFit, SharedFactorAtOneHasLogTerm) {
  std::vector<EstimateReport> rs;
  for (double e : {3.0, 4.0, 5.0, 6.0})
    rs.push_back(
        estimate_conditional(shared_factor_model(1.0), corner_region(), std::pow(10.0, e), 200000, 11, smoothing_on(0)));
  const auto f = slope_fit(rs, true);
  EXPECT_TRUE(f.log_significant);
  EXPECT_NEAR(f.base_slope, -2.0, 0.1);
}

TEST(Probe, IndependentQuadrantConverges) {
  ProbeOptions po;
  po.conditional = smoothing_on(0);
  const auto rows = normalized_limit_probe(independent_model(0.5), quadrant_region(), 2, {1e2, 1e3, 1e4}, 100000, 12, po);
  ASSERT_EQ(rows.size(), 3u);
  ASSERT_TRUE(rows.back().normalized);
  EXPECT_NEAR(*rows.back().normalized, 0.159155, 0.1 * 0.159155);
  EXPECT_NEAR(*rows.back().normalized, rows.back().p_hat * 1e4, 1e-12);
}

TEST(Probe, PermutationModelConverges) {
  ProbeOptions po;
  po.conditional.smoothing = ConditionalOptions::Smoothing::max_partition;
  po.conditional.sampling = ConditionalOptions::Sampling::stratified;
  const auto rows =
      normalized_limit_probe(permutation_model(0.5, 0.5), permutation_region(), 2, {1e2, 1e3, 1e4}, 100000, 13, po);
  EXPECT_NEAR(*rows.back().normalized, 0.046616, 0.1 * 0.046616);
}

TEST(Probe, OrderTooSmallVanishes) {
  ProbeOptions po;
  po.conditional = smoothing_on(0);
  const auto rows = normalized_limit_probe(independent_model(1.0), quadrant_region(), 1, {1e1, 1e2, 1e3, 1e4}, 50000, 14, po);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(*rows[i].normalized, 0.5 * *rows[i - 1].normalized);
  EXPECT_LT(*rows.back().normalized, 1e-3);
}
