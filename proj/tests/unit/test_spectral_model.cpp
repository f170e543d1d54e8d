#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "stabletail/errors.hpp"
#include "stabletail/repro/examples.hpp"
#include "stabletail/spectral_model.hpp"
#include "stabletail/stable_univariate.hpp"

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

const AtomPair* find_atom(const SpectralMeasure& m, const Vector& dir) {
  for (const auto& a : m.atoms())
    if ((a.direction - dir).norm() < 1e-12 || (a.direction + dir).norm() < 1e-12) return &a;
  return nullptr;
}

std::vector<Vector> theta_grid2() {
  std::vector<Vector> g;
  for (int i = 0; i < 10; ++i) {
    const double phi = (i + 0.5) * kPi / 10.0, r = 0.2 * (i + 1);
    g.push_back(vec({r * std::cos(phi), r * std::sin(phi)}));
  }
  return g;
}

void expect_cf_matches(const StableVectorModel& model, const std::vector<Vector>& thetas,
                       const std::function<Vector(RandomStream&)>& draw, std::size_t n, std::uint64_t seed) {
  std::vector<double> s(thetas.size(), 0.0), s2(thetas.size(), 0.0);
  RandomStream rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector x = draw(rng);
    for (std::size_t q = 0; q < thetas.size(); ++q) {
      const double v = std::cos(thetas[q].dot(x));
      s[q] += v;
      s2[q] += v * v;
    }
  }
  for (std::size_t q = 0; q < thetas.size(); ++q) {
    const double mean = s[q] / n;
    const double se = std::sqrt((s2[q] / n - mean * mean) / n);
    EXPECT_NEAR(mean, cf_value(model, thetas[q]), 3.0 * se) << "theta " << thetas[q].transpose();
  }
}

}  // namespace

TEST(FromMatrix, IndependentColumnsGiveHalfMasses) {
  for (double a : {0.5, 1.0, 1.7}) {
    const auto m = from_matrix({a, Matrix::Identity(2, 2)});
    ASSERT_EQ(m.measure().atoms().size(), 2u);
    for (const auto& atom : m.measure().atoms()) EXPECT_NEAR(atom.mass, 0.5, 1e-15);
    EXPECT_NEAR(m.measure().total_mass(), 2.0, 1e-14);
  }
}

TEST(FromMatrix, SharedFactorMasses) {
  for (double a : {0.5, 1.0, 1.5}) {
    Matrix M(2, 2);
    M << 1, 0, 1, -1;
    const auto m = from_matrix({a, M});
    const auto* diag = find_atom(m.measure(), vec({1, 1}) / std::sqrt(2.0));
    const auto* vert = find_atom(m.measure(), vec({0, 1}));
    ASSERT_TRUE(diag && vert);
    EXPECT_NEAR(diag->mass, std::pow(2.0, a / 2.0) / 2.0, 1e-14);
    EXPECT_NEAR(vert->mass, 0.5, 1e-14);
  }
}

TEST(FromMatrix, PermutationModelMasses) {
  const double a = 0.5, mix = 0.6;
  const auto m = permutation_model(a, mix);
  const auto* diag = find_atom(m.measure(), vec({1, 1, 1}) / std::sqrt(3.0));
  ASSERT_TRUE(diag);
  EXPECT_NEAR(diag->mass, std::pow(mix, a) * std::pow(3.0, a / 2.0) / 2.0, 1e-13);
  for (int i = 0; i < 3; ++i) {
    const auto* e = find_atom(m.measure(), Vector::Unit(3, i));
    ASSERT_TRUE(e);
    EXPECT_NEAR(e->mass, (1.0 - std::pow(mix, a)) / 2.0, 1e-13);
  }
}

TEST(FromMatrix, RejectsZeroColumn) {
  Matrix M = Matrix::Zero(2, 2);
  M(0, 0) = 1.0;
  EXPECT_THROW(from_matrix({1.0, M}), DomainError);
}

TEST(FromMatrix, MergesCollinearColumns) {
  Matrix M(2, 2);
  M << 1, -2, 0, 0;
  const auto m = from_matrix({1.0, M});
  ASSERT_EQ(m.measure().atoms().size(), 1u);
  EXPECT_NEAR(m.measure().total_mass(), 3.0, 1e-14);
}

TEST(ToMatrix, RoundTrips) {
  const auto ex1 = to_matrix(independent_model(0.8));
  EXPECT_NEAR((ex1.columns.cwiseAbs() - Matrix::Identity(2, 2)).norm(), 0.0, 1e-14);
  const auto ex2 = to_matrix(shared_factor_model(1.3));
  Matrix expected(2, 2);
  expected << 1, 0, 1, 1;
  EXPECT_NEAR((ex2.columns - expected).norm(), 0.0, 1e-13);
  const double a = 1.3;
  double mass = 0.0;
  for (Eigen::Index j = 0; j < ex2.columns.cols(); ++j) mass += std::pow(ex2.columns.col(j).norm(), a);
  EXPECT_NEAR(mass, shared_factor_model(a).measure().total_mass(), 1e-13);
}

TEST(ToMatrix, RejectsIsotropicComponent) {
  const StableVectorModel iso(1.0, SpectralMeasure(2, {}, 1.0));
  EXPECT_THROW(to_matrix(iso), DomainError);
}

TEST(CfValue, ExamplesAndScaling) {
  const auto ex1 = independent_model(1.0);
  EXPECT_DOUBLE_EQ(cf_value(ex1, Vector::Zero(2)), 1.0);
  EXPECT_NEAR(cf_value(ex1, vec({1, 1})), std::exp(-2.0), 1e-14);
  for (double a : {0.4, 1.0, 1.6}) EXPECT_NEAR(cf_value(shared_factor_model(a), vec({0, 1})), std::exp(-2.0), 1e-13);
  const auto m = permutation_model(0.7, 0.4);
  const Vector t = vec({0.3, -0.2, 0.5});
  const double base = -std::log(cf_value(m, t));
  for (double r : {0.5, 2.0, 7.0}) EXPECT_NEAR(-std::log(cf_value(m, r * t)), std::pow(r, 0.7) * base, 1e-12);
}

TEST(CfValue, IsotropicMatchesClosedForm) {
  const StableVectorModel iso(1.0, SpectralMeasure(2, {}, 1.0));
  EXPECT_NEAR(sphere_abs_moment(2, 1.0), 2.0 / kPi, 1e-12);
  EXPECT_NEAR(cf_value(iso, vec({3, 4})), std::exp(-5.0 * 2.0 / kPi), 1e-12);
}

TEST(VectorSampler, Deterministic) {
  const VectorSampler s(permutation_model(1.1, 0.5));
  RandomStream r1(3), r2(3);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(s.sample(r1), s.sample(r2));
}

TEST(VectorSampler, MarginalIsStandardStable) {
  for (double a : {0.6, 1.4}) {
    const VectorSampler s(independent_model(a));
    RandomStream rng(17);
    std::vector<double> x;
    for (int i = 0; i < 100000; ++i) x.push_back(s.sample(rng)[0]);
    const auto ks = ks_one_sample(x, [a](double v) { return std_stable_cdf(a, v); });
    EXPECT_GT(ks.p_value, 0.01) << a;
  }
}

TEST(VectorSampler, EmpiricalCfOfPermutationModel) {
  const auto m = permutation_model(0.5, 0.6);
  const VectorSampler s(m);
  std::vector<Vector> thetas;
  for (int i = 0; i < 10; ++i) {
    const double r = 0.2 * (i + 1), phi = (i + 0.5) * kPi / 10.0, psi = 0.3 + 0.1 * i;
    thetas.push_back(r * vec({std::sin(psi) * std::cos(2 * phi), std::sin(psi) * std::sin(2 * phi), std::cos(psi)}));
  }
  expect_cf_matches(m, thetas, [&](RandomStream& r) { return s.sample(r); }, 1000000, 23);
}

TEST(LePage, DeterministicForFixedTerms) {
  TruncationControl c;
  c.mode = TruncationControl::Mode::fixed;
  c.terms = 500;
  const LePageSampler s(shared_factor_model(0.9), c);
  RandomStream r1(8), r2(8);
  const auto a = s.sample(r1), b = s.sample(r2);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.terms, 500u);
}

TEST(LePage, MarginalMatchesMatrixSampler) {
  const auto m = independent_model(0.7);
  TruncationControl c;
  c.relative_tolerance = 1e-4;
  const LePageSampler lp(m, c);
  const VectorSampler vs(m);
  RandomStream r1(31), r2(32);
  std::vector<double> x, y;
  for (int i = 0; i < 100000; ++i) {
    x.push_back(lp.sample(r1).value[0]);
    y.push_back(vs.sample(r2)[0]);
  }
  EXPECT_GT(ks_two_sample(x, y).p_value, 0.01);
}

TEST(LePage, IsotropicEmpiricalCf) {
  const StableVectorModel iso(1.0, SpectralMeasure(2, {}, 1.0));
  const LePageSampler lp(iso);
  expect_cf_matches(iso, theta_grid2(), [&](RandomStream& r) { return lp.sample(r).value; }, 100000, 41);
}

TEST(LePage, DirectionsOnSphere) {
  const LePageSampler lp(permutation_model(1.2, 0.5));
  RandomStream rng(2);
  for (int i = 0; i < 1000; ++i) EXPECT_NEAR(lp.draw_direction(rng).norm(), 1.0, 1e-12);
}

TEST(TailMomentProbe, StabilizesBetweenTruncations) {
  const auto rows = lepage_tail_moment_probe(independent_model(0.5), 2, 0.1, {1000, 10000}, 10000, 5);
  ASSERT_EQ(rows.size(), 4u);
  for (int j = 0; j < 2; ++j) {
    const auto& small = rows[static_cast<std::size_t>(j)];
    const auto& large = rows[static_cast<std::size_t>(2 + j)];
    ASSERT_EQ(small.n_terms, 1000u);
    ASSERT_EQ(large.n_terms, 10000u);
    EXPECT_NEAR(large.mean, small.mean, 3.0 * large.std_error);
  }
}

TEST(TailMomentProbe, ZeroCoordinate) {
  SpectralMeasure m(3);
  m.add_pair(vec({1, 0, 0}), 0.5);
  m.add_pair(vec({0, 1, 0}), 0.5);
  const auto rows = lepage_tail_moment_probe(StableVectorModel(0.8, m), 2, 0.1, {100}, 50, 1);
  EXPECT_DOUBLE_EQ(rows[2].mean, 0.0);
  EXPECT_GT(rows[0].mean, 0.0);
}

TEST(TailMomentProbe, EpsilonEqualAlphaRejected) {
  EXPECT_THROW(lepage_tail_moment_probe(independent_model(0.5), 2, 0.5, {100}, 10, 1), DomainError);
}

TEST(Discretize, FourAtomsOfQuarterMass) {
  const SpectralMeasure iso(2, {}, 1.0);
  const auto d = discretize_measure(iso, 4);
  EXPECT_TRUE(d.is_atomic());
  ASSERT_EQ(d.atoms().size(), 2u);
  for (const auto& a : d.atoms()) EXPECT_NEAR(a.mass, 0.25, 1e-15);
  EXPECT_NEAR(d.total_mass(), 1.0, 1e-14);
}

TEST(Discretize, AtomicUnchanged) {
  const auto m = shared_factor_model(1.0).measure();
  const auto d = discretize_measure(m, 8);
  ASSERT_EQ(d.atoms().size(), m.atoms().size());
  for (std::size_t i = 0; i < m.atoms().size(); ++i) {
    EXPECT_EQ(d.atoms()[i].direction, m.atoms()[i].direction);
    EXPECT_EQ(d.atoms()[i].mass, m.atoms()[i].mass);
  }
}

TEST(Discretize, CfApproximatesIsotropic) {
  const StableVectorModel iso(1.0, SpectralMeasure(2, {}, 2.0));
  const StableVectorModel disc(1.0, discretize_measure(iso.measure(), 64));
  for (const auto& t : theta_grid2()) EXPECT_NEAR(cf_value(disc, t), cf_value(iso, t), 1e-3);
  const StableVectorModel iso3(1.3, SpectralMeasure(3, {}, 1.0));
  EXPECT_NEAR(discretize_measure(iso3.measure(), 200).total_mass(), 1.0, 1e-12);
}
