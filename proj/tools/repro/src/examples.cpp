#include "stabletail/repro/examples.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stabletail/errors.hpp"

namespace stabletail::repro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

StableVectorModel independent_model(double alpha) { return from_matrix({alpha, Matrix::Identity(2, 2)}); }

StableVectorModel shared_factor_model(double alpha) {
  Matrix m(2, 2);
  m << 1.0, 0.0, 1.0, -1.0;
  return from_matrix({alpha, m});
}

StableVectorModel permutation_model(double alpha, double a) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("mixing weight a must lie in (0, 1)");
  const double c = std::pow(1.0 - std::pow(a, alpha), 1.0 / alpha);
  Matrix m(3, 4);
  m << a, c, 0.0, 0.0, a, 0.0, c, 0.0, a, 0.0, 0.0, c;
  return from_matrix({alpha, m});
}

Region quadrant_region() { return Region::box(vec({1.0, 1.0}), vec({kInf, kInf})); }

Region half_strip_region() { return Region::box(vec({1.0, -kInf}), vec({kInf, 0.0})); }

Region corner_region() {
  return Region::intersection_of({Region::halfspace(vec({1.0, 0.0}), 1.0), Region::halfspace(vec({0.0, -1.0}), -1.0)});
}

Region permutation_region() { return Region::box(vec({1.0, 1.0, -kInf}), vec({kInf, kInf, 1.0})); }

Region cone_region(double theta_lo, double theta_hi) { return Region::cone_arc_2d(theta_lo, theta_hi, 1.0); }

Region corner_with_ball(double eps) {
  return Region::union_of({corner_region(), Region::ball(vec({1.0, 1.0}), eps, true, BallNorm::linf)});
}

Region corner_without_ball(double eps) {
  return Region::difference_with_ball(corner_region(), vec({1.0, 1.0}), eps, BallNorm::linf);
}

double kolmogorov_sf(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InsufficientDataError("KS test needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d)};
}

KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw InsufficientDataError("KS test needs a non-empty sample");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double ne = std::sqrt(n);
  return {d, kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d)};
}

}  // namespace stabletail::repro
