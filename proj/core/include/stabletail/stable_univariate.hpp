#pragma once

#include <memory>
#include <vector>

#include "stabletail/random.hpp"

namespace stabletail {

// Stability index in the open interval (0, 2).
class Alpha {
 public:
  explicit Alpha(double value);
  double value() const { return value_; }
  operator double() const { return value_; }

 private:
  double value_;
};

// Universal tail constant: P(S >= h) ~ c_alpha(alpha) h^-alpha / 2.
double c_alpha(double alpha);

struct SeriesValue {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate (truncation plus rounding)
  int terms = 0;
};

// Standard symmetric stable law with characteristic function exp(-|t|^alpha).
// Evaluation methods are const and safe to call concurrently.
class StableLaw {
 public:
  explicit StableLaw(double alpha);

  double alpha() const { return alpha_; }
  double c() const { return c_; }

  double pdf(double x) const;
  double cdf(double x) const;
  double sf(double x) const;  // 1 - F(x), relative accuracy kept in the right tail

  // F(b) - F(a) for a <= b (infinite endpoints allowed). Uses a cached
  // interpolation table in the body of the law and the tail series outside it.
  double interval_probability(double a, double b) const;
  // Table-backed survival function, the fast path behind interval_probability.
  double fast_sf(double x) const;
  double quantile(double u) const;
  // x >= 0 with sf(x) = q for q in (0, 1/2].
  double tail_quantile(double q) const;

  double sample(RandomStream& rng) const;

  // Smallest |x| from which the tail series is used.
  double series_threshold() const { return series_threshold_; }
  SeriesValue pdf_series(double x) const;
  SeriesValue sf_series(double x) const;
  double pdf_quadrature(double x) const;
  double cdf_quadrature(double x) const;

 private:
  struct Table;
  struct TableSlot;
  const Table& table() const;
  SeriesValue series(double x, bool density) const;

  double alpha_;
  double c_;
  double pdf_at_zero_;
  std::vector<double> pdf_coef_;   // signed coefficients of x^{-k alpha - 1}
  std::vector<double> sf_coef_;    // signed coefficients of x^{-k alpha}
  std::vector<double> coef_bound_; // |Gamma(k alpha + 1) / (pi k!)|
  double series_threshold_ = 0.0;
  std::shared_ptr<TableSlot> table_slot_;
};

// Process-wide cache of laws keyed by alpha.
const StableLaw& stable_law(double alpha);

double std_stable_pdf(double alpha, double x);
double std_stable_cdf(double alpha, double x);
double std_stable_sample(double alpha, RandomStream& rng);
std::vector<double> std_stable_sample(double alpha, std::size_t n, RandomStream& rng);

// E|S|^p for 0 <= p < alpha.
double abs_moment(double alpha, double p);

}  // namespace stabletail
