#include "stabletail/stable_univariate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "stabletail/errors.hpp"

namespace stabletail {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSeriesRelTol = 1e-12;
constexpr int kMaxSeriesTerms = 400;
constexpr double kVMax = 42.0;  // exp(-42) ~ 6e-19
constexpr double kTableStep = 0.01;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0, 2)");
}

// Wynn epsilon acceleration of a sequence of partial sums, one term at a time.
class WynnEpsilon {
 public:
  double push(double s) {
    std::vector<double> next(prev_.size() + 1);
    next[0] = s;
    for (std::size_t k = 1; k < next.size(); ++k) {
      const double diff = next[k - 1] - prev_[k - 1];
      if (diff == 0.0 || !std::isfinite(diff)) {
        next.resize(k);
        break;
      }
      const double before = k >= 2 ? prev_[k - 2] : 0.0;
      next[k] = before + 1.0 / diff;
    }
    if (next.size() > kMaxWidth) next.resize(kMaxWidth);
    prev_ = std::move(next);
    const std::size_t even = (prev_.size() - 1) & ~std::size_t{1};
    return prev_[even];
  }

 private:
  static constexpr std::size_t kMaxWidth = 40;
  std::vector<double> prev_;
};

// Integral over v in [0, kVMax] of weight(v) * osc(x v^{1/alpha}), panels split at
// the zeros of the oscillatory factor (v_j = theta_j^alpha).
template <class Integrand>
double oscillatory_integral(double alpha, double x, double first_zero_theta, Integrand&& g) {
  namespace q = boost::math::quadrature;
  const double theta_step = kPi / x;
  double theta = first_zero_theta;
  const double theta_max = std::pow(kVMax, 1.0 / alpha);
  const double panels = (theta_max - theta) / theta_step;
  const bool accelerate = panels > 60.0;

  static thread_local q::tanh_sinh<double> ts;
  double a = 0.0;
  double b = std::min(std::pow(theta, alpha), kVMax);
  double sum = ts.integrate(g, a, b, 1e-14);
  if (b >= kVMax) return sum;

  WynnEpsilon wynn;
  double last = kInf;
  int stable = 0;
  for (int j = 1; j < 5000000; ++j) {
    a = b;
    theta += theta_step;
    b = std::min(std::pow(theta, alpha), kVMax);
    const double piece = q::gauss_kronrod<double, 21>::integrate(g, a, b, 2, 1e-11);
    sum += piece;
    if (b >= kVMax) return sum;
    if (accelerate) {
      const double est = wynn.push(sum);
      if (j > 8 && std::abs(est - last) < 1e-13) {
        if (++stable >= 3) return est;
      } else {
        stable = 0;
      }
      last = est;
      if (j > 4000) return est;
    }
  }
  return sum;
}

}  // namespace

Alpha::Alpha(double value) : value_(value) { check_alpha(value); }

double c_alpha(double alpha) {
  check_alpha(alpha);
  return 2.0 * std::tgamma(alpha) * std::sin(kPi * alpha / 2.0) / kPi;
}

struct StableLaw::Table {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = 0.0;
  double dy = kTableStep;
  std::vector<double> s;   // survival function at nodes
  std::vector<double> ds;  // d sf / d log x at nodes
};

struct StableLaw::TableSlot {
  std::once_flag once;
  std::unique_ptr<Table> table;
};

StableLaw::StableLaw(double alpha) : alpha_(alpha), table_slot_(std::make_shared<TableSlot>()) {
  check_alpha(alpha);
  c_ = c_alpha(alpha);
  pdf_at_zero_ = std::tgamma(1.0 + 1.0 / alpha) / kPi;
  pdf_coef_.resize(kMaxSeriesTerms);
  sf_coef_.resize(kMaxSeriesTerms);
  coef_bound_.resize(kMaxSeriesTerms);
  for (int k = 1; k <= kMaxSeriesTerms; ++k) {
    const double ka = k * alpha;
    const double log_bound = std::lgamma(ka + 1.0) - std::lgamma(k + 1.0) - std::log(kPi);
    const double sign = (k % 2 == 1 ? 1.0 : -1.0) * std::sin(k * kPi * alpha / 2.0);
    coef_bound_[k - 1] = log_bound;
    pdf_coef_[k - 1] = sign;
    sf_coef_[k - 1] = sign;
  }
  // Smallest grid point beyond which both series stay within tolerance.
  double threshold = 1e3;
  int good_run = 0;
  double run_start = 0.0;
  for (double x = 0.02; x < 1e3; x *= 1.05) {
    const SeriesValue p = series(x, true);
    const SeriesValue s = series(x, false);
    const bool ok = p.error <= kSeriesRelTol * std::abs(p.value) &&
                    s.error <= kSeriesRelTol * std::abs(s.value) && p.value > 0 && s.value > 0;
    if (ok) {
      if (good_run == 0) run_start = x;
      if (++good_run >= 20) {
        threshold = run_start;
        break;
      }
    } else {
      good_run = 0;
    }
  }
  series_threshold_ = threshold;
}

SeriesValue StableLaw::series(double x, bool density) const {
  SeriesValue out;
  const double lx = std::log(x);
  double sum = 0.0;
  double max_abs = 0.0;
  double prev_bound = kInf;
  double error = kInf;
  int k = 1;
  for (; k <= kMaxSeriesTerms; ++k) {
    const double ka = k * alpha_;
    const double log_mag = density ? coef_bound_[k - 1] - (ka + 1.0) * lx
                                   : coef_bound_[k - 1] - std::log(ka) - ka * lx;
    const double bound = std::exp(log_mag);
    if (alpha_ >= 1.0 && k > 2 && bound > prev_bound) {
      error = prev_bound;
      break;
    }
    const double term = (density ? pdf_coef_[k - 1] : sf_coef_[k - 1]) * bound;
    sum += term;
    max_abs = std::max(max_abs, std::abs(term));
    if (k >= 2 && bound < 1e-17 * std::abs(sum)) {
      error = bound;
      break;
    }
    prev_bound = bound;
  }
  if (k > kMaxSeriesTerms) error = prev_bound;
  out.value = sum;
  out.error = std::max(error, 4e-16 * max_abs * std::sqrt(static_cast<double>(k)));
  out.terms = k;
  return out;
}

SeriesValue StableLaw::pdf_series(double x) const { return series(std::abs(x), true); }
SeriesValue StableLaw::sf_series(double x) const {
  if (x <= 0) throw DomainError("sf_series requires x > 0");
  return series(x, false);
}

double StableLaw::pdf_quadrature(double x) const {
  x = std::abs(x);
  if (x == 0.0) return pdf_at_zero_;
  const double inv_a = 1.0 / alpha_;
  auto g = [&](double v) {
    if (v <= 0.0) return 0.0;
    return inv_a * std::pow(v, inv_a - 1.0) * std::exp(-v) * std::cos(x * std::pow(v, inv_a));
  };
  return oscillatory_integral(alpha_, x, 0.5 * kPi / x, g) / kPi;
}

double StableLaw::cdf_quadrature(double x) const {
  if (x == 0.0) return 0.5;
  const double ax = std::abs(x);
  const double inv_a = 1.0 / alpha_;
  auto g = [&](double v) {
    if (v <= 0.0) return 0.0;
    return inv_a * std::exp(-v) * std::sin(ax * std::pow(v, inv_a)) / v;
  };
  const double half = oscillatory_integral(alpha_, ax, kPi / ax, g) / kPi;
  return x > 0 ? 0.5 + half : 0.5 - half;
}

double StableLaw::pdf(double x) const {
  x = std::abs(x);
  if (x >= series_threshold_) return series(x, true).value;
  return pdf_quadrature(x);
}

double StableLaw::sf(double x) const {
  if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
  if (x >= series_threshold_) return series(x, false).value;
  if (x <= -series_threshold_) return 1.0 - series(-x, false).value;
  return 1.0 - cdf_quadrature(x);
}

double StableLaw::cdf(double x) const {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  if (x <= -series_threshold_) return series(-x, false).value;
  if (x >= series_threshold_) return 1.0 - series(x, false).value;
  return cdf_quadrature(x);
}

const StableLaw::Table& StableLaw::table() const {
  std::call_once(table_slot_->once, [this] {
    auto t = std::make_unique<Table>();
    const double f2 = std::tgamma(3.0 / alpha_) / (alpha_ * kPi);
    t->x_lo = std::min(1e-3, std::cbrt(6e-13 / f2));
    t->x_hi = series_threshold_;
    while (series(t->x_hi, false).terms > 12 || series(t->x_hi, true).terms > 12) t->x_hi *= 1.25;
    t->y_lo = std::log(t->x_lo);
    const double span = std::log(t->x_hi) - t->y_lo;
    const int n = std::max(2, static_cast<int>(std::ceil(span / kTableStep)) + 1);
    t->dy = span / (n - 1);
    t->s.resize(n);
    t->ds.resize(n);
    for (int i = 0; i < n; ++i) {
      const double x = i == n - 1 ? t->x_hi : std::exp(t->y_lo + i * t->dy);
      const bool tail = x >= series_threshold_;
      t->s[i] = tail ? series(x, false).value : 1.0 - cdf_quadrature(x);
      t->ds[i] = -x * (tail ? series(x, true).value : pdf_quadrature(x));
    }
    table_slot_->table = std::move(t);
  });
  return *table_slot_->table;
}

double StableLaw::fast_sf(double x) const {
  if (x < 0) return 1.0 - fast_sf(-x);
  if (std::isinf(x)) return 0.0;
  const Table& t = table();
  if (x >= t.x_hi) return series(x, false).value;
  if (x <= t.x_lo) return 0.5 - pdf_at_zero_ * x;
  const double pos = (std::log(x) - t.y_lo) / t.dy;
  const std::size_t i = std::min(static_cast<std::size_t>(pos), t.s.size() - 2);
  const double u = pos - static_cast<double>(i);
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  const double h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u);
  const double h11 = u * u * (u - 1);
  return h00 * t.s[i] + h10 * t.dy * t.ds[i] + h01 * t.s[i + 1] + h11 * t.dy * t.ds[i + 1];
}

double StableLaw::interval_probability(double a, double b) const {
  if (!(a < b)) return 0.0;
  double p;
  if (a >= 0.0) {
    p = fast_sf(a) - fast_sf(b);
  } else if (b <= 0.0) {
    p = fast_sf(-b) - fast_sf(-a);
  } else {
    p = 1.0 - fast_sf(-a) - fast_sf(b);
  }
  return std::max(p, 0.0);
}

double StableLaw::tail_quantile(double q) const {
  if (!(q > 0.0)) throw DomainError("tail probability must be positive");
  if (q >= 0.5) return 0.0;
  const Table& t = table();
  if (q <= t.s.back()) {
    double x = std::max(t.x_hi, std::pow(c_ / (2.0 * q), 1.0 / alpha_));
    for (int it = 0; it < 50; ++it) {
      const double s = series(x, false).value;
      const double f = series(x, true).value;
      const double step = (std::log(s) - std::log(q)) / (x * f / s);
      const double next = std::max(t.x_hi, x * std::exp(step));
      if (std::abs(next - x) <= 1e-15 * x) return next;
      x = next;
    }
    return x;
  }
  if (q >= 0.5 - pdf_at_zero_ * t.x_lo) return (0.5 - q) / pdf_at_zero_;
  // s is decreasing in the node index.
  auto it = std::lower_bound(t.s.begin(), t.s.end(), q, [](double s, double v) { return s > v; });
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - t.s.begin())) - 1;
  i = std::min(i, t.s.size() - 2);
  const double s0 = t.s[i];
  const double s1 = t.s[i + 1];
  const double m0 = t.dy * t.ds[i];
  const double m1 = t.dy * t.ds[i + 1];
  double lo = 0.0;
  double hi = 1.0;
  double u = std::clamp((s0 - q) / (s0 - s1), 0.0, 1.0);
  for (int it2 = 0; it2 < 60; ++it2) {
    const double value = (1 + 2 * u) * (1 - u) * (1 - u) * s0 + u * (1 - u) * (1 - u) * m0 +
                         u * u * (3 - 2 * u) * s1 + u * u * (u - 1) * m1 - q;
    if (value > 0) lo = u; else hi = u;
    const double slope = 6 * u * (u - 1) * (s0 - s1) + (1 - u) * (1 - 3 * u) * m0 + u * (3 * u - 2) * m1;
    double next = slope < 0 ? u - value / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) < 1e-15 || hi - lo < 1e-15) {
      u = next;
      break;
    }
    u = next;
  }
  return std::exp(t.y_lo + (static_cast<double>(i) + u) * t.dy);
}

double StableLaw::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  if (u < 0.5) return -tail_quantile(u);
  if (u > 0.5) return tail_quantile(1.0 - u);
  return 0.0;
}

double StableLaw::sample(RandomStream& rng) const {
  const double v = kPi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  if (alpha_ == 1.0) return std::tan(v);
  const double a = alpha_;
  return std::sin(a * v) / std::pow(std::cos(v), 1.0 / a) *
         std::pow(std::cos((1.0 - a) * v) / w, (1.0 - a) / a);
}

const StableLaw& stable_law(double alpha) {
  check_alpha(alpha);
  static std::mutex mutex;
  static std::map<double, std::unique_ptr<StableLaw>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[alpha];
  if (!slot) slot = std::make_unique<StableLaw>(alpha);
  return *slot;
}

double std_stable_pdf(double alpha, double x) { return stable_law(alpha).pdf(x); }
double std_stable_cdf(double alpha, double x) { return stable_law(alpha).cdf(x); }
double std_stable_sample(double alpha, RandomStream& rng) { return stable_law(alpha).sample(rng); }

std::vector<double> std_stable_sample(double alpha, std::size_t n, RandomStream& rng) {
  const StableLaw& law = stable_law(alpha);
  std::vector<double> out(n);
  for (auto& v : out) v = law.sample(rng);
  return out;
}

double abs_moment(double alpha, double p) {
  check_alpha(alpha);
  if (!(p >= 0.0) || p >= alpha) throw DomainError("abs_moment requires 0 <= p < alpha");
  if (p == 0.0) return 1.0;
  const StableLaw& law = stable_law(alpha);
  const double x_hi = law.series_threshold();
  boost::math::quadrature::tanh_sinh<double> ts;
  const double body = ts.integrate([&](double x) { return std::pow(x, p) * law.pdf(x); }, 0.0, x_hi, 1e-12);
  // Termwise integration of the density series beyond the threshold.
  double tail = 0.0;
  double prev = kInf;
  const double lx = std::log(x_hi);
  for (int k = 1; k <= kMaxSeriesTerms; ++k) {
    const double ka = k * alpha;
    const double mag = std::exp(std::lgamma(ka + 1.0) - std::lgamma(k + 1.0) - std::log(kPi) +
                                (p - ka) * lx) / (ka - p);
    if (alpha >= 1.0 && k > 2 && mag > prev) break;
    tail += (k % 2 == 1 ? 1.0 : -1.0) * std::sin(k * kPi * alpha / 2.0) * mag;
    if (mag < 1e-17 * std::abs(tail)) break;
    prev = mag;
  }
  return 2.0 * (body + tail);
}

}  // namespace stabletail
