#include "stabletail/mc_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "parallel.hpp"
#include "stabletail/errors.hpp"
#include "stabletail/random.hpp"
#include "stabletail/stable_univariate.hpp"
#include "stabletail/tail_asymptotics.hpp"

namespace stabletail {

namespace {

constexpr double kZ = 1.959963984540054;
constexpr double kPi = 3.141592653589793;
constexpr std::size_t kChunk = 1u << 14;

void check_scale(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("scale h must be positive and finite");
}

// Probability that S_j lies in the clip set, optionally restricted to |S_j| > floor.
double clip_probability(const StableLaw& law, const IntervalSet& clip, double floor) {
  double p = 0.0;
  for (const auto& iv : clip) {
    if (floor <= 0.0) {
      p += law.interval_probability(iv.lo, iv.hi);
      continue;
    }
    const double a1 = iv.lo, b1 = std::min(iv.hi, -floor);
    if (a1 < b1) p += law.interval_probability(a1, b1);
    const double a2 = std::max(iv.lo, floor), b2 = iv.hi;
    if (a2 < b2) p += law.interval_probability(a2, b2);
  }
  return p;
}

// Lower-tail mass of the warped stratification map u = v - sin(2 pi v) / (2 pi) at v = w <= 1/2.
double warp_tail(double w) {
  const double x = 2.0 * kPi * w;
  if (x < 0.2) {
    const double x2 = x * x;
    return w * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
  }
  return w - std::sin(x) / (2.0 * kPi);
}

}  // namespace

std::string method_name(EstimateMethod method) {
  return method == EstimateMethod::crude ? "crude" : "conditional";
}

EstimateReport estimate_crude(const StableVectorModel& model, const Region& region, double h, std::size_t n,
                              std::uint64_t seed, int workers) {
  check_scale(h);
  if (n < 1000) throw DomainError("estimate_crude requires n >= 1000");
  if (model.dim() != region.dim()) throw DomainError("model and region dimensions differ");
  const VectorSampler sampler(model);
  const CompiledRegion cr(scale(region, h), RegionVariant::interior());
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<std::size_t> hits(chunks, 0);
  detail::parallel_for(chunks, workers, [&](std::size_t c) {
    RandomStream rng(seed, c);
    const std::size_t count = std::min(kChunk, n - c * kChunk);
    std::size_t local = 0;
    for (std::size_t i = 0; i < count; ++i) local += cr.contains(sampler.sample(rng));
    hits[c] = local;
  });
  const double total = static_cast<double>(std::accumulate(hits.begin(), hits.end(), std::size_t{0}));
  const double nn = static_cast<double>(n);
  EstimateReport r;
  r.h = h;
  r.n = n;
  r.seed = seed;
  r.method = EstimateMethod::crude;
  r.p_hat = total / nn;
  const double z2 = kZ * kZ;
  const double centre = (r.p_hat + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
  const double half = kZ / (1.0 + z2 / nn) * std::sqrt(r.p_hat * (1.0 - r.p_hat) / nn + z2 / (4.0 * nn * nn));
  r.ci_lo = std::max(0.0, centre - half);
  r.ci_hi = std::min(1.0, centre + half);
  r.ci_lo = std::min(r.ci_lo, r.p_hat);
  r.ci_hi = std::max(r.ci_hi, r.p_hat);
  r.std_error = std::sqrt(r.p_hat * (1.0 - r.p_hat) / nn);
  return r;
}

int default_smoothing_index(const StableVectorModel& model, const Region& region) {
  const Matrix Y = model_columns(model);
  Vector target;
  try {
    const auto order = min_hits(model, region, RegionVariant::closure());
    if (order.witness) target = order.witness->point;
  } catch (const std::exception&) {
  }
  if (target.size() == 0 || target.norm() == 0.0) return 0;
  target.normalize();
  int best = 0;
  double best_score = -1.0;
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    const double score = std::abs(Y.col(j).normalized().dot(target));
    if (score > best_score + 1e-12) {
      best_score = score;
      best = static_cast<int>(j);
    }
  }
  return best;
}

EstimateReport estimate_conditional(const StableVectorModel& model, const Region& region, double h, std::size_t n,
                                    std::uint64_t seed, const ConditionalOptions& options) {
  check_scale(h);
  if (model.dim() != region.dim()) throw DomainError("model and region dimensions differ");
  if (!region.capabilities().line_clip)
    throw CapabilityError("conditional estimation needs line clipping for region " + region.describe());
  const int batches = options.batches;
  if (batches < 2) throw DomainError("conditional estimation needs at least two batches");
  if (n < static_cast<std::size_t>(batches)) throw DomainError("sample size smaller than the batch count");
  const Matrix Y = model_columns(model);
  const int m = static_cast<int>(Y.cols());
  const bool partition = options.smoothing == ConditionalOptions::Smoothing::max_partition;
  int j0 = options.smoothing_index;
  if (!partition) {
    if (j0 < 0) j0 = default_smoothing_index(model, region);
    if (j0 >= m) throw DomainError("smoothing index out of range");
    if (Y.col(j0).norm() == 0.0) throw DegenerateDirectionError("smoothing column is zero");
  }
  const StableLaw& law = stable_law(model.alpha());
  const CompiledRegion cr(scale(region, h), RegionVariant::interior());
  std::vector<double> weights(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) weights[static_cast<std::size_t>(j)] = Y.col(j).norm();
  const std::size_t per_batch = n / static_cast<std::size_t>(batches);
  const bool lhs = options.sampling == ConditionalOptions::Sampling::stratified;

  std::vector<double> means(static_cast<std::size_t>(batches), 0.0);
  detail::parallel_for(static_cast<std::size_t>(batches), options.workers, [&](std::size_t b) {
    RandomStream rng(seed, b);
    std::vector<std::vector<std::uint32_t>> perms;
    if (lhs) {
      perms.resize(static_cast<std::size_t>(m));
      for (auto& p : perms) {
        p.resize(per_batch);
        std::iota(p.begin(), p.end(), 0u);
        std::shuffle(p.begin(), p.end(), rng.engine());
      }
    }
    std::vector<double> s(static_cast<std::size_t>(m));
    double acc = 0.0;
    for (std::size_t r = 0; r < per_batch; ++r) {
      double weight = 1.0;
      for (int i = 0; i < m; ++i) {
        if (!partition && i == j0) {
          s[static_cast<std::size_t>(i)] = 0.0;
          continue;
        }
        if (lhs) {
          const double v = (perms[static_cast<std::size_t>(i)][r] + rng.uniform()) / static_cast<double>(per_batch);
          const double w = std::min(v, 1.0 - v);
          const double q = warp_tail(w);
          const double x = q > 0.0 ? law.tail_quantile(std::min(q, 0.5)) : std::numeric_limits<double>::infinity();
          s[static_cast<std::size_t>(i)] = v < 0.5 ? -x : x;
          weight *= 1.0 - std::cos(2.0 * kPi * w);
        } else {
          s[static_cast<std::size_t>(i)] = law.sample(rng);
        }
      }
      if (weight == 0.0 || !std::isfinite(weight)) continue;
      for (double v : s)
        if (!std::isfinite(v)) weight = 0.0;
      if (weight == 0.0) continue;
      if (!partition) {
        Vector p = Vector::Zero(Y.rows());
        for (int i = 0; i < m; ++i)
          if (i != j0) p += s[static_cast<std::size_t>(i)] * Y.col(i);
        acc += weight * clip_probability(law, cr.line_clip(p, Y.col(j0)), 0.0);
        continue;
      }
      Vector full = Vector::Zero(Y.rows());
      for (int i = 0; i < m; ++i) full += s[static_cast<std::size_t>(i)] * Y.col(i);
      for (int j = 0; j < m; ++j) {
        const double wj = weights[static_cast<std::size_t>(j)];
        if (wj == 0.0) continue;
        double maxother = 0.0;
        for (int i = 0; i < m; ++i)
          if (i != j) maxother = std::max(maxother, std::abs(s[static_cast<std::size_t>(i)]) * weights[static_cast<std::size_t>(i)]);
        const Vector p = full - s[static_cast<std::size_t>(j)] * Y.col(j);
        acc += weight * clip_probability(law, cr.line_clip(p, Y.col(j)), maxother / wj);
      }
    }
    means[b] = acc / static_cast<double>(per_batch);
  });
  const double nb = static_cast<double>(batches);
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / nb;
  double var = 0.0;
  for (double v : means) var += (v - mean) * (v - mean);
  EstimateReport r;
  r.h = h;
  r.n = per_batch * static_cast<std::size_t>(batches);
  r.seed = seed;
  r.method = EstimateMethod::conditional;
  r.p_hat = std::clamp(mean, 0.0, 1.0);
  r.std_error = std::sqrt(var / (nb - 1.0) / nb);
  r.ci_lo = std::max(0.0, r.p_hat - kZ * r.std_error);
  r.ci_hi = std::min(1.0, r.p_hat + kZ * r.std_error);
  return r;
}

SlopeFit slope_fit(const std::vector<EstimateReport>& reports, bool with_log_model) {
  if (reports.size() < 3) throw InsufficientDataError("slope_fit needs at least three grid points");
  const auto npts = static_cast<Eigen::Index>(reports.size());
  Vector x(npts), y(npts), w(npts);
  bool weighted = true;
  SlopeFit fit;
  for (Eigen::Index i = 0; i < npts; ++i) {
    const auto& r = reports[static_cast<std::size_t>(i)];
    if (!(r.p_hat > 0.0) || !(r.ci_lo > 0.0))
      throw InsufficientDataError("slope_fit needs every confidence interval to exclude zero");
    if (!(r.h > 1.0)) throw InsufficientDataError("slope_fit needs grid points h > 1");
    x[i] = std::log(r.h);
    y[i] = std::log(r.p_hat);
    const double sd = r.std_error / r.p_hat;
    if (!(sd > 0.0)) weighted = false;
    w[i] = sd > 0.0 ? 1.0 / (sd * sd) : 1.0;
    fit.h_grid.push_back(r.h);
  }
  if (!weighted) w.setOnes();

  auto solve = [&](const Matrix& X, Vector& beta, Matrix& cov) {
    const Matrix XtW = X.transpose() * w.asDiagonal();
    const Matrix A = XtW * X;
    beta = A.ldlt().solve(XtW * y);
    cov = A.inverse();
    if (!weighted) {
      const Vector res = y - X * beta;
      const double dof = static_cast<double>(X.rows() - X.cols());
      cov *= dof > 0.0 ? res.squaredNorm() / dof : 0.0;
    }
  };

  Matrix X(npts, 2);
  X.col(0).setOnes();
  X.col(1) = x;
  Vector beta;
  Matrix cov;
  solve(X, beta, cov);
  fit.slope = beta[1];
  fit.slope_se = std::sqrt(std::max(cov(1, 1), 0.0));

  if (with_log_model) {
    Matrix X3(npts, 3);
    X3.col(0).setOnes();
    X3.col(1) = x;
    X3.col(2) = x.array().log();
    Vector b3;
    Matrix c3;
    solve(X3, b3, c3);
    fit.log_model = true;
    fit.base_slope = b3[1];
    fit.base_slope_se = std::sqrt(std::max(c3(1, 1), 0.0));
    fit.log_coefficient = b3[2];
    fit.log_coefficient_se = std::sqrt(std::max(c3(2, 2), 0.0));
    fit.log_significant = std::abs(fit.log_coefficient) > 2.0 * fit.log_coefficient_se;
  }
  return fit;
}

std::vector<EstimateReport> normalized_limit_probe(const StableVectorModel& model, const Region& region, int k,
                                                   const std::vector<double>& h_grid, std::size_t n,
                                                   std::uint64_t seed, const ProbeOptions& options) {
  if (k < 1) throw DomainError("order k must be at least 1");
  std::vector<EstimateReport> rows;
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    const double h = h_grid[i];
    EstimateReport r;
    if (options.method == EstimateMethod::crude) {
      r = estimate_crude(model, region, h, n, seed + i, options.workers);
    } else {
      ConditionalOptions co = options.conditional;
      co.workers = options.workers;
      r = estimate_conditional(model, region, h, n, seed + i, co);
    }
    r.normalized = std::pow(h, k * model.alpha()) * r.p_hat;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace stabletail
