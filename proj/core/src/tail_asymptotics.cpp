#include "stabletail/tail_asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/random/sobol.hpp>

#include "parallel.hpp"
#include "stabletail/errors.hpp"
#include "stabletail/linear_program.hpp"
#include "stabletail/random.hpp"
#include "stabletail/stable_univariate.hpp"

namespace stabletail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr double kInteriorSlack = 1e-6;
constexpr double kClosureSlack = 1e-9;

struct Divergent {};

struct PolyPiece {
  Matrix A;  // rows a_i / |a_i|
  Vector b;  // a_i . x >= b_i
};

std::vector<PolyPiece> polyhedral_pieces(const CompiledRegion& cr) {
  std::vector<PolyPiece> out;
  for (const auto& piece : cr.pieces()) {
    PolyPiece pp;
    pp.A.resize(static_cast<Eigen::Index>(piece.size()), cr.dim());
    pp.b.resize(static_cast<Eigen::Index>(piece.size()));
    for (std::size_t r = 0; r < piece.size(); ++r) {
      const double na = piece[r].a.norm();
      pp.A.row(static_cast<Eigen::Index>(r)) = piece[r].a.transpose() / na;
      pp.b[static_cast<Eigen::Index>(r)] = piece[r].b / na;
    }
    out.push_back(std::move(pp));
  }
  return out;
}

// Largest tau with A Y s >= b + tau (tau capped at 1); nullopt when infeasible.
std::optional<std::pair<double, Vector>> reach_lp(const PolyPiece& piece, const Matrix& Y) {
  const auto r = piece.A.rows();
  const auto j = Y.cols();
  Matrix G = Matrix::Zero(r + 1, j + 1);
  Vector h(r + 1);
  G.topLeftCorner(r, j) = -(piece.A * Y);
  G.col(j).head(r).setOnes();
  h.head(r) = -piece.b;
  G(r, j) = 1.0;
  h[r] = 1.0;
  Vector c = Vector::Zero(j + 1);
  c[j] = 1.0;
  const auto res = solve_lp(G, h, c, std::vector<bool>(static_cast<std::size_t>(j + 1), true));
  if (res.status != LpResult::Status::optimal) return std::nullopt;
  return std::make_pair(res.x[j], Vector(res.x.head(j)));
}

void for_each_subset(int m, int k, const std::function<bool(const std::vector<int>&)>& fn) {
  if (k > m || k < 1) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    if (fn(idx)) return;
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int t = i + 1; t < k; ++t) idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
  }
}

std::vector<std::vector<int>> all_subsets(int m, int k) {
  std::vector<std::vector<int>> out;
  for_each_subset(m, k, [&](const std::vector<int>& s) {
    out.push_back(s);
    return false;
  });
  return out;
}

Matrix select_columns(const Matrix& Y, const std::vector<int>& subset) {
  Matrix out(Y.rows(), static_cast<Eigen::Index>(subset.size()));
  for (std::size_t i = 0; i < subset.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = Y.col(subset[i]);
  return out;
}

double interval_representative(const Interval& iv) {
  if (std::isfinite(iv.lo) && std::isfinite(iv.hi)) return 0.5 * (iv.lo + iv.hi);
  if (std::isfinite(iv.lo)) return iv.lo + std::max(1.0, std::abs(iv.lo));
  if (std::isfinite(iv.hi)) return iv.hi - std::max(1.0, std::abs(iv.hi));
  return 1.0;
}

Witness make_witness(const Matrix& Y, const std::vector<int>& subset, const Vector& s) {
  Witness w;
  w.columns = subset;
  w.coefficients.assign(s.data(), s.data() + s.size());
  w.point = select_columns(Y, subset) * s;
  return w;
}

double safe_gap(const Region& region) {
  try {
    return origin_gap(region);
  } catch (const CapabilityError&) {
    const Vector zero = Vector::Zero(region.dim());
    return contains(region, zero, RegionVariant::closure()) ? 0.0 : 1.0;
  }
}

// Integral of alpha |s|^{-1-alpha} over (a, b).
double radial_mass(double a, double b, double alpha) {
  if (a < 0.0 && b > 0.0) throw Divergent{};
  if (a >= 0.0) {
    if (a == 0.0) throw Divergent{};
    return std::pow(a, -alpha) - (std::isfinite(b) ? std::pow(b, -alpha) : 0.0);
  }
  if (b == 0.0) throw Divergent{};
  return std::pow(-b, -alpha) - (std::isfinite(a) ? std::pow(-a, -alpha) : 0.0);
}

double clip_mass(const CompiledRegion& cr, const Vector& p, const Vector& d, double alpha) {
  double total = 0.0;
  for (const auto& iv : cr.line_clip(p, d)) total += radial_mass(iv.lo, iv.hi, alpha);
  return total;
}

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

void quadratic_roots(double a, double b, double c, std::vector<double>& out) {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0.0) return;
  if (std::abs(a) <= 1e-14 * scale) {
    if (std::abs(b) > 1e-14 * scale) out.push_back(-c / b);
    return;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < -1e-14 * b * b) return;
  const double sq = std::sqrt(std::max(disc, 0.0));
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  if (q != 0.0) {
    out.push_back(q / a);
    out.push_back(c / q);
  } else {
    out.push_back(0.0);
  }
}

// Values of the outer coefficient s1 at which the structure of the inner clip along y2 changes.
std::vector<double> pair_events(const CompiledRegion& cr, const Vector& y1, const Vector& y2) {
  struct Line {
    double al, be, b;
  };
  struct Conic {
    double A11, A12, A22, B1, B2, C0;
  };
  std::vector<Line> lines;
  std::vector<Conic> conics;
  std::vector<double> ev;
  for (const auto& piece : cr.pieces()) {
    for (const auto& p : piece) {
      if (p.kind == Primitive::Kind::halfspace) {
        lines.push_back({p.a.dot(y1), p.a.dot(y2), p.b});
      } else if (p.kind != Primitive::Kind::power) {
        conics.push_back({y1.dot(y1), y1.dot(y2), y2.dot(y2), -p.center.dot(y1), -p.center.dot(y2),
                          p.center.squaredNorm() - p.radius * p.radius});
      }
    }
  }
  for (const auto& l : lines)
    if (l.al != 0.0) ev.push_back(l.b / l.al);
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto& u = lines[i];
      const auto& v = lines[j];
      if (u.be == 0.0 || v.be == 0.0) continue;
      const double det = u.al * v.be - v.al * u.be;
      const double scale = std::abs(u.al * v.be) + std::abs(v.al * u.be);
      if (std::abs(det) <= 1e-13 * scale) continue;
      ev.push_back((u.b * v.be - v.b * u.be) / det);
    }
  for (const auto& q : conics) {
    quadratic_roots(q.A11, 2.0 * q.B1, q.C0, ev);
    quadratic_roots(q.A12 * q.A12 - q.A22 * q.A11, 2.0 * (q.A12 * q.B2 - q.A22 * q.B1), q.B2 * q.B2 - q.A22 * q.C0,
                    ev);
    for (const auto& l : lines) {
      if (l.be == 0.0) continue;
      const double m = -l.al / l.be, c = l.b / l.be;
      quadratic_roots(q.A11 + 2.0 * q.A12 * m + q.A22 * m * m,
                      2.0 * (q.A12 * c + q.A22 * m * c + q.B1 + q.B2 * m), q.A22 * c * c + 2.0 * q.B2 * c + q.C0,
                      ev);
    }
  }
  std::vector<double> out;
  for (double e : ev)
    if (std::isfinite(e) && e != 0.0) out.push_back(e);
  return out;
}

class OuterIntegrator {
 public:
  OuterIntegrator(std::function<double(double)> f, double tol) : f_(std::move(f)), tol_(tol) {}

  // Integral over [a, b]; power-law endpoint singularities are removed by a substitution
  // d = u^gamma on the adjacent half and the last eta of width is integrated analytically.
  Integral segment(double a, double b) const {
    Integral out;
    const double len = b - a;
    if (!(len > 0.0)) return out;
    const double eta = std::max(1e-10 * len, 1e-14 * std::max(std::abs(a), std::abs(b)));
    if (len <= 4.0 * eta) return out;
    const auto left = end_behaviour(a, +1.0, eta);
    const auto right = end_behaviour(b, -1.0, eta);
    add(out, half(a, +1.0, 0.5 * len, eta, left));
    add(out, half(b, -1.0, 0.5 * len, eta, right));
    return out;
  }

  // Integral over [a, inf).
  Integral tail(double a) const {
    Integral out;
    bool any = false;
    for (int j = -3; j <= 14 && !any; ++j) any = f_(a * (1.0 + std::pow(10.0, j))) != 0.0;
    if (!any) return out;
    const double fa = f_(a * 1e8), fb = f_(a * 1e11);
    if (fb > 0.0) {
      const double q = fa > 0.0 ? std::log(fa / fb) / std::log(1e3) : 0.0;
      if (q <= 1.001) throw Divergent{};
    }
    add(out, segment(a, 2.0 * a));
    boost::math::quadrature::exp_sinh<double> es(12);
    double err = 0.0;
    out.value += es.integrate(f_, 2.0 * a, kInf, tol_, &err);
    out.error += err;
    return out;
  }

 private:
  struct End {
    double piece = 0.0;  // integral over the eta-neighbourhood of the endpoint
    double p = 0.0;      // local exponent of F ~ d^{-p}
  };

  static void add(Integral& out, const Integral& part) {
    out.value += part.value;
    out.error += part.error;
  }

  End end_behaviour(double e, double dir, double eta) const {
    End out;
    const double f1 = f_(e + dir * eta);
    if (!(f1 > 0.0)) return out;
    const double f10 = f_(e + dir * 10.0 * eta);
    double p = f10 > 0.0 ? std::log(f1 / f10) / std::log(10.0) : 0.0;
    if (p > 0.999) throw Divergent{};
    out.p = p > 0.02 ? p : 0.0;
    out.piece = f1 * eta / (1.0 - out.p);
    return out;
  }

  // Integral of F(e + dir d) over d in [eta, width] plus the analytic eta-piece.
  Integral half(double e, double dir, double width, double eta, const End& end) const {
    Integral out;
    double err = 0.0;
    boost::math::quadrature::tanh_sinh<double> ts(12);
    if (end.p == 0.0) {
      auto g = [&](double d) { return f_(e + dir * d); };
      out.value = ts.integrate(g, eta, width, tol_, &err);
    } else {
      const double gamma = 1.0 / (1.0 - end.p);
      auto g = [&](double u) {
        const double d = std::pow(u, gamma);
        return f_(e + dir * d) * gamma * std::pow(u, gamma - 1.0);
      };
      out.value = ts.integrate(g, std::pow(eta, 1.0 / gamma), std::pow(width, 1.0 / gamma), tol_, &err);
    }
    out.value += end.piece;
    out.error = err + 1e-6 * std::abs(end.piece);
    return out;
  }

  std::function<double(double)> f_;
  double tol_;
};

std::vector<double> floors_for(const StableVectorModel& model, const std::vector<int>& subset,
                               const Region& region, RegionVariant variant, bool* feasible) {
  const auto cf = coordinate_floors(model, subset, region, variant);
  *feasible = cf.feasible;
  return cf.floors;
}

Integral order_one_cell(const CompiledRegion& cr, const Vector& y, double alpha) {
  return {clip_mass(cr, Vector::Zero(y.size()), y, alpha), 0.0};
}

Integral order_two_cell(const CompiledRegion& cr, Vector y1, Vector y2, double alpha, double outer_floor,
                        double tol) {
  const auto events = pair_events(cr, y1, y2);
  Integral total;
  for (double sign : {1.0, -1.0}) {
    auto F = [&, sign](double t) -> double {
      if (!(t > 0.0)) return 0.0;
      const double s1 = sign * std::pow(t, -1.0 / alpha);
      if (!std::isfinite(s1)) return 0.0;
      return clip_mass(cr, s1 * y1, y2, alpha);
    };
    const double cap = outer_floor > 0.0 ? std::pow(outer_floor, -alpha) : kInf;
    std::vector<double> bps;
    for (double e : events)
      if ((e > 0.0) == (sign > 0.0)) {
        const double t = std::pow(std::abs(e), -alpha);
        if (t > 0.0 && t < cap && std::isfinite(t)) bps.push_back(t);
      }
    std::sort(bps.begin(), bps.end());
    std::vector<double> pts{0.0};
    for (double t : bps)
      if (t > pts.back() * (1.0 + 1e-8) + 1e-300) pts.push_back(t);
    OuterIntegrator integ(F, tol);
    if (std::isfinite(cap)) {
      if (pts.size() == 1 || pts.back() < cap * (1.0 - 1e-8)) pts.push_back(cap);
    } else if (pts.size() == 1) {
      pts.push_back(1.0);
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const auto seg = integ.segment(pts[i], pts[i + 1]);
      total.value += seg.value;
      total.error += seg.error;
    }
    if (!std::isfinite(cap)) {
      const auto seg = integ.tail(pts.back());
      total.value += seg.value;
      total.error += seg.error;
    }
  }
  return total;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Integral qmc_cell(const CompiledRegion& cr, const Matrix& Yj, int inner, const std::vector<double>& signs,
                  const std::vector<double>& caps, double alpha, const QuadratureOptions& opt, std::uint64_t key) {
  const int k = static_cast<int>(Yj.cols());
  const int d = k - 1;
  std::vector<int> outer;
  for (int i = 0; i < k; ++i)
    if (i != inner) outer.push_back(i);
  std::vector<double> reps;
  for (int r = 0; r < opt.replicates; ++r) {
    RandomStream rng(opt.seed, mix(key * 1315423911ULL + static_cast<std::uint64_t>(r)));
    std::vector<std::uint64_t> shift(static_cast<std::size_t>(d));
    for (auto& s : shift) s = rng.bits();
    boost::random::sobol gen(static_cast<std::size_t>(d));
    double acc = 0.0;
    for (std::size_t i = 0; i < opt.qmc_points; ++i) {
      Vector p = Vector::Zero(Yj.rows());
      double jac = 1.0;
      for (int c = 0; c < d; ++c) {
        const std::uint64_t x = static_cast<std::uint64_t>(gen()) ^ shift[static_cast<std::size_t>(c)];
        const double u = (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
        const int col = outer[static_cast<std::size_t>(c)];
        double t;
        if (std::isfinite(caps[static_cast<std::size_t>(col)])) {
          t = u * caps[static_cast<std::size_t>(col)];
          jac *= caps[static_cast<std::size_t>(col)];
        } else {
          t = u / (1.0 - u);
          jac /= (1.0 - u) * (1.0 - u);
        }
        p += signs[static_cast<std::size_t>(c)] * std::pow(t, -1.0 / alpha) * Yj.col(col);
      }
      acc += jac * clip_mass(cr, p, Yj.col(inner), alpha);
    }
    reps.push_back(acc / static_cast<double>(opt.qmc_points));
  }
  const double mean = std::accumulate(reps.begin(), reps.end(), 0.0) / static_cast<double>(reps.size());
  double var = 0.0;
  for (double v : reps) var += (v - mean) * (v - mean);
  const double se = reps.size() > 1 ? std::sqrt(var / static_cast<double>(reps.size() - 1) / static_cast<double>(reps.size())) : 0.0;
  return {mean, se};
}

Region variant_region(const Region& region, RegionVariant variant) {
  if (variant.tag == VariantTag::dilated) return dilate(region, variant.delta).region;
  if (variant.tag == VariantTag::eroded) return erode(region, variant.delta).region;
  return region;
}

LValue infinite_value(TailOrder witness, std::string note) {
  LValue v;
  v.status = LValue::Status::infinite;
  v.value = kInf;
  v.error = 0.0;
  v.divergence_witness = std::move(witness);
  v.note = std::move(note);
  return v;
}

}  // namespace

Matrix model_columns(const StableVectorModel& model) { return to_matrix(model).columns; }

TailOrder min_hits(const StableVectorModel& model, const Region& region, RegionVariant variant, int candidate_k,
                   std::uint64_t seed) {
  if (variant.tag != VariantTag::interior && variant.tag != VariantTag::closure)
    throw DomainError("min_hits accepts the interior or closure variant");
  const Matrix Y = model_columns(model);
  if (Y.rows() != region.dim()) throw DomainError("model and region dimensions differ");
  const int m = static_cast<int>(Y.cols());
  const bool interior = variant.tag == VariantTag::interior;
  const auto caps = region.capabilities();

  if (caps.lp_feasible) {
    const auto pieces = polyhedral_pieces(CompiledRegion(region, RegionVariant::interior()));
    const double need = interior ? kInteriorSlack : -kClosureSlack;
    for (int j = 1; j <= m; ++j) {
      std::optional<TailOrder> found;
      for_each_subset(m, j, [&](const std::vector<int>& subset) {
        const Matrix Yj = select_columns(Y, subset);
        for (const auto& piece : pieces) {
          const auto sol = reach_lp(piece, Yj);
          if (!sol || sol->first < need) continue;
          TailOrder t;
          t.k = j;
          t.witness = make_witness(Y, subset, sol->second);
          t.verified = true;
          found = t;
          return true;
        }
        return false;
      });
      if (found) return *found;
    }
    throw DomainError("region is not reachable by any subset of spectral directions");
  }

  if (!caps.line_clip)
    throw CapabilityError("min_hits needs line clipping for region " + region.describe());
  const CompiledRegion cr(region, variant);
  for (int j = 0; j < m; ++j) {
    const auto clip = cr.line_clip(Vector::Zero(region.dim()), Y.col(j));
    if (clip.empty()) continue;
    TailOrder t;
    t.k = 1;
    Vector s(1);
    s[0] = interval_representative(clip.front());
    t.witness = make_witness(Y, {j}, s);
    return t;
  }
  const int limit = candidate_k > 0 ? std::min(candidate_k - 1, m) : m;
  const double scale = std::max(safe_gap(region), 1e-3);
  for (int j = 2; j <= limit; ++j) {
    RandomStream rng(seed, static_cast<std::uint64_t>(j));
    std::optional<TailOrder> found;
    for_each_subset(m, j, [&](const std::vector<int>& subset) {
      const Matrix Yj = select_columns(Y, subset);
      Vector s(j);
      for (int trial = 0; trial < 20000; ++trial) {
        for (int i = 0; i < j; ++i)
          s[i] = rng.sign() * scale * std::exp(2.0 * rng.normal()) / Yj.col(i).norm();
        if (cr.contains(Yj * s)) {
          TailOrder t;
          t.k = j;
          t.witness = make_witness(Y, subset, s);
          t.verified = false;
          found = t;
          return true;
        }
      }
      return false;
    });
    if (found) return *found;
  }
  if (candidate_k > 0) {
    TailOrder t;
    t.k = candidate_k;
    t.verified = false;
    return t;
  }
  throw DomainError("no reachability witness found for region " + region.describe());
}

CoordinateFloors coordinate_floors(const StableVectorModel& model, const std::vector<int>& subset,
                                   const Region& region, RegionVariant variant) {
  if (!region.capabilities().lp_feasible)
    throw CapabilityError("coordinate_floors needs an LP-capable region, got " + region.describe());
  const Matrix Y = model_columns(model);
  for (int i : subset)
    if (i < 0 || i >= Y.cols()) throw DomainError("subset index out of range");
  const Matrix Yj = select_columns(Y, subset);
  const auto pieces = polyhedral_pieces(CompiledRegion(region, variant));
  const auto j = static_cast<Eigen::Index>(subset.size());
  CoordinateFloors out;
  out.subset = subset;
  out.floors.assign(subset.size(), kInf);
  for (const auto& piece : pieces) {
    const auto r = piece.A.rows();
    for (Eigen::Index i = 0; i < j; ++i) {
      for (double sign : {1.0, -1.0}) {
        Matrix G = Matrix::Zero(r + 1, j);
        Vector h(r + 1);
        G.topRows(r) = -(piece.A * Yj);
        h.head(r) = -piece.b.array() + kClosureSlack;
        G(r, i) = -sign;
        h[r] = 0.0;
        Vector c = Vector::Zero(j);
        c[i] = -sign;
        const auto res = solve_lp(G, h, c, std::vector<bool>(static_cast<std::size_t>(j), true));
        if (res.status != LpResult::Status::optimal) continue;
        out.feasible = true;
        double v = std::abs(res.x[i]);
        if (v < 1e-9) v = 0.0;
        auto& f = out.floors[static_cast<std::size_t>(i)];
        f = std::min(f, v);
      }
    }
  }
  if (!out.feasible) out.floors.clear();
  return out;
}

LValue L_quadrature(const StableVectorModel& model, const Region& region, int k, RegionVariant variant,
                    const QuadratureOptions& options) {
  if (k < 1) throw DomainError("order k must be at least 1");
  const Matrix Y = model_columns(model);
  if (Y.rows() != region.dim()) throw DomainError("model and region dimensions differ");
  const int m = static_cast<int>(Y.cols());
  const double alpha = model.alpha();
  if (!region.capabilities().line_clip)
    throw CapabilityError("L_quadrature needs line clipping for region " + region.describe());
  const Region rv = variant_region(region, variant);
  if (!(safe_gap(rv) > 0.0)) throw DomainError("L_quadrature requires the origin to lie outside the region closure");
  if (k > m) {
    LValue v;
    v.note = "order exceeds the number of spectral directions";
    return v;
  }
  if (k >= 2) {
    const auto low = min_hits(model, rv, RegionVariant::interior(), k, options.seed);
    if (low.k < k) return infinite_value(low, "region interior reachable with fewer directions");
  }

  const CompiledRegion cr(region, variant);
  const bool lp = rv.capabilities().lp_feasible;
  const auto subsets = all_subsets(m, k);
  struct CellResult {
    Integral integral;
    bool divergent = false;
  };
  std::vector<CellResult> cells(subsets.size());
  detail::parallel_for(subsets.size(), options.workers, [&](std::size_t ci) {
    const auto& subset = subsets[ci];
    std::vector<double> floors(subset.size(), 0.0);
    if (lp) {
      bool feasible = false;
      floors = floors_for(model, subset, region, variant, &feasible);
      if (!feasible) return;
    }
    try {
      if (k == 1) {
        cells[ci].integral = order_one_cell(cr, Y.col(subset[0]), alpha);
      } else if (k == 2) {
        int outer = 0, inner = 1;
        if (floors[1] > 0.0 && floors[0] == 0.0) std::swap(outer, inner);
        cells[ci].integral = order_two_cell(cr, Y.col(subset[static_cast<std::size_t>(outer)]),
                                            Y.col(subset[static_cast<std::size_t>(inner)]), alpha,
                                            floors[static_cast<std::size_t>(outer)], 1e-10);
      } else {
        const Matrix Yj = select_columns(Y, subset);
        int inner = k - 1;
        for (int i = 0; i < k; ++i)
          if (floors[static_cast<std::size_t>(i)] == 0.0) inner = i;
        std::vector<double> caps(static_cast<std::size_t>(k), kInf);
        for (int i = 0; i < k; ++i)
          if (floors[static_cast<std::size_t>(i)] > 0.0)
            caps[static_cast<std::size_t>(i)] = std::pow(floors[static_cast<std::size_t>(i)], -alpha);
        const int patterns = 1 << (k - 1);
        for (int pat = 0; pat < patterns; ++pat) {
          std::vector<double> signs(static_cast<std::size_t>(k - 1));
          for (int b = 0; b < k - 1; ++b) signs[static_cast<std::size_t>(b)] = (pat >> b) & 1 ? -1.0 : 1.0;
          const auto part = qmc_cell(cr, Yj, inner, signs, caps, alpha, options,
                                     static_cast<std::uint64_t>(ci) * 4096u + static_cast<std::uint64_t>(pat));
          cells[ci].integral.value += part.value;
          cells[ci].integral.error = std::hypot(cells[ci].integral.error, part.error);
        }
      }
    } catch (const Divergent&) {
      cells[ci].divergent = true;
    }
  });

  const double factor = std::pow(c_alpha(alpha) / 2.0, k);
  LValue out;
  for (const auto& c : cells) {
    if (c.divergent) {
      const auto low = min_hits(model, rv, RegionVariant::closure(), k, options.seed);
      if (low.k >= k) throw AccuracyError("divergent integrand detected without a lower-order witness");
      return infinite_value(low, "non-integrable singularity at a lower-order reachable point");
    }
    out.value += factor * c.integral.value;
    out.error += factor * c.integral.error;
  }
  if (out.error > options.tolerance * std::abs(out.value) + 1e-12)
    throw AccuracyError("L_quadrature error estimate " + std::to_string(out.error) + " exceeds tolerance for value " +
                        std::to_string(out.value));
  return out;
}

MonteCarloL L_montecarlo(const StableVectorModel& model, const Region& region, int k, RegionVariant variant,
                         const MonteCarloLOptions& options) {
  if (k < 1) throw DomainError("order k must be at least 1");
  if (model.dim() != region.dim()) throw DomainError("model and region dimensions differ");
  const double gap = safe_gap(variant_region(region, variant));
  if (!(gap > 0.0)) throw DomainError("L_montecarlo requires the origin to lie outside the region closure");
  if (options.n < 32) throw DomainError("L_montecarlo needs at least 32 samples per level");
  const double alpha = model.alpha();
  const LePageSampler sampler(model);
  const CompiledRegion cr(region, variant);
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;
  const double base = std::pow(c_alpha(alpha) * model.measure().total_mass(), k) / kfact;
  constexpr int kBatches = 32;
  const std::size_t per_batch = options.n / kBatches;

  MonteCarloL out;
  const int levels = options.s_min > 0.0 ? 1 : std::max(2, options.max_levels);
  const double s0 = options.s_min > 0.0 ? options.s_min : gap / k;
  out.stabilized = options.s_min > 0.0;
  for (int level = 0; level < levels; ++level) {
    const double s_min = s0 * std::pow(0.25, level);
    std::vector<double> means(kBatches, 0.0);
    detail::parallel_for(kBatches, options.workers, [&](std::size_t b) {
      RandomStream rng(options.seed, static_cast<std::uint64_t>(level) * 1024u + b);
      std::size_t hits = 0;
      Vector x(model.dim());
      for (std::size_t i = 0; i < per_batch; ++i) {
        x.setZero();
        for (int j = 0; j < k; ++j) x += s_min * std::pow(rng.uniform(), -1.0 / alpha) * sampler.draw_direction(rng);
        hits += cr.contains(x);
      }
      means[b] = static_cast<double>(hits) / static_cast<double>(per_batch);
    });
    const double factor = base * std::pow(s_min, -k * alpha);
    const double mean = std::accumulate(means.begin(), means.end(), 0.0) / kBatches;
    double var = 0.0;
    for (double v : means) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / (kBatches - 1) / kBatches);
    out.sweep.push_back({s_min, factor * mean, factor * se});
    const auto n = out.sweep.size();
    if (n >= 2) {
      const auto& a = out.sweep[n - 2];
      const auto& b = out.sweep[n - 1];
      if (std::abs(a.value - b.value) <= 2.0 * std::hypot(a.std_error, b.std_error)) {
        out.stabilized = true;
        break;
      }
    }
  }
  out.value.value = out.sweep.back().value;
  out.value.error = out.sweep.back().std_error;
  if (!out.stabilized && options.s_min <= 0.0)
    out.value.note = "truncation sweep did not stabilize; divergence suspected";
  return out;
}

TheoremBounds theorem_bounds(const StableVectorModel& model, const Region& region, int k,
                             const QuadratureOptions& options) {
  TheoremBounds out;
  out.lower = L_quadrature(model, region, k, RegionVariant::interior(), options);
  const auto closure_order = min_hits(model, region, RegionVariant::closure(), k, options.seed);
  if (closure_order.k < k) {
    out.upper = infinite_value(closure_order, "closure reachable with fewer directions; every dilation diverges");
    return out;
  }
  const double gap = origin_gap(region);
  const double delta0 = gap / 4.0;
  std::vector<std::vector<double>> table;
  double qerr = 0.0;
  for (int j = 0; j <= 6; ++j) {
    const double delta = delta0 * std::pow(0.5, j);
    const auto v = L_quadrature(model, region, k, RegionVariant::dilated(delta), options);
    if (!v.finite()) {
      out.upper = v;
      return out;
    }
    out.sweep.push_back({delta, v.value, v.error});
    qerr = std::max(qerr, v.error);
    std::vector<double> row{v.value};
    for (int l = 1; l <= j; ++l) {
      const double f = std::ldexp(1.0, l);
      row.push_back((f * row[static_cast<std::size_t>(l - 1)] - table.back()[static_cast<std::size_t>(l - 1)]) /
                    (f - 1.0));
    }
    table.push_back(std::move(row));
  }
  const double last = table.back().back();
  const double prev = table[table.size() - 2].back();
  const double diff = std::abs(last - prev);
  out.converged = diff < std::max(1e-3 * std::abs(last), 1e-6);
  out.upper.value = std::max(last, 0.0);
  out.upper.error = diff + 2.0 * qerr;
  if (!out.converged) out.upper.note = "dilation sweep did not converge";
  return out;
}

std::vector<std::string> closed_form_ids() {
  return {"ex1_i", "ex1_ii_cone", "ex1_iii", "ex2_lowalpha", "ex2_alpha1", "ex2_highalpha", "ex3_lowalpha",
          "remark4_order"};
}

ClosedForm closed_form_reference(const std::string& id, double alpha, const std::map<std::string, double>& params) {
  const double a = Alpha(alpha).value();
  const double c = c_alpha(a);
  auto param = [&](const std::string& name, double fallback) {
    const auto it = params.find(name);
    return it == params.end() ? fallback : it->second;
  };
  ClosedForm out;
  out.id = id;
  if (id == "ex1_i") {
    out.value = c * c / 4.0;
    out.formula = "C_alpha^2 / 4";
  } else if (id == "ex1_ii_cone") {
    const double lo = param("theta_lo", kPi / 8.0), hi = param("theta_hi", 3.0 * kPi / 8.0);
    if (!(0.0 < lo && lo < hi && hi < kPi / 2.0)) throw DomainError("cone arc must lie inside (0, pi/2)");
    boost::math::quadrature::tanh_sinh<double> ts;
    const double integral =
        ts.integrate([a](double th) { return std::pow(std::cos(th) * std::sin(th), -(1.0 + a)); }, lo, hi, 1e-13);
    out.value = c * c * a / 8.0 * integral;
    out.formula = "C_alpha^2 alpha / 8 * int_A (cos t sin t)^-(1+alpha) dt";
  } else if (id == "ex1_iii") {
    out.value = c / 4.0;
    out.formula = "C_alpha / 4 (bounds 0 and C_alpha / 2)";
  } else if (id == "ex2_lowalpha") {
    if (!(a < 1.0)) throw DomainError("ex2_lowalpha requires alpha < 1");
    out.value = c * c * a * std::tgamma(2.0 * a) * std::tgamma(1.0 - a) / (4.0 * std::tgamma(1.0 + a));
    out.formula = "C_alpha^2 alpha Gamma(2 alpha) Gamma(1 - alpha) / (4 Gamma(1 + alpha))";
  } else if (id == "ex2_alpha1") {
    const double c1 = c_alpha(1.0);
    out.value = c1 * c1 / 4.0;
    out.exponent = 2.0;
    out.log_correction = true;
    out.formula = "P ~ (C_1^2 / 4) log(h) / h^2";
  } else if (id == "ex2_highalpha") {
    if (!(a > 1.0)) throw DomainError("ex2_highalpha requires alpha > 1");
    out.value = c * a * abs_moment(a, 1.0) / 4.0;
    out.exponent = 1.0 + a;
    out.formula = "P ~ C_alpha alpha E|S| / 4 * h^-(1+alpha)";
  } else if (id == "ex3_lowalpha") {
    if (!(a < 1.0)) throw DomainError("ex3_lowalpha requires alpha < 1");
    const double mix_a = param("a", 0.5);
    if (!(mix_a > 0.0 && mix_a < 1.0)) throw DomainError("ex3_lowalpha requires 0 < a < 1");
    const double aa = std::pow(mix_a, a);
    const double beta = a * std::tgamma(2.0 * a) * std::tgamma(1.0 - a) / std::tgamma(1.0 + a);
    out.value = c * c / 4.0 * ((1.0 - aa) * (1.0 - aa) + aa * (1.0 - aa) * beta);
    out.formula = "C_alpha^2 / 4 * [(1 - a^alpha)^2 + a^alpha (1 - a^alpha) alpha B(2 alpha, 1 - alpha)]";
  } else if (id == "remark4_order") {
    const double sigma = param("sigma", 0.5);
    if (!(sigma > 0.0)) throw DomainError("remark4_order requires sigma > 0");
    out.is_order = true;
    if (a < sigma) {
      out.exponent = 2.0 * a;
    } else if (a == sigma) {
      out.exponent = 2.0 * a;
      out.log_correction = true;
    } else {
      out.exponent = a + sigma;
    }
    out.formula = "h^-(2 alpha) if alpha < sigma; h^-(2 alpha) log h if equal; h^-(alpha + sigma) otherwise";
  } else {
    throw DomainError("unknown closed-form id: " + id);
  }
  return out;
}

}  // namespace stabletail
