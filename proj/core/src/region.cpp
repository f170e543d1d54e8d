#include "stabletail/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "stabletail/errors.hpp"

namespace stabletail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using namespace region_node;

std::shared_ptr<const Region::Node> make_node(int dim, auto data) {
  auto node = std::make_shared<Region::Node>();
  node->dim = dim;
  node->data = std::move(data);
  return node;
}

void require_finite_vector(const Vector& v, const char* what) {
  if (v.size() == 0) throw DomainError(std::string(what) + " must be nonempty");
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) throw DomainError(std::string(what) + " must be finite");
}

Vector unit(int dim, int i) {
  Vector e = Vector::Zero(dim);
  e[i] = 1.0;
  return e;
}

Primitive halfspace_prim(const Vector& a, double b) {
  Primitive p;
  p.kind = Primitive::Kind::halfspace;
  p.a = a;
  p.b = b;
  return p;
}

Primitive sphere_prim(const Vector& c, double r, bool inside) {
  Primitive p;
  p.kind = inside ? Primitive::Kind::sphere_inside : Primitive::Kind::sphere_outside;
  p.center = c;
  p.radius = r;
  return p;
}

Primitive always_prim(int dim) { return halfspace_prim(Vector::Zero(dim), -1.0); }
Primitive never_prim(int dim) { return halfspace_prim(Vector::Zero(dim), 1.0); }

std::vector<Piece> product(const std::vector<Piece>& a, const std::vector<Piece>& b) {
  std::vector<Piece> out;
  out.reserve(a.size() * b.size());
  for (const auto& pa : a)
    for (const auto& pb : b) {
      Piece p = pa;
      p.insert(p.end(), pb.begin(), pb.end());
      out.push_back(std::move(p));
    }
  return out;
}

std::vector<Piece> box_pieces(const Vector& lo, const Vector& hi) {
  const int n = static_cast<int>(lo.size());
  Piece p;
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(lo[i])) p.push_back(halfspace_prim(unit(n, i), lo[i]));
    if (std::isfinite(hi[i])) p.push_back(halfspace_prim(-unit(n, i), -hi[i]));
    if (!(lo[i] < hi[i])) return {};
  }
  return {p};
}

std::vector<Piece> linf_outside_pieces(const Vector& c, double r) {
  const int n = static_cast<int>(c.size());
  std::vector<Piece> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({halfspace_prim(-unit(n, i), -(c[i] - r))});
    out.push_back({halfspace_prim(unit(n, i), c[i] + r)});
  }
  return out;
}

std::vector<Piece> ball_pieces(const Vector& c, double r, bool inside, BallNorm norm) {
  if (norm == BallNorm::l2) return {{sphere_prim(c, r, inside)}};
  if (inside) return box_pieces(c.array() - r, c.array() + r);
  return linf_outside_pieces(c, r);
}

std::vector<Piece> compile_node(const Region& region) {
  const auto& node = region.node();
  return std::visit(
      [&](const auto& d) -> std::vector<Piece> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Halfspace>) {
          return {{halfspace_prim(d.normal, d.offset)}};
        } else if constexpr (std::is_same_v<T, Box>) {
          return box_pieces(d.lo, d.hi);
        } else if constexpr (std::is_same_v<T, Ball>) {
          return ball_pieces(d.center, d.radius, d.inside, d.norm);
        } else if constexpr (std::is_same_v<T, ConeArc2D>) {
          Vector n_lo(2), n_hi(2);
          n_lo << -std::sin(d.theta_lo), std::cos(d.theta_lo);
          n_hi << std::sin(d.theta_hi), -std::cos(d.theta_hi);
          Primitive outside = sphere_prim(Vector::Zero(2), d.radius, false);
          if (d.theta_hi - d.theta_lo <= M_PI)
            return {{halfspace_prim(n_lo, 0.0), halfspace_prim(n_hi, 0.0), outside}};
          return {{halfspace_prim(n_lo, 0.0), outside}, {halfspace_prim(n_hi, 0.0), outside}};
        } else if constexpr (std::is_same_v<T, Power>) {
          Primitive pw;
          pw.kind = Primitive::Kind::power;
          pw.sigma = d.sigma;
          pw.scale = d.scale;
          return {{halfspace_prim(unit(2, 1), 0.0), halfspace_prim(unit(2, 0), d.scale), pw}};
        } else if constexpr (std::is_same_v<T, Union>) {
          std::vector<Piece> out;
          for (const auto& part : d.parts) {
            auto sub = compile_node(part);
            out.insert(out.end(), sub.begin(), sub.end());
          }
          return out;
        } else if constexpr (std::is_same_v<T, Intersection>) {
          std::vector<Piece> out{Piece{}};
          for (const auto& part : d.parts) out = product(out, compile_node(part));
          return out;
        } else {
          return product(compile_node(d.base), ball_pieces(d.center, d.radius, false, d.norm));
        }
      },
      node.data);
}

Primitive apply_variant(const Primitive& p, RegionVariant v) {
  Primitive q = p;
  q.strict = v.tag != VariantTag::closure;
  const double delta = (v.tag == VariantTag::dilated)  ? v.delta
                       : (v.tag == VariantTag::eroded) ? -v.delta
                                                       : 0.0;
  if (delta == 0.0) return q;
  const int dim = static_cast<int>(std::max(p.a.size(), p.center.size()));
  switch (p.kind) {
    case Primitive::Kind::halfspace:
      q.b = p.b - delta * p.a.norm();
      break;
    case Primitive::Kind::sphere_outside:
      q.radius = p.radius - delta;
      if (q.radius < 0.0) {
        Primitive a = always_prim(dim);
        a.strict = q.strict;
        return a;
      }
      break;
    case Primitive::Kind::sphere_inside:
      q.radius = p.radius + delta;
      if (q.radius <= 0.0) {
        Primitive a = never_prim(dim);
        a.strict = q.strict;
        return a;
      }
      break;
    case Primitive::Kind::power:
      throw CapabilityError("power_region does not support dilation or erosion");
  }
  return q;
}

bool prim_contains(const Primitive& p, const Vector& x) {
  switch (p.kind) {
    case Primitive::Kind::halfspace: {
      const double v = p.a.dot(x);
      return p.strict ? v > p.b : v >= p.b;
    }
    case Primitive::Kind::sphere_outside: {
      const double r2 = (x - p.center).squaredNorm();
      return p.strict ? r2 > p.radius * p.radius : r2 >= p.radius * p.radius;
    }
    case Primitive::Kind::sphere_inside: {
      const double r2 = (x - p.center).squaredNorm();
      return p.strict ? r2 < p.radius * p.radius : r2 <= p.radius * p.radius;
    }
    case Primitive::Kind::power: {
      const double x2 = x[1];
      if (p.strict ? !(x2 > 0.0) : !(x2 >= 0.0)) return false;
      const double bound = p.scale + std::pow(p.scale, 1.0 - p.sigma) * std::pow(x2, p.sigma);
      return p.strict ? x[0] < bound : x[0] <= bound;
    }
  }
  return false;
}

IntervalSet all_line() { return {{-kInf, kInf}}; }

double find_root(const auto& f, double lo, double hi) {
  boost::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

// {w > 0 : k w^sigma - c1 w + c2 > 0}
IntervalSet power_positive_set(double k, double sigma, double c1, double c2) {
  auto psi = [&](double w) { return k * std::pow(w, sigma) - c1 * w + c2; };
  auto grow = [&](double start, bool want_positive) {
    double hi = std::max(start, 1e-300);
    for (int i = 0; i < 2200; ++i) {
      if ((psi(hi) > 0.0) == want_positive) return hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) break;
    }
    return kInf;
  };
  if (sigma == 1.0) {
    const double m = k - c1;
    if (m > 0.0) return {{std::max(0.0, -c2 / m), kInf}};
    if (m < 0.0) {
      const double r = -c2 / m;
      return r > 0.0 ? IntervalSet{{0.0, r}} : IntervalSet{};
    }
    return c2 > 0.0 ? IntervalSet{{0.0, kInf}} : IntervalSet{};
  }
  if (c1 <= 0.0) {
    if (c2 >= 0.0) return {{0.0, kInf}};
    const double hi = grow(1.0, true);
    if (!std::isfinite(hi)) return {};
    return {{find_root(psi, 0.0, hi), kInf}};
  }
  if (sigma < 1.0) {
    const double wm = std::pow(sigma * k / c1, 1.0 / (1.0 - sigma));
    if (!(psi(wm) > 0.0)) return {};
    const double left = c2 >= 0.0 ? 0.0 : find_root(psi, 0.0, wm);
    const double hi = grow(2.0 * wm, false);
    const double right = std::isfinite(hi) ? find_root(psi, wm, hi) : kInf;
    return {{left, right}};
  }
  const double wm = std::pow(c1 / (sigma * k), 1.0 / (sigma - 1.0));
  if (psi(wm) >= 0.0) return {{0.0, kInf}};
  IntervalSet out;
  if (c2 > 0.0) out.push_back({0.0, find_root(psi, 0.0, wm)});
  const double hi = grow(2.0 * wm, true);
  if (std::isfinite(hi)) out.push_back({find_root(psi, wm, hi), kInf});
  return out;
}

IntervalSet prim_clip(const Primitive& p, const Vector& o, const Vector& d) {
  switch (p.kind) {
    case Primitive::Kind::halfspace: {
      const double ad = p.a.dot(d);
      const double r = p.b - p.a.dot(o);
      if (ad == 0.0) return (p.strict ? 0.0 > r : 0.0 >= r) ? all_line() : IntervalSet{};
      if (ad > 0.0) return {{r / ad, kInf}};
      return {{-kInf, r / ad}};
    }
    case Primitive::Kind::sphere_outside:
    case Primitive::Kind::sphere_inside: {
      const bool inside = p.kind == Primitive::Kind::sphere_inside;
      const Vector q = o - p.center;
      const double A = d.squaredNorm();
      const double B = d.dot(q);
      const double C = q.squaredNorm() - p.radius * p.radius;
      const double disc = B * B - A * C;
      if (A == 0.0) {
        const bool in = inside ? C < 0.0 : C > 0.0;
        return in ? all_line() : IntervalSet{};
      }
      if (!(disc > 0.0)) return inside ? IntervalSet{} : all_line();
      const double s = std::sqrt(disc);
      const double qq = B >= 0.0 ? -(B + s) : -(B - s);
      double t1 = qq / A;
      double t2 = qq != 0.0 ? C / qq : -t1;
      if (t1 > t2) std::swap(t1, t2);
      if (inside) return {{t1, t2}};
      return {{-kInf, t1}, {t2, kInf}};
    }
    case Primitive::Kind::power: {
      const double k = std::pow(p.scale, 1.0 - p.sigma);
      const double d1 = d[0], d2 = d[1], p1 = o[0], p2 = o[1];
      if (d2 == 0.0) {
        if (!(p2 > 0.0)) return {};
        const double bound = p.scale + k * std::pow(p2, p.sigma) - p1;
        if (d1 == 0.0) return bound > 0.0 ? all_line() : IntervalSet{};
        if (d1 > 0.0) return {{-kInf, bound / d1}};
        return {{bound / d1, kInf}};
      }
      const double c1 = d1 / d2;
      const double c0 = p1 - c1 * p2;
      const IntervalSet ws = power_positive_set(k, p.sigma, c1, p.scale - c0);
      IntervalSet out;
      auto to_t = [&](double w) { return std::isfinite(w) ? (w - p2) / d2 : (d2 > 0 ? kInf : -kInf); };
      for (const auto& iv : ws) {
        double a = to_t(iv.lo), b = to_t(iv.hi);
        if (a > b) std::swap(a, b);
        if (a < b) out.push_back({a, b});
      }
      std::sort(out.begin(), out.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
      return out;
    }
  }
  return {};
}

bool subtree_polyhedral(const Region& region) { return region.capabilities().lp_feasible; }

// Minimum Euclidean norm over {x : a_i . x >= b_i}; +inf when empty.
double polyhedral_min_norm(const Piece& piece, int dim) {
  std::vector<Vector> as;
  std::vector<double> bs;
  for (const auto& p : piece) {
    const double na = p.a.norm();
    if (na == 0.0) {
      if (p.b > 0.0) return kInf;
      continue;
    }
    as.push_back(p.a / na);
    bs.push_back(p.b / na);
  }
  const int m = static_cast<int>(as.size());
  auto feasible = [&](const Vector& x) {
    for (int i = 0; i < m; ++i)
      if (as[i].dot(x) < bs[i] - 1e-10 * (1.0 + std::abs(bs[i]))) return false;
    return true;
  };
  double best = kInf;
  const int kmax = std::min(dim, m);
  std::vector<int> idx;
  auto consider = [&]() {
    const int s = static_cast<int>(idx.size());
    Vector x = Vector::Zero(dim);
    if (s > 0) {
      Eigen::MatrixXd A(s, dim);
      Vector b(s);
      for (int r = 0; r < s; ++r) {
        A.row(r) = as[idx[r]].transpose();
        b[r] = bs[idx[r]];
      }
      Eigen::MatrixXd G = A * A.transpose();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
      lu.setThreshold(1e-12);
      if (lu.rank() < s) return;
      x = A.transpose() * lu.solve(b);
    }
    if (feasible(x)) best = std::min(best, x.norm());
  };
  auto recurse = [&](auto&& self, int start) -> void {
    consider();
    if (static_cast<int>(idx.size()) == kmax) return;
    for (int i = start; i < m; ++i) {
      idx.push_back(i);
      self(self, i + 1);
      idx.pop_back();
    }
  };
  recurse(recurse, 0);
  return best;
}

Region region_from_primitive(const Primitive& p) {
  switch (p.kind) {
    case Primitive::Kind::halfspace:
      return Region::halfspace(p.a, p.b);
    case Primitive::Kind::sphere_outside:
      return Region::ball_complement(p.center, p.radius);
    case Primitive::Kind::sphere_inside:
      return Region::ball(p.center, p.radius, true);
    case Primitive::Kind::power:
      break;
  }
  throw CapabilityError("power_region does not support dilation or erosion");
}

Region region_from_pieces(int dim, const std::vector<Piece>& pieces) {
  if (pieces.empty()) return Region::halfspace(Vector::Zero(dim), 1.0);
  std::vector<Region> parts;
  for (const auto& piece : pieces) {
    if (piece.empty()) {
      parts.push_back(Region::halfspace(Vector::Zero(dim), -1.0));
    } else if (piece.size() == 1) {
      parts.push_back(region_from_primitive(piece[0]));
    } else {
      std::vector<Region> leaves;
      for (const auto& p : piece) leaves.push_back(region_from_primitive(p));
      parts.push_back(Region::intersection_of(std::move(leaves)));
    }
  }
  if (parts.size() == 1) return parts[0];
  return Region::union_of(std::move(parts));
}

void require_deformable(const Region& region, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("delta must be positive and finite");
  if (!region.capabilities().dilate_erode)
    throw CapabilityError("region " + region.describe() + " does not support dilation or erosion");
}

std::string vec_str(const Vector& v) {
  std::ostringstream os;
  os << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

}  // namespace

RegionVariant RegionVariant::dilated(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("dilation delta must be positive and finite");
  return {VariantTag::dilated, delta};
}

RegionVariant RegionVariant::eroded(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("erosion delta must be positive and finite");
  return {VariantTag::eroded, delta};
}

std::string RegionVariant::name() const {
  switch (tag) {
    case VariantTag::interior: return "interior";
    case VariantTag::closure: return "closure";
    case VariantTag::dilated: return "dilated(" + std::to_string(delta) + ")";
    case VariantTag::eroded: return "eroded(" + std::to_string(delta) + ")";
  }
  return "";
}

Region Region::halfspace(const Vector& normal, double offset, bool strict) {
  require_finite_vector(normal, "halfspace normal");
  if (!std::isfinite(offset)) throw DomainError("halfspace offset must be finite");
  return Region(make_node(static_cast<int>(normal.size()), Halfspace{normal, offset, strict}));
}

Region Region::box(const Vector& lo, const Vector& hi, bool open) {
  if (lo.size() == 0 || lo.size() != hi.size()) throw DomainError("box bounds must be nonempty and of equal length");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i])) throw DomainError("box bounds must not be NaN");
    if (lo[i] == kInf || hi[i] == -kInf) throw DomainError("box bounds must satisfy lo < +inf and hi > -inf");
  }
  return Region(make_node(static_cast<int>(lo.size()), Box{lo, hi, open}));
}

Region Region::ball(const Vector& center, double radius, bool inside, BallNorm norm) {
  require_finite_vector(center, "ball center");
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw DomainError("ball radius must be finite and nonnegative");
  return Region(make_node(static_cast<int>(center.size()), Ball{center, radius, inside, norm}));
}

Region Region::ball_complement(const Vector& center, double radius, BallNorm norm) {
  return ball(center, radius, false, norm);
}

Region Region::cone_arc_2d(double theta_lo, double theta_hi, double radius_gt) {
  if (!std::isfinite(theta_lo) || !std::isfinite(theta_hi) || !(theta_hi > theta_lo) ||
      !(theta_hi - theta_lo < 2.0 * M_PI))
    throw DomainError("cone_arc_2d requires theta_lo < theta_hi < theta_lo + 2 pi");
  if (!(radius_gt >= 0.0) || !std::isfinite(radius_gt)) throw DomainError("cone_arc_2d radius must be nonnegative");
  return Region(make_node(2, ConeArc2D{theta_lo, theta_hi, radius_gt}));
}

Region Region::power_region(double sigma, double scale) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("power_region sigma must be positive");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("power_region scale must be positive");
  return Region(make_node(2, Power{sigma, scale}));
}

Region Region::union_of(std::vector<Region> parts) {
  if (parts.empty()) throw DomainError("union requires at least one part");
  const int dim = parts[0].dim();
  for (const auto& p : parts)
    if (p.dim() != dim) throw DomainError("union parts must share a dimension");
  return Region(make_node(dim, Union{std::move(parts)}));
}

Region Region::intersection_of(std::vector<Region> parts) {
  if (parts.empty()) throw DomainError("intersection requires at least one part");
  const int dim = parts[0].dim();
  for (const auto& p : parts)
    if (p.dim() != dim) throw DomainError("intersection parts must share a dimension");
  return Region(make_node(dim, Intersection{std::move(parts)}));
}

Region Region::difference_with_ball(const Region& base, const Vector& center, double radius, BallNorm norm) {
  require_finite_vector(center, "ball center");
  if (center.size() != base.dim()) throw DomainError("ball center dimension mismatch");
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw DomainError("ball radius must be finite and nonnegative");
  return Region(make_node(base.dim(), DifferenceWithBall{base, center, radius, norm}));
}

int Region::dim() const { return node_->dim; }

Capabilities Region::capabilities() const {
  return std::visit(
      [&](const auto& d) -> Capabilities {
        using T = std::decay_t<decltype(d)>;
        Capabilities c;
        if constexpr (std::is_same_v<T, Halfspace> || std::is_same_v<T, Box>) {
          c.line_clip = c.dilate_erode = c.lp_feasible = true;
        } else if constexpr (std::is_same_v<T, Ball>) {
          c.line_clip = c.dilate_erode = true;
          c.lp_feasible = d.norm == BallNorm::linf;
        } else if constexpr (std::is_same_v<T, ConeArc2D>) {
          c.line_clip = c.dilate_erode = true;
        } else if constexpr (std::is_same_v<T, Power>) {
          c.line_clip = true;
        } else if constexpr (std::is_same_v<T, Union> || std::is_same_v<T, Intersection>) {
          c.line_clip = c.dilate_erode = c.lp_feasible = true;
          for (const auto& p : d.parts) {
            const auto pc = p.capabilities();
            c.line_clip = c.line_clip && pc.line_clip;
            c.dilate_erode = c.dilate_erode && pc.dilate_erode;
            c.lp_feasible = c.lp_feasible && pc.lp_feasible;
          }
        } else {
          c = d.base.capabilities();
          if (d.norm == BallNorm::l2) c.lp_feasible = false;
        }
        return c;
      },
      node_->data);
}

std::string Region::kind() const {
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Halfspace>) return "halfspace";
        else if constexpr (std::is_same_v<T, Box>) return "box";
        else if constexpr (std::is_same_v<T, Ball>) return "ball";
        else if constexpr (std::is_same_v<T, ConeArc2D>) return "cone_arc_2d";
        else if constexpr (std::is_same_v<T, Power>) return "power_region";
        else if constexpr (std::is_same_v<T, Union>) return "union";
        else if constexpr (std::is_same_v<T, Intersection>) return "intersection";
        else return "difference_with_ball";
      },
      node_->data);
}

std::string Region::describe() const {
  return std::visit(
      [&](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        std::ostringstream os;
        if constexpr (std::is_same_v<T, Halfspace>) {
          os << "halfspace(" << vec_str(d.normal) << ".x > " << d.offset << ")";
        } else if constexpr (std::is_same_v<T, Box>) {
          os << "box(lo=" << vec_str(d.lo) << ", hi=" << vec_str(d.hi) << ")";
        } else if constexpr (std::is_same_v<T, Ball>) {
          os << (d.inside ? "ball(" : "ball_complement(") << vec_str(d.center) << ", r=" << d.radius
             << (d.norm == BallNorm::linf ? ", linf)" : ")");
        } else if constexpr (std::is_same_v<T, ConeArc2D>) {
          os << "cone_arc_2d(" << d.theta_lo << ", " << d.theta_hi << ", r>" << d.radius << ")";
        } else if constexpr (std::is_same_v<T, Power>) {
          os << "power_region(sigma=" << d.sigma << ", scale=" << d.scale << ")";
        } else if constexpr (std::is_same_v<T, Union> || std::is_same_v<T, Intersection>) {
          os << (std::is_same_v<T, Union> ? "union(" : "intersection(");
          for (std::size_t i = 0; i < d.parts.size(); ++i) os << (i ? ", " : "") << d.parts[i].describe();
          os << ")";
        } else {
          os << "difference_with_ball(" << d.base.describe() << ", " << vec_str(d.center) << ", r=" << d.radius
             << ")";
        }
        return os.str();
      },
      node_->data);
}

CompiledRegion::CompiledRegion(const Region& region, RegionVariant variant) : dim_(region.dim()) {
  if ((variant.tag == VariantTag::dilated || variant.tag == VariantTag::eroded) &&
      !region.capabilities().dilate_erode)
    throw CapabilityError("region " + region.describe() + " does not support " + variant.name());
  auto pieces = compile_node(region);
  for (auto& piece : pieces) {
    Piece out;
    bool never = false;
    for (const auto& p : piece) {
      Primitive q = apply_variant(p, variant);
      if (q.kind == Primitive::Kind::halfspace && q.a.squaredNorm() == 0.0) {
        if (q.b < 0.0) continue;
        never = true;
        break;
      }
      out.push_back(std::move(q));
    }
    if (!never) pieces_.push_back(std::move(out));
  }
}

CompiledRegion::CompiledRegion(int dim, std::vector<Piece> pieces) : dim_(dim), pieces_(std::move(pieces)) {}

bool CompiledRegion::polyhedral() const {
  for (const auto& piece : pieces_)
    for (const auto& p : piece)
      if (p.kind != Primitive::Kind::halfspace) return false;
  return true;
}

bool CompiledRegion::contains(const Vector& x) const {
  for (const auto& piece : pieces_) {
    bool in = true;
    for (const auto& p : piece)
      if (!prim_contains(p, x)) {
        in = false;
        break;
      }
    if (in) return true;
  }
  return false;
}

IntervalSet CompiledRegion::line_clip(const Vector& p, const Vector& d) const {
  IntervalSet all;
  for (const auto& piece : pieces_) {
    IntervalSet cur = all_line();
    for (const auto& prim : piece) {
      cur = intersect(cur, prim_clip(prim, p, d));
      if (cur.empty()) break;
    }
    all.insert(all.end(), cur.begin(), cur.end());
  }
  return merge(std::move(all));
}

bool contains(const Region& region, const Vector& x, RegionVariant variant) {
  if (x.size() != region.dim()) throw DomainError("point dimension does not match region");
  return CompiledRegion(region, variant).contains(x);
}

Region scale(const Region& region, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("scale factor must be positive and finite");
  if (h == 1.0) return region;
  return std::visit(
      [&](const auto& d) -> Region {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Halfspace>) {
          return Region::halfspace(d.normal, d.offset * h, d.strict);
        } else if constexpr (std::is_same_v<T, Box>) {
          return Region::box(d.lo * h, d.hi * h, d.open);
        } else if constexpr (std::is_same_v<T, Ball>) {
          return Region::ball(d.center * h, d.radius * h, d.inside, d.norm);
        } else if constexpr (std::is_same_v<T, ConeArc2D>) {
          return Region::cone_arc_2d(d.theta_lo, d.theta_hi, d.radius * h);
        } else if constexpr (std::is_same_v<T, Power>) {
          return Region::power_region(d.sigma, d.scale * h);
        } else if constexpr (std::is_same_v<T, Union> || std::is_same_v<T, Intersection>) {
          std::vector<Region> parts;
          for (const auto& p : d.parts) parts.push_back(scale(p, h));
          return std::is_same_v<T, Union> ? Region::union_of(std::move(parts))
                                          : Region::intersection_of(std::move(parts));
        } else {
          return Region::difference_with_ball(scale(d.base, h), d.center * h, d.radius * h, d.norm);
        }
      },
      region.node().data);
}

Deformation dilate(const Region& region, double delta) {
  require_deformable(region, delta);
  CompiledRegion c(region, RegionVariant::dilated(delta));
  bool exact = true;
  for (const auto& piece : compile_node(region)) exact = exact && piece.size() <= 1;
  return {region_from_pieces(region.dim(), c.pieces()), exact};
}

Deformation erode(const Region& region, double delta) {
  require_deformable(region, delta);
  CompiledRegion c(region, RegionVariant::eroded(delta));
  const bool exact = compile_node(region).size() <= 1;
  return {region_from_pieces(region.dim(), c.pieces()), exact};
}

double origin_gap(const Region& region) {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Halfspace>) {
          const double na = d.normal.norm();
          if (na == 0.0) return d.offset < 0.0 ? 0.0 : kInf;
          return std::max(d.offset, 0.0) / na;
        } else if constexpr (std::is_same_v<T, Box>) {
          double s = 0.0;
          for (Eigen::Index i = 0; i < d.lo.size(); ++i) {
            if (!(d.lo[i] < d.hi[i])) return kInf;
            const double c = std::clamp(0.0, d.lo[i], d.hi[i]);
            s += c * c;
          }
          return std::sqrt(s);
        } else if constexpr (std::is_same_v<T, Ball>) {
          if (d.norm == BallNorm::l2) {
            const double nc = d.center.norm();
            if (d.inside) return d.radius > 0.0 ? std::max(0.0, nc - d.radius) : kInf;
            return std::max(0.0, d.radius - nc);
          }
          if (d.inside) {
            if (!(d.radius > 0.0)) return kInf;
            double s = 0.0;
            for (Eigen::Index i = 0; i < d.center.size(); ++i) {
              const double c = std::clamp(0.0, d.center[i] - d.radius, d.center[i] + d.radius);
              s += c * c;
            }
            return std::sqrt(s);
          }
          const double m = d.center.cwiseAbs().maxCoeff();
          return m >= d.radius ? 0.0 : d.radius - m;
        } else if constexpr (std::is_same_v<T, ConeArc2D>) {
          return d.radius;
        } else if constexpr (std::is_same_v<T, Power>) {
          return d.scale;
        } else if constexpr (std::is_same_v<T, Union>) {
          double best = kInf;
          for (const auto& p : d.parts) best = std::min(best, origin_gap(p));
          return best;
        } else {
          if (!subtree_polyhedral(region))
            throw CapabilityError("origin_gap of " + region.describe() +
                                  " requires a polyhedral subtree for intersections and differences");
          double best = kInf;
          for (const auto& piece : compile_node(region))
            best = std::min(best, polyhedral_min_norm(piece, region.dim()));
          return best;
        }
      },
      region.node().data);
}

IntervalSet line_clip(const Region& region, const Vector& p, const Vector& d, RegionVariant variant) {
  if (p.size() != region.dim() || d.size() != region.dim()) throw DomainError("line dimension does not match region");
  if (d.squaredNorm() == 0.0) throw DomainError("line direction must be nonzero");
  if (!region.capabilities().line_clip)
    throw CapabilityError("region " + region.describe() + " does not support line clipping");
  return CompiledRegion(region, variant).line_clip(p, d);
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
  IntervalSet out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].lo, b[j].lo);
    const double hi = std::min(a[i].hi, b[j].hi);
    if (lo < hi) out.push_back({lo, hi});
    if (a[i].hi < b[j].hi) ++i;
    else ++j;
  }
  return out;
}

IntervalSet merge(IntervalSet intervals) {
  std::sort(intervals.begin(), intervals.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  IntervalSet out;
  for (const auto& iv : intervals) {
    if (!(iv.lo < iv.hi)) continue;
    if (!out.empty() && iv.lo <= out.back().hi) out.back().hi = std::max(out.back().hi, iv.hi);
    else out.push_back(iv);
  }
  return out;
}

}  // namespace stabletail
