#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace stabletail {

using Vector = Eigen::VectorXd;

enum class VariantTag { interior, closure, dilated, eroded };

struct RegionVariant {
  VariantTag tag = VariantTag::interior;
  double delta = 0.0;

  static RegionVariant interior() { return {VariantTag::interior, 0.0}; }
  static RegionVariant closure() { return {VariantTag::closure, 0.0}; }
  static RegionVariant dilated(double delta);
  static RegionVariant eroded(double delta);
  std::string name() const;
};

struct Capabilities {
  bool membership = true;
  bool line_clip = false;
  bool dilate_erode = false;
  bool lp_feasible = false;
};

enum class BallNorm { l2, linf };

struct Interval {
  double lo;
  double hi;
};
using IntervalSet = std::vector<Interval>;

namespace region_node {
struct Halfspace {
  Vector normal;
  double offset;  // normal . x > offset
  bool strict;
};
struct Box {
  Vector lo;
  Vector hi;
  bool open;
};
struct Ball {
  Vector center;
  double radius;
  bool inside;
  BallNorm norm;
};
struct ConeArc2D {
  double theta_lo;
  double theta_hi;
  double radius;
};
struct Power {
  double sigma;
  double scale;  // {x2 > 0, s < x1 < s + s^{1-sigma} x2^sigma}
};
struct Union;
struct Intersection;
struct DifferenceWithBall;
}  // namespace region_node

// Immutable expression tree describing a Borel set E in R^n.
class Region {
 public:
  struct Node;

  static Region halfspace(const Vector& normal, double offset, bool strict = true);
  static Region box(const Vector& lo, const Vector& hi, bool open = true);
  static Region ball(const Vector& center, double radius, bool inside = true, BallNorm norm = BallNorm::l2);
  static Region ball_complement(const Vector& center, double radius, BallNorm norm = BallNorm::l2);
  static Region cone_arc_2d(double theta_lo, double theta_hi, double radius_gt);
  static Region power_region(double sigma, double scale = 1.0);
  static Region union_of(std::vector<Region> parts);
  static Region intersection_of(std::vector<Region> parts);
  static Region difference_with_ball(const Region& base, const Vector& center, double radius,
                                     BallNorm norm = BallNorm::l2);

  int dim() const;
  Capabilities capabilities() const;
  std::string kind() const;
  std::string describe() const;
  const Node& node() const { return *node_; }

 private:
  explicit Region(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

namespace region_node {
struct Union {
  std::vector<Region> parts;
};
struct Intersection {
  std::vector<Region> parts;
};
struct DifferenceWithBall {
  Region base;
  Vector center;
  double radius;
  BallNorm norm;
};
}  // namespace region_node

struct Region::Node {
  int dim;
  std::variant<region_node::Halfspace, region_node::Box, region_node::Ball, region_node::ConeArc2D,
               region_node::Power, region_node::Union, region_node::Intersection,
               region_node::DifferenceWithBall>
      data;
};

// Conjunction member of a compiled region.
struct Primitive {
  enum class Kind { halfspace, sphere_outside, sphere_inside, power };
  Kind kind = Kind::halfspace;
  Vector a;              // halfspace normal
  double b = 0.0;        // halfspace offset: a . x > b
  Vector center;         // sphere center
  double radius = 0.0;   // sphere radius
  double sigma = 1.0;    // power exponent
  double scale = 1.0;    // power scale
  bool strict = true;
};

using Piece = std::vector<Primitive>;

// Region variant flattened to a union of conjunctions of primitives.
class CompiledRegion {
 public:
  CompiledRegion(const Region& region, RegionVariant variant);
  CompiledRegion(int dim, std::vector<Piece> pieces);

  int dim() const { return dim_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  bool polyhedral() const;

  bool contains(const Vector& x) const;
  IntervalSet line_clip(const Vector& p, const Vector& d) const;

 private:
  int dim_;
  std::vector<Piece> pieces_;
};

bool contains(const Region& region, const Vector& x, RegionVariant variant);
Region scale(const Region& region, double h);

struct Deformation {
  Region region;
  bool exact;  // false when the result only approximates the true dilation/erosion
};
Deformation dilate(const Region& region, double delta);
Deformation erode(const Region& region, double delta);

double origin_gap(const Region& region);
IntervalSet line_clip(const Region& region, const Vector& p, const Vector& d, RegionVariant variant);

// Helpers on sorted disjoint interval lists.
IntervalSet intersect(const IntervalSet& a, const IntervalSet& b);
IntervalSet merge(IntervalSet intervals);

}  // namespace stabletail
