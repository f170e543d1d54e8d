#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stabletail/errors.hpp"
#include "stabletail/random.hpp"
#include "stabletail/region.hpp"

using namespace stabletail;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = INFINITY;

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

Region quadrant() { return Region::box(vec({1, 1}), vec({kInf, kInf})); }
Region corner() {
  return Region::intersection_of({Region::halfspace(vec({1, 0}), 1.0), Region::halfspace(vec({0, -1}), -1.0)});
}

struct Named {
  std::string name;
  Region region;
  bool deformable;
};

std::vector<Named> zoo() {
  return {
      {"halfspace", Region::halfspace(vec({1, 2}), 1.5), true},
      {"box", quadrant(), true},
      {"corner", corner(), true},
      {"ball_l2", Region::ball(vec({2, 1}), 0.8), true},
      {"ball_complement", Region::ball_complement(vec({0, 0}), 1.0), true},
      {"ball_linf", Region::ball(vec({1, 1}), 0.3, true, BallNorm::linf), true},
      {"cone", Region::cone_arc_2d(kPi / 8, 3 * kPi / 8, 1.0), true},
      {"power", Region::power_region(0.5), false},
      {"union", Region::union_of({quadrant(), Region::box(vec({-kInf, -kInf}), vec({-2, -1}))}), true},
      {"difference", Region::difference_with_ball(corner(), vec({1, 1}), 0.2, BallNorm::linf), true},
  };
}

Vector random_point(RandomStream& rng, double spread) {
  return vec({rng.uniform(-spread, spread), rng.uniform(-spread, spread)});
}

}  // namespace

TEST(Contains, BoxInteriorAndClosure) {
  const auto box = quadrant();
  EXPECT_TRUE(contains(box, vec({2, 2}), RegionVariant::interior()));
  EXPECT_FALSE(contains(box, vec({1, 2}), RegionVariant::interior()));
  EXPECT_TRUE(contains(box, vec({1, 2}), RegionVariant::closure()));
}

TEST(Contains, ConeArc) {
  const auto cone = Region::cone_arc_2d(kPi / 8, 3 * kPi / 8, 1.0);
  EXPECT_TRUE(contains(cone, vec({1, 1}), RegionVariant::interior()));
  EXPECT_FALSE(contains(cone, vec({0.5, 0.5}), RegionVariant::interior()));
  EXPECT_FALSE(contains(cone, vec({2, 0.1}), RegionVariant::interior()));
}

TEST(Contains, PowerRegion) {
  const auto p = Region::power_region(0.5);
  EXPECT_TRUE(contains(p, vec({1.5, 1.0}), RegionVariant::interior()));
  EXPECT_FALSE(contains(p, vec({1.5, 0.04}), RegionVariant::interior()));
  EXPECT_FALSE(contains(p, vec({1.5, -1.0}), RegionVariant::closure()));
}

TEST(Contains, DimensionMismatch) {
  EXPECT_THROW(contains(quadrant(), vec({1, 2, 3}), RegionVariant::closure()), DomainError);
}

TEST(Scale, Box) {
  const auto s = scale(quadrant(), 2.0);
  EXPECT_TRUE(contains(s, vec({2.5, 2.5}), RegionVariant::interior()));
  EXPECT_FALSE(contains(s, vec({1.5, 3.0}), RegionVariant::interior()));
  EXPECT_TRUE(contains(s, vec({2.0, 2.0}), RegionVariant::closure()));
  EXPECT_NEAR(origin_gap(s), 2.0 * std::sqrt(2.0), 1e-14);
}

TEST(Scale, ConeKeepsAngles) {
  const auto s = scale(Region::cone_arc_2d(kPi / 8, 3 * kPi / 8, 1.0), 3.0);
  const auto& c = std::get<region_node::ConeArc2D>(s.node().data);
  EXPECT_DOUBLE_EQ(c.theta_lo, kPi / 8);
  EXPECT_DOUBLE_EQ(c.theta_hi, 3 * kPi / 8);
  EXPECT_DOUBLE_EQ(c.radius, 3.0);
}

TEST(Scale, IdentityAndInvalid) {
  const auto c = corner();
  EXPECT_EQ(&scale(c, 1.0).node(), &c.node());
  EXPECT_THROW(scale(c, 0.0), DomainError);
  EXPECT_THROW(scale(c, -2.0), DomainError);
}

TEST(Scale, ConsistentWithContainsOnRandomPoints) {
  RandomStream rng(1);
  for (const auto& [name, region, deformable] : zoo()) {
    for (double h : {0.5, 2.0, 10.0}) {
      const auto s = scale(region, h);
      for (int i = 0; i < 1000; ++i) {
        const Vector x = random_point(rng, 5.0 * h);
        for (auto v : {RegionVariant::interior(), RegionVariant::closure()})
          ASSERT_EQ(contains(s, x, v), contains(region, x / h, v)) << name << " h=" << h << " x=" << x.transpose();
      }
    }
  }
}

TEST(Deform, HalfspaceDilation) {
  const auto d = dilate(Region::halfspace(vec({1, 0}), 1.0), 0.1);
  EXPECT_TRUE(d.exact);
  const auto& hs = std::get<region_node::Halfspace>(d.region.node().data);
  EXPECT_NEAR(hs.offset / hs.normal.norm(), 0.9, 1e-14);
  EXPECT_TRUE(contains(d.region, vec({0.95, 7.0}), RegionVariant::interior()));
  EXPECT_FALSE(contains(d.region, vec({0.85, 7.0}), RegionVariant::closure()));
}

TEST(Deform, BoxErosionAndRoundTrip) {
  const double delta = 0.25;
  const auto e = erode(quadrant(), delta);
  EXPECT_TRUE(e.exact);
  EXPECT_NEAR(origin_gap(e.region), std::sqrt(2.0) * (1.0 + delta), 1e-12);
  EXPECT_TRUE(contains(e.region, vec({1.3, 1.3}), RegionVariant::interior()));
  EXPECT_FALSE(contains(e.region, vec({1.2, 5.0}), RegionVariant::closure()));
  const Region box = Region::box(vec({1, -2}), vec({3, 4}));
  const auto back = dilate(erode(box, 0.3).region, 0.3).region;
  RandomStream rng(3);
  for (int i = 0; i < 2000; ++i) {
    const Vector x = random_point(rng, 6.0);
    EXPECT_EQ(contains(back, x, RegionVariant::interior()), contains(box, x, RegionVariant::interior()));
  }
  const Vector lo = vec({1, -2}), hi = vec({3, 4});
  for (int i = 0; i < 2; ++i) {
    Vector p = 0.5 * (lo + hi);
    p[i] = lo[i] + 1e-11;
    EXPECT_TRUE(contains(back, p, RegionVariant::interior()));
    p[i] = lo[i] - 1e-11;
    EXPECT_FALSE(contains(back, p, RegionVariant::closure()));
  }
}

TEST(Deform, UnionErosionFlaggedConservative) {
  const auto u = Region::union_of({quadrant(), Region::box(vec({-kInf, -kInf}), vec({-2, -1}))});
  EXPECT_FALSE(erode(u, 0.1).exact);
  EXPECT_THROW(dilate(Region::power_region(0.5), 0.1), CapabilityError);
  EXPECT_THROW(dilate(quadrant(), 0.0), DomainError);
}

TEST(Variants, NestingOnRandomPoints) {
  RandomStream rng(5);
  for (const auto& [name, region, deformable] : zoo()) {
    if (!deformable) continue;
    for (int i = 0; i < 2000; ++i) {
      const Vector x = random_point(rng, 4.0);
      const double delta = 0.05 + 0.3 * rng.uniform();
      const bool er = contains(region, x, RegionVariant::eroded(delta));
      const bool in = contains(region, x, RegionVariant::interior());
      const bool cl = contains(region, x, RegionVariant::closure());
      const bool di = contains(region, x, RegionVariant::dilated(delta));
      ASSERT_TRUE(!er || in) << name << " " << x.transpose();
      ASSERT_TRUE(!in || cl) << name << " " << x.transpose();
      ASSERT_TRUE(!cl || di) << name << " " << x.transpose();
    }
  }
}

TEST(Variants, MonotoneInDelta) {
  RandomStream rng(6);
  for (const auto& [name, region, deformable] : zoo()) {
    if (!deformable) continue;
    for (int i = 0; i < 2000; ++i) {
      const Vector x = random_point(rng, 4.0);
      const double d1 = 0.02 + 0.2 * rng.uniform(), d2 = d1 + 0.01 + 0.3 * rng.uniform();
      if (contains(region, x, RegionVariant::dilated(d1)))
        ASSERT_TRUE(contains(region, x, RegionVariant::dilated(d2))) << name;
      if (contains(region, x, RegionVariant::eroded(d2)))
        ASSERT_TRUE(contains(region, x, RegionVariant::eroded(d1))) << name;
    }
  }
}

TEST(Variants, PowerRegionRejectsDilation) {
  EXPECT_THROW(contains(Region::power_region(0.5), vec({1.5, 1.0}), RegionVariant::dilated(0.1)), CapabilityError);
  EXPECT_THROW(RegionVariant::dilated(0.0), DomainError);
}

TEST(OriginGap, ClosedForms) {
  EXPECT_NEAR(origin_gap(quadrant()), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(origin_gap(Region::halfspace(vec({1, 0}), 1.0)), 1.0, 1e-14);
  EXPECT_NEAR(origin_gap(Region::ball_complement(vec({0, 0}), 1.0)), 1.0, 1e-14);
  EXPECT_NEAR(origin_gap(corner()), 1.0, 1e-9);
  EXPECT_NEAR(origin_gap(Region::cone_arc_2d(0.1, 0.4, 2.0)), 2.0, 1e-14);
  EXPECT_DOUBLE_EQ(origin_gap(Region::halfspace(vec({1, 0}), -1.0)), 0.0);
}

TEST(LineClip, CornerRegionEvent) {
  for (double t2 : {0.1, 1.0, 3.5}) {
    const auto iv = line_clip(corner(), vec({0, -t2}), vec({1, 1}), RegionVariant::interior());
    ASSERT_EQ(iv.size(), 1u);
    EXPECT_NEAR(iv[0].lo, 1.0, 1e-12);
    EXPECT_NEAR(iv[0].hi, 1.0 + t2, 1e-12);
  }
}

TEST(LineClip, BoxExamples) {
  EXPECT_TRUE(line_clip(quadrant(), vec({0, 0}), vec({1, 0}), RegionVariant::interior()).empty());
  const auto iv = line_clip(quadrant(), vec({0, 2}), vec({1, 0}), RegionVariant::interior());
  ASSERT_EQ(iv.size(), 1u);
  EXPECT_NEAR(iv[0].lo, 1.0, 1e-12);
  EXPECT_EQ(iv[0].hi, kInf);
}

TEST(LineClip, AgreesWithContains) {
  RandomStream rng(9);
  for (const auto& [name, region, deformable] : zoo()) {
    for (int line = 0; line < 100; ++line) {
      const Vector p = random_point(rng, 3.0);
      const double phi = rng.uniform(0.0, 2 * kPi);
      const Vector d = vec({std::cos(phi), std::sin(phi)});
      const auto iv = line_clip(region, p, d, RegionVariant::interior());
      for (std::size_t i = 1; i < iv.size(); ++i) ASSERT_LT(iv[i - 1].hi, iv[i].lo) << name;
      for (int k = 0; k < 50; ++k) {
        const double t = rng.uniform(-10.0, 10.0);
        bool in_clip = false;
        for (const auto& I : iv) in_clip = in_clip || (I.lo < t && t < I.hi);
        ASSERT_EQ(in_clip, contains(region, p + t * d, RegionVariant::interior())) << name << " t=" << t;
      }
    }
  }
}

TEST(Capabilities, ComputedFromTree) {
  const auto c = corner().capabilities();
  EXPECT_TRUE(c.line_clip && c.dilate_erode && c.lp_feasible);
  const auto p = Region::power_region(0.5).capabilities();
  EXPECT_TRUE(p.line_clip);
  EXPECT_FALSE(p.dilate_erode);
  EXPECT_FALSE(p.lp_feasible);
  const auto u = Region::union_of({quadrant(), corner()}).capabilities();
  EXPECT_TRUE(u.line_clip && u.lp_feasible);
  const auto mixed = Region::intersection_of({quadrant(), Region::power_region(0.5)}).capabilities();
  EXPECT_FALSE(mixed.lp_feasible);
  EXPECT_FALSE(mixed.dilate_erode);
}

TEST(Intervals, IntersectAndMerge) {
  const auto m = merge({{3, 4}, {0, 1}, {0.5, 2}, {5, 5}});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].lo, 0);
  EXPECT_EQ(m[0].hi, 2);
  const auto i = intersect(m, {{1.5, 3.5}});
  ASSERT_EQ(i.size(), 2u);
  EXPECT_EQ(i[0].lo, 1.5);
  EXPECT_EQ(i[1].hi, 3.5);
}
