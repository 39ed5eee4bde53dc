#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "spiralflow/theta.hpp"

using namespace spiralflow;

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<SpiralCenter> kOrigin{{{0.0, 0.0}, 1}};
const std::vector<SpiralCenter> kThree{{{-0.8, 0.0}, 1}, {{0.8, 0.0}, -1}, {{0.0, 1.5}, 2}};

// Local lift of theta: sum of m_j atan2 differences relative to a base point.
double theta_rel(Vec2 x, Vec2 base, std::span<const SpiralCenter> cs) {
  double s = 0.0;
  for (const SpiralCenter& c : cs) {
    const Vec2 a = x - c.a, b = base - c.a;
    s += c.m * std::atan2(cross(b, a), dot(b, a));
  }
  return s;
}

}  // namespace

TEST(GradTheta, Examples) {
  const Vec2 g1 = grad_theta({1.0, 0.0}, kOrigin);
  EXPECT_NEAR(g1.x, 0.0, 1e-15);
  EXPECT_NEAR(g1.y, 1.0, 1e-15);
  const Vec2 g2 = grad_theta({0.0, 2.0}, kOrigin);
  EXPECT_NEAR(g2.x, -0.5, 1e-15);
  EXPECT_NEAR(g2.y, 0.0, 1e-15);
  const std::vector<SpiralCenter> neg{{{0.0, 0.0}, -1}};
  const Vec2 g3 = grad_theta({1.0, 0.0}, neg);
  EXPECT_NEAR(g3.x, 0.0, 1e-15);
  EXPECT_NEAR(g3.y, -1.0, 1e-15);
  EXPECT_THROW(grad_theta({0.0, 0.0}, kOrigin), SingularPoint);
  EXPECT_THROW(hess_theta({0.0, 0.0}, kOrigin), SingularPoint);
}

TEST(PrincipalTheta, Examples) {
  EXPECT_NEAR(principal_theta({0.0, 1.0}, kOrigin), kPi / 2, 1e-15);
  EXPECT_NEAR(principal_theta({-1.0, 0.0}, kOrigin), kPi, 1e-15);
  EXPECT_NEAR(principal_theta({1.0, 0.0}, kOrigin), 0.0, 1e-15);
  EXPECT_NEAR(principal_theta({0.0, -1.0}, kOrigin), 3 * kPi / 2, 1e-15);
  const std::vector<SpiralCenter> shifted{{{1.0, 0.0}, 1}};
  EXPECT_NEAR(principal_theta({1.0, 1.0}, shifted), kPi / 2, 1e-15);
  EXPECT_THROW(principal_theta({1.0, 0.0}, shifted), SingularPoint);
}

TEST(PrincipalTheta, ValuesLieInStrengthWeightedRange) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 x{u(rng), u(rng)};
    const double th = principal_theta(x, kThree);
    double lo = 0.0, hi = 0.0;
    for (const SpiralCenter& c : kThree) (c.m > 0 ? hi : lo) += 2 * kPi * c.m;
    EXPECT_GE(th, lo - 1e-12);
    EXPECT_LT(th, hi);
  }
}

TEST(GradTheta, MatchesFiniteDifferencesOfLocalLift) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  int checked = 0;
  while (checked < 200) {
    const Vec2 x{u(rng), u(rng)};
    bool near = false;
    for (const SpiralCenter& c : kThree) near = near || distance(x, c.a) < 0.3;
    if (near) continue;
    ++checked;
    const Vec2 g = grad_theta(x, kThree);
    double err[2];
    for (int r = 0; r < 2; ++r) {
      const double h = r == 0 ? 1e-3 : 5e-4;
      const double fx = (theta_rel(x + Vec2{h, 0}, x, kThree) - theta_rel(x - Vec2{h, 0}, x, kThree)) / (2 * h);
      const double fy = (theta_rel(x + Vec2{0, h}, x, kThree) - theta_rel(x - Vec2{0, h}, x, kThree)) / (2 * h);
      err[r] = std::hypot(fx - g.x, fy - g.y);
    }
    EXPECT_LT(err[0], 1e-4);
    // Second-order convergence of the central difference (when above roundoff).
    EXPECT_LE(err[1], 0.3 * err[0] + 1e-10);
  }
}

TEST(HessTheta, MatchesDifferencesOfGradientAndIsHarmonic) {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  int checked = 0;
  while (checked < 200) {
    const Vec2 x{u(rng), u(rng)};
    bool near = false;
    for (const SpiralCenter& c : kThree) near = near || distance(x, c.a) < 0.3;
    if (near) continue;
    ++checked;
    const Sym2 hs = hess_theta(x, kThree);
    const double h = 1e-4;
    const Vec2 gxp = grad_theta(x + Vec2{h, 0}, kThree), gxm = grad_theta(x - Vec2{h, 0}, kThree);
    const Vec2 gyp = grad_theta(x + Vec2{0, h}, kThree), gym = grad_theta(x - Vec2{0, h}, kThree);
    const double scale = 1.0 + std::abs(hs.xx) + std::abs(hs.xy);
    EXPECT_NEAR((gxp.x - gxm.x) / (2 * h), hs.xx, 1e-6 * scale);
    EXPECT_NEAR((gxp.y - gxm.y) / (2 * h), hs.xy, 1e-6 * scale);
    EXPECT_NEAR((gyp.x - gym.x) / (2 * h), hs.xy, 1e-6 * scale);
    EXPECT_NEAR((gyp.y - gym.y) / (2 * h), hs.yy, 1e-6 * scale);
    EXPECT_NEAR(hs.xx + hs.yy, 0.0, 1e-12 * scale);
  }
}

TEST(Circulation, AroundEachCenter) {
  for (const SpiralCenter& c : kThree) {
    const double circ = circulation(kThree, circle_loop(c.a, 0.3, 10000));
    EXPECT_NEAR(circ, 2 * kPi * c.m, 1e-6);
  }
  EXPECT_NEAR(circulation(kThree, circle_loop({2.5, -2.0}, 0.3, 10000)), 0.0, 1e-6);
  // A loop enclosing the +1/-1 dipole only.
  EXPECT_NEAR(circulation(kThree, circle_loop({0.0, -0.2}, 1.2, 10000)), 0.0, 1e-6);
  // A loop enclosing everything: 2 pi (1 - 1 + 2).
  EXPECT_NEAR(circulation(kThree, circle_loop({0.0, 0.5}, 2.5, 10000)), 4 * kPi, 1e-6);
}

TEST(Circulation, HomotopyInvariance) {
  // A star-shaped, non-circular loop around (-0.8, 0) gives the same value.
  Loop loop(10000);
  for (int k = 0; k < 10000; ++k) {
    const double phi = 2 * kPi * k / 10000;
    const double rho = 0.3 + 0.1 * std::sin(3 * phi);
    loop[k] = Vec2{-0.8, 0.0} + rho * Vec2{std::cos(phi), std::sin(phi)};
  }
  EXPECT_NEAR(circulation(kThree, loop), 2 * kPi, 1e-6);
  EXPECT_THROW(circulation(kThree, Loop{{0, 0}, {1, 0}}), ConfigError);
  EXPECT_THROW(circulation(kThree, Loop{{-1.0, 1.5}, {1.0, 1.5}, {1.0, 2.0}, {-1.0, 2.0}}), SingularPoint);
}

TEST(ThetaField, CachesNodalValues) {
  DomainSpec d;
  d.outer_radius = 2.0;
  d.hole_radius = 0.3;
  d.holes = {{{-0.8, 0.0}, 1}, {{0.8, 0.0}, -1}};
  const Grid g = build_grid(d, 0.05);
  const ThetaField tf(g, centers_of(d));
  ASSERT_EQ(tf.centers().size(), 2u);
  for (int k = 0; k < static_cast<int>(g.size()); ++k) {
    if (!g.has_value(k)) continue;
    const Vec2 x = g.position(k);
    EXPECT_EQ(tf.principal()[k], principal_theta(x, tf.centers()));
    EXPECT_EQ(tf.grad(k), grad_theta(x, tf.centers()));
  }
}

TEST(ThetaField, DiscreteCurlOfGradientVanishesAwayFromCenters) {
  // Sum of Dtheta . dl around each grid cell of W is zero to quadrature accuracy.
  DomainSpec d;
  d.outer_radius = 2.0;
  d.hole_radius = 0.5;
  d.holes = {{{0.0, 0.0}, 1}};
  const double h = 0.05;
  const Grid g = build_grid(d, h);
  const ThetaField tf(g, centers_of(d));
  double worst = 0.0;
  for (int k : g.interior) {
    const int e = k + 1, n = k + g.nx, ne = n + 1;
    if (!g.is_interior(e) || !g.is_interior(n) || !g.is_interior(ne)) continue;
    // Trapezoid rule per edge.
    const double c = 0.5 * h * (tf.grad(k).x + tf.grad(e).x) + 0.5 * h * (tf.grad(e).y + tf.grad(ne).y) -
                     0.5 * h * (tf.grad(ne).x + tf.grad(n).x) - 0.5 * h * (tf.grad(n).y + tf.grad(k).y);
    worst = std::max(worst, std::abs(c));
  }
  // Trapezoid error per cell is O(h^3 |D^2 Dtheta|) with |D^3 theta| <= 2 / r^3 = 16.
  EXPECT_LT(worst, 16.0 * h * h * h);
}
