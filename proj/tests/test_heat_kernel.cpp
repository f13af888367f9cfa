#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "pharmonic/heat_kernel.hpp"

using namespace pharmonic;
using std::numbers::pi;

namespace {

Field ground_gaussian(const GridPtr& g) {
  return sample(g, [](double r, std::span<const double> x) {
    double v = std::exp(-r * r / 2);
    for (double xj : x) v *= hermite_eval(0, xj);
    return cplx(v);
  });
}

Point pt(double rho, std::vector<double> x) { return Point{rho, std::move(x)}; }

double gk(auto f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

}  // namespace

TEST(HeatKernel, BQuadratic) {
  EXPECT_EQ(b_quadratic(0.7, pt(1.5, {0.0}), pt(1.5, {0.0})), 0.0);
  const double t = 0.5;
  const double expect = 0.25 * (2.0 / std::tanh(1.0) - std::tanh(0.5)) + std::tanh(0.5) / 4;
  EXPECT_NEAR(b_quadratic(t, pt(0.3, {1.0}), pt(0.3, {0.0})), expect, 1e-15);
  auto z = pt(0.4, {1.0, -2.0}), zp = pt(-1.1, {0.5, 0.3});
  EXPECT_DOUBLE_EQ(b_quadratic(0.9, z, zp), b_quadratic(0.9, zp, z));
}

TEST(HeatKernel, SymmetryPositivityFactorization) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 20; ++i) {
    auto z = pt(u(rng), {u(rng), u(rng)}), zp = pt(u(rng), {u(rng), u(rng)});
    const double t = 0.05 + std::abs(u(rng));
    EXPECT_NEAR(heat_kernel_E(t, z, zp), heat_kernel_E(t, zp, z), 1e-15 * heat_kernel_E(t, z, zp));
    EXPECT_GT(heat_kernel_E(t, z, zp), 0.0);
    // ratio E / rho-factor is independent of rho, rho'
    auto z2 = z, zp2 = zp;
    z2.rho += 0.7;
    zp2.rho -= 1.3;
    const double r1 = heat_kernel_E(t, z, zp) / heat_kernel_rho(t, z.rho - zp.rho);
    const double r2 = heat_kernel_E(t, z2, zp2) / heat_kernel_rho(t, z2.rho - zp2.rho);
    EXPECT_NEAR(r1, r2, 1e-12 * r1);
    EXPECT_NEAR(r1, heat_kernel_x1(t, z.x[0], zp.x[0]) * heat_kernel_x1(t, z.x[1], zp.x[1]), 1e-12 * r1);
  }
  // graceful extremes
  EXPECT_TRUE(std::isfinite(heat_kernel_E(1e-8, pt(0, {0}), pt(0, {0}))));
  const double far = heat_kernel_E(200.0, pt(0, {3}), pt(50, {-3}));
  EXPECT_TRUE(std::isfinite(far) && far >= 0.0 && far < 1e-90);
}

TEST(HeatKernel, GroundModeEigenAction) {
  for (double t : {0.2, 1.0})
    for (double x : {-1.3, 0.0, 0.8}) {
      // rho' integrates the rho-factor to 1; x' against h_0
      const double rho_mass = gk([&](double s) { return heat_kernel_rho(t, s); }, -40, 40);
      const double xm = gk([&](double xp) { return heat_kernel_x1(t, x, xp) * hermite_eval(0, xp); }, -12, 12);
      EXPECT_NEAR(rho_mass * xm, std::exp(-t) * hermite_eval(0, x), 1e-10);
    }
}

TEST(HeatKernel, ChapmanKolmogorov) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const double s = 0.3, t = 0.3;
  for (int i = 0; i < 5; ++i) {
    auto z = pt(u(rng), {u(rng)}), zp = pt(u(rng), {u(rng)});
    const double rho_part = gk([&](double w) { return heat_kernel_rho(s, z.rho - w) * heat_kernel_rho(t, w - zp.rho); }, -20, 20);
    const double x_part = gk([&](double w) { return heat_kernel_x1(s, z.x[0], w) * heat_kernel_x1(t, w, zp.x[0]); }, -15, 15);
    const double ref = heat_kernel_E(s + t, z, zp);
    EXPECT_NEAR(rho_part * x_part, ref, 1e-6 * ref);
  }
}

TEST(HeatApply, AgreesWithSpectralRoute) {
  auto g = make_grid(1, 128, 16.0, 8, 9);
  auto f = ground_gaussian(g);
  for (double t : {0.1, 0.5, 2.0}) {
    auto k = heat_apply_kernel(f, t);
    EXPECT_FALSE(k.truncation_warning);
    EXPECT_LT(relative_l2(k.field, heat_spectral(f, t)), 1e-6) << t;
  }
}

TEST(HeatApply, ZeroAndPositivity) {
  auto g = make_grid(1, 64, 10.0, 16, 17);
  auto z = heat_apply_kernel(Field(g), 0.4);
  for (auto v : z.field.values) EXPECT_EQ(v, cplx{});
  auto f = ground_gaussian(g);
  auto k = heat_apply_kernel(f, 0.4).field;
  for (auto v : k.values) EXPECT_GT(v.real(), -1e-14);
}

TEST(HeatApply, TwoDimensionalMixture) {
  auto g = make_grid(2, 32, 10.0, 10, 11);
  auto f = sample(g, [](double r, std::span<const double> x) {
    return cplx(std::exp(-r * r / 2) * (phi_mu({0, 0}, x) + 0.3 * phi_mu({2, 1}, x)));
  });
  EXPECT_LT(relative_l2(heat_apply_kernel(f, 0.3).field, heat_spectral(f, 0.3)), 1e-6);
}

TEST(KAlpha, DomainAndSingularity) {
  auto z = pt(0, {0.2}), zp = pt(0.5, {-0.4});
  try {
    k_alpha(z, zp, 0.5, -2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::domain);
  }
  auto z2 = pt(0, {0.1, 0.2}), zp2 = pt(0.5, {0.3, -0.4});
  EXPECT_THROW(k_alpha(z2, zp2, 0.5, -2.0), Error);
  EXPECT_NO_THROW(k_alpha(z2, zp2, 0.25, -2.0));
  try {
    k_alpha(z, pt(0, {0.2 + 1e-4}), 0.5, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::singular_evaluation);
  }
  EXPECT_NO_THROW(k_alpha(z, pt(0, {0.2 + 1e-4}), 1.5, 0.0));
}

TEST(KAlpha, SymmetryAndShiftMonotonicity) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 10; ++i) {
    auto z = pt(u(rng), {u(rng)}), zp = pt(u(rng), {u(rng)});
    const double k = k_alpha(z, zp, 0.5);
    EXPECT_NEAR(k, k_alpha(zp, z, 0.5), 1e-9 * k);
    EXPECT_LE(k_alpha(z, zp, 0.5, 2.0), k);
  }
  auto z3 = pt(0.1, {0.3, -0.2, 0.5}), zp3 = pt(-0.4, {0.1, 0.6, -0.3});
  EXPECT_GE(k_alpha(z3, zp3, 0.5, -2.0), k_alpha(z3, zp3, 0.5, 0.0));
}

TEST(KAlpha, MatchesIndependentQuadrature) {
  auto z = pt(0.3, {0.5}), zp = pt(-0.2, {1.1});
  boost::math::quadrature::exp_sinh<double> es;
  for (double a : {0.5, 1.0, 1.5}) {
    const double ref = es.integrate([&](double t) { return std::pow(t, a - 1) * heat_kernel_E(t, z, zp); }) / std::tgamma(a);
    EXPECT_NEAR(k_alpha(z, zp, a), ref, 1e-8 * ref);
  }
}

TEST(KAlpha, IntegralMatchesSpectralPower) {
  // int K_{1/2}(z, z') g(z') dz' in polar coordinates around z; the disc of
  // radius r0 uses the leading singularity 1/(2 pi r), contributing r0 g(z).
  auto grid = make_grid(1, 64, 10.0, 24, 25);
  auto gfield = ground_gaussian(grid);
  auto spectral = forward(frac_power(gfield, -0.5));
  auto gfun = [](double r, double x) { return std::exp(-r * r / 2) * hermite_eval(0, x); };
  const double r0 = 1e-3;
  TQuadrature tq;
  tq.tol = 1e-9;
  double num = 0, den = 0;
  for (auto [zr, zx] : {std::pair{0.0, 0.0}, {0.7, -0.4}, {-1.2, 1.0}, {0.3, 2.0}}) {
    const int nth = 32;
    std::vector<double> rn, rw;
    // radial nodes on [r0, 14], graded geometrically
    double s = 0;
    double a = r0;
    while (a < 14.0) {
      const double b = std::min(14.0, std::max(2 * a, a + 0.05));
      std::vector<double> xn, wn;
      composite_legendre(a, b, 1, xn, wn);
      rn.insert(rn.end(), xn.begin(), xn.end());
      rw.insert(rw.end(), wn.begin(), wn.end());
      a = b;
    }
    Point z{zr, {zx}};
    for (size_t i = 0; i < rn.size(); ++i) {
      double ang = 0;
      for (int k = 0; k < nth; ++k) {
        const double th = 2 * pi * (k + 0.5) / nth;
        Point zp{zr + rn[i] * std::cos(th), {zx + rn[i] * std::sin(th)}};
        const double gv = gfun(zp.rho, zp.x[0]);
        if (gv < 1e-18) continue;
        ang += k_alpha_unchecked(z, zp, 0.5, 0.0, tq).value * gv;
      }
      s += rw[i] * rn[i] * ang * 2 * pi / nth;
    }
    s += r0 * gfun(zr, zx);
    const double xs[1] = {zx};
    const double ref = series_value(spectral, zr, xs).real();
    num += (s - ref) * (s - ref);
    den += ref * ref;
  }
  EXPECT_LT(std::sqrt(num / den), 1e-5);
}

TEST(PsiAlpha, Examples) {
  EXPECT_DOUBLE_EQ(psi_alpha(0.5, 0.5, 1), 2.0);
  EXPECT_DOUBLE_EQ(psi_alpha(2.0, 0.5, 1), std::exp(-0.25));
  EXPECT_DOUBLE_EQ(psi_alpha(2.0, 1.7, 1), std::exp(-0.25));
  EXPECT_NEAR(psi_alpha(0.5, 1.0, 1), 0.6931471805599453, 1e-15);
  EXPECT_DOUBLE_EQ(psi_alpha(0.5, 1.5, 1), 1.0);
}

TEST(KernelBounds, ReportStable) {
  KernelSampleSpec spec;
  spec.count = 40;
  for (double a : {0.5, 1.0, 1.5}) {
    auto r = kernel_bound_report(a, 1, spec);
    EXPECT_TRUE(r.all_pass()) << a << "\n" << to_csv(r);
  }
}

TEST(Schur, InnerMassClosedForm) {
  for (double t : {0.01, 0.4, 3.0})
    for (double x : {0.0, 1.3, 5.0}) {
      const double ref = std::pow(std::cosh(2 * t), -0.5) * std::exp(-0.5 * std::tanh(2 * t) * x * x);
      EXPECT_NEAR(detail::x1_mass(t, x, [](double) { return 1.0; }), ref, 1e-12);
    }
  EXPECT_NEAR(detail::rho_mass(0.3), 1.0, 1e-13);
}

TEST(Schur, RowAndColumnSumsStable) {
  auto r = schur_report(0.5, 4.0, 8);
  EXPECT_TRUE(r.all_pass()) << to_csv(r);
}

TEST(FracPowerKernel, AgreesWithSpectral) {
  auto g = make_grid(1, 64, 10.0, 16, 17);
  auto f = ground_gaussian(g);
  for (double a : {-0.5, 0.5}) {
    auto k = frac_power_kernel(f, a);
    EXPECT_LT(relative_l2(k, frac_power(f, a)), 1e-4) << a;
  }
}

TEST(FracPowerKernel, GroundModeScalarAndComposition) {
  auto g = make_grid(1, 32, 10.0, 8, 9);
  auto h0 = sample(g, [](double, std::span<const double> x) { return cplx(hermite_eval(0, x[0])); });
  auto out = frac_power_kernel(h0, -0.5);
  EXPECT_LT(relative_l2(out, h0), 1e-5);
  auto f = ground_gaussian(make_grid(1, 64, 10.0, 16, 17));
  auto back = frac_power_kernel(frac_power_kernel(f, -0.5), 0.5);
  EXPECT_LT(relative_l2(back, f), 1e-3);
  EXPECT_THROW(frac_power_kernel(f, 1.0), Error);
  EXPECT_THROW(frac_power_kernel(f, -1.0), Error);
}
