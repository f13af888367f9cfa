#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "pharmonic/ladder.hpp"
#include "pharmonic/symbols.hpp"

using namespace pharmonic;
using std::numbers::pi;

namespace {

std::vector<double> v1(double a) { return {a}; }

cplx es_complex(auto f) {
  boost::math::quadrature::exp_sinh<double> es;
  const double re = es.integrate([&](double t) { return f(t).real(); });
  const double im = es.integrate([&](double t) { return f(t).imag(); });
  return {re, im};
}

double rel(const UniformSamples& a, const UniformSamples& b) {
  double n = 0, d = 0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    n += std::norm(a.values[i] - b.values[i]);
    d += std::norm(b.values[i]);
  }
  return std::sqrt(n / d);
}

bool metric_pass(const Report& r) { return r.all_pass(); }

}  // namespace

TEST(BSymbol, ExamplesAndDerivatives) {
  auto z = v1(0.0);
  EXPECT_DOUBLE_EQ(b_symbol(0.7, z, 1.3, z).real(), 0.7 * 1.69);
  EXPECT_EQ(b_symbol(0.7, z, 1.3, z).imag(), 0.0);
  auto x = v1(0.4), xi = v1(-1.1);
  EXPECT_EQ(b_symbol(0.3, x, 2.0, xi), b_symbol(0.3, xi, 2.0, x));
  // d b / dt against centred differences, including t -> 0+
  for (double t : {1e-4, 0.2, 1.5}) {
    const double h = 1e-6 * std::max(t, 1e-2);
    const cplx fd = (b_symbol(t + h, x, 0.8, xi) - b_symbol(t - h, x, 0.8, xi)) / (2 * h);
    EXPECT_LT(std::abs(fd - b_symbol_dt(t, x, 0.8, xi)), 1e-6);
  }
  EXPECT_NEAR(b_symbol_dt(1e-9, x, 0.8, xi).real(), 0.16 + 1.21 + 0.64, 1e-12);
  for (double t : {0.05, 0.9}) {
    const double h = 1e-6;
    auto xp = v1(0.4 + h), xm = v1(0.4 - h);
    const cplx fd = (b_symbol(t, xp, 0.8, xi) - b_symbol(t, xm, 0.8, xi)) / (2 * h);
    EXPECT_LT(std::abs(fd - b_symbol_dx(t, x, xi, 0)), 1e-8);
  }
}

TEST(PtSymbol, NormalizationAndBounds) {
  auto z = v1(0.0);
  EXPECT_DOUBLE_EQ(p_t_symbol(0.0, v1(3.0), 2.0, v1(-1.0)).real(), 1 / std::sqrt(2 * pi));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-20, 20);
  const double cd = 1 / std::sqrt(2 * pi);
  for (int i = 0; i < 200; ++i) {
    auto x = v1(u(rng)), xi = v1(u(rng));
    const double tau = u(rng);
    const double X2 = x[0] * x[0] + xi[0] * xi[0] + tau * tau;
    for (double t : {1e-3, 0.1, 0.5}) EXPECT_LE(std::abs(p_t_symbol(t, x, tau, xi)), cd * std::exp(-0.76 * t * X2) * (1 + 1e-12));
    for (double t : {1.0, 3.0})
      EXPECT_LE(std::abs(p_t_symbol(t, x, tau, xi)), cd * std::exp(-t / 2) * std::exp(-0.48 * X2) * (1 + 1e-12));
  }
  EXPECT_NEAR(std::abs(heat_symbol(0.4, z, 1.0, z) * cd - p_t_symbol(0.4, z, 1.0, z)), 0.0, 1e-16);
}

TEST(SigmaAlpha, IndependentQuadratureAndAsymptotics) {
  auto z = v1(0.0);
  for (double tau : {0.0, 1.0, 3.0}) {
    const cplx ref = es_complex([&](double t) {
                       return cplx(std::pow(t, -0.5) * std::pow(std::cosh(2 * t), -0.5) * std::exp(-t * tau * tau));
                     }) /
                     std::sqrt(pi);
    EXPECT_LT(std::abs(sigma_alpha(z, tau, z, -0.5) - ref), 1e-10 * std::abs(ref));
    // positive power through the derivative route
    const cplx refp = -es_complex([&](double t) {
                        const double p = std::pow(std::cosh(2 * t), -0.5) * std::exp(-t * tau * tau);
                        return cplx(std::pow(t, -0.5) * p * -(std::tanh(2 * t) + tau * tau));
                      }) /
                      std::sqrt(pi);
    EXPECT_LT(std::abs(sigma_alpha(z, tau, z, 0.5) - refp), 1e-9 * std::abs(refp));
  }
  EXPECT_NEAR(std::abs(sigma_alpha(z, 32.0, z, -0.5)) * 32.0, 1.0, 0.1);
  EXPECT_THROW(sigma_alpha(z, 1.0, z, 1.5), Error);
}

TEST(RieszSymbol, ExamplesAndOracle) {
  auto z = v1(0.0);
  EXPECT_EQ(riesz_symbol(0, v1(1.0), 0.0, v1(2.0)), cplx(0.0));
  auto e1 = v1(1.0);
  const cplx ref = es_complex([](double t) {
                     const double sh = std::sinh(t);
                     const cplx q(0.0, -1.0 + (t < 50 ? 2.0 * sh * sh / std::cosh(2 * t) : 1.0));
                     return std::pow(t, -0.5) * q * std::pow(std::cosh(2 * t), -0.5) * std::exp(-0.5 * std::tanh(2 * t));
                   }) /
                   std::sqrt(pi);
  EXPECT_LT(std::abs(riesz_symbol(1, z, 0.0, e1) - ref), 1e-10);
  EXPECT_THROW(riesz_symbol(2, z, 0.0, z), Error);
}

TEST(GmBound, TrivialSymbols) {
  SampleDomain dom;
  auto one = gm_bound_estimate(constant_symbol(1.0), 0.0, dom, 2);
  EXPECT_TRUE(metric_pass(one));
  EXPECT_DOUBLE_EQ(one.metrics[0].value, 1.0);
  SymbolFn a0{[](std::span<const double>, double tau, std::span<const double>) { return cplx(0, tau); }, 1.0, "i tau"};
  auto r = gm_bound_estimate(a0, 1.0, dom, 1);
  EXPECT_TRUE(metric_pass(r));
  EXPECT_LE(r.metrics[0].value, 1.0);
  EXPECT_NEAR(r.metrics[3].value, 1.0, 1e-9);
}

TEST(GmBound, FractionalAndRieszSymbols) {
  SampleDomain dom;
  const auto s = sigma_alpha_symbol(-0.5);
  EXPECT_TRUE(metric_pass(gm_bound_estimate(s, -1.0, dom, 2)));
  EXPECT_TRUE(metric_pass(gm_bound_estimate(s, -1.0, dom, 2, 1, SymbolWeight::kohn_nirenberg)));
  // an order that is too negative is caught by the doubling test
  EXPECT_FALSE(metric_pass(gm_bound_estimate(s, -2.0, dom, 0)));
  for (int j : {0, 1, -1}) EXPECT_TRUE(metric_pass(gm_bound_estimate(riesz_symbol_fn(j), 0.0, dom, 0))) << j;
  EXPECT_THROW(gm_bound_estimate(s, -1.0, dom, 3), Error);
}

class Quantization : public ::testing::Test {
 protected:
  void SetUp() override {
    grid = make_grid(1, 64, 10.0, 24, 25);
    f = sample(grid, [](double r, std::span<const double> x) {
      return cplx(std::exp(-r * r / 2) * hermite_eval(0, x[0]) * (1 + 0.5 * x[0]));
    });
    fu = resample(f, box).samples;
  }
  GridPtr grid;
  Field f;
  UniformBox box{{10.0, 8.0}, {32, 32}};
  UniformSamples fu;
};

TEST_F(Quantization, IdentityAndGuards) {
  auto q = quantize(constant_symbol(1.0), fu);
  EXPECT_LT(rel(q.samples, fu), 1e-10);
  EXPECT_FALSE(q.aliasing_warning);
  auto spike = sample_box(box, [](std::span<const double> z) {
    return cplx(std::abs(z[0]) < 1e-9 && std::abs(z[1]) < 1e-9 ? 1.0 : 0.0);
  });
  EXPECT_TRUE(quantize(constant_symbol(1.0), spike).aliasing_warning);
  UniformBox b3({4.0, 4.0, 4.0}, {8, 8, 8});
  EXPECT_THROW(quantize(constant_symbol(1.0), sample_box(b3, [](std::span<const double>) { return cplx(1.0); })),
               Error);
}

TEST_F(Quantization, FractionalPowerAndRieszAgreeWithSpectralRoutes) {
  auto q = quantize(sigma_alpha_symbol(-0.5, 1e-10), fu);
  EXPECT_LT(rel(q.samples, resample(frac_power(f, -0.5), box).samples), 1e-3);
  for (int j : {0, 1, -1}) {
    auto qr = quantize(riesz_symbol_fn(j, 1e-10), fu);
    EXPECT_LT(rel(qr.samples, resample(riesz(j, f), box).samples), 1e-3) << j;
  }
}

TEST_F(Quantization, CompositionOfNegativePowers) {
  const auto s = sigma_alpha_symbol(-0.5, 1e-10);
  auto twice = quantize(s, quantize(s, fu).samples).samples;
  auto once = quantize(sigma_alpha_symbol(-1.0, 1e-10), fu).samples;
  EXPECT_LT(rel(twice, once), 1e-3);
  EXPECT_LT(rel(twice, resample(frac_power(f, -1.0), box).samples), 1e-3);
}
