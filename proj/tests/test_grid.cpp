#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pharmonic/grid.hpp"
#include "pharmonic/spectral.hpp"

using namespace pharmonic;
using std::numbers::pi;

TEST(Grid, Shapes) {
  auto g = make_grid(1, 64, 10.0, 16, 17);
  EXPECT_EQ(g->size(), 64u * 17u);
  auto g2 = make_grid(2, 32, 8.0, 8, 9);
  EXPECT_EQ(g2->size(), 32u * 9u * 9u);
  EXPECT_EQ(g2->modes.size(), 45u);
  for (double w : g2->weights_x) EXPECT_TRUE(w > 0 && std::isfinite(w));
  EXPECT_NEAR(g->tau[0], -pi * 32 / 10.0, 1e-15);
  EXPECT_EQ(g->rho[0], -10.0);
}

TEST(Grid, RejectsBadParameters) {
  EXPECT_THROW(make_grid(1, 64, 10.0, 16, 16), Error);
  EXPECT_THROW(make_grid(1, 48, 10.0, 16, 17), Error);
  EXPECT_THROW(make_grid(0, 64, 10.0, 16, 17), Error);
  EXPECT_THROW(make_grid(1, 64, -1.0, 16, 17), Error);
  try {
    make_grid(1, 64, 10.0, 16, 16);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_parameter);
  }
}

TEST(Grid, CompensatedWeightsMatchClassical) {
  auto g = make_grid(1, 8, 1.0, 10, 20);
  for (int q = 0; q < 20; ++q) {
    const double x = g->gh.nodes[q];
    EXPECT_NEAR(g->weights_x[q], g->gh.weights[q] * std::exp(x * x), 1e-12 * g->weights_x[q]);
  }
}

TEST(MultiIndexSet, Tables) {
  MultiIndexSet s(2, 3);
  EXPECT_EQ(s.size(), 10u);
  EXPECT_EQ(s[0], (MultiIndex{0, 0}));
  EXPECT_EQ(s[1], (MultiIndex{1, 0}));
  EXPECT_EQ(s[2], (MultiIndex{0, 1}));
  const int m = s.find({1, 1});
  ASSERT_GE(m, 0);
  EXPECT_EQ(s[s.raised(0, m)], (MultiIndex{2, 1}));
  EXPECT_EQ(s[s.lowered(1, m)], (MultiIndex{1, 0}));
  EXPECT_EQ(s.raised(0, s.find({3, 0})), -1);
  EXPECT_EQ(s.lowered(1, s.find({3, 0})), -1);
}

TEST(Sample, ClosedForms) {
  auto g = make_grid(1, 32, 8.0, 8, 9);
  auto one = sample(g, [](double, std::span<const double>) { return cplx(1.0); });
  for (auto v : one.values) EXPECT_EQ(v, cplx(1.0));
  auto zero = sample(g, [](double, std::span<const double> x) { return cplx(0.0 * hermite_eval(0, x[0])); });
  EXPECT_EQ(lp_norm(zero, 2), 0.0);
  auto gauss = sample(g, [](double r, std::span<const double> x) { return cplx(std::exp(-r * r / 2) * hermite_eval(0, x[0])); });
  for (size_t q = 0; q < g->nx; ++q)
    EXPECT_NEAR(gauss.at(5, q).real(), std::exp(-g->rho[5] * g->rho[5] / 2) * hermite_eval(0, g->gh.nodes[q]), 1e-15);
  EXPECT_THROW(sample(g, [](double, std::span<const double>) { return cplx(std::nan("")); }), Error);
}

TEST(LpNorm, Examples) {
  auto g = make_grid(1, 64, 10.0, 16, 17);
  auto f = sample(g, [](double r, std::span<const double> x) {
    return cplx(std::pow(pi, -0.25) * std::exp(-r * r / 2) * hermite_eval(0, x[0]));
  });
  EXPECT_NEAR(lp_norm(f, 2), 1.0, 1e-10);
  auto h0 = sample(g, [](double, std::span<const double> x) { return cplx(hermite_eval(0, x[0])); });
  EXPECT_NEAR(lp_norm(h0, INFINITY), std::pow(pi, -0.25), 1e-15);
  // homogeneity
  EXPECT_NEAR(lp_norm(cplx(-3.5, 1.0) * f, 4), std::abs(cplx(-3.5, 1.0)) * lp_norm(f, 4), 1e-13);
}

TEST(LpNorm, TriangleInequality) {
  auto g = make_grid(1, 32, 8.0, 8, 17);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    Field a(g), b(g);
    for (auto& v : a.values) v = {nd(rng), nd(rng)};
    for (auto& v : b.values) v = {nd(rng), nd(rng)};
    for (double p : {1.0, 2.0, 4.0, double(INFINITY)})
      EXPECT_LE(lp_norm(a + b, p), lp_norm(a, p) + lp_norm(b, p) + 1e-12);
  }
}

TEST(Quadrature, DiscreteOrthonormality) {
  auto g = make_grid(1, 8, 5.0, 32, 33);
  const size_t nm = g->modes.size();
  for (size_t a = 0; a < nm; ++a)
    for (size_t b = 0; b < nm; ++b) {
      double s = 0;
      for (size_t q = 0; q < g->nx; ++q) s += g->weight_flat[q] * g->phi[q * nm + a] * g->phi[q * nm + b];
      EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-12);
    }
}

TEST(UniformBox, Basics) {
  UniformBox box({4.0, 2.0}, {8, 4});
  EXPECT_EQ(box.size(), 32u);
  EXPECT_DOUBLE_EQ(box.step(0), 1.0);
  EXPECT_DOUBLE_EQ(box.coord(1, 0), -2.0);
  EXPECT_THROW(UniformBox({1.0}, {3}), Error);
  auto s = sample_box(box, [](std::span<const double>) { return cplx(2.0); });
  EXPECT_NEAR(lp_norm(s, 2), 2.0 * std::sqrt(32.0), 1e-13);
}

TEST(Resample, BandLimitedMode) {
  auto g = make_grid(1, 32, 10.0, 12, 13);
  const double t1 = g->tau[17];
  auto f = sample(g, [&](double r, std::span<const double> x) { return std::polar(hermite_eval(0, x[0]), t1 * r); });
  UniformBox box({10.0, 5.0}, {40, 30});
  auto out = resample(f, box);
  double err = 0;
  for (size_t i = 0; i < box.size(); ++i) {
    auto z = box.point(i);
    err = std::max(err, std::abs(out.samples.values[i] - std::polar(hermite_eval(0, z[1]), t1 * z[0])));
  }
  EXPECT_LT(err, 1e-8);
  EXPECT_FALSE(out.truncation_warning);
  auto zero = resample(Field(g), box);
  for (auto v : zero.samples.values) EXPECT_EQ(v, cplx{});
}

TEST(Resample, GaussianOnBox) {
  auto g = make_grid(1, 64, 12.0, 40, 41);
  auto gauss = [](double r, double x) { return std::exp(-r * r / 2 - x * x / 3); };
  auto f = sample(g, [&](double r, std::span<const double> x) { return cplx(gauss(r, x[0])); });
  UniformBox box({6.0, 6.0}, {128, 128});
  auto out = resample(f, box);
  double err = 0;
  for (size_t i = 0; i < box.size(); ++i) {
    auto z = box.point(i);
    err = std::max(err, std::abs(out.samples.values[i] - gauss(z[0], z[1])));
  }
  EXPECT_LT(err, 1e-6);
}
