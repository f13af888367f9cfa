#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pharmonic/inequalities.hpp"

using namespace pharmonic;

namespace {

GridPtr grid1() { return make_grid(1, 64, 10.0, 20, 48); }
GridPtr grid3() { return make_grid(3, 16, 6.0, 10, 12); }

const Metric& metric(const Report& r, const std::string& name) {
  for (const auto& m : r.metrics)
    if (m.name == name) return m;
  throw std::runtime_error("no metric " + name);
}

TestFamily small_family(std::vector<std::string> kinds = {"gaussian", "mixture", "slow-decay"}) {
  TestFamily f;
  f.kinds = std::move(kinds);
  f.count = 2;
  return f;
}

Field gaussian_at(const GridPtr& g, double r0) {
  return sample(g, [r0](double r, std::span<const double> x) {
    return cplx(std::exp(-(r - r0) * (r - r0) / 2) * hermite_eval(0, x[0]));
  });
}

}  // namespace

TEST(IneqCase, ExponentAdmissibility) {
  EXPECT_NO_THROW((IneqCase{IneqTag::hls, 1.0, 2.0, 4.0, 1}.validate()));
  EXPECT_NO_THROW((IneqCase{IneqTag::hls, 0.5, 2.0, 4.0, 1}.validate()));  // critical
  try {
    IneqCase{IneqTag::hls, 0.5, 2.0, 8.0, 1}.validate();
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("1/p - alpha/(d+1) <= 1/q"), std::string::npos) << e.what();
  }
  EXPECT_THROW((IneqCase{IneqTag::hls, 0.5, 2.0, 2.0, 1}.validate()), Error);
  EXPECT_THROW((IneqCase{IneqTag::hls, 2.5, 2.0, 4.0, 1}.validate()), Error);
  EXPECT_NO_THROW((IneqCase{IneqTag::gns, 1.0, 2.0, 2.5, 3}.validate()));
  EXPECT_THROW((IneqCase{IneqTag::gns, 1.0, 2.0, 2.5, 1}.validate()), Error);
  EXPECT_THROW((IneqCase{IneqTag::gns, 1.0, 2.0, 5.0, 3}.validate()), Error);
  EXPECT_NO_THROW((IneqCase{IneqTag::hardy, 0.75, 2.0, 2.0, 1}.validate()));
  EXPECT_THROW((IneqCase{IneqTag::hardy, 1.0, 2.0, 2.0, 1}.validate()), Error);
}

TEST(EndpointHelpers, ClosedFormHeatAndPotentialOfGaussian) {
  auto g = grid1();
  for (double w : {1.0, 0.95}) {
    const Field f = sample(g, [w](double r, std::span<const double> x) {
      return cplx(std::exp(-(r * r + x[0] * x[0]) / (2 * w * w)) / (2 * std::numbers::pi * w * w));
    });
    for (double t : {0.05, 0.6}) {
      const Field h = heat_spectral(f, t);
      double err = 0.0, mx = 0.0;
      for (size_t q = 0; q < g->nx; ++q)
        for (int i = 0; i < g->N_rho; ++i) {
          const double ref = ineqdetail::heat_of_gaussian(t, w, g->rho[static_cast<size_t>(i)], g->gh.nodes[q]);
          err = std::max(err, std::abs(h.at(static_cast<size_t>(i), q).real() - ref));
          mx = std::max(mx, ref);
        }
      // periodic images at rho = +-20 contribute about exp(-100 / (2 (w^2 + 2t)))
      EXPECT_LT(err, 1e-9 * mx) << w << " " << t;
    }
    const Field u = frac_power(f, -0.25);
    for (size_t q : {size_t{10}, size_t{24}, size_t{30}})
      for (int i : {20, 32, 40}) {
        const double ref = ineqdetail::potential_of_gaussian(0.25, w, g->rho[static_cast<size_t>(i)], g->gh.nodes[q], 1e-11);
        EXPECT_NEAR(u.at(static_cast<size_t>(i), q).real(), ref, 1e-6 * std::abs(ref) + 1e-12);
      }
  }
}

TEST(Hls, CriticalAndSubcriticalPass) {
  auto g = grid1();
  const auto r = hls_check(0.5, 2.0, 4.0, small_family(), g);
  EXPECT_TRUE(r.all_pass());
  EXPECT_LT(metric(r, "route_gate_rel_l2").value, 1e-3);
  EXPECT_GT(metric(r, "pointwise_domination_constant").value, 0.0);
  IneqOptions spectral;
  spectral.kernel_route = false;
  const auto s = hls_check(1.0, 2.0, 4.0, small_family(), g, spectral);
  EXPECT_TRUE(s.all_pass());
  EXPECT_THROW(hls_check(0.5, 2.0, 8.0, small_family(), g), Error);
}

TEST(Hls, ShiftedByTwoIsDominated) {
  auto g = grid1();
  const auto fam = small_family({"gaussian"});
  IneqOptions o;
  o.kernel_route = false;
  const auto plain = hls_check(0.5, 2.0, 4.0, fam, g, o);
  const auto shifted = shifted_hls_check(0.5, 2.0, 4.0, 2.0, fam, g);
  EXPECT_TRUE(shifted.all_pass());
  EXPECT_LE(metric(shifted, "sup_hls_ratio_enlarged").value, metric(plain, "sup_hls_ratio_enlarged").value);
  EXPECT_THROW(shifted_hls_check(0.5, 2.0, 4.0, -2.0, fam, g), Error);
  EXPECT_THROW(shifted_hls_check(0.5, 2.0, 4.0, 1.0, fam, g), Error);
}

TEST(Hls, ShiftedByMinusTwoInThreeDimensions) {
  TestFamily fam = small_family();
  fam.count = 1;
  const auto r = shifted_hls_check(0.5, 2.0, 1.0 / (0.5 - 0.125), -2.0, fam, grid3());
  EXPECT_TRUE(r.all_pass());
}

TEST(Gns, GroundModeAndFamily) {
  auto g = grid3();
  const Field f = sample(g, [](double, std::span<const double> x) { return cplx(phi_mu({0, 0, 0}, x)); });
  const UniformBox box = ineqdetail::auto_box({&f}, 0.5);
  // A_j Phi_0 = sqrt 2 Phi_{e_j} for j = 1..3; A_0 and the lowering ones vanish
  EXPECT_NEAR(gns_ratio(f, 2.0, 2.0, box), 1.0 / (3.0 * std::sqrt(2.0)), 1e-12);
  const auto r = gns_check(2.0, 2.5, small_family(), g);
  EXPECT_TRUE(r.all_pass());
  EXPECT_GE(metric(r, "sup_gns_ratio_enlarged").value, metric(r, "sup_gns_ratio_base").value);
  const auto z = gns_check(2.0, 2.5, std::vector<Field>{Field(g), f}, 2);
  EXPECT_TRUE(std::isfinite(metric(z, "sup_gns_ratio_base").value));
  EXPECT_THROW(gns_check(2.0, 2.5, small_family(), grid1()), Error);
}

TEST(Hardy, RatiosAndGradientForm) {
  auto g = grid1();
  const auto r = hardy_check(0.75, 2.0, small_family(), g);
  EXPECT_TRUE(r.all_pass());
  // the weight peaks at the origin, and H-norms do not see rho-shifts
  const auto centred = hardy_check(0.75, 2.0, std::vector<Field>{gaussian_at(g, 0.0)}, 1);
  const auto away = hardy_check(0.75, 2.0, std::vector<Field>{gaussian_at(g, 3.0)}, 1);
  EXPECT_LT(metric(away, "sup_hardy_ratio_base").value, metric(centred, "sup_hardy_ratio_base").value);
  EXPECT_THROW(hardy_check(1.0, 2.0, small_family(), g), Error);
  TestFamily one = small_family();
  one.count = 1;
  const auto r3 = hardy_check(1.0, 2.0, one, grid3());
  EXPECT_TRUE(r3.all_pass());
  EXPECT_NO_THROW(metric(r3, "sup_hardy_gradient_ratio_enlarged"));
}

TEST(HlsEndpoint, L1RangeThreshold) {
  for (auto [q, v] : {std::pair{1.2, Verdict::bounded}, std::pair{4.0 / 3.0, Verdict::divergent},
                      std::pair{1.5, Verdict::divergent}}) {
    const auto r = hls_endpoint_demo(EndpointRange::L1, 0.5, 1, q);
    EXPECT_TRUE(r.all_pass()) << q;
    const double tail = metric(r, "tail_increment_ratio").value;
    if (v == Verdict::bounded)
      EXPECT_LT(tail, 0.95);
    else
      EXPECT_GE(tail, 0.95);
  }
}

TEST(HlsEndpoint, LinfRangeThreshold) {
  EndpointOptions o;
  o.first_level = 2;
  o.levels = 12;
  const auto at = hls_endpoint_demo(EndpointRange::Linf, 0.5, 1, 4.0, o);
  EXPECT_TRUE(at.all_pass());
  EXPECT_GE(metric(at, "tail_increment_ratio").value, 0.95);
  const auto above = hls_endpoint_demo(EndpointRange::Linf, 0.5, 1, 5.0, o);
  EXPECT_TRUE(above.all_pass());
  EXPECT_LT(metric(above, "tail_increment_ratio").value, 0.95);
  EXPECT_THROW(hls_endpoint_demo(EndpointRange::Linf, 0.5, 3, 4.0, o), Error);
  o.levels = 3;
  EXPECT_THROW(hls_endpoint_demo(EndpointRange::L1, 0.5, 1, 1.2, o), Error);
}
