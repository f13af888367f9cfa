#pragma once

// Hardy-Littlewood-Sobolev, Gagliardo-Nirenberg-Sobolev and Hardy
// inequalities for H_par as empirical suprema over test families, and the
// two endpoint demonstrations where boundedness is lost.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pharmonic/error.hpp"
#include "pharmonic/heat_kernel.hpp"
#include "pharmonic/ladder.hpp"
#include "pharmonic/parallel.hpp"
#include "pharmonic/quadrature.hpp"
#include "pharmonic/report.hpp"
#include "pharmonic/sobolev.hpp"
#include "pharmonic/spectral.hpp"

namespace pharmonic {

enum class IneqTag { hls, hls_endpoint_1, hls_endpoint_inf, gns, hardy };
enum class Verdict { bounded, divergent };

inline const char* to_string(Verdict v) { return v == Verdict::bounded ? "bounded" : "divergent"; }

/// One inequality run: the tag decides which of alpha, p, q matter.
struct IneqCase {
  IneqTag tag = IneqTag::hls;
  double alpha = 0.5;
  double p = 2.0;
  double q = 4.0;
  int d = 1;
  std::string family = "mixed";
  Verdict expected = Verdict::bounded;

  void validate() const {
    const double D = d + 1.0;
    require(d >= 1, Errc::invalid_parameter, "dimension d must be at least 1");
    auto fmt = [](double v) { return format_number(v); };
    auto sobolev_pair = [&](double order) {
      require(p > 1.0 && std::isfinite(p), Errc::invalid_parameter, "p must lie in (1, inf)");
      require(q > 1.0 && std::isfinite(q), Errc::invalid_parameter, "q must lie in (1, inf)");
      require(1.0 / p - order / D <= 1.0 / q + 1e-14, Errc::invalid_parameter,
              "exponent relation 1/p - alpha/(d+1) <= 1/q violated: 1/p - alpha/(d+1) = " +
                  fmt(1.0 / p - order / D) + " > 1/q = " + fmt(1.0 / q));
      require(1.0 / q < 1.0 / p, Errc::invalid_parameter,
              "exponent relation 1/q < 1/p violated: 1/q = " + fmt(1.0 / q) + ", 1/p = " + fmt(1.0 / p));
    };
    switch (tag) {
      case IneqTag::hls:
        require(alpha > 0.0 && alpha < D, Errc::invalid_parameter, "HLS needs 0 < alpha < d + 1");
        sobolev_pair(alpha);
        break;
      case IneqTag::gns:
        require(d >= 3, Errc::domain, "the GNS inequality is checked for d >= 3");
        sobolev_pair(1.0);
        break;
      case IneqTag::hardy:
        require(p == 2.0 || p == 4.0, Errc::invalid_parameter, "Hardy check supports p in {2, 4}");
        require(alpha > 0.0 && alpha < D / p, Errc::invalid_parameter, "Hardy needs 0 < alpha < (d+1)/p");
        break;
      case IneqTag::hls_endpoint_1:
      case IneqTag::hls_endpoint_inf:
        require(alpha > 0.0 && alpha < D, Errc::invalid_parameter, "endpoint demo needs 0 < alpha < d + 1");
        require(d == 1, Errc::invalid_parameter, "endpoint demos integrate in polar coordinates, d = 1 only");
        break;
    }
  }
};

struct IneqOptions {
  double box_step = 0.0;        // 0 picks 0.125 for d = 1, 0.5 otherwise
  double kernel_tol = 1e-5;
  double route_gate = 1e-3;     // kernel vs spectral, relative L2
  double family_growth = 1.5;   // sup over 4x family / sup over family
  double resolution_change = 0.5;  // |sup at step/2 over sup at step - 1|
  bool kernel_route = true;
};

namespace ineqdetail {

inline double default_step(int d, const IneqOptions& o) { return o.box_step > 0 ? o.box_step : (d == 1 ? 0.125 : 0.5); }

/// Box covering the rho-period and the x-extent where any of the fields
/// exceeds 1e-8 of its maximum, plus one unit.
inline UniformBox auto_box(const std::vector<const Field*>& fields, double step) {
  const Grid& g = *fields.front()->grid;
  double reach = 0.0;
  for (const Field* f : fields) {
    double mx = 0.0;
    for (const auto& v : f->values) mx = std::max(mx, std::abs(v));
    for (size_t q = 0; q < g.nx; ++q) {
      double col = 0.0;
      for (int i = 0; i < g.N_rho; ++i) col = std::max(col, std::abs(f->at(static_cast<size_t>(i), q)));
      if (col <= 1e-8 * mx) continue;
      for (double x : g.x_point(q)) reach = std::max(reach, std::abs(x));
    }
  }
  const double Rx = std::max(2.0, reach + 1.0);
  auto count = [&](double R) { return 2 * static_cast<int>(std::ceil(R / step)); };
  std::vector<double> R{g.L_rho};
  std::vector<int> n{count(g.L_rho)};
  for (int j = 0; j < g.d; ++j) {
    R.push_back(count(Rx) * step / 2);
    n.push_back(count(Rx));
  }
  return UniformBox(R, n);
}

inline double box_norm(const Field& f, const UniformBox& box, double p,
                       const std::function<double(std::span<const double>)>& w = {}) {
  return lp_norm(resample(f, box).samples, p, w);
}

/// Exact on the grid for p = 2, box quadrature otherwise.
inline double lp_any(const Field& f, const UniformBox& box, double p) {
  return p == 2.0 ? lp_norm(f, 2.0) : box_norm(f, box, p);
}

inline bool nonnegative(const Field& f) {
  double mx = 0.0, mn = 0.0;
  for (const auto& v : f.values) {
    mx = std::max(mx, v.real());
    mn = std::min(mn, v.real());
  }
  return mx > 0.0 && mn >= -1e-10 * mx;
}

/// int |f(z')| |z - z'|^{alpha-2} dz' over |z - z'| <= rmax, d = 1, in
/// the variable s = r^alpha, which removes the singularity.
inline double riesz_potential_abs(const SpectralCoeffs& c, double rho, double x, double alpha, double rmax) {
  constexpr int kAngles = 64;
  const double smax = std::pow(rmax, alpha);
  const int panels = 6;
  double total = 0.0;
  for (int pnl = 0; pnl < panels; ++pnl) {
    const double a = smax * pnl / panels, b = smax * (pnl + 1) / panels;
    total += boost::math::quadrature::gauss<double, 16>::integrate(
        [&](double s) {
          const double r = std::pow(s, 1.0 / alpha);
          double ring = 0.0;
          for (int k = 0; k < kAngles; ++k) {
            const double th = 2 * std::numbers::pi * k / kAngles;
            const double xp = x + r * std::sin(th);
            ring += std::abs(series_value(c, rho + r * std::cos(th), std::span<const double>(&xp, 1)));
          }
          return ring * 2 * std::numbers::pi / kAngles;
        },
        a, b);
  }
  return total / alpha;
}

/// sup over members with the base/enlarged split and a resolution re-run
/// on the base members. ratio(f, box) must return (numerator, denominator).
struct SupResult {
  std::vector<double> ratios, refined;
};

template <class Ratio>
SupResult family_sups(const std::vector<Field>& members, size_t base, Ratio&& ratio) {
  SupResult out;
  auto rows = parallel_map<std::array<double, 2>>(members.size(), [&](size_t i) {
    return std::array<double, 2>{ratio(members[i], 1), i < base ? ratio(members[i], 2) : NAN};
  });
  for (const auto& r : rows) {
    out.ratios.push_back(r[0]);
    out.refined.push_back(r[1]);
  }
  return out;
}

inline void record_sups(Report& r, const std::string& what, const SupResult& s, size_t base,
                        const IneqOptions& opt) {
  sobdetail::sup_stability(r, what, s.ratios, base, opt.family_growth);
  const auto a = sobdetail::range_of(s.ratios, base), b = sobdetail::range_of(s.refined, base);
  r.info("sup_" + what + "_refined_box", b.used ? b.hi : NAN);
  r.at_most("resolution_change_" + what, a.used && a.hi > 0 ? std::abs(b.hi / a.hi - 1.0) : NAN,
            opt.resolution_change, "box step halved on the base family");
}

inline void grid_params(Report& r, const GridPtr& g, size_t base, size_t total, double step) {
  sobdetail::refinement_params(r, g, base, total);
  r.param("box_step", step);
}

inline double ratio_or_nan(double num, double den) { return den > 0.0 ? num / den : NAN; }

}  // namespace ineqdetail

/// sup ||(H + a)^{-alpha/2} f||_q / ||f||_p over the members. The kernel
/// route supplies the field whose L^q norm is taken; the spectral route is
/// the consistency gate.
inline Report hls_core(double alpha, double p, double q, double shift, const std::vector<Field>& members,
                       size_t base, const IneqOptions& opt = {}) {
  require(!members.empty() && base > 0 && base <= members.size(), Errc::invalid_parameter,
          "base family size out of range");
  const GridPtr g = members.front().grid;
  IneqCase{IneqTag::hls, alpha, p, q, g->d}.validate();
  if (shift != 0.0) check_kernel_shift(g->d, alpha / 2, shift);
  const double step = ineqdetail::default_step(g->d, opt);
  struct Member {
    Field u;
    double gate = 0.0;
  };
  auto images = parallel_map<Member>(members.size(), [&](size_t i) {
    const Field& f = members[i];
    Field us = inverse(frac_power(forward(f), -alpha / 2, shift));
    if (!opt.kernel_route) return Member{us, 0.0};
    Field uk = frac_power_kernel(f, -alpha / 2, opt.kernel_tol, shift);
    const double gate = relative_l2(uk, us);
    return Member{std::move(uk), gate};
  });
  double worst_gate = 0.0;
  for (const auto& m : images) worst_gate = std::max(worst_gate, m.gate);
  const auto sups = ineqdetail::family_sups(members, base, [&](const Field& f, int refine) {
    const size_t i = static_cast<size_t>(&f - members.data());
    const UniformBox box = ineqdetail::auto_box({&f, &images[i].u}, step / refine);
    return ineqdetail::ratio_or_nan(ineqdetail::box_norm(images[i].u, box, q), ineqdetail::box_norm(f, box, p));
  });
  Report r;
  r.suite = "hls";
  ineqdetail::grid_params(r, g, base, members.size(), step);
  r.param("alpha", alpha);
  r.param("p", p);
  r.param("q", q);
  r.param("shift", shift);
  r.param("route", opt.kernel_route ? "kernel" : "spectral");
  r.param("critical", std::abs(1.0 / p - alpha / (g->d + 1.0) - 1.0 / q) < 1e-12 ? "yes" : "no");
  if (opt.kernel_route) r.at_most("route_gate_rel_l2", worst_gate, opt.route_gate, "kernel vs spectral route");
  ineqdetail::record_sups(r, "hls_ratio", sups, base, opt);
  // (H + a)^{-alpha/2} f(z) <= C int |f(z')| |z - z'|^{alpha - (d+1)} dz' for f >= 0
  if (g->d == 1 && shift == 0.0) {
    const std::array<std::array<double, 2>, 4> pts{{{0.0, 0.0}, {1.0, 0.5}, {-2.0, 1.0}, {0.5, -1.5}}};
    double C = 0.0;
    int used = 0;
    for (size_t i = 0; i < members.size(); ++i) {
      if (!ineqdetail::nonnegative(members[i]) || used >= 4) continue;
      ++used;
      const SpectralCoeffs cf = forward(members[i]), cu = forward(images[i].u);
      for (const auto& z : pts) {
        const double num = series_value(cu, z[0], std::span<const double>(&z[1], 1)).real();
        const double den = ineqdetail::riesz_potential_abs(cf, z[0], z[1], alpha, g->L_rho);
        C = std::max(C, num / den);
      }
    }
    if (used > 0) r.info("pointwise_domination_constant", C, "sup of H^{-alpha/2}f / int |f| |z-z'|^{alpha-2}");
  }
  return r;
}

inline Report hls_check(double alpha, double p, double q, const TestFamily& fam, const GridPtr& g,
                        const IneqOptions& opt = {}) {
  auto r = hls_core(alpha, p, q, 0.0, fam.with_count(fam.count * kFamilyEnlargement).members(g),
                    static_cast<size_t>(fam.count), opt);
  sobdetail::family_params(r, fam);
  return r;
}

/// The same supremum for (H_par + a)^{-alpha/2}, a = +2 or a = -2 (d >= 3).
inline Report shifted_hls_check(double alpha, double p, double q, double a, const TestFamily& fam,
                                const GridPtr& g, const IneqOptions& opt = {}) {
  require(a == 2.0 || a == -2.0, Errc::invalid_parameter, "shift must be +2 or -2");
  require(a == 2.0 || g->d >= 3, Errc::domain, "(H_par - 2)^{-alpha/2} is only controlled for d >= 3");
  auto r = hls_core(alpha, p, q, a, fam.with_count(fam.count * kFamilyEnlargement).members(g),
                    static_cast<size_t>(fam.count), opt);
  r.suite = "hls-shifted";
  sobdetail::family_params(r, fam);
  return r;
}

/// ||f||_q / sum_j ||A_j f||_p, with the L^q norm on a box.
inline double gns_ratio(const Field& f, double p, double q, const UniformBox& box) {
  double grad = 0.0;
  for (const auto& a : grad_H(forward(f))) grad += ineqdetail::lp_any(inverse(a), box, p);
  const double num = q == 2.0 ? lp_norm(f, 2.0) : ineqdetail::box_norm(f, box, q);
  return ineqdetail::ratio_or_nan(num, grad);
}

inline Report gns_check(double p, double q, const std::vector<Field>& members, size_t base,
                        const IneqOptions& opt = {}) {
  require(!members.empty() && base > 0 && base <= members.size(), Errc::invalid_parameter,
          "base family size out of range");
  const GridPtr g = members.front().grid;
  IneqCase{IneqTag::gns, 1.0, p, q, g->d}.validate();
  const double step = ineqdetail::default_step(g->d, opt);
  const auto sups = ineqdetail::family_sups(members, base, [&](const Field& f, int refine) {
    return gns_ratio(f, p, q, ineqdetail::auto_box({&f}, step / refine));
  });
  Report r;
  r.suite = "gns";
  ineqdetail::grid_params(r, g, base, members.size(), step);
  r.param("p", p);
  r.param("q", q);
  ineqdetail::record_sups(r, "gns_ratio", sups, base, opt);
  return r;
}

inline Report gns_check(double p, double q, const TestFamily& fam, const GridPtr& g, const IneqOptions& opt = {}) {
  auto r = gns_check(p, q, fam.with_count(fam.count * kFamilyEnlargement).members(g), static_cast<size_t>(fam.count),
                     opt);
  sobdetail::family_params(r, fam);
  return r;
}

namespace ineqdetail {
/// |z|^{-power p}, zero on the origin cell.
inline std::function<double(std::span<const double>)> singular_weight(double power, double p, double step) {
  return [=](std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    const double r = std::sqrt(s);
    return r < 0.5 * step ? 0.0 : std::pow(r, -power * p);
  };
}
}  // namespace ineqdetail

/// sup || |z|^{-alpha} f ||_p / ||H^{alpha/2} f||_p; for alpha = 1 and
/// p < d + 1 also sup || |z|^{-1} f ||_p / sum_j ||A_j f||_p.
inline Report hardy_check(double alpha, double p, const std::vector<Field>& members, size_t base,
                          const IneqOptions& opt = {}) {
  require(!members.empty() && base > 0 && base <= members.size(), Errc::invalid_parameter,
          "base family size out of range");
  const GridPtr g = members.front().grid;
  IneqCase{IneqTag::hardy, alpha, p, p, g->d}.validate();
  const double step = ineqdetail::default_step(g->d, opt);
  const bool gradient_form = alpha == 1.0 && p < g->d + 1.0;
  auto weighted = [&](const Field& f, const UniformBox& box, double s) {
    return ineqdetail::box_norm(f, box, p, ineqdetail::singular_weight(alpha, p, s));
  };
  const auto sups = ineqdetail::family_sups(members, base, [&](const Field& f, int refine) {
    const UniformBox box = ineqdetail::auto_box({&f}, step / refine);
    const Field h = inverse(frac_power(forward(f), alpha / 2));
    return ineqdetail::ratio_or_nan(weighted(f, box, step / refine), ineqdetail::lp_any(h, box, p));
  });
  Report r;
  r.suite = "hardy";
  ineqdetail::grid_params(r, g, base, members.size(), step);
  r.param("alpha", alpha);
  r.param("p", p);
  ineqdetail::record_sups(r, "hardy_ratio", sups, base, opt);
  if (gradient_form) {
    const auto gs = ineqdetail::family_sups(members, base, [&](const Field& f, int refine) {
      const UniformBox box = ineqdetail::auto_box({&f}, step / refine);
      double grad = 0.0;
      for (const auto& a : grad_H(forward(f))) grad += ineqdetail::lp_any(inverse(a), box, p);
      return ineqdetail::ratio_or_nan(weighted(f, box, step / refine), grad);
    });
    ineqdetail::record_sups(r, "hardy_gradient_ratio", gs, base, opt);
  }
  return r;
}

inline Report hardy_check(double alpha, double p, const TestFamily& fam, const GridPtr& g,
                          const IneqOptions& opt = {}) {
  auto r = hardy_check(alpha, p, fam.with_count(fam.count * kFamilyEnlargement).members(g),
                       static_cast<size_t>(fam.count), opt);
  sobdetail::family_params(r, fam);
  return r;
}

// ---------------------------------------------------------------------------
// Endpoint demonstrations (d = 1)

enum class EndpointRange { L1, Linf };

struct EndpointOptions {
  int first_level = 1;
  int levels = 8;             // dyadic scales 2^{-first_level} ...
  double epsilon = 0.1;       // log exponent margin of the L^inf-range profile
  double bounded_ratio = 0.95;  // tail increment ratio below this counts as bounded
  double tol = 1e-9;
};

namespace ineqdetail {

/// e^{-tH} applied to the unit-mass Gaussian of width w at the origin
/// (d = 1), in closed form: heat flow in rho and Mehler in x.
inline double heat_of_gaussian(double t, double w, double rho, double x) {
  const double w2 = w * w, s = w2 + 2 * t;
  const double C = std::cosh(2 * t), S = std::sinh(2 * t);
  const double rho_part = std::exp(-rho * rho / (2 * s)) / std::sqrt(2 * std::numbers::pi * s);
  const double x_part = std::exp(-0.5 * x * x * (S * w2 + C) / (C * w2 + S)) / std::sqrt(2 * std::numbers::pi * (C * w2 + S));
  return rho_part * x_part;
}

/// H^{-beta} of that Gaussian at (rho, x).
inline double potential_of_gaussian(double beta, double w, double rho, double x, double tol) {
  LogTrapezoidOptions o;
  o.tol = tol;
  const auto r = integrate_log_trapezoid<double>(
      [&](double t) { return std::exp((beta - 1) * std::log(t)) * heat_of_gaussian(t, w, rho, x); }, o);
  return r.value / std::tgamma(beta);
}

/// 4 int_0^{pi/2} int_0^inf F(r cos th, r sin th) r dr dth for F even in
/// both variables.
template <class F>
double quadrant_polar_integral(F&& f, double tol) {
  LogTrapezoidOptions o;
  o.tol = tol;
  o.s_limit = 40.0;
  const auto r = integrate_log_trapezoid<double>(
      [&](double rad) {
        return rad * boost::math::quadrature::gauss<double, 20>::integrate(
                         [&](double th) { return f(rad * std::cos(th), rad * std::sin(th)); }, 0.0,
                         std::numbers::pi / 2);
      },
      o);
  return 4.0 * r.value;
}

/// int over the annulus a <= |z| <= b of F(z), F even in both variables.
template <class F>
double annulus_integral(F&& f, double a, double b) {
  return 4.0 * boost::math::quadrature::gauss<double, 10>::integrate(
                   [&](double s) {
                     const double rad = std::exp(s);
                     return rad * rad *
                            boost::math::quadrature::gauss<double, 12>::integrate(
                                [&](double th) { return f(rad * std::cos(th), rad * std::sin(th)); }, 0.0,
                                std::numbers::pi / 2);
                   },
                   std::log(a), std::log(b));
}

struct ScaleSeries {
  std::vector<double> values;
  double tail_ratio = NAN;
  bool monotone = true;
};

inline ScaleSeries analyze_series(std::vector<double> v) {
  ScaleSeries s;
  s.values = std::move(v);
  const size_t n = s.values.size();
  for (size_t i = 1; i < n; ++i) s.monotone = s.monotone && s.values[i] > s.values[i - 1];
  if (n >= 3) {
    const double i1 = s.values[n - 1] - s.values[n - 2], i0 = s.values[n - 2] - s.values[n - 3];
    s.tail_ratio = i0 != 0.0 ? std::abs(i1 / i0) : 0.0;
  }
  return s;
}

}  // namespace ineqdetail

/// L1-range: ||H^{-alpha/2} f_w||_q^q along unit-mass Gaussians of width
/// w = 2^{-k}, divergent iff q >= 2/(2 - alpha). Linf-range: H^{-alpha/2} f(0)
/// for the profile |z|^{-2/p} (log 1/|z|)^{-(1+eps)/p} on |z| <= 1/2 cut off
/// inside |z| = 2^{-k}, divergent iff p <= 2/alpha. "Bounded" means the
/// increments between scales shrink geometrically (tail ratio below the
/// configured bound); each run carries a smooth control.
inline Report hls_endpoint_demo(EndpointRange which, double alpha, int d, double exponent,
                                const EndpointOptions& opt = {}) {
  IneqCase{which == EndpointRange::L1 ? IneqTag::hls_endpoint_1 : IneqTag::hls_endpoint_inf, alpha, exponent,
           exponent, d}
      .validate();
  require(exponent > 1.0 && std::isfinite(exponent), Errc::invalid_parameter, "exponent must lie in (1, inf)");
  require(opt.levels >= 4, Errc::invalid_parameter, "at least four dyadic levels are needed");
  const double D = d + 1.0, beta = alpha / 2;
  Report r;
  r.suite = "hls-endpoint";
  r.param("range", which == EndpointRange::L1 ? "L1" : "Linf");
  r.param("d", d);
  r.param("alpha", alpha);
  r.param(which == EndpointRange::L1 ? "q" : "p", exponent);
  r.param("levels", opt.levels);
  std::vector<int> ks(static_cast<size_t>(opt.levels));
  for (int i = 0; i < opt.levels; ++i) ks[static_cast<size_t>(i)] = opt.first_level + i;
  Verdict predicted;
  std::vector<double> values, control;
  if (which == EndpointRange::L1) {
    const double q = exponent, qstar = D / (D - alpha);
    r.param("threshold_q", qstar);
    predicted = q >= qstar - 1e-12 ? Verdict::divergent : Verdict::bounded;
    values = parallel_map<double>(ks.size(), [&](size_t i) {
      const double w = std::ldexp(1.0, -ks[i]);
      return ineqdetail::quadrant_polar_integral(
          [&](double rho, double x) { return std::pow(ineqdetail::potential_of_gaussian(beta, w, rho, x, opt.tol), q); },
          opt.tol * 10);
    });
    // control: a fixed smooth Gaussian, whose potential has every moment
    control.push_back(ineqdetail::quadrant_polar_integral(
        [&](double rho, double x) { return std::pow(ineqdetail::potential_of_gaussian(beta, 1.0, rho, x, opt.tol), q); },
        opt.tol * 10));
  } else {
    const double p = exponent, pstar = D / alpha;
    r.param("threshold_p", pstar);
    r.param("epsilon", opt.epsilon);
    predicted = p <= pstar + 1e-12 ? Verdict::divergent : Verdict::bounded;
    const Point origin{0.0, {0.0}};
    TQuadrature tq;
    tq.tol = opt.tol;
    auto kernel = [&](double rho, double x) { return k_alpha_unchecked(origin, Point{rho, {x}}, beta, 0.0, tq).value; };
    auto profile = [&](double rho, double x) {
      const double z = std::hypot(rho, x);
      return std::pow(z, -D / p) * std::pow(std::log(1 / z), -(1 + opt.epsilon) / p);
    };
    auto smooth = [&](double rho, double x) { return std::exp(-(rho * rho + x * x)); };
    // annuli [2^{-k}, 2^{-k+1}] from |z| = 1/2 inwards
    const int deepest = ks.back();
    auto rings = parallel_map<std::array<double, 2>>(static_cast<size_t>(deepest - 1), [&](size_t i) {
      const double b = std::ldexp(1.0, -static_cast<int>(i) - 1), a = b / 2;
      return std::array<double, 2>{
          ineqdetail::annulus_integral([&](double rho, double x) { return kernel(rho, x) * profile(rho, x); }, a, b),
          ineqdetail::annulus_integral([&](double rho, double x) { return kernel(rho, x) * smooth(rho, x); }, a, b)};
    });
    double acc = 0.0, acc_c = 0.0;
    size_t next = 0;
    for (size_t i = 0; i < rings.size(); ++i) {
      acc += rings[i][0];
      acc_c += rings[i][1];
      const int cutoff_level = static_cast<int>(i) + 2;  // inner radius 2^{-cutoff_level}
      if (next < ks.size() && cutoff_level == ks[next]) {
        values.push_back(acc);
        control.push_back(acc_c);
        ++next;
      }
    }
    require(values.size() == ks.size(), Errc::invalid_parameter, "Linf-range levels must start at k >= 2");
  }
  const auto s = ineqdetail::analyze_series(values);
  for (size_t i = 0; i < ks.size(); ++i) r.info("value_k" + std::to_string(ks[i]), values[i]);
  r.info("tail_increment_ratio", s.tail_ratio, "|increment_last / increment_previous|");
  const Verdict observed = s.tail_ratio < opt.bounded_ratio ? Verdict::bounded : Verdict::divergent;
  r.param("predicted", to_string(predicted));
  r.param("observed", to_string(observed));
  r.check("verdict_matches_threshold", observed == predicted,
          std::string("predicted ") + to_string(predicted) + ", observed " + to_string(observed));
  if (predicted == Verdict::divergent)
    r.check("monotone_growth", s.monotone, s.monotone ? "" : "plateau or dip: resolution insufficient");
  if (control.size() == 1) {
    r.at_most("control_value", control[0], INFINITY, "fixed smooth Gaussian");
  } else {
    const auto c = ineqdetail::analyze_series(control);
    r.info("control_tail_increment_ratio", c.tail_ratio);
    r.check("control_bounded", c.tail_ratio < opt.bounded_ratio, "smooth input must stay bounded");
  }
  return r;
}

}  // namespace pharmonic
