#pragma once

// Physical-space route to the heat semigroup and to fractional powers:
// the Mehler-type kernel E(t, z, z'), its t-integrals K_alpha, M_alpha,
// N_alpha, the comparison function Psi_alpha, and operators applied by
// integrating the kernel against fields.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "pharmonic/error.hpp"
#include "pharmonic/grid.hpp"
#include "pharmonic/hermite.hpp"
#include "pharmonic/quadrature.hpp"
#include "pharmonic/report.hpp"
#include "pharmonic/rng.hpp"
#include "pharmonic/spectral.hpp"

namespace pharmonic {

struct Point {
  double rho = 0.0;
  std::vector<double> x;
};

inline double distance(const Point& z, const Point& zp) {
  double s = (z.rho - zp.rho) * (z.rho - zp.rho);
  for (size_t j = 0; j < z.x.size(); ++j) s += (z.x[j] - zp.x[j]) * (z.x[j] - zp.x[j]);
  return std::sqrt(s);
}

namespace detail {
inline void check_points(const Point& z, const Point& zp) {
  require(z.x.size() == zp.x.size() && !z.x.empty(), Errc::invalid_parameter, "point dimensions differ");
}
/// log sinh(2t), accurate for small and large t.
inline double log_sinh2t(double t) {
  if (t < 5.0) return std::log(std::sinh(2.0 * t));
  return 2.0 * t - std::numbers::ln2 + std::log1p(-std::exp(-4.0 * t));
}
/// Coefficients of |x - x'|^2 and |x + x'|^2 in B.
inline double coef_minus(double t) { return 0.25 * (2.0 / std::tanh(2.0 * t) - std::tanh(t)); }
inline double coef_plus(double t) { return 0.25 * std::tanh(t); }
}  // namespace detail

/// B(t,z,z') = 1/4 (2 coth 2t - tanh t)|x-x'|^2 + (tanh t)/4 |x+x'|^2 + (rho-rho')^2/(4t).
inline double b_quadratic(double t, const Point& z, const Point& zp) {
  require(t > 0.0, Errc::invalid_parameter, "t must be positive");
  detail::check_points(z, zp);
  double dm = 0.0, dp = 0.0;
  for (size_t j = 0; j < z.x.size(); ++j) {
    dm += (z.x[j] - zp.x[j]) * (z.x[j] - zp.x[j]);
    dp += (z.x[j] + zp.x[j]) * (z.x[j] + zp.x[j]);
  }
  const double dr = z.rho - zp.rho;
  return detail::coef_minus(t) * dm + detail::coef_plus(t) * dp + dr * dr / (4.0 * t);
}

inline double log_heat_kernel(double t, const Point& z, const Point& zp) {
  const double d = static_cast<double>(z.x.size());
  const double B = b_quadratic(t, z, zp);
  return -0.5 * (d + 2.0) * std::numbers::ln2 - 0.5 * (d + 1.0) * std::log(std::numbers::pi) -
         0.5 * std::log(t) - 0.5 * d * detail::log_sinh2t(t) - B;
}

/// E(t,z,z') = 2^{-(d+2)/2} pi^{-(d+1)/2} t^{-1/2} (sinh 2t)^{-d/2} e^{-B}.
inline double heat_kernel_E(double t, const Point& z, const Point& zp) {
  return std::exp(log_heat_kernel(t, z, zp));
}

/// One-dimensional x-factor of E: (2 pi sinh 2t)^{-1/2} e^{-A(x-x')^2 - B(x+x')^2}.
inline double heat_kernel_x1(double t, double x, double xp) {
  return std::exp(-0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * detail::log_sinh2t(t) -
                  detail::coef_minus(t) * (x - xp) * (x - xp) - detail::coef_plus(t) * (x + xp) * (x + xp));
}

/// The rho-factor (4 pi t)^{-1/2} e^{-s^2/(4t)}.
inline double heat_kernel_rho(double t, double s) {
  return std::exp(-0.5 * std::log(4.0 * std::numbers::pi * t) - s * s / (4.0 * t));
}

namespace detail {
/// Center and width of x' -> heat_kernel_x1(t, x, x') seen as a Gaussian.
inline void x1_gaussian(double t, double x, double& center, double& sigma) {
  const double a = coef_minus(t), b = coef_plus(t);
  center = (a - b) * x / (a + b);
  sigma = std::sqrt(0.5 / (a + b));
}
}  // namespace detail

/// T[q][k] = int e_1(t, x_q, x') h_k(x') dx' at the grid's Gauss-Hermite
/// nodes, by composite Gauss-Legendre on a window around the kernel peak.
inline std::vector<double> heat_x_table_1d(const Grid& g, double t) {
  const int K = g.K;
  std::vector<double> T(static_cast<size_t>(g.M) * static_cast<size_t>(K + 1), 0.0);
  const double support = std::sqrt(2.0 * K + 1.0) + 8.0;  // h_k negligible beyond this
  std::vector<double> nodes, weights, h(static_cast<size_t>(K + 1));
  for (int q = 0; q < g.M; ++q) {
    const double x = g.gh.nodes[static_cast<size_t>(q)];
    double c, sigma;
    detail::x1_gaussian(t, x, c, sigma);
    const double lo = std::max(c - 9.0 * sigma, -support), hi = std::min(c + 9.0 * sigma, support);
    if (!(hi > lo)) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / std::min(sigma, 0.25))));
    composite_legendre(lo, hi, panels, nodes, weights);
    double* row = &T[static_cast<size_t>(q) * static_cast<size_t>(K + 1)];
    for (size_t i = 0; i < nodes.size(); ++i) {
      const double w = weights[i] * heat_kernel_x1(t, x, nodes[i]);
      if (w == 0.0) continue;
      hermite_all(K, nodes[i], h);
      for (int k = 0; k <= K; ++k) row[k] += w * h[static_cast<size_t>(k)];
    }
  }
  return T;
}

/// m[slot] = int (4 pi t)^{-1/2} e^{-s^2/4t} cos(tau s) ds, the action of the
/// rho-factor on e^{i tau rho}, by Gauss-Legendre over +-12 standard deviations.
inline std::vector<double> heat_rho_factor(const Grid& g, double t) {
  std::vector<double> m(static_cast<size_t>(g.N_rho), 0.0);
  const double sd = std::sqrt(2.0 * t);
  const double W = 12.0 * sd;
  std::vector<double> nodes, weights;
  for (int slot = 0; slot < g.N_rho; ++slot) {
    const double tau = std::abs(g.tau[static_cast<size_t>(slot)]);
    if (t * tau * tau > 40.0) continue;  // below e^{-40}; also bounds the panel count
    const double width = std::min(sd, tau > 0 ? 4.0 / tau : sd);
    const int panels = std::max(2, static_cast<int>(std::ceil(W / width)));  // on [0, W]
    composite_legendre(0.0, W, panels, nodes, weights);
    double s = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) s += weights[i] * heat_kernel_rho(t, nodes[i]) * std::cos(tau * nodes[i]);
    m[static_cast<size_t>(slot)] = 2.0 * s;  // even integrand
  }
  return m;
}

struct KernelApplied {
  Field field;
  bool truncation_warning = false;
  double tail_fraction = 0.0;
};

/// int E(t,z,z') f(z') dz' at the grid nodes. The kernel is integrated by
/// quadrature against the band-limited interpolant of f, which lets kernels
/// narrower than the grid spacing (small t) be resolved.
inline KernelApplied heat_apply_kernel(const Field& f, double t, double tail_tol = 1e-8) {
  require(t > 0.0, Errc::invalid_parameter, "heat time must be positive for the kernel route");
  const Grid& g = *f.grid;
  SpectralCoeffs c = forward(f);
  KernelApplied out;
  out.tail_fraction = truncation_tail_fraction(c);
  out.truncation_warning = out.tail_fraction > tail_tol;
  const auto mr = heat_rho_factor(g, t);
  for (int slot = 0; slot < g.N_rho; ++slot)
    for (size_t m = 0; m < c.nm(); ++m) c.at(slot, m) *= mr[static_cast<size_t>(slot)];
  const auto T1 = heat_x_table_1d(g, t);
  const size_t nm = c.nm();
  std::vector<double> table(g.nx * nm);
  for (size_t q = 0; q < g.nx; ++q) {
    const auto idx = g.x_multi(q);
    for (size_t m = 0; m < nm; ++m) {
      double v = 1.0;
      for (int j = 0; j < g.d; ++j)
        v *= T1[static_cast<size_t>(idx[static_cast<size_t>(j)]) * static_cast<size_t>(g.K + 1) +
                static_cast<size_t>(g.modes[m][static_cast<size_t>(j)])];
      table[q * nm + m] = v;
    }
  }
  out.field = synthesize(c, table);
  return out;
}

/// Settings of the adaptive t-quadrature (trapezoid in log t).
struct TQuadrature {
  double tol = 1e-10;
  double initial_step = 0.5;
  double s_limit = 120.0;
  int max_levels = 9;

  LogTrapezoidOptions options() const {
    LogTrapezoidOptions o;
    o.tol = tol;
    o.initial_step = initial_step;
    o.s_limit = s_limit;
    o.max_levels = max_levels;
    return o;
  }
};

/// Domain rules for the shifted kernel of (H_par + a)^{-alpha}.
inline void check_kernel_shift(int d, double alpha, double a) {
  require(alpha > 0.0, Errc::invalid_parameter, "kernel exponent alpha must be positive");
  require(!(a == -2.0 && d == 1), Errc::domain, "(H_par - 2) has no kernel bound for d = 1");
  require(!(a == -2.0 && d == 2 && alpha >= 0.5), Errc::domain,
          "(H_par - 2)^{-alpha} with d = 2 requires alpha < 1/2");
  require(a > -d || (a == -d && alpha < 0.5), Errc::domain, "shift a must exceed -d");
}

struct KernelValue {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// (1/Gamma(alpha)) int t^{alpha-1} e^{-ta} E(t,z,z') dt without the
/// near-diagonal guard; used where a caller integrates the singularity.
inline KernelValue k_alpha_unchecked(const Point& z, const Point& zp, double alpha, double a,
                                     const TQuadrature& tq = {}) {
  detail::check_points(z, zp);
  check_kernel_shift(static_cast<int>(z.x.size()), alpha, a);
  auto r = integrate_log_trapezoid<double>(
      [&](double t) { return std::exp((alpha - 1.0) * std::log(t) - t * a + log_heat_kernel(t, z, zp)); },
      tq.options());
  const double inv_gamma = 1.0 / std::tgamma(alpha);
  return {r.value * inv_gamma, r.error_estimate * inv_gamma, r.evaluations};
}

inline constexpr double kNearDiagonal = 1e-3;

/// Kernel of (H_par + a)^{-alpha}: a = 0 gives K_alpha, a = 2 gives M_alpha,
/// a = -2 gives N_alpha.
inline double k_alpha(const Point& z, const Point& zp, double alpha, double a = 0.0, const TQuadrature& tq = {}) {
  detail::check_points(z, zp);
  const double d = static_cast<double>(z.x.size());
  check_kernel_shift(static_cast<int>(d), alpha, a);
  require(!(distance(z, zp) < kNearDiagonal && 2.0 * alpha <= d + 1.0), Errc::singular_evaluation,
          "kernel is singular on the diagonal for 2 alpha <= d + 1");
  return k_alpha_unchecked(z, zp, alpha, a, tq).value;
}

/// Psi_alpha(s): s^{2alpha-(d+1)}, |log s| or 1 for s < 1 (below, at, above
/// alpha = (d+1)/2), and e^{-s^2/16} for s >= 1.
inline double psi_alpha(double s, double alpha, int d) {
  require(s > 0.0, Errc::invalid_parameter, "Psi_alpha needs s > 0");
  if (s >= 1.0) return std::exp(-s * s / 16.0);
  const double crit = 0.5 * (d + 1);
  if (alpha < crit) return std::pow(s, 2.0 * alpha - (d + 1));
  if (alpha == crit) return std::abs(std::log(s));
  return 1.0;
}

/// The comparison function used for the bound check. In the critical case
/// |log s| vanishes at s = 1 while K_alpha does not, so 1 + |log s| is used.
inline double psi_majorant(double s, double alpha, int d) {
  if (s < 1.0 && alpha == 0.5 * (d + 1)) return 1.0 + std::abs(std::log(s));
  return psi_alpha(s, alpha, d);
}

struct KernelSampleSpec {
  double s_min = 1e-3;
  double s_max = 5.0;
  double x_max = 4.0;
  double rho_max = 4.0;
  int count = 100;  // level-0 sample count; level l uses count * 2^l
  std::uint64_t seed = 1;
};

/// Pairs (z, z') with |z - z'| log-uniform in [s_min, s_max], z uniform in
/// the box |rho| <= rho_max, |x_j| <= x_max, and a uniform direction.
inline std::vector<std::pair<Point, Point>> kernel_samples(int d, const KernelSampleSpec& spec, int n) {
  auto rng = make_rng(spec.seed, "kernel-samples");
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> nd;
  std::vector<std::pair<Point, Point>> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Point z;
    z.rho = spec.rho_max * unit(rng);
    z.x.resize(static_cast<size_t>(d));
    for (auto& v : z.x) v = spec.x_max * unit(rng);
    std::vector<double> dir(static_cast<size_t>(d + 1));
    double nrm = 0.0;
    for (auto& v : dir) {
      v = nd(rng);
      nrm += v * v;
    }
    nrm = std::sqrt(nrm);
    const double u = 0.5 * (unit(rng) + 1.0);
    const double s = spec.s_min * std::pow(spec.s_max / spec.s_min, u);
    Point zp = z;
    zp.rho += s * dir[0] / nrm;
    for (int j = 0; j < d; ++j) zp.x[static_cast<size_t>(j)] += s * dir[static_cast<size_t>(j + 1)] / nrm;
    out.emplace_back(std::move(z), std::move(zp));
  }
  return out;
}

/// sup K_alpha / Psi_alpha over three nested sample levels, with the
/// refinement ratios, plus the near-diagonal lower bound for K_{alpha/2}.
inline Report kernel_bound_report(double alpha, int d, const KernelSampleSpec& spec = {}, const TQuadrature& tq = {}) {
  Report r;
  r.suite = "kernel-bounds";
  r.param("alpha", alpha);
  r.param("d", static_cast<double>(d));
  r.param("s_min", spec.s_min);
  r.param("s_max", spec.s_max);
  r.param("x_max", spec.x_max);
  const int levels = 3;
  const int total = spec.count << (levels - 1);
  const auto pairs = kernel_samples(d, spec, total);
  std::vector<double> ratio(pairs.size()), lower(pairs.size(), INFINITY);
  for (size_t i = 0; i < pairs.size(); ++i) {
    const auto& [z, zp] = pairs[i];
    const double s = distance(z, zp);
    ratio[i] = k_alpha(z, zp, alpha, 0.0, tq) / psi_majorant(s, alpha, d);
    if (s < 1.0) {
      double xp2 = 0.0;
      for (size_t j = 0; j < z.x.size(); ++j) xp2 += (z.x[j] + zp.x[j]) * (z.x[j] + zp.x[j]);
      const double model = std::exp(-xp2) * std::pow(s, alpha - (d + 1));
      lower[i] = k_alpha(z, zp, 0.5 * alpha, 0.0, tq) / model;
    }
  }
  std::vector<double> sups;
  for (int l = 0; l < levels; ++l) {
    const size_t n = static_cast<size_t>(spec.count) << l;
    sups.push_back(*std::max_element(ratio.begin(), ratio.begin() + static_cast<std::ptrdiff_t>(n)));
    r.info("sup_K_over_Psi_level" + std::to_string(l), sups.back(), "samples=" + std::to_string(n));
  }
  for (int l = 1; l < levels; ++l)
    r.at_most("refinement_ratio_level" + std::to_string(l), sups[static_cast<size_t>(l)] / sups[static_cast<size_t>(l - 1)],
              1.5, "pass iff value <= tolerance; sup must stabilize under sample refinement");
  const double lo = *std::min_element(lower.begin(), lower.end());
  r.info("lower_bound_min_ratio", std::isfinite(lo) ? lo : 0.0,
         "min over samples with s < 1 of K_{alpha/2} / (e^{-|x+x'|^2} s^{alpha-(d+1)})");
  r.check("lower_bound_positive", std::isfinite(lo) && lo > 0.0, "K_{alpha/2} bounded below by a positive multiple of the model");
  if (alpha > 0.5 * (d + 1)) {
    // bounded branch: values at the smallest separations stay below the overall sup
    double near = 0.0;
    for (size_t i = 0; i < pairs.size(); ++i)
      if (distance(pairs[i].first, pairs[i].second) < 1e-2) near = std::max(near, ratio[i]);
    r.at_most("near_diagonal_sup_over_global_sup", near / sups.back(), 1.0, "K_alpha bounded near the diagonal");
  }
  return r;
}

namespace detail {
/// int (4 pi t)^{-1/2} e^{-s^2/4t} ds by quadrature (equals 1).
inline double rho_mass(double t) {
  const double sd = std::sqrt(2.0 * t);
  return 2.0 * integrate_legendre([&](double s) { return heat_kernel_rho(t, s); }, 0.0, 12.0 * sd, 12);
}
/// int w(x') e_1(t, x, x') dx' over the kernel window, with a panel break at
/// the origin so that |x'|^p weights are integrated accurately.
template <class W>
double x1_mass(double t, double x, W&& w) {
  double c, sigma;
  x1_gaussian(t, x, c, sigma);
  const double lo = c - 10.0 * sigma, hi = c + 10.0 * sigma;
  const double width = std::min(sigma, 0.5);
  auto piece = [&](double a, double b) {
    if (!(b > a)) return 0.0;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
    return integrate_legendre([&](double xp) { return w(xp) * heat_kernel_x1(t, x, xp); }, a, b, panels);
  };
  if (lo < 0.0 && hi > 0.0) return piece(lo, 0.0) + piece(0.0, hi);
  return piece(lo, hi);
}
}  // namespace detail

/// Schur row sum |x|^{2 alpha} int K_alpha(z, z') dz' (independent of rho).
inline double schur_row_sum(std::span<const double> x, double alpha, const TQuadrature& tq = {}) {
  double x2 = 0.0;
  for (double v : x) x2 += v * v;
  auto inner = [&](double t) {
    double m = detail::rho_mass(t);
    for (double xj : x) m *= detail::x1_mass(t, xj, [](double) { return 1.0; });
    return m;
  };
  auto r = integrate_log_trapezoid<double>([&](double t) { return std::pow(t, alpha - 1.0) * inner(t); }, tq.options());
  return std::pow(x2, alpha) * r.value / std::tgamma(alpha);
}

/// Schur column sum int |x|^{2 alpha} K_alpha(z, z') dz at fixed z' (d = 1).
inline double schur_column_sum(std::span<const double> xp, double alpha, const TQuadrature& tq = {}) {
  require(xp.size() == 1, Errc::invalid_parameter, "column sums are implemented for d = 1");
  auto inner = [&](double t) {
    // kernel symmetric in (x, x'), so integrate over x with x' fixed
    return detail::rho_mass(t) * detail::x1_mass(t, xp[0], [&](double x) { return std::pow(std::abs(x), 2.0 * alpha); });
  };
  auto r = integrate_log_trapezoid<double>([&](double t) { return std::pow(t, alpha - 1.0) * inner(t); }, tq.options());
  return r.value / std::tgamma(alpha);
}

/// Schur test of the weighted operator |x|^{2alpha} H_par^{-alpha}: sups of
/// row and column sums over |x| <= R for R = R0, 2R0, 4R0 (d = 1).
inline Report schur_report(double alpha, double R0 = 4.0, int count = 16, const TQuadrature& tq = {}) {
  Report r;
  r.suite = "weighted-decay";
  r.param("alpha", alpha);
  r.param("R0", R0);
  for (int which = 0; which < 2; ++which) {
    const std::string tag = which == 0 ? "row" : "column";
    std::vector<double> sups;
    for (int l = 0; l < 3; ++l) {
      const double R = R0 * (1 << l);
      const int n = count << l;
      double sup = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double xv = R * i / n;
        const double xs[1] = {xv};
        const double v = which == 0 ? schur_row_sum(xs, alpha, tq) : schur_column_sum(xs, alpha, tq);
        sup = std::max(sup, v);
      }
      sups.push_back(sup);
      r.info(tag + "_sup_R" + format_number(R), sup);
    }
    for (int l = 1; l < 3; ++l)
      r.at_most(tag + "_refinement_ratio_level" + std::to_string(l), sups[static_cast<size_t>(l)] / sups[static_cast<size_t>(l - 1)],
                1.5, "pass iff value <= tolerance");
  }
  return r;
}

/// (H_par + a)^alpha f by the kernel route, alpha in (-(d+1)/2, 1) \ {0}.
///
/// Subordination to the heat kernel; the e^{-t} f part is integrated in
/// closed form so that the integrand decays at both ends of the t-axis.
inline Field frac_power_kernel(const Field& f, double alpha, double tol = 1e-7, double shift = 0.0) {
  const Grid& g = *f.grid;
  require(alpha != 0.0 && alpha < 1.0 && alpha > -0.5 * (g.d + 1), Errc::invalid_parameter,
          "kernel-route power needs alpha in (-(d+1)/2, 1) without 0");
  if (shift != 0.0) check_kernel_shift(g.d, std::abs(alpha), shift);
  LogTrapezoidOptions opt;
  opt.tol = tol;
  opt.s_limit = 60.0;
  using Vec = std::vector<cplx>;
  // H^a f = fp + (1/Gamma(-a)) int t^{-a-1} (e^{-tH} f - e^{-t} fp) dt for both
  // signs of a, fp being the t -> 0 limit of the kernel route; a shift
  // multiplies the heat flow by e^{-t shift}.
  const Field fp = inverse(forward(f));
  // an input that is (nearly) an eigenfunction leaves only rounding in the integrand
  opt.abs_floor = tol * std::abs(std::tgamma(-alpha)) * qdetail::magnitude(fp.values);
  auto diff = [&](double t) {
    Vec u = heat_apply_kernel(f, t).field.values;
    const double e = std::exp(-t), es = std::exp(-t * shift);
    for (size_t i = 0; i < u.size(); ++i) u[i] = es * u[i] - e * fp.values[i];
    return u;
  };
  Vec total;
  if (alpha < 0.0) {
    total = integrate_log_trapezoid<Vec>(
                [&](double t) {
                  Vec u = diff(t);
                  for (auto& v : u) v *= std::pow(t, -alpha - 1.0);
                  return u;
                },
                opt)
                .value;
  } else {
    // The difference is only O(t) and is swamped by rounding as t -> 0, so
    // [0, T] is taken from the slope at T and [T, inf) with t = T + u.
    const double T = 1e-8;
    total = diff(T);
    for (auto& v : total) v *= std::pow(T, -alpha) / (1.0 - alpha);
    const Vec rest = integrate_log_trapezoid<Vec>(
                         [&](double u) {
                           const double t = T + u;
                           Vec d = diff(t);
                           for (auto& v : d) v *= std::pow(t, -alpha - 1.0);
                           return d;
                         },
                         opt)
                         .value;
    for (size_t i = 0; i < total.size(); ++i) total[i] += rest[i];
  }
  Field out(f.grid);
  const double ig = 1.0 / std::tgamma(-alpha);
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] = ig * total[i] + fp.values[i];
  return out;
}

}  // namespace pharmonic
