#pragma once

// Symbols in the adapted class G^m: |D_z^b D_w^g s| <= C <|x| + |w|>^{m-|b|-|g|}.
// Every symbol here is independent of rho, so evaluation takes (x, tau, xi).

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "pharmonic/error.hpp"
#include "pharmonic/fft.hpp"
#include "pharmonic/grid.hpp"
#include "pharmonic/quadrature.hpp"
#include "pharmonic/report.hpp"
#include "pharmonic/rng.hpp"

namespace pharmonic {

namespace sdetail {
inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}
/// log cosh(u) without overflow.
inline double log_cosh(double u) {
  u = std::abs(u);
  return u + std::log1p(std::exp(-2.0 * u)) - std::numbers::ln2;
}
/// sinh(t)^2 sech(2t), written so that neither end loses digits or overflows.
inline double sinh2_sech2(double t) {
  if (t < 1.0) {
    const double sh = std::sinh(t);
    return sh * sh / std::cosh(2.0 * t);
  }
  return 0.5 - 0.5 / std::cosh(2.0 * t);
}
}  // namespace sdetail

/// b = (|x|^2 + |xi|^2) tanh(2t) / 2 + 2i x.xi sech(2t) sinh(t)^2 + t tau^2.
inline cplx b_symbol(double t, std::span<const double> x, double tau, std::span<const double> xi) {
  require(t > 0.0, Errc::invalid_parameter, "b_symbol needs t > 0");
  const double r2 = sdetail::dot(x, x) + sdetail::dot(xi, xi);
  const double mix = sdetail::sinh2_sech2(t);
  return {0.5 * r2 * std::tanh(2.0 * t) + t * tau * tau, 2.0 * sdetail::dot(x, xi) * mix};
}

/// d b / d t = (|x|^2 + |xi|^2) sech^2(2t) + 2i x.xi tanh(2t) sech(2t) + tau^2.
inline cplx b_symbol_dt(double t, std::span<const double> x, double tau, std::span<const double> xi) {
  const double r2 = sdetail::dot(x, x) + sdetail::dot(xi, xi);
  const double sech = 1.0 / std::cosh(2.0 * t);
  return {r2 * sech * sech + tau * tau, 2.0 * sdetail::dot(x, xi) * std::tanh(2.0 * t) * sech};
}

/// d b / d x_j = x_j tanh(2t) + 2i xi_j sech(2t) sinh(t)^2.
inline cplx b_symbol_dx(double t, std::span<const double> x, std::span<const double> xi, int j) {
  const double mix = sdetail::sinh2_sech2(t);
  return {x[static_cast<size_t>(j)] * std::tanh(2.0 * t), 2.0 * xi[static_cast<size_t>(j)] * mix};
}

/// Symbol of e^{-tH} in the quantization T_s f = (2 pi)^{-(d+1)} int e^{i(z-z')w} s f dz' dw:
/// (cosh 2t)^{-d/2} e^{-b}, equal to 1 at t = 0.
inline cplx heat_symbol(double t, std::span<const double> x, double tau, std::span<const double> xi) {
  if (t == 0.0) return 1.0;
  const double d = static_cast<double>(x.size());
  return std::exp(-0.5 * d * sdetail::log_cosh(2.0 * t) - b_symbol(t, x, tau, xi));
}

/// p_t with the constant c_d = (2 pi)^{-d/2} of the Fourier-side formula.
inline cplx p_t_symbol(double t, std::span<const double> x, double tau, std::span<const double> xi) {
  require(t >= 0.0, Errc::invalid_parameter, "p_t needs t >= 0");
  const double d = static_cast<double>(x.size());
  return std::pow(2.0 * std::numbers::pi, -0.5 * d) * heat_symbol(t, x, tau, xi);
}

inline LogTrapezoidOptions symbol_quadrature(double tol = 1e-12) {
  LogTrapezoidOptions o;
  o.tol = tol;
  o.s_limit = 80.0;
  o.max_levels = 8;
  return o;
}

namespace sdetail {
template <class G>
cplx t_integral(G&& g, double tol) {
  auto r = integrate_log_trapezoid<cplx>(g, symbol_quadrature(tol));
  require(r.error_estimate <= std::max(1e3 * tol * std::abs(r.value), 1e-300) || r.levels < 8,
          Errc::quadrature_failure, "symbol t-quadrature did not settle");
  return r.value;
}
}  // namespace sdetail

/// Symbol of H^alpha. alpha < 0: (1/Gamma(-alpha)) int t^{-alpha-1} p_t dt;
/// 0 < alpha < 1: -(1/Gamma(1-alpha)) int t^{-alpha} d/dt p_t dt.
inline cplx sigma_alpha(std::span<const double> x, double tau, std::span<const double> xi, double alpha,
                        double tol = 1e-12) {
  require(alpha < 1.0 && alpha != 0.0, Errc::invalid_parameter, "sigma_alpha needs alpha < 1, alpha != 0");
  const double d = static_cast<double>(x.size());
  if (alpha < 0.0)
    return sdetail::t_integral([&](double t) { return std::pow(t, -alpha - 1.0) * heat_symbol(t, x, tau, xi); }, tol) /
           std::tgamma(-alpha);
  auto dp = [&](double t) {
    const cplx db = d * std::tanh(2.0 * t) + b_symbol_dt(t, x, tau, xi);
    return -db * heat_symbol(t, x, tau, xi);
  };
  return -sdetail::t_integral([&](double t) { return std::pow(t, -alpha) * dp(t); }, tol) / std::tgamma(1.0 - alpha);
}

/// Symbol of R_j = A_j H^{-1/2}: (1/sqrt(pi)) int t^{-1/2} q_j p_t dt with
/// q_0 = -i tau, q_j = -i xi_j + x_j + d_{x_j} b, q_{-j} = i xi_j + x_j - d_{x_j} b.
inline cplx riesz_symbol(int j, std::span<const double> x, double tau, std::span<const double> xi,
                         double tol = 1e-12) {
  const int d = static_cast<int>(x.size());
  require(j >= -d && j <= d, Errc::invalid_parameter, "Riesz index outside [-d, d]");
  const int a = std::abs(j) - 1;
  auto q = [&](double t) -> cplx {
    if (j == 0) return {0.0, -tau};
    const double xj = x[static_cast<size_t>(a)], sj = xi[static_cast<size_t>(a)];
    const cplx db = b_symbol_dx(t, x, xi, a);
    return j > 0 ? cplx(xj, -sj) + db : cplx(xj, sj) - db;
  };
  return sdetail::t_integral([&](double t) { return std::pow(t, -0.5) * q(t) * heat_symbol(t, x, tau, xi); }, tol) /
         std::sqrt(std::numbers::pi);
}

/// A rho-independent symbol with its declared order.
struct SymbolFn {
  std::function<cplx(std::span<const double> x, double tau, std::span<const double> xi)> eval;
  double order = 0.0;
  std::string label;
};

inline SymbolFn constant_symbol(cplx v) {
  return {[v](std::span<const double>, double, std::span<const double>) { return v; }, 0.0, "constant"};
}

inline SymbolFn sigma_alpha_symbol(double alpha, double tol = 1e-12) {
  return {[alpha, tol](std::span<const double> x, double tau, std::span<const double> xi) {
            return sigma_alpha(x, tau, xi, alpha, tol);
          },
          2.0 * alpha, "sigma_" + format_number(alpha)};
}

inline SymbolFn riesz_symbol_fn(int j, double tol = 1e-12) {
  return {[j, tol](std::span<const double> x, double tau, std::span<const double> xi) {
            return riesz_symbol(j, x, tau, xi, tol);
          },
          0.0, "riesz_" + std::to_string(j)};
}

/// Phase-space sample points X = (x, tau, xi), packed as 2d+1 numbers, on
/// the origin and on dyadic shells |X| = 2^k from min_shell up to cap.
struct SampleDomain {
  double cap = 64.0;
  double min_shell = 0.25;
  int count = 8;  // random directions per shell, on top of the 2(2d+1) axis points
  std::uint64_t seed = 1;

  std::vector<double> shells() const {
    std::vector<double> s{0.0};
    for (double r = min_shell; r <= cap * (1 + 1e-12); r *= 2) s.push_back(r);
    return s;
  }

  std::vector<std::vector<double>> points(int d) const {
    const int n = 2 * d + 1;
    std::vector<std::vector<double>> out;
    const auto sh = shells();
    for (size_t k = 0; k < sh.size(); ++k) {
      const double r = sh[k];
      if (r == 0.0) {
        out.emplace_back(static_cast<size_t>(n), 0.0);
        continue;
      }
      for (int i = 0; i < n; ++i)
        for (double sgn : {1.0, -1.0}) {
          std::vector<double> p(static_cast<size_t>(n), 0.0);
          p[static_cast<size_t>(i)] = sgn * r;
          out.push_back(p);
        }
      auto rng = make_rng(seed, "symbol-shell", static_cast<std::uint64_t>(std::lround(std::log2(r) * 16)));
      std::normal_distribution<double> gauss;
      for (int c = 0; c < count; ++c) {
        std::vector<double> p(static_cast<size_t>(n));
        double nrm = 0.0;
        for (auto& v : p) {
          v = gauss(rng);
          nrm += v * v;
        }
        nrm = std::sqrt(nrm);
        for (auto& v : p) v *= r / nrm;
        out.push_back(p);
      }
    }
    return out;
  }
};

/// Weight of the membership test: the adapted <|x| + |w|> or the classical
/// <|w|> of S^m_{1,0} (where only w-derivatives lower the order).
enum class SymbolWeight { adapted, kohn_nirenberg };

namespace sdetail {
inline cplx eval_packed(const SymbolFn& s, const std::vector<double>& X, int d) {
  std::span<const double> all(X);
  return s.eval(all.subspan(0, static_cast<size_t>(d)), X[static_cast<size_t>(d)],
                all.subspan(static_cast<size_t>(d + 1), static_cast<size_t>(d)));
}

/// Largest weighted derivative of each order 0..r over the points.
inline std::vector<double> weighted_sups(const SymbolFn& s, double m, int d, const std::vector<std::vector<double>>& pts,
                                         int r, SymbolWeight w) {
  const int n = 2 * d + 1;
  std::vector<double> sup(static_cast<size_t>(r + 1), 0.0);
  for (const auto& X : pts) {
    double xn = 0.0, wn = 0.0;
    for (int i = 0; i < d; ++i) xn += X[static_cast<size_t>(i)] * X[static_cast<size_t>(i)];
    for (int i = d; i < n; ++i) wn += X[static_cast<size_t>(i)] * X[static_cast<size_t>(i)];
    xn = std::sqrt(xn);
    wn = std::sqrt(wn);
    const double base = w == SymbolWeight::adapted ? xn + wn : wn;
    const double jb = std::sqrt(1.0 + base * base);
    double mag = 0.0;
    for (double v : X) mag += v * v;
    const double h = 1e-3 * std::max(1.0, std::sqrt(mag));
    auto at = [&](int i, double di, int k, double dk) {
      auto Y = X;
      if (i >= 0) Y[static_cast<size_t>(i)] += di;
      if (k >= 0) Y[static_cast<size_t>(k)] += dk;
      return eval_packed(s, Y, d);
    };
    auto order_drop = [&](int i) { return w == SymbolWeight::adapted || i >= d ? 1 : 0; };
    const cplx f0 = at(-1, 0, -1, 0);
    sup[0] = std::max(sup[0], std::abs(f0) * std::pow(jb, -m));
    if (r >= 1)
      for (int i = 0; i < n; ++i) {
        const cplx D = (at(i, h, -1, 0) - at(i, -h, -1, 0)) / (2 * h);
        sup[1] = std::max(sup[1], std::abs(D) * std::pow(jb, -(m - order_drop(i))));
      }
    if (r >= 2)
      for (int i = 0; i < n; ++i)
        for (int k = i; k < n; ++k) {
          cplx D;
          if (i == k)
            D = (at(i, h, -1, 0) - 2.0 * f0 + at(i, -h, -1, 0)) / (h * h);
          else
            D = (at(i, h, k, h) - at(i, h, k, -h) - at(i, -h, k, h) + at(i, -h, k, -h)) / (4 * h * h);
          sup[2] = std::max(sup[2], std::abs(D) * std::pow(jb, -(m - order_drop(i) - order_drop(k))));
        }
  }
  return sup;
}
}  // namespace sdetail

/// Empirical G^m constants: sup |D^beta s| <|x|+|w|>^{-(m-|beta|)} per
/// derivative order |beta| <= r, on the domain and on the domain with the
/// cap doubled. Passes when every sup is finite and grows by less than 1.5.
inline Report gm_bound_estimate(const SymbolFn& s, double m, const SampleDomain& dom, int r, int d = 1,
                                SymbolWeight w = SymbolWeight::adapted) {
  require(r >= 0 && r <= 2, Errc::invalid_parameter, "derivative order must be 0, 1 or 2");
  Report rep;
  rep.suite = "symbols";
  rep.param("symbol", s.label);
  rep.param("m", m);
  rep.param("r", static_cast<double>(r));
  rep.param("cap", dom.cap);
  rep.param("weight", w == SymbolWeight::adapted ? "adapted" : "kohn-nirenberg");
  SampleDomain big = dom;
  big.cap = 2 * dom.cap;
  const auto s1 = sdetail::weighted_sups(s, m, d, dom.points(d), r, w);
  const auto s2 = sdetail::weighted_sups(s, m, d, big.points(d), r, w);
  for (int k = 0; k <= r; ++k) {
    const std::string tag = "order" + std::to_string(k);
    rep.info("sup_" + tag, s1[static_cast<size_t>(k)]);
    rep.info("sup_doubled_" + tag, s2[static_cast<size_t>(k)]);
    const double ratio = s1[static_cast<size_t>(k)] > 0 ? s2[static_cast<size_t>(k)] / s1[static_cast<size_t>(k)]
                                                        : (s2[static_cast<size_t>(k)] > 0 ? INFINITY : 1.0);
    rep.at_most("doubling_ratio_" + tag, ratio, 1.5, "empirical constant, not claimed sharp");
  }
  return rep;
}

struct Quantized {
  UniformSamples samples;
  bool aliasing_warning = false;
  double boundary_fraction = 0.0;
};

/// T_s f on a (rho, x) box, d = 1: DFT of f, then for each x row the
/// inverse sum weighted by s(x, w).
inline Quantized quantize(const SymbolFn& s, const UniformSamples& f, double alias_tol = 1e-8) {
  const UniformBox& box = f.box;
  require(box.dims() == 2, Errc::invalid_parameter, "quantization is implemented for d = 1 only");
  const int n0 = box.n[0], n1 = box.n[1];
  std::vector<cplx> F(f.values);
  fft_nd(F, {n0, n1}, FftDirection::forward);
  // Offsets from the box origin at -R: e^{-i(-R) w_k} = (-1)^k.
  auto freq = [](int slot, int n) { return slot < n / 2 ? slot : slot - n; };
  double all = 0.0, edge = 0.0;
  for (int a = 0; a < n0; ++a)
    for (int b = 0; b < n1; ++b) {
      const int ka = freq(a, n0), kb = freq(b, n1);
      cplx& v = F[static_cast<size_t>(a) * n1 + b];
      if ((ka + kb) % 2 != 0) v = -v;
      const double e = std::norm(v);
      all += e;
      if (std::abs(ka) >= n0 / 2 - 1 || std::abs(kb) >= n1 / 2 - 1) edge += e;
    }
  const double w0 = std::numbers::pi / box.R[0], w1 = std::numbers::pi / box.R[1];
  Quantized out;
  out.samples.box = box;
  out.samples.values.assign(f.values.size(), cplx{});
  std::vector<cplx> row(static_cast<size_t>(n0));
  for (int ix = 0; ix < n1; ++ix) {
    const double xv[1] = {box.coord(1, ix)};
    for (int a = 0; a < n0; ++a) {
      const double tau = freq(a, n0) * w0;
      cplx acc{};
      for (int b = 0; b < n1; ++b) {
        const double xi[1] = {freq(b, n1) * w1};
        const cplx e = std::polar(1.0, xi[0] * xv[0]);
        acc += e * s.eval(xv, tau, xi) * F[static_cast<size_t>(a) * n1 + b];
      }
      // e^{i tau_k rho_i} = (-1)^k e^{2 pi i k i / n0}
      row[static_cast<size_t>(a)] = freq(a, n0) % 2 != 0 ? -acc : acc;
    }
    fft_many(row, n0, 1, 1, n0, FftDirection::backward);
    for (int i = 0; i < n0; ++i)
      out.samples.values[static_cast<size_t>(i) * n1 + ix] = row[static_cast<size_t>(i)] / static_cast<double>(n0 * n1);
  }
  out.boundary_fraction = all > 0 ? edge / all : 0.0;
  out.aliasing_warning = out.boundary_fraction > alias_tol;
  return out;
}

}  // namespace pharmonic
