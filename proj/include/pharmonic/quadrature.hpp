#pragma once

// One-dimensional quadrature used across the library: composite
// Gauss-Legendre panels and an adaptive trapezoid rule in the logarithmic
// variable for integrals over (0, inf).

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "pharmonic/error.hpp"

namespace pharmonic {

struct LegendreRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

/// Full N-point Gauss-Legendre rule expanded from Boost's half-range tables.
template <unsigned N>
const LegendreRule& legendre_rule() {
  static const LegendreRule rule = [] {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    LegendreRule r;
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) {
        r.nodes.push_back(0.0);
        r.weights.push_back(w[i]);
      } else {
        r.nodes.push_back(-a[i]);
        r.weights.push_back(w[i]);
        r.nodes.push_back(a[i]);
        r.weights.push_back(w[i]);
      }
    }
    std::vector<size_t> idx(r.nodes.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t p, size_t q) { return r.nodes[p] < r.nodes[q]; });
    LegendreRule s;
    for (size_t i : idx) {
      s.nodes.push_back(r.nodes[i]);
      s.weights.push_back(r.weights[i]);
    }
    return s;
  }();
  return rule;
}

/// Nodes and weights of a composite 16-point Gauss-Legendre rule on [a, b].
inline void composite_legendre(double a, double b, int panels, std::vector<double>& x,
                               std::vector<double>& w) {
  const auto& r = legendre_rule<16>();
  x.clear();
  w.clear();
  if (!(b > a) || panels < 1) return;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (size_t i = 0; i < r.nodes.size(); ++i) {
      x.push_back(mid + 0.5 * h * r.nodes[i]);
      w.push_back(0.5 * h * r.weights[i]);
    }
  }
}

template <class F>
double integrate_legendre(F&& f, double a, double b, int panels) {
  std::vector<double> x, w;
  composite_legendre(a, b, panels, x, w);
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i]);
  return s;
}

// Accumulation helpers so the adaptive rule works for scalars and vectors.
namespace qdetail {
inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <class T>
double magnitude(const std::vector<T>& v) {
  double s = 0.0;
  for (const auto& e : v) s += std::norm(e);
  return std::sqrt(s);
}
inline double diff_magnitude(double a, double b) { return std::abs(a - b); }
inline double diff_magnitude(const std::complex<double>& a, const std::complex<double>& b) {
  return std::abs(a - b);
}
template <class T>
double diff_magnitude(const std::vector<T>& a, const std::vector<T>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}
inline void axpy(double& acc, double w, double v) { acc += w * v; }
inline void axpy(std::complex<double>& acc, double w, const std::complex<double>& v) { acc += w * v; }
template <class T>
void axpy(std::vector<T>& acc, double w, const std::vector<T>& v) {
  if (acc.empty()) acc.assign(v.size(), T{});
  for (size_t i = 0; i < v.size(); ++i) acc[i] += w * v[i];
}
template <class V>
V scaled(const V& v, double s) {
  V out{};
  axpy(out, s, v);
  return out;
}
}  // namespace qdetail

struct LogTrapezoidOptions {
  double tol = 1e-10;
  double initial_step = 0.5;
  double s_limit = 120.0;  // |log t| never exceeds this
  int max_levels = 9;
  int min_levels = 2;
  double abs_floor = 0.0;  // magnitudes below this count as converged / negligible
};

template <class V>
struct LogTrapezoidResult {
  V value{};
  double error_estimate = 0.0;
  int levels = 0;
  int evaluations = 0;
};

/// Integral of g over (0, inf) via t = e^s and the trapezoid rule in s.
///
/// The s-range is found by walking outward from s = 0 until the integrand
/// t*g(t) drops below tol/100 of its running maximum at two consecutive
/// nodes; the step is then halved, reusing all previous nodes, until two
/// successive estimates agree to relative tolerance tol.
template <class V, class G>
LogTrapezoidResult<V> integrate_log_trapezoid(G&& g, const LogTrapezoidOptions& opt = {}) {
  LogTrapezoidResult<V> res;
  auto G_of = [&](double s) {
    const double t = std::exp(s);
    ++res.evaluations;
    return qdetail::scaled<V>(g(t), t);
  };
  const double h0 = opt.initial_step;
  double vmax = 0.0;
  V sum{};
  int kmin = 0, kmax = 0;
  {
    const V v0 = G_of(0.0);
    vmax = qdetail::magnitude(v0);
    qdetail::axpy(sum, 1.0, v0);
  }
  for (int dir : {-1, 1}) {
    int small = 0;
    for (int k = dir;; k += dir) {
      const double s = k * h0;
      if (std::abs(s) > opt.s_limit) break;
      const V v = G_of(s);
      const double m = qdetail::magnitude(v);
      require(std::isfinite(m), Errc::quadrature_failure, "non-finite integrand in t-quadrature");
      qdetail::axpy(sum, 1.0, v);
      vmax = std::max(vmax, m);
      if (dir < 0) kmin = k; else kmax = k;
      // an integrand that is still zero has not been reached yet, unless the floor says it is negligible
      const bool negligible = (vmax > 0.0 || opt.abs_floor > 0.0) && m <= std::max(opt.tol * 1e-2 * vmax, opt.abs_floor);
      small = negligible ? small + 1 : 0;
      if (small >= 2) break;
    }
  }
  double h = h0;
  V estimate = qdetail::scaled<V>(sum, h);
  // sum holds the node sum at the current resolution
  for (int level = 1; level <= opt.max_levels; ++level) {
    const double hn = h / 2;
    const int count = (kmax - kmin) * (1 << level);  // intervals at new resolution
    V odd{};
    for (int i = 1; i < count; i += 2) {
      const double s = kmin * h0 + i * hn;
      qdetail::axpy(odd, 1.0, G_of(s));
    }
    qdetail::axpy(sum, 1.0, odd);
    h = hn;
    const V next = qdetail::scaled<V>(sum, h);
    const double change = qdetail::diff_magnitude(next, estimate);
    const double mag = qdetail::magnitude(next);
    estimate = next;
    res.levels = level;
    res.error_estimate = change;
    if (level >= opt.min_levels && change <= std::max(opt.tol * mag, opt.abs_floor)) break;
  }
  res.value = estimate;
  return res;
}

}  // namespace pharmonic
