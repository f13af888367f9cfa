#pragma once

// Hermite functions, Gauss-Hermite rules, spectral projection kernels and
// Mehler's formula.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "pharmonic/error.hpp"

namespace pharmonic {

using MultiIndex = std::vector<int>;

inline int total_degree(const MultiIndex& mu) {
  int s = 0;
  for (int m : mu) s += m;
  return s;
}

namespace detail {
inline const double kPiQuarterInv = std::pow(std::numbers::pi, -0.25);
}

/// Fills out[0..K] with h_0(x)..h_K(x).
///
/// Runs the normalized recurrence on a rescaled sequence and carries the
/// exponent separately, so the seed e^{-x^2/2} never underflows before the
/// growth of the polynomial part has been accounted for.
inline void hermite_all(int K, double x, std::span<double> out) {
  if (K < 0) return;
  // value_k = v_k * exp(log_scale)
  double log_scale = -0.5 * x * x;
  double prev = 0.0;
  double cur = detail::kPiQuarterInv;
  out[0] = cur * std::exp(log_scale);
  for (int k = 0; k < K; ++k) {
    const double next = x * std::sqrt(2.0 / (k + 1)) * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
    const double a = std::abs(cur);
    if (a > 1e150 || (a < 1e-150 && a > 0.0)) {
      const double e = std::log(a);
      cur /= a;
      prev /= a;
      log_scale += e;
    }
    out[k + 1] = cur * std::exp(log_scale);
  }
}

inline std::vector<double> hermite_all(int K, double x) {
  std::vector<double> out(static_cast<size_t>(K + 1));
  hermite_all(K, x, out);
  return out;
}

/// h_k(x), the L^2-normalized Hermite function of degree k.
inline double hermite_eval(int k, double x) {
  require(k >= 0, Errc::invalid_parameter, "hermite degree must be nonnegative");
  if (k == 0) return detail::kPiQuarterInv * std::exp(-0.5 * x * x);
  std::vector<double> h(static_cast<size_t>(k + 1));
  hermite_all(k, x, h);
  return h[static_cast<size_t>(k)];
}

/// h_k'(x) from the symmetric ladder form sqrt(k/2) h_{k-1} - sqrt((k+1)/2) h_{k+1}.
inline double hermite_derivative(int k, double x) {
  require(k >= 0, Errc::invalid_parameter, "hermite degree must be nonnegative");
  std::vector<double> h(static_cast<size_t>(k + 2));
  hermite_all(k + 1, x, h);
  const double lower = k > 0 ? std::sqrt(k / 2.0) * h[static_cast<size_t>(k - 1)] : 0.0;
  return lower - std::sqrt((k + 1) / 2.0) * h[static_cast<size_t>(k + 1)];
}

/// Phi_mu(x) = prod_j h_{mu_j}(x_j).
inline double phi_mu(const MultiIndex& mu, std::span<const double> x) {
  require(mu.size() == x.size(), Errc::invalid_parameter, "multi-index and point dimensions differ");
  double v = 1.0;
  for (size_t j = 0; j < mu.size(); ++j) v *= hermite_eval(mu[j], x[j]);
  return v;
}

struct GHRule {
  int order = 0;
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // for the weight e^{-x^2}
};

/// Gauss-Hermite rule of order M: exact for e^{-x^2} q(x) with deg q <= 2M-1.
///
/// Nodes by Newton iteration on the normalized recurrence, started from the
/// usual asymptotic guesses for the largest roots.
inline GHRule gauss_hermite(int M) {
  require(M >= 1, Errc::invalid_parameter, "Gauss-Hermite order must be >= 1");
  GHRule rule;
  rule.order = M;
  rule.nodes.assign(static_cast<size_t>(M), 0.0);
  rule.weights.assign(static_cast<size_t>(M), 0.0);
  const int half = (M + 1) / 2;
  std::vector<double> roots(static_cast<size_t>(half));
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * M + 1) - 1.85575 * std::pow(2.0 * M + 1, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(double(M), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * roots[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * roots[1];
    } else {
      z = 2.0 * z - roots[static_cast<size_t>(i - 2)];
    }
    double pp = 0.0;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      // polynomial part p_k = h_k e^{x^2/2}
      double p1 = detail::kPiQuarterInv;
      double p2 = 0.0;
      for (int j = 0; j < M; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(double(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * M) * p2;
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z))) {
        converged = true;
        break;
      }
    }
    require(converged, Errc::quadrature_failure, "Gauss-Hermite Newton iteration did not converge");
    // recompute derivative at the converged root
    {
      double p1 = detail::kPiQuarterInv;
      double p2 = 0.0;
      for (int j = 0; j < M; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(double(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * M) * p2;
    }
    roots[static_cast<size_t>(i)] = z;
    const double w = 2.0 / (pp * pp);
    rule.nodes[static_cast<size_t>(M - 1 - i)] = z;
    rule.nodes[static_cast<size_t>(i)] = -z;
    rule.weights[static_cast<size_t>(M - 1 - i)] = w;
    rule.weights[static_cast<size_t>(i)] = w;
  }
  if (M % 2 == 1) rule.nodes[static_cast<size_t>(M / 2)] = 0.0;
  return rule;
}

/// All multi-indices of length d with total degree exactly k, in
/// lexicographic order (first component descending).
inline std::vector<MultiIndex> compositions(int k, int d) {
  std::vector<MultiIndex> out;
  MultiIndex cur(static_cast<size_t>(d), 0);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == d - 1) {
      cur[static_cast<size_t>(pos)] = remaining;
      out.push_back(cur);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      cur[static_cast<size_t>(pos)] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  if (d >= 1 && k >= 0) rec(rec, 0, k);
  return out;
}

/// Phi_k(x, x') = sum_{|mu| = k} Phi_mu(x) Phi_mu(x').
inline double projection_kernel(int k, std::span<const double> x, std::span<const double> xp) {
  require(k >= 0, Errc::invalid_parameter, "projection degree must be nonnegative");
  require(x.size() == xp.size() && !x.empty(), Errc::invalid_parameter, "point dimensions differ");
  const size_t d = x.size();
  std::vector<std::vector<double>> hx(d), hxp(d);
  for (size_t j = 0; j < d; ++j) {
    hx[j] = hermite_all(k, x[j]);
    hxp[j] = hermite_all(k, xp[j]);
  }
  double sum = 0.0;
  for (const auto& mu : compositions(k, static_cast<int>(d))) {
    double a = 1.0;
    for (size_t j = 0; j < d; ++j) {
      const auto m = static_cast<size_t>(mu[j]);
      a *= hx[j][m] * hxp[j][m];
    }
    sum += a;
  }
  return sum;
}

/// log of the Mehler closed form; r in (0,1).
inline double mehler_log(double r, std::span<const double> x, std::span<const double> xp) {
  require(r > 0.0 && r < 1.0, Errc::domain, "Mehler parameter r must lie in (0,1)");
  require(x.size() == xp.size() && !x.empty(), Errc::invalid_parameter, "point dimensions differ");
  const double d = static_cast<double>(x.size());
  double n2 = 0.0, dot = 0.0;
  for (size_t j = 0; j < x.size(); ++j) {
    n2 += x[j] * x[j] + xp[j] * xp[j];
    dot += x[j] * xp[j];
  }
  const double one_m_r2 = -std::expm1(2.0 * std::log(r));  // 1 - r^2 without cancellation
  return -0.5 * d * std::log(std::numbers::pi) - 0.5 * d * std::log(one_m_r2) -
         0.5 * (1.0 + r * r) / one_m_r2 * n2 + 2.0 * r * dot / one_m_r2;
}

inline double mehler_closed_form(double r, std::span<const double> x, std::span<const double> xp) {
  return std::exp(mehler_log(r, x, xp));
}

/// sum_{k <= K_sum} r^k Phi_k(x, x').
inline double mehler_partial_sum(int K_sum, double r, std::span<const double> x,
                                 std::span<const double> xp) {
  require(r > 0.0 && r < 1.0, Errc::domain, "Mehler parameter r must lie in (0,1)");
  require(K_sum >= 0, Errc::invalid_parameter, "partial-sum order must be nonnegative");
  require(x.size() == xp.size() && !x.empty(), Errc::invalid_parameter, "point dimensions differ");
  const size_t d = x.size();
  // Per-dimension products a_j[k] = h_k(x_j) h_k(x'_j); the d-fold shell sum
  // is the coefficient convolution of the generating series sum_k r^k a_j[k].
  std::vector<double> shell(static_cast<size_t>(K_sum + 1), 0.0);
  {
    const auto h = hermite_all(K_sum, x[0]);
    const auto hp = hermite_all(K_sum, xp[0]);
    for (int k = 0; k <= K_sum; ++k) shell[static_cast<size_t>(k)] = h[static_cast<size_t>(k)] * hp[static_cast<size_t>(k)];
  }
  for (size_t j = 1; j < d; ++j) {
    const auto h = hermite_all(K_sum, x[j]);
    const auto hp = hermite_all(K_sum, xp[j]);
    std::vector<double> next(shell.size(), 0.0);
    for (int a = 0; a <= K_sum; ++a)
      for (int b = 0; a + b <= K_sum; ++b)
        next[static_cast<size_t>(a + b)] +=
            shell[static_cast<size_t>(a)] * h[static_cast<size_t>(b)] * hp[static_cast<size_t>(b)];
    shell = std::move(next);
  }
  double sum = 0.0, rk = 1.0;
  for (int k = 0; k <= K_sum; ++k) {
    sum += rk * shell[static_cast<size_t>(k)];
    rk *= r;
  }
  return sum;
}

}  // namespace pharmonic
