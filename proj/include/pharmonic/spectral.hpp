#pragma once

// Mixed Fourier-Hermite transform and the functional calculus F(H_par),
// which acts on the mode e^{i tau rho} Phi_mu by F(tau^2 + 2|mu| + d).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "pharmonic/error.hpp"
#include "pharmonic/fft.hpp"
#include "pharmonic/grid.hpp"

namespace pharmonic {

/// c[slot][m], slot = n + N/2. With this normalization a pure mode
/// e^{i tau_n rho} Phi_mu has coefficient exactly 1 and
/// ||f||_2^2 = 2L sum |c|^2.
struct SpectralCoeffs {
  GridPtr grid;
  std::vector<cplx> values;

  SpectralCoeffs() = default;
  explicit SpectralCoeffs(GridPtr g) : grid(std::move(g)), values(grid->N_rho * grid->modes.size(), cplx{}) {}
  size_t nm() const { return grid->modes.size(); }
  cplx& at(int slot, size_t m) { return values[static_cast<size_t>(slot) * nm() + m]; }
  const cplx& at(int slot, size_t m) const { return values[static_cast<size_t>(slot) * nm() + m]; }
  /// Coefficient of frequency n (in [-N/2, N/2)) and multi-index mu.
  cplx& mode(int n, const MultiIndex& mu) {
    const int m = grid->modes.find(mu);
    require(m >= 0, Errc::invalid_parameter, "multi-index outside the grid cutoff");
    return at(n + grid->N_rho / 2, static_cast<size_t>(m));
  }
  const cplx& mode(int n, const MultiIndex& mu) const { return const_cast<SpectralCoeffs&>(*this).mode(n, mu); }
};

/// Plancherel-scaled L^2 norm of the represented function.
inline double norm2(const SpectralCoeffs& c) {
  double s = 0.0;
  for (const auto& v : c.values) s += std::norm(v);
  return std::sqrt(2.0 * c.grid->L_rho * s);
}

inline cplx inner(const SpectralCoeffs& a, const SpectralCoeffs& b) {
  cplx s{};
  for (size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * std::conj(b.values[i]);
  return 2.0 * a.grid->L_rho * s;
}

inline SpectralCoeffs operator+(const SpectralCoeffs& a, const SpectralCoeffs& b) {
  SpectralCoeffs c = a;
  for (size_t i = 0; i < c.values.size(); ++i) c.values[i] += b.values[i];
  return c;
}
inline SpectralCoeffs operator-(const SpectralCoeffs& a, const SpectralCoeffs& b) {
  SpectralCoeffs c = a;
  for (size_t i = 0; i < c.values.size(); ++i) c.values[i] -= b.values[i];
  return c;
}
inline SpectralCoeffs operator*(cplx s, const SpectralCoeffs& a) {
  SpectralCoeffs c = a;
  for (auto& v : c.values) v *= s;
  return c;
}

inline SpectralCoeffs forward(const Field& f) {
  const Grid& g = *f.grid;
  const size_t nm = g.modes.size();
  const int N = g.N_rho;
  // Hermite analysis per rho slice, stored at FFT position i.
  std::vector<cplx> buf(static_cast<size_t>(N) * nm, cplx{});
  for (int i = 0; i < N; ++i) {
    cplx* out = &buf[static_cast<size_t>(i) * nm];
    for (size_t q = 0; q < g.nx; ++q) {
      const cplx v = g.weight_flat[q] * f.at(static_cast<size_t>(i), q);
      if (v == cplx{}) continue;
      const double* row = &g.phi[q * nm];
      for (size_t m = 0; m < nm; ++m) out[m] += row[m] * v;
    }
  }
  fft_many(buf, N, static_cast<int>(nm), static_cast<int>(nm), 1, FftDirection::forward);
  SpectralCoeffs c(f.grid);
  for (int slot = 0; slot < N; ++slot) {
    const int n = slot - N / 2;
    const int k = ((n % N) + N) % N;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;  // e^{i pi n} from rho_0 = -L
    for (size_t m = 0; m < nm; ++m) c.at(slot, m) = sign / N * buf[static_cast<size_t>(k) * nm + m];
  }
  return c;
}

/// Synthesis with an arbitrary x-table: f(rho_i, x_q) = sum_{n,m} c[n][m]
/// e^{i tau_n rho_i} table[q][m]. The inverse transform uses table = Phi.
inline Field synthesize(const SpectralCoeffs& c, const std::vector<double>& table) {
  const Grid& g = *c.grid;
  const size_t nm = g.modes.size();
  const int N = g.N_rho;
  require(table.size() == g.nx * nm, Errc::invalid_parameter, "synthesis table has the wrong shape");
  std::vector<cplx> buf(static_cast<size_t>(N) * nm);
  for (int slot = 0; slot < N; ++slot) {
    const int n = slot - N / 2;
    const int k = ((n % N) + N) % N;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    for (size_t m = 0; m < nm; ++m) buf[static_cast<size_t>(k) * nm + m] = sign * c.at(slot, m);
  }
  fft_many(buf, N, static_cast<int>(nm), static_cast<int>(nm), 1, FftDirection::backward);
  Field f(c.grid);
  for (int i = 0; i < N; ++i) {
    const cplx* a = &buf[static_cast<size_t>(i) * nm];
    for (size_t q = 0; q < g.nx; ++q) {
      const double* row = &table[q * nm];
      cplx s{};
      for (size_t m = 0; m < nm; ++m) s += row[m] * a[m];
      f.at(static_cast<size_t>(i), q) = s;
    }
  }
  return f;
}

inline Field inverse(const SpectralCoeffs& c) { return synthesize(c, c.grid->phi); }

struct Multiplier {
  std::function<double(double)> F;
  double shift = 0.0;
  std::string label;
};

inline SpectralCoeffs apply_multiplier(const SpectralCoeffs& c, const Multiplier& mult) {
  SpectralCoeffs out = c;
  const Grid& g = *c.grid;
  for (int slot = 0; slot < g.N_rho; ++slot)
    for (size_t m = 0; m < c.nm(); ++m) {
      const double lam = g.eigenvalue(slot, m) + mult.shift;
      const double factor = mult.F(lam);
      require(std::isfinite(factor), Errc::singular_multiplier,
              "multiplier " + mult.label + " is not finite at lambda + a = " + std::to_string(lam));
      out.at(slot, m) *= factor;
    }
  return out;
}

inline Multiplier power_multiplier(double alpha, double shift = 0.0) {
  return Multiplier{[alpha](double lam) -> double {
                      if (alpha == 0.0) return 1.0;
                      if (lam <= 0.0) return alpha > 0.0 && lam == 0.0 ? 0.0 : std::nan("");
                      return std::pow(lam, alpha);
                    },
                    shift, "(lambda+a)^" + std::to_string(alpha)};
}

inline Multiplier heat_multiplier(double t) {
  return Multiplier{[t](double lam) { return std::exp(-t * lam); }, 0.0, "exp(-t lambda)"};
}

/// Fraction of the coefficient energy carried by the 10% of modes with the
/// largest eigenvalue.
inline double high_mode_energy_fraction(const SpectralCoeffs& c) {
  const Grid& g = *c.grid;
  const size_t total = c.values.size();
  std::vector<size_t> idx(total);
  std::iota(idx.begin(), idx.end(), size_t{0});
  auto lam = [&](size_t i) { return g.eigenvalue(static_cast<int>(i / c.nm()), i % c.nm()); };
  const size_t top = std::max<size_t>(1, total / 10);
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(total - top), idx.end(),
                   [&](size_t a, size_t b) { return lam(a) < lam(b); });
  double all = 0.0, tail = 0.0;
  for (const auto& v : c.values) all += std::norm(v);
  for (size_t k = total - top; k < total; ++k) tail += std::norm(c.values[idx[k]]);
  return all > 0.0 ? tail / all : 0.0;
}

inline constexpr double kPositivePowerTailLimit = 1e-6;

inline SpectralCoeffs frac_power(const SpectralCoeffs& c, double alpha, double shift = 0.0) {
  if (alpha == 0.0) return c;
  if (alpha > 0.0)
    require(high_mode_energy_fraction(c) <= kPositivePowerTailLimit, Errc::truncation,
            "positive power applied to a field with too much energy in the highest modes");
  return apply_multiplier(c, power_multiplier(alpha, shift));
}

/// (H_par + a)^alpha f, computed mode-wise.
inline Field frac_power(const Field& f, double alpha, double shift = 0.0) {
  if (alpha == 0.0) return f;
  return inverse(frac_power(forward(f), alpha, shift));
}

inline Field heat_spectral(const Field& f, double t) {
  require(t >= 0.0, Errc::invalid_parameter, "heat time must be nonnegative");
  if (t == 0.0) return f;
  return inverse(apply_multiplier(forward(f), heat_multiplier(t)));
}

/// Relative energy in the outermost Hermite shell |mu| = K and the two
/// outermost rho-frequency pairs, the parts a truncated series cannot
/// resolve.
inline double truncation_tail_fraction(const SpectralCoeffs& c) {
  const Grid& g = *c.grid;
  double all = 0.0, tail = 0.0;
  for (int slot = 0; slot < g.N_rho; ++slot)
    for (size_t m = 0; m < c.nm(); ++m) {
      const double e = std::norm(c.at(slot, m));
      all += e;
      const int n = std::abs(g.frequency(slot));
      if (g.modes.degree(m) == g.K || n >= g.N_rho / 2 - 1) tail += e;
    }
  return all > 0.0 ? tail / all : 0.0;
}

/// Value of the truncated series at an arbitrary point (rho, x).
inline cplx series_value(const SpectralCoeffs& c, double rho, std::span<const double> x) {
  const Grid& g = *c.grid;
  require(x.size() == static_cast<size_t>(g.d), Errc::invalid_parameter, "point dimension must be d");
  std::vector<std::vector<double>> h(x.size());
  for (size_t j = 0; j < x.size(); ++j) h[j] = hermite_all(g.K, x[j]);
  cplx s{};
  for (int slot = 0; slot < g.N_rho; ++slot) {
    const cplx e = std::polar(1.0, g.tau[static_cast<size_t>(slot)] * rho);
    cplx a{};
    for (size_t m = 0; m < c.nm(); ++m) {
      double p = 1.0;
      for (size_t j = 0; j < x.size(); ++j) p *= h[j][static_cast<size_t>(g.modes[m][j])];
      a += c.at(slot, m) * p;
    }
    s += a * e;
  }
  return s;
}

/// Random coefficients on |mu| <= max_degree, |n| <= max_freq with amplitudes
/// decaying like e^{-lambda/8}. With real = true the rho-frequencies are
/// paired so that the synthesized field is real.
inline SpectralCoeffs random_band_limited(const GridPtr& g, std::mt19937_64& rng, int max_degree, int max_freq,
                                          bool real = true) {
  require(max_degree <= g->K && max_freq < g->N_rho / 2, Errc::invalid_parameter,
          "random field band exceeds the grid");
  std::normal_distribution<double> gauss;
  SpectralCoeffs c(g);
  for (int n = real ? 0 : -max_freq; n <= max_freq; ++n)
    for (size_t m = 0; m < c.nm(); ++m) {
      if (g->modes.degree(m) > max_degree) continue;
      const int slot = n + g->N_rho / 2;
      const double amp = std::exp(-g->eigenvalue(slot, m) / 8.0);
      const double re = gauss(rng), im = gauss(rng);
      if (real && n == 0) {
        c.at(slot, m) = amp * re;
        continue;
      }
      c.at(slot, m) = amp * cplx(re, im);
      if (real) c.at(-n + g->N_rho / 2, m) = std::conj(c.at(slot, m));
    }
  return c;
}

struct Resampled {
  UniformSamples samples;
  bool truncation_warning = false;
  double tail_fraction = 0.0;
};

/// Evaluates the truncated Fourier-Hermite series of f at the points of a
/// box whose axis 0 is rho and axes 1..d are x.
inline Resampled resample(const Field& f, const UniformBox& box, double tail_tol = 1e-8) {
  const Grid& g = *f.grid;
  require(box.dims() == static_cast<size_t>(g.d + 1), Errc::invalid_parameter,
          "box dimension must be d + 1");
  const SpectralCoeffs c = forward(f);
  const size_t nm = c.nm();
  const int nr = box.n[0];
  // B[ir][m] = sum_n c[n][m] e^{i tau_n rho}
  std::vector<cplx> B(static_cast<size_t>(nr) * nm, cplx{});
  for (int ir = 0; ir < nr; ++ir) {
    const double r = box.coord(0, ir);
    for (int slot = 0; slot < g.N_rho; ++slot) {
      const cplx e = std::polar(1.0, g.tau[static_cast<size_t>(slot)] * r);
      for (size_t m = 0; m < nm; ++m) B[static_cast<size_t>(ir) * nm + m] += c.at(slot, m) * e;
    }
  }
  // Per-axis Hermite tables on the uniform coordinates.
  std::vector<std::vector<double>> H(static_cast<size_t>(g.d));
  for (int j = 0; j < g.d; ++j) {
    const int n = box.n[static_cast<size_t>(j + 1)];
    H[static_cast<size_t>(j)].resize(static_cast<size_t>(n) * static_cast<size_t>(g.K + 1));
    for (int i = 0; i < n; ++i)
      hermite_all(g.K, box.coord(static_cast<size_t>(j + 1), i),
                  std::span<double>(&H[static_cast<size_t>(j)][static_cast<size_t>(i) * static_cast<size_t>(g.K + 1)],
                                    static_cast<size_t>(g.K + 1)));
  }
  size_t nxu = 1;
  for (int j = 0; j < g.d; ++j) nxu *= static_cast<size_t>(box.n[static_cast<size_t>(j + 1)]);
  std::vector<double> P(nxu * nm);
  for (size_t qx = 0; qx < nxu; ++qx) {
    std::vector<int> idx(static_cast<size_t>(g.d));
    size_t rem = qx;
    for (int j = g.d - 1; j >= 0; --j) {
      const auto n = static_cast<size_t>(box.n[static_cast<size_t>(j + 1)]);
      idx[static_cast<size_t>(j)] = static_cast<int>(rem % n);
      rem /= n;
    }
    for (size_t m = 0; m < nm; ++m) {
      double v = 1.0;
      for (int j = 0; j < g.d; ++j)
        v *= H[static_cast<size_t>(j)][static_cast<size_t>(idx[static_cast<size_t>(j)]) * static_cast<size_t>(g.K + 1) +
                                       static_cast<size_t>(g.modes[m][static_cast<size_t>(j)])];
      P[qx * nm + m] = v;
    }
  }
  Resampled out;
  out.samples.box = box;
  out.samples.values.assign(box.size(), cplx{});
  for (int ir = 0; ir < nr; ++ir)
    for (size_t qx = 0; qx < nxu; ++qx) {
      cplx s{};
      for (size_t m = 0; m < nm; ++m) s += B[static_cast<size_t>(ir) * nm + m] * P[qx * nm + m];
      out.samples.values[static_cast<size_t>(ir) * nxu + qx] = s;
    }
  out.tail_fraction = truncation_tail_fraction(c);
  out.truncation_warning = out.tail_fraction > tail_tol;
  return out;
}

}  // namespace pharmonic
