#pragma once

// Discretizations of R^{d+1}: a periodic rho-grid times a tensor
// Gauss-Hermite grid in x, sampled fields on it, and uniform boxes for
// heavy-tailed integrands.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "pharmonic/error.hpp"
#include "pharmonic/fft.hpp"
#include "pharmonic/hermite.hpp"

namespace pharmonic {

/// All multi-indices with |mu| <= K, ordered by degree, then
/// lexicographically (first component descending) within a shell.
class MultiIndexSet {
 public:
  MultiIndexSet() = default;
  MultiIndexSet(int d, int K) : d_(d), K_(K) {
    for (int k = 0; k <= K; ++k)
      for (auto& mu : compositions(k, d)) {
        degree_.push_back(k);
        list_.push_back(std::move(mu));
      }
    size_t full = 1;
    for (int j = 0; j < d; ++j) full *= static_cast<size_t>(K + 1);
    full_to_compact_.assign(full, -1);
    for (size_t m = 0; m < list_.size(); ++m) full_to_compact_[full_index(list_[m])] = static_cast<int>(m);
    raise_.assign(static_cast<size_t>(d), std::vector<int>(list_.size(), -1));
    lower_.assign(static_cast<size_t>(d), std::vector<int>(list_.size(), -1));
    for (size_t m = 0; m < list_.size(); ++m)
      for (int j = 0; j < d; ++j) {
        MultiIndex up = list_[m];
        up[static_cast<size_t>(j)] += 1;
        raise_[static_cast<size_t>(j)][m] = find(up);
        if (list_[m][static_cast<size_t>(j)] > 0) {
          MultiIndex dn = list_[m];
          dn[static_cast<size_t>(j)] -= 1;
          lower_[static_cast<size_t>(j)][m] = find(dn);
        }
      }
  }

  int d() const { return d_; }
  int K() const { return K_; }
  size_t size() const { return list_.size(); }
  const MultiIndex& operator[](size_t m) const { return list_[m]; }
  int degree(size_t m) const { return degree_[m]; }

  /// Compact index of mu, or -1 if |mu| > K or mu has the wrong length.
  int find(const MultiIndex& mu) const {
    if (static_cast<int>(mu.size()) != d_ || total_degree(mu) > K_) return -1;
    for (int v : mu)
      if (v < 0) return -1;
    return full_to_compact_[full_index(mu)];
  }
  /// Index of mu + e_j (axis j, 0-based), -1 if outside the set.
  int raised(int j, size_t m) const { return raise_[static_cast<size_t>(j)][m]; }
  /// Index of mu - e_j, -1 if mu_j = 0.
  int lowered(int j, size_t m) const { return lower_[static_cast<size_t>(j)][m]; }

 private:
  size_t full_index(const MultiIndex& mu) const {
    size_t idx = 0;
    for (int v : mu) idx = idx * static_cast<size_t>(K_ + 1) + static_cast<size_t>(v);
    return idx;
  }

  int d_ = 0, K_ = 0;
  std::vector<MultiIndex> list_;
  std::vector<int> degree_;
  std::vector<int> full_to_compact_;
  std::vector<std::vector<int>> raise_, lower_;
};

class Grid {
 public:
  int d = 0;
  int N_rho = 0;
  double L_rho = 0.0;
  int K = 0;
  int M = 0;
  GHRule gh;
  std::vector<double> weights_x;  // Gauss-Hermite weights times e^{x^2}
  std::vector<double> rho;        // rho_i = -L + 2L i / N
  std::vector<double> tau;        // tau at frequency slot s = n + N/2
  MultiIndexSet modes;
  size_t nx = 0;                  // M^d
  std::vector<double> hermite_1d;  // [q][k], h_k(node_q), k <= K
  std::vector<double> phi;        // [q_flat][m], Phi_mu(x_q)
  std::vector<double> weight_flat;  // [q_flat], product of weights_x

  double rho_step() const { return 2.0 * L_rho / N_rho; }
  size_t size() const { return static_cast<size_t>(N_rho) * nx; }
  int frequency(int slot) const { return slot - N_rho / 2; }
  /// Per-axis node indices of the flat x-index q (axis 0 slowest).
  std::vector<int> x_multi(size_t q) const {
    std::vector<int> idx(static_cast<size_t>(d));
    for (int j = d - 1; j >= 0; --j) {
      idx[static_cast<size_t>(j)] = static_cast<int>(q % static_cast<size_t>(M));
      q /= static_cast<size_t>(M);
    }
    return idx;
  }
  std::vector<double> x_point(size_t q) const {
    auto idx = x_multi(q);
    std::vector<double> x(idx.size());
    for (size_t j = 0; j < idx.size(); ++j) x[j] = gh.nodes[static_cast<size_t>(idx[j])];
    return x;
  }
  /// lambda = tau^2 + 2|mu| + d.
  double eigenvalue(int slot, size_t m) const {
    const double t = tau[static_cast<size_t>(slot)];
    return t * t + 2.0 * modes.degree(m) + d;
  }
};

using GridPtr = std::shared_ptr<const Grid>;

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

inline GridPtr make_grid(int d, int N_rho, double L_rho, int K, int M) {
  require(d >= 1 && d <= 3, Errc::invalid_parameter, "x-dimension d must be 1, 2 or 3");
  require(is_power_of_two(N_rho) && N_rho >= 2, Errc::invalid_parameter, "N_rho must be a power of two");
  require(L_rho > 0.0 && std::isfinite(L_rho), Errc::invalid_parameter, "L_rho must be positive");
  require(K >= 0, Errc::invalid_parameter, "K must be nonnegative");
  require(M >= K + 1, Errc::invalid_parameter, "Gauss-Hermite order M must satisfy M >= K + 1");
  auto g = std::make_shared<Grid>();
  g->d = d;
  g->N_rho = N_rho;
  g->L_rho = L_rho;
  g->K = K;
  g->M = M;
  g->gh = gauss_hermite(M);
  // Christoffel form: w_q e^{x_q^2} = 1 / sum_{k<M} h_k(x_q)^2, free of overflow.
  g->weights_x.resize(static_cast<size_t>(M));
  const int kmax = std::max(K, M - 1);
  std::vector<double> h(static_cast<size_t>(kmax + 1));
  g->hermite_1d.assign(static_cast<size_t>(M) * static_cast<size_t>(K + 1), 0.0);
  for (int q = 0; q < M; ++q) {
    hermite_all(kmax, g->gh.nodes[static_cast<size_t>(q)], h);
    double s = 0.0;
    for (int k = 0; k < M; ++k) s += h[static_cast<size_t>(k)] * h[static_cast<size_t>(k)];
    g->weights_x[static_cast<size_t>(q)] = 1.0 / s;
    for (int k = 0; k <= K; ++k)
      g->hermite_1d[static_cast<size_t>(q) * static_cast<size_t>(K + 1) + static_cast<size_t>(k)] =
          h[static_cast<size_t>(k)];
  }
  g->rho.resize(static_cast<size_t>(N_rho));
  g->tau.resize(static_cast<size_t>(N_rho));
  for (int i = 0; i < N_rho; ++i) {
    g->rho[static_cast<size_t>(i)] = -L_rho + 2.0 * L_rho * i / N_rho;
    g->tau[static_cast<size_t>(i)] = std::numbers::pi * (i - N_rho / 2) / L_rho;
  }
  g->modes = MultiIndexSet(d, K);
  g->nx = 1;
  for (int j = 0; j < d; ++j) g->nx *= static_cast<size_t>(M);
  const size_t nm = g->modes.size();
  g->phi.assign(g->nx * nm, 0.0);
  g->weight_flat.assign(g->nx, 1.0);
  for (size_t q = 0; q < g->nx; ++q) {
    const auto idx = g->x_multi(q);
    for (int j = 0; j < d; ++j) g->weight_flat[q] *= g->weights_x[static_cast<size_t>(idx[static_cast<size_t>(j)])];
    for (size_t m = 0; m < nm; ++m) {
      double v = 1.0;
      for (int j = 0; j < d; ++j)
        v *= g->hermite_1d[static_cast<size_t>(idx[static_cast<size_t>(j)]) * static_cast<size_t>(K + 1) +
                           static_cast<size_t>(g->modes[m][static_cast<size_t>(j)])];
      g->phi[q * nm + m] = v;
    }
  }
  return g;
}

/// Complex samples on a Grid, layout [rho index][flat x index].
struct Field {
  GridPtr grid;
  std::vector<cplx> values;

  Field() = default;
  explicit Field(GridPtr g) : grid(std::move(g)), values(grid->size(), cplx{}) {}
  cplx& at(size_t i, size_t q) { return values[i * grid->nx + q]; }
  const cplx& at(size_t i, size_t q) const { return values[i * grid->nx + q]; }
};

inline void check_finite(std::span<const cplx> v, const char* what) {
  for (const auto& c : v)
    require(std::isfinite(c.real()) && std::isfinite(c.imag()), Errc::non_finite, what);
}

using PointFunction = std::function<cplx(double rho, std::span<const double> x)>;

inline Field sample(const GridPtr& grid, const PointFunction& f) {
  Field out(grid);
  for (size_t q = 0; q < grid->nx; ++q) {
    const auto x = grid->x_point(q);
    for (int i = 0; i < grid->N_rho; ++i) out.at(static_cast<size_t>(i), q) = f(grid->rho[static_cast<size_t>(i)], x);
  }
  check_finite(out.values, "sampled function is not finite at a grid node");
  return out;
}

/// (int |f|^p dz)^{1/p} by the rho-trapezoid times compensated Gauss-Hermite
/// weights; the maximum over nodes for p = inf.
inline double lp_norm(const Field& f, double p) {
  require(p >= 1.0, Errc::invalid_parameter, "lp_norm requires p >= 1");
  const Grid& g = *f.grid;
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (int i = 0; i < g.N_rho; ++i)
    for (size_t q = 0; q < g.nx; ++q)
      s += g.weight_flat[q] * std::pow(std::abs(f.at(static_cast<size_t>(i), q)), p);
  return std::pow(g.rho_step() * s, 1.0 / p);
}

/// Discrete L^2 inner product int f conj(g).
inline cplx inner(const Field& f, const Field& g) {
  const Grid& gr = *f.grid;
  cplx s{};
  for (int i = 0; i < gr.N_rho; ++i)
    for (size_t q = 0; q < gr.nx; ++q)
      s += gr.weight_flat[q] * f.at(static_cast<size_t>(i), q) * std::conj(g.at(static_cast<size_t>(i), q));
  return gr.rho_step() * s;
}

inline Field operator+(const Field& a, const Field& b) {
  Field c = a;
  for (size_t i = 0; i < c.values.size(); ++i) c.values[i] += b.values[i];
  return c;
}
inline Field operator-(const Field& a, const Field& b) {
  Field c = a;
  for (size_t i = 0; i < c.values.size(); ++i) c.values[i] -= b.values[i];
  return c;
}
inline Field operator*(cplx s, const Field& a) {
  Field c = a;
  for (auto& v : c.values) v *= s;
  return c;
}

/// Relative L^2 distance ||a - b|| / ||b||.
inline double relative_l2(const Field& a, const Field& b) {
  const double nb = lp_norm(b, 2.0);
  return lp_norm(a - b, 2.0) / (nb > 0 ? nb : 1.0);
}

/// Uniform tensor grid on prod_j [-R_j, R_j), axis 0 is rho.
struct UniformBox {
  std::vector<double> R;
  std::vector<int> n;

  UniformBox() = default;
  UniformBox(std::vector<double> half_widths, std::vector<int> counts)
      : R(std::move(half_widths)), n(std::move(counts)) {
    require(R.size() == n.size() && !R.empty(), Errc::invalid_parameter, "box axes mismatch");
    for (size_t j = 0; j < R.size(); ++j) {
      require(R[j] > 0.0, Errc::invalid_parameter, "box half-width must be positive");
      require(n[j] >= 2 && n[j] % 2 == 0, Errc::invalid_parameter, "box sample counts must be even");
    }
  }
  size_t dims() const { return R.size(); }
  double step(size_t j) const { return 2.0 * R[j] / n[j]; }
  double coord(size_t j, int i) const { return -R[j] + i * step(j); }
  size_t size() const {
    size_t s = 1;
    for (int v : n) s *= static_cast<size_t>(v);
    return s;
  }
  double cell() const {
    double c = 1.0;
    for (size_t j = 0; j < R.size(); ++j) c *= step(j);
    return c;
  }
  std::vector<int> multi(size_t flat) const {
    std::vector<int> idx(R.size());
    for (size_t j = R.size(); j-- > 0;) {
      idx[j] = static_cast<int>(flat % static_cast<size_t>(n[j]));
      flat /= static_cast<size_t>(n[j]);
    }
    return idx;
  }
  std::vector<double> point(size_t flat) const {
    auto idx = multi(flat);
    std::vector<double> z(idx.size());
    for (size_t j = 0; j < idx.size(); ++j) z[j] = coord(j, idx[j]);
    return z;
  }
};

struct UniformSamples {
  UniformBox box;
  std::vector<cplx> values;
};

/// Samples z -> f(z) on a box; f receives (rho, x...) as one span.
inline UniformSamples sample_box(const UniformBox& box, const std::function<cplx(std::span<const double>)>& f) {
  UniformSamples s{box, std::vector<cplx>(box.size())};
  for (size_t i = 0; i < box.size(); ++i) {
    const auto z = box.point(i);
    s.values[i] = f(z);
  }
  check_finite(s.values, "sampled function is not finite on the box");
  return s;
}

/// Weighted trapezoid L^p norm (int w(z)|f(z)|^p dz)^{1/p}; p = inf takes
/// the maximum of w^{1/p}|f| with the weight ignored.
inline double lp_norm(const UniformSamples& s, double p,
                      const std::function<double(std::span<const double>)>& weight = {}) {
  require(p >= 1.0, Errc::invalid_parameter, "lp_norm requires p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : s.values) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  for (size_t i = 0; i < s.values.size(); ++i) {
    double w = 1.0;
    if (weight) w = weight(s.box.point(i));
    acc += w * std::pow(std::abs(s.values[i]), p);
  }
  return std::pow(s.box.cell() * acc, 1.0 / p);
}

}  // namespace pharmonic
