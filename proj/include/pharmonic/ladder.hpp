#pragma once

// Ladder operators A_0 = -d/drho, A_j = -d/dx_j + x_j, A_{-j} = d/dx_j + x_j,
// realized exactly as coefficient shifts, and the Riesz transforms built on
// them.

#include <cmath>
#include <string>
#include <vector>

#include "pharmonic/error.hpp"
#include "pharmonic/report.hpp"
#include "pharmonic/spectral.hpp"

namespace pharmonic {

/// Largest relative energy a raising operator may push past |mu| = K.
inline constexpr double kRaiseTailLimit = 1e-8;

inline void check_ladder_index(int j, int d) {
  require(j >= -d && j <= d, Errc::invalid_parameter,
          "ladder index " + std::to_string(j) + " outside [-d, d] for d = " + std::to_string(d));
}

inline SpectralCoeffs apply_A(int j, const SpectralCoeffs& c) {
  const Grid& g = *c.grid;
  check_ladder_index(j, g.d);
  SpectralCoeffs out(c.grid);
  const size_t nm = c.nm();
  if (j == 0) {
    for (int slot = 0; slot < g.N_rho; ++slot)
      for (size_t m = 0; m < nm; ++m)
        out.at(slot, m) = cplx(0.0, -g.tau[static_cast<size_t>(slot)]) * c.at(slot, m);
    return out;
  }
  const int axis = std::abs(j) - 1;
  if (j > 0) {
    double all = 0.0, dropped = 0.0;
    for (int slot = 0; slot < g.N_rho; ++slot)
      for (size_t m = 0; m < nm; ++m) {
        const double e = std::norm(c.at(slot, m));
        all += e;
        if (g.modes.degree(m) == g.K) dropped += e;
      }
    require(all == 0.0 || dropped <= kRaiseTailLimit * all, Errc::truncation,
            "raising operator A_" + std::to_string(j) + " would drop relative energy " +
                std::to_string(all > 0 ? dropped / all : 0.0) + " beyond |mu| = K");
    for (int slot = 0; slot < g.N_rho; ++slot)
      for (size_t m = 0; m < nm; ++m) {
        const int lo = g.modes.lowered(axis, m);
        if (lo < 0) continue;
        const double mj = g.modes[m][static_cast<size_t>(axis)];
        out.at(slot, m) = std::sqrt(2.0 * mj) * c.at(slot, static_cast<size_t>(lo));
      }
    return out;
  }
  for (int slot = 0; slot < g.N_rho; ++slot)
    for (size_t m = 0; m < nm; ++m) {
      const int up = g.modes.raised(axis, m);
      if (up < 0) continue;
      const double mj = g.modes[m][static_cast<size_t>(axis)];
      out.at(slot, m) = std::sqrt(2.0 * (mj + 1.0)) * c.at(slot, static_cast<size_t>(up));
    }
  return out;
}

inline Field apply_A(int j, const Field& f) { return inverse(apply_A(j, forward(f))); }

/// R_j = A_j H^{-1/2}.
inline SpectralCoeffs riesz(int j, const SpectralCoeffs& c) {
  return apply_A(j, apply_multiplier(c, power_multiplier(-0.5)));
}
inline Field riesz(int j, const Field& f) { return inverse(riesz(j, forward(f))); }

/// A_{j1} A_{j2} H^{-1}.
inline SpectralCoeffs riesz_multi(int j1, int j2, const SpectralCoeffs& c) {
  return apply_A(j1, apply_A(j2, apply_multiplier(c, power_multiplier(-1.0))));
}
inline Field riesz_multi(int j1, int j2, const Field& f) { return inverse(riesz_multi(j1, j2, forward(f))); }

/// Ladder indices in gradient order: 0, 1..d, -1..-d.
inline std::vector<int> gradient_indices(int d) {
  std::vector<int> js{0};
  for (int j = 1; j <= d; ++j) js.push_back(j);
  for (int j = 1; j <= d; ++j) js.push_back(-j);
  return js;
}

inline std::vector<SpectralCoeffs> grad_H(const SpectralCoeffs& c) {
  std::vector<SpectralCoeffs> out;
  for (int j : gradient_indices(c.grid->d)) out.push_back(apply_A(j, c));
  return out;
}

inline std::vector<Field> grad_H(const Field& f) {
  std::vector<Field> out;
  for (const auto& c : grad_H(forward(f))) out.push_back(inverse(c));
  return out;
}

namespace detail {
inline double relative_residual(const SpectralCoeffs& a, const SpectralCoeffs& b) {
  const double scale = std::max(norm2(a), norm2(b));
  return scale > 0.0 ? norm2(a - b) / scale : 0.0;
}
}  // namespace detail

/// The five commutation identities between ladder operators and (shifted)
/// powers; for j = 0 only the A_0 identity applies. Needs d >= 3 for j != 0
/// so that (H - 2)^alpha is nonsingular on every mode.
inline Report commute_check(int j, double alpha, const Field& f, double tol = 1e-10) {
  const Grid& g = *f.grid;
  check_ladder_index(j, g.d);
  require(j == 0 || g.d >= 3, Errc::domain, "commutation with (H - 2)^alpha needs d >= 3");
  const SpectralCoeffs c = forward(f);
  // Plain multiplier: the identities are coefficientwise, and A_{-j} of a
  // ground state is pure rounding, which would trip the high-mode guard.
  auto P = [&](const SpectralCoeffs& x, double shift) { return apply_multiplier(x, power_multiplier(alpha, shift)); };
  Report r;
  r.suite = "commute";
  r.param("d", g.d);
  r.param("j", j);
  r.param("alpha", alpha);
  r.at_most("A0_H^a=H^a_A0", detail::relative_residual(apply_A(0, P(c, 0)), P(apply_A(0, c), 0)), tol);
  if (j != 0) {
    const int a = std::abs(j);
    r.at_most("Aj_H^a=(H-2)^a_Aj", detail::relative_residual(apply_A(a, P(c, 0)), P(apply_A(a, c), -2)), tol);
    r.at_most("A-j_H^a=(H+2)^a_A-j", detail::relative_residual(apply_A(-a, P(c, 0)), P(apply_A(-a, c), 2)), tol);
    r.at_most("H^a_Aj=Aj_(H+2)^a", detail::relative_residual(P(apply_A(a, c), 0), apply_A(a, P(c, 2))), tol);
    r.at_most("H^a_A-j=A-j_(H-2)^a", detail::relative_residual(P(apply_A(-a, c), 0), apply_A(-a, P(c, -2))), tol);
  }
  return r;
}

/// Compares I = int f conj(g) with S = sum_j int R_j f conj(R_j g). The
/// displayed identity I = 2S does not hold mode by mode: the quadratic form
/// ratio is (tau^2 + 4|mu| + 2d) / lambda, in [1, 2]. The report therefore
/// checks I <= S <= 2I on f and on g and flags the constant.
inline Report duality_check(const Field& f, const Field& g) {
  const SpectralCoeffs cf = forward(f), cg = forward(g);
  auto S_of = [](const SpectralCoeffs& a, const SpectralCoeffs& b) {
    cplx s{};
    for (int j : gradient_indices(a.grid->d)) s += inner(riesz(j, a), riesz(j, b));
    return s;
  };
  Report r;
  r.suite = "duality";
  r.param("d", f.grid->d);
  const cplx I = inner(cf, cg), S = S_of(cf, cg);
  r.info("I", I.real());
  r.info("S", S.real());
  const double scale = std::sqrt(norm2(cf) * norm2(cg));
  const double eps = 1e-12;
  for (const auto* c : {&cf, &cg}) {
    const double If = norm2(*c) * norm2(*c);
    const double Sf = S_of(*c, *c).real();
    const std::string tag = c == &cf ? "f" : "g";
    r.check("lower_I<=S_" + tag, If <= Sf + eps * If, "mode factor (tau^2+4|mu|+2d)/lambda >= 1");
    r.check("upper_S<=2I_" + tag, Sf <= 2 * If + eps * If, "mode factor (tau^2+4|mu|+2d)/lambda <= 2");
    if (If > 0) r.info("ratio_S/I_" + tag, Sf / If);
  }
  r.info("displayed_identity_defect", scale > 0 ? std::abs(I - 2.0 * S) / (scale * scale) : 0.0,
         "the displayed identity with constant 2 fails mode by mode; only the sandwich I <= S <= 2I holds");
  return r;
}

/// ||H^{1/2} f||_p <= C sum_j ||A_j f||_p over a family, with the empirical
/// constant; for p = 2 also the mode-wise bound on squares.
inline Report inverse_riesz_check(const std::vector<Field>& family, double p) {
  require(p == 2.0 || p == 4.0, Errc::invalid_parameter, "inverse Riesz check supports p in {2, 4}");
  require(!family.empty(), Errc::invalid_parameter, "empty test family");
  Report r;
  r.suite = "riesz";
  r.param("d", family.front().grid->d);
  r.param("p", p);
  r.param("family_size", static_cast<double>(family.size()));
  double sup = 0.0;
  bool sharp = true;
  for (const auto& f : family) {
    const SpectralCoeffs c = forward(f);
    const double lhs = lp_norm(inverse(frac_power(c, 0.5)), p);
    double rhs = 0.0, rhs2 = 0.0;
    for (const auto& a : grad_H(c)) {
      rhs += lp_norm(inverse(a), p);
      rhs2 += norm2(a) * norm2(a);
    }
    if (rhs > 0) sup = std::max(sup, lhs / rhs);
    if (p == 2.0) {
      const double l2 = norm2(frac_power(c, 0.5));
      sharp = sharp && l2 * l2 <= rhs2 * (1 + 1e-12);
    }
  }
  r.info("empirical_constant", sup);
  if (p == 2.0) r.check("modewise_square_bound", sharp, "lambda <= tau^2 + 4|mu| + 2d");
  return r;
}

inline Report inverse_riesz_check(const Field& f, double p) { return inverse_riesz_check(std::vector<Field>{f}, p); }

}  // namespace pharmonic
