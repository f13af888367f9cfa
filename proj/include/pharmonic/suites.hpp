#pragma once

// Named verification suites behind the command-line tool. Each suite takes
// a SuiteConfig, fills in its own defaults for anything left unset, and
// returns one aggregated Report.

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pharmonic/heat_kernel.hpp"
#include "pharmonic/hermite.hpp"
#include "pharmonic/inequalities.hpp"
#include "pharmonic/ladder.hpp"
#include "pharmonic/report.hpp"
#include "pharmonic/sobolev.hpp"
#include "pharmonic/spectral.hpp"
#include "pharmonic/symbols.hpp"

namespace pharmonic {

/// Unset optionals fall back to the suite's defaults.
struct SuiteConfig {
  std::string suite;
  std::optional<int> d, N_rho, K, M;
  std::optional<double> L_rho, alpha, p, q, tol;
  std::uint64_t seed = 1;
  int family = 10;  // base test-family size; checks also run on 4x this
  std::string out;  // empty or "-" writes to stdout
  ReportFormat format = ReportFormat::csv;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "mehler",  "semigroup", "powers",  "commute",             "kernel-bounds", "weighted-decay", "riesz",
      "duality", "symbols",   "sobolev-equivalence", "inclusions", "hls",        "gns",            "hardy"};
  return names;
}

inline ReportFormat parse_format(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw Error(Errc::config_validation, "format must be csv or json, got '" + s + "'");
}

namespace suitedetail {

inline int dim(const SuiteConfig& c, int fallback) { return c.d.value_or(fallback); }

/// Grid with per-field overrides from the config.
inline GridPtr grid(const SuiteConfig& c, int d, int N, double L, int K, int M) {
  return make_grid(d, c.N_rho.value_or(N), c.L_rho.value_or(L), c.K.value_or(K), c.M.value_or(M));
}

/// Grids the Sobolev and inequality suites use unless overridden.
inline GridPtr family_grid(const SuiteConfig& c, int d) {
  if (d == 1) return grid(c, 1, 64, 10.0, 20, 48);
  if (d == 2) return grid(c, 2, 32, 8.0, 14, 20);
  return grid(c, d, 16, 6.0, 10, 12);
}

inline TestFamily family(const SuiteConfig& c) {
  TestFamily f;
  f.seed = c.seed;
  f.count = c.family;
  return f;
}

inline std::vector<double> alphas(const SuiteConfig& c, std::vector<double> fallback) {
  return c.alpha ? std::vector<double>{*c.alpha} : fallback;
}

/// Metric-name tag such as "alpha0.5_".
inline std::string tag(const std::string& key, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return key + buf + "_";
}

inline Field ground_gaussian(const GridPtr& g) {
  return sample(g, [](double r, std::span<const double> x) {
    return cplx(std::exp(-r * r / 2) * phi_mu(MultiIndex(x.size(), 0), x));
  });
}

inline Field random_field(const GridPtr& g, std::uint64_t seed, const std::string& label, std::uint64_t i,
                          int degree, int freq) {
  auto rng = make_rng(seed, label, i);
  return inverse(random_band_limited(g, rng, degree, freq));
}

inline void grid_params(Report& r, const GridPtr& g) {
  r.param("d", g->d);
  r.param("N_rho", g->N_rho);
  r.param("L_rho", g->L_rho);
  r.param("K", g->K);
  r.param("M", g->M);
}

// ---------------------------------------------------------------------------

inline Report mehler(const SuiteConfig& c) {
  const int d = dim(c, 1);
  const int K = c.K.value_or(60);
  Report r;
  r.param("d", d);
  r.param("K_sum", K);
  const std::vector<double> pts{-2, -1, 0, 1, 2};
  for (double rv : {0.3, 0.5, 0.9}) {
    double worst = 0.0;
    for (double a : pts)
      for (double b : pts) {
        const std::vector<double> x(static_cast<size_t>(d), a), xp(static_cast<size_t>(d), b);
        const double exact = mehler_closed_form(rv, x, xp);
        worst = std::max(worst, std::abs(mehler_partial_sum(K, rv, x, xp) - exact) / exact);
      }
    const double tol = c.tol.value_or(rv <= 0.5 ? 1e-10 : 1e-6);
    r.at_most(tag("r", rv) + "max_rel_err", worst, tol, "5x5 grid in [-2,2]^2, relative to the closed form");
  }
  return r;
}

inline Report semigroup(const SuiteConfig& c) {
  const int d = dim(c, 1);
  const auto g = grid(c, d, 128, 16.0, 8, 9);
  const Field f = ground_gaussian(g);
  Report r;
  grid_params(r, g);
  for (double t : {0.1, 0.5, 2.0}) {
    const auto k = heat_apply_kernel(f, t);
    r.at_most(tag("t", t) + "kernel_vs_spectral_rel_l2", relative_l2(k.field, heat_spectral(f, t)),
              c.tol.value_or(1e-6));
    r.check(tag("t", t) + "no_truncation_warning", !k.truncation_warning);
  }
  // e^{-tH}(e^{-rho^2/2} Phi_0) = e^{-td} (1+2t)^{-1/2} e^{-rho^2/(2(1+2t))} Phi_0
  const double t = 0.5;
  const Field h = heat_spectral(f, t);
  double err = 0.0;
  for (int i = 0; i < g->N_rho; ++i)
    for (size_t q = 0; q < g->nx; ++q) {
      const double rho = g->rho[static_cast<size_t>(i)];
      const double ref = std::exp(-t * d) / std::sqrt(1 + 2 * t) * std::exp(-rho * rho / (2 * (1 + 2 * t))) *
                         phi_mu(MultiIndex(static_cast<size_t>(d), 0), g->x_point(q));
      err = std::max(err, std::abs(h.at(static_cast<size_t>(i), q) - ref));
    }
  r.at_most("closed_form_max_err_t0.5", err, 1e-8, "grid-max error against the Gaussian closed form");
  const Field rnd = random_field(g, c.seed, "semigroup", 0, std::min(6, g->K), std::min(7, g->N_rho / 2 - 1));
  r.at_most("semigroup_law_rel_l2", relative_l2(heat_spectral(heat_spectral(rnd, 0.3), 0.7), heat_spectral(rnd, 1.0)),
            1e-12, "e^{-0.3H} e^{-0.7H} = e^{-H}");
  r.check("contraction", lp_norm(heat_spectral(rnd, 0.4), 2.0) <= lp_norm(rnd, 2.0));
  return r;
}

inline Report powers(const SuiteConfig& c) {
  const int d = dim(c, 1);
  const auto g = grid(c, d, 64, 10.0, 16, 17);
  Report r;
  grid_params(r, g);
  auto rng = make_rng(c.seed, "powers");
  const SpectralCoeffs rc = random_band_limited(g, rng, std::min(6, g->K), std::min(7, g->N_rho / 2 - 1));
  double law = 0.0, comp = 0.0;
  for (double s : {0.2, 1.0}) {
    const auto lhs = apply_multiplier(apply_multiplier(rc, heat_multiplier(s)), heat_multiplier(0.5));
    law = std::max(law, norm2(lhs - apply_multiplier(rc, heat_multiplier(s + 0.5))) / norm2(rc));
  }
  const std::vector<double> ex{-1.0, -0.5, 0.5, 1.0};
  for (double a : ex)
    for (double b : ex) {
      const auto lhs = frac_power(frac_power(rc, b), a), rhs = frac_power(rc, a + b);
      comp = std::max(comp, norm2(lhs - rhs) / norm2(rhs));
    }
  r.at_most("semigroup_law_residual", law, 1e-12);
  r.at_most("power_composition_residual", comp, 1e-12, "H^a H^b = H^{a+b}, a, b in {-1,-1/2,1/2,1}");
  const Field f = ground_gaussian(g);
  for (double a : alphas(c, {-0.5, 0.5}))
    r.at_most(tag("alpha", a) + "kernel_vs_spectral_rel_l2", relative_l2(frac_power_kernel(f, a), frac_power(f, a)),
              c.tol.value_or(1e-4));
  return r;
}

inline Report commute(const SuiteConfig& c) {
  const int d = dim(c, 3);
  const auto g = grid(c, d, 32, 6.0, 8, 9);
  Report r;
  grid_params(r, g);
  const Field gauss = ground_gaussian(g);
  const Field rnd = random_field(g, c.seed, "commute", 0, std::min(4, g->K - 1), std::min(4, g->N_rho / 2 - 1));
  for (double a : alphas(c, {-1.0, -0.5, 0.5}))
    for (int j : {0, 1, -1}) {
      if (j != 0 && d < 3) continue;
      for (const auto& [name, f] : {std::pair{"gauss", &gauss}, std::pair{"random", &rnd}})
        r.merge(commute_check(j, a, *f, c.tol.value_or(1e-10)),
                tag("alpha", a) + "j" + std::to_string(j) + "_" + name + "_");
    }
  if (d >= 3) {
    // A_1 on the ground mode, then (H - 2)^{-1/2}: both orders give sqrt(2/3)
    SpectralCoeffs one(g);
    one.mode(0, MultiIndex(static_cast<size_t>(d), 0)) = 1.0;
    MultiIndex e1(static_cast<size_t>(d), 0);
    e1[0] = 1;
    const cplx expect = std::sqrt(2.0) / std::sqrt(3.0);
    const auto lhs = frac_power(apply_A(1, one), -0.5, -2.0);
    const auto rhs = apply_A(1, frac_power(one, -0.5));
    r.at_most("mode_oracle_lhs_err", std::abs(lhs.mode(0, e1) - expect), 4e-16, "exact to rounding");
    r.at_most("mode_oracle_rhs_err", std::abs(rhs.mode(0, e1) - expect), 4e-16, "exact to rounding");
  }
  return r;
}

inline Report kernel_bounds(const SuiteConfig& c) {
  const int d = dim(c, 1);
  KernelSampleSpec spec;
  spec.count = 40;
  spec.seed = c.seed;
  TQuadrature tq;
  if (c.tol) tq.tol = *c.tol;
  Report r;
  r.param("d", d);
  r.param("samples_level0", spec.count);
  for (double a : alphas(c, {0.5, 1.0, 1.5})) r.merge(kernel_bound_report(a, d, spec, tq), tag("alpha", a));
  return r;
}

inline Report weighted_decay(const SuiteConfig& c) {
  const int d = dim(c, 1);
  const double a = c.alpha.value_or(0.5), p = c.p.value_or(2.0);
  const auto g = family_grid(c, d);
  Report r;
  grid_params(r, g);
  r.param("alpha", a);
  r.param("p", p);
  if (d == 1) r.merge(schur_report(a, 4.0, 16), "schur_");
  r.merge(weighted_decay_check(a, p, family(c), g), "family_");
  return r;
}

inline Report riesz(const SuiteConfig& c) {
  const int d = dim(c, 1);
  const double a = c.alpha.value_or(1.0), p = c.p.value_or(2.0);
  const auto g = family_grid(c, d);
  const TestFamily fam = family(c);
  Report r;
  grid_params(r, g);
  for (int j : {0, 1, -1}) r.merge(riesz_on_potential_check(j, a, p, fam, g), "j" + std::to_string(j) + "_");
  r.merge(inverse_riesz_check(fam.members(g), p), "inverse_");
  return r;
}

inline Report duality(const SuiteConfig& c) {
  const int d = dim(c, 1);
  const auto g = family_grid(c, d);
  Report r;
  grid_params(r, g);
  const int pairs = 10;
  r.param("fields", 2 * pairs);
  for (int i = 0; i < pairs; ++i) {
    const int deg = g->K - 1, freq = std::min(8, g->N_rho / 2 - 1);
    const Field f = random_field(g, c.seed, "duality", static_cast<std::uint64_t>(2 * i), deg, freq);
    const Field h = random_field(g, c.seed, "duality", static_cast<std::uint64_t>(2 * i + 1), deg, freq);
    r.merge(duality_check(f, h), "pair" + std::to_string(i) + "_");
  }
  return r;
}

inline Report symbols(const SuiteConfig& c) {
  const double a = c.alpha.value_or(-0.5);
  Report r;
  r.param("alpha", a);
  SampleDomain dom;
  dom.seed = c.seed;
  r.merge(gm_bound_estimate(sigma_alpha_symbol(a), 2 * a, dom, 2), "sigma_gm_");
  for (int j : {0, 1, -1}) r.merge(gm_bound_estimate(riesz_symbol_fn(j), 0.0, dom, 0), "riesz" + std::to_string(j) + "_s0_");
  // quantization against the spectral and ladder routes, d = 1
  const auto g = grid(c, 1, 64, 10.0, 24, 25);
  const Field f = sample(g, [](double rho, std::span<const double> x) {
    return cplx(std::exp(-rho * rho / 2) * hermite_eval(0, x[0]) * (1 + 0.5 * x[0]));
  });
  const UniformBox box({10.0, 8.0}, {32, 32});
  const auto fu = resample(f, box).samples;
  auto rel = [](const UniformSamples& x, const UniformSamples& y) {
    double n = 0, dd = 0;
    for (size_t i = 0; i < x.values.size(); ++i) {
      n += std::norm(x.values[i] - y.values[i]);
      dd += std::norm(y.values[i]);
    }
    return std::sqrt(n / dd);
  };
  const double qtol = c.tol.value_or(1e-3);
  const auto qs = quantize(sigma_alpha_symbol(a, 1e-10), fu);
  r.at_most("quantized_sigma_vs_spectral_rel_l2", rel(qs.samples, resample(frac_power(f, a), box).samples), qtol);
  for (int j : {0, 1, -1}) {
    const auto qr = quantize(riesz_symbol_fn(j, 1e-10), fu);
    r.at_most("quantized_riesz" + std::to_string(j) + "_vs_ladder_rel_l2",
              rel(qr.samples, resample(riesz(j, f), box).samples), qtol);
  }
  return r;
}

inline Report sobolev_equivalence(const SuiteConfig& c) {
  const int d = dim(c, 1);
  const auto g = family_grid(c, d);
  std::vector<std::pair<int, double>> cases{{1, 2.0}, {2, 2.0}, {1, 4.0}};
  if (c.p) cases = {{1, *c.p}, {2, *c.p}};
  Report r;
  grid_params(r, g);
  for (auto [k, p] : cases)
    r.merge(equivalence_report(family(c), g, k, p), "k" + std::to_string(k) + "_" + tag("p", p));
  return r;
}

inline Report inclusions(const SuiteConfig& c) {
  const double a = c.alpha.value_or(0.5), p = c.p.value_or(2.0);
  const std::vector<double> radii{4, 8, 16, 32};
  Report r;
  r.param("alpha", a);
  r.param("p", p);
  r.merge(strict_inclusion_demo(InclusionWitness::f1, a, p, radii), "f1_");
  r.merge(strict_inclusion_demo(InclusionWitness::f2, a, p, radii), "f2_");
  ChainOptions opt;
  opt.seed = c.seed;
  r.merge(inclusion_chain_report(a, opt), "chain_");
  return r;
}

/// hls_check, the shifted check (+2 below d = 3, -2 from d = 3 on) and, for
/// d = 1, both endpoint dichotomies at alpha.
inline Report hls(const SuiteConfig& c) {
  const int d = dim(c, 1);
  const double a = c.alpha.value_or(0.5), p = c.p.value_or(2.0);
  const double q = c.q.value_or(1.0 / (1.0 / p - a / (d + 1.0)));
  const auto g = family_grid(c, d);
  const TestFamily fam = family(c);
  Report r;
  grid_params(r, g);
  r.param("alpha", a);
  r.param("p", p);
  r.param("q", q);
  r.merge(hls_check(a, p, q, fam, g), "plain_");
  const double shift = d >= 3 ? -2.0 : 2.0;
  r.merge(shifted_hls_check(a, p, q, shift, fam, g), tag("shift", shift));
  if (d == 1) {
    const double qstar = 2.0 / (2.0 - a), pstar = 2.0 / a;
    for (double qe : {0.9 * qstar, qstar, 1.125 * qstar})
      r.merge(hls_endpoint_demo(EndpointRange::L1, a, 1, qe), "endpoint_L1_" + tag("q", qe));
    EndpointOptions eo;
    eo.first_level = 2;
    eo.levels = 12;
    for (double pe : {pstar, 1.25 * pstar})
      r.merge(hls_endpoint_demo(EndpointRange::Linf, a, 1, pe, eo), "endpoint_Linf_" + tag("p", pe));
  }
  return r;
}

inline Report gns(const SuiteConfig& c) {
  const int d = dim(c, 3);
  const double p = c.p.value_or(2.0), q = c.q.value_or(2.5);
  const auto g = family_grid(c, d);
  Report r;
  grid_params(r, g);
  r.merge(gns_check(p, q, family(c), g), "");
  return r;
}

inline Report hardy(const SuiteConfig& c) {
  const int d = dim(c, 1);
  const double a = c.alpha.value_or(d == 1 ? 0.75 : 1.0), p = c.p.value_or(2.0);
  const auto g = family_grid(c, d);
  Report r;
  grid_params(r, g);
  r.merge(hardy_check(a, p, family(c), g), "");
  return r;
}

inline const std::map<std::string, std::function<Report(const SuiteConfig&)>>& registry() {
  static const std::map<std::string, std::function<Report(const SuiteConfig&)>> m{
      {"mehler", mehler},
      {"semigroup", semigroup},
      {"powers", powers},
      {"commute", commute},
      {"kernel-bounds", kernel_bounds},
      {"weighted-decay", weighted_decay},
      {"riesz", riesz},
      {"duality", duality},
      {"symbols", symbols},
      {"sobolev-equivalence", sobolev_equivalence},
      {"inclusions", inclusions},
      {"hls", hls},
      {"gns", gns},
      {"hardy", hardy},
  };
  return m;
}

inline void check_config_exponents(const SuiteConfig& c) {
  const std::string& s = c.suite;
  const int d = c.d.value_or(s == "commute" || s == "gns" ? 3 : 1);
  if (s == "hls") {
    const double a = c.alpha.value_or(0.5), p = c.p.value_or(2.0);
    IneqCase{IneqTag::hls, a, p, c.q.value_or(1.0 / (1.0 / p - a / (d + 1.0))), d}.validate();
  } else if (s == "gns") {
    IneqCase{IneqTag::gns, 1.0, c.p.value_or(2.0), c.q.value_or(2.5), d}.validate();
  } else if (s == "hardy") {
    IneqCase{IneqTag::hardy, c.alpha.value_or(d == 1 ? 0.75 : 1.0), c.p.value_or(2.0), 2.0, d}.validate();
  } else if (s == "sobolev-equivalence" || s == "riesz" || s == "weighted-decay") {
    const double p = c.p.value_or(2.0);
    require(p == 2.0 || p == 4.0, Errc::invalid_parameter, "p must be 2 or 4");
  } else if (s == "inclusions") {
    const double a = c.alpha.value_or(0.5);
    require(a > 0.0 && a < 1.0, Errc::invalid_parameter, "inclusions need 0 < alpha < 1");
    require(c.d.value_or(1) == 1, Errc::invalid_parameter, "inclusion demos are d = 1");
  } else if (s == "symbols") {
    require(c.d.value_or(1) == 1, Errc::invalid_parameter, "the symbols suite runs at d = 1");
  } else if (s == "kernel-bounds") {
    if (c.alpha) require(*c.alpha > 0.0, Errc::invalid_parameter, "kernel order alpha must be positive");
  }
}

}  // namespace suitedetail

/// Checks everything that can be checked without computing; any failure is
/// a config-validation error.
inline void validate_config(const SuiteConfig& c) {
  require(suitedetail::registry().count(c.suite) == 1, Errc::unknown_suite, "unknown suite '" + c.suite + "'");
  try {
    auto positive = [](const auto& v, const char* what) {
      if (v) require(*v > 0, Errc::invalid_parameter, std::string(what) + " must be positive");
    };
    positive(c.d, "d");
    positive(c.N_rho, "Nrho");
    positive(c.L_rho, "Lrho");
    positive(c.K, "K");
    positive(c.M, "M");
    positive(c.tol, "tol");
    if (c.N_rho) require(is_power_of_two(*c.N_rho), Errc::invalid_parameter, "Nrho must be a power of two");
    require(c.family > 0, Errc::invalid_parameter, "family size must be positive");
    suitedetail::check_config_exponents(c);
  } catch (const Error& e) {
    if (e.code() == Errc::config_validation) throw;
    throw Error(Errc::config_validation, std::string(e.what()));
  }
}

/// Validates, runs and times one suite. Errors raised inside the suite are
/// rethrown with the suite name attached.
inline Report run_suite(const SuiteConfig& c) {
  validate_config(c);
  const auto start = std::chrono::steady_clock::now();
  Report r;
  try {
    r = suitedetail::registry().at(c.suite)(c);
  } catch (const Error& e) {
    throw Error(e.code(), "suite " + c.suite + ": " + e.what());
  }
  r.suite = c.suite;
  r.param("seed", std::to_string(c.seed));
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace pharmonic
