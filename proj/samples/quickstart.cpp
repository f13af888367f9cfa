// Fractional powers, Riesz transforms and an adapted Sobolev norm of one
// field, by the spectral and the heat-kernel routes.

#include <cmath>
#include <cstdio>

#include "pharmonic/heat_kernel.hpp"
#include "pharmonic/ladder.hpp"
#include "pharmonic/sobolev.hpp"

using namespace pharmonic;

int main() {
  // d = 1: rho-period 20 with 64 points, Hermite degrees up to 16 on 17 nodes
  const GridPtr g = make_grid(1, 64, 10.0, 16, 17);
  const Field f = sample(g, [](double rho, std::span<const double> x) {
    return cplx(std::exp(-rho * rho / 2) * hermite_eval(0, x[0]) * (1 + 0.5 * x[0]));
  });

  const Field spectral = frac_power(f, -0.5);
  const Field kernel = frac_power_kernel(f, -0.5);
  std::printf("||H^{-1/2} f||_2            %.12f\n", lp_norm(spectral, 2.0));
  std::printf("kernel vs spectral (rel L2) %.3e\n", relative_l2(kernel, spectral));

  double riesz_sq = 0.0;
  for (int j : gradient_indices(1)) riesz_sq += std::pow(lp_norm(riesz(j, f), 2.0), 2);
  std::printf("sum_j ||R_j f||^2 / ||f||^2  %.12f  (between 1 and 2)\n", riesz_sq / std::pow(lp_norm(f, 2.0), 2));

  std::printf("potential norm  alpha=1 p=2  %.12f\n", potential_norm(f, 1.0, 2.0));
  std::printf("ladder norm     k=1     p=2  %.12f\n", ladder_norm(f, 1, 2.0));
  std::printf("||e^{-H} f||_2 / ||f||_2      %.12f  (at most e^{-1})\n", lp_norm(heat_spectral(f, 1.0), 2.0) / lp_norm(f, 2.0));
}
