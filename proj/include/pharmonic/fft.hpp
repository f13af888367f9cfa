#pragma once

// Thin FFTW wrappers. Plans are made per call with FFTW_ESTIMATE (which
// never touches the arrays), under a process-wide lock because the FFTW
// planner is not thread safe.

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

#include "pharmonic/error.hpp"

namespace pharmonic {

using cplx = std::complex<double>;

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
}  // namespace detail

enum class FftDirection { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

/// In-place unnormalized 1-D transforms of length n on `howmany` interleaved
/// sequences: element k of sequence b sits at data[k * stride + b * dist].
inline void fft_many(std::vector<cplx>& data, int n, int howmany, int stride, int dist,
                     FftDirection dir) {
  if (n <= 0 || howmany <= 0) return;
  require(static_cast<size_t>((n - 1) * stride + (howmany - 1) * dist + 1) <= data.size(),
          Errc::invalid_parameter, "fft_many layout exceeds buffer");
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_many_dft(1, &n, howmany, detail::as_fftw(data.data()), nullptr, stride, dist,
                              detail::as_fftw(data.data()), nullptr, stride, dist,
                              static_cast<int>(dir), FFTW_ESTIMATE);
  }
  require(plan != nullptr, Errc::invalid_parameter, "FFTW could not create a plan");
  fftw_execute(plan);
  std::lock_guard lock(detail::fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

/// In-place unnormalized multi-dimensional transform, row-major dims.
inline void fft_nd(std::vector<cplx>& data, const std::vector<int>& dims, FftDirection dir) {
  size_t total = 1;
  for (int n : dims) total *= static_cast<size_t>(n);
  require(total == data.size() && !dims.empty(), Errc::invalid_parameter,
          "fft_nd dimensions do not match buffer");
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), detail::as_fftw(data.data()),
                         detail::as_fftw(data.data()), static_cast<int>(dir), FFTW_ESTIMATE);
  }
  require(plan != nullptr, Errc::invalid_parameter, "FFTW could not create a plan");
  fftw_execute(plan);
  std::lock_guard lock(detail::fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace pharmonic
