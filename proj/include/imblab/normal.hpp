#pragma once

namespace imblab {

/// Pr{N(0,1) <= x}. Self-contained rational-approximation implementation
/// (Cody's erf/erfc scheme); absolute error below 1e-14 on [-37.5, 37.5],
/// underflows to 0 beyond the left end and saturates at 1 on the right.
double std_normal_cdf(double x);

/// Standard normal density.
double std_normal_pdf(double x);

namespace detail {
double erf_cody(double x);
double erfc_cody(double x);
}  // namespace detail

}  // namespace imblab
