#pragma once

// Quadrature for integrals of the form  int_a^b e^{rho u} s(u) du  with s
// smooth and real and Im(rho) possibly large.
//
// Each panel [m - h, m + h] is mapped to t in [-1, 1]; the non-oscillating
// factor e^{Re(rho) h t} s(m + h t) is projected onto Legendre polynomials
// by Gauss-Legendre quadrature and the oscillating factor is integrated
// exactly:  int_{-1}^{1} e^{i w t} P_n(t) dt = 2 i^n j_n(w).  The cost is
// set by the smoothness of s, not by the number of oscillations.  Panels are
// halved adaptively (largest error first) until the summed tail estimate
// meets the tolerance.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>

namespace primerace {

/// j_0(x) .. j_{out.size()-1}(x), spherical Bessel functions of the first kind.
void sph_bessel_sequence(double x, std::span<double> out);
double sph_bessel(unsigned n, double x);

struct QuadratureResult {
  std::complex<double> value;
  double error_estimate = 0.0;
  std::size_t panels = 0;
  bool converged = false;
};

QuadratureResult integrate_oscillatory(std::complex<double> rho, const std::function<double(double)>& smooth,
                                       double a, double b, double abs_tol,
                                       std::size_t max_panels = std::size_t{1} << 20);

}  // namespace primerace
