#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace levykato::quad {

struct Result {
    double value = 0.0;
    double abs_err = 0.0;
    std::size_t evals = 0;
};

// Gauss-Kronrod 7-15 on [a,b]; abs_err from |K15 - G7|.
Result gk15(const std::function<double(double)>& f, double a, double b);

// Adaptive bisection on top of gk15.
Result adaptive(const std::function<double(double)>& f, double a, double b,
                double abs_tol, double rel_tol = 1e-10, int max_depth = 30);

// Integral of f over [a, inf), f eventually of one sign and ~ c*xi^{-p}, p > 1.
// Geometric octave panels plus a power-law tail extrapolation; the tail
// correction carries a 20% error margin of its own size.
Result decaying_tail(const std::function<double(double)>& f, double a,
                     double abs_tol, double xi_cap = 1e9);

// Oscillatory Fourier-type integrals on [0, inf):
//   int_0^inf f(xi) * cos(x*xi) dxi      (use_sin = false)
//   int_0^inf f(xi) * sin(x*xi) dxi      (use_sin = true)
// f smooth, eventually monotone to 0. Splits at the half-period zeros of the
// trigonometric factor and accelerates the alternating series of segment
// integrals (Euler transform). For |x| below x_switch the head is handled as a
// plain decaying integral up to the first oscillation scale.
Result fourier_oscillatory(const std::function<double(double)>& f, double x,
                           bool use_sin, double abs_tol);

// Same integrand but f decays (super-)exponentially beyond xi_cut; integrates
// adaptively with panels no wider than a half period.
Result fourier_decay(const std::function<double(double)>& f, double x,
                     bool use_sin, double xi_cut, double abs_tol);

} // namespace levykato::quad
