#pragma once

#include <limits>
#include <vector>

#include "levykato/levy_model.hpp"

namespace levykato {

struct AtomAtOrigin : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TailNotIntegrable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CaseAViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingDerivative : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Density samples of p(t,.), G^lambda or G_t^lambda on a sorted 1D grid.
struct KernelGrid {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> errors;
    double lambda = 0.0;
    double t = std::numeric_limits<double>::infinity();
    double mass_estimate = 0.0; // trapezoid integral over the grid
    double quadrature_error = 0.0;

    // linear interpolation; 0 outside the grid
    double interp(double x) const;
};

// uniform abscissae
std::vector<double> uniform_grid(double xmin, double xmax, int n);
// symmetric grid log-refined toward 0: uniform spacing h on [-xmax,xmax]
// plus geometric points down to |x| = x_core; optionally excludes 0 itself
std::vector<double> refined_grid(double xmax, int n_uniform, double x_core,
                                 bool include_zero);

// p(t,x) by Fourier inversion of e^{-t psi}. Throws AtomAtOrigin for compound
// Poisson specs and TailNotIntegrable when e^{-t Re psi} has no usable cutoff.
KernelGrid transition_density(const CharExponent& psi, double t,
                              const std::vector<double>& grid,
                              bool parallel = true);

// G^lambda(x) = (2 pi)^{-1} int Re(e^{-i x xi}/(lambda+psi)) dxi. With
// require_bounded (default) the defining integral must converge (throws
// CaseAViolation otherwise, detected by a partial-integral probe); without it
// the density may blow up at 0 and the grid must exclude 0.
KernelGrid potential_density(const CharExponent& psi, double lambda,
                             const std::vector<double>& grid,
                             bool parallel = true, bool require_bounded = true);

// G_t^lambda(x) = int_0^t e^{-lambda u} p(u,x) du. The default route inverts
// the closed-form Fourier multiplier (1 - e^{-t(lambda+psi)})/(lambda+psi) in
// one pass; the reference route integrates transition-density slices in u with
// geometric panels near 0 (u_min = 1e-6 t). Both agree to quadrature tolerance
// and the reference is kept serial for testing and benchmarks.
enum class TruncRoute { Multiplier, TimeQuadrature };
KernelGrid truncated_potential(const CharExponent& psi, double lambda, double t,
                               const std::vector<double>& grid,
                               bool parallel = true,
                               TruncRoute route = TruncRoute::Multiplier);

// w(z) = phi'(1/z) / (z^2 phi(1/z)^2) on a z-grid in (0,1]; two-sided
// comparable (not equal) to the subordinator potential density.
KernelGrid subordinator_weight(const LaplaceExponent& phi,
                               const std::vector<double>& zgrid);

// Compound Poisson kernels as atom lists: G_t^lambda = sum_n c_n nu^{*n}/rate^n
// with c_n = int_0^t e^{-(lambda+rate)u} (rate u)^n/n! du (t = inf allowed).
// Includes the atom at the origin (n = 0).
struct DiscreteKernel {
    std::vector<Atom> atoms; // includes {0, c_0}
    double lambda = 0.0;
    double t = std::numeric_limits<double>::infinity();
    double total_mass = 0.0;
};
DiscreteKernel cp_kernel(const ProcessSpec& cp_spec, double lambda, double t);

// number of worker threads honoring LEVY_KATO_THREADS
int worker_threads();

} // namespace levykato
