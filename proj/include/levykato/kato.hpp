#pragma once

#include <map>
#include <string>
#include <vector>

#include "levykato/classifier.hpp"
#include "levykato/levy_model.hpp"
#include "levykato/potential.hpp"

namespace levykato {

struct DimensionUnsupported : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotUnimodal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The function q. Nonnegativity is enforced internally (|q|); singularity
// annotations drive quadrature splitting and divergence probes; structure
// annotations drive the sup-search over x.
struct Potential {
    enum class Kind { ClosedForm, Comb, Grid, Zero };
    Kind kind = Kind::Zero;

    std::function<double(double)> f; // ClosedForm
    double support_lo = -std::numeric_limits<double>::infinity();
    double support_hi = std::numeric_limits<double>::infinity();
    std::vector<double> singularities; // inside the support
    bool bounded = false;
    double bound = 0.0;

    int comb_kmax = 40; // comb: sum_{k=1..kmax} 2^k 1_{(k, k+2^{-k})}

    std::vector<double> grid, values; // Grid (linear interpolation)

    std::string name;

    double operator()(double x) const; // |q|, zero outside the support

    static Potential zero();
    static Potential constant(double c);
    static Potential comb(int kmax = 40);
    static Potential closed_form(std::function<double(double)> f, double lo,
                                 double hi, std::vector<double> singularities,
                                 std::string name, bool bounded = false,
                                 double bound = 0.0);
    static Potential from_grid(std::vector<double> grid,
                               std::vector<double> values, std::string name);

    // candidate maximizer positions for the sup-search inside [lo, hi]
    std::vector<double> sup_candidates(double lo, double hi) const;
};

enum class Membership { In, Out, Inconclusive };
const char* membership_name(Membership m);

// sup-functional curve over a decreasing parameter (t or r)
struct Profile {
    std::string condition;
    std::vector<double> param;
    std::vector<double> sup_value; // +inf encodes a divergent integral
    std::vector<double> arg_sup;
    bool window_exhausted = false; // sup still growing at the search boundary
    Membership decision = Membership::Inconclusive;
};

struct KatoConfig {
    double lambda = 1.0;
    double time_lambda = 0.0; // discount used inside G_t^lambda in the time condition
    std::vector<double> t_grid;  // decreasing; empty = default decade grid
    std::vector<double> r_grid;
    double x_window = 48.0;      // sup-search window [-w, w]
    int x_coarse = 65;           // coarse grid points for generic q
    double kernel_xmax = 16.0;
    int kernel_n = 385;          // uniform points of the kernel grid
    double kernel_core = 1e-8;   // log refinement floor
    double eps_rel = 1e-3;       // limit -> 0: final < eps_rel * first
    double plateau_rel = 0.01;   // positive limit: last three within 1%
    std::vector<double> defaulted_t() const;
    std::vector<double> defaulted_r() const;
};

// the numeric limit rule shared by every profile
Membership limit_decision(const std::vector<double>& values,
                          bool window_exhausted, double eps_rel = 1e-3,
                          double plateau_rel = 0.01);

// sup_x int |q(x+z)| G_t^0(dz) over a decreasing t-grid (time smallness)
Profile eval_time_condition(const Potential& q, const ProcessSpec& spec,
                            const std::vector<double>& t_grid,
                            const KatoConfig& cfg = {});

// sup_x int_{B(0,r)} |q(x+z)| G^lambda(z) dz over a decreasing r-grid
Profile eval_space_condition(const Potential& q, const ProcessSpec& spec,
                             double lambda, const std::vector<double>& r_grid,
                             const KatoConfig& cfg = {});

// sup_x int_{B(0,r)} |q(x+z)| G_r^0(z) dz (time and space cutoffs together)
Profile eval_timespace_condition(const Potential& q, const ProcessSpec& spec,
                                 const std::vector<double>& r_grid,
                                 const KatoConfig& cfg = {});

// sup_x int_{B(0,r)} |q(x+z)| G_t^lambda(z) dz at fixed t
Profile eval_trunc_space_condition(const Potential& q, const ProcessSpec& spec,
                                   double lambda, double t,
                                   const std::vector<double>& r_grid,
                                   const KatoConfig& cfg = {});

struct ClosedFormResult {
    bool applicable = false;
    Membership K = Membership::Inconclusive;    // time-smallness class
    Membership calK = Membership::Inconclusive; // space-smallness class
    std::string justification;
    std::map<std::string, Profile> profiles;
};

// Per-label closed forms: case B both classes reduce to the Lebesgue window
// criterion; case C splits (space class = Lebesgue criterion, time class =
// uniform local integrability); compound Poisson = ({0}, bounded);
// subordinators under (S1)-(S3) get the weight-integral criterion.
ClosedFormResult closed_form_characterization(const Potential& q,
                                              const Classification& cls,
                                              const LaplaceExponent* phi,
                                              const KatoConfig& cfg = {});

// sup_x int_{|z-x|<sqrt(t)} |q(z)| w_d(|z-x|) dz with w_3(s) = 1/s and
// w_2(s) = ln(1/s), for radial q; cross-check against the time condition.
Profile aizenman_simon_weights(const Potential& q_radial, int d,
                               const std::vector<double>& t_grid,
                               const KatoConfig& cfg = {});

// Upper bound sup_x int_0^t P_u|q| du <= (1 + t/(|B(0,1/2)| r^d G_t0(r))) *
// sup_x int_{B(x,r)} |q| G_t0 for isotropic unimodal kernels in d = 3
// (closed-form Gaussian and Cauchy kernels), plus the empirical lower-bound
// ratio of the same two quantities.
struct BoundReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;    // rhs - lhs, must be >= 0
    double fitted_c = 0.0; // lhs / (sup ball integral), lower-bound witness
    double r_used = 0.0, t_used = 0.0;
};
BoundReport unimodal_bound_check(const Potential& q, const ProcessSpec& spec3,
                                 double t, double r, double t0);

// radius coupled to the exponent scale: r = 1/(psi*)^-(1/t)
double coupled_radius(const ProcessSpec& spec3, double t);

struct KatoVerdict {
    Label label = Label::A;
    std::map<std::string, Profile> profiles;
    Membership membership_K = Membership::Inconclusive;    // time class
    Membership membership_calK = Membership::Inconclusive; // space class
    std::string characterization_used;
    bool expected_equivalent = false; // the two classes coincide for this label
};

KatoVerdict verdict(const Potential& q, const ProcessSpec& spec,
                    const KatoConfig& cfg = {});

} // namespace levykato
