#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace levykato {

struct NonIntegrableMeasure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct QuadratureFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidSpec : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Atom {
    double z = 0.0;
    double mass = 0.0;
};

// Jump measure of a one-dimensional process. Discrete atoms, a density on an
// interval, or a symmetric alpha-stable density c(alpha)*|z|^{-1-alpha}.
struct LevyMeasureSpec {
    enum class Kind { None, Atoms, Density, Stable };
    Kind kind = Kind::None;

    std::vector<Atom> atoms;

    std::function<double(double)> density; // defined on support \ {0}
    double support_lo = 0.0;
    double support_hi = 0.0;

    double stable_alpha = 0.0;
    double stable_scale = 1.0; // psi ~ scale*|xi|^alpha for the pure-jump part

    bool empty() const { return kind == Kind::None; }
    double total_mass_if_finite() const; // +inf encoded as HUGE_VAL
    void validate() const;
};

// Atoms at +-2^n with masses f(2^n),
// f(s) = s^{-alpha} on (0,1], e^m exp(-m s^beta) s^{-delta} beyond;
// the dyadic series is truncated at 1e-12 relative mass.
LevyMeasureSpec make_dyadic_atom_measure(double m, double beta, double delta,
                                         double alpha);

struct LevyTriplet {
    double gamma = 0.0;
    double A = 0.0; // Gaussian coefficient, psi_gauss = A*xi^2
    LevyMeasureSpec nu;
    int dimension = 1;
    void validate() const;
};

// Laplace exponent of a subordinator with zero killing.
struct LaplaceExponent {
    enum class Family { StableShifted, Log, OverLog, Custom };
    Family family = Family::StableShifted;
    double delta = 1.0; // StableShifted: delta*[(u+m)^alpha - m^alpha]
    double m = 0.0;
    double alpha = 0.5;
    std::function<double(double)> custom;
    std::function<double(double)> custom_deriv;

    bool unbounded = true;
    bool zero_drift = true;
    double sbf_shift = 0.0; // declared a >= 0 with a+phi in SBF

    double operator()(double u) const;
    double deriv(double u) const;
    std::complex<double> eval_complex(std::complex<double> s) const;

    // Sampled necessary Bernstein conditions (nonnegativity, monotonicity,
    // concavity, sign-alternating third differences) on a log grid.
    bool check_bernstein_sampled(std::string* why = nullptr) const;
};

struct ProductDecomposition; // below

struct ProcessSpec {
    enum class Kind { Triplet, Family, Subordinator, Product };
    Kind kind = Kind::Family;
    int dimension = 1;
    // d > 1 only: declared non-degeneracy (process not concentrated, modulo
    // finite-activity jumps, on a line). When false a product decomposition
    // must be supplied instead.
    bool h0 = true;

    // Kind::Triplet
    LevyTriplet triplet;

    // Kind::Family: "brownian" | "stable" | "example511" | "cp"
    std::string family = "brownian";
    double brownian_A = 1.0;     // psi = A*|xi|^2
    double stable_alpha = 1.0;   // psi = scale*|xi|^alpha
    double stable_scale = 1.0;
    double e511_m = 1.0, e511_beta = 1.0, e511_delta = 1.0, e511_alpha = 1.0;
    double cp_rate = 1.0;
    std::vector<Atom> cp_jumps; // masses sum to cp_rate after validate()

    // Kind::Subordinator
    LaplaceExponent phi;

    // Kind::Product (d > 1, user-declared decomposition or space-time embed)
    std::shared_ptr<ProductDecomposition> product;

    void validate() const;
    bool is_compound_poisson() const;
    bool symmetric() const; // psi real-valued
};

// X = Y + Z with Z supported on a one-dimensional subspace V and Y either
// zero or compound Poisson with Levy measure vanishing on V. The space-time
// embedding (t, X_t) is tagged separately: it satisfies the non-degeneracy
// hypothesis in d+1 dimensions and 0 is never regular for it.
struct ProductDecomposition {
    bool spacetime = false;       // (t, X_t) over base
    ProcessSpec base;             // spacetime: the spatial process
    ProcessSpec z_component;      // declared: 1D process on V
    std::vector<double> v_direction; // unit vector spanning V
    double y_rate = 0.0;          // nu^Y(R^d); 0 means Y == 0
    std::vector<Atom> y_jumps;    // 1D magnitudes along some direction off V
};

struct PsiValue {
    std::complex<double> value;
    double quad_err = 0.0;
};

class CharExponent {
  public:
    explicit CharExponent(const ProcessSpec& spec, double quad_tol = 1e-10);

    PsiValue eval(double xi) const;
    std::complex<double> operator()(double xi) const { return eval(xi).value; }
    bool symmetric() const { return symmetric_; }
    const ProcessSpec& spec() const { return spec_; }

  private:
    ProcessSpec spec_;
    double quad_tol_;
    bool symmetric_ = false;
    std::vector<Atom> e511_atoms_; // precomputed dyadic atoms
};

PsiValue eval_psi(const ProcessSpec& spec, double xi);

// gamma0 = gamma - int_{|z|<1} z nu(dz), defined when int (|z| ^ 1) nu < inf.
// The finite-variation test compares dyadic-level masses of |z| nu(dz) on
// (2^{-k-1}, 2^{-k}] against a geometric-decay threshold.
struct DriftResult {
    bool defined = false;
    double gamma0 = 0.0;
    std::string note;
};
DriftResult drift_gamma0(const ProcessSpec& spec);

bool finite_variation(const LevyMeasureSpec& nu);

// Weak scaling witnesses.
struct ScalingWitness {
    enum class Kind { WLSC, WUSC };
    Kind kind = Kind::WLSC;
    double alpha = 0.0;
    double theta = 0.0;
    double constant = 1.0; // c <= 1 for lower, C >= 1 for upper
    bool refuted = false;
    double bad_eta = 0.0, bad_theta = 0.0, bad_ratio = 0.0;
};

struct ScalingGrid {
    double theta_max = 1e4;
    double eta_max = 1e6;
    int n_theta = 24;
    int n_eta = 40;
};

ScalingWitness check_scaling(const std::function<double(double)>& f,
                             ScalingWitness::Kind kind, double alpha,
                             double theta, const ScalingGrid& grid = {});

} // namespace levykato
