#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levykato/levy_model.hpp"
#include "levykato/potential.hpp"

namespace levykato {

struct MissingDecomposition : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WrongCase : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Divergence diagnostic for int_0^R Re(1/(lambda+psi(z))) dz over geometric R.
struct DivergenceDiagnostic {
    enum class Verdict { Diverges, Converges, Inconclusive };
    std::vector<double> radii;             // R_k
    std::vector<double> partial_integrals; // I(R_k), nondecreasing
    double slope = 0.0;                    // log-log least squares, last window
    Verdict verdict = Verdict::Inconclusive;
    double lambda = 0.0;
    double limit = 0.0; // meaningful when Converges
};

struct InconclusiveIntegral : std::runtime_error {
    InconclusiveIntegral(std::string msg, DivergenceDiagnostic d)
        : std::runtime_error(std::move(msg)), diagnostic(std::move(d)) {}
    DivergenceDiagnostic diagnostic;
};

enum class Label {
    CompoundPoisson,
    A,        // {0} polar
    B,        // finite variation, nonzero drift
    C,        // 0 regular for {0}
    Aprime,
    Bprime,
    Cprime,
    D_gt1_H0, // d > 1 under the non-degeneracy hypothesis: {0} polar
};

const char* label_name(Label l);

struct Classification {
    Label label = Label::A;
    // evidence
    std::optional<double> gamma0;
    bool finite_variation = false;
    bool gaussian_nonzero = false;
    std::optional<DivergenceDiagnostic> regularity;
    std::string v_note; // declared subspace / space-time annotation
    bool zero_regular = false; // 0 regular for {0}
    bool point_polar = false;  // {0} polar
    // the classes K (space-smallness) and bbK (time-smallness) coincide
    // exactly when 0 is not regular for {0}
    bool kato_equivalent() const { return !zero_regular; }
};

struct ClassifierConfig {
    int k_max = 60;            // radii up to 2^k_max
    int window = 8;            // log-log slope window
    double slope_min = 0.02;   // divergence threshold
    double tail_rel = 1e-8;    // convergence: shell increment < tail_rel * I
    bool oscillatory = false;  // lattice-sample shells instead of panels
    int lattice_n = 2048;      // samples per shell in oscillatory mode
};

DivergenceDiagnostic regularity_integral(
    const std::function<std::complex<double>(double)>& psi, double lambda,
    const ClassifierConfig& config = {});

// Exhaustive case assignment. Throws InconclusiveIntegral when the divergence
// diagnostic cannot decide, MissingDecomposition for d > 1 specs that need a
// declared product structure.
Classification classify(const ProcessSpec& spec, double lambda,
                        const ClassifierConfig& config = {});

// h(x) = discounted first-hitting functional of the point x, recovered from a
// resolvent kernel grid. Case C: G(x)/G(0) with h(0) = 1. Case B: shape only,
// normalized by the grid supremum. Case A: identically 0.
std::vector<double> hitting_transform(const KernelGrid& kernel,
                                      const Classification& cls);

} // namespace levykato
