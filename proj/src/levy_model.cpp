#include "levykato/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "levykato/quadrature.hpp"

namespace levykato {

namespace {

// 1 - cos(t), stable for small t
double one_minus_cos(double t) {
    double s = std::sin(0.5 * t);
    return 2.0 * s * s;
}

// Dyadic-level decay heuristic: level_mass[k] holds the mass of |z| nu(dz)
// (or any nonnegative integrand) on (2^{-k-1}, 2^{-k}]. Declares the series
// summable iff the level ratios settle below a geometric threshold.
bool dyadic_levels_summable(const std::vector<double>& level_mass) {
    // find the last nonzero stretch
    std::vector<double> lv;
    for (double v : level_mass) lv.push_back(v);
    while (!lv.empty() && lv.back() == 0.0) lv.pop_back();
    if (lv.size() < 4) return true; // finitely many levels
    double worst = 0.0;
    std::size_t from = lv.size() > 10 ? lv.size() - 10 : 1;
    for (std::size_t k = from; k < lv.size(); ++k) {
        if (lv[k - 1] <= 0.0) continue;
        worst = std::max(worst, lv[k] / lv[k - 1]);
    }
    return worst <= 0.97;
}

} // namespace

double LevyMeasureSpec::total_mass_if_finite() const {
    switch (kind) {
        case Kind::None:
            return 0.0;
        case Kind::Atoms: {
            double m = 0.0;
            for (const auto& a : atoms) m += a.mass;
            // infinitely many dyadic levels near 0 => treat as infinite mass
            std::vector<double> lv(64, 0.0);
            for (const auto& a : atoms) {
                double az = std::abs(a.z);
                if (az >= 1.0 || az <= 0.0) continue;
                int k = std::min(63, (int)std::floor(-std::log2(az)));
                lv[(std::size_t)k] += a.mass;
            }
            return dyadic_levels_summable(lv) ? m : HUGE_VAL;
        }
        case Kind::Stable:
            return HUGE_VAL;
        case Kind::Density: {
            // dyadic probe toward 0 inside the support
            double hi = std::min(1.0, std::max(std::abs(support_lo),
                                               std::abs(support_hi)));
            std::vector<double> lv;
            double outer = 0.0;
            auto piece = [&](double a, double b) {
                a = std::max(a, 0.0);
                double v = 0.0;
                if (support_hi > a) {
                    double lo = std::max(a, support_lo > 0 ? support_lo : a);
                    double up = std::min(b, support_hi);
                    if (up > lo)
                        v += quad::adaptive([&](double z) { return density(z); },
                                            lo, up, 1e-12).value;
                }
                if (support_lo < -a) {
                    double lo = std::max(a, -support_hi > 0 ? 0.0 : a);
                    double up = std::min(b, -support_lo);
                    if (up > lo)
                        v += quad::adaptive([&](double z) { return density(-z); },
                                            lo, up, 1e-12).value;
                }
                return v;
            };
            if (std::max(std::abs(support_lo), std::abs(support_hi)) > 1.0)
                outer = piece(1.0, std::max(std::abs(support_lo),
                                            std::abs(support_hi)));
            double total = outer;
            for (int k = 0; k < 40; ++k) {
                double v = piece(hi * std::pow(2.0, -k - 1), hi * std::pow(2.0, -k));
                lv.push_back(v);
                total += v;
            }
            return dyadic_levels_summable(lv) ? total : HUGE_VAL;
        }
    }
    return 0.0;
}

void LevyMeasureSpec::validate() const {
    if (kind == Kind::Atoms) {
        for (const auto& a : atoms) {
            if (a.z == 0.0) throw InvalidSpec("atom at the origin");
            if (!(a.mass > 0.0)) throw InvalidSpec("nonpositive atom mass");
        }
    }
    if (kind == Kind::Stable) {
        if (!(stable_alpha > 0.0 && stable_alpha < 2.0))
            throw InvalidSpec("stable alpha outside (0,2)");
    }
    if (kind == Kind::Density) {
        if (!density) throw InvalidSpec("missing density callable");
        if (!(support_lo < support_hi)) throw InvalidSpec("empty density support");
        // int min(1, z^2) nu(dz) < inf near zero, by dyadic probe
        double hi = std::min(1.0, std::max(std::abs(support_lo),
                                           std::abs(support_hi)));
        std::vector<double> lv;
        for (int k = 0; k < 40; ++k) {
            double a = hi * std::pow(2.0, -k - 1), b = hi * std::pow(2.0, -k);
            double v = 0.0;
            if (support_hi > 0) {
                double lo = std::max(a, support_lo > 0 ? support_lo : a);
                double up = std::min(b, support_hi);
                if (up > lo)
                    v += quad::adaptive(
                             [&](double z) { return z * z * density(z); }, lo,
                             up, 1e-13)
                             .value;
            }
            if (support_lo < 0) {
                double up2 = std::min(b, -support_lo);
                if (up2 > a)
                    v += quad::adaptive(
                             [&](double z) { return z * z * density(-z); }, a,
                             up2, 1e-13)
                             .value;
            }
            lv.push_back(v);
        }
        if (!dyadic_levels_summable(lv))
            throw NonIntegrableMeasure("int min(1,z^2) nu(dz) diverges");
    }
}

LevyMeasureSpec make_dyadic_atom_measure(double m, double beta, double delta,
                                         double alpha) {
    if (!(m > 0 && beta > 0 && beta <= 1 && delta > 0 && alpha > 0 && alpha < 2))
        throw InvalidSpec("dyadic atom measure parameters out of range");
    auto f = [&](double s) {
        if (s <= 1.0) return std::pow(s, -alpha);
        return std::exp(m) * std::exp(-m * std::pow(s, beta)) *
               std::pow(s, -delta);
    };
    LevyMeasureSpec spec;
    spec.kind = LevyMeasureSpec::Kind::Atoms;
    // upward: masses die off super-exponentially
    double acc = 0.0;
    int n_max = 0;
    for (int n = 0;; ++n) {
        double mass = f(std::pow(2.0, n));
        acc += mass;
        if (mass < 1e-12 * acc && n > 2) {
            n_max = n;
            break;
        }
    }
    // downward: the min(1,z^2)-weighted series decides truncation
    double acc2 = 0.0;
    int n_min = 0;
    for (int n = 0;; --n) {
        double z = std::pow(2.0, n);
        double w = z * z * f(z);
        acc2 += w;
        if (w < 1e-12 * acc2 && n < -2) {
            n_min = n;
            break;
        }
        if (n < -400) { n_min = n; break; }
    }
    for (int n = n_min; n <= n_max; ++n) {
        double z = std::pow(2.0, n);
        double mass = f(z);
        spec.atoms.push_back({z, mass});
        spec.atoms.push_back({-z, mass});
    }
    return spec;
}

void LevyTriplet::validate() const {
    if (A < 0.0) throw InvalidSpec("negative Gaussian coefficient");
    if (dimension < 1) throw InvalidSpec("bad dimension");
    nu.validate();
}

double LaplaceExponent::operator()(double u) const {
    switch (family) {
        case Family::StableShifted:
            return delta * (std::pow(u + m, alpha) - std::pow(m, alpha));
        case Family::Log:
            return std::log1p(std::pow(u, alpha));
        case Family::OverLog:
            return u / std::log1p(std::pow(u, alpha));
        case Family::Custom:
            if (!custom) throw InvalidSpec("missing custom Laplace exponent");
            return custom(u);
    }
    return 0.0;
}

double LaplaceExponent::deriv(double u) const {
    switch (family) {
        case Family::StableShifted:
            return delta * alpha * std::pow(u + m, alpha - 1.0);
        case Family::Log: {
            double ua = std::pow(u, alpha);
            return alpha * std::pow(u, alpha - 1.0) / (1.0 + ua);
        }
        case Family::OverLog: {
            double ua = std::pow(u, alpha);
            double L = std::log1p(ua);
            double dL = alpha * std::pow(u, alpha - 1.0) / (1.0 + ua);
            return (L - u * dL) / (L * L);
        }
        case Family::Custom:
            if (custom_deriv) return custom_deriv(u);
            // central difference fallback
            {
                double h = 1e-6 * std::max(1.0, u);
                return ((*this)(u + h) - (*this)(u - h)) / (2.0 * h);
            }
    }
    return 0.0;
}

std::complex<double> LaplaceExponent::eval_complex(std::complex<double> s) const {
    using C = std::complex<double>;
    switch (family) {
        case Family::StableShifted:
            return delta * (std::pow(s + m, C(alpha)) - std::pow(m, alpha));
        case Family::Log:
            return std::log(C(1.0) + std::pow(s, C(alpha)));
        case Family::OverLog:
            return s / std::log(C(1.0) + std::pow(s, C(alpha)));
        case Family::Custom:
            throw InvalidSpec("complex evaluation unavailable for custom phi");
    }
    return C(0.0);
}

bool LaplaceExponent::check_bernstein_sampled(std::string* why) const {
    // log grid on [1e-4, 1e6]
    const int n = 200;
    std::vector<double> u(n), v(n);
    for (int i = 0; i < n; ++i) {
        u[i] = std::pow(10.0, -4.0 + 10.0 * i / (n - 1.0));
        v[i] = (*this)(u[i]);
        if (!(v[i] >= -1e-12)) {
            if (why) *why = "negative value";
            return false;
        }
    }
    for (int i = 1; i < n; ++i)
        if (v[i] < v[i - 1] - 1e-10 * std::abs(v[i - 1])) {
            if (why) *why = "not nondecreasing";
            return false;
        }
    // concavity and third differences on a uniform grid over [h, 10]
    const int k = 64;
    const double h = 10.0 / k;
    std::vector<double> w(k + 3);
    for (int i = 0; i <= k + 2; ++i) w[(std::size_t)i] = (*this)(h * (i + 1));
    for (int i = 0; i + 2 <= k + 2; ++i) {
        double d2 = w[(std::size_t)i + 2] - 2 * w[(std::size_t)i + 1] + w[(std::size_t)i];
        if (d2 > 1e-8 * std::abs(w[(std::size_t)i])) {
            if (why) *why = "not concave";
            return false;
        }
    }
    for (int i = 0; i + 3 <= k + 2; ++i) {
        double d3 = w[(std::size_t)i + 3] - 3 * w[(std::size_t)i + 2] +
                    3 * w[(std::size_t)i + 1] - w[(std::size_t)i];
        if (d3 < -1e-8 * std::abs(w[(std::size_t)i]) - 1e-12) {
            if (why) *why = "third differences change sign";
            return false;
        }
    }
    return true;
}

void ProcessSpec::validate() const {
    switch (kind) {
        case Kind::Triplet:
            triplet.validate();
            break;
        case Kind::Family:
            if (family == "brownian") {
                if (!(brownian_A > 0.0)) throw InvalidSpec("brownian needs A > 0");
            } else if (family == "stable") {
                if (!(stable_alpha > 0.0 && stable_alpha < 2.0))
                    throw InvalidSpec("stable alpha outside (0,2)");
                if (!(stable_scale > 0.0)) throw InvalidSpec("stable scale <= 0");
            } else if (family == "example511") {
                (void)make_dyadic_atom_measure(e511_m, e511_beta, e511_delta,
                                               e511_alpha);
            } else if (family == "cp") {
                if (cp_jumps.empty()) throw InvalidSpec("cp needs jump atoms");
                double tot = 0.0;
                for (const auto& a : cp_jumps) {
                    if (a.z == 0.0) throw InvalidSpec("cp atom at origin");
                    if (!(a.mass > 0.0)) throw InvalidSpec("cp atom mass <= 0");
                    tot += a.mass;
                }
                if (std::abs(tot - cp_rate) > 1e-9 * std::max(1.0, cp_rate))
                    throw InvalidSpec("cp jump masses do not sum to the rate");
            } else {
                throw InvalidSpec("unknown family: " + family);
            }
            break;
        case Kind::Subordinator:
            if (!phi.unbounded && !phi.zero_drift)
                throw InvalidSpec("bounded subordinator with drift unsupported");
            break;
        case Kind::Product:
            if (!product) throw InvalidSpec("missing product decomposition");
            if (!product->spacetime) {
                if (product->v_direction.empty())
                    throw InvalidSpec("product needs a direction for V");
                product->z_component.validate();
            } else {
                product->base.validate();
            }
            if (dimension < 2) throw InvalidSpec("product spec needs d > 1");
            break;
    }
}

bool ProcessSpec::is_compound_poisson() const {
    if (kind == Kind::Family && family == "cp") return true;
    if (kind == Kind::Subordinator) return !phi.unbounded;
    if (kind == Kind::Triplet) {
        if (triplet.A != 0.0) return false;
        double mass = triplet.nu.total_mass_if_finite();
        if (!std::isfinite(mass)) return false;
        DriftResult g = drift_gamma0(*this);
        return g.defined && std::abs(g.gamma0) < 1e-12;
    }
    return false;
}

bool ProcessSpec::symmetric() const {
    switch (kind) {
        case Kind::Family:
            if (family == "brownian" || family == "stable" ||
                family == "example511")
                return true;
            if (family == "cp") {
                // mirrored atom list
                for (const auto& a : cp_jumps) {
                    bool found = false;
                    for (const auto& b : cp_jumps)
                        if (std::abs(b.z + a.z) < 1e-14 &&
                            std::abs(b.mass - a.mass) < 1e-14)
                            found = true;
                    if (!found) return false;
                }
                return true;
            }
            return false;
        case Kind::Triplet: {
            if (triplet.gamma != 0.0) return false;
            if (triplet.nu.kind == LevyMeasureSpec::Kind::Stable) return true;
            if (triplet.nu.kind == LevyMeasureSpec::Kind::None) return true;
            if (triplet.nu.kind == LevyMeasureSpec::Kind::Atoms) {
                for (const auto& a : triplet.nu.atoms) {
                    bool found = false;
                    for (const auto& b : triplet.nu.atoms)
                        if (std::abs(b.z + a.z) < 1e-14 &&
                            std::abs(b.mass - a.mass) < 1e-14)
                            found = true;
                    if (!found) return false;
                }
                return true;
            }
            return false;
        }
        default:
            return false;
    }
}

namespace {

// - int (e^{i xi z} - 1 - i xi z 1_{|z|<1}) nu(dz) for an atom list
std::complex<double> jump_part_atoms(const std::vector<Atom>& atoms, double xi,
                                     bool compensate) {
    double re = 0.0, im = 0.0;
    for (const auto& a : atoms) {
        double t = xi * a.z;
        re += a.mass * one_minus_cos(t);
        double s = std::sin(t);
        if (compensate && std::abs(a.z) < 1.0) s -= t;
        im -= a.mass * s;
    }
    return {re, im};
}

std::complex<double> jump_part_density(const LevyMeasureSpec& nu, double xi,
                                       double tol, double* err_out) {
    // split at 0 with dyadic panels; split at |z| = 1 (compensation edge)
    double err = 0.0;
    double re = 0.0, im = 0.0;
    auto add_side = [&](double lo, double hi, int sign) {
        // integrate over z in [lo,hi] with z > 0, actual point sign*z
        if (!(hi > lo) || hi <= 0) return;
        lo = std::max(lo, 0.0);
        auto fre = [&](double z) {
            return nu.density(sign * z) * one_minus_cos(xi * sign * z);
        };
        auto fim = [&](double z) {
            double t = xi * sign * z;
            double s = std::sin(t);
            if (z < 1.0) s -= t;
            return -nu.density(sign * z) * s;
        };
        // dyadic panels toward 0 below min(1,hi), plain adaptive above
        double mid = std::min(1.0, hi);
        if (lo < mid) {
            double b = mid;
            for (int k = 0; k < 60 && b > lo; ++k) {
                double a = std::max(lo, 0.5 * b);
                auto r1 = quad::adaptive(fre, a, b, 0.05 * tol);
                auto r2 = quad::adaptive(fim, a, b, 0.05 * tol);
                re += r1.value;
                im += r2.value;
                err += r1.abs_err + r2.abs_err;
                if (a == lo) break;
                if (std::abs(r1.value) + std::abs(r2.value) < 1e-3 * tol && k > 4)
                    break;
                b = a;
            }
        }
        if (hi > mid) {
            auto r1 = quad::adaptive(fre, mid, hi, 0.05 * tol);
            auto r2 = quad::adaptive(fim, mid, hi, 0.05 * tol);
            re += r1.value;
            im += r2.value;
            err += r1.abs_err + r2.abs_err;
        }
    };
    if (nu.support_hi > 0) add_side(std::max(0.0, nu.support_lo), nu.support_hi, +1);
    if (nu.support_lo < 0) add_side(std::max(0.0, -nu.support_hi), -nu.support_lo, -1);
    if (err_out) *err_out = err;
    return {re, im};
}

std::complex<double> jump_part_stable(double alpha, double scale, double xi) {
    // symmetric alpha-stable: scale * |xi|^alpha
    return {scale * std::pow(std::abs(xi), alpha), 0.0};
}

} // namespace

CharExponent::CharExponent(const ProcessSpec& spec, double quad_tol)
    : spec_(spec), quad_tol_(quad_tol) {
    spec_.validate();
    symmetric_ = spec_.symmetric();
    if (spec_.kind == ProcessSpec::Kind::Family && spec_.family == "example511")
        e511_atoms_ = make_dyadic_atom_measure(spec_.e511_m, spec_.e511_beta,
                                               spec_.e511_delta,
                                               spec_.e511_alpha)
                          .atoms;
}

PsiValue CharExponent::eval(double xi) const {
    PsiValue out;
    const ProcessSpec& s = spec_;
    switch (s.kind) {
        case ProcessSpec::Kind::Family:
            if (s.family == "brownian") {
                out.value = {s.brownian_A * xi * xi, 0.0};
            } else if (s.family == "stable") {
                out.value = jump_part_stable(s.stable_alpha, s.stable_scale, xi);
            } else if (s.family == "example511") {
                out.value = jump_part_atoms(e511_atoms_, xi, true);
            } else if (s.family == "cp") {
                out.value = jump_part_atoms(s.cp_jumps, xi, false);
            }
            break;
        case ProcessSpec::Kind::Triplet: {
            std::complex<double> v(s.triplet.A * xi * xi,
                                   -s.triplet.gamma * xi);
            switch (s.triplet.nu.kind) {
                case LevyMeasureSpec::Kind::None:
                    break;
                case LevyMeasureSpec::Kind::Atoms:
                    v += jump_part_atoms(s.triplet.nu.atoms, xi, true);
                    break;
                case LevyMeasureSpec::Kind::Stable:
                    v += jump_part_stable(s.triplet.nu.stable_alpha,
                                          s.triplet.nu.stable_scale, xi);
                    break;
                case LevyMeasureSpec::Kind::Density: {
                    double err = 0.0;
                    v += jump_part_density(s.triplet.nu, xi, quad_tol_, &err);
                    out.quad_err = err;
                    double scale = std::max(1.0, std::abs(v));
                    if (err > 1e-5 * scale)
                        throw QuadratureFailure("psi quadrature error too large");
                    break;
                }
            }
            out.value = v;
            break;
        }
        case ProcessSpec::Kind::Subordinator:
            out.value = s.phi.eval_complex(std::complex<double>(0.0, -xi));
            break;
        case ProcessSpec::Kind::Product:
            throw InvalidSpec("product specs have no scalar exponent; use the components");
    }
    if (out.value.real() < -1e-9)
        throw QuadratureFailure("Re psi came out negative");
    if (out.value.real() < 0.0) out.value = {0.0, out.value.imag()};
    return out;
}

PsiValue eval_psi(const ProcessSpec& spec, double xi) {
    return CharExponent(spec).eval(xi);
}

namespace {

// levels of |z| nu(dz) on (2^{-k-1}, 2^{-k}]
std::vector<double> small_jump_levels(const LevyMeasureSpec& nu) {
    std::vector<double> lv(60, 0.0);
    switch (nu.kind) {
        case LevyMeasureSpec::Kind::None:
            break;
        case LevyMeasureSpec::Kind::Atoms:
            for (const auto& a : nu.atoms) {
                double az = std::abs(a.z);
                if (az >= 1.0 || az <= 0.0) continue;
                int k = std::min(59, (int)std::floor(-std::log2(az)));
                lv[(std::size_t)k] += az * a.mass;
            }
            break;
        case LevyMeasureSpec::Kind::Stable:
            for (int k = 0; k < 60; ++k) {
                // int_{2^-k-1}^{2^-k} z * z^{-1-a} dz ~ 2^{-k(1-a)}
                double a = nu.stable_alpha;
                lv[(std::size_t)k] = std::pow(2.0, -(double)k * (1.0 - a));
            }
            break;
        case LevyMeasureSpec::Kind::Density:
            for (int k = 0; k < 40; ++k) {
                double a = std::pow(2.0, -k - 1), b = std::pow(2.0, -k);
                double v = 0.0;
                if (nu.support_hi > 0) {
                    double lo = std::max(a, nu.support_lo > 0 ? nu.support_lo : a);
                    double up = std::min(b, nu.support_hi);
                    if (up > lo)
                        v += quad::adaptive(
                                 [&](double z) { return z * nu.density(z); },
                                 lo, up, 1e-13)
                                 .value;
                }
                if (nu.support_lo < 0) {
                    double up2 = std::min(b, -nu.support_lo);
                    if (up2 > a)
                        v += quad::adaptive(
                                 [&](double z) { return z * nu.density(-z); },
                                 a, up2, 1e-13)
                                 .value;
                }
                lv[(std::size_t)k] = v;
            }
            break;
    }
    return lv;
}

} // namespace

bool finite_variation(const LevyMeasureSpec& nu) {
    if (nu.kind == LevyMeasureSpec::Kind::Stable) return nu.stable_alpha < 1.0;
    return dyadic_levels_summable(small_jump_levels(nu));
}

DriftResult drift_gamma0(const ProcessSpec& spec) {
    DriftResult out;
    switch (spec.kind) {
        case ProcessSpec::Kind::Family:
            if (spec.family == "brownian") {
                out.defined = true;
                out.gamma0 = 0.0;
            } else if (spec.family == "stable") {
                if (spec.stable_alpha < 1.0) {
                    out.defined = true;
                    out.gamma0 = 0.0; // symmetric
                } else {
                    out.note = "infinite variation";
                }
            } else if (spec.family == "example511") {
                if (spec.e511_alpha < 1.0) {
                    out.defined = true;
                    out.gamma0 = 0.0; // symmetric
                } else {
                    out.note = "infinite variation";
                }
            } else if (spec.family == "cp") {
                out.defined = true;
                out.gamma0 = 0.0; // by construction
            }
            return out;
        case ProcessSpec::Kind::Subordinator:
            out.defined = true;
            out.gamma0 = spec.phi.zero_drift ? 0.0 : HUGE_VAL;
            return out;
        case ProcessSpec::Kind::Triplet: {
            const LevyMeasureSpec& nu = spec.triplet.nu;
            if (!finite_variation(nu)) {
                out.note = "infinite variation";
                return out;
            }
            double corr = 0.0;
            switch (nu.kind) {
                case LevyMeasureSpec::Kind::None:
                    break;
                case LevyMeasureSpec::Kind::Atoms:
                    for (const auto& a : nu.atoms)
                        if (std::abs(a.z) < 1.0) corr += a.z * a.mass;
                    break;
                case LevyMeasureSpec::Kind::Stable:
                    corr = 0.0; // symmetric
                    break;
                case LevyMeasureSpec::Kind::Density: {
                    auto side = [&](int sign) {
                        double lo = sign > 0 ? std::max(0.0, nu.support_lo)
                                             : std::max(0.0, -nu.support_hi);
                        double hi = sign > 0 ? std::min(1.0, nu.support_hi)
                                             : std::min(1.0, -nu.support_lo);
                        if (!(hi > lo)) return 0.0;
                        double v = 0.0;
                        double b = hi;
                        for (int k = 0; k < 60 && b > lo; ++k) {
                            double a = std::max(lo, 0.5 * b);
                            v += quad::adaptive(
                                     [&](double z) {
                                         return z * nu.density(sign * z);
                                     },
                                     a, b, 1e-12)
                                     .value;
                            if (a == lo) break;
                            b = a;
                        }
                        return sign > 0 ? v : -v;
                    };
                    corr = side(+1) + side(-1);
                    break;
                }
            }
            out.defined = true;
            out.gamma0 = spec.triplet.gamma - corr;
            return out;
        }
        case ProcessSpec::Kind::Product:
            out.note = "product spec; query the components";
            return out;
    }
    return out;
}

ScalingWitness check_scaling(const std::function<double(double)>& f,
                             ScalingWitness::Kind kind, double alpha,
                             double theta, const ScalingGrid& grid) {
    if (grid.n_theta < 2 || grid.n_eta < 4) throw InvalidSpec("EmptyGrid");
    ScalingWitness w;
    w.kind = kind;
    w.alpha = alpha;
    w.theta = theta;
    const bool lower = kind == ScalingWitness::Kind::WLSC;
    double theta_lo = theta > 0 ? theta * (1.0 + 1e-9) : 1e-3;
    double extreme = lower ? HUGE_VAL : 0.0;
    // track trend against eta per theta to spot ratios drifting to 0 / inf
    bool drift = false;
    for (int i = 0; i < grid.n_theta; ++i) {
        double th = theta_lo * std::pow(grid.theta_max / theta_lo,
                                        i / (grid.n_theta - 1.0));
        double fth = f(th);
        if (!(fth > 0.0)) throw InvalidSpec("f must be positive on the grid");
        double mid_ratio = 0.0, last_ratio = 0.0;
        for (int j = 0; j < grid.n_eta; ++j) {
            double eta = std::pow(grid.eta_max, j / (grid.n_eta - 1.0));
            double ratio = f(eta * th) / (std::pow(eta, alpha) * fth);
            if (lower ? ratio < extreme : ratio > extreme) {
                extreme = ratio;
                w.bad_eta = eta;
                w.bad_theta = th;
                w.bad_ratio = ratio;
            }
            if (j == grid.n_eta / 2) mid_ratio = ratio;
            if (j == grid.n_eta - 1) last_ratio = ratio;
        }
        if (lower && mid_ratio > 0 && last_ratio < 0.5 * mid_ratio) drift = true;
        if (!lower && mid_ratio > 0 && last_ratio > 2.0 * mid_ratio) drift = true;
    }
    if (lower) {
        if (drift || extreme < 1e-4) {
            w.refuted = true;
            return w;
        }
        w.constant = std::min(1.0, extreme);
    } else {
        if (drift || extreme > 1e4) {
            w.refuted = true;
            return w;
        }
        w.constant = std::max(1.0, extreme);
    }
    return w;
}

} // namespace levykato
