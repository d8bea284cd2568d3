#include "levykato/quadrature.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <vector>

namespace levykato::quad {

namespace {

// Kronrod 15 nodes/weights on [-1,1]; Gauss 7 weights at the odd positions.
constexpr std::array<double, 15> kXgk = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
constexpr std::array<double, 15> kWk = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr std::array<double, 7> kWg = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

void adaptive_rec(const std::function<double(double)>& f, double a, double b,
                  double tol, int depth, int max_depth, Result& out) {
    Result r = gk15(f, a, b);
    out.evals += r.evals;
    if (r.abs_err <= tol || depth >= max_depth) {
        out.value += r.value;
        out.abs_err += r.abs_err;
        return;
    }
    double m = 0.5 * (a + b);
    adaptive_rec(f, a, m, 0.5 * tol, depth + 1, max_depth, out);
    adaptive_rec(f, m, b, 0.5 * tol, depth + 1, max_depth, out);
}

// Euler transform of an alternating-ish series given its raw terms.
double euler_sum(const std::vector<double>& terms, double& err) {
    std::vector<double> row = terms;
    std::vector<double> partial(row.size());
    double s = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        s += row[i];
        partial[i] = s;
    }
    // repeated averaging of the partial-sum sequence
    std::vector<double> cur = partial;
    double best = cur.back();
    for (int pass = 0; pass < 24 && cur.size() > 2; ++pass) {
        std::vector<double> next(cur.size() - 1);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i)
            next[i] = 0.5 * (cur[i] + cur[i + 1]);
        cur = std::move(next);
        best = cur.back();
    }
    err = cur.size() >= 2 ? std::abs(cur[cur.size() - 1] - cur[cur.size() - 2])
                          : std::abs(best);
    return best;
}

} // namespace

Result gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 15; ++i) {
        double v = f(c + h * kXgk[i]);
        k += kWk[i] * v;
        if (i % 2 == 1) g += kWg[i / 2] * v;
    }
    Result r;
    r.value = k * h;
    r.abs_err = std::pow(200.0 * std::abs(k - g) * std::abs(h), 1.5);
    if (!std::isfinite(r.abs_err)) r.abs_err = std::abs(k - g) * std::abs(h);
    r.evals = 15;
    return r;
}

Result adaptive(const std::function<double(double)>& f, double a, double b,
                double abs_tol, double rel_tol, int max_depth) {
    Result probe = gk15(f, a, b);
    double tol = std::max(abs_tol, rel_tol * std::abs(probe.value));
    Result out;
    adaptive_rec(f, a, b, tol, 0, max_depth, out);
    return out;
}

Result decaying_tail(const std::function<double(double)>& f, double a,
                     double abs_tol, double xi_cap) {
    Result out;
    double lo = a;
    double width = std::max(1.0, std::abs(a));
    double prev = std::numeric_limits<double>::quiet_NaN();
    double last = 0.0;
    while (lo < xi_cap) {
        double hi = lo + width;
        Result r = adaptive(f, lo, hi, 0.1 * abs_tol, 1e-9, 18);
        out.value += r.value;
        out.abs_err += r.abs_err;
        out.evals += r.evals;
        prev = last;
        last = r.value;
        lo = hi;
        width *= 2.0;
        if (std::abs(last) < 0.25 * abs_tol &&
            (!std::isfinite(prev) || std::abs(last) <= std::abs(prev)))
            break;
    }
    // geometric extrapolation of the remaining octaves
    if (std::isfinite(prev) && std::abs(prev) > 0.0) {
        double ratio = last / prev;
        if (ratio > 0.0 && ratio < 0.95) {
            double tail = last * ratio / (1.0 - ratio);
            out.value += tail;
            out.abs_err += 0.2 * std::abs(tail);
        } else {
            out.abs_err += std::abs(last);
        }
    }
    return out;
}

Result fourier_oscillatory(const std::function<double(double)>& f, double x,
                           bool use_sin, double abs_tol) {
    const double ax = std::abs(x);
    const double pi = 3.14159265358979323846;
    Result out;
    if (ax < 1e-300) {
        if (use_sin) return out;
        return decaying_tail(f, 0.0, abs_tol);
    }
    auto g = [&](double xi) {
        return f(xi) * (use_sin ? std::sin(x * xi) : std::cos(x * xi));
    };
    // head: up to the first zero of the trig factor past 2/|x|
    double first_zero = use_sin ? pi / ax : 0.5 * pi / ax;
    while (first_zero < 2.0 / ax) first_zero += pi / ax;
    {
        Result head = adaptive(g, 0.0, first_zero, 0.1 * abs_tol, 1e-9, 24);
        out.value += head.value;
        out.abs_err += head.abs_err;
        out.evals += head.evals;
    }
    // alternating half-period segments, Euler-accelerated
    const int max_seg = 64;
    std::vector<double> terms;
    terms.reserve(max_seg);
    double lo = first_zero;
    for (int j = 0; j < max_seg; ++j) {
        double hi = lo + pi / ax;
        Result r = adaptive(g, lo, hi, 0.05 * abs_tol / max_seg, 1e-9, 16);
        terms.push_back(r.value);
        out.abs_err += r.abs_err;
        out.evals += r.evals;
        lo = hi;
        if (j >= 7 && std::abs(r.value) < 1e-3 * abs_tol) break;
    }
    double eerr = 0.0;
    out.value += euler_sum(terms, eerr);
    out.abs_err += eerr;
    return out;
}

Result fourier_decay(const std::function<double(double)>& f, double x,
                     bool use_sin, double xi_cut, double abs_tol) {
    const double ax = std::abs(x);
    const double pi = 3.14159265358979323846;
    auto g = [&](double xi) {
        return f(xi) * (use_sin ? std::sin(x * xi) : std::cos(x * xi));
    };
    double half_period = ax > 0.0 ? pi / ax : xi_cut;
    double panel = std::min(std::max(xi_cut / 16.0, 1e-12), half_period);
    Result out;
    double lo = 0.0;
    while (lo < xi_cut) {
        double hi = std::min(lo + panel, xi_cut);
        Result r = adaptive(g, lo, hi, abs_tol * panel / xi_cut, 1e-9, 16);
        out.value += r.value;
        out.abs_err += r.abs_err;
        out.evals += r.evals;
        lo = hi;
    }
    return out;
}

} // namespace levykato::quad
