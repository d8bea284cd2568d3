// Benchmark: parallel multiplier inversion of G_t^lambda against the serial
// time-quadrature reference, with an agreement check between the two routes.
// The reference integrates a Fourier inversion per time panel and is orders of
// magnitude slower, so it runs on a subsampled grid.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "levykato/potential.hpp"

using namespace levykato;

namespace {

double now_s() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

ProcessSpec family(const std::string& fam, double alpha) {
    ProcessSpec s;
    s.kind = ProcessSpec::Kind::Family;
    s.family = fam;
    if (fam == "stable") s.stable_alpha = alpha;
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"truncated-kernel route benchmark"};
    std::string fam = "brownian";
    double alpha = 1.5, lambda = 1.0, t = 1.0, xmax = 8.0;
    int n = 801, reps = 3, ref_points = 17;
    app.add_option("--family", fam, "brownian | stable");
    app.add_option("--alpha", alpha, "stable index");
    app.add_option("--lambda", lambda);
    app.add_option("--t", t, "truncation time");
    app.add_option("--xmax", xmax);
    app.add_option("--n", n, "grid points for the multiplier route");
    app.add_option("--reps", reps, "timing repetitions");
    app.add_option("--ref-points", ref_points,
                   "grid points for the reference route");
    CLI11_PARSE(app, argc, argv);

    CharExponent psi(family(fam, alpha));
    auto grid = uniform_grid(-xmax, xmax, n);
    auto ref_grid = uniform_grid(-xmax, xmax, ref_points);

    std::printf("family=%s lambda=%g t=%g n=%d ref_points=%d threads=%d\n",
                fam.c_str(), lambda, t, n, ref_points, worker_threads());

    double best_par = 1e300, best_ser = 1e300;
    KernelGrid par;
    for (int r = 0; r < reps; ++r) {
        double t0 = now_s();
        par = truncated_potential(psi, lambda, t, grid, true,
                                  TruncRoute::Multiplier);
        best_par = std::min(best_par, now_s() - t0);

        t0 = now_s();
        truncated_potential(psi, lambda, t, grid, false,
                            TruncRoute::Multiplier);
        best_ser = std::min(best_ser, now_s() - t0);
    }

    double t0 = now_s();
    KernelGrid ref = truncated_potential(psi, lambda, t, ref_grid, false,
                                         TruncRoute::TimeQuadrature);
    double ref_time = now_s() - t0;

    KernelGrid par_sub = truncated_potential(psi, lambda, t, ref_grid, true,
                                             TruncRoute::Multiplier);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < ref_grid.size(); ++i)
        max_diff =
            std::max(max_diff, std::abs(par_sub.values[i] - ref.values[i]));
    double budget =
        par_sub.quadrature_error + ref.quadrature_error + 2e-6 * t;

    std::printf("multiplier (parallel) : %9.3f ms  (%.3f ms/point)\n",
                1e3 * best_par, 1e3 * best_par / n);
    std::printf("multiplier (serial)   : %9.3f ms  (speedup %.2fx)\n",
                1e3 * best_ser, best_ser / best_par);
    std::printf("time-quadrature ref   : %9.3f ms  (%.3f ms/point, %.0fx "
                "slower per point)\n",
                1e3 * ref_time, 1e3 * ref_time / ref_points,
                (ref_time / ref_points) / (best_par / n));
    std::printf("max |multiplier - reference| = %.3g (budget %.3g) -> %s\n",
                max_diff, budget, max_diff <= budget ? "agree" : "DISAGREE");
    return max_diff <= budget ? 0 : 1;
}
