// Compares the OpenMP path simulator against the serial reference and checks
// the outputs are bit-identical while reporting throughput for both.
#include <chrono>
#include <cstdio>
#include <cstring>

#include "srsmile/drift.hpp"
#include "srsmile/mc.hpp"
#include "srsmile/termstructure.hpp"

using namespace srsmile;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    long paths = 200'000;
    if (argc > 1) paths = std::atol(argv[1]);

    ModelParams m(PiecewiseCurve::constant(0.01), PiecewiseCurve::constant(0.15),
                  PiecewiseCurve::constant(50.0), PiecewiseCurve::constant(0.2 / 50.0),
                  DiscountCurve::flat_rate(0.02));
    install_drift(m, 5.5);

    const double checkpoints[] = {1.0, 2.0, 5.0};
    McConfig cfg;
    cfg.paths = paths;

    // warm-up so the first timed run does not pay one-time cache fills
    {
        McConfig warm = cfg;
        warm.paths = 2000;
        simulate_paths(m, checkpoints, warm);
    }

    auto t0 = std::chrono::steady_clock::now();
    const PathEnsemble par = simulate_paths(m, checkpoints, cfg);
    const double t_par = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const PathEnsemble ser = simulate_paths_serial(m, checkpoints, cfg);
    const double t_ser = seconds_since(t0);

    const bool identical =
        par.y.size() == ser.y.size() && par.z.size() == ser.z.size() &&
        std::memcmp(par.y.data(), ser.y.data(), par.y.size() * sizeof(double)) == 0 &&
        std::memcmp(par.z.data(), ser.z.data(), par.z.size() * sizeof(double)) == 0;

    std::printf("paths: %ld, steps/year: %d, checkpoints: %zu\n", paths, cfg.steps_per_year,
                par.checkpoints.size());
    std::printf("parallel: %8.3fs  (%.0f paths/s)\n", t_par, paths / t_par);
    std::printf("serial:   %8.3fs  (%.0f paths/s)\n", t_ser, paths / t_ser);
    std::printf("speedup:  %8.2fx\n", t_ser / t_par);
    std::printf("bit-identical output: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
