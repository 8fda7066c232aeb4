// Benchmark: the OpenMP solver kernels against their serial reference
// implementations on the shipped tile systems.  Counts must agree exactly;
// the table reports wall times and speedups.

#include <chrono>
#include <cstdio>
#include <random>

#include "tilelab/blocks.hpp"
#include "tilelab/tiler.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace tilelab;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void bench_counts(const char* name, const LayeredTileSet& sys, int w, int h) {
    BoundaryCondition bc;
    auto t0 = Clock::now();
    uint64_t serial = count_rect_exhaustive_serial(sys, w, h, bc);
    double ts = ms_since(t0);
    t0 = Clock::now();
    uint64_t parallel = count_rect_exhaustive(sys, w, h, bc);
    double tp = ms_since(t0);
    t0 = Clock::now();
    uint64_t profile = 0;
    double tf = -1;
    try {
        profile = count_rect_profile(sys, w, h, bc);
        tf = ms_since(t0);
    } catch (const GuardExceeded&) {
        profile = serial;
    }
    // the dense transfer matrix only pays off on small state spaces
    t0 = Clock::now();
    uint64_t transfer = 0;
    double tt = -1;
    try {
        SolveOptions small;
        small.state_guard = 4096;
        transfer = count_rect_transfer(sys, w, h, bc, small);
        tt = ms_since(t0);
    } catch (const GuardExceeded&) {
        transfer = serial;
    }
    char ttbuf[32];
    if (tt >= 0) snprintf(ttbuf, sizeof ttbuf, "%8.1f ms", tt);
    else snprintf(ttbuf, sizeof ttbuf, "       --");
    char tfbuf[32];
    if (tf >= 0) snprintf(tfbuf, sizeof tfbuf, "%8.1f ms", tf);
    else snprintf(tfbuf, sizeof tfbuf, "       --");
    printf("%-22s %2dx%-2d count=%-12llu serial %8.1f ms  omp %8.1f ms  x%.2f  profile %s  transfer %s%s\n",
           name, w, h, (unsigned long long)serial, ts, tp, tp > 0 ? ts / tp : 0.0, tfbuf, ttbuf,
           serial == parallel && serial == transfer && serial == profile ? "" : "  MISMATCH");
}

void bench_enumerate(const char* name, const LayeredTileSet& sys, int w, int h) {
    BoundaryCondition bc;
    auto t0 = Clock::now();
    auto serial = enumerate_rect_serial(sys, w, h, bc);
    double ts = ms_since(t0);
    t0 = Clock::now();
    auto parallel = enumerate_rect(sys, w, h, bc);
    double tp = ms_since(t0);
    bool same = serial.size() == parallel.size();
    for (size_t i = 0; same && i < serial.size(); ++i) same = serial[i] == parallel[i];
    printf("%-22s %2dx%-2d enum=%-13zu serial %8.1f ms  omp %8.1f ms  x%.2f%s\n", name, w, h,
           serial.size(), ts, tp, tp > 0 ? ts / tp : 0.0, same ? "" : "  MISMATCH");
}

}  // namespace

int main() {
    setvbuf(stdout, nullptr, _IONBF, 0);
#ifdef _OPENMP
    printf("openmp threads: %d\n", omp_get_max_threads());
#else
    printf("openmp: not enabled\n");
#endif

    LayeredTileSet grid = single_layer(grid_tileset());
    bench_counts("grid rectangle", grid, 6, 6);
    bench_enumerate("grid rectangle", grid, 6, 6);

    CountingSystem cs = counting_system(Alphabet::binary());
    bench_counts("counting layers", cs.base, 4, 4);
    bench_counts("counting layers", cs.base, 4, 7);
    bench_counts("counting layers", cs.base, 5, 6);
    bench_enumerate("counting layers", cs.base, 4, 4);
    return 0;
}
