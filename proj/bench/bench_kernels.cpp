// Times the serial reference kernels against the OpenMP ones on the
// workloads the pipeline actually runs (projection batches, Gram defect
// scans, dense matvecs) and verifies on the way that both paths agree
// bit for bit.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "orbitlab/kernels.hpp"
#include "orbitlab/random.hpp"

using namespace orbitlab;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

bool bits_equal(const HVector& a, const HVector& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

void row(const char* name, double serial_ms, double omp_ms, bool identical) {
    std::printf("%-28s %10.3f %10.3f %9.2fx   %s\n", name, serial_ms, omp_ms,
                serial_ms / omp_ms, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
    constexpr std::size_t dim = 2048;
    constexpr std::size_t family = 192;
    constexpr int reps = 5;

    Rng rng(20250819);
    std::vector<HVector> basis;
    for (std::size_t i = 0; i < family; ++i) basis.push_back(rng.unit_vector(dim));
    const HVector u = rng.unit_vector(dim);
    std::vector<cplx> coef(family);
    for (auto& c : coef) c = rng.gaussian_cplx();
    std::vector<cplx> mat(dim * dim / 4);  // 1024 x 1024 dense
    for (auto& c : mat) c = rng.gaussian_cplx();
    const std::size_t mdim = dim / 2;
    const HVector mv = rng.unit_vector(mdim);

    std::printf("threads available: %d\n\n", kernels::max_threads());
    std::printf("%-28s %10s %10s %10s\n", "kernel", "serial ms", "omp ms", "speedup");

    std::vector<cplx> out_s, out_p;
    double ts = time_best_of(reps, [&] { out_s = kernels::serial::coefficients(basis, u); });
    double tp = time_best_of(reps, [&] { out_p = kernels::omp::coefficients(basis, u); });
    row("coefficients (192x2048)", ts, tp, out_s == out_p);

    HVector c_s, c_p;
    ts = time_best_of(reps, [&] { c_s = kernels::serial::combine(basis, coef); });
    tp = time_best_of(reps, [&] { c_p = kernels::omp::combine(basis, coef); });
    row("combine (192x2048)", ts, tp, bits_equal(c_s, c_p));

    double g_s = 0, g_p = 0;
    ts = time_best_of(reps, [&] { g_s = kernels::serial::gram_defect(basis); });
    tp = time_best_of(reps, [&] { g_p = kernels::omp::gram_defect(basis); });
    row("gram_defect (192x2048)", ts, tp, g_s == g_p);

    ts = time_best_of(reps, [&] { c_s = kernels::serial::dense_matvec(mat, mv, mdim); });
    tp = time_best_of(reps, [&] { c_p = kernels::omp::dense_matvec(mat, mv, mdim); });
    row("dense_matvec (1024x1024)", ts, tp, bits_equal(c_s, c_p));

    ts = time_best_of(reps, [&] { c_s = kernels::serial::dense_matvec_adjoint(mat, mv, mdim); });
    tp = time_best_of(reps, [&] { c_p = kernels::omp::dense_matvec_adjoint(mat, mv, mdim); });
    row("dense_matvec_adj (1024^2)", ts, tp, bits_equal(c_s, c_p));

    return 0;
}
