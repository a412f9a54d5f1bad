#include "orbitlab/kernels.hpp"

#include <atomic>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace orbitlab::kernels {

namespace {

#ifdef _OPENMP
std::atomic<bool> g_parallel{true};
#else
std::atomic<bool> g_parallel{false};
#endif

// Scalar helpers shared by the serial and OpenMP paths.  Each output
// element is produced by exactly one of these, so the two paths agree
// bitwise no matter how the elements are distributed over threads.

cplx dot_n(const cplx* u, const cplx* v, std::size_t n) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) acc += u[i] * std::conj(v[i]);
    return acc;
}

double norm_sq_n(const cplx* u, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::norm(u[i]);
    return acc;
}

cplx combine_coord(std::span<const HVector> basis, std::span<const cplx> coeffs, std::size_t i) {
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < basis.size(); ++j) acc += coeffs[j] * basis[j][i];
    return acc;
}

cplx matvec_row(const cplx* row, const cplx* v, std::size_t n) {
    cplx acc{0.0, 0.0};
    for (std::size_t c = 0; c < n; ++c) acc += row[c] * v[c];
    return acc;
}

cplx matvec_adj_col(std::span<const cplx> m, const cplx* v, std::size_t n, std::size_t c) {
    cplx acc{0.0, 0.0};
    for (std::size_t r = 0; r < n; ++r) acc += std::conj(m[r * n + c]) * v[r];
    return acc;
}

double pair_defect(std::span<const HVector> basis, std::size_t j, std::size_t k) {
    cplx g = dot_n(basis[j].data(), basis[k].data(), basis[j].size());
    if (j == k) g -= 1.0;
    return std::abs(g);
}

void check_basis(std::span<const HVector> basis, const char* what) {
    if (basis.empty()) return;
    const std::size_t d = basis.front().size();
    for (const auto& b : basis)
        if (b.size() != d) throw InvalidInput(std::string(what) + ": ragged basis");
}

}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

cplx dot(std::span<const cplx> u, std::span<const cplx> v) {
    if (u.size() != v.size()) throw InvalidInput("dot: dimension mismatch");
    return dot_n(u.data(), v.data(), u.size());
}

double norm_sq(std::span<const cplx> u) { return norm_sq_n(u.data(), u.size()); }

double norm(std::span<const cplx> u) { return std::sqrt(norm_sq(u)); }

// --- serial reference ---

namespace serial {

std::vector<cplx> coefficients(std::span<const HVector> basis, std::span<const cplx> u) {
    check_basis(basis, "coefficients");
    std::vector<cplx> c(basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
        if (basis[j].size() != u.size()) throw InvalidInput("coefficients: dimension mismatch");
        c[j] = dot_n(u.data(), basis[j].data(), u.size());
    }
    return c;
}

HVector combine(std::span<const HVector> basis, std::span<const cplx> coeffs) {
    if (basis.size() != coeffs.size()) throw InvalidInput("combine: coefficient count mismatch");
    check_basis(basis, "combine");
    if (basis.empty()) return {};
    HVector out(basis.front().size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = combine_coord(basis, coeffs, i);
    return out;
}

void accumulate_scaled(std::span<cplx> y, cplx a, std::span<const cplx> x) {
    if (y.size() != x.size()) throw InvalidInput("accumulate_scaled: dimension mismatch");
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

double gram_defect(std::span<const HVector> basis) {
    check_basis(basis, "gram_defect");
    double worst = 0.0;
    for (std::size_t j = 0; j < basis.size(); ++j)
        for (std::size_t k = j; k < basis.size(); ++k)
            worst = std::max(worst, pair_defect(basis, j, k));
    return worst;
}

std::vector<cplx> dense_matvec(std::span<const cplx> m, std::span<const cplx> v, std::size_t n) {
    if (m.size() != n * n || v.size() != n) throw InvalidInput("dense_matvec: shape mismatch");
    std::vector<cplx> out(n);
    for (std::size_t r = 0; r < n; ++r) out[r] = matvec_row(m.data() + r * n, v.data(), n);
    return out;
}

std::vector<cplx> dense_matvec_adjoint(std::span<const cplx> m, std::span<const cplx> v, std::size_t n) {
    if (m.size() != n * n || v.size() != n) throw InvalidInput("dense_matvec_adjoint: shape mismatch");
    std::vector<cplx> out(n);
    for (std::size_t c = 0; c < n; ++c) out[c] = matvec_adj_col(m, v.data(), n, c);
    return out;
}

}  // namespace serial

// --- OpenMP path ---

namespace omp {

std::vector<cplx> coefficients(std::span<const HVector> basis, std::span<const cplx> u) {
    check_basis(basis, "coefficients");
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(basis.size());
    std::vector<cplx> c(basis.size());
    for (std::ptrdiff_t j = 0; j < m; ++j)
        if (basis[j].size() != u.size()) throw InvalidInput("coefficients: dimension mismatch");
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < m; ++j)
        c[j] = dot_n(u.data(), basis[j].data(), u.size());
    return c;
}

HVector combine(std::span<const HVector> basis, std::span<const cplx> coeffs) {
    if (basis.size() != coeffs.size()) throw InvalidInput("combine: coefficient count mismatch");
    check_basis(basis, "combine");
    if (basis.empty()) return {};
    HVector out(basis.front().size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[i] = combine_coord(basis, coeffs, static_cast<std::size_t>(i));
    return out;
}

void accumulate_scaled(std::span<cplx> y, cplx a, std::span<const cplx> x) {
    if (y.size() != x.size()) throw InvalidInput("accumulate_scaled: dimension mismatch");
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double gram_defect(std::span<const HVector> basis) {
    check_basis(basis, "gram_defect");
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(basis.size());
    double worst = 0.0;
    // Flattened upper triangle; max-reduction is order independent.
#pragma omp parallel for schedule(static) reduction(max : worst)
    for (std::ptrdiff_t p = 0; p < m * m; ++p) {
        const std::size_t j = static_cast<std::size_t>(p) / basis.size();
        const std::size_t k = static_cast<std::size_t>(p) % basis.size();
        if (k < j) continue;
        worst = std::max(worst, pair_defect(basis, j, k));
    }
    return worst;
}

std::vector<cplx> dense_matvec(std::span<const cplx> m, std::span<const cplx> v, std::size_t n) {
    if (m.size() != n * n || v.size() != n) throw InvalidInput("dense_matvec: shape mismatch");
    std::vector<cplx> out(n);
    const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < nn; ++r)
        out[r] = matvec_row(m.data() + static_cast<std::size_t>(r) * n, v.data(), n);
    return out;
}

std::vector<cplx> dense_matvec_adjoint(std::span<const cplx> m, std::span<const cplx> v, std::size_t n) {
    if (m.size() != n * n || v.size() != n) throw InvalidInput("dense_matvec_adjoint: shape mismatch");
    std::vector<cplx> out(n);
    const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < nn; ++c)
        out[c] = matvec_adj_col(m, v.data(), n, static_cast<std::size_t>(c));
    return out;
}

}  // namespace omp

// --- dispatch ---

std::vector<cplx> coefficients(std::span<const HVector> basis, std::span<const cplx> u) {
    return parallel_enabled() ? omp::coefficients(basis, u) : serial::coefficients(basis, u);
}

HVector combine(std::span<const HVector> basis, std::span<const cplx> coeffs) {
    return parallel_enabled() ? omp::combine(basis, coeffs) : serial::combine(basis, coeffs);
}

void accumulate_scaled(std::span<cplx> y, cplx a, std::span<const cplx> x) {
    parallel_enabled() ? omp::accumulate_scaled(y, a, x) : serial::accumulate_scaled(y, a, x);
}

double gram_defect(std::span<const HVector> basis) {
    return parallel_enabled() ? omp::gram_defect(basis) : serial::gram_defect(basis);
}

std::vector<cplx> dense_matvec(std::span<const cplx> m, std::span<const cplx> v, std::size_t n) {
    return parallel_enabled() ? omp::dense_matvec(m, v, n) : serial::dense_matvec(m, v, n);
}

std::vector<cplx> dense_matvec_adjoint(std::span<const cplx> m, std::span<const cplx> v, std::size_t n) {
    return parallel_enabled() ? omp::dense_matvec_adjoint(m, v, n)
                              : serial::dense_matvec_adjoint(m, v, n);
}

}  // namespace orbitlab::kernels
