#pragma once

#include <span>
#include <vector>

#include "orbitlab/types.hpp"

namespace orbitlab::kernels {

/// Global switch between the serial reference kernels and the OpenMP ones.
/// Both paths compute every output element with the same scalar helper in
/// the same order, so flipping this never changes a single bit of output;
/// the serial path exists as the obviously-correct reference and for
/// debugging.  Defaults to on when compiled with OpenMP.
bool parallel_enabled();
void set_parallel(bool on);

/// Number of OpenMP threads the parallel path would use (1 without OpenMP).
int max_threads();

// Single reductions.  One accumulation chain, always evaluated serially:
// the result must not depend on the thread count, and a parallel reduction
// would reassociate the sum.
cplx dot(std::span<const cplx> u, std::span<const cplx> v);  // sum_i u_i * conj(v_i)
double norm_sq(std::span<const cplx> u);
double norm(std::span<const cplx> u);

// Batched operations.  Parallelism is over independent output elements
// only, which is what keeps both paths bit-identical.

/// c_j = <u, basis_j> for each j.
std::vector<cplx> coefficients(std::span<const HVector> basis, std::span<const cplx> u);

/// out_i = sum_j coeffs_j * basis_j[i].  Parallel over coordinates i.
HVector combine(std::span<const HVector> basis, std::span<const cplx> coeffs);

/// y_i += a * x_i.
void accumulate_scaled(std::span<cplx> y, cplx a, std::span<const cplx> x);

/// max_{j<=k} |<b_j, b_k> - delta_jk|.  Parallel over pairs.
double gram_defect(std::span<const HVector> basis);

/// Row-major dense matvec, out_r = sum_c m[r*n+c] * v_c.  Parallel over rows.
std::vector<cplx> dense_matvec(std::span<const cplx> m, std::span<const cplx> v, std::size_t n);

/// Adjoint matvec, out_c = sum_r conj(m[r*n+c]) * v_r.  Parallel over columns.
std::vector<cplx> dense_matvec_adjoint(std::span<const cplx> m, std::span<const cplx> v, std::size_t n);

/// Serial reference implementations (plain loops, no dispatch).
namespace serial {
std::vector<cplx> coefficients(std::span<const HVector> basis, std::span<const cplx> u);
HVector combine(std::span<const HVector> basis, std::span<const cplx> coeffs);
void accumulate_scaled(std::span<cplx> y, cplx a, std::span<const cplx> x);
double gram_defect(std::span<const HVector> basis);
std::vector<cplx> dense_matvec(std::span<const cplx> m, std::span<const cplx> v, std::size_t n);
std::vector<cplx> dense_matvec_adjoint(std::span<const cplx> m, std::span<const cplx> v, std::size_t n);
}  // namespace serial

/// OpenMP implementations.  Compile to the serial loops when _OPENMP is off.
namespace omp {
std::vector<cplx> coefficients(std::span<const HVector> basis, std::span<const cplx> u);
HVector combine(std::span<const HVector> basis, std::span<const cplx> coeffs);
void accumulate_scaled(std::span<cplx> y, cplx a, std::span<const cplx> x);
double gram_defect(std::span<const HVector> basis);
std::vector<cplx> dense_matvec(std::span<const cplx> m, std::span<const cplx> v, std::size_t n);
std::vector<cplx> dense_matvec_adjoint(std::span<const cplx> m, std::span<const cplx> v, std::size_t n);
}  // namespace omp

}  // namespace orbitlab::kernels
