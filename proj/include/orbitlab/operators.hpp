#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "orbitlab/hilbert.hpp"
#include "orbitlab/types.hpp"

namespace orbitlab::op {

/// Description of a bounded operator on the truncated space.  Structured
/// kinds (shift, weighted shift, diagonal) are applied in O(dim) without
/// ever forming a matrix; dense/eigen routines materialize on demand.
struct OperatorSpec {
    enum class Kind { unilateral_shift, weighted_shift, diagonal, dense, scaled_sum, composition };

    Kind kind = Kind::unilateral_shift;
    std::size_t dim = 0;
    std::vector<cplx> data;              // weights / diagonal entries / row-major matrix
    std::vector<cplx> coeffs;            // scaled_sum scalars, parallel to children
    std::vector<OperatorSpec> children;  // scaled_sum terms or composition factors

    static OperatorSpec unilateral_shift(std::size_t dim);
    static OperatorSpec weighted_shift(std::vector<cplx> weights);
    static OperatorSpec diagonal(std::vector<cplx> entries);
    static OperatorSpec dense(std::vector<cplx> matrix_row_major, std::size_t dim);
    static OperatorSpec scaled_sum(std::vector<cplx> coeffs, std::vector<OperatorSpec> terms);
    static OperatorSpec composition(std::vector<OperatorSpec> factors);

    void validate() const;
};

/// T v.  The truncation edge sends e_dim to 0 under either shift kind.
HVector apply(const OperatorSpec& T, const HVector& v);

/// T* v (conjugate-transpose action), used by the norm estimator.
HVector apply_adjoint(const OperatorSpec& T, const HVector& v);

/// Row-major dense realization, built by applying T to the canonical basis.
std::vector<cplx> materialize(const OperatorSpec& T);

/// Power iteration on T*T.  Returns the largest Rayleigh quotient
/// ||T v||/||v|| seen, which can undershoot the true operator norm but
/// never exceeds it.  Deterministic for a given seed.
double operator_norm_estimate(const OperatorSpec& T, std::size_t iters, std::uint64_t seed);

/// Orthonormal basis of a subspace.
struct SubspaceBasis {
    OrthonormalSystem system;

    std::size_t count() const { return system.count(); }
};

/// Numerical null space: singular directions with sigma <= breakdown_tol
/// times the largest singular value.  Empty basis means numerically
/// injective.  Every returned vector q is verified to satisfy
/// ||T q|| <= 10*breakdown_tol*||T||.
SubspaceBasis kernel_basis(const OperatorSpec& T, const ToleranceConfig& tol);

/// max over basis vectors q of dist(T q, span S) / max(1, ||T q||).
/// Zero (within tolerance) certifies T(S) within S numerically.
double invariance_residual(const OperatorSpec& T, const SubspaceBasis& S,
                           const ToleranceConfig& tol = {});

struct InvariantSubspaceReport {
    SubspaceBasis basis;
    double invariance_residual = 0.0;
    bool nontrivial = false;  // 1 <= dim(S) <= ambient-1
    std::optional<cplx> eigenvalue;
};

/// One-dimensional invariant subspace spanned by a unit eigenvector of the
/// dense realization.  Eigenvalue selection: largest modulus, ties broken
/// by lowest index, so the output is deterministic.
InvariantSubspaceReport finite_dim_invariant_subspace(const OperatorSpec& T,
                                                      const ToleranceConfig& tol = {});

}  // namespace orbitlab::op
