#include "orbitlab/operators.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "orbitlab/kernels.hpp"
#include "orbitlab/random.hpp"

namespace orbitlab::op {

namespace {

constexpr std::uint64_t kNormSalt = 0x6f70'6e6f'726dULL;

void require_dim(const OperatorSpec& T, const HVector& v, const char* what) {
    if (v.size() != T.dim)
        throw InvalidInput(std::string(what) + ": vector dimension " + std::to_string(v.size()) +
                           " does not match operator dimension " + std::to_string(T.dim));
}

Eigen::MatrixXcd to_eigen(const OperatorSpec& T) {
    const auto n = static_cast<Eigen::Index>(T.dim);
    Eigen::MatrixXcd M(n, n);
    HVector basis(T.dim, cplx(0, 0));
    for (std::size_t j = 0; j < T.dim; ++j) {
        basis[j] = 1.0;
        const HVector col = op::apply(T, basis);
        for (std::size_t i = 0; i < T.dim; ++i)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
        basis[j] = 0.0;
    }
    return M;
}

}  // namespace

OperatorSpec OperatorSpec::unilateral_shift(std::size_t dim) {
    OperatorSpec s;
    s.kind = Kind::unilateral_shift;
    s.dim = dim;
    s.validate();
    return s;
}

OperatorSpec OperatorSpec::weighted_shift(std::vector<cplx> weights) {
    OperatorSpec s;
    s.kind = Kind::weighted_shift;
    s.dim = weights.size();
    s.data = std::move(weights);
    s.validate();
    return s;
}

OperatorSpec OperatorSpec::diagonal(std::vector<cplx> entries) {
    OperatorSpec s;
    s.kind = Kind::diagonal;
    s.dim = entries.size();
    s.data = std::move(entries);
    s.validate();
    return s;
}

OperatorSpec OperatorSpec::dense(std::vector<cplx> matrix_row_major, std::size_t dim) {
    OperatorSpec s;
    s.kind = Kind::dense;
    s.dim = dim;
    s.data = std::move(matrix_row_major);
    s.validate();
    return s;
}

OperatorSpec OperatorSpec::scaled_sum(std::vector<cplx> coeffs, std::vector<OperatorSpec> terms) {
    OperatorSpec s;
    s.kind = Kind::scaled_sum;
    s.dim = terms.empty() ? 0 : terms.front().dim;
    s.coeffs = std::move(coeffs);
    s.children = std::move(terms);
    s.validate();
    return s;
}

OperatorSpec OperatorSpec::composition(std::vector<OperatorSpec> factors) {
    OperatorSpec s;
    s.kind = Kind::composition;
    s.dim = factors.empty() ? 0 : factors.front().dim;
    s.children = std::move(factors);
    s.validate();
    return s;
}

void OperatorSpec::validate() const {
    if (dim < 1) throw InvalidInput("OperatorSpec: dim must be positive");
    auto require_finite_data = [&](const char* what) {
        for (const cplx& c : data)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                throw InvalidInput(std::string(what) + ": non-finite entry");
    };
    switch (kind) {
        case Kind::unilateral_shift:
            break;
        case Kind::weighted_shift:
        case Kind::diagonal:
            if (data.size() != dim)
                throw InvalidInput("OperatorSpec: weights/entries length must equal dim");
            require_finite_data("OperatorSpec");
            break;
        case Kind::dense:
            if (data.size() != dim * dim)
                throw InvalidInput("OperatorSpec: dense matrix must be dim x dim");
            require_finite_data("OperatorSpec");
            break;
        case Kind::scaled_sum:
            if (children.empty() || children.size() != coeffs.size())
                throw InvalidInput("OperatorSpec: scaled_sum needs matching coefficients and terms");
            for (const auto& t : children) {
                if (t.dim != dim) throw InvalidInput("OperatorSpec: scaled_sum term dimension mismatch");
                t.validate();
            }
            for (const cplx& c : coeffs)
                if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                    throw InvalidInput("OperatorSpec: non-finite coefficient");
            break;
        case Kind::composition:
            if (children.empty()) throw InvalidInput("OperatorSpec: empty composition");
            for (const auto& f : children) {
                if (f.dim != dim) throw InvalidInput("OperatorSpec: composition factor dimension mismatch");
                f.validate();
            }
            break;
    }
}

HVector apply(const OperatorSpec& T, const HVector& v) {
    require_dim(T, v, "apply");
    switch (T.kind) {
        case OperatorSpec::Kind::unilateral_shift: {
            HVector out(T.dim, cplx(0, 0));
            for (std::size_t i = 1; i < T.dim; ++i) out[i] = v[i - 1];
            return out;  // the e_dim component of v falls off the truncation edge
        }
        case OperatorSpec::Kind::weighted_shift: {
            HVector out(T.dim, cplx(0, 0));
            for (std::size_t i = 1; i < T.dim; ++i) out[i] = T.data[i - 1] * v[i - 1];
            return out;
        }
        case OperatorSpec::Kind::diagonal: {
            HVector out(T.dim);
            for (std::size_t i = 0; i < T.dim; ++i) out[i] = T.data[i] * v[i];
            return out;
        }
        case OperatorSpec::Kind::dense:
            return kernels::dense_matvec(T.data, v, T.dim);
        case OperatorSpec::Kind::scaled_sum: {
            HVector out(T.dim, cplx(0, 0));
            for (std::size_t t = 0; t < T.children.size(); ++t) {
                const HVector tv = op::apply(T.children[t], v);
                kernels::accumulate_scaled(out, T.coeffs[t], tv);
            }
            return out;
        }
        case OperatorSpec::Kind::composition: {
            // factors compose like written: composition(A,B) v = A(B v)
            HVector cur = v;
            for (auto it = T.children.rbegin(); it != T.children.rend(); ++it)
                cur = op::apply(*it, cur);
            return cur;
        }
    }
    throw InvalidInput("apply: unknown operator kind");
}

HVector apply_adjoint(const OperatorSpec& T, const HVector& v) {
    require_dim(T, v, "apply_adjoint");
    switch (T.kind) {
        case OperatorSpec::Kind::unilateral_shift: {
            HVector out(T.dim, cplx(0, 0));
            for (std::size_t i = 0; i + 1 < T.dim; ++i) out[i] = v[i + 1];
            return out;
        }
        case OperatorSpec::Kind::weighted_shift: {
            HVector out(T.dim, cplx(0, 0));
            for (std::size_t i = 0; i + 1 < T.dim; ++i) out[i] = std::conj(T.data[i]) * v[i + 1];
            return out;
        }
        case OperatorSpec::Kind::diagonal: {
            HVector out(T.dim);
            for (std::size_t i = 0; i < T.dim; ++i) out[i] = std::conj(T.data[i]) * v[i];
            return out;
        }
        case OperatorSpec::Kind::dense:
            return kernels::dense_matvec_adjoint(T.data, v, T.dim);
        case OperatorSpec::Kind::scaled_sum: {
            HVector out(T.dim, cplx(0, 0));
            for (std::size_t t = 0; t < T.children.size(); ++t) {
                const HVector tv = op::apply_adjoint(T.children[t], v);
                kernels::accumulate_scaled(out, std::conj(T.coeffs[t]), tv);
            }
            return out;
        }
        case OperatorSpec::Kind::composition: {
            HVector cur = v;  // (A B)* = B* A*
            for (const auto& f : T.children) cur = op::apply_adjoint(f, cur);
            return cur;
        }
    }
    throw InvalidInput("apply_adjoint: unknown operator kind");
}

std::vector<cplx> materialize(const OperatorSpec& T) {
    const Eigen::MatrixXcd M = to_eigen(T);
    std::vector<cplx> out(T.dim * T.dim);
    for (std::size_t r = 0; r < T.dim; ++r)
        for (std::size_t c = 0; c < T.dim; ++c)
            out[r * T.dim + c] = M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    return out;
}

double operator_norm_estimate(const OperatorSpec& T, std::size_t iters, std::uint64_t seed) {
    if (iters == 0) throw InvalidInput("operator_norm_estimate: iters must be >= 1");
    T.validate();
    Rng rng(mix_seed(seed, kNormSalt));
    HVector v = rng.unit_vector(T.dim);
    double best = 0.0;
    int restarts = 0;
    for (std::size_t it = 0; it < iters; ++it) {
        const HVector tv = op::apply(T, v);
        const double s = kernels::norm(tv);  // Rayleigh quotient, v is unit
        if (!std::isfinite(s)) throw NumericFailure("operator_norm_estimate: non-finite iterate");
        best = std::max(best, s);
        if (s == 0.0) {
            // v landed in the kernel; redraw a few times before accepting 0
            if (++restarts > 3) break;
            v = rng.unit_vector(T.dim);
            continue;
        }
        HVector w = op::apply_adjoint(T, tv);
        const double nw = kernels::norm(w);
        if (nw == 0.0) break;
        for (auto& c : w) c /= nw;
        v = std::move(w);
    }
    return best;
}

SubspaceBasis kernel_basis(const OperatorSpec& T, const ToleranceConfig& tol) {
    tol.validate();
    T.validate();
    const Eigen::MatrixXcd M = to_eigen(T);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    const double cutoff = tol.breakdown_tol * smax;

    std::vector<HVector> qs;
    for (Eigen::Index j = 0; j < sv.size(); ++j) {
        if (sv(j) > cutoff) continue;
        HVector q(T.dim);
        for (std::size_t i = 0; i < T.dim; ++i)
            q[i] = svd.matrixV()(static_cast<Eigen::Index>(i), j);
        detail::phase_normalize(q);
        qs.push_back(std::move(q));
    }
    for (const auto& q : qs) {
        const double tq = kernels::norm(op::apply(T, q));
        if (tq > 10.0 * tol.breakdown_tol * smax)
            throw InconsistencyError("kernel_basis: reported kernel vector not annihilated");
    }
    return SubspaceBasis{make_orthonormal_system(std::move(qs))};
}

double invariance_residual(const OperatorSpec& T, const SubspaceBasis& S, const ToleranceConfig& tol) {
    tol.validate();
    detail::require_certified(S.system, tol, "invariance_residual");
    double worst = 0.0;
    for (const HVector& q : S.system.vectors) {
        const HVector tq = op::apply(T, q);
        const double r = projection_residual(tq, S.system, tol);
        worst = std::max(worst, r / std::max(1.0, kernels::norm(tq)));
    }
    return worst;
}

InvariantSubspaceReport finite_dim_invariant_subspace(const OperatorSpec& T, const ToleranceConfig& tol) {
    tol.validate();
    T.validate();
    if (T.dim < 2) throw InvalidInput("finite_dim_invariant_subspace: dim must be >= 2");

    const Eigen::MatrixXcd M = to_eigen(T);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw NumericFailure("finite_dim_invariant_subspace: eigen-solver did not converge (dim " +
                             std::to_string(T.dim) + ")");

    const auto& vals = es.eigenvalues();
    Eigen::Index pick = 0;
    for (Eigen::Index i = 1; i < vals.size(); ++i)
        if (std::abs(vals(i)) > std::abs(vals(pick))) pick = i;
    const cplx lambda = vals(pick);

    // The eigensolver's vector can carry a large residual when lambda is
    // defective (a truncated shift is one big Jordan block).  The smallest
    // right singular direction of M - lambda I minimizes ||(M - lambda)q||
    // outright, so use it instead and let the Rayleigh quotient re-center
    // the eigenvalue.
    Eigen::MatrixXcd B = M;
    for (Eigen::Index i = 0; i < B.rows(); ++i) B(i, i) -= lambda;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B, Eigen::ComputeFullV);
    const Eigen::Index last = svd.matrixV().cols() - 1;

    HVector q(T.dim);
    for (std::size_t i = 0; i < T.dim; ++i)
        q[i] = svd.matrixV()(static_cast<Eigen::Index>(i), last);
    const double nq = kernels::norm(q);
    if (nq == 0.0) throw NumericFailure("finite_dim_invariant_subspace: zero singular vector");
    for (auto& c : q) c /= nq;
    detail::phase_normalize(q);

    InvariantSubspaceReport rep;
    rep.basis = SubspaceBasis{make_orthonormal_system({q})};
    rep.invariance_residual = invariance_residual(T, rep.basis, tol);
    rep.nontrivial = rep.basis.count() >= 1 && rep.basis.count() <= T.dim - 1;
    rep.eigenvalue = kernels::dot(op::apply(T, q), q);  // Rayleigh-polished
    return rep;
}

}  // namespace orbitlab::op
