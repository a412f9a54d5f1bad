#include "orbitlab/hilbert.hpp"

#include <cmath>
#include <string>

namespace orbitlab {

OrthonormalSystem make_orthonormal_system(std::vector<HVector> vectors) {
    for (const auto& v : vectors) detail::require_finite(v, "make_orthonormal_system");
    if (!vectors.empty()) {
        const std::size_t d = vectors.front().size();
        for (const auto& v : vectors)
            if (v.size() != d) throw InvalidInput("make_orthonormal_system: ragged family");
        if (vectors.size() > d)
            throw InvalidInput("make_orthonormal_system: more vectors than ambient dimensions");
    }
    OrthonormalSystem s;
    s.gram_defect = vectors.empty() ? 0.0 : kernels::gram_defect(vectors);
    s.vectors = std::move(vectors);
    return s;
}

namespace detail {

void require_certified(const OrthonormalSystem& theta, const ToleranceConfig& tol, const char* what) {
    if (!theta.certified(tol))
        throw InvalidInput(std::string(what) + ": system not orthonormal (gram defect " +
                           std::to_string(theta.gram_defect) + " > " + std::to_string(tol.ortho_tol) + ")");
}

void require_matching(const HVector& u, const OrthonormalSystem& theta, const char* what) {
    require_nonempty(u, what);
    require_finite(u, what);
    if (theta.count() > 0 && theta.ambient_dim() != u.size())
        throw InvalidInput(std::string(what) + ": vector/system dimension mismatch");
}

void phase_normalize(HVector& v) {
    std::size_t imax = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double m = std::abs(v[i]);
        if (m > best) {
            best = m;
            imax = i;
        }
    }
    if (best <= 0.0) return;
    const cplx rot = std::conj(v[imax]) / best;
    for (auto& c : v) c *= rot;
    v[imax] = cplx(std::abs(v[imax]), 0.0);  // kill residual imaginary dust on the pivot
}

}  // namespace detail

cplx inner_product(const HVector& u, const HVector& v) {
    detail::require_same_dim(u, v, "inner_product");
    detail::require_nonempty(u, "inner_product");
    detail::require_finite(u, "inner_product");
    detail::require_finite(v, "inner_product");
    return kernels::dot(u, v);
}

double norm(const HVector& u) {
    detail::require_nonempty(u, "norm");
    detail::require_finite(u, "norm");
    return kernels::norm(u);
}

CoefficientSequence project_coefficients(const HVector& u, const OrthonormalSystem& theta,
                                         const ToleranceConfig& tol) {
    detail::require_matching(u, theta, "project_coefficients");
    detail::require_certified(theta, tol, "project_coefficients");
    CoefficientSequence a;
    a.values = kernels::coefficients(theta.vectors, u);
    for (const cplx& c : a.values) a.energy += std::norm(c);
    return a;
}

HVector expand(const OrthonormalSystem& theta, const CoefficientSequence& a) {
    if (a.values.size() != theta.count())
        throw InvalidInput("expand: coefficient count does not match system size");
    if (theta.count() == 0) throw InvalidInput("expand: empty system has no ambient dimension");
    return kernels::combine(theta.vectors, a.values);
}

HVector residual_vector(const HVector& u, const OrthonormalSystem& theta) {
    if (theta.count() == 0) return u;
    std::vector<cplx> c = kernels::coefficients(theta.vectors, u);
    HVector s = kernels::combine(theta.vectors, c);
    HVector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] - s[i];
    return r;
}

BesselReport bessel_parseval_report(const HVector& u, const OrthonormalSystem& theta,
                                    const ToleranceConfig& tol) {
    detail::require_matching(u, theta, "bessel_parseval_report");
    detail::require_certified(theta, tol, "bessel_parseval_report");

    BesselReport rep;
    rep.norm_sq = kernels::norm_sq(u);

    const CoefficientSequence a = project_coefficients(u, theta, tol);
    rep.partial_energies.reserve(a.values.size());
    double run = 0.0;
    for (const cplx& c : a.values) {
        run += std::norm(c);
        rep.partial_energies.push_back(run);
    }
    rep.parseval_defect = rep.norm_sq - run;
    rep.expansion_residual = kernels::norm(residual_vector(u, theta));

    // The energy ledger must never overshoot the norm; an overshoot beyond
    // slack means the system certificate lied.
    const double slack = tol.eq_slack * std::max(1.0, rep.norm_sq);
    for (double p : rep.partial_energies)
        if (p > rep.norm_sq + slack)
            throw InconsistencyError("bessel_parseval_report: partial energy exceeds norm");
    return rep;
}

double projection_residual(const HVector& u, const OrthonormalSystem& theta,
                           const ToleranceConfig& tol) {
    detail::require_matching(u, theta, "projection_residual");
    if (theta.count() == 0) return kernels::norm(u);
    detail::require_certified(theta, tol, "projection_residual");
    return kernels::norm(residual_vector(u, theta));
}

}  // namespace orbitlab
