#include "orbitlab/gram_schmidt.hpp"

#include <cmath>
#include <string>

#include "orbitlab/kernels.hpp"

namespace orbitlab::gs {

namespace {

/// One projection sweep of v against w_1..w_k.
/// modified: coefficients are recomputed from the partially reduced vector.
/// classical: all coefficients come from v as passed in.
void project_out(HVector& v, std::span<const HVector> ws, std::span<const double> wnorm_sq,
                 Variant variant) {
    if (ws.empty()) return;
    if (variant == Variant::modified) {
        for (std::size_t j = 0; j < ws.size(); ++j) {
            const cplx c = kernels::dot(v, ws[j]) / wnorm_sq[j];
            kernels::accumulate_scaled(v, -c, ws[j]);
        }
    } else {
        std::vector<cplx> c = kernels::coefficients(ws, v);
        for (std::size_t j = 0; j < ws.size(); ++j) c[j] /= wnorm_sq[j];
        HVector corr = kernels::combine(ws, c);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= corr[i];
    }
}

}  // namespace

OrthogonalizationOutcome orthogonalize(std::span<const HVector> us, const GSConfig& cfg) {
    cfg.thresholds.validate();
    if (us.empty()) throw InvalidInput("orthogonalize: empty input family");
    const std::size_t dim = us.front().size();
    for (const auto& u : us) {
        detail::require_finite(u, "orthogonalize");
        if (u.size() != dim) throw InvalidInput("orthogonalize: mixed ambient dimensions");
    }
    if (dim == 0) throw InvalidInput("orthogonalize: zero-dimensional vectors");
    if (kernels::norm(us.front()) == 0.0)
        throw InvalidInput("orthogonalize: first vector is zero");

    const ToleranceConfig& tol = cfg.thresholds;
    OrthogonalizationOutcome out;
    std::vector<double> wnorm_sq;

    for (std::size_t k = 0; k < us.size(); ++k) {
        const HVector& u = us[k];
        const double nu = kernels::norm(u);
        HVector w = u;  // step 1 keeps u_1 bit-for-bit
        if (k > 0) {
            project_out(w, out.raw_orthogonal, wnorm_sq, cfg.variant);
            if (cfg.reorthogonalize && kernels::norm(w) < tol.reorthog_threshold * nu)
                project_out(w, out.raw_orthogonal, wnorm_sq, cfg.variant);
        }
        const double nw = kernels::norm(w);
        if (!std::isfinite(nw))
            throw NumericFailure("orthogonalize: non-finite norm at step " + std::to_string(k + 1));
        if (nw <= tol.breakdown_tol * nu) {
            out.breakdown_index = k + 1;
            break;
        }
        if (out.raw_orthogonal.size() == dim)
            throw InconsistencyError("orthogonalize: more independent vectors than dimensions");
        out.raw_orthogonal.push_back(std::move(w));
        wnorm_sq.push_back(nw * nw);
    }

    std::vector<HVector> es;
    es.reserve(out.raw_orthogonal.size());
    for (std::size_t j = 0; j < out.raw_orthogonal.size(); ++j) {
        HVector e = out.raw_orthogonal[j];
        const double inv = 1.0 / std::sqrt(wnorm_sq[j]);
        for (auto& c : e) c *= inv;
        es.push_back(std::move(e));
    }
    out.system = make_orthonormal_system(std::move(es));

    out.span_residuals.reserve(out.raw_orthogonal.size());
    for (std::size_t k = 0; k < out.raw_orthogonal.size(); ++k) {
        std::span<const HVector> prefix(out.system.vectors.data(), k + 1);
        std::vector<cplx> c = kernels::coefficients(prefix, us[k]);
        HVector r = us[k];
        HVector s = kernels::combine(prefix, c);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= s[i];
        out.span_residuals.push_back(kernels::norm(r));
    }
    return out;
}

double span_preservation_residual(std::span<const HVector> us, const OrthogonalizationOutcome& outcome,
                                  std::size_t n, const ToleranceConfig& tol) {
    if (n == 0 || n > outcome.completed_steps())
        throw InvalidInput("span_preservation_residual: n outside completed steps");
    if (us.size() < n) throw InvalidInput("span_preservation_residual: fewer inputs than n");
    OrthonormalSystem prefix = make_orthonormal_system(
        {outcome.system.vectors.begin(), outcome.system.vectors.begin() + static_cast<std::ptrdiff_t>(n)});
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        worst = std::max(worst, projection_residual(us[k], prefix, tol));
    return worst;
}

}  // namespace orbitlab::gs
