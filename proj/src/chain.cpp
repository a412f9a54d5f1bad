#include "orbitlab/chain.hpp"

#include <cmath>
#include <string>

#include "orbitlab/kernels.hpp"

namespace orbitlab::chain {

namespace {

constexpr double kRescaleLow = 1e-12;
constexpr double kRescaleHigh = 1e+12;

void require_seed(const HVector& x, const char* what) {
    detail::require_nonempty(x, what);
    detail::require_finite(x, what);
    if (kernels::norm(x) == 0.0) throw InvalidInput(std::string(what) + ": zero seed vector");
}

/// Subtracts the projection onto theta_1..theta_n from r: one recurrence
/// step against theta_n, then a full sweep over the prefix.  The sweep
/// clears the O(eps*||x||) dust the plain recurrence leaves behind, which
/// matters once ||x_n|| is tiny: y_n = x_n/||x_n|| amplifies any dust by
/// 1/||x_n||, and the tail-orthogonality certificate would drown in it.
void ladder_step(HVector& r, std::span<const HVector> theta_prefix) {
    const HVector& last = theta_prefix.back();
    const cplx c = kernels::dot(r, last);
    kernels::accumulate_scaled(r, -c, last);
    const std::vector<cplx> dust = kernels::coefficients(theta_prefix, r);
    const HVector corr = kernels::combine(theta_prefix, dust);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= corr[i];
}

}  // namespace

std::vector<double> OrbitChain::ladder() const {
    std::vector<double> l;
    l.reserve(residuals.size());
    for (const auto& r : residuals) l.push_back(kernels::norm(r));
    return l;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::weak_limit_zero_trend: return "weak_limit_zero_trend";
        case Verdict::nonzero_weak_limit: return "nonzero_weak_limit";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::vector<HVector> build_orbit(const op::OperatorSpec& T, const HVector& x, std::size_t depth,
                                 bool include_x0) {
    require_seed(x, "build_orbit");
    if (depth == 0) throw InvalidInput("build_orbit: depth must be >= 1");
    if (depth > T.dim) throw InvalidInput("build_orbit: depth exceeds ambient dimension");
    if (x.size() != T.dim) throw InvalidInput("build_orbit: seed dimension mismatch");

    std::vector<HVector> orbit;
    orbit.reserve(depth + (include_x0 ? 1 : 0));
    if (include_x0) orbit.push_back(x);
    HVector v = x;
    for (std::size_t k = 1; k <= depth; ++k) {
        v = op::apply(T, v);
        const double nv = kernels::norm_sq(v);
        if (!std::isfinite(nv))
            throw NumericFailure("build_orbit: ||T^" + std::to_string(k) +
                                 " x|| overflowed; consider a rescaled chain");
        orbit.push_back(v);
    }
    return orbit;
}

OrbitChain third_claim_chain(const op::OperatorSpec& T, const HVector& x, std::size_t depth,
                             const gs::GSConfig& cfg) {
    require_seed(x, "third_claim_chain");
    if (depth == 0) throw InvalidInput("third_claim_chain: depth must be >= 1");
    if (depth > T.dim) throw InvalidInput("third_claim_chain: depth exceeds ambient dimension");
    if (x.size() != T.dim) throw InvalidInput("third_claim_chain: seed dimension mismatch");
    const ToleranceConfig& tol = cfg.thresholds;
    tol.validate();

    OrbitChain ch;
    ch.x = x;

    // Orbit with drift control: spans are what matter downstream, so any
    // vector whose norm leaves the safe window is replaced by its unit
    // rescale before the next application.
    HVector v = x;
    for (std::size_t k = 1; k <= depth; ++k) {
        v = op::apply(T, v);
        const double nv = kernels::norm(v);
        if (!std::isfinite(nv))
            throw NumericFailure("third_claim_chain: orbit overflow at step " + std::to_string(k));
        if (nv > 0.0 && (nv < kRescaleLow || nv > kRescaleHigh)) {
            for (auto& c : v) c /= nv;
            ++ch.rescale_count;
        }
        ch.orbit.push_back(v);
    }

    gs::OrthogonalizationOutcome gso = gs::orthogonalize(ch.orbit, cfg);
    ch.breakdown_index = gso.breakdown_index;
    for (double s : gso.span_residuals) ch.span_residual_max = std::max(ch.span_residual_max, s);

    std::vector<HVector> thetas = std::move(gso.system.vectors);
    for (auto& th : thetas) detail::phase_normalize(th);
    ch.theta = make_orthonormal_system(std::move(thetas));

    ch.a = project_coefficients(x, ch.theta, tol);

    const double xx = kernels::norm_sq(x);
    const double scale2 = std::max(1.0, xx);
    double energy = 0.0;
    bool directions_alive = true;
    HVector r = x;
    for (std::size_t n = 1; n <= ch.theta.count(); ++n) {
        std::span<const HVector> prefix(ch.theta.vectors.data(), n);
        ladder_step(r, prefix);
        ch.residuals.push_back(r);
        const double rn = kernels::norm(r);

        energy += std::norm(ch.a.values[n - 1]);
        ch.pythagoras_defect_max =
            std::max(ch.pythagoras_defect_max, std::abs(rn * rn - (xx - energy)) / scale2);

        HVector recon = kernels::combine(prefix, std::span<const cplx>(ch.a.values.data(), n));
        for (std::size_t i = 0; i < recon.size(); ++i) recon[i] = x[i] - (r[i] + recon[i]);
        ch.reconstruction_error_max = std::max(ch.reconstruction_error_max, kernels::norm(recon));

        if (directions_alive && rn > tol.breakdown_tol) {
            HVector y = r;
            for (auto& c : y) c /= rn;
            const std::vector<cplx> overlaps = kernels::coefficients(prefix, y);
            for (const cplx& o : overlaps)
                ch.tail_orthogonality_max = std::max(ch.tail_orthogonality_max, std::abs(o));
            ch.directions.push_back(std::move(y));
        } else {
            directions_alive = false;
        }
    }
    return ch;
}

CyclicityReport completeness_defect(const OrbitChain& chain, std::span<const HVector> probes,
                                    const ToleranceConfig& tol) {
    tol.validate();
    if (chain.theta.count() == 0)
        throw InvalidInput("completeness_defect: chain has no orthonormal vectors");

    CyclicityReport rep;
    rep.defect = kernels::norm(chain.residuals.back());
    rep.span_count = chain.theta.count();
    const std::size_t ambient = chain.theta.ambient_dim();
    rep.span_cap = ambient - ambient / 4;

    double worst_rel = 0.0;
    for (const HVector& z : probes) {
        detail::require_finite(z, "completeness_defect");
        if (z.size() != ambient) throw InvalidInput("completeness_defect: probe dimension mismatch");
        const double zz = kernels::norm_sq(z);
        const std::vector<cplx> c = kernels::coefficients(chain.theta.vectors, z);
        double en = 0.0;
        for (const cplx& cc : c) en += std::norm(cc);
        const double defect = zz - en;
        rep.probe_defects.push_back(defect);
        worst_rel = std::max(worst_rel, defect / std::max(1.0, zz));
    }

    const double xnorm = kernels::norm(chain.x);
    rep.dense_at_truncation = rep.defect <= kCollapseFloor * std::max(1.0, xnorm) &&
                              rep.span_count >= rep.span_cap && worst_rel <= kCollapseFloor;
    return rep;
}

WeakConvergenceReport weak_convergence_probe(const OrbitChain& chain, std::span<const HVector> probes,
                                             const ToleranceConfig& tol) {
    tol.validate();
    if (chain.directions.empty())
        throw InvalidInput(
            "weak_convergence_probe: no directions (every residual at or below breakdown_tol) — "
            "finite-dimensional saturation, nothing to probe");
    const std::size_t ambient = chain.theta.ambient_dim();

    WeakConvergenceReport rep;
    rep.probes.assign(probes.begin(), probes.end());
    const std::size_t steps = chain.directions.size();

    for (const HVector& z : probes) {
        detail::require_finite(z, "weak_convergence_probe");
        if (z.size() != ambient)
            throw InvalidInput("weak_convergence_probe: probe dimension mismatch");
        const double zz = kernels::norm_sq(z);
        if (zz == 0.0) throw InvalidInput("weak_convergence_probe: zero probe");

        std::vector<double> vals(steps), bounds(steps);
        const std::vector<cplx> tc = kernels::coefficients(chain.theta.vectors, z);
        double partial = 0.0;
        for (std::size_t n = 1; n <= steps; ++n) {
            partial += std::norm(tc[n - 1]);
            const double v = std::abs(kernels::dot(z, chain.directions[n - 1]));
            const double lhs = v * v + partial;
            if (lhs > zz * (1.0 + tol.eq_slack))
                throw InconsistencyError(
                    "weak_convergence_probe: master inequality violated at step " + std::to_string(n));
            rep.eq1_max_ratio = std::max(rep.eq1_max_ratio, lhs / zz);
            vals[n - 1] = v;
            bounds[n - 1] = std::sqrt(std::max(0.0, zz - partial));
        }
        double full = 0.0;
        for (const cplx& cc : tc) full += std::norm(cc);
        rep.completeness_defects.push_back(zz - full);
        rep.values.push_back(std::move(vals));
        rep.bessel_bounds.push_back(std::move(bounds));
    }

    // Ladder heuristic (the inequalities above are the guarantees).
    const std::vector<double> ladder = chain.ladder();
    const double end = ladder.back();
    const double scale = std::max(1.0, kernels::norm(chain.x));
    if (end <= kCollapseFloor * scale) {
        rep.verdict = Verdict::weak_limit_zero_trend;
    } else if (ladder.size() >= 2) {
        const double mid = ladder[(ladder.size() + 1) / 2 - 1];
        rep.verdict = (mid - end <= kStabilizationRatio * end) ? Verdict::nonzero_weak_limit
                                                               : Verdict::inconclusive;
    } else {
        rep.verdict = Verdict::inconclusive;
    }
    return rep;
}

VerdictRecord fourth_claim_verdict(const op::OperatorSpec& T, const HVector& x, std::size_t depth,
                                   std::span<const HVector> probes, const gs::GSConfig& cfg) {
    VerdictRecord rec;
    rec.chain = third_claim_chain(T, x, depth, cfg);
    rec.cyclicity = completeness_defect(rec.chain, probes, cfg.thresholds);
    rec.weak = weak_convergence_probe(rec.chain, probes, cfg.thresholds);
    rec.verdict = rec.weak.verdict;

    if (rec.verdict == Verdict::nonzero_weak_limit) {
        // Saturate the orbit span: continue to full ambient depth so that
        // applying T cannot step outside the certified span.  For shifts
        // probed at small depth this is what turns span(theta_1..theta_m)
        // (not invariant: T theta_m sticks out) into an invariant subspace.
        OrbitChain sat = (depth == T.dim) ? rec.chain : third_claim_chain(T, x, T.dim, cfg);
        op::SubspaceBasis basis{sat.theta};

        op::InvariantSubspaceReport cert;
        cert.invariance_residual = op::invariance_residual(T, basis, cfg.thresholds);
        cert.nontrivial = basis.count() >= 1 && basis.count() <= T.dim - 1;
        cert.basis = std::move(basis);

        double contain = 0.0;
        for (const HVector& th : rec.chain.theta.vectors)
            contain = std::max(contain, projection_residual(th, cert.basis.system, cfg.thresholds));
        rec.theta_containment_residual = contain;
        rec.invariant_subspace = std::move(cert);
    }
    return rec;
}

}  // namespace orbitlab::chain
