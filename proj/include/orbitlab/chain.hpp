#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orbitlab/gram_schmidt.hpp"
#include "orbitlab/hilbert.hpp"
#include "orbitlab/operators.hpp"
#include "orbitlab/types.hpp"

namespace orbitlab::chain {

/// Orbit of a seed vector under an operator, orthonormalized, with the
/// residual ladder x_n = x - sum_{j<=n} <x,theta_j> theta_j and the unit
/// directions y_n = x_n/||x_n||.
///
/// theta vectors are phase-normalized (largest coordinate real positive)
/// so chains are reproducible across GS variants.  directions stops as
/// soon as ||x_n|| falls to breakdown_tol: from there on the direction of
/// the residual is numerical dust.
struct OrbitChain {
    HVector x;
    std::vector<HVector> orbit;       // T^1 x .. (unit-rescaled when norms drift, see rescale_count)
    OrthonormalSystem theta;
    CoefficientSequence a;            // a_j = <x, theta_j>
    std::vector<HVector> residuals;   // x_n, n = 1..theta.count()
    std::vector<HVector> directions;  // y_n while ||x_n|| > breakdown_tol
    std::optional<std::size_t> breakdown_index;  // orbit step where GS detected dependence
    std::size_t rescale_count = 0;

    // certificates accumulated while the ladder was built
    double pythagoras_defect_max = 0.0;     // | ||x_n||^2 - (||x||^2 - sum|a_j|^2) | / max(1,||x||^2)
    double reconstruction_error_max = 0.0;  // || x - (x_n + sum a_j theta_j) ||
    double tail_orthogonality_max = 0.0;    // max_{j<=n} |<y_n, theta_j>|
    double span_residual_max = 0.0;         // from the GS outcome

    std::vector<double> ladder() const;  // ||x_n||
};

enum class Verdict { weak_limit_zero_trend, nonzero_weak_limit, inconclusive };

std::string to_string(Verdict v);

struct WeakConvergenceReport {
    std::vector<HVector> probes;
    std::vector<std::vector<double>> values;         // |<z, y_n>| indexed [probe][n-1]
    std::vector<std::vector<double>> bessel_bounds;  // sqrt(max(0, ||z||^2 - sum_{j<=n}|<z,theta_j>|^2))
    std::vector<double> completeness_defects;        // per-probe Parseval defect at full theta depth
    Verdict verdict = Verdict::inconclusive;
    double eq1_max_ratio = 0.0;  // max over (z,n) of (|<z,y_n>|^2 + sum_{j<=n}|<z,theta_j>|^2)/||z||^2
};

struct CyclicityReport {
    double defect = 0.0;  // ||x_m|| at final depth = distance from x to span(theta)
    bool dense_at_truncation = false;
    std::vector<double> probe_defects;  // per-probe Parseval defect
    std::size_t span_count = 0;
    std::size_t span_cap = 0;  // ambient - ambient/4, the depth-margin cap
};

/// Verdict heuristics.  The hard guarantees are the inequality checks
/// (Pythagoras, tail orthogonality, the master inequality); these two
/// constants only label regimes in reports.
inline constexpr double kCollapseFloor = 1e-6;      // ladder end <= floor * max(1,||x||) => zero trend
inline constexpr double kStabilizationRatio = 0.1;  // mid-to-end ladder drop <= ratio * end => stabilized

/// (T^1 x, ..., T^depth x), with x prepended when include_x0.  Faithful
/// application: no rescaling, overflow raises.  Computed by repeated
/// application, never by matrix powers.
std::vector<HVector> build_orbit(const op::OperatorSpec& T, const HVector& x, std::size_t depth,
                                 bool include_x0);

/// Orthonormalizes the orbit and builds the residual ladder.  Orbit
/// vectors are rescaled to unit norm whenever ||T^k x|| leaves
/// [1e-12, 1e+12]; this changes no span and keeps GS in safe range.
/// GS breakdown at step k truncates the chain to k-1 completed steps and
/// records k: at finite truncation the orbit must eventually saturate its
/// span, so breakdown is expected, not an error.
OrbitChain third_claim_chain(const op::OperatorSpec& T, const HVector& x, std::size_t depth,
                             const gs::GSConfig& cfg);

/// Distance from x to span(theta) plus per-probe Parseval defects.
/// dense_at_truncation requires all three: the ladder collapsed, the span
/// reached the depth-margin cap, and every probe's defect is negligible.
CyclicityReport completeness_defect(const OrbitChain& chain, std::span<const HVector> probes,
                                    const ToleranceConfig& tol = {});

/// |<z,y_n>| tables against their Bessel bounds.  The master inequality
///   |<z,y_n>|^2 + sum_{j<=n} |<z,theta_j>|^2 <= ||z||^2 (1 + eq_slack)
/// is enforced for every probe and step; a violation throws
/// InconsistencyError.  The verdict is a labeled heuristic on the
/// residual ladder: collapse below kCollapseFloor => weak_limit_zero_trend;
/// a stabilized ladder (mid-to-end drop within kStabilizationRatio)
/// => nonzero_weak_limit; anything else => inconclusive.
WeakConvergenceReport weak_convergence_probe(const OrbitChain& chain, std::span<const HVector> probes,
                                             const ToleranceConfig& tol = {});

struct VerdictRecord {
    OrbitChain chain;
    CyclicityReport cyclicity;
    WeakConvergenceReport weak;
    Verdict verdict = Verdict::inconclusive;
    /// Present when the verdict is nonzero_weak_limit: certificate that the
    /// saturated orbit span is a nontrivial invariant subspace.  Built from
    /// a chain continued to full ambient depth so the span is closed under
    /// T including the step past the probed depth.
    std::optional<op::InvariantSubspaceReport> invariant_subspace;
    /// max distance of the probed chain's theta_j from the certificate span
    /// (certifies span(theta) is inside the certified subspace).
    double theta_containment_residual = 0.0;
};

/// Full pipeline: chain -> cyclicity -> weak-convergence tables -> verdict,
/// plus the invariant-subspace certificate in the nonzero regime.
VerdictRecord fourth_claim_verdict(const op::OperatorSpec& T, const HVector& x, std::size_t depth,
                                   std::span<const HVector> probes, const gs::GSConfig& cfg);

}  // namespace orbitlab::chain
