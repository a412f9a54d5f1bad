#pragma once

#include <optional>
#include <span>
#include <vector>

#include "orbitlab/hilbert.hpp"
#include "orbitlab/types.hpp"

namespace orbitlab::gs {

enum class Variant { classical, modified };

struct GSConfig {
    Variant variant = Variant::modified;
    bool reorthogonalize = true;
    ToleranceConfig thresholds;
};

/// Result of orthogonalizing u_1..u_m.
///
/// raw_orthogonal holds the unnormalized w_j (w_1 = u_1 exactly); system
/// holds e_j = w_j/||w_j|| with measured Gram defect.  breakdown_index is
/// the 1-based step k at which ||w_k|| <= breakdown_tol*||u_k||, the
/// working definition of "u_k was dependent on its predecessors"; steps
/// 1..k-1 are kept.  span_residuals[k] is the distance from u_{k+1} to
/// span(e_1..e_{k+1}), certifying that each prefix spans what it should.
struct OrthogonalizationOutcome {
    std::vector<HVector> raw_orthogonal;
    OrthonormalSystem system;
    std::optional<std::size_t> breakdown_index;
    std::vector<double> span_residuals;

    std::size_t completed_steps() const { return raw_orthogonal.size(); }
};

/// Gram-Schmidt over a finite family.
///
/// modified: w is updated in place against each w_j in turn.
/// classical: all correction coefficients are taken from the original u.
/// With reorthogonalize on, a step whose norm drops below
/// reorthog_threshold * ||u_k|| gets one second projection pass; a single
/// repeat is enough to restore orthogonality to roundoff for any family
/// that is not numerically dependent.
OrthogonalizationOutcome orthogonalize(std::span<const HVector> us, const GSConfig& cfg);

/// max over k <= n of the distance from u_k to span(e_1..e_n).  Near zero
/// it certifies span(u_1..u_n) = span(w_1..w_n); the reverse inclusion is
/// structural (each w_k is built as a combination of u_1..u_k).
double span_preservation_residual(std::span<const HVector> us, const OrthogonalizationOutcome& outcome,
                                  std::size_t n, const ToleranceConfig& tol = {});

}  // namespace orbitlab::gs
