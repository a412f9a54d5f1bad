#pragma once

#include <span>
#include <vector>

#include "orbitlab/kernels.hpp"
#include "orbitlab/types.hpp"

namespace orbitlab {

/// Finite family e_1..e_m together with its measured Gram defect
/// max |<e_i,e_j> - delta_ij|.  A system is only treated as orthonormal
/// when the defect passes ortho_tol; operations that rely on
/// orthonormality check this and refuse otherwise.
struct OrthonormalSystem {
    std::vector<HVector> vectors;
    double gram_defect = 0.0;

    std::size_t count() const { return vectors.size(); }
    std::size_t ambient_dim() const { return vectors.empty() ? 0 : vectors.front().size(); }
    bool certified(const ToleranceConfig& tol) const { return gram_defect <= tol.ortho_tol; }
};

/// Builds the system and measures its defect.  Does not reject anything:
/// callers decide what defect they can live with.
OrthonormalSystem make_orthonormal_system(std::vector<HVector> vectors);

/// Coefficients a_j = <u, e_j> plus their energy sum |a_j|^2.
struct CoefficientSequence {
    std::vector<cplx> values;
    double energy = 0.0;
};

struct BesselReport {
    std::vector<double> partial_energies;  // running sums of |<u,e_j>|^2
    double norm_sq = 0.0;                  // ||u||^2
    double parseval_defect = 0.0;          // ||u||^2 - total energy (>= 0 up to slack)
    double expansion_residual = 0.0;       // ||u - sum <u,e_j> e_j||
};

cplx inner_product(const HVector& u, const HVector& v);
double norm(const HVector& u);

/// a_j = <u, theta_j>.  Requires a certified system matching u's dimension.
CoefficientSequence project_coefficients(const HVector& u, const OrthonormalSystem& theta,
                                         const ToleranceConfig& tol);

/// sum_j a_j theta_j.
HVector expand(const OrthonormalSystem& theta, const CoefficientSequence& a);

/// Energy ledger for u against theta: partial sums never exceed ||u||^2
/// (up to eq_slack), and the expansion residual ties the gap to the
/// coefficients via ||u - s||^2 = ||u||^2 - sum |a_j|^2.
BesselReport bessel_parseval_report(const HVector& u, const OrthonormalSystem& theta,
                                    const ToleranceConfig& tol);

/// u - sum_j <u,theta_j> theta_j, one direct pass.
HVector residual_vector(const HVector& u, const OrthonormalSystem& theta);

/// Distance from u to the span of theta, ||u - P u||.
double projection_residual(const HVector& u, const OrthonormalSystem& theta,
                           const ToleranceConfig& tol);

namespace detail {
/// Rejects operations against a system whose measured defect exceeds
/// ortho_tol, and dimension mismatches.
void require_certified(const OrthonormalSystem& theta, const ToleranceConfig& tol, const char* what);

/// Rotates v by a unit scalar so its largest-modulus coordinate becomes
/// real positive (ties broken by lowest index).  Canonical representative
/// of {c*v : |c|=1}; no-op on the zero vector.
void phase_normalize(HVector& v);
}  // namespace detail

}  // namespace orbitlab
