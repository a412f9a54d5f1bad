#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitlab {

using cplx = std::complex<double>;
using HVector = std::vector<cplx>;

/// Caller handed us something malformed: wrong dimensions, bad config,
/// values outside the documented domain.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numeric procedure could not produce a usable result (non-finite
/// intermediate, overflow, iteration failed to make progress).
class NumericFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Internal cross-check failed: two routes that must agree did not.
/// Indicates a bug or broken data, not a caller mistake.
class InconsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Numerical thresholds used across the library.  All comparisons against
/// exact identities go through one of these.
struct ToleranceConfig {
    double ortho_tol = 1e-10;          // certification bound for |<e_i,e_j> - delta_ij|
    double breakdown_tol = 1e-10;      // relative norm drop that counts as linear dependence
    double eq_slack = 1e-10;           // slack on equalities/inequalities that hold exactly in theory
    double reorthog_threshold = 0.70710678118654752;  // 1/sqrt(2); norm drop ratio that triggers a second pass

    void validate() const {
        if (!(ortho_tol > 0) || !(breakdown_tol > 0) || !(eq_slack > 0))
            throw InvalidInput("ToleranceConfig: tolerances must be positive");
        if (!(breakdown_tol < 1))
            throw InvalidInput("ToleranceConfig: breakdown_tol must be < 1");
        if (!(reorthog_threshold > 0) || !(reorthog_threshold < 1))
            throw InvalidInput("ToleranceConfig: reorthog_threshold must lie in (0,1)");
    }
};

/// Ambient space: the first `dim` coordinates of a square-summable
/// coefficient sequence.  Everything operates inside one of these.
struct HilbertModel {
    std::size_t dim = 0;
    ToleranceConfig tol;

    void validate() const {
        if (dim < 2)
            throw InvalidInput("HilbertModel: dim must be >= 2");
        tol.validate();
    }
};

namespace detail {

inline void require_finite(const HVector& v, const char* what) {
    for (const cplx& c : v) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw InvalidInput(std::string(what) + ": non-finite entry");
    }
}

inline void require_same_dim(const HVector& u, const HVector& v, const char* what) {
    if (u.size() != v.size())
        throw InvalidInput(std::string(what) + ": dimension mismatch (" +
                           std::to_string(u.size()) + " vs " + std::to_string(v.size()) + ")");
}

inline void require_nonempty(const HVector& v, const char* what) {
    if (v.empty())
        throw InvalidInput(std::string(what) + ": empty vector");
}

}  // namespace detail

}  // namespace orbitlab
