#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "orbitlab/chain.hpp"
#include "orbitlab/random.hpp"

using namespace orbitlab;
using op::OperatorSpec;

namespace {

HVector canonical(std::size_t dim, std::size_t idx1) {
    HVector e(dim, cplx(0, 0));
    e[idx1 - 1] = 1.0;
    return e;
}

std::vector<cplx> ramp(std::size_t n, double from, double to) {
    std::vector<cplx> entries(n);
    for (std::size_t i = 0; i < n; ++i)
        entries[i] = from + (to - from) * (n == 1 ? 0.0 : double(i) / double(n - 1));
    return entries;
}

// Distinct eigenvalues and an everywhere-nonzero seed: the orbit matrix is a
// scaled Vandermonde, so the first min(depth, dim) orbit vectors are independent.
chain::OrbitChain diag_chain(std::size_t dim, std::size_t depth) {
    const auto T = OperatorSpec::diagonal(ramp(dim, 1.0, 2.0));
    const HVector x(dim, cplx(1, 0));
    return chain::third_claim_chain(T, x, depth, gs::GSConfig{});
}

}  // namespace

TEST_CASE("build_orbit walks the shift along the canonical basis") {
    const auto T = OperatorSpec::unilateral_shift(6);
    const auto orbit = chain::build_orbit(T, canonical(6, 1), 3, false);
    REQUIRE(orbit.size() == 3);
    CHECK(orbit[0] == canonical(6, 2));
    CHECK(orbit[1] == canonical(6, 3));
    CHECK(orbit[2] == canonical(6, 4));

    const auto with_seed = chain::build_orbit(T, canonical(6, 1), 2, true);
    REQUIRE(with_seed.size() == 3);
    CHECK(with_seed[0] == canonical(6, 1));
    CHECK(with_seed[1] == canonical(6, 2));
}

TEST_CASE("build_orbit applies powers by iteration") {
    const auto T = OperatorSpec::diagonal({cplx(0.5, 0), cplx(2, 0), cplx(1, 1)});
    const HVector x(3, cplx(1, 0));
    const auto orbit = chain::build_orbit(T, x, 2, false);
    CHECK(orbit[0][0] == cplx(0.5, 0));
    CHECK(orbit[0][2] == cplx(1, 1));
    CHECK(orbit[1][0] == cplx(0.25, 0));
    CHECK(orbit[1][1] == cplx(4, 0));
    CHECK(orbit[1][2] == cplx(0, 2));  // (1+i)^2
}

TEST_CASE("build_orbit rejects bad input") {
    const auto T = OperatorSpec::unilateral_shift(4);
    CHECK_THROWS_AS((void)chain::build_orbit(T, HVector(4, cplx(0, 0)), 2, false), InvalidInput);
    CHECK_THROWS_AS((void)chain::build_orbit(T, canonical(4, 1), 0, false), InvalidInput);
    CHECK_THROWS_AS((void)chain::build_orbit(T, canonical(4, 1), 5, false), InvalidInput);
    CHECK_THROWS_AS((void)chain::build_orbit(T, canonical(3, 1), 2, false), InvalidInput);
}

TEST_CASE("shift seeded at e_1: thetas are shifted canonicals, ladder never moves") {
    const std::size_t dim = 8, depth = 5;
    const auto T = OperatorSpec::unilateral_shift(dim);
    const HVector x = canonical(dim, 1);
    const auto ch = chain::third_claim_chain(T, x, depth, gs::GSConfig{});

    REQUIRE(ch.theta.count() == depth);
    CHECK(!ch.breakdown_index.has_value());
    CHECK(ch.rescale_count == 0);

    for (std::size_t j = 0; j < depth; ++j) {
        const HVector want = canonical(dim, j + 2);
        for (std::size_t i = 0; i < dim; ++i)
            CHECK(std::abs(ch.theta.vectors[j][i] - want[i]) <= 1e-12);
        CHECK(std::abs(ch.a.values[j]) <= 1e-12);  // x is orthogonal to its own forward orbit
    }

    const auto ladder = ch.ladder();
    REQUIRE(ladder.size() == depth);
    for (double l : ladder) CHECK(l == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(ch.directions.size() == depth);
    for (const auto& y : ch.directions)
        for (std::size_t i = 0; i < dim; ++i) CHECK(std::abs(y[i] - x[i]) <= 1e-12);
}

TEST_CASE("diagonal chain saturates the whole space at full depth") {
    const std::size_t dim = 8;
    const auto ch = diag_chain(dim, dim);

    REQUIRE(ch.theta.count() == dim);
    CHECK(!ch.breakdown_index.has_value());

    // independent rank oracle on the raw orbit
    Eigen::MatrixXcd O(dim, dim);
    for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t r = 0; r < dim; ++r) O(Eigen::Index(r), Eigen::Index(c)) = ch.orbit[c][r];
    CHECK(Eigen::ColPivHouseholderQR<Eigen::MatrixXcd>(O).rank() == Eigen::Index(dim));

    // x lies in the saturated span, so the ladder collapses
    CHECK(ch.ladder().back() <= 1e-8);
    CHECK(ch.directions.size() < dim);  // dust directions are not emitted
}

TEST_CASE("chain certificates hold across operator kinds") {
    Rng rng(1234);
    std::vector<chain::OrbitChain> chains;
    chains.push_back(diag_chain(8, 8));
    chains.push_back(chain::third_claim_chain(OperatorSpec::unilateral_shift(16), canonical(16, 1),
                                              10, gs::GSConfig{}));
    {
        std::vector<cplx> w = ramp(12, 0.5, 1.0);
        chains.push_back(chain::third_claim_chain(OperatorSpec::weighted_shift(w),
                                                  rng.unit_vector(12), 8, gs::GSConfig{}));
    }
    {
        std::vector<cplx> m(10 * 10);
        for (auto& c : m) c = 0.3 * rng.gaussian_cplx();
        for (std::size_t i = 0; i < 10; ++i) m[i * 10 + i] += 2.0;
        chains.push_back(chain::third_claim_chain(OperatorSpec::dense(std::move(m), 10),
                                                  rng.unit_vector(10), 7, gs::GSConfig{}));
    }

    const ToleranceConfig tol;
    for (const auto& ch : chains) {
        const double xscale = std::max(1.0, kernels::norm(ch.x));
        CHECK(ch.reconstruction_error_max <= 1e-10 * xscale);
        CHECK(ch.pythagoras_defect_max <= 1e-10);
        CHECK(ch.tail_orthogonality_max <= 10.0 * tol.ortho_tol);
        CHECK(ch.theta.gram_defect <= tol.ortho_tol);

        const auto ladder = ch.ladder();
        for (std::size_t n = 1; n < ladder.size(); ++n)
            CHECK(ladder[n] <= ladder[n - 1] + 1e-12 * xscale);
        CHECK(ch.residuals.size() == ch.theta.count());
        CHECK(ch.directions.size() <= ch.residuals.size());
    }
}

TEST_CASE("completeness_defect separates cyclic from deficient spans") {
    SUBCASE("shift at shallow depth is nowhere near dense") {
        const auto T = OperatorSpec::unilateral_shift(8);
        const auto ch = chain::third_claim_chain(T, canonical(8, 1), 5, gs::GSConfig{});
        std::vector<HVector> probes = {canonical(8, 1), canonical(8, 2)};
        const auto rep = chain::completeness_defect(ch, probes);
        CHECK(rep.defect == doctest::Approx(1.0).epsilon(1e-12));  // x never enters span(theta)
        CHECK(rep.span_count == 5);
        CHECK(rep.span_cap == 6);
        CHECK(!rep.dense_at_truncation);
        CHECK(rep.probe_defects[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(rep.probe_defects[1]) <= 1e-12);  // e_2 = theta_1
    }

    SUBCASE("saturated diagonal chain is dense at truncation") {
        const std::size_t dim = 8;
        const auto ch = diag_chain(dim, dim);
        std::vector<HVector> probes;
        for (std::size_t j = 1; j <= dim; ++j) probes.push_back(canonical(dim, j));
        const auto rep = chain::completeness_defect(ch, probes);
        CHECK(rep.dense_at_truncation);
        CHECK(rep.span_count == dim);
        for (double d : rep.probe_defects) CHECK(std::abs(d) <= 1e-8);
    }

    SUBCASE("probe validation") {
        const auto ch = diag_chain(6, 4);
        std::vector<HVector> bad = {HVector(5, cplx(1, 0))};
        CHECK_THROWS_AS((void)chain::completeness_defect(ch, bad), InvalidInput);
    }
}

TEST_CASE("weak_convergence_probe tables and verdicts") {
    const std::size_t dim = 8, depth = 5;
    const auto T = OperatorSpec::unilateral_shift(dim);
    const auto ch = chain::third_claim_chain(T, canonical(dim, 1), depth, gs::GSConfig{});

    SUBCASE("probe along the persistent direction saturates its Bessel bound") {
        std::vector<HVector> probes = {canonical(dim, 1)};
        const auto rep = chain::weak_convergence_probe(ch, probes);
        REQUIRE(rep.values.size() == 1);
        for (std::size_t n = 0; n < rep.values[0].size(); ++n) {
            CHECK(rep.values[0][n] == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(rep.bessel_bounds[0][n] == doctest::Approx(1.0).epsilon(1e-12));
        }
        CHECK(rep.verdict == chain::Verdict::nonzero_weak_limit);
        CHECK(rep.eq1_max_ratio <= 1.0 + 1e-12);
        CHECK(rep.completeness_defects[0] == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("probe along theta_1 sees only orthogonality dust") {
        std::vector<HVector> probes = {ch.theta.vectors[0]};
        const auto rep = chain::weak_convergence_probe(ch, probes);
        for (double v : rep.values[0]) CHECK(v <= 1e-10);
    }

    SUBCASE("self-probe reproduces the residual ladder") {
        const auto dch = diag_chain(8, 8);
        std::vector<HVector> probes = {dch.x};
        const auto rep = chain::weak_convergence_probe(dch, probes);
        const auto ladder = dch.ladder();
        const double xscale = std::max(1.0, kernels::norm(dch.x));
        for (std::size_t n = 0; n < rep.values[0].size(); ++n) {
            // <x, y_n> = ||x_n|| because x - x_n lies in span(theta_1..theta_n)
            CHECK(std::abs(rep.values[0][n] - ladder[n]) <= 1e-10 * xscale);
            if (n > 0) CHECK(rep.values[0][n] <= rep.values[0][n - 1] + 1e-12 * xscale);
        }
        CHECK(rep.verdict == chain::Verdict::weak_limit_zero_trend);
    }

    SUBCASE("zero and mismatched probes are rejected") {
        std::vector<HVector> zero = {HVector(dim, cplx(0, 0))};
        CHECK_THROWS_AS((void)chain::weak_convergence_probe(ch, zero), InvalidInput);
        std::vector<HVector> wrong = {HVector(dim + 1, cplx(1, 0))};
        CHECK_THROWS_AS((void)chain::weak_convergence_probe(ch, wrong), InvalidInput);
    }

    SUBCASE("immediate saturation leaves nothing to probe") {
        const auto D = OperatorSpec::diagonal({cplx(1, 0), cplx(2, 0)});
        const auto sat = chain::third_claim_chain(D, canonical(2, 2), 1, gs::GSConfig{});
        REQUIRE(sat.directions.empty());  // x_1 = e_2 - <e_2,e_2>e_2 = 0
        std::vector<HVector> probes = {canonical(2, 1)};
        CHECK_THROWS_AS((void)chain::weak_convergence_probe(sat, probes), InvalidInput);
    }

    SUBCASE("a corrupted direction trips the master inequality") {
        auto broken = ch;
        for (auto& c : broken.directions[0]) c *= 2.0;  // ||y_1|| = 2 fakes |<z,y_1>| = 2
        std::vector<HVector> probes = {canonical(dim, 1)};
        CHECK_THROWS_AS((void)chain::weak_convergence_probe(broken, probes), InconsistencyError);
    }
}

TEST_CASE("fourth_claim_verdict certifies the saturated span in the nonzero regime") {
    const std::size_t dim = 8, depth = 5;
    const auto T = OperatorSpec::unilateral_shift(dim);
    const HVector x = canonical(dim, 1);
    std::vector<HVector> probes = {canonical(dim, 1), canonical(dim, 2)};

    const auto rec = chain::fourth_claim_verdict(T, x, depth, probes, gs::GSConfig{});
    CHECK(rec.verdict == chain::Verdict::nonzero_weak_limit);
    REQUIRE(rec.invariant_subspace.has_value());

    const auto& cert = *rec.invariant_subspace;
    CHECK(cert.nontrivial);
    CHECK(cert.basis.count() == dim - 1);  // e_2..e_dim: the shift saturates there
    CHECK(cert.invariance_residual <= 1e-10);
    CHECK(rec.theta_containment_residual <= 1e-10);

    // The probed-depth span alone would NOT be invariant: T theta_5 = e_7
    // sticks out entirely.  This is why the certificate saturates first.
    op::SubspaceBasis prefix{rec.chain.theta};
    CHECK(op::invariance_residual(T, prefix) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("fourth_claim_verdict reports collapse without a certificate") {
    const std::size_t dim = 8;
    const auto T = OperatorSpec::diagonal(ramp(dim, 1.0, 2.0));
    const HVector x(dim, cplx(1, 0));
    std::vector<HVector> probes = {canonical(dim, 1), x};

    const auto rec = chain::fourth_claim_verdict(T, x, dim, probes, gs::GSConfig{});
    CHECK(rec.verdict == chain::Verdict::weak_limit_zero_trend);
    CHECK(!rec.invariant_subspace.has_value());
    CHECK(rec.cyclicity.defect <= 1e-8);
}
