#include <doctest.h>

#include <cmath>

#include "orbitlab/gram_schmidt.hpp"
#include "orbitlab/hilbert.hpp"
#include "orbitlab/random.hpp"

using namespace orbitlab;

namespace {

OrthonormalSystem canonical_system(std::size_t dim, std::size_t count) {
    std::vector<HVector> vs;
    for (std::size_t i = 0; i < count; ++i) {
        HVector e(dim, cplx(0, 0));
        e[i] = 1.0;
        vs.push_back(e);
    }
    return make_orthonormal_system(std::move(vs));
}

OrthonormalSystem random_system(std::size_t dim, std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<HVector> vs;
    for (std::size_t i = 0; i < count; ++i) vs.push_back(rng.gaussian_vector(dim));
    return gs::orthogonalize(vs, gs::GSConfig{}).system;
}

}  // namespace

TEST_CASE("inner product matches hand-computed values") {
    // <(1+i,2),(1,-i)> = (1+i)*1 + 2*conj(-i) = 1+3i
    const HVector u = {cplx(1, 1), cplx(2, 0)};
    const HVector v = {cplx(1, 0), cplx(0, -1)};
    const cplx r = inner_product(u, v);
    CHECK(r.real() == doctest::Approx(1.0));
    CHECK(r.imag() == doctest::Approx(3.0));

    CHECK(inner_product({cplx(1, 0), cplx(0, 0)}, {cplx(0, 0), cplx(1, 0)}) == cplx(0, 0));

    const cplx iu = inner_product({cplx(0, 1), cplx(0, 0)}, {cplx(1, 0), cplx(0, 0)});
    CHECK(iu == cplx(0, 1));
    const cplx ui = inner_product({cplx(1, 0), cplx(0, 0)}, {cplx(0, 1), cplx(0, 0)});
    CHECK(ui == cplx(0, -1));
}

TEST_CASE("norm basics") {
    CHECK(norm({cplx(0, 0), cplx(0, 0), cplx(0, 0)}) == 0.0);
    CHECK(norm({cplx(3, 0), cplx(0, 4)}) == doctest::Approx(5.0));
    HVector e3(8, cplx(0, 0));
    e3[2] = 1.0;
    CHECK(norm(e3) == 1.0);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS((void)inner_product({cplx(1, 0)}, {cplx(1, 0), cplx(0, 0)}), InvalidInput);
    CHECK_THROWS_AS((void)norm(HVector{}), InvalidInput);
    HVector bad = {cplx(std::nan(""), 0)};
    CHECK_THROWS_AS((void)norm(bad), InvalidInput);

    // a visibly non-orthonormal family must be rejected by projection ops
    OrthonormalSystem skew = make_orthonormal_system({{cplx(1, 0), cplx(0, 0)}, {cplx(1, 0), cplx(1, 0)}});
    CHECK(skew.gram_defect > 0.5);
    ToleranceConfig tol;
    CHECK_THROWS_AS((void)project_coefficients({cplx(1, 0), cplx(0, 0)}, skew, tol), InvalidInput);
    CHECK_THROWS_AS((void)bessel_parseval_report({cplx(1, 0), cplx(0, 0)}, skew, tol), InvalidInput);
}

TEST_CASE("make_orthonormal_system rejects ragged and oversized families") {
    CHECK_THROWS_AS(make_orthonormal_system({{cplx(1, 0)}, {cplx(1, 0), cplx(0, 0)}}), InvalidInput);
    CHECK_THROWS_AS(make_orthonormal_system({{cplx(1, 0)}, {cplx(0, 1)}}), InvalidInput);  // 2 in dim 1
    CHECK(canonical_system(4, 4).gram_defect == 0.0);
}

TEST_CASE("projection and expansion round trips") {
    ToleranceConfig tol;
    const OrthonormalSystem sys = canonical_system(5, 2);

    HVector e2(5, cplx(0, 0));
    e2[1] = 1.0;
    const CoefficientSequence a = project_coefficients(e2, sys, tol);
    CHECK(a.values[0] == cplx(0, 0));
    CHECK(a.values[1] == cplx(1, 0));
    CHECK(a.energy == doctest::Approx(1.0));

    CoefficientSequence alpha;
    alpha.values = {cplx(1, 0), cplx(0, 1)};
    const HVector x = expand(sys, alpha);
    CHECK(x[0] == cplx(1, 0));
    CHECK(x[1] == cplx(0, 1));
    CHECK(x[2] == cplx(0, 0));

    // u=(1,1)/sqrt(2) against (e1): coefficient 1/sqrt(2)
    const double s = 1.0 / std::sqrt(2.0);
    const CoefficientSequence c =
        project_coefficients({cplx(s, 0), cplx(s, 0)}, canonical_system(2, 1), tol);
    CHECK(c.values[0].real() == doctest::Approx(s));

    CHECK_THROWS_AS((void)expand(sys, CoefficientSequence{{cplx(1, 0)}, 1.0}), InvalidInput);
}

TEST_CASE("coefficient recovery through a random orthonormal system") {
    ToleranceConfig tol;
    Rng rng(99);
    const OrthonormalSystem sys = random_system(16, 8, 311);
    REQUIRE(sys.certified(tol));

    for (int trial = 0; trial < 20; ++trial) {
        CoefficientSequence alpha;
        alpha.values.resize(sys.count());
        for (auto& c : alpha.values) c = rng.gaussian_cplx();
        const HVector u = expand(sys, alpha);
        const CoefficientSequence back = project_coefficients(u, sys, tol);
        for (std::size_t j = 0; j < alpha.values.size(); ++j)
            CHECK(std::abs(back.values[j] - alpha.values[j]) <= 1e-12);

        // Pythagoras on the expansion
        double energy = 0.0;
        for (const auto& c : alpha.values) energy += std::norm(c);
        CHECK(kernels::norm_sq(u) == doctest::Approx(energy).epsilon(1e-12));
    }
}

TEST_CASE("cauchy-schwarz and linearity on random samples") {
    ToleranceConfig tol;
    Rng rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        const HVector u = rng.gaussian_vector(24);
        const HVector v = rng.gaussian_vector(24);
        const HVector w = rng.gaussian_vector(24);
        CHECK(std::abs(inner_product(u, v)) <= norm(u) * norm(v) * (1.0 + tol.eq_slack));

        const cplx a = rng.gaussian_cplx(), b = rng.gaussian_cplx();
        HVector au_bw(24);
        for (std::size_t i = 0; i < 24; ++i) au_bw[i] = a * u[i] + b * w[i];
        const cplx lhs = inner_product(au_bw, v);
        const cplx rhs = a * inner_product(u, v) + b * inner_product(w, v);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("bessel and parseval diagnostics") {
    ToleranceConfig tol;
    const OrthonormalSystem sys = random_system(20, 6, 5150);
    REQUIRE(sys.certified(tol));

    SUBCASE("member of the system") {
        const BesselReport rep = bessel_parseval_report(sys.vectors[0], sys, tol);
        CHECK(rep.partial_energies.back() == doctest::Approx(1.0));
        CHECK(std::abs(rep.parseval_defect) <= 1e-12);
        CHECK(rep.expansion_residual <= 1e-7);  // sqrt of an O(1e-15) defect
    }

    SUBCASE("vector orthogonal to the span") {
        // residual of a random vector against the system lies outside the span
        Rng rng(77);
        HVector u = rng.gaussian_vector(20);
        u = residual_vector(u, sys);
        const BesselReport rep = bessel_parseval_report(u, sys, tol);
        CHECK(rep.partial_energies.back() <= 1e-12 * rep.norm_sq);
        CHECK(rep.parseval_defect == doctest::Approx(rep.norm_sq).epsilon(1e-10));
    }

    SUBCASE("random vectors: ledger laws") {
        Rng rng(31337);
        for (int trial = 0; trial < 50; ++trial) {
            const HVector u = rng.gaussian_vector(20);
            const BesselReport rep = bessel_parseval_report(u, sys, tol);
            for (std::size_t i = 1; i < rep.partial_energies.size(); ++i)
                CHECK(rep.partial_energies[i] >= rep.partial_energies[i - 1] - 1e-15);
            CHECK(rep.partial_energies.back() <= rep.norm_sq * (1.0 + tol.eq_slack));
            CHECK(std::abs(rep.parseval_defect - rep.expansion_residual * rep.expansion_residual) <=
                  tol.eq_slack * std::max(1.0, rep.norm_sq));
        }
    }
}

TEST_CASE("projection residual") {
    ToleranceConfig tol;
    const OrthonormalSystem sys = canonical_system(5, 2);

    HVector u(5, cplx(0, 0));
    u[0] = 1.0;
    u[1] = 1.0;  // theta1 + theta2
    CHECK(projection_residual(u, sys, tol) <= 1e-15);

    HVector e3(5, cplx(0, 0));
    e3[2] = 1.0;
    CHECK(projection_residual(e3, sys, tol) == doctest::Approx(1.0));

    const OrthonormalSystem rsys = random_system(16, 8, 808);
    Rng rng(11);
    CoefficientSequence alpha;
    alpha.values.resize(rsys.count());
    for (auto& c : alpha.values) c = rng.gaussian_cplx();
    CHECK(projection_residual(expand(rsys, alpha), rsys, tol) <= 1e-10);

    // empty system: the projection is zero, the residual is the norm
    CHECK(projection_residual(e3, OrthonormalSystem{}, tol) == doctest::Approx(1.0));
}
