#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qtwist/errors.hpp"
#include "qtwist/poisson.hpp"
#include "qtwist/testfn.hpp"

using namespace qtwist;
using namespace qtwist::poisson;

namespace {

constexpr double kPi = std::numbers::pi;

const testfn::SmoothCompactFunction& bump() {
    static const auto w = testfn::bump_weight(1.0, 2.0);
    return w;
}

const DualKernels& kernels() {
    static const DualKernels k(bump(), MellinContour{});
    return k;
}

double direct_oracle(std::uint64_t q, double X) {
    long double s = 0.0L;
    for (std::int64_t n = 1; n <= static_cast<std::int64_t>(2 * X) + 1; ++n)
        s += oracle::euler(n, q) * bump()(static_cast<double>(n) / X);
    return static_cast<double>(s);
}

}  // namespace

TEST_CASE("contour validation") {
    CHECK_NOTHROW(MellinContour{}.validate());
    CHECK(MellinContour{}.half_points() == 20000);
    CHECK_THROWS_AS((MellinContour{1.0, 1000.0, 0.05}.validate()), PreconditionError);
    CHECK_THROWS_AS((MellinContour{0.5, 1000.0, 0.05}.validate()), PreconditionError);
    CHECK_THROWS_AS((MellinContour{1.25, 1000.0, 0.03}.validate()), PreconditionError);
    CHECK_THROWS_AS((MellinContour{1.25, 4.0, 0.05}.validate()), PreconditionError);
    CHECK_THROWS_AS((MellinContour{1.25, 80.0, 0.0}.validate()), PreconditionError);
    CHECK_NOTHROW((MellinContour{1.25, 5.0, 0.05}.validate()));
}

TEST_CASE("quadratic character parity and values") {
    for (std::uint64_t q = 3; q < 300; q += 2) {
        if (!oracle::is_prime(q)) {
            CHECK_THROWS_AS(QuadraticCharacter::legendre(q), PreconditionError);
            continue;
        }
        const auto chi = QuadraticCharacter::legendre(q);
        CHECK(chi.parity == ((q % 4 == 1) ? 0 : 1));
        CHECK(chi(-1) == (chi.parity == 0 ? 1 : -1));
        for (std::int64_t n = -50; n < 50; ++n) REQUIRE(chi(n) == oracle::euler(n, q));
    }
    CHECK_THROWS_AS(QuadraticCharacter::legendre(2), PreconditionError);
    for (std::uint64_t n = 0; n < 2000; ++n) REQUIRE(is_prime(n) == oracle::is_prime(n));
}

TEST_CASE("log_gamma") {
    for (double x : {0.1, 0.5, 1.0, 2.5, 7.0, 33.3, 170.5}) CHECK(log_gamma(x).real() == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
    for (double x : {-0.5, -1.5, -2.7}) CHECK(log_gamma(x).real() == doctest::Approx(std::lgamma(x)).epsilon(1e-12));
    // |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
    for (double t : {0.5, 3.0, 20.0, 200.0}) {
        const double expected = 0.5 * (std::log(kPi) - (kPi * t + std::log1p(std::exp(-2 * kPi * t)) - std::log(2.0)));
        CHECK(log_gamma({0.5, t}).real() == doctest::Approx(expected).epsilon(1e-12));
    }
    // Gamma(z + 1) = z Gamma(z) across the reflection boundary
    for (complex z : {complex(0.3, 2.0), complex(-0.4, 7.0), complex(-2.6, -1.0), complex(1.7, 450.0)}) {
        const complex ratio = std::exp(log_gamma(z + 1.0) - log_gamma(z));
        CHECK(std::abs(ratio - z) <= 1e-12 * std::abs(z));
    }
    CHECK_THROWS_AS(log_gamma(0.0), PreconditionError);
    CHECK_THROWS_AS(log_gamma(-3.0), PreconditionError);
}

TEST_CASE("mellin transform") {
    const auto& w = bump();
    CHECK(std::abs(mellin(w, 1.0) - w.integral()) <= 1e-10);
    const long double second = oracle::simpson([&](long double t) { return t * w(static_cast<double>(t)); }, 1.0L, 2.0L, 200000);
    CHECK(std::abs(mellin(w, 2.0) - static_cast<double>(second)) <= 1e-10);
    const double c = 1.25;
    const double base = std::abs(mellin(w, c));
    CHECK(std::abs(mellin(w, complex(c, 40.0))) <= 2e-2 * base);
    CHECK(std::abs(mellin(w, complex(c, 400.0))) <= 1e-8 * base);
    CHECK(std::abs(mellin(w, complex(c, 40.0))) > std::abs(mellin(w, complex(c, 400.0))));
}

TEST_CASE("contour samples match adaptive Mellin transforms") {
    const ContourSamples samples(bump(), MellinContour{});
    for (std::int64_t j : {0, 1, -1, 200, -200, 2000, 10000, -20000}) {
        const double tau = static_cast<double>(j) * 0.05;
        const complex expected = mellin(bump(), complex(1.0 - 1.25, -tau));
        CHECK_MESSAGE(std::abs(samples.at(j) - expected) <= 1e-12, "j=" << j);
    }
}

TEST_CASE("w_tilde argument contracts") {
    const auto& k = kernels().for_parity(0);
    CHECK_THROWS_AS(k.evaluate(0.0), PreconditionError);
    CHECK_THROWS_AS(k.evaluate(-1.0), PreconditionError);
    CHECK_THROWS_AS(WTildeKernel(bump(), 2, MellinContour{}), PreconditionError);
    CHECK(kernels().for_parity(1).parity() == 1);
}

TEST_CASE("w_tilde decays and is resolution independent") {
    const double v = w_tilde(bump(), 0, 50.0);
    CHECK(std::fabs(v) <= 1e-6);
    const MellinContour fine{1.25, 1000.0, 0.025};
    for (int b : {0, 1})
        for (double x : {0.3, 1.0, 5.0, 50.0}) {
            const WTildeKernel coarse(bump(), b, MellinContour{});
            const WTildeKernel dense(bump(), b, fine);
            CHECK(std::fabs(coarse(x) - dense(x)) <= 1e-9);
        }
}

TEST_CASE("w_tilde is real") {
    for (int b : {0, 1})
        for (double x : {0.1, 1.0, 10.0}) CHECK(std::fabs(kernels().for_parity(b).evaluate(x).imagResidue) <= 1e-9);
}

TEST_CASE("w_tilde does not depend on the contour abscissa") {
    const DualKernels other(bump(), MellinContour{1.75, 1000.0, 0.05});
    const DualKernels third(bump(), MellinContour{1.4, 1000.0, 0.05});
    for (int b : {0, 1})
        for (double x : {0.2, 0.5, 1.0, 3.0, 10.0}) {
            const double v = kernels().for_parity(b)(x);
            CHECK(std::fabs(v - other.for_parity(b)(x)) <= 1e-8);
            CHECK(std::fabs(v - third.for_parity(b)(x)) <= 1e-8);
        }
}

TEST_CASE("a short contour is rejected by the tail estimate") {
    const WTildeKernel k(bump(), 0, MellinContour{1.25, 10.0, 0.05});
    CHECK_THROWS_AS(k.evaluate(1.0), AccuracyError);
    try {
        k.evaluate(1.0);
    } catch (const AccuracyError& e) {
        CHECK(e.achieved() > 1e-9);
    }
}

TEST_CASE("gauss sums") {
    const complex g3 = gauss_sum(3);
    CHECK(std::abs(g3 - complex(0.0, std::sqrt(3.0))) <= 1e-12);
    const complex two_terms = std::polar(1.0, 2 * kPi / 3) - std::polar(1.0, 4 * kPi / 3);
    CHECK(std::abs(g3 - two_terms) <= 1e-14);
    CHECK(std::abs(gauss_sum(5) - std::sqrt(5.0)) <= 1e-12);
    CHECK(std::abs(gauss_sum(17) - std::sqrt(17.0)) <= 1e-10);
    CHECK_THROWS_AS(gauss_sum(15), PreconditionError);
    CHECK_THROWS_AS(gauss_sum(1000003), PreconditionError);
    for (std::uint64_t q = 3; q < 3000; q += 2) {
        if (!oracle::is_prime(q)) continue;
        const double r = std::sqrt(static_cast<double>(q));
        const complex expected = q % 4 == 1 ? complex(r, 0.0) : complex(0.0, r);
        REQUIRE(std::abs(gauss_sum(q) - expected) <= 1e-9 * r);
    }
}

TEST_CASE("direct character sum matches the oracle") {
    for (std::uint64_t q : {3, 5, 7, 13})
        for (double X : {5.0, 10.0, 77.7}) {
            const auto chi = QuadraticCharacter::legendre(q);
            CHECK(std::fabs(direct_character_sum(chi, bump(), X) - direct_oracle(q, X)) <= 1e-13);
        }
}

TEST_CASE("poisson identity examples") {
    const auto a = poisson_check(3, kernels(), 10.0);
    CHECK(std::fabs(a.lhs - a.rhs) <= 1e-6);
    CHECK(a.mTerms >= 3);
    const auto b = poisson_check(7, kernels(), 5.0);
    CHECK(std::fabs(b.lhs - b.rhs) <= 1e-6);
    CHECK(std::fabs(b.lhs - direct_oracle(7, 5.0)) <= 1e-13);
}

TEST_CASE("poisson identity across moduli and scales") {
    for (std::uint64_t q : {3, 5, 7, 11, 13, 17, 19, 23, 29, 101})
        for (double X : {5.0, 7.5, 50.0, 120.0}) {
            const auto r = poisson_check(q, kernels(), X);
            CHECK_MESSAGE(std::fabs(r.lhs - r.rhs) <= 1e-6, "q=" << q << " X=" << X);
        }
    const auto r = poisson_check(11, bump(), 20.0, MellinContour{1.6, 1000.0, 0.05});
    CHECK(std::fabs(r.lhs - r.rhs) <= 1e-6);
}

TEST_CASE("the wrong parity breaks the identity") {
    for (std::uint64_t q : {5, 7, 13}) {
        const auto chi = QuadraticCharacter::legendre(q);
        const double lhs = direct_character_sum(chi, bump(), 5.0);
        const double wrong = dual_character_sum(chi, kernels().for_parity(1 - chi.parity), 5.0).rhs;
        CHECK(std::fabs(lhs - wrong) > 1e-3);
    }
}

TEST_CASE("odd-restricted sums through the dual side") {
    CHECK(std::fabs(odd_restricted_dual(3, kernels(), 1000.0, 1) - odd_restricted_direct(3, bump(), 1000.0, 1)) <= 1e-6);
    CHECK(std::fabs(odd_restricted_dual(5, kernels(), 1000.0, 3) - odd_restricted_direct(5, bump(), 1000.0, 3)) <= 1e-6);
    for (std::uint64_t p : {3, 5, 7, 11})
        for (std::uint64_t alpha : {1, 3, 5, 7, 13})
            for (double X : {100.0, 1000.0, 3000.0}) {
                if (alpha % p == 0) continue;
                const double d = odd_restricted_dual(p, kernels(), X, alpha);
                const double e = odd_restricted_direct(p, bump(), X, alpha);
                CHECK_MESSAGE(std::fabs(d - e) <= 1e-6, "p=" << p << " alpha=" << alpha << " X=" << X);
            }
    CHECK_THROWS_AS(odd_restricted_dual(3, kernels(), 1000.0, 3), PreconditionError);
    CHECK_THROWS_AS(odd_restricted_dual(5, kernels(), 1000.0, 2), PreconditionError);
    CHECK_THROWS_AS(odd_restricted_direct(7, bump(), 1000.0, 21), PreconditionError);
}

TEST_CASE("odd-restricted direct sum matches the oracle") {
    const double X = 1000.0;
    for (std::uint64_t p : {3, 5, 7})
        for (std::uint64_t alpha : {1, 11}) {
            long double s = 0.0L;
            for (std::uint64_t d = 1; d < 2 * X; d += 2)
                s += oracle::euler(static_cast<std::int64_t>(d), p) * bump()(static_cast<double>(d * alpha * alpha) / X);
            CHECK(std::fabs(odd_restricted_direct(p, bump(), X, alpha) - static_cast<double>(s)) <= 1e-12);
        }
}
