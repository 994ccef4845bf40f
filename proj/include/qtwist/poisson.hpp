#pragma once

// Mellin transforms, the contour kernel W~_b, Gauss sums and the Poisson
// summation identity for smoothed quadratic character sums mod a prime.

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "qtwist/testfn.hpp"

namespace qtwist::poisson {

using complex = std::complex<double>;
using testfn::SmoothCompactFunction;

/// Vertical line Re u = c, truncated to |Im u| <= heightMax, trapezoid step.
struct MellinContour {
    double c = 1.25;
    double heightMax = 1000.0;
    double step = 0.05;

    /// Throws PreconditionError unless c > 1 and heightMax/step is an integer >= 100.
    void validate() const;
    std::int64_t half_points() const;
};

/// chi = (./q) for an odd prime q, with chi(-1) = (-1)^parity.
struct QuadraticCharacter {
    std::uint64_t q = 3;
    int parity = 1;

    static QuadraticCharacter legendre(std::uint64_t q);  // PreconditionError unless q is an odd prime
    int operator()(std::int64_t n) const;
};

bool is_prime(std::uint64_t n) noexcept;

/// log Gamma(z) for z off the non-positive integers (Lanczos, g = 7).
/// Only the exponential is meaningful: the branch is not the principal one.
complex log_gamma(complex z);

/// int_0^inf W(t) t^{s-1} dt by adaptive Gauss-Kronrod to absolute tolerance tol.
complex mellin(const SmoothCompactFunction& W, complex s, double tol = 1e-12);

/// Samples of MW(1 - u) on u = c + i tau, tau = j step, |j| <= heightMax/step.
/// Computed with a trapezoid rule in v = log t, which converges faster than
/// any power for smooth compactly supported W.
class ContourSamples {
public:
    ContourSamples(const SmoothCompactFunction& W, MellinContour contour);

    const MellinContour& contour() const noexcept { return contour_; }
    std::int64_t half_points() const noexcept { return half_; }
    /// MW(1 - c - i tau_j) for j in [-half, half].
    complex at(std::int64_t j) const { return values_[static_cast<std::size_t>(j + half_)]; }

private:
    MellinContour contour_;
    std::int64_t half_;
    std::vector<complex> values_;
};

/// W~_b(x) = (1/2 pi i) int_(c) MW(1-u) x^{-u} pi^{-(2u-1)/2}
///           Gamma((u+b)/2) / Gamma((1-u+b)/2) du.
class WTildeKernel {
public:
    struct Evaluation {
        double value = 0.0;
        double imagResidue = 0.0;   // imaginary part left by the quadrature
        double tailEstimate = 0.0;  // |integrand| mass in the outer tenth of the contour
    };

    static constexpr double kTailTolerance = 1e-9;

    WTildeKernel(std::shared_ptr<const ContourSamples> samples, int b);
    WTildeKernel(const SmoothCompactFunction& W, int b, MellinContour contour);

    int parity() const noexcept { return b_; }
    const MellinContour& contour() const noexcept { return samples_->contour(); }

    /// Full evaluation with diagnostics. Requires x > 0; throws AccuracyError
    /// when the tail estimate exceeds kTailTolerance.
    Evaluation evaluate(double x) const;
    double operator()(double x) const { return evaluate(x).value; }

private:
    std::shared_ptr<const ContourSamples> samples_;
    int b_;
    std::vector<complex> kernel_;  // MW(1-u) pi^{-(2u-1)/2} Gamma ratio, j in [-half, half]
    std::vector<double> tailMass_; // sum of |kernel| over |j| >= 0.9 half, times step/(2 pi)
};

/// Kernels for both parities sharing one set of Mellin samples.
class DualKernels {
public:
    DualKernels(const SmoothCompactFunction& W, MellinContour contour);
    const WTildeKernel& for_parity(int b) const { return b == 0 ? even_ : odd_; }
    const SmoothCompactFunction& weight() const noexcept { return W_; }

private:
    SmoothCompactFunction W_;
    std::shared_ptr<const ContourSamples> samples_;
    WTildeKernel even_;
    WTildeKernel odd_;
};

/// One-off evaluation of W~_b(x); builds the kernel each call.
double w_tilde(const SmoothCompactFunction& W, int b, double x, MellinContour contour = {});

/// tau(chi) = sum_{1 <= x <= q} (x/q) e(x/q) for an odd prime q <= 10^6.
complex gauss_sum(std::uint64_t q);

struct PoissonCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    std::int64_t mTerms = 0;
    double tailEnvelope = 0.0;  // min(1, x^{-4}) style bound on the dropped m-tail
};

/// sum_n chi(n) W(n/X), a finite sum.
double direct_character_sum(const QuadraticCharacter& chi, const SmoothCompactFunction& W, double X);

/// (X/sqrt q) sum_{m >= 1} chi(m) W~_b(mX/q), truncated once the kernel has
/// decayed; b is normally chi.parity.
PoissonCheck dual_character_sum(const QuadraticCharacter& chi, const WTildeKernel& kernel, double X);

/// Both sides of sum_n chi(n) W(n/X) = (X/sqrt q) sum_m chi(m) W~_a(mX/q).
PoissonCheck poisson_check(std::uint64_t q, const SmoothCompactFunction& W, double X,
                           MellinContour contour = {});
PoissonCheck poisson_check(std::uint64_t q, const DualKernels& kernels, double X);

/// sum over odd d of (d/p) W(d alpha^2 / X), evaluated as the difference of two
/// dual sums at scales X/alpha^2 and X/(2 alpha^2). Requires gcd(alpha, 2p) = 1.
double odd_restricted_dual(std::uint64_t p, const SmoothCompactFunction& W, double X,
                           std::uint64_t alpha, MellinContour contour = {});
double odd_restricted_dual(std::uint64_t p, const DualKernels& kernels, double X, std::uint64_t alpha);

/// The same odd-restricted sum by direct summation.
double odd_restricted_direct(std::uint64_t p, const SmoothCompactFunction& W, double X,
                             std::uint64_t alpha);

}  // namespace qtwist::poisson
