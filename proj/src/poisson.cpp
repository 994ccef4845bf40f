#include "qtwist/poisson.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "qtwist/arith.hpp"
#include "qtwist/compensated_sum.hpp"
#include "qtwist/errors.hpp"
#include "qtwist/quadrature.hpp"

namespace qtwist::poisson {

namespace {

constexpr double kPi = std::numbers::pi;

// Stop the dual m-sum after this many consecutive negligible kernel values.
constexpr int kNegligibleRun = 3;
constexpr double kNegligibleRatio = 1e-12;
constexpr std::int64_t kMaxDualTerms = 10'000'000;

// Lanczos coefficients, g = 7, n = 9.
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

}  // namespace

void MellinContour::validate() const {
    if (!(c > 1.0)) throw PreconditionError("contour: c must exceed 1, got " + std::to_string(c));
    if (!(step > 0.0) || !(heightMax > 0.0))
        throw PreconditionError("contour: height and step must be positive");
    const double ratio = heightMax / step;
    if (std::fabs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 100)
        throw PreconditionError("contour: heightMax/step must be an integer >= 100");
}

std::int64_t MellinContour::half_points() const {
    return static_cast<std::int64_t>(std::llround(heightMax / step));
}

bool is_prime(std::uint64_t n) noexcept {
    if (n < 2) return false;
    for (std::uint64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

QuadraticCharacter QuadraticCharacter::legendre(std::uint64_t q) {
    if (q < 3 || !is_prime(q))
        throw PreconditionError("quadratic character needs an odd prime modulus, got " + std::to_string(q));
    // (-1/q) = (-1)^{(q-1)/2}
    return {q, (q & 3) == 1 ? 0 : 1};
}

int QuadraticCharacter::operator()(std::int64_t n) const {
    const auto m = static_cast<std::int64_t>(q);
    std::int64_t r = n % m;
    if (r < 0) r += m;
    return arith::jacobi(static_cast<std::uint64_t>(r), q);
}

complex log_gamma(complex z) {
    complex shift = 0.0;
    while (z.real() < 0.5) {
        if (std::abs(z) == 0.0 || (z.imag() == 0.0 && z.real() == std::round(z.real())))
            throw PreconditionError("log_gamma: pole at a non-positive integer");
        shift -= std::log(z);
        z += 1.0;
    }
    z -= 1.0;
    complex x = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + static_cast<double>(i));
    const complex t = z + 7.5;
    return shift + 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

complex mellin(const SmoothCompactFunction& W, complex s, double tol) {
    const complex e = s - 1.0;
    auto f = [&W, e](double t) { return W(t) * std::exp(e * std::log(t)); };
    return quad::integrate(f, W.a(), W.b(), tol, 32);
}

ContourSamples::ContourSamples(const SmoothCompactFunction& W, MellinContour contour)
    : contour_(contour) {
    contour_.validate();
    half_ = contour_.half_points();

    const double va = std::log(W.a());
    const double vb = std::log(W.b());
    const double len = vb - va;
    // Aliasing of the log-variable trapezoid sits at multiples of 2 pi / h;
    // keep the first alias ~2000 above the contour height.
    const auto nodes = std::max<std::int64_t>(
        1024, static_cast<std::int64_t>(std::ceil(len * (contour_.heightMax + 2000.0) / kPi)));
    const double h = len / static_cast<double>(nodes);
    const double vc = 0.5 * (va + vb);

    // MW(1 - u) = int W(e^v) e^{v(1-c)} e^{-i tau v} dv; phases measured from vc.
    std::vector<double> g(static_cast<std::size_t>(nodes - 1));
    std::vector<double> offset(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double v = va + static_cast<double>(k + 1) * h;
        g[k] = W(std::exp(v)) * std::exp(v * (1.0 - contour_.c)) * h;
        offset[k] = v - vc;
    }

    values_.assign(static_cast<std::size_t>(2 * half_ + 1), complex{});
    for (std::int64_t j = 0; j <= half_; ++j) {
        const double tau = static_cast<double>(j) * contour_.step;
        CompensatedSum cs;
        CompensatedSum sn;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double ph = tau * offset[k];
            cs += g[k] * std::cos(ph);
            sn += g[k] * std::sin(ph);
        }
        const complex centre = std::polar(1.0, -tau * vc);
        values_[static_cast<std::size_t>(half_ + j)] = centre * complex(cs.value(), -sn.value());
        values_[static_cast<std::size_t>(half_ - j)] = std::conj(centre) * complex(cs.value(), sn.value());
    }
}

WTildeKernel::WTildeKernel(std::shared_ptr<const ContourSamples> samples, int b)
    : samples_(std::move(samples)), b_(b) {
    if (b != 0 && b != 1) throw PreconditionError("w_tilde: b must be 0 or 1");
    const MellinContour& ct = samples_->contour();
    const std::int64_t half = samples_->half_points();
    const double logPi = std::log(kPi);
    kernel_.resize(static_cast<std::size_t>(2 * half + 1));
    for (std::int64_t j = -half; j <= half; ++j) {
        const complex u(ct.c, static_cast<double>(j) * ct.step);
        const complex logFactor = -(u - 0.5) * logPi + log_gamma((u + static_cast<double>(b)) / 2.0) -
                                  log_gamma((1.0 - u + static_cast<double>(b)) / 2.0);
        kernel_[static_cast<std::size_t>(j + half)] = samples_->at(j) * std::exp(logFactor);
    }
    const auto cut = static_cast<std::int64_t>(std::ceil(0.9 * static_cast<double>(half)));
    double mass = 0.0;
    for (std::int64_t j = cut; j <= half; ++j)
        mass += std::abs(kernel_[static_cast<std::size_t>(half + j)]) +
                std::abs(kernel_[static_cast<std::size_t>(half - j)]);
    tailMass_.push_back(mass * ct.step / (2.0 * kPi));
}

WTildeKernel::WTildeKernel(const SmoothCompactFunction& W, int b, MellinContour contour)
    : WTildeKernel(std::make_shared<const ContourSamples>(W, contour), b) {}

WTildeKernel::Evaluation WTildeKernel::evaluate(double x) const {
    if (!(x > 0.0)) throw PreconditionError("w_tilde: x must be positive");
    const MellinContour& ct = samples_->contour();
    const double L = std::log(x);
    if (std::fabs(L) * ct.step > 0.5 * kPi)
        throw PreconditionError("w_tilde: x = " + std::to_string(x) +
                                " oscillates faster than the contour step resolves");
    const std::int64_t half = samples_->half_points();
    const double scale = std::exp(-ct.c * L) * ct.step / (2.0 * kPi);

    Evaluation out;
    out.tailEstimate = scale * tailMass_.front();
    if (out.tailEstimate > kTailTolerance)
        throw AccuracyError("w_tilde: contour truncation tail " + std::to_string(out.tailEstimate) +
                                " exceeds 1e-9 at x = " + std::to_string(x),
                            out.tailEstimate);

    // x^{-i tau} by rotation, re-anchored every 128 steps
    const complex rot = std::polar(1.0, -ct.step * L);
    CompensatedComplexSum sum;
    sum += kernel_[static_cast<std::size_t>(half)];
    complex phase = 1.0;
    for (std::int64_t j = 1; j <= half; ++j) {
        phase = (j % 128 == 0) ? std::polar(1.0, -static_cast<double>(j) * ct.step * L) : phase * rot;
        const double w = (j == half) ? 0.5 : 1.0;
        sum += w * (kernel_[static_cast<std::size_t>(half + j)] * phase +
                    kernel_[static_cast<std::size_t>(half - j)] * std::conj(phase));
    }
    const complex total = sum.value() * scale;
    out.value = total.real();
    out.imagResidue = total.imag();
    return out;
}

DualKernels::DualKernels(const SmoothCompactFunction& W, MellinContour contour)
    : W_(W),
      samples_(std::make_shared<const ContourSamples>(W, contour)),
      even_(samples_, 0),
      odd_(samples_, 1) {}

double w_tilde(const SmoothCompactFunction& W, int b, double x, MellinContour contour) {
    return WTildeKernel(W, b, contour).evaluate(x).value;
}

complex gauss_sum(std::uint64_t q) {
    if (q > 1'000'000) throw PreconditionError("gauss_sum: q must be <= 10^6");
    const auto chi = QuadraticCharacter::legendre(q);
    CompensatedComplexSum sum;
    for (std::uint64_t x = 1; x < q; ++x) {
        const int c = chi(static_cast<std::int64_t>(x));
        const double angle = 2.0 * kPi * static_cast<double>(x) / static_cast<double>(q);
        sum += static_cast<double>(c) * complex(std::cos(angle), std::sin(angle));
    }
    return sum.value();
}

double direct_character_sum(const QuadraticCharacter& chi, const SmoothCompactFunction& W, double X) {
    if (!(X > 0.0)) throw PreconditionError("character sum: X must be positive");
    const auto lo = static_cast<std::int64_t>(std::floor(W.a() * X));
    const auto hi = static_cast<std::int64_t>(std::ceil(W.b() * X));
    CompensatedSum sum;
    for (std::int64_t n = std::max<std::int64_t>(lo, 1); n <= hi; ++n) {
        const int c = chi(n);
        if (c != 0) sum += c * W(static_cast<double>(n) / X);
    }
    return sum.value();
}

PoissonCheck dual_character_sum(const QuadraticCharacter& chi, const WTildeKernel& kernel, double X) {
    if (!(X > 0.0)) throw PreconditionError("dual sum: X must be positive");
    const double q = static_cast<double>(chi.q);
    CompensatedSum sum;
    double maxSeen = 1.0;
    double envelopeC = 0.0;
    int quiet = 0;
    std::int64_t m = 1;
    for (;; ++m) {
        if (m > kMaxDualTerms)
            throw AccuracyError("dual sum did not settle within 10^7 terms", maxSeen);
        const double x = static_cast<double>(m) * X / q;
        const double v = kernel(x);
        const int c = chi(m);
        if (c != 0) sum += c * v;
        maxSeen = std::max(maxSeen, std::fabs(v));
        if (x >= 1.0) envelopeC = std::max(envelopeC, std::fabs(v) * x * x * x * x);
        quiet = (x >= 1.0 && std::fabs(v) < kNegligibleRatio * maxSeen) ? quiet + 1 : 0;
        if (quiet >= kNegligibleRun) break;
    }
    PoissonCheck out;
    const double pref = X / std::sqrt(q);
    out.rhs = pref * sum.value();
    out.mTerms = m;
    // sum_{n > m} C (nX/q)^{-4} <= C (q/X)^4 / (3 m^3)
    const double ratio = q / X;
    out.tailEnvelope = pref * envelopeC * ratio * ratio * ratio * ratio /
                       (3.0 * static_cast<double>(m) * static_cast<double>(m) * static_cast<double>(m));
    return out;
}

PoissonCheck poisson_check(std::uint64_t q, const DualKernels& kernels, double X) {
    const auto chi = QuadraticCharacter::legendre(q);
    PoissonCheck out = dual_character_sum(chi, kernels.for_parity(chi.parity), X);
    out.lhs = direct_character_sum(chi, kernels.weight(), X);
    return out;
}

PoissonCheck poisson_check(std::uint64_t q, const SmoothCompactFunction& W, double X,
                           MellinContour contour) {
    const DualKernels kernels(W, contour);
    return poisson_check(q, kernels, X);
}

namespace {

void check_alpha(std::uint64_t p, std::uint64_t alpha) {
    if (alpha == 0 || std::gcd(alpha, 2 * p) != 1)
        throw PreconditionError("odd-restricted sum: need gcd(alpha, 2p) = 1, got alpha = " +
                                std::to_string(alpha) + ", p = " + std::to_string(p));
}

}  // namespace

double odd_restricted_dual(std::uint64_t p, const DualKernels& kernels, double X, std::uint64_t alpha) {
    const auto chi = QuadraticCharacter::legendre(p);
    check_alpha(p, alpha);
    const WTildeKernel& kernel = kernels.for_parity(chi.parity);
    const double a2 = static_cast<double>(alpha) * static_cast<double>(alpha);
    // sum_{d odd} = sum_d (d/p) W(d a^2/X) - (2/p) sum_d (d/p) W(2 d a^2/X)
    const double all = dual_character_sum(chi, kernel, X / a2).rhs;
    const double even = dual_character_sum(chi, kernel, X / (2.0 * a2)).rhs;
    return all - chi(2) * even;
}

double odd_restricted_dual(std::uint64_t p, const SmoothCompactFunction& W, double X,
                           std::uint64_t alpha, MellinContour contour) {
    const DualKernels kernels(W, contour);
    return odd_restricted_dual(p, kernels, X, alpha);
}

double odd_restricted_direct(std::uint64_t p, const SmoothCompactFunction& W, double X,
                             std::uint64_t alpha) {
    const auto chi = QuadraticCharacter::legendre(p);
    check_alpha(p, alpha);
    const double scale = X / (static_cast<double>(alpha) * static_cast<double>(alpha));
    const auto lo = static_cast<std::int64_t>(std::floor(W.a() * scale));
    const auto hi = static_cast<std::int64_t>(std::ceil(W.b() * scale));
    CompensatedSum sum;
    for (std::int64_t d = std::max<std::int64_t>(lo, 1) | 1; d <= hi; d += 2) {
        const int c = chi(d);
        if (c != 0) sum += c * W(static_cast<double>(d) / scale);
    }
    return sum.value();
}

}  // namespace qtwist::poisson
