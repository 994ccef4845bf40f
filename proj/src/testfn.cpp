#include "qtwist/testfn.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qtwist/errors.hpp"
#include "qtwist/quadrature.hpp"

namespace qtwist::testfn {

TestFunctionPair fejer_pair(double sigma) {
    if (!(sigma > 0.0 && sigma < 2.0))
        throw PreconditionError("fejer_pair: sigma must lie in (0, 2), got " + std::to_string(sigma));

    TestFunctionPair pair;
    pair.name = "fejer";
    pair.sigma = sigma;
    pair.phi = [sigma](double x) {
        const double y = std::numbers::pi * sigma * x;
        if (std::fabs(y) < 1e-4) {
            const double y2 = y * y;
            const double s = 1.0 - y2 / 6.0 + y2 * y2 / 120.0;
            return sigma * s * s;
        }
        const double s = std::sin(y) / y;
        return sigma * s * s;
    };
    pair.phiHat = [sigma](double u) {
        const double v = 1.0 - std::fabs(u) / sigma;
        return v > 0.0 ? v : 0.0;
    };
    pair.integralPhi = 1.0;
    pair.integralPhiHatFull = sigma;
    pair.integralPhiHatUnit = sigma <= 1.0 ? sigma : 2.0 - 1.0 / sigma;
    return pair;
}

SmoothCompactFunction::SmoothCompactFunction(double a, double b,
                                             std::function<double(double)> profile, double scale)
    : a_(a), b_(b), profile_(std::move(profile)), scale_(scale) {
    if (!(a > 0.0 && b > a))
        throw PreconditionError("smooth weight support must satisfy 0 < a < b");
    if (scale == 0.0) throw PreconditionError("smooth weight must not be identically zero");
    integral_ = quad::integrate([this](double t) { return evaluate(t); }, a_, b_, 1e-12, 16);
}

SmoothCompactFunction SmoothCompactFunction::scaled(double c) const {
    return SmoothCompactFunction(a_, b_, profile_, scale_ * c);
}

SmoothCompactFunction bump_weight(double a, double b) {
    if (!(a > 0.0 && b > a))
        throw PreconditionError("bump_weight: need 0 < a < b, got [" + std::to_string(a) + ", " +
                                std::to_string(b) + "]");
    const double peak = 4.0 / ((b - a) * (b - a));
    return SmoothCompactFunction(a, b, [a, b, peak](double t) {
        return std::exp(peak - 1.0 / ((t - a) * (b - t)));
    });
}

double rmt_prediction(const TestFunctionPair& pair) {
    return pair.integralPhi - 0.5 * pair.integralPhiHatUnit;
}

}  // namespace qtwist::testfn
