#pragma once

// Test functions with compactly supported Fourier transform, smooth weights,
// and the symplectic prediction integral.

#include <functional>
#include <string>

namespace qtwist::testfn {

/// An even phi together with its transform phiHat(u) = int phi(x) e^{-2 pi i x u} dx,
/// where phiHat vanishes for |u| >= sigma.
struct TestFunctionPair {
    std::string name;
    double sigma = 0.0;
    std::function<double(double)> phi;
    std::function<double(double)> phiHat;
    double integralPhi = 0.0;         // int phi = phiHat(0)
    double integralPhiHatFull = 0.0;  // int over R of phiHat
    double integralPhiHatUnit = 0.0;  // int over [-1, 1] of phiHat
};

/// Fejer pair: phiHat(u) = (1 - |u|/sigma)_+, phi(x) = sigma sinc^2(pi sigma x).
/// Requires 0 < sigma < 2.
TestFunctionPair fejer_pair(double sigma);

/// A smooth function supported on [a, b] with 0 < a < b.
class SmoothCompactFunction {
public:
    SmoothCompactFunction(double a, double b, std::function<double(double)> profile,
                          double scale = 1.0);

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double operator()(double t) const { return evaluate(t); }
    double evaluate(double t) const { return (t <= a_ || t >= b_) ? 0.0 : scale_ * profile_(t); }
    double integral() const noexcept { return integral_; }

    /// The same function multiplied by c (c != 0).
    SmoothCompactFunction scaled(double c) const;

private:
    double a_;
    double b_;
    std::function<double(double)> profile_;
    double scale_;
    double integral_;
};

/// exp(-1/((t-a)(b-t))) normalized to peak value 1 at (a+b)/2.
/// Requires 0 < a < b.
SmoothCompactFunction bump_weight(double a, double b);

/// int phi(x) (1 - sin(2 pi x)/(2 pi x)) dx, evaluated as
/// int phi - (1/2) int_{-1}^{1} phiHat.
double rmt_prediction(const TestFunctionPair& pair);

}  // namespace qtwist::testfn
