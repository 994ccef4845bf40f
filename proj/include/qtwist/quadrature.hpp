#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <type_traits>

#include "qtwist/errors.hpp"

namespace qtwist::quad {

inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr int kMaxDepth = 30;

template <class T>
struct Result {
    T value{};
    double error = 0.0;  // sum of |K15 - G7| over accepted panels
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the nodes at odd Kronrod indices 1, 3, 5, 7.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
    T kronrod;
    T gauss;
    double absKronrod;  // K15 applied to |f|, for the roundoff floor
};

template <class F>
auto gk15(const F& f, double a, double b) {
    using T = std::decay_t<decltype(f(a))>;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const T fc = f(c);
    T kronrod = fc * kKronrodWeights[7];
    T gauss = fc * kGaussWeights[3];
    double absK = std::abs(fc) * kKronrodWeights[7];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kKronrodNodes[i];
        const T lo = f(c - dx);
        const T hi = f(c + dx);
        const T pair = lo + hi;
        kronrod += pair * kKronrodWeights[i];
        absK += (std::abs(lo) + std::abs(hi)) * kKronrodWeights[i];
        if (i % 2 == 1) gauss += pair * kGaussWeights[i / 2];
    }
    return Panel<T>{kronrod * h, gauss * h, absK * std::fabs(h)};
}

template <class F, class T>
void adapt(const F& f, double a, double b, double tol, int depth, Result<T>& acc) {
    const Panel<T> p = gk15(f, a, b);
    const double err = std::abs(p.kronrod - p.gauss);
    // below this the difference is rounding noise, not truncation error
    const double floor = 50.0 * std::numeric_limits<double>::epsilon() * p.absKronrod;
    if (err <= tol || err <= floor || depth >= kMaxDepth) {
        if (err > tol && err > floor)
            throw AccuracyError("adaptive quadrature hit the depth cap on [" + std::to_string(a) +
                                    ", " + std::to_string(b) + "]",
                                err);
        acc.value += p.kronrod;
        acc.error += err;
        return;
    }
    const double m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth + 1, acc);
    adapt(f, m, b, 0.5 * tol, depth + 1, acc);
}

}  // namespace detail

/// Integrate f over [a, b] to absolute tolerance tol. The interval is first
/// cut into `panels` equal pieces so that symmetric or oscillatory
/// integrands cannot fool the first error estimate.
template <class F>
auto integrate_with_error(const F& f, double a, double b, double tol = kDefaultTolerance,
                          int panels = 8) {
    using T = std::decay_t<decltype(f(a))>;
    Result<T> acc;
    if (!(b > a)) return acc;
    const double width = (b - a) / panels;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * width;
        const double hi = (i + 1 == panels) ? b : lo + width;
        detail::adapt(f, lo, hi, tol / panels, 0, acc);
    }
    return acc;
}

template <class F>
auto integrate(const F& f, double a, double b, double tol = kDefaultTolerance, int panels = 8) {
    return integrate_with_error(f, a, b, tol, panels).value;
}

}  // namespace qtwist::quad
