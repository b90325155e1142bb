#pragma once

// Composite Gauss-Legendre quadrature on [a, b] with panel doubling.

#include <cmath>
#include <complex>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "gaborframe/errors.hpp"

namespace gabor::quad {

using cplx = std::complex<double>;

inline constexpr unsigned kNodes = 20;

struct QuadratureOptions {
    double abs_tol = 1e-13;
    int min_panels = 8;
    int max_panels = 1 << 14;
};

/// Fixed composite rule with `panels` equal panels of kNodes points each.
template <class F>
cplx composite(F&& f, double a, double b, int panels) {
    using gl = boost::math::quadrature::gauss<double, kNodes>;
    const auto& x = gl::abscissa();
    const auto& w = gl::weights();
    const double h = (b - a) / panels;
    cplx total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double half = 0.5 * h;
        cplx acc = 0.0;
        // Boost stores the non-negative half of the symmetric node set.
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0.0) {
                acc += w[i] * cplx(f(mid));
            } else {
                acc += w[i] * (cplx(f(mid - half * x[i])) + cplx(f(mid + half * x[i])));
            }
        }
        total += half * acc;
    }
    return total;
}

/// Integrates f over [a, b]; the initial panel count resolves oscillations of
/// the given frequency (cycles per unit length). Doubles until two successive
/// estimates agree to abs_tol.
template <class F>
cplx integrate(F&& f, double a, double b, double frequency = 0.0, const QuadratureOptions& opt = {}) {
    if (!(b > a)) return 0.0;
    const double len = b - a;
    int panels = std::max(opt.min_panels, static_cast<int>(std::ceil(len * (1.0 + std::abs(frequency)))));
    cplx prev = composite(f, a, b, panels);
    while (true) {
        panels *= 2;
        if (panels > opt.max_panels)
            throw ConvergenceError("quadrature did not converge on [" + std::to_string(a) + ", " +
                                   std::to_string(b) + "]");
        const cplx next = composite(f, a, b, panels);
        if (std::abs(next - prev) <= opt.abs_tol * std::max(1.0, std::abs(next))) return next;
        prev = next;
    }
}

} // namespace gabor::quad
