#pragma once

// Aggregated identity checks: Poisson summation, the A <-> W symplectic
// Fourier pair, the reflection relation W_g f(l) = 2^d A_{g~} f(2l), the
// eigenvalue of F_sigma on dilated ambiguities, and the vanishing lattice sums
// for odd windows.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaborframe/lattice.hpp"
#include "gaborframe/phase_space.hpp"
#include "gaborframe/summation.hpp"
#include "gaborframe/windows.hpp"

namespace gabor {

struct SuiteResult {
    std::string name;
    int cases = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string error; // set when a case threw
    std::vector<double> residuals; // per case, where cases are few
};

struct IdentityOptions {
    bool quick = false;
    std::uint64_t seed = 20240601;
};

namespace detail {

inline SuiteResult finish(SuiteResult r) {
    r.passed = r.error.empty() && r.max_residual <= r.tolerance;
    return r;
}

template <class Body>
SuiteResult run_suite(std::string name, double tol, Body&& body) {
    SuiteResult r{std::move(name), 0, 0.0, tol, false, {}, {}};
    try {
        body(r);
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return finish(r);
}

// Random d = 1 lattice with volume in [vmin, vmax]; shear and aspect kept mild.
inline Lattice random_lattice(std::mt19937_64& rng, double vmin, double vmax) {
    std::uniform_real_distribution<double> u(-0.4, 0.4), vol(vmin, vmax), asp(0.7, 1.4);
    const double a = asp(rng);
    Eigen::Matrix2d m;
    m << a, u(rng), 0.0, 1.0 / a;
    const double theta = kPi * u(rng);
    Eigen::Matrix2d rot;
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return Lattice(std::sqrt(vol(rng)) * rot * m);
}

inline std::vector<GridAxis> square_axes(double r, int count) { return uniform_axes(1, -r, r, count); }

} // namespace detail

/// Gaussian e^{-pi |l|^2} (its own 2d-dimensional Fourier transform) on random lattices.
inline SuiteResult poisson_suite(const IdentityOptions& opt) {
    return detail::run_suite("poisson", opt.quick ? 1e-8 : 1e-9, [&](SuiteResult& r) {
        std::mt19937_64 rng(opt.seed);
        std::uniform_real_distribution<double> shift(-0.5, 0.5);
        auto gauss = [](const PhaseSpacePoint& p) { return cplx(std::exp(-kPi * p.coords().squaredNorm())); };
        const int n = opt.quick ? 2 : 5;
        for (int i = 0; i < n; ++i) {
            const Lattice l = detail::random_lattice(rng, 0.3, 3.0);
            const PhaseSpacePoint z(shift(rng), shift(rng));
            const auto c = poisson_check(gauss, gauss, l, z, 1e-13);
            r.max_residual = std::max(r.max_residual, c.diff);
            ++r.cases;
        }
    });
}

/// F_sigma(A h0) against W h0 on a 41 x 41 grid.
inline SuiteResult symplectic_fourier_suite(const IdentityOptions& opt) {
    return detail::run_suite("symplectic_fourier", opt.quick ? 1e-5 : 1e-6, [&](SuiteResult& r) {
        const Window g = hermite_window(0);
        const int out_n = opt.quick ? 21 : 41;
        const int in_n = opt.quick ? 56 : 111;
        const auto in = sample_function([&](const PhaseSpacePoint& p) { return ambiguity(g, g, p); },
                                        detail::square_axes(5.5, in_n), "A h0");
        const auto out_axes = detail::square_axes(2.0, out_n);
        const auto ft = symplectic_fourier(in, out_axes);
        const auto w = sample_function([&](const PhaseSpacePoint& p) { return wigner(g, g, p); }, out_axes, "W h0");
        r.max_residual = max_abs_diff(ft, w);
        r.cases = static_cast<int>(w.size());
    });
}

/// wigner(f, g, l) against 2^d ambiguity(f, reflect(g), 2 l) at random points.
inline SuiteResult algebraic_suite(const IdentityOptions& opt) {
    return detail::run_suite("algebraic", opt.quick ? 1e-7 : 1e-8, [&](SuiteResult& r) {
        std::mt19937_64 rng(opt.seed + 1);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        const Window h2 = hermite_window(2);
        const int n = opt.quick ? 20 : 100;
        for (int i = 0; i < n; ++i) {
            const PhaseSpacePoint p(u(rng), u(rng));
            r.max_residual = std::max(r.max_residual, std::abs(wigner(h2, h2, p) - wigner_via_ambiguity(h2, h2, p)));
            ++r.cases;
        }
    });
}

namespace detail {

// max |F_sigma(D_sqrt2 A_g f) - expected| over f, g in {h0, h1}.
template <class Expected>
void dilated_ambiguity_cases(SuiteResult& r, const IdentityOptions& opt, Expected&& expected) {
    const int out_n = opt.quick ? 21 : 41;
    const int in_n = opt.quick ? 51 : 101;
    const double s = std::sqrt(2.0);
    for (int fn : {0, 1})
        for (int gn : {0, 1}) {
            const Window f = hermite_window(fn), g = hermite_window(gn);
            auto dilated = [&](const PhaseSpacePoint& p) { return ambiguity(f, g, p * s); };
            const auto in = sample_function(dilated, square_axes(5.0, in_n), "D A");
            const auto out_axes = square_axes(2.0, out_n);
            const auto ft = symplectic_fourier(in, out_axes);
            const auto expect = sample_function([&](const PhaseSpacePoint& p) { return expected(f, g, p * s); },
                                                out_axes, "expected");
            const double res = max_abs_diff(ft, expect);
            r.residuals.push_back(res);
            r.max_residual = std::max(r.max_residual, res);
            ++r.cases;
        }
}

} // namespace detail

/// F_sigma(D_sqrt2 A_g f) = +-D_sqrt2 A_g f, + for even g, - for odd g.
inline SuiteResult eigenfunction_suite(const IdentityOptions& opt) {
    return detail::run_suite("eigenfunction", opt.quick ? 1e-5 : 1e-6, [&](SuiteResult& r) {
        detail::dilated_ambiguity_cases(r, opt, [](const Window& f, const Window& g, const PhaseSpacePoint& p) {
            return static_cast<double>(parity_sign(g.parity())) * ambiguity(f, g, p);
        });
    });
}

/// F_sigma(D_sqrt2 A_g f)(l) = D_sqrt2 A_{g~} f(-l), which is what the transform
/// with kernel e^{-2 pi i sigma(l, l')} gives for every pair.
inline SuiteResult reflected_eigenfunction_suite(const IdentityOptions& opt) {
    return detail::run_suite("eigenfunction_reflected", opt.quick ? 1e-5 : 1e-6, [&](SuiteResult& r) {
        detail::dilated_ambiguity_cases(r, opt, [](const Window& f, const Window& g, const PhaseSpacePoint& p) {
            return ambiguity(f, reflect(g), -p);
        });
    });
}

/// Sums of W_g f over L and A_g f over L° for odd g, symplectic L, vol 2^{-d}.
inline SuiteResult vanishing_sum_suite(const IdentityOptions& opt) {
    return detail::run_suite("vanishing_sums", opt.quick ? 1e-6 : 1e-7, [&](SuiteResult& r) {
        const std::vector<Lattice> lattices{square_lattice(0.5, 1), hexagonal_lattice(0.5),
                                            Lattice((Eigen::Matrix2d() << 1.0, 0.3, 0.0, 1.0).finished() / std::sqrt(2.0))};
        struct Combo {
            int f, g, lattice;
        };
        std::vector<Combo> combos{{0, 1, 0}, {2, 3, 0}, {0, 1, 1}, {1, 1, 0}, {3, 1, 1},
                                  {4, 3, 2}, {2, 1, 2}, {4, 1, 0}, {1, 3, 1}, {0, 3, 2}};
        if (opt.quick) combos.resize(3);
        for (const auto& c : combos) {
            const auto v = vanishing_sum_check(hermite_window(c.f), hermite_window(c.g),
                                               lattices[static_cast<std::size_t>(c.lattice)], 1e-12);
            r.max_residual = std::max({r.max_residual, std::abs(v.wigner_sum), std::abs(v.ambiguity_sum)});
            ++r.cases;
        }
    });
}

inline std::vector<SuiteResult> run_identity_suites(const IdentityOptions& opt = {}) {
    return {poisson_suite(opt),       symplectic_fourier_suite(opt),         algebraic_suite(opt),
            eigenfunction_suite(opt), reflected_eigenfunction_suite(opt), vanishing_sum_suite(opt)};
}

inline nlohmann::json to_json(const SuiteResult& s) {
    nlohmann::json j = {{"name", s.name},           {"cases", s.cases},   {"max_residual", s.max_residual},
                        {"tolerance", s.tolerance}, {"passed", s.passed}};
    if (!s.residuals.empty()) j["residuals"] = s.residuals;
    if (!s.error.empty()) j["error"] = s.error;
    return j;
}

} // namespace gabor
