#pragma once

// Truncated lattice sums with a tail estimate, Poisson summation (standard
// and symplectic) as checkable identities, the vanishing sums for odd
// windows on density-2^d symplectic lattices, and the series phi(z).

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "gaborframe/errors.hpp"
#include "gaborframe/lattice.hpp"
#include "gaborframe/phase_space.hpp"
#include "gaborframe/windows.hpp"

namespace gabor {

using PhaseSpaceFunction = std::function<cplx(const PhaseSpacePoint&)>;

inline constexpr double kDefaultTargetTail = 1e-10;

/// Neumaier-compensated complex accumulator.
class CompensatedSum {
public:
    void add(cplx v) {
        add(re_, re_c_, v.real());
        add(im_, im_c_, v.imag());
    }
    cplx value() const { return {re_ + re_c_, im_ + im_c_}; }

private:
    static void add(double& sum, double& comp, double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

struct LatticeSumResult {
    cplx value = 0.0;
    double truncation_radius = 0.0;
    double tail_estimate = 0.0;
    std::size_t terms_used = 0;
};

/// One evaluated term F(lambda + z) with lambda = M k.
struct LatticeTerm {
    Eigen::VectorXi k;
    PhaseSpacePoint lambda;
    cplx value;
};

struct LatticeTerms {
    std::vector<LatticeTerm> terms; // sorted by |lambda|, then lexicographic k
    double truncation_radius = 0.0;
    double tail_estimate = 0.0;
};

namespace detail {

// Bound on sum_{|lambda| > r} C e^{-a |lambda|^2} for a lattice of the given
// volume in R^dim, by the integral of the envelope.
inline double gaussian_tail(double c, double a, double r, int dim, double volume) {
    const double s = dim / 2.0;
    return c * std::pow(kPi / a, s) * boost::math::gamma_q(s, a * r * r) / volume;
}

inline bool term_order(const LatticeTerm& a, const LatticeTerm& b) {
    const double na = a.lambda.coords().squaredNorm(), nb = b.lambda.coords().squaredNorm();
    if (na != nb) return na < nb;
    return std::lexicographical_compare(a.k.data(), a.k.data() + a.k.size(), b.k.data(), b.k.data() + b.k.size());
}

} // namespace detail

/// Evaluates F(lambda + z) over growing balls |lambda| <= R until the tail
/// estimate (Gaussian envelope fitted to the two outermost shells) drops
/// below target_tail.
inline LatticeTerms collect_lattice_terms(const PhaseSpaceFunction& f, const Lattice& l, const PhaseSpacePoint& z,
                                          double target_tail = kDefaultTargetTail,
                                          std::size_t cap = kDefaultPointCap) {
    if (!(target_tail > 0.0)) throw InvalidArgument("lattice_sum: target_tail must be positive");
    if (z.dim() != l.dim()) throw InvalidArgument("lattice_sum: shift dimension does not match lattice");
    const int dim = 2 * l.dim();
    const double shell = std::max(l.shortest_vector_length(), std::pow(l.volume(), 1.0 / dim));

    LatticeTerms out;
    std::vector<double> shell_radius; // norm of the point attaining the shell maximum
    std::vector<double> shell_max;    // max |F| on each shell
    double radius = 0.0;
    for (int step = 0;; ++step) {
        const double inner = radius;
        radius = step == 0 ? 0.0 : radius + shell;
        std::vector<IndexedPoint> pts;
        try {
            pts = enumerate_indexed(l, radius, cap);
        } catch (const CapExceeded&) {
            throw ConvergenceError("lattice_sum: point cap reached before the tail target was met");
        }
        double m = 0.0, m_norm = 0.0;
        bool any = false;
        for (auto& p : pts) {
            const double n = p.point.norm();
            if (step > 0 && n <= inner * (1.0 + 1e-12)) continue;
            const cplx v = f(p.point + z);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw ConvergenceError("lattice_sum: non-finite term");
            if (!any || std::abs(v) > m) {
                m = std::abs(v);
                m_norm = n;
            }
            any = true;
            out.terms.push_back({std::move(p.k), std::move(p.point), v});
        }
        if (!any) continue;
        shell_radius.push_back(m_norm);
        shell_max.push_back(m);
        const std::size_t n = shell_max.size();
        if (n < 4) continue;

        const double r_prev = shell_radius[n - 2], r_last = shell_radius[n - 1];
        const double m_prev = shell_max[n - 2], m_last = shell_max[n - 1];
        double tail;
        if (m_last == 0.0) {
            tail = 0.0;
        } else if (m_prev > m_last && r_last > r_prev) {
            const double a = std::log(m_prev / m_last) / (r_last * r_last - r_prev * r_prev);
            const double c = m_last * std::exp(a * r_last * r_last);
            // Integrating from one shell inside the ball covers the lattice
            // points just outside it.
            const double from = std::max(0.0, radius - shell);
            tail = std::isfinite(c) ? detail::gaussian_tail(c, a, from, dim, l.volume())
                                    : m_last * std::exp(-a * (from * from - r_last * r_last));
        } else {
            tail = std::numeric_limits<double>::infinity();
        }
        if (tail <= target_tail) {
            out.truncation_radius = radius;
            out.tail_estimate = tail;
            break;
        }
    }
    std::sort(out.terms.begin(), out.terms.end(), detail::term_order);
    return out;
}

/// sum_{lambda in L} F(lambda + z).
inline LatticeSumResult lattice_sum(const PhaseSpaceFunction& f, const Lattice& l, const PhaseSpacePoint& z,
                                    double target_tail = kDefaultTargetTail, std::size_t cap = kDefaultPointCap) {
    const auto t = collect_lattice_terms(f, l, z, target_tail, cap);
    CompensatedSum acc;
    for (const auto& term : t.terms) acc.add(term.value);
    return {acc.value(), t.truncation_radius, t.tail_estimate, t.terms.size()};
}

inline PhaseSpacePoint origin(int d) { return PhaseSpacePoint(Eigen::VectorXd::Zero(2 * d)); }

struct IdentityCheck {
    cplx lhs = 0.0;
    cplx rhs = 0.0;
    double diff = 0.0;
};

/// sum F(lambda + z) = vol^{-1} sum_{dual} F^(mu) e^{2 pi i mu.z}, F^ the
/// 2d-dimensional Fourier transform.
inline IdentityCheck poisson_check(const PhaseSpaceFunction& f, const PhaseSpaceFunction& f_hat, const Lattice& l,
                                   const PhaseSpacePoint& z, double target_tail = kDefaultTargetTail) {
    const auto lhs = lattice_sum(f, l, z, target_tail);
    const Eigen::VectorXd zc = z.coords();
    auto modulated = [&](const PhaseSpacePoint& mu) { return f_hat(mu) * detail::cis(2.0 * kPi * mu.coords().dot(zc)); };
    const auto rhs = lattice_sum(modulated, dual_lattice(l), origin(l.dim()), target_tail * l.volume());
    const cplx r = rhs.value / l.volume();
    return {lhs.value, r, std::abs(lhs.value - r)};
}

/// sum F(lambda + z) = vol^{-1} sum_{adjoint} F_sigma F(mu) e^{2 pi i sigma(mu, z)}.
inline IdentityCheck symplectic_poisson_check(const PhaseSpaceFunction& f, const PhaseSpaceFunction& f_sigma,
                                              const Lattice& l, const PhaseSpacePoint& z,
                                              double target_tail = kDefaultTargetTail) {
    const auto lhs = lattice_sum(f, l, z, target_tail);
    auto modulated = [&](const PhaseSpacePoint& mu) {
        return f_sigma(mu) * detail::cis(2.0 * kPi * symplectic_form(mu, z));
    };
    const auto rhs = lattice_sum(modulated, adjoint_lattice(l), origin(l.dim()), target_tail * l.volume());
    const cplx r = rhs.value / l.volume();
    return {lhs.value, r, std::abs(lhs.value - r)};
}

/// vol(L)^{-1/d} rounded to an integer, if it is one (to 1e-9 relative).
inline std::optional<long> redundancy_root(const Lattice& l) {
    const double r = std::pow(l.volume(), -1.0 / l.dim());
    const double n = std::round(r);
    if (n >= 1.0 && std::abs(r - n) <= 1e-9 * n) return static_cast<long>(n);
    return std::nullopt;
}

struct VanishingSums {
    cplx wigner_sum = 0.0;    // sum_{lambda in L} W_g f(lambda)
    cplx ambiguity_sum = 0.0; // sum_{mu in L°} A_g f(mu)
    /// Cross-check on the volume-1 lattice L1 = 2^{1/2} L (L1 = L1°): the sums
    /// of D_{1/sqrt2} W_g f over L1 and of its symplectic Fourier transform
    /// 2^d D_{sqrt2} A_g f over L1. Symplectic Poisson makes them equal, the
    /// eigenvalue -1 makes them opposite, so both vanish.
    std::optional<cplx> dilated_wigner_sum;
    std::optional<cplx> dilated_transform_sum;
};

/// Checks the hypotheses (g odd, L symplectic, vol = 2^{-d}) and returns the
/// two lattice sums that must vanish.
inline VanishingSums vanishing_sum_check(const Window& f, const Window& g, const Lattice& l,
                                         double target_tail = kDefaultTargetTail, bool cross_check = false) {
    if (g.parity() != Parity::odd) throw InvalidArgument("vanishing_sum_check: g must be odd");
    if (f.dim() != g.dim() || f.dim() != l.dim()) throw InvalidArgument("vanishing_sum_check: dimension mismatch");
    if (!is_symplectic_lattice(l).is_symplectic) throw InvalidArgument("vanishing_sum_check: lattice is not symplectic");
    const int d = l.dim();
    if (std::abs(l.volume() - std::pow(2.0, -d)) > 1e-10)
        throw InvalidArgument("vanishing_sum_check: lattice volume must be 2^{-d}");

    VanishingSums out;
    const auto z = origin(d);
    out.wigner_sum = lattice_sum([&](const PhaseSpacePoint& p) { return wigner(f, g, p); }, l, z, target_tail).value;
    out.ambiguity_sum =
        lattice_sum([&](const PhaseSpacePoint& p) { return ambiguity(f, g, p); }, adjoint_lattice(l), z, target_tail)
            .value;
    if (cross_check) {
        const Lattice unit = l.scaled(std::sqrt(2.0));
        const double s = std::sqrt(2.0);
        const double two_d = std::pow(2.0, d);
        out.dilated_wigner_sum =
            lattice_sum([&](const PhaseSpacePoint& p) { return wigner(f, g, p * (1.0 / s)); }, unit, z, target_tail)
                .value;
        out.dilated_transform_sum =
            lattice_sum([&](const PhaseSpacePoint& p) { return two_d * ambiguity(f, g, p * s); }, unit, z, target_tail)
                .value;
    }
    return out;
}

inline constexpr double kRealTol = 1e-9;

/// phi(z) = vol^{-1} sum_{mu in L°} A g(mu) e^{2 pi i sigma(mu, z)}, for
/// lattices with vol^{-1/d} an even integer (trivial Laurent phase).
inline double phi_series(const Window& g, const Lattice& l, const PhaseSpacePoint& z,
                         double target_tail = kDefaultTargetTail) {
    const auto n = redundancy_root(l);
    if (!n) throw InvalidArgument("phi_series: vol^{-1/d} is not an integer");
    if (*n % 2 != 0) throw AlternatingPhaseError("phi_series: vol^{-1/d} is odd, the phase factor alternates");
    if (g.dim() != l.dim() || z.dim() != l.dim()) throw InvalidArgument("phi_series: dimension mismatch");
    auto term = [&](const PhaseSpacePoint& mu) {
        return ambiguity(g, g, mu) * detail::cis(2.0 * kPi * symplectic_form(mu, z));
    };
    const auto s = lattice_sum(term, adjoint_lattice(l), origin(l.dim()), target_tail * l.volume());
    const cplx v = s.value / l.volume();
    if (std::abs(v.imag()) > kRealTol)
        throw ConvergenceError("phi_series: imaginary part " + std::to_string(v.imag()) + " exceeds tolerance");
    return v.real();
}

} // namespace gabor
