#pragma once

// Optimal frame bounds of Gabor systems {rho(lambda) g : lambda in L}.
//
// Janssen route: for vol(L)^{-1/d} = n in N the Gram matrix of the system on
// the adjoint lattice L° is a Laurent operator; for even n its symbol is
//
//   phi(z) = vol^{-1} sum_{mu in L°} A g(mu) e^{2 pi i sigma(mu, z)},
//
// and A = ess inf phi, B = ess sup phi. With mu = J M^{-T} k and z = M u the
// phase is e^{2 pi i k.u}, so phi is a trigonometric series on the unit
// torus in u and its extrema are searched on uniform u-grids.
//
// Gram route: extreme eigenvalues of finite sections of
// vol^{-1} (<rho(mu) g, rho(mu') g>)_{mu, mu' in L°}, any lattice.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "gaborframe/errors.hpp"
#include "gaborframe/lattice.hpp"
#include "gaborframe/phase_space.hpp"
#include "gaborframe/summation.hpp"
#include "gaborframe/windows.hpp"

namespace gabor {

enum class PhaseMode { trivial, alternating };
enum class BoundsMethod { janssen_series, gram_finite_section, janssen_separable };

inline const char* to_string(BoundsMethod m) {
    switch (m) {
    case BoundsMethod::janssen_series: return "janssen_series";
    case BoundsMethod::gram_finite_section: return "gram_finite_section";
    case BoundsMethod::janssen_separable: return "janssen_separable";
    }
    return "?";
}

struct SeriesCoefficient {
    Eigen::VectorXi k;
    PhaseSpacePoint mu;
    cplx value;
};

/// Coefficients A g(mu) on the adjoint lattice, with truncation diagnostics.
struct JanssenSeries {
    Lattice adjoint;
    double volume = 0.0; // vol of the original lattice
    long redundancy_root = 0;
    PhaseMode phase_mode = PhaseMode::trivial;
    std::vector<SeriesCoefficient> coefficients; // sorted by |mu|, then k
    double truncation_radius = 0.0;
    double tail_estimate = 0.0;

    /// Coefficient at index k, zero if it was truncated away.
    cplx coefficient(const Eigen::VectorXi& k) const {
        for (const auto& c : coefficients)
            if (c.k == k) return c.value;
        return 0.0;
    }
};

struct FrameBoundsResult {
    BoundsMethod method = BoundsMethod::janssen_series;
    double lower_A = 0.0;
    double upper_B = 0.0;
    int grid_res = 0;
    double truncation_radius = 0.0;
    bool converged = false;
    Eigen::MatrixXd lattice;

    // Diagnostics.
    double tail_estimate = 0.0;
    std::size_t terms_used = 0;
    std::optional<Eigen::VectorXd> argmin;      // phase-space point of the minimum (series methods)
    std::optional<Eigen::VectorXd> argmax;
    std::optional<double> raw_lower;            // gram: largest-section eigenvalues
    std::optional<double> raw_upper;
    std::optional<std::size_t> section_points;
};

inline constexpr double kExtremaMoveTol = 1e-6;
inline constexpr double kLowerSlack = 1e-9;

namespace detail {

// Trigonometric series s(u) = scale * sum_k c_k e^{2 pi i k.u} on [0,1)^D.
class TorusSeries {
public:
    TorusSeries(std::vector<std::pair<Eigen::VectorXi, cplx>> coeffs, double scale)
        : coeffs_(std::move(coeffs)), scale_(scale) {
        if (coeffs_.empty()) throw InvalidArgument("series has no coefficients");
        dim_ = static_cast<int>(coeffs_.front().first.size());
        kmax_ = 0;
        for (const auto& [k, c] : coeffs_) kmax_ = std::max(kmax_, k.cwiseAbs().maxCoeff());
    }

    int dim() const { return dim_; }

    double value(const Eigen::VectorXd& u) const {
        double s = 0.0;
        for (const auto& [k, c] : coeffs_) {
            const double ph = 2.0 * kPi * k.cast<double>().dot(u);
            s += c.real() * std::cos(ph) - c.imag() * std::sin(ph);
        }
        return scale_ * s;
    }

    /// Values on the grid u = j / res (row-major, last axis fastest).
    std::vector<double> grid_values(int res) const {
        const int width = 2 * kmax_ + 1;
        std::vector<cplx> dense(static_cast<std::size_t>(std::pow(width, dim_)), 0.0);
        for (const auto& [k, c] : coeffs_) {
            std::size_t flat = 0;
            for (int a = 0; a < dim_; ++a) flat = flat * width + static_cast<std::size_t>(k(a) + kmax_);
            dense[flat] += c;
        }
        Eigen::MatrixXcd kernel(res, width);
        for (int j = 0; j < res; ++j)
            for (int m = 0; m < width; ++m) {
                // Reduce k j mod res before the trig call to keep the phase exact.
                const long kj = static_cast<long>(m - kmax_) * j;
                const long r = ((kj % res) + res) % res;
                kernel(j, m) = cis(2.0 * kPi * static_cast<double>(r) / res);
            }
        std::vector<int> shape(static_cast<std::size_t>(dim_), width);
        for (int a = 0; a < dim_; ++a) dense = contract_axis(dense, shape, static_cast<std::size_t>(a), kernel);
        std::vector<double> out(dense.size());
        for (std::size_t i = 0; i < dense.size(); ++i) out[i] = scale_ * dense[i].real();
        return out;
    }

private:
    std::vector<std::pair<Eigen::VectorXi, cplx>> coeffs_;
    double scale_ = 1.0;
    int dim_ = 0;
    int kmax_ = 0;
};

struct TorusExtrema {
    double min = 0.0, max = 0.0;
    Eigen::VectorXd argmin, argmax; // in u coordinates
    int res = 0;
    bool converged = false;
};

inline Eigen::VectorXd grid_point(std::size_t flat, int res, int dim) {
    Eigen::VectorXd u(dim);
    for (int a = dim - 1; a >= 0; --a) {
        u(a) = static_cast<double>(flat % static_cast<std::size_t>(res)) / res;
        flat /= static_cast<std::size_t>(res);
    }
    return u;
}

// Nested local grids around `start`, shrinking by 4 each round.
inline std::pair<double, Eigen::VectorXd> zoom(const TorusSeries& s, Eigen::VectorXd start, double cell, double sign) {
    const int dim = s.dim();
    const int half = dim <= 2 ? 4 : 2;
    const int width = 2 * half + 1;
    double best = sign * s.value(start);
    double step = cell / half;
    for (int round = 0; round < 24; ++round) {
        Eigen::VectorXd center = start;
        Eigen::VectorXi j = Eigen::VectorXi::Zero(dim);
        while (true) {
            Eigen::VectorXd u = center + step * (j.array() - half).cast<double>().matrix();
            const double v = sign * s.value(u);
            if (v < best) {
                best = v;
                start = u;
            }
            int a = dim - 1;
            while (a >= 0 && j(a) == width - 1) {
                j(a) = 0;
                --a;
            }
            if (a < 0) break;
            ++j(a);
        }
        step /= 4.0;
    }
    for (int a = 0; a < dim; ++a) start(a) -= std::floor(start(a));
    return {sign * best, start};
}

inline std::pair<double, Eigen::VectorXd> polished_extremum(const TorusSeries& s, const std::vector<double>& vals,
                                                            int res, double sign) {
    // Polish the few best grid points; near-ties can sit in different basins.
    std::vector<std::size_t> order(vals.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t keep = std::min<std::size_t>(4, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(keep), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          return sign * vals[a] < sign * vals[b] || (vals[a] == vals[b] && a < b);
                      });
    double best = 0.0;
    Eigen::VectorXd arg;
    for (std::size_t c = 0; c < keep; ++c) {
        auto [v, u] = zoom(s, grid_point(order[c], res, s.dim()), 1.0 / res, sign);
        if (c == 0 || sign * v < sign * best) {
            best = v;
            arg = u;
        }
    }
    return {best, arg};
}

inline TorusExtrema torus_extrema(const TorusSeries& s, int start_res, std::size_t cap = kDefaultPointCap) {
    if (start_res < 1) throw InvalidArgument("grid_res must be >= 1");
    TorusExtrema out;
    bool have_prev = false;
    for (int res = start_res;; res *= 2) {
        if (std::pow(static_cast<double>(res), s.dim()) > static_cast<double>(cap)) {
            if (!have_prev) throw CapExceeded("grid_res^{2d} exceeds the point cap");
            out.converged = false;
            return out;
        }
        const auto vals = s.grid_values(res);
        const auto [mn, amin] = polished_extremum(s, vals, res, 1.0);
        const auto [mx, amax] = polished_extremum(s, vals, res, -1.0);
        const bool settled = have_prev && std::abs(mn - out.min) < kExtremaMoveTol && std::abs(mx - out.max) < kExtremaMoveTol;
        out.min = mn;
        out.max = mx;
        out.argmin = amin;
        out.argmax = amax;
        out.res = res;
        if (settled) {
            out.converged = true;
            return out;
        }
        have_prev = true;
    }
}

inline double clamp_lower(double a) {
    if (a < -kLowerSlack)
        throw ConvergenceError("lower frame bound estimate " + std::to_string(a) +
                               " is negative beyond rounding; truncation is too coarse");
    return std::max(a, 0.0);
}

// A g on the adjoint lattice out to the tail target.
inline LatticeTerms adjoint_ambiguity_terms(const Window& g, const Lattice& l, double target_tail) {
    return collect_lattice_terms([&](const PhaseSpacePoint& p) { return ambiguity(g, g, p); }, adjoint_lattice(l),
                                 origin(l.dim()), target_tail);
}

inline void require_normalized(const Window& g) {
    if (!g.decay_ok())
        throw InvalidArgument("window fails the decay check; frame bounds would not be reliable");
}

} // namespace detail

inline constexpr double kCoefficientTol = 1e-8;
inline constexpr double kHermitianTol = 1e-9;

/// A g(mu) on L° for vol(L)^{-1/d} in N. Refuses odd roots (alternating phase).
inline JanssenSeries janssen_coefficients(const Window& g, const Lattice& l, double target_tail = kDefaultTargetTail) {
    if (g.dim() != l.dim()) throw InvalidArgument("janssen_coefficients: dimension mismatch");
    const auto n = redundancy_root(l);
    if (!n) throw InvalidArgument("janssen_coefficients: vol^{-1/d} is not an integer");
    if (*n % 2 != 0)
        throw AlternatingPhaseError("janssen_coefficients: vol^{-1/d} = " + std::to_string(*n) +
                                    " is odd; the Laurent phase factor alternates");
    auto terms = detail::adjoint_ambiguity_terms(g, l, target_tail * l.volume());
    JanssenSeries s{adjoint_lattice(l), l.volume(), *n, PhaseMode::trivial, {}, terms.truncation_radius,
                    terms.tail_estimate};
    for (auto& t : terms.terms) s.coefficients.push_back({std::move(t.k), std::move(t.lambda), t.value});

    const cplx c0 = s.coefficients.front().value; // |mu| = 0 sorts first
    if (std::abs(c0 - 1.0) > kCoefficientTol)
        throw InvalidArgument("janssen_coefficients: A g(0) = " + std::to_string(c0.real()) + " != 1 (window not normalized)");
    std::map<std::vector<int>, cplx> by_k;
    for (const auto& c : s.coefficients) by_k[{c.k.data(), c.k.data() + c.k.size()}] = c.value;
    for (const auto& c : s.coefficients) {
        std::vector<int> neg(c.k.data(), c.k.data() + c.k.size());
        for (int& v : neg) v = -v;
        const auto it = by_k.find(neg);
        if (it == by_k.end() || std::abs(it->second - std::conj(c.value)) > kHermitianTol)
            throw ConvergenceError("janssen_coefficients: Hermitian symmetry violated");
    }
    return s;
}

/// Symbol phi on the fundamental domain; series over the Janssen coefficients.
inline detail::TorusSeries janssen_symbol(const JanssenSeries& s) {
    std::vector<std::pair<Eigen::VectorXi, cplx>> c;
    c.reserve(s.coefficients.size());
    for (const auto& x : s.coefficients) c.emplace_back(x.k, x.value);
    return detail::TorusSeries(std::move(c), 1.0 / s.volume);
}

inline constexpr int kDefaultGridRes = 64;

/// Frame bounds as grid extrema of phi over the fundamental domain M [0,1)^{2d},
/// dyadically refined until both extrema move by less than 1e-6.
inline FrameBoundsResult frame_bounds_janssen(const Window& g, const Lattice& l, int grid_res = kDefaultGridRes,
                                              double target_tail = kDefaultTargetTail,
                                              std::size_t cap = kDefaultPointCap) {
    detail::require_normalized(g);
    const auto series = janssen_coefficients(g, l, target_tail);
    const auto symbol = janssen_symbol(series);
    const auto ext = detail::torus_extrema(symbol, grid_res, cap);
    FrameBoundsResult r;
    r.method = BoundsMethod::janssen_series;
    r.lower_A = detail::clamp_lower(ext.min);
    r.upper_B = ext.max;
    r.grid_res = ext.res;
    r.truncation_radius = series.truncation_radius;
    r.converged = ext.converged;
    r.lattice = l.generator();
    r.tail_estimate = series.tail_estimate;
    r.terms_used = series.coefficients.size();
    r.argmin = l.generator() * ext.argmin;
    r.argmax = l.generator() * ext.argmax;
    return r;
}

inline constexpr double kDefaultSectionRadius = 6.0;

namespace detail {

struct SectionSpectrum {
    std::size_t points = 0;
    double min = 0.0, max = 0.0;
};

inline SectionSpectrum gram_section(const Lattice& adj, double volume, double radius,
                                    const std::map<std::vector<int>, cplx>& amb) {
    const auto pts = enumerate_indexed(adj, radius);
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(n, n);
    std::vector<int> diff(static_cast<std::size_t>(pts.front().k.size()));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto& ki = pts[static_cast<std::size_t>(i)].k;
            const auto& kj = pts[static_cast<std::size_t>(j)].k;
            for (std::size_t a = 0; a < diff.size(); ++a) diff[a] = kj(static_cast<Eigen::Index>(a)) - ki(static_cast<Eigen::Index>(a));
            const auto it = amb.find(diff);
            if (it == amb.end()) continue;
            const double sig = symplectic_form(pts[static_cast<std::size_t>(i)].point, pts[static_cast<std::size_t>(j)].point);
            gram(i, j) = cis(kPi * sig) * it->second / volume;
        }
    SectionSpectrum out;
    out.points = pts.size();
    if (gram.imag().cwiseAbs().maxCoeff() <= 1e-14) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram.real(), Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw ConvergenceError("gram: eigensolver failed");
        out.min = es.eigenvalues()(0);
        out.max = es.eigenvalues()(n - 1);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw ConvergenceError("gram: eigensolver failed");
        out.min = es.eigenvalues()(0);
        out.max = es.eigenvalues()(n - 1);
    }
    return out;
}

// Value at N = infinity of the quadratic in 1/N through three points.
inline double extrapolate(const std::array<SectionSpectrum, 3>& s, bool lower) {
    Eigen::Matrix3d a;
    Eigen::Vector3d y;
    for (int i = 0; i < 3; ++i) {
        const double inv = 1.0 / static_cast<double>(s[static_cast<std::size_t>(i)].points);
        a(i, 0) = 1.0;
        a(i, 1) = inv;
        a(i, 2) = inv * inv;
        y(i) = lower ? s[static_cast<std::size_t>(i)].min : s[static_cast<std::size_t>(i)].max;
    }
    return a.colPivHouseholderQr().solve(y)(0);
}

} // namespace detail

inline constexpr std::size_t kMinSectionPoints = 9;

/// Extreme eigenvalues of vol^{-1} times the Gram matrix of
/// {rho(mu) g : mu in L°, |mu| <= radius}. Sections at radius/2, radius/sqrt2
/// and radius are solved; their extremes are extrapolated in 1/N (finite
/// sections of a Laurent operator approach the symbol extrema like 1/N).
/// The raw largest-section eigenvalues are kept in raw_lower/raw_upper.
inline FrameBoundsResult frame_bounds_gram(const Window& g, const Lattice& l,
                                           double section_radius = kDefaultSectionRadius,
                                           double target_tail = 1e-12) {
    detail::require_normalized(g);
    if (g.dim() != l.dim()) throw InvalidArgument("frame_bounds_gram: dimension mismatch");
    const Lattice adj = adjoint_lattice(l);
    const auto terms = detail::adjoint_ambiguity_terms(g, l, target_tail);
    std::map<std::vector<int>, cplx> amb;
    for (const auto& t : terms.terms) amb[{t.k.data(), t.k.data() + t.k.size()}] = t.value;

    const std::array<double, 3> radii{section_radius / 2.0, section_radius / std::sqrt(2.0), section_radius};
    if (enumerate_indexed(adj, radii[0]).size() < kMinSectionPoints)
        throw InvalidArgument("frame_bounds_gram: section too small (fewer than 9 points at half the radius)");
    std::array<detail::SectionSpectrum, 3> spec;
    for (std::size_t i = 0; i < 3; ++i) spec[i] = detail::gram_section(adj, l.volume(), radii[i], amb);

    // Nested principal sections interlace.
    for (std::size_t i = 1; i < 3; ++i) {
        const double slack = 1e-10 * std::max(1.0, spec[i].max);
        if (spec[i].min > spec[i - 1].min + slack || spec[i].max < spec[i - 1].max - slack)
            throw ConvergenceError("frame_bounds_gram: section eigenvalues are not monotone in the radius");
    }

    FrameBoundsResult r;
    r.method = BoundsMethod::gram_finite_section;
    r.raw_lower = spec[2].min;
    r.raw_upper = spec[2].max;
    r.section_points = spec[2].points;
    r.truncation_radius = section_radius;
    r.lattice = l.generator();
    r.tail_estimate = terms.tail_estimate;
    r.terms_used = terms.terms.size();

    const bool distinct = spec[0].points < spec[1].points && spec[1].points < spec[2].points;
    double lo = spec[2].min, hi = spec[2].max;
    if (distinct) {
        lo = std::min(detail::extrapolate(spec, true), spec[2].min);
        hi = std::max(detail::extrapolate(spec, false), spec[2].max);
    }
    r.lower_A = std::max(lo, 0.0);
    r.upper_B = hi;
    // Converged when the extrapolation correction is small on the bound scale.
    const double scale = std::max(1.0, hi);
    r.converged = distinct && std::abs(spec[2].min - lo) <= 1e-2 * scale && std::abs(spec[2].max - hi) <= 1e-2 * scale;
    return r;
}

/// Janssen's separable form for L = alpha Z x beta Z, d = 1:
///   (alpha beta)^{-1} sum_{k,l} V g(k/beta, l/alpha) e^{2 pi i (k x + l w)},
/// extrema over one period (x, w) in [0,1)^2.
inline FrameBoundsResult janssen_separable(const Window& g, double alpha, double beta, int grid_res = kDefaultGridRes,
                                           double target_tail = kDefaultTargetTail,
                                           std::size_t cap = kDefaultPointCap) {
    detail::require_normalized(g);
    if (g.dim() != 1) throw InvalidArgument("janssen_separable: d = 1 windows only");
    if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidArgument("janssen_separable: alpha, beta must be positive");
    const double red = 1.0 / (alpha * beta);
    const double n = std::round(red);
    if (n < 1.0 || std::abs(red - n) > 1e-9 * n)
        throw InvalidArgument("janssen_separable: (alpha beta)^{-1} is not an integer");
    if (static_cast<long>(n) % 2 != 0)
        throw AlternatingPhaseError("janssen_separable: odd redundancy, the phase factor alternates");

    // Points (k/beta, l/alpha), k, l in Z.
    const Lattice coeff_lattice = separable_lattice(1.0 / beta, 1.0 / alpha);
    const auto terms = collect_lattice_terms([&](const PhaseSpacePoint& p) { return stft(g, g, p); }, coeff_lattice,
                                             origin(1), target_tail * alpha * beta);
    std::vector<std::pair<Eigen::VectorXi, cplx>> c;
    for (const auto& t : terms.terms) c.emplace_back(t.k, t.value);
    const detail::TorusSeries series(std::move(c), red);
    const auto ext = detail::torus_extrema(series, grid_res, cap);

    FrameBoundsResult r;
    r.method = BoundsMethod::janssen_separable;
    r.lower_A = detail::clamp_lower(ext.min);
    r.upper_B = ext.max;
    r.grid_res = ext.res;
    r.truncation_radius = terms.truncation_radius;
    r.converged = ext.converged;
    r.lattice = separable_lattice(alpha, beta).generator();
    r.tail_estimate = terms.tail_estimate;
    r.terms_used = terms.terms.size();
    r.argmin = ext.argmin;
    r.argmax = ext.argmax;
    return r;
}

// ---------------------------------------------------------------------------
// Verification of the vanishing lower bound for odd windows

inline constexpr double kPhiZeroTol = 1e-8;
inline constexpr double kLowerRatioTol = 1e-6;

struct TheoremReport {
    std::string window;
    bool parity_odd = false;
    bool symplectic = false;
    bool volume_ok = false;
    bool hypotheses_met = false;
    std::optional<double> phi_at_zero;
    std::optional<double> lower_A;
    std::optional<double> upper_B;
    bool converged = false;
    /// "not_a_frame", "assertion_failed" or "hypotheses_not_met".
    std::string conclusion;
    std::string message;
    Eigen::MatrixXd lattice;

    bool passed() const { return !hypotheses_met || conclusion == "not_a_frame"; }
};

inline TheoremReport verify_theorem_main(const Window& g, const Lattice& l, int grid_res = kDefaultGridRes,
                                         double target_tail = kDefaultTargetTail) {
    TheoremReport rep;
    rep.window = g.label();
    rep.lattice = l.generator();
    if (g.dim() != l.dim()) {
        rep.conclusion = "hypotheses_not_met";
        rep.message = "window and lattice dimensions differ";
        return rep;
    }
    const int d = l.dim();
    rep.parity_odd = g.parity() == Parity::odd;
    rep.symplectic = is_symplectic_lattice(l).is_symplectic;
    rep.volume_ok = std::abs(l.volume() - std::pow(2.0, -d)) <= 1e-10;
    rep.hypotheses_met = rep.parity_odd && rep.symplectic && rep.volume_ok;

    const auto root = redundancy_root(l);
    if (root && *root % 2 == 0 && g.decay_ok()) {
        try {
            rep.phi_at_zero = phi_series(g, l, origin(d), target_tail);
            const auto b = frame_bounds_janssen(g, l, grid_res, target_tail);
            rep.lower_A = b.lower_A;
            rep.upper_B = b.upper_B;
            rep.converged = b.converged;
        } catch (const Error& e) {
            rep.message = e.what();
        }
    }

    if (!rep.hypotheses_met) {
        rep.conclusion = "hypotheses_not_met";
        if (rep.message.empty()) {
            if (!rep.parity_odd) rep.message = "window is not odd";
            else if (!rep.symplectic) rep.message = "lattice is not symplectic";
            else rep.message = "lattice volume is not 2^{-d}";
        }
        return rep;
    }
    const bool ok = rep.phi_at_zero && rep.lower_A && rep.upper_B && std::abs(*rep.phi_at_zero) <= kPhiZeroTol &&
                    *rep.lower_A <= kLowerRatioTol * *rep.upper_B;
    rep.conclusion = ok ? "not_a_frame" : "assertion_failed";
    if (ok) rep.message = "lower frame bound vanishes";
    return rep;
}

// ---------------------------------------------------------------------------
// Lattice-shape scans, M = s [[1, tau], [0, h]] at fixed density (d = 1)

struct ShapeGrid {
    std::vector<double> tau;
    std::vector<double> h;

    static std::vector<double> linspace(double lo, double hi, int n) {
        std::vector<double> v;
        for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
        return v;
    }
};

struct ScanRow {
    double s = 0.0, tau = 0.0, h = 0.0;
    double lower_A = std::numeric_limits<double>::quiet_NaN();
    double upper_B = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    std::string error; // empty unless the row failed
};

struct ScanOptions {
    int grid_res = kDefaultGridRes;
    double target_tail = kDefaultTargetTail;
    double section_radius = kDefaultSectionRadius;
    unsigned threads = 0; // 0: GABOR_THREADS or hardware concurrency
};

inline unsigned configured_threads(unsigned requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GABOR_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Bound surface over the shape grid, tau outer and h inner. Uses the Janssen
/// series when density^{1/d} is an even integer and Gram sections otherwise.
inline std::vector<ScanRow> scan_lattices(const Window& g, double density, const ShapeGrid& grid,
                                          const ScanOptions& opt = {}) {
    if (g.dim() != 1) throw InvalidArgument("scan_lattices: shape grids are two-dimensional (d = 1)");
    if (!(density > 0.0)) throw InvalidArgument("scan_lattices: density must be positive");
    const double n = std::round(density);
    const bool janssen = std::abs(density - n) <= 1e-9 * n && static_cast<long>(n) % 2 == 0;

    std::vector<ScanRow> rows;
    for (double tau : grid.tau)
        for (double h : grid.h) rows.push_back({std::sqrt(1.0 / (density * h)), tau, h});

    auto work = [&](std::size_t i) {
        ScanRow& row = rows[i];
        try {
            const Lattice l = shape_lattice(row.tau, row.h, density);
            const auto b = janssen ? frame_bounds_janssen(g, l, opt.grid_res, opt.target_tail)
                                   : frame_bounds_gram(g, l, opt.section_radius);
            row.lower_A = b.lower_A;
            row.upper_B = b.upper_B;
            row.converged = b.converged;
        } catch (const Error& e) {
            row.error = e.what();
            row.converged = false;
        }
    };
    const unsigned threads = std::min<unsigned>(configured_threads(opt.threads), static_cast<unsigned>(rows.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < rows.size(); i += threads) work(i);
            });
        for (auto& th : pool) th.join();
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline nlohmann::json vector_json(const Eigen::VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline nlohmann::json to_json(const FrameBoundsResult& r) {
    nlohmann::json j = {{"method", to_string(r.method)},
                        {"lattice", {{"M", matrix_json(r.lattice)}}},
                        {"A", r.lower_A},
                        {"B", r.upper_B},
                        {"converged", r.converged},
                        {"grid_res", r.grid_res},
                        {"truncation_radius", r.truncation_radius}};
    nlohmann::json diag = {{"tail_estimate", r.tail_estimate}, {"terms_used", r.terms_used}};
    if (r.argmin) diag["argmin"] = vector_json(*r.argmin);
    if (r.argmax) diag["argmax"] = vector_json(*r.argmax);
    if (r.raw_lower) diag["raw_lower"] = *r.raw_lower;
    if (r.raw_upper) diag["raw_upper"] = *r.raw_upper;
    if (r.section_points) diag["section_points"] = *r.section_points;
    j["diagnostics"] = diag;
    return j;
}

inline nlohmann::json to_json(const TheoremReport& r) {
    nlohmann::json j = {{"window", r.window},
                        {"lattice", {{"M", matrix_json(r.lattice)}}},
                        {"hypotheses_met", r.hypotheses_met},
                        {"hypotheses", {{"parity_odd", r.parity_odd}, {"symplectic", r.symplectic}, {"volume_ok", r.volume_ok}}},
                        {"phi_at_zero", nullptr},
                        {"lower_A", nullptr},
                        {"upper_B", nullptr},
                        {"converged", r.converged},
                        {"conclusion", r.conclusion},
                        {"message", r.message}};
    if (r.phi_at_zero) j["phi_at_zero"] = *r.phi_at_zero;
    if (r.lower_A) j["lower_A"] = *r.lower_A;
    if (r.upper_B) j["upper_B"] = *r.upper_B;
    return j;
}

inline void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
    os << "s,tau,h,A,B,converged\n" << std::setprecision(17);
    for (const auto& r : rows)
        os << r.s << ',' << r.tau << ',' << r.h << ',' << r.lower_A << ',' << r.upper_B << ','
           << (r.converged ? "true" : "false") << '\n';
}

} // namespace gabor
