#pragma once

// Window functions g: L2-normalized Hermite functions, the standard
// Gaussian, and windows given by uniform samples. Multivariate windows are
// tensor products of 1D factors.
//
// Hermite convention: h_n(t) = (2 pi)^{1/4} psi_n(sqrt(2 pi) t), where psi_n
// are the orthonormal Hermite functions for e^{-x^2/2}. Then h_0(t) =
// 2^{1/4} e^{-pi t^2}, F h_n = (-i)^n h_n, and the ambiguity function of h_n
// is L_n(pi |z|^2) e^{-pi |z|^2 / 2}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "gaborframe/errors.hpp"
#include "gaborframe/lattice.hpp"

namespace gabor {

using cplx = std::complex<double>;

enum class WindowKind { hermite, gaussian, sampled };
enum class Parity { even, odd, neither };

inline const char* to_string(WindowKind k) {
    switch (k) {
    case WindowKind::hermite: return "hermite";
    case WindowKind::gaussian: return "gaussian";
    case WindowKind::sampled: return "sampled";
    }
    return "?";
}

inline const char* to_string(Parity p) {
    switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::neither: return "neither";
    }
    return "?";
}

/// +1 for even, -1 for odd, 0 otherwise.
inline int parity_sign(Parity p) { return p == Parity::even ? 1 : (p == Parity::odd ? -1 : 0); }

inline constexpr int kMaxHermiteOrder = 20;

/// Normalized 1D Hermite function h_n(t) by the three-term recurrence.
inline double hermite_function(int n, double t) {
    const double h0 = std::pow(2.0, 0.25) * std::exp(-kPi * t * t);
    if (n == 0) return h0;
    const double s = std::sqrt(2.0 * kPi) * t;
    double prev = h0;
    double cur = std::sqrt(2.0) * s * h0;
    for (int k = 1; k < n; ++k) {
        const double next = std::sqrt(2.0 / (k + 1)) * s * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Uniform 1D grid t_j = t_min + j h, j = 0..count-1.
struct UniformGrid {
    double t_min = 0.0;
    double step = 0.0;
    int count = 0;

    double t_max() const { return t_min + step * (count - 1); }
    double at(int j) const { return t_min + step * j; }
};

namespace detail {

struct SampledFactor {
    UniformGrid grid;
    std::vector<cplx> samples; // normalized
    boost::math::interpolators::cardinal_cubic_b_spline<double> re;
    boost::math::interpolators::cardinal_cubic_b_spline<double> im;

    cplx operator()(double t) const {
        if (t < grid.t_min || t > grid.t_max()) return 0.0;
        return {re(t), im(t)};
    }
};

inline boost::math::interpolators::cardinal_cubic_b_spline<double>
make_spline(const std::vector<double>& v, const UniformGrid& g) {
    return {v.data(), v.size(), g.t_min, g.step};
}

// Smallest multiple of 1/4 beyond which |f| stays below thresh * max|f|.
template <class F>
double decay_radius(F&& f, double thresh, double probe_limit) {
    double peak = 0.0;
    for (double t = -probe_limit; t <= probe_limit; t += 0.01) peak = std::max(peak, std::abs(f(t)));
    double r = probe_limit;
    for (double t = probe_limit; t >= 0.0; t -= 0.25) {
        bool small = true;
        for (double s = t; s <= probe_limit && small; s += 0.01)
            small = std::abs(f(s)) <= thresh * peak && std::abs(f(-s)) <= thresh * peak;
        if (!small) break;
        r = t;
    }
    return r;
}

} // namespace detail

/// A window g: immutable, cheap to copy (sampled data is shared).
class Window {
public:
    int dim() const { return static_cast<int>(index_.size()); }
    WindowKind kind() const { return kind_; }
    Parity parity() const { return parity_; }
    bool decay_ok() const { return decay_ok_; }
    bool reflected() const { return reflected_; }
    /// Hermite multi-index (all zeros for the Gaussian; empty meaning for sampled).
    const std::vector<int>& hermite_index() const { return index_; }
    /// |g| is negligible (< 1e-16 relative) outside [-R, R] per coordinate.
    double support_radius() const { return support_; }
    const std::shared_ptr<const detail::SampledFactor>& sampled_data() const { return sampled_; }

    /// Value of the i-th tensor factor at t.
    cplx factor(int i, double t) const {
        if (reflected_) t = -t;
        if (kind_ == WindowKind::sampled) return (*sampled_)(t);
        return hermite_function(index_[static_cast<std::size_t>(i)], t);
    }

    cplx operator()(const Eigen::Ref<const Eigen::VectorXd>& t) const {
        if (t.size() != dim()) throw InvalidArgument("window evaluation: dimension mismatch");
        cplx v = 1.0;
        for (int i = 0; i < dim(); ++i) v *= factor(i, t(i));
        return v;
    }

    /// Short label used in reports, e.g. "hermite:2" or "sampled".
    std::string label() const {
        std::ostringstream os;
        os << to_string(kind_);
        if (kind_ == WindowKind::hermite) {
            os << ':';
            for (std::size_t i = 0; i < index_.size(); ++i) os << (i ? "," : "") << index_[i];
        } else if (kind_ == WindowKind::gaussian && dim() > 1) {
            os << ':' << dim();
        }
        if (reflected_) os << " (reflected)";
        return os.str();
    }

private:
    friend Window hermite_window(const std::vector<int>&, int);
    friend Window gaussian_window(int);
    friend Window sampled_window(const std::vector<cplx>&, const UniformGrid&);
    friend Window reflect(const Window&);

    WindowKind kind_ = WindowKind::hermite;
    std::vector<int> index_;
    Parity parity_ = Parity::neither;
    bool decay_ok_ = true;
    bool reflected_ = false;
    double support_ = 8.0;
    std::shared_ptr<const detail::SampledFactor> sampled_;
};

/// Tensor-product Hermite function h_n, n in N_0^d. A single index with d > 1
/// is broadcast to every coordinate.
inline Window hermite_window(const std::vector<int>& n, int d) {
    if (d < 1) throw InvalidArgument("hermite_window: d must be >= 1");
    if (n.empty() || (n.size() != 1 && static_cast<int>(n.size()) != d))
        throw InvalidArgument("hermite_window: multi-index length must be 1 or d");
    Window w;
    w.kind_ = WindowKind::hermite;
    w.index_.assign(static_cast<std::size_t>(d), n.front());
    if (n.size() > 1) w.index_ = n;
    int total = 0;
    int max_order = 0;
    for (int k : w.index_) {
        if (k < 0) throw InvalidArgument("hermite_window: negative order");
        if (k > kMaxHermiteOrder)
            throw InvalidArgument("hermite_window: order " + std::to_string(k) + " exceeds cap " +
                                  std::to_string(kMaxHermiteOrder));
        total += k;
        max_order = std::max(max_order, k);
    }
    w.parity_ = total % 2 == 0 ? Parity::even : Parity::odd;
    w.decay_ok_ = true; // Schwartz functions lie in S0
    w.support_ = detail::decay_radius([&](double t) { return hermite_function(max_order, t); }, 1e-16,
                                      std::max(8.0, std::sqrt((2.0 * max_order + 1) / (2 * kPi)) + 6.0));
    return w;
}

inline Window hermite_window(int n, int d = 1) { return hermite_window(std::vector<int>{n}, d); }

/// g(t) = 2^{d/4} e^{-pi |t|^2}.
inline Window gaussian_window(int d = 1) {
    Window w = hermite_window(std::vector<int>{0}, d);
    w.kind_ = WindowKind::gaussian;
    return w;
}

/// 1D window from samples on a grid symmetric about 0 with an odd number of
/// points; cubic B-spline interpolation inside the grid, zero outside.
inline Window sampled_window(const std::vector<cplx>& samples, const UniformGrid& grid) {
    if (grid.count < 5 || grid.count % 2 == 0)
        throw InvalidArgument("sampled_window: grid needs an odd number (>= 5) of points");
    if (!(grid.step > 0.0)) throw InvalidArgument("sampled_window: grid step must be positive");
    if (static_cast<int>(samples.size()) != grid.count)
        throw InvalidArgument("sampled_window: sample count does not match grid");
    if (std::abs(grid.t_min + grid.t_max()) > 1e-9 * grid.step * grid.count)
        throw InvalidArgument("sampled_window: grid is not symmetric about 0");
    double peak = 0.0;
    for (const auto& s : samples) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw InvalidArgument("sampled_window: non-finite sample");
        peak = std::max(peak, std::abs(s));
    }
    if (peak == 0.0) throw InvalidArgument("sampled_window: all samples are zero");

    const std::size_t n = samples.size();
    auto build = [&](const std::vector<cplx>& s) {
        std::vector<double> re(n), im(n);
        for (std::size_t i = 0; i < n; ++i) {
            re[i] = s[i].real();
            im[i] = s[i].imag();
        }
        return std::make_shared<detail::SampledFactor>(
            detail::SampledFactor{grid, s, detail::make_spline(re, grid), detail::make_spline(im, grid)});
    };

    // Normalize: the spline is piecewise cubic, so one Gauss panel per grid
    // cell integrates |s|^2 exactly.
    auto raw = build(samples);
    using gl = boost::math::quadrature::gauss<double, 10>;
    double norm2 = 0.0;
    for (int j = 0; j + 1 < grid.count; ++j) {
        norm2 += gl::integrate([&](double t) { return std::norm((*raw)(t)); }, grid.at(j), grid.at(j + 1));
    }
    const double scale = 1.0 / std::sqrt(norm2);
    std::vector<cplx> normalized(samples);
    for (auto& s : normalized) s *= scale;

    Window w;
    w.kind_ = WindowKind::sampled;
    w.index_ = {0};
    w.sampled_ = build(normalized);

    const double tol = 1e-8 * peak;
    bool even = true, odd = true;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx a = samples[i], b = samples[n - 1 - i];
        even = even && std::abs(a - b) <= tol;
        odd = odd && std::abs(a + b) <= tol;
    }
    w.parity_ = even ? Parity::even : (odd ? Parity::odd : Parity::neither);

    const std::size_t outer = std::max<std::size_t>(1, n / 10);
    double edge = 0.0;
    for (std::size_t i = 0; i < outer; ++i) edge = std::max({edge, std::abs(samples[i]), std::abs(samples[n - 1 - i])});
    w.decay_ok_ = edge < 1e-6 * peak;
    w.support_ = grid.t_max();
    return w;
}

inline cplx evaluate(const Window& g, const Eigen::Ref<const Eigen::VectorXd>& t) { return g(t); }

inline cplx evaluate(const Window& g, double t) {
    Eigen::VectorXd v(1);
    v(0) = t;
    return g(v);
}

/// g_check(t) = g(-t).
inline Window reflect(const Window& g) {
    Window r = g;
    r.reflected_ = !g.reflected_;
    return r;
}

/// Reads a sampled window from CSV with header `t,re,im`.
inline Window read_window_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open window file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("window file is empty: " + path);
    line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }), line.end());
    if (line != "t,re,im") throw InvalidArgument("window file must start with header t,re,im");
    std::vector<double> ts;
    std::vector<cplx> vals;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double t, re, im;
        if (!(ls >> t >> re >> im)) throw InvalidArgument("malformed window row: " + line);
        ts.push_back(t);
        vals.emplace_back(re, im);
    }
    if (ts.size() < 5) throw InvalidArgument("window file needs at least 5 rows");
    UniformGrid grid{ts.front(), (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1),
                     static_cast<int>(ts.size())};
    for (std::size_t j = 0; j < ts.size(); ++j) {
        if (std::abs(ts[j] - grid.at(static_cast<int>(j))) > 1e-9 * std::max(1.0, std::abs(ts[j])) + 1e-6 * grid.step)
            throw InvalidArgument("window grid is not uniform");
    }
    return sampled_window(vals, grid);
}

} // namespace gabor
