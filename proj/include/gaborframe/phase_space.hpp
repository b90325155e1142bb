#pragma once

// STFT, ambiguity function and Wigner distribution by quadrature, plus
// gridded phase-space functions with the symplectic Fourier transform and
// isotropic dilation.
//
//   V_g f(x,w) = int f(t) conj(g(t-x)) e^{-2 pi i w.t} dt
//   A_g f(x,w) = int f(t+x/2) conj(g(t-x/2)) e^{-2 pi i w.t} dt
//   W_g f(x,w) = int f(x+t/2) conj(g(x-t/2)) e^{-2 pi i w.t} dt
//
// Tensor-product windows make all three separable, so every evaluation is a
// product of 1D integrals.

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "gaborframe/errors.hpp"
#include "gaborframe/lattice.hpp"
#include "gaborframe/quadrature.hpp"
#include "gaborframe/windows.hpp"

namespace gabor {

namespace detail {

inline void check_pair(const Window& f, const Window& g, const PhaseSpacePoint& l) {
    if (f.dim() != g.dim()) throw InvalidArgument("windows have different dimensions");
    if (l.dim() != f.dim()) throw InvalidArgument("phase-space point dimension does not match windows");
}

inline cplx cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

// int over [lo, hi] of f_i(a t + b) conj(g_i(c t + e)) e^{-2 pi i w t} dt
inline cplx factor_integral(const Window& f, const Window& g, int i, double a, double b, double c, double e,
                            double w) {
    // Restrict to where both factors are non-negligible.
    const double rf = f.support_radius(), rg = g.support_radius();
    const double f1 = (-rf - b) / a, f2 = (rf - b) / a;
    const double g1 = (-rg - e) / c, g2 = (rg - e) / c;
    const double lo = std::max(std::min(f1, f2), std::min(g1, g2));
    const double hi = std::min(std::max(f1, f2), std::max(g1, g2));
    if (!(hi > lo)) return 0.0;
    auto integrand = [&](double t) {
        return f.factor(i, a * t + b) * std::conj(g.factor(i, c * t + e)) * cis(-2.0 * kPi * w * t);
    };
    return quad::integrate(integrand, lo, hi, std::abs(w));
}

} // namespace detail

inline cplx stft(const Window& f, const Window& g, const PhaseSpacePoint& l) {
    detail::check_pair(f, g, l);
    cplx v = 1.0;
    for (int i = 0; i < f.dim(); ++i)
        v *= detail::factor_integral(f, g, i, 1.0, 0.0, 1.0, -l.x()(i), l.omega()(i));
    return v;
}

inline cplx ambiguity(const Window& f, const Window& g, const PhaseSpacePoint& l) {
    detail::check_pair(f, g, l);
    cplx v = 1.0;
    for (int i = 0; i < f.dim(); ++i) {
        const double x = l.x()(i);
        v *= detail::factor_integral(f, g, i, 1.0, 0.5 * x, 1.0, -0.5 * x, l.omega()(i));
    }
    return v;
}

inline cplx wigner(const Window& f, const Window& g, const PhaseSpacePoint& l) {
    detail::check_pair(f, g, l);
    cplx v = 1.0;
    for (int i = 0; i < f.dim(); ++i) {
        const double x = l.x()(i);
        v *= detail::factor_integral(f, g, i, 0.5, x, -0.5, x, l.omega()(i));
    }
    return v;
}

/// W_g f(l) = 2^d A_{g reflected} f(2 l).
inline cplx wigner_via_ambiguity(const Window& f, const Window& g, const PhaseSpacePoint& l) {
    return std::pow(2.0, f.dim()) * ambiguity(f, reflect(g), l * 2.0);
}

/// Shorthand for the auto-ambiguity A g = A_g g.
inline cplx ambiguity(const Window& g, const PhaseSpacePoint& l) { return ambiguity(g, g, l); }

// ---------------------------------------------------------------------------
// Gridded phase-space functions

struct GridAxis {
    double min = 0.0;
    double max = 0.0;
    int count = 0;

    double step() const { return count > 1 ? (max - min) / (count - 1) : 0.0; }
    double at(int j) const { return min + step() * j; }
    double extent() const { return std::max(std::abs(min), std::abs(max)); }
};

/// Samples of F on a rectangular grid in R^{2d}; values are row-major with
/// the last axis fastest. Axes are ordered (x_1..x_d, w_1..w_d).
struct PhaseSpaceFunctionSample {
    std::vector<GridAxis> axes;
    std::vector<cplx> values;
    std::string meta;

    int dim() const { return static_cast<int>(axes.size() / 2); }

    std::size_t size() const {
        std::size_t n = 1;
        for (const auto& a : axes) n *= static_cast<std::size_t>(a.count);
        return n;
    }

    /// Multi-index of the flat position `flat`.
    std::vector<int> unravel(std::size_t flat) const {
        std::vector<int> idx(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            idx[a] = static_cast<int>(flat % static_cast<std::size_t>(axes[a].count));
            flat /= static_cast<std::size_t>(axes[a].count);
        }
        return idx;
    }

    Eigen::VectorXd coordinate(std::size_t flat) const {
        const auto idx = unravel(flat);
        Eigen::VectorXd c(static_cast<Eigen::Index>(axes.size()));
        for (std::size_t a = 0; a < axes.size(); ++a) c(static_cast<Eigen::Index>(a)) = axes[a].at(idx[a]);
        return c;
    }

    void validate() const {
        if (axes.empty() || axes.size() % 2 != 0) throw InvalidArgument("phase-space grid needs 2d axes");
        for (const auto& a : axes)
            if (a.count < 2 || !(a.max > a.min)) throw InvalidArgument("phase-space grid axes need count >= 2 and max > min");
        if (values.size() != size()) throw InvalidArgument("phase-space sample shape does not match grid");
    }
};

/// Evaluates F at every grid point.
template <class F>
PhaseSpaceFunctionSample sample_function(F&& fn, std::vector<GridAxis> axes, std::string meta) {
    PhaseSpaceFunctionSample s{std::move(axes), {}, std::move(meta)};
    if (s.axes.empty() || s.axes.size() % 2 != 0) throw InvalidArgument("phase-space grid needs 2d axes");
    for (const auto& a : s.axes)
        if (a.count < 2 || !(a.max > a.min)) throw InvalidArgument("phase-space grid axes need count >= 2 and max > min");
    s.values.resize(s.size());
    for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = fn(PhaseSpacePoint(s.coordinate(i)));
    return s;
}

/// Same axis spec on all 2d axes.
inline std::vector<GridAxis> uniform_axes(int d, double lo, double hi, int count) {
    return std::vector<GridAxis>(static_cast<std::size_t>(2 * d), GridAxis{lo, hi, count});
}

namespace detail {

// Contract axis `axis` of a row-major tensor with kernel (n_out x n_in).
inline std::vector<cplx> contract_axis(const std::vector<cplx>& in, std::vector<int>& shape, std::size_t axis,
                                       const Eigen::MatrixXcd& kernel) {
    std::size_t outer = 1, inner = 1;
    for (std::size_t a = 0; a < axis; ++a) outer *= static_cast<std::size_t>(shape[a]);
    for (std::size_t a = axis + 1; a < shape.size(); ++a) inner *= static_cast<std::size_t>(shape[a]);
    const auto n_in = static_cast<std::size_t>(shape[axis]);
    const auto n_out = static_cast<std::size_t>(kernel.rows());
    std::vector<cplx> out(outer * n_out * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t r = 0; r < n_out; ++r)
            for (std::size_t c = 0; c < n_in; ++c) {
                const cplx k = kernel(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
                const cplx* src = &in[(o * n_in + c) * inner];
                cplx* dst = &out[(o * n_out + r) * inner];
                for (std::size_t i = 0; i < inner; ++i) dst[i] += k * src[i];
            }
    shape[axis] = static_cast<int>(n_out);
    return out;
}

// out[perm-applied index] where output axis b takes tensor axis src_axis[b].
inline std::vector<cplx> permute_axes(const std::vector<cplx>& in, const std::vector<int>& shape,
                                      const std::vector<std::size_t>& src_axis) {
    const std::size_t n = shape.size();
    std::vector<std::size_t> in_stride(n);
    std::size_t s = 1;
    for (std::size_t a = n; a-- > 0;) {
        in_stride[a] = s;
        s *= static_cast<std::size_t>(shape[a]);
    }
    std::vector<int> out_shape(n);
    for (std::size_t b = 0; b < n; ++b) out_shape[b] = shape[src_axis[b]];
    std::vector<cplx> out(in.size());
    std::vector<int> idx(n, 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        std::size_t src = 0;
        for (std::size_t b = 0; b < n; ++b) src += static_cast<std::size_t>(idx[b]) * in_stride[src_axis[b]];
        out[flat] = in[src];
        for (std::size_t b = n; b-- > 0;) {
            if (++idx[b] < out_shape[b]) break;
            idx[b] = 0;
        }
    }
    return out;
}

} // namespace detail

inline constexpr double kBoundaryDecay = 1e-8;

/// F_sigma F(l) = int F(l') e^{-2 pi i sigma(l, l')} dl', by trapezoidal
/// quadrature over the input grid (spectrally accurate for smooth F that has
/// decayed at the grid boundary).
inline PhaseSpaceFunctionSample symplectic_fourier(const PhaseSpaceFunctionSample& f,
                                                   const std::vector<GridAxis>& out_axes) {
    f.validate();
    const int d = f.dim();
    if (d != 1 && d != 2) throw InvalidArgument("symplectic_fourier: only 2d in {2, 4} is supported");
    if (out_axes.size() != f.axes.size()) throw InvalidArgument("symplectic_fourier: output grid dimension mismatch");
    for (const auto& a : out_axes)
        if (a.count < 2 || !(a.max > a.min)) throw InvalidArgument("symplectic_fourier: bad output axis");

    // Boundary decay relative to the peak.
    double peak = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double m = std::abs(f.values[i]);
        peak = std::max(peak, m);
        const auto idx = f.unravel(i);
        for (std::size_t a = 0; a < idx.size(); ++a)
            if (idx[a] == 0 || idx[a] == f.axes[a].count - 1) {
                edge = std::max(edge, m);
                break;
            }
    }
    if (peak > 0.0 && edge > kBoundaryDecay * peak)
        throw InvalidArgument("symplectic_fourier: input does not decay below 1e-8 at its grid boundary");

    // Input axis a pairs with output axis partner(a): x'_i <-> w_i and w'_i <-> x_i.
    auto partner = [d](std::size_t a) { return a < static_cast<std::size_t>(d) ? a + d : a - d; };
    for (std::size_t a = 0; a < f.axes.size(); ++a) {
        const double h = f.axes[a].step();
        if (out_axes[partner(a)].extent() * h > 0.5)
            throw InvalidArgument("symplectic_fourier: input grid too coarse for the requested output extent");
    }

    std::vector<int> shape;
    for (const auto& a : f.axes) shape.push_back(a.count);
    std::vector<cplx> data = f.values;
    for (std::size_t a = 0; a < f.axes.size(); ++a) {
        const GridAxis& in = f.axes[a];
        const GridAxis& out = out_axes[partner(a)];
        // sigma(l, l') = x.w' - w.x': sign -1 for input w' axes, +1 for input x' axes.
        const double sign = a < static_cast<std::size_t>(d) ? 1.0 : -1.0;
        const double h = in.step();
        Eigen::MatrixXcd kernel(out.count, in.count);
        for (int r = 0; r < out.count; ++r)
            for (int c = 0; c < in.count; ++c) {
                const double weight = (c == 0 || c == in.count - 1) ? 0.5 * h : h;
                kernel(r, c) = weight * detail::cis(sign * 2.0 * kPi * out.at(r) * in.at(c));
            }
        data = detail::contract_axis(data, shape, a, kernel);
    }
    // Tensor axis a now carries output axis partner(a); output axis b reads partner(b).
    std::vector<std::size_t> src(f.axes.size());
    for (std::size_t b = 0; b < src.size(); ++b) src[b] = partner(b);
    PhaseSpaceFunctionSample out;
    out.axes = out_axes;
    out.values = detail::permute_axes(data, shape, src);
    out.meta = "symplectic_fourier(" + f.meta + ")";
    return out;
}

/// D_alpha F(l) = F(alpha l): same values on a grid with extents divided by alpha.
inline PhaseSpaceFunctionSample dilate(const PhaseSpaceFunctionSample& f, double alpha) {
    if (!(alpha > 0.0)) throw InvalidArgument("dilate: alpha must be positive");
    PhaseSpaceFunctionSample out = f;
    for (auto& a : out.axes) {
        a.min /= alpha;
        a.max /= alpha;
    }
    std::ostringstream os;
    os << "dilate(" << f.meta << ", " << std::setprecision(17) << alpha << ")";
    out.meta = os.str();
    return out;
}

/// Max |a - b| over a common grid.
inline double max_abs_diff(const PhaseSpaceFunctionSample& a, const PhaseSpaceFunctionSample& b) {
    if (a.values.size() != b.values.size()) throw InvalidArgument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

// ---------------------------------------------------------------------------
// Serialization: CSV `x,omega,re,im` (2d = 2) or `x1,x2,w1,w2,re,im` (2d = 4)
// plus a JSON sidecar with the grid.

inline std::string csv_header(int d) {
    if (d == 1) return "x,omega,re,im";
    std::string h;
    for (int i = 1; i <= d; ++i) h += "x" + std::to_string(i) + ",";
    for (int i = 1; i <= d; ++i) h += "w" + std::to_string(i) + ",";
    return h + "re,im";
}

inline void write_csv(std::ostream& os, const PhaseSpaceFunctionSample& s) {
    s.validate();
    os << csv_header(s.dim()) << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const auto c = s.coordinate(i);
        for (Eigen::Index a = 0; a < c.size(); ++a) os << c(a) << ',';
        os << s.values[i].real() << ',' << s.values[i].imag() << '\n';
    }
}

inline nlohmann::json grid_sidecar(const PhaseSpaceFunctionSample& s) {
    nlohmann::json axes = nlohmann::json::array();
    const auto names = [&] {
        std::string h = csv_header(s.dim());
        std::vector<std::string> out;
        std::stringstream ss(h);
        for (std::string tok; std::getline(ss, tok, ',');) out.push_back(tok);
        return out;
    }();
    for (std::size_t a = 0; a < s.axes.size(); ++a)
        axes.push_back({{"name", names[a]}, {"min", s.axes[a].min}, {"max", s.axes[a].max}, {"count", s.axes[a].count}});
    return {{"dim_d", s.dim()}, {"axes", axes}, {"meta", s.meta}};
}

/// Writes `<stem>.csv` and `<stem>.json`.
inline void save_sample(const std::string& stem, const PhaseSpaceFunctionSample& s) {
    std::ofstream csv(stem + ".csv");
    if (!csv) throw InvalidArgument("cannot write " + stem + ".csv");
    write_csv(csv, s);
    std::ofstream js(stem + ".json");
    if (!js) throw InvalidArgument("cannot write " + stem + ".json");
    js << grid_sidecar(s).dump(2) << '\n';
}

/// Reads a sample written by save_sample.
inline PhaseSpaceFunctionSample load_sample(const std::string& stem) {
    std::ifstream js(stem + ".json");
    if (!js) throw InvalidArgument("cannot open " + stem + ".json");
    const auto meta = nlohmann::json::parse(js);
    PhaseSpaceFunctionSample s;
    s.meta = meta.at("meta").get<std::string>();
    for (const auto& a : meta.at("axes"))
        s.axes.push_back({a.at("min").get<double>(), a.at("max").get<double>(), a.at("count").get<int>()});
    std::ifstream csv(stem + ".csv");
    if (!csv) throw InvalidArgument("cannot open " + stem + ".csv");
    std::string line;
    std::getline(csv, line);
    if (line != csv_header(s.dim())) throw InvalidArgument("unexpected CSV header in " + stem + ".csv");
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::vector<double> cols;
        std::stringstream ss(line);
        for (std::string tok; std::getline(ss, tok, ',');) cols.push_back(std::stod(tok));
        if (cols.size() != s.axes.size() + 2) throw InvalidArgument("malformed row in " + stem + ".csv");
        s.values.emplace_back(cols[cols.size() - 2], cols.back());
    }
    s.validate();
    return s;
}

} // namespace gabor
