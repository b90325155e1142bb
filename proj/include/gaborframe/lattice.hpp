#pragma once

// Full-rank lattices Lambda = M Z^{2d} in phase space R^{2d}, the symplectic
// form, dual/adjoint lattices and point enumeration.
//
// Phase-space coordinates are stored as one vector (x_1..x_d, w_1..w_d).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaborframe/errors.hpp"

namespace gabor {

inline constexpr double kPi = 3.14159265358979323846;

/// Default cap on enumerated lattice points and grid sizes.
inline constexpr std::size_t kDefaultPointCap = 10'000'000;

/// lambda = (x, omega) with x, omega in R^d.
class PhaseSpacePoint {
public:
    PhaseSpacePoint() = default;

    explicit PhaseSpacePoint(Eigen::VectorXd coords) : coords_(std::move(coords)) {
        if (coords_.size() == 0 || coords_.size() % 2 != 0)
            throw InvalidArgument("phase-space point needs an even, positive number of coordinates");
        if (!coords_.allFinite())
            throw InvalidArgument("phase-space point has non-finite coordinates");
    }

    PhaseSpacePoint(const Eigen::VectorXd& x, const Eigen::VectorXd& omega)
        : PhaseSpacePoint(concat(x, omega)) {
        if (x.size() != omega.size())
            throw InvalidArgument("x and omega must have the same dimension");
    }

    /// d = 1 convenience.
    PhaseSpacePoint(double x, double omega) : PhaseSpacePoint(Eigen::Vector2d(x, omega)) {}

    int dim() const { return static_cast<int>(coords_.size() / 2); }
    const Eigen::VectorXd& coords() const { return coords_; }
    auto x() const { return coords_.head(dim()); }
    auto omega() const { return coords_.tail(dim()); }
    double norm() const { return coords_.norm(); }

    PhaseSpacePoint operator+(const PhaseSpacePoint& o) const { return PhaseSpacePoint(coords_ + o.coords_); }
    PhaseSpacePoint operator-(const PhaseSpacePoint& o) const { return PhaseSpacePoint(coords_ - o.coords_); }
    PhaseSpacePoint operator-() const { return PhaseSpacePoint(Eigen::VectorXd(-coords_)); }
    PhaseSpacePoint operator*(double s) const { return PhaseSpacePoint(Eigen::VectorXd(s * coords_)); }

private:
    static Eigen::VectorXd concat(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        Eigen::VectorXd v(a.size() + b.size());
        v << a, b;
        return v;
    }

    Eigen::VectorXd coords_;
};

/// Standard symplectic matrix J = [[0, I], [-I, 0]] of side 2d.
inline Eigen::MatrixXd symplectic_j(int d) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    j.topRightCorner(d, d) = Eigen::MatrixXd::Identity(d, d);
    j.bottomLeftCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
    return j;
}

/// sigma(l, l') = x.w' - w.x' on raw coordinate vectors.
inline double symplectic_form(const Eigen::Ref<const Eigen::VectorXd>& l,
                              const Eigen::Ref<const Eigen::VectorXd>& lp) {
    if (l.size() != lp.size() || l.size() % 2 != 0)
        throw InvalidArgument("symplectic_form: dimension mismatch");
    const auto d = l.size() / 2;
    return l.head(d).dot(lp.tail(d)) - l.tail(d).dot(lp.head(d));
}

inline double symplectic_form(const PhaseSpacePoint& l, const PhaseSpacePoint& lp) {
    return symplectic_form(l.coords(), lp.coords());
}

struct SymplecticCheck {
    bool is_symplectic = false;
    std::optional<double> scale_c;
    double residual = 0.0; // max-norm of (S/c)^T J (S/c) - J
};

inline constexpr double kSymplecticTol = 1e-9;

/// Tests whether S = c * S0 with S0 in Sp(d), c = |det S|^{1/2d}.
inline SymplecticCheck is_symplectic_matrix(const Eigen::MatrixXd& s, double tol = kSymplecticTol) {
    if (s.rows() != s.cols() || s.rows() == 0 || s.rows() % 2 != 0)
        throw InvalidArgument("is_symplectic_matrix: matrix must be square with even side");
    if (!(tol > 0.0))
        throw InvalidArgument("is_symplectic_matrix: tolerance must be positive");
    const double det = s.determinant();
    if (!std::isfinite(det) || std::abs(det) <= 1e-300)
        throw InvalidArgument("is_symplectic_matrix: singular matrix");
    const int d = static_cast<int>(s.rows() / 2);
    const double c = std::pow(std::abs(det), 1.0 / (2.0 * d));
    const Eigen::MatrixXd n = s / c;
    const Eigen::MatrixXd j = symplectic_j(d);
    SymplecticCheck out;
    out.scale_c = c;
    out.residual = (n.transpose() * j * n - j).cwiseAbs().maxCoeff();
    out.is_symplectic = out.residual <= tol;
    return out;
}

/// Lattice point with its integer coordinates: point = M * k.
struct IndexedPoint {
    Eigen::VectorXi k;
    PhaseSpacePoint point;
};

/// Lambda = M Z^{2d}. Immutable.
class Lattice {
public:
    explicit Lattice(Eigen::MatrixXd generator) : generator_(std::move(generator)) {
        if (generator_.rows() != generator_.cols() || generator_.rows() == 0 || generator_.rows() % 2 != 0)
            throw InvalidArgument("lattice generator must be square with even side");
        if (!generator_.allFinite())
            throw InvalidArgument("lattice generator has non-finite entries");
        volume_ = std::abs(generator_.determinant());
        const double scale = std::pow(generator_.cwiseAbs().maxCoeff(), static_cast<double>(generator_.rows()));
        if (!(volume_ > 1e-14 * scale) || !(volume_ > 0.0))
            throw InvalidArgument("lattice generator is singular");
    }

    int dim() const { return static_cast<int>(generator_.rows() / 2); }
    const Eigen::MatrixXd& generator() const { return generator_; }
    double volume() const { return volume_; }
    double density() const { return 1.0 / volume_; }

    PhaseSpacePoint point(const Eigen::VectorXi& k) const {
        return PhaseSpacePoint(Eigen::VectorXd(generator_ * k.cast<double>()));
    }

    Lattice scaled(double s) const { return Lattice(s * generator_); }

    /// Length of the shortest nonzero lattice vector (searched in a ball).
    double shortest_vector_length() const;

private:
    Eigen::MatrixXd generator_;
    double volume_ = 0.0;
};

/// Lambda^perp = M^{-T} Z^{2d}.
inline Lattice dual_lattice(const Lattice& l) {
    return Lattice(l.generator().inverse().transpose());
}

/// Lambda^o = J M^{-T} Z^{2d}. sigma(lambda^o, lambda) is an integer for
/// every lambda in Lambda.
inline Lattice adjoint_lattice(const Lattice& l) {
    return Lattice(symplectic_j(l.dim()) * l.generator().inverse().transpose());
}

inline SymplecticCheck is_symplectic_lattice(const Lattice& l, double tol = kSymplecticTol) {
    return is_symplectic_matrix(l.generator(), tol);
}

namespace detail {

// Box bound on |k_i| for points with |M k| <= radius.
inline Eigen::VectorXi index_box(const Lattice& l, double radius) {
    const Eigen::MatrixXd inv = l.generator().inverse();
    Eigen::VectorXi box(inv.rows());
    for (Eigen::Index i = 0; i < inv.rows(); ++i)
        box(i) = static_cast<int>(std::floor(radius * inv.row(i).norm() * (1.0 + 1e-12))) ;
    return box;
}

inline double ball_volume(int dim, double r) {
    return std::pow(kPi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0) * std::pow(r, dim);
}

} // namespace detail

/// All lattice points with |M k| <= radius, lexicographic in k.
inline std::vector<IndexedPoint> enumerate_indexed(const Lattice& l, double radius,
                                                   std::size_t cap = kDefaultPointCap) {
    if (!(radius >= 0.0) || !std::isfinite(radius))
        throw InvalidArgument("enumerate_points: radius must be finite and >= 0");
    const int n = 2 * l.dim();
    const Eigen::VectorXi box = detail::index_box(l, radius);
    double box_count = 1.0;
    for (int i = 0; i < n; ++i) box_count *= 2.0 * box(i) + 1.0;
    const double expected = detail::ball_volume(n, radius) / l.volume();
    if (expected > static_cast<double>(cap) || box_count > 64.0 * static_cast<double>(cap))
        throw CapExceeded("enumerate_points: radius " + std::to_string(radius) +
                          " exceeds the point cap");

    const double r2 = radius * radius * (1.0 + 1e-12) + 1e-300;
    std::vector<IndexedPoint> out;
    Eigen::VectorXi k = -box;
    Eigen::VectorXd p(n);
    const Eigen::MatrixXd& m = l.generator();
    while (true) {
        p.noalias() = m * k.cast<double>();
        if (p.squaredNorm() <= r2) {
            if (out.size() >= cap)
                throw CapExceeded("enumerate_points: point cap exceeded");
            out.push_back({k, PhaseSpacePoint(p)});
        }
        int i = n - 1;
        while (i >= 0 && k(i) == box(i)) {
            k(i) = -box(i);
            --i;
        }
        if (i < 0) break;
        ++k(i);
    }
    return out;
}

inline std::vector<PhaseSpacePoint> enumerate_points(const Lattice& l, double radius,
                                                     std::size_t cap = kDefaultPointCap) {
    auto idx = enumerate_indexed(l, radius, cap);
    std::vector<PhaseSpacePoint> out;
    out.reserve(idx.size());
    for (auto& p : idx) out.push_back(std::move(p.point));
    return out;
}

inline double Lattice::shortest_vector_length() const {
    // Any basis vector bounds the shortest length from above.
    double r = std::sqrt(generator_.colwise().squaredNorm().minCoeff());
    double best = r;
    for (const auto& p : enumerate_indexed(*this, r)) {
        const double len = p.point.norm();
        if (len > 0.0 && len < best) best = len;
    }
    return best;
}

/// res^{2d} points M (j / res), j in {0..res-1}^{2d}, lexicographic in j.
inline std::vector<PhaseSpacePoint> fundamental_domain_grid(const Lattice& l, int res,
                                                            std::size_t cap = kDefaultPointCap) {
    if (res < 1) throw InvalidArgument("fundamental_domain_grid: res must be >= 1");
    const int n = 2 * l.dim();
    const double count = std::pow(static_cast<double>(res), n);
    if (count > static_cast<double>(cap))
        throw CapExceeded("fundamental_domain_grid: res^{2d} exceeds the point cap");
    std::vector<PhaseSpacePoint> out;
    out.reserve(static_cast<std::size_t>(count));
    Eigen::VectorXi j = Eigen::VectorXi::Zero(n);
    while (true) {
        out.emplace_back(Eigen::VectorXd(l.generator() * (j.cast<double>() / res)));
        int i = n - 1;
        while (i >= 0 && j(i) == res - 1) {
            j(i) = 0;
            --i;
        }
        if (i < 0) break;
        ++j(i);
    }
    return out;
}

/// v^{1/2d} I_{2d}.
inline Lattice square_lattice(double volume, int d = 1) {
    if (!(volume > 0.0)) throw InvalidArgument("square_lattice: volume must be positive");
    if (d < 1) throw InvalidArgument("square_lattice: d must be >= 1");
    return Lattice(std::pow(volume, 1.0 / (2.0 * d)) * Eigen::MatrixXd::Identity(2 * d, 2 * d));
}

/// c [[1, 1/2], [0, sqrt(3)/2]] with c = sqrt(2v / sqrt 3); d = 1 only.
inline Lattice hexagonal_lattice(double volume) {
    if (!(volume > 0.0)) throw InvalidArgument("hexagonal_lattice: volume must be positive");
    const double c = std::sqrt(2.0 * volume / std::sqrt(3.0));
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
    return Lattice(c * m);
}

/// alpha Z x beta Z.
inline Lattice separable_lattice(double alpha, double beta) {
    Eigen::MatrixXd m(2, 2);
    m << alpha, 0.0, 0.0, beta;
    return Lattice(m);
}

/// s [[1, tau], [0, h]] with s chosen so that the volume is 1/density.
inline Lattice shape_lattice(double tau, double h, double density) {
    if (!(h > 0.0) || !(density > 0.0))
        throw InvalidArgument("shape_lattice: h and density must be positive");
    const double s = std::sqrt(1.0 / (density * h));
    Eigen::MatrixXd m(2, 2);
    m << 1.0, tau, 0.0, h;
    return Lattice(s * m);
}

/// Point-set agreement of two lattices inside a ball (generators are not
/// unique, so this is the lattice equality used throughout).
inline bool same_point_set(const Lattice& a, const Lattice& b, double radius = 5.0, double tol = 1e-10) {
    if (a.dim() != b.dim()) return false;
    auto covers = [&](const Lattice& p, const Lattice& q) {
        // Every point of p inside the ball must appear in q (slightly larger ball).
        const auto ps = enumerate_points(p, radius);
        auto qs = enumerate_points(q, radius + 10.0 * tol + 1e-9);
        std::vector<bool> used(qs.size(), false);
        for (const auto& x : ps) {
            bool found = false;
            for (std::size_t i = 0; i < qs.size(); ++i) {
                if (!used[i] && (qs[i].coords() - x.coords()).cwiseAbs().maxCoeff() <= tol) {
                    used[i] = true;
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
        return true;
    };
    return covers(a, b) && covers(b, a);
}

} // namespace gabor
