#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "gaborframe/phase_space.hpp"
#include "oracles.hpp"

using namespace gabor;

namespace {

std::vector<PhaseSpacePoint> random_points(std::uint64_t seed, int n, double r) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-r, r);
    std::vector<PhaseSpacePoint> pts;
    for (int i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng));
    return pts;
}

cplx gaussian_2d(const PhaseSpacePoint& p) { return std::exp(-kPi * p.coords().squaredNorm()); }

} // namespace

TEST(Stft, NormalizedAtOrigin) {
    for (int n : {0, 1, 4}) {
        const Window g = hermite_window(n);
        EXPECT_NEAR(std::abs(stft(g, g, PhaseSpacePoint(0.0, 0.0)) - 1.0), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(ambiguity(g, g, PhaseSpacePoint(0.0, 0.0)) - 1.0), 0.0, 1e-12);
    }
}

TEST(Stft, GaussianMagnitude) {
    const Window g = gaussian_window();
    for (const auto& p : random_points(11, 20, 2.5)) {
        const double r2 = p.coords().squaredNorm();
        EXPECT_NEAR(std::abs(stft(g, g, p)), std::exp(-0.5 * kPi * r2), 1e-12);
    }
}

TEST(Ambiguity, PhaseRelationToStft) {
    const Window f = hermite_window(2), g = hermite_window(1);
    for (const auto& p : random_points(12, 100, 2.0)) {
        const double x = p.coords()(0), w = p.coords()(1);
        const cplx expect = std::polar(1.0, kPi * w * x) * stft(f, g, p);
        EXPECT_NEAR(std::abs(ambiguity(f, g, p) - expect), 0.0, 1e-9);
        EXPECT_NEAR(std::abs(ambiguity(f, g, p)), std::abs(stft(f, g, p)), 1e-9);
    }
}

TEST(Ambiguity, HermiteLaguerreClosedForm) {
    for (int n = 0; n <= 4; ++n) {
        const Window g = hermite_window(n);
        for (const auto& p : random_points(13 + static_cast<std::uint64_t>(n), 15, 2.0)) {
            const cplx a = ambiguity(g, g, p);
            EXPECT_NEAR(a.real(), oracle::hermite_ambiguity(n, p.coords()(0), p.coords()(1)), 1e-8);
            EXPECT_NEAR(a.imag(), 0.0, 1e-9);
        }
    }
}

TEST(Ambiguity, HermiteOneSignPattern) {
    const Window g = hermite_window(1);
    for (double r : {0.2, 0.5, 0.7, 1.0}) {
        const double expect = (1.0 - kPi * r * r) * std::exp(-0.5 * kPi * r * r);
        EXPECT_NEAR(ambiguity(g, g, PhaseSpacePoint(r, 0.0)).real(), expect, 1e-10);
    }
}

TEST(Ambiguity, CrossTermsMatchIndependentQuadrature) {
    const Window f = hermite_window(1), g = hermite_window(2);
    for (const auto& p : random_points(14, 10, 1.8)) {
        const double x = p.coords()(0), w = p.coords()(1);
        EXPECT_NEAR(std::abs(ambiguity(f, g, p) - oracle::cross_ambiguity(1, 2, x, w)), 0.0, 1e-9);
        EXPECT_NEAR(std::abs(wigner(f, g, p) - oracle::cross_wigner(1, 2, x, w)), 0.0, 1e-9);
    }
}

TEST(Ambiguity, Bounded) {
    const Window f = hermite_window(3), g = hermite_window(0);
    for (const auto& p : random_points(15, 40, 3.0)) EXPECT_LE(std::abs(ambiguity(f, g, p)), 1.0 + 1e-12);
}

TEST(Ambiguity, TwoDimensionalTensorProduct) {
    const Window g = hermite_window(std::vector<int>{1, 0}, 2);
    const PhaseSpacePoint p(Eigen::Vector2d(0.3, -0.2), Eigen::Vector2d(0.1, 0.4));
    const double expect = oracle::hermite_ambiguity(1, 0.3, 0.1) * oracle::hermite_ambiguity(0, -0.2, 0.4);
    EXPECT_NEAR(ambiguity(g, g, p).real(), expect, 1e-10);
}

TEST(Ambiguity, DimensionMismatchThrows) {
    EXPECT_THROW(ambiguity(hermite_window(1), hermite_window(1, 2), PhaseSpacePoint(0.0, 0.0)), InvalidArgument);
}

TEST(Wigner, GaussianClosedForm) {
    const Window g = gaussian_window();
    for (const auto& p : random_points(16, 20, 1.5)) {
        const double r2 = p.coords().squaredNorm();
        EXPECT_NEAR(std::abs(wigner(g, g, p) - 2.0 * std::exp(-2.0 * kPi * r2)), 0.0, 1e-12);
    }
}

TEST(Wigner, HermiteOneAtOrigin) {
    const Window g = hermite_window(1);
    EXPECT_NEAR(wigner(g, g, PhaseSpacePoint(0.0, 0.0)).real(), -2.0, 1e-12);
}

TEST(Wigner, RealForAutoTerms) {
    const Window g = hermite_window(3);
    for (const auto& p : random_points(17, 20, 2.0)) EXPECT_LE(std::abs(wigner(g, g, p).imag()), 1e-9);
}

TEST(Wigner, ViaAmbiguityAgrees) {
    const Window g = hermite_window(2);
    for (const auto& p : random_points(18, 100, 2.0))
        EXPECT_NEAR(std::abs(wigner(g, g, p) - wigner_via_ambiguity(g, g, p)), 0.0, 1e-8);
}

TEST(Wigner, OddWindowSign) {
    const Window f = hermite_window(2), g = hermite_window(3);
    for (const auto& p : random_points(19, 20, 1.0))
        EXPECT_NEAR(std::abs(wigner_via_ambiguity(f, g, p) + 2.0 * ambiguity(f, g, p * 2.0)), 0.0, 1e-10);
}

TEST(SymplecticFourier, GaussianIsFixed) {
    const auto in = sample_function(gaussian_2d, uniform_axes(1, -5.0, 5.0, 101), "gauss");
    const auto out_axes = uniform_axes(1, -2.0, 2.0, 21);
    const auto ft = symplectic_fourier(in, out_axes);
    const auto expect = sample_function(gaussian_2d, out_axes, "gauss");
    EXPECT_LT(max_abs_diff(ft, expect), 1e-10);
}

TEST(SymplecticFourier, AgreesWithAnisotropicOracle) {
    // F = e^{-pi (a x^2 + b w^2)}: F_sigma F(x, w) = (ab)^{-1/2} e^{-pi (x^2 / b + w^2 / a)}.
    const double a = 2.0, b = 0.7;
    auto f = [&](const PhaseSpacePoint& p) {
        return cplx(std::exp(-kPi * (a * p.coords()(0) * p.coords()(0) + b * p.coords()(1) * p.coords()(1))));
    };
    const auto in = sample_function(f, uniform_axes(1, -7.0, 7.0, 141), "aniso");
    const auto out_axes = uniform_axes(1, -2.0, 2.0, 17);
    const auto ft = symplectic_fourier(in, out_axes);
    for (std::size_t i = 0; i < ft.values.size(); ++i) {
        const auto c = ft.coordinate(i);
        const double expect = std::exp(-kPi * (c(0) * c(0) / b + c(1) * c(1) / a)) / std::sqrt(a * b);
        EXPECT_NEAR(std::abs(ft.values[i] - expect), 0.0, 1e-10);
    }
}

TEST(SymplecticFourier, ShiftedGaussianPhase) {
    // F(l) = G(l - l0): F_sigma F(l) = e^{-2 pi i sigma(l, l0)} G(l).
    const PhaseSpacePoint l0(0.4, -0.3);
    auto f = [&](const PhaseSpacePoint& p) { return gaussian_2d(p - l0); };
    const auto in = sample_function(f, uniform_axes(1, -6.0, 6.0, 121), "shifted");
    const auto out_axes = uniform_axes(1, -1.5, 1.5, 13);
    const auto ft = symplectic_fourier(in, out_axes);
    for (std::size_t i = 0; i < ft.values.size(); ++i) {
        const PhaseSpacePoint p(ft.coordinate(i));
        const cplx expect = std::polar(1.0, -2.0 * kPi * symplectic_form(p, l0)) * gaussian_2d(p);
        EXPECT_NEAR(std::abs(ft.values[i] - expect), 0.0, 1e-10);
    }
}

TEST(SymplecticFourier, Involution) {
    auto f = [](const PhaseSpacePoint& p) {
        const double x = p.coords()(0), w = p.coords()(1);
        return cplx(std::exp(-kPi * (x * x + 2.0 * w * w + x * w)), 0.0);
    };
    const auto axes = uniform_axes(1, -4.0, 4.0, 129);
    const auto in = sample_function(f, axes, "f");
    const auto once = symplectic_fourier(in, axes);
    const auto twice = symplectic_fourier(once, axes);
    EXPECT_LT(max_abs_diff(twice, in), 1e-6);
}

TEST(SymplecticFourier, AmbiguityToWigner) {
    const Window g = hermite_window(0);
    const auto in = sample_function([&](const PhaseSpacePoint& p) { return ambiguity(g, g, p); },
                                    uniform_axes(1, -5.5, 5.5, 111), "A");
    const auto out_axes = uniform_axes(1, -2.0, 2.0, 41);
    const auto w = sample_function([&](const PhaseSpacePoint& p) { return wigner(g, g, p); }, out_axes, "W");
    EXPECT_LT(max_abs_diff(symplectic_fourier(in, out_axes), w), 1e-6);
}

TEST(SymplecticFourier, DilationRule) {
    const double alpha = 1.3;
    const auto axes = uniform_axes(1, -6.0, 6.0, 121);
    const auto out_axes = uniform_axes(1, -1.5, 1.5, 13);
    auto dilated = [&](const PhaseSpacePoint& p) { return gaussian_2d(p * alpha); };
    const auto lhs = symplectic_fourier(sample_function(dilated, axes, "D F"), out_axes);
    for (std::size_t i = 0; i < lhs.values.size(); ++i) {
        const PhaseSpacePoint p(lhs.coordinate(i));
        const cplx expect = std::pow(alpha, -2.0) * gaussian_2d(p * (1.0 / alpha));
        EXPECT_NEAR(std::abs(lhs.values[i] - expect), 0.0, 1e-6);
    }
}

TEST(SymplecticFourier, FourDimensionalGaussian) {
    const auto in = sample_function(gaussian_2d, uniform_axes(2, -4.5, 4.5, 41), "gauss4");
    const auto out_axes = uniform_axes(2, -1.0, 1.0, 5);
    const auto expect = sample_function(gaussian_2d, out_axes, "gauss4");
    EXPECT_LT(max_abs_diff(symplectic_fourier(in, out_axes), expect), 1e-8);
}

TEST(SymplecticFourier, Preconditions) {
    const auto truncated = sample_function(gaussian_2d, uniform_axes(1, -1.0, 1.0, 21), "g");
    EXPECT_THROW(symplectic_fourier(truncated, uniform_axes(1, -1.0, 1.0, 5)), InvalidArgument);
    const auto coarse = sample_function(gaussian_2d, uniform_axes(1, -6.0, 6.0, 13), "g");
    EXPECT_THROW(symplectic_fourier(coarse, uniform_axes(1, -2.0, 2.0, 5)), InvalidArgument);
    const auto ok = sample_function(gaussian_2d, uniform_axes(1, -6.0, 6.0, 61), "g");
    EXPECT_THROW(symplectic_fourier(ok, uniform_axes(2, -1.0, 1.0, 5)), InvalidArgument);
}

TEST(Dilate, IdentityAndInverse) {
    const auto s = sample_function(gaussian_2d, uniform_axes(1, -2.0, 2.0, 9), "g");
    const auto same = dilate(s, 1.0);
    EXPECT_EQ(same.axes[0].min, s.axes[0].min);
    EXPECT_EQ(same.values, s.values);
    const auto back = dilate(dilate(s, 2.5), 1.0 / 2.5);
    EXPECT_NEAR(back.axes[1].max, s.axes[1].max, 1e-15);
    EXPECT_EQ(back.values, s.values);
    const auto d = dilate(s, 2.0);
    for (std::size_t i = 0; i < d.values.size(); ++i)
        EXPECT_NEAR(std::abs(d.values[i] - gaussian_2d(PhaseSpacePoint(d.coordinate(i)) * 2.0)), 0.0, 1e-15);
    EXPECT_THROW(dilate(s, 0.0), InvalidArgument);
}

TEST(Serialization, CsvHeaderAndRoundTrip) {
    EXPECT_EQ(csv_header(1), "x,omega,re,im");
    EXPECT_EQ(csv_header(2), "x1,x2,w1,w2,re,im");
    const auto s = sample_function([](const PhaseSpacePoint& p) { return cplx(p.coords()(0), p.coords()(1)); },
                                   uniform_axes(1, -1.0, 1.0, 5), "ramp");
    const std::string stem = ::testing::TempDir() + "ramp";
    save_sample(stem, s);
    std::ifstream in(stem + ".csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "x,omega,re,im");
    const auto back = load_sample(stem);
    EXPECT_EQ(back.axes.size(), 2u);
    EXPECT_EQ(back.meta, "ramp");
    EXPECT_LT(max_abs_diff(back, s), 1e-15);
    const auto sidecar = grid_sidecar(s);
    EXPECT_EQ(sidecar["axes"].size(), 2u);
    std::remove((stem + ".csv").c_str());
    std::remove((stem + ".json").c_str());
}
