#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "gaborframe/quadrature.hpp"
#include "gaborframe/windows.hpp"
#include "oracles.hpp"

using namespace gabor;

namespace {

double inner(const Window& f, const Window& g) {
    const double r = std::max(f.support_radius(), g.support_radius());
    return quad::integrate([&](double t) { return evaluate(f, t) * std::conj(evaluate(g, t)); }, -r, r).real();
}

std::string temp_path(const std::string& name) { return ::testing::TempDir() + name; }

} // namespace

TEST(Hermite, MatchesBoostOracle) {
    for (int n = 0; n <= 12; ++n)
        for (double t = -4.0; t <= 4.0; t += 0.173) EXPECT_NEAR(hermite_function(n, t), oracle::hermite(n, t), 1e-12) << n << ' ' << t;
}

TEST(Hermite, GaussianClosedForm) {
    for (double t : {0.0, 0.3, -1.2, 2.5}) EXPECT_NEAR(hermite_function(0, t), std::pow(2.0, 0.25) * std::exp(-kPi * t * t), 1e-15);
}

TEST(Hermite, Orthonormal) {
    for (int m = 0; m <= 5; ++m)
        for (int n = 0; n <= 5; ++n)
            EXPECT_NEAR(inner(hermite_window(m), hermite_window(n)), m == n ? 1.0 : 0.0, 1e-12);
}

TEST(Hermite, ParityAndCap) {
    EXPECT_EQ(hermite_window(0).parity(), Parity::even);
    EXPECT_EQ(hermite_window(3).parity(), Parity::odd);
    EXPECT_EQ(hermite_window(std::vector<int>{1, 2}, 2).parity(), Parity::odd);
    EXPECT_EQ(hermite_window(std::vector<int>{1, 1}, 2).parity(), Parity::even);
    EXPECT_EQ(hermite_window(1, 2).hermite_index(), (std::vector<int>{1, 1}));
    EXPECT_THROW(hermite_window(kMaxHermiteOrder + 1), InvalidArgument);
    EXPECT_THROW(hermite_window(-1), InvalidArgument);
    EXPECT_THROW(hermite_window(std::vector<int>{1, 2, 3}, 2), InvalidArgument);
    EXPECT_TRUE(hermite_window(4).decay_ok());
}

TEST(Hermite, SupportRadiusBoundsTail) {
    for (int n : {0, 3, 10}) {
        const Window g = hermite_window(n);
        const double r = g.support_radius();
        EXPECT_LT(std::abs(hermite_function(n, r)), 1e-15);
        EXPECT_LT(std::abs(hermite_function(n, r + 1.0)), 1e-16);
    }
}

TEST(Hermite, TensorProductEvaluation) {
    const Window g = hermite_window(std::vector<int>{1, 2}, 2);
    const Eigen::Vector2d t(0.3, -0.7);
    EXPECT_NEAR(std::abs(g(t) - oracle::hermite(1, 0.3) * oracle::hermite(2, -0.7)), 0.0, 1e-13);
    EXPECT_THROW(evaluate(g, 0.1), InvalidArgument);
}

TEST(Gaussian, IsHermiteZero) {
    const Window g = gaussian_window();
    EXPECT_EQ(g.kind(), WindowKind::gaussian);
    EXPECT_EQ(g.label(), "gaussian");
    EXPECT_EQ(gaussian_window(2).label(), "gaussian:2");
    EXPECT_NEAR(std::abs(evaluate(g, 0.4) - hermite_function(0, 0.4)), 0.0, 0.0);
}

TEST(Reflect, FlipsArgument) {
    const Window g = hermite_window(3);
    const Window r = reflect(g);
    EXPECT_TRUE(r.reflected());
    EXPECT_NEAR(std::abs(evaluate(r, 0.6) + evaluate(g, 0.6)), 0.0, 1e-15);
    EXPECT_FALSE(reflect(r).reflected());
}

TEST(Sampled, ReproducesHermiteOne) {
    const int n = 401;
    const UniformGrid grid{-8.0, 16.0 / (n - 1), n};
    std::vector<cplx> s;
    for (int j = 0; j < n; ++j) s.emplace_back(3.7 * hermite_function(1, grid.at(j)), 0.0);
    const Window g = sampled_window(s, grid);
    EXPECT_EQ(g.kind(), WindowKind::sampled);
    EXPECT_EQ(g.parity(), Parity::odd);
    EXPECT_TRUE(g.decay_ok());
    EXPECT_NEAR(inner(g, g), 1.0, 1e-10);
    for (double t : {-1.01, 0.0, 0.37, 2.2}) EXPECT_NEAR(evaluate(g, t).real(), hermite_function(1, t), 1e-5);
    EXPECT_EQ(evaluate(g, 9.0), cplx(0.0));
}

TEST(Sampled, FlagsMissingDecayAndAsymmetry) {
    const UniformGrid grid{-2.0, 0.1, 41};
    std::vector<cplx> flat(41, 1.0);
    EXPECT_FALSE(sampled_window(flat, grid).decay_ok());
    EXPECT_EQ(sampled_window(flat, grid).parity(), Parity::even);
    std::vector<cplx> skew(41);
    for (int j = 0; j < 41; ++j) skew[static_cast<std::size_t>(j)] = std::exp(-(grid.at(j) - 0.3) * (grid.at(j) - 0.3));
    EXPECT_EQ(sampled_window(skew, grid).parity(), Parity::neither);
}

TEST(Sampled, RejectsBadInput) {
    EXPECT_THROW(sampled_window(std::vector<cplx>(4, 1.0), UniformGrid{-1.5, 1.0, 4}), InvalidArgument);
    EXPECT_THROW(sampled_window(std::vector<cplx>(5, 1.0), UniformGrid{-1.0, 1.0, 5}), InvalidArgument);
    EXPECT_THROW(sampled_window(std::vector<cplx>(5, 0.0), UniformGrid{-2.0, 1.0, 5}), InvalidArgument);
    EXPECT_THROW(sampled_window(std::vector<cplx>(7, 1.0), UniformGrid{-2.0, 1.0, 5}), InvalidArgument);
}

TEST(Sampled, CsvRoundTrip) {
    const std::string path = temp_path("window_h2.csv");
    {
        std::ofstream os(path);
        os << "t,re,im\n";
        for (int j = 0; j < 321; ++j) {
            const double t = -8.0 + 0.05 * j;
            os << t << ',' << hermite_function(2, t) << ",0\n";
        }
    }
    const Window g = read_window_csv(path);
    EXPECT_EQ(g.parity(), Parity::even);
    EXPECT_NEAR(evaluate(g, 0.5).real(), hermite_function(2, 0.5), 1e-4);
    std::remove(path.c_str());
}

TEST(Sampled, CsvErrors) {
    const std::string bad_header = temp_path("bad_header.csv");
    std::ofstream(bad_header) << "x,y\n0,1\n";
    EXPECT_THROW(read_window_csv(bad_header), InvalidArgument);
    const std::string uneven = temp_path("uneven.csv");
    std::ofstream(uneven) << "t,re,im\n-2,0,0\n-1,1,0\n0,2,0\n1.5,1,0\n2,0,0\n";
    EXPECT_THROW(read_window_csv(uneven), InvalidArgument);
    EXPECT_THROW(read_window_csv(temp_path("missing.csv")), InvalidArgument);
    std::remove(bad_header.c_str());
    std::remove(uneven.c_str());
}
