#include "fixtures.hpp"

#include "osfs/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace fixture {

std::vector<osfs::FeatureId> ids(std::size_t n, const char* prefix)
{
    std::vector<osfs::FeatureId> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({i, prefix + std::to_string(i)});
    }
    return out;
}

osfs::DesignMatrix random_matrix(osfs::Index m, osfs::Index n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd x(m, n);
    for (osfs::Index j = 0; j < n; ++j) {
        for (osfs::Index i = 0; i < m; ++i) {
            x(i, j) = u(rng);
        }
    }
    Eigen::VectorXd y(m);
    for (osfs::Index i = 0; i < m; ++i) {
        y[i] = 1.0 + u(rng);
    }
    return {x, ids(static_cast<std::size_t>(n)), y};
}

osfs::DesignMatrix stationary(osfs::Index m)
{
    constexpr int dips[] = {1, 3, 5, 6};
    Eigen::MatrixXd x(m, 8);
    Eigen::VectorXd y(m);
    for (osfs::Index t = 0; t < m; ++t) {
        const int phase = static_cast<int>(t % 8);
        const double u = phase / 7.0;
        x(t, 0) = u;
        x(t, 1) = u * u;
        x(t, 2) = std::sqrt(u);
        x(t, 3) = std::sin(std::numbers::pi * u / 2.0);
        for (int j = 0; j < 4; ++j) {
            x(t, 4 + j) = phase == dips[j] ? 0.0 : 1.0;
        }
        y[t] = 1.0 + u;
    }
    return {x, ids(8), y};
}

osfs::DesignMatrix pure_noise(osfs::Index m, osfs::Index n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd x(m, n);
    for (osfs::Index j = 0; j < n; ++j) {
        for (osfs::Index i = 0; i < m; ++i) {
            x(i, j) = normal(rng);
        }
    }
    Eigen::VectorXd y = Eigen::VectorXd::Constant(m, 1.0);
    return osfs::preprocess(osfs::DesignMatrix(x, ids(static_cast<std::size_t>(n), "noise_"), y)).matrix;
}

osfs::DesignMatrix planted(double sigma, std::uint64_t seed)
{
    osfs::SynthSpec spec;
    spec.n_features = 1000;
    spec.m_samples = 5000;
    spec.n_informative = 5;
    spec.n_redundant = 5;
    spec.noise_sigma = sigma;
    spec.seed = seed;
    return osfs::preprocess(osfs::generate(spec)).matrix;
}

} // namespace fixture

namespace fixture {

OsfsCase osfs_case(std::size_t index, std::uint64_t seed)
{
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    const osfs::Method methods[] = {osfs::Method::ARR, osfs::Method::LS, osfs::Method::TB};
    OsfsCase c;
    c.config.seed = rng();
    c.config.method = methods[rng() % 3];
    switch (index % 3) {
    case 0: {
        const auto n = static_cast<osfs::Index>(6 + rng() % 30);
        c.matrix = random_matrix(1100, n, rng());
        c.start = 1 + rng() % 50;
        c.label = "noise n=" + std::to_string(n);
        break;
    }
    case 1: {
        const auto cycles = static_cast<osfs::Index>(128 + rng() % 8);
        c.matrix = stationary(8 * cycles);
        c.start = 1 + 8 * (rng() % (static_cast<std::size_t>(cycles) - 128 + 1));
        c.label = "stationary";
        break;
    }
    default: {
        const auto n = static_cast<osfs::Index>(17 + rng() % 20);
        c.matrix = random_matrix(1024, n, rng());
        c.config.eta = 0.99;
        c.label = "noise eta=0.99 n=" + std::to_string(n);
        break;
    }
    }
    c.label += std::string(" ") + std::string(osfs::to_string(c.config.method));
    return c;
}

} // namespace fixture
