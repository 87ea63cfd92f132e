#ifndef OSFS_TESTS_FIXTURES_HPP
#define OSFS_TESTS_FIXTURES_HPP

#include "osfs/online.hpp"
#include "osfs/trace.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace fixture {

std::vector<osfs::FeatureId> ids(std::size_t n, const char* prefix = "f");

// Uniform [0,1) values; target uniform on [1,2).
osfs::DesignMatrix random_matrix(osfs::Index m, osfs::Index n, std::uint64_t seed);

// Rows repeat with period 8. Columns 0-3 are smooth increasing functions of
// the phase, columns 4-7 drop from 1 to 0 at one phase. The target grows with
// the phase. Every prefix of a multiple of 8 rows ranks columns 0-3 on top.
osfs::DesignMatrix stationary(osfs::Index m = 1024);

// Independent standard normal columns, preprocessed.
osfs::DesignMatrix pure_noise(osfs::Index m, osfs::Index n, std::uint64_t seed);

// n=1000, m=5000, five informative and five redundant columns, preprocessed.
osfs::DesignMatrix planted(double sigma, std::uint64_t seed = 1);

struct OsfsCase {
    osfs::DesignMatrix matrix;
    osfs::OsfsConfig config;
    std::size_t start = 1;
    std::string label;
};

// Randomized search inputs cycling through noise streams (mostly settle by a
// decline), stationary streams (settle at the horizon) and noise with a
// near-one threshold (exhaust the grid).
OsfsCase osfs_case(std::size_t index, std::uint64_t seed);

} // namespace fixture

#endif
