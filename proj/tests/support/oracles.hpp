#ifndef OSFS_TESTS_ORACLES_HPP
#define OSFS_TESTS_ORACLES_HPP

#include "osfs/online.hpp"
#include "osfs/ranking.hpp"
#include "osfs/trace.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

// Straight transcriptions used as references. They share no code with the
// library beyond the data types.
namespace oracle {

// Relevance over cosine redundancy, loop by loop.
std::vector<double> arr_scores(const Eigen::MatrixXd& x);

// Laplacian score with dense S, D and L.
std::vector<double> ls_scores(const Eigen::MatrixXd& x);

// Feature positions sorted by score, ties by position.
std::vector<std::size_t> order(const std::vector<double>& scores, bool ascending);

// The blocking loop as written: for each k, read 16 samples, compare sets at
// each checkpoint, return on the first decline or at the horizon.
osfs::OsfsResult blocking_osfs(const osfs::DesignMatrix& matrix, const osfs::OsfsConfig& config, std::size_t start);

// Mean overlap |A ∩ B| / k of two independent uniformly drawn k-subsets of n.
double random_overlap(std::size_t k, std::size_t n, std::size_t trials, std::uint64_t seed);

// Mean overlap of the top k of n independent standard normal scores s with
// the top k of s + s', s' an independent copy: a statistic averaged over
// the first t/2 rows against the same statistic over the first t rows.
double nested_overlap(std::size_t k, std::size_t n, std::size_t trials, std::uint64_t seed);

} // namespace oracle

#endif
