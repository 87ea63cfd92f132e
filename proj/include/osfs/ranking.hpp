#ifndef OSFS_RANKING_HPP
#define OSFS_RANKING_HPP

#include "osfs/error.hpp"
#include "osfs/trace.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <numeric>
#include <optional>
#include <string_view>
#include <vector>

namespace osfs {

enum class Method { ARR, LS, TB };

std::string_view to_string(Method method) noexcept;
// Accepts "arr", "ls", "tb" in any case.
std::optional<Method> parse_method(std::string_view text) noexcept;

inline constexpr std::size_t kDefaultTreeCount = 100;

// A set of k >= 1 distinct features, kept sorted by feature index.
class FeatureSet {
public:
    explicit FeatureSet(std::vector<FeatureId> members);

    [[nodiscard]] std::size_t k() const noexcept { return members_.size(); }
    [[nodiscard]] const std::vector<FeatureId>& members() const noexcept { return members_; }
    [[nodiscard]] bool contains(std::size_t feature_index) const noexcept;

    friend bool operator==(const FeatureSet& a, const FeatureSet& b) noexcept { return a.members_ == b.members_; }

private:
    std::vector<FeatureId> members_;
};

// Best-first permutation of a matrix's features. For LS lower scores come
// first; for ARR and TB higher scores do.
struct RankedFeatureList {
    Method method = Method::ARR;
    std::vector<FeatureId> order;
    std::vector<double> scores;

    [[nodiscard]] FeatureSet top(std::size_t k) const;
};

template <typename Derived>
using ColumnScores = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;

// Sum over rows of |x - column mean|, per column.
template <typename Derived>
ColumnScores<Derived> relevance(const Eigen::MatrixBase<Derived>& x)
{
    const Eigen::Matrix<typename Derived::Scalar, 1, Eigen::Dynamic> means = x.colwise().mean();
    return (x.rowwise() - means).cwiseAbs().colwise().sum().transpose();
}

// |cos| between every pair of columns; a pair involving a zero column is 0.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
absolute_cosine_similarity(const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const ColumnScores<Derived> norms = x.colwise().norm().transpose();
    const ColumnScores<Derived> inverse =
        norms.unaryExpr([](Scalar v) { return v > Scalar(0) ? Scalar(1) / v : Scalar(0); });
    const Matrix unit = x * inverse.asDiagonal();
    Matrix cosine = Matrix::Zero(x.cols(), x.cols());
    cosine.template selfadjointView<Eigen::Lower>().rankUpdate(unit.transpose());
    cosine.template triangularView<Eigen::StrictlyUpper>() = cosine.transpose();
    return cosine.cwiseAbs();
}

// Relevance divided by summed redundancy, the redundancy sum running over
// every column including the feature itself.
template <typename Derived>
ColumnScores<Derived> arr_scores(const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    const ColumnScores<Derived> rel = relevance(x);
    const ColumnScores<Derived> redundancy = absolute_cosine_similarity(x).rowwise().sum();
    ColumnScores<Derived> scores(x.cols());
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        scores[i] = redundancy[i] > Scalar(0) ? rel[i] / redundancy[i] : Scalar(0);
    }
    return scores;
}

// Neighbourhood size used for an m-row Laplacian score.
[[nodiscard]] Index ls_neighbor_count(Index m) noexcept;

template <typename Scalar>
struct NeighborGraph {
    // Symmetric, zero diagonal.
    Eigen::SparseMatrix<Scalar> weights;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> degree;

    [[nodiscard]] Eigen::SparseMatrix<Scalar> laplacian() const
    {
        Eigen::SparseMatrix<Scalar> l = -weights;
        for (Eigen::Index i = 0; i < degree.size(); ++i) {
            l.coeffRef(i, i) += degree[i];
        }
        return l;
    }
};

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
pairwise_squared_distances(const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index m = x.rows();
    const Matrix samples = x.transpose();
    Matrix d = Matrix::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const Scalar v = (samples.col(i) - samples.col(j)).squaredNorm();
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

// K-nearest-neighbour graph over the rows of x with heat-kernel weights
// exp(-||xi - xj||^2). Rows i and j are linked when either is among the
// other's `neighbors` nearest; equal distances prefer the lower row index.
template <typename Derived>
NeighborGraph<typename Derived::Scalar> heat_kernel_graph(const Eigen::MatrixBase<Derived>& x, Eigen::Index neighbors)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index m = x.rows();
    const auto dist = pairwise_squared_distances(x);

    std::vector<char> linked(static_cast<std::size_t>(m * m), 0);
    auto link = [&](Eigen::Index i, Eigen::Index j) {
        linked[static_cast<std::size_t>(i * m + j)] = 1;
        linked[static_cast<std::size_t>(j * m + i)] = 1;
    };
    if (m <= neighbors + 1) {
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = i + 1; j < m; ++j) {
                link(i, j);
            }
        }
    } else {
        std::vector<Eigen::Index> others(static_cast<std::size_t>(m - 1));
        for (Eigen::Index i = 0; i < m; ++i) {
            std::size_t pos = 0;
            for (Eigen::Index j = 0; j < m; ++j) {
                if (j != i) {
                    others[pos++] = j;
                }
            }
            auto closer = [&](Eigen::Index a, Eigen::Index b) {
                return dist(i, a) < dist(i, b) || (dist(i, a) == dist(i, b) && a < b);
            };
            std::partial_sort(others.begin(), others.begin() + neighbors, others.end(), closer);
            for (Eigen::Index r = 0; r < neighbors; ++r) {
                link(i, others[static_cast<std::size_t>(r)]);
            }
        }
    }

    std::vector<Eigen::Triplet<Scalar>> triplets;
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            if (linked[static_cast<std::size_t>(i * m + j)]) {
                triplets.emplace_back(i, j, std::exp(-dist(i, j)));
            }
        }
    }
    NeighborGraph<Scalar> graph;
    graph.weights.resize(m, m);
    graph.weights.setFromTriplets(triplets.begin(), triplets.end());
    graph.degree = graph.weights * Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Ones(m);
    return graph;
}

// Laplacian score of every column against `graph`; constant columns and
// columns with zero weighted variance score +infinity.
template <typename Derived>
ColumnScores<Derived> laplacian_scores(const Eigen::MatrixBase<Derived>& x,
                                       const NeighborGraph<typename Derived::Scalar>& graph)
{
    using Scalar = typename Derived::Scalar;
    const Scalar total_degree = graph.degree.sum();
    if (!(total_degree > Scalar(0))) {
        throw Error(ErrorCode::DegenerateGraph, "all graph weights are zero");
    }
    ColumnScores<Derived> scores(x.cols());
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
        const auto column = x.col(f);
        if (column.maxCoeff() == column.minCoeff()) {
            scores[f] = std::numeric_limits<Scalar>::infinity();
            continue;
        }
        const Scalar centre = column.dot(graph.degree) / total_degree;
        const ColumnScores<Derived> v = column.array() - centre;
        const Scalar spread = (graph.degree.array() * v.array().square()).sum();
        // v' L v as a sum over edges, so rows that coincide contribute exactly 0.
        Scalar roughness = 0;
        for (Eigen::Index j = 0; j < graph.weights.outerSize(); ++j) {
            for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(graph.weights, j); it; ++it) {
                if (it.row() < j) {
                    const Scalar diff = v[it.row()] - v[j];
                    roughness += it.value() * diff * diff;
                }
            }
        }
        scores[f] = spread > Scalar(0) ? roughness / spread : std::numeric_limits<Scalar>::infinity();
    }
    return scores;
}

// Sorts features by score (descending unless `ascending`), ties by index.
[[nodiscard]] RankedFeatureList order_by_score(Method method, const std::vector<FeatureId>& ids,
                                               const Eigen::VectorXd& scores, bool ascending);

[[nodiscard]] RankedFeatureList arr_rank(const DesignMatrix& matrix);
[[nodiscard]] RankedFeatureList ls_rank(const DesignMatrix& matrix);
// Random-forest impurity importances; reads the target column.
[[nodiscard]] RankedFeatureList tb_rank(const DesignMatrix& matrix, std::uint64_t seed,
                                        std::size_t n_trees = kDefaultTreeCount);
[[nodiscard]] RankedFeatureList rank_features(const DesignMatrix& matrix, Method method, std::uint64_t seed);

// Top k features ranked on the first t rows.
[[nodiscard]] FeatureSet subset(std::size_t k, Index t, Method method, const DesignMatrix& matrix,
                                std::uint64_t seed);

// rank,feature_index,feature_name,score,method
void write_ranking_csv(std::ostream& out, const RankedFeatureList& ranking,
                       std::optional<std::size_t> top_k = std::nullopt);

} // namespace osfs

#endif // OSFS_RANKING_HPP
