#ifndef OSFS_FOREST_HPP
#define OSFS_FOREST_HPP

#include "osfs/trace.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <vector>

namespace osfs {

struct ForestOptions {
    std::size_t n_trees = 100;
    std::uint64_t seed = 0;
    // Off: every tree sees each row exactly once.
    bool bootstrap = true;
};

// Flat CART node. Leaves have feature == -1.
struct TreeNode {
    int feature = -1; // column position in the training matrix
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::size_t n_samples = 0; // bootstrap draws reaching the node
    double impurity = 0.0;     // variance of the targets reaching the node
    double value = 0.0;        // mean of those targets

    [[nodiscard]] bool is_leaf() const noexcept { return feature < 0; }
};

class RegressionTree {
public:
    explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    [[nodiscard]] const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::size_t split_count() const noexcept;
    // Index of the leaf that `values` routes to (value <= threshold goes left).
    template <typename Vector>
    [[nodiscard]] std::size_t leaf_for(const Vector& values) const
    {
        std::size_t node = 0;
        while (!nodes_[node].is_leaf()) {
            const auto& n = nodes_[node];
            node = static_cast<std::size_t>(values[n.feature] <= n.threshold ? n.left : n.right);
        }
        return node;
    }
    template <typename Vector>
    [[nodiscard]] double predict(const Vector& values) const
    {
        return nodes_[leaf_for(values)].value;
    }

private:
    std::vector<TreeNode> nodes_;
};

class RegressionForest {
public:
    RegressionForest(std::vector<RegressionTree> trees, std::vector<FeatureId> features, Eigen::VectorXd importances,
                     std::uint64_t seed);

    [[nodiscard]] const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
    [[nodiscard]] std::size_t n_trees() const noexcept { return trees_.size(); }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] const std::vector<FeatureId>& features() const noexcept { return features_; }
    // Non-negative; sums to 1 when any tree split, all zero otherwise.
    [[nodiscard]] const Eigen::VectorXd& importances() const noexcept { return importances_; }

    [[nodiscard]] double predict(const Sample& sample) const;
    [[nodiscard]] double predict(const Eigen::Ref<const Eigen::VectorXd>& values) const;
    // One prediction per row; columns must match the training features.
    [[nodiscard]] Eigen::VectorXd predict(const DesignMatrix& matrix) const;

    [[nodiscard]] nlohmann::json to_json() const;

private:
    std::vector<RegressionTree> trees_;
    std::vector<FeatureId> features_;
    Eigen::VectorXd importances_;
    std::uint64_t seed_;
};

// Row indices drawn for tree `tree_index`: m draws with replacement.
[[nodiscard]] std::vector<Index> bootstrap_draws(std::uint64_t seed, std::size_t tree_index, Index m);

// Random-forest regressor: variance-reduction splits over every feature at
// every node, thresholds at midpoints of consecutive distinct values, grown
// until nodes are pure or cannot be split.
[[nodiscard]] RegressionForest fit_forest(const DesignMatrix& matrix, const ForestOptions& options);

} // namespace osfs

#endif // OSFS_FOREST_HPP
