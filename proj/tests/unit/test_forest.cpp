#include "osfs/error.hpp"
#include "osfs/forest.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

namespace {

using osfs::DesignMatrix;
using osfs::ForestOptions;

TEST(Forest, TwoPointSplit)
{
    Eigen::MatrixXd x(2, 1);
    x << 0, 1;
    const auto forest = osfs::fit_forest(DesignMatrix(x, fixture::ids(1), Eigen::Vector2d(0, 1)), {1, 0, false});
    const auto& tree = forest.trees()[0];
    EXPECT_EQ(tree.split_count(), 1u);
    EXPECT_DOUBLE_EQ(tree.nodes()[0].threshold, 0.5);
    EXPECT_EQ(forest.predict(Eigen::VectorXd::Constant(1, 0.0)), 0.0);
    EXPECT_EQ(forest.predict(Eigen::VectorXd::Constant(1, 1.0)), 1.0);
    EXPECT_DOUBLE_EQ(forest.importances()[0], 1.0);
}

TEST(Forest, ConstantTargetGivesLeavesOnly)
{
    const auto base = fixture::random_matrix(40, 3, 1);
    const auto forest =
        osfs::fit_forest(DesignMatrix(base.values(), base.feature_ids(), Eigen::VectorXd::Constant(40, 2.5)), {10, 3});
    for (const auto& tree : forest.trees()) {
        EXPECT_EQ(tree.nodes().size(), 1u);
    }
    EXPECT_EQ(forest.predict(base.values().row(7).transpose().eval()), 2.5);
    EXPECT_EQ(forest.importances(), Eigen::VectorXd::Zero(3));
}

TEST(Forest, SignalBeatsNoise)
{
    auto base = fixture::random_matrix(300, 2, 4);
    const Eigen::VectorXd y = base.values().col(0);
    const auto forest = osfs::fit_forest(DesignMatrix(base.values(), base.feature_ids(), y), {100, 7});
    EXPECT_GT(forest.importances()[0], forest.importances()[1]);
    EXPECT_NEAR(forest.importances().sum(), 1.0, 1e-12);
    EXPECT_GE(forest.importances().minCoeff(), 0.0);
}

TEST(Forest, LeafOnlyTreePredictsItsValue)
{
    osfs::TreeNode leaf;
    leaf.value = 3.5;
    const osfs::RegressionForest forest({osfs::RegressionTree({leaf})}, fixture::ids(2), Eigen::VectorXd::Zero(2), 0);
    EXPECT_EQ(forest.predict(Eigen::Vector2d(0.3, 9.0)), 3.5);
}

TEST(Forest, AveragesTrees)
{
    auto stump = [](double left, double right) {
        osfs::TreeNode root;
        root.feature = 0;
        root.threshold = 0.5;
        root.left = 1;
        root.right = 2;
        osfs::TreeNode l;
        l.value = left;
        osfs::TreeNode r;
        r.value = right;
        return osfs::RegressionTree({root, l, r});
    };
    const osfs::RegressionForest forest({stump(0, 1), stump(1, 0)}, fixture::ids(1), Eigen::VectorXd::Ones(1), 0);
    EXPECT_EQ(forest.predict(Eigen::VectorXd::Constant(1, 0.2)), 0.5);
    // value equal to the threshold goes left
    EXPECT_EQ(forest.trees()[0].predict(Eigen::VectorXd::Constant(1, 0.5)), 0.0);
}

TEST(Forest, StepFunctionFitsBetterThanMean)
{
    auto base = fixture::random_matrix(200, 3, 12);
    Eigen::VectorXd y = (base.values().col(1).array() > 0.4).cast<double>();
    const DesignMatrix m(base.values(), base.feature_ids(), y);
    const auto forest = osfs::fit_forest(m, {20, 1});
    const double forest_mae = (forest.predict(m) - y).cwiseAbs().mean();
    const double mean_mae = (y.array() - y.mean()).abs().mean();
    EXPECT_LT(forest_mae, mean_mae);
}

TEST(Forest, LeavesHoldMeansOfTheirBootstrapRows)
{
    const auto base = fixture::random_matrix(60, 4, 21);
    const std::uint64_t seed = 99;
    const auto forest = osfs::fit_forest(base, {5, seed});
    const Eigen::VectorXd y = base.targets();
    for (std::size_t t = 0; t < forest.n_trees(); ++t) {
        const auto& tree = forest.trees()[t];
        std::map<std::size_t, std::pair<double, int>> sums;
        for (osfs::Index row : osfs::bootstrap_draws(seed, t, 60)) {
            auto& s = sums[tree.leaf_for(base.values().row(row))];
            s.first += y[row];
            s.second += 1;
        }
        for (const auto& [leaf, s] : sums) {
            EXPECT_NEAR(tree.nodes()[leaf].value, s.first / s.second, 1e-12);
            EXPECT_EQ(tree.nodes()[leaf].n_samples, static_cast<std::size_t>(s.second));
        }
        for (const auto& node : tree.nodes()) {
            EXPECT_GE(node.impurity, 0.0);
            if (!node.is_leaf()) {
                EXPECT_EQ(tree.nodes()[node.left].n_samples + tree.nodes()[node.right].n_samples, node.n_samples);
            }
        }
    }
}

TEST(Forest, Deterministic)
{
    const auto m = fixture::random_matrix(50, 4, 2);
    EXPECT_EQ(osfs::fit_forest(m, {8, 5}).to_json(), osfs::fit_forest(m, {8, 5}).to_json());
    EXPECT_NE(osfs::fit_forest(m, {8, 5}).to_json(), osfs::fit_forest(m, {8, 6}).to_json());
}

TEST(Forest, ExtraTreesDoNotChangeEarlierOnes)
{
    const auto m = fixture::random_matrix(50, 4, 3);
    const auto small = osfs::fit_forest(m, {3, 8});
    const auto large = osfs::fit_forest(m, {6, 8});
    for (std::size_t t = 0; t < 3; ++t) {
        EXPECT_EQ(small.trees()[t].nodes().size(), large.trees()[t].nodes().size());
        EXPECT_EQ(small.trees()[t].nodes()[0].threshold, large.trees()[t].nodes()[0].threshold);
    }
}

TEST(Forest, Errors)
{
    const auto m = fixture::random_matrix(10, 3, 1);
    EXPECT_THROW((void)osfs::fit_forest(m.without_targets(), {}), osfs::Error);
    EXPECT_THROW((void)osfs::fit_forest(m.block_rows(0, 1), {}), osfs::Error);
    EXPECT_THROW((void)osfs::fit_forest(m, {0, 1}), osfs::Error);
    const auto forest = osfs::fit_forest(m, {2, 1});
    try {
        (void)forest.predict(Eigen::Vector2d(0, 0));
        FAIL();
    } catch (const osfs::Error& e) {
        EXPECT_EQ(e.code(), osfs::ErrorCode::DimensionMismatch);
    }
}

} // namespace
