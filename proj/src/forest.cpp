#include "osfs/forest.hpp"

#include "osfs/error.hpp"
#include "osfs/rng.hpp"

#include <algorithm>
#include <numeric>

namespace osfs {

std::size_t RegressionTree::split_count() const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

std::vector<Index> bootstrap_draws(std::uint64_t seed, std::size_t tree_index, Index m)
{
    Rng rng(derive_seed(seed, tree_index));
    std::uniform_int_distribution<Index> pick(0, m - 1);
    std::vector<Index> draws(static_cast<std::size_t>(m));
    for (auto& d : draws) {
        d = pick(rng);
    }
    return draws;
}

namespace {

using RowList = std::vector<int>;

// Grows one tree over the rows with non-zero multiplicity. Every node owns
// the same [begin, end) slice of each per-feature order, which always holds
// the node's rows sorted by that feature.
class TreeGrower {
public:
    TreeGrower(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<RowList>& presorted,
               std::vector<int> multiplicity)
        : x_(x), y_(y), weight_(std::move(multiplicity)), centred_(static_cast<std::size_t>(x.rows()), 0.0),
          goes_left_(static_cast<std::size_t>(x.rows()), 0)
    {
        order_.resize(presorted.size());
        for (std::size_t f = 0; f < presorted.size(); ++f) {
            order_[f].reserve(presorted[f].size());
            for (int row : presorted[f]) {
                if (weight_[static_cast<std::size_t>(row)] > 0) {
                    order_[f].push_back(row);
                }
            }
        }
        scratch_.resize(order_.empty() ? 0 : order_[0].size());
        total_weight_ = std::accumulate(weight_.begin(), weight_.end(), 0.0);
    }

    RegressionTree grow(Eigen::VectorXd& importance)
    {
        importance.setZero(x_.cols());
        nodes_.clear();
        if (!order_.empty()) {
            build(0, order_[0].size(), importance);
        } else {
            // No features: a single leaf over every drawn row.
            double w = 0.0;
            double s = 0.0;
            for (std::size_t r = 0; r < weight_.size(); ++r) {
                w += weight_[r];
                s += weight_[r] * y_[static_cast<Index>(r)];
            }
            TreeNode leaf;
            leaf.n_samples = static_cast<std::size_t>(w);
            leaf.value = w > 0 ? s / w : 0.0;
            nodes_.push_back(leaf);
        }
        return RegressionTree(std::move(nodes_));
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double decrease = 0.0;
    };

    int build(std::size_t begin, std::size_t end, Eigen::VectorXd& importance)
    {
        const RowList& rows = order_[0];
        double w = 0.0;
        double s = 0.0;
        double lo = y_[rows[begin]];
        double hi = lo;
        for (std::size_t p = begin; p < end; ++p) {
            const int r = rows[p];
            const double yr = y_[r];
            w += weight_[static_cast<std::size_t>(r)];
            s += weight_[static_cast<std::size_t>(r)] * yr;
            lo = std::min(lo, yr);
            hi = std::max(hi, yr);
        }
        const double mean = s / w;
        double sse = 0.0;
        for (std::size_t p = begin; p < end; ++p) {
            const int r = rows[p];
            const double c = y_[r] - mean;
            centred_[static_cast<std::size_t>(r)] = c;
            sse += weight_[static_cast<std::size_t>(r)] * c * c;
        }
        const bool pure = lo == hi;
        if (pure) {
            sse = 0.0;
        }

        const int index = static_cast<int>(nodes_.size());
        TreeNode node;
        node.n_samples = static_cast<std::size_t>(w);
        node.impurity = sse / w;
        node.value = mean;
        nodes_.push_back(node);

        if (pure || w < 2.0) {
            return index;
        }
        const Split best = find_split(begin, end, w, sse);
        if (best.feature < 0) {
            return index;
        }

        const double* column = x_.col(best.feature).data();
        for (std::size_t p = begin; p < end; ++p) {
            const int r = rows[p];
            goes_left_[static_cast<std::size_t>(r)] = column[r] <= best.threshold ? 1 : 0;
        }
        std::size_t n_left = 0;
        for (auto& order : order_) {
            n_left = partition(order, begin, end);
        }
        importance[best.feature] += best.decrease / total_weight_;

        const int left = build(begin, begin + n_left, importance);
        const int right = build(begin + n_left, end, importance);
        nodes_[static_cast<std::size_t>(index)].feature = best.feature;
        nodes_[static_cast<std::size_t>(index)].threshold = best.threshold;
        nodes_[static_cast<std::size_t>(index)].left = left;
        nodes_[static_cast<std::size_t>(index)].right = right;
        return index;
    }

    // Best variance-reducing split. Candidates within a relative 1e-12 of the
    // incumbent do not replace it, so near-equal splits resolve to the lower
    // feature position and then the lower threshold.
    Split find_split(std::size_t begin, std::size_t end, double w, double sse) const
    {
        const double tolerance = 1e-12 * sse;
        double total_centred = 0.0;
        for (std::size_t p = begin; p < end; ++p) {
            const int r = order_[0][p];
            total_centred += weight_[static_cast<std::size_t>(r)] * centred_[static_cast<std::size_t>(r)];
        }

        Split best;
        for (std::size_t f = 0; f < order_.size(); ++f) {
            const RowList& order = order_[f];
            const double* column = x_.col(static_cast<Index>(f)).data();
            if (column[order[begin]] == column[order[end - 1]]) {
                continue;
            }
            double wl = 0.0;
            double sl = 0.0;
            double ql = 0.0;
            for (std::size_t p = begin; p + 1 < end; ++p) {
                const int r = order[p];
                const double wr_ = weight_[static_cast<std::size_t>(r)];
                const double c = centred_[static_cast<std::size_t>(r)];
                wl += wr_;
                sl += wr_ * c;
                ql += wr_ * c * c;
                const double here = column[r];
                const double next = column[order[p + 1]];
                if (here == next) {
                    continue;
                }
                const double wr = w - wl;
                const double sr = total_centred - sl;
                const double sse_left = std::max(0.0, ql - sl * sl / wl);
                const double sse_right = std::max(0.0, (sse - ql) - sr * sr / wr);
                const double decrease = sse - sse_left - sse_right;
                if (decrease > best.decrease + tolerance) {
                    double threshold = here + (next - here) / 2.0;
                    if (threshold >= next) {
                        threshold = here;
                    }
                    best = Split{static_cast<int>(f), threshold, decrease};
                }
            }
        }
        return best;
    }

    // Stable partition of order[begin, end) by goes_left_; returns the left count.
    std::size_t partition(RowList& order, std::size_t begin, std::size_t end)
    {
        std::size_t left = begin;
        std::size_t right = 0;
        for (std::size_t p = begin; p < end; ++p) {
            const int r = order[p];
            if (goes_left_[static_cast<std::size_t>(r)]) {
                order[left++] = r;
            } else {
                scratch_[right++] = r;
            }
        }
        std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(right),
                  order.begin() + static_cast<std::ptrdiff_t>(left));
        return left - begin;
    }

    const Eigen::MatrixXd& x_;
    const Eigen::VectorXd& y_;
    std::vector<int> weight_;
    std::vector<RowList> order_;
    std::vector<double> centred_;
    std::vector<char> goes_left_;
    RowList scratch_;
    std::vector<TreeNode> nodes_;
    double total_weight_ = 0.0;
};

} // namespace

RegressionForest::RegressionForest(std::vector<RegressionTree> trees, std::vector<FeatureId> features,
                                   Eigen::VectorXd importances, std::uint64_t seed)
    : trees_(std::move(trees)), features_(std::move(features)), importances_(std::move(importances)), seed_(seed)
{
}

double RegressionForest::predict(const Eigen::Ref<const Eigen::VectorXd>& values) const
{
    if (values.size() != static_cast<Index>(features_.size())) {
        throw Error(ErrorCode::DimensionMismatch, "sample has " + std::to_string(values.size()) +
                                                      " values, forest expects " +
                                                      std::to_string(features_.size()));
    }
    double sum = 0.0;
    for (const auto& tree : trees_) {
        sum += tree.predict(values);
    }
    return sum / static_cast<double>(trees_.size());
}

double RegressionForest::predict(const Sample& sample) const
{
    return predict(sample.values);
}

Eigen::VectorXd RegressionForest::predict(const DesignMatrix& matrix) const
{
    if (matrix.feature_ids() != features_) {
        throw Error(ErrorCode::DimensionMismatch, "matrix columns differ from the training features");
    }
    Eigen::VectorXd out(matrix.rows());
    const Eigen::MatrixXd samples = matrix.values().transpose();
    for (Index i = 0; i < matrix.rows(); ++i) {
        double sum = 0.0;
        for (const auto& tree : trees_) {
            sum += tree.predict(samples.col(i));
        }
        out[i] = sum / static_cast<double>(trees_.size());
    }
    return out;
}

nlohmann::json RegressionForest::to_json() const
{
    nlohmann::json doc;
    doc["seed"] = seed_;
    doc["n_trees"] = trees_.size();
    doc["features"] = nlohmann::json::array();
    for (const auto& f : features_) {
        doc["features"].push_back({{"index", f.index}, {"name", f.name}});
    }
    doc["importances"] = std::vector<double>(importances_.data(), importances_.data() + importances_.size());
    doc["trees"] = nlohmann::json::array();
    for (const auto& tree : trees_) {
        nlohmann::json t;
        for (const auto& n : tree.nodes()) {
            t["feature"].push_back(n.feature);
            t["threshold"].push_back(n.threshold);
            t["left"].push_back(n.left);
            t["right"].push_back(n.right);
            t["n_samples"].push_back(n.n_samples);
            t["impurity"].push_back(n.impurity);
            t["value"].push_back(n.value);
        }
        doc["trees"].push_back(std::move(t));
    }
    return doc;
}

RegressionForest fit_forest(const DesignMatrix& matrix, const ForestOptions& options)
{
    if (!matrix.has_targets()) {
        throw Error(ErrorCode::MissingTargets, "forest training needs a target column");
    }
    if (matrix.rows() < 2) {
        throw Error(ErrorCode::TooFewSamples, "forest training needs at least 2 rows");
    }
    if (options.n_trees == 0) {
        throw Error(ErrorCode::InvalidConfig, "forest needs at least one tree");
    }
    const Index m = matrix.rows();
    const Index n = matrix.cols();
    const Eigen::MatrixXd& x = matrix.values();
    const Eigen::VectorXd y = matrix.targets();

    std::vector<RowList> presorted(static_cast<std::size_t>(n));
    for (Index f = 0; f < n; ++f) {
        auto& order = presorted[static_cast<std::size_t>(f)];
        order.resize(static_cast<std::size_t>(m));
        std::iota(order.begin(), order.end(), 0);
        const double* column = x.col(f).data();
        std::sort(order.begin(), order.end(),
                  [column](int a, int b) { return column[a] < column[b] || (column[a] == column[b] && a < b); });
    }

    std::vector<RegressionTree> trees;
    trees.reserve(options.n_trees);
    Eigen::VectorXd importances = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd tree_importance(n);
    for (std::size_t t = 0; t < options.n_trees; ++t) {
        std::vector<int> multiplicity(static_cast<std::size_t>(m), options.bootstrap ? 0 : 1);
        if (options.bootstrap) {
            for (Index row : bootstrap_draws(options.seed, t, m)) {
                ++multiplicity[static_cast<std::size_t>(row)];
            }
        }
        TreeGrower grower(x, y, presorted, std::move(multiplicity));
        trees.push_back(grower.grow(tree_importance));
        const double sum = tree_importance.sum();
        if (sum > 0.0) {
            importances += tree_importance / sum;
        }
    }
    importances /= static_cast<double>(options.n_trees);
    const double total = importances.sum();
    if (total > 0.0) {
        importances /= total;
    }
    return RegressionForest(std::move(trees), matrix.feature_ids(), std::move(importances), options.seed);
}

} // namespace osfs
