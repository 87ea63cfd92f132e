#include "osfs/ranking.hpp"

#include "osfs/forest.hpp"

#include <cctype>
#include <cstdio>
#include <ostream>
#include <string>

namespace osfs {

std::string_view to_string(Method method) noexcept
{
    switch (method) {
    case Method::ARR: return "ARR";
    case Method::LS: return "LS";
    case Method::TB: return "TB";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view text) noexcept
{
    std::string lower;
    for (char c : text) {
        lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (lower == "arr") {
        return Method::ARR;
    }
    if (lower == "ls") {
        return Method::LS;
    }
    if (lower == "tb") {
        return Method::TB;
    }
    return std::nullopt;
}

FeatureSet::FeatureSet(std::vector<FeatureId> members) : members_(std::move(members))
{
    if (members_.empty()) {
        throw Error(ErrorCode::EmptySet, "a feature set needs at least one member");
    }
    std::sort(members_.begin(), members_.end());
    if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
        throw Error(ErrorCode::InvalidSpec, "duplicate feature in set");
    }
}

bool FeatureSet::contains(std::size_t feature_index) const noexcept
{
    return std::binary_search(members_.begin(), members_.end(), FeatureId{feature_index, {}});
}

FeatureSet RankedFeatureList::top(std::size_t k) const
{
    if (k < 1 || k > order.size()) {
        throw Error(ErrorCode::OutOfRange,
                    "k=" + std::to_string(k) + " outside [1, " + std::to_string(order.size()) + "]");
    }
    return FeatureSet(std::vector<FeatureId>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k)));
}

Index ls_neighbor_count(Index m) noexcept
{
    if (m <= 16) {
        return 2;
    }
    if (m <= 128) {
        return 5;
    }
    return 10;
}

RankedFeatureList order_by_score(Method method, const std::vector<FeatureId>& ids, const Eigen::VectorXd& scores,
                                 bool ascending)
{
    std::vector<std::size_t> positions(ids.size());
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    std::sort(positions.begin(), positions.end(), [&](std::size_t a, std::size_t b) {
        const double sa = scores[static_cast<Index>(a)];
        const double sb = scores[static_cast<Index>(b)];
        if (sa != sb) {
            return ascending ? sa < sb : sa > sb;
        }
        return ids[a].index < ids[b].index;
    });
    RankedFeatureList ranking;
    ranking.method = method;
    ranking.order.reserve(ids.size());
    ranking.scores.reserve(ids.size());
    for (std::size_t pos : positions) {
        ranking.order.push_back(ids[pos]);
        ranking.scores.push_back(scores[static_cast<Index>(pos)]);
    }
    return ranking;
}

namespace {

void require_nonempty(const DesignMatrix& matrix, Index min_rows)
{
    if (matrix.rows() < min_rows || matrix.cols() < 1) {
        throw Error(ErrorCode::EmptyMatrix, "ranking needs at least " + std::to_string(min_rows) +
                                                " row(s) and one feature");
    }
}

} // namespace

RankedFeatureList arr_rank(const DesignMatrix& matrix)
{
    require_nonempty(matrix, 1);
    return order_by_score(Method::ARR, matrix.feature_ids(), arr_scores(matrix.values()), false);
}

RankedFeatureList ls_rank(const DesignMatrix& matrix)
{
    require_nonempty(matrix, 2);
    const auto graph = heat_kernel_graph(matrix.values(), ls_neighbor_count(matrix.rows()));
    return order_by_score(Method::LS, matrix.feature_ids(), laplacian_scores(matrix.values(), graph), true);
}

RankedFeatureList tb_rank(const DesignMatrix& matrix, std::uint64_t seed, std::size_t n_trees)
{
    if (!matrix.has_targets()) {
        throw Error(ErrorCode::MissingTargets, "tree-based ranking needs a target column");
    }
    require_nonempty(matrix, 2);
    ForestOptions options;
    options.n_trees = n_trees;
    options.seed = seed;
    const auto forest = fit_forest(matrix, options);
    return order_by_score(Method::TB, matrix.feature_ids(), forest.importances(), false);
}

RankedFeatureList rank_features(const DesignMatrix& matrix, Method method, std::uint64_t seed)
{
    switch (method) {
    case Method::ARR: return arr_rank(matrix);
    case Method::LS: return ls_rank(matrix);
    case Method::TB: return tb_rank(matrix, seed);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown ranking method");
}

FeatureSet subset(std::size_t k, Index t, Method method, const DesignMatrix& matrix, std::uint64_t seed)
{
    if (k < 1 || k > static_cast<std::size_t>(matrix.cols())) {
        throw Error(ErrorCode::OutOfRange, "k=" + std::to_string(k) + " outside [1, n]");
    }
    return rank_features(prefix(matrix, t), method, seed).top(k);
}

void write_ranking_csv(std::ostream& out, const RankedFeatureList& ranking, std::optional<std::size_t> top_k)
{
    out << "rank,feature_index,feature_name,score,method\n";
    const std::size_t rows = top_k ? std::min(*top_k, ranking.order.size()) : ranking.order.size();
    char score[32];
    for (std::size_t r = 0; r < rows; ++r) {
        std::snprintf(score, sizeof(score), "%.17g", ranking.scores[r]);
        out << (r + 1) << ',' << ranking.order[r].index << ',' << ranking.order[r].name << ',' << score << ','
            << to_string(ranking.method) << '\n';
    }
}

} // namespace osfs
