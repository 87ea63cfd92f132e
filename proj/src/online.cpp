#include "osfs/online.hpp"

#include "osfs/error.hpp"

#include <algorithm>
#include <functional>
#include <iterator>

namespace osfs {

double sim(const FeatureSet& a, const FeatureSet& b)
{
    if (a.k() != b.k()) {
        throw Error(ErrorCode::SizeMismatch,
                    "sets of size " + std::to_string(a.k()) + " and " + std::to_string(b.k()));
    }
    const auto& x = a.members();
    const auto& y = b.members();
    std::size_t shared = 0;
    auto i = x.begin();
    auto j = y.begin();
    while (i != x.end() && j != y.end()) {
        if (i->index < j->index) {
            ++i;
        } else if (j->index < i->index) {
            ++j;
        } else {
            ++shared;
            ++i;
            ++j;
        }
    }
    return static_cast<double>(shared) / static_cast<double>(a.k());
}

void OsfsConfig::validate() const
{
    auto increasing = [](const std::vector<std::size_t>& v) {
        return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
    };
    if (!(eta > 0.0 && eta < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "eta must lie in (0, 1)");
    }
    if (k_grid.empty() || k_grid.front() < 1 || !increasing(k_grid)) {
        throw Error(ErrorCode::InvalidConfig, "k grid must be non-empty, positive and strictly increasing");
    }
    if (checkpoints.empty() || !increasing(checkpoints)) {
        throw Error(ErrorCode::InvalidConfig, "checkpoints must be non-empty and strictly increasing");
    }
    if (warmup_short < 1 || warmup_short >= warmup_long || warmup_long >= checkpoints.front()) {
        throw Error(ErrorCode::InvalidConfig, "warm-up lengths must satisfy 1 <= short < long < first checkpoint");
    }
}

std::string_view to_string(Termination termination) noexcept
{
    switch (termination) {
    case Termination::Decline: return "A_decline";
    case Termination::Horizon: return "B_horizon";
    case Termination::Fallback: return "fallback";
    }
    return "?";
}

nlohmann::json to_json(const OsfsResult& result)
{
    nlohmann::json doc;
    doc["method"] = to_string(result.method);
    doc["k"] = result.k;
    doc["t_k"] = result.t_k;
    doc["terminated_by"] = to_string(result.terminated_by);
    doc["samples_read"] = result.samples_read;
    doc["features"] = nlohmann::json::array();
    for (const auto& f : result.features.members()) {
        doc["features"].push_back({{"index", f.index}, {"name", f.name}});
    }
    doc["checkpoints"] = nlohmann::json::array();
    for (const auto& c : result.checkpoint_log) {
        doc["checkpoints"].push_back({{"k", c.k}, {"t", c.t}, {"sim", c.sim}});
    }
    return doc;
}

OsfsState::OsfsState(std::vector<FeatureId> features, OsfsConfig config)
    : features_(std::move(features)), config_(std::move(config))
{
    config_.validate();
    const std::size_t n = features_.size();
    std::vector<std::size_t> usable;
    std::copy_if(config_.k_grid.begin(), config_.k_grid.end(), std::back_inserter(usable),
                 [n](std::size_t k) { return k <= n; });
    if (usable.empty()) {
        throw Error(ErrorCode::InvalidConfig, "only " + std::to_string(n) + " features; smallest k is " +
                                                  std::to_string(config_.k_grid.front()));
    }
    config_.k_grid = std::move(usable);
    stored_.resize(static_cast<Index>(config_.horizon()), static_cast<Index>(n));
}

FeatureSet OsfsState::top_k(std::size_t k, std::size_t t)
{
    auto it = rankings_.find(t);
    if (it == rankings_.end()) {
        const auto rows = static_cast<Index>(t);
        std::optional<Eigen::VectorXd> targets;
        if (config_.method == Method::TB) {
            targets = Eigen::Map<const Eigen::VectorXd>(targets_.data(), rows);
        }
        DesignMatrix window(stored_.topRows(rows), features_, std::move(targets));
        it = rankings_.emplace(t, rank_features(window, config_.method, config_.seed)).first;
    }
    return it->second.top(k);
}

void OsfsState::begin_k()
{
    const std::size_t k = current_k();
    older_ = top_k(k, config_.warmup_short);
    newer_ = top_k(k, config_.warmup_long);
    older_t_ = config_.warmup_short;
    newer_t_ = config_.warmup_long;
    sim_older_newer_ = sim(*older_, *newer_);
    log_.push_back({k, config_.warmup_long, sim_older_newer_});
    next_checkpoint_ = 0;
}

std::optional<OsfsResult> OsfsState::check(std::size_t t)
{
    const std::size_t k = current_k();
    FeatureSet latest = top_k(k, t);
    const double sim_latest = sim(*newer_, latest);
    log_.push_back({k, t, sim_latest});
    if (sim_latest < sim_older_newer_ && sim_older_newer_ > config_.eta) {
        return finish(*older_, older_t_, Termination::Decline);
    }
    if (sim_latest > config_.eta && t == config_.horizon()) {
        return finish(*newer_, newer_t_, Termination::Horizon);
    }
    older_ = std::move(newer_);
    older_t_ = newer_t_;
    newer_ = std::move(latest);
    newer_t_ = t;
    sim_older_newer_ = sim_latest;
    return std::nullopt;
}

// Moves on to the next k, replaying every checkpoint from stored samples.
std::optional<OsfsResult> OsfsState::advance_k()
{
    while (k_pos_ + 1 < config_.k_grid.size()) {
        ++k_pos_;
        begin_k();
        for (std::size_t t : config_.checkpoints) {
            if (auto result = check(t)) {
                return result;
            }
        }
    }
    return finish(*newer_, newer_t_, Termination::Fallback);
}

OsfsResult OsfsState::finish(const FeatureSet& features, std::size_t t_k, Termination how)
{
    done_ = true;
    return OsfsResult{features, current_k(), t_k, how, log_, count_, config_.method};
}

std::optional<OsfsResult> OsfsState::feed(const Sample& sample)
{
    if (done_) {
        throw Error(ErrorCode::FedAfterDone, "the search has already finished");
    }
    if (sample.values.size() != static_cast<Index>(features_.size())) {
        throw Error(ErrorCode::DimensionMismatch, "sample has " + std::to_string(sample.values.size()) +
                                                      " values, expected " + std::to_string(features_.size()));
    }
    if (count_ > 0 && sample.time_index <= last_time_) {
        throw Error(ErrorCode::OutOfRange, "sample time indices must increase");
    }
    if (config_.method == Method::TB && !sample.target) {
        throw Error(ErrorCode::MissingTargets, "tree-based ranking needs targets in the stream");
    }

    stored_.row(static_cast<Index>(count_)) = sample.values.transpose();
    if (config_.method == Method::TB) {
        targets_.push_back(*sample.target);
    }
    last_time_ = sample.time_index;
    const std::size_t t = ++count_;

    if (t == config_.warmup_long) {
        begin_k();
        return std::nullopt;
    }
    if (next_checkpoint_ < config_.checkpoints.size() && t == config_.checkpoints[next_checkpoint_]) {
        if (auto result = check(t)) {
            return result;
        }
        if (++next_checkpoint_ == config_.checkpoints.size()) {
            return advance_k();
        }
    }
    return std::nullopt;
}

OsfsResult run_offline(const DesignMatrix& matrix, const OsfsConfig& config, std::size_t start)
{
    config.validate();
    if (start < 1) {
        throw Error(ErrorCode::OutOfRange, "start is a 1-based time index");
    }
    const auto first = static_cast<Index>(start - 1);
    if (first + static_cast<Index>(config.checkpoints.front()) > matrix.rows()) {
        throw Error(ErrorCode::InsufficientSamples, "fewer than " + std::to_string(config.checkpoints.front()) +
                                                        " rows from start " + std::to_string(start));
    }
    OsfsState state(matrix.feature_ids(), config);
    const bool with_target = config.method == Method::TB;
    for (Index row = first; row < matrix.rows(); ++row) {
        if (auto result = state.feed(matrix.sample(row, with_target))) {
            return *result;
        }
    }
    throw Error(ErrorCode::InsufficientSamples,
                "trace ended after " + std::to_string(state.samples_read()) + " samples without a result");
}

} // namespace osfs
