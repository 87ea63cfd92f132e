#ifndef OSFS_ONLINE_HPP
#define OSFS_ONLINE_HPP

#include "osfs/ranking.hpp"
#include "osfs/trace.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace osfs {

// |a ∩ b| / k for two sets of equal size k.
[[nodiscard]] double sim(const FeatureSet& a, const FeatureSet& b);

struct OsfsConfig {
    double eta = 0.5;
    std::vector<std::size_t> k_grid{4, 16, 64, 256};
    std::vector<std::size_t> checkpoints{32, 64, 128, 256, 512, 1024};
    // Prefix lengths of the two sets compared before the first checkpoint.
    std::size_t warmup_short = 8;
    std::size_t warmup_long = 16;
    Method method = Method::ARR;
    // Forwarded to TB ranking.
    std::uint64_t seed = 0;

    void validate() const;
    [[nodiscard]] std::size_t horizon() const { return checkpoints.back(); }
};

enum class Termination {
    Decline, // similarity was above eta and then dropped
    Horizon, // still above eta at the last checkpoint
    Fallback // grid exhausted
};

[[nodiscard]] std::string_view to_string(Termination termination) noexcept;

struct CheckpointRecord {
    std::size_t k = 0;
    std::size_t t = 0;
    double sim = 0.0;

    friend bool operator==(const CheckpointRecord&, const CheckpointRecord&) = default;
};

struct OsfsResult {
    FeatureSet features;
    std::size_t k = 0;
    // Prefix length the returned set was ranked on. Fewer samples than were
    // read: a decline detected at t reports the set built from t/4 samples.
    std::size_t t_k = 0;
    Termination terminated_by = Termination::Fallback;
    // One entry per similarity evaluated, in evaluation order.
    std::vector<CheckpointRecord> checkpoint_log;
    std::size_t samples_read = 0;
    Method method = Method::ARR;

    friend bool operator==(const OsfsResult&, const OsfsResult&) = default;
};

[[nodiscard]] nlohmann::json to_json(const OsfsResult& result);

// Event-driven form of the online stable-feature-set search. Samples are fed
// one at a time; the first call that settles the search returns the result.
// Rankings are cached per prefix length, since subset(k, t) only depends on t
// through the ranking of the first t samples.
class OsfsState {
public:
    OsfsState(std::vector<FeatureId> features, OsfsConfig config);

    // Empty while more samples are needed.
    std::optional<OsfsResult> feed(const Sample& sample);

    [[nodiscard]] bool done() const noexcept { return done_; }
    [[nodiscard]] std::size_t samples_read() const noexcept { return count_; }
    [[nodiscard]] std::size_t current_k() const { return config_.k_grid[k_pos_]; }
    [[nodiscard]] const OsfsConfig& config() const noexcept { return config_; }

private:
    [[nodiscard]] FeatureSet top_k(std::size_t k, std::size_t t);
    void begin_k();
    std::optional<OsfsResult> check(std::size_t t);
    std::optional<OsfsResult> advance_k();
    OsfsResult finish(const FeatureSet& features, std::size_t t_k, Termination how);

    std::vector<FeatureId> features_;
    OsfsConfig config_;
    Eigen::MatrixXd stored_;
    std::vector<double> targets_;
    std::size_t count_ = 0;
    std::size_t last_time_ = 0;
    std::size_t k_pos_ = 0;
    std::size_t next_checkpoint_ = 0;
    std::optional<FeatureSet> older_;
    std::optional<FeatureSet> newer_;
    std::size_t older_t_ = 0;
    std::size_t newer_t_ = 0;
    double sim_older_newer_ = 0.0;
    std::vector<CheckpointRecord> log_;
    std::map<std::size_t, RankedFeatureList> rankings_;
    bool done_ = false;
};

// Feeds rows start, start+1, ... (1-based) into a fresh state until it
// settles. Running out of rows first is an error.
[[nodiscard]] OsfsResult run_offline(const DesignMatrix& matrix, const OsfsConfig& config, std::size_t start = 1);

} // namespace osfs

#endif // OSFS_ONLINE_HPP
