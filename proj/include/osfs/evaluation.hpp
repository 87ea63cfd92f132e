#ifndef OSFS_EVALUATION_HPP
#define OSFS_EVALUATION_HPP

#include "osfs/error.hpp"
#include "osfs/online.hpp"
#include "osfs/ranking.hpp"
#include "osfs/trace.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace osfs {

struct NmaeReport {
    double nmae = 0.0;
    std::size_t q = 0;
    double mean_target = 0.0;
};

// Mean absolute error divided by the mean of the true values.
template <typename TrueDerived, typename PredDerived>
NmaeReport nmae(const Eigen::MatrixBase<TrueDerived>& y_true, const Eigen::MatrixBase<PredDerived>& y_pred)
{
    if (y_true.size() != y_pred.size()) {
        throw Error(ErrorCode::LengthMismatch, "prediction and target lengths differ");
    }
    if (y_true.size() == 0) {
        throw Error(ErrorCode::LengthMismatch, "empty test set");
    }
    const double mean = static_cast<double>(y_true.mean());
    if (mean == 0.0) {
        throw Error(ErrorCode::ZeroMeanTarget, "mean target is zero");
    }
    const double mae = static_cast<double>((y_true - y_pred).cwiseAbs().mean());
    return {mae / mean, static_cast<std::size_t>(y_true.size()), mean};
}

struct EvaluationOptions {
    std::size_t n_trees = 100;
    // Rows used to train the online predictor.
    std::size_t training_window = 1024;
    double train_fraction = 0.7;
};

// Online protocol: train on the `training_window` rows that follow the
// selection window [start, start + t_k) and test on every later row.
[[nodiscard]] NmaeReport nmae1_protocol(const DesignMatrix& matrix, std::size_t start, std::size_t t_k,
                                        const FeatureSet& features, std::uint64_t seed,
                                        const EvaluationOptions& options = {});

struct RowSplit {
    std::vector<Index> train;
    std::vector<Index> test;
};

// Seeded uniform split; both halves sorted.
[[nodiscard]] RowSplit split_rows(Index m, double train_fraction, std::uint64_t seed);

// Offline protocol: seeded 70/30 split over the whole trace.
[[nodiscard]] NmaeReport nmae2_protocol(const DesignMatrix& matrix, const FeatureSet& features, std::uint64_t seed,
                                        const EvaluationOptions& options = {});

struct Summary {
    double mean = 0.0;
    double std = 0.0; // population

    friend bool operator==(const Summary&, const Summary&) = default;
};

[[nodiscard]] Summary summarize(std::span<const double> values);

struct StartRecord {
    std::size_t start = 0;
    std::size_t k = 0;
    std::size_t t_k = 0;
    Termination terminated_by = Termination::Fallback;
    std::size_t samples_read = 0;
    std::vector<FeatureId> features;
    double nmae1 = 0.0;
    double nmae2 = 0.0;
};

struct ExperimentReport {
    Method method = Method::ARR;
    std::uint64_t seed = 0;
    std::size_t n_features = 0;
    std::vector<StartRecord> per_start;
    Summary k;
    Summary t_k;
    Summary nmae1;
    Summary nmae2;
    double baseline_nmae2 = 0.0;
};

struct StudyOptions {
    OsfsConfig osfs;
    EvaluationOptions evaluation;
    // Random start times are drawn from [2, min(max_start, m - horizon - window)].
    std::size_t max_start = 10000;
};

// Start time 1 plus n_starts - 1 seeded uniform draws from [2, upper].
[[nodiscard]] std::vector<std::size_t> draw_start_times(std::size_t n_starts, std::size_t upper, std::uint64_t seed);

[[nodiscard]] ExperimentReport run_study(const DesignMatrix& matrix, Method method, std::size_t n_starts,
                                         std::uint64_t seed, const StudyOptions& options = {});

[[nodiscard]] nlohmann::json to_json(const ExperimentReport& report);
// Method,k_mean,k_std,tk_mean,tk_std,NMAE1_mean,NMAE1_std,NMAE2_mean,NMAE2_std,baseline
void write_report_csv(std::ostream& out, const ExperimentReport& report);

struct SimilarityTable {
    Method method = Method::ARR;
    std::vector<std::size_t> k_list;
    std::vector<std::size_t> t_list;
    std::vector<std::size_t> starts;
    // rows follow k_list, columns follow t_list
    Eigen::MatrixXd mean_sim;
};

// Mean over start times of sim(F_{k,t/2}, F_{k,t}), sets ranked on windows
// beginning at each start.
[[nodiscard]] SimilarityTable similarity_evolution(const DesignMatrix& matrix, Method method,
                                                   const std::vector<std::size_t>& k_list,
                                                   const std::vector<std::size_t>& t_list, std::size_t n_starts,
                                                   std::uint64_t seed, std::size_t max_start = 10000);

// k,t,mean_sim
void write_similarity_csv(std::ostream& out, const SimilarityTable& table);

} // namespace osfs

#endif // OSFS_EVALUATION_HPP
