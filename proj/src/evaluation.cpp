#include "osfs/evaluation.hpp"

#include "osfs/forest.hpp"
#include "osfs/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

namespace osfs {

namespace {

// Minimum rows after `start` (1-based) that a study start needs.
std::size_t rows_needed(const StudyOptions& options)
{
    return options.osfs.horizon() + options.evaluation.training_window;
}

void write_number(std::ostream& out, double v)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    out << buffer;
}

} // namespace

NmaeReport nmae1_protocol(const DesignMatrix& matrix, std::size_t start, std::size_t t_k, const FeatureSet& features,
                          std::uint64_t seed, const EvaluationOptions& options)
{
    if (start < 1) {
        throw Error(ErrorCode::OutOfRange, "start is a 1-based time index");
    }
    const auto begin = static_cast<Index>(start - 1 + t_k);
    const auto window = static_cast<Index>(options.training_window);
    if (begin + window >= matrix.rows()) {
        throw Error(ErrorCode::InsufficientSamples, "no test rows after the training window from start " +
                                                        std::to_string(start) + " with t_k " + std::to_string(t_k));
    }
    const DesignMatrix restricted = matrix.restrict_to(features.members());
    const auto forest = fit_forest(restricted.block_rows(begin, window), {options.n_trees, seed, true});
    const DesignMatrix test = restricted.block_rows(begin + window, matrix.rows() - begin - window);
    return nmae(test.targets(), forest.predict(test));
}

RowSplit split_rows(Index m, double train_fraction, std::uint64_t seed)
{
    std::vector<Index> rows(static_cast<std::size_t>(m));
    std::iota(rows.begin(), rows.end(), Index{0});
    Rng rng(seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(m)));
    RowSplit split{{rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train)},
                   {rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end()}};
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

NmaeReport nmae2_protocol(const DesignMatrix& matrix, const FeatureSet& features, std::uint64_t seed,
                          const EvaluationOptions& options)
{
    if (matrix.rows() < 10) {
        throw Error(ErrorCode::InsufficientSamples, "offline protocol needs at least 10 rows");
    }
    const DesignMatrix restricted = matrix.restrict_to(features.members());
    const RowSplit split = split_rows(matrix.rows(), options.train_fraction, derive_seed(seed, 1));
    const auto forest = fit_forest(restricted.gather_rows(split.train), {options.n_trees, derive_seed(seed, 2), true});
    const DesignMatrix test = restricted.gather_rows(split.test);
    return nmae(test.targets(), forest.predict(test));
}

Summary summarize(std::span<const double> values)
{
    if (values.empty()) {
        return {};
    }
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double squares = 0.0;
    for (double v : values) {
        squares += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(squares / n)};
}

std::vector<std::size_t> draw_start_times(std::size_t n_starts, std::size_t upper, std::uint64_t seed)
{
    std::vector<std::size_t> starts;
    if (n_starts == 0) {
        return starts;
    }
    starts.push_back(1);
    if (n_starts > 1 && upper < 2) {
        throw Error(ErrorCode::InsufficientSamples, "trace too short for random start times");
    }
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> draw(2, std::max<std::size_t>(upper, 2));
    while (starts.size() < n_starts) {
        starts.push_back(draw(rng));
    }
    return starts;
}

ExperimentReport run_study(const DesignMatrix& matrix, Method method, std::size_t n_starts, std::uint64_t seed,
                           const StudyOptions& options)
{
    const auto m = static_cast<std::size_t>(matrix.rows());
    if (n_starts == 0) {
        throw Error(ErrorCode::InvalidConfig, "need at least one start time");
    }
    if (m <= rows_needed(options)) {
        throw Error(ErrorCode::InsufficientSamples, "trace has " + std::to_string(m) + " rows; a study needs more than " +
                                                        std::to_string(rows_needed(options)));
    }
    if (!matrix.has_targets()) {
        throw Error(ErrorCode::MissingTargets, "the evaluation protocols need a target column");
    }
    const std::size_t upper = std::min(options.max_start, m - rows_needed(options));

    ExperimentReport report;
    report.method = method;
    report.seed = seed;
    report.n_features = static_cast<std::size_t>(matrix.cols());

    const auto starts = draw_start_times(n_starts, upper, derive_seed(seed, 1));
    const std::uint64_t nmae2_seed = derive_seed(seed, 2);
    std::vector<double> ks;
    std::vector<double> tks;
    std::vector<double> nmae1s;
    std::vector<double> nmae2s;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        OsfsConfig config = options.osfs;
        config.method = method;
        config.seed = derive_seed(seed, 100 + i);
        const OsfsResult result = run_offline(matrix, config, starts[i]);

        StartRecord record;
        record.start = starts[i];
        record.k = result.k;
        record.t_k = result.t_k;
        record.terminated_by = result.terminated_by;
        record.samples_read = result.samples_read;
        record.features = result.features.members();
        record.nmae1 =
            nmae1_protocol(matrix, starts[i], result.t_k, result.features, derive_seed(seed, 200 + i), options.evaluation)
                .nmae;
        record.nmae2 = nmae2_protocol(matrix, result.features, nmae2_seed, options.evaluation).nmae;
        ks.push_back(static_cast<double>(record.k));
        tks.push_back(static_cast<double>(record.t_k));
        nmae1s.push_back(record.nmae1);
        nmae2s.push_back(record.nmae2);
        report.per_start.push_back(std::move(record));
    }
    report.k = summarize(ks);
    report.t_k = summarize(tks);
    report.nmae1 = summarize(nmae1s);
    report.nmae2 = summarize(nmae2s);
    report.baseline_nmae2 = nmae2_protocol(matrix, FeatureSet(matrix.feature_ids()), nmae2_seed, options.evaluation).nmae;
    return report;
}

nlohmann::json to_json(const ExperimentReport& report)
{
    nlohmann::json doc;
    doc["method"] = to_string(report.method);
    doc["seed"] = report.seed;
    doc["n_features"] = report.n_features;
    doc["per_start"] = nlohmann::json::array();
    for (const auto& r : report.per_start) {
        nlohmann::json row{{"start", r.start},
                           {"k", r.k},
                           {"t_k", r.t_k},
                           {"terminated_by", to_string(r.terminated_by)},
                           {"samples_read", r.samples_read},
                           {"nmae1", r.nmae1},
                           {"nmae2", r.nmae2}};
        row["features"] = nlohmann::json::array();
        for (const auto& f : r.features) {
            row["features"].push_back(f.index);
        }
        doc["per_start"].push_back(std::move(row));
    }
    auto summary = [](const Summary& s) { return nlohmann::json{{"mean", s.mean}, {"std", s.std}}; };
    doc["aggregate"] = {{"k", summary(report.k)},
                        {"t_k", summary(report.t_k)},
                        {"nmae1", summary(report.nmae1)},
                        {"nmae2", summary(report.nmae2)}};
    doc["baseline_nmae2"] = report.baseline_nmae2;
    return doc;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report)
{
    out << "Method,k_mean,k_std,tk_mean,tk_std,NMAE1_mean,NMAE1_std,NMAE2_mean,NMAE2_std,baseline\n";
    out << to_string(report.method);
    for (double v : {report.k.mean, report.k.std, report.t_k.mean, report.t_k.std, report.nmae1.mean, report.nmae1.std,
                     report.nmae2.mean, report.nmae2.std, report.baseline_nmae2}) {
        out << ',';
        write_number(out, v);
    }
    out << '\n';
}

SimilarityTable similarity_evolution(const DesignMatrix& matrix, Method method, const std::vector<std::size_t>& k_list,
                                     const std::vector<std::size_t>& t_list, std::size_t n_starts, std::uint64_t seed,
                                     std::size_t max_start)
{
    if (k_list.empty() || t_list.empty() || n_starts == 0) {
        throw Error(ErrorCode::InvalidConfig, "k list, t list and start count must be non-empty");
    }
    const auto m = static_cast<std::size_t>(matrix.rows());
    const std::size_t t_max = *std::max_element(t_list.begin(), t_list.end());
    if (t_max > m) {
        throw Error(ErrorCode::OutOfRange, "largest t exceeds the trace length");
    }
    for (std::size_t t : t_list) {
        if (t < 2) {
            throw Error(ErrorCode::OutOfRange, "every t must be at least 2");
        }
    }
    for (std::size_t k : k_list) {
        if (k < 1 || k > static_cast<std::size_t>(matrix.cols())) {
            throw Error(ErrorCode::OutOfRange, "k = " + std::to_string(k) + " is outside [1, n]");
        }
    }

    SimilarityTable table;
    table.method = method;
    table.k_list = k_list;
    table.t_list = t_list;
    const std::size_t upper = std::min(max_start, m - t_max + 1);
    table.starts = upper >= 2 ? draw_start_times(n_starts, upper, derive_seed(seed, 1))
                              : std::vector<std::size_t>(n_starts, 1);
    table.mean_sim = Eigen::MatrixXd::Zero(static_cast<Index>(k_list.size()), static_cast<Index>(t_list.size()));

    for (std::size_t s = 0; s < table.starts.size(); ++s) {
        const auto first = static_cast<Index>(table.starts[s] - 1);
        const std::uint64_t rank_seed = derive_seed(seed, 100 + s);
        std::map<std::size_t, RankedFeatureList> rankings;
        auto ranking = [&](std::size_t t) -> const RankedFeatureList& {
            auto it = rankings.find(t);
            if (it == rankings.end()) {
                it = rankings
                         .emplace(t, rank_features(matrix.block_rows(first, static_cast<Index>(t)), method, rank_seed))
                         .first;
            }
            return it->second;
        };
        for (std::size_t c = 0; c < t_list.size(); ++c) {
            const std::size_t t = t_list[c];
            for (std::size_t r = 0; r < k_list.size(); ++r) {
                const double value = sim(ranking(t / 2).top(k_list[r]), ranking(t).top(k_list[r]));
                table.mean_sim(static_cast<Index>(r), static_cast<Index>(c)) += value;
            }
        }
    }
    table.mean_sim /= static_cast<double>(table.starts.size());
    return table;
}

void write_similarity_csv(std::ostream& out, const SimilarityTable& table)
{
    out << "k,t,mean_sim\n";
    for (std::size_t r = 0; r < table.k_list.size(); ++r) {
        for (std::size_t c = 0; c < table.t_list.size(); ++c) {
            out << table.k_list[r] << ',' << table.t_list[c] << ',';
            write_number(out, table.mean_sim(static_cast<Index>(r), static_cast<Index>(c)));
            out << '\n';
        }
    }
}

} // namespace osfs
