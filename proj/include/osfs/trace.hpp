#ifndef OSFS_TRACE_HPP
#define OSFS_TRACE_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace osfs {

using Index = Eigen::Index;

inline constexpr double kDefaultVarianceThreshold = 1e-4;

// A data source. `index` is the column position in the trace as loaded,
// before any filtering, and stays attached to the feature for its lifetime.
struct FeatureId {
    std::size_t index = 0;
    std::string name;

    friend bool operator==(const FeatureId& a, const FeatureId& b) noexcept { return a.index == b.index; }
    friend auto operator<=>(const FeatureId& a, const FeatureId& b) noexcept { return a.index <=> b.index; }
};

// One reading of every retained feature at time `time_index` (1-based).
struct Sample {
    Eigen::VectorXd values;
    std::optional<double> target;
    std::size_t time_index = 0;
};

// Counts target reads per source row. Attach with DesignMatrix::with_probe to
// check which rows of the target column a computation touched.
class TargetReadProbe {
public:
    explicit TargetReadProbe(Index rows) : reads_(static_cast<std::size_t>(rows), 0) {}

    void record(Index row) { ++reads_.at(static_cast<std::size_t>(row)); }
    [[nodiscard]] std::size_t reads(Index row) const { return reads_.at(static_cast<std::size_t>(row)); }
    [[nodiscard]] std::size_t reads_in(Index begin, Index end) const;
    [[nodiscard]] std::size_t total() const;

private:
    std::vector<std::size_t> reads_;
};

// m samples by n features, column-major, immutable once built. Targets are
// optional and only reachable through the accessors below so that reads can
// be observed.
class DesignMatrix {
public:
    DesignMatrix() = default;
    DesignMatrix(Eigen::MatrixXd values, std::vector<FeatureId> feature_ids,
                 std::optional<Eigen::VectorXd> targets = std::nullopt);

    [[nodiscard]] Index rows() const noexcept { return values_.rows(); }
    [[nodiscard]] Index cols() const noexcept { return values_.cols(); }
    [[nodiscard]] const Eigen::MatrixXd& values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<FeatureId>& feature_ids() const noexcept { return ids_; }
    [[nodiscard]] bool has_targets() const noexcept { return targets_.has_value(); }

    [[nodiscard]] double target(Index row) const;
    [[nodiscard]] Eigen::VectorXd targets(Index begin, Index count) const;
    [[nodiscard]] Eigen::VectorXd targets() const { return targets(0, rows()); }
    [[nodiscard]] Eigen::VectorXd gather_targets(std::span<const Index> rows) const;

    // Column position of the feature with original index `feature_index`.
    [[nodiscard]] std::optional<Index> position_of(std::size_t feature_index) const;

    [[nodiscard]] DesignMatrix block_rows(Index begin, Index count) const;
    [[nodiscard]] DesignMatrix gather_rows(std::span<const Index> rows) const;
    // Keeps the listed features (matched by index) in ascending index order.
    [[nodiscard]] DesignMatrix restrict_to(std::span<const FeatureId> features) const;
    [[nodiscard]] DesignMatrix without_targets() const;
    // Same rows and targets, new feature columns.
    [[nodiscard]] DesignMatrix with_features(Eigen::MatrixXd values, std::vector<FeatureId> feature_ids) const;
    [[nodiscard]] DesignMatrix with_probe(std::shared_ptr<TargetReadProbe> probe) const;

    [[nodiscard]] Sample sample(Index row, bool with_target) const;

private:
    [[nodiscard]] Index origin(Index row) const;
    void observe(Index row) const;

    Eigen::MatrixXd values_;
    std::vector<FeatureId> ids_;
    std::optional<Eigen::VectorXd> targets_;
    std::shared_ptr<TargetReadProbe> probe_;
    // Row of the probed source matrix for each local row; empty means identity.
    std::vector<Index> origin_;
};

struct PreprocessReport {
    std::vector<FeatureId> dropped_low_variance;
    std::vector<FeatureId> dropped_non_numeric;
    // Aligned with the retained features.
    std::vector<double> scale_min;
    std::vector<double> scale_max;
    std::size_t retained_count = 0;
};

struct Preprocessed {
    DesignMatrix matrix;
    PreprocessReport report;
};

// Cells equal to "", "NaN" or "nan" load as quiet NaN.
[[nodiscard]] bool is_missing_marker(std::string_view cell) noexcept;

[[nodiscard]] DesignMatrix load_trace(const std::filesystem::path& path,
                                      const std::optional<std::string>& target_column);
[[nodiscard]] DesignMatrix read_trace(std::istream& in, const std::optional<std::string>& target_column);

// Writes the header and rows with 17 significant digits; the target, if any,
// becomes the last column.
void write_trace(std::ostream& out, const DesignMatrix& matrix, const std::string& target_name = "y");
void save_trace(const std::filesystem::path& path, const DesignMatrix& matrix, const std::string& target_name = "y");

// Min-max scales every column to [0,1] and drops columns whose population
// variance after scaling falls below the threshold. Columns holding a
// missing marker are dropped as non-numeric.
[[nodiscard]] Preprocessed preprocess(const DesignMatrix& matrix,
                                      double variance_threshold = kDefaultVarianceThreshold);

// The first t rows.
[[nodiscard]] DesignMatrix prefix(const DesignMatrix& matrix, Index t);

} // namespace osfs

#endif // OSFS_TRACE_HPP
