#include "osfs/trace.hpp"

#include "osfs/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace osfs {

std::size_t TargetReadProbe::reads_in(Index begin, Index end) const
{
    std::size_t total = 0;
    for (Index row = begin; row < end; ++row) {
        total += reads_.at(static_cast<std::size_t>(row));
    }
    return total;
}

std::size_t TargetReadProbe::total() const
{
    return std::accumulate(reads_.begin(), reads_.end(), std::size_t{0});
}

DesignMatrix::DesignMatrix(Eigen::MatrixXd values, std::vector<FeatureId> feature_ids,
                           std::optional<Eigen::VectorXd> targets)
    : values_(std::move(values)), ids_(std::move(feature_ids)), targets_(std::move(targets))
{
    if (static_cast<Index>(ids_.size()) != values_.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "feature id count does not match column count");
    }
    if (targets_ && targets_->size() != values_.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "target length does not match row count");
    }
    std::unordered_set<std::size_t> seen_index;
    std::unordered_set<std::string> seen_name;
    for (const auto& id : ids_) {
        if (!seen_index.insert(id.index).second || !seen_name.insert(id.name).second) {
            throw Error(ErrorCode::InvalidSpec, "duplicate feature '" + id.name + "'");
        }
    }
}

Index DesignMatrix::origin(Index row) const
{
    return origin_.empty() ? row : origin_[static_cast<std::size_t>(row)];
}

void DesignMatrix::observe(Index row) const
{
    if (probe_) {
        probe_->record(origin(row));
    }
}

double DesignMatrix::target(Index row) const
{
    if (!targets_) {
        throw Error(ErrorCode::MissingTargets, "matrix has no target column");
    }
    if (row < 0 || row >= rows()) {
        throw Error(ErrorCode::OutOfRange, "target row out of range");
    }
    observe(row);
    return (*targets_)[row];
}

Eigen::VectorXd DesignMatrix::targets(Index begin, Index count) const
{
    if (!targets_) {
        throw Error(ErrorCode::MissingTargets, "matrix has no target column");
    }
    if (begin < 0 || count < 0 || begin + count > rows()) {
        throw Error(ErrorCode::OutOfRange, "target range out of range");
    }
    for (Index row = begin; row < begin + count; ++row) {
        observe(row);
    }
    return targets_->segment(begin, count);
}

Eigen::VectorXd DesignMatrix::gather_targets(std::span<const Index> rows) const
{
    Eigen::VectorXd out(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out[static_cast<Index>(i)] = target(rows[i]);
    }
    return out;
}

std::optional<Index> DesignMatrix::position_of(std::size_t feature_index) const
{
    // ids_ are kept in ascending index order by every constructor in this file,
    // but callers may build matrices by hand, so search linearly on a miss.
    auto it = std::lower_bound(ids_.begin(), ids_.end(), feature_index,
                               [](const FeatureId& id, std::size_t value) { return id.index < value; });
    if (it != ids_.end() && it->index == feature_index) {
        return static_cast<Index>(it - ids_.begin());
    }
    for (std::size_t pos = 0; pos < ids_.size(); ++pos) {
        if (ids_[pos].index == feature_index) {
            return static_cast<Index>(pos);
        }
    }
    return std::nullopt;
}

DesignMatrix DesignMatrix::block_rows(Index begin, Index count) const
{
    if (begin < 0 || count < 0 || begin + count > rows()) {
        throw Error(ErrorCode::OutOfRange, "row block out of range");
    }
    std::vector<Index> rows(static_cast<std::size_t>(count));
    std::iota(rows.begin(), rows.end(), begin);
    return gather_rows(rows);
}

DesignMatrix DesignMatrix::gather_rows(std::span<const Index> rows) const
{
    const auto m = static_cast<Index>(rows.size());
    Eigen::MatrixXd values(m, cols());
    std::optional<Eigen::VectorXd> targets;
    if (targets_) {
        targets.emplace(m);
    }
    for (Index i = 0; i < m; ++i) {
        const Index src = rows[static_cast<std::size_t>(i)];
        if (src < 0 || src >= this->rows()) {
            throw Error(ErrorCode::OutOfRange, "row index out of range");
        }
        values.row(i) = values_.row(src);
        if (targets_) {
            (*targets)[i] = (*targets_)[src];
        }
    }
    DesignMatrix out(std::move(values), ids_, std::move(targets));
    if (probe_) {
        out.probe_ = probe_;
        out.origin_.reserve(rows.size());
        for (Index src : rows) {
            out.origin_.push_back(origin(src));
        }
    }
    return out;
}

DesignMatrix DesignMatrix::restrict_to(std::span<const FeatureId> features) const
{
    std::vector<Index> positions;
    positions.reserve(features.size());
    for (const auto& feature : features) {
        auto pos = position_of(feature.index);
        if (!pos) {
            throw Error(ErrorCode::OutOfRange, "feature '" + feature.name + "' is not in the matrix");
        }
        positions.push_back(*pos);
    }
    std::sort(positions.begin(), positions.end(),
              [this](Index a, Index b) { return ids_[static_cast<std::size_t>(a)] < ids_[static_cast<std::size_t>(b)]; });
    positions.erase(std::unique(positions.begin(), positions.end()), positions.end());

    Eigen::MatrixXd values(rows(), static_cast<Index>(positions.size()));
    std::vector<FeatureId> ids;
    ids.reserve(positions.size());
    for (std::size_t j = 0; j < positions.size(); ++j) {
        values.col(static_cast<Index>(j)) = values_.col(positions[j]);
        ids.push_back(ids_[static_cast<std::size_t>(positions[j])]);
    }
    return with_features(std::move(values), std::move(ids));
}

DesignMatrix DesignMatrix::without_targets() const
{
    return DesignMatrix(values_, ids_, std::nullopt);
}

DesignMatrix DesignMatrix::with_features(Eigen::MatrixXd values, std::vector<FeatureId> feature_ids) const
{
    if (values.rows() != rows()) {
        throw Error(ErrorCode::DimensionMismatch, "replacement columns have the wrong row count");
    }
    DesignMatrix out(std::move(values), std::move(feature_ids), targets_);
    out.probe_ = probe_;
    out.origin_ = origin_;
    return out;
}

DesignMatrix DesignMatrix::with_probe(std::shared_ptr<TargetReadProbe> probe) const
{
    DesignMatrix out = *this;
    out.probe_ = std::move(probe);
    out.origin_.clear();
    return out;
}

Sample DesignMatrix::sample(Index row, bool with_target) const
{
    if (row < 0 || row >= rows()) {
        throw Error(ErrorCode::OutOfRange, "sample row out of range");
    }
    Sample s;
    s.values = values_.row(row).transpose();
    if (with_target) {
        s.target = target(row);
    }
    s.time_index = static_cast<std::size_t>(row) + 1;
    return s;
}

// --- CSV -------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_row(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t begin = 0;
    while (true) {
        auto comma = line.find(',', begin);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(begin)));
            break;
        }
        cells.push_back(trim(line.substr(begin, comma - begin)));
        begin = comma + 1;
    }
    return cells;
}

std::optional<double> parse_number(std::string_view cell)
{
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::string format_number(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

} // namespace

bool is_missing_marker(std::string_view cell) noexcept
{
    return cell.empty() || cell == "NaN" || cell == "nan";
}

DesignMatrix read_trace(std::istream& in, const std::optional<std::string>& target_column)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::MalformedRow, "missing header", 1);
    }
    std::vector<std::string> header;
    for (auto cell : split_row(line)) {
        header.emplace_back(cell);
    }
    {
        std::unordered_set<std::string> seen;
        for (const auto& name : header) {
            if (name.empty() || !seen.insert(name).second) {
                throw Error(ErrorCode::MalformedRow, "header names must be unique and non-empty", 1);
            }
        }
    }

    std::optional<std::size_t> target_pos;
    if (target_column) {
        auto it = std::find(header.begin(), header.end(), *target_column);
        if (it == header.end()) {
            throw Error(ErrorCode::UnknownTargetColumn, "no column named '" + *target_column + "'");
        }
        target_pos = static_cast<std::size_t>(it - header.begin());
    }

    const std::size_t width = header.size();
    std::vector<double> cells;
    std::size_t line_no = 1;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto row = split_row(line);
        if (row.size() != width) {
            throw Error(ErrorCode::MalformedRow,
                        "line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                            " cells, expected " + std::to_string(width),
                        line_no);
        }
        for (std::size_t c = 0; c < width; ++c) {
            if (is_missing_marker(row[c])) {
                if (target_pos && c == *target_pos) {
                    throw Error(ErrorCode::NonNumericCell,
                                "missing target at line " + std::to_string(line_no), line_no);
                }
                cells.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            auto value = parse_number(row[c]);
            if (!value) {
                throw Error(ErrorCode::NonNumericCell,
                            "line " + std::to_string(line_no) + ", column '" + header[c] + "': '" +
                                std::string(row[c]) + "'",
                            line_no);
            }
            cells.push_back(*value);
        }
        ++rows;
    }

    const auto m = static_cast<Index>(rows);
    const auto n = static_cast<Index>(width - (target_pos ? 1 : 0));
    Eigen::MatrixXd values(m, n);
    std::optional<Eigen::VectorXd> targets;
    if (target_pos) {
        targets.emplace(m);
    }
    std::vector<FeatureId> ids;
    ids.reserve(static_cast<std::size_t>(n));
    for (std::size_t c = 0; c < width; ++c) {
        if (target_pos && c == *target_pos) {
            continue;
        }
        ids.push_back(FeatureId{ids.size(), header[c]});
    }
    for (Index i = 0; i < m; ++i) {
        Index j = 0;
        for (std::size_t c = 0; c < width; ++c) {
            const double v = cells[static_cast<std::size_t>(i) * width + c];
            if (target_pos && c == *target_pos) {
                (*targets)[i] = v;
            } else {
                values(i, j++) = v;
            }
        }
    }
    return DesignMatrix(std::move(values), std::move(ids), std::move(targets));
}

DesignMatrix load_trace(const std::filesystem::path& path, const std::optional<std::string>& target_column)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::MissingFile, "cannot open '" + path.string() + "'");
    }
    return read_trace(in, target_column);
}

void write_trace(std::ostream& out, const DesignMatrix& matrix, const std::string& target_name)
{
    const auto& ids = matrix.feature_ids();
    for (std::size_t j = 0; j < ids.size(); ++j) {
        out << (j ? "," : "") << ids[j].name;
    }
    if (matrix.has_targets()) {
        out << (ids.empty() ? "" : ",") << target_name;
    }
    out << '\n';
    const Eigen::VectorXd targets = matrix.has_targets() ? matrix.targets() : Eigen::VectorXd();
    for (Index i = 0; i < matrix.rows(); ++i) {
        std::string line;
        for (Index j = 0; j < matrix.cols(); ++j) {
            if (j) {
                line += ',';
            }
            const double v = matrix.values()(i, j);
            line += std::isnan(v) ? std::string("NaN") : format_number(v);
        }
        if (matrix.has_targets()) {
            if (matrix.cols()) {
                line += ',';
            }
            line += format_number(targets[i]);
        }
        out << line << '\n';
    }
}

void save_trace(const std::filesystem::path& path, const DesignMatrix& matrix, const std::string& target_name)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::MissingFile, "cannot write '" + path.string() + "'");
    }
    write_trace(out, matrix, target_name);
}

// --- preprocessing -----------------------------------------------------------

Preprocessed preprocess(const DesignMatrix& matrix, double variance_threshold)
{
    const Index m = matrix.rows();
    const Index n = matrix.cols();
    if (m < 2 || n == 0) {
        throw Error(ErrorCode::EmptyMatrix, "preprocessing needs at least 2 rows and 1 column");
    }

    PreprocessReport report;
    std::vector<Index> kept;
    Eigen::MatrixXd scaled(m, n);
    for (Index j = 0; j < n; ++j) {
        const auto& id = matrix.feature_ids()[static_cast<std::size_t>(j)];
        auto column = matrix.values().col(j);
        if (column.hasNaN()) {
            report.dropped_non_numeric.push_back(id);
            continue;
        }
        const double lo = column.minCoeff();
        const double hi = column.maxCoeff();
        auto out = scaled.col(static_cast<Index>(kept.size()));
        if (hi > lo) {
            out = (column.array() - lo) / (hi - lo);
        } else {
            out.setZero();
        }
        const double mean = out.mean();
        const double variance = (out.array() - mean).square().sum() / static_cast<double>(m);
        if (variance < variance_threshold) {
            report.dropped_low_variance.push_back(id);
            continue;
        }
        kept.push_back(j);
        report.scale_min.push_back(lo);
        report.scale_max.push_back(hi);
    }

    std::vector<FeatureId> ids;
    ids.reserve(kept.size());
    for (Index j : kept) {
        ids.push_back(matrix.feature_ids()[static_cast<std::size_t>(j)]);
    }
    report.retained_count = kept.size();
    Eigen::MatrixXd values = scaled.leftCols(static_cast<Index>(kept.size()));
    return {matrix.with_features(std::move(values), std::move(ids)), std::move(report)};
}

DesignMatrix prefix(const DesignMatrix& matrix, Index t)
{
    if (t < 1 || t > matrix.rows()) {
        throw Error(ErrorCode::OutOfRange,
                    "prefix length " + std::to_string(t) + " outside [1, " + std::to_string(matrix.rows()) + "]");
    }
    return matrix.block_rows(0, t);
}

} // namespace osfs
