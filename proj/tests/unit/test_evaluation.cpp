#include "osfs/error.hpp"
#include "osfs/evaluation.hpp"
#include "osfs/forest.hpp"
#include "osfs/synth.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace {

using osfs::FeatureSet;
using osfs::Method;

osfs::DesignMatrix small_trace(std::uint64_t seed = 4)
{
    osfs::SynthSpec spec;
    spec.n_features = 30;
    spec.m_samples = 2400;
    spec.seed = seed;
    return osfs::preprocess(osfs::generate(spec)).matrix;
}

osfs::StudyOptions quick()
{
    osfs::StudyOptions options;
    options.evaluation.n_trees = 8;
    return options;
}

TEST(Nmae, Examples)
{
    const Eigen::Vector3d y(1, 2, 3);
    EXPECT_EQ(osfs::nmae(y, y).nmae, 0.0);
    const auto r = osfs::nmae(Eigen::Vector2d(2, 2), Eigen::Vector2d(1, 3));
    EXPECT_DOUBLE_EQ(r.nmae, 0.5);
    EXPECT_EQ(r.q, 2u);
    EXPECT_DOUBLE_EQ(r.mean_target, 2.0);
    EXPECT_THROW((void)osfs::nmae(Eigen::Vector2d(1, -1), Eigen::Vector2d(0, 0)), osfs::Error);
    EXPECT_THROW((void)osfs::nmae(Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(3)), osfs::Error);
    EXPECT_THROW((void)osfs::nmae(Eigen::VectorXd(), Eigen::VectorXd()), osfs::Error);
}

TEST(Nmae, ScaleInvariant)
{
    const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(50, 1.0, 5.0);
    const Eigen::VectorXd p = y.array().sqrt() + 0.3;
    for (double c : {0.001, 2.0, 1e6}) {
        EXPECT_NEAR(osfs::nmae(c * y, c * p).nmae, osfs::nmae(y, p).nmae, 1e-12);
    }
}

TEST(Nmae, ErrorScaleCovariant)
{
    const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(40, 2.0, 9.0);
    const Eigen::VectorXd e = Eigen::VectorXd::LinSpaced(40, -1.0, 0.7).array().sin();
    const double base = osfs::nmae(y, y + e).nmae;
    for (double c : {0.25, 3.0, 40.0}) {
        EXPECT_NEAR(osfs::nmae(y, y + c * e).nmae, c * base, 1e-12 * c);
    }
}

TEST(Nmae, OnlineProtocolUsesRowsAfterSelection)
{
    const auto m = small_trace();
    const FeatureSet features({{0, ""}, {3, ""}, {9, ""}});
    const std::size_t start = 101;
    const std::size_t t_k = 64;
    osfs::EvaluationOptions options;
    options.n_trees = 6;
    const auto r = osfs::nmae1_protocol(m, start, t_k, features, 11, options);

    const osfs::Index begin = 100 + 64;
    const auto restricted = m.restrict_to(features.members());
    const auto forest = osfs::fit_forest(restricted.block_rows(begin, 1024), {6, 11, true});
    double abs_sum = 0.0;
    double y_sum = 0.0;
    const osfs::Index q = m.rows() - begin - 1024;
    for (osfs::Index row = begin + 1024; row < m.rows(); ++row) {
        abs_sum += std::abs(m.target(row) - forest.predict(restricted.sample(row, false)));
        y_sum += m.target(row);
    }
    EXPECT_EQ(r.q, static_cast<std::size_t>(q));
    EXPECT_NEAR(r.nmae, abs_sum / y_sum, 1e-12);

    EXPECT_THROW((void)osfs::nmae1_protocol(m, m.rows() - 1024 - 63, 64, features, 1, options), osfs::Error);
}

TEST(Nmae, OfflineProtocolSplit)
{
    const auto split = osfs::split_rows(1000, 0.7, 5);
    EXPECT_EQ(split.train.size(), 700u);
    EXPECT_EQ(split.test.size(), 300u);
    std::set<osfs::Index> all(split.train.begin(), split.train.end());
    all.insert(split.test.begin(), split.test.end());
    EXPECT_EQ(all.size(), 1000u);
    EXPECT_TRUE(std::is_sorted(split.train.begin(), split.train.end()));
    EXPECT_EQ(osfs::split_rows(1000, 0.7, 5).train, split.train);
    EXPECT_NE(osfs::split_rows(1000, 0.7, 6).train, split.train);

    const auto m = small_trace();
    const FeatureSet features({{1, ""}, {2, ""}});
    osfs::EvaluationOptions options;
    options.n_trees = 5;
    const auto a = osfs::nmae2_protocol(m, features, 9, options);
    EXPECT_EQ(a.q, static_cast<std::size_t>(m.rows()) - static_cast<std::size_t>(0.7 * m.rows()));
    EXPECT_EQ(a.nmae, osfs::nmae2_protocol(m, features, 9, options).nmae);
    EXPECT_GT(a.nmae, 0.0);
}

TEST(Nmae, SelectionNeverSeesTargets)
{
    const auto base = small_trace();
    for (Method method : {Method::ARR, Method::LS}) {
        auto probe = std::make_shared<osfs::TargetReadProbe>(base.rows());
        const auto m = base.with_probe(probe);
        osfs::OsfsConfig config;
        config.method = method;
        const std::size_t start = 37;
        const auto r = osfs::run_offline(m, config, start);
        EXPECT_EQ(probe->total(), 0u);
        osfs::EvaluationOptions options;
        options.n_trees = 3;
        (void)osfs::nmae1_protocol(m, start, r.t_k, r.features, 1, options);
        const auto first = static_cast<osfs::Index>(start - 1);
        EXPECT_EQ(probe->reads_in(0, first + static_cast<osfs::Index>(r.t_k)), 0u);
        EXPECT_GT(probe->total(), 0u);
    }
}

TEST(Summary, PopulationStd)
{
    const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    EXPECT_EQ(osfs::summarize(v), (osfs::Summary{5.0, 2.0}));
    const std::vector<double> one{3.5};
    EXPECT_EQ(osfs::summarize(one), (osfs::Summary{3.5, 0.0}));
}

TEST(Study, StartTimes)
{
    const auto s = osfs::draw_start_times(20, 50, 3);
    ASSERT_EQ(s.size(), 20u);
    EXPECT_EQ(s.front(), 1u);
    for (std::size_t i = 1; i < s.size(); ++i) {
        EXPECT_GE(s[i], 2u);
        EXPECT_LE(s[i], 50u);
    }
    EXPECT_EQ(osfs::draw_start_times(20, 50, 3), s);
}

TEST(Study, SingleStartHasNoSpread)
{
    const auto r = osfs::run_study(small_trace(), Method::ARR, 1, 2, quick());
    ASSERT_EQ(r.per_start.size(), 1u);
    EXPECT_EQ(r.per_start[0].start, 1u);
    EXPECT_EQ(r.k.std, 0.0);
    EXPECT_EQ(r.t_k.std, 0.0);
    EXPECT_EQ(r.nmae1.std, 0.0);
    EXPECT_EQ(r.nmae2.std, 0.0);
}

TEST(Study, AggregatesAndDeterminism)
{
    const auto m = small_trace();
    const auto r = osfs::run_study(m, Method::ARR, 4, 8, quick());
    ASSERT_EQ(r.per_start.size(), 4u);
    double k_sum = 0.0;
    double e_sum = 0.0;
    for (const auto& s : r.per_start) {
        k_sum += static_cast<double>(s.k);
        e_sum += s.nmae1;
        EXPECT_LE(s.start, m.rows() - 2048);
        EXPECT_EQ(s.features.size(), s.k);
    }
    EXPECT_NEAR(r.k.mean, k_sum / 4.0, 1e-12);
    EXPECT_NEAR(r.nmae1.mean, e_sum / 4.0, 1e-12);
    double ss = 0.0;
    for (const auto& s : r.per_start) {
        ss += (s.nmae1 - r.nmae1.mean) * (s.nmae1 - r.nmae1.mean);
    }
    EXPECT_NEAR(r.nmae1.std, std::sqrt(ss / 4.0), 1e-12);
    EXPECT_GT(r.baseline_nmae2, 0.0);

    const auto again = osfs::run_study(m, Method::ARR, 4, 8, quick());
    EXPECT_EQ(osfs::to_json(again).dump(), osfs::to_json(r).dump());
    std::ostringstream a;
    std::ostringstream b;
    osfs::write_report_csv(a, r);
    osfs::write_report_csv(b, again);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
              "Method,k_mean,k_std,tk_mean,tk_std,NMAE1_mean,NMAE1_std,NMAE2_mean,NMAE2_std,baseline");
}

TEST(Study, Errors)
{
    const auto m = small_trace();
    EXPECT_THROW((void)osfs::run_study(m, Method::ARR, 0, 1, quick()), osfs::Error);
    EXPECT_THROW((void)osfs::run_study(m.block_rows(0, 2048), Method::ARR, 1, 1, quick()), osfs::Error);
    EXPECT_THROW((void)osfs::run_study(m.without_targets(), Method::ARR, 1, 1, quick()), osfs::Error);
}

TEST(Similarity, StationaryTraceIsFullyStable)
{
    const auto m = fixture::stationary(2048);
    const std::vector<std::size_t> ks{4};
    const std::vector<std::size_t> ts{16, 32, 64, 128, 256, 512, 1024};
    for (Method method : {Method::ARR, Method::LS}) {
        const auto table = osfs::similarity_evolution(m, method, ks, ts, 5, 1, 8);
        EXPECT_EQ(table.starts.front(), 1u);
        // shifted starts still contain whole periods at every t >= 16
        EXPECT_TRUE((table.mean_sim.array() == 1.0).all()) << table.mean_sim;
    }
}

TEST(Similarity, ValidationAndCsv)
{
    const auto m = fixture::random_matrix(300, 12, 2);
    EXPECT_THROW((void)osfs::similarity_evolution(m, Method::ARR, {4}, {512}, 2, 1), osfs::Error);
    EXPECT_THROW((void)osfs::similarity_evolution(m, Method::ARR, {13}, {64}, 2, 1), osfs::Error);
    EXPECT_THROW((void)osfs::similarity_evolution(m, Method::ARR, {4}, {1}, 2, 1), osfs::Error);
    const auto table = osfs::similarity_evolution(m, Method::ARR, {4, 12}, {32, 64}, 3, 1);
    EXPECT_TRUE((table.mean_sim.row(1).array() == 1.0).all());
    std::ostringstream out;
    osfs::write_similarity_csv(out, table);
    const std::string text = out.str();
    EXPECT_EQ(text.substr(0, 15), "k,t,mean_sim\n4,");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}

} // namespace
