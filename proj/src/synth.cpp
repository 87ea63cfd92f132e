#include "osfs/synth.hpp"

#include "osfs/error.hpp"
#include "osfs/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace osfs {

namespace {

constexpr double kRampSamples = 60.0;
constexpr double kDecaySamples = 120.0;
constexpr double kAutoregression = 0.95;
constexpr double kMinExponent = 0.8;
constexpr double kMaxExponent = 2.5;
constexpr double kSteepestLogistic = 24.0;

Eigen::VectorXd gaussian(Index m, Rng& rng)
{
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(m);
    for (Index i = 0; i < m; ++i) {
        v[i] = normal(rng);
    }
    return v;
}

double population_std(const Eigen::VectorXd& v)
{
    return std::sqrt((v.array() - v.mean()).square().mean());
}

Eigen::VectorXd periodic(const PeriodicLoad& p, Index m)
{
    Eigen::VectorXd load(m);
    for (Index t = 0; t < m; ++t) {
        load[t] = p.base + p.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / p.period);
    }
    return load;
}

Eigen::VectorXd flash_crowd(const FlashCrowdLoad& p, Index m, Rng& rng)
{
    std::bernoulli_distribution event(p.event_rate);
    Eigen::VectorXd shape = Eigen::VectorXd::Zero(m);
    for (Index start = 0; start < m; ++start) {
        if (!event(rng)) {
            continue;
        }
        for (Index t = start; t < m; ++t) {
            const double age = static_cast<double>(t - start);
            const double level =
                age < kRampSamples ? age / kRampSamples : std::exp(-(age - kRampSamples) / kDecaySamples);
            if (level < 1e-6 && age > kRampSamples) {
                break;
            }
            shape[t] = std::max(shape[t], level);
        }
    }
    return (p.base + (p.peak - p.base) * shape.array()).matrix();
}

// Logistic curves of decreasing steepness around the mean load, then the
// load itself. Steeper curves spend more time near their extremes, which
// keeps the planted columns' ranking well separated.
double transform(std::size_t which, double l, double centre)
{
    const std::size_t slot = which % 5;
    if (slot == 4) {
        return l;
    }
    const double steepness = kSteepestLogistic / static_cast<double>(std::size_t{1} << slot);
    return 1.0 / (1.0 + std::exp(-steepness * (l - centre)));
}

} // namespace

void SynthSpec::validate() const
{
    if (n_features == 0 || n_informative == 0) {
        throw Error(ErrorCode::InvalidSpec, "need at least one feature and one informative feature");
    }
    if (n_informative + n_redundant > n_features) {
        throw Error(ErrorCode::InvalidSpec, "n_informative + n_redundant exceeds n_features");
    }
    if (m_samples < 64) {
        throw Error(ErrorCode::InvalidSpec, "m_samples must be at least 64");
    }
    if (!(noise_sigma >= 0.0) || !(redundant_sigma_floor >= 0.0) || !(load_jitter >= 0.0)) {
        throw Error(ErrorCode::InvalidSpec, "noise levels must be non-negative");
    }
    if (const auto* p = std::get_if<PeriodicLoad>(&load_pattern)) {
        if (!(p->period > 0.0) || !(p->base - std::abs(p->amplitude) > 0.0)) {
            throw Error(ErrorCode::InvalidSpec, "periodic load needs period > 0 and base > |amplitude|");
        }
    } else {
        const auto& f = std::get<FlashCrowdLoad>(load_pattern);
        if (!(f.event_rate >= 0.0 && f.event_rate <= 1.0) || !(f.base > 0.0) || !(f.peak >= f.base)) {
            throw Error(ErrorCode::InvalidSpec, "flash crowd needs event_rate in [0,1] and 0 < base <= peak");
        }
    }
}

Eigen::VectorXd load_curve(const SynthSpec& spec)
{
    spec.validate();
    const auto m = static_cast<Index>(spec.m_samples);
    Rng rng(derive_seed(spec.seed, 1));
    Eigen::VectorXd load = std::holds_alternative<PeriodicLoad>(spec.load_pattern)
                               ? periodic(std::get<PeriodicLoad>(spec.load_pattern), m)
                               : flash_crowd(std::get<FlashCrowdLoad>(spec.load_pattern), m, rng);
    load += spec.load_jitter * gaussian(m, rng);
    // keep the transforms' domain
    return load.cwiseMax(0.01);
}

DesignMatrix generate(const SynthSpec& spec)
{
    spec.validate();
    const auto m = static_cast<Index>(spec.m_samples);
    const std::size_t n = spec.n_features;
    const Eigen::VectorXd load = load_curve(spec);

    Eigen::MatrixXd x(m, static_cast<Index>(n));
    std::vector<FeatureId> ids;
    ids.reserve(n);

    const double centre = load.mean();
    Rng informative_rng(derive_seed(spec.seed, 2));
    for (std::size_t i = 0; i < spec.n_informative; ++i) {
        const Eigen::VectorXd g = load.unaryExpr([i, centre](double l) { return transform(i, l, centre); });
        x.col(static_cast<Index>(i)) = g + spec.noise_sigma * population_std(g) * gaussian(m, informative_rng);
        ids.push_back({i, "informative_" + std::to_string(i)});
    }

    Rng redundant_rng(derive_seed(spec.seed, 3));
    const double redundant_sigma = std::max(spec.noise_sigma, spec.redundant_sigma_floor);
    for (std::size_t r = 0; r < spec.n_redundant; ++r) {
        const Eigen::VectorXd source = x.col(static_cast<Index>(r % spec.n_informative));
        const std::size_t col = spec.n_informative + r;
        x.col(static_cast<Index>(col)) =
            source + redundant_sigma * population_std(source) * gaussian(m, redundant_rng);
        ids.push_back({col, "redundant_" + std::to_string(r)});
    }

    const std::size_t first_nuisance = spec.n_informative + spec.n_redundant;
    for (std::size_t j = first_nuisance; j < n; ++j) {
        Rng rng(derive_seed(spec.seed, 1000 + j));
        const Eigen::VectorXd z = gaussian(m, rng);
        auto column = x.col(static_cast<Index>(j));
        if (j % 10 == 0) {
            column[0] = 0.0;
            for (Index t = 1; t < m; ++t) {
                column[t] = kAutoregression * column[t - 1] + z[t];
            }
        } else {
            const double p = std::uniform_real_distribution<double>(kMinExponent, kMaxExponent)(rng);
            column = z.unaryExpr([p](double v) { return std::copysign(std::pow(std::abs(v), p), v); });
        }
        ids.push_back({j, "nuisance_" + std::to_string(j - first_nuisance)});
    }

    Rng target_rng(derive_seed(spec.seed, 4));
    const auto informative = x.leftCols(static_cast<Index>(spec.n_informative));
    Eigen::VectorXd y;
    if (spec.target == TargetKind::Identity) {
        y = informative.col(0);
    } else {
        y = (1.0 + 0.5 * informative.rowwise().mean().array()).matrix();
        if (spec.n_informative >= 2) {
            y.array() += 0.3 * informative.col(0).array() * informative.col(1).array();
        }
    }
    y += 0.02 * spec.noise_sigma * gaussian(m, target_rng);
    return DesignMatrix(std::move(x), std::move(ids), std::move(y));
}

} // namespace osfs
