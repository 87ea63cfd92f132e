#ifndef OSFS_SYNTH_HPP
#define OSFS_SYNTH_HPP

#include "osfs/trace.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <variant>

namespace osfs {

// L(t) = base + amplitude * sin(2 pi t / period) + jitter
struct PeriodicLoad {
    double period = 20.0;
    double amplitude = 0.6;
    double base = 1.0;
};

// Quiet load `base`; each event (Poisson, `event_rate` per sample) ramps
// linearly to `peak` over 60 samples, then decays.
struct FlashCrowdLoad {
    double event_rate = 0.002;
    double base = 1.0;
    double peak = 3.0;
};

using LoadPattern = std::variant<PeriodicLoad, FlashCrowdLoad>;

enum class TargetKind {
    Nonlinear, // 1 + mean(informative) / 2 + 0.3 * x0 * x1
    Identity   // the first informative feature
};

struct SynthSpec {
    std::size_t n_features = 200;
    std::size_t m_samples = 5000;
    std::size_t n_informative = 5;
    std::size_t n_redundant = 5;
    double noise_sigma = 0.05;
    // Noise added to redundant copies never drops below this.
    double redundant_sigma_floor = 0.1;
    // Small load fluctuation independent of noise_sigma.
    double load_jitter = 0.05;
    LoadPattern load_pattern = PeriodicLoad{};
    TargetKind target = TargetKind::Nonlinear;
    std::uint64_t seed = 0;

    void validate() const;
};

[[nodiscard]] Eigen::VectorXd load_curve(const SynthSpec& spec);

// Columns informative_i, redundant_i, nuisance_j in that order; target
// column attached. Values are unscaled.
[[nodiscard]] DesignMatrix generate(const SynthSpec& spec);

} // namespace osfs

#endif // OSFS_SYNTH_HPP
