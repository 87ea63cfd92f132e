// osfs: rank features, run the online search, evaluate, synthesise traces.

#include "osfs/error.hpp"
#include "osfs/evaluation.hpp"
#include "osfs/online.hpp"
#include "osfs/ranking.hpp"
#include "osfs/synth.hpp"
#include "osfs/trace.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kExitInput = 2;
constexpr int kExitInternal = 1;

struct RunConfig {
    std::string input;
    std::string target;
    std::string method = "arr";
    double eta = 0.5;
    std::size_t k = 0;
    std::size_t start = 1;
    std::size_t n_starts = 10;
    std::uint64_t seed = 0;
    std::string out = "-";
    std::string format;
};

struct SynthFlags {
    osfs::SynthSpec spec;
    std::string pattern = "periodic";
    std::string target_kind = "nonlinear";
    double period = 20.0;
    double amplitude = 0.6;
    double event_rate = 0.002;
    double base = 1.0;
    double peak = 3.0;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::optional<std::string> target_of(const RunConfig& config)
{
    if (config.target.empty()) {
        return std::nullopt;
    }
    return config.target;
}

osfs::Method method_of(const RunConfig& config)
{
    auto method = osfs::parse_method(config.method);
    if (!method) {
        throw UsageError("unknown method '" + config.method + "' (expected arr, ls or tb)");
    }
    if (*method == osfs::Method::TB && config.target.empty()) {
        throw UsageError("target column required for tb");
    }
    return *method;
}

osfs::Preprocessed load(const RunConfig& config)
{
    if (config.input.empty()) {
        throw UsageError("--input is required");
    }
    return osfs::preprocess(osfs::load_trace(config.input, target_of(config)));
}

nlohmann::json preprocess_json(const osfs::PreprocessReport& report)
{
    return {{"retained", report.retained_count},
            {"dropped_low_variance", report.dropped_low_variance.size()},
            {"dropped_non_numeric", report.dropped_non_numeric.size()}};
}

// Writes to the named file, or standard output for "-".
void emit(const std::string& path, const std::function<void(std::ostream&)>& write)
{
    if (path == "-" || path.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw UsageError("cannot write '" + path + "'");
    }
    write(file);
}

std::string format_or(const RunConfig& config, const std::string& fallback)
{
    const std::string format = config.format.empty() ? fallback : config.format;
    if (format != "json" && format != "csv") {
        throw UsageError("unknown format '" + format + "' (expected json or csv)");
    }
    return format;
}

void cmd_rank(const RunConfig& config)
{
    const osfs::Method method = method_of(config);
    const std::string format = format_or(config, "csv");
    const auto data = load(config);
    const auto ranking = osfs::rank_features(data.matrix, method, config.seed);
    const std::optional<std::size_t> top = config.k > 0 ? std::optional(config.k) : std::nullopt;
    emit(config.out, [&](std::ostream& out) {
        if (format == "csv") {
            osfs::write_ranking_csv(out, ranking, top);
            return;
        }
        nlohmann::json doc{{"method", osfs::to_string(method)}, {"seed", config.seed}};
        doc["preprocess"] = preprocess_json(data.report);
        doc["ranking"] = nlohmann::json::array();
        const std::size_t rows = top ? std::min(*top, ranking.order.size()) : ranking.order.size();
        for (std::size_t r = 0; r < rows; ++r) {
            doc["ranking"].push_back({{"rank", r + 1},
                                      {"feature_index", ranking.order[r].index},
                                      {"feature_name", ranking.order[r].name},
                                      {"score", ranking.scores[r]}});
        }
        out << doc.dump(2) << '\n';
    });
}

void cmd_osfs(const RunConfig& config)
{
    osfs::OsfsConfig osfs_config;
    osfs_config.method = method_of(config);
    osfs_config.eta = config.eta;
    osfs_config.seed = config.seed;
    const std::string format = format_or(config, "json");
    const auto data = load(config);
    const auto result = osfs::run_offline(data.matrix, osfs_config, config.start);
    emit(config.out, [&](std::ostream& out) {
        if (format == "csv") {
            out << "feature_index,feature_name\n";
            for (const auto& f : result.features.members()) {
                out << f.index << ',' << f.name << '\n';
            }
            return;
        }
        nlohmann::json doc = osfs::to_json(result);
        doc["seed"] = config.seed;
        doc["eta"] = config.eta;
        doc["start"] = config.start;
        doc["preprocess"] = preprocess_json(data.report);
        out << doc.dump(2) << '\n';
    });
}

void cmd_study(const RunConfig& config)
{
    if (config.target.empty()) {
        throw UsageError("target column required for a study");
    }
    if (config.out.empty() || config.out == "-") {
        throw UsageError("--out must name a file prefix for study reports");
    }
    const osfs::Method method = method_of(config);
    const auto data = load(config);
    osfs::StudyOptions options;
    options.osfs.eta = config.eta;
    const auto report = osfs::run_study(data.matrix, method, config.n_starts, config.seed, options);

    std::vector<std::size_t> t_list(options.osfs.checkpoints);
    const auto max_t = static_cast<std::size_t>(data.matrix.rows());
    std::erase_if(t_list, [max_t](std::size_t t) { return t > max_t; });
    std::vector<std::size_t> k_list(options.osfs.k_grid);
    const auto n = static_cast<std::size_t>(data.matrix.cols());
    std::erase_if(k_list, [n](std::size_t k) { return k > n; });
    const auto table = osfs::similarity_evolution(data.matrix, method, k_list, t_list, config.n_starts, config.seed);

    emit(config.out + ".json", [&](std::ostream& out) {
        nlohmann::json doc = osfs::to_json(report);
        doc["eta"] = config.eta;
        doc["preprocess"] = preprocess_json(data.report);
        out << doc.dump(2) << '\n';
    });
    emit(config.out + ".csv", [&](std::ostream& out) { osfs::write_report_csv(out, report); });
    emit(config.out + ".similarity.csv", [&](std::ostream& out) { osfs::write_similarity_csv(out, table); });
}

void cmd_synth(const RunConfig& config, SynthFlags flags)
{
    if (flags.pattern == "periodic") {
        flags.spec.load_pattern = osfs::PeriodicLoad{flags.period, flags.amplitude, flags.base};
    } else if (flags.pattern == "flash_crowd" || flags.pattern == "flash") {
        flags.spec.load_pattern = osfs::FlashCrowdLoad{flags.event_rate, flags.base, flags.peak};
    } else {
        throw UsageError("unknown pattern '" + flags.pattern + "' (expected periodic or flash_crowd)");
    }
    if (flags.target_kind == "nonlinear") {
        flags.spec.target = osfs::TargetKind::Nonlinear;
    } else if (flags.target_kind == "identity") {
        flags.spec.target = osfs::TargetKind::Identity;
    } else {
        throw UsageError("unknown target kind '" + flags.target_kind + "'");
    }
    flags.spec.seed = config.seed;
    const auto matrix = osfs::generate(flags.spec);
    emit(config.out, [&](std::ostream& out) { osfs::write_trace(out, matrix, "y"); });
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Online stable feature set selection for monitoring traces"};
    app.require_subcommand(1);
    RunConfig config;
    SynthFlags synth;

    auto common = [&config](CLI::App* sub) {
        sub->add_option("--input", config.input, "trace CSV with a header row");
        sub->add_option("--target", config.target, "name of the target column");
        sub->add_option("--method", config.method, "arr, ls or tb")->capture_default_str();
        sub->add_option("--seed", config.seed, "seed for every random choice")->capture_default_str();
        sub->add_option("--out", config.out, "output path, - for standard output")->capture_default_str();
        sub->add_option("--format", config.format, "json or csv");
    };

    auto* rank = app.add_subcommand("rank", "rank the features of a trace");
    common(rank);
    rank->add_option("--k", config.k, "keep only the top k features");

    auto* search = app.add_subcommand("osfs", "run the online stable feature set search");
    common(search);
    search->add_option("--eta", config.eta, "stability threshold")->capture_default_str();
    search->add_option("--start", config.start, "1-based first row")->capture_default_str();

    auto* study = app.add_subcommand("study", "evaluate the search over several start times");
    common(study);
    study->add_option("--eta", config.eta, "stability threshold")->capture_default_str();
    study->add_option("--n-starts", config.n_starts, "number of start times")->capture_default_str();

    auto* gen = app.add_subcommand("synth", "write a synthetic trace with planted features");
    gen->add_option("--seed", config.seed)->capture_default_str();
    gen->add_option("--out", config.out)->capture_default_str();
    gen->add_option("--n-features", synth.spec.n_features)->capture_default_str();
    gen->add_option("--m-samples", synth.spec.m_samples)->capture_default_str();
    gen->add_option("--n-informative", synth.spec.n_informative)->capture_default_str();
    gen->add_option("--n-redundant", synth.spec.n_redundant)->capture_default_str();
    gen->add_option("--sigma", synth.spec.noise_sigma)->capture_default_str();
    gen->add_option("--pattern", synth.pattern, "periodic or flash_crowd")->capture_default_str();
    gen->add_option("--period", synth.period)->capture_default_str();
    gen->add_option("--amplitude", synth.amplitude)->capture_default_str();
    gen->add_option("--event-rate", synth.event_rate)->capture_default_str();
    gen->add_option("--base", synth.base)->capture_default_str();
    gen->add_option("--peak", synth.peak)->capture_default_str();
    gen->add_option("--target-kind", synth.target_kind, "nonlinear or identity")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (rank->parsed()) {
            cmd_rank(config);
        } else if (search->parsed()) {
            cmd_osfs(config);
        } else if (study->parsed()) {
            cmd_study(config);
        } else {
            cmd_synth(config, synth);
        }
    } catch (const UsageError& e) {
        std::cerr << "osfs: " << e.what() << '\n';
        return kExitInput;
    } catch (const osfs::Error& e) {
        std::cerr << "osfs: " << osfs::to_string(e.code()) << ": " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "osfs: internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return 0;
}
