#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fpp::cli {

// Flat experiment configuration: one key/value schema shared by all
// subcommands, validated per subcommand. Unknown keys fail fast.
struct ExperimentConfig {
    std::string subcommand;

    // common
    std::string law = "exp:rate=1";
    int d = 1;
    std::int64_t samples = 1000;
    std::uint64_t seed = 1;
    int workers = 1;
    double c3 = 1.0;
    std::string out = "fpp-out";

    // series subcommands (mu, rate-fit, fluctuations)
    std::vector<std::int64_t> ns;
    std::optional<std::int64_t> n_min, n_max;
    bool dyadic = false;
    std::vector<std::int32_t> x_target;

    // simulate / excess-field / skeleton-stats
    std::optional<std::int64_t> n;
    std::optional<std::string> path;  // explicit path to evaluate (simulate)
    bool emit_front = false;
    std::int32_t window = 16;
    std::optional<double> mu_hat;
    std::optional<std::int64_t> mu_n;
    std::optional<std::int64_t> mu_samples;

    // nearly-gamma
    double grid_min = 0.01;
    double grid_max = 50.0;
    int grid_count = 400;
    double a_max = 100.0;
    double exp_t = 0.5;
    double tail_cut = 40.0;

    // skeleton-stats
    std::optional<std::int64_t> k;
    std::optional<std::int64_t> h_n;
    std::optional<std::int64_t> n1;
    std::optional<std::int64_t> field_samples;
    bool dump_skeletons = false;

    // oracle-check
    std::int64_t m_max = 8;
    std::int64_t fields = 100;
};

// Names of the valid subcommands.
const std::vector<std::string>& subcommand_names();

// Parses a flat key/value document ("key = value" lines, '#' comments) and
// validates it for the given subcommand. Throws fpp::ConfigError naming the
// first offending line/key.
ExperimentConfig parse_config(const std::string& text, const std::string& subcommand);

// Applies one "key=value" override (CLI flags) and re-validates the field.
void apply_override(ExperimentConfig& config, const std::string& key,
                    const std::string& value);

// Cross-field validation; called after parsing and overrides.
void validate(const ExperimentConfig& config);

// Resolved n list (explicit ns, or the dyadic/linear range).
std::vector<std::int64_t> resolve_ns(const ExperimentConfig& config);

// Canonical echo of the configuration for the run manifest.
std::vector<std::pair<std::string, std::string>> echo_config(const ExperimentConfig& config);

}  // namespace fpp::cli
