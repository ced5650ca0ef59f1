#include "cli_config.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "fpp/errors.hpp"
#include "fpp/format.hpp"
#include "fpp/passage_law.hpp"

namespace fpp::cli {

namespace {

const std::set<std::string> kCommonKeys = {"law", "d", "samples", "seed",
                                           "workers", "C3", "out"};

const std::map<std::string, std::set<std::string>> kSubcommandKeys = {
    {"simulate", {"n", "x_target", "emit_front", "path"}},
    {"mu", {"ns", "n_min", "n_max", "dyadic", "x_target"}},
    {"rate-fit", {"ns", "n_min", "n_max", "dyadic"}},
    {"fluctuations", {"ns", "n_min", "n_max", "dyadic"}},
    {"excess-field", {"n", "window", "mu_hat", "mu_n", "mu_samples"}},
    {"nearly-gamma", {"grid_min", "grid_max", "grid_count", "A_max", "exp_t", "tail_cut"}},
    {"skeleton-stats",
     {"n", "k", "window", "h_n", "n1", "field_samples", "mu_hat", "mu_n",
      "mu_samples", "dump_skeletons"}},
    {"oracle-check", {"m_max", "fields"}},
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

template <typename T>
std::vector<T> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<T> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("key '" + key + "': empty list element");
        out.push_back(static_cast<T>(parse_int(key, item)));
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

void set_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
    if (key == "law") {
        parse_law(value);  // validates eagerly
        c.law = value;
    } else if (key == "d") {
        c.d = static_cast<int>(parse_int(key, value));
        if (c.d < 1) throw ConfigError("key 'd': dimension must be >= 1");
    } else if (key == "samples") {
        c.samples = parse_int(key, value);
        if (c.samples < 1) throw ConfigError("key 'samples': must be >= 1");
    } else if (key == "seed") {
        c.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "workers") {
        c.workers = static_cast<int>(parse_int(key, value));
        if (c.workers < 1) throw ConfigError("key 'workers': must be >= 1");
    } else if (key == "C3") {
        c.c3 = parse_double(key, value);
        if (!(c.c3 > 0.0)) throw ConfigError("key 'C3': must be positive");
    } else if (key == "out") {
        c.out = value;
    } else if (key == "ns") {
        c.ns = parse_int_list<std::int64_t>(key, value);
    } else if (key == "n_min") {
        c.n_min = parse_int(key, value);
    } else if (key == "n_max") {
        c.n_max = parse_int(key, value);
    } else if (key == "dyadic") {
        c.dyadic = parse_bool(key, value);
    } else if (key == "x_target") {
        c.x_target = parse_int_list<std::int32_t>(key, value);
    } else if (key == "n") {
        c.n = parse_int(key, value);
    } else if (key == "path") {
        c.path = value;
    } else if (key == "emit_front") {
        c.emit_front = parse_bool(key, value);
    } else if (key == "window") {
        c.window = static_cast<std::int32_t>(parse_int(key, value));
        if (c.window < 0) throw ConfigError("key 'window': must be >= 0");
    } else if (key == "mu_hat") {
        c.mu_hat = parse_double(key, value);
    } else if (key == "mu_n") {
        c.mu_n = parse_int(key, value);
    } else if (key == "mu_samples") {
        c.mu_samples = parse_int(key, value);
    } else if (key == "grid_min") {
        c.grid_min = parse_double(key, value);
    } else if (key == "grid_max") {
        c.grid_max = parse_double(key, value);
    } else if (key == "grid_count") {
        c.grid_count = static_cast<int>(parse_int(key, value));
    } else if (key == "A_max") {
        c.a_max = parse_double(key, value);
    } else if (key == "exp_t") {
        c.exp_t = parse_double(key, value);
    } else if (key == "tail_cut") {
        c.tail_cut = parse_double(key, value);
    } else if (key == "k") {
        c.k = parse_int(key, value);
    } else if (key == "h_n") {
        c.h_n = parse_int(key, value);
    } else if (key == "n1") {
        c.n1 = parse_int(key, value);
    } else if (key == "field_samples") {
        c.field_samples = parse_int(key, value);
    } else if (key == "dump_skeletons") {
        c.dump_skeletons = parse_bool(key, value);
    } else if (key == "m_max") {
        c.m_max = parse_int(key, value);
    } else if (key == "fields") {
        c.fields = parse_int(key, value);
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

void check_key_allowed(const std::string& subcommand, const std::string& key) {
    if (kCommonKeys.count(key)) return;
    auto it = kSubcommandKeys.find(subcommand);
    if (it == kSubcommandKeys.end())
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    if (!it->second.count(key))
        throw ConfigError("key '" + key + "' is not valid for subcommand '" +
                          subcommand + "'");
}

void require_even(const char* key, std::int64_t v) {
    if ((v & 1) != 0)
        throw ConfigError(std::string("key '") + key + "': must be even, got " +
                          std::to_string(v));
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = {
        "simulate", "mu", "rate-fit", "fluctuations", "excess-field",
        "nearly-gamma", "skeleton-stats", "oracle-check"};
    return names;
}

ExperimentConfig parse_config(const std::string& text, const std::string& subcommand) {
    if (kSubcommandKeys.find(subcommand) == kSubcommandKeys.end())
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    ExperimentConfig config;
    config.subcommand = subcommand;

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        try {
            check_key_allowed(subcommand, key);
            set_key(config, key, value);
        } catch (const ConfigError& err) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + err.what());
        }
    }
    return config;
}

void apply_override(ExperimentConfig& config, const std::string& key,
                    const std::string& value) {
    check_key_allowed(config.subcommand, key);
    set_key(config, key, value);
}

std::vector<std::int64_t> resolve_ns(const ExperimentConfig& config) {
    if (!config.ns.empty()) {
        for (std::int64_t n : config.ns) require_even("ns", n);
        return config.ns;
    }
    if (!config.n_min || !config.n_max)
        throw ConfigError("need either 'ns' or both 'n_min' and 'n_max'");
    require_even("n_min", *config.n_min);
    std::vector<std::int64_t> ns;
    if (config.dyadic) {
        for (std::int64_t n = *config.n_min; n <= *config.n_max; n *= 2) {
            require_even("ns", n);
            ns.push_back(n);
        }
    } else {
        const std::int64_t step = std::max<std::int64_t>(2, (*config.n_max - *config.n_min) / 8);
        for (std::int64_t n = *config.n_min; n <= *config.n_max; n += step + (step & 1))
            ns.push_back(n);
    }
    if (ns.empty()) throw ConfigError("empty n range");
    return ns;
}

void validate(const ExperimentConfig& config) {
    const std::string& sub = config.subcommand;
    if (sub == "simulate" || sub == "excess-field" || sub == "skeleton-stats") {
        if (!config.n) throw ConfigError("key 'n' is required for " + sub);
        require_even("n", *config.n);
        if (*config.n < 2) throw ConfigError("key 'n': must be >= 2");
    }
    if (sub == "mu" || sub == "rate-fit" || sub == "fluctuations") {
        resolve_ns(config);
    }
    if (sub == "skeleton-stats") {
        if (!config.k) throw ConfigError("key 'k' is required for skeleton-stats");
        if (*config.k < 1) throw ConfigError("key 'k': must be >= 1");
        if (config.n1) require_even("n1", *config.n1);
    }
    if (sub == "nearly-gamma") {
        if (!(config.grid_min > 0.0) || !(config.grid_max > config.grid_min))
            throw ConfigError("grid_min/grid_max must satisfy 0 < grid_min < grid_max");
        if (config.grid_count < 2) throw ConfigError("key 'grid_count': must be >= 2");
    }
    if (sub == "oracle-check") {
        if (config.m_max < 2 || config.m_max > 12)
            throw ConfigError("key 'm_max': must lie in [2, 12]");
        require_even("m_max", config.m_max);
        if (config.fields < 1) throw ConfigError("key 'fields': must be >= 1");
    }
    if (!config.x_target.empty() &&
        static_cast<int>(config.x_target.size()) != config.d)
        throw ConfigError("key 'x_target': needs exactly d components");
    parse_law(config.law);
}

std::vector<std::pair<std::string, std::string>> echo_config(const ExperimentConfig& c) {
    std::vector<std::pair<std::string, std::string>> echo;
    auto add = [&echo](const std::string& key, const std::string& value) {
        echo.emplace_back(key, value);
    };
    auto join64 = [](const auto& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(v[i]);
        }
        return s;
    };
    add("subcommand", c.subcommand);
    add("law", c.law);
    add("d", std::to_string(c.d));
    add("samples", std::to_string(c.samples));
    add("seed", std::to_string(c.seed));
    add("workers", std::to_string(c.workers));
    add("C3", fmt_g17(c.c3));
    add("out", c.out);
    if (!c.ns.empty()) add("ns", join64(c.ns));
    if (c.n_min) add("n_min", std::to_string(*c.n_min));
    if (c.n_max) add("n_max", std::to_string(*c.n_max));
    if (c.dyadic) add("dyadic", "true");
    if (!c.x_target.empty()) add("x_target", join64(c.x_target));
    if (c.n) add("n", std::to_string(*c.n));
    if (c.path) add("path", *c.path);
    if (c.emit_front) add("emit_front", "true");
    if (c.subcommand == "excess-field" || c.subcommand == "skeleton-stats")
        add("window", std::to_string(c.window));
    if (c.mu_hat) add("mu_hat", fmt_g17(*c.mu_hat));
    if (c.mu_n) add("mu_n", std::to_string(*c.mu_n));
    if (c.mu_samples) add("mu_samples", std::to_string(*c.mu_samples));
    if (c.subcommand == "nearly-gamma") {
        add("grid_min", fmt_g17(c.grid_min));
        add("grid_max", fmt_g17(c.grid_max));
        add("grid_count", std::to_string(c.grid_count));
        add("A_max", fmt_g17(c.a_max));
        add("exp_t", fmt_g17(c.exp_t));
        add("tail_cut", fmt_g17(c.tail_cut));
    }
    if (c.k) add("k", std::to_string(*c.k));
    if (c.h_n) add("h_n", std::to_string(*c.h_n));
    if (c.n1) add("n1", std::to_string(*c.n1));
    if (c.field_samples) add("field_samples", std::to_string(*c.field_samples));
    if (c.dump_skeletons) add("dump_skeletons", "true");
    if (c.subcommand == "oracle-check") {
        add("m_max", std::to_string(c.m_max));
        add("fields", std::to_string(c.fields));
    }
    return echo;
}

}  // namespace fpp::cli
