#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cli_config.hpp"
#include "cli_run.hpp"
#include "fpp/errors.hpp"
#include "fpp/version.hpp"

namespace {

int run_subcommand(const std::string& name, const std::string& config_file,
                   const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::string text;
    if (!config_file.empty()) {
        std::ifstream is(config_file);
        if (!is) {
            std::cerr << "fpp: cannot open config file '" << config_file << "'\n";
            return 2;
        }
        std::stringstream ss;
        ss << is.rdbuf();
        text = ss.str();
    }
    fpp::cli::ExperimentConfig config = fpp::cli::parse_config(text, name);
    for (const auto& [key, value] : overrides)
        fpp::cli::apply_override(config, key, value);
    const fpp::cli::RunManifest manifest = fpp::cli::run(config);
    std::cout << manifest.subcommand << ": " << manifest.outputs.size()
              << " output file(s) in " << config.out << " ("
              << manifest.wall_time_s << " s)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fpp: directed first-passage percolation laboratory"};
    app.set_version_flag("--version", fpp::kVersion);
    app.require_subcommand(1);

    std::string config_file;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::string sub_name;

    for (const std::string& name : fpp::cli::subcommand_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_file, "flat key/value config file");
        auto track = [&overrides](const std::string& key) {
            return [&overrides, key](const std::string& value) {
                overrides.emplace_back(key, value);
            };
        };
        sub->add_option_function<std::string>("--seed", track("seed"), "base RNG seed");
        sub->add_option_function<std::string>("--samples", track("samples"), "sample count");
        sub->add_option_function<std::string>("--law", track("law"), "weight law spec");
        sub->add_option_function<std::string>("--d", track("d"), "transverse dimension");
        sub->add_option_function<std::string>("--out", track("out"), "output directory");
        sub->add_option_function<std::string>("--workers", track("workers"), "worker threads");
        sub->callback([&sub_name, name] { sub_name = name; });
    }

    CLI11_PARSE(app, argc, argv);

    // FPP_WORKERS provides the default worker count; explicit keys win.
    std::vector<std::pair<std::string, std::string>> effective;
    if (const char* env = std::getenv("FPP_WORKERS"))
        effective.emplace_back("workers", env);
    effective.insert(effective.end(), overrides.begin(), overrides.end());

    try {
        return run_subcommand(sub_name, config_file, effective);
    } catch (const fpp::ConfigError& err) {
        std::cerr << "fpp: config error: " << err.what() << "\n";
        return 2;
    } catch (const fpp::Error& err) {
        std::cerr << "fpp: error: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "fpp: error: " << err.what() << "\n";
        return 3;
    }
}
