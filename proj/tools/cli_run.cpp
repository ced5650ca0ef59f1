#include "cli_run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fpp/distribution_checks.hpp"
#include "fpp/engine.hpp"
#include "fpp/errors.hpp"
#include "fpp/format.hpp"
#include "fpp/scaling.hpp"
#include "fpp/skeleton.hpp"
#include "fpp/version.hpp"

namespace fpp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Seed streams for the auxiliary estimates, kept apart from the per-sample
// field seeds so geodesic samples and s_hat estimates use disjoint fields.
constexpr std::uint64_t kMuStream = 0x100000000ULL;
constexpr std::uint64_t kFieldStream = 0x200000000ULL;
constexpr std::uint64_t kSurfaceStream = 0x300000000ULL;

struct Sink {
    fs::path dir;
    std::vector<OutputRecord> outputs;

    void write(const std::string& name, const std::string& bytes) {
        std::ofstream os(dir / name, std::ios::binary);
        if (!os) throw Error("cannot write " + (dir / name).string());
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        os.close();
        outputs.push_back(OutputRecord{name, fnv1a64_hex(bytes)});
    }
};

Transverse target_of(const ExperimentConfig& c) {
    if (c.x_target.empty()) return Transverse(static_cast<std::size_t>(c.d), 0);
    return Transverse(c.x_target.begin(), c.x_target.end());
}

void run_simulate(const ExperimentConfig& c, Sink& sink) {
    const WeightField field(c.seed, parse_law(c.law), c.d);
    const Site source = origin_site(c.d);
    const Site target{*c.n, target_of(c)};
    const PassageResult result = geodesic(field, source, target);
    json j = json::parse(result.to_json());
    if (c.path) {
        // A loaded path evaluates against the same field realization.
        const LatticePath given = parse_path(*c.path);
        const double time = path_time(field, given);
        const double optimal = min_passage_time(field, given.start, given.endpoint());
        j["given_path"] = {{"string", to_string(given)},
                           {"time", time},
                           {"optimal", optimal},
                           {"excess", time - optimal}};
    }
    sink.write("result.json", j.dump(2) + "\n");
    if (c.emit_front) {
        const LayerFront front = layer_passage_times(field, source, *c.n);
        sink.write("front.csv", front.to_csv());
    }
}

void run_mu(const ExperimentConfig& c, Sink& sink) {
    const std::vector<std::int64_t> ns = resolve_ns(c);
    const MeanSeries series = mean_passage_series(parse_law(c.law), c.d, ns,
                                                  target_of(c), c.samples, c.seed,
                                                  c.workers);
    const TimeConstantEstimate mu = estimate_time_constant(series);
    sink.write("series.csv", series.to_csv());
    sink.write("mu.json", mu.to_json() + "\n");
}

void run_rate_fit(const ExperimentConfig& c, Sink& sink) {
    const std::vector<std::int64_t> ns = resolve_ns(c);
    const MeanSeries series =
        mean_passage_series(parse_law(c.law), c.d, ns,
                            Transverse(static_cast<std::size_t>(c.d), 0), c.samples,
                            c.seed, c.workers);
    const TimeConstantEstimate mu = estimate_time_constant(series);
    const RateFit fit = rate_fit(series, mu);
    sink.write("series.csv", series.to_csv());
    json j = json::parse(fit.to_json());
    j["mu"] = json::parse(mu.to_json());
    sink.write("ratefit.json", j.dump(2) + "\n");
}

void run_fluctuations(const ExperimentConfig& c, Sink& sink) {
    const std::vector<std::int64_t> ns = resolve_ns(c);
    const FluctuationFit fit = fluctuation_exponent(parse_law(c.law), c.d, ns,
                                                    c.samples, c.seed, c.workers);
    std::ostringstream csv;
    csv << "n,stddev,scale_ratio\n";
    for (const auto& row : fit.rows)
        csv << row.n << ',' << fmt_g17(row.stddev) << ',' << fmt_g17(row.scale_ratio) << '\n';
    sink.write("fluctuations.csv", csv.str());
    sink.write("fluctuations.json", fit.to_json() + "\n");
}

double resolve_mu_hat(const ExperimentConfig& c, const LawPtr& law,
                      std::int64_t n, json* record) {
    if (c.mu_hat) {
        if (record) (*record)["mu_hat"] = *c.mu_hat;
        return *c.mu_hat;
    }
    const std::int64_t mu_n = c.mu_n.value_or(4 * n);
    const std::int64_t mu_samples = c.mu_samples.value_or(c.samples);
    const std::vector<std::int64_t> ns = {mu_n};
    const MeanSeries series =
        mean_passage_series(law, c.d, ns, Transverse(static_cast<std::size_t>(c.d), 0),
                            mu_samples, c.seed + kMuStream, c.workers);
    const TimeConstantEstimate mu = estimate_time_constant(series);
    if (record) {
        (*record)["mu_hat"] = mu.mu_hat;
        (*record)["mu_n"] = mu_n;
        (*record)["mu_samples"] = mu_samples;
        (*record)["mu_ci_halfwidth"] = mu.ci_halfwidth;
    }
    return mu.mu_hat;
}

void run_excess_field(const ExperimentConfig& c, Sink& sink) {
    const LawPtr law = parse_law(c.law);
    json meta;
    const double mu_hat = resolve_mu_hat(c, law, *c.n, &meta);
    const ExcessMeanField field =
        excess_mean_field(law, c.d, *c.n, c.window, c.samples,
                          c.seed + kFieldStream, mu_hat, c.c3, c.workers);
    sink.write("excess_field.csv", field.to_csv());
    meta["m"] = field.m;
    meta["window"] = field.window_radius;
    meta["samples"] = field.samples;
    if (field.h_shell_estimate) {
        meta["h_shell_estimate"] = *field.h_shell_estimate;
        meta["h_shell_capped"] = field.h_shell_capped;
    }
    sink.write("excess_field.json", meta.dump(2) + "\n");
}

void run_nearly_gamma(const ExperimentConfig& c, Sink& sink) {
    const LawPtr law = parse_law(c.law);
    json j;
    j["law"] = law->spec_string();
    const NearlyGammaReport scan =
        nearly_gamma_scan(*law, {c.grid_min, c.grid_max, c.grid_count}, c.a_max);
    j["scan"] = json::parse(scan.to_json());
    const SufficiencyReport suff = sufficient_condition_check(*law);
    j["sufficient_condition"] = {
        {"verdict", suff.verdict == EndpointCondition::condition_i    ? "condition-(i)"
                    : suff.verdict == EndpointCondition::condition_ii ? "condition-(ii)"
                                                                      : "inconclusive"},
        {"alpha_hat", suff.alpha_hat},
        {"diagnostic", suff.diagnostic}};
    if (suff.beta_hat) j["sufficient_condition"]["beta_hat"] = *suff.beta_hat;
    if (suff.hazard_min) {
        j["sufficient_condition"]["hazard_min"] = *suff.hazard_min;
        j["sufficient_condition"]["hazard_max"] = *suff.hazard_max;
    }
    const ExpMomentReport moment = exp_moment_check(*law, c.exp_t, c.tail_cut);
    j["exp_moment"] = {{"t", c.exp_t},
                       {"finite", moment.finite},
                       {"value", moment.value},
                       {"note", moment.note}};
    sink.write("nearly_gamma.json", j.dump(2) + "\n");
}

void run_skeleton_stats(const ExperimentConfig& c, Sink& sink) {
    const LawPtr law = parse_law(c.law);
    const std::int64_t n = *c.n;
    const std::int64_t k = *c.k;
    json meta;
    const double mu_hat = resolve_mu_hat(c, law, n, &meta);
    const std::int64_t field_samples = c.field_samples.value_or(c.samples);

    // s_hat(n, .) for block classification plus the short-increment surface
    // for climbing-skeleton clean checks.
    ExcessFieldTable table;
    {
        ExcessMeanField block_field =
            excess_mean_field(law, c.d, n, c.window, field_samples,
                              c.seed + kFieldStream, mu_hat, c.c3, c.workers);
        meta["h_shell_estimate"] = nullptr;
        if (block_field.h_shell_estimate) {
            meta["h_shell_estimate"] = *block_field.h_shell_estimate;
            meta["h_shell_capped"] = block_field.h_shell_capped;
        }
        table.add(std::move(block_field));
    }

    std::int64_t h = 0;
    if (c.h_n) {
        h = *c.h_n;
    } else {
        const auto& block_field = table.fields().back();
        if (!block_field.h_shell_estimate)
            throw DomainError("skeleton-stats: every window shell is excessive; give h_n explicitly");
        h = *block_field.h_shell_estimate;
    }
    const CoarseParams params = CoarseParams::make(n, k, h, c.c3, c.d, c.n1);
    meta["params"] = {{"n", params.n}, {"k", params.k}, {"h_n", params.h_n},
                      {"u_n", params.u_n}, {"n1", params.n1}, {"phi", params.phi}};

    const std::int64_t surface_max =
        std::min<std::int64_t>(n, 2 * n / params.phi + 2);
    for (auto& f : excess_mean_surface(law, c.d, surface_max, field_samples,
                                       c.seed + kSurfaceStream, mu_hat, c.c3,
                                       c.workers))
        table.add(std::move(f));

    // Climb target: the unexcessive corner estimate, parity-aligned.
    std::int64_t climb_h = h - ((n + h) & 1);
    Transverse climb_x(static_cast<std::size_t>(c.d), 0);
    climb_x[0] = static_cast<std::int32_t>(climb_h);
    const Site climb_target{n, climb_x};
    if (const auto margin = table.excess(n, climb_x)) {
        const ScaleValues sv = scale_functions(static_cast<double>(n), c.c3);
        meta["climb_target"] = {{"x1", climb_h},
                                {"s_hat", margin->s_hat},
                                {"threshold", std::sqrt(static_cast<double>(n)) * sv.theta},
                                {"estimated", margin->estimated}};
    }

    std::ostringstream csv;
    csv << "seed,k,n,E_ex,E_side,b_nk,T_path,T_skel_aug,T_skel_cg\n";
    json dumps = json::array();
    std::int64_t total_exceptional = 0;
    std::int64_t max_long_count = 0;
    bool long_bound_ok = true;
    const Site source = origin_site(c.d);
    const Site far_target{k * n, Transverse(static_cast<std::size_t>(c.d), 0)};

    for (std::int64_t g = 0; g < c.samples; ++g) {
        const WeightField field(c.seed + static_cast<std::uint64_t>(g), law, c.d);
        const PassageResult res = geodesic(field, source, far_target);
        const BlockClassification cls = classify_blocks(*res.geodesic, params, table);
        const CGApproxSkeleton cg = cg_approx_skeleton(*res.geodesic, params, cls);
        const AugmentedSkeleton aug = augmented_skeleton(*res.geodesic, params, cls);
        const double t_aug = skeleton_passage_time(field, skeleton_segments(aug));
        const double t_cg = skeleton_passage_time(field, skeleton_segments(cg));
        total_exceptional += static_cast<std::int64_t>(cls.all().size());

        const PassageResult climb = geodesic(field, source, climb_target);
        const ClimbingSkeleton climbing =
            climbing_skeleton(*climb.geodesic, params.u_n, table, c.c3);
        max_long_count = std::max(max_long_count, climbing.long_count);
        if (2 * climbing.long_count > climbing.phi) long_bound_ok = false;

        csv << (c.seed + static_cast<std::uint64_t>(g)) << ',' << k << ',' << n << ','
            << cls.excessive.size() << ',' << cls.sidestep.size() << ',' << cls.b_nk
            << ',' << fmt_g17(res.value) << ',' << fmt_g17(t_aug) << ','
            << fmt_g17(t_cg) << '\n';

        if (c.dump_skeletons && g < 3) {
            dumps.push_back({{"seed", c.seed + static_cast<std::uint64_t>(g)},
                             {"cg", json::parse(cg.to_json())},
                             {"augmented", json::parse(aug.to_json())},
                             {"climbing", json::parse(climbing.to_json())}});
        }
    }
    sink.write("skeleton_stats.csv", csv.str());

    if (c.d <= 2 && params.h_n <= 200) {
        const CGApproxSkeleton empty_prefix;
        const StepCountReport regular =
            skeleton_count_bound_check(params, empty_prefix, 1, false, c.d);
        const StepCountReport exceptional =
            skeleton_count_bound_check(params, empty_prefix, 1, true, c.d);
        const Site v_prime{0, Transverse(static_cast<std::size_t>(c.d), 0)};
        const Site w_prime{n, Transverse(static_cast<std::size_t>(c.d), 0)};
        const StepCountReport tuples =
            compatible_tuple_count_check(params, v_prime, w_prime, c.d);
        auto report_json = [](const StepCountReport& r) {
            return json{{"slot_counts", r.slot_counts},
                        {"enumerated", r.enumerated},
                        {"bound", r.bound},
                        {"ok", r.ok},
                        {"detail", r.detail}};
        };
        meta["count_bounds"] = {{"regular", report_json(regular)},
                                {"exceptional", report_json(exceptional)},
                                {"boundary_tuples", report_json(tuples)}};
    }

    meta["samples"] = c.samples;
    meta["mean_exceptional_fraction"] =
        static_cast<double>(total_exceptional) / static_cast<double>(c.samples * k);
    meta["max_long_count"] = max_long_count;
    meta["long_bound_ok"] = long_bound_ok;
    sink.write("skeleton_stats.json", meta.dump(2) + "\n");
    if (c.dump_skeletons) sink.write("skeletons.json", dumps.dump(2) + "\n");
}

void run_oracle_check(const ExperimentConfig& c, Sink& sink) {
    const LawPtr law = parse_law(c.law);
    const Site source = origin_site(c.d);
    std::int64_t checked = 0, matched = 0;
    json mismatches = json::array();
    for (std::int64_t f = 0; f < c.fields; ++f) {
        const WeightField field(c.seed + static_cast<std::uint64_t>(f), law, c.d);
        for (std::int64_t m = 2; m <= c.m_max; m += 2) {
            const LayerFront front = layer_passage_times(field, source, m);
            const auto oracle = brute_force_front(field, source, m);
            for (const auto& [x, value] : oracle) {
                ++checked;
                if (front.at(x) == value) {
                    ++matched;
                } else if (mismatches.size() < 32) {
                    mismatches.push_back({{"seed", c.seed + static_cast<std::uint64_t>(f)},
                                          {"m", m},
                                          {"x", x},
                                          {"dp", front.at(x)},
                                          {"oracle", value}});
                }
            }
        }
    }
    json j;
    j["fields"] = c.fields;
    j["m_max"] = c.m_max;
    j["cells_checked"] = checked;
    j["cells_matched"] = matched;
    j["exact"] = (checked == matched);
    j["mismatches"] = std::move(mismatches);
    sink.write("oracle_check.json", j.dump(2) + "\n");
    if (checked != matched) throw DomainError("oracle-check: DP and enumeration disagree");
}

}  // namespace

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string RunManifest::to_json() const {
    json j;
    j["tool"] = tool;
    j["version"] = version;
    j["subcommand"] = subcommand;
    json cfg = json::object();
    for (const auto& [key, value] : config) cfg[key] = value;
    j["config"] = std::move(cfg);
    j["wall_time_s"] = wall_time_s;
    json outs = json::array();
    for (const OutputRecord& rec : outputs)
        outs.push_back({{"file", rec.file}, {"digest", rec.digest}});
    j["outputs"] = std::move(outs);
    return j.dump(2);
}

RunManifest run(const ExperimentConfig& config) {
    validate(config);
    const auto t0 = std::chrono::steady_clock::now();

    Sink sink;
    sink.dir = fs::path(config.out);
    fs::create_directories(sink.dir);

    if (config.subcommand == "simulate") {
        run_simulate(config, sink);
    } else if (config.subcommand == "mu") {
        run_mu(config, sink);
    } else if (config.subcommand == "rate-fit") {
        run_rate_fit(config, sink);
    } else if (config.subcommand == "fluctuations") {
        run_fluctuations(config, sink);
    } else if (config.subcommand == "excess-field") {
        run_excess_field(config, sink);
    } else if (config.subcommand == "nearly-gamma") {
        run_nearly_gamma(config, sink);
    } else if (config.subcommand == "skeleton-stats") {
        run_skeleton_stats(config, sink);
    } else if (config.subcommand == "oracle-check") {
        run_oracle_check(config, sink);
    } else {
        throw ConfigError("unknown subcommand '" + config.subcommand + "'");
    }

    RunManifest manifest;
    manifest.version = kVersion;
    manifest.subcommand = config.subcommand;
    manifest.config = echo_config(config);
    manifest.outputs = sink.outputs;
    manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ofstream os(sink.dir / "run_manifest.json", std::ios::binary);
    if (!os) throw Error("cannot write run_manifest.json");
    os << manifest.to_json() << "\n";
    return manifest;
}

}  // namespace fpp::cli
