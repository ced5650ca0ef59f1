#include <cstdio>

#include <json.hpp>

#include "fpp/distribution_checks.hpp"
#include "fpp/engine.hpp"
#include "fpp/format.hpp"
#include "fpp/scaling.hpp"
#include "fpp/skeleton.hpp"

namespace fpp {

using nlohmann::json;

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

json site_json(const Site& site) {
    return json{{"layer", site.layer}, {"x", site.transverse}};
}

json tuple_json(const SkeletonTuple& tuple) {
    json sites = json::array();
    for (const Site& s : tuple.sites) sites.push_back(site_json(s));
    const char* kind = tuple.kind == SkeletonTuple::Kind::regular    ? "regular"
                       : tuple.kind == SkeletonTuple::Kind::excessive ? "excessive"
                                                                      : "sidestep";
    return json{{"kind", kind}, {"sites", sites}};
}

}  // namespace

std::string PassageResult::to_json() const {
    json j;
    j["value"] = value;
    if (geodesic) j["geodesic"] = to_string(*geodesic);
    return j.dump(2);
}

std::string NearlyGammaReport::to_json() const {
    json j;
    j["interval_connected"] = interval_connected;
    j["continuity_flag"] = continuity_flag;
    j["a_fit"] = a_fit;
    j["a_max"] = a_max;
    j["pass"] = pass;
    json grid_json = json::array();
    for (const auto& [y, u] : grid) grid_json.push_back({y, u});
    j["grid"] = std::move(grid_json);
    j["point_errors"] = point_errors;
    return j.dump(2);
}

std::string TimeConstantEstimate::to_json() const {
    json j;
    j["mu_hat"] = mu_hat;
    j["n_used"] = n_used;
    j["ci_halfwidth"] = ci_halfwidth;
    j["note"] = note;
    json ratio_json = json::array();
    for (const auto& [n, r] : ratios) ratio_json.push_back({{"n", n}, {"ratio", r}});
    j["ratios"] = std::move(ratio_json);
    return j.dump(2);
}

std::string RateFit::to_json() const {
    json j;
    j["fitted"] = fitted;
    j["best"] = best;
    j["note"] = note;
    j["used_ns"] = used_ns;
    j["excluded_ns"] = excluded_ns;
    json cands = json::array();
    for (const RateCandidate& c : candidates) {
        cands.push_back({{"name", c.name},
                         {"constant", c.constant},
                         {"rms_residual", c.rms_residual}});
    }
    j["candidates"] = std::move(cands);
    return j.dump(2);
}

std::string FluctuationFit::to_json() const {
    json j;
    j["chi_hat"] = chi_hat;
    j["amplitude"] = amplitude;
    json rows_json = json::array();
    for (const Row& r : rows) {
        rows_json.push_back({{"n", r.n}, {"stddev", r.stddev}, {"scale_ratio", r.scale_ratio}});
    }
    j["rows"] = std::move(rows_json);
    return j.dump(2);
}

std::string CGApproxSkeleton::to_json() const {
    json tuples_json = json::array();
    for (const SkeletonTuple& t : tuples) tuples_json.push_back(tuple_json(t));
    return json{{"tuples", tuples_json}}.dump(2);
}

std::string AugmentedSkeleton::to_json() const {
    json tuples_json = json::array();
    for (const SkeletonTuple& t : tuples) tuples_json.push_back(tuple_json(t));
    return json{{"tuples", tuples_json}}.dump(2);
}

std::string ClimbingSkeleton::to_json() const {
    json j;
    j["phi"] = phi;
    j["u_n"] = u_n;
    j["long_count"] = long_count;
    j["any_estimated"] = any_estimated;
    json taus_json = json::array();
    for (const Hit& h : taus)
        taus_json.push_back({{"tau", h.index}, {"site", site_json(h.site)}});
    j["taus"] = std::move(taus_json);
    j["is_short"] = is_short;
    json clean_json = json::array();
    for (const auto& c : clean)
        clean_json.push_back(c ? json(*c) : json(nullptr));
    j["clean"] = std::move(clean_json);
    json wit_json = json::array();
    for (const auto& w : witnesses) {
        if (w)
            wit_json.push_back({{"alpha", w->alpha}, {"beta", w->beta}});
        else
            wit_json.push_back(nullptr);
    }
    j["witnesses"] = std::move(wit_json);
    j["sigma"] = sigma;
    return j.dump(2);
}

}  // namespace fpp
