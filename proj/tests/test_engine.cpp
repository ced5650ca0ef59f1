#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <random>

#include "fpp/engine.hpp"
#include "fpp/errors.hpp"
#include "fpp/numerics.hpp"
#include "fpp/passage_law.hpp"
#include "fpp/weight_field.hpp"
#include "test_support.hpp"

using namespace fpp;
using fpp::test::site_of;

namespace {

// Exhaustive argmin-path oracle: minimal value, one argmin move sequence, and
// whether the minimum is attained by more than one path.
struct ArgminOracle {
    double value = std::numeric_limits<double>::infinity();
    std::vector<Move> moves;
    int hits = 0;
};

void argmin_recurse(const WeightField& field, const Site& target, Transverse& x,
                    std::int64_t layer, std::vector<Move>& stack, double sum,
                    ArgminOracle& out) {
    if (layer == target.layer) {
        if (x == target.transverse) {
            if (sum < out.value) {
                out.value = sum;
                out.moves = stack;
                out.hits = 1;
            } else if (sum == out.value) {
                ++out.hits;
            }
        }
        return;
    }
    for (int a = 0; a < static_cast<int>(x.size()); ++a) {
        for (int s : {+1, -1}) {
            const double w = field.weight_at(layer, x, Move{a, s});
            x[static_cast<std::size_t>(a)] = static_cast<std::int32_t>(x[static_cast<std::size_t>(a)] + s);
            stack.push_back(Move{a, s});
            argmin_recurse(field, target, x, layer + 1, stack, sum + w, out);
            stack.pop_back();
            x[static_cast<std::size_t>(a)] = static_cast<std::int32_t>(x[static_cast<std::size_t>(a)] - s);
        }
    }
}

ArgminOracle argmin_oracle(const WeightField& field, const Site& source,
                           const Site& target) {
    ArgminOracle out;
    Transverse x = source.transverse;
    std::vector<Move> stack;
    argmin_recurse(field, target, x, source.layer, stack, 0.0, out);
    return out;
}

// Chain sum of the field weights along a path slice, accumulated in move
// order -- the same association as the DP.
double chain_sum(const WeightField& field, const LatticePath& path,
                 std::size_t from, std::size_t to) {
    double sum = 0.0;
    Site site = path.site_at(from);
    for (std::size_t i = from; i < to; ++i) {
        const Move mv = path.moves[i];
        sum += field.weight_at(site.layer, site.transverse, mv);
        site.transverse[static_cast<std::size_t>(mv.axis)] =
            static_cast<std::int32_t>(site.transverse[static_cast<std::size_t>(mv.axis)] + mv.step);
        ++site.layer;
    }
    return sum;
}

}  // namespace

TEST_SUITE_BEGIN("engine");

TEST_CASE("weight field determinism and purity") {
    const WeightField field(42, make_exponential(1.0), 2);
    const Bond bond{site_of(3, {1, 0}), site_of(4, {1, 1})};
    const double w1 = field.bond_weight(bond);
    const double w2 = field.bond_weight(bond);
    CHECK(w1 == w2);
    CHECK(w1 >= 0.0);

    const WeightField twin(42, make_exponential(1.0), 2);
    CHECK(twin.bond_weight(bond) == w1);

    // Bit-identical across a few hundred bonds.
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        const std::int64_t layer = static_cast<std::int64_t>(rng() % 1000);
        Transverse x{static_cast<std::int32_t>(rng() % 2001) - 1000,
                     static_cast<std::int32_t>(rng() % 2001) - 1000};
        const Move mv{static_cast<std::int32_t>(rng() % 2), (rng() & 1) ? 1 : -1};
        CHECK(field.weight_at(layer, x, mv) == twin.weight_at(layer, x, mv));
    }

    CHECK_THROWS_AS(field.bond_weight(Bond{site_of(0, {0, 0}), site_of(2, {1, 1})}),
                    ConfigError);
    CHECK_THROWS_AS(field.bond_weight(Bond{site_of(0, {0, 0}), site_of(1, {1, 1})}),
                    ConfigError);
}

TEST_CASE("constant law gives unit weights") {
    const WeightField field(7, make_constant(1.0), 1);
    for (int i = 0; i < 50; ++i) {
        const Transverse x{static_cast<std::int32_t>(2 * i - 50)};
        CHECK(field.weight_at(i, x, Move{0, 1}) == 1.0);
    }
}

TEST_CASE("distinct bonds decorrelate across seeds") {
    const Transverse xa{0};
    const Transverse xb{4};
    std::vector<double> ua, ub;
    ua.reserve(10000);
    ub.reserve(10000);
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const WeightField field(seed, make_uniform(0.0, 1.0), 1);
        ua.push_back(field.uniform_at(0, xa, Move{0, 1}));
        ub.push_back(field.uniform_at(4, xb, Move{0, -1}));
    }
    const Moments ma = compute_moments(ua);
    const Moments mb = compute_moments(ub);
    double cov = 0.0;
    for (std::size_t i = 0; i < ua.size(); ++i)
        cov += (ua[i] - ma.mean) * (ub[i] - mb.mean);
    cov /= static_cast<double>(ua.size() - 1);
    const double rho = cov / (ma.stddev * mb.stddev);
    CHECK(std::fabs(rho) < 0.05);
    // Uniform marginals look uniform.
    CHECK(ma.mean == doctest::Approx(0.5).epsilon(0.03));
    CHECK(ma.variance == doctest::Approx(1.0 / 12.0).epsilon(0.1));
}

TEST_CASE("layer fronts") {
    SUBCASE("m=0 is the source cell") {
        const WeightField field(1, make_exponential(1.0), 1);
        const LayerFront front = layer_passage_times(field, site_of(0, {0}), 0);
        CHECK(front.layer == 0);
        CHECK(front.at(Transverse{0}) == 0.0);
    }
    SUBCASE("constant weights reach every cone cell in m steps") {
        const WeightField field(3, make_constant(1.0), 2);
        const std::int64_t m = 5;
        const LayerFront front = layer_passage_times(field, site_of(0, {0, 0}), m);
        int finite = 0;
        for (std::int32_t x1 = -5; x1 <= 5; ++x1) {
            for (std::int32_t x2 = -5; x2 <= 5; ++x2) {
                const Transverse x{x1, x2};
                const double v = front.at(x);
                const bool reachable =
                    std::abs(x1) + std::abs(x2) <= m && ((m + x1 + x2) % 2 == 0);
                if (reachable) {
                    CHECK(v == static_cast<double>(m));
                    ++finite;
                } else {
                    CHECK(std::isinf(v));
                }
            }
        }
        CHECK(finite > 0);
    }
}

TEST_CASE("dp equals the enumeration oracle on every cell") {
    for (int d : {1, 2}) {
        const Site source = origin_site(d);
        for (std::int64_t m : {1, 2, 5, 8}) {
            for (std::uint64_t seed : {11ull, 12ull, 13ull, 14ull, 15ull}) {
                const WeightField field(seed, make_exponential(1.0), d);
                const LayerFront front = layer_passage_times(field, source, m);
                const auto oracle = brute_force_front(field, source, m);
                CHECK(!oracle.empty());
                for (const auto& [x, value] : oracle) {
                    CHECK(front.at(x) == value);  // exact, zero tolerance
                }
            }
        }
    }
}

TEST_CASE("min passage time") {
    SUBCASE("source equals target") {
        const WeightField field(1, make_exponential(1.0), 1);
        CHECK(min_passage_time(field, site_of(0, {0}), site_of(0, {0})) == 0.0);
    }
    SUBCASE("constant law a_{0n} = n") {
        const WeightField field(1, make_constant(1.0), 1);
        CHECK(min_passage_time(field, site_of(0, {0}), site_of(64, {0})) == 64.0);
    }
    SUBCASE("d=2, m=6, fixed seed equals brute force") {
        const WeightField field(99, make_exponential(1.0), 2);
        const Site target = site_of(6, {2, 0});
        CHECK(min_passage_time(field, origin_site(2), target) ==
              brute_force_passage(field, origin_site(2), target));
    }
    SUBCASE("unreachable targets raise") {
        const WeightField field(1, make_exponential(1.0), 1);
        CHECK_THROWS_AS(min_passage_time(field, site_of(0, {0}), site_of(2, {4})),
                        UnreachableError);
        CHECK_THROWS_AS(min_passage_time(field, site_of(4, {0}), site_of(0, {0})),
                        UnreachableError);
    }
    SUBCASE("value bounded by any explicit path") {
        std::mt19937_64 rng(31);
        const WeightField field(17, make_gamma(2.0, 1.0), 2);
        for (int trial = 0; trial < 20; ++trial) {
            const LatticePath path = fpp::test::random_path(rng, origin_site(2), 10);
            const double along = chain_sum(field, path, 0, path.length());
            CHECK(path_time(field, path) == along);
            const double best = min_passage_time(field, origin_site(2), path.endpoint());
            CHECK(best <= along);
        }
        CHECK_THROWS_AS(path_time(field, LatticePath{origin_site(2), {Move{5, 1}}}),
                        ConfigError);
    }
}

TEST_CASE("geodesics") {
    SUBCASE("tie-break is deterministic under the constant law") {
        const WeightField field(5, make_constant(1.0), 1);
        const PassageResult a = geodesic(field, site_of(0, {0}), site_of(4, {0}));
        const PassageResult b = geodesic(field, site_of(0, {0}), site_of(4, {0}));
        REQUIRE(a.geodesic.has_value());
        CHECK(a.value == 4.0);
        CHECK(*a.geodesic == *b.geodesic);
        CHECK(validate_path(*a.geodesic).ok);
        CHECK(a.geodesic->endpoint() == site_of(4, {0}));
    }
    SUBCASE("path weight sum equals value exactly") {
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            const WeightField field(seed, make_exponential(1.0), 2);
            const PassageResult res = geodesic(field, origin_site(2), site_of(12, {2, 0}));
            REQUIRE(res.geodesic.has_value());
            CHECK(validate_path(*res.geodesic).ok);
            CHECK(chain_sum(field, *res.geodesic, 0, res.geodesic->length()) == res.value);
        }
    }
    SUBCASE("matches the unique enumeration argmin") {
        int unique_cases = 0;
        for (std::uint64_t seed = 100; seed < 130; ++seed) {
            const WeightField field(seed, make_exponential(1.0), 1);
            const Site target = site_of(8, {2});
            const ArgminOracle oracle = argmin_oracle(field, origin_site(1), target);
            const PassageResult res = geodesic(field, origin_site(1), target);
            CHECK(res.value == oracle.value);
            if (oracle.hits == 1) {
                ++unique_cases;
                REQUIRE(res.geodesic.has_value());
                CHECK(res.geodesic->moves == oracle.moves);
            }
        }
        CHECK(unique_cases >= 25);  // continuous law: ties essentially never
    }
}

TEST_CASE("brute force guards") {
    const WeightField field(1, make_exponential(1.0), 1);
    CHECK_THROWS_AS(brute_force_passage(field, site_of(0, {0}), site_of(14, {0})),
                    GuardError);
    SUBCASE("single bond value") {
        const double direct = field.weight_at(0, Transverse{0}, Move{0, 1});
        CHECK(brute_force_passage(field, site_of(0, {0}), site_of(1, {1})) == direct);
    }
    SUBCASE("two-path minimum at m=2") {
        const double up = field.weight_at(0, Transverse{0}, Move{0, 1}) +
                          field.weight_at(1, Transverse{1}, Move{0, -1});
        const double down = field.weight_at(0, Transverse{0}, Move{0, -1}) +
                            field.weight_at(1, Transverse{-1}, Move{0, 1});
        CHECK(brute_force_passage(field, site_of(0, {0}), site_of(2, {0})) ==
              std::min(up, down));
    }
}

TEST_CASE("triangle inequality on realizations") {
    std::mt19937_64 rng(41);
    const WeightField field(77, make_exponential(1.0), 1);
    for (int trial = 0; trial < 40; ++trial) {
        const std::int32_t xv = static_cast<std::int32_t>(rng() % 9) - 4;
        const std::int32_t xw = static_cast<std::int32_t>(rng() % 9) - 4;
        const Site u = site_of(0, {0});
        const Site v = site_of(6, {2 * xv});
        const Site w = site_of(12, {2 * xw});
        if (!is_reachable(u, v) || !is_reachable(v, w)) continue;
        const double tuv = min_passage_time(field, u, v);
        const double tvw = min_passage_time(field, v, w);
        const double tuw = min_passage_time(field, u, w);
        // The two sides associate their sums differently; allow a few ulps.
        const double rhs = tuv + tvw;
        CHECK(tuw <= rhs * (1.0 + 16.0 * DBL_EPSILON));
    }
}

TEST_CASE("monotone coupling under field surgery") {
    const WeightField base(55, make_exponential(1.0), 1);
    const Site source = site_of(0, {0});
    for (const auto& [slayer, sx, saxis, sstep] :
         {std::tuple{1, 1, 0, 1}, std::tuple{2, 0, 0, -1}, std::tuple{3, -1, 0, 1}}) {
        WeightFn bumped = [&, slayer = slayer, sx = sx, saxis = saxis,
                           sstep = sstep](std::int64_t layer, std::span<const std::int32_t> x,
                                          Move mv) {
            double w = base.weight_at(layer, x, mv);
            if (layer == slayer && x[0] == sx && mv.axis == saxis && mv.step == sstep)
                w += 0.75;
            return w;
        };
        const auto before = brute_force_front(base, source, 6);
        const auto after = brute_force_front(bumped, 1, source, 6);
        for (const auto& [x, v] : before) {
            CHECK(after.at(x) >= v);  // raising one bond never lowers a passage time
        }
    }
}

TEST_CASE("reflection equivariance of the field") {
    const int d = 2;
    const WeightField field(123, make_exponential(1.0), d);
    const Site source = origin_site(d);
    const std::int64_t m = 6;
    const auto base = brute_force_front(field, source, m);

    struct NamedMap {
        const char* name;
        Transverse (*site)(const Transverse&);
        Move (*move)(Move);
    };
    const NamedMap maps[] = {
        {"eta", [](const Transverse& x) { Transverse o(x); for (auto& c : o) c = -c; return o; },
         [](Move mv) { return Move{mv.axis, -mv.step}; }},
        {"zeta", [](const Transverse& x) { Transverse o(x); for (std::size_t i = 1; i < o.size(); ++i) o[i] = -o[i]; return o; },
         [](Move mv) { return mv.axis == 0 ? mv : Move{mv.axis, -mv.step}; }},
        {"xi2", [](const Transverse& x) { Transverse o(x); std::swap(o[0], o[1]); return o; },
         [](Move mv) { return Move{mv.axis == 0 ? 1 : (mv.axis == 1 ? 0 : mv.axis), mv.step}; }},
    };

    for (const NamedMap& map : maps) {
        CAPTURE(map.name);
        WeightFn rekeyed = [&](std::int64_t layer, std::span<const std::int32_t> x, Move mv) {
            const Transverse tx = map.site(Transverse(x.begin(), x.end()));
            return field.weight_at(layer, tx, map.move(mv));
        };
        const auto mapped = brute_force_front(rekeyed, d, source, m);
        for (const auto& [x, v] : mapped) {
            CHECK(base.at(map.site(x)) == v);
        }
    }
}

TEST_CASE("skeleton passage time") {
    const WeightField field(9, make_exponential(1.0), 1);
    SUBCASE("single segment equals min passage time") {
        const std::pair<Site, Site> seg{site_of(0, {0}), site_of(10, {2})};
        CHECK(skeleton_passage_time(field, std::span(&seg, 1)) ==
              min_passage_time(field, seg.first, seg.second));
    }
    SUBCASE("disjoint constant-1 segments sum their layer gaps") {
        const WeightField ones(1, make_constant(1.0), 1);
        const std::vector<std::pair<Site, Site>> segs{
            {site_of(0, {0}), site_of(6, {0})}, {site_of(20, {4}), site_of(30, {0})}};
        CHECK(skeleton_passage_time(ones, segs) == 16.0);
    }
    SUBCASE("partition at skeleton points is bounded by the piecewise path sum") {
        const PassageResult res = geodesic(field, site_of(0, {0}), site_of(12, {0}));
        REQUIRE(res.geodesic.has_value());
        const auto sites = res.geodesic->sites();
        std::vector<std::pair<Site, Site>> segs;
        double piecewise = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            segs.emplace_back(sites[4 * j], sites[4 * (j + 1)]);
            piecewise += chain_sum(field, *res.geodesic, 4 * j, 4 * (j + 1));
        }
        CHECK(skeleton_passage_time(field, segs) <= piecewise);
    }
    SUBCASE("unreachable segment raises") {
        const std::vector<std::pair<Site, Site>> segs{{site_of(0, {0}), site_of(2, {4})}};
        CHECK_THROWS_AS(skeleton_passage_time(field, segs), UnreachableError);
    }
}

TEST_SUITE_END();
