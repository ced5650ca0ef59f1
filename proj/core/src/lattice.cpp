#include "fpp/lattice.hpp"

#include <cstdlib>
#include <limits>
#include <sstream>

namespace fpp {

namespace {

constexpr std::int64_t kCoordMin = std::numeric_limits<std::int32_t>::min();
constexpr std::int64_t kCoordMax = std::numeric_limits<std::int32_t>::max();

std::int64_t transverse_sum(const Transverse& x) {
    std::int64_t s = 0;
    for (std::int32_t v : x) s += v;
    return s;
}

}  // namespace

Site origin_site(int dim) {
    if (dim < 1) throw ConfigError("site dimension must be >= 1");
    return Site{0, Transverse(static_cast<std::size_t>(dim), 0)};
}

bool is_lattice_site(const Site& site) {
    if (site.transverse.empty()) return false;
    return ((site.layer + transverse_sum(site.transverse)) & 1) == 0;
}

bool is_bond(const Bond& bond) {
    if (!is_lattice_site(bond.from) || !is_lattice_site(bond.to)) return false;
    if (bond.from.dim() != bond.to.dim()) return false;
    if (bond.to.layer != bond.from.layer + 1) return false;
    int diffs = 0;
    for (int i = 0; i < bond.from.dim(); ++i) {
        std::int64_t d = static_cast<std::int64_t>(bond.to.transverse[i]) -
                         bond.from.transverse[i];
        if (d == 0) continue;
        if (d != 1 && d != -1) return false;
        ++diffs;
    }
    return diffs == 1;
}

Site LatticePath::site_at(std::size_t index) const {
    if (index > moves.size()) throw ConfigError("path index out of range");
    Site site = start;
    for (std::size_t i = 0; i < index; ++i) {
        const Move& mv = moves[i];
        std::int64_t next = static_cast<std::int64_t>(site.transverse[static_cast<std::size_t>(mv.axis)]) + mv.step;
        if (next < kCoordMin || next > kCoordMax)
            throw Error("transverse coordinate overflow");
        site.transverse[static_cast<std::size_t>(mv.axis)] = static_cast<std::int32_t>(next);
        ++site.layer;
    }
    return site;
}

std::vector<Site> LatticePath::sites() const {
    std::vector<Site> out;
    out.reserve(moves.size() + 1);
    Site site = start;
    out.push_back(site);
    for (const Move& mv : moves) {
        std::int64_t next = static_cast<std::int64_t>(site.transverse[static_cast<std::size_t>(mv.axis)]) + mv.step;
        if (next < kCoordMin || next > kCoordMax)
            throw Error("transverse coordinate overflow");
        site.transverse[static_cast<std::size_t>(mv.axis)] = static_cast<std::int32_t>(next);
        ++site.layer;
        out.push_back(site);
    }
    return out;
}

PathCheck validate_path(const LatticePath& path) {
    PathCheck check;
    if (!is_lattice_site(path.start)) {
        check.ok = false;
        check.reason = "start site violates even-lattice parity";
        check.endpoint = path.start;
        return check;
    }
    const int d = path.dim();
    Site site = path.start;
    for (std::size_t i = 0; i < path.moves.size(); ++i) {
        const Move& mv = path.moves[i];
        if (mv.axis < 0 || mv.axis >= d) {
            check.ok = false;
            check.violation_index = i;
            check.reason = "move axis out of range";
            check.endpoint = site;
            return check;
        }
        if (mv.step != 1 && mv.step != -1) {
            check.ok = false;
            check.violation_index = i;
            check.reason = "move step must be +1 or -1";
            check.endpoint = site;
            return check;
        }
        std::int64_t next = static_cast<std::int64_t>(site.transverse[static_cast<std::size_t>(mv.axis)]) + mv.step;
        if (next < kCoordMin || next > kCoordMax) {
            check.ok = false;
            check.violation_index = i;
            check.reason = "transverse coordinate overflow";
            check.endpoint = site;
            return check;
        }
        site.transverse[static_cast<std::size_t>(mv.axis)] = static_cast<std::int32_t>(next);
        ++site.layer;
    }
    check.endpoint = site;
    return check;
}

PathCheck check_site_sequence(std::span<const Site> sites) {
    PathCheck check;
    if (sites.empty()) {
        check.ok = false;
        check.reason = "empty site sequence";
        return check;
    }
    if (!is_lattice_site(sites[0])) {
        check.ok = false;
        check.violation_index = 0;
        check.reason = "site violates even-lattice parity";
        check.endpoint = sites[0];
        return check;
    }
    for (std::size_t i = 1; i < sites.size(); ++i) {
        if (!is_bond(Bond{sites[i - 1], sites[i]})) {
            check.ok = false;
            check.violation_index = i;
            check.reason = "consecutive sites not adjacent";
            check.endpoint = sites[i - 1];
            return check;
        }
    }
    check.endpoint = sites.back();
    return check;
}

LatticePath path_from_sites(std::span<const Site> sites) {
    PathCheck check = check_site_sequence(sites);
    if (!check.ok) {
        throw ConfigError("invalid site sequence at index " +
                          std::to_string(check.violation_index) + ": " + check.reason);
    }
    LatticePath path;
    path.start = sites[0];
    path.moves.reserve(sites.size() - 1);
    for (std::size_t i = 1; i < sites.size(); ++i) {
        for (int a = 0; a < sites[0].dim(); ++a) {
            std::int32_t d = sites[i].transverse[static_cast<std::size_t>(a)] -
                             sites[i - 1].transverse[static_cast<std::size_t>(a)];
            if (d != 0) {
                path.moves.push_back(Move{a, d});
                break;
            }
        }
    }
    return path;
}

std::vector<Site> forward_neighbors(const Site& site) {
    if (!is_lattice_site(site))
        throw ConfigError("forward_neighbors: site violates even-lattice parity");
    std::vector<Site> out;
    out.reserve(2 * static_cast<std::size_t>(site.dim()));
    for (int a = 0; a < site.dim(); ++a) {
        for (int s : {+1, -1}) {
            Site n = site;
            std::int64_t next = static_cast<std::int64_t>(n.transverse[static_cast<std::size_t>(a)]) + s;
            if (next < kCoordMin || next > kCoordMax)
                throw Error("transverse coordinate overflow");
            n.transverse[static_cast<std::size_t>(a)] = static_cast<std::int32_t>(next);
            ++n.layer;
            out.push_back(std::move(n));
        }
    }
    return out;
}

PseudoPath::PseudoPath(std::vector<PseudoPoint> points) : points_(std::move(points)) {
    if (points_.empty()) throw ConfigError("pseudo path needs at least one point");
    const std::size_t d = points_[0].transverse.size();
    for (const PseudoPoint& p : points_) {
        if (p.transverse.size() != d)
            throw ConfigError("pseudo path points have mixed dimensions");
    }
    if (points_.size() >= 2) {
        stride_ = points_[1].layer - points_[0].layer;
        if (stride_ <= 0 || (stride_ & 1) != 0)
            throw ConfigError("pseudo path stride must be a positive even integer");
        for (std::size_t i = 2; i < points_.size(); ++i) {
            if (points_[i].layer - points_[i - 1].layer != stride_)
                throw ConfigError("pseudo path layers must increase by a fixed stride");
        }
    }
}

Site zeta(const Site& site) {
    Site out = site;
    for (std::size_t i = 1; i < out.transverse.size(); ++i)
        out.transverse[i] = -out.transverse[i];
    return out;
}

Site xi_swap(const Site& site, int j) {
    if (j < 1 || j > site.dim())
        throw ConfigError("xi_swap: axis index out of range");
    Site out = site;
    std::swap(out.transverse[0], out.transverse[static_cast<std::size_t>(j - 1)]);
    return out;
}

Site eta(const Site& site) {
    Site out = site;
    for (auto& v : out.transverse) v = -v;
    return out;
}

LatticePath zeta(const LatticePath& path) {
    LatticePath out;
    out.start = zeta(path.start);
    out.moves.reserve(path.moves.size());
    for (const Move& mv : path.moves)
        out.moves.push_back(mv.axis == 0 ? mv : Move{mv.axis, -mv.step});
    return out;
}

LatticePath xi_swap(const LatticePath& path, int j) {
    if (j < 1 || j > path.dim())
        throw ConfigError("xi_swap: axis index out of range");
    LatticePath out;
    out.start = xi_swap(path.start, j);
    out.moves.reserve(path.moves.size());
    const std::int32_t other = static_cast<std::int32_t>(j - 1);
    for (const Move& mv : path.moves) {
        Move m = mv;
        if (m.axis == 0)
            m.axis = other;
        else if (m.axis == other)
            m.axis = 0;
        out.moves.push_back(m);
    }
    return out;
}

LatticePath eta(const LatticePath& path) {
    LatticePath out;
    out.start = eta(path.start);
    out.moves.reserve(path.moves.size());
    for (const Move& mv : path.moves) out.moves.push_back(Move{mv.axis, -mv.step});
    return out;
}

LatticePath translate(const LatticePath& path, const Site& offset) {
    if (offset.dim() != path.dim())
        throw ConfigError("translate: offset dimension mismatch");
    if (((offset.layer + transverse_sum(offset.transverse)) & 1) != 0)
        throw ConfigError("translate: offset breaks lattice parity");
    LatticePath out = path;
    out.start.layer += offset.layer;
    for (std::size_t i = 0; i < out.start.transverse.size(); ++i) {
        std::int64_t next = static_cast<std::int64_t>(out.start.transverse[i]) + offset.transverse[i];
        if (next < kCoordMin || next > kCoordMax)
            throw Error("transverse coordinate overflow");
        out.start.transverse[i] = static_cast<std::int32_t>(next);
    }
    return out;
}

PseudoPath symmetrized_sum(const LatticePath& a, const LatticePath& b) {
    if (a.length() != b.length())
        throw ConfigError("symmetrized_sum: path length mismatch");
    if (a.start.layer != b.start.layer)
        throw ConfigError("symmetrized_sum: start layer mismatch");
    if (a.dim() != b.dim())
        throw ConfigError("symmetrized_sum: dimension mismatch");
    const std::vector<Site> sa = a.sites();
    const std::vector<Site> sb = b.sites();
    std::vector<PseudoPoint> points;
    points.reserve(sa.size());
    for (std::size_t i = 0; i < sa.size(); ++i) {
        PseudoPoint p;
        p.layer = sa[i].layer + sb[i].layer;
        p.transverse.resize(sa[i].transverse.size());
        for (std::size_t c = 0; c < p.transverse.size(); ++c) {
            p.transverse[c] = static_cast<std::int64_t>(sa[i].transverse[c]) +
                              sb[i].transverse[c];
        }
        points.push_back(std::move(p));
    }
    return PseudoPath(std::move(points));
}

std::string to_string(const LatticePath& path) {
    std::ostringstream os;
    os << path.start.layer;
    for (std::int32_t v : path.start.transverse) os << ' ' << v;
    os << ';';
    for (const Move& mv : path.moves)
        os << ' ' << (mv.axis + 1) << (mv.step > 0 ? '+' : '-');
    return os.str();
}

LatticePath parse_path(std::string_view line) {
    const std::size_t semi = line.find(';');
    if (semi == std::string_view::npos)
        throw ConfigError("path string missing ';' separator");
    std::istringstream head{std::string(line.substr(0, semi))};
    LatticePath path;
    if (!(head >> path.start.layer))
        throw ConfigError("path string missing start layer");
    std::int64_t coord = 0;
    while (head >> coord) {
        if (coord < kCoordMin || coord > kCoordMax)
            throw ConfigError("path start coordinate out of 32-bit range");
        path.start.transverse.push_back(static_cast<std::int32_t>(coord));
    }
    if (path.start.transverse.empty())
        throw ConfigError("path string has no transverse coordinates");
    std::istringstream tail{std::string(line.substr(semi + 1))};
    std::string tok;
    while (tail >> tok) {
        if (tok.size() < 2)
            throw ConfigError("malformed move token '" + tok + "'");
        const char sign = tok.back();
        if (sign != '+' && sign != '-')
            throw ConfigError("move token must end in '+' or '-': '" + tok + "'");
        int axis = 0;
        try {
            axis = std::stoi(tok.substr(0, tok.size() - 1));
        } catch (const std::exception&) {
            throw ConfigError("malformed move token '" + tok + "'");
        }
        if (axis < 1 || axis > path.dim())
            throw ConfigError("move axis out of range in token '" + tok + "'");
        path.moves.push_back(Move{axis - 1, sign == '+' ? 1 : -1});
    }
    PathCheck check = validate_path(path);
    if (!check.ok) throw ConfigError("parsed path invalid: " + check.reason);
    return path;
}

}  // namespace fpp
