#pragma once

#include "k3kit/json_io.hpp"
#include "k3kit/numeric.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace k3kit {

/* 2x2 matrix over Z/m with determinant 1; entries normalized to [0, m). */
struct MatrixMod {
    long level;
    std::array<long, 4> e; // a b c d

    static MatrixMod make(long level, long a, long b, long c, long d) {
        if (level < 2) throw std::invalid_argument("level must be >= 2");
        if (level > 65535) throw std::invalid_argument("level too large");
        MatrixMod m{level, {mod_norm(a, level), mod_norm(b, level),
                            mod_norm(c, level), mod_norm(d, level)}};
        if (mod_norm(m.e[0] * m.e[3] - m.e[1] * m.e[2], level) != 1)
            throw std::invalid_argument("matrix determinant is not 1 at this level");
        return m;
    }

    MatrixMod mul(const MatrixMod& o) const {
        if (level != o.level) throw std::invalid_argument("level mismatch");
        return MatrixMod{level,
                         {mod_norm(e[0] * o.e[0] + e[1] * o.e[2], level),
                          mod_norm(e[0] * o.e[1] + e[1] * o.e[3], level),
                          mod_norm(e[2] * o.e[0] + e[3] * o.e[2], level),
                          mod_norm(e[2] * o.e[1] + e[3] * o.e[3], level)}};
    }

    std::pair<long, long> apply(std::pair<long, long> v) const {
        return {mod_norm(e[0] * v.first + e[1] * v.second, level),
                mod_norm(e[2] * v.first + e[3] * v.second, level)};
    }

    std::uint64_t key() const {
        return ((static_cast<std::uint64_t>(e[0]) * 65536 + e[1]) * 65536 + e[2]) * 65536 + e[3];
    }

    bool is_identity() const { return e[0] == 1 && e[1] == 0 && e[2] == 0 && e[3] == 1; }

    json to_json() const {
        return json::array({json::array({e[0], e[1]}), json::array({e[2], e[3]})});
    }
};

/* |SL2(Z/m)| = m^3 * prod_{p|m} (1 - 1/p^2), exact. */
inline Int sl2_order(long m) {
    if (m < 2) throw std::invalid_argument("level must be >= 2");
    Int o = Int(m) * m * m;
    for (const auto& [p, e] : factorize(Int(m))) {
        o /= p * p;
        o *= p * p - 1;
    }
    return o;
}

/* Number of points of exact order m on a level-m torsion square:
   m^2 * prod_{p|m} (1 - 1/p^2), exact.  Equals the size of the one full
   orbit of SL2(Z/m) on primitive points. */
inline Int primitive_orbit_size_full(long m) {
    if (m < 2) throw std::invalid_argument("level must be >= 2");
    Int o = Int(m) * m;
    for (const auto& [p, e] : factorize(Int(m))) {
        o /= p * p;
        o *= p * p - 1;
    }
    return o;
}

/* Finite subgroup of SL2(Z/m), closed under multiplication (hence a group).
   Elements are kept sorted for deterministic iteration. */
class FiniteMatrixGroup {
public:
    static FiniteMatrixGroup closure(long level, std::vector<MatrixMod> gens, std::string spec_name) {
        FiniteMatrixGroup g;
        g.level_ = level;
        g.spec_ = std::move(spec_name);
        for (const auto& m : gens)
            if (m.level != level) throw std::invalid_argument("generator level mismatch");
        g.gens_ = std::move(gens);
        MatrixMod id = MatrixMod::make(level, 1, 0, 0, 1);
        std::deque<MatrixMod> queue{id};
        g.insert(id);
        while (!queue.empty()) {
            MatrixMod cur = queue.front();
            queue.pop_front();
            for (const auto& s : g.gens_) {
                MatrixMod next = cur.mul(s);
                if (g.insert(next)) queue.push_back(next);
            }
        }
        g.finalize();
        return g;
    }

    static FiniteMatrixGroup from_elements(long level, std::vector<MatrixMod> elems, std::string spec_name) {
        FiniteMatrixGroup g;
        g.level_ = level;
        g.spec_ = std::move(spec_name);
        for (const auto& m : elems) {
            if (m.level != level) throw std::invalid_argument("element level mismatch");
            g.insert(m);
        }
        g.finalize();
        return g;
    }

    long level() const { return level_; }
    const std::string& spec() const { return spec_; }
    std::size_t size() const { return elements_.size(); }
    const std::vector<MatrixMod>& elements() const { return elements_; }

    /* Generators when the group was built from an explicit list; otherwise
       the whole element list acts as a generating set. */
    const std::vector<MatrixMod>& acting_set() const {
        return gens_.empty() ? elements_ : gens_;
    }

    bool contains(const MatrixMod& m) const {
        return m.level == level_ && keys_.count(m.key()) > 0;
    }

    Int index_in_full() const {
        Int full = sl2_order(level_);
        Int sz = Int(static_cast<std::uint64_t>(elements_.size()));
        if (full % sz != 0)
            throw std::logic_error("group order does not divide |SL2|");
        return full / sz;
    }

    json to_json() const {
        json j{{"level", level_},
               {"order", static_cast<std::int64_t>(elements_.size())},
               {"index_in_full", int_to_json(index_in_full())}};
        if (!spec_.empty()) j["spec"] = spec_;
        if (!gens_.empty()) {
            json g = json::array();
            for (const auto& m : gens_) g.push_back(m.to_json());
            j["generators"] = g;
        }
        return j;
    }

private:
    bool insert(const MatrixMod& m) {
        if (!keys_.insert(m.key()).second) return false;
        elements_.push_back(m);
        return true;
    }
    void finalize() {
        std::sort(elements_.begin(), elements_.end(),
                  [](const MatrixMod& a, const MatrixMod& b) { return a.key() < b.key(); });
    }

    long level_ = 0;
    std::string spec_;
    std::vector<MatrixMod> gens_;
    std::vector<MatrixMod> elements_;
    std::unordered_set<std::uint64_t> keys_;
};

// ---------------------------------------------------------------------------
// Group specs

struct GroupSpec {
    enum class Kind { Full, Gamma, Gamma0, Gamma1, Generators } kind = Kind::Full;
    long N = 1;
    std::vector<std::array<long, 4>> gens; // integer matrices, reduced at use

    static GroupSpec parse(const std::string& text) {
        GroupSpec s;
        auto parse_level = [&](std::size_t prefix_len) {
            if (text.back() != ')') throw std::invalid_argument("malformed group spec: " + text);
            long n = std::stol(text.substr(prefix_len, text.size() - prefix_len - 1));
            if (n < 1) throw std::invalid_argument("congruence level must be >= 1");
            return n;
        };
        if (text == "full") {
            s.kind = Kind::Full;
        } else if (text.rfind("gamma0(", 0) == 0) {
            s.kind = Kind::Gamma0;
            s.N = parse_level(7);
        } else if (text.rfind("gamma1(", 0) == 0) {
            s.kind = Kind::Gamma1;
            s.N = parse_level(7);
        } else if (text.rfind("gamma(", 0) == 0) {
            s.kind = Kind::Gamma;
            s.N = parse_level(6);
        } else {
            throw std::invalid_argument("unknown group spec: " + text);
        }
        return s;
    }

    static GroupSpec from_json(const json& j) {
        if (j.is_string()) return parse(j.get<std::string>());
        if (!j.is_array()) throw std::invalid_argument("group spec must be a string or generator list");
        GroupSpec s;
        s.kind = Kind::Generators;
        for (const auto& mat : j) {
            auto rows = matrix_from_json(mat);
            if (rows.size() != 2 || rows[0].size() != 2)
                throw std::invalid_argument("generators must be 2x2 matrices");
            s.gens.push_back({static_cast<long>(rows[0][0]), static_cast<long>(rows[0][1]),
                              static_cast<long>(rows[1][0]), static_cast<long>(rows[1][1])});
        }
        return s;
    }

    std::string name() const {
        switch (kind) {
            case Kind::Full: return "full";
            case Kind::Gamma: return "gamma(" + std::to_string(N) + ")";
            case Kind::Gamma0: return "gamma0(" + std::to_string(N) + ")";
            case Kind::Gamma1: return "gamma1(" + std::to_string(N) + ")";
            default: return "generators";
        }
    }
};

/* Mod-m image of the named congruence subgroup.
   The image of a congruence family at level N depends only on g = gcd(N, m):
   reduction SL2(Z) -> SL2(Z/m) maps the family onto the subgroup of
   SL2(Z/m) cut out by the same congruence conditions mod g (strong
   approximation), so the image is built by filtering SL2(Z/m). */
inline FiniteMatrixGroup group_image(const GroupSpec& spec, long m) {
    if (m < 2) throw std::invalid_argument("level must be >= 2");
    std::vector<MatrixMod> sl2_gens{MatrixMod::make(m, 1, 1, 0, 1), MatrixMod::make(m, 0, -1, 1, 0)};
    if (spec.kind == GroupSpec::Kind::Full)
        return FiniteMatrixGroup::closure(m, sl2_gens, "full");
    if (spec.kind == GroupSpec::Kind::Generators) {
        std::vector<MatrixMod> gens;
        for (const auto& g : spec.gens) gens.push_back(MatrixMod::make(m, g[0], g[1], g[2], g[3]));
        return FiniteMatrixGroup::closure(m, gens, "");
    }
    long g = std::gcd(spec.N, m);
    FiniteMatrixGroup full = FiniteMatrixGroup::closure(m, sl2_gens, "full");
    std::vector<MatrixMod> kept;
    for (const auto& mat : full.elements()) {
        bool ok = true;
        switch (spec.kind) {
            case GroupSpec::Kind::Gamma0:
                ok = mat.e[2] % g == 0;
                break;
            case GroupSpec::Kind::Gamma1:
                ok = mat.e[2] % g == 0 && mat.e[0] % g == 1 % g && mat.e[3] % g == 1 % g;
                break;
            default: // Gamma
                ok = mat.e[2] % g == 0 && mat.e[1] % g == 0 && mat.e[0] % g == 1 % g &&
                     mat.e[3] % g == 1 % g;
                break;
        }
        if (ok) kept.push_back(mat);
    }
    return FiniteMatrixGroup::from_elements(m, std::move(kept), spec.name());
}

// ---------------------------------------------------------------------------
// Orbits of the column action v -> M v on the torsion square

inline bool is_primitive_point(std::pair<long, long> p, long m) {
    return std::gcd(std::gcd(p.first, p.second), m) == 1;
}

inline std::vector<std::pair<long, long>> orbit(const FiniteMatrixGroup& G, std::pair<long, long> p) {
    long m = G.level();
    p = {mod_norm(p.first, m), mod_norm(p.second, m)};
    std::vector<char> seen(static_cast<std::size_t>(m) * m, 0);
    auto idx = [m](std::pair<long, long> q) { return static_cast<std::size_t>(q.first) * m + q.second; };
    std::deque<std::pair<long, long>> queue{p};
    seen[idx(p)] = 1;
    std::vector<std::pair<long, long>> out{p};
    while (!queue.empty()) {
        auto cur = queue.front();
        queue.pop_front();
        for (const auto& mat : G.acting_set()) {
            auto next = mat.apply(cur);
            if (!seen[idx(next)]) {
                seen[idx(next)] = 1;
                out.push_back(next);
                queue.push_back(next);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Euler characteristic of a branched multisection cover

struct BranchData {
    long base_euler = 2;
    std::vector<std::array<long, 4>> locals; // integer matrices, reduced at use

    static BranchData from_json(const json& j) {
        BranchData b;
        if (j.contains("base_euler")) b.base_euler = j.at("base_euler").get<long>();
        if (!j.contains("locals") || !j.at("locals").is_array())
            throw std::invalid_argument("branch data needs a \"locals\" array");
        for (const auto& mat : j.at("locals")) {
            auto rows = matrix_from_json(mat);
            if (rows.size() != 2 || rows[0].size() != 2)
                throw std::invalid_argument("local monodromies must be 2x2 matrices");
            b.locals.push_back({static_cast<long>(rows[0][0]), static_cast<long>(rows[0][1]),
                                static_cast<long>(rows[1][0]), static_cast<long>(rows[1][1])});
        }
        return b;
    }

    json to_json() const {
        json locals_json = json::array();
        for (const auto& t : locals)
            locals_json.push_back(json::array({json::array({t[0], t[1]}), json::array({t[2], t[3]})}));
        return json{{"base_euler", base_euler}, {"locals", locals_json}};
    }
};

struct EulerResult {
    long degree = 0;
    long chi = 0;
    std::optional<long> genus;           // set when the cover is a connected closed surface
    std::string genus_note;              // reason when genus is absent
    std::vector<std::vector<long>> cycle_structures; // per branch element, lengths descending

    json to_json() const {
        json j{{"degree", degree}, {"chi", chi}};
        j["genus"] = genus ? json(*genus) : json(nullptr);
        if (!genus) j["genus_note"] = genus_note;
        json cs = json::array();
        for (const auto& lengths : cycle_structures) cs.push_back(lengths);
        j["cycle_structures"] = cs;
        return j;
    }
};

/* chi = d*chi(B) - sum_i (d - #cycles(t_i on the orbit)).
   Cycle counts only depend on conjugacy classes of the t_i in G.  The
   cover attached to genuine branch data is connected because the local
   monodromies generate the acting group; inputs that cannot arise that way
   (no branch points but degree > 1, or odd chi) get no genus. */
inline EulerResult multisection_euler(const FiniteMatrixGroup& G, std::pair<long, long> p,
                                      const BranchData& branch) {
    long m = G.level();
    auto O = orbit(G, p);
    long d = static_cast<long>(O.size());

    std::vector<std::size_t> pos(static_cast<std::size_t>(m) * m, 0);
    for (std::size_t i = 0; i < O.size(); ++i)
        pos[static_cast<std::size_t>(O[i].first) * m + O[i].second] = i;

    EulerResult res;
    res.degree = d;
    long deficiency = 0;
    for (const auto& t : branch.locals) {
        MatrixMod mat = MatrixMod::make(m, t[0], t[1], t[2], t[3]);
        if (!G.contains(mat))
            throw std::invalid_argument("branch element does not lie in the acting group");
        std::vector<char> visited(O.size(), 0);
        std::vector<long> lengths;
        for (std::size_t i = 0; i < O.size(); ++i) {
            if (visited[i]) continue;
            long len = 0;
            std::size_t j = i;
            while (!visited[j]) {
                visited[j] = 1;
                ++len;
                auto q = mat.apply(O[j]);
                j = pos[static_cast<std::size_t>(q.first) * m + q.second];
            }
            lengths.push_back(len);
        }
        std::sort(lengths.rbegin(), lengths.rend());
        deficiency += d - static_cast<long>(lengths.size());
        res.cycle_structures.push_back(std::move(lengths));
    }
    res.chi = branch.base_euler * d - deficiency;

    if (branch.locals.empty() && d > 1) {
        res.genus_note = "disconnected: no branch points and degree > 1";
    } else if (res.chi % 2 != 0) {
        res.genus_note = "odd Euler characteristic: branch data is not a closed cover";
    } else if ((2 - res.chi) / 2 < 0) {
        res.genus_note = "negative genus: branch data is not a connected cover";
    } else {
        res.genus = (2 - res.chi) / 2;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Genus sweep over torsion levels

struct SweepOrbitRow {
    std::pair<long, long> representative;
    long size = 0;
    long chi = 0;
    std::optional<long> genus;

    json to_json() const {
        json j{{"representative", json::array({representative.first, representative.second})},
               {"size", size},
               {"chi", chi}};
        j["genus"] = genus ? json(*genus) : json(nullptr);
        return j;
    }
};

struct SweepRow {
    long m = 0;
    std::vector<SweepOrbitRow> orbits;
    std::optional<long> min_genus; // over orbits with defined genus
    bool all_defined = true;

    json to_json() const {
        json os = json::array();
        for (const auto& o : orbits) os.push_back(o.to_json());
        json j{{"m", m}, {"orbits", os}, {"all_defined", all_defined}};
        j["min_genus"] = min_genus ? json(*min_genus) : json(nullptr);
        return j;
    }
};

struct SweepResult {
    std::vector<SweepRow> rows;
    long m0 = 0; // largest m with min genus < 2 (m_lo - 1 if none)

    json to_json() const {
        json rs = json::array();
        for (const auto& r : rows) rs.push_back(r.to_json());
        return json{{"m0", m0}, {"rows", rs}};
    }
};

/* For each level m in [m_lo, m_hi], split the primitive points into orbits
   of the image group and compute the branched-cover genus of each orbit. */
inline SweepResult genus_sweep(const GroupSpec& spec, const BranchData& branch, long m_lo, long m_hi) {
    if (m_lo < 2 || m_hi < m_lo) throw std::invalid_argument("level range must satisfy 2 <= lo <= hi");
    SweepResult result;
    result.m0 = m_lo - 1;
    for (long m = m_lo; m <= m_hi; ++m) {
        FiniteMatrixGroup G = group_image(spec, m);
        SweepRow row;
        row.m = m;
        std::vector<char> claimed(static_cast<std::size_t>(m) * m, 0);
        for (long x = 0; x < m; ++x)
            for (long y = 0; y < m; ++y) {
                if (claimed[static_cast<std::size_t>(x) * m + y]) continue;
                if (!is_primitive_point({x, y}, m)) continue;
                EulerResult eu = multisection_euler(G, {x, y}, branch);
                auto O = orbit(G, {x, y});
                for (const auto& q : O)
                    claimed[static_cast<std::size_t>(q.first) * m + q.second] = 1;
                SweepOrbitRow orow;
                orow.representative = {x, y};
                orow.size = eu.degree;
                orow.chi = eu.chi;
                orow.genus = eu.genus;
                if (eu.genus) {
                    if (!row.min_genus || *eu.genus < *row.min_genus) row.min_genus = *eu.genus;
                } else {
                    row.all_defined = false;
                }
                row.orbits.push_back(orow);
            }
        if (row.min_genus && *row.min_genus < 2) result.m0 = m;
        if (!row.all_defined) result.m0 = m; // undefined genus cannot witness g >= 2
        result.rows.push_back(std::move(row));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Degree bound for multisections

struct DegreeBound {
    Rat exact;       // primitive_orbit_size_full(m) / index
    double analytic; // (6/pi^2) * m^2 / index

    json to_json() const { return json{{"exact", rat_to_json(exact)}, {"analytic", analytic}}; }
};

/* Any rational multisection pulled back from level m has degree bounded
   below by the smallest primitive orbit, which is at least
   m^2 prod(1-1/p^2)/index > (6/pi^2) m^2 / index. */
inline DegreeBound degree_lower_bound(long m, const Int& index) {
    if (index < 1) throw std::invalid_argument("index must be >= 1");
    DegreeBound b;
    b.exact = Rat(primitive_orbit_size_full(m), index);
    b.analytic = (6.0 / (3.14159265358979323846 * 3.14159265358979323846)) *
                 static_cast<double>(m) * static_cast<double>(m) /
                 static_cast<double>(index);
    return b;
}

/* An In fiber at torsion level m meets m*k torsion sections. */
inline Int torsion_count_in_In_fiber(long m, long k) {
    if (m < 1 || k < 1) throw std::invalid_argument("arguments must be >= 1");
    return Int(m) * k;
}

} // namespace k3kit
