#pragma once

#include "k3kit/fibers.hpp"
#include "k3kit/monodromy.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace k3kit {

/* An elliptic fibration known only through its degree (the order of its
   torsor class), plus optional monodromy and fiber-configuration data. */
struct FibrationDescriptor {
    long degree = 1;
    bool jacobian = false;
    bool isotrivial = false;
    std::optional<GroupSpec> monodromy;
    std::optional<FiberConfiguration> fiber_config;

    static FibrationDescriptor make(long degree, bool jacobian, bool isotrivial = false,
                                    std::optional<GroupSpec> monodromy = {},
                                    std::optional<FiberConfiguration> fiber_config = {}) {
        if (degree < 1) throw std::invalid_argument("fibration degree must be >= 1");
        if (jacobian && degree != 1)
            throw std::invalid_argument("a Jacobian fibration has a section, hence degree 1");
        return FibrationDescriptor{degree, jacobian, isotrivial, std::move(monodromy),
                                   std::move(fiber_config)};
    }

    json to_json() const {
        json j{{"degree", degree}, {"jacobian", jacobian}, {"isotrivial", isotrivial}};
        if (monodromy) j["monodromy"] = monodromy->name();
        if (fiber_config) j["fiber_config"] = fiber_config->to_json();
        return j;
    }

    static FibrationDescriptor from_json(const json& j) {
        long degree = j.value("degree", 1L);
        bool jac = j.value("jacobian", false);
        bool iso = j.value("isotrivial", false);
        std::optional<GroupSpec> spec;
        if (j.contains("monodromy")) spec = GroupSpec::from_json(j.at("monodromy"));
        std::optional<FiberConfiguration> config;
        if (j.contains("fiber_config")) config = FiberConfiguration::from_json(j.at("fiber_config"));
        return make(degree, jac, iso, std::move(spec), std::move(config));
    }
};

/* Trichotomy for the torsion behavior of a multisection: torsion of a known
   exact order, certified non-torsion, or open with a set of excluded orders. */
struct TorsionStatus {
    enum class Kind { Torsion, NonTorsion, UndeterminedExcluding };
    Kind kind = Kind::UndeterminedExcluding;
    long order = 0;            // Torsion only
    std::set<long> excluded;   // UndeterminedExcluding only

    static TorsionStatus torsion(long order) {
        if (order < 1) throw std::invalid_argument("torsion order must be >= 1");
        return TorsionStatus{Kind::Torsion, order, {}};
    }
    static TorsionStatus non_torsion() { return TorsionStatus{Kind::NonTorsion, 0, {}}; }
    static TorsionStatus undetermined(std::set<long> excluded = {}) {
        return TorsionStatus{Kind::UndeterminedExcluding, 0, std::move(excluded)};
    }

    json to_json() const {
        switch (kind) {
            case Kind::Torsion: return json{{"kind", "torsion"}, {"order", order}};
            case Kind::NonTorsion: return json{{"kind", "non_torsion"}};
            default: {
                json ex = json::array();
                for (long n : excluded) ex.push_back(n);
                return json{{"kind", "undetermined"}, {"excluded_orders", ex}};
            }
        }
    }

    static TorsionStatus from_json(const json& j) {
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "torsion") return torsion(j.at("order").get<long>());
        if (kind == "non_torsion") return non_torsion();
        if (kind == "undetermined") {
            std::set<long> ex;
            if (j.contains("excluded_orders"))
                for (const auto& n : j.at("excluded_orders")) ex.insert(n.get<long>());
            return undetermined(std::move(ex));
        }
        throw std::invalid_argument("unknown torsion kind: " + kind);
    }
};

struct MultisectionDescriptor {
    long degree = 1;
    TorsionStatus torsion;
    std::optional<long> genus;
    bool saliently_ramified = false; // a point of local intersection multiplicity >= 2

    /* ambient_degree is the degree of the fibration the multisection lives
       in; multisection degrees are multiples of it.  Salient ramification
       certifies non-torsion. */
    static MultisectionDescriptor make(long degree, long ambient_degree, TorsionStatus torsion,
                                       std::optional<long> genus = {}, bool saliently_ramified = false) {
        if (degree < 1) throw std::invalid_argument("multisection degree must be >= 1");
        if (ambient_degree < 1) throw std::invalid_argument("ambient degree must be >= 1");
        if (degree % ambient_degree != 0)
            throw std::invalid_argument("multisection degree must be divisible by the fibration degree");
        if (genus && *genus < 0) throw std::invalid_argument("genus must be nonnegative");
        if (saliently_ramified) {
            if (torsion.kind == TorsionStatus::Kind::Torsion)
                throw std::invalid_argument(
                    "salient ramification contradicts torsion: such a multisection is non-torsion");
            torsion = TorsionStatus::non_torsion();
        }
        return MultisectionDescriptor{degree, std::move(torsion), genus, saliently_ramified};
    }

    json to_json() const {
        json j{{"degree", degree}, {"torsion", torsion.to_json()}};
        if (genus) j["genus"] = *genus;
        if (saliently_ramified) j["saliently_ramified"] = true;
        return j;
    }
};

// ---------------------------------------------------------------------------
// Order calculus

/* The order of the fibration's torsor class equals its degree. */
inline long class_order(const FibrationDescriptor& f) { return f.degree; }

/* Class of the m-th relative symmetric power in the cyclic family: m mod d. */
inline long jm_class(long m, const FibrationDescriptor& f) {
    if (m < 0) throw std::invalid_argument("m must be nonnegative");
    return m % f.degree;
}

/* A torsion multisection of order t maps, under the m-th twist, to one of
   order exactly t / gcd(t, m). */
inline long transfer_order(long t, long m) {
    if (t < 1 || m < 1) throw std::invalid_argument("orders must be >= 1");
    return t / std::gcd(t, m);
}

struct ReduceResult {
    std::optional<long> alpha;   // multiplier with alpha * t = 1 mod p (k = 1 only)
    bool in_jacobian = false;    // k > 1 lands in the Jacobian
    MultisectionDescriptor target;

    json to_json() const {
        json j{{"in_jacobian", in_jacobian}, {"target", target.to_json()}};
        if (alpha) j["alpha"] = *alpha;
        return j;
    }
};

/* A torsion multisection of order t * p^k (p prime to t) surjects onto a
   p-torsion multisection: inside the fibration itself when k = 1 (scaling
   by the inverse of t mod p), inside the Jacobian when k > 1. */
inline ReduceResult reduce_to_p_torsion(long t, long p, long k, const FibrationDescriptor& f) {
    if (t < 1 || k < 1) throw std::invalid_argument("t and k must be >= 1");
    if (p < 2 || !is_prime(Int(p))) throw std::invalid_argument("p must be prime");
    if (t % p == 0) throw std::invalid_argument("t must be prime to p");
    if (f.degree != p) throw std::invalid_argument("fibration degree must equal p");
    ReduceResult res{std::nullopt, k > 1,
                     MultisectionDescriptor::make(p, k > 1 ? 1 : p, TorsionStatus::torsion(p))};
    if (k == 1) res.alpha = static_cast<long>(mod_inverse(static_cast<std::int64_t>(t), static_cast<std::int64_t>(p)));
    return res;
}

/* Orders that have been ruled out for a multisection.  all = every order. */
struct ExclusionSet {
    bool all = false;
    std::set<long> orders;
};

/* Applies an exclusion certificate: excluding every order certifies
   non-torsion; finite exclusions stay undetermined but narrow the set.
   A descriptor already known torsion of an excluded order is contradictory. */
inline MultisectionDescriptor classify_nt(const MultisectionDescriptor& m, const ExclusionSet& excluded) {
    using Kind = TorsionStatus::Kind;
    if (m.torsion.kind == Kind::Torsion) {
        if (excluded.all || excluded.orders.count(m.torsion.order))
            throw std::invalid_argument("contradiction: descriptor is torsion of an excluded order");
        return m;
    }
    if (m.torsion.kind == Kind::NonTorsion) return m; // never downgraded
    MultisectionDescriptor out = m;
    if (excluded.all) {
        out.torsion = TorsionStatus::non_torsion();
    } else {
        std::set<long> merged = m.torsion.excluded;
        merged.insert(excluded.orders.begin(), excluded.orders.end());
        out.torsion = TorsionStatus::undetermined(std::move(merged));
    }
    return out;
}

/* Image of a multisection under the class map into the Jacobian,
   x -> [d_Z * x - trace of the correspondence through Z].  Non-torsion is
   preserved (the map is birational onto its image); a section maps to the
   zero-section class; no other numeric claim is made. */
inline MultisectionDescriptor tau_class(const MultisectionDescriptor& m, long z_degree) {
    if (z_degree < 1) throw std::invalid_argument("z_degree must be >= 1");
    MultisectionDescriptor image = m;
    // Ambient is the Jacobian (degree 1), so the degree constraint is void;
    // torsion status and genus ride along unchanged.
    return image;
}

// ---------------------------------------------------------------------------
// Pipeline verdict

struct VerdictStep {
    std::string operation;
    std::string rule;
    json result;

    json to_json() const { return json{{"operation", operation}, {"rule", rule}, {"result", result}}; }
};

struct NoRatVerdict {
    bool applicable = false;
    std::string reason;  // when not applicable
    long divided_degree = 0;
    long level = 0;
    std::optional<long> min_genus;
    bool holds = false;  // every torsion multisection of the divided fibration has genus >= 2
    std::vector<SweepOrbitRow> orbits;
    std::vector<VerdictStep> audit;
    std::vector<std::string> assumptions;

    json to_json() const {
        json j{{"applicable", applicable}};
        if (!applicable) {
            j["reason"] = reason;
            return j;
        }
        j["divided_degree"] = divided_degree;
        j["level"] = level;
        if (min_genus) j["min_genus"] = *min_genus;
        j["holds"] = holds;
        json orows = json::array();
        for (const auto& o : orbits) orows.push_back(o.to_json());
        j["orbits"] = orows;
        json steps = json::array();
        for (const auto& s : audit) steps.push_back(s.to_json());
        j["audit"] = steps;
        j["assumptions"] = assumptions;
        return j;
    }
};

/* Dividing the torsor class of F by a prime p beyond the sweep threshold p0
   produces a fibration of degree p*d whose torsion multisections all live on
   level-p orbit curves; when every such curve has genus >= 2, no torsion
   multisection is rational or elliptic. */
inline NoRatVerdict no_rat_verdict(const FibrationDescriptor& f, long p, long p0) {
    NoRatVerdict v;
    auto inapplicable = [&](std::string why) {
        v.applicable = false;
        v.reason = std::move(why);
        return v;
    };
    if (p < 2 || !is_prime(Int(p))) return inapplicable("p is not prime");
    if (p <= p0) return inapplicable("p does not exceed the sweep threshold p0");
    if (f.degree % p == 0) return inapplicable("p divides the fibration degree");
    if (f.isotrivial) return inapplicable("isotrivial fibration: monodromy arguments unavailable");
    if (!f.monodromy) return inapplicable("no monodromy data");
    if (!f.fiber_config) return inapplicable("no fiber configuration data");
    if (f.fiber_config->fibers.size() < 4)
        return inapplicable("fewer than 4 singular fibers");

    v.applicable = true;
    v.level = p;
    v.divided_degree = p * f.degree;
    v.audit.push_back({"class_order", "the order of the torsor class equals the fibration degree",
                       json{{"degree", f.degree}}});
    v.audit.push_back({"divide",
                       "dividing the torsor cocycle by p yields a fibration of degree p times the original",
                       json{{"divided_degree", v.divided_degree}}});
    v.audit.push_back({"transfer_order",
                       "an order-t torsion multisection transfers through the twist tower with order "
                       "t/gcd(t,m); orders prime to p survive, p-parts reduce",
                       json{{"p", p}}});
    v.audit.push_back({"reduce_to_p_torsion",
                       "a torsion multisection with order divisible by p surjects onto a p-torsion "
                       "multisection, so level-p orbit curves dominate every torsion multisection",
                       json{{"target_order", p}}});

    BranchData branch;
    branch.base_euler = 2;
    for (const auto& fib : f.fiber_config->fibers) branch.locals.push_back(fib.local_monodromy());

    SweepResult sweep = genus_sweep(*f.monodromy, branch, p, p);
    const SweepRow& row = sweep.rows.front();
    v.orbits = row.orbits;
    v.min_genus = row.min_genus;
    v.holds = row.all_defined && row.min_genus && *row.min_genus >= 2;
    v.audit.push_back({"genus_sweep",
                       "genus of each primitive level-p orbit curve from the branched-cover Euler "
                       "characteristic",
                       json{{"level", p},
                            {"min_genus", row.min_genus ? json(*row.min_genus) : json(nullptr)},
                            {"all_defined", row.all_defined}}});
    v.assumptions.push_back(
        "existence of rational multisections of degree divisible by the divided fibration degree is "
        "quoted from deformation theory, not computed here");
    return v;
}

} // namespace k3kit
