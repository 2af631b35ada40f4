#pragma once

#include "k3kit/classifier.hpp"
#include "k3kit/torsor.hpp"
#include "k3kit/weierstrass.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace k3kit::cli {

/* Outcome of one invocation.  exit_code: 0 ok, 2 invalid input, 3 a bounded
   search came back inconclusive.  For streaming subcommands the lines go to
   the sink passed to run() (or pile up in ndjson when no sink is given) and
   payload carries a summary; otherwise payload is the whole answer. */
struct CommandResult {
    int exit_code = 0;
    json payload;
    std::vector<std::pair<std::string, std::string>> audit; // (operation, anchor)
    std::vector<std::string> ndjson;
    bool streaming = false; // NDJSON command: payload is a summary, not the answer
};

using LineSink = std::function<void(const std::string&)>;

namespace detail {

struct Args {
    std::map<std::string, std::string> values;
    std::set<std::string> flags;

    bool has(const std::string& key) const { return values.count(key) || flags.count(key); }

    const std::string& required(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) throw std::invalid_argument("missing required flag --" + key);
        return it->second;
    }

    std::string value_or(const std::string& key, std::string fallback) const {
        auto it = values.find(key);
        return it == values.end() ? std::move(fallback) : it->second;
    }

    long required_long(const std::string& key) const { return to_long(key, required(key)); }

    long long_or(const std::string& key, long fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : to_long(key, it->second);
    }

    std::optional<long> optional_long(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        return to_long(key, it->second);
    }

    static long to_long(const std::string& key, const std::string& text) {
        try {
            std::size_t used = 0;
            long v = std::stol(text, &used);
            if (used != text.size()) throw std::invalid_argument("trailing text");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("flag --" + key + " needs an integer, got \"" + text + "\"");
        }
    }
};

inline Args parse_flags(const std::vector<std::string>& args, std::size_t start,
                        const std::set<std::string>& value_keys,
                        const std::set<std::string>& bool_keys) {
    Args out;
    for (std::size_t i = start; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) != 0) throw std::invalid_argument("unexpected argument: " + a);
        std::string key = a.substr(2);
        if (bool_keys.count(key)) {
            out.flags.insert(key);
            continue;
        }
        if (!value_keys.count(key)) throw std::invalid_argument("unknown flag: " + a);
        if (i + 1 >= args.size()) throw std::invalid_argument("flag --" + key + " needs a value");
        out.values[key] = args[++i];
    }
    return out;
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
    }
}

inline std::pair<long, long> parse_point(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("point must be given as \"x,y\", got \"" + text + "\"");
    return {Args::to_long("point", text.substr(0, comma)),
            Args::to_long("point", text.substr(comma + 1))};
}

inline json signature_json(const Signature& s) {
    return json{{"plus", s.n_plus}, {"minus", s.n_minus}, {"zero", s.n_zero}};
}

inline json lattice_summary(const GramLattice& L) {
    return json{{"rank", L.rank()},
                {"determinant", int_to_json(L.determinant())},
                {"signature", signature_json(L.signature())},
                {"even", L.is_even()},
                {"nondegenerate", L.is_nondegenerate()},
                {"hyperbolic", L.is_hyperbolic()}};
}

inline ConfigFilters filters_from(const Args& a) {
    ConfigFilters f;
    f.min_potentially_multiplicative = a.optional_long("min-potentially-multiplicative");
    f.all_multiplicative = a.has("all-multiplicative");
    f.no_potentially_multiplicative = a.has("no-potentially-multiplicative");
    f.min_fibers = a.optional_long("min-fibers");
    f.max_fibers = a.optional_long("max-fibers");
    return f;
}

inline const std::vector<std::string>& usage_lines() {
    static const std::vector<std::string> lines{
        "k3kit <subcommand> [flags]",
        "",
        "lattice standard --name <H|E8|minusE8|K3>",
        "lattice analyze --gram FILE [--square N --bound B]",
        "monodromy image --group SPEC --level M",
        "monodromy orbit --group SPEC --level M --point X,Y",
        "monodromy genus --group SPEC --level M --fibers FILE [--point X,Y]",
        "monodromy sweep-m0 --group SPEC --fibers FILE --m-lo A --m-hi B",
        "monodromy bound --m M --index I",
        "fibers table [--max-n N]",
        "fibers enumerate --chi C --max-rank R [--limit L] [filter flags]",
        "fibers min-count --chi C --max-rank R [filter flags]",
        "  filter flags: --min-potentially-multiplicative K --all-multiplicative",
        "                --no-potentially-multiplicative --min-fibers A --max-fibers B",
        "weierstrass analyze --model FILE [--seed S]",
        "weierstrass jmap --model FILE",
        "weierstrass index-bound --model FILE [--claimed-index K]",
        "torsor order --degree D [--m M]",
        "torsor transfer --t T --m M",
        "torsor reduce --t T --p P --k K",
        "torsor verdict --fibration FILE --p P --p0 P0",
        "classify --gram FILE --search-bound B [--escalate]",
        "",
        "group SPEC: full | gamma(N) | gamma0(N) | gamma1(N)",
        "exit codes: 0 ok, 2 invalid input, 3 inconclusive within the bound",
    };
    return lines;
}

// --- per-subcommand handlers -----------------------------------------------

inline CommandResult lattice_cmd(const std::vector<std::string>& args) {
    CommandResult res;
    if (args.size() < 2) throw std::invalid_argument("lattice needs a verb: standard | analyze");
    const std::string& verb = args[1];
    if (verb == "standard") {
        Args a = parse_flags(args, 2, {"name"}, {});
        GramLattice L = standard_lattice(a.required("name"));
        json j = L.to_json();
        j["analysis"] = lattice_summary(L);
        res.payload = j;
        res.audit.push_back({"lattice.standard", "fixed Gram matrices of the named lattices"});
        return res;
    }
    if (verb == "analyze") {
        Args a = parse_flags(args, 2, {"gram", "square", "bound"}, {});
        GramLattice L = GramLattice::from_json(load_json(a.required("gram")));
        json j = lattice_summary(L);
        res.audit.push_back({"lattice.analyze",
                             "Bareiss determinant and rational congruence diagonalization"});
        if (a.has("square")) {
            Int n(a.required("square"));
            long bound = a.long_or("bound", 10);
            RepresentationResult r = represents(L, n, bound);
            j["representation"] = r.to_json();
            res.audit.push_back({"lattice.represents",
                                 "box search plus real and p-adic solubility certificates"});
            if (r.status == RepStatus::UnknownWithinBound) res.exit_code = 3;
        }
        res.payload = j;
        return res;
    }
    throw std::invalid_argument("unknown lattice verb: " + verb);
}

inline CommandResult monodromy_cmd(const std::vector<std::string>& args) {
    CommandResult res;
    if (args.size() < 2)
        throw std::invalid_argument("monodromy needs a verb: image | orbit | genus | sweep-m0 | bound");
    const std::string& verb = args[1];
    if (verb == "image") {
        Args a = parse_flags(args, 2, {"group", "level"}, {});
        GroupSpec spec = GroupSpec::parse(a.required("group"));
        FiniteMatrixGroup G = group_image(spec, a.required_long("level"));
        res.payload = G.to_json();
        res.audit.push_back({"monodromy.image",
                             "congruence conditions mod gcd(N, level) cut the image out of SL2(Z/level)"});
        return res;
    }
    if (verb == "orbit") {
        Args a = parse_flags(args, 2, {"group", "level", "point"}, {});
        GroupSpec spec = GroupSpec::parse(a.required("group"));
        long level = a.required_long("level");
        auto p = parse_point(a.required("point"));
        FiniteMatrixGroup G = group_image(spec, level);
        auto O = orbit(G, p);
        json pts = json::array();
        for (const auto& q : O) pts.push_back(json::array({q.first, q.second}));
        res.payload = json{{"level", level},
                           {"point", json::array({p.first, p.second})},
                           {"primitive", is_primitive_point(p, level)},
                           {"size", static_cast<long>(O.size())},
                           {"orbit", pts}};
        res.audit.push_back({"monodromy.orbit", "closure of the point under the column action"});
        return res;
    }
    if (verb == "genus") {
        Args a = parse_flags(args, 2, {"group", "level", "fibers", "point"}, {});
        GroupSpec spec = GroupSpec::parse(a.required("group"));
        long level = a.required_long("level");
        BranchData branch = BranchData::from_json(load_json(a.required("fibers")));
        auto p = parse_point(a.value_or("point", "0,1"));
        FiniteMatrixGroup G = group_image(spec, level);
        EulerResult eu = multisection_euler(G, p, branch);
        res.payload = eu.to_json();
        res.audit.push_back({"monodromy.genus",
                             "chi = degree * chi(base) - cycle deficiencies of the branch elements"});
        return res;
    }
    if (verb == "sweep-m0") {
        Args a = parse_flags(args, 2, {"group", "fibers", "m-lo", "m-hi"}, {});
        GroupSpec spec = GroupSpec::parse(a.required("group"));
        BranchData branch = BranchData::from_json(load_json(a.required("fibers")));
        SweepResult sweep = genus_sweep(spec, branch, a.required_long("m-lo"), a.required_long("m-hi"));
        res.payload = sweep.to_json();
        res.audit.push_back({"monodromy.sweep",
                             "per-level orbit split; m0 is the last level without a genus >= 2 certificate"});
        return res;
    }
    if (verb == "bound") {
        Args a = parse_flags(args, 2, {"m", "index"}, {});
        long m = a.required_long("m");
        Int index(a.required("index"));
        DegreeBound b = degree_lower_bound(m, index);
        json j = b.to_json();
        j["m"] = m;
        j["index"] = int_to_json(index);
        res.payload = j;
        res.audit.push_back({"monodromy.bound", "smallest primitive orbit size divided by the index"});
        return res;
    }
    throw std::invalid_argument("unknown monodromy verb: " + verb);
}

inline CommandResult fibers_cmd(const std::vector<std::string>& args, const LineSink& sink) {
    CommandResult res;
    if (args.size() < 2)
        throw std::invalid_argument("fibers needs a verb: table | enumerate | min-count");
    const std::string& verb = args[1];
    if (verb == "table") {
        Args a = parse_flags(args, 2, {"max-n"}, {});
        json rows = json::array();
        for (const auto& f : fiber_table(a.long_or("max-n", 1))) rows.push_back(f.to_json());
        res.payload = json{{"table", rows}};
        res.audit.push_back({"fibers.table",
                             "Euler numbers, component counts, and local monodromies by type"});
        return res;
    }
    std::set<std::string> filter_values{"chi", "max-rank", "min-potentially-multiplicative",
                                        "min-fibers", "max-fibers"};
    std::set<std::string> filter_flags{"all-multiplicative", "no-potentially-multiplicative"};
    if (verb == "enumerate") {
        auto values = filter_values;
        values.insert("limit");
        Args a = parse_flags(args, 2, values, filter_flags);
        long limit = a.long_or("limit", 1000000);
        if (limit < 1) throw std::invalid_argument("limit must be >= 1");
        long emitted = 0;
        bool truncated = false;
        enumerate_configurations(a.required_long("chi"), a.required_long("max-rank"), filters_from(a),
                                 [&](const FiberConfiguration& c) {
                                     if (emitted == limit) {
                                         truncated = true;
                                         return false;
                                     }
                                     std::string line = c.to_json().dump();
                                     if (sink)
                                         sink(line);
                                     else
                                         res.ndjson.push_back(std::move(line));
                                     ++emitted;
                                     return true;
                                 });
        res.payload = json{{"count", emitted}, {"truncated", truncated}};
        res.streaming = true;
        res.audit.push_back({"fibers.enumerate", "depth-first multiset stream in canonical order"});
        return res;
    }
    if (verb == "min-count") {
        Args a = parse_flags(args, 2, filter_values, filter_flags);
        auto best = min_fiber_count(a.required_long("chi"), a.required_long("max-rank"), filters_from(a));
        if (best)
            res.payload = json{{"min", best->count}, {"witness", best->witness.to_json()}};
        else
            res.payload = json{{"min", nullptr}, {"witness", nullptr}};
        res.audit.push_back({"fibers.min_count", "exhaustive scan of admissible configurations"});
        return res;
    }
    throw std::invalid_argument("unknown fibers verb: " + verb);
}

inline CommandResult weierstrass_cmd(const std::vector<std::string>& args) {
    CommandResult res;
    if (args.size() < 2)
        throw std::invalid_argument("weierstrass needs a verb: analyze | jmap | index-bound");
    const std::string& verb = args[1];
    if (verb == "analyze") {
        Args a = parse_flags(args, 2, {"model", "seed"}, {});
        WeierstrassModel w = WeierstrassModel::from_json(load_json(a.required("model")));
        unsigned long long seed = static_cast<unsigned long long>(a.long_or("seed", 0));
        res.payload = analyze_places(w, seed).to_json();
        res.audit.push_back({"weierstrass.analyze",
                             "discriminant factorization, then reduction and the valuation table per place"});
        return res;
    }
    if (verb == "jmap") {
        Args a = parse_flags(args, 2, {"model"}, {});
        WeierstrassModel w = WeierstrassModel::from_json(load_json(a.required("model")));
        res.payload = j_map(w).to_json();
        res.audit.push_back({"weierstrass.jmap", "j = 4p^3 / (4p^3 + 27q^2) in lowest terms"});
        return res;
    }
    if (verb == "index-bound") {
        Args a = parse_flags(args, 2, {"model", "claimed-index"}, {});
        WeierstrassModel w = WeierstrassModel::from_json(load_json(a.required("model")));
        std::optional<Int> claimed;
        if (a.has("claimed-index")) claimed = Int(a.required("claimed-index"));
        res.payload = index_bound(w, claimed).to_json();
        res.audit.push_back({"weierstrass.index_bound",
                             "a multisection index divides 2 deg j and 24 r"});
        return res;
    }
    throw std::invalid_argument("unknown weierstrass verb: " + verb);
}

inline CommandResult torsor_cmd(const std::vector<std::string>& args) {
    CommandResult res;
    if (args.size() < 2)
        throw std::invalid_argument("torsor needs a verb: order | transfer | reduce | verdict");
    const std::string& verb = args[1];
    if (verb == "order") {
        Args a = parse_flags(args, 2, {"degree", "m"}, {});
        long degree = a.required_long("degree");
        FibrationDescriptor f = FibrationDescriptor::make(degree, degree == 1);
        json j{{"degree", degree}, {"class_order", class_order(f)}};
        if (a.has("m")) j["jm_class"] = jm_class(a.required_long("m"), f);
        res.payload = j;
        res.audit.push_back({"torsor.order", "the torsor class generates a cyclic group of order degree"});
        return res;
    }
    if (verb == "transfer") {
        Args a = parse_flags(args, 2, {"t", "m"}, {});
        long t = a.required_long("t"), m = a.required_long("m");
        res.payload = json{{"t", t}, {"m", m}, {"transfer_order", transfer_order(t, m)}};
        res.audit.push_back({"torsor.transfer", "an order-t multisection maps to order t/gcd(t,m)"});
        return res;
    }
    if (verb == "reduce") {
        Args a = parse_flags(args, 2, {"t", "p", "k"}, {});
        long t = a.required_long("t"), p = a.required_long("p"), k = a.required_long("k");
        FibrationDescriptor f = FibrationDescriptor::make(p, false);
        res.payload = reduce_to_p_torsion(t, p, k, f).to_json();
        res.audit.push_back({"torsor.reduce",
                             "scale by the inverse of t mod p (k = 1) or pass to the Jacobian (k > 1)"});
        return res;
    }
    if (verb == "verdict") {
        Args a = parse_flags(args, 2, {"fibration", "p", "p0"}, {});
        FibrationDescriptor f = FibrationDescriptor::from_json(load_json(a.required("fibration")));
        NoRatVerdict v = no_rat_verdict(f, a.required_long("p"), a.required_long("p0"));
        res.payload = v.to_json();
        res.audit.push_back({"torsor.verdict",
                             "genus growth of level-p orbit curves rules out torsion multisections"});
        return res;
    }
    throw std::invalid_argument("unknown torsor verb: " + verb);
}

inline CommandResult classify_cmd(const std::vector<std::string>& args) {
    CommandResult res;
    Args a = parse_flags(args, 1, {"gram", "search-bound"}, {"escalate"});
    GramLattice L = GramLattice::from_json(load_json(a.required("gram")));
    long bound = a.long_or("search-bound", 25);
    DensityVerdict v =
        a.has("escalate") ? classify_with_escalation(L, bound) : classify(L, bound);
    json j = v.to_json();
    j["explanation"] = explain(v);
    res.payload = j;
    res.audit.push_back({"classify", v.rule_id.empty() ? std::string("none") : v.rule_id});
    if (v.unknown_within_bound) res.exit_code = 3;
    return res;
}

} // namespace detail

/* Dispatches one invocation.  Streaming output goes through sink line by
   line when one is supplied; with no sink the lines collect in the result.
   Domain and input errors come back as exit 2 with {"error": ...}. */
inline CommandResult run(const std::vector<std::string>& args, const LineSink& sink = {}) {
    CommandResult res;
    try {
        if (args.empty()) throw std::invalid_argument("missing subcommand (try: k3kit help)");
        const std::string& cmd = args[0];
        if (cmd == "help" || cmd == "--help") {
            res.payload = json{{"usage", detail::usage_lines()}};
            return res;
        }
        if (cmd == "lattice") return detail::lattice_cmd(args);
        if (cmd == "monodromy") return detail::monodromy_cmd(args);
        if (cmd == "fibers") return detail::fibers_cmd(args, sink);
        if (cmd == "weierstrass") return detail::weierstrass_cmd(args);
        if (cmd == "torsor") return detail::torsor_cmd(args);
        if (cmd == "classify") return detail::classify_cmd(args);
        throw std::invalid_argument("unknown subcommand: " + cmd);
    } catch (const json::exception& e) {
        res = CommandResult{};
        res.exit_code = 2;
        res.payload = json{{"error", std::string("malformed JSON: ") + e.what()}};
    } catch (const std::invalid_argument& e) {
        res = CommandResult{};
        res.exit_code = 2;
        res.payload = json{{"error", e.what()}};
    } catch (const std::domain_error& e) {
        res = CommandResult{};
        res.exit_code = 2;
        res.payload = json{{"error", e.what()}};
    } catch (const std::out_of_range& e) {
        res = CommandResult{};
        res.exit_code = 2;
        res.payload = json{{"error", std::string("out of range: ") + e.what()}};
    } catch (const std::runtime_error& e) {
        // boost::multiprecision signals unparsable integer text this way
        res = CommandResult{};
        res.exit_code = 2;
        res.payload = json{{"error", e.what()}};
    }
    return res;
}

} // namespace k3kit::cli
