#pragma once

#include "k3kit/json_io.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace k3kit {

enum class KodairaType { In, II, III, IV, I0star, IVstar, IIIstar, IIstar, Instar };

/* Singular fiber of an elliptic surface, one of the Kodaira types.  The
   parameter n is meaningful for In and In* only (n >= 1; the n = 0 members
   are the smooth fiber and I0star respectively). */
struct FiberDescriptor {
    KodairaType type;
    long n = 0;

    static FiberDescriptor make(KodairaType t, long n = 0) {
        bool parametric = (t == KodairaType::In || t == KodairaType::Instar);
        if (parametric && n < 1) throw std::invalid_argument("parametric type needs n >= 1");
        if (!parametric && n != 0) throw std::invalid_argument("type carries no parameter");
        return FiberDescriptor{t, n};
    }

    long euler() const {
        switch (type) {
            case KodairaType::In: return n;
            case KodairaType::II: return 2;
            case KodairaType::III: return 3;
            case KodairaType::IV: return 4;
            case KodairaType::I0star: return 6;
            case KodairaType::Instar: return 6 + n;
            case KodairaType::IVstar: return 8;
            case KodairaType::IIIstar: return 9;
            default: return 10; // IIstar
        }
    }

    long components() const {
        switch (type) {
            case KodairaType::In: return n;
            case KodairaType::II: return 1;
            case KodairaType::III: return 2;
            case KodairaType::IV: return 3;
            case KodairaType::I0star: return 5;
            case KodairaType::Instar: return 5 + n;
            case KodairaType::IVstar: return 7;
            case KodairaType::IIIstar: return 8;
            default: return 9; // IIstar
        }
    }

    /* Contribution to the Picard rank from fiber components off the section. */
    long rank_r() const { return components() - 1; }

    bool is_multiplicative() const { return type == KodairaType::In; }

    /* Types that acquire multiplicative reduction on a base change. */
    bool potentially_multiplicative() const {
        return type == KodairaType::In || type == KodairaType::Instar;
    }

    /* SL2(Z) conjugacy representative of the local monodromy. */
    std::array<long, 4> local_monodromy() const {
        switch (type) {
            case KodairaType::In: return {1, n, 0, 1};
            case KodairaType::II: return {1, 1, -1, 0};
            case KodairaType::III: return {0, 1, -1, 0};
            case KodairaType::IV: return {0, 1, -1, -1};
            case KodairaType::I0star: return {-1, 0, 0, -1};
            case KodairaType::Instar: return {-1, -n, 0, -1};
            case KodairaType::IVstar: return {-1, -1, 1, 0};
            case KodairaType::IIIstar: return {0, -1, 1, 0};
            default: return {0, -1, 1, 1}; // IIstar
        }
    }

    /* Order of the local monodromy in SL2(Z); 0 means infinite. */
    long monodromy_order() const {
        switch (type) {
            case KodairaType::In: return 0;
            case KodairaType::II: return 6;
            case KodairaType::III: return 4;
            case KodairaType::IV: return 3;
            case KodairaType::I0star: return 2;
            case KodairaType::Instar: return 0;
            case KodairaType::IVstar: return 3;
            case KodairaType::IIIstar: return 4;
            default: return 6; // IIstar
        }
    }

    std::string name() const {
        switch (type) {
            case KodairaType::In: return "I_" + std::to_string(n);
            case KodairaType::II: return "II";
            case KodairaType::III: return "III";
            case KodairaType::IV: return "IV";
            case KodairaType::I0star: return "I0*";
            case KodairaType::Instar: return "I_" + std::to_string(n) + "*";
            case KodairaType::IVstar: return "IV*";
            case KodairaType::IIIstar: return "III*";
            default: return "II*";
        }
    }

    static FiberDescriptor parse(const std::string& s) {
        if (s == "II") return make(KodairaType::II);
        if (s == "III") return make(KodairaType::III);
        if (s == "IV") return make(KodairaType::IV);
        if (s == "I0*" || s == "I_0*") return make(KodairaType::I0star);
        if (s == "IV*") return make(KodairaType::IVstar);
        if (s == "III*") return make(KodairaType::IIIstar);
        if (s == "II*") return make(KodairaType::IIstar);
        if (s.rfind("I_", 0) == 0) {
            bool star = s.back() == '*';
            std::string num = s.substr(2, s.size() - 2 - (star ? 1 : 0));
            long n = std::stol(num);
            if (star) return n == 0 ? make(KodairaType::I0star) : make(KodairaType::Instar, n);
            return make(KodairaType::In, n);
        }
        throw std::invalid_argument("unknown fiber type: " + s);
    }

    json to_json() const {
        json j{{"type", name()},
               {"euler", euler()},
               {"components", components()},
               {"rank", rank_r()},
               {"potentially_multiplicative", potentially_multiplicative()}};
        auto t = local_monodromy();
        j["monodromy"] = json::array({json::array({t[0], t[1]}), json::array({t[2], t[3]})});
        long ord = monodromy_order();
        j["monodromy_order"] = ord == 0 ? json("infinite") : json(ord);
        return j;
    }

    /* Canonical enumeration key: descending Euler number, then type tag. */
    std::pair<long, int> sort_key() const { return {-euler(), static_cast<int>(type)}; }

    bool operator==(const FiberDescriptor& o) const { return type == o.type && n == o.n; }
};

/* The fixed additive types plus In / In* instances for 1 <= n <= max_n. */
inline std::vector<FiberDescriptor> fiber_table(long max_n = 1) {
    if (max_n < 0) throw std::invalid_argument("max_n must be nonnegative");
    std::vector<FiberDescriptor> out;
    for (long n = 1; n <= max_n; ++n) out.push_back(FiberDescriptor::make(KodairaType::In, n));
    for (KodairaType t : {KodairaType::II, KodairaType::III, KodairaType::IV, KodairaType::I0star})
        out.push_back(FiberDescriptor::make(t));
    for (long n = 1; n <= max_n; ++n) out.push_back(FiberDescriptor::make(KodairaType::Instar, n));
    for (KodairaType t : {KodairaType::IVstar, KodairaType::IIIstar, KodairaType::IIstar})
        out.push_back(FiberDescriptor::make(t));
    return out;
}

// ---------------------------------------------------------------------------
// Configurations

struct FiberConfiguration {
    std::vector<FiberDescriptor> fibers; // canonically sorted
    long total_euler = 0;
    long total_rank = 0;

    static FiberConfiguration of(std::vector<FiberDescriptor> fs) {
        FiberConfiguration c;
        c.fibers = std::move(fs);
        std::sort(c.fibers.begin(), c.fibers.end(),
                  [](const FiberDescriptor& a, const FiberDescriptor& b) {
                      return a.sort_key() < b.sort_key();
                  });
        for (const auto& f : c.fibers) {
            c.total_euler += f.euler();
            c.total_rank += f.rank_r();
        }
        return c;
    }

    json to_json() const {
        json fs = json::array();
        for (const auto& f : fibers) fs.push_back(json{{"type", f.name()}});
        return json{{"fibers", fs}, {"chi", total_euler}, {"rank", total_rank}};
    }

    static FiberConfiguration from_json(const json& j) {
        if (!j.contains("fibers") || !j.at("fibers").is_array())
            throw std::invalid_argument("configuration needs a \"fibers\" array");
        std::vector<FiberDescriptor> fs;
        for (const auto& f : j.at("fibers")) {
            if (f.is_string()) fs.push_back(FiberDescriptor::parse(f.get<std::string>()));
            else fs.push_back(FiberDescriptor::parse(f.at("type").get<std::string>()));
        }
        return of(std::move(fs));
    }

    bool operator==(const FiberConfiguration& o) const { return fibers == o.fibers; }
};

struct ConfigFilters {
    std::optional<long> min_potentially_multiplicative; // at least this many In / In*
    bool all_multiplicative = false;                    // every fiber of type In
    bool no_potentially_multiplicative = false;         // no In / In* at all
    std::optional<long> min_fibers;
    std::optional<long> max_fibers;

    bool accepts(const FiberConfiguration& c) const {
        long pot = 0, in_count = 0;
        for (const auto& f : c.fibers) {
            if (f.potentially_multiplicative()) ++pot;
            if (f.is_multiplicative()) ++in_count;
        }
        if (min_potentially_multiplicative && pot < *min_potentially_multiplicative) return false;
        if (all_multiplicative && in_count != static_cast<long>(c.fibers.size())) return false;
        if (no_potentially_multiplicative && pot > 0) return false;
        if (min_fibers && static_cast<long>(c.fibers.size()) < *min_fibers) return false;
        if (max_fibers && static_cast<long>(c.fibers.size()) > *max_fibers) return false;
        return true;
    }
};

/* Streams every multiset of fiber types with total Euler number total_chi
   and total rank contribution at most max_rank, in a fixed depth-first
   order (larger fibers first).  The callback returns false to stop. */
inline void enumerate_configurations(long total_chi, long max_rank, const ConfigFilters& filters,
                                     const std::function<bool(const FiberConfiguration&)>& cb) {
    if (total_chi < 1) throw std::invalid_argument("total_chi must be >= 1");
    if (max_rank < 0) throw std::invalid_argument("max_rank must be nonnegative");

    // Candidate kinds in canonical order.
    std::vector<FiberDescriptor> kinds;
    for (long chi = total_chi; chi >= 1; --chi) {
        std::vector<FiberDescriptor> at_chi;
        at_chi.push_back(FiberDescriptor::make(KodairaType::In, chi));
        switch (chi) {
            case 2: at_chi.push_back(FiberDescriptor::make(KodairaType::II)); break;
            case 3: at_chi.push_back(FiberDescriptor::make(KodairaType::III)); break;
            case 4: at_chi.push_back(FiberDescriptor::make(KodairaType::IV)); break;
            case 6: at_chi.push_back(FiberDescriptor::make(KodairaType::I0star)); break;
            case 8: at_chi.push_back(FiberDescriptor::make(KodairaType::IVstar)); break;
            case 9: at_chi.push_back(FiberDescriptor::make(KodairaType::IIIstar)); break;
            case 10: at_chi.push_back(FiberDescriptor::make(KodairaType::IIstar)); break;
            default: break;
        }
        if (chi >= 7) at_chi.push_back(FiberDescriptor::make(KodairaType::Instar, chi - 6));
        std::sort(at_chi.begin(), at_chi.end(), [](const FiberDescriptor& a, const FiberDescriptor& b) {
            return a.sort_key() < b.sort_key();
        });
        for (auto& k : at_chi) {
            if (filters.all_multiplicative && !k.is_multiplicative()) continue;
            if (filters.no_potentially_multiplicative && k.potentially_multiplicative()) continue;
            kinds.push_back(k);
        }
    }

    std::vector<FiberDescriptor> acc;
    bool stop = false;
    std::function<void(std::size_t, long, long)> rec = [&](std::size_t idx, long chi_left, long rank_left) {
        if (stop) return;
        if (chi_left == 0) {
            FiberConfiguration c = FiberConfiguration::of(acc);
            if (filters.accepts(c) && !cb(c)) stop = true;
            return;
        }
        if (idx == kinds.size()) return;
        const FiberDescriptor& k = kinds[idx];
        if (k.euler() <= chi_left && k.rank_r() <= rank_left) {
            acc.push_back(k);
            rec(idx, chi_left - k.euler(), rank_left - k.rank_r());
            acc.pop_back();
        }
        rec(idx + 1, chi_left, rank_left);
    };
    rec(0, total_chi, max_rank);
}

inline std::vector<FiberConfiguration> enumerate_configurations(long total_chi, long max_rank,
                                                                const ConfigFilters& filters = {}) {
    std::vector<FiberConfiguration> out;
    enumerate_configurations(total_chi, max_rank, filters,
                             [&](const FiberConfiguration& c) {
                                 out.push_back(c);
                                 return true;
                             });
    return out;
}

struct MinCountResult {
    long count = 0;
    FiberConfiguration witness; // first stream witness with minimal count
};

/* Least number of fibers over all admissible configurations; nullopt when
   the constraints are unsatisfiable. */
inline std::optional<MinCountResult> min_fiber_count(long total_chi, long max_rank,
                                                     const ConfigFilters& filters = {}) {
    std::optional<MinCountResult> best;
    enumerate_configurations(total_chi, max_rank, filters, [&](const FiberConfiguration& c) {
        long count = static_cast<long>(c.fibers.size());
        if (!best || count < best->count) best = MinCountResult{count, c};
        return true;
    });
    return best;
}

} // namespace k3kit
