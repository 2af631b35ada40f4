// Acceptance gate: ten independently checkable criteria, one line each.
// Exits nonzero when any criterion fails.

#include "k3kit/classifier.hpp"
#include "k3kit/torsor.hpp"
#include "k3kit/weierstrass.hpp"

#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace k3kit;

namespace {

json load_fixture(const char* name) {
    std::ifstream in(std::string(K3KIT_TEST_DATA) + "/" + name);
    if (!in.good()) throw std::runtime_error(std::string("missing fixture ") + name);
    return json::parse(in);
}

QPoly qp(std::initializer_list<long> coeffs) {
    QPoly f;
    for (long c : coeffs) f.push_back(Rat(c));
    poly::normalize(f);
    return f;
}

// Deterministic uniform draw; uniform_int_distribution varies across
// standard libraries, so use the raw engine output.
long draw(std::mt19937_64& rng, long lo, long hi) {
    return lo + static_cast<long>(rng() % static_cast<unsigned long long>(hi - lo + 1));
}

std::vector<long> distinct_primes(long n) {
    std::vector<long> ps;
    for (long p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
    if (n > 1) ps.push_back(n);
    return ps;
}

Int gamma0_index(long n) {
    Int idx = n;
    for (long p : distinct_primes(n)) idx = idx / p * (p + 1);
    return idx;
}

Int gamma1_index(long n) {
    Int idx = Int(n) * n;
    for (long p : distinct_primes(n)) idx = idx / (p * p) * (p * p - 1);
    return idx;
}

Int gamma_index(long n) {
    Int idx = Int(n) * n * n;
    for (long p : distinct_primes(n)) idx = idx / (p * p) * (p * p - 1);
    return idx;
}

bool fail(std::string& why, const std::string& msg) {
    if (why.empty()) why = msg;
    return false;
}

// --- criterion 1 ------------------------------------------------------------
// Brute-force group order and the orbit of (1,0), without closure or BFS.

bool crit_brute_orders(std::string& why) {
    for (long m = 2; m <= 30; ++m) {
        long count = 0;
        std::vector<char> hit(static_cast<std::size_t>(m) * m, 0);
        for (long a = 0; a < m; ++a)
            for (long b = 0; b < m; ++b)
                for (long c = 0; c < m; ++c)
                    for (long d = 0; d < m; ++d)
                        if (((a * d - b * c) % m + m) % m == 1) {
                            ++count;
                            hit[static_cast<std::size_t>(a) * m + c] = 1; // image of (1,0)
                        }
        if (sl2_order(m) != count)
            return fail(why, "group order mismatch at level " + std::to_string(m));
        long reached = 0;
        for (char h : hit) reached += h;
        if (primitive_orbit_size_full(m) != reached)
            return fail(why, "orbit size mismatch at level " + std::to_string(m));
        auto G = group_image(GroupSpec::parse("full"), m);
        if (static_cast<long>(G.size()) != count ||
            static_cast<long>(orbit(G, {1, 0}).size()) != reached)
            return fail(why, "library disagrees with brute force at level " + std::to_string(m));
    }
    return true;
}

// --- criterion 2 ------------------------------------------------------------
// Indices of the congruence images against the classical closed forms.

bool crit_indices(std::string& why) {
    for (long n = 2; n <= 12; ++n) {
        std::string ns = std::to_string(n);
        if (group_image(GroupSpec::parse("gamma0(" + ns + ")"), n).index_in_full() !=
            gamma0_index(n))
            return fail(why, "gamma0(" + ns + ")");
        if (group_image(GroupSpec::parse("gamma1(" + ns + ")"), n).index_in_full() !=
            gamma1_index(n))
            return fail(why, "gamma1(" + ns + ")");
        if (group_image(GroupSpec::parse("gamma(" + ns + ")"), n).index_in_full() !=
            gamma_index(n))
            return fail(why, "gamma(" + ns + ")");
        if (group_image(GroupSpec::parse("full"), n).index_in_full() != 1)
            return fail(why, "full at level " + ns);
    }
    return true;
}

// --- criterion 3 ------------------------------------------------------------
// Every primitive orbit at every level beats 0.607927 * m^2 / index, exactly.

bool crit_orbit_bound(std::string& why) {
    struct Spec {
        GroupSpec spec;
        Int index;
    };
    std::vector<Spec> specs{{GroupSpec::parse("full"), Int(1)}};
    for (long n = 2; n <= 8; ++n) {
        specs.push_back({GroupSpec::parse("gamma0(" + std::to_string(n) + ")"), gamma0_index(n)});
        specs.push_back({GroupSpec::parse("gamma(" + std::to_string(n) + ")"), gamma_index(n)});
    }
    const Rat c(607927, 1000000);
    for (const auto& s : specs) {
        for (long m = 2; m <= 20; ++m) {
            auto G = group_image(s.spec, m);
            Rat rhs = c * Rat(Int(m) * m, s.index);
            std::vector<char> claimed(static_cast<std::size_t>(m) * m, 0);
            for (long x = 0; x < m; ++x)
                for (long y = 0; y < m; ++y) {
                    if (claimed[static_cast<std::size_t>(x) * m + y]) continue;
                    if (std::gcd(std::gcd(x, y), m) != 1) continue;
                    auto O = orbit(G, {x, y});
                    for (const auto& q : O)
                        claimed[static_cast<std::size_t>(q.first) * m + q.second] = 1;
                    if (Rat(Int(O.size())) <= rhs)
                        return fail(why, s.spec.name() + " at level " + std::to_string(m) +
                                             ": orbit of size " + std::to_string(O.size()));
                }
        }
    }
    return true;
}

// --- criterion 4 ------------------------------------------------------------
// Euler characteristics against an independent permutation cycle count.

bool crit_euler(std::string& why) {
    auto full5 = group_image(GroupSpec::parse("full"), 5);
    BranchData none;
    auto unbranched = multisection_euler(full5, {0, 1}, none);
    if (unbranched.chi != 2 * unbranched.degree || unbranched.genus)
        return fail(why, "unbranched cover should have chi = 2d and no genus");

    // level 2, three primitive points, 24 nodal branch elements
    auto full2 = group_image(GroupSpec::parse("full"), 2);
    BranchData nodal = BranchData::from_json(load_fixture("nodal24.json"));
    auto eu = multisection_euler(full2, {1, 0}, nodal);

    // oracle: T fixes (1,0) and swaps the other two points; L fixes (0,1)
    long d = 3, cycles_t = 2, cycles_l = 2;
    long chi = 2 * d - 12 * (d - cycles_t) - 12 * (d - cycles_l);
    if (chi != -18) return fail(why, "oracle arithmetic");
    if (eu.chi != chi) return fail(why, "chi disagrees with the cycle oracle");
    if (!eu.genus || *eu.genus != (2 - chi) / 2 || *eu.genus != 10)
        return fail(why, "genus disagrees with the cycle oracle");
    return true;
}

// --- criterion 5 ------------------------------------------------------------
// Genus sweep at levels 2..20 against frozen values and a cycle oracle.

long cycles_on_primitive(long m, bool upper) {
    std::vector<char> seen(static_cast<std::size_t>(m) * m, 0);
    long cycles = 0;
    for (long x = 0; x < m; ++x)
        for (long y = 0; y < m; ++y) {
            if (std::gcd(std::gcd(x, y), m) != 1) continue;
            if (seen[static_cast<std::size_t>(x) * m + y]) continue;
            long cx = x, cy = y;
            while (!seen[static_cast<std::size_t>(cx) * m + cy]) {
                seen[static_cast<std::size_t>(cx) * m + cy] = 1;
                long nx = upper ? (cx + cy) % m : cx;
                long ny = upper ? cy : (cx + cy) % m;
                cx = nx;
                cy = ny;
            }
            ++cycles;
        }
    return cycles;
}

bool crit_sweep(std::string& why) {
    const long frozen_genus[] = {10,  41,   73,   169,  169,  385,  385,  601,  601, 1081,
                                 817, 1561, 1297, 1729, 1777, 2785, 1993, 3529, 2689};
    BranchData nodal = BranchData::from_json(load_fixture("nodal24.json"));
    auto sweep = genus_sweep(GroupSpec::parse("full"), nodal, 2, 20);
    if (sweep.m0 != 1) return fail(why, "m0 should be 1: genus >= 2 from level 2 on");
    if (sweep.rows.size() != 19) return fail(why, "row count");

    for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
        const auto& row = sweep.rows[i];
        long m = static_cast<long>(i) + 2;
        if (!row.all_defined || row.orbits.size() != 1)
            return fail(why, "level " + std::to_string(m) + ": expected one closed orbit");
        if (!row.min_genus || *row.min_genus != frozen_genus[i])
            return fail(why, "level " + std::to_string(m) + ": frozen genus");
        if (*row.min_genus < 2)
            return fail(why, "level " + std::to_string(m) + ": genus below 2");

        long d = static_cast<long>(primitive_orbit_size_full(m));
        long ct = cycles_on_primitive(m, true);
        long cl = cycles_on_primitive(m, false);
        long chi = 2 * d - 12 * (d - ct) - 12 * (d - cl);
        if (row.orbits[0].size != d || row.orbits[0].chi != chi)
            return fail(why, "level " + std::to_string(m) + ": cycle oracle");
    }
    return true;
}

// --- criterion 6 ------------------------------------------------------------
// Fiber configuration extremes at the K3 Euler number.

bool crit_configs(std::string& why) {
    auto tight = min_fiber_count(24, 17);
    if (!tight || tight->count != 4) return fail(why, "minimum at rank budget 17");
    if (tight->witness.total_euler != 24 || tight->witness.total_rank > 17)
        return fail(why, "witness at rank budget 17 is invalid");

    auto loose = min_fiber_count(24, 18);
    if (!loose || loose->count != 3) return fail(why, "minimum at rank budget 18");
    if (loose->witness.total_euler != 24 || loose->witness.total_rank > 18)
        return fail(why, "witness at rank budget 18 is invalid");

    ConfigFilters mult;
    mult.all_multiplicative = true;
    auto all_in = min_fiber_count(24, 18, mult);
    if (!all_in || all_in->count != 6) return fail(why, "all-multiplicative minimum");

    auto target = FiberConfiguration::of({FiberDescriptor::parse("II*"),
                                          FiberDescriptor::parse("II*"),
                                          FiberDescriptor::parse("IV")});
    bool found = false;
    enumerate_configurations(24, 18, {}, [&](const FiberConfiguration& c) {
        if (c == target) found = true;
        return !found;
    });
    if (!found) return fail(why, "II* + II* + IV not enumerated");
    return true;
}

// --- criterion 7 ------------------------------------------------------------
// Random K3-type Weierstrass families: weighted discriminant degree 24.

bool crit_models(std::string& why) {
    std::mt19937_64 rng(424242);
    int accepted = 0;
    while (accepted < 100) {
        QPoly p, q;
        long psz = draw(rng, 0, 8) + 1;
        long qsz = draw(rng, 0, 12) + 1;
        for (long i = 0; i < psz; ++i) p.push_back(Rat(draw(rng, -6, 6)));
        for (long i = 0; i < qsz; ++i) q.push_back(Rat(draw(rng, -6, 6)));
        WeierstrassModel w;
        try {
            w = WeierstrassModel::make(2, std::move(p), std::move(q));
        } catch (const std::invalid_argument&) {
            continue; // identically zero discriminant
        }
        auto rep = analyze_places(w);
        if (!rep.model_minimal) continue;
        if (rep.sum_v_delta != 24)
            return fail(why, "weighted discriminant degree " + std::to_string(rep.sum_v_delta));
        if (rep.sum_chi != 24)
            return fail(why, "weighted Euler sum " + std::to_string(rep.sum_chi));
        if (j_map(w).degree > 24) return fail(why, "j-map degree above 24");
        ++accepted;
    }

    auto iso = WeierstrassModel::from_json(load_fixture("model_isotrivial.json"));
    auto rep = analyze_places(iso);
    if (rep.places.size() != 1 || rep.places[0].place_degree != 12 ||
        !rep.places[0].kodaira || rep.places[0].kodaira->name() != "II" || rep.sum_chi != 24)
        return fail(why, "isotrivial fixture analysis");
    return true;
}

// --- criterion 8 ------------------------------------------------------------
// Type table relations, and chi = reduced v_delta at every assigned place.

bool crit_types(std::string& why) {
    for (const auto& f : fiber_table(24)) {
        long gap = f.euler() - f.rank_r();
        if (gap != (f.is_multiplicative() ? 1 : 2))
            return fail(why, "chi - r relation for " + f.name());
        auto t = f.local_monodromy();
        if (t[0] * t[3] - t[1] * t[2] != 1)
            return fail(why, "local monodromy determinant for " + f.name());
    }

    const WeierstrassModel models[] = {
        WeierstrassModel::make(1, qp({-3}), qp({0, 1})),
        WeierstrassModel::make(1, qp({0, 1}), qp({0, 1})),
        WeierstrassModel::make(1, qp({0, 1}), qp({0, 0, 1})),
        WeierstrassModel::make(1, qp({0, 0, 1}), qp({0, 0, 1})),
        WeierstrassModel::make(1, qp({0, 0, 1}), qp({0, 0, 0, 1})),
        WeierstrassModel::make(1, qp({0, 0, -3}), qp({0, 0, 0, 2, 1})),
        WeierstrassModel::make(1, qp({0, 1}), QPoly{}),
        WeierstrassModel::make(1, qp({0, 0, 0, 0, 1}), qp({0, 0, 0, 0, 0, 0, 1})),
    };
    for (const auto& w : models) {
        auto rep = analyze_places(w);
        if (rep.sum_v_delta != 12 * w.r) return fail(why, "weighted degree not 12r");
        for (const auto& a : rep.places) {
            if (!a.kodaira) continue;
            if (a.kodaira->euler() != a.red_v_delta)
                return fail(why, "chi != reduced v_delta at a " + a.kodaira->name() + " place");
        }
    }
    return true;
}

// --- criterion 9 ------------------------------------------------------------
// Order calculus identities over exhaustive small ranges.

bool crit_orders(std::string& why) {
    for (long d = 1; d <= 100; ++d) {
        auto f = FibrationDescriptor::make(d, d == 1);
        long oracle = 0;
        for (long k = 1; k <= d; ++k)
            if ((k * 1) % d == 0) {
                oracle = k;
                break;
            }
        if (class_order(f) != oracle) return fail(why, "class order at degree " + std::to_string(d));
    }

    for (long t = 1; t <= 60; ++t)
        for (long m = 1; m <= 60; ++m) {
            long r = transfer_order(t, m);
            if (t % r != 0) return fail(why, "transfer order does not divide t");
            if ((r == t) != (std::gcd(t, m) == 1))
                return fail(why, "transfer order misses the coprime case");
        }

    for (long p = 2; p <= 50; ++p) {
        if (!is_prime(Int(p))) continue;
        auto f = FibrationDescriptor::make(p, false);
        for (long t = 1; t < p; ++t) {
            auto res = reduce_to_p_torsion(t, p, 1, f);
            if (!res.alpha || (*res.alpha * t) % p != 1 || res.in_jacobian)
                return fail(why, "inverse multiplier at p = " + std::to_string(p));
        }
        auto deep = reduce_to_p_torsion(1, p, 2, f);
        if (!deep.in_jacobian || deep.alpha)
            return fail(why, "deep reduction should land in the Jacobian");
    }
    return true;
}

// --- criterion 10 -----------------------------------------------------------
// Density verdicts: fixtures with known rules, then 1000 random hyperbolic
// lattices of rank 5..8, which must all be decided by an isotropic witness.

bool crit_density(std::string& why) {
    GramLattice fixture(matrix_from_json(load_fixture("rank4.json").at("gram")));
    auto v4 = classify(fixture, 25);
    if (v4.status != DensityStatus::UnknownExceptionalCandidate || v4.rule_id != "R7")
        return fail(why, "rank-4 fixture rule");
    auto w = vector_from_json(v4.evidence[1].at("witness"));
    if (inner_product(fixture, w, w) != -2) return fail(why, "square of the rank-4 witness");
    if (v4.evidence[2].at("status") != "locally_obstructed")
        return fail(why, "rank-4 fixture should have an obstructed square-zero search");
    long p = v4.evidence[2].at("obstruction").get<long>();
    if (56 % p != 0) return fail(why, "obstruction prime should divide twice the determinant");

    if (classify(standard_lattice("K3"), 10).rule_id != "R2") return fail(why, "K3 lattice");
    if (classify(standard_lattice("H"), 10).rule_id != "R2") return fail(why, "hyperbolic plane");
    if (classify(GramLattice({{0, 1, 0}, {1, 0, 0}, {0, 0, -2}}), 10).rule_id != "R2")
        return fail(why, "H plus a (-2) vector");
    if (classify(GramLattice(std::vector<std::vector<Int>>{{2}}), 10).rule_id != "R1") return fail(why, "rank one");

    std::mt19937_64 rng(20240817);
    int accepted = 0;
    while (accepted < 1000) {
        int n = 5 + (accepted % 4);
        std::vector<std::vector<Int>> g(n, std::vector<Int>(n, Int(0)));
        for (int i = 0; i < n; ++i) g[i][i] = Int(i == 0 ? 2 : -2) * draw(rng, 1, 4);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                Int v = draw(rng, -2, 2);
                g[i][j] = v;
                g[j][i] = v;
            }
        GramLattice L(g);
        if (L.determinant() == 0 || !L.is_even() || !L.is_hyperbolic()) continue;
        auto v = classify_with_escalation(L, 10);
        if (v.status != DensityStatus::PotentiallyDense || v.rule_id != "R2")
            return fail(why, "random lattice " + std::to_string(accepted) + " not decided");
        auto witness = vector_from_json(v.evidence[1].at("witness"));
        if (inner_product(L, witness, witness) != 0 || !is_primitive(witness))
            return fail(why, "random lattice " + std::to_string(accepted) + " witness invalid");
        ++accepted;
    }
    return true;
}

struct Criterion {
    const char* what;
    bool (*check)(std::string&);
};

} // namespace

int main() {
    const Criterion criteria[] = {
        {"group orders and primitive orbits match brute-force enumeration", crit_brute_orders},
        {"congruence image indices match the classical closed forms", crit_indices},
        {"every primitive orbit exceeds the analytic degree bound", crit_orbit_bound},
        {"branched-cover Euler characteristics match a cycle-count oracle", crit_euler},
        {"genus sweep at levels 2..20 is frozen and certified", crit_sweep},
        {"least fiber counts and named configurations at Euler number 24", crit_configs},
        {"random Weierstrass families carry weighted discriminant degree 24", crit_models},
        {"fiber type relations and per-place assignments are consistent", crit_types},
        {"order calculus identities hold on exhaustive small ranges", crit_orders},
        {"density verdicts on fixtures and 1000 random hyperbolic lattices", crit_density},
    };

    int failed = 0;
    for (std::size_t i = 0; i < std::size(criteria); ++i) {
        bool ok = false;
        std::string why;
        try {
            ok = criteria[i].check(why);
        } catch (const std::exception& e) {
            why = e.what();
        }
        std::cout << "criterion " << (i + 1) << ": " << (ok ? "PASS" : "FAIL") << " - "
                  << criteria[i].what;
        if (!ok && !why.empty()) std::cout << " (" << why << ")";
        std::cout << std::endl;
        if (!ok) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
