#pragma once

#include "k3kit/lattice.hpp"

#include <cmath>
#include <optional>
#include <set>

namespace k3kit {

enum class RepStatus { Witness, LocallyObstructed, UnknownWithinBound };

inline const char* rep_status_name(RepStatus s) {
    switch (s) {
        case RepStatus::Witness: return "witness";
        case RepStatus::LocallyObstructed: return "locally_obstructed";
        default: return "unknown_within_bound";
    }
}

/* A completion of the rationals: the real place or a finite prime. */
struct Place {
    bool at_infinity = false;
    Int prime = 0;

    json to_json() const {
        if (at_infinity) return json("real");
        return int_to_json(prime);
    }
};

struct RepresentationResult {
    RepStatus status;
    Int square;
    std::vector<Int> witness;          // primitive, only for Witness
    std::optional<Place> obstruction;  // only for LocallyObstructed
    long search_bound = 0;             // largest exhaustively searched box bound

    json to_json() const {
        json j{{"status", rep_status_name(status)},
               {"square", int_to_json(square)},
               {"search_bound", search_bound}};
        if (status == RepStatus::Witness) j["witness"] = vector_to_json(witness);
        if (obstruction) j["obstruction"] = obstruction->to_json();
        return j;
    }
};

// ---------------------------------------------------------------------------
// Local solubility of <v,v> = n over Z_p.
//
// Both routines are complete decision procedures.  Acceptance rests on
// multivariate Hensel lifting: if f(v) = Q(v) - n vanishes mod p^(2e+1)
// where e = v_p(2Gv), then v lifts to a Z_p solution.  Completeness rests
// on the depth bound E = v_p(2) + v_p(det G) + floor(v_p(n)/2): via the
// adjugate identity, any solution of bounded content has e <= E, so its
// reduction is accepted by level 2E+1.

namespace local {

using Matrix = std::vector<std::vector<Int>>;

inline bool is_square_mod(const Int& a, const Int& p) {
    Int r = ((a % p) + p) % p;
    if (r == 0) throw std::domain_error("is_square_mod needs a unit");
    return boost::multiprecision::powm(r, (p - 1) / 2, p) == 1;
}

inline int content_valuation(const Matrix& g, const Int& p) {
    int best = -1;
    for (const auto& row : g)
        for (const auto& x : row) {
            if (x == 0) continue;
            int v = padic_valuation(x, p);
            if (best < 0 || v < best) best = v;
            if (best == 0) return 0;
        }
    if (best < 0) throw std::domain_error("zero form");
    return best;
}

/* Integral congruence transform putting G in the shape
     [ A  C ]   with A diagonal mod p (unit entries, size m)
     [ C' B ]   and C = B = 0 mod p.
   p must be odd.  Returns the transformed matrix and m. */
inline std::pair<Matrix, int> unit_diagonalize(Matrix h, const Int& p) {
    int r = static_cast<int>(h.size());
    auto swap_rc = [&](int i, int j) {
        std::swap(h[i], h[j]);
        for (int k = 0; k < r; ++k) std::swap(h[k][i], h[k][j]);
    };
    auto add_rc = [&](int dst, int src, const Int& c) {
        for (int k = 0; k < r; ++k) h[dst][k] += c * h[src][k];
        for (int k = 0; k < r; ++k) h[k][dst] += c * h[k][src];
    };
    int m = 0;
    for (int i = 0; i < r; ++i) {
        int pivot = -1;
        for (int j = i; j < r; ++j)
            if (h[j][j] % p != 0) { pivot = j; break; }
        if (pivot < 0) {
            // Try to manufacture a unit diagonal entry from an off-diagonal one;
            // for odd p, adding row+column j to i makes the diagonal 2*h[i][j] mod p.
            bool made = false;
            for (int a = i; a < r && !made; ++a)
                for (int b = a + 1; b < r && !made; ++b)
                    if (h[a][b] % p != 0) {
                        add_rc(a, b, Int(1));
                        pivot = a;
                        made = true;
                    }
            if (!made) break; // remaining block vanishes mod p
        }
        swap_rc(i, pivot);
        Int inv = mod_inverse(((h[i][i] % p) + p) % p, p);
        for (int j = i + 1; j < r; ++j) {
            Int c = ((-(h[j][i] % p) * inv) % p + p) % p;
            if (c != 0) add_rc(j, i, c);
        }
        ++m;
    }
    return {std::move(h), m};
}

/* Does some x != 0 mod p satisfy sum d_i x_i^2 = n mod p?  (p odd, d_i units) */
inline bool smooth_exists(const std::vector<Int>& d, const Int& n, const Int& p) {
    int m = static_cast<int>(d.size());
    Int np = ((n % p) + p) % p;
    if (np != 0) {
        if (m >= 2) return true;
        if (m == 1) return is_square_mod(np * d[0], p);
        return false;
    }
    if (m >= 3) return true;
    if (m == 2) return is_square_mod(((-d[0] * d[1]) % p + p) % p, p);
    return false;
}

inline bool soluble_odd(Matrix g, Int n, const Int& p, int depth_left) {
    int r = static_cast<int>(g.size());
    int t = content_valuation(g, p);
    if (t > 0) {
        if (n != 0 && padic_valuation(n, p) < t) return false;
        Int pt = int_pow(p, t);
        for (auto& row : g)
            for (auto& x : row) x /= pt;
        if (n != 0) n /= pt;
    }
    if (depth_left <= 0) return false;
    auto [h, m] = unit_diagonalize(std::move(g), p);
    std::vector<Int> d(m);
    for (int i = 0; i < m; ++i) d[i] = h[i][i];
    if (smooth_exists(d, n, p)) return true;
    // Only classes with the unit-part coordinates divisible by p remain.
    // Substituting x = p x' and dividing the form by p gives the block
    // matrix [[p A, C], [C', B/p]] with target n/p.
    if (n != 0 && n % p != 0) return false;
    Matrix g2(r, std::vector<Int>(r));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            if (i < m && j < m) g2[i][j] = p * h[i][j];
            else if (i >= m && j >= m) g2[i][j] = h[i][j] / p;
            else g2[i][j] = h[i][j];
        }
    return soluble_odd(std::move(g2), n == 0 ? Int(0) : Int(n / p), p, depth_left - 1);
}

inline bool soluble_two(const Matrix& g, const Int& n) {
    int r = static_cast<int>(g.size());
    Int det = GramLattice(g).determinant();
    int e_cap = 1 + padic_valuation(det, 2) + (n == 0 ? 0 : padic_valuation(n, 2) / 2);
    int levels = 2 * e_cap + 1;

    auto quad = [&](const std::vector<Int>& v) {
        Int q = 0;
        for (int i = 0; i < r; ++i) {
            if (v[i] == 0) continue;
            for (int j = 0; j < r; ++j) q += v[i] * g[i][j] * v[j];
        }
        return q;
    };
    auto accepted = [&](const std::vector<Int>& v) {
        Int f = quad(v) - n;
        std::vector<Int> grad(r, Int(0));
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) grad[i] += 2 * g[i][j] * v[j];
        int e = -1;
        for (const auto& x : grad) {
            if (x == 0) continue;
            int vx = padic_valuation(x, 2);
            if (e < 0 || vx < e) e = vx;
        }
        if (e < 0) {
            // Vanishing gradient: only an exact nonzero solution certifies.
            bool zero = true;
            for (const auto& x : v) zero = zero && x == 0;
            return f == 0 && !zero;
        }
        if (f == 0) return true;
        return padic_valuation(f, 2) >= 2 * e + 1;
    };

    std::vector<std::vector<Int>> branches{std::vector<Int>(r, Int(0))};
    Int modulus = 1;
    for (int k = 1; k <= levels; ++k) {
        Int next_modulus = modulus * 2;
        std::vector<std::vector<Int>> next;
        for (const auto& base : branches) {
            // Extend each residue by one bit per coordinate.
            for (unsigned long long mask = 0; mask < (1ull << r); ++mask) {
                std::vector<Int> v = base;
                for (int i = 0; i < r; ++i)
                    if (mask & (1ull << i)) v[i] += modulus;
                if ((quad(v) - n) % next_modulus != 0) continue;
                if (accepted(v)) return true;
                next.push_back(std::move(v));
            }
        }
        if (next.size() > 2000000)
            throw std::runtime_error("2-adic solubility: branch budget exceeded");
        branches = std::move(next);
        if (branches.empty()) return false;
        modulus = next_modulus;
    }
    return false;
}

} // namespace local

inline bool locally_soluble(const GramLattice& L, const Int& n, const Int& p) {
    if (p == 2) return local::soluble_two(L.gram(), n);
    int vdet = padic_valuation(L.determinant(), p);
    int e_cap = vdet + (n == 0 ? 0 : padic_valuation(n, p) / 2);
    return local::soluble_odd(L.gram(), n, p, 2 * e_cap + 5);
}

/* Is <v,v> = n soluble with v != 0 over the reals? */
inline bool real_soluble(const GramLattice& L, const Int& n) {
    Signature s = L.signature();
    if (n > 0) return s.n_plus >= 1;
    if (n < 0) return s.n_minus >= 1;
    return s.n_plus >= 1 && s.n_minus >= 1;
}

// ---------------------------------------------------------------------------
// represents(): witness search, then local certificates

namespace detail {

inline std::vector<Int> canonical_sign(std::vector<Int> v) {
    for (const auto& x : v) {
        if (x == 0) continue;
        if (x < 0)
            for (auto& y : v) y = -y;
        break;
    }
    return v;
}

/* Sparse isotropic search: basis vectors of square zero, then rank-2
   coordinate sublattices whose binary form has square discriminant. */
inline std::optional<std::vector<Int>> algebraic_isotropic(const GramLattice& L) {
    int r = L.rank();
    for (int i = 0; i < r; ++i)
        if (L.entry(i, i) == 0) {
            std::vector<Int> v(r, Int(0));
            v[i] = 1;
            return v;
        }
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
            Int a = L.entry(i, i), b = L.entry(i, j), c = L.entry(j, j);
            Int disc = b * b - a * c, s;
            if (!is_perfect_square(disc, &s)) continue;
            Int x = s - b, y = a;
            Int g = gcd(x, y);
            if (g == 0) continue;
            std::vector<Int> v(r, Int(0));
            v[i] = x / g;
            v[j] = y / g;
            return canonical_sign(std::move(v));
        }
    return std::nullopt;
}

inline double box_size(int rank, long bound) {
    double side = 2.0 * static_cast<double>(bound) + 1.0;
    double total = 1.0;
    for (int i = 0; i < rank; ++i) {
        total *= side;
        if (total > 1e18) return total;
    }
    return total;
}

constexpr double kBoxNodeBudget = 2.5e8;

inline RepresentationResult rank_one_represents(const GramLattice& L, const Int& n) {
    RepresentationResult res;
    res.square = n;
    res.search_bound = 1;
    Int g = L.entry(0, 0);
    if (g == n) {
        res.status = RepStatus::Witness;
        res.witness = {Int(1)};
        return res;
    }
    if (!real_soluble(L, n)) {
        res.status = RepStatus::LocallyObstructed;
        res.obstruction = Place{true, 0};
        return res;
    }
    // g*x^2 = n over Z_p: v_p(n/g) must be even and nonnegative with square
    // unit part.  A non-square rational n/g always fails at one of its own
    // primes or at 2, so the scan below is complete.
    Rat k = Rat(n, g);
    std::set<Int> ps{Int(2)};
    for (const auto& p : prime_divisors(rat_num(k))) ps.insert(p);
    for (const auto& p : prime_divisors(rat_den(k))) ps.insert(p);
    for (const auto& p : ps) {
        Int num = rat_num(k), den = rat_den(k);
        int v = padic_valuation(num, p) - padic_valuation(den, p);
        bool ok;
        if (v < 0 || v % 2 != 0) {
            ok = false;
        } else {
            Int unit_num = num / int_pow(p, static_cast<unsigned>(padic_valuation(num, p)));
            Int unit_den = den / int_pow(p, static_cast<unsigned>(padic_valuation(den, p)));
            // A p-adic unit is a square iff it is a quadratic residue mod p
            // (p odd), or congruent to 1 mod 8 (p = 2).
            Int mod = (p == 2) ? Int(8) : p;
            Int u = (unit_num % mod + mod) % mod;
            u = (u * mod_inverse((unit_den % mod + mod) % mod, mod)) % mod;
            ok = (p == 2) ? (u == 1) : local::is_square_mod(u, p);
        }
        if (!ok) {
            res.status = RepStatus::LocallyObstructed;
            res.obstruction = Place{false, p};
            return res;
        }
    }
    res.status = RepStatus::UnknownWithinBound;
    return res;
}

} // namespace detail

/* Decides representation of the even number n by L within a box search of
   the given max-norm bound, returning a primitive witness, a certificate of
   local insolubility, or an inconclusive report.  For n = 0 on indefinite
   lattices of rank >= 5 an isotropic vector is guaranteed to exist, so the
   bound escalates until a witness appears. */
inline RepresentationResult represents(const GramLattice& L, const Int& n, long bound) {
    if (bound < 1) throw std::invalid_argument("bound must be >= 1");
    if (n % 2 != 0) throw std::invalid_argument("target square must be even");
    if (!L.is_nondegenerate()) throw std::invalid_argument("lattice must be nondegenerate");
    if (L.rank() == 1) return detail::rank_one_represents(L, n);

    RepresentationResult res;
    res.square = n;

    Signature sig = L.signature();
    bool indefinite = sig.n_plus >= 1 && sig.n_minus >= 1;

    if (n == 0) {
        if (auto v = detail::algebraic_isotropic(L)) {
            res.status = RepStatus::Witness;
            res.witness = *v;
            res.search_bound = bound;
            return res;
        }
    }

    bool escalate = (n == 0 && L.rank() >= 5 && indefinite);
    // Largest max-norm whose box fits the node budget.  Boxes nest, so a
    // search at the cap covers every smaller request; oversized requests are
    // clamped and search_bound reports what was actually scanned.
    double side_max = std::pow(detail::kBoxNodeBudget, 1.0 / L.rank());
    long cap = static_cast<long>((side_max - 1.0) / 2.0);
    long exhausted = 0;
    long b = escalate ? std::min(bound, std::max(cap, 1L)) : bound;
    for (int round = 0; round < 16; ++round) {
        long effective = std::min(b, cap);
        if (effective > exhausted) {
            if (auto v = find_square(L, n, effective, /*primitive_only=*/true)) {
                res.status = RepStatus::Witness;
                res.witness = *v;
                res.search_bound = effective;
                return res;
            }
            exhausted = effective;
        }
        if (!escalate || b >= cap) break;
        b *= 2;
    }
    res.search_bound = exhausted;

    if (!real_soluble(L, n)) {
        res.status = RepStatus::LocallyObstructed;
        res.obstruction = Place{true, 0};
        return res;
    }
    std::set<Int> ps{Int(2)};
    for (const auto& p : prime_divisors(L.determinant())) ps.insert(p);
    if (n != 0)
        for (const auto& p : prime_divisors(n)) ps.insert(p);
    for (const auto& p : ps) {
        if (!locally_soluble(L, n, p)) {
            res.status = RepStatus::LocallyObstructed;
            res.obstruction = Place{false, p};
            return res;
        }
    }
    res.status = RepStatus::UnknownWithinBound;
    return res;
}

} // namespace k3kit
