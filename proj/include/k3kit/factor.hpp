#pragma once

#include "k3kit/poly.hpp"

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

namespace k3kit {
namespace factor {

namespace detail {

/* Polynomials over F_p for a small odd prime p, lowest coefficient first. */
using PPoly = std::vector<long long>;

inline void ptrim(PPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

inline PPoly pmod_of(const ZPoly& f, long long p) {
    PPoly r(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) r[i] = static_cast<long long>(mod_norm(f[i], Int(p)));
    ptrim(r);
    return r;
}

inline PPoly pmul(const PPoly& a, const PPoly& b, long long p) {
    if (a.empty() || b.empty()) return {};
    PPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = (r[i + j] + mod_mul(a[i], b[j], p)) % p;
    }
    ptrim(r);
    return r;
}

inline PPoly pmonic(PPoly f, long long p) {
    ptrim(f);
    if (f.empty() || f.back() == 1) return f;
    long long inv = mod_inverse(f.back(), p);
    for (auto& c : f) c = mod_mul(c, inv, p);
    return f;
}

inline std::pair<PPoly, PPoly> pdivmod(const PPoly& a, const PPoly& b, long long p) {
    if (b.empty()) throw std::domain_error("polynomial division by zero");
    PPoly q, r = a;
    ptrim(r);
    if (r.size() < b.size()) return {q, r};
    long long inv = mod_inverse(b.back(), p);
    q.assign(r.size() - b.size() + 1, 0);
    for (int i = static_cast<int>(r.size()) - 1; i >= static_cast<int>(b.size()) - 1; --i) {
        if (static_cast<std::size_t>(i) >= r.size() || r[i] == 0) continue;
        long long c = mod_mul(r[i], inv, p);
        q[i - (b.size() - 1)] = c;
        for (std::size_t j = 0; j < b.size(); ++j) {
            auto idx = i - (b.size() - 1) + j;
            r[idx] = ((r[idx] - mod_mul(c, b[j], p)) % p + p) % p;
        }
    }
    ptrim(q);
    ptrim(r);
    return {q, r};
}

inline PPoly pgcd(PPoly a, PPoly b, long long p) {
    ptrim(a);
    ptrim(b);
    while (!b.empty()) {
        PPoly r = pdivmod(a, b, p).second;
        a = std::move(b);
        b = std::move(r);
    }
    return pmonic(std::move(a), p);
}

/* Extended Euclid: returns (g, s, t) monic with s*a + t*b = g. */
inline std::array<PPoly, 3> pxgcd(PPoly a, PPoly b, long long p) {
    PPoly s0{1}, s1, t0, t1{1};
    while (!b.empty()) {
        auto [q, r] = pdivmod(a, b, p);
        a = std::move(b);
        b = std::move(r);
        PPoly qs = pmul(q, s1, p), qt = pmul(q, t1, p);
        PPoly s2(std::max(s0.size(), qs.size()), 0), t2(std::max(t0.size(), qt.size()), 0);
        for (std::size_t i = 0; i < s0.size(); ++i) s2[i] = s0[i];
        for (std::size_t i = 0; i < qs.size(); ++i) s2[i] = ((s2[i] - qs[i]) % p + p) % p;
        for (std::size_t i = 0; i < t0.size(); ++i) t2[i] = t0[i];
        for (std::size_t i = 0; i < qt.size(); ++i) t2[i] = ((t2[i] - qt[i]) % p + p) % p;
        ptrim(s2);
        ptrim(t2);
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (a.empty()) throw std::domain_error("xgcd of zero polynomials");
    long long inv = mod_inverse(a.back(), p);
    auto scale = [&](PPoly f) {
        for (auto& c : f) c = mod_mul(c, inv, p);
        return f;
    };
    return {scale(a), scale(s0), scale(t0)};
}

inline PPoly pderivative(const PPoly& f, long long p) {
    if (f.size() <= 1) return {};
    PPoly r(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i) r[i - 1] = mod_mul(f[i], static_cast<long long>(i % p), p);
    ptrim(r);
    return r;
}

inline PPoly ppowmod(PPoly base, Int e, const PPoly& mod, long long p) {
    PPoly result{1};
    base = pdivmod(base, mod, p).second;
    while (e > 0) {
        if ((e & 1) != 0) result = pdivmod(pmul(result, base, p), mod, p).second;
        base = pdivmod(pmul(base, base, p), mod, p).second;
        e >>= 1;
    }
    return result;
}

/* Distinct-degree phase: splits monic squarefree f into products of the
   irreducible factors of each degree d. */
inline std::vector<std::pair<PPoly, int>> ddf(PPoly f, long long p) {
    std::vector<std::pair<PPoly, int>> out;
    PPoly x{0, 1};
    PPoly h = x;
    int d = 0;
    while (static_cast<int>(f.size()) - 1 >= 2 * (d + 1)) {
        ++d;
        h = ppowmod(h, Int(p), f, p);
        PPoly hx = h;
        if (hx.size() < 2) hx.resize(2, 0);
        hx[1] = ((hx[1] - 1) % p + p) % p;
        ptrim(hx);
        PPoly g = pgcd(hx, f, p);
        if (!g.empty() && g.size() > 1) {
            out.emplace_back(g, d);
            f = pdivmod(f, g, p).first;
            h = pdivmod(h, f, p).second;
        }
    }
    if (f.size() > 1) out.emplace_back(f, static_cast<int>(f.size()) - 1);
    return out;
}

/* Cantor-Zassenhaus equal-degree splitting of a product of irreducibles of
   degree d.  Splitting polynomials come from a caller-seeded generator. */
inline void edf(const PPoly& f, int d, long long p, std::mt19937_64& rng, std::vector<PPoly>& out) {
    int n = static_cast<int>(f.size()) - 1;
    if (n == d) {
        out.push_back(f);
        return;
    }
    Int e = (int_pow(Int(p), static_cast<unsigned>(d)) - 1) / 2;
    std::uniform_int_distribution<long long> coef(0, p - 1);
    for (;;) {
        PPoly a(2 * d, 0);
        for (auto& c : a) c = coef(rng);
        ptrim(a);
        if (a.size() <= 1) continue;
        PPoly b = ppowmod(a, e, f, p);
        if (b.empty()) continue;
        b[0] = ((b[0] - 1) % p + p) % p;
        ptrim(b);
        PPoly g = pgcd(b, f, p);
        if (g.size() > 1 && g.size() < f.size()) {
            edf(g, d, p, rng, out);
            edf(pdivmod(f, g, p).first, d, p, rng, out);
            return;
        }
    }
}

inline std::vector<PPoly> factor_mod_p(const PPoly& f, long long p, std::mt19937_64& rng) {
    std::vector<PPoly> out;
    for (auto& [g, d] : ddf(f, p)) edf(g, d, p, rng, out);
    std::sort(out.begin(), out.end());
    return out;
}

// --- Hensel lifting ---------------------------------------------------------

/* Integer polynomials with coefficients reduced into [0, m). */
inline ZPoly zreduce(ZPoly f, const Int& m) {
    for (auto& c : f) c = mod_norm(c, m);
    poly::normalize(f);
    return f;
}

inline ZPoly zmul_mod(const ZPoly& a, const ZPoly& b, const Int& m) {
    return zreduce(poly::mul(a, b), m);
}

inline ZPoly zadd_mod(const ZPoly& a, const ZPoly& b, const Int& m) {
    ZPoly r(std::max(a.size(), b.size()), Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return zreduce(std::move(r), m);
}

inline ZPoly zsub_mod(const ZPoly& a, const ZPoly& b, const Int& m) {
    ZPoly r(std::max(a.size(), b.size()), Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return zreduce(std::move(r), m);
}

/* Division by a monic polynomial, coefficients mod m. */
inline std::pair<ZPoly, ZPoly> zdivmod_monic(const ZPoly& a, const ZPoly& b, const Int& m) {
    if (b.empty() || b.back() != 1) throw std::domain_error("divisor must be monic");
    ZPoly q, r = a;
    poly::normalize(r);
    if (r.size() < b.size()) return {q, zreduce(std::move(r), m)};
    q.assign(r.size() - b.size() + 1, Int(0));
    for (int i = static_cast<int>(r.size()) - 1; i >= static_cast<int>(b.size()) - 1; --i) {
        if (static_cast<std::size_t>(i) >= r.size()) continue;
        Int c = mod_norm(r[i], m);
        if (c == 0) continue;
        q[i - (b.size() - 1)] = c;
        for (std::size_t j = 0; j < b.size(); ++j) {
            auto idx = i - (b.size() - 1) + j;
            r[idx] -= c * b[j];
        }
    }
    return {zreduce(std::move(q), m), zreduce(std::move(r), m)};
}

inline ZPoly lift_of(const PPoly& f) {
    ZPoly r(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i];
    return r;
}

/* One quadratic Hensel step: from f = g*h and s*g + t*h = 1 (mod m) to the
   same congruences mod m^2, with f, g, h monic. */
struct HenselPair {
    ZPoly g, h, s, t;
};

inline HenselPair hensel_step(const ZPoly& f, const HenselPair& in, const Int& m) {
    Int m2 = m * m;
    ZPoly e = zsub_mod(f, poly::mul(in.g, in.h), m2);
    auto [q, r] = zdivmod_monic(zmul_mod(in.s, e, m2), in.h, m2);
    ZPoly g1 = zadd_mod(in.g, zadd_mod(zmul_mod(in.t, e, m2), zmul_mod(q, in.g, m2), m2), m2);
    ZPoly h1 = zadd_mod(in.h, r, m2);
    ZPoly b = zsub_mod(zadd_mod(zmul_mod(in.s, g1, m2), zmul_mod(in.t, h1, m2), m2), ZPoly{Int(1)}, m2);
    auto [c, d] = zdivmod_monic(zmul_mod(in.s, b, m2), h1, m2);
    ZPoly s1 = zsub_mod(in.s, d, m2);
    ZPoly t1 = zsub_mod(in.t, zadd_mod(zmul_mod(in.t, b, m2), zmul_mod(c, g1, m2), m2), m2);
    return {g1, h1, s1, t1};
}

/* Lifts the factorization f = prod(parts) from mod p to mod p^(2^j) >= target
   by a balanced split, f and every part monic.  Returns lifted parts and the
   final modulus. */
inline void hensel_tree(const ZPoly& f, const std::vector<PPoly>& parts, std::size_t lo, std::size_t hi,
                        long long p, const Int& target, std::vector<ZPoly>& out) {
    if (hi - lo == 1) {
        out.push_back(f);
        return;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    PPoly gp{1}, hp{1};
    for (std::size_t i = lo; i < mid; ++i) gp = pmul(gp, parts[i], p);
    for (std::size_t i = mid; i < hi; ++i) hp = pmul(hp, parts[i], p);
    auto [one, sp, tp] = pxgcd(gp, hp, p);
    if (one.size() != 1 || one[0] != 1) throw std::domain_error("factors not coprime mod p");
    HenselPair pair{lift_of(gp), lift_of(hp), lift_of(sp), lift_of(tp)};
    Int m(p);
    while (m < target) {
        pair = hensel_step(f, pair, m);
        m *= m;
    }
    hensel_tree(pair.g, parts, lo, mid, p, target, out);
    hensel_tree(pair.h, parts, mid, hi, p, target, out);
}

inline Int centered(const Int& c, const Int& m) {
    Int r = mod_norm(c, m);
    if (2 * r > m) r -= m;
    return r;
}

inline ZPoly centered_poly(ZPoly f, const Int& m) {
    for (auto& c : f) c = centered(c, m);
    poly::normalize(f);
    return f;
}

/* Exact division of integer polynomials by a monic divisor; nullopt when the
   division leaves a remainder. */
inline std::optional<ZPoly> zdivide_exact(const ZPoly& a, const ZPoly& b) {
    if (b.empty() || b.back() != 1) throw std::domain_error("divisor must be monic");
    ZPoly q, r = a;
    poly::normalize(r);
    if (r.size() < b.size()) return r.empty() ? std::optional<ZPoly>(ZPoly{}) : std::nullopt;
    q.assign(r.size() - b.size() + 1, Int(0));
    for (int i = static_cast<int>(r.size()) - 1; i >= static_cast<int>(b.size()) - 1; --i) {
        if (static_cast<std::size_t>(i) >= r.size() || r[i] == 0) continue;
        Int c = r[i];
        q[i - (b.size() - 1)] = c;
        for (std::size_t j = 0; j < b.size(); ++j) r[i - (b.size() - 1) + j] -= c * b[j];
    }
    poly::normalize(r);
    if (!r.empty()) return std::nullopt;
    poly::normalize(q);
    return q;
}

/* Coefficient bound for monic factors: 2^n * ceil(l2 norm of f). */
inline Int factor_bound(const ZPoly& f) {
    Int sq = 0;
    for (const auto& c : f) sq += c * c;
    Int root = isqrt(sq) + 1;
    return (Int(1) << f.size()) * root;
}

} // namespace detail

/* Irreducible factorization of a monic squarefree integer polynomial. */
inline std::vector<ZPoly> factor_monic_squarefree(const ZPoly& f, unsigned long long seed = 0) {
    using namespace detail;
    int n = poly::degree(f);
    if (n < 1 || f.back() != 1) throw std::invalid_argument("expected a monic nonconstant polynomial");
    if (n == 1) return {f};

    // Pick a few admissible primes and keep the one with the fewest modular
    // factors; fewer factors means less recombination work.
    std::mt19937_64 rng(seed ^ 0x6b336b6974ULL);
    std::vector<PPoly> best;
    long long best_p = 0;
    int tried = 0;
    for (long long p = 3; p < 20000 && tried < 5; p += 2) {
        if (!is_prime(Int(p))) continue;
        PPoly fp = pmod_of(f, p);
        if (static_cast<int>(fp.size()) - 1 != n) continue;
        PPoly g = pgcd(fp, pderivative(fp, p), p);
        if (g.size() != 1) continue; // not squarefree mod p
        auto parts = factor_mod_p(pmonic(fp, p), p, rng);
        ++tried;
        if (best.empty() || parts.size() < best.size()) {
            best = std::move(parts);
            best_p = p;
            if (best.size() == 1) break;
        }
    }
    if (best.empty()) throw std::domain_error("no admissible prime found");
    if (best.size() == 1) return {f};

    Int bound = factor_bound(f);
    Int target = 2 * bound + 1;
    std::vector<ZPoly> lifted;
    Int modulus(best_p);
    while (modulus < target) modulus *= modulus;
    hensel_tree(zreduce(f, modulus), best, 0, best.size(), best_p, target, lifted);
    for (auto& g : lifted) g = zreduce(std::move(g), modulus);

    // Recombination: search subsets of lifted factors whose centered product
    // divides what is left of f over the integers.
    std::vector<ZPoly> out;
    ZPoly rem = f;
    std::vector<int> idx(lifted.size());
    for (std::size_t i = 0; i < lifted.size(); ++i) idx[i] = static_cast<int>(i);

    for (std::size_t take = 1; !idx.empty() && take <= idx.size() / 2;) {
        bool found = false;
        std::vector<std::size_t> comb(take);
        for (std::size_t i = 0; i < take; ++i) comb[i] = i;
        for (;;) {
            ZPoly prod{Int(1)};
            for (std::size_t i : comb) prod = zmul_mod(prod, lifted[idx[i]], modulus);
            ZPoly cand = centered_poly(prod, modulus);
            // Cheap test first: the constant term must divide rem's.
            bool plausible = !cand.empty();
            if (plausible && !rem.empty() && rem.front() != 0 && !cand.front().is_zero())
                plausible = rem.front() % cand.front() == 0;
            if (plausible && !cand.empty() && cand.back() == 1) {
                if (auto q = zdivide_exact(rem, cand)) {
                    out.push_back(cand);
                    rem = *q;
                    std::vector<int> next;
                    for (std::size_t i = 0, c = 0; i < idx.size(); ++i) {
                        if (c < comb.size() && comb[c] == i) { ++c; continue; }
                        next.push_back(idx[i]);
                    }
                    idx = std::move(next);
                    found = true;
                    break;
                }
            }
            // next combination
            std::size_t i = take;
            while (i > 0 && comb[i - 1] == idx.size() - take + (i - 1)) --i;
            if (i == 0) break;
            ++comb[i - 1];
            for (std::size_t j = i; j < take; ++j) comb[j] = comb[j - 1] + 1;
        }
        if (!found) ++take;
    }
    if (poly::degree(rem) > 0) out.push_back(rem);

    std::sort(out.begin(), out.end(), [](const ZPoly& a, const ZPoly& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
    });
    return out;
}

/* Irreducible factorization of a primitive squarefree integer polynomial
   with positive leading coefficient.  Output factors are primitive with
   positive lead. */
inline std::vector<ZPoly> factor_primitive_squarefree(const ZPoly& f, unsigned long long seed = 0) {
    int n = poly::degree(f);
    if (n < 1) throw std::invalid_argument("expected a nonconstant polynomial");
    if (f.back() < 0) throw std::invalid_argument("expected positive leading coefficient");
    if (n == 1) return {f};
    Int l = f.back();
    if (l == 1) return factor_monic_squarefree(f, seed);

    // Monicize: F(y) = l^(n-1) f(y/l); each monic factor G maps back to the
    // primitive part of G(l x).
    ZPoly F(f.size());
    F[n] = 1;
    Int pw = 1;
    for (int i = n - 1; i >= 0; --i) {
        F[i] = f[i] * pw;
        pw *= l;
    }
    auto monic_factors = factor_monic_squarefree(F, seed);
    std::vector<ZPoly> out;
    for (const auto& G : monic_factors) {
        ZPoly g(G.size());
        Int lp = 1;
        for (std::size_t i = 0; i < G.size(); ++i) {
            g[i] = G[i] * lp;
            lp *= l;
        }
        Int c = 0;
        for (const auto& x : g) c = gcd(c, x);
        if (g.back() < 0) c = -c;
        for (auto& x : g) x /= c;
        out.push_back(std::move(g));
    }
    std::sort(out.begin(), out.end(), [](const ZPoly& a, const ZPoly& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
    });
    return out;
}

struct Factorization {
    Rat unit;                                    // f = unit * prod factors^mult
    std::vector<std::pair<ZPoly, int>> factors;  // primitive, irreducible, positive lead
};

/* Full factorization over the rationals. */
inline Factorization factor_rational(const QPoly& f_in, unsigned long long seed = 0) {
    QPoly f = f_in;
    poly::normalize(f);
    Factorization result;
    if (f.empty()) {
        result.unit = 0;
        return result;
    }
    if (poly::degree(f) == 0) {
        result.unit = f[0];
        return result;
    }
    // f = content * pp with pp primitive; the primitive parts of the monic
    // squarefree factors multiply back to pp exactly, so the content is the
    // whole unit.
    auto [content, pp] = poly::rational_content(f);
    result.unit = content;
    for (auto& [part, mult] : poly::squarefree_decomposition(poly::from_integer(pp))) {
        auto z = poly::rational_content(part).second;
        for (auto& irr : factor_primitive_squarefree(z, seed)) result.factors.emplace_back(std::move(irr), mult);
    }
    std::sort(result.factors.begin(), result.factors.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
        if (a.first != b.first)
            return std::lexicographical_compare(a.first.rbegin(), a.first.rend(), b.first.rbegin(),
                                                b.first.rend());
        return a.second < b.second;
    });
    return result;
}

} // namespace factor
} // namespace k3kit
