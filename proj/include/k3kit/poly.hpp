#pragma once

#include "k3kit/numeric.hpp"
#include "k3kit/json_io.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace k3kit {

/* Dense univariate polynomials, lowest coefficient first.  QPoly carries
   rational coefficients, ZPoly integer ones.  The zero polynomial is the
   empty vector and has degree -1. */
using QPoly = std::vector<Rat>;
using ZPoly = std::vector<Int>;

namespace poly {

inline void normalize(QPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}
inline void normalize(ZPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

inline int degree(const QPoly& f) { return static_cast<int>(f.size()) - 1; }
inline int degree(const ZPoly& f) { return static_cast<int>(f.size()) - 1; }

inline bool is_zero(const QPoly& f) { return f.empty(); }

inline Rat lc(const QPoly& f) { return f.empty() ? Rat(0) : f.back(); }
inline Int lc(const ZPoly& f) { return f.empty() ? Int(0) : f.back(); }

inline QPoly add(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()), Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    normalize(r);
    return r;
}

inline QPoly neg(QPoly a) {
    for (auto& c : a) c = -c;
    return a;
}

inline QPoly sub(const QPoly& a, const QPoly& b) { return add(a, neg(b)); }

inline QPoly mul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    normalize(r);
    return r;
}

inline ZPoly mul(const ZPoly& a, const ZPoly& b) {
    if (a.empty() || b.empty()) return {};
    ZPoly r(a.size() + b.size() - 1, Int(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    normalize(r);
    return r;
}

inline QPoly scale(QPoly a, const Rat& c) {
    if (c == 0) return {};
    for (auto& x : a) x *= c;
    return a;
}

inline std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
    if (b.empty()) throw std::domain_error("polynomial division by zero");
    QPoly q, r = a;
    if (a.size() < b.size()) return {q, r};
    q.assign(a.size() - b.size() + 1, Rat(0));
    Rat inv_lead = Rat(1) / b.back();
    for (int i = static_cast<int>(a.size()) - 1; i >= static_cast<int>(b.size()) - 1; --i) {
        if (static_cast<std::size_t>(i) >= r.size() || r[i] == 0) continue;
        Rat c = r[i] * inv_lead;
        q[i - (b.size() - 1)] = c;
        for (std::size_t j = 0; j < b.size(); ++j) r[i - (b.size() - 1) + j] -= c * b[j];
    }
    normalize(q);
    normalize(r);
    return {q, r};
}

inline QPoly monic(QPoly f) {
    if (f.empty()) return f;
    Rat inv = Rat(1) / f.back();
    for (auto& c : f) c *= inv;
    return f;
}

inline QPoly gcd(QPoly a, QPoly b) {
    normalize(a);
    normalize(b);
    while (!b.empty()) {
        QPoly r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(std::move(a));
}

inline QPoly derivative(const QPoly& f) {
    if (f.size() <= 1) return {};
    QPoly r(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i) r[i - 1] = f[i] * Rat(Int(i));
    return r;
}

inline Rat eval(const QPoly& f, const Rat& x) {
    Rat r = 0;
    for (auto it = f.rbegin(); it != f.rend(); ++it) r = r * x + *it;
    return r;
}

inline QPoly pow(const QPoly& f, long e) {
    QPoly r{Rat(1)};
    for (long i = 0; i < e; ++i) r = mul(r, f);
    return r;
}

/* x^n * f(1/x): coefficients reversed against ambient degree n >= deg f. */
inline QPoly reverse_at_degree(const QPoly& f, long n) {
    if (degree(f) > n) throw std::invalid_argument("reversal degree below actual degree");
    QPoly r(n + 1, Rat(0));
    for (std::size_t i = 0; i < f.size(); ++i) r[n - i] = f[i];
    normalize(r);
    return r;
}

/* Squarefree decomposition in characteristic zero: f = c * prod a_i^i with
   the a_i squarefree, pairwise coprime, monic.  Returns pairs (a_i, i). */
inline std::vector<std::pair<QPoly, int>> squarefree_decomposition(const QPoly& f_in) {
    QPoly f = f_in;
    normalize(f);
    if (degree(f) < 1) return {};
    std::vector<std::pair<QPoly, int>> out;
    QPoly df = derivative(f);
    QPoly a = gcd(f, df);
    QPoly b = divmod(f, a).first;
    QPoly c = divmod(df, a).first;
    QPoly d = sub(c, derivative(b));
    int i = 1;
    while (degree(b) > 0) {
        QPoly ai = gcd(b, d);
        if (degree(ai) > 0) out.emplace_back(monic(ai), i);
        b = divmod(b, ai).first;
        c = divmod(d, ai).first;
        d = sub(c, derivative(b));
        ++i;
    }
    return out;
}

inline bool is_squarefree(const QPoly& f) {
    if (degree(f) < 1) return true;
    return degree(gcd(f, derivative(f))) == 0;
}

/* Content and primitive integer part of a rational polynomial: f = content *
   pp with pp an integer polynomial of content 1 and positive lead. */
inline std::pair<Rat, ZPoly> rational_content(const QPoly& f) {
    if (f.empty()) return {Rat(0), {}};
    Int den_lcm = 1;
    for (const auto& c : f) den_lcm = lcm(den_lcm, boost::multiprecision::denominator(c));
    ZPoly z(f.size());
    Int num_gcd = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        Rat scaled = f[i] * Rat(den_lcm);
        z[i] = boost::multiprecision::numerator(scaled);
        num_gcd = gcd(num_gcd, z[i]);
    }
    if (z.back() < 0) num_gcd = -num_gcd;
    for (auto& c : z) c /= num_gcd;
    return {Rat(num_gcd, den_lcm), z};
}

inline QPoly from_integer(const ZPoly& f) {
    QPoly r(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) r[i] = Rat(f[i]);
    return r;
}

inline json to_json(const QPoly& f) {
    json arr = json::array();
    for (const auto& c : f) arr.push_back(rat_to_json(c));
    return arr;
}

inline QPoly from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("polynomial must be a JSON array");
    QPoly f;
    for (const auto& c : j) f.push_back(rat_from_json(c));
    normalize(f);
    return f;
}

/* Display form such as "t^3 - 2*t + 1/2" with variable name var. */
inline std::string to_string(const QPoly& f, const std::string& var = "t") {
    if (f.empty()) return "0";
    std::string s;
    for (int i = degree(f); i >= 0; --i) {
        if (f[i] == 0) continue;
        Rat c = f[i];
        bool first = s.empty();
        if (c < 0) {
            s += first ? "-" : " - ";
            c = -c;
        } else if (!first) {
            s += " + ";
        }
        bool unit = (c == 1 && i > 0);
        if (!unit) {
            s += c.str();
            if (i > 0) s += "*";
        }
        if (i > 0) {
            s += var;
            if (i > 1) s += "^" + std::to_string(i);
        }
    }
    return s;
}

} // namespace poly
} // namespace k3kit
