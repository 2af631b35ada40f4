#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/miller_rabin.hpp>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace k3kit {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int gcd(Int a, Int b) { return boost::multiprecision::gcd(a, b); }
inline Int lcm(const Int& a, const Int& b) { return boost::multiprecision::lcm(a, b); }
inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

inline Rat make_rat(const Int& num, const Int& den) {
    if (den == 0) throw std::domain_error("zero denominator");
    return Rat(num, den);
}

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

/* Floor of the integer square root; input must be nonnegative. */
inline Int isqrt(const Int& n) {
    if (n < 0) throw std::domain_error("isqrt of negative value");
    return boost::multiprecision::sqrt(n);
}

inline bool is_perfect_square(const Int& n, Int* root = nullptr) {
    if (n < 0) return false;
    Int r = isqrt(n);
    if (r * r != n) return false;
    if (root) *root = r;
    return true;
}

inline bool is_prime(const Int& n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0) return false;
    return boost::multiprecision::miller_rabin_test(n, 32);
}

namespace detail {

inline Int pollard_rho(const Int& n) {
    // Brent's cycle variant; n must be odd, composite, > 1.
    for (Int c = 1; ; ++c) {
        Int x = 2, y = 2, d = 1;
        auto step = [&](const Int& v) { return (v * v + c) % n; };
        while (d == 1) {
            x = step(x);
            y = step(step(y));
            d = gcd(abs_int(x - y), n);
        }
        if (d != n) return d;
    }
}

} // namespace detail

/* Prime factorization as {prime -> exponent}; input must be nonzero.  Trial
   division below 10^5, Pollard rho beyond.  Sign is discarded. */
inline std::map<Int, int> factorize(Int n) {
    if (n == 0) throw std::domain_error("factorize(0)");
    n = abs_int(n);
    std::map<Int, int> out;
    for (Int p : {Int(2), Int(3), Int(5)}) {
        while (n % p == 0) { ++out[p]; n /= p; }
    }
    for (Int p = 7; p * p <= n && p < 100000; p += 2) {
        while (n % p == 0) { ++out[p]; n /= p; }
    }
    // Residual factor: peel off primes recursively.
    std::vector<Int> stack;
    if (n > 1) stack.push_back(n);
    while (!stack.empty()) {
        Int m = stack.back();
        stack.pop_back();
        if (is_prime(m)) { ++out[m]; continue; }
        Int d = detail::pollard_rho(m);
        stack.push_back(d);
        stack.push_back(m / d);
    }
    return out;
}

inline std::vector<Int> prime_divisors(const Int& n) {
    std::vector<Int> out;
    for (const auto& [p, e] : factorize(n)) out.push_back(p);
    return out;
}

/* p-adic valuation of n; v_p(0) is undefined and rejected. */
inline int padic_valuation(Int n, const Int& p) {
    if (n == 0) throw std::domain_error("valuation of zero");
    n = abs_int(n);
    int v = 0;
    while (n % p == 0) { n /= p; ++v; }
    return v;
}

inline Int int_pow(Int base, unsigned e) {
    Int r = 1;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

inline std::int64_t mod_norm(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

inline Int mod_norm(const Int& a, const Int& m) {
    Int r = a % m;
    return r < 0 ? r + m : r;
}

inline std::int64_t mod_mul(std::int64_t a, std::int64_t b, std::int64_t m) {
    return static_cast<std::int64_t>(static_cast<__int128>(a) * b % m);
}

inline std::int64_t mod_pow(std::int64_t base, std::int64_t e, std::int64_t m) {
    std::int64_t r = 1 % m;
    base = mod_norm(base, m);
    while (e > 0) {
        if (e & 1) r = mod_mul(r, base, m);
        base = mod_mul(base, base, m);
        e >>= 1;
    }
    return r;
}

/* Inverse of a mod m; requires gcd(a, m) = 1. */
inline std::int64_t mod_inverse(std::int64_t a, std::int64_t m) {
    std::int64_t t = 0, new_t = 1, r = m, new_r = mod_norm(a, m);
    while (new_r != 0) {
        std::int64_t q = r / new_r;
        std::int64_t tmp = t - q * new_t;
        t = new_t; new_t = tmp;
        tmp = r - q * new_r;
        r = new_r; new_r = tmp;
    }
    if (r != 1) throw std::domain_error("mod_inverse: arguments not coprime");
    return mod_norm(t, m);
}

inline Int mod_inverse(const Int& a, const Int& m) {
    Int t = 0, new_t = 1, r = m, new_r = ((a % m) + m) % m;
    while (new_r != 0) {
        Int q = r / new_r;
        Int tmp = t - q * new_t;
        t = new_t; new_t = tmp;
        tmp = r - q * new_r;
        r = new_r; new_r = tmp;
    }
    if (r != 1) throw std::domain_error("mod_inverse: arguments not coprime");
    return ((t % m) + m) % m;
}

} // namespace k3kit
