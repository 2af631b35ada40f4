#pragma once

#include "k3kit/json_io.hpp"
#include "k3kit/numeric.hpp"

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace k3kit {

/* Internal parallelism cap; K3KIT_THREADS overrides hardware concurrency.
   Results are merged in a fixed order, so the value never changes output. */
inline unsigned thread_budget() {
    if (const char* env = std::getenv("K3KIT_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

struct Signature {
    int n_plus = 0;
    int n_minus = 0;
    int n_zero = 0;
};

/* Free integral lattice of finite rank with its Gram matrix.  The bilinear
   form is v^T G w on coordinate vectors. */
class GramLattice {
public:
    GramLattice(std::vector<std::vector<Int>> gram) : gram_(std::move(gram)) {
        rank_ = static_cast<int>(gram_.size());
        if (rank_ == 0) throw std::invalid_argument("lattice rank must be positive");
        for (const auto& row : gram_)
            if (static_cast<int>(row.size()) != rank_)
                throw std::invalid_argument("gram matrix must be square");
        for (int i = 0; i < rank_; ++i)
            for (int j = i + 1; j < rank_; ++j)
                if (gram_[i][j] != gram_[j][i])
                    throw std::invalid_argument("gram matrix must be symmetric");
    }

    int rank() const { return rank_; }
    const std::vector<std::vector<Int>>& gram() const { return gram_; }
    const Int& entry(int i, int j) const { return gram_[i][j]; }

    bool is_even() const {
        for (int i = 0; i < rank_; ++i)
            if (gram_[i][i] % 2 != 0) return false;
        return true;
    }

    /* Exact determinant, Bareiss fraction-free elimination. */
    Int determinant() const {
        std::vector<std::vector<Int>> m = gram_;
        int n = rank_;
        Int prev = 1;
        int sign = 1;
        for (int k = 0; k < n - 1; ++k) {
            if (m[k][k] == 0) {
                int swap_row = -1;
                for (int i = k + 1; i < n; ++i)
                    if (m[i][k] != 0) { swap_row = i; break; }
                if (swap_row < 0) return 0;
                std::swap(m[k], m[swap_row]);
                sign = -sign;
            }
            for (int i = k + 1; i < n; ++i)
                for (int j = k + 1; j < n; ++j)
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            prev = m[k][k];
        }
        return sign * m[n - 1][n - 1];
    }

    bool is_nondegenerate() const { return determinant() != 0; }

    /* Inertia counts from an exact rational congruence diagonalization. */
    Signature signature() const {
        int n = rank_;
        std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m[i][j] = Rat(gram_[i][j]);
        Signature sig;
        for (int i = 0; i < n; ++i) {
            if (m[i][i] == 0) {
                int pivot = -1;
                for (int j = i + 1; j < n; ++j)
                    if (m[j][j] != 0) { pivot = j; break; }
                if (pivot >= 0) {
                    std::swap(m[i], m[pivot]);
                    for (int k = 0; k < n; ++k) std::swap(m[k][i], m[k][pivot]);
                } else {
                    // No nonzero diagonal below: create one from an off-diagonal
                    // entry via v_i += v_j (new diagonal is 2*m[i][j]).
                    int off = -1;
                    for (int j = i + 1; j < n; ++j)
                        if (m[i][j] != 0) { off = j; break; }
                    if (off < 0) { ++sig.n_zero; continue; }
                    for (int k = 0; k < n; ++k) m[i][k] += m[off][k];
                    for (int k = 0; k < n; ++k) m[k][i] += m[k][off];
                }
            }
            Rat pivot = m[i][i];
            if (pivot > 0) ++sig.n_plus; else ++sig.n_minus;
            for (int j = i + 1; j < n; ++j) {
                if (m[j][i] == 0) continue;
                Rat f = m[j][i] / pivot;
                for (int k = 0; k < n; ++k) m[j][k] -= f * m[i][k];
                for (int k = 0; k < n; ++k) m[k][j] -= f * m[k][i];
            }
        }
        return sig;
    }

    bool is_hyperbolic() const {
        Signature s = signature();
        return s.n_plus == 1 && s.n_minus == rank_ - 1 && s.n_zero == 0;
    }

    json to_json() const {
        return json{{"rank", rank_}, {"gram", matrix_to_json(gram_)}};
    }

    static GramLattice from_json(const json& j) {
        if (!j.contains("gram")) throw std::invalid_argument("lattice JSON needs a \"gram\" field");
        GramLattice L(matrix_from_json(j.at("gram")));
        if (j.contains("rank") && j.at("rank").get<int>() != L.rank())
            throw std::invalid_argument("rank field disagrees with gram size");
        return L;
    }

private:
    int rank_;
    std::vector<std::vector<Int>> gram_;
};

inline Int inner_product(const GramLattice& L, const std::vector<Int>& v, const std::vector<Int>& w) {
    int n = L.rank();
    if (static_cast<int>(v.size()) != n || static_cast<int>(w.size()) != n)
        throw std::invalid_argument("vector length must equal lattice rank");
    Int total = 0;
    for (int i = 0; i < n; ++i) {
        if (v[i] == 0) continue;
        Int row = 0;
        for (int j = 0; j < n; ++j) row += L.entry(i, j) * w[j];
        total += v[i] * row;
    }
    return total;
}

inline Int vector_content(const std::vector<Int>& v) {
    Int g = 0;
    for (const auto& x : v) g = gcd(g, x);
    return g;
}

/* Primitive = nonzero and coordinate gcd 1.  The zero vector is not primitive. */
inline bool is_primitive(const std::vector<Int>& v) { return vector_content(v) == 1; }

// ---------------------------------------------------------------------------
// Standard lattices

namespace detail {

inline std::vector<std::vector<Int>> e8_gram(int sign) {
    // Dynkin diagram edges in Bourbaki numbering (0-based nodes).
    static const int edges[7][2] = {{0, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}};
    std::vector<std::vector<Int>> g(8, std::vector<Int>(8, 0));
    for (int i = 0; i < 8; ++i) g[i][i] = 2 * sign;
    for (const auto& e : edges) {
        g[e[0]][e[1]] = -sign;
        g[e[1]][e[0]] = -sign;
    }
    return g;
}

} // namespace detail

/* Named lattices: "H" (hyperbolic plane), "E8", "minusE8", and "K3"
   (3 H blocks followed by 2 negated E8 blocks; rank 22, determinant -1). */
inline GramLattice standard_lattice(const std::string& name) {
    if (name == "H") return GramLattice({{Int(0), Int(1)}, {Int(1), Int(0)}});
    if (name == "E8") return GramLattice(detail::e8_gram(+1));
    if (name == "minusE8") return GramLattice(detail::e8_gram(-1));
    if (name == "K3") {
        std::vector<std::vector<Int>> g(22, std::vector<Int>(22, 0));
        for (int b = 0; b < 3; ++b) {
            g[2 * b][2 * b + 1] = 1;
            g[2 * b + 1][2 * b] = 1;
        }
        auto e8 = detail::e8_gram(-1);
        for (int b = 0; b < 2; ++b) {
            int off = 6 + 8 * b;
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j) g[off + i][off + j] = e8[i][j];
        }
        return GramLattice(g);
    }
    throw std::invalid_argument("unknown standard lattice: " + name);
}

// ---------------------------------------------------------------------------
// Bounded enumeration of vectors of given square

namespace detail {

/* Depth-first box search.  Vectors are canonicalized up to sign (first
   nonzero coordinate positive) and produced in lexicographic order.  The
   prune test uses interval bounds on the unfixed part of the form, which is
   sound for indefinite forms: a subtree is skipped only when no assignment
   of the remaining coordinates can reach the target. */
class SquareSearch {
public:
    SquareSearch(const GramLattice& L, const Int& target, long bound, bool primitive_only)
        : L_(L), n_(L.rank()), target_(target), bound_(bound), primitive_only_(primitive_only) {
        if (bound < 1) throw std::invalid_argument("bound must be >= 1");
        if (!L.is_nondegenerate()) throw std::invalid_argument("lattice must be nondegenerate");
        abs_gram_.assign(n_, std::vector<Int>(n_));
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) abs_gram_[i][j] = abs_int(L.entry(i, j));
        // suffix_quad_[k] = sum of |G_ij| over i,j >= k
        suffix_quad_.assign(n_ + 1, Int(0));
        for (int k = n_ - 1; k >= 0; --k) {
            Int s = suffix_quad_[k + 1];
            for (int j = k; j < n_; ++j) s += abs_gram_[k][j];
            for (int i = k + 1; i < n_; ++i) s += abs_gram_[i][k];
            suffix_quad_[k] = s;
        }
        coords_.assign(n_, Int(0));
        linear_.assign(n_, Int(0));
    }

    /* Visit every solution; the callback returns false to stop the search. */
    template <typename Callback>
    bool run(Callback&& cb) {
        return descend(0, Int(0), true, cb);
    }

    /* Visit only solutions whose first coordinate equals c (c >= 0, since
       canonical representatives start with a nonnegative coordinate). */
    template <typename Callback>
    bool run_with_first(long c, Callback&& cb) {
        coords_[0] = c;
        Int value = Int(c) * c * L_.entry(0, 0);
        for (int j = 1; j < n_; ++j) linear_[j] = Int(c) * L_.entry(0, j);
        return descend(1, value, c == 0, cb);
    }

private:
    template <typename Callback>
    bool descend(int k, Int value, bool prefix_zero, Callback& cb) {
        if (k == n_) {
            if (value != target_) return true;
            if (prefix_zero) return true; // exclude the zero vector
            if (primitive_only_ && !is_primitive(coords_)) return true;
            return cb(coords_);
        }
        // Range of the still-free part: |2 * linear . x + x^T G x| over the box.
        Int slack = 0;
        for (int j = k; j < n_; ++j) slack += abs_int(linear_[j]);
        slack = 2 * bound_ * slack + Int(bound_) * bound_ * suffix_quad_[k];
        Int gap = target_ - value;
        if (gap > slack || gap < -slack) return true;

        long lo = prefix_zero ? 0 : -bound_;
        for (long c = lo; c <= bound_; ++c) {
            coords_[k] = c;
            Int new_value = value + 2 * Int(c) * linear_[k] + Int(c) * c * L_.entry(k, k);
            if (c != 0)
                for (int j = k + 1; j < n_; ++j) linear_[j] += Int(c) * L_.entry(k, j);
            bool keep = descend(k + 1, new_value, prefix_zero && c == 0, cb);
            if (c != 0)
                for (int j = k + 1; j < n_; ++j) linear_[j] -= Int(c) * L_.entry(k, j);
            if (!keep) return false;
        }
        coords_[k] = 0;
        return true;
    }

    const GramLattice& L_;
    int n_;
    Int target_;
    long bound_;
    bool primitive_only_;
    std::vector<std::vector<Int>> abs_gram_;
    std::vector<Int> suffix_quad_;
    std::vector<Int> coords_;
    std::vector<Int> linear_;
};

} // namespace detail

/* All vectors v with |v_i| <= bound and <v,v> = n, one representative per
   sign pair, lexicographic order.  The zero vector is never reported.
   The search space is split on the first coordinate across the thread
   budget; chunks are concatenated in coordinate order, so output is
   identical for every thread count. */
inline std::vector<std::vector<Int>> enumerate_square(const GramLattice& L, const Int& n,
                                                      long bound, bool primitive_only) {
    unsigned threads = std::min<unsigned>(thread_budget(), static_cast<unsigned>(bound + 1));
    std::vector<std::vector<std::vector<Int>>> chunks(bound + 1);
    if (threads <= 1 || L.rank() < 2) {
        std::vector<std::vector<Int>> out;
        detail::SquareSearch search(L, n, bound, primitive_only);
        search.run([&](const std::vector<Int>& v) {
            out.push_back(v);
            return true;
        });
        return out;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            for (long c = static_cast<long>(t); c <= bound; c += threads) {
                detail::SquareSearch search(L, n, bound, primitive_only);
                search.run_with_first(c, [&](const std::vector<Int>& v) {
                    chunks[c].push_back(v);
                    return true;
                });
            }
        });
    }
    for (auto& th : pool) th.join();
    std::vector<std::vector<Int>> out;
    for (auto& chunk : chunks)
        for (auto& v : chunk) out.push_back(std::move(v));
    return out;
}

/* First solution in enumeration order, if any. */
inline std::optional<std::vector<Int>> find_square(const GramLattice& L, const Int& n,
                                                   long bound, bool primitive_only) {
    std::optional<std::vector<Int>> hit;
    detail::SquareSearch search(L, n, bound, primitive_only);
    search.run([&](const std::vector<Int>& v) {
        hit = v;
        return false;
    });
    return hit;
}

// ---------------------------------------------------------------------------
// Ample-class bookkeeping on the rank-22 lattice

/* Primitive vector of square n (n even, nonnegative) inside the first
   hyperbolic block of the rank-22 lattice: (n/2, 1, 0, ..., 0). */
inline std::vector<Int> canonical_primitive(const Int& n) {
    if (n < 0 || n % 2 != 0) throw std::invalid_argument("square must be even and nonnegative");
    std::vector<Int> v(22, Int(0));
    v[0] = n / 2;
    v[1] = 1;
    return v;
}

/* Degree-ell quotient construction: ambient square 2*ell, image square ell-3. */
inline Int ambient_square(const Int& ell) {
    if (ell < 3 || ell % 2 == 0) throw std::invalid_argument("ell must be odd and >= 3");
    return 2 * ell;
}

inline Int kummer_square(const Int& ell) {
    if (ell < 3 || ell % 2 == 0) throw std::invalid_argument("ell must be odd and >= 3");
    return ell - 3;
}

/* Inverse of kummer_square on even targets: the ell with ell - 3 = n. */
inline Int ell_for_square(const Int& n) {
    if (n < 0 || n % 2 != 0) throw std::invalid_argument("target square must be even and nonnegative");
    return n + 3;
}

} // namespace k3kit
