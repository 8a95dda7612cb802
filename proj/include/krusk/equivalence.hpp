#ifndef KRUSK_EQUIVALENCE_HPP
#define KRUSK_EQUIVALENCE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "krusk/tensor.hpp"

namespace krusk {

/// Rank-1 term in canonical form: per-mode unit representatives plus the
/// scalar pulled out of each mode. Two terms are equal as rank-1 tensors iff
/// the unit vectors and the residual (product of scales) match.
template <class T>
struct CanonicalTerm {
    std::vector<std::vector<T>> unit;  // one per mode
    std::vector<T> scales;             // extracted scale per mode
    T residual = FieldOps<T>::one();
};

template <class T>
CanonicalTerm<T> canonical_term(const std::vector<std::vector<T>>& vectors,
                                const Tolerance& tol = {}) {
    CanonicalTerm<T> term;
    term.residual = FieldOps<T>::one();
    for (const auto& v : vectors) {
        if (detail::vector_is_zero(v, tol))
            throw std::invalid_argument("canonical_term: zero vector in a rank-1 term");
        T scale;
        if constexpr (FieldOps<T>::exact) {
            // first nonzero coordinate becomes 1
            std::size_t lead = 0;
            while (v[lead].is_zero()) ++lead;
            scale = v[lead];
        } else {
            double maxabs = 0.0;
            for (const T& x : v) maxabs = std::max(maxabs, std::abs(x));
            std::size_t lead = 0;
            while (std::abs(v[lead]) <= tol.tau * maxabs) ++lead;
            double norm = 0.0;
            for (const T& x : v) norm += std::norm(x);
            norm = std::sqrt(norm);
            // unit norm, first significant coordinate real positive
            scale = (v[lead] / std::abs(v[lead])) * norm;
        }
        std::vector<T> u(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) u[i] = v[i] / scale;
        term.unit.push_back(std::move(u));
        term.scales.push_back(scale);
        term.residual *= scale;
    }
    return term;
}

namespace detail {

inline int compare_terms(const CanonicalTerm<GaussRat>& a, const CanonicalTerm<GaussRat>& b) {
    for (std::size_t s = 0; s < a.unit.size(); ++s)
        for (std::size_t i = 0; i < a.unit[s].size(); ++i) {
            int c = compare(a.unit[s][i], b.unit[s][i]);
            if (c != 0) return c;
        }
    return compare(a.residual, b.residual);
}

/// Max coordinate distance between unit parts; residual compared relative
/// to the larger residual magnitude.
inline double term_distance(const CanonicalTerm<Cplx>& a, const CanonicalTerm<Cplx>& b) {
    double d = 0.0;
    for (std::size_t s = 0; s < a.unit.size(); ++s)
        for (std::size_t i = 0; i < a.unit[s].size(); ++i)
            d = std::max(d, std::abs(a.unit[s][i] - b.unit[s][i]));
    double mag = std::max(std::abs(a.residual), std::abs(b.residual));
    if (mag > 0.0) d = std::max(d, std::abs(a.residual - b.residual) / mag);
    return d;
}

/// Min-cost perfect assignment on a square cost matrix (Hungarian method
/// with potentials, O(n^3)). Returns column assigned to each row.
inline std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, n), way(n + 1, n);
    for (std::size_t i = 0; i < n; ++i) {
        p[n] = i;
        std::size_t j0 = n;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            std::size_t i0 = p[j0], j1 = n;
            double delta = inf;
            for (std::size_t j = 0; j < n; ++j) {
                if (used[j]) continue;
                double cur = cost[i0][j] - u[i0] - v[j];
                if (cur < minv[j]) { minv[j] = cur; way[j] = j0; }
                if (minv[j] < delta) { delta = minv[j]; j1 = j; }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) { u[p[j]] += delta; v[j] -= delta; }
                else minv[j] -= delta;
            }
            j0 = j1;
        } while (p[j0] != n);
        do {
            std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != n);
    }
    std::vector<std::size_t> row_to_col(n);
    for (std::size_t j = 0; j < n; ++j)
        if (p[j] != n) row_to_col[p[j]] = j;
    return row_to_col;
}

}  // namespace detail

/// Permutation plus per-mode scalings carrying D1 term j onto D2 term
/// sigma(j); the scalings of one term multiply to 1, so matched terms are
/// equal, not merely proportional.
template <class T>
struct EquivalenceWitness {
    std::vector<std::size_t> sigma;        // term j of D1 -> term sigma[j] of D2
    std::vector<std::vector<T>> scalings;  // scalings[s][j]
    double tau = 0.0;                      // float backend: tolerance used
    double accept_threshold = 0.0;         // float backend: matching threshold
};

template <class T>
std::vector<CanonicalTerm<T>> canonical_terms(const Decomposition<T>& dec,
                                              const Tolerance& tol = {}) {
    std::vector<CanonicalTerm<T>> terms;
    terms.reserve(dec.length);
    for (std::size_t j = 0; j < dec.length; ++j) {
        std::vector<std::vector<T>> vecs;
        vecs.reserve(dec.order());
        for (std::size_t s = 0; s < dec.order(); ++s) vecs.push_back(dec.factors[s].column(j));
        terms.push_back(canonical_term(vecs, tol));
    }
    return terms;
}

template <class T>
bool verify_witness(const Decomposition<T>& d1, const Decomposition<T>& d2,
                    const EquivalenceWitness<T>& w, const Tolerance& tol = {}) {
    if (d1.dims != d2.dims || d1.length != d2.length) return false;
    const std::size_t r = d1.length, d = d1.order();
    if (w.sigma.size() != r || w.scalings.size() != d) return false;
    std::vector<bool> hit(r, false);
    for (std::size_t j : w.sigma) {
        if (j >= r || hit[j]) return false;
        hit[j] = true;
    }
    for (std::size_t s = 0; s < d; ++s)
        if (w.scalings[s].size() != r) return false;

    for (std::size_t j = 0; j < r; ++j) {
        T prod = FieldOps<T>::one();
        for (std::size_t s = 0; s < d; ++s) {
            const T& lam = w.scalings[s][j];
            prod *= lam;
            for (std::size_t i = 0; i < d1.dims[s]; ++i) {
                T lhs = lam * d1.factors[s](i, j);
                T rhs = d2.factors[s](i, w.sigma[j]);
                if constexpr (FieldOps<T>::exact) {
                    if (lhs != rhs) return false;
                } else {
                    double scale = 0.0;
                    for (std::size_t ii = 0; ii < d1.dims[s]; ++ii)
                        scale = std::max({scale,
                                          FieldOps<T>::magnitude(lam * d1.factors[s](ii, j)),
                                          FieldOps<T>::magnitude(d2.factors[s](ii, w.sigma[j]))});
                    if (std::abs(lhs - rhs) > 64.0 * tol.tau * scale) return false;
                }
            }
        }
        if constexpr (FieldOps<T>::exact) {
            if (prod != FieldOps<T>::one()) return false;
        } else {
            if (std::abs(prod - FieldOps<T>::one()) > 64.0 * tol.tau) return false;
        }
    }
    return true;
}

/// Decides essential equivalence. Exact: multiset comparison of sorted
/// canonical terms, ties between identical terms broken by original index
/// order. Float: greedy nearest-term matching, falling back to an optimal
/// assignment on the distance matrix; acceptance threshold 10 * tau.
template <class T>
std::optional<EquivalenceWitness<T>> match_decompositions(const Decomposition<T>& d1,
                                                          const Decomposition<T>& d2,
                                                          const Tolerance& tol = {}) {
    if (d1.dims != d2.dims)
        throw std::invalid_argument("match_decompositions: dimension mismatch");
    if (d1.length != d2.length)
        throw std::invalid_argument("match_decompositions: length mismatch");
    const std::size_t r = d1.length, d = d1.order();

    auto c1 = canonical_terms(d1, tol);
    auto c2 = canonical_terms(d2, tol);

    EquivalenceWitness<T> w;
    w.sigma.assign(r, r);
    w.scalings.assign(d, std::vector<T>(r, FieldOps<T>::one()));

    if constexpr (FieldOps<T>::exact) {
        std::vector<std::size_t> ord1(r), ord2(r);
        std::iota(ord1.begin(), ord1.end(), 0);
        std::iota(ord2.begin(), ord2.end(), 0);
        auto by_term = [](const auto& terms) {
            return [&terms](std::size_t a, std::size_t b) {
                int c = detail::compare_terms(terms[a], terms[b]);
                return c != 0 ? c < 0 : a < b;
            };
        };
        std::sort(ord1.begin(), ord1.end(), by_term(c1));
        std::sort(ord2.begin(), ord2.end(), by_term(c2));
        for (std::size_t p = 0; p < r; ++p)
            if (detail::compare_terms(c1[ord1[p]], c2[ord2[p]]) != 0) return std::nullopt;
        for (std::size_t p = 0; p < r; ++p) w.sigma[ord1[p]] = ord2[p];
    } else {
        const double threshold = 10.0 * tol.tau;
        w.tau = tol.tau;
        w.accept_threshold = threshold;

        std::vector<std::size_t> assign(r, r);
        std::vector<bool> used(r, false);
        bool greedy_ok = true;
        for (std::size_t j = 0; j < r && greedy_ok; ++j) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t pick = r;
            for (std::size_t m = 0; m < r; ++m) {
                if (used[m]) continue;
                double dist = detail::term_distance(c1[j], c2[m]);
                if (dist < best) { best = dist; pick = m; }
            }
            if (pick == r || best > threshold) greedy_ok = false;
            else { assign[j] = pick; used[pick] = true; }
        }
        if (!greedy_ok) {
            std::vector<std::vector<double>> cost(r, std::vector<double>(r));
            for (std::size_t j = 0; j < r; ++j)
                for (std::size_t m = 0; m < r; ++m)
                    cost[j][m] = detail::term_distance(c1[j], c2[m]);
            assign = detail::hungarian(cost);
            for (std::size_t j = 0; j < r; ++j)
                if (cost[j][assign[j]] > threshold) return std::nullopt;
        }
        w.sigma = assign;
    }

    for (std::size_t j = 0; j < r; ++j) {
        const std::size_t m = w.sigma[j];
        T prod = FieldOps<T>::one();
        for (std::size_t s = 0; s < d; ++s) {
            T lam = c2[m].scales[s] / c1[j].scales[s];
            if (!FieldOps<T>::exact && s + 1 == d)
                lam = FieldOps<T>::one() / prod;  // pin the product to 1
            w.scalings[s][j] = lam;
            prod *= lam;
        }
    }
    if (!verify_witness(d1, d2, w, tol)) return std::nullopt;
    return w;
}

}  // namespace krusk

#endif
