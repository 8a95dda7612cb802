#ifndef KRUSK_KRUSKAL_HPP
#define KRUSK_KRUSKAL_HPP

#include <algorithm>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "krusk/linalg.hpp"
#include "krusk/matrix.hpp"
#include "krusk/scalar.hpp"

namespace krusk {

namespace detail {

/// Visits all size-k index subsets of {0..n-1} in lexicographic order until
/// the callback returns false.
inline bool for_each_subset(std::size_t n, std::size_t k,
                            const std::function<bool(const std::vector<std::size_t>&)>& fn) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        if (!fn(idx)) return false;
        // advance
        std::size_t i = k;
        while (i > 0) {
            --i;
            if (idx[i] != i + n - k) {
                ++idx[i];
                for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
                break;
            }
            if (i == 0) return true;
        }
        if (k == 0) return true;
    }
}

template <class T>
bool vector_is_zero(const std::vector<T>& v, const Tolerance& tol) {
    double scale = 0.0;
    if constexpr (!FieldOps<T>::exact) {
        for (const T& x : v) scale = std::max(scale, FieldOps<T>::magnitude(x));
        if (scale == 0.0) return true;
        return false;
    } else {
        (void)tol;
        for (const T& x : v)
            if (!x.is_zero()) return false;
        return true;
    }
}

}  // namespace detail

/// Nonzero projective representatives in a fixed ambient dimension.
template <class T>
struct PointSet {
    std::size_t ambient = 0;
    std::vector<std::vector<T>> points;

    PointSet() = default;
    PointSet(std::size_t n, std::vector<std::vector<T>> pts, const Tolerance& tol = {})
        : ambient(n), points(std::move(pts)) {
        for (const auto& p : points) {
            if (p.size() != ambient)
                throw std::invalid_argument("PointSet: point dimension mismatch");
            if (detail::vector_is_zero(p, tol))
                throw std::invalid_argument("PointSet: zero vector is not a projective point");
        }
    }

    std::size_t size() const { return points.size(); }
};

/// Every subset of r representative vectors is linearly independent.
template <class T>
bool is_r_general_position(const PointSet<T>& s, std::size_t r, const Tolerance& tol = {}) {
    if (r < 1 || r > s.size())
        throw std::invalid_argument("is_r_general_position: r out of range [1, #S]");
    return detail::for_each_subset(s.size(), r, [&](const std::vector<std::size_t>& idx) {
        std::vector<std::vector<T>> sub;
        sub.reserve(r);
        for (std::size_t i : idx) sub.push_back(s.points[i]);
        Matrix<T> m = Matrix<T>::from_columns(s.ambient, sub);
        return rank(m, tol) == r;
    });
}

/// Largest r such that every r-subset is independent. Raw-vector
/// conventions: any zero vector gives 0; otherwise at least 1. Exhaustive
/// enumeration ascending from r = 1 with early exit.
template <class T>
std::size_t kruskal_rank(const std::vector<std::vector<T>>& vectors, const Tolerance& tol = {}) {
    if (vectors.empty()) throw std::invalid_argument("kruskal_rank: empty vector list");
    const std::size_t n = vectors[0].size();
    for (const auto& v : vectors) {
        if (v.size() != n) throw std::invalid_argument("kruskal_rank: mixed vector dimensions");
        if (detail::vector_is_zero(v, tol)) return 0;
    }
    const std::size_t cap = std::min(n, vectors.size());
    std::size_t k = 0;
    for (std::size_t r = 1; r <= cap; ++r) {
        bool all_independent =
            detail::for_each_subset(vectors.size(), r, [&](const std::vector<std::size_t>& idx) {
                std::vector<std::vector<T>> sub;
                sub.reserve(r);
                for (std::size_t i : idx) sub.push_back(vectors[i]);
                Matrix<T> m = Matrix<T>::from_columns(n, sub);
                return rank(m, tol) == r;
            });
        if (!all_independent) break;
        k = r;
    }
    return k;
}

template <class T>
std::size_t kruskal_rank(const PointSet<T>& s, const Tolerance& tol = {}) {
    return kruskal_rank(s.points, tol);
}

/// Two nonzero vectors representing the same projective point.
template <class T>
bool projectively_equal(const std::vector<T>& u, const std::vector<T>& v,
                        const Tolerance& tol = {}) {
    if (u.size() != v.size()) return false;
    Matrix<T> m = Matrix<T>::from_columns(u.size(), {u, v});
    return rank(m, tol) <= 1;
}

}  // namespace krusk

#endif
