#ifndef KRUSK_LINALG_HPP
#define KRUSK_LINALG_HPP

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "krusk/matrix.hpp"
#include "krusk/rng.hpp"
#include "krusk/scalar.hpp"

namespace krusk {

namespace detail {

template <class T>
double max_magnitude(const Matrix<T>& m) {
    double s = 0.0;
    for (const T& v : m.entries()) {
        double a = FieldOps<T>::magnitude(v);
        if (a > s) s = a;
    }
    return s;
}

}  // namespace detail

/// Rank. Exact backend: fraction-free Bareiss-style elimination (every
/// division is exact, intermediate growth stays controlled). Float backend:
/// partially pivoted elimination; a pivot counts iff its magnitude exceeds
/// tau times the largest entry magnitude of the input.
template <class T>
std::size_t rank(Matrix<T> m, const Tolerance& tol = {}) {
    const std::size_t rows = m.rows(), cols = m.cols();
    if (rows == 0 || cols == 0) return 0;
    const double scale = detail::max_magnitude(m);
    if (!FieldOps<T>::exact && scale == 0.0) return 0;

    std::size_t r = 0;
    T prev = FieldOps<T>::one();
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        // pivot search: first nonzero (exact) / largest magnitude (float)
        std::size_t piv = rows;
        if constexpr (FieldOps<T>::exact) {
            for (std::size_t i = r; i < rows; ++i)
                if (!FieldOps<T>::negligible(m(i, c), scale, tol)) { piv = i; break; }
        } else {
            double best = 0.0;
            for (std::size_t i = r; i < rows; ++i) {
                double a = FieldOps<T>::magnitude(m(i, c));
                if (a > best) { best = a; piv = i; }
            }
            if (piv < rows && FieldOps<T>::negligible(m(piv, c), scale, tol)) piv = rows;
        }
        if (piv == rows) continue;
        if (piv != r)
            for (std::size_t j = c; j < cols; ++j) std::swap(m(piv, j), m(r, j));

        if constexpr (FieldOps<T>::exact) {
            for (std::size_t i = r + 1; i < rows; ++i) {
                for (std::size_t j = c + 1; j < cols; ++j)
                    m(i, j) = (m(r, c) * m(i, j) - m(i, c) * m(r, j)) / prev;
                m(i, c) = FieldOps<T>::zero();
            }
            prev = m(r, c);
        } else {
            for (std::size_t i = r + 1; i < rows; ++i) {
                T f = m(i, c) / m(r, c);
                for (std::size_t j = c + 1; j < cols; ++j) m(i, j) -= f * m(r, j);
                m(i, c) = FieldOps<T>::zero();
            }
        }
        ++r;
    }
    return r;
}

/// Reduced row echelon form in place; returns pivot column indices.
template <class T>
std::vector<std::size_t> rref(Matrix<T>& m, const Tolerance& tol = {}) {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::vector<std::size_t> pivots;
    if (rows == 0 || cols == 0) return pivots;
    const double scale = detail::max_magnitude(m);
    if (!FieldOps<T>::exact && scale == 0.0) return pivots;

    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = rows;
        if constexpr (FieldOps<T>::exact) {
            for (std::size_t i = r; i < rows; ++i)
                if (!m(i, c).is_zero()) { piv = i; break; }
        } else {
            double best = 0.0;
            for (std::size_t i = r; i < rows; ++i) {
                double a = FieldOps<T>::magnitude(m(i, c));
                if (a > best) { best = a; piv = i; }
            }
            if (piv < rows && FieldOps<T>::negligible(m(piv, c), scale, tol)) piv = rows;
        }
        if (piv == rows) {
            if constexpr (!FieldOps<T>::exact)
                for (std::size_t i = r; i < rows; ++i) m(i, c) = FieldOps<T>::zero();
            continue;
        }
        if (piv != r)
            for (std::size_t j = 0; j < cols; ++j) std::swap(m(piv, j), m(r, j));
        T inv = FieldOps<T>::one() / m(r, c);
        for (std::size_t j = c; j < cols; ++j) m(r, j) = m(r, j) * inv;
        m(r, c) = FieldOps<T>::one();
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            T f = m(i, c);
            if (FieldOps<T>::exact ? !FieldOps<T>::negligible(f, scale, tol) : true) {
                for (std::size_t j = c; j < cols; ++j) m(i, j) -= f * m(r, j);
            }
            m(i, c) = FieldOps<T>::zero();
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

/// Linear subspace of a fixed ambient space, stored as an independent basis.
template <class T>
struct Subspace {
    std::size_t ambient = 0;
    std::vector<std::vector<T>> basis;

    Subspace() = default;
    Subspace(std::size_t n, std::vector<std::vector<T>> b, const Tolerance& tol = {})
        : ambient(n), basis(std::move(b)) {
        for (const auto& v : basis)
            if (v.size() != ambient)
                throw std::invalid_argument("Subspace: basis vector dimension mismatch");
        if (!basis.empty()) {
            Matrix<T> m = Matrix<T>::from_columns(ambient, basis);
            if (rank(m, tol) != basis.size())
                throw std::invalid_argument("Subspace: basis vectors are dependent");
        }
    }

    std::size_t dim() const { return basis.size(); }

    static Subspace zero(std::size_t n) { return Subspace(n, {}); }

    static Subspace full(std::size_t n) {
        std::vector<std::vector<T>> b(n, std::vector<T>(n, FieldOps<T>::zero()));
        for (std::size_t i = 0; i < n; ++i) b[i][i] = FieldOps<T>::one();
        return Subspace(n, std::move(b));
    }

    /// Span of arbitrary vectors: keeps an independent subset (pivot columns).
    static Subspace span(std::size_t n, const std::vector<std::vector<T>>& vecs,
                         const Tolerance& tol = {}) {
        if (vecs.empty()) return zero(n);
        Matrix<T> m = Matrix<T>::from_columns(n, vecs);
        Matrix<T> work = m;
        std::vector<std::size_t> piv = rref(work, tol);
        std::vector<std::vector<T>> b;
        b.reserve(piv.size());
        for (std::size_t c : piv) b.push_back(m.column(c));
        Subspace s;
        s.ambient = n;
        s.basis = std::move(b);
        return s;
    }
};

template <class T>
bool contains(const Subspace<T>& s, const std::vector<T>& v, const Tolerance& tol = {}) {
    if (v.size() != s.ambient)
        throw std::invalid_argument("contains: vector dimension != ambient dimension");
    Matrix<T> m(s.ambient, s.dim() + 1);
    for (std::size_t j = 0; j < s.dim(); ++j)
        for (std::size_t i = 0; i < s.ambient; ++i) m(i, j) = s.basis[j][i];
    for (std::size_t i = 0; i < s.ambient; ++i) m(i, s.dim()) = v[i];
    return rank(m, tol) == s.dim();
}

/// Basis of the right kernel of M; dim = cols - rank.
template <class T>
Subspace<T> null_space(const Matrix<T>& m, const Tolerance& tol = {}) {
    const std::size_t cols = m.cols();
    Matrix<T> work = m;
    std::vector<std::size_t> piv = rref(work, tol);
    std::vector<bool> is_pivot(cols, false);
    for (std::size_t c : piv) is_pivot[c] = true;

    std::vector<std::vector<T>> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<T> v(cols, FieldOps<T>::zero());
        v[free] = FieldOps<T>::one();
        for (std::size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -work(k, free);
        basis.push_back(std::move(v));
    }
    Subspace<T> s;
    s.ambient = cols;
    s.basis = std::move(basis);
    return s;
}

/// Annihilator of a subspace: covectors x with x . b = 0 for every basis
/// vector b (bilinear pairing, no conjugation).
template <class T>
Subspace<T> annihilator(const Subspace<T>& s, const Tolerance& tol = {}) {
    if (s.dim() == 0) return Subspace<T>::full(s.ambient);
    Matrix<T> rows = Matrix<T>::from_rows(s.ambient, s.basis);
    return null_space(rows, tol);
}

/// Slack of the Sylvester rank inequality
///   rank(M) >= rank(M|_{Uperp x B*}) + rank(M|_{A* x Vperp}) - rank(M|_{Uperp x Vperp})
/// for M in A (x) B, U in A, V in B. Nonnegative over the exact backend.
template <class T>
long sylvester_defect(const Matrix<T>& m, const Subspace<T>& u, const Subspace<T>& v,
                      const Tolerance& tol = {}) {
    if (u.ambient != m.rows() || v.ambient != m.cols())
        throw std::invalid_argument("sylvester_defect: subspace ambient dims must match matrix shape");
    Subspace<T> uperp = annihilator(u, tol);
    Subspace<T> vperp = annihilator(v, tol);
    Matrix<T> p = uperp.dim() ? Matrix<T>::from_rows(m.rows(), uperp.basis)
                              : Matrix<T>(0, m.rows());
    Matrix<T> q = vperp.dim() ? Matrix<T>::from_rows(m.cols(), vperp.basis)
                              : Matrix<T>(0, m.cols());
    Matrix<T> left = p * m;                  // restriction to Uperp x B*
    Matrix<T> right = m * q.transpose();     // restriction to A* x Vperp
    Matrix<T> both = left * q.transpose();   // restriction to Uperp x Vperp
    long total = static_cast<long>(rank(m, tol));
    long sum = static_cast<long>(rank(left, tol)) + static_cast<long>(rank(right, tol)) -
               static_cast<long>(rank(both, tol));
    return total - sum;
}

inline GaussRat dot(const std::vector<GaussRat>& x, const std::vector<GaussRat>& y) {
    GaussRat s;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

/// Covector vanishing on L and nonzero on every `avoid` vector. Exact
/// backend only. Candidates are seeded small-integer combinations of an
/// annihilator basis; over an infinite field a generic combination works,
/// so budget exhaustion indicates a bug rather than nonexistence.
inline std::vector<GaussRat> separating_functional(const Subspace<GaussRat>& l,
                                                   const std::vector<std::vector<GaussRat>>& avoid) {
    for (const auto& a : avoid)
        if (contains(l, a))
            throw std::invalid_argument(
                "separating_functional: an avoid vector lies in L; no such functional exists");
    Subspace<GaussRat> ann = annihilator(l);
    if (ann.dim() == 0)
        throw std::invalid_argument("separating_functional: L is the whole space");

    auto verify = [&](const std::vector<GaussRat>& x) {
        bool nonzero = false;
        for (const GaussRat& c : x)
            if (!c.is_zero()) { nonzero = true; break; }
        if (!nonzero) return false;
        for (const auto& a : avoid)
            if (dot(x, a).is_zero()) return false;
        return true;
    };

    // First candidate: plain sum of the annihilator basis.
    std::vector<GaussRat> x(l.ambient);
    for (const auto& b : ann.basis)
        for (std::size_t i = 0; i < l.ambient; ++i) x[i] += b[i];
    if (verify(x)) return x;

    Rng rng(0x5eed5eedULL + 1315423911ULL * l.ambient + avoid.size());
    const int budget = 256;
    for (int attempt = 0; attempt < budget; ++attempt) {
        long bound = 2 + attempt / 32;
        std::fill(x.begin(), x.end(), GaussRat());
        for (const auto& b : ann.basis) {
            GaussRat coeff(rng.uniform(-bound, bound));
            for (std::size_t i = 0; i < l.ambient; ++i) x[i] += coeff * b[i];
        }
        if (verify(x)) return x;
    }
    throw std::logic_error("separating_functional: retry budget exhausted (implementation bug)");
}

}  // namespace krusk

#endif
