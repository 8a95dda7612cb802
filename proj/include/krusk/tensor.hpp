#ifndef KRUSK_TENSOR_HPP
#define KRUSK_TENSOR_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "krusk/kruskal.hpp"
#include "krusk/linalg.hpp"
#include "krusk/matrix.hpp"
#include "krusk/scalar.hpp"

namespace krusk {

/// Dense d-way array, row-major (last index fastest).
template <class T>
struct Tensor {
    std::vector<std::size_t> dims;
    std::vector<T> entries;

    Tensor() = default;
    Tensor(std::vector<std::size_t> d, std::vector<T> e)
        : dims(std::move(d)), entries(std::move(e)) {
        validate();
    }
    explicit Tensor(std::vector<std::size_t> d) : dims(std::move(d)) {
        std::size_t total = 1;
        for (std::size_t n : dims) total *= n;
        entries.assign(total, FieldOps<T>::zero());
        validate();
    }

    std::size_t order() const { return dims.size(); }

    std::size_t offset(const std::vector<std::size_t>& idx) const {
        std::size_t off = 0;
        for (std::size_t s = 0; s < dims.size(); ++s) off = off * dims[s] + idx[s];
        return off;
    }

    T& at(const std::vector<std::size_t>& idx) { return entries[offset(idx)]; }
    const T& at(const std::vector<std::size_t>& idx) const { return entries[offset(idx)]; }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.dims == b.dims && a.entries == b.entries;
    }

private:
    void validate() const {
        if (dims.size() < 2) throw std::invalid_argument("Tensor: order must be >= 2");
        std::size_t total = 1;
        for (std::size_t n : dims) {
            if (n < 1) throw std::invalid_argument("Tensor: every dimension must be >= 1");
            total *= n;
        }
        if (entries.size() != total)
            throw std::invalid_argument("Tensor: entries length " + std::to_string(entries.size()) +
                                        " != product of dims " + std::to_string(total));
    }
};

/// Sum of r rank-1 terms; column j of the mode-s factor is the mode-s vector
/// of term j. Zero columns are rejected unless explicitly permitted (needed
/// for negative tests on degenerate expressions).
template <class T>
struct Decomposition {
    std::vector<std::size_t> dims;
    std::size_t length = 0;
    std::vector<Matrix<T>> factors;

    Decomposition() = default;
    Decomposition(std::vector<std::size_t> d, std::vector<Matrix<T>> f,
                  bool allow_degenerate = false, const Tolerance& tol = {})
        : dims(std::move(d)), factors(std::move(f)) {
        if (dims.size() < 2) throw std::invalid_argument("Decomposition: need d >= 2 modes");
        if (factors.size() != dims.size())
            throw std::invalid_argument("Decomposition: one factor matrix per mode required");
        length = factors.empty() ? 0 : factors[0].cols();
        if (length < 1) throw std::invalid_argument("Decomposition: length r must be >= 1");
        for (std::size_t s = 0; s < dims.size(); ++s) {
            if (factors[s].rows() != dims[s] || factors[s].cols() != length)
                throw std::invalid_argument("Decomposition: factor " + std::to_string(s) +
                                            " must be " + std::to_string(dims[s]) + " x " +
                                            std::to_string(length));
            if (!allow_degenerate) {
                for (std::size_t j = 0; j < length; ++j)
                    if (detail::vector_is_zero(factors[s].column(j), tol))
                        throw std::invalid_argument("Decomposition: zero column in mode " +
                                                    std::to_string(s) + ", term " +
                                                    std::to_string(j));
            }
        }
    }

    std::size_t order() const { return dims.size(); }
};

template <class T>
Tensor<T> compose(const Decomposition<T>& dec) {
    Tensor<T> t(dec.dims);
    const std::size_t d = dec.order();
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t off = 0; off < t.entries.size(); ++off) {
        T sum = FieldOps<T>::zero();
        for (std::size_t j = 0; j < dec.length; ++j) {
            T prod = FieldOps<T>::one();
            for (std::size_t s = 0; s < d; ++s) prod *= dec.factors[s](idx[s], j);
            sum += prod;
        }
        t.entries[off] = sum;
        // increment row-major multi-index
        for (std::size_t s = d; s-- > 0;) {
            if (++idx[s] < dec.dims[s]) break;
            idx[s] = 0;
        }
    }
    return t;
}

/// Matrix of T as a map from the dual of the row-mode product to the
/// product of the remaining modes. Multi-indices run row-major within each
/// group, modes in increasing order.
template <class T>
Matrix<T> flattening(const Tensor<T>& t, const std::vector<std::size_t>& row_modes) {
    const std::size_t d = t.order();
    std::vector<bool> in_rows(d, false);
    for (std::size_t m : row_modes) {
        if (m >= d) throw std::invalid_argument("flattening: mode index out of range");
        if (in_rows[m]) throw std::invalid_argument("flattening: repeated mode index");
        in_rows[m] = true;
    }
    if (row_modes.empty() || row_modes.size() >= d)
        throw std::invalid_argument("flattening: row modes must be a nonempty proper subset");

    std::vector<std::size_t> rmodes, cmodes;
    for (std::size_t s = 0; s < d; ++s) (in_rows[s] ? rmodes : cmodes).push_back(s);
    std::size_t nrows = 1, ncols = 1;
    for (std::size_t s : rmodes) nrows *= t.dims[s];
    for (std::size_t s : cmodes) ncols *= t.dims[s];

    Matrix<T> m(nrows, ncols);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t off = 0; off < t.entries.size(); ++off) {
        std::size_t ri = 0, ci = 0;
        for (std::size_t s : rmodes) ri = ri * t.dims[s] + idx[s];
        for (std::size_t s : cmodes) ci = ci * t.dims[s] + idx[s];
        m(ri, ci) = t.entries[off];
        for (std::size_t s = d; s-- > 0;) {
            if (++idx[s] < t.dims[s]) break;
            idx[s] = 0;
        }
    }
    return m;
}

template <class T>
std::vector<std::size_t> multilinear_ranks(const Tensor<T>& t, const Tolerance& tol = {}) {
    std::vector<std::size_t> r;
    r.reserve(t.order());
    for (std::size_t s = 0; s < t.order(); ++s) r.push_back(rank(flattening(t, {s}), tol));
    return r;
}

/// Max single-mode flattening rank: a lower bound for the rank of T (each
/// flattening of a length-r expression has rank <= r). Not tight in general.
template <class T>
std::size_t rank_lower_bound(const Tensor<T>& t, const Tolerance& tol = {}) {
    std::size_t best = 0;
    for (std::size_t r : multilinear_ranks(t, tol)) best = std::max(best, r);
    return best;
}

}  // namespace krusk

#endif
