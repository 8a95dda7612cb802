#ifndef KRUSK_MATRIX_HPP
#define KRUSK_MATRIX_HPP

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "krusk/scalar.hpp"

namespace krusk {

/// Dense row-major matrix over one scalar backend. Zero-sized shapes are
/// permitted internally (restrictions to trivial subspaces produce them);
/// file parsing enforces positive dimensions.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, FieldOps<T>::zero()) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_)
            throw std::invalid_argument("Matrix: entries length != rows*cols");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = FieldOps<T>::one();
        return m;
    }

    static Matrix from_columns(std::size_t n, const std::vector<std::vector<T>>& cols) {
        Matrix m(n, cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != n)
                throw std::invalid_argument("Matrix::from_columns: column length mismatch");
            for (std::size_t i = 0; i < n; ++i) m(i, j) = cols[j][i];
        }
        return m;
    }

    static Matrix from_rows(std::size_t n, const std::vector<std::vector<T>>& rows) {
        Matrix m(rows.size(), n);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != n)
                throw std::invalid_argument("Matrix::from_rows: row length mismatch");
            for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<T>& entries() const { return data_; }
    std::vector<T>& entries() { return data_; }

    std::vector<T> column(std::size_t j) const {
        std::vector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    std::vector<std::vector<T>> columns() const {
        std::vector<std::vector<T>> cs;
        cs.reserve(cols_);
        for (std::size_t j = 0; j < cols_; ++j) cs.push_back(column(j));
        return cs;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix product: shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T& aik = a(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

}  // namespace krusk

#endif
