#ifndef KRUSK_TESTS_HELPERS_HPP
#define KRUSK_TESTS_HELPERS_HPP

#include <vector>

#include "krusk/matrix.hpp"
#include "krusk/rng.hpp"
#include "krusk/scalar.hpp"

namespace krusk::testing {

inline GaussRat q(long v) { return GaussRat(v); }

inline GaussRat q(long num, long den) { return GaussRat::from_fraction(num, den); }

inline std::vector<GaussRat> qvec(std::initializer_list<long> vals) {
    std::vector<GaussRat> v;
    for (long x : vals) v.emplace_back(x);
    return v;
}

inline std::vector<GaussRat> unit(std::size_t n, std::size_t i) {
    std::vector<GaussRat> v(n);
    v[i] = GaussRat(1);
    return v;
}

inline Matrix<GaussRat> qmat(std::size_t rows, std::size_t cols,
                             std::initializer_list<long> entries) {
    std::vector<GaussRat> e;
    for (long x : entries) e.emplace_back(x);
    return Matrix<GaussRat>(rows, cols, std::move(e));
}

inline Matrix<GaussRat> random_int_matrix(Rng& rng, std::size_t rows, std::size_t cols, long lo,
                                          long hi) {
    Matrix<GaussRat> m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = GaussRat(rng.uniform(lo, hi));
    return m;
}

inline Matrix<Cplx> to_float(const Matrix<GaussRat>& m) {
    Matrix<Cplx> f(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            f(i, j) = Cplx(m(i, j).re.get_d(), m(i, j).im.get_d());
    return f;
}

}  // namespace krusk::testing

#endif
