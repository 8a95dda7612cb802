#ifndef KRUSK_SCALAR_HPP
#define KRUSK_SCALAR_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace krusk {

enum class Backend { Exact, Float };

inline const char* backend_name(Backend b) {
    return b == Backend::Exact ? "exact" : "float";
}

/// Relative threshold used by the float backend; ignored by the exact one.
struct Tolerance {
    double tau = 1e-9;

    Tolerance() = default;
    explicit Tolerance(double t) : tau(t) {
        if (!(t >= 0.0)) throw std::invalid_argument("Tolerance: tau must be >= 0");
    }
};

/// Gaussian rational: complex number with rational real and imaginary parts.
/// mpq_class values are kept canonical (lowest terms, positive denominator).
struct GaussRat {
    mpq_class re;
    mpq_class im;

    GaussRat() : re(0), im(0) {}
    GaussRat(long v) : re(v), im(0) {}  // NOLINT: implicit by design
    GaussRat(mpq_class r) : re(std::move(r)), im(0) {}
    GaussRat(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}

    static GaussRat from_fraction(long num, long den) {
        if (den == 0) throw std::invalid_argument("GaussRat: zero denominator");
        mpq_class q(num, den);
        q.canonicalize();
        return GaussRat(q);
    }

    bool is_zero() const { return re == 0 && im == 0; }

    GaussRat operator-() const { return GaussRat(-re, -im); }

    GaussRat& operator+=(const GaussRat& o) { re += o.re; im += o.im; return *this; }
    GaussRat& operator-=(const GaussRat& o) { re -= o.re; im -= o.im; return *this; }
    GaussRat& operator*=(const GaussRat& o) {
        mpq_class r = re * o.re - im * o.im;
        mpq_class i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    GaussRat& operator/=(const GaussRat& o) {
        if (o.is_zero()) throw std::domain_error("GaussRat: division by zero");
        mpq_class n = o.re * o.re + o.im * o.im;
        mpq_class r = (re * o.re + im * o.im) / n;
        mpq_class i = (im * o.re - re * o.im) / n;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }

    friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
    friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
    friend GaussRat operator*(GaussRat a, const GaussRat& b) { return a *= b; }
    friend GaussRat operator/(GaussRat a, const GaussRat& b) { return a /= b; }
    friend bool operator==(const GaussRat& a, const GaussRat& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }
};

/// Total order used for deterministic sorting (not a field order).
inline int compare(const GaussRat& a, const GaussRat& b) {
    int c = mpq_cmp(a.re.get_mpq_t(), b.re.get_mpq_t());
    if (c != 0) return c;
    return mpq_cmp(a.im.get_mpq_t(), b.im.get_mpq_t());
}

using Cplx = std::complex<double>;

template <class T>
struct FieldOps;

template <>
struct FieldOps<GaussRat> {
    static constexpr Backend backend = Backend::Exact;
    static constexpr bool exact = true;
    static bool negligible(const GaussRat& v, double /*scale*/, const Tolerance& /*tol*/) {
        return v.is_zero();
    }
    static double magnitude(const GaussRat& v) {
        return std::abs(v.re.get_d()) + std::abs(v.im.get_d());
    }
    static GaussRat zero() { return GaussRat(); }
    static GaussRat one() { return GaussRat(1); }
};

template <>
struct FieldOps<Cplx> {
    static constexpr Backend backend = Backend::Float;
    static constexpr bool exact = false;
    static bool negligible(const Cplx& v, double scale, const Tolerance& tol) {
        return std::abs(v) <= tol.tau * scale;
    }
    static double magnitude(const Cplx& v) { return std::abs(v); }
    static Cplx zero() { return {0.0, 0.0}; }
    static Cplx one() { return {1.0, 0.0}; }
};

}  // namespace krusk

#endif
