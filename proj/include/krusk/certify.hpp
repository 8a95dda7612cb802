#ifndef KRUSK_CERTIFY_HPP
#define KRUSK_CERTIFY_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "krusk/kruskal.hpp"
#include "krusk/tensor.hpp"

namespace krusk {

inline std::string mode_name(std::size_t s) {
    if (s < 26) return std::string(1, static_cast<char>('A' + s));
    return "mode" + std::to_string(s);
}

/// Result of the Kruskal sufficient condition. `bound` is kept as an exact
/// rational, (sum k_i - d + 1)/2, so the half-unit comparison never goes
/// through a floor. CERTIFIED asserts rank = r and essential uniqueness;
/// NOT_CERTIFIED asserts nothing.
struct UniquenessCertificate {
    std::vector<std::size_t> kruskal_ranks;
    std::size_t length = 0;
    std::size_t order = 0;
    mpq_class bound;
    bool certified = false;
    Backend backend = Backend::Exact;
    double tau = 0.0;
    std::string diagnostic;
};

template <class T>
UniquenessCertificate certify_uniqueness(const Decomposition<T>& dec, const Tolerance& tol = {}) {
    const std::size_t d = dec.order();
    if (d < 3)
        throw std::invalid_argument(
            "certify_uniqueness: a two-factor expression is never essentially unique "
            "unless r = 1; need d >= 3 modes");

    UniquenessCertificate cert;
    cert.length = dec.length;
    cert.order = d;
    cert.backend = FieldOps<T>::backend;
    cert.tau = FieldOps<T>::exact ? 0.0 : tol.tau;

    std::size_t sum = 0;
    for (std::size_t s = 0; s < d; ++s) {
        std::size_t k = kruskal_rank(dec.factors[s].columns(), tol);
        cert.kruskal_ranks.push_back(k);
        sum += k;
    }
    cert.bound = mpq_class(static_cast<long>(sum) - static_cast<long>(d) + 1, 2);
    cert.bound.canonicalize();
    const std::size_t need = 2 * dec.length + d - 1;
    cert.certified = sum >= need;
    if (!cert.certified) {
        std::size_t worst = 0;
        for (std::size_t s = 1; s < d; ++s)
            if (cert.kruskal_ranks[s] < cert.kruskal_ranks[worst]) worst = s;
        cert.diagnostic = "mode " + mode_name(worst) + " Kruskal rank " +
                          std::to_string(cert.kruskal_ranks[worst]) + "; need sum k >= " +
                          std::to_string(need) + ", have " + std::to_string(sum);
    }
    return cert;
}

/// Per-term, per-mode membership of factor vectors in the mode supports
/// A'_s = column span of the single-mode flattenings of T.
template <class T>
struct SupportReport {
    std::vector<Subspace<T>> mode_spans;            // A'_s per mode
    std::vector<std::vector<bool>> contained;       // [term][mode]
    bool all_contained = true;
};

template <class T>
bool tensors_equal(const Tensor<T>& a, const Tensor<T>& b, const Tolerance& tol = {}) {
    if (a.dims != b.dims) return false;
    if constexpr (FieldOps<T>::exact) {
        return a.entries == b.entries;
    } else {
        double scale = 0.0;
        for (const T& v : a.entries) scale = std::max(scale, FieldOps<T>::magnitude(v));
        for (const T& v : b.entries) scale = std::max(scale, FieldOps<T>::magnitude(v));
        if (scale == 0.0) return true;
        for (std::size_t i = 0; i < a.entries.size(); ++i)
            if (!FieldOps<T>::negligible(a.entries[i] - b.entries[i], scale, tol)) return false;
        return true;
    }
}

/// Checks compose(D) = T, then reports which factor vectors lie inside the
/// mode supports of T. A factor outside its support implies D.length >
/// rank(T); a certified decomposition therefore always reports all-contained.
template <class T>
SupportReport<T> support_containment_check(const Decomposition<T>& dec, const Tensor<T>& t,
                                           const Tolerance& tol = {}) {
    if (!tensors_equal(compose(dec), t, tol))
        throw std::invalid_argument("support_containment_check: compose(D) != T");

    SupportReport<T> rep;
    const std::size_t d = dec.order();
    for (std::size_t s = 0; s < d; ++s) {
        Matrix<T> flat = flattening(t, {s});
        rep.mode_spans.push_back(Subspace<T>::span(dec.dims[s], flat.columns(), tol));
    }
    rep.contained.assign(dec.length, std::vector<bool>(d, false));
    for (std::size_t j = 0; j < dec.length; ++j)
        for (std::size_t s = 0; s < d; ++s) {
            bool in = contains(rep.mode_spans[s], dec.factors[s].column(j), tol);
            rep.contained[j][s] = in;
            if (!in) rep.all_contained = false;
        }
    return rep;
}

}  // namespace krusk

#endif
