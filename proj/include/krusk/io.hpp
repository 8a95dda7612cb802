#ifndef KRUSK_IO_HPP
#define KRUSK_IO_HPP

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "krusk/kruskal.hpp"
#include "krusk/rng.hpp"
#include "krusk/scalar.hpp"
#include "krusk/tensor.hpp"

namespace krusk {

using Json = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// ---- scalar formatting -----------------------------------------------------
//
// Exact scalars travel as strings "a/b" or "a/b+c/di" (lowest terms,
// denominator omitted when 1). Float scalars travel as [re, im] pairs.

inline std::string rational_to_string(const mpq_class& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline std::string scalar_to_string(const GaussRat& v) {
    std::string s = rational_to_string(v.re);
    if (v.im != 0) {
        mpq_class a = abs(v.im);
        s += (v.im > 0 ? "+" : "-");
        s += rational_to_string(a);
        s += "i";
    }
    return s;
}

namespace detail {

inline mpq_class parse_rational(const std::string& text, const std::string& where) {
    std::size_t slash = text.find('/');
    std::string num = slash == std::string::npos ? text : text.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
    if (num.empty() || den.empty())
        throw ParseError(where + ": malformed rational '" + text + "'");
    for (std::size_t i = 0; i < num.size(); ++i)
        if (!(std::isdigit(static_cast<unsigned char>(num[i])) || (i == 0 && num[i] == '-')))
            throw ParseError(where + ": malformed rational '" + text + "'");
    for (char c : den)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ParseError(where + ": malformed rational '" + text + "'");
    mpz_class n(num), d(den);
    if (d == 0) throw ParseError(where + ": division by zero in '" + text + "'");
    mpq_class q(n, d);
    q.canonicalize();
    return q;
}

}  // namespace detail

inline GaussRat scalar_from_string(std::string text, const std::string& where) {
    // strip spaces ("a/b+c/d i" and "a/b+c/di" are both accepted)
    std::string t;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw ParseError(where + ": empty scalar");

    bool imaginary_tail = t.back() == 'i';
    if (imaginary_tail) t.pop_back();
    if (t.empty()) return GaussRat(mpq_class(0), mpq_class(1));  // "i"

    // split on a sign that starts the second component (never at index 0,
    // never inside a component: components are [-]digits[/digits])
    std::size_t split = std::string::npos;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i] == '+' || t[i] == '-') { split = i; break; }

    if (split == std::string::npos) {
        mpq_class q = detail::parse_rational(t, where);
        return imaginary_tail ? GaussRat(mpq_class(0), q) : GaussRat(q);
    }
    if (!imaginary_tail)
        throw ParseError(where + ": two components but no trailing 'i' in '" + text + "'");
    mpq_class re = detail::parse_rational(t.substr(0, split), where);
    mpq_class im = detail::parse_rational(t.substr(split + 1), where);
    if (t[split] == '-') im = -im;
    return GaussRat(re, im);
}

template <class T>
Json scalar_to_json(const T& v) {
    if constexpr (FieldOps<T>::exact) {
        return scalar_to_string(v);
    } else {
        return Json::array({v.real(), v.imag()});
    }
}

template <class T>
T scalar_from_json(const Json& j, const std::string& where) {
    if constexpr (FieldOps<T>::exact) {
        if (!j.is_string())
            throw ParseError(where + ": exact scalar must be a string");
        return scalar_from_string(j.get<std::string>(), where);
    } else {
        if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
            throw ParseError(where + ": float scalar must be a [re, im] number pair");
        return Cplx(j[0].get<double>(), j[1].get<double>());
    }
}

// ---- instance documents ----------------------------------------------------

inline constexpr const char* kFormatVersion = "1";

template <class T>
Json tensor_to_json(const Tensor<T>& t) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["backend"] = backend_name(FieldOps<T>::backend);
    doc["kind"] = "tensor";
    doc["dims"] = t.dims;
    Json entries = Json::array();
    for (const T& v : t.entries) entries.push_back(scalar_to_json(v));
    doc["entries"] = std::move(entries);
    return doc;
}

template <class T>
Json decomposition_to_json(const Decomposition<T>& d) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["backend"] = backend_name(FieldOps<T>::backend);
    doc["kind"] = "decomposition";
    doc["dims"] = d.dims;
    doc["rank"] = d.length;
    Json factors = Json::array();
    for (std::size_t s = 0; s < d.order(); ++s) {
        Json flat = Json::array();  // column-major: term by term
        for (std::size_t j = 0; j < d.length; ++j)
            for (std::size_t i = 0; i < d.dims[s]; ++i)
                flat.push_back(scalar_to_json(d.factors[s](i, j)));
        factors.push_back(std::move(flat));
    }
    doc["factors"] = std::move(factors);
    return doc;
}

template <class T>
Json pointset_to_json(const PointSet<T>& p) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["backend"] = backend_name(FieldOps<T>::backend);
    doc["kind"] = "pointset";
    doc["dim"] = p.ambient;
    Json pts = Json::array();
    for (const auto& v : p.points) {
        Json pt = Json::array();
        for (const T& x : v) pt.push_back(scalar_to_json(x));
        pts.push_back(std::move(pt));
    }
    doc["points"] = std::move(pts);
    return doc;
}

using Instance = std::variant<Tensor<GaussRat>, Tensor<Cplx>, Decomposition<GaussRat>,
                              Decomposition<Cplx>, PointSet<GaussRat>, PointSet<Cplx>>;

namespace detail {

template <class T>
Instance parse_typed(const Json& doc, const std::string& kind) {
    if (kind == "tensor") {
        if (!doc.contains("dims") || !doc.contains("entries"))
            throw ParseError("tensor document needs 'dims' and 'entries'");
        std::vector<std::size_t> dims = doc["dims"].get<std::vector<std::size_t>>();
        std::size_t total = 1;
        for (std::size_t n : dims) total *= n;
        const Json& ej = doc["entries"];
        if (!ej.is_array() || ej.size() != total)
            throw ParseError("field 'entries': length " +
                             std::to_string(ej.is_array() ? ej.size() : 0) +
                             " does not match product of dims " + std::to_string(total));
        std::vector<T> entries;
        entries.reserve(ej.size());
        for (std::size_t i = 0; i < ej.size(); ++i)
            entries.push_back(scalar_from_json<T>(ej[i], "entries[" + std::to_string(i) + "]"));
        return Tensor<T>(std::move(dims), std::move(entries));
    }
    if (kind == "decomposition") {
        if (!doc.contains("dims") || !doc.contains("rank") || !doc.contains("factors"))
            throw ParseError("decomposition document needs 'dims', 'rank' and 'factors'");
        std::vector<std::size_t> dims = doc["dims"].get<std::vector<std::size_t>>();
        std::size_t r = doc["rank"].get<std::size_t>();
        const Json& fj = doc["factors"];
        if (!fj.is_array() || fj.size() != dims.size())
            throw ParseError("field 'factors': need one flat matrix per mode (" +
                             std::to_string(dims.size()) + ")");
        std::vector<Matrix<T>> factors;
        for (std::size_t s = 0; s < dims.size(); ++s) {
            const Json& mj = fj[s];
            const std::string where = "factors[" + std::to_string(s) + "]";
            if (!mj.is_array() || mj.size() != dims[s] * r)
                throw ParseError(where + ": length " +
                                 std::to_string(mj.is_array() ? mj.size() : 0) + " != " +
                                 std::to_string(dims[s]) + " x " + std::to_string(r));
            Matrix<T> m(dims[s], r);
            std::size_t pos = 0;
            for (std::size_t j = 0; j < r; ++j)
                for (std::size_t i = 0; i < dims[s]; ++i, ++pos)
                    m(i, j) = scalar_from_json<T>(mj[pos],
                                                  where + "[" + std::to_string(pos) + "]");
            factors.push_back(std::move(m));
        }
        return Decomposition<T>(std::move(dims), std::move(factors));
    }
    if (kind == "pointset") {
        if (!doc.contains("dim") || !doc.contains("points"))
            throw ParseError("pointset document needs 'dim' and 'points'");
        std::size_t n = doc["dim"].get<std::size_t>();
        const Json& pj = doc["points"];
        if (!pj.is_array()) throw ParseError("field 'points': must be an array");
        std::vector<std::vector<T>> points;
        for (std::size_t k = 0; k < pj.size(); ++k) {
            const std::string where = "points[" + std::to_string(k) + "]";
            const Json& v = pj[k];
            if (!v.is_array() || v.size() != n)
                throw ParseError(where + ": expected " + std::to_string(n) + " coordinates");
            std::vector<T> pt;
            for (std::size_t i = 0; i < n; ++i)
                pt.push_back(scalar_from_json<T>(v[i], where + "[" + std::to_string(i) + "]"));
            points.push_back(std::move(pt));
        }
        return PointSet<T>(n, std::move(points));
    }
    throw ParseError("unknown kind '" + kind + "'");
}

}  // namespace detail

inline Instance parse_instance(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("instance document must be a JSON object");
    if (!doc.contains("format_version") || doc["format_version"] != kFormatVersion)
        throw ParseError("unknown or missing format_version (expected \"1\")");
    if (!doc.contains("backend") || !doc.contains("kind"))
        throw ParseError("instance document needs 'backend' and 'kind'");
    std::string backend = doc["backend"].get<std::string>();
    std::string kind = doc["kind"].get<std::string>();
    try {
        if (backend == "exact") return detail::parse_typed<GaussRat>(doc, kind);
        if (backend == "float") return detail::parse_typed<Cplx>(doc, kind);
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(e.what());
    }
    throw ParseError("unknown backend '" + backend + "' (expected 'exact' or 'float')");
}

inline std::string dump_document(const Json& doc) { return doc.dump(2) + "\n"; }

inline Instance load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

// ---- seeded generation -------------------------------------------------

/// Deterministic for (dims, r, seed): same inputs, identical decomposition
/// on every platform. Integer entries uniform in [lo, hi]; columns are
/// resampled until nonzero.
template <class T>
Decomposition<T> gen_decomposition(const std::vector<std::size_t>& dims, std::size_t r,
                                   std::uint64_t seed, long lo = -3, long hi = 3) {
    if (r < 1) throw std::invalid_argument("gen_decomposition: r must be >= 1");
    if (lo > hi) throw std::invalid_argument("gen_decomposition: empty coefficient range");
    if (lo == 0 && hi == 0)
        throw std::invalid_argument("gen_decomposition: coefficient range must allow nonzero values");
    Rng rng(seed ^ 0x6b7275736bULL);
    std::vector<Matrix<T>> factors;
    for (std::size_t s = 0; s < dims.size(); ++s) {
        Matrix<T> m(dims[s], r);
        for (std::size_t j = 0; j < r; ++j) {
            while (true) {
                bool nonzero = false;
                for (std::size_t i = 0; i < dims[s]; ++i) {
                    long v = rng.uniform(lo, hi);
                    if (v != 0) nonzero = true;
                    if constexpr (FieldOps<T>::exact) {
                        m(i, j) = GaussRat(v);
                    } else {
                        m(i, j) = Cplx(static_cast<double>(v), 0.0);
                    }
                }
                if (nonzero) break;
            }
        }
        factors.push_back(std::move(m));
    }
    return Decomposition<T>(std::vector<std::size_t>(dims), std::move(factors));
}

}  // namespace krusk

#endif
