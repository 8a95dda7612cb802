#ifndef KRUSK_LEMMA_HPP
#define KRUSK_LEMMA_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "krusk/kruskal.hpp"
#include "krusk/linalg.hpp"

namespace krusk {

/// Two point sets of equal size r in the same ambient space. All lemma
/// machinery runs on the exact backend: generic-hyperplane arguments are
/// not robust under rounding.
struct LemmaInstance {
    std::size_t ambient = 0;
    PointSet<GaussRat> s;        // the set whose points are pairwise distinct
    PointSet<GaussRat> s_tilde;  // the set required to span W

    LemmaInstance(std::size_t n, PointSet<GaussRat> a, PointSet<GaussRat> b)
        : ambient(n), s(std::move(a)), s_tilde(std::move(b)) {
        if (s.ambient != n || s_tilde.ambient != n)
            throw std::invalid_argument("LemmaInstance: point set ambient dimension mismatch");
        if (s.size() != s_tilde.size())
            throw std::invalid_argument("LemmaInstance: the two point sets must have equal size");
    }

    std::size_t size() const { return s.size(); }
};

namespace detail {

inline std::size_t count_in(const Subspace<GaussRat>& sub,
                            const std::vector<std::vector<GaussRat>>& pts) {
    std::size_t c = 0;
    for (const auto& p : pts)
        if (contains(sub, p)) ++c;
    return c;
}

/// Canonical key of a span: serialized RREF of the matrix whose rows are
/// the spanning vectors. Equal spans get equal keys.
inline std::string span_key(std::size_t n, const std::vector<std::vector<GaussRat>>& vecs) {
    Matrix<GaussRat> m = Matrix<GaussRat>::from_rows(n, vecs);
    std::vector<std::size_t> piv = rref(m);
    std::string key;
    for (std::size_t i = 0; i < piv.size(); ++i)
        for (std::size_t j = 0; j < n; ++j) {
            key += m(i, j).re.get_str();
            key += ',';
            key += m(i, j).im.get_str();
            key += ';';
        }
    return key;
}

inline std::vector<std::vector<GaussRat>> rref_row_basis(std::size_t n,
                                                         const std::vector<std::vector<GaussRat>>& vecs) {
    Matrix<GaussRat> m = Matrix<GaussRat>::from_rows(n, vecs);
    std::vector<std::size_t> piv = rref(m);
    std::vector<std::vector<GaussRat>> basis;
    for (std::size_t i = 0; i < piv.size(); ++i) {
        std::vector<GaussRat> row(n);
        for (std::size_t j = 0; j < n; ++j) row[j] = m(i, j);
        basis.push_back(std::move(row));
    }
    return basis;
}

}  // namespace detail

/// One-hyperplane form of the lemma's hypothesis: if H holds at least n-1
/// points of S-tilde (projective dim(H) + 1), then S must meet H at least
/// as often.
inline bool hyperplane_instance_ok(const LemmaInstance& inst, const Subspace<GaussRat>& h) {
    if (h.ambient != inst.ambient || h.dim() != inst.ambient - 1)
        throw std::invalid_argument("hyperplane_instance_ok: H must have codimension 1");
    std::size_t in_tilde = detail::count_in(h, inst.s_tilde.points);
    if (in_tilde < inst.ambient - 1) return true;
    return detail::count_in(h, inst.s.points) >= in_tilde;
}

struct HypothesisViolation {
    Subspace<GaussRat> span;                  // the violating span L of an S-tilde subset
    std::vector<GaussRat> covector;           // functional of a witness hyperplane through L
    Subspace<GaussRat> hyperplane;            // its kernel
    std::size_t count_s = 0;                  // #(S  in the witness hyperplane)
    std::size_t count_s_tilde = 0;            // #(S~ in the witness hyperplane)
};

struct HypothesisResult {
    bool holds = false;
    std::optional<HypothesisViolation> violation;
};

/// Decides the lemma's universally quantified hyperplane hypothesis by a
/// finite reduction: it suffices to test the spans L of subsets of S-tilde.
/// For any hyperplane H, S~ meets H exactly where it meets L = <S~ n H>,
/// and a generic hyperplane through a violating L meets S exactly in S n L
/// and S~ exactly in S~ n L, so the hyperplane and subspace quantifiers
/// agree. Violations come with a concrete witness hyperplane built from a
/// separating functional, checkable by hyperplane_instance_ok.
inline HypothesisResult lemma_hypothesis(const LemmaInstance& inst) {
    const std::size_t n = inst.ambient;
    const std::size_t r = inst.size();
    {
        Matrix<GaussRat> mt = Matrix<GaussRat>::from_columns(n, inst.s_tilde.points);
        if (rank(mt) != n)
            throw std::invalid_argument("lemma_hypothesis: S-tilde must span the ambient space");
    }

    std::vector<std::string> seen;
    for (std::size_t size = 1; size + 1 <= n && size <= r; ++size) {
        bool bad = false;
        HypothesisResult res;
        detail::for_each_subset(r, size, [&](const std::vector<std::size_t>& idx) {
            std::vector<std::vector<GaussRat>> sub;
            for (std::size_t i : idx) sub.push_back(inst.s_tilde.points[i]);
            std::string key = detail::span_key(n, sub);
            if (std::find(seen.begin(), seen.end(), key) != seen.end()) return true;
            seen.push_back(key);

            auto basis = detail::rref_row_basis(n, sub);
            if (basis.size() >= n) return true;  // not a proper subspace
            Subspace<GaussRat> l(n, basis);
            std::size_t mu = detail::count_in(l, inst.s_tilde.points);
            if (mu < n - 1) return true;
            std::size_t in_s = detail::count_in(l, inst.s.points);
            if (in_s >= mu) return true;

            // violating L: build a hyperplane through L avoiding every point
            // of S and S~ outside L
            std::vector<std::vector<GaussRat>> avoid;
            for (const auto& p : inst.s.points)
                if (!contains(l, p)) avoid.push_back(p);
            for (const auto& p : inst.s_tilde.points)
                if (!contains(l, p)) avoid.push_back(p);
            HypothesisViolation v;
            v.span = l;
            v.covector = separating_functional(l, avoid);
            v.hyperplane = null_space(Matrix<GaussRat>::from_rows(n, {v.covector}));
            v.count_s = in_s;
            v.count_s_tilde = mu;
            res.violation = std::move(v);
            bad = true;
            return false;
        });
        if (bad) {
            res.holds = false;
            return res;
        }
    }
    HypothesisResult ok;
    ok.holds = true;
    return ok;
}

/// Coordinate reformulation checked for one covector x: zeros of tMx mark
/// columns lying in the hyperplane ker x. Triggered when S-tilde puts at
/// least n-1 points on the hyperplane, this requires
/// nonzeros(tMx) <= nonzeros(tM~x), matching hyperplane_instance_ok exactly
/// under the enforced span assumption (rank M~ = n).
inline bool lemma_hypothesis_matrix_form(const LemmaInstance& inst,
                                         const std::vector<GaussRat>& x) {
    if (x.size() != inst.ambient)
        throw std::invalid_argument("lemma_hypothesis_matrix_form: covector dimension mismatch");
    bool nonzero = false;
    for (const auto& c : x)
        if (!c.is_zero()) nonzero = true;
    if (!nonzero) throw std::invalid_argument("lemma_hypothesis_matrix_form: x must be nonzero");

    const std::size_t r = inst.size();
    Matrix<GaussRat> mt = Matrix<GaussRat>::from_columns(inst.ambient, inst.s_tilde.points);
    std::size_t rank_mt = rank(mt);

    std::size_t nnz_tilde = 0, nnz_s = 0;
    for (const auto& q : inst.s_tilde.points)
        if (!dot(x, q).is_zero()) ++nnz_tilde;
    for (const auto& p : inst.s.points)
        if (!dot(x, p).is_zero()) ++nnz_s;

    if (nnz_tilde > r - rank_mt + 1) return true;  // hypothesis not triggered
    return nnz_s <= nnz_tilde;
}

/// The lemma's conclusion: S and S-tilde coincide as multisets of
/// projective points.
inline bool permutation_lemma_conclusion(const LemmaInstance& inst) {
    auto canon = [](const std::vector<std::vector<GaussRat>>& pts) {
        std::vector<std::vector<GaussRat>> out;
        for (const auto& p : pts) {
            std::size_t lead = 0;
            while (p[lead].is_zero()) ++lead;
            std::vector<GaussRat> c(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) c[i] = p[i] / p[lead];
            out.push_back(std::move(c));
        }
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                int cm = compare(a[i], b[i]);
                if (cm != 0) return cm < 0;
            }
            return false;
        });
        return out;
    };
    return canon(inst.s.points) == canon(inst.s_tilde.points);
}

/// Both sides of the proof's counting relations for a flag step at L.
struct FlagReport {
    std::size_t mu = 0;             // #(S~ n L)
    std::size_t in_s = 0;           // #(S n L)
    std::size_t planes = 0;         // number of M_alpha
    std::size_t tilde_total = 0;    // mu + sum_alpha #(S~ n (M_alpha \ L))
    std::size_t s_total = 0;        // #(S n L) + sum_alpha #(S n (M_alpha \ L))
    std::size_t r = 0;
    bool identity_holds = false;    // tilde_total == r
    bool inequality_holds = false;  // s_total <= r
};

/// L must be a proper span of S-tilde points holding at least dim(L) of
/// them (projective dim + 1). M_alpha are the next-dimension planes through
/// L holding at least mu + 1 points of S-tilde; every S~ point outside L
/// lands in exactly one, every S point in at most one.
inline FlagReport flag_partition_counts(const LemmaInstance& inst, const Subspace<GaussRat>& l) {
    const std::size_t n = inst.ambient;
    if (l.ambient != n) throw std::invalid_argument("flag_partition_counts: ambient mismatch");
    if (l.dim() == 0 || l.dim() >= n)
        throw std::invalid_argument("flag_partition_counts: L must be proper and nonzero");

    std::vector<std::vector<GaussRat>> tilde_in_l;
    for (const auto& q : inst.s_tilde.points)
        if (contains(l, q)) tilde_in_l.push_back(q);
    if (tilde_in_l.size() < l.dim())
        throw std::invalid_argument(
            "flag_partition_counts: L must hold at least dim_proj(L)+1 points of S-tilde");
    if (detail::rref_row_basis(n, tilde_in_l).size() != l.dim())
        throw std::invalid_argument("flag_partition_counts: L must be spanned by points of S-tilde");

    FlagReport rep;
    rep.r = inst.size();
    rep.mu = tilde_in_l.size();
    rep.in_s = detail::count_in(l, inst.s.points);

    // enumerate the planes L + <q> over q in S~ \ L, deduplicated
    std::vector<std::string> seen;
    std::vector<Subspace<GaussRat>> planes;
    for (const auto& q : inst.s_tilde.points) {
        if (contains(l, q)) continue;
        std::vector<std::vector<GaussRat>> gens = l.basis;
        gens.push_back(q);
        std::string key = detail::span_key(n, gens);
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(key);
        planes.emplace_back(n, detail::rref_row_basis(n, gens));
    }
    // keep only planes with at least mu + 1 points of S-tilde (each holds
    // the mu points of L plus its generator, so all qualify; the filter is
    // part of the contract)
    std::vector<Subspace<GaussRat>> kept;
    for (auto& m : planes)
        if (detail::count_in(m, inst.s_tilde.points) >= rep.mu + 1) kept.push_back(std::move(m));

    rep.planes = kept.size();
    rep.tilde_total = rep.mu;
    rep.s_total = rep.in_s;
    for (const auto& m : kept) {
        rep.tilde_total += detail::count_in(m, inst.s_tilde.points) - rep.mu;
        for (const auto& p : inst.s.points)
            if (contains(m, p) && !contains(l, p)) ++rep.s_total;
    }
    rep.identity_holds = rep.tilde_total == rep.r;
    rep.inequality_holds = rep.s_total <= rep.r;
    return rep;
}

}  // namespace krusk

#endif
