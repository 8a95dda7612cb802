// krusk: certify essential uniqueness of CP decompositions via Kruskal's
// condition, compute Kruskal ranks, compare decompositions, and check the
// permutation-lemma machinery on concrete instances.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "krusk/certify.hpp"
#include "krusk/equivalence.hpp"
#include "krusk/io.hpp"
#include "krusk/lemma.hpp"
#include "krusk/linalg.hpp"

namespace {

using namespace krusk;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::string backend = "exact";
    double tol = 1e-9;
    std::uint64_t seed = 0;
    bool json = false;
};

void emit(const Options& opt, const Json& report, const std::string& text) {
    if (opt.json)
        std::cout << dump_document(report);
    else
        std::cout << text;
}

int fail_usage(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return kExitUsage;
}

template <class T>
std::string scalar_text(const T& v) {
    if constexpr (FieldOps<T>::exact) {
        return scalar_to_string(v);
    } else {
        std::ostringstream os;
        os << v.real() << (v.imag() < 0 ? "" : "+") << v.imag() << "i";
        return os.str();
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write file: " + path);
    out << content;
}

// ---- krank ---------------------------------------------------------------

template <class T>
int run_krank(const PointSet<T>& ps, const Options& opt) {
    Tolerance tol(opt.tol);
    std::size_t k = kruskal_rank(ps, tol);
    Json rep;
    rep["report_version"] = "1";
    rep["command"] = "krank";
    rep["backend"] = backend_name(FieldOps<T>::backend);
    if (!FieldOps<T>::exact) rep["tol"] = tol.tau;
    rep["points"] = ps.size();
    rep["dim"] = ps.ambient;
    rep["kruskal_rank"] = k;
    emit(opt, rep, "kruskal rank: " + std::to_string(k) + "\n");
    return kExitOk;
}

// ---- certify ---------------------------------------------------------------

Json certificate_to_json(const UniquenessCertificate& c) {
    Json j;
    j["kruskal_ranks"] = c.kruskal_ranks;
    j["rank"] = c.length;
    j["order"] = c.order;
    j["bound"] = rational_to_string(c.bound);
    j["verdict"] = c.certified ? "CERTIFIED" : "NOT_CERTIFIED";
    j["backend"] = backend_name(c.backend);
    j["tol"] = c.tau;
    if (!c.diagnostic.empty()) j["diagnostic"] = c.diagnostic;
    return j;
}

template <class T>
int run_certify(const Decomposition<T>& dec, const Options& opt) {
    Tolerance tol(opt.tol);
    UniquenessCertificate cert = certify_uniqueness(dec, tol);
    Json rep;
    rep["report_version"] = "1";
    rep["command"] = "certify";
    rep["certificate"] = certificate_to_json(cert);
    std::string text = "k = (";
    for (std::size_t s = 0; s < cert.kruskal_ranks.size(); ++s)
        text += (s ? "," : "") + std::to_string(cert.kruskal_ranks[s]);
    text += "), r = " + std::to_string(cert.length) + ", bound " +
            rational_to_string(cert.bound) + " -> " +
            (cert.certified ? "CERTIFIED" : "NOT_CERTIFIED") + "\n";
    if (!cert.diagnostic.empty()) text += cert.diagnostic + "\n";
    emit(opt, rep, text);
    return cert.certified ? kExitOk : kExitNegative;
}

// ---- compose ---------------------------------------------------------------

template <class T>
int run_compose(const Decomposition<T>& dec, const std::string& out, const Options& opt) {
    Tensor<T> t = compose(dec);
    std::string doc = dump_document(tensor_to_json(t));
    if (out.empty()) {
        std::cout << doc;
    } else {
        write_file(out, doc);
        if (!opt.json) std::cout << "wrote tensor (" << t.entries.size() << " entries)\n";
    }
    return kExitOk;
}

// ---- compare ---------------------------------------------------------------

template <class T>
Json witness_to_json(const EquivalenceWitness<T>& w) {
    Json j;
    j["sigma"] = w.sigma;
    Json sc = Json::array();
    for (const auto& mode : w.scalings) {
        Json row = Json::array();
        for (const T& v : mode) row.push_back(scalar_to_json(v));
        sc.push_back(std::move(row));
    }
    j["scalings"] = std::move(sc);
    if constexpr (!FieldOps<T>::exact) {
        j["tol"] = w.tau;
        j["accept_threshold"] = w.accept_threshold;
    }
    return j;
}

template <class T>
int run_compare(const Decomposition<T>& d1, const Decomposition<T>& d2, const Options& opt) {
    Tolerance tol(opt.tol);
    auto w = match_decompositions(d1, d2, tol);
    Json rep;
    rep["report_version"] = "1";
    rep["command"] = "compare";
    rep["equivalent"] = bool(w);
    if (w) rep["witness"] = witness_to_json(*w);
    if (w) {
        std::string text = "equivalent; sigma = (";
        for (std::size_t j = 0; j < w->sigma.size(); ++j)
            text += (j ? "," : "") + std::to_string(w->sigma[j]);
        emit(opt, rep, text + ")\n");
        return kExitOk;
    }
    emit(opt, rep, "not essentially equivalent\n");
    return kExitNegative;
}

// ---- flatten ---------------------------------------------------------------

template <class T>
int run_flatten(const Tensor<T>& t, std::vector<std::size_t> modes1, const std::string& out,
                const Options& opt) {
    std::vector<std::size_t> modes;
    for (std::size_t m : modes1) {
        if (m == 0 || m > t.order())
            throw ParseError("--modes: mode indices are 1-based, got " + std::to_string(m));
        modes.push_back(m - 1);
    }
    Tolerance tol(opt.tol);
    Matrix<T> m = flattening(t, modes);
    std::size_t rk = rank(m, tol);
    Json rep;
    rep["report_version"] = "1";
    rep["command"] = "flatten";
    rep["rows"] = m.rows();
    rep["cols"] = m.cols();
    rep["rank"] = rk;
    if (!out.empty()) {
        Tensor<T> as_tensor({m.rows(), m.cols()}, m.entries());
        write_file(out, dump_document(tensor_to_json(as_tensor)));
        rep["output"] = out;
    }
    emit(opt, rep,
         std::to_string(m.rows()) + " x " + std::to_string(m.cols()) + " flattening, rank " +
             std::to_string(rk) + "\n");
    return kExitOk;
}

// ---- lemma-check -----------------------------------------------------------

int run_lemma_check(const PointSet<GaussRat>& s, const PointSet<GaussRat>& st,
                    const Options& opt) {
    if (s.ambient != st.ambient || s.size() != st.size())
        return fail_usage("lemma-check: point sets must share dimension and size");
    LemmaInstance inst(s.ambient, s, st);
    HypothesisResult hr = lemma_hypothesis(inst);
    bool conclusion = permutation_lemma_conclusion(inst);
    Json rep;
    rep["report_version"] = "1";
    rep["command"] = "lemma-check";
    rep["hypothesis"] = hr.holds;
    rep["conclusion_multiset_equal"] = conclusion;
    std::string text;
    if (hr.holds) {
        text = "hypothesis holds; S = S~ as multisets: " + std::string(conclusion ? "yes" : "no") + "\n";
    } else {
        const auto& v = *hr.violation;
        Json vj;
        Json cov = Json::array();
        for (const auto& c : v.covector) cov.push_back(scalar_to_json(c));
        vj["covector"] = std::move(cov);
        vj["count_S"] = v.count_s;
        vj["count_S_tilde"] = v.count_s_tilde;
        rep["violation"] = std::move(vj);
        text = "hypothesis fails: witness hyperplane holds " + std::to_string(v.count_s_tilde) +
               " points of S~ but only " + std::to_string(v.count_s) + " of S\n";
    }
    emit(opt, rep, text);
    return hr.holds ? kExitOk : kExitNegative;
}

// ---- sylvester ---------------------------------------------------------------

template <class T>
int run_sylvester(const Tensor<T>& mt, const PointSet<T>& u, const PointSet<T>& v,
                  const Options& opt) {
    if (mt.order() != 2) throw ParseError("sylvester: matrix input must be an order-2 tensor");
    Tolerance tol(opt.tol);
    Matrix<T> m(mt.dims[0], mt.dims[1], mt.entries);
    Subspace<T> su = Subspace<T>::span(u.ambient, u.points, tol);
    Subspace<T> sv = Subspace<T>::span(v.ambient, v.points, tol);
    long defect = sylvester_defect(m, su, sv, tol);
    Json rep;
    rep["report_version"] = "1";
    rep["command"] = "sylvester";
    rep["defect"] = defect;
    emit(opt, rep, "sylvester defect: " + std::to_string(defect) + "\n");
    return defect >= 0 ? kExitOk : kExitNegative;
}

// ---- gen ---------------------------------------------------------------

int run_gen(const Options& opt, const std::vector<std::size_t>& dims, std::size_t r, long lo,
            long hi, const std::string& out) {
    std::string doc;
    if (opt.backend == "exact") {
        auto d = gen_decomposition<GaussRat>(dims, r, opt.seed, lo, hi);
        doc = dump_document(decomposition_to_json(d));
    } else {
        auto d = gen_decomposition<Cplx>(dims, r, opt.seed, lo, hi);
        doc = dump_document(decomposition_to_json(d));
    }
    if (out.empty())
        std::cout << doc;
    else
        write_file(out, doc);
    return kExitOk;
}

// ---- selftest ---------------------------------------------------------------

int run_selftest(const Options& opt) {
    int failures = 0;
    auto check = [&](bool ok, const std::string& name) {
        std::cout << (ok ? "ok - " : "FAIL - ") << name << "\n";
        if (!ok) ++failures;
    };
    auto e = [](std::size_t n, std::size_t i) {
        std::vector<GaussRat> v(n);
        v[i] = GaussRat(1);
        return v;
    };

    // Non-unique example: repeated first-mode point starves the bound.
    {
        Matrix<GaussRat> a = Matrix<GaussRat>::from_columns(3, {e(3, 0), e(3, 0), e(3, 2)});
        Matrix<GaussRat> b = Matrix<GaussRat>::identity(3);
        Decomposition<GaussRat> dec({3, 3, 3}, {a, b, b});
        auto cert = certify_uniqueness(dec);
        check(!cert.certified && cert.kruskal_ranks[0] == 1 &&
                  cert.diagnostic.find("mode A Kruskal rank 1") != std::string::npos,
              "non-unique example denied with mode A rank 1");

        // an honestly different expression of the same tensor
        std::vector<GaussRat> b1b2 = {GaussRat(1), GaussRat(1), GaussRat(0)};
        std::vector<GaussRat> c2mc1 = {GaussRat(-1), GaussRat(1), GaussRat(0)};
        Matrix<GaussRat> a2 = Matrix<GaussRat>::from_columns(3, {e(3, 0), e(3, 0), e(3, 2)});
        Matrix<GaussRat> b2 = Matrix<GaussRat>::from_columns(3, {b1b2, e(3, 1), e(3, 2)});
        Matrix<GaussRat> c2 = Matrix<GaussRat>::from_columns(3, {e(3, 0), c2mc1, e(3, 2)});
        Decomposition<GaussRat> alt({3, 3, 3}, {a2, b2, c2});
        check(compose(alt) == compose(dec), "alternative expression composes equally");
        check(!match_decompositions(dec, alt).has_value(),
              "the two expressions are not essentially equivalent");
    }

    // Diagonal family: rank-a superdiagonal in a x a x a.
    for (std::size_t a = 2; a <= 6; ++a) {
        Matrix<GaussRat> id = Matrix<GaussRat>::identity(a);
        Decomposition<GaussRat> diag({a, a, a}, {id, id, id});
        auto cert = certify_uniqueness(diag);
        mpq_class want(3 * static_cast<long>(a) - 2, 2);
        want.canonicalize();
        check(cert.certified && cert.bound == want,
              "superdiagonal a=" + std::to_string(a) + " certified with bound (3a-2)/2");
    }

    // Lemma micro-instances.
    {
        std::vector<GaussRat> e1 = e(2, 0), e2 = e(2, 1);
        std::vector<GaussRat> e12 = {GaussRat(1), GaussRat(1)};
        std::vector<GaussRat> te1 = {GaussRat(2), GaussRat(0)};
        PointSet<GaussRat> s(2, {e1, e2, e12});
        LemmaInstance same(2, s, s);
        check(lemma_hypothesis(same).holds && permutation_lemma_conclusion(same),
              "lemma: S = S~ instance passes");

        PointSet<GaussRat> st(2, {e1, te1, e2});
        LemmaInstance bad(2, s, st);
        auto hr = lemma_hypothesis(bad);
        bool witness_ok = false;
        if (!hr.holds && hr.violation) {
            witness_ok = !hyperplane_instance_ok(bad, hr.violation->hyperplane) &&
                         !lemma_hypothesis_matrix_form(bad, hr.violation->covector);
        }
        check(!hr.holds && witness_ok && !permutation_lemma_conclusion(bad),
              "lemma: duplicated S~ point fails with checkable witness");
    }

    // d = 4 certificate.
    {
        std::vector<GaussRat> v1 = {GaussRat(1), GaussRat(1)};
        Matrix<GaussRat> f = Matrix<GaussRat>::from_columns(2, {e(2, 0), v1});
        Decomposition<GaussRat> dec({2, 2, 2, 2}, {f, f, f, f});
        auto cert = certify_uniqueness(dec);
        check(cert.certified && cert.kruskal_ranks == std::vector<std::size_t>{2, 2, 2, 2},
              "d=4, r=2 certificate");
    }

    // Sylvester spot checks.
    {
        Matrix<GaussRat> i2 = Matrix<GaussRat>::identity(2);
        auto full = Subspace<GaussRat>::full(2);
        auto u1 = Subspace<GaussRat>(2, {e(2, 0)});
        check(sylvester_defect(i2, full, full) == 2, "sylvester: identity vs full subspaces");
        check(sylvester_defect(i2, u1, u1) == 1, "sylvester: identity vs spanned lines");
        Matrix<GaussRat> z(2, 2);
        check(sylvester_defect(z, u1, full) == 0, "sylvester: zero matrix");
    }

    Json rep;
    rep["report_version"] = "1";
    rep["command"] = "selftest";
    rep["failures"] = failures;
    if (opt.json) std::cout << dump_document(rep);
    return failures == 0 ? kExitOk : kExitNegative;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kruskal uniqueness certificates for CP tensor decompositions"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--backend", opt.backend, "Scalar backend for generated data")
        ->check(CLI::IsMember({"exact", "float"}));
    app.add_option("--tol", opt.tol, "Relative tolerance (float backend)")
        ->envname("KRUSK_TOL");
    app.add_option("--seed", opt.seed, "Seed for generation");
    app.add_flag("--json", opt.json, "Machine-readable report");

    std::string file1, file2, out;
    std::vector<std::size_t> modes;
    std::vector<std::size_t> dims;
    std::size_t gen_rank = 1;
    long lo = -3, hi = 3;
    std::string ufile, vfile;

    auto* krank = app.add_subcommand("krank", "Kruskal rank of a point set");
    krank->add_option("pointset", file1)->required();

    auto* certify = app.add_subcommand("certify", "Kruskal uniqueness certificate");
    certify->add_option("decomposition", file1)->required();

    auto* composec = app.add_subcommand("compose", "Compose a decomposition into a tensor");
    composec->add_option("decomposition", file1)->required();
    composec->add_option("-o,--output", out, "Output tensor file");

    auto* compare = app.add_subcommand("compare", "Essential equivalence of two decompositions");
    compare->add_option("first", file1)->required();
    compare->add_option("second", file2)->required();

    auto* flatten = app.add_subcommand("flatten", "Flatten a tensor along chosen row modes");
    flatten->add_option("tensor", file1)->required();
    flatten->add_option("--modes", modes, "Row modes (1-based)")->required()->delimiter(',');
    flatten->add_option("-o,--output", out, "Output matrix file (order-2 tensor)");

    auto* lemma = app.add_subcommand("lemma-check", "Permutation lemma hypothesis/conclusion");
    lemma->add_option("S", file1)->required();
    lemma->add_option("S_tilde", file2)->required();

    auto* sylv = app.add_subcommand("sylvester", "Sylvester rank-inequality defect");
    sylv->add_option("matrix", file1)->required();
    sylv->add_option("--u", ufile, "Point set spanning U in A")->required();
    sylv->add_option("--v", vfile, "Point set spanning V in B")->required();

    auto* gen = app.add_subcommand("gen", "Generate a seeded random decomposition");
    gen->add_option("--dims", dims, "Mode dimensions")->required()->delimiter(',');
    gen->add_option("--rank", gen_rank, "Number of rank-1 terms")->required();
    gen->add_option("--coeff-lo", lo, "Smallest integer coefficient");
    gen->add_option("--coeff-hi", hi, "Largest integer coefficient");
    gen->add_option("-o,--output", out, "Output decomposition file");

    auto* selftest = app.add_subcommand("selftest", "Run the embedded regression pack");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*krank) {
            Instance inst = load_instance_file(file1);
            if (auto* p = std::get_if<PointSet<GaussRat>>(&inst)) return run_krank(*p, opt);
            if (auto* p = std::get_if<PointSet<Cplx>>(&inst)) return run_krank(*p, opt);
            return fail_usage("krank expects a pointset file");
        }
        if (*certify) {
            Instance inst = load_instance_file(file1);
            if (auto* d = std::get_if<Decomposition<GaussRat>>(&inst)) return run_certify(*d, opt);
            if (auto* d = std::get_if<Decomposition<Cplx>>(&inst)) return run_certify(*d, opt);
            return fail_usage("certify expects a decomposition file");
        }
        if (*composec) {
            Instance inst = load_instance_file(file1);
            if (auto* d = std::get_if<Decomposition<GaussRat>>(&inst))
                return run_compose(*d, out, opt);
            if (auto* d = std::get_if<Decomposition<Cplx>>(&inst)) return run_compose(*d, out, opt);
            return fail_usage("compose expects a decomposition file");
        }
        if (*compare) {
            Instance i1 = load_instance_file(file1);
            Instance i2 = load_instance_file(file2);
            if (auto* d1 = std::get_if<Decomposition<GaussRat>>(&i1)) {
                auto* d2 = std::get_if<Decomposition<GaussRat>>(&i2);
                if (!d2) return fail_usage("compare: backends/kinds of the two files differ");
                return run_compare(*d1, *d2, opt);
            }
            if (auto* d1 = std::get_if<Decomposition<Cplx>>(&i1)) {
                auto* d2 = std::get_if<Decomposition<Cplx>>(&i2);
                if (!d2) return fail_usage("compare: backends/kinds of the two files differ");
                return run_compare(*d1, *d2, opt);
            }
            return fail_usage("compare expects two decomposition files");
        }
        if (*flatten) {
            Instance inst = load_instance_file(file1);
            if (auto* t = std::get_if<Tensor<GaussRat>>(&inst))
                return run_flatten(*t, modes, out, opt);
            if (auto* t = std::get_if<Tensor<Cplx>>(&inst)) return run_flatten(*t, modes, out, opt);
            return fail_usage("flatten expects a tensor file");
        }
        if (*lemma) {
            Instance i1 = load_instance_file(file1);
            Instance i2 = load_instance_file(file2);
            auto* s = std::get_if<PointSet<GaussRat>>(&i1);
            auto* st = std::get_if<PointSet<GaussRat>>(&i2);
            if (!s || !st)
                return fail_usage("lemma-check expects two exact-backend pointset files");
            return run_lemma_check(*s, *st, opt);
        }
        if (*sylv) {
            Instance im = load_instance_file(file1);
            Instance iu = load_instance_file(ufile);
            Instance iv = load_instance_file(vfile);
            if (auto* m = std::get_if<Tensor<GaussRat>>(&im)) {
                auto* u = std::get_if<PointSet<GaussRat>>(&iu);
                auto* v = std::get_if<PointSet<GaussRat>>(&iv);
                if (!u || !v) return fail_usage("sylvester: --u/--v must be matching pointsets");
                return run_sylvester(*m, *u, *v, opt);
            }
            if (auto* m = std::get_if<Tensor<Cplx>>(&im)) {
                auto* u = std::get_if<PointSet<Cplx>>(&iu);
                auto* v = std::get_if<PointSet<Cplx>>(&iv);
                if (!u || !v) return fail_usage("sylvester: --u/--v must be matching pointsets");
                return run_sylvester(*m, *u, *v, opt);
            }
            return fail_usage("sylvester expects an order-2 tensor file");
        }
        if (*gen) return run_gen(opt, dims, gen_rank, lo, hi, out);
        if (*selftest) return run_selftest(opt);
    } catch (const ParseError& e) {
        return fail_usage(e.what());
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }
    return fail_usage("no subcommand");
}
