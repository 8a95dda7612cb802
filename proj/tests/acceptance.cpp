// Acceptance gate: one pass/fail line per criterion; exit code is the number
// of failed criteria. argv[1] is the path to the krusk CLI binary.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "helpers.hpp"
#include "krusk/certify.hpp"
#include "krusk/equivalence.hpp"
#include "krusk/io.hpp"
#include "krusk/lemma.hpp"
#include "krusk/linalg.hpp"

using namespace krusk;
using namespace krusk::testing;

namespace {

std::string g_cli;

struct CheckFail {
    std::string what;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw CheckFail{what};
}

struct CmdResult {
    int status = -1;
    std::string out;
};

CmdResult run_cli(const std::string& args) {
    CmdResult res;
    std::string cmd = g_cli + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return res;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) res.out.append(buf, n);
    int rc = pclose(pipe);
    if (WIFEXITED(rc)) res.status = WEXITSTATUS(rc);
    return res;
}

Decomposition<GaussRat> scramble(const Decomposition<GaussRat>& dec,
                                 const std::vector<std::size_t>& sigma,
                                 const std::vector<std::vector<GaussRat>>& lambda) {
    std::vector<Matrix<GaussRat>> factors;
    for (std::size_t s = 0; s < dec.order(); ++s) {
        Matrix<GaussRat> f(dec.dims[s], dec.length);
        for (std::size_t j = 0; j < dec.length; ++j)
            for (std::size_t i = 0; i < dec.dims[s]; ++i)
                f(i, sigma[j]) = lambda[s][j] * dec.factors[s](i, j);
        factors.push_back(std::move(f));
    }
    return Decomposition<GaussRat>(dec.dims, std::move(factors));
}

std::vector<std::size_t> random_permutation(Rng& rng, std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
    return p;
}

std::vector<std::vector<GaussRat>> random_admissible_scalings(Rng& rng, std::size_t d,
                                                              std::size_t r) {
    std::vector<std::vector<GaussRat>> lambda(d, std::vector<GaussRat>(r, GaussRat(1)));
    for (std::size_t j = 0; j < r; ++j) {
        GaussRat prod(1);
        for (std::size_t s = 0; s + 1 < d; ++s) {
            long num = 0, den = 0;
            while (num == 0) num = rng.uniform(-4, 4);
            while (den == 0) den = rng.uniform(-4, 4);
            lambda[s][j] = GaussRat::from_fraction(num, den);
            prod *= lambda[s][j];
        }
        lambda[d - 1][j] = GaussRat(1) / prod;
    }
    return lambda;
}

std::vector<GaussRat> random_nonzero_point(Rng& rng, std::size_t n, long lo, long hi) {
    std::vector<GaussRat> v;
    do {
        v = random_int_matrix(rng, n, 1, lo, hi).column(0);
    } while (detail::vector_is_zero(v, Tolerance{}));
    return v;
}

PointSet<GaussRat> random_distinct(Rng& rng, std::size_t n, std::size_t r) {
    std::vector<std::vector<GaussRat>> out;
    while (out.size() < r) {
        auto v = random_nonzero_point(rng, n, -2, 2);
        bool dup = false;
        for (const auto& p : out)
            if (projectively_equal(p, v)) dup = true;
        if (!dup) out.push_back(std::move(v));
    }
    return PointSet<GaussRat>(n, std::move(out));
}

PointSet<GaussRat> random_spanning(Rng& rng, std::size_t n, std::size_t r) {
    while (true) {
        std::vector<std::vector<GaussRat>> out;
        for (std::size_t k = 0; k < r; ++k) out.push_back(random_nonzero_point(rng, n, -2, 2));
        if (rank(Matrix<GaussRat>::from_columns(n, out)) == n)
            return PointSet<GaussRat>(n, std::move(out));
    }
}

Decomposition<GaussRat> superdiagonal(std::size_t a) {
    Matrix<GaussRat> id = Matrix<GaussRat>::identity(a);
    return Decomposition<GaussRat>({a, a, a}, {id, id, id});
}

// --- criteria -------------------------------------------------------------

void criterion_consistency() {
    Rng perm_rng(101);
    int certified = 0;
    for (int seed = 0; seed < 200; ++seed) {
        auto dec = gen_decomposition<GaussRat>({4, 4, 4}, 5, seed, -9, 9);
        auto cert = certify_uniqueness(dec);
        if (!cert.certified) continue;
        ++certified;
        Tensor<GaussRat> t = compose(dec);
        expect(rank_lower_bound(t) <= 5, "rank lower bound exceeds 5 at seed " +
                                              std::to_string(seed));
        expect(support_containment_check(dec, t).all_contained,
               "support containment failed at seed " + std::to_string(seed));
        auto other = scramble(dec, random_permutation(perm_rng, 5),
                              random_admissible_scalings(perm_rng, 3, 5));
        auto w = match_decompositions(dec, other);
        expect(w.has_value(), "no witness for scrambled copy at seed " + std::to_string(seed));
        expect(verify_witness(dec, other, *w),
               "witness fails verification at seed " + std::to_string(seed));
    }
    expect(certified >= 190, "only " + std::to_string(certified) + "/200 certified");
}

void criterion_lemma() {
    Rng rng(211);
    for (int it = 0; it < 500; ++it) {
        std::size_t n = 2 + rng.below(3);
        std::size_t r = n + rng.below(4);
        auto st = random_spanning(rng, n, r);
        PointSet<GaussRat> s = (it % 3 == 0) ? st : random_distinct(rng, n, r);
        LemmaInstance inst(n, s, st);
        auto hr = lemma_hypothesis(inst);
        if (hr.holds) {
            expect(permutation_lemma_conclusion(inst),
                   "hypothesis held but multisets differ at iteration " + std::to_string(it));
        } else {
            expect(hr.violation.has_value(), "failure without witness at " + std::to_string(it));
            expect(!hyperplane_instance_ok(inst, hr.violation->hyperplane),
                   "witness hyperplane passes the hyperplane check at " + std::to_string(it));
            expect(!lemma_hypothesis_matrix_form(inst, hr.violation->covector),
                   "witness covector passes the matrix-form check at " + std::to_string(it));
        }
    }
}

void criterion_sylvester() {
    Rng rng(307);
    for (int it = 0; it < 1000; ++it) {
        std::size_t a = 1 + rng.below(6);
        std::size_t b = 1 + rng.below(6);
        Matrix<GaussRat> m = random_int_matrix(rng, a, b, -3, 3);
        std::vector<std::vector<GaussRat>> ug, vg;
        for (std::size_t k = 0, cnt = rng.below(a + 1); k < cnt; ++k)
            ug.push_back(random_int_matrix(rng, a, 1, -2, 2).column(0));
        for (std::size_t k = 0, cnt = rng.below(b + 1); k < cnt; ++k)
            vg.push_back(random_int_matrix(rng, b, 1, -2, 2).column(0));
        auto u = Subspace<GaussRat>::span(a, ug);
        auto v = Subspace<GaussRat>::span(b, vg);
        long defect = sylvester_defect(m, u, v);
        expect(defect >= 0, "negative defect " + std::to_string(defect) + " at iteration " +
                                std::to_string(it));
    }
}

void criterion_nonunique_example() {
    Matrix<GaussRat> a = Matrix<GaussRat>::from_columns(3, {unit(3, 0), unit(3, 0), unit(3, 2)});
    Matrix<GaussRat> id = Matrix<GaussRat>::identity(3);
    Decomposition<GaussRat> dec({3, 3, 3}, {a, id, id});
    auto first = certify_uniqueness(dec);
    auto second = certify_uniqueness(dec);
    expect(!first.certified, "repeated-factor example was certified");
    expect(first.kruskal_ranks == std::vector<std::size_t>{1, 3, 3},
           "expected Kruskal ranks (1,3,3)");
    expect(first.kruskal_ranks[0] == 1, "mode-A Kruskal rank is not 1");
    expect(first.diagnostic.find("mode A Kruskal rank 1") != std::string::npos,
           "diagnostic does not name mode A: " + first.diagnostic);
    expect(second.certified == first.certified &&
               second.kruskal_ranks == first.kruskal_ranks &&
               second.diagnostic == first.diagnostic,
           "certificate is not deterministic");
}

void criterion_diagonal_family() {
    for (std::size_t a = 2; a <= 6; ++a) {
        auto cert = certify_uniqueness(superdiagonal(a));
        expect(cert.certified, "diagonal a=" + std::to_string(a) + " not certified");
        mpq_class want(3 * static_cast<long>(a) - 2, 2);
        want.canonicalize();
        expect(cert.bound == want, "bound mismatch at a=" + std::to_string(a));
        // a <= 3a/2 - 1 for all a >= 2, as an exact rational comparison
        expect(mpq_class(static_cast<long>(a)) <= mpq_class(3 * static_cast<long>(a), 2) - 1,
               "range inequality fails at a=" + std::to_string(a));
    }
}

void criterion_backend_agreement() {
    Rng rng(401);
    Tolerance tol;  // tau = 1e-9
    for (int it = 0; it < 100; ++it) {
        std::size_t n = 1 + rng.below(6);
        std::size_t cnt = 1 + rng.below(10);
        Matrix<GaussRat> m = random_int_matrix(rng, n, cnt, -5, 5);
        expect(kruskal_rank(m.columns()) == kruskal_rank(to_float(m).columns(), tol),
               "backend disagreement at iteration " + std::to_string(it));
    }
}

void criterion_flag_counting() {
    Rng rng(503);
    int checked = 0;
    while (checked < 200) {
        std::size_t n = 3 + rng.below(2);
        std::size_t r = n + 1 + rng.below(2);
        auto st = random_spanning(rng, n, r);
        auto s = random_distinct(rng, n, r);
        LemmaInstance inst(n, s, st);
        std::size_t take = 1 + rng.below(2);
        std::vector<std::vector<GaussRat>> gens;
        for (std::size_t k = 0; k < take; ++k) gens.push_back(st.points[rng.below(r)]);
        auto l = Subspace<GaussRat>::span(n, gens);
        if (l.dim() == 0 || l.dim() >= n) continue;
        std::size_t mu = 0;
        for (const auto& qv : st.points)
            if (contains(l, qv)) ++mu;
        if (mu < l.dim()) continue;
        auto rep = flag_partition_counts(inst, l);
        expect(rep.identity_holds, "partition identity fails at pair " + std::to_string(checked));
        expect(rep.inequality_holds,
               "partition inequality fails at pair " + std::to_string(checked));
        ++checked;
    }
}

void criterion_facts() {
    // two-factor fact: with independent factor columns on both sides, matching
    // a two-factor expression against itself fixes every term
    Rng rng(601);
    for (int it = 0; it < 20; ++it) {
        std::size_t n = 2 + rng.below(3);
        std::size_t r = 2 + rng.below(n - 1);
        Matrix<GaussRat> a, b;
        do {
            a = random_int_matrix(rng, n, r, -3, 3);
        } while (rank(a) != r);
        do {
            b = random_int_matrix(rng, n, r, -3, 3);
        } while (rank(b) != r);
        Decomposition<GaussRat> two({n, n}, {a, b});
        auto w = match_decompositions(two, two);
        expect(w.has_value(), "two-factor self-match missing at iteration " + std::to_string(it));
        for (std::size_t j = 0; j < r; ++j)
            expect(w->sigma[j] == j, "two-factor sigma is not the identity");
    }

    // d = 4 certificate: sum k = 8 >= 2r + d - 1 = 7
    Matrix<GaussRat> f = Matrix<GaussRat>::from_columns(2, {unit(2, 0), qvec({1, 1})});
    auto c4 = certify_uniqueness(Decomposition<GaussRat>({2, 2, 2, 2}, {f, f, f, f}));
    expect(c4.certified, "d=4 example not certified");
    expect(c4.kruskal_ranks == std::vector<std::size_t>{2, 2, 2, 2}, "d=4 Kruskal ranks");

    // padded rank-1 tensor with a length-2 expression through an
    // out-of-support vector: both mode-A factors flagged, everything else fine
    std::vector<GaussRat> bvec = qvec({1, 2, 0});
    std::vector<GaussRat> cvec = qvec({1, -1, 1});
    Matrix<GaussRat> a1 = Matrix<GaussRat>::from_columns(3, {unit(3, 0)});
    Matrix<GaussRat> b1 = Matrix<GaussRat>::from_columns(3, {bvec});
    Matrix<GaussRat> c1 = Matrix<GaussRat>::from_columns(3, {cvec});
    Tensor<GaussRat> t = compose(Decomposition<GaussRat>({3, 3, 3}, {a1, b1, c1}));

    std::vector<GaussRat> mcvec = qvec({-1, 1, -1});
    Matrix<GaussRat> a2 = Matrix<GaussRat>::from_columns(3, {qvec({1, 0, 1}), unit(3, 2)});
    Matrix<GaussRat> b2 = Matrix<GaussRat>::from_columns(3, {bvec, bvec});
    Matrix<GaussRat> c2 = Matrix<GaussRat>::from_columns(3, {cvec, mcvec});
    auto rep = support_containment_check(Decomposition<GaussRat>({3, 3, 3}, {a2, b2, c2}), t);
    expect(!rep.all_contained, "violation example reported all-contained");
    expect(rep.mode_spans[0].dim() == 1, "mode-A support span should be a line");
    expect(!rep.contained[0][0] && !rep.contained[1][0],
           "both mode-A factors must be flagged as outside the support");
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t s = 1; s < 3; ++s)
            expect(rep.contained[j][s], "modes B and C must be contained");
}

void criterion_cli() {
    auto self = run_cli("selftest");
    expect(self.status == 0, "selftest exited with " + std::to_string(self.status) + ":\n" +
                                 self.out);

    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "krusk-acceptance";
    fs::create_directories(dir);

    for (int seed = 0; seed < 100; ++seed) {
        std::vector<std::size_t> dims = {2 + static_cast<std::size_t>(seed % 3), 3, 2};
        std::size_t r = 1 + seed % 4;
        auto dec = gen_decomposition<GaussRat>(dims, r, seed, -4, 4);
        std::string doc = dump_document(decomposition_to_json(dec));

        fs::path file = dir / ("dec" + std::to_string(seed) + ".json");
        std::ofstream(file) << doc;

        // round trip: load, re-serialize, byte-identical
        Instance inst = load_instance_file(file.string());
        auto* back = std::get_if<Decomposition<GaussRat>>(&inst);
        expect(back != nullptr, "round trip changed the instance kind at seed " +
                                    std::to_string(seed));
        expect(dump_document(decomposition_to_json(*back)) == doc,
               "round trip is not byte-identical at seed " + std::to_string(seed));

        // determinism: regenerating with the same seed gives the same bytes
        auto again = gen_decomposition<GaussRat>(dims, r, seed, -4, 4);
        expect(dump_document(decomposition_to_json(again)) == doc,
               "generation is not deterministic at seed " + std::to_string(seed));

        // every tenth file also goes through the CLI twice
        if (seed % 10 == 0) {
            std::string cmd = "--json certify " + file.string();
            auto first = run_cli(cmd);
            auto second = run_cli(cmd);
            expect(first.status == second.status && first.out == second.out,
                   "CLI output differs between identical runs at seed " + std::to_string(seed));
            expect(first.status == 0 || first.status == 1,
                   "unexpected CLI exit " + std::to_string(first.status) + " at seed " +
                       std::to_string(seed));

            std::string dimspec;
            for (std::size_t s = 0; s < dims.size(); ++s)
                dimspec += (s ? "," : "") + std::to_string(dims[s]);
            std::string gen_cmd = "--seed " + std::to_string(seed) + " gen --dims " + dimspec +
                                  " --rank " + std::to_string(r) + " --coeff-lo -4 --coeff-hi 4";
            auto g1 = run_cli(gen_cmd);
            auto g2 = run_cli(gen_cmd);
            expect(g1.status == 0 && g1.out == g2.out,
                   "CLI gen is not deterministic at seed " + std::to_string(seed));
        }
    }
}

struct Criterion {
    std::string label;
    std::function<void()> body;
    double limit_seconds;  // 0 = no limit
};

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-krusk-cli>\n";
        return 64;
    }
    g_cli = argv[1];

    std::vector<Criterion> criteria = {
        {"criterion 1: Kruskal-theorem consistency on 200 seeded decompositions",
         criterion_consistency, 120.0},
        {"criterion 2: permutation lemma as a theorem on 500 instances", criterion_lemma, 120.0},
        {"criterion 3: Sylvester defect nonnegative on 1000 instances", criterion_sylvester,
         30.0},
        {"criterion 4: repeated-factor example denied with mode-A rank 1",
         criterion_nonunique_example, 0.0},
        {"criterion 5: diagonal family certified with bound (3a-2)/2", criterion_diagonal_family,
         0.0},
        {"criterion 6: exact and float Kruskal ranks agree on 100 matrices",
         criterion_backend_agreement, 0.0},
        {"criterion 7: flag counting identity on 200 admissible pairs", criterion_flag_counting,
         0.0},
        {"criterion 8: two-factor, d=4, and support-violation facts", criterion_facts, 0.0},
        {"criterion 9: CLI selftest, round trips, and determinism", criterion_cli, 0.0},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        std::string verdict = "PASS";
        std::string detail;
        try {
            c.body();
        } catch (const CheckFail& f) {
            verdict = "FAIL";
            detail = f.what;
        } catch (const std::exception& e) {
            verdict = "FAIL";
            detail = std::string("unexpected exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count();
        if (verdict == "PASS" && c.limit_seconds > 0 && secs > c.limit_seconds) {
            verdict = "FAIL";
            detail = "over time limit of " + std::to_string(c.limit_seconds) + " s";
        }
        if (verdict == "FAIL") ++failures;
        std::ostringstream line;
        line.setf(std::ios::fixed);
        line.precision(1);
        line << verdict << " " << c.label << " (" << secs << " s)";
        if (!detail.empty()) line << " -- " << detail;
        std::cout << line.str() << "\n";
    }
    if (failures) std::cout << failures << " criterion(s) failed\n";
    return failures;
}
