#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "krusk/io.hpp"

using namespace krusk;
using namespace krusk::testing;

TEST_CASE("exact scalar string round trips") {
    auto rt = [](const GaussRat& v) {
        return scalar_from_string(scalar_to_string(v), "test");
    };
    for (const GaussRat& v :
         {q(0), q(7), q(-3), q(1, 2), q(-22, 7), GaussRat(mpq_class(0), mpq_class(1)),
          GaussRat(mpq_class(1, 2), mpq_class(-3)), GaussRat(mpq_class(-5), mpq_class(2, 3))}) {
        GaussRat back = rt(v);
        CHECK(back == v);
        CHECK(scalar_to_string(back) == scalar_to_string(v));
    }
    CHECK(scalar_from_string("1/2+3/4 i", "t") == GaussRat(mpq_class(1, 2), mpq_class(3, 4)));
    CHECK(scalar_from_string("-2", "t") == q(-2));
    CHECK_THROWS_AS(scalar_from_string("3/0", "t"), ParseError);
    CHECK_THROWS_AS(scalar_from_string("abc", "t"), ParseError);
    CHECK_THROWS_AS(scalar_from_string("", "t"), ParseError);
}

TEST_CASE("minimal decomposition document parses") {
    const char* doc = R"({
      "format_version": "1", "backend": "exact", "kind": "decomposition",
      "dims": [2, 2, 2], "rank": 1,
      "factors": [["1", "0"], ["1", "0"], ["1", "0"]]
    })";
    Instance inst = parse_instance(doc);
    auto* d = std::get_if<Decomposition<GaussRat>>(&inst);
    REQUIRE(d);
    CHECK(d->length == 1);
    CHECK(d->dims == std::vector<std::size_t>{2, 2, 2});
}

TEST_CASE("structured errors name the offending numbers") {
    const char* doc = R"({
      "format_version": "1", "backend": "exact", "kind": "tensor",
      "dims": [2, 2], "entries": ["1", "0", "0"]
    })";
    try {
        parse_instance(doc);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        std::string msg = e.what();
        CHECK(msg.find("3") != std::string::npos);
        CHECK(msg.find("4") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_instance(R"({"format_version":"2","backend":"exact","kind":"tensor"})"),
                    ParseError);
    CHECK_THROWS_AS(parse_instance("not json at all"), ParseError);
}

TEST_CASE("round trip is the identity on random exact instances") {
    for (int it = 0; it < 50; ++it) {
        auto dec = gen_decomposition<GaussRat>({3, 2, 4}, 3, 3000 + it, -6, 6);
        std::string doc = dump_document(decomposition_to_json(dec));
        Instance inst = parse_instance(doc);
        auto* back = std::get_if<Decomposition<GaussRat>>(&inst);
        REQUIRE(back);
        CHECK(dump_document(decomposition_to_json(*back)) == doc);  // bit-exact

        Tensor<GaussRat> t = compose(dec);
        std::string tdoc = dump_document(tensor_to_json(t));
        Instance tinst = parse_instance(tdoc);
        auto* tback = std::get_if<Tensor<GaussRat>>(&tinst);
        REQUIRE(tback);
        CHECK(*tback == t);
        CHECK(dump_document(tensor_to_json(*tback)) == tdoc);
    }
}

TEST_CASE("round trip preserves float values") {
    Rng rng(71);
    for (int it = 0; it < 20; ++it) {
        auto dec = gen_decomposition<Cplx>({2, 3, 2}, 2, 4000 + it, -9, 9);
        // perturb away from integers
        for (auto& f : dec.factors)
            for (auto& v : f.entries()) v += Cplx(1.0 / 3.0, 0.125);
        std::string doc = dump_document(decomposition_to_json(dec));
        Instance inst = parse_instance(doc);
        auto* back = std::get_if<Decomposition<Cplx>>(&inst);
        REQUIRE(back);
        for (std::size_t s = 0; s < 3; ++s)
            CHECK(back->factors[s].entries() == dec.factors[s].entries());
        CHECK(dump_document(decomposition_to_json(*back)) == doc);
    }
}

TEST_CASE("pointset documents") {
    PointSet<GaussRat> ps(3, {unit(3, 0), qvec({1, -2, 3})});
    std::string doc = dump_document(pointset_to_json(ps));
    Instance inst = parse_instance(doc);
    auto* back = std::get_if<PointSet<GaussRat>>(&inst);
    REQUIRE(back);
    CHECK(back->points == ps.points);
}

TEST_CASE("gen_decomposition is deterministic and honors the range") {
    auto a = gen_decomposition<GaussRat>({4, 4, 4}, 5, 42);
    auto b = gen_decomposition<GaussRat>({4, 4, 4}, 5, 42);
    for (std::size_t s = 0; s < 3; ++s) CHECK(a.factors[s] == b.factors[s]);
    auto c = gen_decomposition<GaussRat>({4, 4, 4}, 5, 43);
    bool same = true;
    for (std::size_t s = 0; s < 3; ++s)
        if (!(a.factors[s] == c.factors[s])) same = false;
    CHECK_FALSE(same);

    // coeff range {1..1}: all-ones factors, certificate denied with k = 1
    auto ones = gen_decomposition<GaussRat>({3, 3, 3}, 2, 7, 1, 1);
    for (const auto& f : ones.factors)
        for (const auto& v : f.entries()) CHECK(v == q(1));
    CHECK(kruskal_rank(ones.factors[0].columns()) == 1);
}
