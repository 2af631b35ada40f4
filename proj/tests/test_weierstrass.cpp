#include <catch2/catch_amalgamated.hpp>

#include "k3kit/weierstrass.hpp"

#include <fstream>

using namespace k3kit;

namespace {

json load_fixture(const char* name) {
    std::ifstream in(std::string(K3KIT_TEST_DATA) + "/" + name);
    REQUIRE(in.good());
    return json::parse(in);
}

QPoly q(std::initializer_list<long> coeffs) {
    QPoly f;
    for (long c : coeffs) f.push_back(Rat(c));
    poly::normalize(f);
    return f;
}

ZPoly z(std::initializer_list<long> coeffs) {
    ZPoly f;
    for (long c : coeffs) f.push_back(Int(c));
    poly::normalize(f);
    return f;
}

const PlaceAnalysis* at_place(const PlacesReport& rep, const ZPoly& u) {
    for (const auto& a : rep.places)
        if (a.place && *a.place == u) return &a;
    return nullptr;
}

const PlaceAnalysis* at_infinity(const PlacesReport& rep) {
    for (const auto& a : rep.places)
        if (!a.place) return &a;
    return nullptr;
}

} // namespace

TEST_CASE("model construction rejects singular families", "[weierstrass]") {
    // 4p^3 + 27q^2 = 0 for p = -3t^2, q = 2t^3
    CHECK_THROWS_AS(WeierstrassModel::make(1, q({0, 0, -3}), q({0, 0, 0, 2})),
                    std::invalid_argument);
    CHECK_THROWS_AS(WeierstrassModel::make(0, q({1}), q({1})), std::invalid_argument);
    CHECK_THROWS_AS(WeierstrassModel::make(1, q({0, 0, 0, 0, 0, 1}), q({1})),
                    std::invalid_argument); // deg p > 4r
    CHECK_THROWS_AS(WeierstrassModel::make(1, q({1}), q({0, 0, 0, 0, 0, 0, 0, 1})),
                    std::invalid_argument); // deg q > 6r
    CHECK_THROWS_AS(WeierstrassModel::from_json(json{{"r", 1}, {"p", json::array()}}),
                    std::invalid_argument);
}

TEST_CASE("a family with two nodal fibers and one II* fiber", "[weierstrass]") {
    auto w = WeierstrassModel::from_json(load_fixture("model_e8.json"));
    auto rep = analyze_places(w);

    REQUIRE(rep.places.size() == 3);
    CHECK(rep.sum_v_delta == 12);
    CHECK(rep.sum_chi == 12);
    CHECK(rep.model_minimal);

    auto* minus = at_place(rep, z({-2, 1}));
    auto* plus = at_place(rep, z({2, 1}));
    REQUIRE(minus);
    REQUIRE(plus);
    CHECK(minus->kodaira->name() == "I_1");
    CHECK(plus->kodaira->name() == "I_1");
    CHECK(minus->v_delta == 1);

    auto* inf = at_infinity(rep);
    REQUIRE(inf);
    CHECK(inf->kodaira->name() == "II*");
    CHECK(inf->v_p == 4);
    CHECK(inf->v_q == 5);
    CHECK(inf->v_delta == 10);
}

TEST_CASE("valuation ladder produces each additive type", "[weierstrass]") {
    struct Row {
        QPoly p, q;
        const char* at_t;
        const char* at_inf;
    };
    const Row rows[] = {
        {q({0, 1}), q({0, 1}), "II", "III*"},
        {q({0, 1}), q({0, 0, 1}), "III", "IV*"},
        {q({0, 0, 1}), q({0, 0, 1}), "IV", "I0*"},
        {q({0, 0, 1}), q({0, 0, 0, 1}), "I0*", "I0*"},
        {q({0, 0, -3}), q({0, 0, 0, 2, 1}), "I_1*", "IV"},
    };
    for (const auto& row : rows) {
        auto w = WeierstrassModel::make(1, row.p, row.q);
        auto rep = analyze_places(w);
        INFO("expected " << row.at_t << " at t");
        CHECK(rep.sum_chi == 12);
        CHECK(rep.sum_v_delta == 12);
        CHECK(rep.model_minimal);

        auto* t = at_place(rep, z({0, 1}));
        REQUIRE(t);
        REQUIRE(t->kodaira.has_value());
        CHECK(t->kodaira->name() == row.at_t);
        CHECK(t->kodaira->euler() == t->v_delta);

        auto* inf = at_infinity(rep);
        REQUIRE(inf);
        REQUIRE(inf->kodaira.has_value());
        CHECK(inf->kodaira->name() == row.at_inf);
    }

    // the I_1* family also has a nodal fiber at t + 4
    auto w = WeierstrassModel::make(1, q({0, 0, -3}), q({0, 0, 0, 2, 1}));
    auto rep = analyze_places(w);
    auto* node = at_place(rep, z({4, 1}));
    REQUIRE(node);
    CHECK(node->kodaira->name() == "I_1");
}

TEST_CASE("vanishing q is handled at every place", "[weierstrass]") {
    // y^2 = x^3 + p(t) x has discriminant 4 p^3
    auto w = WeierstrassModel::make(1, q({0, 1}), QPoly{});
    auto rep = analyze_places(w);
    auto* t = at_place(rep, z({0, 1}));
    REQUIRE(t);
    CHECK(t->v_p == 1);
    CHECK(t->v_q == kValInfinity);
    CHECK(t->kodaira->name() == "III");
    auto* inf = at_infinity(rep);
    REQUIRE(inf);
    CHECK(inf->kodaira->name() == "III*");
    CHECK(rep.sum_chi == 12);

    CHECK(t->to_json().at("v_q") == "infinity");

    auto w2 = WeierstrassModel::make(1, q({0, 0, 1}), QPoly{});
    auto rep2 = analyze_places(w2);
    CHECK(at_place(rep2, z({0, 1}))->kodaira->name() == "I0*");
    CHECK(at_infinity(rep2)->kodaira->name() == "I0*");

    auto w3 = WeierstrassModel::make(1, q({0, 0, 0, 1}), QPoly{});
    auto rep3 = analyze_places(w3);
    CHECK(at_place(rep3, z({0, 1}))->kodaira->name() == "III*");
    CHECK(at_infinity(rep3)->kodaira->name() == "III");
}

TEST_CASE("non-minimal places reduce to smooth fibers", "[weierstrass]") {
    auto w = WeierstrassModel::make(1, q({0, 0, 0, 0, 1}), q({0, 0, 0, 0, 0, 0, 1}));
    auto rep = analyze_places(w);

    REQUIRE(rep.places.size() == 1);
    const auto& a = rep.places[0];
    CHECK_FALSE(a.minimal);
    CHECK(a.v_p == 4);
    CHECK(a.v_q == 6);
    CHECK(a.v_delta == 12);
    CHECK(a.red_v_delta == 0);
    CHECK_FALSE(a.kodaira.has_value());
    CHECK_FALSE(rep.model_minimal);
    CHECK(rep.sum_v_delta == 12);
    CHECK(rep.sum_chi == 0);

    json j = a.to_json();
    CHECK(j.at("minimal") == false);
    CHECK(j.at("reduced").at("v_delta") == 0);
    CHECK(j.at("type").is_null());
}

TEST_CASE("an isotrivial family of K3 type", "[weierstrass]") {
    auto w = WeierstrassModel::from_json(load_fixture("model_isotrivial.json"));
    REQUIRE(w.r == 2);
    REQUIRE(poly::is_zero(w.p));

    auto rep = analyze_places(w);
    REQUIRE(rep.places.size() == 1); // t^12 - 2 is irreducible
    CHECK(rep.places[0].place_degree == 12);
    CHECK(rep.places[0].kodaira->name() == "II");
    CHECK(rep.sum_chi == 24);
    CHECK(rep.sum_v_delta == 24);

    auto j = j_map(w);
    CHECK(j.isotrivial);
    CHECK(j.degree == 0);
    CHECK(j.numerator.empty());
    CHECK(j.denominator == q({1}));
}

TEST_CASE("j-map in lowest terms", "[weierstrass]") {
    auto w = WeierstrassModel::from_json(load_fixture("model_e8.json"));
    auto j = j_map(w);
    CHECK_FALSE(j.isotrivial);
    CHECK(j.degree == 2);
    CHECK(j.numerator == q({-4}));
    CHECK(j.denominator == q({-4, 0, 1}));

    // constant j without p or q vanishing
    auto iso = WeierstrassModel::make(1, q({0, 0, 1}), q({0, 0, 0, 1}));
    auto ji = j_map(iso);
    CHECK(ji.isotrivial);
    CHECK(ji.numerator == QPoly{Rat(4, 31)});
    CHECK(ji.denominator == q({1}));
}

TEST_CASE("index bounds from the j-map degree", "[weierstrass]") {
    auto w = WeierstrassModel::from_json(load_fixture("model_e8.json"));

    auto free = index_bound(w);
    CHECK(free.applicable);
    CHECK(free.two_deg_j == 4);
    CHECK(free.twenty_four_r == 24);
    CHECK_FALSE(free.pass.has_value());

    auto ok = index_bound(w, Int(4));
    REQUIRE(ok.pass.has_value());
    CHECK(*ok.pass);

    auto bad = index_bound(w, Int(12));
    REQUIRE(bad.pass.has_value());
    CHECK_FALSE(*bad.pass);

    auto iso = index_bound(WeierstrassModel::make(1, q({0, 0, 1}), q({0, 0, 0, 1})), Int(2));
    CHECK_FALSE(iso.applicable);
    CHECK_FALSE(iso.pass.has_value());
}

TEST_CASE("weighted discriminant degree is an invariant", "[weierstrass]") {
    // sum of v_delta over all places, infinity included, is always 12r
    const WeierstrassModel models[] = {
        WeierstrassModel::make(1, q({-3}), q({0, 1})),
        WeierstrassModel::make(1, q({0, 1}), q({0, 0, 1})),
        WeierstrassModel::make(2, q({1, 1}), q({0, 0, 0, 1})),
        WeierstrassModel::make(2, QPoly{}, q({-2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1})),
    };
    for (const auto& w : models) {
        auto rep = analyze_places(w);
        CHECK(rep.sum_v_delta == 12 * w.r);
    }
}
