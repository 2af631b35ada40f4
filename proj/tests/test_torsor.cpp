#include <catch2/catch_amalgamated.hpp>

#include "k3kit/torsor.hpp"

#include <fstream>
#include <numeric>

using namespace k3kit;

namespace {

json load_fixture(const char* name) {
    std::ifstream in(std::string(K3KIT_TEST_DATA) + "/" + name);
    REQUIRE(in.good());
    return json::parse(in);
}

FiberConfiguration four_nodal() {
    return FiberConfiguration::of({FiberDescriptor::parse("I_6"), FiberDescriptor::parse("I_6"),
                                   FiberDescriptor::parse("I_6"), FiberDescriptor::parse("I_6")});
}

} // namespace

TEST_CASE("fibration descriptors", "[torsor]") {
    CHECK_THROWS_AS(FibrationDescriptor::make(0, false), std::invalid_argument);
    CHECK_THROWS_AS(FibrationDescriptor::make(3, true), std::invalid_argument);
    CHECK(FibrationDescriptor::make(1, true).jacobian);

    auto f = FibrationDescriptor::from_json(load_fixture("fibration_deg3.json"));
    CHECK(f.degree == 3);
    CHECK_FALSE(f.jacobian);
    CHECK_FALSE(f.isotrivial);
    REQUIRE(f.monodromy.has_value());
    CHECK(f.monodromy->name() == "full");
    REQUIRE(f.fiber_config.has_value());
    CHECK(f.fiber_config->fibers.size() == 4);
}

TEST_CASE("order calculus", "[torsor]") {
    auto f = FibrationDescriptor::make(3, false);
    CHECK(class_order(f) == 3);
    CHECK(jm_class(0, f) == 0);
    CHECK(jm_class(4, f) == 1);
    CHECK(jm_class(6, f) == 0);
    CHECK_THROWS_AS(jm_class(-1, f), std::invalid_argument);

    CHECK(transfer_order(6, 4) == 3);
    CHECK(transfer_order(6, 2) == 3);
    CHECK(transfer_order(5, 5) == 1);
    CHECK(transfer_order(7, 3) == 7);
    CHECK_THROWS_AS(transfer_order(0, 1), std::invalid_argument);

    for (long t = 1; t <= 60; ++t)
        for (long m = 1; m <= 60; ++m) {
            long r = transfer_order(t, m);
            CHECK(t % r == 0);
            CHECK((r == t) == (std::gcd(t, m) == 1));
        }
}

TEST_CASE("reduction to p-torsion", "[torsor]") {
    for (long p : {3L, 5L, 7L}) {
        auto f = FibrationDescriptor::make(p, false);
        for (long t = 1; t < p; ++t) {
            auto res = reduce_to_p_torsion(t, p, 1, f);
            REQUIRE(res.alpha.has_value());
            CHECK((*res.alpha * t) % p == 1);
            CHECK_FALSE(res.in_jacobian);
            CHECK(res.target.degree == p);
            CHECK(res.target.torsion.kind == TorsionStatus::Kind::Torsion);
            CHECK(res.target.torsion.order == p);
        }
    }

    // higher p-power orders land in the Jacobian instead
    auto f5 = FibrationDescriptor::make(5, false);
    auto deep = reduce_to_p_torsion(2, 5, 2, f5);
    CHECK(deep.in_jacobian);
    CHECK_FALSE(deep.alpha.has_value());
    CHECK(deep.target.degree == 5);

    CHECK_THROWS_AS(reduce_to_p_torsion(2, 6, 1, FibrationDescriptor::make(6, false)),
                    std::invalid_argument); // p not prime
    CHECK_THROWS_AS(reduce_to_p_torsion(5, 5, 1, f5), std::invalid_argument); // t not prime to p
    CHECK_THROWS_AS(reduce_to_p_torsion(2, 5, 1, FibrationDescriptor::make(3, false)),
                    std::invalid_argument); // degree mismatch
    CHECK_THROWS_AS(reduce_to_p_torsion(2, 5, 0, f5), std::invalid_argument);
}

TEST_CASE("torsion status transitions", "[torsor]") {
    auto open = MultisectionDescriptor::make(6, 3, TorsionStatus::undetermined({2, 3}));

    ExclusionSet finite;
    finite.orders = {1, 2};
    auto narrowed = classify_nt(open, finite);
    CHECK(narrowed.torsion.kind == TorsionStatus::Kind::UndeterminedExcluding);
    CHECK(narrowed.torsion.excluded == std::set<long>{1, 2, 3});

    ExclusionSet everything;
    everything.all = true;
    CHECK(classify_nt(open, everything).torsion.kind == TorsionStatus::Kind::NonTorsion);

    auto torsion4 = MultisectionDescriptor::make(4, 1, TorsionStatus::torsion(4));
    ExclusionSet hit;
    hit.orders = {4};
    CHECK_THROWS_AS(classify_nt(torsion4, hit), std::invalid_argument);
    CHECK_THROWS_AS(classify_nt(torsion4, everything), std::invalid_argument);
    ExclusionSet miss;
    miss.orders = {2};
    CHECK(classify_nt(torsion4, miss).torsion.order == 4);

    auto fixed = MultisectionDescriptor::make(2, 1, TorsionStatus::non_torsion());
    CHECK(classify_nt(fixed, finite).torsion.kind == TorsionStatus::Kind::NonTorsion);
}

TEST_CASE("multisection descriptors", "[torsor]") {
    CHECK_THROWS_AS(MultisectionDescriptor::make(5, 3, TorsionStatus::undetermined()),
                    std::invalid_argument); // degree not divisible by ambient
    CHECK_THROWS_AS(MultisectionDescriptor::make(3, 3, TorsionStatus::undetermined(), -1),
                    std::invalid_argument);

    // salient ramification upgrades open status to certified non-torsion
    auto ms = MultisectionDescriptor::make(6, 3, TorsionStatus::undetermined(), 2, true);
    CHECK(ms.torsion.kind == TorsionStatus::Kind::NonTorsion);
    CHECK(ms.saliently_ramified);

    CHECK_THROWS_AS(MultisectionDescriptor::make(6, 3, TorsionStatus::torsion(2), {}, true),
                    std::invalid_argument);

    json j = ms.to_json();
    CHECK(j.at("degree") == 6);
    CHECK(j.at("torsion").at("kind") == "non_torsion");
    CHECK(j.at("genus") == 2);
}

TEST_CASE("class map into the Jacobian", "[torsor]") {
    auto ms = MultisectionDescriptor::make(6, 3, TorsionStatus::non_torsion(), 4);
    auto image = tau_class(ms, 2);
    CHECK(image.torsion.kind == TorsionStatus::Kind::NonTorsion);
    CHECK(image.genus == 4);
    CHECK_THROWS_AS(tau_class(ms, 0), std::invalid_argument);
}

TEST_CASE("torsion status round trip", "[torsor]") {
    for (const auto& s : {TorsionStatus::torsion(6), TorsionStatus::non_torsion(),
                          TorsionStatus::undetermined({2, 5})}) {
        auto back = TorsionStatus::from_json(s.to_json());
        CHECK(back.kind == s.kind);
        CHECK(back.order == s.order);
        CHECK(back.excluded == s.excluded);
    }
    CHECK_THROWS_AS(TorsionStatus::from_json(json{{"kind", "sometimes"}}), std::invalid_argument);
}

TEST_CASE("verdict for a degree-three fibration divided by seven", "[torsor]") {
    auto f = FibrationDescriptor::from_json(load_fixture("fibration_deg3.json"));
    auto v = no_rat_verdict(f, 7, 5);

    REQUIRE(v.applicable);
    CHECK(v.divided_degree == 21);
    CHECK(v.level == 7);
    REQUIRE(v.min_genus.has_value());
    CHECK(*v.min_genus == 25);
    CHECK(v.holds);

    REQUIRE(v.orbits.size() == 1); // full monodromy is transitive at level 7
    CHECK(v.orbits[0].size == 48);
    CHECK(v.orbits[0].chi == -48);
    CHECK(v.orbits[0].genus == 25);

    REQUIRE(v.audit.size() == 5);
    CHECK(v.audit.front().operation == "class_order");
    CHECK(v.audit.back().operation == "genus_sweep");
    CHECK(v.assumptions.size() == 1);

    json j = v.to_json();
    CHECK(j.at("holds") == true);
    CHECK(j.at("audit").size() == 5);
}

TEST_CASE("verdict preconditions each have a reason", "[torsor]") {
    auto spec = GroupSpec::parse("full");
    auto config = four_nodal();
    auto f = FibrationDescriptor::make(3, false, false, spec, config);

    auto not_prime = no_rat_verdict(f, 6, 1);
    CHECK_FALSE(not_prime.applicable);
    CHECK(not_prime.reason.find("prime") != std::string::npos);

    auto below = no_rat_verdict(f, 7, 7);
    CHECK_FALSE(below.applicable);
    CHECK(below.reason.find("threshold") != std::string::npos);

    auto divides = no_rat_verdict(f, 3, 2);
    CHECK_FALSE(divides.applicable);
    CHECK(divides.reason.find("divides") != std::string::npos);

    auto iso = no_rat_verdict(FibrationDescriptor::make(3, false, true, spec, config), 7, 5);
    CHECK_FALSE(iso.applicable);
    CHECK(iso.reason.find("isotrivial") != std::string::npos);

    auto no_group = no_rat_verdict(FibrationDescriptor::make(3, false, false, {}, config), 7, 5);
    CHECK_FALSE(no_group.applicable);
    CHECK(no_group.reason.find("monodromy") != std::string::npos);

    auto no_config = no_rat_verdict(FibrationDescriptor::make(3, false, false, spec, {}), 7, 5);
    CHECK_FALSE(no_config.applicable);
    CHECK(no_config.reason.find("configuration") != std::string::npos);

    auto three = FiberConfiguration::of({FiberDescriptor::parse("I_6"),
                                         FiberDescriptor::parse("I_6"),
                                         FiberDescriptor::parse("I_12")});
    auto few = no_rat_verdict(FibrationDescriptor::make(3, false, false, spec, three), 7, 5);
    CHECK_FALSE(few.applicable);
    CHECK(few.reason.find("fewer") != std::string::npos);
}
