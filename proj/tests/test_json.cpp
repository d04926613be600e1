#include "doctest.h"
#include "coarse/json_io.hpp"

using namespace coarse;

namespace {

void round_trip(const SpacePtr& x) {
    auto j = space_json(*x);
    auto text = j.dump();
    auto y = space_from_json(json::parse(text));
    CAPTURE(x->id());
    CHECK(y->same_as(*x));
    CHECK(y->inner_radius() == x->inner_radius());
    CHECK(y->scale() == x->scale());
    CHECK(y->ultrametric() == x->ultrametric());
    CHECK(y->phi_symbolic() == x->phi_symbolic());
    CHECK(space_json(*y) == j);
}

}  // namespace

TEST_CASE("distances") {
    CHECK(dist_json(7, 1) == json(7));
    CHECK(dist_json(3141592654, 1000000000) == json("1570796327/500000000"));
    CHECK(dist_json(kWholeSpace, 1) == json("inf"));
    CHECK(dist_from_json(json("1570796327/500000000"), 1000000000) == 3141592654);
    CHECK(dist_from_json(json(7), 1) == 7);
    CHECK(dist_from_json(json("inf"), 1) == kWholeSpace);
}

TEST_CASE("space round trips") {
    auto g = parse_group("Z+C2^inf");
    round_trip(build_truncation(g, interleaved_schedule(g, 9), 9));
    round_trip(canonical_ultrametric(FactorFunction::parse("2:2,3:1"), 3));
    round_trip(cantor_cube_truncation(4));
    round_trip(example31_fixture(1, 0.3, 5));
    round_trip(product_space(zr_ball(1, 2), line_points({0, 3, 4})));
    round_trip(quotient_space(*zr_ball(1, 4), 2));
    round_trip(FiniteSpace::subspace(zr_ball(1, 5), {0, 2, 5}, 1, 3, "sub"));
    round_trip(point_space(1));
}

TEST_CASE("space file header") {
    auto j = space_json(*zr_ball(1, 3));
    CHECK(j["format"] == "coarse-space");
    CHECK(j["version"] == 1);
    CHECK(j["header"]["point_count"] == 7);
    CHECK(j["header"]["basepoint"] == 3);
    CHECK(j["header"]["inner_radius"] == 3);
    auto bad = j;
    bad["version"] = 99;
    CHECK_THROWS(space_from_json(bad));
    bad = j;
    bad["format"] = "other";
    CHECK_THROWS(space_from_json(bad));
}

TEST_CASE("schedules") {
    Schedule s{{true, 0, 1}, {false, 4, 5}, {false, 2, 9}};
    auto j = schedule_json(s);
    CHECK(j[1]["generator"] == "C4");
    CHECK(j[1]["level"] == 5);
    CHECK(schedule_from_json(j) == s);
    CHECK(schedule_from_json(json::parse(R"([{"generator":"Z","level":1},{"generator":"C3","level":2}])")) ==
          Schedule{{true, 0, 1}, {false, 3, 2}});
}

TEST_CASE("verdict fields") {
    auto v = verdict_json(coarse_isomorphic(parse_group("Z+C2^inf"), parse_group("Z+C2^inf+C3")));
    CHECK(v["result"] == true);
    CHECK(v["relation"] == "isomorphism");
    CHECK(v["case"] == "3");
    CHECK(v["multipliers"]["n"] == 3);
    CHECK(v["multipliers"]["m"] == 1);
    CHECK(v["invariants"]["phi1"] == "2:inf");
    auto e = verdict_json(coarse_equivalent(parse_group("Z"), parse_group("Z+C2^inf")));
    CHECK(e["result"] == false);
    CHECK(e["case"] == "generation");
}

TEST_CASE("witness export") {
    auto w = absorption_witness(3, 12);
    auto j = witness_json(w);
    CHECK(j["validity_radius"] == 12);
    CHECK(j["pairs"].size() == w.source->size());
    CHECK(j["moduli"].size() == w.deltas.size());
    auto t = tower_alignment_witness(canonical_ultrametric(FactorFunction::parse("2:inf"), 4),
                                     torsion_ultrametric(parse_group("C4^inf"), 2));
    auto jt = witness_json(t);
    CHECK(jt.contains("alignment"));
    CHECK(jt["claims"].size() == t.claims.size());
    auto r = report_json(verify_witness(t, {2, 3}), 1);
    CHECK(r["ok"] == true);
}
