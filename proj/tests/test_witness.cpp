#include <algorithm>
#include <set>

#include "doctest.h"
#include "coarse/witness.hpp"

using namespace coarse;

namespace {

FactorFunction ff(const char* s) { return FactorFunction::parse(s); }

bool has_kind(const VerifyReport& r, const std::string& kind) {
    return std::any_of(r.violations.begin(), r.violations.end(), [&](auto& v) { return v.kind == kind; });
}

std::string kinds(const VerifyReport& r) {
    std::string s;
    for (auto& v : r.violations) s += v.kind + ": " + v.detail + "\n";
    return s;
}

SpacePtr two_z4() { return torsion_ultrametric(parse_group("C4^inf"), 6); }
SpacePtr twelve_z2() { return canonical_ultrametric(ff("2:inf"), 12); }

}  // namespace

TEST_CASE("factorization on the interleaved truncation") {
    auto g = parse_group("Z+C2^inf");
    auto x = build_truncation(g, interleaved_schedule(g, 14), 14);
    auto eps = estimate_factorizing_step(*x).estimate;
    CHECK(eps == 1);
    auto w = factorization_witness(x, eps);
    auto rep = verify_witness(w, w.deltas);
    CHECK_MESSAGE(rep.ok(), kinds(rep));
    CHECK(rep.bijective);
    REQUIRE(w.claims.size() == 1);
    auto& claim = std::get<IsometryClaim>(w.claims[0]);
    CHECK(claim.groups.size() == epsilon_components(*x, eps).blocks.size());
    auto m = component_multiplicity(w, eps);
    REQUIRE(m.n);
    CHECK(*m.n == 1);
}

TEST_CASE("factorization on product models and single components") {
    auto p = product_space(zr_ball(1, 6), canonical_ultrametric(ff("2:2,3:1"), 3));
    auto w = factorization_witness(p, 1);
    auto rep = verify_witness(w, w.deltas);
    CHECK_MESSAGE(rep.ok(), kinds(rep));
    CHECK(w.source->size() == p->size());

    auto z = zr_ball(2, 5);
    auto wz = factorization_witness(z, 1);
    CHECK(std::get<IsometryClaim>(wz.claims[0]).groups.size() == 1);
    auto rz = verify_witness(wz, wz.deltas);
    CHECK_MESSAGE(rz.ok(), kinds(rz));
    for (std::size_t i = 0; i < z->size(); ++i) CHECK(z->dist(static_cast<std::size_t>(wz.table[i]), z->basepoint()) <= 5);

    CHECK_THROWS_AS(factorization_witness(p, 0), std::invalid_argument);
}

TEST_CASE("tower alignment of Z2 and Z4 towers") {
    auto w = tower_alignment_witness(twelve_z2(), two_z4());
    REQUIRE(w.alignment);
    auto& al = *w.alignment;
    CHECK(al.pairs.front() == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(al.pairs.back() == std::pair<std::size_t, std::size_t>{12, 6});
    for (std::size_t k = 0; k < al.pairs.size(); ++k) {
        auto [a, b] = al.pairs[k];
        CHECK(al.v_ball_orders[b] % al.u_ball_orders[a] == 0);
        if (k + 1 < al.pairs.size()) CHECK(al.u_ball_orders[al.pairs[k + 1].first] % al.v_ball_orders[b] == 0);
    }
    auto rep = verify_witness(w, {2, 3, 5, 9, 13});
    CHECK_MESSAGE(rep.ok(), kinds(rep));
    CHECK(rep.bijective);
    CHECK(rep.region_size == 4096);
    for (auto& b : rep.derived) CHECK(b.has_value());
}

TEST_CASE("tower alignment of alternating and merged towers") {
    auto u = torsion_ultrametric(parse_group("C2^inf+C3^inf"), 8);
    auto v = torsion_ultrametric(parse_group("C6^inf"), 4);
    auto w = tower_alignment_witness(u, v);
    auto rep = verify_witness(w, {2, 3, 4, 5, 6, 9});
    CHECK_MESSAGE(rep.ok(), kinds(rep));
    CHECK(w.alignment->pairs.back() == std::pair<std::size_t, std::size_t>{8, 4});

    auto same = tower_alignment_witness(u, u);
    for (std::size_t i = 0; i < u->size(); ++i) CHECK(same.table[i] == static_cast<std::int64_t>(i));

    CHECK_THROWS(tower_alignment_witness(twelve_z2(), torsion_ultrametric(parse_group("C3^inf"), 4)));
    // equal phi but the Z4 tower is too short to close the chain
    CHECK_THROWS_WITH(tower_alignment_witness(twelve_z2(), torsion_ultrametric(parse_group("C4^inf"), 5)),
                      "alignment impossible within truncation depth");
}

TEST_CASE("absorption examples") {
    auto w = absorption_witness(2, 10);
    auto at = [&](std::int64_t n) { return w.target->coords(static_cast<std::size_t>(w.table[*w.source->index_of({n})])); };
    CHECK(at(5) == std::vector<std::int64_t>{2, 1});
    CHECK(at(-1) == std::vector<std::int64_t>{-1, 1});
    CHECK(at(0) == std::vector<std::int64_t>{0, 0});
    auto rep = verify_witness(w, {1, 2, 3});
    CHECK_MESSAGE(rep.ok(), kinds(rep));
    CHECK(rep.forward[0] == 1);
    CHECK(*component_multiplicity(w, 1).n == 1);
    CHECK_THROWS(absorption_witness(1, 10));
}

TEST_CASE("combinators") {
    auto f = absorption_witness(3, 30);
    auto inv = invert_witness(f);
    auto back = compose_witness(f, inv);
    for (auto i : witness_region(back)) CHECK(back.table[i] == static_cast<std::int64_t>(i));
    CHECK(verify_witness(inv, inv.deltas).ok());
    auto twice = invert_witness(inv);
    for (auto i : witness_region(twice)) CHECK(twice.table[i] == f.table[i]);

    auto a = zr_ball(1, 3), b = canonical_ultrametric(ff("3:1"), 1);
    auto p = product_witness(identity_witness(a), identity_witness(b));
    CHECK(p.source->size() == a->size() * b->size());
    for (std::size_t i = 0; i < p.table.size(); ++i) CHECK(p.table[i] == static_cast<std::int64_t>(i));
    CHECK(p.validity_radius == 3);
    CHECK(verify_witness(p, p.deltas).ok());

    CHECK_THROWS_AS(compose_witness(f, f), std::invalid_argument);
}

TEST_CASE("verifier catches a swapped pair") {
    auto x = product_space(zr_ball(1, 5), canonical_ultrametric(ff("2:1"), 1));
    auto w = factorization_witness(x, 1);
    auto& grp = std::get<IsometryClaim>(w.claims[0]).groups[0];
    // basepoint of the source and its neighbour in the same group
    std::size_t b = w.source->basepoint(), nb = b;
    for (auto i : grp)
        if (w.source->dist(i, b) == 1) nb = i;
    REQUIRE(nb != b);
    std::swap(w.table[b], w.table[nb]);
    auto rep = verify_witness(w, w.deltas);
    CHECK(has_kind(rep, "component-isometry"));
    CHECK(has_kind(rep, "moduli"));
    bool names_pair = false;
    for (auto& v : rep.violations)
        if (v.kind == "component-isometry" &&
            (v.detail.find(w.source->label(b)) != std::string::npos ||
             v.detail.find(w.source->label(nb)) != std::string::npos))
            names_pair = true;
    CHECK(names_pair);

    auto bad = identity_witness(zr_ball(1, 4));
    bad.table[2] = bad.table[3];
    CHECK(has_kind(verify_witness(bad, {1}), "injectivity"));
    bad.table[2] = -1;
    CHECK(has_kind(verify_witness(bad, {1}), "missing"));
}

TEST_CASE("multiplicity constant and corrupted") {
    auto src = product_space(point_space(1), point_space(4, 1));
    std::vector<std::int64_t> id{0, 1, 2, 3};
    auto even = relabel_witness(src, line_points({0, 1, 10, 11}), id, "even");
    auto m = component_multiplicity(even, 1);
    REQUIRE(m.n);
    CHECK(*m.n == 2);
    CHECK(m.components == 2);
    auto odd = relabel_witness(src, line_points({0, 1, 2, 10}), id, "odd");
    auto mo = component_multiplicity(odd, 1);
    CHECK_FALSE(mo.n);
    CHECK_FALSE(mo.violation.empty());

    auto al = tower_alignment_witness(twelve_z2(), two_z4());
    auto ma = component_multiplicity(al, 2);
    REQUIRE(ma.n);
    CHECK(*ma.n == 4);
}

TEST_CASE("iso chains") {
    struct Case {
        const char* a;
        const char* b;
        std::int64_t radius;
        std::size_t depth;
    };
    for (auto c : {Case{"Z+C2", "Z", 20, 6}, Case{"Z+C2^inf", "Z+C2^inf+C3", 6, 6}, Case{"C2^inf", "C4^inf", 8, 12},
                   Case{"Z^2+C2", "Z^2+C4", 3, 2}, Case{"Z+C3", "Z+C3", 5, 2}}) {
        CAPTURE(c.a);
        CAPTURE(c.b);
        auto w = iso_witness_chain(parse_group(c.a), parse_group(c.b), {c.radius, c.depth, {}});
        auto rep = verify_witness(w, w.deltas);
        CHECK_MESSAGE(rep.ok(), kinds(rep));
        CHECK(rep.bijective);
        CHECK(w.validity_radius >= 1);
    }
    CHECK_THROWS_AS(iso_witness_chain(parse_group("Z"), parse_group("Z^2"), {}), std::invalid_argument);
    CHECK_THROWS_AS(iso_witness_chain(parse_group("Z^inf"), parse_group("Z^inf+C5^inf"), {}), std::invalid_argument);
}
