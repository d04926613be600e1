#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "coarse/kernels.hpp"
#include "coarse/metric.hpp"

using namespace coarse;
namespace K = coarse::kernels;

namespace {

std::vector<std::int64_t> ints(std::mt19937_64& rng, std::size_t n, std::int64_t lo, std::int64_t hi) {
    std::uniform_int_distribution<std::int64_t> d(lo, hi);
    std::vector<std::int64_t> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

// Kruskal over all pairs
Dist brute_mst_weight(const FiniteSpace& x) {
    std::size_t n = x.size();
    std::vector<std::tuple<Dist, std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(x.dist(i, j), i, j);
    std::sort(e.begin(), e.end());
    std::vector<std::size_t> up(n);
    std::iota(up.begin(), up.end(), 0);
    auto find = [&](std::size_t a) {
        while (up[a] != a) a = up[a] = up[up[a]];
        return a;
    };
    Dist total = 0;
    for (auto& [w, i, j] : e) {
        auto a = find(i), b = find(j);
        if (a != b) {
            up[a] = b;
            total += w;
        }
    }
    return total;
}

struct Restore {
    ~Restore() { K::select("auto"); }
};

}  // namespace

TEST_CASE("selection") {
    Restore r;
    CHECK(K::select("scalar"));
    CHECK(std::string(K::active().name) == "scalar");
    CHECK_FALSE(K::select("sse9"));
    CHECK(K::select("auto"));
    if (K::avx2()) CHECK(std::string(K::active().name) == "avx2");
}

TEST_CASE("avx2 kernels match the scalar reference") {
    const K::Table* v = K::avx2();
    if (!v) {
        MESSAGE("no AVX2 on this machine; nothing to compare");
        return;
    }
    const K::Table& s = K::scalar();
    std::mt19937_64 rng(3);
    for (int t = 0; t < 400; ++t) {
        std::size_t n = t < 80 ? static_cast<std::size_t>(t) : 1 + rng() % 700;
        auto x = ints(rng, n, -1000, 1000);
        auto out0 = ints(rng, n, 0, 3000);
        std::int64_t c = static_cast<std::int64_t>(rng() % 2001) - 1000, w = 1 + static_cast<std::int64_t>(rng() % 7);

        auto a = out0, b = out0;
        s.free_axis_max(x.data(), n, c, w, a.data());
        v->free_axis_max(x.data(), n, c, w, b.data());
        REQUIRE(a == b);

        auto lv = ints(rng, n, 0, 3);
        a = out0, b = out0;
        s.discrete_axis_max(lv.data(), n, 1, w * 300, a.data());
        v->discrete_axis_max(lv.data(), n, 1, w * 300, b.data());
        REQUIRE(a == b);

        std::uniform_real_distribution<double> ud(-200.0, 200.0);
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = ud(rng);
            ys[i] = ud(rng) * (i % 5 == 0 ? 1e3 : 1.0);
        }
        double qx = ud(rng), qy = ud(rng);
        std::vector<std::int64_t> ea(n), eb(n);
        s.euclid_row(xs.data(), ys.data(), n, qx, qy, 1e9, ea.data());
        v->euclid_row(xs.data(), ys.data(), n, qx, qy, 1e9, eb.data());
        REQUIRE(ea == eb);

        auto row = ints(rng, n, 0, 50);
        auto key0 = ints(rng, n, 0, 60);
        std::vector<std::uint8_t> done(n);
        for (auto& d : done) d = rng() % 4 == 0;
        auto ka = key0, kb = key0;
        REQUIRE(s.prim_update(row.data(), ka.data(), done.data(), n) ==
                v->prim_update(row.data(), kb.data(), done.data(), n));
        REQUIRE(ka == kb);

        std::int64_t th = static_cast<std::int64_t>(rng() % 60);
        REQUIRE(s.count_le(row.data(), n, th) == v->count_le(row.data(), n, th));
        REQUIRE(s.max_where_le(row.data(), key0.data(), n, th) == v->max_where_le(row.data(), key0.data(), n, th));
    }
}

TEST_CASE("prim update edge cases") {
    for (const K::Table* t : {&K::scalar(), K::avx2()}) {
        if (!t) continue;
        std::vector<std::int64_t> row(9, 5), key(9, 7);
        std::vector<std::uint8_t> done(9, 1);
        CHECK(t->prim_update(row.data(), key.data(), done.data(), 9) == 9);
        std::fill(done.begin(), done.end(), 0);
        done[0] = 1;
        // ties resolve to the smallest index
        CHECK(t->prim_update(row.data(), key.data(), done.data(), 9) == 1);
        CHECK(t->max_where_le(row.data(), key.data(), 9, 4) == -1);
        CHECK(t->count_le(row.data(), 0, 100) == 0);
    }
}

TEST_CASE("spaces built under either kernel agree") {
    Restore r;
    auto build = [] {
        auto g = parse_group("Z^2+C3^inf");
        return std::tuple{example31_fixture(2, 0.05, 40), build_truncation(g, interleaved_schedule(g, 9), 9)};
    };
    REQUIRE(K::select("scalar"));
    auto [e_s, g_s] = build();
    auto ms = e_s->mst();
    auto steps = estimate_factorizing_step(*g_s).estimate;
    auto comps = epsilon_components(*e_s, 3 * e_s->scale()).blocks.size();
    REQUIRE(K::select("auto"));
    auto [e_v, g_v] = build();
    auto mv = e_v->mst();
    REQUIRE(ms.size() == mv.size());
    for (std::size_t i = 0; i < ms.size(); ++i) CHECK(ms[i].w == mv[i].w);
    CHECK(estimate_factorizing_step(*g_v).estimate == steps);
    CHECK(epsilon_components(*e_v, 3 * e_v->scale()).blocks.size() == comps);
    for (std::size_t i = 0; i < e_s->size(); i += 37)
        CHECK(e_s->row(i) == e_v->row(i));
}

TEST_CASE("mst weight matches Kruskal") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> ud(-50.0, 50.0);
    for (int t = 0; t < 20; ++t) {
        std::size_t n = 2 + rng() % 300;
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = ud(rng), ys[i] = ud(rng);
        auto x = FiniteSpace::euclid(xs, ys, 0, 10, 1000000000, "cloud");
        Dist total = 0;
        for (auto& e : x->mst()) total += e.w;
        CHECK(x->mst().size() == n - 1);
        CHECK(total == brute_mst_weight(*x));
    }
    auto z = zr_ball(2, 6);
    Dist total = 0;
    for (auto& e : z->mst()) total += e.w;
    CHECK(total == brute_mst_weight(*z));
}
