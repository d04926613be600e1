#include "coarse/witness.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "coarse/kernels.hpp"

namespace coarse {

namespace {

Dist max_row(const FiniteSpace& x) {
    auto r = x.row(x.basepoint());
    return r.empty() ? 0 : *std::max_element(r.begin(), r.end());
}

// max d_b(ib[s], ib[t]) over s < t with d_a(ia[s], ia[t]) <= delta, for every delta
std::vector<Dist> pair_moduli(const FiniteSpace& a, const std::vector<std::size_t>& ia, const FiniteSpace& b,
                              const std::vector<std::size_t>& ib, const std::vector<Dist>& deltas) {
    const auto& K = kernels::active();
    std::size_t m = ia.size();
    std::vector<Dist> ra(a.size()), rb(b.size()), ga(m), gb(m);
    std::vector<Dist> out(deltas.size(), 0);
    for (std::size_t s = 0; s + 1 < m; ++s) {
        a.row(ia[s], ra.data());
        b.row(ib[s], rb.data());
        std::size_t cnt = 0;
        for (std::size_t t = s + 1; t < m; ++t, ++cnt) {
            ga[cnt] = ra[ia[t]];
            gb[cnt] = rb[ib[t]];
        }
        for (std::size_t d = 0; d < deltas.size(); ++d)
            out[d] = std::max(out[d], K.max_where_le(ga.data(), gb.data(), cnt, deltas[d]));
    }
    return out;
}

std::vector<std::size_t> images_of(const WitnessMap& w, const std::vector<std::size_t>& region) {
    std::vector<std::size_t> out;
    out.reserve(region.size());
    for (auto i : region) out.push_back(static_cast<std::size_t>(w.table[i]));
    return out;
}

void require_grid(const FiniteSpace& x, const char* what) {
    if (x.kind() != FiniteSpace::Kind::grid)
        throw std::invalid_argument(std::string(what) + ": needs a group truncation (grid space)");
}

// axis indices sorted by level; levels must be distinct
std::vector<std::size_t> level_order(const FiniteSpace& x) {
    require_grid(x, "tower alignment");
    if (!x.ultrametric()) throw std::invalid_argument("tower alignment: space is not ultrametric");
    const auto& axes = x.axes();
    std::vector<std::size_t> ord(axes.size());
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](auto p, auto q) { return axes[p].unit < axes[q].unit; });
    for (std::size_t k = 1; k < ord.size(); ++k)
        if (axes[ord[k]].unit == axes[ord[k - 1]].unit)
            throw std::invalid_argument("tower alignment: two summands share a level");
    return ord;
}

std::string short_list(const std::vector<std::string>& items) {
    std::string s;
    for (std::size_t i = 0; i < items.size() && i < 5; ++i) s += (i ? ", " : "") + items[i];
    if (items.size() > 5) s += ", ... (" + std::to_string(items.size()) + " total)";
    return s;
}

}  // namespace

std::optional<Dist> TowerAlignment::bound(Dist delta) const {
    std::size_t a = 0;
    while (a + 1 < u_radius.size() && u_radius[a + 1] <= delta) ++a;
    for (auto& [pa, pb] : pairs)
        if (pa >= a) return v_radius[pb];
    return std::nullopt;
}

std::vector<Dist> default_deltas(Dist scale) { return {scale, 2 * scale, 4 * scale, 8 * scale}; }

std::vector<std::size_t> witness_region(const WitnessMap& w) {
    return validity_region(MapTable{w.source, w.target, w.table, w.validity_radius});
}

void remeasure(WitnessMap& w) {
    auto region = witness_region(w);
    if (region.empty()) throw std::invalid_argument("empty validity region");
    auto img = images_of(w, region);
    w.forward_moduli = pair_moduli(*w.source, region, *w.target, img, w.deltas);
    w.backward_moduli = pair_moduli(*w.target, img, *w.source, region, w.deltas);
}

Dist defined_radius(const FiniteSpace& x, const std::vector<std::int64_t>& table, Dist cap) {
    auto rowb = x.row(x.basepoint());
    Dist first_gap = cap + 1;
    for (std::size_t i = 0; i < rowb.size(); ++i)
        if (table[i] < 0) first_gap = std::min(first_gap, rowb[i]);
    Dist best = -1;
    for (auto d : rowb)
        if (d < first_gap && d <= cap) best = std::max(best, d);
    return best;
}

// ---- simple witnesses -------------------------------------------------------------

WitnessMap identity_witness(const SpacePtr& x) {
    WitnessMap w;
    w.source = w.target = x;
    w.table.resize(x->size());
    std::iota(w.table.begin(), w.table.end(), 0);
    w.validity_radius = max_row(*x);
    w.deltas = default_deltas(x->scale());
    w.construction = "identity";
    remeasure(w);
    return w;
}

WitnessMap relabel_witness(const SpacePtr& source, const SpacePtr& target, std::vector<std::int64_t> table,
                           std::string construction) {
    if (table.size() != source->size()) throw std::invalid_argument("relabel: table size mismatch");
    WitnessMap w;
    w.source = source;
    w.target = target;
    w.table = std::move(table);
    w.validity_radius = defined_radius(*source, w.table, max_row(*source));
    w.deltas = default_deltas(source->scale());
    w.construction = std::move(construction);
    remeasure(w);
    return w;
}

WitnessMap axis_permutation_witness(const SpacePtr& g, const std::vector<std::size_t>& perm) {
    require_grid(*g, "axis permutation");
    const auto& axes = g->axes();
    if (perm.size() != axes.size()) throw std::invalid_argument("axis permutation: wrong length");
    std::vector<Axis> ax;
    std::vector<std::int64_t> base;
    for (auto p : perm) {
        ax.push_back(axes.at(p));
        base.push_back(g->base_coords()[p]);
    }
    auto t = FiniteSpace::grid(ax, base, g->inner_radius(), g->id() + "[permuted]")->with_phi(g->phi_symbolic());
    std::vector<std::int64_t> table(g->size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        auto c = g->coords(i);
        std::vector<std::int64_t> d;
        for (auto p : perm) d.push_back(c[p]);
        table[i] = static_cast<std::int64_t>(*t->index_of(d));
    }
    return relabel_witness(g, t, std::move(table), "axis-permutation");
}

// ---- factorization (recursion over scales eps + n) ---------------------------------------

WitnessMap factorization_witness(const SpacePtr& xp, Dist eps, const Limits& lim) {
    const FiniteSpace& x = *xp;
    require_grid(x, "factorization_witness");
    x.require_enumerable();
    if (eps < 0) throw std::invalid_argument("epsilon must be nonnegative");
    const Dist one = x.scale();
    if (x.inner_radius() < eps + one) throw std::invalid_argument("truncation too small for one full stage");
    if (!step_candidate_stable(x, eps)) throw std::invalid_argument("epsilon below the stable range");

    const auto& axes = x.axes();
    const auto& base = x.base_coords();
    std::size_t n = x.size(), na = axes.size();

    // X_eps: the eps-component of the basepoint
    std::vector<std::size_t> c0;
    std::size_t c0_base = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto c = x.coords(i);
        bool in = true;
        for (std::size_t k = 0; k < na && in; ++k)
            if (axes[k].unit > eps && c[k] != base[k]) in = false;
        if (!in) continue;
        if (i == x.basepoint()) c0_base = c0.size();
        c0.push_back(i);
    }
    auto C0 = FiniteSpace::subspace(xp, c0, c0_base, x.inner_radius(), x.id() + "_eps");
    auto cp = epsilon_components(x, eps);
    auto Q = quotient_space(x, eps);
    auto src = FiniteSpace::product(C0, Q, lim);

    Dist top = 0;
    for (auto& a : axes) top = std::max(top, a.unit);
    std::size_t stages = 0;
    while (eps + static_cast<Dist>(stages) * one < top) ++stages;

    // translation carrying X_eps onto block q, built stage by stage from the top:
    // at scale eps_k the representative of the current component is its
    // centred-lexicographic minimum (coordinates below the scale at the base value)
    std::size_t nq = cp.blocks.size();
    std::vector<std::vector<std::int64_t>> shift(nq, std::vector<std::int64_t>(na, 0));
    for (std::size_t q = 0; q < nq; ++q) {
        auto cur = x.coords(cp.representatives[q]);
        for (std::size_t k = 0; k < na; ++k)
            if (axes[k].unit <= eps) cur[k] = base[k];
        auto& g = shift[q];
        for (std::size_t st = stages + 1; st-- > 0;) {
            Dist scale_k = eps + static_cast<Dist>(st) * one;
            for (std::size_t k = 0; k < na; ++k) {
                if (axes[k].unit <= scale_k) continue;
                std::int64_t xk = cur[k] - base[k];
                g[k] += xk;
                cur[k] -= xk;
            }
        }
    }

    std::vector<std::int64_t> table(src->size(), -1);
    for (std::size_t ci = 0; ci < c0.size(); ++ci)
        for (std::size_t q = 0; q < nq; ++q)
            if (auto y = x.translate(c0[ci], shift[q])) table[ci * nq + q] = static_cast<std::int64_t>(*y);

    WitnessMap w;
    w.source = src;
    w.target = xp;
    w.table = std::move(table);
    w.validity_radius = defined_radius(*src, w.table, max_row(*src));
    w.deltas = default_deltas(one);
    w.construction = "factorization(eps=" + units_str(eps, one) + ",stages=" + std::to_string(stages) + ")";
    IsometryClaim claim;
    for (std::size_t q = 0; q < nq; ++q) {
        std::vector<std::size_t> grp;
        for (std::size_t ci = 0; ci < c0.size(); ++ci) grp.push_back(ci * nq + q);
        claim.groups.push_back(std::move(grp));
        claim.image_blocks.push_back(cp.blocks[q]);
    }
    w.claims.emplace_back(std::move(claim));
    remeasure(w);
    return w;
}

// ---- tower alignment ------------------------------------------------------------------

TowerAlignment align_towers(const FiniteSpace& u, const FiniteSpace& v) {
    TowerAlignment al;
    auto fill = [](const FiniteSpace& s, std::vector<std::uint64_t>& ord, std::vector<Dist>& rad) {
        auto lo = level_order(s);
        ord = {1};
        rad = {0};
        for (auto k : lo) {
            ord.push_back(ord.back() * static_cast<std::uint64_t>(s.axes()[k].order));
            rad.push_back(s.axes()[k].unit);
        }
    };
    fill(u, al.u_ball_orders, al.u_radius);
    fill(v, al.v_ball_orders, al.v_radius);
    std::size_t du = al.u_ball_orders.size() - 1, dv = al.v_ball_orders.size() - 1;
    std::size_t a = 0, b = 0;
    al.pairs.push_back({0, 0});
    while (a < du || b < dv) {
        std::size_t na = a + 1;
        while (na <= du && al.u_ball_orders[na] % al.v_ball_orders[b] != 0) ++na;
        if (na > du) break;
        std::size_t nb = b;
        while (nb <= dv && al.v_ball_orders[nb] % al.u_ball_orders[na] != 0) ++nb;
        if (nb > dv) break;
        a = na;
        b = nb;
        al.pairs.push_back({a, b});
    }
    if (a != du || b != dv) throw std::runtime_error("alignment impossible within truncation depth");
    for (std::size_t k = 0; k < al.u_radius.size(); ++k)
        if (auto bd = al.bound(al.u_radius[k])) al.modulus.push_back({al.u_radius[k], *bd});
    return al;
}

WitnessMap tower_alignment_witness(const SpacePtr& u, const SpacePtr& v) {
    if (!u->phi_symbolic() || !v->phi_symbolic() || !ff_equal(*u->phi_symbolic(), *v->phi_symbolic()))
        throw std::invalid_argument("factorizing functions differ; no tower alignment exists");
    u->require_enumerable();
    v->require_enumerable();
    if (u->size() != v->size()) throw std::runtime_error("alignment impossible within truncation depth");
    auto al = align_towers(*u, *v);
    auto lu = level_order(*u), lv = level_order(*v);

    // mixed-radix numbering, lowest level least significant
    std::vector<std::int64_t> table(u->size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        auto c = u->coords(i);
        std::uint64_t num = 0, w = 1;
        for (auto k : lu) {
            num += static_cast<std::uint64_t>(c[k] - u->axes()[k].lo) * w;
            w *= static_cast<std::uint64_t>(u->axes()[k].order);
        }
        std::vector<std::int64_t> d(v->axes().size());
        for (auto k : lv) {
            auto o = static_cast<std::uint64_t>(v->axes()[k].order);
            d[k] = v->axes()[k].lo + static_cast<std::int64_t>(num % o);
            num /= o;
        }
        table[i] = static_cast<std::int64_t>(*v->index_of(d));
    }
    WitnessMap w;
    w.source = u;
    w.target = v;
    w.table = std::move(table);
    w.validity_radius = max_row(*u);
    w.deltas = default_deltas(u->scale());
    w.construction = "tower-alignment";
    std::set<std::tuple<Dist, Dist, bool>> seen;
    for (std::size_t k = 0; k < al.pairs.size(); ++k) {
        auto [a, b] = al.pairs[k];
        if (seen.insert({al.u_radius[a], al.v_radius[b], false}).second)
            w.claims.emplace_back(BallClaim{al.u_radius[a], al.v_radius[b], false});
        if (k + 1 < al.pairs.size()) {
            auto an = al.pairs[k + 1].first;
            if (seen.insert({al.u_radius[an], al.v_radius[b], true}).second)
                w.claims.emplace_back(BallClaim{al.u_radius[an], al.v_radius[b], true});
        }
    }
    w.alignment = std::move(al);
    remeasure(w);
    return w;
}

// ---- absorption Z -> Z x Z_k -------------------------------------------------------------

WitnessMap absorption_witness(std::int64_t k, std::int64_t radius, const Limits& lim) {
    if (k < 2) throw std::invalid_argument("absorption needs k >= 2");
    if (radius < 0) throw std::invalid_argument("radius must be nonnegative");
    auto src = zr_ball(1, radius, lim);
    std::int64_t r2 = (radius + k - 1) / k;
    auto tgt = FiniteSpace::product(zr_ball(1, r2, lim), point_space(k), lim);
    std::vector<std::int64_t> table(src->size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        std::int64_t nn = src->coords(i)[0];
        std::int64_t q = nn >= 0 ? nn / k : -((-nn + k - 1) / k);
        table[i] = static_cast<std::int64_t>(*tgt->index_of({q, nn - q * k}));
    }
    WitnessMap w;
    w.source = src;
    w.target = tgt;
    w.table = std::move(table);
    w.validity_radius = radius;
    w.deltas = default_deltas(1);
    w.construction = "absorption(k=" + std::to_string(k) + ")";
    remeasure(w);
    return w;
}

// ---- combinators ------------------------------------------------------------------------

WitnessMap compose_witness(const WitnessMap& f, const WitnessMap& g) {
    if (!f.target->same_as(*g.source)) throw std::invalid_argument("witnesses are not composable");
    std::vector<std::uint8_t> g_ok(g.source->size(), 0);
    for (auto y : witness_region(g)) g_ok[y] = 1;
    std::vector<std::int64_t> table(f.source->size(), -1);
    for (auto x : witness_region(f)) {
        auto y = static_cast<std::size_t>(f.table[x]);
        if (g_ok[y]) table[x] = g.table[y];
    }
    WitnessMap w;
    w.source = f.source;
    w.target = g.target;
    w.table = std::move(table);
    w.validity_radius = defined_radius(*w.source, w.table, f.validity_radius);
    if (w.validity_radius < 0) throw std::invalid_argument("empty validity region");
    w.deltas = f.deltas;
    w.construction = "(" + g.construction + ")o(" + f.construction + ")";
    remeasure(w);
    return w;
}

WitnessMap product_witness(const WitnessMap& f, const WitnessMap& g, const Limits& lim) {
    auto src = FiniteSpace::product(f.source, g.source, lim);
    auto tgt = FiniteSpace::product(f.target, g.target, lim);
    std::size_t nb = g.source->size(), mb = g.target->size();
    std::vector<std::int64_t> gt(nb, -1);
    for (auto j : witness_region(g)) gt[j] = g.table[j];
    std::vector<std::int64_t> table(src->size(), -1);
    for (auto i : witness_region(f))
        for (std::size_t j = 0; j < nb; ++j)
            if (gt[j] >= 0)
                table[i * nb + j] = f.table[i] * static_cast<std::int64_t>(mb) + gt[j];
    WitnessMap w;
    w.source = src;
    w.target = tgt;
    w.table = std::move(table);
    // a factor defined everywhere does not limit the radius
    auto cap = [](const WitnessMap& h) {
        return witness_region(h).size() == h.source->size() ? kWholeSpace : h.validity_radius;
    };
    w.validity_radius = defined_radius(*src, w.table, std::min(cap(f), cap(g)));
    if (w.validity_radius < 0) throw std::invalid_argument("empty validity region");
    w.deltas = f.deltas;
    w.construction = "(" + f.construction + ")x(" + g.construction + ")";
    remeasure(w);
    return w;
}

WitnessMap invert_witness(const WitnessMap& f) {
    std::vector<std::int64_t> table(f.target->size(), -1);
    for (auto x : witness_region(f)) table[static_cast<std::size_t>(f.table[x])] = static_cast<std::int64_t>(x);
    WitnessMap w;
    w.source = f.target;
    w.target = f.source;
    w.table = std::move(table);
    w.validity_radius = defined_radius(*w.source, w.table, max_row(*w.source));
    if (w.validity_radius < 0) throw std::invalid_argument("empty validity region");
    w.deltas = f.deltas;
    w.construction = "inverse(" + f.construction + ")";
    remeasure(w);
    return w;
}

// ---- the chain G1 -> H1 x G1/H1 -> ... -> G2 ----------------------------------------------

namespace {

std::size_t finite_rank_of(const GroupDescription& g) {
    return static_cast<std::size_t>(g.free_rank_part.value());
}

// free axes (first one of radius r1, the others rho) followed by the torsion tower
SpacePtr canonical_box(const GroupDescription& g, std::size_t rank, std::int64_t r1, std::int64_t rho,
                       const SpacePtr& tower, const Limits& lim) {
    std::vector<Axis> axes;
    for (std::size_t k = 0; k < rank; ++k) axes.push_back(Axis::free_axis(k == 0 ? r1 : rho));
    axes.insert(axes.end(), tower->axes().begin(), tower->axes().end());
    Dist inner = std::min<Dist>(rank ? rho : kWholeSpace, tower->inner_radius());
    if (rank) inner = std::min<Dist>(inner, r1);
    auto s = FiniteSpace::grid(axes, std::vector<std::int64_t>(axes.size(), 0), inner,
                               "canonical(" + g.render() + ")", lim);
    s->require_enumerable();
    return s->with_phi(factorizing_function_symbolic(g));
}

SpacePtr padded_tower(std::int64_t n, const SpacePtr& tower) {
    std::vector<Axis> axes;
    if (n > 1) axes.push_back(Axis::cyclic(n, 1));
    axes.insert(axes.end(), tower->axes().begin(), tower->axes().end());
    auto s = FiniteSpace::grid(axes, std::vector<std::int64_t>(axes.size(), 0), tower->inner_radius(),
                               "[" + std::to_string(n) + "]x" + tower->id());
    return s->with_phi(ff_add(phi_of_nat(static_cast<std::uint64_t>(n)), *tower->phi_symbolic()));
}

SpacePtr rest_axes(const FiniteSpace& x, std::size_t from) {
    std::vector<Axis> axes(x.axes().begin() + static_cast<std::ptrdiff_t>(from), x.axes().end());
    return FiniteSpace::grid(axes, std::vector<std::int64_t>(axes.size(), 0), x.inner_radius(), "rest");
}

// X -> C0 x X/eps -> X -> (absorb n on z1) -> Z^r(rho) x ([n] x U)
WitnessMap side_chain(const SpacePtr& x, std::size_t rank, std::int64_t n, std::int64_t radius1,
                      const Limits& lim) {
    auto st = estimate_factorizing_step(*x);
    if (st.inconclusive) throw std::runtime_error("truncation too small to complete the chain");
    auto fac = factorization_witness(x, st.estimate, lim);
    auto inv = invert_witness(fac);

    // (c, block) -> point with c's coordinates below eps and the block's above
    const auto& src = fac.source;
    const auto& c0 = *src->factor_a();
    const auto& q = *src->factor_b();
    auto cp = epsilon_components(*x, st.estimate);
    std::vector<std::int64_t> rel(src->size());
    for (std::size_t ci = 0; ci < c0.size(); ++ci) {
        auto cc = x->coords(c0.parent_indices()[ci]);
        for (std::size_t b = 0; b < q.size(); ++b) {
            auto rc = x->coords(cp.representatives[b]);
            for (std::size_t k = 0; k < cc.size(); ++k)
                if (x->axes()[k].unit > st.estimate) cc[k] = rc[k];
            rel[ci * q.size() + b] = static_cast<std::int64_t>(*x->index_of(cc));
        }
    }
    auto chain = compose_witness(inv, relabel_witness(src, x, std::move(rel), "relabel"));
    if (n > 1) {
        auto ab = product_witness(absorption_witness(n, radius1, lim), identity_witness(rest_axes(*x, 1)), lim);
        chain = compose_witness(chain, ab);
        if (rank > 1) {
            // [z1, n, z2..zr, U] -> [z1, z2..zr, n, U]
            std::vector<std::size_t> perm{0};
            for (std::size_t k = 2; k <= rank; ++k) perm.push_back(k);
            perm.push_back(1);
            for (std::size_t k = rank + 1; k < chain.target->axes().size(); ++k) perm.push_back(k);
            chain = compose_witness(chain, axis_permutation_witness(chain.target, perm));
        }
    }
    return chain;
}

}  // namespace

WitnessMap iso_witness_chain(const GroupDescription& g1, const GroupDescription& g2, const ChainOptions& opt) {
    auto verdict = coarse_isomorphic(g1, g2);
    if (!verdict.result) throw std::invalid_argument("groups are not coarsely isomorphic: " + verdict.reason);
    if (g1.free_rank_part.is_inf())
        throw std::invalid_argument("infinite free rank is outside the witness scope");
    const Limits& lim = opt.lim;
    std::size_t rank = finite_rank_of(g1);
    std::int64_t rho = opt.radius;
    if (rho < 1) throw std::invalid_argument("radius must be positive");

    if (g1.render() == g2.render()) {
        auto t = torsion_ultrametric(g1, opt.depth, lim);
        auto w = identity_witness(canonical_box(g1, rank, rho, rho, t, lim));
        w.construction = "identity-chain";
        return w;
    }
    std::int64_t n1 = 1, n2 = 1;
    if (rank > 0) {
        if (!verdict.multipliers) throw std::logic_error("positive-rank verdict without multipliers");
        n1 = static_cast<std::int64_t>(verdict.multipliers->first);
        n2 = static_cast<std::int64_t>(verdict.multipliers->second);
    }

    // depths with n1*|U1| = n2*|U2|
    SpacePtr u1, u2;
    for (std::size_t d1 = opt.depth; d1 <= opt.depth + 8 && !u2; ++d1) {
        auto a = torsion_ultrametric(g1, d1, lim);
        long double target = a->approx_size() * static_cast<long double>(n1);
        if (target > static_cast<long double>(lim.point_budget)) break;
        for (std::size_t d2 = 0; d2 <= 64; ++d2) {
            auto b = torsion_ultrametric(g2, d2, lim);
            long double got = b->approx_size() * static_cast<long double>(n2);
            if (got == target) {
                u1 = a;
                u2 = b;
                break;
            }
            if (got > target || b->axes().size() < d2) break;
        }
    }
    if (!u2) throw std::runtime_error("truncation too small to complete the chain");

    if (rank == 0) {
        auto w = tower_alignment_witness(u1, u2);
        w.construction = "chain[" + w.construction + "]";
        return w;
    }
    auto x1 = canonical_box(g1, rank, rho * n1, rho, u1, lim);
    auto x2 = canonical_box(g2, rank, rho * n2, rho, u2, lim);
    auto left = side_chain(x1, rank, n1, rho * n1, lim);
    auto right = side_chain(x2, rank, n2, rho * n2, lim);
    auto mid = product_witness(identity_witness(zr_ball(static_cast<int>(rank), rho, lim)),
                               tower_alignment_witness(padded_tower(n1, u1), padded_tower(n2, u2)), lim);
    auto w = compose_witness(compose_witness(left, mid), invert_witness(right));
    w.construction = "chain(n1=" + std::to_string(n1) + ",n2=" + std::to_string(n2) + ")";
    return w;
}

// ---- verification ---------------------------------------------------------------------------

namespace {

void check_isometry(const WitnessMap& w, const IsometryClaim& c, const std::vector<std::uint8_t>& in_region,
                    std::vector<Violation>& out) {
    const auto& s = *w.source;
    const auto& t = *w.target;
    for (std::size_t gi = 0; gi < c.groups.size(); ++gi) {
        const auto& grp = c.groups[gi];
        bool bad = false;
        for (std::size_t a = 0; a < grp.size() && !bad; ++a) {
            if (!in_region[grp[a]]) continue;
            for (std::size_t b = a + 1; b < grp.size(); ++b) {
                if (!in_region[grp[b]]) continue;
                Dist ds = s.dist(grp[a], grp[b]);
                Dist dt = t.dist(static_cast<std::size_t>(w.table[grp[a]]), static_cast<std::size_t>(w.table[grp[b]]));
                if (ds != dt) {
                    out.push_back({"component-isometry",
                                   "pair " + s.label(grp[a]) + ", " + s.label(grp[b]) + ": source distance " +
                                       units_str(ds, s.scale()) + ", image distance " + units_str(dt, t.scale())});
                    bad = true;
                    break;
                }
            }
        }
        if (bad || gi >= c.image_blocks.size()) continue;
        bool whole = std::all_of(grp.begin(), grp.end(), [&](auto i) { return in_region[i]; });
        if (!whole) continue;
        std::vector<std::size_t> img;
        for (auto i : grp) img.push_back(static_cast<std::size_t>(w.table[i]));
        std::sort(img.begin(), img.end());
        auto want = c.image_blocks[gi];
        std::sort(want.begin(), want.end());
        if (img != want)
            out.push_back({"component-image", "group " + std::to_string(gi) + " does not map onto its component"});
    }
}

void check_balls(const WitnessMap& w, const BallClaim& c, const std::vector<std::uint8_t>& in_region,
                 std::vector<Violation>& out) {
    auto sp = epsilon_components(*w.source, c.source_radius);
    auto tp = epsilon_components(*w.target, c.target_radius);
    for (std::size_t bi = 0; bi < sp.blocks.size(); ++bi) {
        const auto& blk = sp.blocks[bi];
        if (!std::all_of(blk.begin(), blk.end(), [&](auto i) { return in_region[i]; })) continue;
        std::map<std::size_t, std::size_t> hit;
        for (auto i : blk) ++hit[tp.block_of[static_cast<std::size_t>(w.table[i])]];
        std::string where = "ball of radius " + units_str(c.source_radius, w.source->scale()) + " at " +
                            w.source->label(sp.representatives[bi]);
        if (c.union_of) {
            for (auto& [tb, cnt] : hit)
                if (cnt != tp.blocks[tb].size()) {
                    out.push_back({"ball-respecting", where + " is not a union of target balls of radius " +
                                                          units_str(c.target_radius, w.target->scale())});
                    break;
                }
        } else if (hit.size() != 1) {
            out.push_back({"ball-respecting", where + " meets " + std::to_string(hit.size()) +
                                                  " target balls of radius " +
                                                  units_str(c.target_radius, w.target->scale())});
        }
    }
}

}  // namespace

VerifyReport verify_witness(const WitnessMap& w, const std::vector<Dist>& deltas) {
    VerifyReport rep;
    auto& out = rep.violations;
    std::size_t n = w.source->size(), m = w.target->size();
    if (w.table.size() != n) {
        out.push_back({"table", "table size does not match the source"});
        return rep;
    }
    std::vector<std::int64_t> owner(m, -1);
    std::vector<std::string> collide, range;
    for (std::size_t i = 0; i < n; ++i) {
        auto y = w.table[i];
        if (y < 0) continue;
        if (static_cast<std::size_t>(y) >= m) {
            range.push_back(w.source->label(i));
            continue;
        }
        if (owner[static_cast<std::size_t>(y)] >= 0)
            collide.push_back(w.source->label(static_cast<std::size_t>(owner[static_cast<std::size_t>(y)])) + " and " +
                              w.source->label(i));
        else
            owner[static_cast<std::size_t>(y)] = static_cast<std::int64_t>(i);
    }
    if (!range.empty()) {
        out.push_back({"table", "images out of range at " + short_list(range)});
        return rep;
    }
    if (!collide.empty()) out.push_back({"injectivity", "shared images: " + short_list(collide)});

    auto rowb = w.source->row(w.source->basepoint());
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < n; ++i)
        if (rowb[i] <= w.validity_radius && w.table[i] < 0) missing.push_back(w.source->label(i));
    if (!missing.empty()) out.push_back({"missing", "undefined inside the validity radius: " + short_list(missing)});
    rep.bijective = collide.empty() && missing.empty();

    auto region = witness_region(w);
    rep.region_size = region.size();
    if (region.empty()) {
        out.push_back({"region", "empty validity region"});
        return rep;
    }
    auto img = images_of(w, region);
    std::vector<std::uint8_t> in_region(n, 0);
    for (auto i : region) in_region[i] = 1;

    for (auto d : deltas)
        if (d <= w.validity_radius) rep.deltas.push_back(d);
    rep.forward = pair_moduli(*w.source, region, *w.target, img, rep.deltas);
    rep.backward = pair_moduli(*w.target, img, *w.source, region, rep.deltas);

    if (!w.deltas.empty()) {
        auto fw = pair_moduli(*w.source, region, *w.target, img, w.deltas);
        auto bw = pair_moduli(*w.target, img, *w.source, region, w.deltas);
        for (std::size_t k = 0; k < w.deltas.size(); ++k) {
            auto d = units_str(w.deltas[k], w.source->scale());
            if (k >= w.forward_moduli.size() || w.forward_moduli[k] != fw[k])
                out.push_back({"moduli", "recorded forward modulus at delta " + d + " differs from re-measured " +
                                             units_str(fw[k], w.target->scale())});
            if (k >= w.backward_moduli.size() || w.backward_moduli[k] != bw[k])
                out.push_back({"moduli", "recorded backward modulus at delta " + d + " differs from re-measured " +
                                             units_str(bw[k], w.source->scale())});
        }
    }

    for (auto& c : w.claims) {
        if (auto* iso = std::get_if<IsometryClaim>(&c)) check_isometry(w, *iso, in_region, out);
        else check_balls(w, std::get<BallClaim>(c), in_region, out);
    }

    if (w.alignment) {
        for (std::size_t k = 0; k < rep.deltas.size(); ++k) {
            auto b = w.alignment->bound(rep.deltas[k]);
            rep.derived.push_back(b);
            if (b && rep.forward[k] > *b)
                out.push_back({"modulus-bound", "omega(" + units_str(rep.deltas[k], w.source->scale()) + ") = " +
                                                    units_str(rep.forward[k], w.target->scale()) +
                                                    " exceeds the alignment bound " +
                                                    units_str(*b, w.target->scale())});
        }
    } else {
        rep.derived.assign(rep.deltas.size(), std::nullopt);
    }
    return rep;
}

MultiplicityResult component_multiplicity(const WitnessMap& w, Dist epsilon) {
    MultiplicityResult res;
    const auto& s = *w.source;
    std::size_t n = s.size();
    // slices Z_x: the second factor of a product, points of an ultrametric, else one slice
    std::vector<std::size_t> slice(n, 0);
    if (s.factor_b()) {
        std::size_t nb = s.factor_b()->size();
        for (std::size_t i = 0; i < n; ++i) slice[i] = i % nb;
    } else if (s.ultrametric()) {
        std::iota(slice.begin(), slice.end(), 0);
    }
    auto tp = epsilon_components(*w.target, epsilon);
    std::map<std::size_t, std::size_t> slice_block;
    for (auto i : witness_region(w)) {
        std::size_t tb = tp.block_of[static_cast<std::size_t>(w.table[i])];
        auto [it, fresh] = slice_block.emplace(slice[i], tb);
        if (!fresh && it->second != tb) {
            res.violation = "slice through " + s.label(i) + " meets two components at scale " +
                            units_str(epsilon, w.target->scale());
            return res;
        }
    }
    std::map<std::size_t, std::uint64_t> count;
    for (auto& [sl, tb] : slice_block) ++count[tb];
    res.components = count.size();
    for (auto& [tb, c] : count) {
        if (!res.n) res.n = c;
        if (*res.n != c) {
            auto first = count.begin();
            res.violation = "component at " + w.target->label(tp.representatives[first->first]) + " receives " +
                            std::to_string(first->second) + " slices, component at " +
                            w.target->label(tp.representatives[tb]) + " receives " + std::to_string(c);
            res.n.reset();
            return res;
        }
    }
    return res;
}

}  // namespace coarse
