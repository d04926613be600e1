#include "coarse/metric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "coarse/kernels.hpp"

namespace coarse {

namespace {

struct Dsu {
    std::vector<std::uint32_t> p;
    explicit Dsu(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0u); }
    std::uint32_t find(std::uint32_t x) {
        while (p[x] != x) { p[x] = p[p[x]]; x = p[x]; }
        return x;
    }
    // keeps the smaller root so roots are block minima
    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (b < a) std::swap(a, b);
        p[b] = a;
        return true;
    }
};

// per-point label = smallest index of the epsilon-component
std::vector<std::uint32_t> component_labels(const FiniteSpace& x, Dist eps) {
    std::size_t n = x.size();
    std::vector<std::uint32_t> lab(n);
    if (x.kind() == FiniteSpace::Kind::grid) {
        // sup metric on a full product: components are products of per-axis components
        const auto& axes = x.axes();
        std::vector<bool> joined(axes.size());
        for (std::size_t k = 0; k < axes.size(); ++k) joined[k] = axes[k].unit <= eps;
        for (std::size_t i = 0; i < n; ++i) {
            auto c = x.coords(i);
            for (std::size_t k = 0; k < axes.size(); ++k)
                if (joined[k]) c[k] = axes[k].lo;
            lab[i] = static_cast<std::uint32_t>(*x.index_of(c));
        }
        return lab;
    }
    Dsu d(n);
    for (auto& e : x.mst()) {
        if (e.w > eps) break;
        d.unite(e.u, e.v);
    }
    for (std::size_t i = 0; i < n; ++i) lab[i] = d.find(static_cast<std::uint32_t>(i));
    return lab;
}

std::vector<Dist> realized_merge_heights(const FiniteSpace& x) {
    std::set<Dist> hs{0};
    if (x.kind() == FiniteSpace::Kind::grid) {
        for (auto& a : x.axes())
            if (a.size() > 1) hs.insert(a.unit);
    } else {
        for (auto& e : x.mst()) hs.insert(e.w);
    }
    return {hs.begin(), hs.end()};
}

}  // namespace

// ---- truncations ---------------------------------------------------------------------

std::vector<std::int64_t> torsion_enumeration(const GroupDescription& g, std::size_t max_count,
                                              std::uint64_t prime_bound) {
    std::vector<std::int64_t> out;
    auto primes = PrimeSieve::standard().primes_upto(prime_bound);
    for (std::uint64_t k = 1; out.size() < max_count; ++k) {
        std::size_t before = out.size();
        for (auto& s : g.summands) {
            if (out.size() >= max_count) break;
            if (s.multiplicity >= ExtNat(k)) out.push_back(static_cast<std::int64_t>(s.order));
        }
        if (g.tail >= ExtNat(k))
            for (auto p : primes) {
                if (out.size() >= max_count) break;
                out.push_back(static_cast<std::int64_t>(p));
            }
        if (out.size() == before) break;
    }
    return out;
}

namespace {

std::size_t finite_rank(const GroupDescription& g) {
    if (g.free_rank_part.is_inf())
        throw std::invalid_argument("a group of infinite free rank has no finite truncation");
    if (g.free_rank_part.value() > 16) throw BudgetError("free rank too large for a truncation");
    return static_cast<std::size_t>(g.free_rank_part.value());
}

}  // namespace

Schedule interleaved_schedule(const GroupDescription& g, std::int64_t radius, std::int64_t stride,
                              const Limits& lim) {
    if (stride < 1) throw std::invalid_argument("stride must be positive");
    Schedule s(finite_rank(g), Generator{true, 0, 1});
    std::size_t count = radius > 1 ? static_cast<std::size_t>((radius - 1) / stride) : 0;
    auto orders = torsion_enumeration(g, count, lim.prime_bound);
    for (std::size_t k = 0; k < orders.size(); ++k)
        s.push_back({false, orders[k], 1 + static_cast<std::int64_t>(k + 1) * stride});
    return s;
}

Schedule canonical_schedule(const GroupDescription& g, std::size_t depth, const Limits& lim) {
    Schedule s(finite_rank(g), Generator{true, 0, 1});
    auto orders = torsion_enumeration(g, depth, lim.prime_bound);
    for (std::size_t k = 0; k < orders.size(); ++k)
        s.push_back({false, orders[k], static_cast<std::int64_t>(k) + 2});
    return s;
}

SpacePtr build_truncation(const GroupDescription& g, const Schedule& schedule, std::int64_t radius,
                          const Limits& lim) {
    if (radius < 0) throw std::invalid_argument("radius must be nonnegative");
    std::size_t r = finite_rank(g);
    std::size_t nfree = 0;
    std::int64_t last_level = 0;
    std::vector<Axis> axes;
    for (auto& gen : schedule) {
        if (gen.level < 1) throw std::invalid_argument("schedule levels must be positive");
        if (gen.free) {
            if (gen.level != 1) throw std::invalid_argument("free generators sit at level 1");
            ++nfree;
            axes.push_back(Axis::free_axis(radius));
            continue;
        }
        if (gen.order < 2) throw std::invalid_argument("cyclic order must be >= 2");
        if (gen.level <= last_level)
            throw std::invalid_argument("cyclic levels must be strictly increasing");
        last_level = gen.level;
        if (gen.level <= radius) axes.push_back(Axis::cyclic(gen.order, gen.level));
    }
    if (nfree != r) throw std::invalid_argument("schedule does not match the free rank");
    auto s = FiniteSpace::grid(axes, std::vector<std::int64_t>(axes.size(), 0), radius,
                               "truncation(" + g.render() + ",r=" + std::to_string(radius) + ")", lim);
    s->require_enumerable();
    return s->with_phi(factorizing_function_symbolic(g));
}

std::vector<std::int64_t> zphi_summands(const FactorFunction& phi, std::size_t count,
                                        std::uint64_t prime_bound) {
    std::vector<std::int64_t> out;
    auto primes = PrimeSieve::standard().primes_upto(prime_bound);
    for (std::uint64_t k = 1; out.size() < count; ++k) {
        std::size_t before = out.size();
        for (auto p : primes) {
            if (out.size() >= count) break;
            if (phi(p) >= ExtNat(k)) out.push_back(static_cast<std::int64_t>(p));
        }
        if (out.size() == before) break;
    }
    return out;
}

SpacePtr canonical_ultrametric(const FactorFunction& phi, std::size_t depth, const Limits& lim) {
    auto orders = zphi_summands(phi, depth + 1, lim.prime_bound);
    bool whole = orders.size() <= depth;
    if (!whole) orders.pop_back();
    return level_tower(orders, whole, "Zphi(" + phi.render() + ",d=" + std::to_string(depth) + ")", lim)
        ->with_phi(phi);
}

SpacePtr level_tower(const std::vector<std::int64_t>& orders, bool whole, const std::string& id,
                     const Limits& lim) {
    std::vector<Axis> axes;
    for (std::size_t i = 0; i < orders.size(); ++i)
        axes.push_back(Axis::cyclic(orders[i], static_cast<std::int64_t>(i) + 2));
    Dist inner = whole ? kWholeSpace : static_cast<Dist>(orders.size()) + 1;
    return FiniteSpace::grid(axes, std::vector<std::int64_t>(axes.size(), 0), inner, id, lim);
}

SpacePtr torsion_ultrametric(const GroupDescription& g, std::size_t depth, const Limits& lim) {
    auto orders = torsion_enumeration(g, depth + 1, lim.prime_bound);
    bool whole = orders.size() <= depth;
    if (!whole) orders.pop_back();
    auto s = level_tower(orders, whole, "torsion(" + g.render() + ",d=" + std::to_string(depth) + ")", lim);
    return s->with_phi(factorizing_function_symbolic(g));
}

SpacePtr product_space(const SpacePtr& x, const SpacePtr& y, const Limits& lim) {
    return FiniteSpace::product(x, y, lim);
}

SpacePtr cantor_cube_truncation(int depth, const Limits& lim) {
    if (depth < 0 || depth > 20) throw std::invalid_argument("cantor depth must be in [0,20]");
    std::vector<Axis> axes;
    for (int n = 1; n <= depth; ++n) axes.push_back(Axis::cyclic(2, std::int64_t{1} << n));
    auto s = FiniteSpace::grid(axes, std::vector<std::int64_t>(axes.size(), 0),
                               depth ? (Dist{1} << depth) : 0, "cantor(" + std::to_string(depth) + ")", lim);
    s->require_enumerable();
    return s->with_phi(FactorFunction({{2, ExtNat::inf()}}, ExtNat(0)));
}

SpacePtr example31_fixture(int branches, double grid_step, double clamp, const Limits& lim) {
    if (branches < 1 || grid_step <= 0 || clamp <= 0)
        throw std::invalid_argument("example31: need branches >= 1, grid_step > 0, clamp > 0");
    const double pi = std::acos(-1.0);
    const double xmax = std::atan(clamp);
    // base abscissae: grid points strictly inside, plus the clamp endpoints
    std::vector<double> base{-xmax};
    for (long k = static_cast<long>(std::ceil(-xmax / grid_step)); k * grid_step < xmax; ++k) {
        double x = static_cast<double>(k) * grid_step;
        if (x > -xmax) base.push_back(x);
    }
    base.push_back(xmax);
    // refine until consecutive chords are at most 1
    std::vector<double> xs1;
    auto chord = [](double a, double b) { return std::hypot(b - a, std::tan(b) - std::tan(a)); };
    for (std::size_t i = 0; i + 1 < base.size(); ++i) {
        xs1.push_back(base[i]);
        std::vector<std::pair<double, double>> stack{{base[i], base[i + 1]}};
        std::vector<double> mids;
        while (!stack.empty()) {
            auto [a, b] = stack.back();
            stack.pop_back();
            if (chord(a, b) <= 1.0) continue;
            double m = 0.5 * (a + b);
            mids.push_back(m);
            stack.push_back({a, m});
            stack.push_back({m, b});
        }
        std::sort(mids.begin(), mids.end());
        xs1.insert(xs1.end(), mids.begin(), mids.end());
    }
    xs1.push_back(base.back());
    std::size_t per = xs1.size();
    if (per * static_cast<std::size_t>(2 * branches + 1) > lim.point_budget)
        throw BudgetError("point budget exceeded");
    std::vector<double> px, py;
    std::size_t bp = 0;
    for (int n = -branches; n <= branches; ++n) {
        double sign = (n % 2 == 0) ? 1.0 : -1.0;
        for (double x : xs1) {
            if (n == 0 && x == 0.0) bp = px.size();
            px.push_back(x + 2.0 * pi * n);
            py.push_back(sign * std::tan(x));
        }
    }
    const Dist scale = 1000000000;
    double inner = std::min(2.0 * pi * (branches + 1) - pi / 2.0, clamp);
    return FiniteSpace::euclid(std::move(px), std::move(py), bp,
                               static_cast<Dist>(std::floor(inner * static_cast<double>(scale))), scale,
                               "example31(b=" + std::to_string(branches) + ")", lim);
}

// ---- metric checks ---------------------------------------------------------------------

AxiomReport check_metric_axioms(const FiniteSpace& x, std::size_t exhaustive_max, std::size_t samples,
                                std::uint64_t seed) {
    AxiomReport rep;
    std::size_t n = x.size();
    bool ultra = x.ultrametric();
    // sampled plane distances are rounded to the nearest unit: three roundings
    // can break the triangle inequality by one unit on collinear points
    const Dist slack = x.kind() == FiniteSpace::Kind::euclid ? 1 : 0;
    auto fail = [&](const std::string& what, std::size_t i, std::size_t j, std::size_t k) {
        rep.ok = false;
        rep.violation = what + " at (" + x.label(i) + ", " + x.label(j) + ", " + x.label(k) + ")";
    };
    auto check = [&](std::size_t i, std::size_t j, std::size_t k, Dist dij, Dist djk, Dist dik) {
        if (dik > dij + djk + slack) { fail("triangle inequality", i, j, k); return false; }
        if (ultra && dik > std::max(dij, djk)) { fail("strong triangle inequality", i, j, k); return false; }
        return true;
    };
    if (n <= exhaustive_max) {
        std::vector<Dist> m(n * n);
        for (std::size_t i = 0; i < n; ++i) x.row(i, m.data() + i * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Dist d = m[i * n + j];
                if ((i == j) != (d == 0) || d < 0) { fail("identity of indiscernibles", i, j, j); return rep; }
                if (d != m[j * n + i]) { fail("symmetry", i, j, j); return rep; }
            }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    if (!check(i, j, k, m[i * n + j], m[j * n + k], m[i * n + k])) return rep;
        return rep;
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t s = 0; s < samples; ++s) {
        std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
        Dist dij = x.dist(i, j), djk = x.dist(j, k), dik = x.dist(i, k);
        if ((i == j) != (dij == 0) || dij != x.dist(j, i)) { fail("identity/symmetry", i, j, j); return rep; }
        if (!check(i, j, k, dij, djk, dik)) return rep;
    }
    return rep;
}

// ---- components ---------------------------------------------------------------------------

ComponentPartition epsilon_components(const FiniteSpace& x, Dist epsilon) {
    if (epsilon < 0) throw std::invalid_argument("epsilon must be nonnegative");
    x.require_enumerable();
    auto lab = component_labels(x, epsilon);
    ComponentPartition cp;
    cp.epsilon = epsilon;
    std::size_t n = lab.size();
    cp.block_of.assign(n, 0);
    std::vector<std::int64_t> block_id(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t root = lab[i];
        if (block_id[root] < 0) {
            block_id[root] = static_cast<std::int64_t>(cp.blocks.size());
            cp.blocks.emplace_back();
            cp.representatives.push_back(root);
        }
        cp.block_of[i] = static_cast<std::size_t>(block_id[root]);
        cp.blocks[cp.block_of[i]].push_back(i);
    }
    return cp;
}

SpacePtr quotient_space(const FiniteSpace& x, Dist epsilon) {
    auto cp = epsilon_components(x, epsilon);
    std::size_t m = cp.blocks.size();
    if (m > 4096) throw BudgetError("quotient has too many points for a dense table");
    std::vector<Dist> t(m * m, 0);
    if (x.kind() == FiniteSpace::Kind::grid) {
        std::vector<std::vector<std::int64_t>> rc(m);
        for (std::size_t a = 0; a < m; ++a) rc[a] = x.coords(cp.representatives[a]);
        const auto& axes = x.axes();
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b) {
                Dist d = 0;
                for (std::size_t k = 0; k < axes.size(); ++k)
                    if (rc[a][k] != rc[b][k]) d = std::max(d, axes[k].unit);
                t[a * m + b] = t[b * m + a] = d;
            }
    } else {
        // single-linkage merge heights above epsilon
        Dsu d(m);
        std::vector<std::vector<std::size_t>> members(m);
        for (std::size_t a = 0; a < m; ++a) members[a] = {a};
        for (auto& e : x.mst()) {
            if (e.w <= epsilon) continue;
            auto ra = d.find(static_cast<std::uint32_t>(cp.block_of[e.u]));
            auto rb = d.find(static_cast<std::uint32_t>(cp.block_of[e.v]));
            if (ra == rb) continue;
            for (auto p : members[ra])
                for (auto q : members[rb]) t[p * m + q] = t[q * m + p] = e.w;
            d.unite(ra, rb);
            auto keep = d.find(ra), gone = keep == ra ? rb : ra;
            members[keep].insert(members[keep].end(), members[gone].begin(), members[gone].end());
            members[gone].clear();
        }
    }
    std::vector<std::string> labels;
    for (auto r : cp.representatives) labels.push_back(x.label(r));
    auto q = FiniteSpace::dense(m, std::move(t), std::move(labels), cp.block_of[x.basepoint()],
                                x.inner_radius(), x.scale(), true,
                                x.id() + "/" + units_str(epsilon, x.scale()));
    auto rep = check_metric_axioms(*q, 512, 20000);
    if (!rep.ok) throw std::logic_error("quotient is not an ultrametric: " + rep.violation);
    return q;
}

// ---- factorizing step ---------------------------------------------------------------------

bool step_candidate_stable(const FiniteSpace& x, Dist eps) {
    const Dist R = x.inner_radius();
    const Dist half = R / 2;
    std::size_t n = x.size();
    std::size_t b = x.basepoint();
    auto rowb = x.row(b);
    auto lab_e = component_labels(x, eps);

    std::vector<Dist> deltas{eps};
    std::vector<Dist> above;
    for (Dist h : realized_merge_heights(x))
        if (h > eps && h <= half) above.push_back(h);
    // at most 24 samples, always keeping the largest
    const std::size_t kMax = 24;
    if (above.size() <= kMax) {
        deltas.insert(deltas.end(), above.begin(), above.end());
    } else {
        for (std::size_t t = 0; t < kMax; ++t)
            deltas.push_back(above[(t + 1) * above.size() / kMax - 1]);
    }
    for (Dist delta : deltas) {
        auto lab_d = component_labels(x, delta);
        std::uint32_t mine = lab_d[b];
        Dist extent = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (lab_d[i] == mine) extent = std::max(extent, rowb[i]);
        if (extent <= R - delta) continue;  // block and its delta-halo are faithfully present
        std::set<std::uint32_t> inner_set, outer_set;
        for (std::size_t i = 0; i < n; ++i) {
            if (lab_d[i] != mine || rowb[i] > R) continue;
            outer_set.insert(lab_e[i]);
            if (rowb[i] <= half) inner_set.insert(lab_e[i]);
        }
        if (outer_set.size() > inner_set.size()) return false;
    }
    return true;
}

StepEstimate estimate_factorizing_step(const FiniteSpace& x) {
    x.require_enumerable();
    StepEstimate st;
    st.scale = x.scale();
    st.confidence_radius = x.inner_radius();
    st.candidates = realized_merge_heights(x);
    std::size_t m = st.candidates.size();
    st.status.assign(m, -1);
    if (x.inner_radius() <= 0) {
        st.inconclusive = true;
        return st;
    }
    auto eval = [&](std::size_t i) {
        if (st.status[i] < 0) st.status[i] = step_candidate_stable(x, st.candidates[i]) ? 1 : 0;
        return st.status[i] == 1;
    };
    std::optional<std::size_t> found;
    if (m <= 256) {
        for (std::size_t i = 0; i < m; ++i)
            if (eval(i) && !found) found = i;
    } else if (eval(m - 1)) {
        // stability is monotone in epsilon: binary search for the first stable candidate
        std::size_t lo = 0, hi = m - 1;
        while (lo < hi) {
            std::size_t mid = lo + (hi - lo) / 2;
            if (eval(mid)) hi = mid;
            else lo = mid + 1;
        }
        found = lo;
    }
    if (found) st.estimate = st.candidates[*found];
    else st.inconclusive = true;
    return st;
}

// ---- empirical phi ---------------------------------------------------------------------------

FactorFunction empirical_phi(const FiniteSpace& x, std::uint64_t prime_bound) {
    if (!x.ultrametric()) throw std::invalid_argument("empirical_phi needs an ultrametric space");
    auto primes = PrimeSieve::standard().primes_upto(prime_bound);
    std::map<std::uint64_t, std::uint64_t> best;
    if (x.kind() == FiniteSpace::Kind::grid) {
        std::set<Dist> radii{0};
        for (auto& a : x.axes()) radii.insert(a.unit);
        for (Dist rho : radii) {
            if (rho > x.inner_radius()) break;
            for (auto p : primes) {
                std::uint64_t v = 0;
                for (auto& a : x.axes())
                    if (a.unit <= rho) v += valuation(static_cast<std::uint64_t>(a.size()), p);
                best[p] = std::max(best[p], v);
            }
        }
    } else {
        auto rowb = x.row(x.basepoint());
        std::sort(rowb.begin(), rowb.end());
        for (std::size_t i = 0; i < rowb.size(); ++i) {
            if (i + 1 < rowb.size() && rowb[i + 1] == rowb[i]) continue;
            if (rowb[i] > x.inner_radius()) break;
            std::uint64_t count = i + 1;
            for (auto p : primes) best[p] = std::max(best[p], valuation(count, p));
        }
    }
    std::map<std::uint64_t, ExtNat> ex;
    for (auto& [p, v] : best)
        if (v) ex[p] = ExtNat(v);
    return FactorFunction(std::move(ex), ExtNat(0));
}

// ---- oscillation --------------------------------------------------------------------------

std::vector<std::size_t> validity_region(const MapTable& f) {
    const auto& src = *f.source;
    std::size_t n = src.size();
    if (f.image.size() != n) throw std::invalid_argument("map table size does not match its source");
    auto rowb = src.row(src.basepoint());
    std::vector<std::size_t> region;
    for (std::size_t i = 0; i < n; ++i)
        if (f.image[i] >= 0 && rowb[i] <= f.validity_radius) region.push_back(i);
    return region;
}

std::vector<Dist> oscillation_multi(const MapTable& f, const std::vector<Dist>& deltas) {
    auto region = validity_region(f);
    if (region.empty()) throw std::invalid_argument("empty validity region");
    const auto& K = kernels::active();
    std::size_t m = region.size();
    std::vector<Dist> rx(f.source->size()), ry(f.target->size()), gx(m), gy(m);
    std::vector<Dist> omega(deltas.size(), 0);
    for (std::size_t a = 0; a + 1 < m; ++a) {
        f.source->row(region[a], rx.data());
        f.target->row(static_cast<std::size_t>(f.image[region[a]]), ry.data());
        std::size_t cnt = 0;
        for (std::size_t b = a + 1; b < m; ++b, ++cnt) {
            gx[cnt] = rx[region[b]];
            gy[cnt] = ry[static_cast<std::size_t>(f.image[region[b]])];
        }
        for (std::size_t d = 0; d < deltas.size(); ++d)
            omega[d] = std::max(omega[d], K.max_where_le(gx.data(), gy.data(), cnt, deltas[d]));
    }
    return omega;
}

Dist oscillation(const MapTable& f, Dist delta) { return oscillation_multi(f, {delta})[0]; }

// ---- Foelner sets ---------------------------------------------------------------------------

std::uint64_t neighborhood_size(const FiniteSpace& x, const std::vector<std::size_t>& f, Dist epsilon) {
    std::size_t n = x.size();
    std::vector<std::uint8_t> mark(n, 0);
    std::vector<Dist> r(n);
    for (auto i : f) {
        x.row(i, r.data());
        for (std::size_t j = 0; j < n; ++j)
            if (r[j] <= epsilon) mark[j] = 1;
    }
    return static_cast<std::uint64_t>(std::count(mark.begin(), mark.end(), 1));
}

namespace {

bool ratio_ok(std::uint64_t nb, std::uint64_t fsize, const Rational& c) {
    return static_cast<__int128>(nb) * c.den <= static_cast<__int128>(fsize) * c.num;
}

}  // namespace

FoelnerResult foelner_search(const FiniteSpace& x, const Rational& c, Dist epsilon) {
    FoelnerResult res;
    if (x.inner_radius() <= epsilon) return res;
    x.require_enumerable();
    std::size_t n = x.size();
    auto rowb = x.row(x.basepoint());
    std::vector<Dist> radii(rowb);
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    if (x.kind() == FiniteSpace::Kind::grid) {
        // balls are products of per-axis sets, so neighbourhoods factor too
        const auto& axes = x.axes();
        const auto& base = x.base_coords();
        for (Dist k : radii) {
            if (k + epsilon > x.inner_radius()) break;
            std::uint64_t fs = 1, ns = 1;
            for (std::size_t a = 0; a < axes.size(); ++a) {
                const Axis& ax = axes[a];
                if (ax.kind == Axis::Kind::free) {
                    std::int64_t w = ax.unit ? k / ax.unit : ax.size();
                    std::int64_t we = ax.unit ? (k + 0) / ax.unit + epsilon / ax.unit : ax.size();
                    auto cnt = [&](std::int64_t h) {
                        return std::min(ax.hi, base[a] + h) - std::max(ax.lo, base[a] - h) + 1;
                    };
                    fs *= static_cast<std::uint64_t>(cnt(w));
                    ns *= static_cast<std::uint64_t>(cnt(we));
                } else {
                    bool full = ax.unit <= k;
                    fs *= full ? static_cast<std::uint64_t>(ax.size()) : 1;
                    ns *= (full || ax.unit <= epsilon) ? static_cast<std::uint64_t>(ax.size()) : 1;
                }
            }
            if (ratio_ok(ns, fs, c)) {
                res.found = true;
                res.ball_radius = k;
                res.set_size = fs;
                res.neighborhood_size = ns;
                for (std::size_t i = 0; i < n; ++i)
                    if (rowb[i] <= k) res.set.push_back(i);
                return res;
            }
        }
        return res;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rowb[a] < rowb[b]; });
    std::vector<std::uint8_t> mark(n, 0);
    std::vector<Dist> r(n);
    std::uint64_t marked = 0;
    std::size_t pos = 0;
    for (Dist k : radii) {
        if (k + epsilon > x.inner_radius()) break;
        while (pos < n && rowb[order[pos]] <= k) {
            x.row(order[pos], r.data());
            for (std::size_t j = 0; j < n; ++j)
                if (r[j] <= epsilon && !mark[j]) { mark[j] = 1; ++marked; }
            ++pos;
        }
        if (ratio_ok(marked, pos, c)) {
            res.found = true;
            res.ball_radius = k;
            res.set.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(pos));
            std::sort(res.set.begin(), res.set.end());
            res.set_size = pos;
            res.neighborhood_size = marked;
            return res;
        }
    }
    return res;
}

// ---- asymptotic dimension covers ---------------------------------------------------------------

Cover asdim_cover(int r, const Rational& epsilon, std::int64_t radius, const Limits& lim) {
    if (r < 0 || r > 3) throw std::invalid_argument("asdim_cover supports 0 <= r <= 3");
    if (epsilon.num <= 0) throw std::invalid_argument("epsilon must be positive");
    Cover cov;
    cov.space = zr_ball(r, radius, lim);
    cov.space->require_enumerable();
    const auto& X = *cov.space;
    const std::int64_t e = to_units_ceil(epsilon, 1);
    const std::int64_t s = 2 * e, L = s * (r + 1);
    cov.multiplicity_bound = r + 1;
    std::size_t n = X.size();
    std::map<std::vector<std::int64_t>, std::size_t> ids;
    std::vector<std::size_t> block_of(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto c = X.coords(i);
        // each coordinate is within e of a cut for exactly one family
        int fam = 0;
        for (; fam <= r; ++fam) {
            bool good = true;
            for (auto v : c) {
                std::int64_t t = ((v - fam * s) % L + L) % L;
                if (t < e || t >= L - e) { good = false; break; }
            }
            if (good) break;
        }
        if (fam > r) throw std::logic_error("asdim_cover: no admissible family");
        std::vector<std::int64_t> key{fam};
        for (auto v : c) {
            std::int64_t q = v - fam * s;
            key.push_back(q >= 0 ? q / L : -((-q + L - 1) / L));
        }
        auto [it, fresh] = ids.emplace(key, cov.blocks.size());
        if (fresh) cov.blocks.emplace_back();
        cov.blocks[it->second].push_back(i);
        block_of[i] = it->second;
    }
    // mesh: sup-diameter via per-axis extents
    for (auto& blk : cov.blocks) {
        std::vector<std::int64_t> lo(static_cast<std::size_t>(r), INT64_MAX), hi(static_cast<std::size_t>(r), INT64_MIN);
        for (auto i : blk) {
            auto c = X.coords(i);
            for (int k = 0; k < r; ++k) {
                lo[static_cast<std::size_t>(k)] = std::min(lo[static_cast<std::size_t>(k)], c[static_cast<std::size_t>(k)]);
                hi[static_cast<std::size_t>(k)] = std::max(hi[static_cast<std::size_t>(k)], c[static_cast<std::size_t>(k)]);
            }
        }
        for (int k = 0; k < r; ++k)
            cov.mesh = std::max(cov.mesh, hi[static_cast<std::size_t>(k)] - lo[static_cast<std::size_t>(k)]);
    }
    // exhaustive multiplicity: every eps-ball against the blocks it meets
    const std::int64_t fe = to_units_floor(epsilon, 1);
    int worst = 0;
    std::vector<std::size_t> seen;
    for (std::size_t i = 0; i < n; ++i) {
        auto c = X.coords(i);
        seen.clear();
        std::vector<std::int64_t> off(static_cast<std::size_t>(r), -fe);
        while (true) {
            std::vector<std::int64_t> y(c);
            for (int k = 0; k < r; ++k) y[static_cast<std::size_t>(k)] += off[static_cast<std::size_t>(k)];
            if (auto j = X.index_of(y)) {
                auto b = block_of[*j];
                if (std::find(seen.begin(), seen.end(), b) == seen.end()) seen.push_back(b);
            }
            int k = 0;
            for (; k < r; ++k) {
                if (++off[static_cast<std::size_t>(k)] <= fe) break;
                off[static_cast<std::size_t>(k)] = -fe;
            }
            if (k == r) break;
        }
        worst = std::max(worst, static_cast<int>(seen.size()));
    }
    cov.measured_multiplicity = worst;
    if (worst > cov.multiplicity_bound || cov.mesh > L)
        throw std::logic_error("asdim_cover: verification failed");
    return cov;
}

namespace {

struct PartitionSearch {
    int r, e, side, mesh, mult;
    int npts;
    std::vector<int> label;
    struct Box { int x0, x1, y0, y1, count; };
    std::vector<Box> boxes;

    int px(int p) const { return r == 1 ? p : p % side; }
    int py(int p) const { return r == 1 ? 0 : p / side; }

    // distinct labels among assigned points of the eps-window centred at (cx, cy)
    bool window_ok(int cx, int cy) const {
        int seen[64];
        int ns = 0;
        int ylo = r == 1 ? 0 : std::max(0, cy - e), yhi = r == 1 ? 0 : std::min(side - 1, cy + e);
        for (int y = ylo; y <= yhi; ++y)
            for (int x = std::max(0, cx - e); x <= std::min(side - 1, cx + e); ++x) {
                int l = label[static_cast<std::size_t>(r == 1 ? x : y * side + x)];
                if (l < 0) continue;
                bool dup = false;
                for (int t = 0; t < ns; ++t) dup |= seen[t] == l;
                if (!dup) {
                    if (ns == mult) return false;
                    seen[ns++] = l;
                }
            }
        return true;
    }

    bool rec(int p) {
        if (p == npts) return true;
        int x = px(p), y = py(p);
        std::vector<int> cand;
        for (std::size_t l = 0; l < boxes.size(); ++l) {
            const Box& b = boxes[l];
            if (b.count == 0) continue;
            if (std::max(b.x1, x) - std::min(b.x0, x) > mesh) continue;
            if (std::max(b.y1, y) - std::min(b.y0, y) > mesh) continue;
            cand.push_back(static_cast<int>(l));
        }
        cand.push_back(static_cast<int>(boxes.size()));  // a fresh block
        for (int l : cand) {
            bool fresh = l == static_cast<int>(boxes.size());
            if (fresh) boxes.push_back({x, x, y, y, 0});
            Box saved = boxes[static_cast<std::size_t>(l)];
            Box& b = boxes[static_cast<std::size_t>(l)];
            b.x0 = std::min(b.x0, x); b.x1 = std::max(b.x1, x);
            b.y0 = std::min(b.y0, y); b.y1 = std::max(b.y1, y);
            ++b.count;
            label[static_cast<std::size_t>(p)] = l;
            bool ok = true;
            int ylo = r == 1 ? 0 : std::max(0, y - e), yhi = r == 1 ? 0 : std::min(side - 1, y + e);
            for (int cy = ylo; cy <= yhi && ok; ++cy)
                for (int cx = std::max(0, x - e); cx <= std::min(side - 1, x + e) && ok; ++cx)
                    ok = window_ok(cx, cy);
            if (ok && rec(p + 1)) return true;
            label[static_cast<std::size_t>(p)] = -1;
            boxes[static_cast<std::size_t>(l)] = saved;
            if (fresh) boxes.pop_back();
        }
        return false;
    }
};

}  // namespace

bool bounded_partition_exists(int r, int eps, int side, int mesh, int mult) {
    if (r != 1 && r != 2) throw std::invalid_argument("bounded_partition_exists: r must be 1 or 2");
    if ((2 * eps + 1) * (r == 2 ? 2 * eps + 1 : 1) > 64) throw std::invalid_argument("eps too large");
    PartitionSearch s{r, eps, side, mesh, mult, r == 1 ? side : side * side, {}, {}};
    s.label.assign(static_cast<std::size_t>(s.npts), -1);
    return s.rec(0);
}

}  // namespace coarse
