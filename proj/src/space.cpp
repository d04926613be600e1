#include "coarse/space.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "coarse/kernels.hpp"

namespace coarse {

// ---- rationals --------------------------------------------------------------

Rational Rational::parse(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("empty rational");
    auto bad = [&] { return std::invalid_argument("bad rational: '" + text + "'"); };
    auto parse_int = [&](const std::string& t) -> std::int64_t {
        if (t.empty() || t.size() > 18) throw bad();
        std::size_t k = 0;
        bool neg = false;
        if (t[0] == '-' || t[0] == '+') { neg = t[0] == '-'; k = 1; }
        if (k == t.size()) throw bad();
        std::int64_t v = 0;
        for (; k < t.size(); ++k) {
            if (!std::isdigit(static_cast<unsigned char>(t[k]))) throw bad();
            v = v * 10 + (t[k] - '0');
        }
        return neg ? -v : v;
    };
    Rational r;
    if (auto slash = s.find('/'); slash != std::string::npos) {
        r.num = parse_int(s.substr(0, slash));
        r.den = parse_int(s.substr(slash + 1));
        if (r.den == 0) throw bad();
    } else if (auto dot = s.find('.'); dot != std::string::npos) {
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (fp.empty() || fp.size() > 12) throw bad();
        bool neg = !ip.empty() && ip[0] == '-';
        if (ip.empty() || ip == "-" || ip == "+") ip += "0";
        std::int64_t den = 1;
        for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
        std::int64_t a = parse_int(ip), b = parse_int(fp);
        if (a < 0) a = -a;
        r.num = a * den + b;
        if (neg) r.num = -r.num;
        r.den = den;
    } else {
        r.num = parse_int(s);
    }
    if (r.den < 0) { r.den = -r.den; r.num = -r.num; }
    std::int64_t g = std::gcd(r.num < 0 ? -r.num : r.num, r.den);
    if (g > 1) { r.num /= g; r.den /= g; }
    return r;
}

std::string Rational::str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Dist to_units_floor(const Rational& r, Dist scale) {
    __int128 p = static_cast<__int128>(r.num) * scale;
    __int128 q = p / r.den;
    if (p % r.den != 0 && p < 0) --q;
    return static_cast<Dist>(q);
}

Dist to_units_ceil(const Rational& r, Dist scale) {
    __int128 p = static_cast<__int128>(r.num) * scale;
    __int128 q = p / r.den;
    if (p % r.den != 0 && p > 0) ++q;
    return static_cast<Dist>(q);
}

std::string units_str(Dist d, Dist scale) {
    if (scale == 1) return std::to_string(d);
    std::ostringstream os;
    os.precision(12);
    os << static_cast<double>(d) / static_cast<double>(scale);
    return os.str();
}

// ---- construction -----------------------------------------------------------

namespace {

constexpr std::size_t kDenseMax = 4096;

std::string join_coords(const std::vector<std::int64_t>& c) {
    std::string s = "(";
    for (std::size_t k = 0; k < c.size(); ++k) s += (k ? "," : "") + std::to_string(c[k]);
    return s + ")";
}

}  // namespace

SpacePtr FiniteSpace::grid(std::vector<Axis> axes, std::vector<std::int64_t> base,
                           Dist inner_radius, std::string id, const Limits& lim) {
    if (axes.size() != base.size()) throw std::invalid_argument("grid: base has wrong arity");
    auto s = std::shared_ptr<FiniteSpace>(new FiniteSpace());
    s->kind_ = Kind::grid;
    s->axes_ = std::move(axes);
    s->base_ = std::move(base);
    s->inner_radius_ = inner_radius;
    s->id_ = std::move(id);
    for (std::size_t k = 0; k < s->axes_.size(); ++k) {
        const Axis& a = s->axes_[k];
        if (a.size() < 1) throw std::invalid_argument("grid: empty axis");
        if (a.lo < -(1LL << 30) || a.hi > (1LL << 30) || a.unit < 0 || a.unit > (1LL << 30))
            throw std::invalid_argument("grid: axis out of supported range");
        if (s->base_[k] < a.lo || s->base_[k] > a.hi) throw std::invalid_argument("grid: base off axis");
    }
    s->finish_grid(lim);
    return s;
}

void FiniteSpace::finish_grid(const Limits& lim) {
    ultrametric_ = std::all_of(axes_.begin(), axes_.end(),
                               [](const Axis& a) { return a.kind == Axis::Kind::discrete; });
    approx_size_ = 1;
    unsigned __int128 n = 1;
    bool overflow = false;
    for (auto& a : axes_) {
        approx_size_ *= static_cast<long double>(a.size());
        n *= static_cast<unsigned __int128>(a.size());
        if (n > (static_cast<unsigned __int128>(1) << 62)) overflow = true;
    }
    strides_.assign(axes_.size(), 1);
    enumerable_ = !overflow && static_cast<std::uint64_t>(n) <= lim.point_budget;
    n_ = overflow ? 0 : static_cast<std::size_t>(n);
    if (!overflow)
        for (std::size_t k = axes_.size(); k-- > 1;)
            strides_[k - 1] = strides_[k] * static_cast<std::size_t>(axes_[k].size());
    if (enumerable_) {
        basepoint_ = *index_of(base_);
        soa_.assign(axes_.size(), std::vector<std::int64_t>(n_));
        for (std::size_t k = 0; k < axes_.size(); ++k) {
            auto& col = soa_[k];
            std::size_t st = strides_[k], sz = static_cast<std::size_t>(axes_[k].size());
            for (std::size_t i = 0; i < n_; ++i)
                col[i] = axes_[k].lo + static_cast<std::int64_t>((i / st) % sz);
        }
    } else if (!overflow) {
        basepoint_ = *index_of(base_);
    }
}

SpacePtr FiniteSpace::dense(std::size_t n, std::vector<Dist> table, std::vector<std::string> labels,
                            std::size_t basepoint, Dist inner_radius, Dist scale, bool ultrametric,
                            std::string id) {
    if (n > kDenseMax) throw BudgetError("dense table too large (" + std::to_string(n) + " points)");
    if (table.size() != n * n || (!labels.empty() && labels.size() != n) || basepoint >= n)
        throw std::invalid_argument("dense: inconsistent sizes");
    auto s = std::shared_ptr<FiniteSpace>(new FiniteSpace());
    s->kind_ = Kind::dense;
    s->n_ = n;
    s->approx_size_ = static_cast<long double>(n);
    s->table_ = std::move(table);
    s->labels_ = std::move(labels);
    s->basepoint_ = basepoint;
    s->inner_radius_ = inner_radius;
    s->scale_ = scale;
    s->ultrametric_ = ultrametric;
    s->id_ = std::move(id);
    return s;
}

SpacePtr FiniteSpace::euclid(std::vector<double> xs, std::vector<double> ys, std::size_t basepoint,
                             Dist inner_radius, Dist scale, std::string id, const Limits& lim) {
    if (xs.size() != ys.size() || basepoint >= xs.size()) throw std::invalid_argument("euclid: sizes");
    if (xs.size() > lim.point_budget) throw BudgetError("point budget exceeded");
    auto s = std::shared_ptr<FiniteSpace>(new FiniteSpace());
    s->kind_ = Kind::euclid;
    s->n_ = xs.size();
    s->approx_size_ = static_cast<long double>(s->n_);
    s->xs_ = std::move(xs);
    s->ys_ = std::move(ys);
    s->basepoint_ = basepoint;
    s->inner_radius_ = inner_radius;
    s->scale_ = scale;
    s->id_ = std::move(id);
    return s;
}

SpacePtr FiniteSpace::product(const SpacePtr& a, const SpacePtr& b, const Limits& lim) {
    if (a->scale_ != b->scale_) throw std::invalid_argument("product: factors use different scales");
    std::optional<FactorFunction> phi;
    if (a->phi_ && b->phi_) phi = ff_add(*a->phi_, *b->phi_);
    std::string id = "(" + a->id_ + ")x(" + b->id_ + ")";
    Dist inner = std::min(a->inner_radius_, b->inner_radius_);
    if (a->kind_ == Kind::grid && b->kind_ == Kind::grid) {
        auto axes = a->axes_;
        axes.insert(axes.end(), b->axes_.begin(), b->axes_.end());
        auto base = a->base_;
        base.insert(base.end(), b->base_.begin(), b->base_.end());
        auto g = std::const_pointer_cast<FiniteSpace>(grid(std::move(axes), std::move(base), inner, id, lim));
        g->phi_ = phi;
        g->a_ = a;
        g->b_ = b;
        return g;
    }
    a->require_enumerable();
    b->require_enumerable();
    long double n = static_cast<long double>(a->n_) * static_cast<long double>(b->n_);
    if (n > static_cast<long double>(lim.point_budget)) throw BudgetError("point budget exceeded");
    auto s = std::shared_ptr<FiniteSpace>(new FiniteSpace());
    s->kind_ = Kind::product;
    s->n_ = a->n_ * b->n_;
    s->approx_size_ = n;
    s->a_ = a;
    s->b_ = b;
    s->basepoint_ = a->basepoint_ * b->n_ + b->basepoint_;
    s->inner_radius_ = inner;
    s->scale_ = a->scale_;
    s->ultrametric_ = a->ultrametric_ && b->ultrametric_;
    s->phi_ = phi;
    s->id_ = id;
    return s;
}

SpacePtr FiniteSpace::subspace(const SpacePtr& parent, std::vector<std::size_t> indices,
                               std::size_t basepoint, Dist inner_radius, std::string id) {
    parent->require_enumerable();
    if (basepoint >= indices.size()) throw std::invalid_argument("subspace: basepoint");
    for (auto i : indices)
        if (i >= parent->n_) throw std::invalid_argument("subspace: index out of range");
    auto s = std::shared_ptr<FiniteSpace>(new FiniteSpace());
    s->kind_ = Kind::subspace;
    s->n_ = indices.size();
    s->approx_size_ = static_cast<long double>(s->n_);
    s->a_ = parent;
    s->sub_ = std::move(indices);
    s->basepoint_ = basepoint;
    s->inner_radius_ = inner_radius;
    s->scale_ = parent->scale_;
    s->ultrametric_ = parent->ultrametric_;
    s->id_ = std::move(id);
    return s;
}

std::shared_ptr<FiniteSpace> FiniteSpace::with_phi(std::optional<FactorFunction> phi) const {
    auto s = std::shared_ptr<FiniteSpace>(new FiniteSpace());
    s->kind_ = kind_;
    s->id_ = id_;
    s->n_ = n_;
    s->enumerable_ = enumerable_;
    s->approx_size_ = approx_size_;
    s->basepoint_ = basepoint_;
    s->inner_radius_ = inner_radius_;
    s->scale_ = scale_;
    s->ultrametric_ = ultrametric_;
    s->phi_ = std::move(phi);
    s->axes_ = axes_;
    s->base_ = base_;
    s->strides_ = strides_;
    s->soa_ = soa_;
    s->xs_ = xs_;
    s->ys_ = ys_;
    s->table_ = table_;
    s->labels_ = labels_;
    s->a_ = a_;
    s->b_ = b_;
    s->sub_ = sub_;
    return s;
}

std::shared_ptr<FiniteSpace> FiniteSpace::with_id(std::string id) const {
    auto s = with_phi(phi_);
    s->id_ = std::move(id);
    return s;
}

// ---- queries ----------------------------------------------------------------

std::size_t FiniteSpace::size() const {
    if (kind_ == Kind::grid && n_ == 0) throw BudgetError("space is too large to enumerate");
    return n_;
}

void FiniteSpace::require_enumerable() const {
    if (!enumerable_) throw BudgetError("point budget exceeded for '" + id_ + "'");
}

std::vector<std::int64_t> FiniteSpace::coords(std::size_t i) const {
    std::vector<std::int64_t> c(axes_.size());
    for (std::size_t k = 0; k < axes_.size(); ++k)
        c[k] = axes_[k].lo + static_cast<std::int64_t>((i / strides_[k]) % axes_[k].size());
    return c;
}

std::optional<std::size_t> FiniteSpace::index_of(const std::vector<std::int64_t>& c) const {
    if (c.size() != axes_.size()) return std::nullopt;
    std::size_t idx = 0;
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        if (c[k] < axes_[k].lo || c[k] > axes_[k].hi) return std::nullopt;
        idx += static_cast<std::size_t>(c[k] - axes_[k].lo) * strides_[k];
    }
    return idx;
}

std::optional<std::size_t> FiniteSpace::translate(std::size_t i,
                                                  const std::vector<std::int64_t>& g) const {
    if (kind_ != Kind::grid || g.size() != axes_.size())
        throw std::invalid_argument("translate: space has no group structure");
    auto c = coords(i);
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        if (axes_[k].kind == Axis::Kind::discrete) {
            std::int64_t o = axes_[k].order;
            c[k] = ((c[k] + g[k]) % o + o) % o;
        } else {
            c[k] += g[k];
        }
    }
    return index_of(c);
}

Dist FiniteSpace::dist(std::size_t i, std::size_t j) const {
    switch (kind_) {
        case Kind::grid: {
            Dist d = 0;
            for (std::size_t k = 0; k < axes_.size(); ++k) {
                std::int64_t sz = axes_[k].size();
                std::int64_t ci = static_cast<std::int64_t>((i / strides_[k]) % sz);
                std::int64_t cj = static_cast<std::int64_t>((j / strides_[k]) % sz);
                Dist dk = axes_[k].kind == Axis::Kind::free ? std::abs(ci - cj) * axes_[k].unit
                                                            : (ci != cj ? axes_[k].unit : 0);
                d = std::max(d, dk);
            }
            return d;
        }
        case Kind::euclid: {
            double dx = xs_[i] - xs_[j], dy = ys_[i] - ys_[j];
            double s = dx * dx;
            s = s + dy * dy;
            return static_cast<Dist>(std::nearbyint(std::sqrt(s) * static_cast<double>(scale_)));
        }
        case Kind::dense:
            return table_[i * n_ + j];
        case Kind::product: {
            std::size_t nb = b_->n_;
            return std::max(a_->dist(i / nb, j / nb), b_->dist(i % nb, j % nb));
        }
        case Kind::subspace:
            return a_->dist(sub_[i], sub_[j]);
    }
    return 0;
}

void FiniteSpace::row(std::size_t i, Dist* out) const {
    const auto& K = kernels::active();
    switch (kind_) {
        case Kind::grid: {
            require_enumerable();
            std::fill(out, out + n_, 0);
            auto c = coords(i);
            for (std::size_t k = 0; k < axes_.size(); ++k) {
                if (axes_[k].kind == Axis::Kind::free)
                    K.free_axis_max(soa_[k].data(), n_, c[k], axes_[k].unit, out);
                else
                    K.discrete_axis_max(soa_[k].data(), n_, c[k], axes_[k].unit, out);
            }
            return;
        }
        case Kind::euclid:
            K.euclid_row(xs_.data(), ys_.data(), n_, xs_[i], ys_[i], static_cast<double>(scale_), out);
            return;
        case Kind::dense:
            std::copy(table_.begin() + static_cast<std::ptrdiff_t>(i * n_),
                      table_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_), out);
            return;
        case Kind::product: {
            std::size_t na = a_->n_, nb = b_->n_;
            std::vector<Dist> ra(na), rb(nb);
            a_->row(i / nb, ra.data());
            b_->row(i % nb, rb.data());
            for (std::size_t x = 0; x < na; ++x)
                for (std::size_t y = 0; y < nb; ++y) out[x * nb + y] = std::max(ra[x], rb[y]);
            return;
        }
        case Kind::subspace: {
            if (sub_.size() * 8 < a_->n_) {
                for (std::size_t j = 0; j < n_; ++j) out[j] = a_->dist(sub_[i], sub_[j]);
                return;
            }
            std::vector<Dist> pr(a_->n_);
            a_->row(sub_[i], pr.data());
            for (std::size_t j = 0; j < n_; ++j) out[j] = pr[sub_[j]];
            return;
        }
    }
}

std::vector<Dist> FiniteSpace::row(std::size_t i) const {
    std::vector<Dist> r(size());
    row(i, r.data());
    return r;
}

std::string FiniteSpace::label(std::size_t i) const {
    switch (kind_) {
        case Kind::grid:
            return join_coords(coords(i));
        case Kind::euclid: {
            std::ostringstream os;
            os.precision(10);
            os << '(' << xs_[i] << ',' << ys_[i] << ')';
            return os.str();
        }
        case Kind::dense:
            return labels_.empty() ? std::to_string(i) : labels_[i];
        case Kind::product:
            return "(" + a_->label(i / b_->n_) + "," + b_->label(i % b_->n_) + ")";
        case Kind::subspace:
            return a_->label(sub_[i]);
    }
    return {};
}

bool FiniteSpace::same_as(const FiniteSpace& o) const {
    if (this == &o) return true;
    if (kind_ != o.kind_ || n_ != o.n_ || basepoint_ != o.basepoint_ || scale_ != o.scale_)
        return false;
    switch (kind_) {
        case Kind::grid:
            return axes_ == o.axes_ && base_ == o.base_;
        case Kind::dense:
            return table_ == o.table_;
        case Kind::euclid:
            return xs_ == o.xs_ && ys_ == o.ys_;
        case Kind::product:
            return a_->same_as(*o.a_) && b_->same_as(*o.b_);
        case Kind::subspace:
            return sub_ == o.sub_ && a_->same_as(*o.a_);
    }
    return false;
}

// ---- minimum spanning tree ----------------------------------------------------

namespace {

struct Dsu {
    std::vector<std::uint32_t> p, r;
    explicit Dsu(std::size_t n) : p(n), r(n, 0) { std::iota(p.begin(), p.end(), 0u); }
    std::uint32_t find(std::uint32_t x) {
        while (p[x] != x) { p[x] = p[p[x]]; x = p[x]; }
        return x;
    }
    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (r[a] < r[b]) std::swap(a, b);
        p[b] = a;
        if (r[a] == r[b]) ++r[a];
        return true;
    }
};

bool edge_less(const MstEdge& a, const MstEdge& b) {
    if (a.w != b.w) return a.w < b.w;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
}

std::vector<MstEdge> prim_mst(const FiniteSpace& s) {
    std::size_t n = s.size();
    std::vector<MstEdge> out;
    if (n <= 1) return out;
    const auto& K = kernels::active();
    std::vector<Dist> key(n, std::numeric_limits<Dist>::max()), rowbuf(n);
    std::vector<std::uint32_t> parent(n, 0);
    std::vector<std::uint8_t> done(n, 0);
    std::size_t cur = 0;
    done[0] = 1;
    out.reserve(n - 1);
    for (std::size_t step = 1; step < n; ++step) {
        s.row(cur, rowbuf.data());
        // remember which vertex offered the improved key
        for (std::size_t i = 0; i < n; ++i)
            if (!done[i] && rowbuf[i] < key[i]) parent[i] = static_cast<std::uint32_t>(cur);
        std::size_t nxt = K.prim_update(rowbuf.data(), key.data(), done.data(), n);
        done[nxt] = 1;
        auto u = parent[nxt], v = static_cast<std::uint32_t>(nxt);
        out.push_back({std::min(u, v), std::max(u, v), key[nxt]});
        cur = nxt;
    }
    std::sort(out.begin(), out.end(), edge_less);
    return out;
}

// Exact planar MST: Kruskal over grid-hashed candidate edges with a doubling
// cap; each phase only looks at pairs that are still in different trees.
std::vector<MstEdge> planar_mst(const FiniteSpace& s) {
    std::size_t n = s.size();
    std::vector<MstEdge> out;
    if (n <= 1) return out;
    const auto& xs = s.xs();
    const auto& ys = s.ys();
    double minx = *std::min_element(xs.begin(), xs.end()), maxx = *std::max_element(xs.begin(), xs.end());
    double miny = *std::min_element(ys.begin(), ys.end()), maxy = *std::max_element(ys.begin(), ys.end());
    double area = std::max(1e-12, (maxx - minx) * (maxy - miny));
    double cap = std::max(1e-9, std::sqrt(area / static_cast<double>(n)) / 4.0);
    Dsu dsu(n);
    std::size_t comps = n;
    while (comps > 1) {
        Dist cap_units = static_cast<Dist>(std::floor(cap * static_cast<double>(s.scale())));
        // snapshot of the forest before this phase
        std::vector<std::uint32_t> root(n);
        for (std::size_t i = 0; i < n; ++i) root[i] = dsu.find(static_cast<std::uint32_t>(i));
        double cell = cap * 1.000001;
        std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid;
        auto key = [&](std::int64_t cx, std::int64_t cy) {
            return (static_cast<std::uint64_t>(cx + (1LL << 31)) << 32) ^
                   static_cast<std::uint64_t>(cy + (1LL << 31));
        };
        std::vector<std::int64_t> cxs(n), cys(n);
        for (std::size_t i = 0; i < n; ++i) {
            cxs[i] = static_cast<std::int64_t>(std::floor((xs[i] - minx) / cell));
            cys[i] = static_cast<std::int64_t>(std::floor((ys[i] - miny) / cell));
            grid[key(cxs[i], cys[i])].push_back(static_cast<std::uint32_t>(i));
        }
        std::vector<MstEdge> cand;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::int64_t dx = -1; dx <= 1; ++dx)
                for (std::int64_t dy = -1; dy <= 1; ++dy) {
                    auto it = grid.find(key(cxs[i] + dx, cys[i] + dy));
                    if (it == grid.end()) continue;
                    for (auto j : it->second) {
                        if (j <= i || root[j] == root[i]) continue;
                        Dist w = s.dist(i, j);
                        if (w <= cap_units) cand.push_back({static_cast<std::uint32_t>(i), j, w});
                    }
                }
        }
        std::sort(cand.begin(), cand.end(), edge_less);
        for (auto& e : cand)
            if (dsu.unite(e.u, e.v)) {
                out.push_back(e);
                --comps;
            }
        cap *= 2.0;
    }
    std::sort(out.begin(), out.end(), edge_less);
    return out;
}

}  // namespace

const std::vector<MstEdge>& FiniteSpace::mst() const {
    std::call_once(mst_once_, [this] {
        require_enumerable();
        mst_ = kind_ == Kind::euclid ? planar_mst(*this) : prim_mst(*this);
    });
    return mst_;
}

// ---- fixtures -------------------------------------------------------------------

SpacePtr zr_ball(int r, std::int64_t radius, const Limits& lim) {
    std::vector<Axis> axes(static_cast<std::size_t>(r), Axis::free_axis(radius));
    auto s = FiniteSpace::grid(axes, std::vector<std::int64_t>(static_cast<std::size_t>(r), 0), r ? radius : kWholeSpace,
                               "Z^" + std::to_string(r) + "-ball(" + std::to_string(radius) + ")", lim);
    return std::const_pointer_cast<FiniteSpace>(s)->with_phi(FactorFunction());
}

SpacePtr point_space(std::int64_t k, std::int64_t level) {
    auto s = FiniteSpace::grid({Axis::cyclic(k, level)}, {0}, kWholeSpace,
                               std::to_string(k) + "-point(" + std::to_string(level) + ")");
    return s->with_phi(phi_of_nat(static_cast<std::uint64_t>(k)));
}

SpacePtr line_points(const std::vector<std::int64_t>& xs) {
    std::size_t n = xs.size();
    std::vector<Dist> t(n * n);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back(std::to_string(xs[i]));
        for (std::size_t j = 0; j < n; ++j) t[i * n + j] = std::abs(xs[i] - xs[j]);
    }
    return FiniteSpace::dense(n, std::move(t), std::move(labels), 0, 0, 1, false, "line-points");
}

}  // namespace coarse
