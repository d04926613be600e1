#include "coarse/json_io.hpp"

#include <numeric>

namespace coarse {

namespace {

constexpr int kSpaceVersion = 1;

const char* kind_name(FiniteSpace::Kind k) {
    switch (k) {
        case FiniteSpace::Kind::grid: return "grid";
        case FiniteSpace::Kind::euclid: return "euclid";
        case FiniteSpace::Kind::dense: return "dense";
        case FiniteSpace::Kind::product: return "product";
        case FiniteSpace::Kind::subspace: return "subspace";
    }
    return "?";
}

json ff_json(const FactorFunction& f) { return f.render(); }

}  // namespace

json dist_json(Dist d, Dist scale) {
    if (d >= kWholeSpace) return "inf";
    if (scale == 1) return d;
    Dist g = std::gcd(d, scale);
    return std::to_string(d / g) + "/" + std::to_string(scale / g);
}

Dist dist_from_json(const json& j, Dist scale) {
    if (j.is_number_integer()) return j.get<Dist>() * scale;
    auto s = j.get<std::string>();
    if (s == "inf") return kWholeSpace;
    return to_units_floor(Rational::parse(s), scale);
}

json verdict_json(const Verdict& v) {
    json j{{"result", v.result},
           {"relation", relation_name(v.relation)},
           {"case", v.case_label},
           {"reason", v.reason},
           {"invariants",
            {{"r1", v.r1.str()}, {"phi1", ff_json(v.phi1)}, {"r2", v.r2.str()}, {"phi2", ff_json(v.phi2)}}}};
    if (v.multipliers) j["multipliers"] = {{"n", v.multipliers->first}, {"m", v.multipliers->second}};
    return j;
}

json schedule_json(const Schedule& s) {
    json a = json::array();
    for (auto& g : s)
        a.push_back({{"generator", g.free ? std::string("Z") : "C" + std::to_string(g.order)}, {"level", g.level}});
    return a;
}

Schedule schedule_from_json(const json& j) {
    Schedule s;
    for (auto& e : j) {
        auto name = e.at("generator").get<std::string>();
        Generator g;
        g.level = e.at("level").get<std::int64_t>();
        if (name == "Z") {
            g.free = true;
        } else if (name.size() > 1 && name[0] == 'C') {
            g.order = std::stoll(name.substr(1));
        } else {
            throw std::invalid_argument("schedule: unknown generator '" + name + "'");
        }
        s.push_back(g);
    }
    return s;
}

json space_json(const FiniteSpace& x, bool with_labels) {
    Dist sc = x.scale();
    json j;
    j["format"] = "coarse-space";
    j["version"] = kSpaceVersion;
    json h{{"id", x.id()},
           {"point_count", x.enumerable() ? json(x.size()) : json(nullptr)},
           {"basepoint", x.basepoint()},
           {"inner_radius", dist_json(x.inner_radius(), sc)},
           {"scale", sc},
           {"flags", {{"ultrametric", x.ultrametric()}, {"enumerable", x.enumerable()}}}};
    if (x.phi_symbolic()) h["phi"] = ff_json(*x.phi_symbolic());
    j["header"] = h;
    // dense labels are data (nothing else can rebuild them), so nested ones are kept too
    if ((with_labels || x.kind() == FiniteSpace::Kind::dense) && x.enumerable()) {
        json l = json::array();
        for (std::size_t i = 0; i < x.size(); ++i) l.push_back(x.label(i));
        j["labels"] = l;
    }
    json d{{"kind", kind_name(x.kind())}};
    switch (x.kind()) {
        case FiniteSpace::Kind::grid: {
            if (x.factor_a()) {
                d["kind"] = "product";
                d["a"] = space_json(*x.factor_a(), false);
                d["b"] = space_json(*x.factor_b(), false);
                break;
            }
            json axes = json::array();
            for (auto& a : x.axes())
                axes.push_back({{"kind", a.kind == Axis::Kind::free ? "free" : "discrete"},
                                {"lo", a.lo},
                                {"hi", a.hi},
                                {"unit", dist_json(a.unit, sc)},
                                {"order", a.order}});
            d["axes"] = axes;
            d["base"] = x.base_coords();
            break;
        }
        case FiniteSpace::Kind::euclid:
            d["xs"] = x.xs();
            d["ys"] = x.ys();
            break;
        case FiniteSpace::Kind::dense: {
            json t = json::array();
            for (auto v : x.table()) t.push_back(dist_json(v, sc));
            d["table"] = t;
            break;
        }
        case FiniteSpace::Kind::product:
            d["a"] = space_json(*x.factor_a(), false);
            d["b"] = space_json(*x.factor_b(), false);
            break;
        case FiniteSpace::Kind::subspace:
            d["parent"] = space_json(*x.parent(), false);
            d["indices"] = x.parent_indices();
            break;
    }
    j["distance"] = d;
    return j;
}

SpacePtr space_from_json(const json& j, const Limits& lim) {
    if (j.value("format", "") != "coarse-space") throw std::invalid_argument("not a coarse-space file");
    if (j.value("version", 0) != kSpaceVersion) throw std::invalid_argument("unsupported coarse-space version");
    const auto& h = j.at("header");
    Dist sc = h.at("scale").get<Dist>();
    Dist inner = dist_from_json(h.at("inner_radius"), sc);
    auto id = h.at("id").get<std::string>();
    auto bp = h.at("basepoint").get<std::size_t>();
    const auto& d = j.at("distance");
    auto kind = d.at("kind").get<std::string>();
    SpacePtr s;
    if (kind == "grid") {
        std::vector<Axis> axes;
        for (auto& a : d.at("axes"))
            axes.push_back({a.at("kind") == "free" ? Axis::Kind::free : Axis::Kind::discrete, a.at("lo").get<std::int64_t>(),
                            a.at("hi").get<std::int64_t>(), dist_from_json(a.at("unit"), sc),
                            a.at("order").get<std::int64_t>()});
        s = FiniteSpace::grid(axes, d.at("base").get<std::vector<std::int64_t>>(), inner, id, lim);
    } else if (kind == "euclid") {
        s = FiniteSpace::euclid(d.at("xs").get<std::vector<double>>(), d.at("ys").get<std::vector<double>>(), bp,
                                inner, sc, id, lim);
    } else if (kind == "dense") {
        std::vector<Dist> t;
        for (auto& v : d.at("table")) t.push_back(dist_from_json(v, sc));
        std::vector<std::string> labels;
        if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
        std::size_t n = h.at("point_count").get<std::size_t>();
        s = FiniteSpace::dense(n, std::move(t), std::move(labels), bp, inner, sc,
                               h.at("flags").at("ultrametric").get<bool>(), id);
    } else if (kind == "product") {
        auto a = space_from_json(d.at("a"), lim), b = space_from_json(d.at("b"), lim);
        s = FiniteSpace::product(a, b, lim)->with_id(id);
    } else if (kind == "subspace") {
        s = FiniteSpace::subspace(space_from_json(d.at("parent"), lim), d.at("indices").get<std::vector<std::size_t>>(),
                                  bp, inner, id);
    } else {
        throw std::invalid_argument("unknown distance rule '" + kind + "'");
    }
    std::optional<FactorFunction> phi;
    if (h.contains("phi")) phi = FactorFunction::parse(h.at("phi").get<std::string>());
    return s->with_phi(phi);
}

json witness_json(const WitnessMap& w) {
    Dist ss = w.source->scale(), ts = w.target->scale();
    json pairs = json::array();
    for (std::size_t i = 0; i < w.table.size(); ++i)
        if (w.table[i] >= 0) pairs.push_back({i, w.table[i]});
    json moduli = json::object();
    for (std::size_t k = 0; k < w.deltas.size(); ++k) {
        json e{{"forward", dist_json(w.forward_moduli.at(k), ts)}, {"backward", dist_json(w.backward_moduli.at(k), ss)}};
        moduli[units_str(w.deltas[k], ss)] = e;
    }
    json claims = json::array();
    for (auto& c : w.claims) {
        if (auto* iso = std::get_if<IsometryClaim>(&c)) {
            claims.push_back({{"kind", "component-isometry"}, {"components", iso->groups.size()}});
        } else {
            auto& b = std::get<BallClaim>(c);
            claims.push_back({{"kind", b.union_of ? "ball-union" : "ball-inside"},
                              {"source_radius", dist_json(b.source_radius, ss)},
                              {"target_radius", dist_json(b.target_radius, ts)}});
        }
    }
    json j{{"source_id", w.source->id()},
           {"target_id", w.target->id()},
           {"construction", w.construction},
           {"validity_radius", dist_json(w.validity_radius, ss)},
           {"pairs", pairs},
           {"moduli", moduli},
           {"claims", claims}};
    if (w.alignment) {
        json a = json::array();
        for (auto& [x, y] : w.alignment->pairs)
            a.push_back({{"a", x}, {"b", y}, {"u_ball", w.alignment->u_ball_orders[x]}, {"v_ball", w.alignment->v_ball_orders[y]}});
        json m = json::array();
        for (auto& [d, b] : w.alignment->modulus) m.push_back({dist_json(d, ss), dist_json(b, ts)});
        j["alignment"] = {{"interleaving", a}, {"modulus", m}};
    }
    return j;
}

json report_json(const VerifyReport& r, Dist scale) {
    json v = json::array();
    for (auto& x : r.violations) v.push_back({{"kind", x.kind}, {"detail", x.detail}});
    json rows = json::array();
    for (std::size_t k = 0; k < r.deltas.size(); ++k) {
        json e{{"delta", dist_json(r.deltas[k], scale)},
               {"forward", dist_json(r.forward[k], scale)},
               {"backward", dist_json(r.backward[k], scale)}};
        if (k < r.derived.size() && r.derived[k]) e["derived_bound"] = dist_json(*r.derived[k], scale);
        rows.push_back(e);
    }
    return {{"ok", r.ok()}, {"bijective", r.bijective}, {"region_size", r.region_size}, {"moduli", rows},
            {"violations", v}};
}

json partition_json(const FiniteSpace& x, const ComponentPartition& p) {
    json blocks = json::array();
    for (std::size_t b = 0; b < p.blocks.size(); ++b)
        blocks.push_back({{"representative", x.label(p.representatives[b])}, {"size", p.blocks[b].size()}});
    return {{"epsilon", dist_json(p.epsilon, x.scale())}, {"count", p.blocks.size()}, {"blocks", blocks}};
}

json step_json(const StepEstimate& s) {
    json c = json::array();
    for (std::size_t i = 0; i < s.candidates.size(); ++i) {
        if (s.status[i] < 0) continue;
        c.push_back({{"epsilon", dist_json(s.candidates[i], s.scale)}, {"stable", s.status[i] == 1}});
    }
    json j{{"candidates", s.candidates.size()},
           {"evaluated", c},
           {"inconclusive", s.inconclusive},
           {"confidence_radius", dist_json(s.confidence_radius, s.scale)}};
    j["estimate"] = s.inconclusive ? json(nullptr) : dist_json(s.estimate, s.scale);
    return j;
}

}  // namespace coarse
