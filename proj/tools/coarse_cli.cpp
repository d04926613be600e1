// coarse: command-line front end
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "coarse/generators.hpp"
#include "coarse/json_io.hpp"
#include "coarse/metric.hpp"
#include "coarse/witness.hpp"

using namespace coarse;

namespace {

struct Config {
    std::uint64_t prime_bound = 97;
    std::uint64_t point_budget = 1000000;
    std::string format = "json";
    std::uint64_t seed = 1;
    std::string out;
    std::optional<std::int64_t> radius;
    std::optional<std::size_t> depth;
    std::string epsilon = "1";
    std::string c = "2";
    std::string deltas = "1,2,4,8";
    std::size_t count = 500;

    Limits lim() const { return {point_budget, prime_bound}; }
};

void flatten(const json& j, const std::string& prefix, std::ostream& os) {
    if (j.is_object()) {
        for (auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, os);
    } else if (j.is_array() && !j.empty() && j.front().is_object()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", os);
    } else {
        os << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}

void emit(const Config& cfg, const json& j) {
    if (cfg.format == "table") flatten(j, "", std::cout);
    else std::cout << j.dump(2) << "\n";
}

SpacePtr load_fixture(const std::string& fixture, const Config& cfg) {
    auto lim = cfg.lim();
    auto colon = fixture.find(':');
    std::string head = fixture.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : fixture.substr(colon + 1);
    if (head == "group") {
        auto g = parse_group(arg);
        std::int64_t r = cfg.radius.value_or(32);
        return build_truncation(g, interleaved_schedule(g, r, 4, lim), r, lim);
    }
    if (head == "zball") return zr_ball(arg.empty() ? 1 : std::stoi(arg), cfg.radius.value_or(20), lim);
    if (head == "ultra") return canonical_ultrametric(FactorFunction::parse(arg), cfg.depth.value_or(6), lim);
    if (head == "cantor") return cantor_cube_truncation(static_cast<int>(cfg.depth.value_or(6)), lim);
    if (head == "example31") {
        int b = 50;
        double h = 0.01, clamp = 1000;
        if (!arg.empty()) {
            char sep1 = 0, sep2 = 0;
            std::istringstream is(arg);
            if (!(is >> b >> sep1 >> h >> sep2 >> clamp) || sep1 != ',' || sep2 != ',')
                throw std::invalid_argument("example31 expects branches,step,clamp");
        }
        return example31_fixture(b, h, clamp, lim);
    }
    if (head == "file") {
        std::ifstream in(arg);
        if (!in) throw std::invalid_argument("cannot open " + arg);
        return space_from_json(json::parse(in), lim);
    }
    throw std::invalid_argument("unknown fixture '" + fixture + "' (group:, zball:, ultra:, cantor, example31, file:)");
}

std::vector<Dist> parse_deltas(const std::string& s, Dist scale) {
    std::vector<Dist> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(to_units_floor(Rational::parse(item), scale));
    return out;
}

void write_out(const Config& cfg, const json& j) {
    if (cfg.out.empty()) return;
    std::ofstream f(cfg.out);
    if (!f) throw std::runtime_error("cannot write " + cfg.out);
    f << j.dump(1) << "\n";
}

int cmd_invariants(const std::string& text, const Config& cfg) {
    auto g = parse_group(text);
    auto cf = canonical_form(g);
    emit(cfg, {{"group", g.render()},
               {"r", cf.r.str()},
               {"phi", cf.phi.render()},
               {"finitely_generated", g.finitely_generated()},
               {"locally_finite", is_locally_finite(g)},
               {"canonical_form", {{"r", cf.r.str()}, {"phi", cf.phi.render()}}}});
    return 0;
}

int cmd_classify(const std::string& rel, const std::string& a, const std::string& b, const Config& cfg) {
    auto g1 = parse_group(a), g2 = parse_group(b);
    Verdict v;
    if (rel == "equiv") v = coarse_equivalent(g1, g2);
    else if (rel == "iso") v = coarse_isomorphic(g1, g2);
    else throw std::invalid_argument("relation must be equiv or iso");
    emit(cfg, verdict_json(v));
    return v.result ? 0 : 1;
}

int cmd_witness(const std::string& a, const std::string& b, const Config& cfg) {
    auto g1 = parse_group(a), g2 = parse_group(b);
    auto v = coarse_isomorphic(g1, g2);
    if (!v.result) {
        std::cerr << "not coarsely isomorphic: " << v.reason << "\n";
        return 1;
    }
    ChainOptions opt;
    opt.radius = cfg.radius.value_or(8);
    opt.depth = cfg.depth.value_or(6);
    opt.lim = cfg.lim();
    auto w = iso_witness_chain(g1, g2, opt);
    auto rep = verify_witness(w, parse_deltas(cfg.deltas, w.source->scale()));
    write_out(cfg, witness_json(w));
    emit(cfg, {{"construction", w.construction},
               {"source", w.source->id()},
               {"target", w.target->id()},
               {"validity_radius", dist_json(w.validity_radius, w.source->scale())},
               {"report", report_json(rep, w.source->scale())}});
    return rep.ok() ? 0 : 1;
}

int cmd_components(const std::string& fx, const Config& cfg) {
    auto x = load_fixture(fx, cfg);
    Dist eps = to_units_floor(Rational::parse(cfg.epsilon), x->scale());
    auto p = epsilon_components(*x, eps);
    auto j = partition_json(*x, p);
    j["space"] = x->id();
    j["points"] = x->size();
    emit(cfg, j);
    return 0;
}

int cmd_step(const std::string& fx, const Config& cfg) {
    auto x = load_fixture(fx, cfg);
    auto st = estimate_factorizing_step(*x);
    auto j = step_json(st);
    j["space"] = x->id();
    j["points"] = x->size();
    emit(cfg, j);
    return 0;
}

int cmd_phi(const std::string& fx, const Config& cfg) {
    auto x = load_fixture(fx, cfg);
    emit(cfg, {{"space", x->id()}, {"phi", empirical_phi(*x, cfg.prime_bound).render()}});
    return 0;
}

int cmd_foelner(const std::string& fx, const Config& cfg) {
    auto x = load_fixture(fx, cfg);
    Dist eps = to_units_ceil(Rational::parse(cfg.epsilon), x->scale());
    auto c = Rational::parse(cfg.c);
    auto f = foelner_search(*x, c, eps);
    json j{{"space", x->id()}, {"found", f.found}, {"c", c.str()}, {"epsilon", dist_json(eps, x->scale())}};
    if (f.found) {
        j["ball_radius"] = dist_json(f.ball_radius, x->scale());
        j["set_size"] = f.set_size;
        j["neighborhood_size"] = f.neighborhood_size;
        j["recount"] = neighborhood_size(*x, f.set, eps);
    }
    emit(cfg, j);
    return 0;
}

int cmd_cover(int r, const Config& cfg) {
    auto cov = asdim_cover(r, Rational::parse(cfg.epsilon), cfg.radius.value_or(100), cfg.lim());
    emit(cfg, {{"r", r},
               {"epsilon", cfg.epsilon},
               {"points", cov.space->size()},
               {"blocks", cov.blocks.size()},
               {"mesh", cov.mesh},
               {"multiplicity_bound", cov.multiplicity_bound},
               {"multiplicity", cov.measured_multiplicity}});
    return 0;
}

int cmd_suite(const Config& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::size_t bad = 0;
    json examples = json::array();
    for (std::size_t i = 0; i < cfg.count; ++i) {
        auto a = random_group(rng), b = random_group(rng);
        auto e1 = coarse_equivalent(a, b), e2 = coarse_equivalent(b, a);
        auto i1 = coarse_isomorphic(a, b), i2 = coarse_isomorphic(b, a);
        if ((i1.result && !e1.result) || e1.result != e2.result || i1.result != i2.result) {
            ++bad;
            if (examples.size() < 5) examples.push_back({a.render(), b.render()});
        }
    }
    emit(cfg, {{"seed", cfg.seed}, {"pairs", cfg.count}, {"counterexamples", bad}, {"examples", examples}});
    return bad ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coarse classification of locally finite-by-abelian groups"};
    app.require_subcommand(1);
    app.fallthrough();
    Config cfg;
    app.add_option("--prime-bound", cfg.prime_bound, "largest prime considered")->check(CLI::PositiveNumber);
    app.add_option("--point-budget", cfg.point_budget, "maximum points per space")->check(CLI::PositiveNumber);
    app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "table"}));
    app.add_option("--seed", cfg.seed, "seed for randomized suites");
    app.add_option("--out", cfg.out, "write the witness file here");

    auto radius = [&](CLI::App* s) {
        s->add_option_function<std::int64_t>("--radius", [&](const std::int64_t& v) { cfg.radius = v; }, "radius")
            ->check(CLI::PositiveNumber);
    };
    auto depth = [&](CLI::App* s) {
        s->add_option_function<std::size_t>("--depth", [&](const std::size_t& v) { cfg.depth = v; }, "depth");
    };
    std::string g1, g2, rel, fixture;
    int r = 2;

    auto* inv = app.add_subcommand("invariants", "free rank, factorizing function, canonical form");
    inv->add_option("group", g1)->required();

    auto* cls = app.add_subcommand("classify", "decide coarse equivalence or isomorphism (exit 0 true, 1 false)");
    cls->add_option("relation", rel)->required()->check(CLI::IsMember({"equiv", "iso"}));
    cls->add_option("g1", g1)->required();
    cls->add_option("g2", g2)->required();

    auto* wit = app.add_subcommand("witness", "build and verify a coarse isomorphism between truncations");
    wit->add_option("g1", g1)->required();
    wit->add_option("g2", g2)->required();
    radius(wit);
    depth(wit);
    wit->add_option("--deltas", cfg.deltas, "comma-separated deltas for the report");

    std::vector<CLI::App*> fixture_cmds;
    for (auto [name, help] : {std::pair{"components", "epsilon-components of a fixture"},
                              std::pair{"step", "estimate the factorizing step"},
                              std::pair{"phi", "empirical factorizing function of an ultrametric fixture"},
                              std::pair{"foelner", "search a ball-shaped Foelner set"}}) {
        auto* s = app.add_subcommand(name, help);
        s->add_option("fixture", fixture, "group:DESC | zball:R | ultra:PHI | cantor | example31[:b,h,clamp] | file:PATH")
            ->required();
        radius(s);
        depth(s);
        fixture_cmds.push_back(s);
    }
    fixture_cmds[0]->add_option("--epsilon", cfg.epsilon, "scale");
    fixture_cmds[3]->add_option("--epsilon", cfg.epsilon, "neighbourhood radius");
    fixture_cmds[3]->add_option("--c", cfg.c, "ratio bound");

    auto* cov = app.add_subcommand("cover", "verified asdim cover of a Z^r ball");
    cov->add_option("r", r)->required()->check(CLI::Range(0, 3));
    cov->add_option("--epsilon", cfg.epsilon, "Lebesgue scale");
    radius(cov);

    auto* suite = app.add_subcommand("suite", "seeded decision consistency check");
    suite->add_option("--count", cfg.count, "random pairs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        if (*inv) return cmd_invariants(g1, cfg);
        if (*cls) return cmd_classify(rel, g1, g2, cfg);
        if (*wit) return cmd_witness(g1, g2, cfg);
        if (*fixture_cmds[0]) return cmd_components(fixture, cfg);
        if (*fixture_cmds[1]) return cmd_step(fixture, cfg);
        if (*fixture_cmds[2]) return cmd_phi(fixture, cfg);
        if (*fixture_cmds[3]) return cmd_foelner(fixture, cfg);
        if (*cov) return cmd_cover(r, cfg);
        if (*suite) return cmd_suite(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
