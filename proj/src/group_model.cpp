#include "coarse/group_model.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace coarse {

namespace {

struct Lexer {
    const std::string& s;
    std::size_t i = 0;

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eof() {
        skip();
        return i >= s.size();
    }
    bool accept(char c) {
        skip();
        if (i < s.size() && s[i] == c) { ++i; return true; }
        return false;
    }
    bool accept_word(const char* w) {
        skip();
        std::size_t n = std::char_traits<char>::length(w);
        if (s.compare(i, n, w) == 0) { i += n; return true; }
        return false;
    }
    ExtNat nat_or_inf(bool allow_inf) {
        skip();
        std::size_t start = i;
        if (allow_inf && accept_word("inf")) return ExtNat::inf();
        std::string digits;
        // digits may be separated by whitespace only if the caller allows it; we do not
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) digits += s[i++];
        if (digits.empty()) throw ParseError(allow_inf ? "expected natural or 'inf'" : "expected natural", start);
        if (digits.size() > 18) throw ParseError("number overflow", start);
        return ExtNat::parse(digits);
    }
};

ExtNat checked_add(ExtNat a, ExtNat b, std::size_t pos) {
    try {
        return a + b;
    } catch (const std::overflow_error&) {
        throw ParseError("rank/multiplicity overflow", pos);
    }
}

FactorFunction scaled(const FactorFunction& f, ExtNat k) {
    std::map<std::uint64_t, ExtNat> ex;
    for (auto& [p, v] : f.explicit_part()) ex[p] = v * k;
    return FactorFunction(std::move(ex), f.default_value() * k);
}

}  // namespace

GroupDescription parse_group(const std::string& text) {
    Lexer lx{text};
    GroupDescription g;
    std::vector<Summand> raw;
    if (lx.eof()) throw ParseError("empty group description", 0);
    do {
        lx.skip();
        std::size_t pos = lx.i;
        if (lx.accept_word("Call")) {
            if (!lx.accept('^')) throw ParseError("expected '^' after Call", lx.i);
            g.tail = checked_add(g.tail, lx.nat_or_inf(true), pos);
        } else if (lx.accept('Z')) {
            ExtNat k(1);
            if (lx.accept('^')) k = lx.nat_or_inf(true);
            g.free_rank_part = checked_add(g.free_rank_part, k, pos);
        } else if (lx.accept('C') || lx.accept('F')) {
            bool fin = text[pos] == 'F';
            std::size_t npos = lx.i;
            ExtNat order = lx.nat_or_inf(false);
            if (order.value() < 2) throw ParseError("order must be >= 2", npos);
            try {
                phi_of_nat(order.value());
            } catch (const FactorError&) {
                throw ParseError("order has a prime factor beyond the sieve bound", npos);
            }
            Summand s{order.value(), ExtNat(1), fin};
            if (!fin && lx.accept('^')) s.multiplicity = lx.nat_or_inf(true);
            raw.push_back(s);
        } else {
            throw ParseError("expected term (Z, C<n>, Call, F<n>)", pos);
        }
    } while (lx.accept('+'));
    if (!lx.eof()) throw ParseError("unexpected character", lx.i);

    std::stable_sort(raw.begin(), raw.end(),
                     [](const Summand& a, const Summand& b) { return a.order < b.order; });
    for (auto& s : raw) {
        if (!s.finite_group) {
            auto it = std::find_if(g.summands.begin(), g.summands.end(), [&](const Summand& t) {
                return !t.finite_group && t.order == s.order;
            });
            if (it != g.summands.end()) {
                it->multiplicity = checked_add(it->multiplicity, s.multiplicity, 0);
                continue;
            }
        }
        g.summands.push_back(s);
    }
    std::erase_if(g.summands, [](const Summand& s) { return s.multiplicity == ExtNat(0); });
    return g;
}

std::string GroupDescription::render() const {
    std::vector<std::string> parts;
    if (free_rank_part == ExtNat(1))
        parts.push_back("Z");
    else if (free_rank_part != ExtNat(0))
        parts.push_back("Z^" + free_rank_part.str());
    for (auto& s : summands) {
        std::string t = (s.finite_group ? "F" : "C") + std::to_string(s.order);
        if (s.multiplicity != ExtNat(1)) t += "^" + s.multiplicity.str();
        parts.push_back(t);
    }
    if (tail != ExtNat(0)) parts.push_back("Call^" + tail.str());
    if (parts.empty()) return "Z^0";
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "+" : "") + parts[i];
    return out;
}

bool GroupDescription::finitely_generated() const {
    if (free_rank_part.is_inf() || tail != ExtNat(0)) return false;
    for (auto& s : summands)
        if (s.multiplicity.is_inf()) return false;
    return true;
}

ExtNat free_rank(const GroupDescription& g) { return g.free_rank_part; }

FactorFunction factorizing_function_symbolic(const GroupDescription& g) {
    FactorFunction acc(g.tail);
    for (auto& s : g.summands) acc = ff_add(acc, scaled(phi_of_nat(s.order), s.multiplicity));
    return acc;
}

CanonicalForm canonical_form(const GroupDescription& g) {
    return {free_rank(g), factorizing_function_symbolic(g)};
}

bool is_locally_finite(const GroupDescription& g) { return free_rank(g) == ExtNat(0); }

std::string relation_name(Relation r) {
    return r == Relation::equivalence ? "equivalence" : "isomorphism";
}

namespace {

Verdict base_verdict(const GroupDescription& g1, const GroupDescription& g2, Relation rel) {
    Verdict v;
    v.relation = rel;
    v.r1 = free_rank(g1);
    v.r2 = free_rank(g2);
    v.phi1 = factorizing_function_symbolic(g1);
    v.phi2 = factorizing_function_symbolic(g2);
    v.fg1 = g1.finitely_generated();
    v.fg2 = g2.finitely_generated();
    return v;
}

}  // namespace

Verdict coarse_equivalent(const GroupDescription& g1, const GroupDescription& g2) {
    Verdict v = base_verdict(g1, g2, Relation::equivalence);
    if (v.r1 != v.r2) {
        v.case_label = "free-rank";
        v.reason = "free ranks differ (" + v.r1.str() + " vs " + v.r2.str() + ")";
    } else if (v.fg1 != v.fg2) {
        v.case_label = "generation";
        v.reason = "exactly one of the groups is finitely generated";
    } else {
        v.result = true;
        v.case_label = v.fg1 ? "both-finitely-generated" : "both-infinitely-generated";
        v.reason = "free ranks coincide";
    }
    return v;
}

Verdict coarse_isomorphic(const GroupDescription& g1, const GroupDescription& g2) {
    Verdict v = base_verdict(g1, g2, Relation::isomorphism);
    CanonicalForm x{v.r1, v.phi1}, y{v.r2, v.phi2};
    if (v.r1 != v.r2) {
        v.case_label = "none";
        v.reason = "free ranks differ (" + v.r1.str() + " vs " + v.r2.str() + ")";
        return v;
    }
    if (v.r1.is_inf()) {
        v.result = true;
        v.case_label = "1";
        v.reason = "both free ranks infinite";
        return v;
    }
    if (v.r1 == ExtNat(0)) {
        v.case_label = "2";
        v.result = ff_equal(v.phi1, v.phi2);
        v.reason = v.result ? "locally finite with equal factorizing functions"
                            : "locally finite but factorizing functions differ";
    } else {
        v.case_label = "3";
        v.result = ff_almost_equal(v.phi1, v.phi2);
        v.reason = v.result ? "equal finite positive ranks, factorizing functions almost equal"
                            : "equal finite positive ranks but factorizing functions not almost equal";
    }
    if (v.result)
        if (auto nm = find_multipliers(x, y)) v.multipliers = std::make_pair(nm->second, nm->first);
    return v;
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> find_multipliers(const CanonicalForm& x,
                                                                         const CanonicalForm& y) {
    if (x.r != y.r) return std::nullopt;
    if (x.r.is_inf()) return std::make_pair(1, 1);
    if (!ff_almost_equal(x.phi, y.phi)) return std::nullopt;
    // bounded factor spaces: X_s x n ~ Y_s x m forces n = m
    if (x.r == ExtNat(0) && !ff_equal(x.phi, y.phi)) return std::nullopt;
    std::uint64_t n = 1, m = 1;
    std::set<std::uint64_t> keys;
    for (auto& kv : x.phi.explicit_part()) keys.insert(kv.first);
    for (auto& kv : y.phi.explicit_part()) keys.insert(kv.first);
    for (auto p : keys) {
        ExtNat a = x.phi(p), b = y.phi(p);
        if (a.is_inf() || b.is_inf() || a == b) continue;
        std::uint64_t& t = a > b ? n : m;
        std::uint64_t e = a > b ? a.value() - b.value() : b.value() - a.value();
        for (std::uint64_t i = 0; i < e; ++i)
            if (__builtin_mul_overflow(t, p, &t)) throw std::overflow_error("multiplier overflow");
    }
    return std::make_pair(n, m);
}

}  // namespace coarse
