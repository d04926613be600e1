#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coarse/prime_arith.hpp"

namespace coarse {

struct Summand {
    std::uint64_t order = 2;
    ExtNat multiplicity{1};
    bool finite_group = false;  // "F n": arbitrary group of order n
    friend bool operator==(const Summand&, const Summand&) = default;
};

struct GroupDescription {
    ExtNat free_rank_part{0};
    std::vector<Summand> summands;  // sorted by (order, position)
    ExtNat tail{0};                 // multiplicity of Z_p for every prime p

    std::string render() const;
    bool finitely_generated() const;
    friend bool operator==(const GroupDescription&, const GroupDescription&) = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

struct CanonicalForm {
    ExtNat r{0};
    FactorFunction phi;
    friend bool operator==(const CanonicalForm&, const CanonicalForm&) = default;
};

enum class Relation { equivalence, isomorphism };

struct Verdict {
    bool result = false;
    Relation relation = Relation::equivalence;
    std::string case_label;  // clause that fired, or the one that failed
    std::string reason;
    ExtNat r1, r2;
    FactorFunction phi1, phi2;
    bool fg1 = false, fg2 = false;
    // padding pair (n1, n2) with phi_{n1} + phi1 = phi_{n2} + phi2
    std::optional<std::pair<std::uint64_t, std::uint64_t>> multipliers;
};

GroupDescription parse_group(const std::string& text);
ExtNat free_rank(const GroupDescription& g);
FactorFunction factorizing_function_symbolic(const GroupDescription& g);
CanonicalForm canonical_form(const GroupDescription& g);
bool is_locally_finite(const GroupDescription& g);
Verdict coarse_equivalent(const GroupDescription& g1, const GroupDescription& g2);
Verdict coarse_isomorphic(const GroupDescription& g1, const GroupDescription& g2);

// minimal (n, m) with phi_n <= phi_X, phi_m <= phi_Y, phi_X - phi_n = phi_Y - phi_m
std::optional<std::pair<std::uint64_t, std::uint64_t>> find_multipliers(const CanonicalForm& x,
                                                                         const CanonicalForm& y);

std::string relation_name(Relation r);

}  // namespace coarse
