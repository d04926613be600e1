#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coarse/group_model.hpp"
#include "coarse/metric.hpp"
#include "coarse/space.hpp"

namespace coarse {

// Each group of source points is mapped isometrically; when `image_blocks` is
// non-empty, group k must land exactly on image_blocks[k] (target indices).
struct IsometryClaim {
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::vector<std::size_t>> image_blocks;
};

// Image of every closed source ball of radius `source_radius` is a union of
// target balls of radius `target_radius` (union_of) or lies inside a single
// one (inside).
struct BallClaim {
    Dist source_radius = 0;
    Dist target_radius = 0;
    bool union_of = true;
};

using Claim = std::variant<IsometryClaim, BallClaim>;

struct TowerAlignment {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (a_k, b_k), summand counts
    std::vector<std::uint64_t> u_ball_orders, v_ball_orders;  // |B_a(U)|, |B_b(V)|
    std::vector<Dist> u_radius, v_radius;                     // radius of level a / b
    // derived bound delta -> delta' on omega_f, at the realized radii of U
    std::vector<std::pair<Dist, Dist>> modulus;

    std::optional<Dist> bound(Dist delta) const;
};

struct WitnessMap {
    SpacePtr source, target;
    std::vector<std::int64_t> table;  // source index -> target index, -1 undefined
    Dist validity_radius = 0;
    std::vector<Dist> deltas;
    std::vector<Dist> forward_moduli, backward_moduli;
    std::vector<Claim> claims;
    std::optional<TowerAlignment> alignment;
    std::string construction;
};

// {1,2,4,8} in units of `scale`
std::vector<Dist> default_deltas(Dist scale);

// re-measures both moduli at w.deltas (restricted to the validity region)
void remeasure(WitnessMap& w);
// points of the source inside the validity region, and their images
std::vector<std::size_t> witness_region(const WitnessMap& w);
// largest realized radius r <= cap such that the table is defined on the whole r-ball
Dist defined_radius(const FiniteSpace& x, const std::vector<std::int64_t>& table, Dist cap);

WitnessMap identity_witness(const SpacePtr& x);
WitnessMap relabel_witness(const SpacePtr& source, const SpacePtr& target, std::vector<std::int64_t> table,
                           std::string construction);
// target grid has axis k equal to source axis perm[k]
WitnessMap axis_permutation_witness(const SpacePtr& grid, const std::vector<std::size_t>& perm);

WitnessMap factorization_witness(const SpacePtr& x, Dist epsilon, const Limits& lim = {});
WitnessMap tower_alignment_witness(const SpacePtr& u, const SpacePtr& v);
TowerAlignment align_towers(const FiniteSpace& u, const FiniteSpace& v);
WitnessMap absorption_witness(std::int64_t k, std::int64_t radius, const Limits& lim = {});

WitnessMap compose_witness(const WitnessMap& f, const WitnessMap& g);
WitnessMap product_witness(const WitnessMap& f, const WitnessMap& g, const Limits& lim = {});
WitnessMap invert_witness(const WitnessMap& f);

struct ChainOptions {
    std::int64_t radius = 8;  // radius of the free part in the middle of the chain
    std::size_t depth = 6;    // torsion summands on the G1 side
    Limits lim;
};
WitnessMap iso_witness_chain(const GroupDescription& g1, const GroupDescription& g2, const ChainOptions& opt);

struct Violation {
    std::string kind;
    std::string detail;
};

struct VerifyReport {
    bool ok() const { return violations.empty(); }
    std::vector<Violation> violations;
    std::vector<Dist> deltas;
    std::vector<Dist> forward, backward;
    std::vector<std::optional<Dist>> derived;  // alignment bound per delta, when available
    std::size_t region_size = 0;
    bool bijective = false;
};

// deltas beyond the validity radius are dropped
VerifyReport verify_witness(const WitnessMap& w, const std::vector<Dist>& deltas);

struct MultiplicityResult {
    std::optional<std::uint64_t> n;
    std::string violation;
    std::size_t components = 0;
};
MultiplicityResult component_multiplicity(const WitnessMap& w, Dist epsilon);

}  // namespace coarse
