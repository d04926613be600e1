#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coarse/group_model.hpp"
#include "coarse/space.hpp"

namespace coarse {

// ---- group truncations ----------------------------------------------------------

struct Generator {
    bool free = false;
    std::int64_t order = 0;  // 0 for a free generator
    std::int64_t level = 1;
    friend bool operator==(const Generator&, const Generator&) = default;
};
using Schedule = std::vector<Generator>;

// Cyclic summand orders of G in enumeration order: round k lists every summand
// (ascending order) whose multiplicity is >= k, then every prime <= prime_bound
// when the tail is >= k. Stops after `max_count` orders or when rounds run dry.
std::vector<std::int64_t> torsion_enumeration(const GroupDescription& g, std::size_t max_count,
                                              std::uint64_t prime_bound);

// free generators at level 1, cyclic summand k (1-based) at level 1 + k*stride,
// listing every summand whose level does not exceed `radius`
Schedule interleaved_schedule(const GroupDescription& g, std::int64_t radius, std::int64_t stride = 4,
                              const Limits& lim = {});
// free generators at level 1, cyclic summand k at level k + 1, first `depth` summands
Schedule canonical_schedule(const GroupDescription& g, std::size_t depth, const Limits& lim = {});

SpacePtr build_truncation(const GroupDescription& g, const Schedule& schedule, std::int64_t radius,
                          const Limits& lim = {});

// Z_phi summands: round k lists the primes p <= prime_bound (ascending) with phi(p) >= k
std::vector<std::int64_t> zphi_summands(const FactorFunction& phi, std::size_t count,
                                        std::uint64_t prime_bound);
SpacePtr canonical_ultrametric(const FactorFunction& phi, std::size_t depth, const Limits& lim = {});
// cyclic axes of the given orders at levels 2, 3, ... (ultrametric grid);
// `whole` when the orders exhaust the ambient space
SpacePtr level_tower(const std::vector<std::int64_t>& orders, bool whole, const std::string& id,
                     const Limits& lim = {});
// the torsion part of G as a level tower over its first `depth` summands
SpacePtr torsion_ultrametric(const GroupDescription& g, std::size_t depth, const Limits& lim = {});
SpacePtr product_space(const SpacePtr& x, const SpacePtr& y, const Limits& lim = {});
SpacePtr cantor_cube_truncation(int depth, const Limits& lim = {});
SpacePtr example31_fixture(int branches, double grid_step, double clamp, const Limits& lim = {});

// ---- metric checks ----------------------------------------------------------------

struct AxiomReport {
    bool ok = true;
    std::string violation;
};
// exhaustive when size <= exhaustive_max, otherwise `samples` random triples
AxiomReport check_metric_axioms(const FiniteSpace& x, std::size_t exhaustive_max = 512,
                                std::size_t samples = 20000, std::uint64_t seed = 1);

// ---- components and quotients -------------------------------------------------------

struct ComponentPartition {
    Dist epsilon = 0;
    std::vector<std::vector<std::size_t>> blocks;  // ordered by representative
    std::vector<std::size_t> representatives;      // smallest index in each block
    std::vector<std::size_t> block_of;
};

ComponentPartition epsilon_components(const FiniteSpace& x, Dist epsilon);
SpacePtr quotient_space(const FiniteSpace& x, Dist epsilon);

struct StepEstimate {
    std::vector<Dist> candidates;    // {0} and the realized merge heights
    std::vector<signed char> status;  // 1 stable, 0 unstable, -1 not evaluated
    Dist estimate = 0;
    Dist confidence_radius = 0;
    bool inconclusive = false;
    Dist scale = 1;
};

StepEstimate estimate_factorizing_step(const FiniteSpace& x);
// stability test for one candidate scale (exposed for tests and reporting)
bool step_candidate_stable(const FiniteSpace& x, Dist epsilon);

FactorFunction empirical_phi(const FiniteSpace& x, std::uint64_t prime_bound);

// ---- maps ---------------------------------------------------------------------------

struct MapTable {
    SpacePtr source, target;
    std::vector<std::int64_t> image;  // -1 where undefined
    Dist validity_radius = 0;
};

// source points inside the validity region (defined, within radius of the basepoint)
std::vector<std::size_t> validity_region(const MapTable& f);
// omega_f(delta) for each delta, exhaustive over pairs in the validity region; -1 if empty
std::vector<Dist> oscillation_multi(const MapTable& f, const std::vector<Dist>& deltas);
Dist oscillation(const MapTable& f, Dist delta);

// ---- amenability and dimension ----------------------------------------------------------

struct FoelnerResult {
    bool found = false;
    Dist ball_radius = 0;
    std::vector<std::size_t> set;
    std::uint64_t set_size = 0;
    std::uint64_t neighborhood_size = 0;
};

FoelnerResult foelner_search(const FiniteSpace& x, const Rational& c, Dist epsilon);
// |O_eps(F)| by marking rows of the members of F
std::uint64_t neighborhood_size(const FiniteSpace& x, const std::vector<std::size_t>& f, Dist epsilon);

struct Cover {
    SpacePtr space;
    std::vector<std::vector<std::size_t>> blocks;
    Dist mesh = 0;
    int multiplicity_bound = 0;
    int measured_multiplicity = 0;
};

Cover asdim_cover(int r, const Rational& epsilon, std::int64_t radius, const Limits& lim = {});
// Exhaustive search for a partition of the box [0,side)^r into blocks of
// sup-diameter <= mesh such that every closed eps-ball meets at most `mult`
// blocks. r in {1, 2}.
bool bounded_partition_exists(int r, int eps, int side, int mesh, int mult);

}  // namespace coarse
