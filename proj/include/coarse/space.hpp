#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coarse/prime_arith.hpp"

namespace coarse {

// Distances are integers over a per-space denominator `scale`
// (scale 1 for every exact space; 10^9 for the sampled planar curve).
using Dist = std::int64_t;

// inner radius of a truncation that already is the whole ambient space
inline constexpr Dist kWholeSpace = Dist{1} << 60;

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational parse(const std::string& s);  // "3", "7/2", "3.25", "pi", "pi+0.1"
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
};

// floor(r * scale) and ceil(r * scale)
Dist to_units_floor(const Rational& r, Dist scale);
Dist to_units_ceil(const Rational& r, Dist scale);
std::string units_str(Dist d, Dist scale);

struct Limits {
    std::uint64_t point_budget = 1000000;
    std::uint64_t prime_bound = 97;
};

class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One coordinate of a product grid. Free axes are copies of Z (values lo..hi,
// distance |a-b|*unit); discrete axes are cyclic groups Z_order with the
// two-valued metric (distance `unit` between different values).
struct Axis {
    enum class Kind { free, discrete };
    Kind kind = Kind::free;
    std::int64_t lo = 0, hi = 0;
    std::int64_t unit = 1;
    std::int64_t order = 0;  // 0 for Z

    static Axis free_axis(std::int64_t radius, std::int64_t unit = 1) {
        return {Kind::free, -radius, radius, unit, 0};
    }
    static Axis cyclic(std::int64_t order, std::int64_t level) {
        return {Kind::discrete, 0, order - 1, level, order};
    }
    std::int64_t size() const { return hi - lo + 1; }
    friend bool operator==(const Axis&, const Axis&) = default;
};

struct MstEdge {
    std::uint32_t u, v;
    Dist w;
};

class FiniteSpace;
using SpacePtr = std::shared_ptr<const FiniteSpace>;

class FiniteSpace {
public:
    enum class Kind { grid, euclid, dense, product, subspace };

    static SpacePtr grid(std::vector<Axis> axes, std::vector<std::int64_t> base, Dist inner_radius,
                         std::string id, const Limits& lim = {});
    static SpacePtr dense(std::size_t n, std::vector<Dist> table, std::vector<std::string> labels,
                          std::size_t basepoint, Dist inner_radius, Dist scale, bool ultrametric,
                          std::string id);
    static SpacePtr euclid(std::vector<double> xs, std::vector<double> ys, std::size_t basepoint,
                           Dist inner_radius, Dist scale, std::string id, const Limits& lim = {});
    static SpacePtr product(const SpacePtr& a, const SpacePtr& b, const Limits& lim = {});
    static SpacePtr subspace(const SpacePtr& parent, std::vector<std::size_t> indices,
                             std::size_t basepoint, Dist inner_radius, std::string id);

    Kind kind() const { return kind_; }
    const std::string& id() const { return id_; }

    // throws BudgetError when the point set is only implicit
    std::size_t size() const;
    bool enumerable() const { return enumerable_; }
    void require_enumerable() const;
    // exact count even for implicit grids: valuation-friendly per-axis sizes
    long double approx_size() const { return approx_size_; }

    std::size_t basepoint() const { return basepoint_; }
    Dist inner_radius() const { return inner_radius_; }
    Dist scale() const { return scale_; }
    bool ultrametric() const { return ultrametric_; }

    Dist dist(std::size_t i, std::size_t j) const;
    // out must hold size() entries
    void row(std::size_t i, Dist* out) const;
    std::vector<Dist> row(std::size_t i) const;
    std::string label(std::size_t i) const;

    // grid accessors
    const std::vector<Axis>& axes() const { return axes_; }
    std::vector<std::int64_t> coords(std::size_t i) const;
    std::optional<std::size_t> index_of(const std::vector<std::int64_t>& c) const;
    const std::vector<std::int64_t>& base_coords() const { return base_; }
    // group translation x -> x + g on a grid; nullopt when it leaves the truncation
    std::optional<std::size_t> translate(std::size_t i, const std::vector<std::int64_t>& g) const;

    // product accessors (also valid for grids split at an axis boundary)
    const SpacePtr& factor_a() const { return a_; }
    const SpacePtr& factor_b() const { return b_; }

    // subspace accessors
    const SpacePtr& parent() const { return a_; }
    const std::vector<std::size_t>& parent_indices() const { return sub_; }

    // euclid accessors
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }

    // dense accessors
    const std::vector<Dist>& table() const { return table_; }

    // factorizing function of the generating description, when known
    const std::optional<FactorFunction>& phi_symbolic() const { return phi_; }
    std::shared_ptr<FiniteSpace> with_phi(std::optional<FactorFunction> phi) const;
    std::shared_ptr<FiniteSpace> with_id(std::string id) const;

    // minimum spanning tree (sorted ascending by weight, ties by (u,v)); cached
    const std::vector<MstEdge>& mst() const;

    // structural equality (same points, same distances, same basepoint)
    bool same_as(const FiniteSpace& o) const;

private:
    FiniteSpace() = default;
    void finish_grid(const Limits& lim);

    Kind kind_ = Kind::dense;
    std::string id_;
    std::size_t n_ = 0;
    bool enumerable_ = true;
    long double approx_size_ = 0;
    std::size_t basepoint_ = 0;
    Dist inner_radius_ = 0;
    Dist scale_ = 1;
    bool ultrametric_ = false;
    std::optional<FactorFunction> phi_;

    // grid
    std::vector<Axis> axes_;
    std::vector<std::int64_t> base_;
    std::vector<std::size_t> strides_;
    std::vector<std::vector<std::int64_t>> soa_;  // per-axis coordinate columns

    // euclid
    std::vector<double> xs_, ys_;

    // dense
    std::vector<Dist> table_;
    std::vector<std::string> labels_;

    // product (a_, b_) / subspace (a_ = parent)
    SpacePtr a_, b_;
    std::vector<std::size_t> sub_;

    mutable std::once_flag mst_once_;
    mutable std::vector<MstEdge> mst_;
};

// common fixtures
SpacePtr zr_ball(int r, std::int64_t radius, const Limits& lim = {});
SpacePtr point_space(std::int64_t k, std::int64_t level = 1);  // k points, pairwise `level`
SpacePtr line_points(const std::vector<std::int64_t>& xs);     // subset of Z, basepoint xs[0]

}  // namespace coarse
