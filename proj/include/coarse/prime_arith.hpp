#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace coarse {

// natural number or infinity
class ExtNat {
public:
    static constexpr std::uint64_t kInf = ~std::uint64_t{0};

    constexpr ExtNat() = default;
    constexpr ExtNat(std::uint64_t v) : v_(v) {}  // NOLINT implicit on purpose
    static constexpr ExtNat inf() { return ExtNat(kInf); }

    constexpr bool is_inf() const { return v_ == kInf; }
    constexpr bool is_finite() const { return v_ != kInf; }
    // caller must check is_finite
    constexpr std::uint64_t value() const { return v_; }

    friend constexpr bool operator==(ExtNat a, ExtNat b) = default;
    friend constexpr auto operator<=>(ExtNat a, ExtNat b) { return a.v_ <=> b.v_; }

    // inf absorbs; throws on finite overflow
    friend ExtNat operator+(ExtNat a, ExtNat b);
    friend ExtNat operator*(ExtNat a, ExtNat b);  // 0 * inf = 0

    std::string str() const;
    static ExtNat parse(const std::string& s);

private:
    std::uint64_t v_ = 0;
};

// |a-b| with inf-inf = 0 and |inf-n| = inf
ExtNat abs_diff(ExtNat a, ExtNat b);

class PrimeSieve {
public:
    explicit PrimeSieve(std::uint64_t bound = 1000000);
    std::uint64_t bound() const { return bound_; }
    bool is_prime(std::uint64_t n) const;  // throws above bound
    const std::vector<std::uint64_t>& primes() const { return primes_; }
    std::vector<std::uint64_t> primes_upto(std::uint64_t n) const;

    static const PrimeSieve& standard();

private:
    std::uint64_t bound_;
    std::vector<bool> composite_;
    std::vector<std::uint64_t> primes_;
};

class FactorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// prime -> ExtNat with finite explicit support over a uniform default.
// Normalized: no explicit entry equals the default.
class FactorFunction {
public:
    FactorFunction() = default;
    explicit FactorFunction(ExtNat dflt) : default_(dflt) {}
    FactorFunction(std::map<std::uint64_t, ExtNat> explicit_part, ExtNat dflt,
                   const PrimeSieve& sieve = PrimeSieve::standard());

    ExtNat operator()(std::uint64_t p) const;
    ExtNat default_value() const { return default_; }
    const std::map<std::uint64_t, ExtNat>& explicit_part() const { return explicit_; }

    bool is_zero() const { return explicit_.empty() && default_ == ExtNat(0); }
    bool finite_support() const { return default_ == ExtNat(0); }
    bool all_finite() const;

    // prod p^phi(p); throws unless finite support, finite values, no overflow
    std::uint64_t supernatural_value() const;

    // restrict to primes <= bound (default forced to zero beyond, explicit below)
    FactorFunction truncated(std::uint64_t prime_bound,
                             const PrimeSieve& sieve = PrimeSieve::standard()) const;

    std::string render() const;
    static FactorFunction parse(const std::string& text,
                                const PrimeSieve& sieve = PrimeSieve::standard());

    friend bool operator==(const FactorFunction&, const FactorFunction&) = default;

private:
    void normalize();

    std::map<std::uint64_t, ExtNat> explicit_;
    ExtNat default_{0};
};

FactorFunction phi_of_nat(std::uint64_t n, const PrimeSieve& sieve = PrimeSieve::standard());
FactorFunction ff_add(const FactorFunction& f, const FactorFunction& g);
FactorFunction ff_sub(const FactorFunction& f, const FactorFunction& g);
bool ff_le(const FactorFunction& f, const FactorFunction& g);
bool ff_equal(const FactorFunction& f, const FactorFunction& g);
bool ff_almost_equal(const FactorFunction& f, const FactorFunction& g);
FactorFunction ff_min(const FactorFunction& f, const FactorFunction& g);

// p-adic valuation of n >= 1
std::uint64_t valuation(std::uint64_t n, std::uint64_t p);

}  // namespace coarse
