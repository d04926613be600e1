#include "coarse/prime_arith.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace coarse {

ExtNat operator+(ExtNat a, ExtNat b) {
    if (a.is_inf() || b.is_inf()) return ExtNat::inf();
    std::uint64_t r;
    if (__builtin_add_overflow(a.v_, b.v_, &r) || r == ExtNat::kInf)
        throw std::overflow_error("ExtNat addition overflow");
    return ExtNat(r);
}

ExtNat operator*(ExtNat a, ExtNat b) {
    if (a == ExtNat(0) || b == ExtNat(0)) return ExtNat(0);
    if (a.is_inf() || b.is_inf()) return ExtNat::inf();
    std::uint64_t r;
    if (__builtin_mul_overflow(a.v_, b.v_, &r) || r == ExtNat::kInf)
        throw std::overflow_error("ExtNat multiplication overflow");
    return ExtNat(r);
}

std::string ExtNat::str() const { return is_inf() ? "inf" : std::to_string(v_); }

ExtNat ExtNat::parse(const std::string& s) {
    if (s == "inf") return inf();
    if (s.empty() || s.size() > 19) throw std::invalid_argument("bad natural: '" + s + "'");
    std::uint64_t v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw std::invalid_argument("bad natural: '" + s + "'");
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return ExtNat(v);
}

ExtNat abs_diff(ExtNat a, ExtNat b) {
    if (a.is_inf() && b.is_inf()) return ExtNat(0);
    if (a.is_inf() || b.is_inf()) return ExtNat::inf();
    return ExtNat(a.value() > b.value() ? a.value() - b.value() : b.value() - a.value());
}

PrimeSieve::PrimeSieve(std::uint64_t bound) : bound_(bound), composite_(bound + 1, false) {
    if (bound < 2) throw std::invalid_argument("sieve bound must be >= 2");
    composite_[0] = composite_[1] = true;
    for (std::uint64_t i = 2; i <= bound; ++i) {
        if (composite_[i]) continue;
        primes_.push_back(i);
        for (std::uint64_t j = i * i; j <= bound; j += i) composite_[j] = true;
    }
}

bool PrimeSieve::is_prime(std::uint64_t n) const {
    if (n > bound_) throw FactorError("value " + std::to_string(n) + " exceeds prime bound");
    return !composite_[n];
}

std::vector<std::uint64_t> PrimeSieve::primes_upto(std::uint64_t n) const {
    std::vector<std::uint64_t> out;
    for (auto p : primes_) {
        if (p > n) break;
        out.push_back(p);
    }
    return out;
}

const PrimeSieve& PrimeSieve::standard() {
    static const PrimeSieve s(1000000);
    return s;
}

std::uint64_t valuation(std::uint64_t n, std::uint64_t p) {
    std::uint64_t k = 0;
    while (n % p == 0) { n /= p; ++k; }
    return k;
}

FactorFunction::FactorFunction(std::map<std::uint64_t, ExtNat> explicit_part, ExtNat dflt,
                               const PrimeSieve& sieve)
    : explicit_(std::move(explicit_part)), default_(dflt) {
    for (auto& [p, v] : explicit_)
        if (!sieve.is_prime(p)) throw FactorError(std::to_string(p) + " is not prime");
    normalize();
}

void FactorFunction::normalize() {
    for (auto it = explicit_.begin(); it != explicit_.end();)
        it = it->second == default_ ? explicit_.erase(it) : std::next(it);
}

ExtNat FactorFunction::operator()(std::uint64_t p) const {
    auto it = explicit_.find(p);
    return it == explicit_.end() ? default_ : it->second;
}

bool FactorFunction::all_finite() const {
    if (default_.is_inf()) return false;
    for (auto& [p, v] : explicit_)
        if (v.is_inf()) return false;
    return true;
}

std::uint64_t FactorFunction::supernatural_value() const {
    if (!finite_support() || !all_finite())
        throw FactorError("supernatural number is not a natural number");
    std::uint64_t r = 1;
    for (auto& [p, v] : explicit_)
        for (std::uint64_t i = 0; i < v.value(); ++i)
            if (__builtin_mul_overflow(r, p, &r)) throw std::overflow_error("natural overflow");
    return r;
}

FactorFunction FactorFunction::truncated(std::uint64_t prime_bound, const PrimeSieve& sieve) const {
    FactorFunction out;
    if (default_ != ExtNat(0))
        for (auto p : sieve.primes_upto(prime_bound)) out.explicit_[p] = default_;
    for (auto& [p, v] : explicit_)
        if (p <= prime_bound) out.explicit_[p] = v;
    out.normalize();
    return out;
}

std::string FactorFunction::render() const {
    std::ostringstream os;
    bool first = true;
    if (default_ != ExtNat(0) || explicit_.empty()) {
        os << "default:" << default_.str();
        first = false;
    }
    for (auto& [p, v] : explicit_) {
        if (!first) os << ',';
        os << p << ':' << v.str();
        first = false;
    }
    return os.str();
}

FactorFunction FactorFunction::parse(const std::string& text, const PrimeSieve& sieve) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.size() >= 2 && s.front() == '{' && s.back() == '}') s = s.substr(1, s.size() - 2);
    std::map<std::uint64_t, ExtNat> ex;
    ExtNat dflt(0);
    bool have_default = false;
    if (!s.empty()) {
        std::size_t pos = 0;
        while (pos <= s.size()) {
            auto comma = s.find(',', pos);
            if (comma == std::string::npos) comma = s.size();
            std::string item = s.substr(pos, comma - pos);
            auto colon = item.find(':');
            if (colon == std::string::npos)
                throw FactorError("expected key:value at offset " + std::to_string(pos));
            std::string key = item.substr(0, colon), val = item.substr(colon + 1);
            ExtNat v;
            try {
                v = ExtNat::parse(val);
            } catch (const std::invalid_argument& e) {
                throw FactorError(std::string(e.what()) + " at offset " + std::to_string(pos));
            }
            if (key == "default") {
                if (have_default) throw FactorError("duplicate default clause");
                dflt = v;
                have_default = true;
            } else {
                ExtNat k;
                try {
                    k = ExtNat::parse(key);
                } catch (const std::invalid_argument&) {
                    throw FactorError("bad prime key '" + key + "'");
                }
                if (k.is_inf() || !sieve.is_prime(k.value()))
                    throw FactorError("key '" + key + "' is not a prime");
                if (!ex.emplace(k.value(), v).second) throw FactorError("duplicate prime " + key);
            }
            pos = comma + 1;
        }
    }
    return FactorFunction(std::move(ex), dflt, sieve);
}

namespace {

template <class Op>
FactorFunction pointwise(const FactorFunction& f, const FactorFunction& g, Op op) {
    std::set<std::uint64_t> keys;
    for (auto& kv : f.explicit_part()) keys.insert(kv.first);
    for (auto& kv : g.explicit_part()) keys.insert(kv.first);
    std::map<std::uint64_t, ExtNat> ex;
    for (auto p : keys) ex[p] = op(f(p), g(p), p);
    return FactorFunction(std::move(ex), op(f.default_value(), g.default_value(), 0));
}

template <class Pred>
bool all_points(const FactorFunction& f, const FactorFunction& g, Pred pred) {
    if (!pred(f.default_value(), g.default_value())) return false;
    for (auto& [p, v] : f.explicit_part())
        if (!pred(v, g(p))) return false;
    for (auto& [p, v] : g.explicit_part())
        if (!pred(f(p), v)) return false;
    return true;
}

}  // namespace

FactorFunction phi_of_nat(std::uint64_t n, const PrimeSieve& sieve) {
    if (n == 0) throw FactorError("0 has no prime factorization");
    std::map<std::uint64_t, ExtNat> ex;
    for (auto p : sieve.primes()) {
        if (p * p > n) break;
        std::uint64_t k = 0;
        while (n % p == 0) { n /= p; ++k; }
        if (k) ex[p] = k;
    }
    if (n > 1) {
        if (n > sieve.bound()) throw FactorError("prime factor beyond sieve bound");
        ex[n] = ExtNat(1);
    }
    return FactorFunction(std::move(ex), ExtNat(0), sieve);
}

FactorFunction ff_add(const FactorFunction& f, const FactorFunction& g) {
    return pointwise(f, g, [](ExtNat a, ExtNat b, std::uint64_t) { return a + b; });
}

FactorFunction ff_sub(const FactorFunction& f, const FactorFunction& g) {
    if (!(g.default_value() <= f.default_value()))
        throw FactorError("subtraction precondition violated at every prime outside the support");
    // first offending prime, ascending
    std::set<std::uint64_t> keys;
    for (auto& kv : f.explicit_part()) keys.insert(kv.first);
    for (auto& kv : g.explicit_part()) keys.insert(kv.first);
    for (auto p : keys)
        if (!(g(p) <= f(p)))
            throw FactorError("subtraction precondition violated at prime " + std::to_string(p));
    return pointwise(f, g, [](ExtNat a, ExtNat b, std::uint64_t) {
        if (a.is_inf()) return b.is_inf() ? ExtNat(0) : ExtNat::inf();
        return ExtNat(a.value() - b.value());
    });
}

bool ff_le(const FactorFunction& f, const FactorFunction& g) {
    return all_points(f, g, [](ExtNat a, ExtNat b) { return a <= b; });
}

bool ff_equal(const FactorFunction& f, const FactorFunction& g) { return f == g; }

bool ff_almost_equal(const FactorFunction& f, const FactorFunction& g) {
    if (f.default_value() != g.default_value()) return false;
    // finitely many explicit primes, so the sum is finite unless a term is infinite
    return all_points(f, g, [](ExtNat a, ExtNat b) { return abs_diff(a, b).is_finite(); });
}

FactorFunction ff_min(const FactorFunction& f, const FactorFunction& g) {
    return pointwise(f, g, [](ExtNat a, ExtNat b, std::uint64_t) { return a < b ? a : b; });
}

}  // namespace coarse
