#include "coarse/generators.hpp"

#include <array>

namespace coarse {

GroupDescription random_group(std::mt19937_64& rng) {
    static constexpr std::array<std::uint64_t, 9> kOrders{2, 3, 4, 5, 6, 8, 9, 12, 25};
    auto pick = [&](std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng); };
    GroupDescription g;
    switch (pick(5)) {
        case 0: g.free_rank_part = ExtNat(0); break;
        case 1: case 2: g.free_rank_part = ExtNat(1); break;
        case 3: g.free_rank_part = ExtNat(2); break;
        default: g.free_rank_part = ExtNat::inf(); break;
    }
    std::string text = g.free_rank_part.is_inf() ? "Z^inf" : "Z^" + std::to_string(g.free_rank_part.value());
    std::size_t terms = pick(4);
    for (std::size_t t = 0; t < terms; ++t) {
        std::uint64_t ord = kOrders[pick(kOrders.size())];
        std::uint64_t m = pick(4);
        bool fin = pick(8) == 0;
        if (fin) {
            text += "+F" + std::to_string(ord);
            continue;
        }
        text += "+C" + std::to_string(ord) + "^" + (m == 3 ? std::string("inf") : std::to_string(m + 1));
    }
    if (pick(10) == 0) text += pick(2) ? "+Call^1" : "+Call^inf";
    return parse_group(text);
}

FactorFunction random_factor_function(std::mt19937_64& rng, std::uint64_t max_prime, std::uint64_t max_exp,
                                      bool allow_inf) {
    auto primes = PrimeSieve::standard().primes_upto(max_prime);
    std::map<std::uint64_t, ExtNat> ex;
    std::uniform_int_distribution<std::uint64_t> coin(0, 2), e(1, max_exp), inf(0, 5);
    for (auto p : primes) {
        if (coin(rng) != 0) continue;
        ex[p] = (allow_inf && inf(rng) == 0) ? ExtNat::inf() : ExtNat(e(rng));
    }
    return FactorFunction(std::move(ex), ExtNat(0));
}

}  // namespace coarse
