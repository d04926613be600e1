#pragma once

#include <cstdint>
#include <random>

#include "coarse/group_model.hpp"
#include "coarse/prime_arith.hpp"

namespace coarse {

// Random descriptions over a small pool of orders, ranks {0,1,2,inf},
// multiplicities {1,2,3,inf}; tails and F-summands show up occasionally.
GroupDescription random_group(std::mt19937_64& rng);

// support in primes <= max_prime, exponents in [1, max_exp], optional infinite entries
FactorFunction random_factor_function(std::mt19937_64& rng, std::uint64_t max_prime, std::uint64_t max_exp,
                                      bool allow_inf = false);

}  // namespace coarse
