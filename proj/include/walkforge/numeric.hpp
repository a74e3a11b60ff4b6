#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace walkforge {

using Int = boost::multiprecision::cpp_int;

// Deterministic Miller-Rabin, valid for the full 64-bit range.
bool is_prime_u64(std::uint64_t n);

// Brent's cycle variant of Pollard rho; n <= 2^62 or so in practice.
// Returns the factorization as prime -> exponent.
std::map<std::uint64_t, unsigned> factorize_u64(std::uint64_t n);

// Primes 2, 3, 5, ... ; prime_k(1) == 2.
std::uint64_t prime_k(unsigned k);
std::vector<std::uint64_t> primes_below(std::uint64_t bound);

// floor(n^(1/4)) and the nearest integer to n^(1/4) (exact integer compare).
Int floor_fourth_root(const Int& n);
Int round_fourth_root(const Int& n);

// Kronecker symbol (a|n) for n > 0.
int kronecker(const Int& a, const Int& n);

// Square root of a modulo odd prime p (Tonelli-Shanks); a must be a QR.
std::uint64_t sqrt_mod_prime(std::uint64_t a, std::uint64_t p);

// Index of the lattice spanned by the rows in Z^cols, computed by integer
// row reduction to triangular form. Rows must span a full-rank lattice.
Int lattice_index(std::vector<std::vector<Int>> rows, std::size_t cols);

}  // namespace walkforge
