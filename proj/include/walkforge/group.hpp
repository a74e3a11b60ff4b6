#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "walkforge/rng.hpp"

namespace walkforge {

// Explicit finite abelian group Z_{n1} + ... + Z_{ns} with n_{i+1} | n_i,
// n_i >= 2. Elements are exponent vectors reduced into [0, n_i).
// Immutable once built; every operation below is pure.
struct GroupSpec {
    std::vector<Int> factors;        // invariant factors, divisibility chain
    Int order;                       // product of factors
    std::vector<unsigned> widths;    // canonical encoding width per coordinate

    std::size_t rank() const { return factors.size(); }
    unsigned log2_ceil() const;      // m = ceil(log2 n)
    std::size_t encoded_size() const;
};

struct GroupElement {
    std::vector<Int> coords;

    bool operator==(const GroupElement&) const = default;
};

struct SupportingSet {
    std::vector<GroupElement> generators;

    std::size_t size() const { return generators.size(); }
};

GroupSpec make_group(std::vector<Int> invariant_factors);

GroupElement identity(const GroupSpec& spec);
GroupElement op(const GroupElement& a, const GroupElement& b, const GroupSpec& spec);
GroupElement inverse(const GroupElement& a, const GroupSpec& spec);
GroupElement pow(const GroupElement& a, const Int& e, const GroupSpec& spec);
GroupElement random_element(const GroupSpec& spec, Rng& rng);

bool is_member(const GroupElement& a, const GroupSpec& spec);

// True iff the generators span all of G. The subgroup they generate
// corresponds to the integer lattice spanned by the generator vectors
// together with n_i e_i; the subgroup has index [Z^s : L] in G, so the set
// generates exactly when that lattice index is 1.
bool generates(const GroupSpec& spec, const SupportingSet& gens);

// Fixed-width little-endian concatenation of the coordinates; injective on
// the group and the canonical input of the node hash.
std::vector<std::uint8_t> encode(const GroupElement& a, const GroupSpec& spec);

std::string to_string(const GroupElement& a);

}  // namespace walkforge
