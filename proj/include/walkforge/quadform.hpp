#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "walkforge/rng.hpp"

namespace walkforge {

// Primitive positive-definite binary quadratic form (a, b, c) of negative
// discriminant b^2 - 4ac. Reduced forms are the canonical class
// representatives: |b| <= a <= c, and b >= 0 when |b| = a or a = c.
//
// Coefficients are kept in 64-bit integers; composition goes through 128-bit
// intermediates, which is exact for |disc| <= 2^44 (the enumeration-scale
// regime this library targets).
struct QuadForm {
    std::int64_t a = 1;
    std::int64_t b = 0;
    std::int64_t c = 0;

    bool operator==(const QuadForm&) const = default;
    auto operator<=>(const QuadForm&) const = default;
};

inline constexpr std::int64_t kMaxAbsDiscriminant = std::int64_t{1} << 44;

std::int64_t discriminant(const QuadForm& f);
bool is_reduced(const QuadForm& f);
std::string to_string(const QuadForm& f);

// 24-byte canonical hashing encoding: a, b + 2^63, c as little-endian u64.
std::vector<std::uint8_t> encode(const QuadForm& f);

QuadForm principal_form(std::int64_t disc);
QuadForm reduce(QuadForm f);
QuadForm compose(const QuadForm& f, const QuadForm& g);
QuadForm invert(const QuadForm& f);
QuadForm form_pow(const QuadForm& f, Int e, std::int64_t disc);

enum class PrimeKind { split, nonsplit, ramified };

struct PrimeFormResult {
    PrimeKind kind = PrimeKind::nonsplit;
    QuadForm raw;      // (ell, b, (b^2 - disc)/(4 ell)) before reduction
    QuadForm reduced;
};

// Prime form above ell, when (disc | ell) = 1. The square root b is the
// smallest positive one with b = disc mod 2; the choice pins which of the
// two conjugate prime ideals every walk acts by.
PrimeFormResult prime_form(std::uint64_t ell, std::int64_t disc);

// All reduced primitive forms of the discriminant, sorted. O(|disc|) time;
// this is the enumeration the brute-force class number and structure use.
std::vector<QuadForm> reduced_forms(std::int64_t disc);
std::uint64_t class_number_bruteforce(std::int64_t disc);

struct ClassGroupStructure {
    std::vector<Int> invariant_factors;        // descending chain; {1} if trivial
    std::vector<QuadForm> sampling_generators; // verified generating set
    std::vector<std::uint64_t> sampling_orders;
};

class ClassGroupCtx {
public:
    explicit ClassGroupCtx(std::int64_t disc);

    std::int64_t disc() const { return disc_; }
    QuadForm one() const { return principal_form(disc_); }

    std::uint64_t class_number() const;
    const ClassGroupStructure& structure() const;

    // Uniform ideal class via random exponents on the structure generators.
    QuadForm random_class(Rng& rng) const;

private:
    std::int64_t disc_;
    mutable std::once_flag h_once_, structure_once_;
    mutable std::uint64_t h_ = 0;
    mutable ClassGroupStructure structure_;
};

// The r smallest split primes with their prime forms, ascending. Ramified
// primes are skipped unless include_ramified is set (their classes have
// order two). Throws if the search passes `search_bound` first.
std::vector<std::pair<std::uint64_t, QuadForm>> split_primes(
    const ClassGroupCtx& ctx, std::size_t count, std::uint64_t search_bound = 100000,
    bool include_ramified = false);

ClassGroupStructure compute_structure(std::int64_t disc);

// Order of the subgroup the given classes generate (breadth-first closure).
std::size_t subgroup_order(const std::vector<QuadForm>& gens, std::int64_t disc);

// Invariant factors only (spec name); {1} for the trivial group.
std::vector<Int> structure_bruteforce(const ClassGroupCtx& ctx);

}  // namespace walkforge
