#pragma once

#include <cstdint>
#include <vector>

#include "walkforge/hash.hpp"
#include "walkforge/rational.hpp"

namespace walkforge {

// Geometric partition plan: p_{i+1}/p_i = w exactly, sum p_i = 1 exactly.
// Thresholds are cumulative on the 32-bit hash scale, T_r forced to 2^32,
// so partition lookup is a pure threshold scan with proportions exact up to
// rounding at 2^-32.
struct PartitionPlan {
    std::size_t r = 0;
    Rat ratio;
    std::vector<Rat> probabilities;
    std::vector<std::uint64_t> thresholds;  // strictly increasing, last = 2^32
};

PartitionPlan build_partition_plan(std::size_t r, const Rat& w);

// Distinguished-point rule and abandonment bound. theta is kept exact;
// D = round(1/theta) to the nearest integer.
struct WalkParams {
    Rat theta;
    std::uint64_t distinguisher_modulus = 1;  // D
    std::uint64_t max_hops = 0;               // c_max

    static WalkParams from_theta(const Rat& theta);
    // theta = 1/round(n^{1/4}), c_max = 30/theta; the paper's storage choice.
    static WalkParams auto_for_order(const Int& n);
};

inline std::size_t partition_index_from_key(std::uint64_t key64, const PartitionPlan& plan) {
    const std::uint64_t h = node_hash_from_key(key64);
    std::size_t i = 0;
    while (h >= plan.thresholds[i]) ++i;
    return i + 1;  // partitions are 1-based, as in the walk definition
}

inline bool is_distinguished_key(std::uint64_t key64, const WalkParams& params) {
    return distinguisher_from_key(key64) % params.distinguisher_modulus == 0;
}

}  // namespace walkforge
