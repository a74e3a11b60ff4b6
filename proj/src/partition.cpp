#include "walkforge/partition.hpp"

#include <stdexcept>

#include "walkforge/numeric.hpp"

namespace walkforge {

namespace {

// round to nearest, ties to even
Int round_rat(const Rat& x) {
    const Int num = numerator(x), den = denominator(x);
    Int q = num / den, rem = num % den;
    if (rem < 0) {
        q -= 1;
        rem += den;
    }
    const Int twice = 2 * rem;
    if (twice > den || (twice == den && q % 2 != 0)) ++q;
    return q;
}

}  // namespace

PartitionPlan build_partition_plan(std::size_t r, const Rat& w) {
    if (r == 0) throw std::invalid_argument("partition count must be >= 1");
    if (w <= 0 || w > 1) throw std::invalid_argument("ratio w must lie in (0, 1]");

    PartitionPlan plan;
    plan.r = r;
    plan.ratio = w;
    plan.probabilities.reserve(r);
    if (w == 1) {
        plan.probabilities.assign(r, Rat(1, static_cast<long>(r)));
    } else {
        // p1 = (1 - w) / (1 - w^r)
        Rat wr = 1;
        for (std::size_t i = 0; i < r; ++i) wr *= w;
        const Rat p1 = (1 - w) / (1 - wr);
        Rat p = p1;
        for (std::size_t i = 0; i < r; ++i) {
            plan.probabilities.push_back(p);
            p *= w;
        }
    }

    Rat total = 0;
    for (const Rat& p : plan.probabilities) total += p;
    if (total != 1) throw std::logic_error("partition probabilities must sum to 1 exactly");

    const Int full = Int(1) << 32;
    Rat cum = 0;
    plan.thresholds.reserve(r);
    for (std::size_t i = 0; i < r; ++i) {
        cum += plan.probabilities[i];
        Int t = (i + 1 == r) ? full : round_rat(cum * full);
        if (!plan.thresholds.empty() && t <= Int(plan.thresholds.back()))
            throw std::invalid_argument("partition too fine for 32-bit hash resolution");
        plan.thresholds.push_back(t.convert_to<std::uint64_t>());
    }
    return plan;
}

WalkParams WalkParams::from_theta(const Rat& theta) {
    if (theta <= 0 || theta > 1) throw std::invalid_argument("theta must lie in (0, 1]");
    WalkParams params;
    params.theta = theta;
    const Rat inv = 1 / theta;
    Int d = numerator(inv) / denominator(inv);
    const Int rem2 = 2 * (numerator(inv) % denominator(inv));
    if (rem2 > denominator(inv) || (rem2 == denominator(inv) && d % 2 != 0)) ++d;
    if (d < 1) d = 1;
    params.distinguisher_modulus = d.convert_to<std::uint64_t>();
    // c_max = ceil(30 / theta)
    const Rat cm = 30 / theta;
    Int c = numerator(cm) / denominator(cm);
    if (numerator(cm) % denominator(cm) != 0) ++c;
    params.max_hops = c.convert_to<std::uint64_t>();
    return params;
}

WalkParams WalkParams::auto_for_order(const Int& n) {
    if (n < 1) throw std::invalid_argument("group order must be positive");
    Int d = round_fourth_root(n);
    if (d < 1) d = 1;
    WalkParams params;
    params.theta = Rat(1, d);
    params.distinguisher_modulus = d.convert_to<std::uint64_t>();
    params.max_hops = (30 * d).convert_to<std::uint64_t>();
    return params;
}

}  // namespace walkforge
