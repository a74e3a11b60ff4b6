#pragma once

#include <cstdint>

#include "walkforge/partition.hpp"

namespace walkforge {

// One client walk (Algorithm 2 shape): from the current node, apply the
// generator its hash selects until the node is distinguished. A walk that
// exceeds max_hops is abandoned; abandonment is a value, not an error, and
// the hops it spent still happened.
template <typename Element>
struct WalkOutcome {
    bool abandoned = false;
    Element node;        // distinguished node z (meaningful when !abandoned)
    Element accumulator; // a with a * x_s = z
    std::uint64_t hops = 0;
};

template <typename Backend>
WalkOutcome<typename Backend::Element> walk(const Backend& backend,
                                            typename Backend::Element start,
                                            typename Backend::Element accumulator,
                                            const PartitionPlan& plan,
                                            const WalkParams& params) {
    WalkOutcome<typename Backend::Element> out;
    out.node = std::move(start);
    out.accumulator = std::move(accumulator);

    std::uint64_t key = backend.key64(out.node);
    std::uint64_t c = 0;
    while (!is_distinguished_key(key, params)) {
        const std::size_t i = partition_index_from_key(key, plan) - 1;
        backend.step(out.node, i);
        backend.accumulate(out.accumulator, i);
        ++c;
        if (c > params.max_hops) {
            out.abandoned = true;
            out.hops = c;
            return out;
        }
        key = backend.key64(out.node);
    }
    out.hops = c;
    return out;
}

}  // namespace walkforge
