#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "walkforge/rng.hpp"
#include "walkforge/walk.hpp"

namespace walkforge {

enum class SubmitKind { no_collision, collision, good_collision };

// Distinguished-node database (Algorithm 1's D). One entry per node key;
// a repeat on the same side is dropped and counted, a repeat from the other
// side is the good collision the whole search exists for.
template <typename Element>
class TripleStore {
public:
    struct Submit {
        SubmitKind kind = SubmitKind::no_collision;
        const Element* stored_accumulator = nullptr;  // set on good_collision
    };

    Submit submit(const std::string& key, const Element& accumulator, int side) {
        auto it = map_.find(key);
        if (it == map_.end()) {
            map_.emplace(key, Entry{accumulator, side});
            ++stored_;
            return {};
        }
        ++collisions_;
        if (it->second.side == side) return {SubmitKind::collision, nullptr};
        ++good_collisions_;
        return {SubmitKind::good_collision, &it->second.accumulator};
    }

    std::uint64_t stored() const { return stored_; }
    std::uint64_t collisions() const { return collisions_; }  // includes good ones
    std::uint64_t good_collisions() const { return good_collisions_; }
    std::size_t count_for_key(const std::string& key) const { return map_.count(key); }

private:
    struct Entry {
        Element accumulator;
        int side;
    };
    std::map<std::string, Entry> map_;
    std::uint64_t stored_ = 0;
    std::uint64_t collisions_ = 0;
    std::uint64_t good_collisions_ = 0;
};

// g = a * b^{-1} when a walked from x_s = x_0, else a^{-1} * b; in both
// cases g * x0 = x1 whenever a * x_s = b * x_{1-s}.
template <typename Backend>
typename Backend::Element assemble_solution(const Backend& backend,
                                            const typename Backend::Element& a,
                                            const typename Backend::Element& b, int side) {
    if (side == 0) return backend.add(a, backend.negate(b));
    return backend.add(b, backend.negate(a));
}

// Randomized walk start: uniform h (exponent vectors on the known structure
// generators) acting on x_s.
template <typename Backend>
std::pair<typename Backend::Element, typename Backend::Element> randomized_start(
    const typename Backend::Element& x_s, const Backend& backend, Rng& rng) {
    auto h = backend.random_element(rng);
    auto start = backend.add(h, x_s);
    return {std::move(start), std::move(h)};
}

struct SolveStats {
    std::uint64_t alpha = 0;  // visited nodes with repetition (starts included)
    std::uint64_t walks = 0;
    std::uint64_t stored_triples = 0;
    std::uint64_t collisions = 0;
    std::uint64_t good_collisions = 0;
    std::uint64_t abandoned = 0;
    std::uint64_t verify_failures = 0;
    double wall_seconds = 0.0;
    double normalized_work = 0.0;  // L = alpha / sqrt(n)
};

template <typename Element>
struct SolveResult {
    bool found = false;
    Element solution;
    SolveStats stats;
};

// Algorithm A server loop, single process. t = 1 is the serial schedule
// (alternate one x0-walk and one x1-walk, stop at the first good collision);
// t > 1 runs 2t logical walkers in deterministic generations: every walker
// finishes one walk, submissions are processed in fixed walker order. Either
// way the outcome depends only on (seed, t), never on thread timing.
//
// max_walks = 0 means unbounded; otherwise the search gives up (found =
// false) after that many walks.
template <typename Backend>
SolveResult<typename Backend::Element> solve(const Backend& backend,
                                             const typename Backend::Element& x0,
                                             const typename Backend::Element& x1,
                                             std::size_t t, const PartitionPlan& plan,
                                             const WalkParams& params, std::uint64_t seed,
                                             std::uint64_t max_walks = 0) {
    using Element = typename Backend::Element;
    if (t == 0) throw std::invalid_argument("need at least one walker per side");
    if (plan.r != 0 && plan.r != backend.generator_count())
        throw std::invalid_argument("partition count must match the supporting set size");

    const auto t_start = std::chrono::steady_clock::now();
    SolveResult<Element> result;
    TripleStore<Element> store;
    std::uint64_t walk_counter = 0;

    struct Pending {
        WalkOutcome<Element> outcome;
        int side;
    };

    const auto run_one = [&](int side) {
        Rng rng(derive_seed(seed, walk_counter));
        ++walk_counter;
        const Element& anchor = side == 0 ? x0 : x1;
        auto [start, h] = randomized_start(anchor, backend, rng);
        Pending p{walk(backend, std::move(start), std::move(h), plan, params), side};
        result.stats.alpha += p.outcome.hops + 1;  // the start node counts too
        ++result.stats.walks;
        return p;
    };

    const auto process = [&](Pending& p) -> bool {
        if (p.outcome.abandoned) {
            ++result.stats.abandoned;
            return false;
        }
        const auto sub = store.submit(backend.store_key(p.outcome.node), p.outcome.accumulator, p.side);
        if (sub.kind != SubmitKind::good_collision) return false;
        Element g = p.side == 0
                        ? assemble_solution(backend, p.outcome.accumulator, *sub.stored_accumulator, 0)
                        : assemble_solution(backend, *sub.stored_accumulator, p.outcome.accumulator, 1);
        if (!backend.equal(backend.add(g, x0), x1)) {
            // never return an unverified answer; keep searching
            ++result.stats.verify_failures;
            return false;
        }
        result.found = true;
        result.solution = std::move(g);
        return true;
    };

    const std::size_t per_generation = t == 1 ? 1 : 2 * t;
    while (!result.found) {
        if (max_walks != 0 && walk_counter >= max_walks) break;
        std::vector<Pending> generation;
        generation.reserve(per_generation);
        for (std::size_t i = 0; i < per_generation; ++i)
            generation.push_back(run_one(static_cast<int>(walk_counter % 2)));
        for (auto& p : generation)
            if (process(p)) break;
    }

    result.stats.stored_triples = store.stored();
    result.stats.collisions = store.collisions();
    result.stats.good_collisions = store.good_collisions();
    result.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

}  // namespace walkforge
