#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "walkforge/group.hpp"
#include "walkforge/rational.hpp"

namespace walkforge::exp {

using walkforge::GroupSpec;
using walkforge::Int;
using walkforge::Rat;
using walkforge::Rng;

enum class BackendKind { abstract_group, class_group };

struct ExperimentConfig {
    unsigned m = 28;          // bit-size class: n (or |disc|) drawn from (2^{m-1}, 2^m]
    std::size_t r = 16;
    Rat w = 1;
    std::optional<Rat> theta;  // default: n^{-1/4} at the sampled order
    std::uint64_t k = 100;
    std::uint64_t seed = 0;
    BackendKind backend = BackendKind::abstract_group;
    unsigned threads = 1;
    std::uint64_t generator_retry_budget = 1000;
};

struct RunRecord {
    bool ok = false;
    double L = 0;
    double sigma = 0;              // L / E(L_pi) at this run's exact n
    std::uint64_t alpha = 0;
    std::uint64_t walks = 0;
    std::uint64_t abandoned = 0;
    std::uint64_t generator_resamples = 0;
};

struct BatchStats {
    ExperimentConfig config;
    std::uint64_t k = 0;          // successful runs
    std::uint64_t failed = 0;     // runs that exhausted a retry budget
    double mean_L = 0;
    double stdev_L = 0;           // sample standard deviation
    double ci99_7 = 0;            // 3 stdev / sqrt(k)
    double abandoned_fraction = 0;
    double sigma = 0;             // mean over runs of L / E(L_pi)(n_run)
};

// Uniform isomorphism class of abelian groups of order n, rank <= max_rank,
// with n itself uniform in (2^{m-1}, 2^m].
GroupSpec sample_random_group(unsigned m, std::size_t max_rank, Rng& rng);

// All isomorphism classes of abelian groups of the given order with rank
// <= max_rank, as invariant-factor chains (enumeration oracle for tests).
std::vector<std::vector<Int>> abelian_classes_of_order(std::uint64_t n, std::size_t max_rank);

// k independent solves, each on a fresh group + generating set + instance;
// deterministic given the master seed, regardless of the thread count.
BatchStats run_batch(const ExperimentConfig& config);

double sigma_ratio(const BatchStats& stats);  // already aggregated; see RunRecord

std::string export_table(const std::vector<BatchStats>& batches);

}  // namespace walkforge::exp
