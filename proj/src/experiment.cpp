#include "walkforge/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "walkforge/backend.hpp"
#include "walkforge/numeric.hpp"
#include "walkforge/quadform.hpp"
#include "walkforge/solver.hpp"
#include "walkforge/theory.hpp"

namespace walkforge::exp {

namespace {

void partitions_upto(unsigned e, unsigned max_part, std::size_t max_parts,
                     std::vector<unsigned>& current, std::vector<std::vector<unsigned>>& out) {
    if (e == 0) {
        out.push_back(current);
        return;
    }
    if (current.size() == max_parts) return;
    for (unsigned part = std::min(e, max_part); part >= 1; --part) {
        current.push_back(part);
        partitions_upto(e - part, part, max_parts, current, out);
        current.pop_back();
    }
}

std::vector<std::vector<unsigned>> partitions(unsigned e, std::size_t max_parts) {
    std::vector<std::vector<unsigned>> out;
    std::vector<unsigned> current;
    partitions_upto(e, e, max_parts, current, out);
    return out;
}

std::vector<Int> assemble_invariant_factors(const std::vector<std::uint64_t>& primes,
                                            const std::vector<std::vector<unsigned>>& parts) {
    std::size_t width = 0;
    for (const auto& p : parts) width = std::max(width, p.size());
    std::vector<Int> factors(width, Int(1));
    for (std::size_t pi = 0; pi < primes.size(); ++pi)
        for (std::size_t i = 0; i < parts[pi].size(); ++i) {
            Int pk = 1;
            for (unsigned j = 0; j < parts[pi][i]; ++j) pk *= primes[pi];
            factors[i] *= pk;
        }
    return factors;
}

struct AbstractInstance {
    GroupSpec spec;
    SupportingSet gens;
    std::uint64_t resamples = 0;
};

AbstractInstance make_abstract_instance(unsigned m, std::size_t r, Rng& rng,
                                        std::uint64_t retry_budget) {
    AbstractInstance inst;
    inst.spec = sample_random_group(m, r, rng);
    for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt >= retry_budget) throw std::runtime_error("generator retry budget exhausted");
        SupportingSet gens;
        for (std::size_t i = 0; i < r; ++i) gens.generators.push_back(random_element(inst.spec, rng));
        if (generates(inst.spec, gens)) {
            inst.gens = std::move(gens);
            inst.resamples = attempt;
            return inst;
        }
    }
}

RunRecord one_abstract_run(const ExperimentConfig& config, std::uint64_t run_seed) {
    RunRecord rec;
    Rng rng(run_seed);
    AbstractInstance inst;
    try {
        inst = make_abstract_instance(config.m, config.r, rng, config.generator_retry_budget);
    } catch (const std::runtime_error&) {
        return rec;  // failed run, excluded
    }
    rec.generator_resamples = inst.resamples;

    const GroupElement x0g = random_element(inst.spec, rng);
    const GroupElement g_true = random_element(inst.spec, rng);
    const GroupElement x1g = op(g_true, x0g, inst.spec);

    const WalkParams params = config.theta ? WalkParams::from_theta(*config.theta)
                                           : WalkParams::auto_for_order(inst.spec.order);
    const PartitionPlan plan = build_partition_plan(config.r, config.w);

    const AbstractWalkBackend<std::uint64_t> backend(inst.spec, inst.gens);
    const auto res = solve(backend, backend.from_group(x0g), backend.from_group(x1g), 1, plan,
                           params, rng());
    if (!res.found) return rec;

    const double sqrt_n = std::sqrt(to_double(Rat(inst.spec.order)));
    rec.ok = true;
    rec.alpha = res.stats.alpha;
    rec.walks = res.stats.walks;
    rec.abandoned = res.stats.abandoned;
    rec.L = static_cast<double>(res.stats.alpha) / sqrt_n;
    theory::TheoryInput tin{inst.spec.order, params.theta, plan.probabilities};
    rec.sigma = rec.L / theory::expected_L_pi(tin);
    return rec;
}

RunRecord one_classgroup_run(const ExperimentConfig& config, std::uint64_t run_seed) {
    RunRecord rec;
    Rng rng(run_seed);
    // sample a fundamental discriminant with |disc| in (2^{m-1}, 2^m]
    for (std::uint64_t attempt = 0; attempt < config.generator_retry_budget; ++attempt) {
        const std::uint64_t half = std::uint64_t{1} << (config.m - 1);
        const std::int64_t cand = -static_cast<std::int64_t>(half + 1 + uniform_below_u64(rng, half));
        const std::int64_t m4 = ((cand % 4) + 4) % 4;
        if (m4 != 0 && m4 != 1) continue;
        bool fundamental;
        if (m4 == 1) {
            const auto f = factorize_u64(static_cast<std::uint64_t>(-cand));
            fundamental = std::all_of(f.begin(), f.end(), [](auto kv) { return kv.second == 1; });
        } else {
            const std::int64_t q = cand / 4;
            const std::int64_t qm4 = ((q % 4) + 4) % 4;
            if (qm4 != 2 && qm4 != 3) continue;
            const auto f = factorize_u64(static_cast<std::uint64_t>(-q));
            fundamental = std::all_of(f.begin(), f.end(), [](auto kv) { return kv.second == 1; });
        }
        if (!fundamental) continue;

        ClassGroupCtx ctx(cand);
        std::vector<std::pair<std::uint64_t, QuadForm>> prime_set;
        try {
            prime_set = split_primes(ctx, config.r);
        } catch (const std::runtime_error&) {
            continue;
        }
        std::vector<QuadForm> gens;
        for (const auto& [ell, f] : prime_set) gens.push_back(f);
        const std::uint64_t h = ctx.class_number();
        if (h < 2) continue;

        // the supporting set must generate Cl; otherwise resample the instance
        if (subgroup_order(gens, cand) != h) continue;
        const ClassWalkBackend backend(ctx, gens);
        const QuadForm x0 = ctx.random_class(rng);
        const QuadForm g_true = ctx.random_class(rng);
        const QuadForm x1 = compose(g_true, x0);

        const WalkParams params = config.theta ? WalkParams::from_theta(*config.theta)
                                               : WalkParams::auto_for_order(Int(h));
        const PartitionPlan plan = build_partition_plan(config.r, config.w);
        const auto res = solve(backend, x0, x1, 1, plan, params, rng(),
                               /*max_walks=*/0);
        if (!res.found) continue;
        rec.ok = true;
        rec.generator_resamples = attempt;
        rec.alpha = res.stats.alpha;
        rec.walks = res.stats.walks;
        rec.abandoned = res.stats.abandoned;
        rec.L = static_cast<double>(res.stats.alpha) / std::sqrt(static_cast<double>(h));
        theory::TheoryInput tin{Int(h), params.theta, plan.probabilities};
        rec.sigma = rec.L / theory::expected_L_pi(tin);
        return rec;
    }
    return rec;
}

}  // namespace

GroupSpec sample_random_group(unsigned m, std::size_t max_rank, Rng& rng) {
    if (m < 4 || m > 62) throw std::invalid_argument("bit-size class m out of range");
    const std::uint64_t half = std::uint64_t{1} << (m - 1);
    const std::uint64_t n = half + 1 + uniform_below_u64(rng, half);

    const auto factors = factorize_u64(n);
    std::vector<std::uint64_t> primes;
    std::vector<std::vector<std::vector<unsigned>>> per_prime;
    for (const auto& [p, e] : factors) {
        primes.push_back(p);
        per_prime.push_back(partitions(e, max_rank));
    }

    // count tuples, then unrank a uniform pick (rank filter is already in
    // the per-prime partition lists)
    std::uint64_t total = 1;
    for (const auto& lst : per_prime) total *= lst.size();
    if (total == 0) throw std::logic_error("no abelian class with the requested rank bound");
    std::uint64_t pick = uniform_below_u64(rng, total);
    std::vector<std::vector<unsigned>> chosen;
    for (const auto& lst : per_prime) {
        chosen.push_back(lst[pick % lst.size()]);
        pick /= lst.size();
    }
    return make_group(assemble_invariant_factors(primes, chosen));
}

std::vector<std::vector<Int>> abelian_classes_of_order(std::uint64_t n, std::size_t max_rank) {
    const auto factors = factorize_u64(n);
    std::vector<std::uint64_t> primes;
    std::vector<std::vector<std::vector<unsigned>>> per_prime;
    for (const auto& [p, e] : factors) {
        primes.push_back(p);
        per_prime.push_back(partitions(e, max_rank));
    }
    std::vector<std::vector<Int>> out;
    std::vector<std::size_t> idx(per_prime.size(), 0);
    for (;;) {
        std::vector<std::vector<unsigned>> chosen;
        for (std::size_t i = 0; i < per_prime.size(); ++i) chosen.push_back(per_prime[i][idx[i]]);
        out.push_back(assemble_invariant_factors(primes, chosen));
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == per_prime[i].size()) idx[i++] = 0;
        if (i == idx.size()) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

BatchStats run_batch(const ExperimentConfig& config) {
    if (config.k == 0) throw std::invalid_argument("run count must be >= 1");
    std::vector<RunRecord> records(config.k);

    const auto worker = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            const std::uint64_t run_seed = derive_seed(config.seed, i);
            records[i] = config.backend == BackendKind::abstract_group
                             ? one_abstract_run(config, run_seed)
                             : one_classgroup_run(config, run_seed);
        }
    };

    const unsigned threads = std::max(1u, config.threads);
    if (threads == 1) {
        worker(0, config.k);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (config.k + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::uint64_t begin = t * chunk;
            const std::uint64_t end = std::min<std::uint64_t>(config.k, begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    BatchStats stats;
    stats.config = config;
    double sum = 0, sum_sigma = 0;
    std::uint64_t walks = 0, abandoned = 0;
    for (const auto& rec : records) {
        if (!rec.ok) {
            ++stats.failed;
            continue;
        }
        ++stats.k;
        sum += rec.L;
        sum_sigma += rec.sigma;
        walks += rec.walks;
        abandoned += rec.abandoned;
    }
    if (stats.k == 0) throw std::runtime_error("every run in the batch failed");
    stats.mean_L = sum / static_cast<double>(stats.k);
    double ss = 0;
    for (const auto& rec : records)
        if (rec.ok) ss += (rec.L - stats.mean_L) * (rec.L - stats.mean_L);
    stats.stdev_L = stats.k > 1 ? std::sqrt(ss / static_cast<double>(stats.k - 1)) : 0.0;
    stats.ci99_7 = 3.0 * stats.stdev_L / std::sqrt(static_cast<double>(stats.k));
    stats.abandoned_fraction = walks ? static_cast<double>(abandoned) / static_cast<double>(walks) : 0.0;
    stats.sigma = sum_sigma / static_cast<double>(stats.k);
    return stats;
}

double sigma_ratio(const BatchStats& stats) { return stats.sigma; }

std::string export_table(const std::vector<BatchStats>& batches) {
    if (batches.empty()) throw std::invalid_argument("no batches to export");
    std::ostringstream os;
    os << "w,r,m,k,mean_L,stdev_L,ci,sigma,note\n";
    std::map<std::tuple<std::string, std::size_t, unsigned>, int> seen;
    char buf[256];
    for (const auto& b : batches) {
        const std::string w = rational_to_string(b.config.w);
        const auto key = std::make_tuple(w, b.config.r, b.config.m);
        const bool dup = seen[key]++ > 0;
        std::snprintf(buf, sizeof buf, "%s,%zu,%u,%llu,%.6f,%.6f,%.6f,%.6f,%s\n", w.c_str(),
                      b.config.r, b.config.m, static_cast<unsigned long long>(b.k), b.mean_L,
                      b.stdev_L, b.ci99_7, b.sigma, dup ? "duplicate" : "");
        os << buf;
    }
    return os.str();
}

}  // namespace walkforge::exp
