#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "walkforge/partition.hpp"
#include "walkforge/rational.hpp"

namespace walkforge::cost {

using walkforge::Int;
using walkforge::Rat;

// Per-prime hop timings (seconds for one action by a prime ideal of that
// norm). Bumps across powers of two are expected in the measured data, so
// monotonicity is deliberately not enforced.
class TimingTable {
public:
    void insert(std::uint64_t ell, double seconds);
    double seconds_for(std::uint64_t ell) const;  // throws on missing rows
    bool has(std::uint64_t ell) const;
    std::size_t size() const { return entries_.size(); }
    const std::map<std::uint64_t, double>& entries() const { return entries_; }

private:
    std::map<std::uint64_t, double> entries_;
};

TimingTable load_timing_table(const std::string& path);

// c1 * ell^2 + c2 * ell * log2(ell) * q_bits
double hop_cost_asymptotic(double ell, double q_bits, double c1, double c2);

struct HopCostFit {
    double c1 = 0, c2 = 0;
    double max_rel_residual = 0;
};
HopCostFit fit_hop_cost(const TimingTable& table, double q_bits);

// Candidate supporting sets for r >= 4: sorted r-subsets H of odd primes
// with the r-4 smallest <= prime_{2r-7} and the largest in
// [67, max(67, prime_{2r+1})]. The ensemble is lazy: r = 16 already has
// ~4*10^8 members, so it exposes an exact count, a visitor, and
// order-statistics averages instead of a materialized list.
class SupportEnsemble {
public:
    explicit SupportEnsemble(std::size_t r);

    std::size_t r() const { return r_; }
    std::uint64_t count() const;

    // Visits every H in lexicographic order; H arrives ascending.
    void for_each(const std::function<void(const std::vector<std::uint64_t>&)>& fn) const;

    // Average over all H of the sorted timing vector (position i = time of
    // the i-th smallest prime of H), computed by binomial counting.
    std::vector<double> position_average_times(const TimingTable& table) const;

    std::uint64_t small_cap() const { return small_cap_; }
    std::uint64_t largest_min() const { return 67; }
    std::uint64_t largest_max() const { return largest_max_; }

private:
    std::size_t r_;
    std::uint64_t small_cap_;    // prime_{2r-7}
    std::uint64_t largest_max_;  // max(67, prime_{2r+1})
};

// Mean over the ensemble of p . t, smallest prime matched to the largest
// probability.
double average_hop_seconds(const PartitionPlan& plan, const SupportEnsemble& ensemble,
                           const TimingTable& table);

enum class SigmaMode { constant, linear_in_m };

// Practice-to-theory correction sigma(r, w) derived from the bundled
// experiment table: sigma = mean_L / E(L_pi) per measured cell, then
// piecewise-linear in r and linear in w between the tabulated grid lines.
// `constant` holds the m = 56 row; `linear_in_m` extrapolates a per-cell
// linear fit in m out to the target group size.
class SigmaProvider {
public:
    SigmaProvider(const std::string& measurements_csv_path, SigmaMode mode, unsigned target_m = 80);

    double operator()(std::size_t r, const Rat& w) const;
    SigmaMode mode() const { return mode_; }

private:
    double sigma_at(const Rat& w, std::size_t r) const;
    double sigma_cell(const Rat& w, std::size_t r) const;  // tabulated (w, r) only

    SigmaMode mode_;
    unsigned target_m_;
    std::vector<Rat> ws_;
    std::vector<std::size_t> rs_;
    // (w index, r index) -> mean_L per m, and the derived sigma value
    std::map<std::pair<std::size_t, std::size_t>, std::map<unsigned, double>> mean_L_;
};

struct GridCell {
    std::size_t r;
    Rat w;
    double avg_hop_seconds;
    double e_L_pi;
    double sigma;
    double years;
};

struct RuntimeGrid {
    std::vector<GridCell> cells;
    GridCell best;     // minimal expected years
    GridCell base;     // r = 16, w = 1 reference
    double speedup;    // base.years / best.years
};

inline constexpr double kSecondsPerYear = 31557600.0;  // Julian year

RuntimeGrid runtime_grid(const Int& n, const Rat& theta, const std::vector<std::size_t>& rs,
                         const std::vector<Rat>& ws, const SigmaProvider& sigma,
                         const TimingTable& table);

struct ImprovementRatio {
    double uniform_tail;    // (1/16) sum 2i ln(2i), i = 1..15
    double geometric_tail;  // p1 sum (1/3)^{i-1} 2i ln(2i), i = 1..8
    double prefactor;       // EL(16,1) / EL(9,1/3)
    double asymptote;       // prefactor * 9841 / 16
    double ratio_at_q;      // value at the given ln(q)
};

// Speedup of (r=9, w=1/3) over (r=16, w=1) under the ell ~ 2i ln(2i)
// prime-size model. The expected-L inputs default to the measured values.
ImprovementRatio improvement_ratio(double q_ln, double e_L_16_1 = 1.836, double e_L_9_13 = 3.023);

}  // namespace walkforge::cost
