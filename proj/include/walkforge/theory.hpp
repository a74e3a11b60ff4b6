#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "walkforge/rational.hpp"

namespace walkforge::theory {

using walkforge::Int;
using walkforge::Rat;

struct TheoryInput {
    Int n;                       // group order
    Rat theta;                   // distinguished probability
    std::vector<Rat> p;          // partition probabilities, sum to 1

    unsigned m() const;          // ceil(log2 n)
    void validate() const;
};

// d = 1 - (1 - theta) * sum p_i^2, exact.
Rat edge_fraction(const std::vector<Rat>& p, const Rat& theta);

// E(alpha_pi) = sqrt(pi n / d) + 2/theta, the O(ln^4 n) term dropped the
// same way the printed tables drop it. Exact rationals feed the square root.
double expected_alpha_pi(const TheoryInput& in);
double expected_L_pi(const TheoryInput& in);

// Var(alpha_pi) = (4 - pi) n / d + (4 - 2 theta)/theta^2 + sqrt(pi n / d)/theta.
double variance_alpha_pi(const TheoryInput& in);
double stdev_L_pi(const TheoryInput& in);

struct ClassicEstimates {
    double e_rho;          // sqrt(pi n / 2)
    double vow_lambda;     // sqrt(pi n / (2 p_good))
    double blackburn_rho;  // sqrt(pi r n / (2 (r-1)))
    double bailey_rho;     // sqrt(pi n / (2 (1 - sum p_i^2)))
};

ClassicEstimates classic_estimates(const Int& n, std::size_t r, const std::vector<Rat>& p,
                                   const Rat& good_prob);

struct MontenegroEstimate {
    bool divergent = false;  // P1 = 1 (single partition): denominator vanishes
    double lambda = 0.0;     // sqrt(pi n / (1 - P1 - P1^2 + P1^3))
    double p1 = 0.0;         // sum p_i^2
    double p2 = 0.0;         // (1 - P1) P1^2
};

MontenegroEstimate montenegro_lambda(const Int& n, const std::vector<Rat>& p);

// k = ceil((3 stdev / (rel_err * mean))^2), the CLT sample-size bound.
std::uint64_t sample_size(double e_L, double stdev_L, double rel_err);

// sigma * E(L_pi) * sqrt(n) * (p . t), seconds.
double predicted_runtime_seconds(const TheoryInput& in, const std::vector<double>& hop_seconds,
                                 double sigma);

struct Estimates {
    double d;
    double e_alpha_pi;
    double e_L_pi;
    double var_alpha_pi;
    double stdev_L_pi;
    ClassicEstimates classic;
    MontenegroEstimate montenegro;
};

Estimates estimate_all(const TheoryInput& in);

// One row of the running-time table: d, E(L_pi), Stdev(L_pi) rendered the
// way the reference grid prints them (four decimals, ties to even).
struct TableRow {
    std::size_t r;
    Rat w;
    std::string d;
    std::string e_L;
    std::string stdev_L;
};

std::vector<TableRow> theory_table(const Int& n, const Rat& theta,
                                   const std::vector<std::size_t>& rs, const std::vector<Rat>& ws);

std::string format4(double v);

}  // namespace walkforge::theory
