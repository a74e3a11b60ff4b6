#include "walkforge/theory.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "walkforge/partition.hpp"

namespace walkforge::theory {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sqrt_pi_n_over_d(const Int& n, const Rat& d) {
    // pi * n / d with n/d taken exactly, then one double square root
    const Rat nd = Rat(n) / d;
    return std::sqrt(kPi * to_double(nd));
}

Rat sum_p_squared(const std::vector<Rat>& p) {
    Rat s = 0;
    for (const Rat& pi : p) s += pi * pi;
    return s;
}

}  // namespace

unsigned TheoryInput::m() const {
    if (n <= 1) return 0;
    return static_cast<unsigned>(msb(Int(n - 1))) + 1;
}

void TheoryInput::validate() const {
    if (n < 2) throw std::invalid_argument("group order must be >= 2");
    if (theta <= 0 || theta > 1) throw std::invalid_argument("theta must lie in (0, 1]");
    Rat s = 0;
    for (const Rat& pi : p) {
        if (pi < 0 || pi > 1) throw std::invalid_argument("probabilities must lie in [0, 1]");
        s += pi;
    }
    if (s != 1) throw std::invalid_argument("partition probabilities must sum to 1 exactly");
}

Rat edge_fraction(const std::vector<Rat>& p, const Rat& theta) {
    return 1 - (1 - theta) * sum_p_squared(p);
}

double expected_alpha_pi(const TheoryInput& in) {
    in.validate();
    const Rat d = edge_fraction(in.p, in.theta);
    return sqrt_pi_n_over_d(in.n, d) + 2.0 / to_double(in.theta);
}

double expected_L_pi(const TheoryInput& in) {
    return expected_alpha_pi(in) / std::sqrt(to_double(Rat(in.n)));
}

double variance_alpha_pi(const TheoryInput& in) {
    in.validate();
    const Rat d = edge_fraction(in.p, in.theta);
    const double th = to_double(in.theta);
    const double nd = to_double(Rat(in.n) / d);
    return (4.0 - kPi) * nd + (4.0 - 2.0 * th) / (th * th) + std::sqrt(kPi * nd) / th;
}

double stdev_L_pi(const TheoryInput& in) {
    return std::sqrt(variance_alpha_pi(in) / to_double(Rat(in.n)));
}

ClassicEstimates classic_estimates(const Int& n, std::size_t r, const std::vector<Rat>& p,
                                   const Rat& good_prob) {
    if (good_prob <= 0 || good_prob > 1) throw std::invalid_argument("good probability in (0,1]");
    if (r < 2) throw std::invalid_argument("classic estimates need r >= 2");
    const double nn = to_double(Rat(n));
    ClassicEstimates out;
    out.e_rho = std::sqrt(kPi * nn / 2.0);
    out.vow_lambda = std::sqrt(kPi * nn / (2.0 * to_double(good_prob)));
    out.blackburn_rho = std::sqrt(kPi * static_cast<double>(r) * nn / (2.0 * (static_cast<double>(r) - 1.0)));
    const Rat s = sum_p_squared(p);
    if (s >= 1) throw std::domain_error("bailey estimate needs sum p_i^2 < 1");
    out.bailey_rho = std::sqrt(kPi * nn / (2.0 * to_double(1 - s)));
    return out;
}

MontenegroEstimate montenegro_lambda(const Int& n, const std::vector<Rat>& p) {
    MontenegroEstimate out;
    const Rat p1 = sum_p_squared(p);
    out.p1 = to_double(p1);
    out.p2 = to_double((1 - p1) * p1 * p1);
    const Rat denom = 1 - p1 - p1 * p1 + p1 * p1 * p1;
    if (denom == 0) {
        out.divergent = true;
        return out;
    }
    out.lambda = std::sqrt(kPi * to_double(Rat(n) / denom));
    return out;
}

std::uint64_t sample_size(double e_L, double stdev_L, double rel_err) {
    if (e_L <= 0 || stdev_L < 0 || rel_err <= 0) throw std::invalid_argument("sample_size inputs must be positive");
    const double root = 3.0 * stdev_L / (rel_err * e_L);
    return static_cast<std::uint64_t>(std::ceil(root * root));
}

double predicted_runtime_seconds(const TheoryInput& in, const std::vector<double>& hop_seconds,
                                 double sigma) {
    if (hop_seconds.size() != in.p.size()) throw std::invalid_argument("hop cost vector length mismatch");
    double dot = 0;
    for (std::size_t i = 0; i < in.p.size(); ++i) {
        if (hop_seconds[i] < 0) throw std::invalid_argument("hop costs must be nonnegative");
        dot += to_double(in.p[i]) * hop_seconds[i];
    }
    return sigma * expected_L_pi(in) * std::sqrt(to_double(Rat(in.n))) * dot;
}

Estimates estimate_all(const TheoryInput& in) {
    in.validate();
    Estimates e;
    e.d = to_double(edge_fraction(in.p, in.theta));
    e.e_alpha_pi = expected_alpha_pi(in);
    e.e_L_pi = expected_L_pi(in);
    e.var_alpha_pi = variance_alpha_pi(in);
    e.stdev_L_pi = stdev_L_pi(in);
    e.classic = classic_estimates(in.n, in.p.size(), in.p, Rat(1, 2));
    e.montenegro = montenegro_lambda(in.n, in.p);
    return e;
}

std::string format4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::vector<TableRow> theory_table(const Int& n, const Rat& theta,
                                   const std::vector<std::size_t>& rs, const std::vector<Rat>& ws) {
    std::vector<TableRow> rows;
    for (std::size_t r : rs) {
        for (const Rat& w : ws) {
            const PartitionPlan plan = build_partition_plan(r, w);
            TheoryInput in{n, theta, plan.probabilities};
            TableRow row;
            row.r = r;
            row.w = w;
            row.d = format4(to_double(edge_fraction(in.p, theta)));
            row.e_L = format4(expected_L_pi(in));
            row.stdev_L = format4(stdev_L_pi(in));
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace walkforge::theory
