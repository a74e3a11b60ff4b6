#include "walkforge/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "walkforge/numeric.hpp"
#include "walkforge/theory.hpp"

namespace walkforge::cost {

namespace {

// exact binomial in double; arguments stay tiny (n <= 32)
double binom(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0.0;
    double out = 1.0;
    for (std::uint64_t i = 0; i < k; ++i) out = out * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return out;
}

std::uint64_t binom_u(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    unsigned __int128 out = 1;
    for (std::uint64_t i = 0; i < k; ++i) {
        out *= (n - i);
        out /= (i + 1);
    }
    return static_cast<std::uint64_t>(out);
}

std::vector<std::uint64_t> odd_primes_upto(std::uint64_t bound) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p : primes_below(bound + 1))
        if (p >= 3) out.push_back(p);
    return out;
}

}  // namespace

void TimingTable::insert(std::uint64_t ell, double seconds) {
    if (seconds <= 0) throw std::invalid_argument("timing must be positive");
    if (!entries_.empty() && ell <= entries_.rbegin()->first)
        throw std::invalid_argument("timing rows must be strictly increasing in ell");
    entries_.emplace(ell, seconds);
}

double TimingTable::seconds_for(std::uint64_t ell) const {
    const auto it = entries_.find(ell);
    if (it == entries_.end())
        throw std::out_of_range("no timing row for ell = " + std::to_string(ell));
    return it->second;
}

bool TimingTable::has(std::uint64_t ell) const { return entries_.count(ell) != 0; }

TimingTable load_timing_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open timing table: " + path);
    TimingTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line.rfind("ell", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        std::istringstream row(line);
        std::string ell_s, sec_s;
        if (!std::getline(row, ell_s, ',') || !std::getline(row, sec_s))
            throw std::runtime_error("malformed timing row: " + line);
        table.insert(std::stoull(ell_s), std::stod(sec_s));
    }
    if (table.size() == 0) throw std::runtime_error("empty timing table: " + path);
    return table;
}

double hop_cost_asymptotic(double ell, double q_bits, double c1, double c2) {
    if (ell < 3 || q_bits < 2) throw std::invalid_argument("hop_cost_asymptotic domain");
    return c1 * ell * ell + c2 * ell * std::log2(ell) * q_bits;
}

HopCostFit fit_hop_cost(const TimingTable& table, double q_bits) {
    // least squares on t ~ c1 x + c2 y with x = ell^2, y = ell log2(ell) q_bits
    double sxx = 0, sxy = 0, syy = 0, sxt = 0, syt = 0;
    for (const auto& [ell, t] : table.entries()) {
        const double x = static_cast<double>(ell) * static_cast<double>(ell);
        const double y = static_cast<double>(ell) * std::log2(static_cast<double>(ell)) * q_bits;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sxt += x * t;
        syt += y * t;
    }
    const double det = sxx * syy - sxy * sxy;
    if (det == 0) throw std::domain_error("degenerate fit");
    HopCostFit fit;
    fit.c1 = (sxt * syy - syt * sxy) / det;
    fit.c2 = (syt * sxx - sxt * sxy) / det;
    for (const auto& [ell, t] : table.entries()) {
        const double model = hop_cost_asymptotic(static_cast<double>(ell), q_bits, fit.c1, fit.c2);
        fit.max_rel_residual = std::max(fit.max_rel_residual, std::abs(model - t) / t);
    }
    return fit;
}

SupportEnsemble::SupportEnsemble(std::size_t r) : r_(r) {
    if (r < 4 || r > 16) throw std::invalid_argument("supporting-set enumeration covers 4 <= r <= 16");
    small_cap_ = prime_k(static_cast<unsigned>(2 * r - 7));
    largest_max_ = std::max<std::uint64_t>(67, prime_k(static_cast<unsigned>(2 * r + 1)));
}

void SupportEnsemble::for_each(
    const std::function<void(const std::vector<std::uint64_t>&)>& fn) const {
    const std::vector<std::uint64_t> primes = odd_primes_upto(largest_max_);
    std::vector<std::uint64_t> current(r_);
    // last slot: the largest prime, in [67, largest_max]
    for (std::size_t qi = 0; qi < primes.size(); ++qi) {
        const std::uint64_t q = primes[qi];
        if (q < 67) continue;
        current[r_ - 1] = q;
        // choose the remaining r-1 ascending from primes[0..qi)
        std::vector<std::size_t> idx(r_ - 1);
        const std::size_t need = r_ - 1;
        const auto rec = [&](auto&& self, std::size_t pos, std::size_t from) -> void {
            if (pos == need) {
                fn(current);
                return;
            }
            // positions 0..r-5 must stay <= small_cap
            for (std::size_t i = from; i + (need - pos - 1) < qi; ++i) {
                if (pos + 4 < r_ && primes[i] > small_cap_) break;  // ascending: no later fit
                current[pos] = primes[i];
                self(self, pos + 1, i + 1);
            }
        };
        rec(rec, 0, 0);
    }
}

std::uint64_t SupportEnsemble::count() const {
    const std::vector<std::uint64_t> primes = odd_primes_upto(largest_max_);
    std::uint64_t total = 0;
    for (const std::uint64_t q : primes) {
        if (q < 67) continue;
        std::uint64_t small = 0, big = 0;
        for (const std::uint64_t p : primes) {
            if (p >= q) break;
            (p <= small_cap_ ? small : big)++;
        }
        const std::uint64_t need = r_ - 1;
        for (std::uint64_t j = 0; j <= std::min<std::uint64_t>(3, big); ++j) {
            if (need < j) break;
            total += binom_u(small, need - j) * binom_u(big, j);
        }
    }
    return total;
}

std::vector<double> SupportEnsemble::position_average_times(const TimingTable& table) const {
    const std::vector<std::uint64_t> primes = odd_primes_upto(largest_max_);
    for (const std::uint64_t p : primes)
        if (!table.has(p))
            throw std::out_of_range("timing table missing ell = " + std::to_string(p));

    std::vector<double> acc(r_, 0.0);
    double total = 0;
    for (const std::uint64_t q : primes) {
        if (q < 67) continue;
        std::vector<std::uint64_t> smalls, bigs;
        for (const std::uint64_t p : primes) {
            if (p >= q) break;
            (p <= small_cap_ ? smalls : bigs).push_back(p);
        }
        const std::uint64_t S = smalls.size(), B = bigs.size();
        const std::uint64_t need = r_ - 1;
        for (std::uint64_t j = 0; j <= std::min<std::uint64_t>(3, B); ++j) {
            if (need < j) break;
            const std::uint64_t ns = need - j;
            const double cnt = binom(S, ns) * binom(B, j);
            if (cnt == 0) continue;
            total += cnt;
            // order statistics: P(position i is the s-th small prime)
            for (std::uint64_t i = 1; i <= ns; ++i) {
                double sum = 0;
                for (std::uint64_t s = 1; s <= S; ++s)
                    sum += binom(s - 1, i - 1) * binom(S - s, ns - i) * table.seconds_for(smalls[s - 1]);
                acc[i - 1] += sum * binom(B, j);
            }
            for (std::uint64_t i = 1; i <= j; ++i) {
                double sum = 0;
                for (std::uint64_t b = 1; b <= B; ++b)
                    sum += binom(b - 1, i - 1) * binom(B - b, j - i) * table.seconds_for(bigs[b - 1]);
                acc[ns + i - 1] += sum * binom(S, ns);
            }
            acc[r_ - 1] += cnt * table.seconds_for(q);
        }
    }
    if (total == 0) throw std::logic_error("empty supporting-set ensemble");
    for (double& v : acc) v /= total;
    return acc;
}

double average_hop_seconds(const PartitionPlan& plan, const SupportEnsemble& ensemble,
                           const TimingTable& table) {
    if (plan.r != ensemble.r()) throw std::invalid_argument("plan size must match ensemble r");
    const std::vector<double> tau = ensemble.position_average_times(table);
    double out = 0;
    for (std::size_t i = 0; i < plan.r; ++i) out += to_double(plan.probabilities[i]) * tau[i];
    return out;
}

SigmaProvider::SigmaProvider(const std::string& path, SigmaMode mode, unsigned target_m)
    : mode_(mode), target_m_(target_m) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open measurement table: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.rfind("w,", 0) == 0) continue;
        std::istringstream row(line);
        std::string w_s, r_s, m_s, l_s;
        if (!std::getline(row, w_s, ',') || !std::getline(row, r_s, ',') ||
            !std::getline(row, m_s, ',') || !std::getline(row, l_s))
            throw std::runtime_error("malformed measurement row: " + line);
        const Rat w = parse_rational(w_s);
        const std::size_t r = std::stoul(r_s);
        const unsigned m = static_cast<unsigned>(std::stoul(m_s));
        if (std::find(ws_.begin(), ws_.end(), w) == ws_.end()) ws_.push_back(w);
        if (std::find(rs_.begin(), rs_.end(), r) == rs_.end()) rs_.push_back(r);
        const std::size_t wi = std::find(ws_.begin(), ws_.end(), w) - ws_.begin();
        const std::size_t ri = std::find(rs_.begin(), rs_.end(), r) - rs_.begin();
        mean_L_[{wi, ri}][m] = std::stod(l_s);
    }
    std::sort(ws_.begin(), ws_.end(), std::greater<Rat>());
    std::sort(rs_.begin(), rs_.end());
    if (ws_.empty() || rs_.empty()) throw std::runtime_error("empty measurement table");
    // re-key after sorting
    std::map<std::pair<std::size_t, std::size_t>, std::map<unsigned, double>> rekeyed;
    std::ifstream in2(path);
    while (std::getline(in2, line)) {
        if (line.empty() || line.rfind("w,", 0) == 0) continue;
        std::istringstream row(line);
        std::string w_s, r_s, m_s, l_s;
        std::getline(row, w_s, ',');
        std::getline(row, r_s, ',');
        std::getline(row, m_s, ',');
        std::getline(row, l_s);
        const Rat w = parse_rational(w_s);
        const std::size_t r = std::stoul(r_s);
        const std::size_t wi = std::find(ws_.begin(), ws_.end(), w) - ws_.begin();
        const std::size_t ri = std::find(rs_.begin(), rs_.end(), r) - rs_.begin();
        rekeyed[{wi, ri}][static_cast<unsigned>(std::stoul(m_s))] = std::stod(l_s);
    }
    mean_L_ = std::move(rekeyed);
}

double SigmaProvider::sigma_cell(const Rat& w, std::size_t r) const {
    const std::size_t wi = std::find(ws_.begin(), ws_.end(), w) - ws_.begin();
    const std::size_t ri = std::find(rs_.begin(), rs_.end(), r) - rs_.begin();
    const auto& by_m = mean_L_.at({wi, ri});

    const auto sigma_at_m = [&](unsigned m, double mean_L) {
        const PartitionPlan plan = build_partition_plan(r, w);
        theory::TheoryInput in{Int(1) << m, Rat(1, Int(1) << (m / 4)), plan.probabilities};
        return mean_L / theory::expected_L_pi(in);
    };

    if (mode_ == SigmaMode::constant) {
        const auto last = by_m.rbegin();
        return sigma_at_m(last->first, last->second);
    }
    // least-squares line sigma(m) = a + b m, evaluated at target_m
    double sm = 0, ss = 0, smm = 0, sms = 0;
    double k = 0;
    for (const auto& [m, mean_L] : by_m) {
        const double s = sigma_at_m(m, mean_L);
        sm += m;
        ss += s;
        smm += static_cast<double>(m) * m;
        sms += m * s;
        ++k;
    }
    const double det = k * smm - sm * sm;
    const double b = (k * sms - sm * ss) / det;
    const double a = (ss - b * sm) / k;
    return a + b * static_cast<double>(target_m_);
}

double SigmaProvider::sigma_at(const Rat& w, std::size_t r) const {
    if (rs_.front() > r || rs_.back() < r) throw std::out_of_range("r outside measured range");
    if (std::find(rs_.begin(), rs_.end(), r) != rs_.end()) return sigma_cell(w, r);
    std::size_t lo = rs_.front(), hi = rs_.back();
    for (std::size_t rv : rs_) {
        if (rv < r) lo = rv;
        if (rv > r) {
            hi = rv;
            break;
        }
    }
    const double slo = sigma_cell(w, lo), shi = sigma_cell(w, hi);
    return slo + (shi - slo) * static_cast<double>(r - lo) / static_cast<double>(hi - lo);
}

double SigmaProvider::operator()(std::size_t r, const Rat& w) const {
    // ws_ sorted descending (1, 1/2, 1/4)
    if (std::find(ws_.begin(), ws_.end(), w) != ws_.end()) return sigma_at(w, r);
    if (w > ws_.front() || w < ws_.back()) throw std::out_of_range("w outside measured range");
    std::size_t hi_i = 0;
    while (ws_[hi_i + 1] > w) ++hi_i;
    const Rat whi = ws_[hi_i], wlo = ws_[hi_i + 1];
    const double shi = sigma_at(whi, r), slo = sigma_at(wlo, r);
    const double frac = to_double((w - wlo) / (whi - wlo));
    return slo + (shi - slo) * frac;
}

RuntimeGrid runtime_grid(const Int& n, const Rat& theta, const std::vector<std::size_t>& rs,
                         const std::vector<Rat>& ws, const SigmaProvider& sigma,
                         const TimingTable& table) {
    RuntimeGrid grid;
    const double sqrt_n = std::sqrt(to_double(Rat(n)));
    bool have_base = false;
    for (const std::size_t r : rs) {
        const SupportEnsemble ensemble(r);
        const std::vector<double> tau = ensemble.position_average_times(table);
        for (const Rat& w : ws) {
            const PartitionPlan plan = build_partition_plan(r, w);
            GridCell cell;
            cell.r = r;
            cell.w = w;
            cell.avg_hop_seconds = 0;
            for (std::size_t i = 0; i < r; ++i)
                cell.avg_hop_seconds += to_double(plan.probabilities[i]) * tau[i];
            theory::TheoryInput in{n, theta, plan.probabilities};
            cell.e_L_pi = theory::expected_L_pi(in);
            cell.sigma = sigma(r, w);
            cell.years = cell.sigma * cell.e_L_pi * sqrt_n * cell.avg_hop_seconds / kSecondsPerYear;
            if (grid.cells.empty() || cell.years < grid.best.years) grid.best = cell;
            if (r == 16 && w == 1) {
                grid.base = cell;
                have_base = true;
            }
            grid.cells.push_back(cell);
        }
    }
    if (!have_base) grid.base = grid.cells.front();
    grid.speedup = grid.base.years / grid.best.years;
    return grid;
}

ImprovementRatio improvement_ratio(double q_ln, double e_L_16_1, double e_L_9_13) {
    if (q_ln <= 0) throw std::invalid_argument("ln q must be positive");
    ImprovementRatio out;
    double uniform_tail = 0;
    for (int i = 1; i <= 15; ++i) uniform_tail += 2.0 * i * std::log(2.0 * i);
    out.uniform_tail = uniform_tail / 16.0;

    const PartitionPlan plan913 = build_partition_plan(9, Rat(1, 3));
    const double p1 = to_double(plan913.probabilities.front());
    const double p_last = to_double(plan913.probabilities.back());
    double geo = 0;
    for (int i = 1; i <= 8; ++i) geo += std::pow(1.0 / 3.0, i - 1) * 2.0 * i * std::log(2.0 * i);
    out.geometric_tail = p1 * geo;

    out.prefactor = e_L_16_1 / e_L_9_13;
    out.asymptote = out.prefactor * (1.0 / p_last) / 16.0;
    out.ratio_at_q = out.prefactor * (out.uniform_tail + q_ln / 16.0) /
                     (out.geometric_tail + q_ln * p_last);
    return out;
}

}  // namespace walkforge::cost
