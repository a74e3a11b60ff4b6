#include "walkforge/quadform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "walkforge/numeric.hpp"

namespace walkforge {

namespace {

using i128 = __int128;

void check_disc(std::int64_t disc) {
    if (disc >= 0) throw std::domain_error("discriminant must be negative");
    const std::int64_t m4 = ((disc % 4) + 4) % 4;
    if (m4 != 0 && m4 != 1) throw std::domain_error("discriminant must be 0 or 1 mod 4");
    if (-disc > kMaxAbsDiscriminant) throw std::domain_error("|discriminant| beyond 2^44 bound");
}

std::int64_t gcd3(std::int64_t a, std::int64_t b, std::int64_t c) {
    return std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c));
}

// g = u*a + v*b
std::int64_t xgcd(std::int64_t a, std::int64_t b, std::int64_t& u, std::int64_t& v) {
    std::int64_t x0 = 1, x1 = 0, y0 = 0, y1 = 1;
    while (b != 0) {
        const std::int64_t q = a / b;
        std::int64_t t = a - q * b; a = b; b = t;
        t = x0 - q * x1; x0 = x1; x1 = t;
        t = y0 - q * y1; y0 = y1; y1 = t;
    }
    u = x0; v = y0;
    return a;
}

std::int64_t floordiv(i128 num, i128 den) {
    i128 q = num / den;
    if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
    return static_cast<std::int64_t>(q);
}

// bring b into (-a, a], fixing c from the discriminant
void normalize(std::int64_t& a, std::int64_t& b, std::int64_t& c) {
    if (-a < b && b <= a) return;
    const i128 disc = i128(b) * b - i128(4) * a * c;
    const std::int64_t q = floordiv(i128(a) - b, i128(2) * a);  // b + 2aq in (-a, a]
    const i128 b2 = i128(b) + i128(2) * a * q;
    b = static_cast<std::int64_t>(b2);
    c = static_cast<std::int64_t>((b2 * b2 - disc) / (i128(4) * a));
}

}  // namespace

std::int64_t discriminant(const QuadForm& f) {
    const i128 d = i128(f.b) * f.b - i128(4) * f.a * f.c;
    if (d < -i128(kMaxAbsDiscriminant) * 4 || d >= 0)
        throw std::domain_error("form discriminant out of range");
    return static_cast<std::int64_t>(d);
}

bool is_reduced(const QuadForm& f) {
    if (f.a <= 0) return false;
    if (std::abs(f.b) > f.a || f.a > f.c) return false;
    if ((std::abs(f.b) == f.a || f.a == f.c) && f.b < 0) return false;
    return true;
}

std::string to_string(const QuadForm& f) {
    std::ostringstream os;
    os << '(' << f.a << ',' << f.b << ',' << f.c << ')';
    return os.str();
}

std::vector<std::uint8_t> encode(const QuadForm& f) {
    std::vector<std::uint8_t> out;
    out.reserve(24);
    const auto push64 = [&out](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    push64(static_cast<std::uint64_t>(f.a));
    push64(static_cast<std::uint64_t>(f.b) + 0x8000000000000000ull);
    push64(static_cast<std::uint64_t>(f.c));
    return out;
}

QuadForm principal_form(std::int64_t disc) {
    check_disc(disc);
    const std::int64_t b = ((disc % 2) + 2) % 2;
    return QuadForm{1, b, static_cast<std::int64_t>((i128(b) * b - disc) / 4)};
}

QuadForm reduce(QuadForm f) {
    if (f.a <= 0) throw std::domain_error("form must have a > 0");
    if (gcd3(f.a, f.b, f.c) != 1) throw std::domain_error("form must be primitive");
    discriminant(f);  // validates negativity and range
    normalize(f.a, f.b, f.c);
    while (f.a > f.c) {
        std::swap(f.a, f.c);
        f.b = -f.b;
        normalize(f.a, f.b, f.c);
    }
    if (f.a == f.c && f.b < 0) f.b = -f.b;
    return f;
}

QuadForm compose(const QuadForm& lhs, const QuadForm& rhs) {
    const std::int64_t disc = discriminant(lhs);
    if (discriminant(rhs) != disc) throw std::domain_error("composing forms of different discriminants");

    std::int64_t a1 = lhs.a, b1 = lhs.b, c1 = lhs.c;
    std::int64_t a2 = rhs.a, b2 = rhs.b, c2 = rhs.c;
    if (a1 > a2) {
        std::swap(a1, a2);
        std::swap(b1, b2);
        std::swap(c1, c2);
    }
    const std::int64_t s = (b1 + b2) / 2;
    const std::int64_t n = b2 - s;

    std::int64_t y1, d;
    if (a2 % a1 == 0) {
        y1 = 0;
        d = a1;
    } else {
        std::int64_t u, v;
        d = xgcd(a2, a1, u, v);
        y1 = u;
    }
    std::int64_t x2, y2, d1;
    if (s % d == 0) {
        x2 = 0;
        y2 = -1;
        d1 = d;
    } else {
        std::int64_t u, v;
        d1 = xgcd(s, d, u, v);
        x2 = u;
        y2 = -v;
    }
    const std::int64_t v1 = a1 / d1;
    const std::int64_t v2 = a2 / d1;
    // r = (y1 y2 n - x2 c2) mod v1
    i128 rr = (i128(y1) * y2 % v1) * n % v1 - i128(x2) * c2 % v1;
    rr %= v1;
    if (rr < 0) rr += v1;
    const i128 a3 = i128(v1) * v2;
    const i128 b3 = i128(b2) + 2 * i128(v2) * rr;
    const i128 c3 = (b3 * b3 - disc) / (4 * a3);
    QuadForm out{static_cast<std::int64_t>(a3), static_cast<std::int64_t>(b3),
                 static_cast<std::int64_t>(c3)};
    if (i128(out.a) != a3 || i128(out.b) != b3 || i128(out.c) != c3)
        throw std::overflow_error("composition intermediate exceeded 64 bits");
    return reduce(out);
}

QuadForm invert(const QuadForm& f) {
    return reduce(QuadForm{f.a, -f.b, f.c});
}

QuadForm form_pow(const QuadForm& f, Int e, std::int64_t disc) {
    QuadForm base = f;
    if (e < 0) {
        base = invert(base);
        e = -e;
    }
    QuadForm out = principal_form(disc);
    while (e > 0) {
        if ((e & 1) != 0) out = compose(out, base);
        base = compose(base, base);
        e >>= 1;
    }
    return out;
}

PrimeFormResult prime_form(std::uint64_t ell, std::int64_t disc) {
    check_disc(disc);
    if (!is_prime_u64(ell)) throw std::invalid_argument("prime_form: ell must be prime");

    PrimeFormResult res;
    const Int D(disc);
    if (ell == 2) {
        const std::int64_t m8 = ((disc % 8) + 8) % 8;
        if (m8 == 1) {
            res.kind = PrimeKind::split;
            res.raw = QuadForm{2, 1, static_cast<std::int64_t>((1 - disc) / 8)};
        } else if (m8 == 5) {
            res.kind = PrimeKind::nonsplit;
            return res;
        } else {
            res.kind = PrimeKind::ramified;
            const std::int64_t b = (m8 == 0) ? 0 : 2;  // b^2 = disc mod 8, b even
            res.raw = QuadForm{2, b, static_cast<std::int64_t>((i128(b) * b - disc) / 8)};
        }
        res.reduced = reduce(res.raw);
        return res;
    }

    const int kro = kronecker(D, Int(ell));
    if (kro == -1) {
        res.kind = PrimeKind::nonsplit;
        return res;
    }
    std::int64_t b;
    if (kro == 0) {
        res.kind = PrimeKind::ramified;
        b = (disc % 2 == 0) ? 0 : static_cast<std::int64_t>(ell);
    } else {
        res.kind = PrimeKind::split;
        const std::uint64_t amod = static_cast<std::uint64_t>(((disc % std::int64_t(ell)) + std::int64_t(ell)) % std::int64_t(ell));
        const std::uint64_t r0 = sqrt_mod_prime(amod, ell);
        // lift both roots mod ell to the parity of disc; take the smaller
        const auto lift = [&](std::uint64_t root) {
            std::int64_t cand = static_cast<std::int64_t>(root);
            if (((cand - disc) % 2 + 2) % 2 != 0) cand += static_cast<std::int64_t>(ell);
            return cand;
        };
        const std::int64_t b1 = lift(r0);
        const std::int64_t b2 = lift((ell - r0) % ell);
        b = std::min(b1 == 0 ? b2 : b1, b2 == 0 ? b1 : b2);
    }
    res.raw = QuadForm{static_cast<std::int64_t>(ell), b,
                       static_cast<std::int64_t>((i128(b) * b - disc) / (i128(4) * std::int64_t(ell)))};
    res.reduced = reduce(res.raw);
    return res;
}

std::vector<QuadForm> reduced_forms(std::int64_t disc) {
    check_disc(disc);
    if (-disc > (std::int64_t{1} << 40)) throw std::domain_error("enumeration bound |disc| <= 2^40 exceeded");
    std::vector<QuadForm> out;
    const std::int64_t amax = static_cast<std::int64_t>(std::sqrt(static_cast<double>(-disc) / 3.0)) + 1;
    for (std::int64_t a = 1; a <= amax; ++a) {
        for (std::int64_t b = -(a - 1); b <= a; ++b) {
            if (((b - disc) & 1) != 0) continue;  // b must match disc parity
            const i128 num = i128(b) * b - disc;
            if (num % (i128(4) * a) != 0) continue;
            const std::int64_t c = static_cast<std::int64_t>(num / (i128(4) * a));
            if (c < a) continue;
            if (a == c && b < 0) continue;
            if (gcd3(a, b, c) != 1) continue;
            out.push_back(QuadForm{a, b, c});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t class_number_bruteforce(std::int64_t disc) {
    return reduced_forms(disc).size();
}

namespace {

struct FormHash {
    std::size_t operator()(const QuadForm& f) const {
        std::size_t h = std::hash<std::int64_t>{}(f.a);
        h = h * 1000003u ^ std::hash<std::int64_t>{}(f.b);
        h = h * 1000003u ^ std::hash<std::int64_t>{}(f.c);
        return h;
    }
};

std::uint64_t element_order(const QuadForm& f, std::uint64_t h, std::int64_t disc) {
    // ord(f) | h: strip prime factors of h that are not needed
    const QuadForm one = principal_form(disc);
    std::uint64_t ord = h;
    for (const auto& [p, e] : factorize_u64(h)) {
        for (unsigned i = 0; i < e; ++i) {
            if (form_pow(f, Int(ord / p), disc) == one)
                ord /= p;
            else
                break;
        }
    }
    return ord;
}

// subgroup closure of gens inside the enumerated group
std::size_t closure_size(const std::vector<QuadForm>& gens, std::int64_t disc) {
    std::unordered_set<QuadForm, FormHash> seen;
    std::vector<QuadForm> frontier{principal_form(disc)};
    seen.insert(frontier.front());
    while (!frontier.empty()) {
        std::vector<QuadForm> next;
        for (const auto& s : frontier) {
            for (const auto& g : gens) {
                const QuadForm t = compose(s, g);
                if (seen.insert(t).second) next.push_back(t);
            }
        }
        frontier = std::move(next);
    }
    return seen.size();
}

}  // namespace

std::size_t subgroup_order(const std::vector<QuadForm>& gens, std::int64_t disc) {
    return closure_size(gens, disc);
}

ClassGroupStructure compute_structure(std::int64_t disc) {
    const std::vector<QuadForm> forms = reduced_forms(disc);
    const std::uint64_t h = forms.size();
    ClassGroupStructure st;
    if (h == 1) {
        st.invariant_factors = {Int(1)};
        return st;
    }

    // p-part partitions from the sizes of G[p^k]
    std::vector<std::vector<unsigned>> partitions;  // per prime, descending parts
    std::vector<std::uint64_t> primes;
    for (const auto& [p, e] : factorize_u64(h)) {
        std::vector<unsigned> logs{0};  // log_p |G[p^k]| for k = 0, 1, ...
        std::uint64_t pk = 1;
        for (unsigned k = 1;; ++k) {
            pk *= p;
            std::uint64_t cnt = 0;
            for (const auto& f : forms)
                if (form_pow(f, Int(pk), disc) == principal_form(disc)) ++cnt;
            unsigned lg = 0;
            for (std::uint64_t v = cnt; v > 1; v /= p) ++lg;
            logs.push_back(lg);
            if (logs[k] == logs[k - 1]) {
                logs.pop_back();
                break;
            }
            if (k > 64) throw std::logic_error("structure: runaway p-group scan");
        }
        // parts >= k count is logs[k] - logs[k-1]
        std::vector<unsigned> parts;
        for (std::size_t k = 1; k < logs.size(); ++k) {
            const unsigned at_least_k = logs[k] - logs[k - 1];
            const unsigned at_least_k1 =
                (k + 1 < logs.size()) ? logs[k + 1] - logs[k] : 0;
            for (unsigned m = 0; m < at_least_k - at_least_k1; ++m)
                parts.push_back(static_cast<unsigned>(k));
        }
        std::sort(parts.rbegin(), parts.rend());
        partitions.push_back(parts);
        primes.push_back(p);
    }

    std::size_t width = 0;
    for (const auto& parts : partitions) width = std::max(width, parts.size());
    st.invariant_factors.assign(width, Int(1));
    for (std::size_t pi = 0; pi < primes.size(); ++pi) {
        for (std::size_t i = 0; i < partitions[pi].size(); ++i) {
            Int pk = 1;
            for (unsigned j = 0; j < partitions[pi][i]; ++j) pk *= primes[pi];
            st.invariant_factors[i] *= pk;
        }
    }

    // greedy generating set: smallest split prime forms first, then any form
    std::vector<QuadForm> candidates;
    for (std::uint64_t ell : primes_below(2000)) {
        const auto pf = prime_form(ell, disc);
        if (pf.kind == PrimeKind::split) candidates.push_back(pf.reduced);
        if (candidates.size() >= 24) break;
    }
    for (const auto& f : forms) candidates.push_back(f);

    std::size_t span = 1;
    for (const auto& cand : candidates) {
        if (span == h) break;
        if (cand == principal_form(disc)) continue;
        std::vector<QuadForm> trial = st.sampling_generators;
        trial.push_back(cand);
        const std::size_t sz = closure_size(trial, disc);
        if (sz > span) {
            st.sampling_generators = std::move(trial);
            span = sz;
        }
    }
    if (span != h) throw std::logic_error("structure: generating set search failed");
    for (const auto& g : st.sampling_generators)
        st.sampling_orders.push_back(element_order(g, h, disc));
    return st;
}

ClassGroupCtx::ClassGroupCtx(std::int64_t disc) : disc_(disc) { check_disc(disc); }

std::uint64_t ClassGroupCtx::class_number() const {
    std::call_once(h_once_, [this] { h_ = class_number_bruteforce(disc_); });
    return h_;
}

const ClassGroupStructure& ClassGroupCtx::structure() const {
    std::call_once(structure_once_, [this] { structure_ = compute_structure(disc_); });
    return structure_;
}

QuadForm ClassGroupCtx::random_class(Rng& rng) const {
    const auto& st = structure();
    QuadForm out = one();
    for (std::size_t i = 0; i < st.sampling_generators.size(); ++i) {
        const std::uint64_t e = uniform_below_u64(rng, st.sampling_orders[i]);
        out = compose(out, form_pow(st.sampling_generators[i], Int(e), disc_));
    }
    return out;
}

std::vector<std::pair<std::uint64_t, QuadForm>> split_primes(const ClassGroupCtx& ctx,
                                                             std::size_t count,
                                                             std::uint64_t search_bound,
                                                             bool include_ramified) {
    if (count == 0) throw std::invalid_argument("split_primes: count must be >= 1");
    std::vector<std::pair<std::uint64_t, QuadForm>> out;
    for (std::uint64_t ell : primes_below(search_bound)) {
        const auto pf = prime_form(ell, ctx.disc());
        if (pf.kind == PrimeKind::split || (include_ramified && pf.kind == PrimeKind::ramified))
            out.emplace_back(ell, pf.reduced);
        if (out.size() == count) return out;
    }
    throw std::runtime_error("split_primes: search bound exceeded before finding enough split primes");
}

std::vector<Int> structure_bruteforce(const ClassGroupCtx& ctx) {
    return ctx.structure().invariant_factors;
}

}  // namespace walkforge
