#include "walkforge/numeric.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace walkforge {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

std::uint64_t pollard_brent(std::uint64_t n, std::uint64_t seed) {
    if ((n & 1) == 0) return 2;
    std::uint64_t y = seed % n, c = (seed >> 32) % n + 1, m = 128;
    std::uint64_t g = 1, r = 1, q = 1, x = 0, ys = 0;
    while (g == 1) {
        x = y;
        for (std::uint64_t i = 0; i < r; ++i) y = (mulmod(y, y, n) + c) % n;
        for (std::uint64_t k = 0; k < r && g == 1; k += m) {
            ys = y;
            const std::uint64_t lim = std::min(m, r - k);
            for (std::uint64_t i = 0; i < lim; ++i) {
                y = (mulmod(y, y, n) + c) % n;
                q = mulmod(q, x > y ? x - y : y - x, n);
            }
            g = std::gcd(q, n);
        }
        r <<= 1;
    }
    if (g == n) {
        do {
            ys = (mulmod(ys, ys, n) + c) % n;
            g = std::gcd(x > ys ? x - ys : ys - x, n);
        } while (g == 1);
    }
    return g;
}

void factor_rec(std::uint64_t n, std::map<std::uint64_t, unsigned>& out, std::uint64_t salt) {
    if (n == 1) return;
    if (is_prime_u64(n)) {
        ++out[n];
        return;
    }
    std::uint64_t d = n;
    for (std::uint64_t attempt = 1; d == n || d == 1; ++attempt)
        d = pollard_brent(n, 0x9E3779B97F4A7C15ull * (salt + attempt) ^ (n + attempt));
    factor_rec(d, out, salt + 1);
    factor_rec(n / d, out, salt + 2);
}

std::vector<std::uint64_t>& prime_cache() {
    static std::vector<std::uint64_t> cache = [] {
        std::vector<std::uint64_t> p;
        std::vector<bool> sieve(100000, true);
        for (std::uint64_t i = 2; i < sieve.size(); ++i) {
            if (!sieve[i]) continue;
            p.push_back(i);
            for (std::uint64_t j = i * i; j < sieve.size(); j += i) sieve[j] = false;
        }
        return p;
    }();
    return cache;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

std::map<std::uint64_t, unsigned> factorize_u64(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("factorize_u64: n must be positive");
    std::map<std::uint64_t, unsigned> out;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        while (n % p == 0) {
            ++out[p];
            n /= p;
        }
    }
    factor_rec(n, out, 0);
    return out;
}

std::uint64_t prime_k(unsigned k) {
    const auto& cache = prime_cache();
    if (k == 0 || k > cache.size()) throw std::out_of_range("prime_k index");
    return cache[k - 1];
}

std::vector<std::uint64_t> primes_below(std::uint64_t bound) {
    const auto& cache = prime_cache();
    std::vector<std::uint64_t> out;
    for (std::uint64_t p : cache) {
        if (p >= bound) break;
        out.push_back(p);
    }
    if (bound > cache.back() + 1) throw std::out_of_range("primes_below: beyond sieve range");
    return out;
}

Int floor_fourth_root(const Int& n) {
    if (n < 0) throw std::domain_error("fourth root of negative");
    return sqrt(sqrt(n));
}

Int round_fourth_root(const Int& n) {
    Int d = floor_fourth_root(n);
    // d+1 is nearer iff n > (d + 1/2)^4, i.e. 16 n > (2d+1)^4.
    const Int t = 2 * d + 1;
    if (16 * n > t * t * t * t) ++d;
    return d;
}

int kronecker(const Int& a_in, const Int& n_in) {
    if (n_in <= 0) throw std::invalid_argument("kronecker: n must be positive");
    Int a = a_in, n = n_in;
    int result = 1;
    // strip factors of two from n using (a|2)
    while (n % 2 == 0) {
        n /= 2;
        if (a % 2 == 0) return 0;
        const Int m8 = ((a % 8) + 8) % 8;
        if (m8 == 3 || m8 == 5) result = -result;
    }
    a %= n;
    if (a < 0) a += n;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            const Int m8 = n % 8;
            if (m8 == 3 || m8 == 5) result = -result;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

std::uint64_t sqrt_mod_prime(std::uint64_t a, std::uint64_t p) {
    a %= p;
    if (a == 0) return 0;
    if (p == 2) return a;
    if (powmod(a, (p - 1) / 2, p) != 1) throw std::domain_error("sqrt_mod_prime: not a residue");
    if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
    // Tonelli-Shanks
    std::uint64_t q = p - 1;
    unsigned s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    std::uint64_t z = 2;
    while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
    std::uint64_t m = s;
    std::uint64_t c = powmod(z, q, p);
    std::uint64_t t = powmod(a, q, p);
    std::uint64_t r = powmod(a, (q + 1) / 2, p);
    while (t != 1) {
        std::uint64_t i = 0, tt = t;
        while (tt != 1) {
            tt = mulmod(tt, tt, p);
            ++i;
        }
        std::uint64_t b = c;
        for (std::uint64_t j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    return r;
}

Int lattice_index(std::vector<std::vector<Int>> rows, std::size_t cols) {
    for (auto& row : rows)
        if (row.size() != cols) throw std::invalid_argument("lattice_index: ragged rows");
    Int det = 1;
    std::size_t top = 0;
    for (std::size_t col = 0; col < cols; ++col) {
        // euclidean elimination below `top` on this column
        for (;;) {
            std::size_t piv = top;
            for (std::size_t i = top; i < rows.size(); ++i) {
                if (rows[i][col] == 0) continue;
                if (rows[piv][col] == 0 || abs(rows[i][col]) < abs(rows[piv][col])) piv = i;
            }
            if (rows[piv][col] == 0) throw std::domain_error("lattice_index: rank-deficient input");
            std::swap(rows[top], rows[piv]);
            bool done = true;
            for (std::size_t i = top + 1; i < rows.size(); ++i) {
                if (rows[i][col] == 0) continue;
                const Int q = rows[i][col] / rows[top][col];
                for (std::size_t j = col; j < cols; ++j) rows[i][j] -= q * rows[top][j];
                if (rows[i][col] != 0) done = false;
            }
            if (done) break;
        }
        det *= abs(rows[top][col]);
        ++top;
    }
    return det;
}

}  // namespace walkforge
