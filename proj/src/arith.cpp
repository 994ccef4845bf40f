#include "qtwist/arith.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <string>

#include "qtwist/errors.hpp"

namespace qtwist::arith {

namespace {

std::vector<std::uint32_t> simple_sieve(std::uint32_t n) {
    std::vector<bool> composite(n + 1, false);
    std::vector<std::uint32_t> out;
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (composite[i]) continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
    }
    return out;
}

std::uint32_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return static_cast<std::uint32_t>(r);
}

// (2/n) for odd n, indexed by n mod 8.
constexpr std::array<int, 8> kTwoTable = {0, 1, 0, -1, 0, -1, 0, 1};

}  // namespace

ArithTables ArithTables::build(std::uint64_t limit, std::uint32_t segmentSize) {
    if (limit < 2 || limit > kMaxTableLimit)
        throw PreconditionError("build_tables: limit must lie in [2, 2^31], got " +
                                std::to_string(limit));
    if (segmentSize < 64)
        throw PreconditionError("build_tables: segment size must be at least 64");

    ArithTables t;
    t.limit_ = static_cast<std::uint32_t>(limit);
    t.moebius_.assign(limit + 1, 0);
    t.moebius_[1] = 1;

    const std::vector<std::uint32_t> base = simple_sieve(isqrt(limit) + 1);

    // Per segment: sign[] carries (-1)^(number of small prime factors) or 0
    // once a square divides n; prod[] is the product of distinct small prime
    // factors. A leftover cofactor n / prod > 1 is one prime above sqrt(limit).
    std::vector<std::int8_t> sign(segmentSize);
    std::vector<std::uint64_t> prod(segmentSize);

    for (std::uint64_t lo = 2; lo <= limit; lo += segmentSize) {
        const std::uint64_t hi = std::min<std::uint64_t>(lo + segmentSize - 1, limit);
        const std::size_t len = hi - lo + 1;
        std::fill_n(sign.begin(), len, std::int8_t{1});
        std::fill_n(prod.begin(), len, std::uint64_t{1});

        for (const std::uint32_t p : base) {
            const std::uint64_t pp = std::uint64_t{p} * p;
            if (p > hi) break;
            std::uint64_t start = (lo + p - 1) / p * p;
            for (std::uint64_t m = start; m <= hi; m += p) {
                sign[m - lo] = static_cast<std::int8_t>(-sign[m - lo]);
                prod[m - lo] *= p;
            }
            if (pp > hi) continue;
            start = (lo + pp - 1) / pp * pp;
            for (std::uint64_t m = start; m <= hi; m += pp) sign[m - lo] = 0;
        }

        for (std::size_t i = 0; i < len; ++i) {
            const std::uint64_t n = lo + i;
            int mu = sign[i];
            if (mu != 0 && prod[i] != n) mu = -mu;
            t.moebius_[n] = static_cast<std::int8_t>(mu);
            if (prod[i] == 1) {
                // no prime <= sqrt(limit) divides n, and n <= limit
                t.primes_.push_back(static_cast<std::uint32_t>(n));
            } else if (prod[i] == n && sign[i] == -1 &&
                       std::binary_search(base.begin(), base.end(), static_cast<std::uint32_t>(n))) {
                t.primes_.push_back(static_cast<std::uint32_t>(n));
            }
        }
    }
    return t;
}

std::size_t ArithTables::prime_count_upto(std::uint64_t x) const noexcept {
    if (x >= limit_) return primes_.size();
    return static_cast<std::size_t>(
        std::upper_bound(primes_.begin(), primes_.end(), static_cast<std::uint32_t>(x)) -
        primes_.begin());
}

int ArithTables::moebius(std::uint64_t n) const {
    if (n == 0 || n > limit_)
        throw RangeError("moebius: n = " + std::to_string(n) + " outside table [1, " +
                             std::to_string(limit_) + "]",
                         n);
    return moebius_[n];
}

int jacobi(std::uint64_t a, std::uint64_t n) noexcept {
    int t = 1;
    a %= n;
    while (a != 0) {
        const int v = std::countr_zero(a);
        a >>= v;
        if ((v & 1) != 0) t *= kTwoTable[n & 7];
        if ((a & 3) == 3 && (n & 3) == 3) t = -t;
        std::swap(a, n);
        a %= n;
    }
    return n == 1 ? t : 0;
}

int kronecker(std::int64_t a, std::int64_t n) {
    if (n == 0) {
        if (a == 0) throw PreconditionError("kronecker: (0/0) is undefined");
        return (a == 1 || a == -1) ? 1 : 0;
    }
    if ((a & 1) == 0 && (n & 1) == 0) return 0;

    int k = 1;
    const int v = std::countr_zero(static_cast<std::uint64_t>(n));
    n >>= v;  // arithmetic shift keeps the sign; n is now odd
    if ((v & 1) != 0) k = kTwoTable[static_cast<std::uint64_t>(a) & 7];
    if (n < 0) {
        n = -n;
        if (a < 0) k = -k;
    }
    // a mod n as a non-negative residue; n odd positive from here on
    const auto un = static_cast<std::uint64_t>(n);
    std::uint64_t ua;
    if (a >= 0) {
        ua = static_cast<std::uint64_t>(a) % un;
    } else {
        const std::uint64_t r = (~static_cast<std::uint64_t>(a) + 1) % un;
        ua = r == 0 ? 0 : un - r;
    }
    return k * jacobi(ua, un);
}

bool is_squarefree(std::uint64_t n) noexcept {
    if (n == 0) return false;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p != 0) continue;
        n /= p;
        if (n % p == 0) return false;
    }
    return true;
}

int chi8d(std::uint64_t d, std::uint64_t n) {
    if (d == 0 || (d & 1) == 0 || !is_squarefree(d))
        throw PreconditionError("chi8d: d must be odd, positive and square-free, got " +
                                std::to_string(d));
    if ((n & 1) == 0) return 0;
    // (8d/n) = (2/n)^3 (d/n) = (2/n)(d/n) for odd n
    return kTwoTable[n & 7] * jacobi(d, n);
}

std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, int>> out;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p != 0) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n, const ArithTables& tables) {
    const auto primes = tables.primes();
    if (primes.empty() || std::uint64_t{primes.back()} * primes.back() < n) return factorize(n);
    std::vector<std::pair<std::uint64_t, int>> out;
    for (const std::uint64_t p : primes) {
        if (p * p > n) break;
        if (n % p != 0) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

namespace {

MoebiusSplit split_from_factors(const std::vector<std::pair<std::uint64_t, int>>& factors,
                                double Z) {
    // l ranges over square-free l with l^2 | d: products of subsets of the
    // primes whose exponent in d is at least 2.
    std::vector<std::uint64_t> squared;
    for (const auto& [p, e] : factors)
        if (e >= 2) squared.push_back(p);

    MoebiusSplit out;
    const std::size_t subsets = std::size_t{1} << squared.size();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
        std::uint64_t l = 1;
        for (std::size_t i = 0; i < squared.size(); ++i)
            if ((mask >> i) & 1) l *= squared[i];
        const int mu = (std::popcount(mask) & 1) != 0 ? -1 : 1;
        if (static_cast<double>(l) <= Z)
            out.mz += mu;
        else
            out.rz += mu;
    }
    return out;
}

}  // namespace

MoebiusSplit mz_rz(std::uint64_t d, double Z) {
    if (d == 0) throw PreconditionError("mz_rz: d must be >= 1");
    return split_from_factors(factorize(d), Z);
}

MoebiusSplit mz_rz(std::uint64_t d, double Z, const ArithTables& tables) {
    if (d == 0) throw PreconditionError("mz_rz: d must be >= 1");
    return split_from_factors(factorize(d, tables), Z);
}

void write_prime_cache(const std::filesystem::path& path, std::span<const std::uint32_t> primes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CacheError("cannot open prime cache for writing: " + path.string());
    auto put = [&out](std::uint64_t v) {
        std::array<char, 8> bytes{};
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out.write(bytes.data(), bytes.size());
    };
    put(primes.size());
    for (const std::uint32_t p : primes) put(p);
    if (!out) throw CacheError("short write on prime cache: " + path.string());
}

std::vector<std::uint64_t> read_prime_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CacheError("cannot open prime cache: " + path.string());
    auto get = [&in, &path]() {
        std::array<unsigned char, 8> bytes{};
        in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
        if (!in) throw CacheError("truncated prime cache: " + path.string());
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
        return v;
    };
    const std::uint64_t count = get();
    const auto size = std::filesystem::file_size(path);
    if (size != 8 * (count + 1))
        throw CacheError("prime cache size does not match its header: " + path.string());
    std::vector<std::uint64_t> primes(count);
    for (auto& p : primes) p = get();
    if (!std::is_sorted(primes.begin(), primes.end()) || (count > 0 && primes.front() != 2))
        throw CacheError("prime cache is not an ascending prime list: " + path.string());
    return primes;
}

}  // namespace qtwist::arith
