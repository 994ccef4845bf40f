#pragma once

// Sieved arithmetic tables and quadratic-symbol kernels.

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace qtwist::arith {

inline constexpr std::uint64_t kMaxTableLimit = std::uint64_t{1} << 31;
inline constexpr std::uint32_t kDefaultSegmentSize = std::uint32_t{1} << 20;

/// Primes and Moebius values up to a fixed limit. Immutable once built, so
/// any number of threads may read it concurrently.
class ArithTables {
public:
    /// Segmented sieve of primes and mu(n) for n <= limit.
    /// Throws PreconditionError unless 2 <= limit <= 2^31.
    static ArithTables build(std::uint64_t limit,
                             std::uint32_t segmentSize = kDefaultSegmentSize);

    std::uint32_t limit() const noexcept { return limit_; }

    /// Ascending primes <= limit.
    std::span<const std::uint32_t> primes() const noexcept { return primes_; }

    /// Number of primes p <= x (x may exceed the limit only if the caller
    /// accepts the truncated count; use covers() to check).
    std::size_t prime_count_upto(std::uint64_t x) const noexcept;

    bool covers(std::uint64_t x) const noexcept { return x <= limit_; }

    /// mu(n) for 1 <= n <= limit; RangeError otherwise.
    int moebius(std::uint64_t n) const;

    /// True iff n is odd and square-free.
    bool squarefree_odd(std::uint64_t n) const { return (n & 1) != 0 && moebius(n) != 0; }

private:
    std::uint32_t limit_ = 0;
    std::vector<std::uint32_t> primes_;
    std::vector<std::int8_t> moebius_;  // index n, entry 0 unused
};

inline ArithTables build_tables(std::uint64_t limit,
                                std::uint32_t segmentSize = kDefaultSegmentSize) {
    return ArithTables::build(limit, segmentSize);
}

/// Kronecker symbol (a/n) with the usual conventions for n = 0, n < 0 and
/// even n. Throws PreconditionError for a = n = 0.
int kronecker(std::int64_t a, std::int64_t n);

/// Jacobi symbol (a/n) for odd positive n, binary algorithm.
int jacobi(std::uint64_t a, std::uint64_t n) noexcept;

/// chi_{8d}(n) = (8d/n) for odd positive square-free d.
/// Throws PreconditionError when d violates that.
int chi8d(std::uint64_t d, std::uint64_t n);

/// Trial-division square-freeness test, for precondition checks.
bool is_squarefree(std::uint64_t n) noexcept;

/// Prime factorization (p, e) in ascending p, by trial division.
std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n);

/// Same, dividing only by the sieved primes; falls back to trial division
/// if the table does not reach sqrt(n).
std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n, const ArithTables& tables);

struct MoebiusSplit {
    std::int64_t mz = 0;  // sum of mu(l) over l^2 | d, l <= Z
    std::int64_t rz = 0;  // sum of mu(l) over l^2 | d, l > Z
};

/// Split mu^2(d) = M_Z(d) + R_Z(d) at the cutoff Z. Requires d >= 1.
MoebiusSplit mz_rz(std::uint64_t d, double Z);
MoebiusSplit mz_rz(std::uint64_t d, double Z, const ArithTables& tables);

/// Prime-list cache: little-endian u64 count followed by that many u64 primes.
void write_prime_cache(const std::filesystem::path& path, std::span<const std::uint32_t> primes);
std::vector<std::uint64_t> read_prime_cache(const std::filesystem::path& path);

}  // namespace qtwist::arith
