#pragma once

// Ramanujan tau table and the coefficient providers a_pi(p^k) for the
// self-dual representations the experiments twist.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "qtwist/arith.hpp"

namespace qtwist::coeffs {

using int128 = __int128;

/// Largest N accepted by tau_table (NTT length 2^25 for the squarings).
inline constexpr std::uint32_t kMaxTauN = std::uint32_t{1} << 24;
/// tau(n) is kept exactly for n up to this bound; beyond it |tau(n)| can
/// exceed the signed 128-bit range and only tau(n) n^{-11/2} is stored.
inline constexpr std::uint32_t kExactTauLimit = std::uint32_t{1} << 21;
/// Largest N for which the automatic method uses the pentagonal route.
inline constexpr std::uint32_t kPentagonalCutoff = 200000;

enum class TauMethod {
    Automatic,
    Pentagonal,    // 24 sparse multiplications by the pentagonal series, exact int128
    MultiModular,  // Jacobi cube identity, NTT squarings mod five primes, CRT
};

class TauTable {
public:
    TauTable() = default;
    TauTable(std::uint32_t N, std::vector<int128> exact, std::vector<double> normalized);

    std::uint32_t N() const noexcept { return N_; }
    std::uint32_t exact_limit() const noexcept { return static_cast<std::uint32_t>(exact_.size()) - 1; }

    /// tau(n) exactly; RangeError if n is 0, above N or above exact_limit().
    int128 value(std::uint64_t n) const;

    /// lambda(n) = tau(n) / n^{11/2}; RangeError if n is 0 or above N.
    double normalized(std::uint64_t n) const;

private:
    std::uint32_t N_ = 0;
    std::vector<int128> exact_;      // index n, entry 0 unused
    std::vector<double> normalized_; // index n, entry 0 unused
};

/// tau(n) for 1 <= n <= N from Delta = q prod (1 - q^n)^24. When decimalOut
/// is given, every value is also written as "n<TAB>tau(n)" lines.
/// Throws PreconditionError for N = 0 or N > kMaxTauN.
TauTable tau_table(std::uint32_t N, TauMethod method = TauMethod::Automatic,
                   std::ostream* decimalOut = nullptr);

/// Load a text cache written by tau_table. Throws CacheError when the file is
/// unreadable, malformed, does not cover N, or has tau(2) != -24.
TauTable load_tau_cache(const std::filesystem::path& path, std::uint32_t N);

std::string to_string(int128 v);
int128 parse_int128(const std::string& s);

/// a_pi(p^k) for a fixed self-dual pi; p is assumed prime.
class CoefficientProvider {
public:
    virtual ~CoefficientProvider() = default;
    virtual std::string label() const = 0;
    virtual int degree() const = 0;    // M of GL_M
    virtual int delta_pi() const = 0;  // sign of the Rankin-Selberg pole bookkeeping
    virtual double a(std::uint64_t p, int k) const = 0;
    /// Largest prime the provider can evaluate.
    virtual std::uint64_t max_prime() const { return UINT64_MAX; }
};

using ProviderPtr = std::shared_ptr<const CoefficientProvider>;

/// alpha^k + beta^k for alpha + beta = lambda, alpha beta = 1.
double unit_power_sum(double lambda, int k);

ProviderPtr provider_gl1();
ProviderPtr provider_delta(std::shared_ptr<const TauTable> tau);
ProviderPtr provider_sym2_delta(std::shared_ptr<const TauTable> tau);

/// (sum_{p <= x} a(p, 2) log p) / x.
double delta_empirical(const CoefficientProvider& provider, double x,
                       const arith::ArithTables& tables);

}  // namespace qtwist::coeffs
