#pragma once

// Prime-sum side of the explicit formula for the twists L(s, pi x chi_{8d}).

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "qtwist/arith.hpp"
#include "qtwist/coeffs.hpp"
#include "qtwist/testfn.hpp"

namespace qtwist::explicit_formula {

enum class Mode { Full, Simplified };

/// Immutable evaluation context for one (X, pi, phi). Every prime with a
/// nonzero phiHat(log p / (M log X)) factor lies below X^{M sigma}, and the
/// constructor insists that the sieve reaches that far.
class ExplicitFormulaContext {
public:
    /// Throws PreconditionError for X < 3 and RangeError when the sieve or
    /// the provider stops short of X^{M sigma}.
    ExplicitFormulaContext(double X, coeffs::ProviderPtr provider, testfn::TestFunctionPair pair,
                           std::shared_ptr<const arith::ArithTables> tables);

    double X() const noexcept { return X_; }
    const coeffs::CoefficientProvider& provider() const noexcept { return *provider_; }
    const coeffs::ProviderPtr& provider_ptr() const noexcept { return provider_; }
    const testfn::TestFunctionPair& pair() const noexcept { return pair_; }
    const arith::ArithTables& tables() const noexcept { return *tables_; }
    std::uint64_t prime_limit() const noexcept { return tables_->limit(); }

    /// X^{M sigma}: the support bound of the prime sums.
    double support_bound() const noexcept { return support_; }
    /// 2 / (M log X).
    double normalization() const noexcept { return norm_; }

    /// S_1(chi_{8d}) = (2/(M log X)) sum_p a(p) log p / sqrt(p) chi_{8d}(p) phiHat(log p/(M log X)).
    /// d must be odd, positive and square-free.
    double s1(std::uint64_t d) const;

    /// int phi - (2/(M log X)) sum over prime powers m = p^k < X^{M sigma} of
    /// log p a(p, k) m^{-1/2} chi_{8d}(m) phiHat(log m/(M log X)).
    double s_full(std::uint64_t d) const;

    struct Evaluation {
        double primeSum = 0.0;  // prime_sum(d)
        double sFull = 0.0;     // s_full(d)
    };
    /// prime_sum and s_full from one pass over the characters.
    Evaluation evaluate(std::uint64_t d) const;

    /// E(V; pi, chi_{8q}, phiHat) = sum_{p <= V} a(p) log p / sqrt(p) chi_{8q}(p) phiHat(...),
    /// q odd positive (square factors allowed). RangeError if V exceeds the sieve.
    double e_partial(std::uint64_t q, double V) const;

    /// The unnormalized prime sum E(X^{M sigma}; chi_{8q}) for any odd positive q.
    double prime_sum(std::uint64_t q) const;

    /// The same prime sum with an arbitrary character supplied per prime;
    /// same order and skipping rule as prime_sum, so results agree bit for bit.
    double prime_sum_with(const std::function<int(std::uint64_t)>& chi) const;

    /// Number of primes below the support bound.
    std::size_t support_prime_count() const noexcept { return weights_.size(); }

private:
    struct PowerTerm {
        double m;
        std::uint32_t primeIndex;
        int k;
        double weight;
    };

    void check_odd_squarefree(std::uint64_t d) const;
    double sum_upto(std::uint64_t q, std::size_t count) const;
    void fill_characters(std::uint64_t q, std::size_t count, std::span<std::int8_t> out) const;
    void apply_residues(std::uint64_t q, std::size_t count, std::span<const std::int8_t> table,
                        std::span<std::int8_t> out) const;
    static void legendre_table(std::uint64_t l, std::vector<std::int8_t>& table);

    double X_;
    coeffs::ProviderPtr provider_;
    testfn::TestFunctionPair pair_;
    std::shared_ptr<const arith::ArithTables> tables_;
    double support_ = 0.0;
    double norm_ = 0.0;
    std::vector<double> weights_;     // per prime below the support bound
    std::vector<std::int8_t> two_;    // (2/p), 0 for p = 2
    std::vector<std::int8_t> mod4_;   // p mod 4 == 3 ? 1 : 0
    std::uint32_t maxGap_ = 0;
    std::vector<PowerTerm> powers_;  // ascending m, k >= 1
};

}  // namespace qtwist::explicit_formula
