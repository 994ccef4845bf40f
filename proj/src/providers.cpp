#include <cmath>
#include <string>

#include "qtwist/coeffs.hpp"
#include "qtwist/compensated_sum.hpp"
#include "qtwist/errors.hpp"

namespace qtwist::coeffs {

double unit_power_sum(double lambda, int k) {
    if (k < 0) throw PreconditionError("unit_power_sum: k must be >= 0");
    // s_0 = 2, s_1 = lambda, s_k = lambda s_{k-1} - s_{k-2}
    double prev = 2.0;
    if (k == 0) return prev;
    double cur = lambda;
    for (int i = 2; i <= k; ++i) {
        const double next = lambda * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

namespace {

void check_k(int k) {
    if (k < 0) throw PreconditionError("a(p, k): k must be >= 0, got " + std::to_string(k));
}

class TrivialProvider final : public CoefficientProvider {
public:
    std::string label() const override { return "gl1"; }
    int degree() const override { return 1; }
    int delta_pi() const override { return -1; }
    double a(std::uint64_t, int k) const override {
        check_k(k);
        return 1.0;
    }
};

class DeltaProvider final : public CoefficientProvider {
public:
    explicit DeltaProvider(std::shared_ptr<const TauTable> tau) : tau_(std::move(tau)) {}

    std::string label() const override { return "delta"; }
    int degree() const override { return 2; }
    // Level one, trivial central character: the exterior square carries the
    // pole, so delta(pi) = +1 and sum_{p<=x} a(p^2) log p ~ -x.
    int delta_pi() const override { return 1; }
    double a(std::uint64_t p, int k) const override {
        check_k(k);
        return unit_power_sum(tau_->normalized(p), k);
    }
    std::uint64_t max_prime() const override { return tau_->N(); }

private:
    std::shared_ptr<const TauTable> tau_;
};

class Sym2DeltaProvider final : public CoefficientProvider {
public:
    explicit Sym2DeltaProvider(std::shared_ptr<const TauTable> tau) : tau_(std::move(tau)) {}

    std::string label() const override { return "sym2delta"; }
    int degree() const override { return 3; }
    int delta_pi() const override { return -1; }
    // Satake parameters {alpha^2, 1, beta^2}: alpha^{2k} + beta^{2k} = s_{2k}.
    double a(std::uint64_t p, int k) const override {
        check_k(k);
        return unit_power_sum(tau_->normalized(p), 2 * k) + 1.0;
    }
    std::uint64_t max_prime() const override { return tau_->N(); }

private:
    std::shared_ptr<const TauTable> tau_;
};

std::shared_ptr<const TauTable> require_table(std::shared_ptr<const TauTable> tau) {
    if (!tau) throw PreconditionError("provider needs a tau table");
    return tau;
}

}  // namespace

ProviderPtr provider_gl1() { return std::make_shared<TrivialProvider>(); }

ProviderPtr provider_delta(std::shared_ptr<const TauTable> tau) {
    return std::make_shared<DeltaProvider>(require_table(std::move(tau)));
}

ProviderPtr provider_sym2_delta(std::shared_ptr<const TauTable> tau) {
    return std::make_shared<Sym2DeltaProvider>(require_table(std::move(tau)));
}

double delta_empirical(const CoefficientProvider& provider, double x,
                       const arith::ArithTables& tables) {
    if (!(x >= 1.0)) throw PreconditionError("delta_empirical: x must be >= 1");
    const auto need = static_cast<std::uint64_t>(std::floor(x));
    if (!tables.covers(need))
        throw RangeError("delta_empirical: sieve limit " + std::to_string(tables.limit()) +
                             " below x; need limit >= " + std::to_string(need),
                         need);
    if (need > provider.max_prime())
        throw RangeError("delta_empirical: provider '" + provider.label() + "' covers primes <= " +
                             std::to_string(provider.max_prime()) + ", need " + std::to_string(need),
                         need);
    CompensatedSum sum;
    const auto primes = tables.primes();
    const std::size_t count = tables.prime_count_upto(need);
    for (std::size_t i = 0; i < count; ++i) {
        const double p = primes[i];
        sum += provider.a(primes[i], 2) * std::log(p);
    }
    return sum.value() / x;
}

}  // namespace qtwist::coeffs
