#include "qtwist/explicit_formula.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qtwist/compensated_sum.hpp"
#include "qtwist/errors.hpp"

namespace qtwist::explicit_formula {

namespace {

// Above this many primes per residue class a (r/q) lookup table pays off.
constexpr std::uint64_t kTableRatio = 2;

}  // namespace

ExplicitFormulaContext::ExplicitFormulaContext(double X, coeffs::ProviderPtr provider,
                                               testfn::TestFunctionPair pair,
                                               std::shared_ptr<const arith::ArithTables> tables)
    : X_(X), provider_(std::move(provider)), pair_(std::move(pair)), tables_(std::move(tables)) {
    if (!(X >= 3.0)) throw PreconditionError("explicit formula context: X must be >= 3");
    if (!provider_ || !tables_) throw PreconditionError("explicit formula context: null provider or tables");

    const int M = provider_->degree();
    const double logX = std::log(X);
    norm_ = 2.0 / (M * logX);
    support_ = std::pow(X, M * pair_.sigma);
    if (support_ >= static_cast<double>(arith::kMaxTableLimit))
        throw RangeError("X^{M sigma} = " + std::to_string(support_) + " exceeds the sieve cap 2^31",
                         arith::kMaxTableLimit);
    const auto required = static_cast<std::uint64_t>(std::floor(support_));
    if (!tables_->covers(required))
        throw RangeError("explicit formula needs primes up to X^{M sigma}: sieve limit " +
                             std::to_string(tables_->limit()) + ", required " + std::to_string(required),
                         required);
    if (required > provider_->max_prime())
        throw RangeError("provider '" + provider_->label() + "' stops at " +
                             std::to_string(provider_->max_prime()) + ", required " +
                             std::to_string(required),
                         required);

    const auto primes = tables_->primes();
    const double scale = M * logX;
    const auto& phiHat = pair_.phiHat;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        const double p = primes[i];
        if (!(p < support_)) break;
        const double lp = std::log(p);
        weights_.push_back(provider_->a(primes[i], 1) * lp / std::sqrt(p) * phiHat(lp / scale));
        const std::uint32_t r8 = primes[i] & 7u;
        two_.push_back(primes[i] == 2 ? 0 : (r8 == 1 || r8 == 7 ? 1 : -1));
        mod4_.push_back((primes[i] & 3u) == 3 ? 1 : 0);
        if (i > 0) maxGap_ = std::max(maxGap_, primes[i] - primes[i - 1]);

        double m = p;
        for (int k = 1; m < support_; ++k, m *= p) {
            const double w = lp * provider_->a(primes[i], k) / std::sqrt(m) * phiHat(std::log(m) / scale);
            powers_.push_back({m, static_cast<std::uint32_t>(i), k, w});
        }
    }
    std::sort(powers_.begin(), powers_.end(),
              [](const PowerTerm& a, const PowerTerm& b) { return a.m < b.m; });
}

void ExplicitFormulaContext::check_odd_squarefree(std::uint64_t d) const {
    bool ok = d > 0 && (d & 1) != 0;
    if (ok) ok = tables_->covers(d) ? tables_->moebius(d) != 0 : arith::is_squarefree(d);
    if (!ok)
        throw PreconditionError("d must be odd, positive and square-free, got " + std::to_string(d));
}

void ExplicitFormulaContext::fill_characters(std::uint64_t q, std::size_t count,
                                             std::span<std::int8_t> out) const {
    // chi_{8q}(p) = (2/p)(q/p), and by reciprocity (q/p) = (p/q) (-1)^{(p-1)/2 (q-1)/2};
    // (p/q) is the product of Legendre symbols over the prime factors of q.
    const auto primes = tables_->primes();
    const bool q3 = (q & 3) == 3;
    for (std::size_t i = 0; i < count; ++i)
        out[i] = static_cast<std::int8_t>(q3 && mod4_[i] ? -two_[i] : two_[i]);
    if (q == 1 || count == 0) return;
    const auto factors = arith::factorize(q, *tables_);
    thread_local std::vector<std::int8_t> legendre;

    if (q <= kTableRatio * count && q <= (std::uint64_t{1} << 26)) {
        thread_local std::vector<std::int8_t> table;
        table.assign(q, 1);
        for (const auto& [l, e] : factors) {
            if (e % 2 == 0) {
                for (std::uint64_t r = 0; r < q; r += l) table[r] = 0;
                continue;
            }
            legendre_table(l, legendre);
            std::uint64_t rl = 0;
            for (std::uint64_t r = 0; r < q; ++r) {
                table[r] = static_cast<std::int8_t>(table[r] * legendre[rl]);
                if (++rl == l) rl = 0;
            }
        }
        apply_residues(q, count, table, out);
        return;
    }

    for (const auto& [l, e] : factors) {
        if (e % 2 == 0) {
            const std::size_t idx = tables_->prime_count_upto(l);
            if (idx >= 1 && idx <= count && primes[idx - 1] == l) out[idx - 1] = 0;
            continue;
        }
        legendre_table(l, legendre);
        apply_residues(l, count, legendre, out);
    }
}

void ExplicitFormulaContext::legendre_table(std::uint64_t l, std::vector<std::int8_t>& table) {
    table.assign(l, -1);
    table[0] = 0;
    std::uint64_t s = 0;
    for (std::uint64_t i = 1; 2 * i < l; ++i) {
        s += 2 * i - 1;
        if (s >= l) s -= l;
        table[s] = 1;
    }
}

void ExplicitFormulaContext::apply_residues(std::uint64_t q, std::size_t count,
                                            std::span<const std::int8_t> table,
                                            std::span<std::int8_t> out) const {
    const auto primes = tables_->primes();
    if (q > maxGap_) {
        std::uint64_t r = primes[0] % q;
        out[0] = static_cast<std::int8_t>(out[0] * table[r]);
        for (std::size_t i = 1; i < count; ++i) {
            r += primes[i] - primes[i - 1];
            if (r >= q) r -= q;
            out[i] = static_cast<std::int8_t>(out[i] * table[r]);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i)
            out[i] = static_cast<std::int8_t>(out[i] * table[primes[i] % q]);
    }
}

double ExplicitFormulaContext::sum_upto(std::uint64_t q, std::size_t count) const {
    thread_local std::vector<std::int8_t> chi;
    chi.resize(count);
    fill_characters(q, count, chi);
    CompensatedSum sum;
    for (std::size_t i = 0; i < count; ++i) {
        if (chi[i] == 0) continue;
        sum += chi[i] > 0 ? weights_[i] : -weights_[i];
    }
    return sum.value();
}

double ExplicitFormulaContext::prime_sum(std::uint64_t q) const {
    if (q == 0 || (q & 1) == 0) throw PreconditionError("prime_sum: q must be odd and positive");
    return sum_upto(q, weights_.size());
}

double ExplicitFormulaContext::prime_sum_with(const std::function<int(std::uint64_t)>& chi) const {
    const auto primes = tables_->primes();
    CompensatedSum sum;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const int c = chi(primes[i]);
        if (c == 0) continue;
        sum += c > 0 ? weights_[i] : -weights_[i];
    }
    return sum.value();
}

double ExplicitFormulaContext::s1(std::uint64_t d) const {
    check_odd_squarefree(d);
    return norm_ * sum_upto(d, weights_.size());
}

double ExplicitFormulaContext::s_full(std::uint64_t d) const { return evaluate(d).sFull; }

ExplicitFormulaContext::Evaluation ExplicitFormulaContext::evaluate(std::uint64_t d) const {
    check_odd_squarefree(d);
    thread_local std::vector<std::int8_t> chi;
    chi.resize(weights_.size());
    fill_characters(d, weights_.size(), chi);
    CompensatedSum primes;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (chi[i] == 0) continue;
        primes += chi[i] > 0 ? weights_[i] : -weights_[i];
    }
    CompensatedSum sum;
    for (const PowerTerm& t : powers_) {
        const int c = chi[t.primeIndex];
        if (c == 0) continue;
        // chi(p^k) = chi(p)^k
        const bool negative = c < 0 && (t.k & 1) != 0;
        sum += negative ? -t.weight : t.weight;
    }
    return {primes.value(), pair_.integralPhi - norm_ * sum.value()};
}

double ExplicitFormulaContext::e_partial(std::uint64_t q, double V) const {
    if (q == 0 || (q & 1) == 0) throw PreconditionError("e_partial: q must be odd and positive");
    if (V < 2.0) return 0.0;
    const auto v = static_cast<std::uint64_t>(std::floor(V));
    if (!tables_->covers(v))
        throw RangeError("e_partial: V = " + std::to_string(v) + " beyond sieve limit " +
                             std::to_string(tables_->limit()),
                         v);
    const std::size_t count = std::min(tables_->prime_count_upto(v), weights_.size());
    return sum_upto(q, count);
}

}  // namespace qtwist::explicit_formula
