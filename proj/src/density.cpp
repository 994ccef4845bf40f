#include "qtwist/density.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include <json.hpp>

#include "qtwist/compensated_sum.hpp"
#include "qtwist/errors.hpp"

namespace qtwist::density {

namespace {

struct Range {
    std::uint64_t first = 0;  // smallest odd d > aX
    std::uint64_t count = 0;  // odd d in (aX, bX)
};

Range odd_range(const FamilySpec& spec) {
    const double lo = spec.weight.a() * spec.X;
    const double hi = spec.weight.b() * spec.X;
    auto first = static_cast<std::uint64_t>(std::floor(lo)) + 1;
    if ((first & 1) == 0) ++first;
    auto last = static_cast<std::uint64_t>(std::ceil(hi)) - 1;
    if ((last & 1) == 0) --last;
    Range r;
    r.first = first;
    r.count = last >= first ? (last - first) / 2 + 1 : 0;
    return r;
}

void require_cover(const arith::ArithTables& tables, double x, const char* what) {
    const auto need = static_cast<std::uint64_t>(std::ceil(x));
    if (!tables.covers(need))
        throw RangeError(std::string(what) + ": sieve limit " + std::to_string(tables.limit()) +
                             ", required " + std::to_string(need),
                         need);
}

// Runs body(block, begin, end) for every block of kBlockSize items; blocks are
// handed out dynamically but each block is computed by exactly one thread.
template <typename Body>
void for_each_block(std::uint64_t items, unsigned threads, Body&& body) {
    const std::uint64_t blocks = (items + kBlockSize - 1) / kBlockSize;
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            if (failed.load()) return;
            const std::uint64_t b = next.fetch_add(1);
            if (b >= blocks) return;
            try {
                body(b, b * kBlockSize, std::min(items, (b + 1) * kBlockSize));
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::uint64_t>(blocks, 1))));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n);
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

struct BlockSums {
    double weight = 0.0;
    double weighted = 0.0;  // sum w s1 or sum w s_full
    double sM = 0.0;
    double sR = 0.0;
    double s = 0.0;
    std::uint64_t count = 0;
};

struct Scan {
    BlockSums total;
    double Z = 0.0;
    std::uint64_t primeLimit = 0;
};

Scan scan(const FamilySpec& spec, const std::shared_ptr<const arith::ArithTables>& tables,
          const Options& options, bool wantDensity) {
    if (!tables) throw PreconditionError("density: null tables");
    require_cover(*tables, spec.weight.b() * spec.X, "family range X b");
    const explicit_formula::ExplicitFormulaContext ctx(spec.X, spec.provider, spec.pair, tables);
    const Range range = odd_range(spec);
    const double Z = spec.z();
    const double norm = ctx.normalization();

    std::vector<BlockSums> blocks((range.count + kBlockSize - 1) / kBlockSize);
    for_each_block(range.count, options.threads, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        CompensatedSum weight, weighted, sM, sR, s;
        std::uint64_t count = 0;
        for (std::uint64_t i = begin; i < end; ++i) {
            const std::uint64_t d = range.first + 2 * i;
            const double w = spec.weight(static_cast<double>(d) / spec.X);
            const bool squarefree = tables->moebius(d) != 0;
            if (w == 0.0) {
                count += squarefree;
                continue;
            }
            const bool full = wantDensity && squarefree && spec.mode == Mode::Full;
            const explicit_formula::ExplicitFormulaContext::Evaluation ev =
                full ? ctx.evaluate(d) : explicit_formula::ExplicitFormulaContext::Evaluation{ctx.prime_sum(d), 0.0};
            const double e = ev.primeSum;
            const arith::MoebiusSplit split = arith::mz_rz(d, Z, *tables);
            if (split.mz != 0) sM += w * split.mz * e;
            if (split.rz != 0) sR += w * split.rz * e;
            if (!squarefree) continue;
            s += w * e;
            weight += w;
            ++count;
            if (wantDensity)
                weighted += w * (full ? ev.sFull : norm * e);
        }
        blocks[b] = {weight.value(), weighted.value(), sM.value(), sR.value(), s.value(), count};
    });

    CompensatedSum weight, weighted, sM, sR, s;
    Scan out;
    for (const BlockSums& bs : blocks) {
        weight += bs.weight;
        weighted += bs.weighted;
        sM += bs.sM;
        sR += bs.sR;
        s += bs.s;
        out.total.count += bs.count;
    }
    out.total.weight = weight.value();
    out.total.weighted = weighted.value();
    out.total.sM = sM.value();
    out.total.sR = sR.value();
    out.total.s = s.value();
    out.Z = Z;
    out.primeLimit = static_cast<std::uint64_t>(std::floor(ctx.support_bound()));
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

FamilySpec::FamilySpec(double X_, testfn::SmoothCompactFunction weight_, coeffs::ProviderPtr provider_,
                       testfn::TestFunctionPair pair_, Mode mode_, std::optional<double> Z_)
    : X(X_), weight(std::move(weight_)), provider(std::move(provider_)), pair(std::move(pair_)),
      mode(mode_), Z(Z_) {
    if (!(X >= 3.0)) throw PreconditionError("family: X must be >= 3");
    if (!provider) throw PreconditionError("family: null coefficient provider");
    check_admissible(provider->degree(), pair.sigma);
    if (Z && !(*Z >= 1.0)) throw PreconditionError("family: Z must be >= 1");
}

void FamilySpec::check_admissible(int M, double sigma) {
    const double cap = M == 1 ? 2.0 : 2.0 / M;
    if (!(sigma > 0.0 && sigma < cap))
        throw PreconditionError("family: sigma = " + fmt(sigma) + " is inadmissible for degree " +
                                std::to_string(M) + " (need 0 < sigma < " + fmt(cap) + ")");
}

double FamilySpec::z() const {
    if (Z) return *Z;
    const double l = std::log(X);
    return l * l * l;
}

double total_weight(const FamilySpec& spec, const arith::ArithTables& tables) {
    require_cover(tables, spec.weight.b() * spec.X, "total_weight");
    const Range range = odd_range(spec);
    std::vector<double> blocks((range.count + kBlockSize - 1) / kBlockSize);
    for_each_block(range.count, 1, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        CompensatedSum sum;
        for (std::uint64_t i = begin; i < end; ++i) {
            const std::uint64_t d = range.first + 2 * i;
            if (tables.moebius(d) != 0) sum += spec.weight(static_cast<double>(d) / spec.X);
        }
        blocks[b] = sum.value();
    });
    CompensatedSum total;
    for (double v : blocks) total += v;
    return total.value();
}

DensityReport density(const FamilySpec& spec, std::shared_ptr<const arith::ArithTables> tables,
                      Options options) {
    const auto start = std::chrono::steady_clock::now();
    const Scan sc = scan(spec, tables, options, true);
    if (sc.total.count == 0 || sc.total.weight == 0.0)
        throw PreconditionError("empty family: no odd square-free d with d/X in (" + fmt(spec.weight.a()) +
                                ", " + fmt(spec.weight.b()) + ") at X = " + fmt(spec.X));

    DensityReport r;
    r.X = spec.X;
    r.family = spec.provider->label();
    r.M = spec.provider->degree();
    r.sigma = spec.pair.sigma;
    r.mode = spec.mode;
    r.Z = sc.Z;
    r.totalWeight = sc.total.weight;
    r.dCount = sc.total.count;
    const double mean = sc.total.weighted / sc.total.weight;
    r.empiricalD = spec.mode == Mode::Simplified
                       ? spec.pair.integralPhi - 0.5 * spec.pair.integralPhiHatFull - mean
                       : mean;
    r.prediction = testfn::rmt_prediction(spec.pair);
    r.difference = r.empiricalD - r.prediction;
    r.sMValue = sc.total.sM;
    r.sRValue = sc.total.sR;
    r.sValue = sc.total.s;
    r.primeLimit = sc.primeLimit;
    r.wallTimeSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!std::isfinite(r.empiricalD)) throw AccuracyError("density: non-finite result", r.empiricalD);
    return r;
}

SplitResult s_split(const FamilySpec& spec, std::shared_ptr<const arith::ArithTables> tables,
                    Options options) {
    const Scan sc = scan(spec, tables, options, false);
    return {sc.total.sM, sc.total.sR, sc.total.s};
}

DualCheck s_m_dual(const FamilySpec& spec, const arith::ArithTables& tables,
                   const poisson::MellinContour& contour, std::uint64_t pMax) {
    if (pMax > 1000) throw PreconditionError("s_m_dual: pMax must be <= 1000");
    DualCheck out;
    if (pMax < 3) return out;
    require_cover(tables, std::max<double>(static_cast<double>(pMax), std::sqrt(spec.weight.b() * spec.X)),
                  "s_m_dual");

    const Range range = odd_range(spec);
    const double Z = spec.z();
    std::vector<double> weightedMz(range.count);
    for (std::uint64_t i = 0; i < range.count; ++i) {
        const std::uint64_t d = range.first + 2 * i;
        weightedMz[i] = arith::mz_rz(d, Z, tables).mz * spec.weight(static_cast<double>(d) / spec.X);
    }

    std::vector<std::uint64_t> alphas;
    const double alphaMax = std::min(Z, std::sqrt(spec.weight.b() * spec.X));
    for (std::uint64_t a = 1; static_cast<double>(a) <= alphaMax; a += 2)
        if (tables.moebius(a) != 0) alphas.push_back(a);

    const poisson::DualKernels kernels(spec.weight, contour);
    const int M = spec.provider->degree();
    const double scale = M * std::log(spec.X);
    CompensatedSum dualTotal, directTotal;
    for (std::uint32_t p : tables.primes()) {
        if (p > pMax) break;
        if (p == 2) continue;
        const double lp = std::log(static_cast<double>(p));
        const double cp = spec.provider->a(p, 1) * lp / std::sqrt(static_cast<double>(p)) *
                          spec.pair.phiHat(lp / scale);
        const int two = (p % 8 == 1 || p % 8 == 7) ? 1 : -1;

        CompensatedSum direct;
        for (std::uint64_t i = 0; i < range.count; ++i) {
            if (weightedMz[i] == 0.0) continue;
            const auto d = static_cast<std::int64_t>(range.first + 2 * i);
            const int c = arith::kronecker(8 * d, p);
            if (c != 0) direct += c * weightedMz[i];
        }

        CompensatedSum dual;
        for (std::uint64_t a : alphas) {
            if (a % p == 0) continue;
            dual += tables.moebius(a) * poisson::odd_restricted_dual(p, kernels, spec.X, a);
        }

        DualPrimeTerm t{p, cp * two * dual.value(), cp * direct.value()};
        out.maxTermDeviation = std::max(out.maxTermDeviation, std::fabs(t.dual - t.direct));
        dualTotal += t.dual;
        directTotal += t.direct;
        out.terms.push_back(t);
    }
    out.dual = dualTotal.value();
    out.direct = directTotal.value();
    return out;
}

std::string to_string(Mode mode) { return mode == Mode::Full ? "full" : "simplified"; }

Mode parse_mode(const std::string& s) {
    if (s == "full") return Mode::Full;
    if (s == "simplified") return Mode::Simplified;
    throw PreconditionError("unknown mode '" + s + "' (valid: full, simplified)");
}

std::string csv_header() {
    return "X,family,M,sigma,mode,Z,W_X,d_count,empirical_D,prediction,diff,prime_limit,wall_time_s";
}

std::string to_csv_row(const DensityReport& r) {
    return fmt(r.X) + "," + r.family + "," + std::to_string(r.M) + "," + fmt(r.sigma) + "," +
           to_string(r.mode) + "," + fmt(r.Z) + "," + fmt(r.totalWeight) + "," + std::to_string(r.dCount) +
           "," + fmt(r.empiricalD) + "," + fmt(r.prediction) + "," + fmt(r.difference) + "," +
           std::to_string(r.primeLimit) + "," + fmt(r.wallTimeSeconds);
}

std::string to_json(const DensityReport& r) {
    nlohmann::ordered_json j;
    j["X"] = r.X;
    j["family"] = r.family;
    j["M"] = r.M;
    j["sigma"] = r.sigma;
    j["mode"] = to_string(r.mode);
    j["Z"] = r.Z;
    j["W_X"] = r.totalWeight;
    j["d_count"] = r.dCount;
    j["empirical_D"] = r.empiricalD;
    j["prediction"] = r.prediction;
    j["diff"] = r.difference;
    j["prime_limit"] = r.primeLimit;
    j["wall_time_s"] = r.wallTimeSeconds;
    return j.dump();
}

}  // namespace qtwist::density
