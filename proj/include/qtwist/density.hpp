#pragma once

// Family averages over odd square-free d of the explicit-formula prime sums.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qtwist/arith.hpp"
#include "qtwist/coeffs.hpp"
#include "qtwist/explicit_formula.hpp"
#include "qtwist/poisson.hpp"
#include "qtwist/testfn.hpp"

namespace qtwist::density {

using explicit_formula::Mode;

/// Discriminants per reduction block.
inline constexpr std::size_t kBlockSize = 4096;

struct FamilySpec {
    double X = 0.0;
    testfn::SmoothCompactFunction weight;
    coeffs::ProviderPtr provider;
    testfn::TestFunctionPair pair;
    Mode mode = Mode::Simplified;
    std::optional<double> Z;  // log^3 X when unset

    /// Throws PreconditionError for X < 3, a null provider, or sigma outside
    /// (0, 2/M) (outside (0, 2) for the degree-one provider).
    FamilySpec(double X, testfn::SmoothCompactFunction weight, coeffs::ProviderPtr provider,
               testfn::TestFunctionPair pair, Mode mode = Mode::Simplified,
               std::optional<double> Z = std::nullopt);

    double z() const;

    /// The admissibility rule alone, for callers that validate before building a provider.
    static void check_admissible(int M, double sigma);
};

struct DensityReport {
    double X = 0.0;
    std::string family;
    int M = 0;
    double sigma = 0.0;
    Mode mode = Mode::Simplified;
    double Z = 0.0;
    double totalWeight = 0.0;
    std::uint64_t dCount = 0;
    double empiricalD = 0.0;
    double prediction = 0.0;
    double difference = 0.0;  // empiricalD - prediction
    double sMValue = 0.0;
    double sRValue = 0.0;
    double sValue = 0.0;      // the unsplit mu^2-weighted sum
    std::uint64_t primeLimit = 0;
    double wallTimeSeconds = 0.0;
};

struct SplitResult {
    double sM = 0.0;
    double sR = 0.0;
    double s = 0.0;
};

struct Options {
    unsigned threads = 1;
};

/// sum over odd square-free d with w(d/X) != 0 of w(d/X).
double total_weight(const FamilySpec& spec, const arith::ArithTables& tables);

/// One-level density of the family. The tables must reach max(X b, X^{M sigma}).
/// PreconditionError("empty family") when no odd square-free d lies in (aX, bX).
DensityReport density(const FamilySpec& spec, std::shared_ptr<const arith::ArithTables> tables,
                      Options options = {});

/// S = sum over odd d of mu^2(d) w(d/X) E(chi_{8d}) split by mu^2 = M_Z + R_Z.
SplitResult s_split(const FamilySpec& spec, std::shared_ptr<const arith::ArithTables> tables,
                    Options options = {});

struct DualPrimeTerm {
    std::uint64_t p = 0;
    double dual = 0.0;
    double direct = 0.0;
};

struct DualCheck {
    double dual = 0.0;    // S_M restricted to p <= pMax, inner sums via Poisson
    double direct = 0.0;  // the same restriction by direct summation
    double maxTermDeviation = 0.0;
    std::vector<DualPrimeTerm> terms;
};

/// S_M restricted to odd p <= pMax with each inner d-sum evaluated through
/// odd_restricted_dual. Requires pMax <= 1000.
DualCheck s_m_dual(const FamilySpec& spec, const arith::ArithTables& tables,
                   const poisson::MellinContour& contour, std::uint64_t pMax);

std::string to_string(Mode mode);
Mode parse_mode(const std::string& s);

std::string csv_header();
std::string to_csv_row(const DensityReport& report);
std::string to_json(const DensityReport& report);

}  // namespace qtwist::density
