#include <algorithm>
#include <array>
#include <bit>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>

#include "qtwist/coeffs.hpp"
#include "qtwist/errors.hpp"

namespace qtwist::coeffs {

namespace {

using boost::multiprecision::int256_t;

// ---------------------------------------------------------------------------
// Pentagonal route: (prod (1 - q^n))^24 by 24 in-place sparse multiplications.
// ---------------------------------------------------------------------------

std::vector<std::pair<std::uint32_t, int>> pentagonal_terms(std::uint32_t len) {
    // prod (1 - q^n) = sum_k (-1)^k q^{k(3k-1)/2}, k over all integers
    std::vector<std::pair<std::uint32_t, int>> terms;
    for (std::int64_t k = 1;; ++k) {
        const std::int64_t e1 = k * (3 * k - 1) / 2;
        const std::int64_t e2 = k * (3 * k + 1) / 2;
        if (e1 >= len) break;
        const int s = (k & 1) ? -1 : 1;
        terms.emplace_back(static_cast<std::uint32_t>(e1), s);
        if (e2 < len) terms.emplace_back(static_cast<std::uint32_t>(e2), s);
    }
    return terms;
}

std::vector<int128> eta24_pentagonal(std::uint32_t len) {
    std::vector<int128> series(len, 0);
    series[0] = 1;
    const auto terms = pentagonal_terms(len);
    for (int round = 0; round < 24; ++round) {
        for (std::uint32_t i = len; i-- > 1;) {
            int128 acc = series[i];
            for (const auto& [e, s] : terms) {
                if (e > i) break;
                acc += s > 0 ? series[i - e] : -series[i - e];
            }
            series[i] = acc;
        }
    }
    return series;
}

// ---------------------------------------------------------------------------
// Multi-modular route.
// ---------------------------------------------------------------------------

std::uint32_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint32_t m) {
    std::uint64_t r = 1;
    b %= m;
    while (e != 0) {
        if (e & 1) r = r * b % m;
        b = b * b % m;
        e >>= 1;
    }
    return static_cast<std::uint32_t>(r);
}

std::uint32_t primitive_root(std::uint32_t m) {
    std::vector<std::uint64_t> factors;
    std::uint64_t n = m - 1;
    for (std::uint64_t f = 2; f * f <= n; ++f) {
        if (n % f != 0) continue;
        factors.push_back(f);
        while (n % f == 0) n /= f;
    }
    if (n > 1) factors.push_back(n);
    for (std::uint32_t g = 2;; ++g) {
        bool ok = true;
        for (const auto f : factors) ok = ok && pow_mod(g, (m - 1) / f, m) != 1;
        if (ok) return g;
    }
}

template <std::uint32_t Mod>
class Ntt {
public:
    Ntt() : root_(primitive_root(Mod)) {}

    void transform(std::vector<std::uint32_t>& a, bool inverse) {
        const std::size_t n = a.size();
        for (std::size_t i = 1, j = 0; i < n; ++i) {
            std::size_t bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(a[i], a[j]);
        }
        twiddle_.resize(n / 2);
        for (std::size_t len = 2; len <= n; len <<= 1) {
            std::uint32_t w = pow_mod(root_, (Mod - 1) / len, Mod);
            if (inverse) w = pow_mod(w, Mod - 2, Mod);
            const std::size_t half = len / 2;
            twiddle_[0] = 1;
            for (std::size_t j = 1; j < half; ++j)
                twiddle_[j] = static_cast<std::uint32_t>(std::uint64_t{twiddle_[j - 1]} * w % Mod);
            for (std::size_t i = 0; i < n; i += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    const std::uint32_t u = a[i + j];
                    const auto v =
                        static_cast<std::uint32_t>(std::uint64_t{a[i + j + half]} * twiddle_[j] % Mod);
                    const std::uint32_t s = u + v;
                    a[i + j] = s >= Mod ? s - Mod : s;
                    a[i + j + half] = u >= v ? u - v : u + Mod - v;
                }
            }
        }
        if (inverse) {
            const std::uint64_t inv_n = pow_mod(n, Mod - 2, Mod);
            for (auto& x : a) x = static_cast<std::uint32_t>(x * inv_n % Mod);
        }
    }

    /// Square the series held in a[0, len) and keep degrees < len.
    void square_truncated(std::vector<std::uint32_t>& a, std::size_t len) {
        transform(a, false);
        for (auto& x : a) x = static_cast<std::uint32_t>(std::uint64_t{x} * x % Mod);
        transform(a, true);
        std::fill(a.begin() + static_cast<std::ptrdiff_t>(len), a.end(), 0u);
    }

private:
    std::uint32_t root_;
    std::vector<std::uint32_t> twiddle_;
};

// NTT-friendly primes p = c 2^k + 1 with k >= 25; product ~ 2^148.8.
constexpr std::array<std::uint32_t, 5> kModuli = {2013265921u, 1811939329u, 2113929217u,
                                                   469762049u, 167772161u};

// J(q) = prod (1 - q^n)^3 = sum_k (-1)^k (2k+1) q^{k(k+1)/2}; returns J^2 exactly.
std::vector<std::int64_t> jacobi_cube_squared(std::uint32_t len) {
    std::vector<std::pair<std::uint32_t, std::int64_t>> terms;
    for (std::int64_t k = 0; k * (k + 1) / 2 < len; ++k)
        terms.emplace_back(static_cast<std::uint32_t>(k * (k + 1) / 2), (k & 1 ? -1 : 1) * (2 * k + 1));
    std::vector<std::int64_t> sq(len, 0);
    for (std::size_t i = 0; i < terms.size(); ++i)
        for (std::size_t j = 0; j < terms.size(); ++j) {
            const std::uint64_t e = std::uint64_t{terms[i].first} + terms[j].first;
            if (e >= len) break;
            sq[e] += terms[i].second * terms[j].second;
        }
    return sq;
}

template <std::uint32_t Mod>
std::vector<std::uint32_t> eta24_mod(const std::vector<std::int64_t>& j2, std::size_t len) {
    const std::size_t size = std::bit_ceil(2 * len - 1);
    std::vector<std::uint32_t> a(size, 0);
    for (std::size_t i = 0; i < len; ++i) {
        std::int64_t r = j2[i] % static_cast<std::int64_t>(Mod);
        if (r < 0) r += Mod;
        a[i] = static_cast<std::uint32_t>(r);
    }
    Ntt<Mod> ntt;
    ntt.square_truncated(a, len);  // J^4
    ntt.square_truncated(a, len);  // J^8
    a.resize(len);
    a.shrink_to_fit();
    return a;
}

struct Garner {
    std::array<std::array<std::uint64_t, 5>, 5> inv{};  // inv[j][i] = m_j^{-1} mod m_i
    int256_t modulus = 1;
    int256_t half = 0;

    Garner() {
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < i; ++j)
                inv[j][i] = pow_mod(kModuli[j] % kModuli[i], kModuli[i] - 2, kModuli[i]);
        for (const auto m : kModuli) modulus *= m;
        half = modulus / 2;
    }

    int256_t reconstruct(const std::array<std::uint32_t, 5>& r) const {
        std::array<std::uint64_t, 5> digit{};
        for (std::size_t i = 0; i < 5; ++i) {
            std::uint64_t x = r[i];
            for (std::size_t j = 0; j < i; ++j) {
                const std::uint64_t mi = kModuli[i];
                x = (x + mi - digit[j] % mi) % mi * inv[j][i] % mi;
            }
            digit[i] = x;
        }
        int256_t v = digit[4];
        for (std::size_t i = 4; i-- > 0;) v = v * kModuli[i] + digit[i];
        if (v > half) v -= modulus;
        return v;
    }
};

int128 to_int128(const int256_t& v) {
    static const int256_t lim = int256_t(1) << 126;
    if (v >= lim || v <= -lim) throw RangeError("tau value exceeds the signed 128-bit range");
    const bool neg = v < 0;
    const int256_t mag = neg ? -v : v;
    const auto lo = static_cast<std::uint64_t>(mag & int256_t(~std::uint64_t{0}));
    const auto hi = static_cast<std::uint64_t>(mag >> 64);
    const int128 out = static_cast<int128>((static_cast<unsigned __int128>(hi) << 64) | lo);
    return neg ? -out : out;
}

double normalize(long double tau, std::uint64_t n) {
    return static_cast<double>(tau / std::pow(static_cast<long double>(n), 5.5L));
}

}  // namespace

TauTable::TauTable(std::uint32_t N, std::vector<int128> exact, std::vector<double> normalized)
    : N_(N), exact_(std::move(exact)), normalized_(std::move(normalized)) {}

int128 TauTable::value(std::uint64_t n) const {
    if (n == 0 || n > N_ || n >= exact_.size())
        throw RangeError("tau: exact value of tau(" + std::to_string(n) +
                             ") not available (table N = " + std::to_string(N_) +
                             ", exact to " + std::to_string(exact_limit()) + ")",
                         n);
    return exact_[n];
}

double TauTable::normalized(std::uint64_t n) const {
    if (n == 0 || n > N_)
        throw RangeError("tau: n = " + std::to_string(n) + " beyond table N = " + std::to_string(N_), n);
    return normalized_[n];
}

std::string to_string(int128 v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    auto mag = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
    std::string s;
    while (mag != 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(mag % 10)));
        mag /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

int128 parse_int128(const std::string& s) {
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) neg = s[i++] == '-';
    if (i == s.size()) throw PreconditionError("parse_int128: empty number");
    unsigned __int128 mag = 0;
    const auto cap = static_cast<unsigned __int128>(1) << 127;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw PreconditionError("parse_int128: bad digit in '" + s + "'");
        mag = mag * 10 + static_cast<unsigned>(s[i] - '0');
        if (mag >= cap) throw PreconditionError("parse_int128: '" + s + "' out of range");
    }
    const auto v = static_cast<int128>(mag);
    return neg ? -v : v;
}

TauTable tau_table(std::uint32_t N, TauMethod method, std::ostream* decimalOut) {
    if (N == 0 || N > kMaxTauN)
        throw PreconditionError("tau_table: N must lie in [1, " + std::to_string(kMaxTauN) +
                                "], got " + std::to_string(N));
    if (method == TauMethod::Automatic)
        method = N <= kPentagonalCutoff ? TauMethod::Pentagonal : TauMethod::MultiModular;

    const std::uint32_t exactN = std::min(N, kExactTauLimit);
    std::vector<int128> exact(exactN + 1, 0);
    std::vector<double> lambda(std::size_t{N} + 1, 0.0);

    if (method == TauMethod::Pentagonal) {
        if (N > kExactTauLimit)
            throw PreconditionError("tau_table: pentagonal route is limited to N <= 2^21");
        // tau(n) is the coefficient of q^{n-1} in prod (1 - q^n)^24
        const auto series = eta24_pentagonal(N);
        for (std::uint32_t n = 1; n <= N; ++n) {
            exact[n] = series[n - 1];
            lambda[n] = normalize(static_cast<long double>(exact[n]), n);
            if (decimalOut) *decimalOut << n << '\t' << to_string(exact[n]) << '\n';
        }
        return TauTable(N, std::move(exact), std::move(lambda));
    }

    const auto j2 = jacobi_cube_squared(N);
    std::array<std::vector<std::uint32_t>, 5> residues;
    residues[0] = eta24_mod<kModuli[0]>(j2, N);
    residues[1] = eta24_mod<kModuli[1]>(j2, N);
    residues[2] = eta24_mod<kModuli[2]>(j2, N);
    residues[3] = eta24_mod<kModuli[3]>(j2, N);
    residues[4] = eta24_mod<kModuli[4]>(j2, N);

    const Garner garner;
    for (std::uint32_t n = 1; n <= N; ++n) {
        std::array<std::uint32_t, 5> r{};
        for (std::size_t i = 0; i < 5; ++i) r[i] = residues[i][n - 1];
        const int256_t v = garner.reconstruct(r);
        if (n <= exactN) {
            exact[n] = to_int128(v);
            lambda[n] = normalize(static_cast<long double>(exact[n]), n);
        } else {
            lambda[n] = normalize(v.convert_to<long double>(), n);
        }
        if (decimalOut) *decimalOut << n << '\t' << v.str() << '\n';
    }
    return TauTable(N, std::move(exact), std::move(lambda));
}

TauTable load_tau_cache(const std::filesystem::path& path, std::uint32_t N) {
    if (N == 0 || N > kMaxTauN) throw PreconditionError("load_tau_cache: N out of range");
    std::ifstream in(path);
    if (!in) throw CacheError("cannot open tau cache: " + path.string());

    const std::uint32_t exactN = std::min(N, kExactTauLimit);
    std::vector<int128> exact(exactN + 1, 0);
    std::vector<double> lambda(std::size_t{N} + 1, 0.0);

    std::string line;
    std::uint32_t expected = 1;
    while (expected <= N && std::getline(in, line)) {
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw CacheError("tau cache line without tab: " + path.string());
        std::uint64_t n = 0;
        try {
            n = std::stoull(line.substr(0, tab));
        } catch (const std::exception&) {
            throw CacheError("tau cache has a malformed index: " + path.string());
        }
        if (n != expected) throw CacheError("tau cache is not ascending and contiguous: " + path.string());
        const std::string digits = line.substr(tab + 1);
        try {
            if (n <= exactN) {
                exact[n] = parse_int128(digits);
                lambda[n] = normalize(static_cast<long double>(exact[n]), n);
            } else {
                lambda[n] = normalize(std::stold(digits), n);
            }
        } catch (const std::exception&) {
            throw CacheError("tau cache has a malformed value at n = " + std::to_string(n));
        }
        ++expected;
    }
    if (expected <= N)
        throw CacheError("tau cache covers n <= " + std::to_string(expected - 1) + ", need " +
                         std::to_string(N));
    if (N >= 2 && exact[2] != -24) throw CacheError("tau cache fails the tau(2) = -24 check");
    if (exact[1] != 1) throw CacheError("tau cache fails the tau(1) = 1 check");
    return TauTable(N, std::move(exact), std::move(lambda));
}

}  // namespace qtwist::coeffs
