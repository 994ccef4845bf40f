#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>

#include "oracles.hpp"
#include "qtwist/arith.hpp"
#include "qtwist/errors.hpp"

using namespace qtwist;
using namespace qtwist::arith;

TEST_CASE("build_tables small cases") {
    const auto t = build_tables(10);
    const std::vector<std::uint32_t> primes(t.primes().begin(), t.primes().end());
    CHECK(primes == std::vector<std::uint32_t>{2, 3, 5, 7});
    CHECK(t.moebius(1) == 1);
    CHECK(t.moebius(4) == 0);
    CHECK(t.moebius(6) == 1);
    CHECK(build_tables(50).moebius(30) == -1);
    CHECK(t.limit() == 10);
    CHECK(t.covers(10));
    CHECK_FALSE(t.covers(11));
}

TEST_CASE("build_tables rejects bad limits") {
    CHECK_THROWS_AS(build_tables(1), PreconditionError);
    CHECK_THROWS_AS(build_tables(0), PreconditionError);
    CHECK_THROWS_AS(build_tables(kMaxTableLimit + 1), PreconditionError);
    const auto t = build_tables(100);
    CHECK_THROWS_AS(t.moebius(0), RangeError);
    CHECK_THROWS_AS(t.moebius(101), RangeError);
}

TEST_CASE("primes agree with trial division up to 10^4") {
    const auto t = build_tables(10000, 256);
    std::vector<std::uint32_t> expected;
    for (std::uint32_t n = 2; n <= 10000; ++n)
        if (oracle::is_prime(n)) expected.push_back(n);
    const std::vector<std::uint32_t> got(t.primes().begin(), t.primes().end());
    CHECK(got == expected);
    for (std::uint64_t x : {0, 1, 2, 3, 100, 7919, 10000})
        CHECK(t.prime_count_upto(x) == static_cast<std::size_t>(std::count_if(
                                           expected.begin(), expected.end(), [x](auto p) { return p <= x; })));
}

TEST_CASE("moebius matches the factorization oracle and the divisor-sum identity") {
    const std::uint64_t L = 20000;
    const auto t = build_tables(L, 1000);
    std::vector<int> divisorSum(L + 1, 0);
    for (std::uint64_t d = 1; d <= L; ++d) {
        REQUIRE(t.moebius(d) == oracle::moebius(d));
        for (std::uint64_t m = d; m <= L; m += d) divisorSum[m] += t.moebius(d);
    }
    CHECK(divisorSum[1] == 1);
    bool allZero = true;
    for (std::uint64_t n = 2; n <= L; ++n) allZero = allZero && divisorSum[n] == 0;
    CHECK(allZero);
    for (std::uint64_t n = 1; n <= 2000; ++n)
        CHECK(t.squarefree_odd(n) == ((n & 1) == 1 && oracle::moebius(n) != 0));
}

TEST_CASE("pi(10^6) = 78498 at two segment sizes") {
    const auto a = build_tables(1000000);
    const auto b = build_tables(1000000, 4099);
    CHECK(a.primes().size() == 78498);
    CHECK(std::equal(a.primes().begin(), a.primes().end(), b.primes().begin(), b.primes().end()));
    bool same = true;
    for (std::uint64_t n = 1; n <= 1000000; ++n) same = same && a.moebius(n) == b.moebius(n);
    CHECK(same);
}

TEST_CASE("kronecker examples") {
    CHECK(kronecker(8, 3) == -1);
    for (std::int64_t n = 1; n < 200; ++n) CHECK(kronecker(1, n) == 1);
    CHECK(kronecker(40, 5) == 0);
    CHECK(kronecker(8 * 7, 7) == 0);
    CHECK(kronecker(24, 7) == kronecker(3, 7));
    for (std::int64_t a = 0; a < 7; ++a) CHECK(kronecker(a, 7) == oracle::euler(a, 7));
    CHECK_THROWS_AS(kronecker(0, 0), PreconditionError);
}

TEST_CASE("kronecker agrees with Euler's criterion on odd primes") {
    for (std::uint64_t p = 3; p < 400; p += 2) {
        if (!oracle::is_prime(p)) continue;
        for (std::int64_t a = -2 * static_cast<std::int64_t>(p); a <= 2 * static_cast<std::int64_t>(p); ++a)
            REQUIRE(kronecker(a, static_cast<std::int64_t>(p)) == oracle::euler(a, p));
    }
}

TEST_CASE("kronecker agrees with the definition for all sign and parity cases") {
    auto g = oracle::rng();
    std::uniform_int_distribution<std::int64_t> da(-100000, 100000), dn(-5000, 5000);
    for (int i = 0; i < 5000; ++i) {
        const std::int64_t a = da(g), n = dn(g);
        if (a == 0 && n == 0) continue;
        REQUIRE_MESSAGE(kronecker(a, n) == oracle::kronecker(a, n), "a=" << a << " n=" << n);
    }
    for (std::int64_t a = -20; a <= 20; ++a)
        for (std::int64_t n = -20; n <= 20; ++n)
            if (a != 0 || n != 0) REQUIRE(kronecker(a, n) == oracle::kronecker(a, n));
}

TEST_CASE("jacobi agrees with the factorization oracle") {
    auto g = oracle::rng(7);
    std::uniform_int_distribution<std::uint64_t> da(0, 1u << 30), dn(0, 1u << 20);
    for (int i = 0; i < 5000; ++i) {
        const std::uint64_t a = da(g), n = 2 * dn(g) + 1;
        REQUIRE(jacobi(a, n) == oracle::kronecker(static_cast<std::int64_t>(a), static_cast<std::int64_t>(n)));
    }
    CHECK(jacobi(0, 1) == 1);
    CHECK(jacobi(UINT64_MAX, 3) == oracle::kronecker(static_cast<std::int64_t>(UINT64_MAX % 3), 3));
}

TEST_CASE("kronecker is multiplicative in the top argument") {
    auto g = oracle::rng(11);
    std::uniform_int_distribution<std::int64_t> da(-30000, 30000), dn(0, 50000);
    for (int i = 0; i < 1000; ++i) {
        const std::int64_t a = da(g), b = da(g), n = 2 * dn(g) + 1;
        REQUIRE(kronecker(a, n) * kronecker(b, n) == kronecker(a * b, n));
    }
}

TEST_CASE("chi8d examples and contract") {
    CHECK(chi8d(1, 2) == 0);
    CHECK(chi8d(1, 7) == 1);
    CHECK(chi8d(3, 5) == kronecker(24, 5));
    CHECK(chi8d(3, 5) == 1);
    CHECK_THROWS_AS(chi8d(2, 5), PreconditionError);
    CHECK_THROWS_AS(chi8d(9, 5), PreconditionError);
    CHECK_THROWS_AS(chi8d(0, 5), PreconditionError);
}

TEST_CASE("chi8d is periodic, vanishes exactly on common factors, and is completely multiplicative") {
    auto g = oracle::rng(3);
    std::uniform_int_distribution<std::uint64_t> dm(1, 3000);
    for (std::uint64_t d : {1, 3, 5, 15, 21, 105, 1155, 3003}) {
        for (std::uint64_t n = 1; n <= 16 * d; ++n) {
            const int c = chi8d(d, n);
            REQUIRE(c == chi8d(d, n + 8 * d));
            REQUIRE((c == 0) == (std::gcd(n, 8 * d) > 1));
        }
        for (int i = 0; i < 300; ++i) {
            const std::uint64_t m = dm(g), n = dm(g);
            REQUIRE(chi8d(d, m * n) == chi8d(d, m) * chi8d(d, n));
        }
    }
}

TEST_CASE("mz_rz examples") {
    auto check = [](std::uint64_t d, double Z, std::int64_t m, std::int64_t r) {
        const auto s = mz_rz(d, Z);
        CHECK(s.mz == m);
        CHECK(s.rz == r);
    };
    check(9, 3, 0, 0);
    check(5, 1, 1, 0);
    check(49, 1, 1, -1);
    CHECK_THROWS_AS(mz_rz(0, 1), PreconditionError);
}

TEST_CASE("mz_rz splits mu^2 exactly for d <= 10^5") {
    const auto t = build_tables(100000);
    for (double Z : {1.0, 10.0, 100.0}) {
        bool ok = true;
        for (std::uint64_t d = 1; d <= 100000; ++d) {
            const auto s = mz_rz(d, Z, t);
            const int mu = t.moebius(d);
            ok = ok && s.mz + s.rz == mu * mu;
        }
        CHECK(ok);
    }
}

TEST_CASE("mz_rz matches the definition by square divisors") {
    const auto t = build_tables(5000);
    for (std::uint64_t d = 1; d <= 5000; ++d)
        for (double Z : {1.0, 2.5, 7.0, 30.0}) {
            std::int64_t m = 0, r = 0;
            for (std::uint64_t l = 1; l * l <= d; ++l)
                if (d % (l * l) == 0) (static_cast<double>(l) <= Z ? m : r) += oracle::moebius(l);
            const auto a = mz_rz(d, Z);
            const auto b = mz_rz(d, Z, t);
            REQUIRE(a.mz == m);
            REQUIRE(a.rz == r);
            REQUIRE(b.mz == m);
            REQUIRE(b.rz == r);
        }
}

TEST_CASE("factorize reconstructs n") {
    const auto t = build_tables(1000);
    for (std::uint64_t n : {1ull, 2ull, 97ull, 360ull, 1001ull, 999983ull, 1ull << 40, 600851475143ull}) {
        for (const auto& f : {factorize(n), factorize(n, t)}) {
            std::uint64_t prod = 1;
            for (auto [p, e] : f) {
                CHECK(oracle::is_prime(p));
                for (int i = 0; i < e; ++i) prod *= p;
            }
            CHECK(prod == n);
        }
    }
    CHECK(is_squarefree(1155));
    CHECK_FALSE(is_squarefree(1156));
}

TEST_CASE("prime cache round trip and validation") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qtwist_test_arith";
    fs::create_directories(dir);
    const fs::path file = dir / "primes.bin";
    const auto t = build_tables(100000);
    write_prime_cache(file, t.primes());
    CHECK(fs::file_size(file) == 8 * (t.primes().size() + 1));
    const auto back = read_prime_cache(file);
    CHECK(std::equal(back.begin(), back.end(), t.primes().begin(), t.primes().end()));

    fs::resize_file(file, fs::file_size(file) - 8);
    CHECK_THROWS_AS(read_prime_cache(file), CacheError);
    {
        std::ofstream out(file, std::ios::binary);
        const unsigned char bytes[24] = {2, 0, 0, 0, 0, 0, 0, 0, 4, 0, 0, 0, 0, 0, 0, 0, 3, 0, 0, 0, 0, 0, 0, 0};
        out.write(reinterpret_cast<const char*>(bytes), sizeof bytes);
    }
    CHECK_THROWS_AS(read_prime_cache(file), CacheError);
    CHECK_THROWS_AS(read_prime_cache(dir / "missing.bin"), CacheError);
    fs::remove_all(dir);
}
