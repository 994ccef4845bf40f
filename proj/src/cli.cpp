#include "qtwist/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include "qtwist/arith.hpp"
#include "qtwist/coeffs.hpp"
#include "qtwist/density.hpp"
#include "qtwist/errors.hpp"
#include "qtwist/poisson.hpp"
#include "qtwist/testfn.hpp"

namespace qtwist::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct RunConfig {
    std::string command;
    std::string familyKind = "gl1";
    std::string testKind = "fejer";
    double sigma = 1.0;
    double weightA = 1.0;
    double weightB = 2.0;
    std::vector<double> X;
    std::string mode = "simplified";
    double Z = std::numeric_limits<double>::quiet_NaN();
    double poissonC = 1.25;
    double poissonHeight = 1000.0;
    double poissonStep = 0.05;
    unsigned threads = 1;
    std::string cacheDir;
    std::string out;
    std::string format = "text";
    std::vector<std::uint64_t> q;
    std::uint64_t limit = 1000000;
    std::uint32_t N = 1000;
    double x = 1e6;
    std::vector<double> sweepSigma{0.5, 0.8, 1.0};
    std::uint64_t pMax = 0;
};

const std::vector<std::string> kKeys = {
    "family.kind", "test.kind", "test.sigma", "weight.a", "weight.b", "run.X", "run.mode", "run.Z",
    "poisson.c", "poisson.height", "poisson.step", "threads", "cache.dir", "out", "format",
    "q", "limit", "N", "x", "sweep.sigma", "pmax"};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double v, int digits = 15) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string key_list() {
    std::string s;
    for (const auto& k : kKeys) s += (s.empty() ? "" : ", ") + k;
    return s;
}

// ---- shared builders ---------------------------------------------------

std::optional<fs::path> cache_dir(const RunConfig& cfg) {
    if (!cfg.cacheDir.empty()) return fs::path(cfg.cacheDir);
    if (const char* env = std::getenv(kCacheDirEnv); env && *env) return fs::path(env);
    return std::nullopt;
}

std::shared_ptr<const arith::ArithTables> make_tables(std::uint64_t limit) {
    return std::make_shared<const arith::ArithTables>(arith::ArithTables::build(std::max<std::uint64_t>(limit, 16)));
}

// Cache files are named tau_<N>.tsv; any file with N' >= N serves.
std::shared_ptr<const coeffs::TauTable> make_tau(std::uint32_t N, const RunConfig& cfg, std::ostream& err) {
    if (N > coeffs::kMaxTauN)
        throw RangeError("tau table of size " + std::to_string(N) + " exceeds the cap 2^24", N);
    const auto dir = cache_dir(cfg);
    if (dir && fs::is_directory(*dir)) {
        std::optional<std::pair<std::uint32_t, fs::path>> best;
        for (const auto& entry : fs::directory_iterator(*dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("tau_", 0) != 0 || entry.path().extension() != ".tsv") continue;
            std::uint64_t n = 0;
            try {
                n = std::stoull(name.substr(4, name.size() - 8));
            } catch (const std::exception&) {
                continue;
            }
            if (n >= N && n <= coeffs::kMaxTauN && (!best || n < best->first))
                best = {{static_cast<std::uint32_t>(n), entry.path()}};
        }
        if (best) {
            auto table = std::make_shared<const coeffs::TauTable>(coeffs::load_tau_cache(best->second, N));
            err << "qtwist: tau cache hit " << best->second.string() << " (N = " << N << ")\n";
            return table;
        }
    }
    if (!dir) return std::make_shared<const coeffs::TauTable>(coeffs::tau_table(N));

    fs::create_directories(*dir);
    const fs::path final = *dir / ("tau_" + std::to_string(N) + ".tsv");
    const fs::path tmp = *dir / ("tau_" + std::to_string(N) + ".tsv.tmp");
    std::ofstream os(tmp);
    if (!os) throw CacheError("cannot write tau cache: " + tmp.string());
    auto table = std::make_shared<const coeffs::TauTable>(coeffs::tau_table(N, coeffs::TauMethod::Automatic, &os));
    os.close();
    if (!os) throw CacheError("failed writing tau cache: " + tmp.string());
    fs::rename(tmp, final);
    err << "qtwist: tau cache miss, wrote " << final.string() << "\n";
    return table;
}

coeffs::ProviderPtr make_provider(const std::string& kind, std::uint32_t tauN, const RunConfig& cfg,
                                  std::ostream& err) {
    if (kind == "gl1") return coeffs::provider_gl1();
    if (kind == "delta") return coeffs::provider_delta(make_tau(tauN, cfg, err));
    if (kind == "sym2delta") return coeffs::provider_sym2_delta(make_tau(tauN, cfg, err));
    throw UsageError("unknown family.kind '" + kind + "' (valid: gl1, delta, sym2delta)");
}

int degree_of(const std::string& kind) {
    if (kind == "gl1") return 1;
    if (kind == "delta") return 2;
    if (kind == "sym2delta") return 3;
    throw UsageError("unknown family.kind '" + kind + "' (valid: gl1, delta, sym2delta)");
}

testfn::TestFunctionPair make_pair(const RunConfig& cfg, double sigma) {
    if (cfg.testKind != "fejer") throw UsageError("unknown test.kind '" + cfg.testKind + "' (valid: fejer)");
    return testfn::fejer_pair(sigma);
}

poisson::MellinContour make_contour(const RunConfig& cfg) {
    poisson::MellinContour c{cfg.poissonC, cfg.poissonHeight, cfg.poissonStep};
    c.validate();
    return c;
}

std::optional<double> z_of(const RunConfig& cfg) {
    if (std::isnan(cfg.Z)) return std::nullopt;
    return cfg.Z;
}

bool want_json(const RunConfig& cfg) { return cfg.format == "json"; }

// ---- commands ----------------------------------------------------------

int cmd_sieve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::vector<std::uint64_t> primes;
    std::string cache = "off";
    const auto dir = cache_dir(cfg);
    const fs::path file = dir ? *dir / ("primes_" + std::to_string(cfg.limit) + ".bin") : fs::path{};
    if (dir && fs::exists(file)) {
        primes = arith::read_prime_cache(file);
        cache = "hit";
        err << "qtwist: prime cache hit " << file.string() << "\n";
    } else {
        const auto tables = arith::ArithTables::build(cfg.limit);
        primes.assign(tables.primes().begin(), tables.primes().end());
        if (dir) {
            fs::create_directories(*dir);
            arith::write_prime_cache(file, tables.primes());
            cache = "miss";
            err << "qtwist: prime cache miss, wrote " << file.string() << "\n";
        }
    }
    const std::uint64_t largest = primes.empty() ? 0 : primes.back();
    if (want_json(cfg)) {
        json j;
        j["limit"] = cfg.limit;
        j["prime_count"] = primes.size();
        j["largest_prime"] = largest;
        j["cache"] = cache;
        out << j.dump() << "\n";
    } else {
        out << "limit " << cfg.limit << " primes " << primes.size() << " largest " << largest << "\n";
    }
    return kExitOk;
}

int cmd_tau(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto tau = make_tau(cfg.N, cfg, err);
    const std::uint32_t n = cfg.N;
    const bool exact = n <= tau->exact_limit();
    if (want_json(cfg)) {
        json j;
        j["N"] = n;
        j["tau_N"] = exact ? coeffs::to_string(tau->value(n)) : std::string();
        j["lambda_N"] = tau->normalized(n);
        j["exact_limit"] = tau->exact_limit();
        out << j.dump() << "\n";
    } else {
        out << "N " << n << " tau(N) " << (exact ? coeffs::to_string(tau->value(n)) : std::string("-"))
            << " lambda(N) " << num(tau->normalized(n)) << "\n";
    }
    return kExitOk;
}

int run_density(const RunConfig& cfg, const std::vector<double>& sigmas, std::ostream& out, std::ostream& err) {
    if (cfg.X.empty()) throw UsageError("density needs at least one --X value");
    const int M = degree_of(cfg.familyKind);
    const density::Mode mode = density::parse_mode(cfg.mode);
    for (double s : sigmas) density::FamilySpec::check_admissible(M, s);
    double tableLimit = 0.0;
    double tauLimit = 0.0;
    for (double X : cfg.X)
        for (double s : sigmas) {
            tableLimit = std::max({tableLimit, std::ceil(X * cfg.weightB), std::floor(std::pow(X, M * s))});
            tauLimit = std::max(tauLimit, std::floor(std::pow(X, M * s)));
        }
    if (tableLimit >= static_cast<double>(arith::kMaxTableLimit))
        throw RangeError("density needs a sieve to " + num(tableLimit) + ", above the cap 2^31",
                         static_cast<std::uint64_t>(tableLimit));
    if (M > 1 && tauLimit > coeffs::kMaxTauN)
        throw RangeError("density needs tau up to " + num(tauLimit) + ", above the cap 2^24",
                         static_cast<std::uint64_t>(tauLimit));
    const auto provider = make_provider(cfg.familyKind, static_cast<std::uint32_t>(std::max(2.0, tauLimit)), cfg, err);
    const auto tables = make_tables(static_cast<std::uint64_t>(tableLimit) + 1);
    const auto weight = testfn::bump_weight(cfg.weightA, cfg.weightB);

    std::vector<density::DensityReport> reports;
    for (double s : sigmas)
        for (double X : cfg.X) {
            const density::FamilySpec spec(X, weight, provider, make_pair(cfg, s), mode, z_of(cfg));
            reports.push_back(density::density(spec, tables, {cfg.threads}));
            err << "qtwist: X = " << num(X) << " sigma = " << num(s) << " done in "
                << num(reports.back().wallTimeSeconds, 4) << " s\n";
        }
    if (want_json(cfg)) {
        out << "[";
        for (std::size_t i = 0; i < reports.size(); ++i) out << (i ? "," : "") << density::to_json(reports[i]);
        out << "]\n";
    } else {
        out << density::csv_header() << "\n";
        for (const auto& r : reports) out << density::to_csv_row(r) << "\n";
    }
    return kExitOk;
}

int cmd_poisson(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const std::vector<std::uint64_t> qs = cfg.q.empty() ? std::vector<std::uint64_t>{3, 5, 7, 11, 13} : cfg.q;
    const std::vector<double> Xs = cfg.X.empty() ? std::vector<double>{5.0, 50.0} : cfg.X;
    const poisson::DualKernels kernels(testfn::bump_weight(cfg.weightA, cfg.weightB), make_contour(cfg));
    double worst = 0.0;
    json rows = json::array();
    for (std::uint64_t q : qs)
        for (double X : Xs) {
            const auto r = poisson::poisson_check(q, kernels, X);
            const double diff = std::fabs(r.lhs - r.rhs);
            worst = std::max(worst, diff);
            if (want_json(cfg)) {
                rows.push_back({{"q", q}, {"X", X}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"diff", diff}, {"mTerms", r.mTerms}});
            } else {
                out << q << " " << num(X) << " " << num(r.lhs) << " " << num(r.rhs) << " " << num(diff, 3) << " "
                    << r.mTerms << "\n";
            }
        }
    const bool pass = worst <= 1e-6;
    if (want_json(cfg)) {
        out << json{{"checks", rows}, {"max_diff", worst}, {"pass", pass}}.dump() << "\n";
    } else {
        out << (pass ? "PASS diff<1e-6" : "FAIL max diff " + num(worst, 3) + " >= 1e-6") << "\n";
    }
    return pass ? kExitOk : kExitAccuracy;
}

int cmd_gauss(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    std::vector<std::uint64_t> qs = cfg.q;
    if (qs.empty())
        for (std::uint64_t q = 3; q < 200; q += 2)
            if (poisson::is_prime(q)) qs.push_back(q);
    double worst = 0.0;
    json rows = json::array();
    for (std::uint64_t q : qs) {
        const auto g = poisson::gauss_sum(q);
        const double root = std::sqrt(static_cast<double>(q));
        const std::complex<double> expected = (q & 3) == 1 ? std::complex<double>(root, 0.0)
                                                            : std::complex<double>(0.0, root);
        const double rel = std::abs(g - expected) / root;
        worst = std::max(worst, rel);
        if (want_json(cfg)) {
            rows.push_back({{"q", q}, {"re", g.real()}, {"im", g.imag()}, {"rel_err", rel}});
        } else {
            out << q << " " << num(g.real()) << " " << num(g.imag()) << " " << num(rel, 3) << "\n";
        }
    }
    const bool pass = worst <= 1e-9;
    if (want_json(cfg)) {
        out << json{{"checks", rows}, {"max_rel_err", worst}, {"pass", pass}}.dump() << "\n";
    } else {
        out << (pass ? "PASS err<1e-9 sqrt(q)" : "FAIL max relative error " + num(worst, 3)) << "\n";
    }
    return pass ? kExitOk : kExitAccuracy;
}

int cmd_delta(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!(cfg.x >= 2.0)) throw UsageError("delta-check needs --x >= 2");
    const auto limit = static_cast<std::uint64_t>(std::floor(cfg.x));
    if (limit > coeffs::kMaxTauN && cfg.familyKind != "gl1")
        throw RangeError("delta-check needs tau up to " + std::to_string(limit) + ", above the cap 2^24", limit);
    const auto provider = make_provider(cfg.familyKind, static_cast<std::uint32_t>(std::min<std::uint64_t>(limit, coeffs::kMaxTauN)), cfg, err);
    const auto tables = make_tables(limit);
    const double value = coeffs::delta_empirical(*provider, cfg.x, *tables);
    if (want_json(cfg)) {
        out << json{{"family", provider->label()}, {"x", cfg.x}, {"delta_empirical", value},
                    {"delta_pi", provider->delta_pi()}}.dump()
            << "\n";
    } else {
        out << provider->label() << " x " << num(cfg.x) << " delta_empirical " << num(value) << " delta_pi "
            << provider->delta_pi() << "\n";
    }
    return kExitOk;
}

int cmd_kernel(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const auto pair = make_pair(cfg, cfg.sigma);
    const double p = testfn::rmt_prediction(pair);
    if (want_json(cfg)) {
        out << json{{"sigma", cfg.sigma}, {"prediction", p}}.dump() << "\n";
    } else {
        out << "sigma " << num(cfg.sigma) << " prediction " << num(p, 17) << "\n";
    }
    return kExitOk;
}

int cmd_split(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const std::vector<double> Xs = cfg.X.empty() ? std::vector<double>{1e4} : cfg.X;
    const int M = degree_of(cfg.familyKind);
    density::FamilySpec::check_admissible(M, cfg.sigma);
    double tableLimit = 0.0;
    for (double X : Xs)
        tableLimit = std::max({tableLimit, std::ceil(X * cfg.weightB), std::floor(std::pow(X, M * cfg.sigma))});
    const auto provider = make_provider(cfg.familyKind,
                                        static_cast<std::uint32_t>(std::min<double>(
                                            std::max(2.0, std::floor(std::pow(Xs.back(), M * cfg.sigma))), coeffs::kMaxTauN)),
                                        cfg, err);
    const auto tables = make_tables(static_cast<std::uint64_t>(tableLimit) + 1);
    const auto weight = testfn::bump_weight(cfg.weightA, cfg.weightB);
    const auto pair = make_pair(cfg, cfg.sigma);

    bool pass = true;
    json rows = json::array();
    for (double X : Xs) {
        std::vector<double> zs;
        if (auto z = z_of(cfg)) {
            zs = {*z};
        } else {
            const double l = std::log(X);
            zs = {1.0, 10.0, l * l * l, std::sqrt(X * cfg.weightB)};
        }
        for (double Z : zs) {
            const density::FamilySpec spec(X, weight, provider, pair, density::Mode::Simplified, Z);
            const auto s = density::s_split(spec, tables, {cfg.threads});
            const double rel = std::fabs(s.sM + s.sR - s.s) / std::max(std::fabs(s.s), 1e-300);
            pass = pass && rel <= 1e-9;
            if (want_json(cfg)) {
                rows.push_back({{"X", X}, {"Z", Z}, {"sM", s.sM}, {"sR", s.sR}, {"S", s.s}, {"rel_err", rel}});
            } else {
                out << num(X) << " " << num(Z) << " " << num(s.sM) << " " << num(s.sR) << " " << num(s.s) << " "
                    << num(rel, 3) << "\n";
            }
        }
    }
    json dual;
    if (cfg.pMax > 0) {
        const density::FamilySpec spec(Xs.front(), weight, provider, pair, density::Mode::Simplified, z_of(cfg));
        const auto d = density::s_m_dual(spec, *tables, make_contour(cfg), cfg.pMax);
        pass = pass && d.maxTermDeviation <= 1e-5;
        if (want_json(cfg)) {
            dual = {{"pmax", cfg.pMax}, {"dual", d.dual}, {"direct", d.direct}, {"max_term_dev", d.maxTermDeviation}};
        } else {
            out << "dual pmax " << cfg.pMax << " " << num(d.dual) << " " << num(d.direct) << " "
                << num(d.maxTermDeviation, 3) << "\n";
        }
    }
    if (want_json(cfg)) {
        json j{{"checks", rows}, {"pass", pass}};
        if (!dual.is_null()) j["dual"] = dual;
        out << j.dump() << "\n";
    } else {
        out << (pass ? "PASS" : "FAIL") << "\n";
    }
    return pass ? kExitOk : kExitAccuracy;
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.format != "text" && cfg.format != "json" && cfg.format != "csv")
        throw UsageError("unknown format '" + cfg.format + "' (valid: text, csv, json)");
    if (cfg.threads == 0) throw UsageError("threads must be >= 1");
    const std::string& c = cfg.command;
    if (c == "sieve") return cmd_sieve(cfg, out, err);
    if (c == "tau") return cmd_tau(cfg, out, err);
    if (c == "density") return run_density(cfg, {cfg.sigma}, out, err);
    if (c == "density-sweep") return run_density(cfg, cfg.sweepSigma, out, err);
    if (c == "poisson-check") return cmd_poisson(cfg, out, err);
    if (c == "gauss-check") return cmd_gauss(cfg, out, err);
    if (c == "delta-check") return cmd_delta(cfg, out, err);
    if (c == "kernel") return cmd_kernel(cfg, out, err);
    if (c == "split-check") return cmd_split(cfg, out, err);
    throw UsageError("unknown command '" + c + "'");
}

}  // namespace

const std::vector<std::string>& config_keys() { return kKeys; }

std::map<std::string, std::string> read_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open config file: " + path.string());
    std::map<std::string, std::string> entries;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
            throw PreconditionError(path.string() + ":" + std::to_string(lineNo) + ": expected 'key = value'");
        entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return entries;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::string configPath;

    CLI::App app{"qtwist: one-level density of quadratic twist families"};
    app.name("qtwist");
    app.require_subcommand(1, 1);
    std::map<std::string, CLI::Option*> keyed;
    auto opt = [&](const std::string& key, const std::string& names, auto& var, const std::string& desc) {
        CLI::Option* o = app.add_option(names, var, desc);
        keyed[key] = o;
        return o;
    };
    opt("family.kind", "--family.kind,--family", cfg.familyKind, "gl1 | delta | sym2delta")
        ->check(CLI::IsMember({"gl1", "delta", "sym2delta"}));
    opt("test.kind", "--test.kind", cfg.testKind, "test function: fejer");
    opt("test.sigma", "--test.sigma,--sigma", cfg.sigma, "Fourier support of the test function");
    opt("weight.a", "--weight.a", cfg.weightA, "left end of the weight support");
    opt("weight.b", "--weight.b", cfg.weightB, "right end of the weight support");
    opt("run.X", "--run.X,--X", cfg.X, "family sizes, comma separated")->delimiter(',');
    opt("run.mode", "--run.mode,--mode", cfg.mode, "simplified | full")
        ->check(CLI::IsMember({"simplified", "full"}));
    opt("run.Z", "--run.Z,--Z", cfg.Z, "Moebius split cutoff (default log^3 X)");
    opt("poisson.c", "--poisson.c", cfg.poissonC, "contour abscissa, > 1");
    opt("poisson.height", "--poisson.height", cfg.poissonHeight, "contour half height");
    opt("poisson.step", "--poisson.step", cfg.poissonStep, "contour trapezoid step");
    opt("threads", "--threads", cfg.threads, "worker threads for density sums");
    opt("cache.dir", "--cache.dir", cfg.cacheDir, std::string("cache directory (default $") + kCacheDirEnv + ")");
    opt("out", "--out,-o", cfg.out, "write the report here instead of stdout");
    opt("format", "--format", cfg.format, "text | csv | json");
    opt("q", "--q", cfg.q, "prime moduli, comma separated")->delimiter(',');
    opt("limit", "--limit", cfg.limit, "sieve limit");
    opt("N", "--N", cfg.N, "tau table size");
    opt("x", "--x", cfg.x, "cutoff for delta-check");
    opt("sweep.sigma", "--sweep.sigma", cfg.sweepSigma, "sigma values for density-sweep")->delimiter(',');
    opt("pmax", "--pmax", cfg.pMax, "split-check: also compare the dual route for odd p <= pmax");
    app.add_option("--config", configPath, "flat key = value config file; flags override it");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"sieve", "sieve primes and Moebius values, report counts"},
        {"tau", "Ramanujan tau table"},
        {"density", "one-level density for each X"},
        {"density-sweep", "density over sweep.sigma x run.X"},
        {"poisson-check", "both sides of the Poisson identity for (./q)"},
        {"gauss-check", "quadratic Gauss sums against i^a sqrt(q)"},
        {"delta-check", "sum of a(p^2) log p / x"},
        {"kernel", "symplectic prediction for the Fejer pair"},
        {"split-check", "S = S_M + S_R and the dual route for S_M"}};
    for (const auto& [name, desc] : commands) {
        app.add_subcommand(name, desc)->fallthrough();
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "qtwist: " << e.what() << "\n";
        return kExitUsage;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        if (!configPath.empty()) {
            for (const auto& [key, value] : read_config_file(configPath)) {
                const auto it = keyed.find(key);
                if (it == keyed.end())
                    throw UsageError("unknown config key '" + key + "'; valid keys: " + key_list());
                if (it->second->count() > 0) continue;
                it->second->add_result(value);
                it->second->run_callback();
            }
        }
    } catch (const CLI::Error& e) {
        err << "qtwist: config: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "qtwist: " << e.what() << "\n";
        return kExitUsage;
    } catch (const PreconditionError& e) {
        err << "qtwist: " << e.what() << "\n";
        return kExitUsage;
    }

    std::ofstream file;
    std::ostream* sink = &out;
    if (!cfg.out.empty()) {
        file.open(cfg.out);
        if (!file) {
            err << "qtwist: cannot write " << cfg.out << "\n";
            return kExitUsage;
        }
        sink = &file;
    }
    try {
        return dispatch(cfg, *sink, err);
    } catch (const UsageError& e) {
        err << "qtwist: " << e.what() << "\n";
        return kExitUsage;
    } catch (const PreconditionError& e) {
        err << "qtwist: " << e.what() << "\n";
        return kExitUsage;
    } catch (const RangeError& e) {
        err << "qtwist: " << e.what();
        if (e.required() > 0) err << " (required limit " << e.required() << ")";
        err << "\n";
        return kExitRange;
    } catch (const CacheError& e) {
        err << "qtwist: " << e.what() << "\n";
        return kExitRange;
    } catch (const fs::filesystem_error& e) {
        err << "qtwist: " << e.what() << "\n";
        return kExitRange;
    } catch (const AccuracyError& e) {
        err << "qtwist: accuracy contract violated: " << e.what() << "\n";
        return kExitAccuracy;
    }
}

}  // namespace qtwist::cli
