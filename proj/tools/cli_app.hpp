// cli_app.hpp
// The `toeplitz` command line: digits, verify and report <kind>.
// Exit codes: 0 success, 1 verification failure, 2 usage/config error.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "toeplitz/analytics.hpp"
#include "toeplitz/digit_stream.hpp"
#include "toeplitz/prime_engine.hpp"
#include "toeplitz/report_io.hpp"

namespace toeplitz::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2 };

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Accepts plain integers and scientific notation ("1e6", "2.5e3") when the
// value is an exact positive integer.
inline std::uint64_t parse_count(const std::string& s, const char* what) {
    if (s.empty()) throw ConfigError(std::string(what) + ": empty value");
    bool digits_only = s.find_first_not_of("0123456789") == std::string::npos;
    if (digits_only) {
        try {
            return detail::parse_uint_token(s);
        } catch (const std::exception&) {
            throw ConfigError(std::string(what) + ": value out of range '" + s + "'");
        }
    }
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError(std::string(what) + ": not a number '" + s + "'");
    }
    if (pos != s.size() || !(v >= 0.0) || v > 9.2e18 || std::floor(v) != v) {
        throw ConfigError(std::string(what) + ": not a nonnegative integer '" + s + "'");
    }
    return static_cast<std::uint64_t>(v);
}

inline std::vector<std::uint64_t> parse_grid(const std::string& s) {
    std::vector<std::uint64_t> g;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) g.push_back(parse_count(tok, "--grid"));
    if (g.empty()) throw ConfigError("--grid: empty");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] == 0) throw ConfigError("--grid: checkpoints must be positive");
        if (i && g[i] <= g[i - 1]) throw ConfigError("--grid: checkpoints must be strictly increasing");
    }
    return g;
}

struct RunConfig {
    std::string spec_text;
    std::string base = "2";
    std::string n;
    std::string a = "1";
    std::string grid;
    std::string p_limit;
    std::string tail_limit;
    std::string segment;
    unsigned workers = default_workers();
    std::string out_path;
    std::string format;
    std::string check_file;
    std::string kind;
};

struct Resolved {
    PrimeSetSpec spec = PrimeSetSpec::all();
    unsigned base = 2;
    SegmentOptions seg;
};

inline Resolved resolve(const RunConfig& c) {
    Resolved r;
    try {
        r.spec = parse_spec(c.spec_text);
    } catch (const SpecParseError& e) {
        throw ConfigError("--spec: " + std::string(e.what()));
    }
    const auto b = parse_count(c.base, "--base");
    if (b < 2 || b > 1'000'000) throw ConfigError("--base: must be in [2, 1000000]");
    r.base = static_cast<unsigned>(b);
    r.seg.segment_length = c.segment.empty() ? default_segment_length() : parse_count(c.segment, "--segment");
    if (r.seg.segment_length == 0) throw ConfigError("--segment: must be positive");
    if (c.workers == 0) throw ConfigError("--workers: must be positive");
    r.seg.workers = c.workers;
    return r;
}

inline ConfigEcho echo(const RunConfig& c, const Resolved& r) {
    ConfigEcho e{{"spec", r.spec.to_string()}, {"base", std::to_string(r.base)}};
    if (!c.n.empty()) e.emplace_back("n", c.n);
    if (!c.grid.empty()) e.emplace_back("grid", c.grid);
    if (c.kind == "expsum" || c.kind == "sigma") e.emplace_back("a", c.a);
    if (!c.tail_limit.empty()) e.emplace_back("tail_limit", c.tail_limit);
    e.emplace_back("segment", std::to_string(r.seg.segment_length));
    return e;
}

// Output sink: the --out file, or the given stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback, bool binary = false) : stream_(&fallback) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
        if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
        stream_ = file_.get();
    }
    std::ostream& stream() { return *stream_; }
    bool is_file() const { return file_ != nullptr; }
    void finish(const std::string& path) {
        stream_->flush();
        if (!*stream_) throw ConfigError("write to '" + (path.empty() ? std::string("stdout") : path) + "' failed");
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

inline int cmd_digits(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto r = resolve(c);
    if (c.n.empty()) throw ConfigError("digits: --n is required");
    const auto n = parse_count(c.n, "--n");
    if (n < 1) throw ConfigError("--n: must be >= 1");
    DigitFormat fmt = DigitFormat::text;
    if (c.format == "raw") {
        fmt = DigitFormat::raw;
    } else if (!c.format.empty() && c.format != "text") {
        throw ConfigError("digits: --format must be text or raw");
    }
    if (fmt == DigitFormat::raw && r.base > 255) throw ConfigError("raw format requires --base <= 255");

    const auto t0 = std::chrono::steady_clock::now();
    Sink sink(c.out_path, out, fmt == DigitFormat::raw);
    emit_expansion(n, r.base, r.spec, fmt, sink.stream(), r.seg);
    sink.finish(c.out_path);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    (sink.is_file() ? out : err) << "wrote " << n << " digits in " << secs << " s\n";
    return kOk;
}

inline int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& /*err*/) {
    const auto r = resolve(c);
    const std::uint64_t p_limit = c.p_limit.empty() ? 1000 : parse_count(c.p_limit, "--p-limit");

    std::vector<std::uint8_t> digits;
    if (!c.check_file.empty()) {
        const bool raw = c.format == "raw";
        if (!c.format.empty() && c.format != "raw" && c.format != "text") {
            throw ConfigError("verify: --format must be text or raw");
        }
        std::ifstream in(c.check_file, raw ? std::ios::binary | std::ios::in : std::ios::in);
        if (!in) throw ConfigError("cannot open '" + c.check_file + "'");
        try {
            digits = read_expansion(in, raw ? DigitFormat::raw : DigitFormat::text, r.base);
        } catch (const std::runtime_error& e) {
            throw ConfigError(c.check_file + ": " + e.what());
        }
        if (!c.n.empty()) {
            const auto n = parse_count(c.n, "--n");
            if (n < digits.size()) digits.resize(n);
        }
    } else {
        if (c.n.empty()) throw ConfigError("verify: --n or --check-file is required");
        const auto n = parse_count(c.n, "--n");
        if (n < 2) throw ConfigError("--n: must be >= 2");
        digits = digit_prefix(n, r.base, r.spec, r.seg);
    }

    const auto report = verify_toeplitz_digits(digits, r.spec, p_limit);
    for (const auto& v : report.violations) out << v.n << ' ' << v.p << ' ' << v.a_n << ' ' << v.a_np << '\n';
    out << "# checked " << report.pairs_checked << " pairs over " << report.n << " digits, "
        << report.primes_tested.size() << " primes of P up to " << p_limit << ": " << report.violations.size()
        << " violations\n";
    return report.clean() ? kOk : kVerifyFailed;
}

inline int cmd_report(const RunConfig& c, std::ostream& out, std::ostream& /*err*/) {
    const auto r = resolve(c);
    const std::string fmt = c.format.empty() ? "csv" : c.format;
    if (fmt != "csv" && fmt != "json") throw ConfigError("report: --format must be csv or json");

    std::vector<std::uint64_t> grid;
    if (!c.grid.empty()) grid = parse_grid(c.grid);
    std::optional<std::uint64_t> n;
    if (!c.n.empty()) n = parse_count(c.n, "--n");
    auto need_grid = [&] {
        if (grid.empty()) {
            if (!n || *n < 1) throw ConfigError("report " + c.kind + ": --grid or --n is required");
            grid = default_grid(*n);
        }
        return grid;
    };
    const auto a = parse_count(c.a, "--a");

    Sink sink(c.out_path, out);
    auto& os = sink.stream();
    const auto config = echo(c, r);
    auto emit = [&](const Table& t) {
        if (fmt == "csv") {
            write_csv(t, os);
        } else {
            write_json(t, os);
        }
    };

    if (c.kind == "discrepancy") {
        emit(to_table(bound_report(r.spec, r.base, need_grid(), r.seg), config));
    } else if (c.kind == "expsum") {
        if (a < 1 || a >= r.base) throw ConfigError("--a: must lie in [1, base)");
        const auto g = need_grid();
        const std::uint64_t top = n ? *n : g.back();
        if (g.back() > top) throw ConfigError("--grid: checkpoint beyond --n");
        emit(to_table(exp_sum(top, static_cast<unsigned>(a), r.base, r.spec, g, r.seg), config));
    } else if (c.kind == "sigma") {
        if (a < 1 || a >= r.base) throw ConfigError("--a: must lie in [1, base)");
        std::vector<std::pair<std::uint64_t, SigmaResult>> rows;
        for (auto x : need_grid()) {
            if (x < 2) throw ConfigError("sigma: N must be >= 2");
            rows.emplace_back(x, sigma_n(r.spec, r.base, static_cast<unsigned>(a), x));
        }
        emit(sigma_table(rows, config));
    } else if (c.kind == "eta") {
        std::vector<std::pair<std::uint64_t, EtaResult>> rows;
        const auto g = need_grid();
        const std::uint64_t tail = c.tail_limit.empty() ? 10 * g.back() : parse_count(c.tail_limit, "--tail-limit");
        for (auto x : g) {
            if (x < 2) throw ConfigError("eta: N must be >= 2");
            if (tail < x) throw ConfigError("--tail-limit: must be >= N");
            rows.emplace_back(x, eta_n(r.spec, x, {}, tail));
        }
        emit(eta_table(rows, config));
    } else if (c.kind == "freq-limit") {
        if (!r.spec.q_is_finite()) {
            throw ConfigError("freq-limit: Q is infinite for spec " + r.spec.to_string() +
                              "; when the sum of 1/p over Q diverges, xi_P is simply normal and every digit "
                              "has frequency 1/b (use 'report discrepancy')");
        }
        const auto freq = limiting_frequencies(r.spec, r.base);
        if (fmt == "csv") {
            write_frequencies_csv(freq, config, os);
        } else {
            write_json(frequency_table(freq, config), os);
        }
    } else {
        throw ConfigError("unknown report kind '" + c.kind + "' (discrepancy, expsum, sigma, eta, freq-limit)");
    }
    sink.finish(c.out_path);
    return kOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Digits and analytics of Toeplitz numbers built from Omega_P(n) mod b", "toeplitz"};
    app.require_subcommand(1);
    RunConfig c;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--spec", c.spec_text, "prime set P: all | empty | finite:2,3 | cofinite:2 | residue:4:1,3")
            ->required();
        sub->add_option("--base", c.base, "digit base b >= 2");
        sub->add_option("--segment", c.segment, "sieve segment length (default 2^20 or $TOEPLITZ_SEGMENT)");
        sub->add_option("--workers", c.workers, "worker threads");
        sub->add_option("--out", c.out_path, "output path (default stdout)");
    };

    auto* digits = app.add_subcommand("digits", "write the first N digits of xi_P");
    common(digits);
    digits->add_option("--n", c.n, "number of digits")->required();
    digits->add_option("--format", c.format, "text | raw");

    auto* verify = app.add_subcommand("verify", "check a_n == a_{pn} for p in P");
    common(verify);
    verify->add_option("--n", c.n, "digits to check");
    verify->add_option("--p-limit", c.p_limit, "largest prime of P to test (default 1000)");
    verify->add_option("--check-file", c.check_file, "verify digits read from a file instead");
    verify->add_option("--format", c.format, "format of --check-file: text | raw");

    auto* report = app.add_subcommand("report", "analytics reports as CSV or JSON");
    common(report);
    report->add_option("kind", c.kind, "discrepancy | expsum | sigma | eta | freq-limit")->required();
    report->add_option("--n", c.n, "range end N");
    report->add_option("--a", c.a, "numerator a in S(N; a/b)");
    report->add_option("--grid", c.grid, "comma-separated checkpoints, e.g. 1e4,1e5,1e6");
    report->add_option("--tail-limit", c.tail_limit, "eta: truncation of the tail sum over Q (default 10*N)");
    report->add_option("--format", c.format, "csv | json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (digits->parsed()) return cmd_digits(c, out, err);
        if (verify->parsed()) return cmd_verify(c, out, err);
        return cmd_report(c, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace toeplitz::cli
