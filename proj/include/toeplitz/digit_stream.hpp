// digit_stream.hpp
// Base-b digits a_n = Omega_P(n) mod b, the Toeplitz check a_n == a_{pn} for
// p in P, and emission of the expansion 0.a_1 a_2 a_3 ... of xi_P.

#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "toeplitz/additive_sieve.hpp"
#include "toeplitz/prime_engine.hpp"
#include "toeplitz/segments.hpp"

namespace toeplitz {

// Omega_P(n) < 64 for every supported n, so a digit always fits a byte even
// when b > 255: for b > 63 the digit is Omega_P(n) itself.
struct DigitBlock {
    unsigned base = 2;
    std::uint64_t lo = 1;
    std::uint64_t hi = 1;
    std::vector<std::uint8_t> digits;

    std::size_t size() const noexcept { return digits.size(); }
    unsigned operator()(std::uint64_t n) const { return digits.at(n - lo); }
};

inline void check_base(unsigned b) {
    if (b < 2) throw std::domain_error("base must be >= 2, got " + std::to_string(b));
}

// In-place reduction of Omega values to digits.
inline void reduce_mod_base(std::span<std::uint8_t> values, unsigned b) {
    if (b >= 64) return;
    const auto base = static_cast<std::uint8_t>(b);
    if ((b & (b - 1)) == 0) {
        const std::uint8_t mask = base - 1;
        for (auto& v : values) v &= mask;
    } else {
        for (auto& v : values) v %= base;
    }
}

inline DigitBlock to_digits(OmegaBlock block, unsigned b) {
    check_base(b);
    reduce_mod_base(block.values, b);
    return DigitBlock{b, block.lo, block.hi, std::move(block.values)};
}

inline DigitBlock digits_block(std::uint64_t lo, std::uint64_t hi, unsigned b, const PrimeSetSpec& spec,
                               const PrimeTable& table) {
    check_base(b);
    return to_digits(omega_segment(lo, hi, spec, table), b);
}

inline DigitBlock digits_block(std::uint64_t lo, std::uint64_t hi, unsigned b, const PrimeSetSpec& spec) {
    check_base(b);
    return to_digits(omega_segment(lo, hi, spec), b);
}

// Digits a_1..a_N as one vector (index n-1), assembled segment by segment.
inline std::vector<std::uint8_t> digit_prefix(std::uint64_t n, unsigned b, const PrimeSetSpec& spec,
                                              const SegmentOptions& opt = {}) {
    check_base(b);
    std::vector<std::uint8_t> out;
    out.reserve(n);
    for_each_omega_block(1, n + 1, spec, opt, [&](const OmegaBlock& block) {
        const auto start = out.size();
        out.insert(out.end(), block.values.begin(), block.values.end());
        reduce_mod_base(std::span(out).subspan(start), b);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Toeplitz verification
// ---------------------------------------------------------------------------

struct ToeplitzViolation {
    std::uint64_t n;
    std::uint64_t p;
    unsigned a_n;
    unsigned a_np;

    friend bool operator==(const ToeplitzViolation&, const ToeplitzViolation&) = default;
};

struct ToeplitzReport {
    std::uint64_t n = 0;
    std::uint64_t pairs_checked = 0;
    std::vector<std::uint64_t> primes_tested;
    std::vector<ToeplitzViolation> violations;

    bool clean() const noexcept { return violations.empty(); }
};

// Checks a_n == a_{pn} for every p in P with p <= p_limit and pn <= digits.size().
// `digits[i]` is a_{i+1}.
inline ToeplitzReport verify_toeplitz_digits(std::span<const std::uint8_t> digits, const PrimeSetSpec& spec,
                                             std::uint64_t p_limit) {
    ToeplitzReport report;
    report.n = digits.size();
    if (p_limit >= 2) {
        const auto table = sieve_primes(p_limit);
        for (auto p : table.primes()) {
            if (spec.contains_prime(p)) report.primes_tested.push_back(p);
        }
    }
    const std::uint64_t n_max = digits.size();
    for (auto p : report.primes_tested) {
        for (std::uint64_t n = 1; n <= n_max / p; ++n) {
            ++report.pairs_checked;
            const unsigned a = digits[n - 1];
            const unsigned ap = digits[n * p - 1];
            if (a != ap) report.violations.push_back({n, p, a, ap});
        }
    }
    return report;
}

inline ToeplitzReport verify_toeplitz(std::uint64_t n, unsigned b, const PrimeSetSpec& spec,
                                      std::uint64_t p_limit, const SegmentOptions& opt = {}) {
    if (n < 2) throw std::domain_error("verify_toeplitz: N must be >= 2");
    const auto digits = digit_prefix(n, b, spec, opt);
    return verify_toeplitz_digits(digits, spec, p_limit);
}

// ---------------------------------------------------------------------------
// Expansion output
// ---------------------------------------------------------------------------

enum class DigitFormat { text, raw };

inline std::string expansion_header(unsigned b, const PrimeSetSpec& spec, std::uint64_t n) {
    return "# base=" + std::to_string(b) + " spec=" + spec.to_string() + " n=" + std::to_string(n);
}

// Text: header line, then one ASCII digit per a_n (b <= 10) or comma-separated
// decimal values (b > 10), then a newline. Raw: one byte per digit, no header.
inline void emit_expansion(std::uint64_t n, unsigned b, const PrimeSetSpec& spec, DigitFormat format,
                           std::ostream& out, const SegmentOptions& opt = {}) {
    check_base(b);
    if (n < 1) throw std::domain_error("emit_expansion: N must be >= 1");
    if (format == DigitFormat::raw && b > 255) throw std::domain_error("raw format requires base <= 255");

    if (format == DigitFormat::text) out << expansion_header(b, spec, n) << '\n';

    std::string buf;
    bool first = true;
    for_each_omega_block(1, n + 1, spec, opt, [&](const OmegaBlock& block) {
        buf.clear();
        if (format == DigitFormat::text && b > 10) {
            for (std::uint8_t v : block.values) {
                if (!first) buf += ',';
                first = false;
                buf += std::to_string(b >= 64 ? v : v % b);
            }
        } else {
            buf.resize(block.values.size());
            const char offset = format == DigitFormat::text ? '0' : 0;
            for (std::size_t i = 0; i < block.values.size(); ++i) {
                const unsigned d = b >= 64 ? block.values[i] : block.values[i] % b;
                buf[i] = static_cast<char>(offset + d);
            }
        }
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    });
    if (format == DigitFormat::text) out << '\n';
    if (!out) throw std::runtime_error("emit_expansion: write failed");
}

// Parses a digit artifact back into digits (index n-1). Text input may carry
// '#' header lines; comma-separated values are accepted for any base.
inline std::vector<std::uint8_t> read_expansion(std::istream& in, DigitFormat format, unsigned b) {
    check_base(b);
    std::vector<std::uint8_t> digits;
    if (format == DigitFormat::raw) {
        char c;
        while (in.get(c)) {
            const auto d = static_cast<std::uint8_t>(c);
            if (d >= b) throw std::runtime_error("raw digit " + std::to_string(d) + " out of range for base");
            digits.push_back(d);
        }
        return digits;
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.find(',') != std::string::npos || b > 10) {
            std::size_t start = 0;
            while (start <= line.size()) {
                auto comma = line.find(',', start);
                auto tok = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
                const auto v = detail::parse_uint_token(tok);
                if (v >= b) throw std::runtime_error("digit " + tok + " out of range for base");
                digits.push_back(static_cast<std::uint8_t>(v));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
        } else {
            for (char c : line) {
                if (c == '\r') continue;
                if (c < '0' || c > '9' || static_cast<unsigned>(c - '0') >= b) {
                    throw std::runtime_error(std::string("invalid digit character '") + c + "'");
                }
                digits.push_back(static_cast<std::uint8_t>(c - '0'));
            }
        }
    }
    return digits;
}

}  // namespace toeplitz
