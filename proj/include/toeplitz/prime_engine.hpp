// prime_engine.hpp
// Symbolic prime sets P (and their complement Q), prime tables and the
// strict spec-string grammar used by the CLI:
//
//   all | empty | finite:2,3,5 | cofinite:2 | residue:4:1,3
//
// PrimeTable stores one bit per odd number:
//   bit index i  ->  odd number 2*i + 3
//   odd number n ->  bit index (n - 3) / 2

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "toeplitz/errors.hpp"

namespace toeplitz {

inline constexpr std::size_t kMaxListedPrimes = 10'000;
inline constexpr std::uint64_t kMaxTableLimit = std::uint64_t{1} << 32;

constexpr std::uint64_t isqrt(std::uint64_t n) noexcept {
    if (n < 2) return n;
    // Newton iteration from above; converges monotonically.
    std::uint64_t x = n / 2 + 1;
    while (true) {
        const std::uint64_t y = (x + n / x) / 2;
        if (y >= x) return x;
        x = y;
    }
}

// Trial division. Used to validate user-supplied primes, never on hot paths.
constexpr bool is_prime_trial(std::uint64_t n) noexcept {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    if (n % 3 == 0) return n == 3;
    for (std::uint64_t d = 5; d <= n / d; d += 6) {
        if (n % d == 0 || n % (d + 2) == 0) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// PrimeSetSpec
// ---------------------------------------------------------------------------

struct AllPrimes {};
struct NoPrimes {};
struct FinitePrimes {
    std::vector<std::uint64_t> primes;
};
struct CofinitePrimes {
    std::vector<std::uint64_t> excluded;
};
struct ResiduePrimes {
    std::uint64_t modulus;
    std::vector<std::uint64_t> residues;
};

class PrimeSetSpec {
public:
    using Variant = std::variant<AllPrimes, NoPrimes, FinitePrimes, CofinitePrimes, ResiduePrimes>;

    static PrimeSetSpec all() { return PrimeSetSpec(AllPrimes{}); }
    static PrimeSetSpec empty() { return PrimeSetSpec(NoPrimes{}); }
    static PrimeSetSpec finite(std::vector<std::uint64_t> primes) {
        check_prime_list(primes, "finite");
        return PrimeSetSpec(FinitePrimes{std::move(primes)});
    }
    static PrimeSetSpec cofinite(std::vector<std::uint64_t> excluded) {
        check_prime_list(excluded, "cofinite");
        return PrimeSetSpec(CofinitePrimes{std::move(excluded)});
    }
    static PrimeSetSpec residue(std::uint64_t modulus, std::vector<std::uint64_t> residues) {
        if (modulus < 2) throw std::domain_error("residue modulus must be >= 2");
        if (residues.empty()) throw std::domain_error("residue set must be nonempty");
        std::sort(residues.begin(), residues.end());
        residues.erase(std::unique(residues.begin(), residues.end()), residues.end());
        if (residues.back() >= modulus) {
            throw std::domain_error("residue " + std::to_string(residues.back()) +
                                    " not in [0, " + std::to_string(modulus) + ")");
        }
        PrimeSetSpec spec(ResiduePrimes{modulus, std::move(residues)});
        spec.residue_mask_.assign(modulus, 0);
        for (auto r : std::get<ResiduePrimes>(spec.variant_).residues) spec.residue_mask_[r] = 1;
        return spec;
    }

    const Variant& variant() const noexcept { return variant_; }

    // Membership without the primality check; `p` must already be known prime.
    bool contains_prime(std::uint64_t p) const noexcept {
        struct Visitor {
            const PrimeSetSpec& self;
            std::uint64_t p;
            bool operator()(const AllPrimes&) const { return true; }
            bool operator()(const NoPrimes&) const { return false; }
            bool operator()(const FinitePrimes& f) const {
                return std::binary_search(f.primes.begin(), f.primes.end(), p);
            }
            bool operator()(const CofinitePrimes& c) const {
                return !std::binary_search(c.excluded.begin(), c.excluded.end(), p);
            }
            bool operator()(const ResiduePrimes& r) const {
                return self.residue_mask_[p % r.modulus] != 0;
            }
        };
        return std::visit(Visitor{*this, p}, variant_);
    }

    // True when Q = primes \ P is a finite set.
    bool q_is_finite() const noexcept {
        struct Visitor {
            const PrimeSetSpec& self;
            bool operator()(const AllPrimes&) const { return true; }
            bool operator()(const NoPrimes&) const { return false; }
            bool operator()(const FinitePrimes&) const { return false; }
            bool operator()(const CofinitePrimes&) const { return true; }
            bool operator()(const ResiduePrimes& r) const {
                // Dirichlet: every class coprime to m holds infinitely many primes.
                for (std::uint64_t k = 1; k < r.modulus; ++k) {
                    if (std::gcd(k, r.modulus) == 1 && !self.residue_mask_[k]) return false;
                }
                return true;
            }
        };
        return std::visit(Visitor{*this}, variant_);
    }

    // Elements of Q when it is finite; throws otherwise.
    std::vector<std::uint64_t> finite_q() const {
        if (!q_is_finite()) throw std::domain_error("Q is infinite for spec " + to_string());
        std::vector<std::uint64_t> q;
        if (const auto* c = std::get_if<CofinitePrimes>(&variant_)) {
            q = c->excluded;
        } else if (const auto* r = std::get_if<ResiduePrimes>(&variant_)) {
            // Only primes dividing m can sit outside the coprime classes.
            std::uint64_t m = r->modulus;
            for (std::uint64_t p = 2; p <= m; ++p) {
                if (m % p == 0 && is_prime_trial(p) && !contains_prime(p)) q.push_back(p);
            }
        }
        return q;
    }

    std::string to_string() const {
        auto join = [](const std::vector<std::uint64_t>& xs) {
            std::string s;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (i) s += ',';
                s += std::to_string(xs[i]);
            }
            return s;
        };
        struct Visitor {
            decltype(join)& j;
            std::string operator()(const AllPrimes&) const { return "all"; }
            std::string operator()(const NoPrimes&) const { return "empty"; }
            std::string operator()(const FinitePrimes& f) const { return "finite:" + j(f.primes); }
            std::string operator()(const CofinitePrimes& c) const { return "cofinite:" + j(c.excluded); }
            std::string operator()(const ResiduePrimes& r) const {
                return "residue:" + std::to_string(r.modulus) + ":" + j(r.residues);
            }
        };
        return std::visit(Visitor{join}, variant_);
    }

    friend bool operator==(const PrimeSetSpec& a, const PrimeSetSpec& b) {
        return a.to_string() == b.to_string();
    }

private:
    explicit PrimeSetSpec(Variant v) : variant_(std::move(v)) {}

    static void check_prime_list(const std::vector<std::uint64_t>& xs, const char* kind) {
        if (xs.size() > kMaxListedPrimes) {
            throw std::domain_error(std::string(kind) + " list exceeds " +
                                    std::to_string(kMaxListedPrimes) + " entries");
        }
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (!is_prime_trial(xs[i])) {
                throw std::domain_error(std::string(kind) + " list entry " + std::to_string(xs[i]) +
                                        " is not prime");
            }
            if (i > 0 && xs[i] <= xs[i - 1]) {
                throw std::domain_error(std::string(kind) + " list must be strictly increasing at " +
                                        std::to_string(xs[i]));
            }
        }
    }

    Variant variant_;
    std::vector<std::uint8_t> residue_mask_;
};

// ---------------------------------------------------------------------------
// Spec grammar
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t parse_uint_token(std::string_view tok) {
    if (tok.empty()) throw SpecParseError("empty token", std::string(tok));
    std::uint64_t v = 0;
    for (char c : tok) {
        if (c < '0' || c > '9') throw SpecParseError("not a nonnegative integer", std::string(tok));
        if (v > (std::numeric_limits<std::uint64_t>::max() - 9) / 10) {
            throw SpecParseError("integer overflow", std::string(tok));
        }
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

inline std::vector<std::uint64_t> parse_uint_list(std::string_view s) {
    std::vector<std::uint64_t> out;
    if (s.empty()) throw SpecParseError("empty list", std::string(s));
    std::size_t start = 0;
    while (true) {
        auto comma = s.find(',', start);
        auto tok = s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(parse_uint_token(tok));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace detail

inline PrimeSetSpec parse_spec(std::string_view text) {
    if (text == "all") return PrimeSetSpec::all();
    if (text == "empty") return PrimeSetSpec::empty();

    auto colon = text.find(':');
    if (colon == std::string_view::npos) throw SpecParseError("unknown prime-set kind", std::string(text));
    auto kind = text.substr(0, colon);
    auto rest = text.substr(colon + 1);

    auto wrap = [](auto&& make, std::string_view tok) {
        try {
            return make();
        } catch (const SpecParseError&) {
            throw;
        } catch (const std::domain_error& e) {
            throw SpecParseError(e.what(), std::string(tok));
        }
    };

    if (kind == "finite" || kind == "cofinite") {
        auto list = detail::parse_uint_list(rest);
        for (auto v : list) {
            if (!is_prime_trial(v)) throw SpecParseError("not a prime", std::to_string(v));
        }
        return wrap([&] {
            return kind == "finite" ? PrimeSetSpec::finite(list) : PrimeSetSpec::cofinite(list);
        }, rest);
    }
    if (kind == "residue") {
        auto colon2 = rest.find(':');
        if (colon2 == std::string_view::npos) throw SpecParseError("residue needs modulus:list", std::string(rest));
        auto mod_tok = rest.substr(0, colon2);
        auto modulus = detail::parse_uint_token(mod_tok);
        if (modulus < 2) throw SpecParseError("modulus must be >= 2", std::string(mod_tok));
        auto list = detail::parse_uint_list(rest.substr(colon2 + 1));
        for (auto r : list) {
            if (r >= modulus) throw SpecParseError("residue out of range", std::to_string(r));
        }
        return wrap([&] { return PrimeSetSpec::residue(modulus, list); }, rest);
    }
    throw SpecParseError("unknown prime-set kind", std::string(kind));
}

// ---------------------------------------------------------------------------
// PrimeTable
// ---------------------------------------------------------------------------

class PrimeTable {
public:
    PrimeTable() = default;

    explicit PrimeTable(std::uint64_t limit) : limit_(limit) {
        if (limit < 2) throw std::domain_error("sieve limit must be >= 2");
        if (limit > kMaxTableLimit) throw std::domain_error("sieve limit exceeds 2^32");
        const std::uint64_t nbits = limit >= 3 ? (limit - 3) / 2 + 1 : 0;
        bits_.assign((nbits + 63) / 64, ~std::uint64_t{0});
        for (std::uint64_t i = 0; i < nbits; ++i) {
            if (!test(i)) continue;
            const std::uint64_t p = 2 * i + 3;
            if (p > limit / p) break;
            for (std::uint64_t m = p * p; m <= limit; m += 2 * p) clear((m - 3) / 2);
        }
        primes_.reserve(estimate_count(limit));
        primes_.push_back(2);
        for (std::uint64_t i = 0; i < nbits; ++i) {
            if (test(i)) primes_.push_back(2 * i + 3);
        }
    }

    std::uint64_t limit() const noexcept { return limit_; }
    const std::vector<std::uint64_t>& primes() const noexcept { return primes_; }
    std::size_t size() const noexcept { return primes_.size(); }

    // Valid for n <= limit().
    bool is_prime(std::uint64_t n) const noexcept {
        if (n < 3) return n == 2;
        if (n % 2 == 0) return false;
        return test((n - 3) / 2);
    }

private:
    bool test(std::uint64_t i) const noexcept { return (bits_[i >> 6] >> (i & 63)) & 1u; }
    void clear(std::uint64_t i) noexcept { bits_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

    static std::size_t estimate_count(std::uint64_t x) {
        if (x < 17) return 8;
        const double lx = std::log(static_cast<double>(x));
        return static_cast<std::size_t>(1.26 * static_cast<double>(x) / lx);
    }

    std::uint64_t limit_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<std::uint64_t> primes_;
};

inline PrimeTable sieve_primes(std::uint64_t limit) { return PrimeTable(limit); }

inline bool contains(const PrimeSetSpec& spec, std::uint64_t p) {
    if (!is_prime_trial(p)) throw std::domain_error(std::to_string(p) + " is not prime");
    return spec.contains_prime(p);
}

inline std::vector<std::uint64_t> enumerate_q(const PrimeSetSpec& spec, const PrimeTable& table,
                                              std::uint64_t limit) {
    std::vector<std::uint64_t> q;
    for (auto p : table.primes()) {
        if (p > limit) break;
        if (!spec.contains_prime(p)) q.push_back(p);
    }
    return q;
}

inline std::vector<std::uint64_t> enumerate_q(const PrimeSetSpec& spec, std::uint64_t limit) {
    return enumerate_q(spec, sieve_primes(limit), limit);
}

}  // namespace toeplitz
