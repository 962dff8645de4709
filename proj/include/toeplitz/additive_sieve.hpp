// additive_sieve.hpp
// Omega_P(n): number of prime factors of n, counted with multiplicity, that
// lie outside P. Two paths:
//   omega_single  - trial division, the reference oracle
//   omega_segment - segmented sieve over [lo, hi)
//
// Segment algorithm: a companion array holds the product of all prime powers
// p^k <= hi-1 stripped so far (p <= sqrt(hi-1)). After the small primes, the
// cofactor n / product is either 1 or a single prime > sqrt(hi-1), credited
// by a membership test. Only primes up to sqrt(hi-1) are ever enumerated.

#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "toeplitz/errors.hpp"
#include "toeplitz/prime_engine.hpp"

namespace toeplitz {

inline constexpr std::uint64_t kMaxOmegaArgument = (std::uint64_t{1} << 63) - 1;

inline unsigned omega_single(std::uint64_t n, const PrimeSetSpec& spec) {
    if (n == 0) throw std::domain_error("omega_single: n must be >= 1");
    unsigned count = 0;
    auto strip = [&](std::uint64_t p) {
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e && !spec.contains_prime(p)) count += e;
    };
    strip(2);
    for (std::uint64_t d = 3; d <= n / d; d += 2) {
        if (n % d == 0) strip(d);
    }
    if (n > 1 && !spec.contains_prime(n)) ++count;
    return count;
}

struct OmegaBlock {
    std::uint64_t lo = 1;
    std::uint64_t hi = 1;
    std::vector<std::uint8_t> values;

    std::size_t size() const noexcept { return values.size(); }
    unsigned operator()(std::uint64_t n) const { return values.at(n - lo); }
};

// Scratch buffers reused across segments so a worker allocates once.
class SieveWorkspace {
public:
    explicit SieveWorkspace(std::size_t segment_length = 0) { reserve(segment_length); }

    void reserve(std::size_t len) { product_.reserve(len); }
    std::size_t footprint_bytes() const noexcept {
        return product_.capacity() * sizeof(std::uint64_t);
    }

    std::vector<std::uint64_t>& product() noexcept { return product_; }

private:
    std::vector<std::uint64_t> product_;
};

inline std::uint64_t required_table_limit(std::uint64_t hi) { return hi > 2 ? isqrt(hi - 1) : 0; }

// Fills `out` with Omega_P over [lo, hi). `primes` must cover sqrt(hi-1).
inline void omega_segment_into(std::uint64_t lo, std::uint64_t hi, const PrimeSetSpec& spec,
                               const PrimeTable& primes, SieveWorkspace& ws, OmegaBlock& out) {
    if (lo < 1 || hi <= lo) {
        throw std::domain_error("omega_segment: need 1 <= lo < hi, got [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + ")");
    }
    if (hi - 1 > kMaxOmegaArgument) throw std::domain_error("omega_segment: hi exceeds 2^63");
    const std::uint64_t need = required_table_limit(hi);
    if (need >= 2 && primes.limit() < need) {
        throw PreconditionError("omega_segment: prime table limit " + std::to_string(primes.limit()) +
                                " too small; need primes up to " + std::to_string(need));
    }

    const std::size_t len = static_cast<std::size_t>(hi - lo);
    out.lo = lo;
    out.hi = hi;
    out.values.assign(len, 0);

    if (std::holds_alternative<AllPrimes>(spec.variant())) return;

    auto& prod = ws.product();
    prod.assign(len, 1);
    const std::uint64_t top = hi - 1;
    std::uint8_t* counts = out.values.data();

    for (std::uint64_t p : primes.primes()) {
        if (p > need) break;
        const std::uint8_t credit = spec.contains_prime(p) ? 0 : 1;
        std::uint64_t pk = p;
        while (true) {
            std::uint64_t first = (lo + pk - 1) / pk * pk;
            for (std::uint64_t m = first; m <= top; m += pk) {
                const std::size_t i = static_cast<std::size_t>(m - lo);
                prod[i] *= p;
                counts[i] += credit;
            }
            if (pk > top / p) break;
            pk *= p;
        }
    }

    for (std::size_t i = 0; i < len; ++i) {
        const std::uint64_t n = lo + i;
        if (prod[i] != n) {
            const std::uint64_t cofactor = n / prod[i];
            if (!spec.contains_prime(cofactor)) ++counts[i];
        }
    }
}

inline OmegaBlock omega_segment(std::uint64_t lo, std::uint64_t hi, const PrimeSetSpec& spec,
                                const PrimeTable& primes) {
    OmegaBlock block;
    SieveWorkspace ws;
    omega_segment_into(lo, hi, spec, primes, ws, block);
    return block;
}

// Convenience overload that sieves its own table.
inline OmegaBlock omega_segment(std::uint64_t lo, std::uint64_t hi, const PrimeSetSpec& spec) {
    return omega_segment(lo, hi, spec, sieve_primes(std::max<std::uint64_t>(2, required_table_limit(hi))));
}

}  // namespace toeplitz
