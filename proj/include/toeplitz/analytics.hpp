// analytics.hpp
// Quantities for measuring simple normality of xi_P in base b:
//   - digit census and discrepancy eps_{N,k} = |count_k / N - 1/b|
//   - E(N) = sum of 1/p over p in Q, p <= N
//   - exponential sums S(N; a/b) = sum_{n<=N} e(a Omega_P(n) / b)
//   - the finite Fourier inversion linking census and S
//   - the discrepancy envelope exp(-2 E(N) / (9 b^2))
//   - eta_N, sigma_N and exact limiting digit frequencies when Q is finite
//
// S(N; a/b) only depends on how many n <= N fall in each residue class of
// Omega_P(n) mod b, so every exponential sum here is evaluated from integer
// census counts with b complex multiplications at the end.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "toeplitz/digit_stream.hpp"
#include "toeplitz/errors.hpp"
#include "toeplitz/prime_engine.hpp"
#include "toeplitz/segments.hpp"

namespace toeplitz {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Compensated summation
// ---------------------------------------------------------------------------

class NeumaierSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class ComplexNeumaierSum {
public:
    void add(Complex z) noexcept {
        re_.add(z.real());
        im_.add(z.imag());
    }
    Complex value() const noexcept { return {re_.value(), im_.value()}; }

private:
    NeumaierSum re_;
    NeumaierSum im_;
};

// e(a k / b) = exp(2 pi i (a k mod b) / b), k = 0..b-1. The angle is reduced
// exactly in integers before any floating-point work.
inline std::vector<Complex> roots_of_unity(long long a, unsigned b) {
    check_base(b);
    std::vector<Complex> roots(b);
    const long long bb = b;
    const long long ar = ((a % bb) + bb) % bb;
    for (unsigned k = 0; k < b; ++k) {
        const long long idx = (ar * static_cast<long long>(k)) % bb;
        if (idx == 0) {
            roots[k] = {1.0, 0.0};
            continue;
        }
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(idx) / static_cast<double>(bb);
        roots[k] = std::polar(1.0, angle);
    }
    return roots;
}

// ---------------------------------------------------------------------------
// DigitCensus
// ---------------------------------------------------------------------------

struct DigitCensus {
    unsigned base = 2;
    std::uint64_t n = 0;
    std::vector<std::uint64_t> counts;

    DigitCensus() : counts(2, 0) {}
    explicit DigitCensus(unsigned b) : base(b), counts(b, 0) { check_base(b); }

    void add_digits(std::span<const std::uint8_t> digits) {
        for (auto d : digits) ++counts[d];
        n += digits.size();
    }

    // Digits derived on the fly from Omega values.
    void add_omega(std::span<const std::uint8_t> omega) {
        if (base >= 64) {
            for (auto v : omega) ++counts[v];
        } else {
            std::uint64_t by_omega[64] = {};
            for (auto v : omega) ++by_omega[v];
            for (unsigned v = 0; v < 64; ++v) counts[v % base] += by_omega[v];
        }
        n += omega.size();
    }

    DigitCensus& merge(const DigitCensus& other) {
        if (other.base != base) throw StructuralError("census merge: base mismatch");
        for (unsigned k = 0; k < base; ++k) counts[k] += other.counts[k];
        n += other.n;
        return *this;
    }

    double frequency(unsigned k) const { return static_cast<double>(counts.at(k)) / static_cast<double>(n); }

    friend bool operator==(const DigitCensus&, const DigitCensus&) = default;
};

inline DigitCensus merge(DigitCensus a, const DigitCensus& b) { return a.merge(b); }

// Blocks must tile [1, N] exactly once in some order and share one base.
inline DigitCensus census(std::span<const DigitBlock> blocks) {
    if (blocks.empty()) throw StructuralError("census: no blocks");
    const unsigned b = blocks.front().base;
    std::vector<const DigitBlock*> order;
    for (const auto& blk : blocks) {
        if (blk.base != b) throw StructuralError("census: blocks mix bases");
        if (blk.hi <= blk.lo || blk.digits.size() != blk.hi - blk.lo) {
            throw StructuralError("census: malformed block range");
        }
        order.push_back(&blk);
    }
    std::sort(order.begin(), order.end(), [](auto* x, auto* y) { return x->lo < y->lo; });
    DigitCensus c(b);
    std::uint64_t expect = 1;
    for (const auto* blk : order) {
        if (blk->lo < expect) {
            throw StructuralError("census: overlapping ranges at n=" + std::to_string(blk->lo));
        }
        if (blk->lo > expect) {
            throw StructuralError("census: gap in coverage at n=" + std::to_string(expect));
        }
        c.add_digits(blk->digits);
        expect = blk->hi;
    }
    return c;
}

inline double epsilon(const DigitCensus& c, unsigned k) {
    if (k >= c.base) throw std::domain_error("epsilon: digit " + std::to_string(k) + " not in [0, base)");
    if (c.n == 0) throw std::domain_error("epsilon: empty census");
    return std::abs(c.frequency(k) - 1.0 / static_cast<double>(c.base));
}

inline double epsilon_max(const DigitCensus& c) {
    double m = 0.0;
    for (unsigned k = 0; k < c.base; ++k) m = std::max(m, epsilon(c, k));
    return m;
}

// Digit censuses of a_1..a_N at each checkpoint N (ascending), one pass.
inline std::vector<DigitCensus> census_at(std::span<const std::uint64_t> checkpoints, unsigned b,
                                          const PrimeSetSpec& spec, SegmentOptions opt = {}) {
    check_base(b);
    std::vector<DigitCensus> out;
    if (checkpoints.empty()) return out;
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 1) throw std::domain_error("checkpoint must be >= 1");
        if (i && checkpoints[i] <= checkpoints[i - 1]) {
            throw std::domain_error("checkpoints must be strictly increasing");
        }
    }
    opt.cuts.clear();
    for (auto c : checkpoints) opt.cuts.push_back(c + 1);

    DigitCensus running(b);
    std::size_t next = 0;
    for_each_omega_block(1, checkpoints.back() + 1, spec, opt, [&](const OmegaBlock& block) {
        running.add_omega(block.values);
        while (next < checkpoints.size() && checkpoints[next] == running.n) {
            out.push_back(running);
            ++next;
        }
    });
    return out;
}

inline DigitCensus census_prefix(std::uint64_t n, unsigned b, const PrimeSetSpec& spec,
                                 const SegmentOptions& opt = {}) {
    const std::uint64_t cp[] = {n};
    return census_at(cp, b, spec, opt).front();
}

// ---------------------------------------------------------------------------
// E(N)
// ---------------------------------------------------------------------------

// Sum of 1/p over p in Q, p <= N, accumulated from the largest prime down.
inline double e_of_n(const PrimeSetSpec& spec, std::uint64_t n, const PrimeTable& table) {
    if (n < 1) throw std::domain_error("E(N): N must be >= 1");
    if (n < 2) return 0.0;
    if (table.limit() < n) throw PreconditionError("E(N): prime table must reach " + std::to_string(n));
    const auto& ps = table.primes();
    auto end = std::upper_bound(ps.begin(), ps.end(), n);
    double sum = 0.0;
    for (auto it = end; it != ps.begin();) {
        --it;
        if (!spec.contains_prime(*it)) sum += 1.0 / static_cast<double>(*it);
    }
    return sum;
}

inline double e_of_n(const PrimeSetSpec& spec, std::uint64_t n) {
    if (n < 2) return e_of_n(spec, n, PrimeTable{});
    return e_of_n(spec, n, sieve_primes(n));
}

inline double discrepancy_envelope(double e_n, unsigned b) {
    const double bb = static_cast<double>(b);
    return std::exp(-2.0 * e_n / (9.0 * bb * bb));
}

inline double exp_sum_envelope(std::uint64_t n, long long a, double e_n, unsigned b) {
    const double bb = static_cast<double>(b);
    const double aa = static_cast<double>(a);
    return static_cast<double>(n) * std::exp(-2.0 * aa * aa * e_n / (9.0 * bb * bb));
}

// Geometric x10 grid from 10^3 up to N, always ending at N.
inline std::vector<std::uint64_t> default_grid(std::uint64_t n) {
    std::vector<std::uint64_t> g;
    for (std::uint64_t x = 1000; x < n; x *= 10) g.push_back(x);
    g.push_back(n);
    return g;
}

// ---------------------------------------------------------------------------
// Exponential sums
// ---------------------------------------------------------------------------

// S(N; a/b) from the census of a_1..a_N.
inline Complex exp_sum_from_census(const DigitCensus& c, long long a) {
    const auto roots = roots_of_unity(a, c.base);
    ComplexNeumaierSum acc;
    for (unsigned k = 0; k < c.base; ++k) {
        if (c.counts[k]) acc.add(static_cast<double>(c.counts[k]) * roots[k]);
    }
    return acc.value();
}

struct ExpSumCheckpoint {
    std::uint64_t n;
    Complex s;
    double e_n;
    double bound;
};

struct ExpSumSeries {
    unsigned base = 2;
    unsigned a = 1;
    std::vector<ExpSumCheckpoint> checkpoints;
};

inline ExpSumSeries exp_sum(std::uint64_t n, unsigned a, unsigned b, const PrimeSetSpec& spec,
                            std::vector<std::uint64_t> grid = {}, const SegmentOptions& opt = {}) {
    check_base(b);
    if (a % b == 0) throw std::domain_error("exp_sum: a = 0 mod b gives the trivial sum N");
    if (a >= b) throw std::domain_error("exp_sum: a must lie in [1, b)");
    if (n < 1) throw std::domain_error("exp_sum: N must be >= 1");
    if (grid.empty()) grid = default_grid(n);
    if (grid.back() > n) throw std::domain_error("exp_sum: checkpoint beyond N");

    const auto censuses = census_at(grid, b, spec, opt);
    const auto table = sieve_primes(std::max<std::uint64_t>(2, grid.back()));

    ExpSumSeries series{b, a, {}};
    for (const auto& c : censuses) {
        const double e = e_of_n(spec, c.n, table);
        series.checkpoints.push_back({c.n, exp_sum_from_census(c, a), e, exp_sum_envelope(c.n, a, e, b)});
    }
    return series;
}

// ---------------------------------------------------------------------------
// Fourier inversion
// ---------------------------------------------------------------------------

// max_k | count_k / N - (1/(bN)) sum_{0<=a<b} e(-ak/b) S(N; a/b) |
inline double fourier_deviation(const DigitCensus& c) {
    const unsigned b = c.base;
    std::vector<Complex> sums(b);
    for (unsigned a = 0; a < b; ++a) sums[a] = exp_sum_from_census(c, a);
    const double scale = 1.0 / (static_cast<double>(b) * static_cast<double>(c.n));
    double worst = 0.0;
    for (unsigned k = 0; k < b; ++k) {
        ComplexNeumaierSum acc;
        for (unsigned a = 0; a < b; ++a) {
            const auto phase = roots_of_unity(-static_cast<long long>(a), b)[k];
            acc.add(phase * sums[a]);
        }
        const double rhs = acc.value().real() * scale;
        worst = std::max(worst, std::abs(c.frequency(k) - rhs));
    }
    return worst;
}

inline double fourier_check(std::uint64_t n, unsigned b, const PrimeSetSpec& spec,
                            const SegmentOptions& opt = {}) {
    if (n < 1) throw std::domain_error("fourier_check: N must be >= 1");
    return fourier_deviation(census_prefix(n, b, spec, opt));
}

// ---------------------------------------------------------------------------
// Discrepancy report
// ---------------------------------------------------------------------------

struct DiscrepancyRow {
    std::uint64_t n;
    std::vector<double> eps;
    double eps_max;
    double e_n;
    double envelope;
    double ratio;
};

struct DiscrepancyReport {
    unsigned base = 2;
    std::vector<DiscrepancyRow> rows;
};

inline DiscrepancyReport bound_report(const PrimeSetSpec& spec, unsigned b, std::vector<std::uint64_t> grid,
                                      const SegmentOptions& opt = {}) {
    check_base(b);
    DiscrepancyReport report{b, {}};
    if (grid.empty()) return report;
    const auto censuses = census_at(grid, b, spec, opt);
    const auto table = sieve_primes(std::max<std::uint64_t>(2, grid.back()));
    for (const auto& c : censuses) {
        DiscrepancyRow row{c.n, {}, 0.0, 0.0, 0.0, 0.0};
        for (unsigned k = 0; k < b; ++k) row.eps.push_back(epsilon(c, k));
        row.eps_max = *std::max_element(row.eps.begin(), row.eps.end());
        row.e_n = e_of_n(spec, c.n, table);
        row.envelope = discrepancy_envelope(row.e_n, b);
        row.ratio = row.eps_max / row.envelope;
        report.rows.push_back(std::move(row));
    }
    return report;
}

// ---------------------------------------------------------------------------
// eta_N
// ---------------------------------------------------------------------------

struct EtaResult {
    double value;                // min over the grid
    std::uint64_t z_star;        // minimizing z
    bool truncated;              // Q infinite: tail cut at tail_limit, value is a lower bound
    std::uint64_t tail_limit;
    double log_weighted_sum;     // sum_{p in Q, p <= N} log p / p
    double log_n;
};

// Powers of two up to N, starting at 1.
inline std::vector<std::uint64_t> default_z_grid(std::uint64_t n) {
    std::vector<std::uint64_t> z;
    for (std::uint64_t x = 1; x <= n; x *= 2) {
        z.push_back(x);
        if (x > n / 2) break;
    }
    return z;
}

inline EtaResult eta_n(const PrimeSetSpec& spec, std::uint64_t n, std::vector<std::uint64_t> z_grid,
                       std::uint64_t tail_limit) {
    if (n < 2) throw std::domain_error("eta_N: N must be >= 2");
    if (tail_limit < n) throw std::domain_error("eta_N: tail_limit must be >= N");
    if (z_grid.empty()) z_grid = default_z_grid(n);
    for (auto z : z_grid) {
        if (z < 1 || z > n) throw std::domain_error("eta_N: z grid must lie in [1, N]");
    }

    const auto table = sieve_primes(tail_limit);
    const auto q = enumerate_q(spec, table, tail_limit);
    // suffix[i] = sum_{j >= i} 1/q_j, accumulated small terms first.
    std::vector<double> suffix(q.size() + 1, 0.0);
    for (std::size_t i = q.size(); i-- > 0;) suffix[i] = suffix[i + 1] + 1.0 / static_cast<double>(q[i]);

    const double log_n = std::log(static_cast<double>(n));
    EtaResult r{std::numeric_limits<double>::infinity(), 0, !spec.q_is_finite(), tail_limit, 0.0, log_n};
    for (auto z : z_grid) {
        const auto first_above = std::upper_bound(q.begin(), q.end(), z) - q.begin();
        const double v = std::log(static_cast<double>(z)) / log_n + suffix[first_above];
        if (v < r.value) {
            r.value = v;
            r.z_star = z;
        }
    }
    NeumaierSum lw;
    for (auto p : q) {
        if (p > n) break;
        lw.add(std::log(static_cast<double>(p)) / static_cast<double>(p));
    }
    r.log_weighted_sum = lw.value();
    return r;
}

// ---------------------------------------------------------------------------
// sigma_N and limiting frequencies
// ---------------------------------------------------------------------------

struct SigmaResult {
    Complex value;
    Complex over_log_n;
    bool truncated;  // Q infinite: second product cut at N
};

// prod_{p<=N} 1/(1-1/p) * prod_{p in Q} (1-1/p)/(1-e(a/b)/p), in log space.
inline SigmaResult sigma_n(const PrimeSetSpec& spec, unsigned b, unsigned a, std::uint64_t n) {
    check_base(b);
    if (a < 1 || a >= b) throw std::domain_error("sigma_N: a must lie in [1, b)");
    if (n < 2) throw std::domain_error("sigma_N: N must be >= 2");
    const auto table = sieve_primes(n);
    const Complex z = roots_of_unity(a, b)[1];

    NeumaierSum mertens_log;
    for (auto it = table.primes().rbegin(); it != table.primes().rend(); ++it) {
        mertens_log.add(-std::log1p(-1.0 / static_cast<double>(*it)));
    }

    const bool finite = spec.q_is_finite();
    const auto q = finite ? spec.finite_q() : enumerate_q(spec, table, n);
    ComplexNeumaierSum q_log;
    for (auto it = q.rbegin(); it != q.rend(); ++it) {
        const double p = static_cast<double>(*it);
        q_log.add(std::log1p(-1.0 / p) - std::log(1.0 - z / p));
    }

    const Complex value = std::exp(Complex(mertens_log.value(), 0.0) + q_log.value());
    return {value, value / std::log(static_cast<double>(n)), !finite};
}

// Asymptotic frequency of each digit k when Q is finite:
//   (1/b) sum_a e(-ak/b) prod_{q in Q} (1-1/q)/(1-e(a/b)/q)
inline std::vector<double> limiting_frequencies(const PrimeSetSpec& spec, unsigned b) {
    check_base(b);
    if (!spec.q_is_finite()) {
        throw std::domain_error("limiting_frequencies: Q is infinite for " + spec.to_string() +
                                "; sum of 1/p over Q diverges, so every digit has frequency 1/b");
    }
    const auto q = spec.finite_q();
    std::vector<Complex> factor(b);
    for (unsigned a = 0; a < b; ++a) {
        const Complex z = roots_of_unity(a, b)[1];
        Complex prod{1.0, 0.0};
        for (auto p : q) {
            const double pd = static_cast<double>(p);
            prod *= (1.0 - 1.0 / pd) / (1.0 - z / pd);
        }
        factor[a] = prod;
    }
    std::vector<double> freq(b);
    for (unsigned k = 0; k < b; ++k) {
        ComplexNeumaierSum acc;
        for (unsigned a = 0; a < b; ++a) acc.add(roots_of_unity(-static_cast<long long>(a), b)[k] * factor[a]);
        // Rounding can leave a zero frequency at -1e-17.
        freq[k] = std::clamp(acc.value().real() / static_cast<double>(b), 0.0, 1.0);
    }
    return freq;
}

}  // namespace toeplitz
