// segments.hpp
// Drives omega_segment over a long range [lo, hi) in fixed-length segments.
// Blocks are produced by up to `workers` threads, one batch at a time, and
// handed to the consumer strictly in ascending range order on the calling
// thread, so output never depends on scheduling.

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "toeplitz/additive_sieve.hpp"

namespace toeplitz {

inline constexpr std::uint64_t kDefaultSegmentLength = std::uint64_t{1} << 20;

// TOEPLITZ_SEGMENT overrides the built-in default when set to a positive integer.
inline std::uint64_t default_segment_length() {
    if (const char* env = std::getenv("TOEPLITZ_SEGMENT")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return kDefaultSegmentLength;
}

inline unsigned default_workers() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

struct SegmentOptions {
    std::uint64_t segment_length = default_segment_length();
    unsigned workers = 1;
    // Extra exclusive segment ends; a segment never straddles one of these.
    std::vector<std::uint64_t> cuts;
};

// Segment boundaries for [lo, hi): multiples of the segment length from lo,
// merged with the requested cuts.
inline std::vector<std::uint64_t> segment_boundaries(std::uint64_t lo, std::uint64_t hi,
                                                     const SegmentOptions& opt) {
    if (opt.segment_length == 0) throw std::domain_error("segment length must be positive");
    std::vector<std::uint64_t> b;
    b.push_back(lo);
    auto cut = opt.cuts;
    std::sort(cut.begin(), cut.end());
    auto c = cut.begin();
    std::uint64_t pos = lo;
    while (pos < hi) {
        std::uint64_t next = (hi - pos > opt.segment_length) ? pos + opt.segment_length : hi;
        while (c != cut.end() && *c <= pos) ++c;
        if (c != cut.end() && *c < next) next = *c;
        b.push_back(next);
        pos = next;
    }
    return b;
}

inline PrimeTable table_for_range(std::uint64_t hi) {
    return sieve_primes(std::max<std::uint64_t>(2, required_table_limit(hi)));
}

template <class Consumer>
void for_each_omega_block(std::uint64_t lo, std::uint64_t hi, const PrimeSetSpec& spec,
                          const PrimeTable& table, const SegmentOptions& opt, Consumer&& consume) {
    if (hi <= lo) return;
    const auto bounds = segment_boundaries(lo, hi, opt);
    const std::size_t nseg = bounds.size() - 1;
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(opt.workers, nseg));
    const std::size_t max_len = std::min<std::uint64_t>(opt.segment_length, hi - lo);

    std::vector<SieveWorkspace> spaces;
    std::vector<OmegaBlock> blocks(workers);
    spaces.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        spaces.emplace_back(max_len);
        blocks[w].values.reserve(max_len);
    }

    if (workers == 1) {
        for (std::size_t s = 0; s < nseg; ++s) {
            omega_segment_into(bounds[s], bounds[s + 1], spec, table, spaces[0], blocks[0]);
            consume(std::as_const(blocks[0]));
        }
        return;
    }

    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t first = 0; first < nseg; first += workers) {
        const std::size_t batch = std::min(workers, nseg - first);
        {
            std::vector<std::jthread> threads;
            threads.reserve(batch);
            for (std::size_t w = 0; w < batch; ++w) {
                threads.emplace_back([&, w] {
                    try {
                        const std::size_t s = first + w;
                        omega_segment_into(bounds[s], bounds[s + 1], spec, table, spaces[w], blocks[w]);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
        }
        for (std::size_t w = 0; w < batch; ++w) {
            if (errors[w]) std::rethrow_exception(errors[w]);
            consume(std::as_const(blocks[w]));
        }
    }
}

template <class Consumer>
void for_each_omega_block(std::uint64_t lo, std::uint64_t hi, const PrimeSetSpec& spec,
                          const SegmentOptions& opt, Consumer&& consume) {
    const auto table = table_for_range(hi);
    for_each_omega_block(lo, hi, spec, table, opt, std::forward<Consumer>(consume));
}

}  // namespace toeplitz
