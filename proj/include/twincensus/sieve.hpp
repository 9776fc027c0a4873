#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace twincensus {

// One sieved window of odd numbers. Bit i stands for base + 2*i; a set bit
// marks that odd composite, so the clear bits are exactly the primes.
struct Segment {
    std::uint64_t base = 0;
    std::uint64_t length = 0;
    std::vector<std::uint64_t> flags;

    bool composite(std::uint64_t i) const { return (flags[i >> 6] >> (i & 63)) & 1; }
    void mark(std::uint64_t i) { flags[i >> 6] |= std::uint64_t{1} << (i & 63); }
    std::uint64_t odd_at(std::uint64_t i) const { return base + 2 * i; }
};

// A twin pair (p, p+2). The census evaluates at x_eval = p + 2: the pair
// exists only once both members have appeared.
struct TwinEvent {
    std::uint64_t p = 0;
    std::uint64_t x_eval = 0;
};

// Seed primes complete up to `limit` (limit itself may exceed primes.back()).
struct SeedPrimes {
    std::uint64_t limit = 0;
    std::vector<std::uint64_t> primes;
};

// All primes <= n ascending; empty for n < 2.
std::vector<std::uint64_t> small_primes(std::uint64_t n);

SeedPrimes seed_primes(std::uint64_t n);

std::uint64_t isqrt(std::uint64_t n);

// Sieves the odds base, base+2, ..., base+2*(length-1). Requires base odd,
// base >= 3, and seeds covering sqrt of the last value; throws otherwise.
Segment sieve_segment(std::uint64_t base, std::uint64_t length, const SeedPrimes& seeds);

struct StreamConfig {
    std::uint64_t segment_odds = std::uint64_t{1} << 20;
    unsigned threads = 1;
    std::uint64_t first_odd = 3;  // resume: scanning starts here
};

// Odd primes p with first_odd <= p <= limit, strictly ascending. Delivery
// order and content are independent of segment_odds and threads.
void stream_primes(std::uint64_t limit, const StreamConfig& config,
                   const std::function<void(std::uint64_t)>& sink);

// Twin pairs with p >= first_odd and x_eval <= limit, ascending in p.
// Pairs straddling segment seams are never lost: the scan carries the
// previous prime across segments.
void stream_twins(std::uint64_t limit, const StreamConfig& config,
                  const std::function<void(const TwinEvent&)>& sink);

}  // namespace twincensus
