#include "twincensus/sieve.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <condition_variable>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

namespace twincensus {

namespace {

inline bool sq_le(std::uint64_t r, std::uint64_t n) {
    return static_cast<unsigned __int128>(r) * r <= n;
}

}  // namespace

std::uint64_t isqrt(std::uint64_t n) {
    if (n == 0) return 0;
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && !sq_le(r, n)) --r;
    while (sq_le(r + 1, n)) ++r;
    return r;
}

std::vector<std::uint64_t> small_primes(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    if (n < 2) return out;
    out.push_back(2);
    if (n < 3) return out;
    std::uint64_t m = (n - 1) / 2;  // odds 3, 5, ..., 3 + 2*(m-1)
    std::vector<bool> comp(m, false);
    for (std::uint64_t i = 0;; ++i) {
        std::uint64_t p = 3 + 2 * i;
        if (!sq_le(p, n)) break;
        if (comp[i]) continue;
        for (std::uint64_t j = (p * p - 3) / 2; j < m; j += p) comp[j] = true;
    }
    for (std::uint64_t i = 0; i < m; ++i)
        if (!comp[i]) out.push_back(3 + 2 * i);
    return out;
}

SeedPrimes seed_primes(std::uint64_t n) { return SeedPrimes{n, small_primes(n)}; }

Segment sieve_segment(std::uint64_t base, std::uint64_t length, const SeedPrimes& seeds) {
    if (base < 3 || base % 2 == 0)
        throw std::invalid_argument("sieve_segment: base must be odd and >= 3, got " + std::to_string(base));
    if (length == 0) throw std::invalid_argument("sieve_segment: length must be positive");
    if (length - 1 > (UINT64_MAX - base) / 2)
        throw std::invalid_argument("sieve_segment: segment end overflows");
    std::uint64_t last = base + 2 * (length - 1);
    std::uint64_t root = isqrt(last);
    if (seeds.limit < root)
        throw std::invalid_argument("sieve_segment: seeds cover " + std::to_string(seeds.limit) +
                                    " but the segment needs " + std::to_string(root));

    Segment seg;
    seg.base = base;
    seg.length = length;
    seg.flags.assign((length + 63) / 64, 0);

    for (std::uint64_t p : seeds.primes) {
        if (p == 2) continue;
        if (!sq_le(p, last)) break;
        std::uint64_t start = p * p;
        if (start < base) {
            std::uint64_t m = ((base + p - 1) / p) * p;
            if (m % 2 == 0) m += p;
            start = m;
        }
        for (std::uint64_t i = (start - base) / 2; i < length; i += p) seg.mark(i);
    }
    return seg;
}

namespace {

// Workers sieve segments in any order; the caller consumes them strictly in
// index order, so downstream output never depends on threads or timing.
void for_each_segment(std::uint64_t first_odd, std::uint64_t last_odd, const StreamConfig& cfg,
                      const std::function<void(const Segment&)>& consume) {
    if (first_odd > last_odd) return;
    std::uint64_t seg_odds = std::max<std::uint64_t>(cfg.segment_odds, 1);
    std::uint64_t total = (last_odd - first_odd) / 2 + 1;
    std::uint64_t nseg = (total + seg_odds - 1) / seg_odds;
    SeedPrimes seeds = seed_primes(std::max<std::uint64_t>(isqrt(last_odd), 2));
    auto plan = [&](std::uint64_t s) {
        std::uint64_t off = s * seg_odds;
        return std::pair<std::uint64_t, std::uint64_t>{first_odd + 2 * off, std::min(seg_odds, total - off)};
    };

    unsigned threads = std::max(1u, cfg.threads);
    if (threads == 1 || nseg == 1) {
        for (std::uint64_t s = 0; s < nseg; ++s) {
            auto [b, l] = plan(s);
            Segment seg = sieve_segment(b, l, seeds);
            consume(seg);
        }
        return;
    }

    std::mutex mu;
    std::condition_variable cv_room, cv_ready;
    std::map<std::uint64_t, Segment> ready;
    std::uint64_t consumed = 0;
    std::atomic<std::uint64_t> fetch{0};
    const std::uint64_t window = std::uint64_t{4} * threads;
    std::exception_ptr err;
    bool stop = false;

    auto work = [&] {
        for (;;) {
            std::uint64_t s = fetch.fetch_add(1, std::memory_order_relaxed);
            if (s >= nseg) return;
            {
                std::unique_lock lk(mu);
                cv_room.wait(lk, [&] { return stop || s < consumed + window; });
                if (stop) return;
            }
            try {
                auto [b, l] = plan(s);
                Segment seg = sieve_segment(b, l, seeds);
                std::lock_guard lk(mu);
                ready.emplace(s, std::move(seg));
                cv_ready.notify_all();
            } catch (...) {
                std::lock_guard lk(mu);
                if (!err) err = std::current_exception();
                stop = true;
                cv_ready.notify_all();
                cv_room.notify_all();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);

    auto shut_down = [&] {
        {
            std::lock_guard lk(mu);
            stop = true;
        }
        cv_room.notify_all();
        cv_ready.notify_all();
        for (auto& th : pool) th.join();
    };

    try {
        for (std::uint64_t s = 0; s < nseg; ++s) {
            Segment seg;
            {
                std::unique_lock lk(mu);
                cv_ready.wait(lk, [&] { return stop || ready.count(s) != 0; });
                if (stop) break;
                seg = std::move(ready.at(s));
                ready.erase(s);
                consumed = s + 1;
                cv_room.notify_all();
            }
            consume(seg);
        }
    } catch (...) {
        shut_down();
        throw;
    }
    shut_down();
    if (err) std::rethrow_exception(err);
}

// Calls sink(q) for every prime q in the segment, ascending.
template <class Sink>
void scan_segment(const Segment& seg, Sink&& sink) {
    std::uint64_t words = (seg.length + 63) / 64;
    for (std::uint64_t w = 0; w < words; ++w) {
        std::uint64_t bits = ~seg.flags[w];
        if (w == words - 1 && (seg.length & 63)) bits &= (std::uint64_t{1} << (seg.length & 63)) - 1;
        while (bits) {
            unsigned b = static_cast<unsigned>(std::countr_zero(bits));
            bits &= bits - 1;
            sink(seg.base + 2 * (64 * w + b));
        }
    }
}

std::uint64_t last_odd_leq(std::uint64_t n) { return (n & 1) ? n : n - 1; }

}  // namespace

void stream_primes(std::uint64_t limit, const StreamConfig& config,
                   const std::function<void(std::uint64_t)>& sink) {
    if (limit < 3) return;
    std::uint64_t first = std::max<std::uint64_t>(config.first_odd | 1, 3);
    for_each_segment(first, last_odd_leq(limit), config,
                     [&](const Segment& seg) { scan_segment(seg, sink); });
}

void stream_twins(std::uint64_t limit, const StreamConfig& config,
                  const std::function<void(const TwinEvent&)>& sink) {
    if (limit < 5) return;
    std::uint64_t first = std::max<std::uint64_t>(config.first_odd | 1, 3);
    std::uint64_t prev = 0;
    for_each_segment(first, last_odd_leq(limit), config, [&](const Segment& seg) {
        scan_segment(seg, [&](std::uint64_t q) {
            if (prev != 0 && prev + 2 == q) sink(TwinEvent{prev, q});
            prev = q;
        });
    });
}

}  // namespace twincensus
