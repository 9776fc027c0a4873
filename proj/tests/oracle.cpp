#include "oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace twincensus::oracle {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

std::vector<std::uint64_t> primes_upto(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t k = 2; k <= n; ++k)
        if (is_prime(k)) out.push_back(k);
    return out;
}

std::vector<TwinEvent> twins_upto(std::uint64_t limit) {
    std::vector<TwinEvent> out;
    for (std::uint64_t p = 3; p + 2 <= limit; p += 2)
        if (is_prime(p) && is_prime(p + 2)) out.push_back(TwinEvent{p, p + 2});
    return out;
}

namespace {

long double f_ld(long double u) {
    long double l = std::log(u);
    return 1.0L / (l * l);
}

long double simpson_ld(long double lo, long double hi, std::uint64_t panels) {
    if (lo == hi) return 0.0L;
    long double h = (hi - lo) / static_cast<long double>(panels);
    long double s = f_ld(lo) + f_ld(hi);
    for (std::uint64_t i = 1; i < panels; ++i)
        s += (i % 2 ? 4.0L : 2.0L) * f_ld(lo + h * static_cast<long double>(i));
    return s * h / 3.0L;
}

struct Tracker {
    int a;
    long double off;
    int sign = 0;  // 0 unset, +1, -1
    std::uint64_t nu2 = 0;
    std::vector<OracleEvent> log;
};

void sample(Tracker& t, std::uint64_t pi2, long double L, double c2, std::uint64_t p,
            std::uint64_t x, int phase) {
    double d2 = static_cast<double>(pi2) - c2 * static_cast<double>(L - t.off);
    if (std::abs(d2) < 1e-9) return;
    int s = d2 > 0.0 ? 1 : -1;
    if (t.sign == 0) {
        t.sign = s;
        return;
    }
    if (s == t.sign) return;
    t.log.push_back(OracleEvent{t.a, p, x, s > 0 ? 0 : 1, phase});
    t.nu2 += 1;
    t.sign = s;
}

}  // namespace

double li2_simpson(double lo, double hi, std::uint64_t panels) {
    if (!(lo >= 2.0) || !(hi >= lo)) throw std::invalid_argument("li2_simpson: bad interval");
    if (panels < 2 || panels % 2 != 0) throw std::invalid_argument("li2_simpson: panels must be even");
    return static_cast<double>(simpson_ld(lo, hi, panels));
}

OracleCensus census(std::uint64_t limit, double c2, SamplingMode mode,
                    std::uint64_t first_checkpoint) {
    auto twins = twins_upto(limit);
    Tracker a2{2, 0.0L};
    Tracker a5{5, simpson_ld(2.0L, 5.0L, std::uint64_t{1} << 20)};

    OracleCensus out;
    long double L = 0.0L;
    std::uint64_t x_last = 2;
    std::uint64_t next_T = first_checkpoint;
    auto advance = [&](std::uint64_t x) {
        if (x > x_last) {
            L += simpson_ld(static_cast<long double>(x_last), static_cast<long double>(x), 1024);
            x_last = x;
        }
    };
    auto emit_row = [&](std::uint64_t T) {
        advance(T);
        double Td = static_cast<double>(T);
        out.rows.push_back(CheckpointRow{T, a2.nu2, a5.nu2, out.pi2, static_cast<double>(L),
                                         std::sqrt(Td) / std::log(Td)});
    };

    for (const TwinEvent& ev : twins) {
        while (next_T < ev.x_eval && next_T <= limit) {
            emit_row(next_T);
            next_T <<= 1;
        }
        advance(ev.x_eval);
        if (mode == SamplingMode::TwoPhase) {
            sample(a2, out.pi2, L, c2, ev.p, ev.x_eval, 0);
            sample(a5, out.pi2, L, c2, ev.p, ev.x_eval, 0);
        }
        out.pi2 += 1;
        sample(a2, out.pi2, L, c2, ev.p, ev.x_eval, 1);
        sample(a5, out.pi2, L, c2, ev.p, ev.x_eval, 1);
    }
    while (next_T <= limit) {
        emit_row(next_T);
        next_T <<= 1;
    }

    out.nu2_a2 = a2.nu2;
    out.nu2_a5 = a5.nu2;
    std::size_t i = 0, j = 0;
    while (i < a2.log.size() || j < a5.log.size()) {
        bool take_a2 = j >= a5.log.size() || (i < a2.log.size() && a2.log[i].x <= a5.log[j].x);
        out.events.push_back(take_a2 ? a2.log[i++] : a5.log[j++]);
    }
    return out;
}

}  // namespace twincensus::oracle
