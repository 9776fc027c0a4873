#include "twincensus/census.hpp"

#include "twincensus/model.hpp"

#include <cmath>
#include <string>

namespace twincensus {

double tracker_d2(const CensusState& state, const SignTracker& t) {
    return static_cast<double>(state.pi2) - state.c2 * (state.li2_from_2.value() - t.offset);
}

void advance_frontier(CensusState& state, std::uint64_t x, const QuadratureMethod& method) {
    if (x < state.x_last)
        throw std::logic_error("advance_frontier: frontier cannot move backwards (" +
                               std::to_string(x) + " < " + std::to_string(state.x_last) + ")");
    if (x == state.x_last) return;
    state.li2_from_2.add(
        li2_interval(static_cast<double>(state.x_last), static_cast<double>(x), method));
    state.x_last = x;
}

namespace {

int sample_tracker(const CensusState& state, SignTracker& t, const TwinEvent& ev, Phase phase) {
    double d2 = tracker_d2(state, t);
    if (std::abs(d2) < kSignEps) return 0;  // no defined sign: neither set nor flip
    Sign s = d2 > 0.0 ? Sign::Positive : Sign::Negative;
    if (t.sign == Sign::Unset) {
        t.sign = s;
        t.last_d2 = d2;
        return 0;  // first defined sign is recorded, not counted
    }
    if (s == t.sign) {
        t.last_d2 = d2;
        return 0;
    }
    SignChangeEvent e;
    e.pair_p = ev.p;
    e.x = ev.x_eval;
    e.direction = s == Sign::Positive ? Direction::ToPositive : Direction::ToNegative;
    e.d2_before = t.last_d2;
    e.d2_after = d2;
    e.phase = phase;
    t.log.push_back(e);
    t.nu2 += 1;
    if (!t.first_crossing) t.first_crossing = ev;
    t.sign = s;
    t.last_d2 = d2;
    return 1;
}

}  // namespace

int observe_twin(CensusState& state, const TwinEvent& ev, const QuadratureMethod& method,
                 SamplingMode sampling) {
    if (ev.x_eval != ev.p + 2)
        throw std::logic_error("observe_twin: x_eval must equal p + 2");
    if (ev.x_eval <= state.x_last)
        throw std::logic_error("observe_twin: events must arrive in strictly increasing x order (" +
                               std::to_string(ev.x_eval) + " <= " + std::to_string(state.x_last) + ")");
    advance_frontier(state, ev.x_eval, method);
    int recorded = 0;
    if (sampling == SamplingMode::TwoPhase) {
        recorded += sample_tracker(state, state.tracker_a2, ev, Phase::PreIncrement);
        recorded += sample_tracker(state, state.tracker_a5, ev, Phase::PreIncrement);
    }
    state.pi2 += 1;
    recorded += sample_tracker(state, state.tracker_a2, ev, Phase::PostIncrement);
    recorded += sample_tracker(state, state.tracker_a5, ev, Phase::PostIncrement);
    return recorded;
}

void self_check(const CensusState& state) {
    if (state.tracker_a2.a != 2 || state.tracker_a5.a != 5)
        throw std::logic_error("census self-check: tracker labels corrupted");
    if (state.tracker_a2.offset != 0.0)
        throw std::logic_error("census self-check: a=2 tracker must have zero offset");
    // The stored a=5 offset must be the integral it claims to be. Both
    // quadrature rules agree on [2,5] to ~1e-11, so a 1e-8 gate accepts
    // either engine and rejects genuine corruption.
    double off5_fresh = li2_offset(5, QuadratureMethod{QuadKind::Gauss10, 1e-12});
    if (std::abs(state.tracker_a5.offset - off5_fresh) > 1e-8)
        throw std::logic_error("census self-check: a=5 tracker offset is corrupt");
    // Evaluated in long double: the double-precision cancellation in
    // pi2 - c2*L grows past 1e-8 * rhs for L beyond ~1e8 even when the state
    // is perfectly consistent.
    long double L = static_cast<long double>(state.li2_from_2.primary) +
                    static_cast<long double>(state.li2_from_2.compensation);
    long double pi = static_cast<long double>(state.pi2);
    long double c2 = state.c2;
    long double off2 = state.tracker_a2.offset;
    long double off5 = state.tracker_a5.offset;
    long double lhs = (pi - c2 * (L - off5)) - (pi - c2 * (L - off2));
    long double rhs = c2 * (off5 - off2);
    long double tol = 1e-8L * (rhs < 0 ? -rhs : rhs);
    long double diff = lhs - rhs;
    if ((diff < 0 ? -diff : diff) > tol)
        throw std::logic_error("census self-check: offset identity breached; state is corrupt");
}

namespace {

void emit_row(CensusState& state, std::uint64_t T, const CensusConfig& cfg) {
    advance_frontier(state, T, cfg.method);
    self_check(state);
    CheckpointRow row;
    row.T = T;
    row.nu2_a2 = state.tracker_a2.nu2;
    row.nu2_a5 = state.tracker_a5.nu2;
    row.pi2 = state.pi2;
    row.li2 = state.li2_from_2.value();
    row.conjecture = conjecture_value(static_cast<double>(T));
    state.checkpoints.push_back(row);
    if (!cfg.checkpoint_path.empty()) checkpoint_save(state, cfg.checkpoint_path);
}

void continue_census(CensusState& state, std::uint64_t limit, const CensusConfig& cfg) {
    if (cfg.first_checkpoint < 4 || (cfg.first_checkpoint & (cfg.first_checkpoint - 1)) != 0)
        throw std::invalid_argument("census: first_checkpoint must be a power of two >= 4");
    if (limit < state.x_last)
        throw std::invalid_argument("census: limit " + std::to_string(limit) +
                                    " is below the state frontier " + std::to_string(state.x_last));
    state.limit = limit;

    std::uint64_t next_T = cfg.first_checkpoint;
    std::uint64_t done = state.checkpoints.empty() ? 0 : state.checkpoints.back().T;
    if (state.x_last > 2 && state.x_last > done) done = state.x_last;
    while (next_T <= done) next_T <<= 1;

    StreamConfig scfg;
    scfg.segment_odds = cfg.segment_odds;
    scfg.threads = cfg.threads;
    scfg.first_odd = state.x_last <= 3 ? 3 : ((state.x_last & 1) ? state.x_last : state.x_last - 1);

    stream_twins(limit, scfg, [&](const TwinEvent& ev) {
        while (next_T < ev.x_eval && next_T <= limit) {
            emit_row(state, next_T, cfg);
            next_T <<= 1;
        }
        observe_twin(state, ev, cfg.method, cfg.sampling);
    });
    while (next_T <= limit) {
        emit_row(state, next_T, cfg);
        next_T <<= 1;
    }
}

}  // namespace

CensusState run_census(std::uint64_t limit, const TwinConstant& c2, const CensusConfig& config) {
    if (limit < 8) throw std::invalid_argument("run_census: limit must be >= 8");
    if (!(c2.value > 1.0) || !(c2.value < 2.0) || !(c2.tail_bound >= 0.0))
        throw std::invalid_argument("run_census: malformed twin constant");
    // The constant's truncation error shifts c2*Li2 by up to tail*Li2(limit),
    // which at 2^32 scale approaches the magnitude of marginal d2 samples.
    // 1e-10 keeps that shift under ~1e-3 through 2^42.
    if (!(c2.tail_bound < 1e-10))
        throw std::invalid_argument("run_census: twin constant tail bound is too loose to trust the census");
    CensusState state;
    state.limit = limit;
    state.c2 = c2.value;
    state.tracker_a2.a = 2;
    state.tracker_a2.offset = 0.0;
    state.tracker_a5.a = 5;
    state.tracker_a5.offset = li2_offset(5, config.method);
    continue_census(state, limit, config);
    return state;
}

void resume_census(CensusState& state, std::uint64_t limit, const CensusConfig& config) {
    state.tracker_a2.offset = li2_offset(2, config.method);
    state.tracker_a5.offset = li2_offset(5, config.method);
    self_check(state);
    continue_census(state, limit, config);
}

}  // namespace twincensus
