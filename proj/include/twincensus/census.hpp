#pragma once

#include "twincensus/analytic.hpp"
#include "twincensus/sieve.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twincensus {

enum class Sign : std::uint8_t { Negative = 0, Positive = 1, Unset = 2 };
enum class Direction : std::uint8_t { ToPositive = 0, ToNegative = 1 };
enum class Phase : std::uint8_t { PreIncrement = 0, PostIncrement = 1 };

// How d2 is sampled at a twin event. PostIncrementOnly samples once, after
// the pi2 increment; it reproduces the published crossing counts and is the
// calibrated default (see README). TwoPhase additionally samples just before
// the increment and so also counts excursions the step itself straddles.
enum class SamplingMode : std::uint8_t { PostIncrementOnly = 0, TwoPhase = 1 };

// Samples closer to zero than this have no defined sign: they neither set
// nor flip the tracker state.
inline constexpr double kSignEps = 1e-9;

struct SignChangeEvent {
    std::uint64_t pair_p = 0;   // smaller twin member of the event
    std::uint64_t x = 0;        // x_eval where the flip was observed
    Direction direction = Direction::ToPositive;
    double d2_before = 0.0;     // last sample with the old sign
    double d2_after = 0.0;
    Phase phase = Phase::PostIncrement;
};

struct SignTracker {
    int a = 2;
    Sign sign = Sign::Unset;
    std::uint64_t nu2 = 0;
    std::optional<TwinEvent> first_crossing;
    std::vector<SignChangeEvent> log;
    double last_d2 = 0.0;  // most recent sample with a defined sign
    double offset = 0.0;   // integral_2^a du/log^2 u under the census method
};

struct CheckpointRow {
    std::uint64_t T = 0;
    std::uint64_t nu2_a2 = 0;
    std::uint64_t nu2_a5 = 0;
    std::uint64_t pi2 = 0;
    double li2 = 0.0;         // accumulated integral_2^T du/log^2 u
    double conjecture = 0.0;  // sqrt(T)/log(T)
};

struct CensusState {
    std::uint64_t limit = 0;
    std::uint64_t x_last = 2;  // frontier the integral has been advanced to
    std::uint64_t pi2 = 0;
    CompensatedSum li2_from_2;
    double c2 = 0.0;  // frozen at census start
    SignTracker tracker_a2;
    SignTracker tracker_a5;
    std::vector<CheckpointRow> checkpoints;
};

struct CensusConfig {
    QuadratureMethod method;
    SamplingMode sampling = SamplingMode::PostIncrementOnly;
    std::uint64_t first_checkpoint = std::uint64_t{1} << 16;  // power of two
    std::uint64_t segment_odds = std::uint64_t{1} << 20;
    unsigned threads = 1;
    std::filesystem::path checkpoint_path;  // save at every checkpoint row when set
};

// d2(x) = pi2(x) - c2 * (integral - tracker offset) for one tracker.
double tracker_d2(const CensusState& state, const SignTracker& t);

// Advances the integral frontier to x (no pi2 change); checkpoint rows land
// exactly on their T this way. Throws if x < x_last.
void advance_frontier(CensusState& state, std::uint64_t x, const QuadratureMethod& method);

// Feeds one twin event: advances the integral to ev.x_eval, increments pi2,
// samples both trackers per `sampling`, appends any sign changes to the
// tracker logs, and returns how many were recorded. Events must arrive in
// strictly increasing x_eval order; out of order throws std::logic_error.
int observe_twin(CensusState& state, const TwinEvent& ev, const QuadratureMethod& method,
                 SamplingMode sampling = SamplingMode::PostIncrementOnly);

// Full census to `limit` (>= 8): fresh state, both trackers in one pass.
// Requires c2.tail_bound < 1e-6 so the constant cannot bias the counts.
CensusState run_census(std::uint64_t limit, const TwinConstant& c2, const CensusConfig& config);

// Continues a loaded state to a larger limit; output is byte-identical to a
// cold run of the same limit.
void resume_census(CensusState& state, std::uint64_t limit, const CensusConfig& config);

// Offset identity: d2(a=5) - d2(a=2) = c2 * offset_5 at every step. Checked
// in long double; throws std::logic_error on breach beyond 1e-8 relative.
void self_check(const CensusState& state);

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Versioned little-endian binary image, CRC-64/XZ over the whole payload,
// written atomically. load verifies magic, version, and checksum, and
// recomputes tracker offsets for `method`.
void checkpoint_save(const CensusState& state, const std::filesystem::path& path);
CensusState checkpoint_load(const std::filesystem::path& path, const QuadratureMethod& method);

}  // namespace twincensus
