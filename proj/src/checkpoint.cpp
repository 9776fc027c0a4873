#include "twincensus/census.hpp"
#include "twincensus/util.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace twincensus {

namespace {

constexpr char kMagic[8] = {'T', 'W', 'I', 'N', 'C', 'K', '0', '1'};
constexpr std::uint32_t kVersion = 1;

struct Writer {
    std::string buf;
    void u8(std::uint8_t v) { buf.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
};

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;
    std::size_t end = 0;

    void need(std::size_t n) {
        if (pos + n > end) throw CheckpointError("checkpoint: truncated payload");
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf[pos++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t{static_cast<std::uint8_t>(buf[pos++])} << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t{static_cast<std::uint8_t>(buf[pos++])} << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
};

void put_tracker(Writer& w, const SignTracker& t) {
    w.u8(static_cast<std::uint8_t>(t.a));
    w.u8(static_cast<std::uint8_t>(t.sign));
    w.u64(t.nu2);
    w.f64(t.last_d2);
    w.u64(t.log.size());
    for (const SignChangeEvent& e : t.log) {
        w.u64(e.pair_p);
        w.u64(e.x);
        w.u8(static_cast<std::uint8_t>(e.direction));
        w.u8(static_cast<std::uint8_t>(e.phase));
        w.f64(e.d2_before);
        w.f64(e.d2_after);
    }
}

SignTracker get_tracker(Reader& r) {
    SignTracker t;
    t.a = r.u8();
    std::uint8_t s = r.u8();
    if (s > 2) throw CheckpointError("checkpoint: invalid tracker sign");
    t.sign = static_cast<Sign>(s);
    t.nu2 = r.u64();
    t.last_d2 = r.f64();
    std::uint64_t n = r.u64();
    if (n != t.nu2) throw CheckpointError("checkpoint: nu2 disagrees with crossing log length");
    t.log.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        SignChangeEvent e;
        e.pair_p = r.u64();
        e.x = r.u64();
        std::uint8_t dir = r.u8();
        std::uint8_t ph = r.u8();
        if (dir > 1 || ph > 1) throw CheckpointError("checkpoint: invalid crossing event");
        e.direction = static_cast<Direction>(dir);
        e.phase = static_cast<Phase>(ph);
        e.d2_before = r.f64();
        e.d2_after = r.f64();
        t.log.push_back(e);
    }
    if (!t.log.empty()) t.first_crossing = TwinEvent{t.log.front().pair_p, t.log.front().x};
    return t;
}

}  // namespace

void checkpoint_save(const CensusState& state, const std::filesystem::path& path) {
    self_check(state);
    Writer w;
    w.buf.append(kMagic, sizeof kMagic);
    w.u32(kVersion);
    w.u32(0);
    w.u64(state.limit);
    w.u64(state.x_last);
    w.u64(state.pi2);
    w.f64(state.li2_from_2.primary);
    w.f64(state.li2_from_2.compensation);
    w.f64(state.c2);
    put_tracker(w, state.tracker_a2);
    put_tracker(w, state.tracker_a5);
    w.u64(state.checkpoints.size());
    for (const CheckpointRow& row : state.checkpoints) {
        w.u64(row.T);
        w.u64(row.nu2_a2);
        w.u64(row.nu2_a5);
        w.u64(row.pi2);
        w.f64(row.li2);
        w.f64(row.conjecture);
    }
    w.u64(crc64_xz(w.buf.data(), w.buf.size()));
    atomic_write_file(path, w.buf);
}

CensusState checkpoint_load(const std::filesystem::path& path, const QuadratureMethod& method) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("checkpoint: cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < sizeof kMagic + 4 + 4 + 8)
        throw CheckpointError("checkpoint: file too short to be a census checkpoint");
    if (std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0)
        throw CheckpointError("checkpoint: bad magic; not a census checkpoint");

    std::uint64_t stored = 0;
    for (int i = 0; i < 8; ++i)
        stored |= std::uint64_t{static_cast<std::uint8_t>(buf[buf.size() - 8 + i])} << (8 * i);
    if (crc64_xz(buf.data(), buf.size() - 8) != stored)
        throw CheckpointError("checkpoint: CRC-64 mismatch; file is corrupt");

    Reader r{buf, sizeof kMagic, buf.size() - 8};
    std::uint32_t version = r.u32();
    if (version != kVersion)
        throw CheckpointError("checkpoint: unsupported format version " + std::to_string(version));
    r.u32();

    CensusState state;
    state.limit = r.u64();
    state.x_last = r.u64();
    state.pi2 = r.u64();
    state.li2_from_2.primary = r.f64();
    state.li2_from_2.compensation = r.f64();
    state.c2 = r.f64();
    state.tracker_a2 = get_tracker(r);
    state.tracker_a5 = get_tracker(r);
    if (state.tracker_a2.a != 2 || state.tracker_a5.a != 5)
        throw CheckpointError("checkpoint: tracker labels corrupted");
    std::uint64_t rows = r.u64();
    state.checkpoints.reserve(rows);
    for (std::uint64_t i = 0; i < rows; ++i) {
        CheckpointRow row;
        row.T = r.u64();
        row.nu2_a2 = r.u64();
        row.nu2_a5 = r.u64();
        row.pi2 = r.u64();
        row.li2 = r.f64();
        row.conjecture = r.f64();
        state.checkpoints.push_back(row);
    }
    if (r.pos != r.end) throw CheckpointError("checkpoint: trailing bytes after payload");

    state.tracker_a2.offset = li2_offset(2, method);
    state.tracker_a5.offset = li2_offset(5, method);
    self_check(state);
    return state;
}

}  // namespace twincensus
