#include "vigil/bus/word.hpp"

#include <bit>

namespace vigil::bus {

namespace {
constexpr std::uint32_t kSyncCmd = 0b111u;
constexpr std::uint32_t kSyncData = 0b000u;

void check_range(int v, int lo, int hi, const char* name) {
    if (v < lo || v > hi)
        throw FieldOutOfRange(std::string(name) + " = " + std::to_string(v) +
                              " outside [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
}
} // namespace

std::uint8_t odd_parity_bit(std::uint16_t payload) {
    return static_cast<std::uint8_t>(1u ^ (std::popcount(static_cast<unsigned>(payload)) & 1u));
}

std::uint32_t Word::pattern() const {
    const std::uint32_t s = (sync == SyncType::Data) ? kSyncData : kSyncCmd;
    return (s << 17) | (static_cast<std::uint32_t>(payload) << 1) | parity;
}

bool Word::parity_ok() const { return parity == odd_parity_bit(payload); }

std::uint16_t pack_command(const CommandFields& f) {
    check_range(f.terminal_address, 0, 31, "terminal_address");
    check_range(f.transmit_receive, 0, 1, "transmit_receive");
    check_range(f.subaddress_mode, 0, 31, "subaddress_mode");
    check_range(f.count_or_mode, 0, 31, "count_or_mode");
    return static_cast<std::uint16_t>((f.terminal_address << 11) | (f.transmit_receive << 10) |
                                      (f.subaddress_mode << 5) | f.count_or_mode);
}

CommandFields parse_command(const Word& w) {
    if (w.sync != SyncType::CommandOrStatus)
        throw BadSync("parse_command on a data-sync word");
    CommandFields f;
    f.terminal_address = (w.payload >> 11) & 0x1f;
    f.transmit_receive = (w.payload >> 10) & 0x1;
    f.subaddress_mode = (w.payload >> 5) & 0x1f;
    f.count_or_mode = w.payload & 0x1f;
    return f;
}

int status_terminal_address(const Word& w) {
    if (w.sync != SyncType::CommandOrStatus)
        throw BadSync("status word must carry command/status sync");
    return (w.payload >> 11) & 0x1f;
}

Word encode_word(WordKind kind, std::uint16_t payload) {
    Word w;
    w.kind = kind;
    w.sync = (kind == WordKind::Data) ? SyncType::Data : SyncType::CommandOrStatus;
    w.payload = payload;
    w.parity = odd_parity_bit(payload);
    return w;
}

Word encode_command(const CommandFields& f) {
    return encode_word(WordKind::Command, pack_command(f));
}

Word encode_data(std::uint16_t value) { return encode_word(WordKind::Data, value); }

Word encode_status(int terminal_address, std::uint16_t flags) {
    check_range(terminal_address, 0, 31, "terminal_address");
    if (flags > 0x7ff) throw FieldOutOfRange("status flags exceed 11 bits");
    return encode_word(WordKind::Status,
                       static_cast<std::uint16_t>((terminal_address << 11) | flags));
}

Word decode_word(std::uint32_t pattern) {
    if (pattern >> 20)
        throw BadSync("pattern wider than 20 bits");
    const std::uint32_t sync = (pattern >> 17) & 0x7;
    Word w;
    if (sync == kSyncCmd) {
        w.sync = SyncType::CommandOrStatus;
        w.kind = WordKind::Command;
    } else if (sync == kSyncData) {
        w.sync = SyncType::Data;
        w.kind = WordKind::Data;
    } else {
        throw BadSync("unrecognized sync pattern");
    }
    w.payload = static_cast<std::uint16_t>((pattern >> 1) & 0xffff);
    w.parity = static_cast<std::uint8_t>(pattern & 1u);
    if (!w.parity_ok()) throw ParityError("parity violation");
    return w;
}

} // namespace vigil::bus
