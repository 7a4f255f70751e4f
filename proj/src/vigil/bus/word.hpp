#pragma once
// Bit-accurate MIL-STD-1553 words.
//
// On-wire model: 20 bit-times per word = 3 sync + 16 payload + 1 parity.
// The sync is a binary symbol here (command/status polarity vs. data
// polarity); analog waveforms live in the signal model. A word packs into a
// 20-bit pattern (5 hex digits in captures):
//   bits 19..17  sync  (111 command/status, 000 data)
//   bits 16..1   payload, MSB first
//   bit  0       parity, odd over the 17 non-sync bits
//
// Command payload, MSB first: TA[5] TR[1] SA[5] COUNT[5].
// Status payload: TA[5] followed by 11 flag bits (all zero in nominal traffic).

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vigil::bus {

struct FieldOutOfRange : std::runtime_error {
    explicit FieldOutOfRange(const std::string& w) : std::runtime_error(w) {}
};
struct BadSync : std::runtime_error {
    explicit BadSync(const std::string& w) : std::runtime_error(w) {}
};
struct ParityError : std::runtime_error {
    explicit ParityError(const std::string& w) : std::runtime_error(w) {}
};

enum class SyncType : std::uint8_t { CommandOrStatus, Data };
enum class WordKind : std::uint8_t { Command, Data, Status };

constexpr int kBroadcastAddress = 31;
// Feature-level sentinel for the bus controller (it has no terminal address).
constexpr int kBcAddress = 32;

struct CommandFields {
    int terminal_address = 0;  // 0..31
    int transmit_receive = 0;  // 1 = RT transmits
    int subaddress_mode = 0;   // 0..31; 0 or 31 flags a mode command
    int count_or_mode = 0;     // data word count (0 encodes 32) or mode code

    bool is_mode_command() const { return subaddress_mode == 0 || subaddress_mode == 31; }
    bool is_broadcast() const { return terminal_address == kBroadcastAddress; }
    // decoded data word count for non-mode commands
    int word_count() const { return count_or_mode == 0 ? 32 : count_or_mode; }

    bool operator==(const CommandFields&) const = default;
};

struct Word {
    SyncType sync = SyncType::Data;
    std::uint16_t payload = 0;
    std::uint8_t parity = 0;
    WordKind kind = WordKind::Data;

    std::uint32_t pattern() const;  // 20-bit on-wire pattern
    bool parity_ok() const;

    bool operator==(const Word&) const = default;
};

// Odd parity: the 17 non-sync bits (payload + parity) have odd popcount.
std::uint8_t odd_parity_bit(std::uint16_t payload);

Word encode_command(const CommandFields& f);
Word encode_data(std::uint16_t value);
Word encode_status(int terminal_address, std::uint16_t flags = 0);
// Generic entry point: fields = packed 16-bit payload for the chosen kind.
Word encode_word(WordKind kind, std::uint16_t payload);

// Decodes a 20-bit pattern. Command and status words share a sync symbol, so
// a lone pattern with command/status sync decodes as kind=Command; transfer
// classification resolves status words from their position in the transfer.
Word decode_word(std::uint32_t pattern);

CommandFields parse_command(const Word& w);
std::uint16_t pack_command(const CommandFields& f);
int status_terminal_address(const Word& w);

} // namespace vigil::bus
