#pragma once
// Complete 1553 transfers: the six formats, word-stream emission, and
// classification of timed word streams back into transfers.

#include <cstdint>
#include <span>
#include <vector>

#include "vigil/bus/word.hpp"

namespace vigil::bus {

struct MalformedTransfer : std::runtime_error {
    explicit MalformedTransfer(const std::string& w) : std::runtime_error(w) {}
};

enum class Channel : std::uint8_t { A = 0, B = 1 };

enum class TransferFormat : std::uint8_t {
    BcToRt = 0,
    RtToBc = 1,
    RtToRt = 2,
    ModeNoData = 3,
    ModeTxData = 4,
    ModeRxData = 5,
};

const char* format_name(TransferFormat f);

struct TimedWord {
    std::int64_t timestamp_us = 0;
    Channel channel = Channel::A;
    Word word;
};

struct Message {
    TransferFormat format = TransferFormat::BcToRt;
    // receive command first; RT-to-RT carries [receive, transmit]
    std::vector<CommandFields> command_words;
    std::vector<Word> data_words;
    std::vector<Word> status_words;
    std::int64_t timestamp_us = 0;
    Channel channel = Channel::A;

    bool is_broadcast() const { return command_words.at(0).is_broadcast(); }
    bool is_mode() const {
        return format == TransferFormat::ModeNoData || format == TransferFormat::ModeTxData ||
               format == TransferFormat::ModeRxData;
    }
};

// Word spacing used when serializing a transfer to the wire: each word lasts
// 20 us (1 MHz, 20 bit-times); responding terminals answer after a gap.
constexpr std::int64_t kWordDurationUs = 20;
constexpr std::int64_t kResponseGapUs = 8;
constexpr std::int64_t kDefaultResponseTimeoutUs = 14;

std::vector<TimedWord> emit_words(const Message& m);
std::int64_t transfer_duration_us(const Message& m);

struct ClassifyResult {
    Message message;
    std::size_t consumed = 0;
};

// Parses exactly one transfer from the head of `words`.
ClassifyResult classify_transfer(std::span<const TimedWord> words);

// Parses a whole capture into consecutive transfers.
std::vector<Message> classify_stream(std::span<const TimedWord> words);

// Builders used by the simulator and the attack injector.
Message make_bc_to_rt(int rt, int sa, const std::vector<std::uint16_t>& data,
                      std::int64_t t_us, Channel ch = Channel::A);
Message make_rt_to_bc(int rt, int sa, const std::vector<std::uint16_t>& data,
                      std::int64_t t_us, Channel ch = Channel::A);
Message make_rt_to_rt(int src_rt, int src_sa, int dst_rt, int dst_sa,
                      const std::vector<std::uint16_t>& data, std::int64_t t_us,
                      Channel ch = Channel::A);
Message make_mode(int rt, int mode_code, bool broadcast, std::int64_t t_us,
                  Channel ch = Channel::A);

} // namespace vigil::bus
