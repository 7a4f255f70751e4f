#include "vigil/bus/message.hpp"

namespace vigil::bus {

const char* format_name(TransferFormat f) {
    switch (f) {
        case TransferFormat::BcToRt: return "bc_to_rt";
        case TransferFormat::RtToBc: return "rt_to_bc";
        case TransferFormat::RtToRt: return "rt_to_rt";
        case TransferFormat::ModeNoData: return "mode_no_data";
        case TransferFormat::ModeTxData: return "mode_tx_data";
        case TransferFormat::ModeRxData: return "mode_rx_data";
    }
    return "?";
}

namespace {

void check_data_count(std::size_t n) {
    if (n < 1 || n > 32)
        throw FieldOutOfRange("data word count " + std::to_string(n) + " outside [1,32]");
}

int count_field(std::size_t n) { return static_cast<int>(n & 31); }

} // namespace

std::vector<TimedWord> emit_words(const Message& m) {
    std::vector<TimedWord> out;
    std::int64_t t = m.timestamp_us;
    auto push = [&](const Word& w, std::int64_t gap) {
        t += gap;
        out.push_back(TimedWord{t, m.channel, w});
        t += kWordDurationUs;
    };

    const CommandFields& c0 = m.command_words.at(0);
    push(encode_command(c0), 0);
    switch (m.format) {
        case TransferFormat::BcToRt:
            for (const Word& d : m.data_words) push(d, 0);
            for (const Word& s : m.status_words) push(s, kResponseGapUs);
            break;
        case TransferFormat::RtToBc:
            for (const Word& s : m.status_words) push(s, kResponseGapUs);
            for (const Word& d : m.data_words) push(d, 0);
            break;
        case TransferFormat::RtToRt: {
            push(encode_command(m.command_words.at(1)), 0);
            // transmitting RT: status then data; receiving RT: trailing status
            if (!m.status_words.empty()) push(m.status_words[0], kResponseGapUs);
            for (const Word& d : m.data_words) push(d, 0);
            if (m.status_words.size() > 1) push(m.status_words[1], kResponseGapUs);
            break;
        }
        case TransferFormat::ModeNoData:
            for (const Word& s : m.status_words) push(s, kResponseGapUs);
            break;
        case TransferFormat::ModeTxData:
            for (const Word& s : m.status_words) push(s, kResponseGapUs);
            for (const Word& d : m.data_words) push(d, 0);
            break;
        case TransferFormat::ModeRxData:
            for (const Word& d : m.data_words) push(d, 0);
            for (const Word& s : m.status_words) push(s, kResponseGapUs);
            break;
    }
    return out;
}

std::int64_t transfer_duration_us(const Message& m) {
    const auto words = emit_words(m);
    return words.back().timestamp_us + kWordDurationUs - words.front().timestamp_us;
}

namespace {

class Parser {
public:
    explicit Parser(std::span<const TimedWord> words) : words_(words) {}

    ClassifyResult parse() {
        const TimedWord& first = need("command word");
        if (first.word.sync != SyncType::CommandOrStatus)
            throw MalformedTransfer("transfer begins with a data-sync word");
        CommandFields cmd = parse_command(first.word);
        Message m;
        m.timestamp_us = first.timestamp_us;
        m.channel = first.channel;
        m.command_words.push_back(cmd);
        advance();

        if (cmd.is_mode_command()) {
            parse_mode(m, cmd);
        } else if (cmd.transmit_receive == 0) {
            // receive command: BC-to-RT unless a transmit command follows
            if (peek_is_command_tr1()) {
                parse_rt_to_rt(m, cmd);
            } else {
                parse_bc_to_rt(m, cmd);
            }
        } else {
            parse_rt_to_bc(m, cmd);
        }
        return ClassifyResult{std::move(m), pos_};
    }

private:
    const TimedWord& need(const char* what) {
        if (pos_ >= words_.size())
            throw MalformedTransfer(std::string("unexpected end of stream, expected ") + what);
        return words_[pos_];
    }
    void advance() { ++pos_; }

    bool peek_is_command_tr1() const {
        if (pos_ >= words_.size()) return false;
        const Word& w = words_[pos_].word;
        if (w.sync != SyncType::CommandOrStatus) return false;
        CommandFields f = parse_command(w);
        return f.transmit_receive == 1 && !f.is_mode_command();
    }

    Word take_data() {
        const TimedWord& tw = need("data word");
        if (tw.word.sync != SyncType::CommandOrStatus) {
            advance();
            Word w = tw.word;
            w.kind = WordKind::Data;
            return w;
        }
        throw MalformedTransfer("interleaved command/status where a data word was expected");
    }

    Word take_status(int expect_ta) {
        const TimedWord& tw = need("status word");
        if (tw.word.sync != SyncType::CommandOrStatus)
            throw MalformedTransfer("missing status word");
        Word w = tw.word;
        w.kind = WordKind::Status;
        if (status_terminal_address(w) != expect_ta)
            throw MalformedTransfer("status word from wrong terminal");
        advance();
        return w;
    }

    void take_n_data(Message& m, int n) {
        for (int i = 0; i < n; ++i) m.data_words.push_back(take_data());
    }

    void parse_bc_to_rt(Message& m, const CommandFields& cmd) {
        m.format = TransferFormat::BcToRt;
        take_n_data(m, cmd.word_count());
        if (!cmd.is_broadcast()) m.status_words.push_back(take_status(cmd.terminal_address));
    }

    void parse_rt_to_bc(Message& m, const CommandFields& cmd) {
        m.format = TransferFormat::RtToBc;
        m.status_words.push_back(take_status(cmd.terminal_address));
        take_n_data(m, cmd.word_count());
    }

    void parse_rt_to_rt(Message& m, const CommandFields& rcv) {
        m.format = TransferFormat::RtToRt;
        const TimedWord& tw = need("transmit command");
        CommandFields tx = parse_command(tw.word);
        advance();
        m.command_words.push_back(tx);
        if (tx.word_count() != rcv.word_count())
            throw MalformedTransfer("RT-to-RT word count mismatch");
        m.status_words.push_back(take_status(tx.terminal_address));
        take_n_data(m, tx.word_count());
        if (!rcv.is_broadcast()) m.status_words.push_back(take_status(rcv.terminal_address));
    }

    void parse_mode(Message& m, const CommandFields& cmd) {
        const int code = cmd.count_or_mode;
        const bool has_data = code >= 16;
        if (!has_data) {
            m.format = TransferFormat::ModeNoData;
            if (!cmd.is_broadcast()) m.status_words.push_back(take_status(cmd.terminal_address));
        } else if (cmd.transmit_receive == 1) {
            m.format = TransferFormat::ModeTxData;
            if (!cmd.is_broadcast()) m.status_words.push_back(take_status(cmd.terminal_address));
            m.data_words.push_back(take_data());
        } else {
            m.format = TransferFormat::ModeRxData;
            m.data_words.push_back(take_data());
            if (!cmd.is_broadcast()) m.status_words.push_back(take_status(cmd.terminal_address));
        }
    }

    std::span<const TimedWord> words_;
    std::size_t pos_ = 0;
};

} // namespace

ClassifyResult classify_transfer(std::span<const TimedWord> words) {
    return Parser(words).parse();
}

std::vector<Message> classify_stream(std::span<const TimedWord> words) {
    std::vector<Message> out;
    std::size_t pos = 0;
    while (pos < words.size()) {
        ClassifyResult r = classify_transfer(words.subspan(pos));
        out.push_back(std::move(r.message));
        pos += r.consumed;
    }
    return out;
}

namespace {
std::vector<Word> to_data_words(const std::vector<std::uint16_t>& data) {
    std::vector<Word> out;
    out.reserve(data.size());
    for (std::uint16_t v : data) out.push_back(encode_data(v));
    return out;
}
} // namespace

Message make_bc_to_rt(int rt, int sa, const std::vector<std::uint16_t>& data,
                      std::int64_t t_us, Channel ch) {
    check_data_count(data.size());
    Message m;
    m.format = TransferFormat::BcToRt;
    m.command_words.push_back(CommandFields{rt, 0, sa, count_field(data.size())});
    m.data_words = to_data_words(data);
    if (rt != kBroadcastAddress) m.status_words.push_back(encode_status(rt));
    m.timestamp_us = t_us;
    m.channel = ch;
    return m;
}

Message make_rt_to_bc(int rt, int sa, const std::vector<std::uint16_t>& data,
                      std::int64_t t_us, Channel ch) {
    check_data_count(data.size());
    Message m;
    m.format = TransferFormat::RtToBc;
    m.command_words.push_back(CommandFields{rt, 1, sa, count_field(data.size())});
    m.status_words.push_back(encode_status(rt));
    m.data_words = to_data_words(data);
    m.timestamp_us = t_us;
    m.channel = ch;
    return m;
}

Message make_rt_to_rt(int src_rt, int src_sa, int dst_rt, int dst_sa,
                      const std::vector<std::uint16_t>& data, std::int64_t t_us, Channel ch) {
    check_data_count(data.size());
    Message m;
    m.format = TransferFormat::RtToRt;
    m.command_words.push_back(CommandFields{dst_rt, 0, dst_sa, count_field(data.size())});
    m.command_words.push_back(CommandFields{src_rt, 1, src_sa, count_field(data.size())});
    m.status_words.push_back(encode_status(src_rt));
    m.data_words = to_data_words(data);
    if (dst_rt != kBroadcastAddress) m.status_words.push_back(encode_status(dst_rt));
    m.timestamp_us = t_us;
    m.channel = ch;
    return m;
}

Message make_mode(int rt, int mode_code, bool broadcast, std::int64_t t_us, Channel ch) {
    if (mode_code < 0 || mode_code > 31) throw FieldOutOfRange("mode code outside [0,31]");
    Message m;
    const int ta = broadcast ? kBroadcastAddress : rt;
    const bool has_data = mode_code >= 16;
    m.format = has_data ? TransferFormat::ModeTxData : TransferFormat::ModeNoData;
    m.command_words.push_back(CommandFields{ta, 1, 0, mode_code});
    if (!broadcast) m.status_words.push_back(encode_status(rt));
    if (has_data) m.data_words.push_back(encode_data(0));
    m.timestamp_us = t_us;
    m.channel = ch;
    return m;
}

} // namespace vigil::bus
