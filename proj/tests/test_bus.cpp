#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>

#include "vigil/bus/capture.hpp"
#include "vigil/bus/message.hpp"
#include "vigil/bus/word.hpp"
#include "vigil/core/rng.hpp"

using namespace vigil;
using namespace vigil::bus;

TEST_CASE("broadcast command carries 11111b in the first payload bits") {
    const Word w = encode_command(CommandFields{31, 0, 1, 2});
    CHECK(((w.payload >> 11) & 0x1f) == 0x1f);
    CHECK(parse_command(w).is_broadcast());
}

TEST_CASE("all-zero command payload forces parity one") {
    const Word w = encode_command(CommandFields{0, 0, 0, 0});
    CHECK(w.payload == 0);
    CHECK(w.parity == 1);
    CHECK(w.parity_ok());
}

TEST_CASE("exhaustive data-word round trip over all payloads") {
    for (std::uint32_t p = 0; p <= 0xffff; ++p) {
        const Word w = encode_data(static_cast<std::uint16_t>(p));
        const Word back = decode_word(w.pattern());
        CHECK(back.payload == w.payload);
        CHECK(back.sync == SyncType::Data);
    }
}

TEST_CASE("randomized round trip across both sync types") {
    Rng rng(4242);
    for (int i = 0; i < 10000; ++i) {
        const auto payload = static_cast<std::uint16_t>(rng.next_u64() & 0xffff);
        const WordKind kind = rng.bernoulli(0.5) ? WordKind::Command : WordKind::Data;
        const Word w = encode_word(kind, payload);
        const Word back = decode_word(w.pattern());
        CHECK(back.payload == payload);
        CHECK(back.sync == w.sync);
    }
}

TEST_CASE("command field round trip") {
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        CommandFields f;
        f.terminal_address = static_cast<int>(rng.uniform_int(0, 31));
        f.transmit_receive = static_cast<int>(rng.uniform_int(0, 1));
        f.subaddress_mode = static_cast<int>(rng.uniform_int(0, 31));
        f.count_or_mode = static_cast<int>(rng.uniform_int(0, 31));
        CHECK(parse_command(encode_command(f)) == f);
    }
}

TEST_CASE("parity flip is rejected") {
    const Word w = encode_command(CommandFields{5, 1, 3, 7});
    CHECK_THROWS_AS(decode_word(w.pattern() ^ 1u), ParityError);
}

TEST_CASE("bad sync is rejected") {
    CHECK_THROWS_AS(decode_word(0b010u << 17), BadSync);
    CHECK_THROWS_AS(decode_word(0x1fffffu + 1u), BadSync);  // 21 bits
}

TEST_CASE("field range violations are rejected") {
    CHECK_THROWS_AS(encode_command(CommandFields{32, 0, 0, 0}), FieldOutOfRange);
    CHECK_THROWS_AS(encode_command(CommandFields{0, 2, 0, 0}), FieldOutOfRange);
    CHECK_THROWS_AS(encode_command(CommandFields{0, 0, 40, 0}), FieldOutOfRange);
}

TEST_CASE("exactly half of all payload-parity pairs are accepted") {
    std::size_t accepted = 0;
    for (std::uint32_t bits = 0; bits < (1u << 17); ++bits) {
        const std::uint32_t pattern = (0b111u << 17) | bits;
        try {
            (void)decode_word(pattern);
            ++accepted;
        } catch (const ParityError&) {
        }
    }
    CHECK(accepted == (1u << 16));
}

TEST_CASE("classify: bc-to-rt with two data words") {
    const Message m = make_bc_to_rt(6, 9, {0xaaaa, 0x5555}, 1000);
    const auto words = emit_words(m);
    const auto r = classify_transfer(words);
    CHECK(r.consumed == words.size());
    CHECK(r.message.format == TransferFormat::BcToRt);
    CHECK(r.message.data_words.size() == 2);
    CHECK(r.message.command_words[0].word_count() == 2);
    CHECK(r.message.timestamp_us == 1000);
}

TEST_CASE("classify: mode command without data word") {
    const Message m = make_mode(4, 1, false, 5000);
    const auto words = emit_words(m);
    const auto r = classify_transfer(words);
    CHECK(r.message.format == TransferFormat::ModeNoData);
    CHECK(r.message.command_words[0].is_mode_command());
    CHECK(r.message.command_words[0].count_or_mode == 1);
    CHECK(r.message.status_words.size() == 1);
}

TEST_CASE("classify: rt-to-rt carries receive then transmit commands") {
    const Message m = make_rt_to_rt(1, 2, 6, 9, {1, 2, 3, 4}, 0);
    const auto words = emit_words(m);
    const auto r = classify_transfer(words);
    CHECK(r.message.format == TransferFormat::RtToRt);
    REQUIRE(r.message.command_words.size() == 2);
    CHECK(r.message.command_words[0].transmit_receive == 0);
    CHECK(r.message.command_words[0].terminal_address == 6);
    CHECK(r.message.command_words[1].transmit_receive == 1);
    CHECK(r.message.command_words[1].terminal_address == 1);
    CHECK(r.message.status_words.size() == 2);
}

TEST_CASE("broadcast transfers carry no status words") {
    const Message m = make_bc_to_rt(kBroadcastAddress, 9, {7}, 0);
    CHECK(m.status_words.empty());
    const auto r = classify_transfer(emit_words(m));
    CHECK(r.message.status_words.empty());

    const Message bm = make_mode(0, 1, true, 0);
    CHECK(bm.status_words.empty());
    const auto br = classify_transfer(emit_words(bm));
    CHECK(br.message.format == TransferFormat::ModeNoData);
    CHECK(br.message.status_words.empty());
}

TEST_CASE("every format classifies back to itself") {
    std::vector<Message> all = {
        make_bc_to_rt(6, 9, {1, 2, 3}, 0),
        make_rt_to_bc(1, 4, {9}, 0),
        make_rt_to_rt(2, 5, 3, 6, {1, 2}, 0),
        make_mode(4, 1, false, 0),   // no data
        make_mode(3, 16, false, 0),  // with data
    };
    for (const auto& m : all) {
        const auto r = classify_transfer(emit_words(m));
        CHECK(r.message.format == m.format);
        CHECK(r.message.data_words.size() == m.data_words.size());
        CHECK(r.message.status_words.size() == m.status_words.size());
    }
}

TEST_CASE("malformed transfers are rejected") {
    SUBCASE("count mismatch truncates the stream") {
        auto words = emit_words(make_bc_to_rt(6, 9, {1, 2, 3}, 0));
        words.pop_back();             // drop the status
        words.pop_back();             // and one data word
        CHECK_THROWS_AS(classify_stream(words), MalformedTransfer);
    }
    SUBCASE("missing status") {
        auto words = emit_words(make_rt_to_bc(1, 4, {9}, 0));
        words.erase(words.begin() + 1);  // status follows the command
        CHECK_THROWS_AS(classify_transfer(words), MalformedTransfer);
    }
    SUBCASE("interleaved command where data expected") {
        auto words = emit_words(make_bc_to_rt(6, 9, {1, 2}, 0));
        words[1] = words[0];
        CHECK_THROWS_AS(classify_transfer(words), MalformedTransfer);
    }
    SUBCASE("data word first") {
        const std::vector<TimedWord> words{TimedWord{0, Channel::A, encode_data(1)}};
        CHECK_THROWS_AS(classify_transfer(words), MalformedTransfer);
    }
}

TEST_CASE("capture file round trip") {
    const Message m = make_rt_to_rt(1, 2, 6, 9, {0xdead, 0xbeef, 0x1234, 0x0042}, 123456,
                                    Channel::B);
    const auto words = emit_words(m);
    std::stringstream ss;
    write_capture(ss, words);
    const auto back = read_capture(ss);
    REQUIRE(back.size() == words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        CHECK(back[i].timestamp_us == words[i].timestamp_us);
        CHECK(back[i].channel == words[i].channel);
        CHECK(back[i].word.pattern() == words[i].word.pattern());
    }
}
