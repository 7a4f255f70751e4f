#include "vigil/bus/capture.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vigil::bus {

void write_capture(std::ostream& os, const std::vector<TimedWord>& words) {
    char line[48];
    for (const auto& tw : words) {
        std::snprintf(line, sizeof(line), "%lld %c %05X\n",
                      static_cast<long long>(tw.timestamp_us),
                      tw.channel == Channel::A ? 'A' : 'B', tw.word.pattern());
        os << line;
    }
}

std::vector<TimedWord> read_capture(std::istream& is) {
    std::vector<TimedWord> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long long ts;
        char ch;
        std::string hex;
        if (!(ls >> ts >> ch >> hex))
            throw std::runtime_error("bad capture line: " + line);
        TimedWord tw;
        tw.timestamp_us = ts;
        tw.channel = (ch == 'B') ? Channel::B : Channel::A;
        tw.word = decode_word(static_cast<std::uint32_t>(std::stoul(hex, nullptr, 16)));
        out.push_back(tw);
    }
    return out;
}

void write_capture_file(const std::string& path, const std::vector<TimedWord>& words) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_capture(os, words);
}

std::vector<TimedWord> read_capture_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    return read_capture(is);
}

std::string message_to_json(const Message& m) {
    nlohmann::ordered_json j;
    j["timestamp_us"] = m.timestamp_us;
    j["channel"] = m.channel == Channel::A ? "A" : "B";
    j["format"] = format_name(m.format);
    auto cmds = nlohmann::ordered_json::array();
    for (const auto& c : m.command_words) {
        cmds.push_back({{"ta", c.terminal_address},
                        {"tr", c.transmit_receive},
                        {"sa", c.subaddress_mode},
                        {"count", c.count_or_mode}});
    }
    j["command_words"] = cmds;
    auto data = nlohmann::ordered_json::array();
    for (const auto& d : m.data_words) data.push_back(d.payload);
    j["data_words"] = data;
    auto st = nlohmann::ordered_json::array();
    for (const auto& s : m.status_words) st.push_back(s.payload);
    j["status_words"] = st;
    return j.dump();
}

void write_messages_json(std::ostream& os, const std::vector<Message>& msgs) {
    for (const auto& m : msgs) os << message_to_json(m) << "\n";
}

} // namespace vigil::bus
