#pragma once
// Capture file I/O.
//
// Word-level capture: one record per word,
//   <timestamp_us> <channel A|B> <5-hex-digit 20-bit pattern>
// Message-level export: one JSON record per transfer mirroring Message fields.

#include <iosfwd>
#include <string>
#include <vector>

#include "vigil/bus/message.hpp"

namespace vigil::bus {

void write_capture(std::ostream& os, const std::vector<TimedWord>& words);
std::vector<TimedWord> read_capture(std::istream& is);

void write_capture_file(const std::string& path, const std::vector<TimedWord>& words);
std::vector<TimedWord> read_capture_file(const std::string& path);

std::string message_to_json(const Message& m);
void write_messages_json(std::ostream& os, const std::vector<Message>& msgs);

} // namespace vigil::bus
