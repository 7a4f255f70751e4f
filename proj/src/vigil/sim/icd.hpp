#pragma once
// Interface control document: the system specification a 1553 designer
// would publish. Terminals and their subaddress roles (with the
// human-language role mapping used by the translator), the physical device
// grouping, mode-code table, and the major-frame schedule.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vigil/bus/message.hpp"

namespace vigil::sim {

enum class SubRole : std::uint8_t { AwaitsCommand, ReportsStatus, ReportsInfo };

const char* sub_role_name(SubRole r);
SubRole sub_role_from(const std::string& s);

struct SubaddressSpec {
    int number = 0;
    SubRole role = SubRole::ReportsStatus;
    std::string description;  // e.g. "aircraft location", "steering controller"
    int word_count = 1;
};

struct TerminalSpec {
    int address = 0;
    std::string name;
    std::vector<SubaddressSpec> subaddresses;
    // destination text for mode commands steered at this terminal
    std::string mode_target;
};

struct DeviceSpec {
    int id = 0;
    std::string name;
    std::vector<int> addresses;  // terminal addresses hosted by this box
};

struct MessageTemplate {
    std::string id;
    int src_addr = bus::kBcAddress;
    int src_sub = bus::kBcAddress;
    int dst_addr = 0;
    int dst_sub = 0;
    int word_count = 1;  // data words, or the mode code when is_mode
    bool is_mode = false;
};

struct PeriodicEntry {
    MessageTemplate tmpl;
    std::int64_t period_us = 0;
    std::int64_t offset_us = 0;
};

struct AperiodicEntry {
    MessageTemplate tmpl;
    std::string trigger_id;
    std::vector<std::int64_t> slots_us;  // fixed in-frame transmission slots
    double fire_probability = 0.5;       // seeded thinning of the trigger process
};

struct IcdError : std::runtime_error {
    explicit IcdError(const std::string& w) : std::runtime_error(w) {}
};

struct Icd {
    std::int64_t major_frame_us = 100000;
    std::vector<TerminalSpec> terminals;
    std::vector<DeviceSpec> devices;
    std::map<int, std::string> mode_codes;
    std::vector<PeriodicEntry> periodic;
    std::vector<AperiodicEntry> aperiodic;

    void validate() const;  // throws IcdError

    const TerminalSpec* terminal(int addr) const;
    const SubaddressSpec* subaddress(int addr, int sub) const;
    std::string terminal_name(int addr) const;  // 32 -> "Bus controller", 31 -> "all RTs"
    std::optional<int> device_of_address(int addr) const;
    const DeviceSpec* device(int id) const;
};

// The eight-RT workbench system: communication, plane management, weapons,
// mission, display, flight management, navigation, and radar terminals plus
// an exterior lighting terminal reachable only through maintenance commands.
Icd default_testbed_icd();

std::string icd_to_json(const Icd& icd);
Icd icd_from_json(const std::string& text);
void save_icd_file(const std::string& path, const Icd& icd);
Icd load_icd_file(const std::string& path);

// Builds a transfer from a template. Data payloads are seeded.
bus::Message instantiate_template(const MessageTemplate& t, std::int64_t t_us,
                                  std::uint64_t payload_seed);

// Semantic endpoints of a parsed transfer (BC = 32/32).
struct Endpoints {
    int src_addr, src_sub, dst_addr, dst_sub;
    bool is_mode;
    int count;  // decoded data word count, or mode code for mode commands
};
Endpoints endpoints_of(const bus::Message& m);

} // namespace vigil::sim
