#include "vigil/sim/icd.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vigil/core/rng.hpp"

namespace vigil::sim {

using nlohmann::ordered_json;

const char* sub_role_name(SubRole r) {
    switch (r) {
        case SubRole::AwaitsCommand: return "awaits_command";
        case SubRole::ReportsStatus: return "reports_status";
        case SubRole::ReportsInfo: return "reports_info";
    }
    return "?";
}

SubRole sub_role_from(const std::string& s) {
    if (s == "awaits_command") return SubRole::AwaitsCommand;
    if (s == "reports_status") return SubRole::ReportsStatus;
    if (s == "reports_info") return SubRole::ReportsInfo;
    throw IcdError("unknown subaddress role: " + s);
}

void Icd::validate() const {
    if (major_frame_us <= 0) throw IcdError("major frame must be positive");
    std::set<int> addrs;
    for (const auto& t : terminals) {
        if (t.address < 0 || t.address > 30)
            throw IcdError("terminal address outside [0,30]: " + std::to_string(t.address));
        if (!addrs.insert(t.address).second)
            throw IcdError("duplicate terminal address " + std::to_string(t.address));
        std::set<int> subs;
        for (const auto& s : t.subaddresses) {
            if (s.number < 1 || s.number > 30)
                throw IcdError("data subaddress outside [1,30] on terminal " +
                               std::to_string(t.address));
            if (!subs.insert(s.number).second)
                throw IcdError("duplicate subaddress on terminal " + std::to_string(t.address));
            if (s.word_count < 1 || s.word_count > 32)
                throw IcdError("subaddress word count outside [1,32]");
        }
    }
    for (const auto& p : periodic) {
        if (p.period_us <= 0 || p.period_us > major_frame_us)
            throw IcdError("periodic template '" + p.tmpl.id +
                           "' must recur at least once per major frame");
        if (p.offset_us < 0 || p.offset_us >= p.period_us)
            throw IcdError("periodic offset outside [0, period)");
    }
    for (const auto& a : aperiodic) {
        for (auto s : a.slots_us)
            if (s < 0 || s >= major_frame_us) throw IcdError("aperiodic slot outside the frame");
        if (a.fire_probability < 0.0 || a.fire_probability > 1.0)
            throw IcdError("fire probability outside [0,1]");
    }
    std::set<int> dev_ids;
    for (const auto& d : devices) {
        if (!dev_ids.insert(d.id).second) throw IcdError("duplicate device id");
        for (int a : d.addresses)
            if (a != bus::kBcAddress && terminal(a) == nullptr)
                throw IcdError("device maps unknown terminal " + std::to_string(a));
    }
}

const TerminalSpec* Icd::terminal(int addr) const {
    for (const auto& t : terminals)
        if (t.address == addr) return &t;
    return nullptr;
}

const SubaddressSpec* Icd::subaddress(int addr, int sub) const {
    const TerminalSpec* t = terminal(addr);
    if (!t) return nullptr;
    for (const auto& s : t->subaddresses)
        if (s.number == sub) return &s;
    return nullptr;
}

std::string Icd::terminal_name(int addr) const {
    if (addr == bus::kBcAddress) return "Bus controller";
    if (addr == bus::kBroadcastAddress) return "all RTs";
    const TerminalSpec* t = terminal(addr);
    return t ? t->name : ("terminal " + std::to_string(addr));
}

std::optional<int> Icd::device_of_address(int addr) const {
    for (const auto& d : devices)
        for (int a : d.addresses)
            if (a == addr) return d.id;
    return std::nullopt;
}

const DeviceSpec* Icd::device(int id) const {
    for (const auto& d : devices)
        if (d.id == id) return &d;
    return nullptr;
}

Icd default_testbed_icd() {
    Icd icd;
    icd.major_frame_us = 100000;

    auto term = [&](int addr, std::string name, std::string mode_target,
                    std::vector<SubaddressSpec> subs) {
        icd.terminals.push_back(TerminalSpec{addr, std::move(name), std::move(subs),
                                             std::move(mode_target)});
    };
    term(1, "Navigation system", "inertial reference unit",
         {{2, SubRole::ReportsInfo, "aircraft location", 4},
          {4, SubRole::ReportsStatus, "status", 1}});
    term(2, "Radar system", "antenna controller",
         {{5, SubRole::ReportsInfo, "information", 8},
          {7, SubRole::ReportsStatus, "status", 1},
          {11, SubRole::ReportsInfo, "environmental information", 12}});
    term(3, "Flight management system", "flight computer",
         {{2, SubRole::ReportsStatus, "status", 1},
          {6, SubRole::AwaitsCommand, "main controller", 8},
          {8, SubRole::ReportsInfo, "flight data", 12}});
    term(4, "Weapons system", "container controller",
         {{2, SubRole::ReportsStatus, "firing ready status", 1},
          {3, SubRole::AwaitsCommand, "firing controller", 1}});
    term(5, "Plane management system", "management computer",
         {{3, SubRole::ReportsStatus, "status", 1},
          {7, SubRole::AwaitsCommand, "steering controller", 1}});
    term(6, "Display system", "display processor",
         {{4, SubRole::ReportsStatus, "status", 1},
          {9, SubRole::AwaitsCommand, "cockpit display", 4}});
    term(7, "Communication system", "radio controller",
         {{3, SubRole::ReportsStatus, "status", 1},
          {5, SubRole::AwaitsCommand, "uplink receiver", 8}});
    term(8, "Mission system", "mission computer",
         {{6, SubRole::ReportsStatus, "status", 1},
          {7, SubRole::AwaitsCommand, "tasking controller", 4}});
    term(9, "Exterior lighting system", "lighting relay",
         {{7, SubRole::AwaitsCommand, "lighting controller", 1}});

    icd.devices = {
        {0, "Bus controller", {bus::kBcAddress}},
        {1, "Navigation system", {1}},
        {2, "Radar system", {2}},
        {3, "Weapons system", {4}},
        {4, "Display system", {6}},
        {5, "Flight management system", {3}},
        {6, "Plane management system", {5}},
        {7, "Communication system", {7}},
        {8, "Mission system", {8}},
        {9, "Exterior lighting system", {9}},
    };

    icd.mode_codes = {
        {1, "reset command"},
        {2, "synchronize command"},
        {3, "self test command"},
        {16, "transmit vector word command"},
    };

    const int bc = bus::kBcAddress;
    auto periodic = [&](std::string id, int sa, int ss, int da, int ds, int wc,
                        std::int64_t period, std::int64_t offset) {
        icd.periodic.push_back(
            PeriodicEntry{MessageTemplate{std::move(id), sa, ss, da, ds, wc, false},
                          period, offset});
    };
    periodic("nav_location_display", 1, 2, 6, 9, 4, 25000, 1000);
    periodic("nav_location_bc", 1, 2, bc, bc, 4, 50000, 4000);
    periodic("radar_info_flight", 2, 5, 3, 6, 8, 50000, 7000);
    periodic("bc_comm_uplink", bc, bc, 7, 5, 8, 50000, 10000);
    periodic("flight_data_bc", 3, 8, bc, bc, 12, 50000, 13000);
    periodic("bc_mission_tasking", bc, bc, 8, 7, 4, 50000, 16000);
    periodic("bc_weapons_arming", bc, bc, 4, 3, 1, 25000, 19000);
    periodic("nav_status", 1, 4, bc, bc, 1, 100000, 22000);
    periodic("radar_status", 2, 7, bc, bc, 1, 100000, 29000);
    periodic("weapons_ready_status", 4, 2, bc, bc, 1, 50000, 32000);
    periodic("comm_status", 7, 3, bc, bc, 1, 100000, 35000);
    periodic("mission_status", 8, 6, bc, bc, 1, 100000, 38000);
    periodic("display_status", 6, 4, bc, bc, 1, 100000, 47000);
    periodic("flight_status", 3, 2, bc, bc, 1, 100000, 72000);
    periodic("pm_status", 5, 3, bc, bc, 1, 100000, 90000);

    icd.aperiodic.push_back(AperiodicEntry{
        MessageTemplate{"steering_command", bc, bc, 5, 7, 1, false},
        "pilot_input",
        {41000, 84800, 87400},
        0.65});
    // sensors double-report shortly after selected updates; these echo slots
    // put sub-millisecond follow-up gaps into the benign timing profile
    auto echo = [&](std::string id, int sa, int ss, int da, int ds, int wc,
                    std::vector<std::int64_t> slots) {
        icd.aperiodic.push_back(AperiodicEntry{
            MessageTemplate{std::move(id), sa, ss, da, ds, wc, false},
            "sensor_echo", std::move(slots), 0.5});
    };
    echo("weapons_ready_echo", 4, 2, bc, bc, 1, {32700, 82700});
    echo("nav_location_echo", 1, 2, bc, bc, 4, {54700});
    echo("radar_info_echo", 2, 5, 3, 6, 8, {7900, 57900});
    echo("arming_echo", bc, bc, 4, 3, 1, {94700});

    icd.validate();
    return icd;
}

namespace {

ordered_json template_to_json(const MessageTemplate& t) {
    return ordered_json{{"id", t.id},
                        {"src", {t.src_addr, t.src_sub}},
                        {"dst", {t.dst_addr, t.dst_sub}},
                        {"word_count", t.word_count},
                        {"is_mode", t.is_mode}};
}

MessageTemplate template_from_json(const ordered_json& j) {
    MessageTemplate t;
    t.id = j.at("id").get<std::string>();
    t.src_addr = j.at("src")[0].get<int>();
    t.src_sub = j.at("src")[1].get<int>();
    t.dst_addr = j.at("dst")[0].get<int>();
    t.dst_sub = j.at("dst")[1].get<int>();
    t.word_count = j.at("word_count").get<int>();
    t.is_mode = j.value("is_mode", false);
    return t;
}

} // namespace

std::string icd_to_json(const Icd& icd) {
    ordered_json j;
    j["major_frame_us"] = icd.major_frame_us;
    auto terms = ordered_json::array();
    for (const auto& t : icd.terminals) {
        auto subs = ordered_json::array();
        for (const auto& s : t.subaddresses)
            subs.push_back({{"number", s.number},
                            {"role", sub_role_name(s.role)},
                            {"description", s.description},
                            {"word_count", s.word_count}});
        terms.push_back({{"address", t.address},
                         {"name", t.name},
                         {"mode_target", t.mode_target},
                         {"subaddresses", subs}});
    }
    j["terminals"] = terms;
    auto devs = ordered_json::array();
    for (const auto& d : icd.devices)
        devs.push_back({{"id", d.id}, {"name", d.name}, {"addresses", d.addresses}});
    j["devices"] = devs;
    auto modes = ordered_json::object();
    for (const auto& [code, desc] : icd.mode_codes) modes[std::to_string(code)] = desc;
    j["mode_codes"] = modes;
    auto per = ordered_json::array();
    for (const auto& p : icd.periodic) {
        auto e = template_to_json(p.tmpl);
        e["period_us"] = p.period_us;
        e["offset_us"] = p.offset_us;
        per.push_back(e);
    }
    j["periodic"] = per;
    auto ap = ordered_json::array();
    for (const auto& a : icd.aperiodic) {
        auto e = template_to_json(a.tmpl);
        e["trigger_id"] = a.trigger_id;
        e["slots_us"] = a.slots_us;
        e["fire_probability"] = a.fire_probability;
        ap.push_back(e);
    }
    j["aperiodic"] = ap;
    return j.dump(2);
}

Icd icd_from_json(const std::string& text) {
    const auto j = ordered_json::parse(text);
    Icd icd;
    icd.major_frame_us = j.at("major_frame_us").get<std::int64_t>();
    for (const auto& tj : j.at("terminals")) {
        TerminalSpec t;
        t.address = tj.at("address").get<int>();
        t.name = tj.at("name").get<std::string>();
        t.mode_target = tj.value("mode_target", "");
        for (const auto& sj : tj.at("subaddresses")) {
            SubaddressSpec s;
            s.number = sj.at("number").get<int>();
            s.role = sub_role_from(sj.at("role").get<std::string>());
            s.description = sj.at("description").get<std::string>();
            s.word_count = sj.at("word_count").get<int>();
            t.subaddresses.push_back(s);
        }
        icd.terminals.push_back(std::move(t));
    }
    const auto devices_j = j.value("devices", ordered_json::array());
    for (const auto& dj : devices_j) {
        DeviceSpec d;
        d.id = dj.at("id").get<int>();
        d.name = dj.at("name").get<std::string>();
        d.addresses = dj.at("addresses").get<std::vector<int>>();
        icd.devices.push_back(std::move(d));
    }
    const auto modes_j = j.value("mode_codes", ordered_json::object());
    for (const auto& [k, v] : modes_j.items())
        icd.mode_codes[std::stoi(k)] = v.get<std::string>();
    for (const auto& pj : j.value("periodic", ordered_json::array())) {
        PeriodicEntry p;
        p.tmpl = template_from_json(pj);
        p.period_us = pj.at("period_us").get<std::int64_t>();
        p.offset_us = pj.at("offset_us").get<std::int64_t>();
        icd.periodic.push_back(std::move(p));
    }
    for (const auto& aj : j.value("aperiodic", ordered_json::array())) {
        AperiodicEntry a;
        a.tmpl = template_from_json(aj);
        a.trigger_id = aj.value("trigger_id", "");
        a.slots_us = aj.at("slots_us").get<std::vector<std::int64_t>>();
        a.fire_probability = aj.at("fire_probability").get<double>();
        icd.aperiodic.push_back(std::move(a));
    }
    icd.validate();
    return icd;
}

void save_icd_file(const std::string& path, const Icd& icd) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << icd_to_json(icd) << "\n";
}

Icd load_icd_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return icd_from_json(ss.str());
}

bus::Message instantiate_template(const MessageTemplate& t, std::int64_t t_us,
                                  std::uint64_t payload_seed) {
    Rng rng(payload_seed);
    auto data = [&](int n) {
        std::vector<std::uint16_t> d(static_cast<std::size_t>(n));
        for (auto& v : d) v = static_cast<std::uint16_t>(rng.next_u64() & 0xffff);
        return d;
    };
    if (t.is_mode)
        return bus::make_mode(t.dst_addr, t.word_count, t.dst_addr == bus::kBroadcastAddress, t_us);
    if (t.src_addr == bus::kBcAddress)
        return bus::make_bc_to_rt(t.dst_addr, t.dst_sub, data(t.word_count), t_us);
    if (t.dst_addr == bus::kBcAddress)
        return bus::make_rt_to_bc(t.src_addr, t.src_sub, data(t.word_count), t_us);
    return bus::make_rt_to_rt(t.src_addr, t.src_sub, t.dst_addr, t.dst_sub, data(t.word_count),
                              t_us);
}

Endpoints endpoints_of(const bus::Message& m) {
    const int bc = bus::kBcAddress;
    const auto& c0 = m.command_words.at(0);
    switch (m.format) {
        case bus::TransferFormat::BcToRt:
            return {bc, bc, c0.terminal_address, c0.subaddress_mode, false, c0.word_count()};
        case bus::TransferFormat::RtToBc:
            return {c0.terminal_address, c0.subaddress_mode, bc, bc, false, c0.word_count()};
        case bus::TransferFormat::RtToRt: {
            const auto& tx = m.command_words.at(1);
            return {tx.terminal_address, tx.subaddress_mode, c0.terminal_address,
                    c0.subaddress_mode, false, c0.word_count()};
        }
        case bus::TransferFormat::ModeNoData:
        case bus::TransferFormat::ModeTxData:
        case bus::TransferFormat::ModeRxData:
            return {bc, bc, c0.terminal_address, c0.subaddress_mode, true, c0.count_or_mode};
    }
    throw std::logic_error("unreachable");
}

} // namespace vigil::sim
