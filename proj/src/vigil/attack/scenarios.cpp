#include "vigil/attack/scenarios.hpp"

#include <algorithm>

#include "vigil/core/rng.hpp"

namespace vigil::attack {

using bus::Message;
using sim::LabeledMessage;
using sim::TrafficLog;

AttackScenario scenario(int id) {
    switch (id) {
        case 1: return {1, false, 1, false, "weapons_ready_status", 1};
        case 2: return {2, true, -1, false, "nav_location_bc", 1};
        case 3: return {3, false, 1, true, "steering_command", 1};
        case 4: return {4, false, 2, true, "nav_location_bc", 5};
        case 5: return {5, true, -1, false, "radar_info_flight", 1};
        case 6: return {6, false, 2, false, "bc_weapons_arming", 1};
    }
    throw std::invalid_argument("scenario id outside 1..6");
}

namespace {

constexpr std::int64_t kInjectGuardUs = 60;   // clearance before the next transfer
constexpr std::int64_t kReplayDelayUs = 25;   // idle time before a replayed word train
constexpr std::int64_t kEchoWindowUs = 1600;  // follow-ups this close ride the echo band

std::vector<std::uint16_t> seeded_payload(Rng& rng, int n) {
    std::vector<std::uint16_t> d(static_cast<std::size_t>(n));
    for (auto& v : d) v = static_cast<std::uint16_t>(rng.next_u64() & 0xffff);
    return d;
}

// Slow scenarios (1, 2, 5, 6) impersonate a vacant echo slot after their
// trigger: the injected transfer rides at a sub-millisecond follow-up gap
// the schedule already exhibits, and the next benign transfer keeps a
// normal slot-to-slot gap. Timing scenarios (3, 4) land almost immediately
// after the trigger transfer ends.
std::vector<Message> build_payload(const AttackScenario& sc, const LabeledMessage& reference,
                                   std::int64_t next_start, Rng& rng, std::uint8_t covert_bits) {
    std::vector<Message> out;
    const std::int64_t ref_start = reference.msg.timestamp_us;
    const std::int64_t ref_dur = bus::transfer_duration_us(reference.msg);

    auto fits = [&](const Message& m) {
        return m.timestamp_us >= ref_start + ref_dur + kReplayDelayUs &&
               m.timestamp_us + bus::transfer_duration_us(m) + kInjectGuardUs <= next_start;
    };
    // inside the echo band, leaving the follower a full slot-to-slot gap
    const std::int64_t gap = next_start - ref_start;
    const std::int64_t echo_slot =
        ref_start + std::clamp<std::int64_t>(gap - 2700, std::max<std::int64_t>(300, ref_dur + 40),
                                             850);

    switch (sc.id) {
        case 1: {
            // fake location toward the cockpit display: word count 2 instead
            // of the ICD's 4
            Message m = bus::make_rt_to_rt(1, 2, 6, 9, seeded_payload(rng, 2), echo_slot);
            if (fits(m)) out.push_back(std::move(m));
            break;
        }
        case 2: {
            Message m = bus::make_mode(4, 1, false, echo_slot);  // reset, weapons system
            if (fits(m)) out.push_back(std::move(m));
            break;
        }
        case 3: {
            Message m = reference.msg;
            m.timestamp_us = ref_start + ref_dur + kReplayDelayUs;
            if (fits(m)) out.push_back(std::move(m));
            break;
        }
        case 4: {
            std::int64_t t = ref_start + ref_dur + kReplayDelayUs;
            for (int i = 0; i < sc.burst; ++i) {
                Message m = bus::make_bc_to_rt(5, 7, seeded_payload(rng, 1), t);
                if (!fits(m)) break;
                t += bus::transfer_duration_us(m) + kReplayDelayUs;
                out.push_back(std::move(m));
            }
            break;
        }
        case 5: {
            // exfiltration through the lighting controller: one covert bit per
            // command, encoded in the word count
            const int counts[2] = {1, 4};
            Message m =
                bus::make_bc_to_rt(9, 7, seeded_payload(rng, counts[covert_bits & 1]), echo_slot);
            if (fits(m)) out.push_back(std::move(m));
            break;
        }
        case 6: {
            // denial of service: maximum-length transfer at flight management
            Message m = bus::make_rt_to_rt(2, 5, 3, 6, seeded_payload(rng, 32), echo_slot);
            if (fits(m)) out.push_back(std::move(m));
            break;
        }
        default: break;
    }
    return out;
}

bool is_trigger(const AttackScenario& sc, const sim::Icd& icd, const LabeledMessage& e) {
    if (e.template_id != sc.trigger_template) return false;
    const std::int64_t in_frame = e.msg.timestamp_us % icd.major_frame_us;
    switch (sc.id) {
        case 2: return in_frame >= icd.major_frame_us / 2;  // the echoed update
        case 4: return in_frame < icd.major_frame_us / 2;   // the early update
        case 6: return in_frame > icd.major_frame_us * 9 / 10;  // before the frame gap
        default: return true;
    }
}

} // namespace

TrafficLog inject(const sim::Icd& icd, const TrafficLog& benign, int scenario_id,
                  const InjectConfig& cfg) {
    const AttackScenario sc = scenario(scenario_id);
    Rng rng(cfg.seed ^ (0xa77acc00ULL + static_cast<std::uint64_t>(scenario_id)));

    // a slow-scenario trigger is usable only when its echo slot stayed vacant
    auto usable = [&](std::size_t i) {
        const auto& e = benign.entries[i];
        if (!e.label.benign() || !is_trigger(sc, icd, e)) return false;
        if (sc.id == 3 || sc.id == 4) return true;
        return i + 1 >= benign.entries.size() ||
               benign.entries[i + 1].msg.timestamp_us > e.msg.timestamp_us + kEchoWindowUs;
    };

    std::size_t n_triggers = 0;
    bool any_trigger = false;
    for (std::size_t i = 0; i < benign.entries.size(); ++i) {
        const auto& e = benign.entries[i];
        any_trigger = any_trigger || (e.label.benign() && is_trigger(sc, icd, e));
        if (usable(i)) ++n_triggers;
    }
    if (!any_trigger) throw TriggerNeverFires("trigger template never occurs in log");
    if (n_triggers == 0) return benign;

    const double target = cfg.malicious_fraction * static_cast<double>(benign.size());
    const double fire_p =
        std::min(1.0, target / (static_cast<double>(n_triggers) * static_cast<double>(sc.burst)));

    const int real_device = sc.compromised_bc
                                ? icd.device_of_address(bus::kBcAddress).value_or(0)
                                : icd.device_of_address(sc.compromised_rt).value_or(-1);

    TrafficLog out;
    std::uint8_t covert = 0;
    for (std::size_t i = 0; i < benign.entries.size(); ++i) {
        const auto& e = benign.entries[i];
        out.entries.push_back(e);
        if (!usable(i)) continue;
        if (fire_p <= 0.0 || !rng.bernoulli(fire_p)) continue;

        const std::size_t ref = i;
        const std::int64_t next_start = (ref + 1 < benign.entries.size())
                                            ? benign.entries[ref + 1].msg.timestamp_us
                                            : benign.entries[ref].msg.timestamp_us +
                                                  icd.major_frame_us / 20;
        auto payload = build_payload(sc, benign.entries[ref], next_start, rng, covert);
        covert = static_cast<std::uint8_t>(rng.next_u64() & 0xff);
        for (auto& m : payload) {
            LabeledMessage lm;
            lm.claimed_address = sim::claimed_address_of(m);
            lm.msg = std::move(m);
            lm.label = sim::Label{sim::LabelKind::Malicious, sc.id};
            lm.source_device = real_device;
            lm.template_id = "";
            out.entries.push_back(std::move(lm));
        }
    }
    std::stable_sort(out.entries.begin(), out.entries.end(),
                     [](const LabeledMessage& a, const LabeledMessage& b) {
                         return a.msg.timestamp_us < b.msg.timestamp_us;
                     });
    return out;
}

signal::Topology physical_intrusion(const signal::Topology& topo, signal::AttachPoint point,
                                    bool active, std::uint64_t intruder_seed) {
    signal::AttachedDevice dev;
    dev.device_id = 90 + static_cast<int>(point);
    dev.signature = signal::make_device_signature(dev.device_id, intruder_seed);
    dev.point = point;
    dev.transmits = active;
    return topo.attach(dev);
}

} // namespace vigil::attack
