#include "vigil/sim/bus_sim.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "vigil/bus/capture.hpp"
#include "vigil/core/rng.hpp"

namespace vigil::sim {

std::vector<bus::Message> TrafficLog::messages() const {
    std::vector<bus::Message> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.msg);
    return out;
}

std::vector<bus::TimedWord> TrafficLog::words() const {
    std::vector<bus::TimedWord> out;
    for (const auto& e : entries) {
        auto w = bus::emit_words(e.msg);
        out.insert(out.end(), w.begin(), w.end());
    }
    return out;
}

int claimed_address_of(const bus::Message& m) {
    const Endpoints ep = endpoints_of(m);
    return ep.src_addr;
}

namespace {

struct PendingEvent {
    std::int64_t t_us;
    const MessageTemplate* tmpl;
};

std::int64_t jitter_bound(const SimConfig& cfg, std::int64_t period) {
    const auto frac = static_cast<std::int64_t>(cfg.jitter_fraction * static_cast<double>(period));
    return std::min(frac, cfg.jitter_cap_us);
}

} // namespace

TrafficLog run(const Icd& icd, const SimConfig& cfg) {
    icd.validate();
    if (cfg.frames < 1) throw IcdError("duration must cover at least one major frame");

    Rng rng(cfg.seed);
    TrafficLog log;

    for (std::int64_t frame = 0; frame < cfg.frames; ++frame) {
        const std::int64_t base = frame * icd.major_frame_us;
        std::vector<PendingEvent> events;
        for (const auto& p : icd.periodic) {
            const std::int64_t jb = jitter_bound(cfg, p.period_us);
            for (std::int64_t t = p.offset_us; t < icd.major_frame_us; t += p.period_us) {
                const std::int64_t j = jb > 0 ? rng.uniform_int(-jb, jb) : 0;
                events.push_back(PendingEvent{base + t + j, &p.tmpl});
            }
        }
        for (const auto& a : icd.aperiodic) {
            const std::int64_t jb = cfg.jitter_cap_us;
            for (std::int64_t slot : a.slots_us) {
                if (!rng.bernoulli(a.fire_probability)) continue;
                const std::int64_t j = jb > 0 ? rng.uniform_int(-jb, jb) : 0;
                events.push_back(PendingEvent{base + slot + j, &a.tmpl});
            }
        }
        std::stable_sort(events.begin(), events.end(),
                         [](const PendingEvent& x, const PendingEvent& y) { return x.t_us < y.t_us; });

        std::int64_t bus_free_at =
            log.entries.empty()
                ? base
                : log.entries.back().msg.timestamp_us +
                      bus::transfer_duration_us(log.entries.back().msg) + cfg.min_gap_us;
        for (const auto& ev : events) {
            std::int64_t t = ev.t_us;
            if (t < bus_free_at) {
                // one transmitter at a time; a systematically oversubscribed
                // schedule cannot be repaired by nudging
                if (bus_free_at - t > icd.major_frame_us / 4)
                    throw ScheduleOverflow("templates cannot fit the major frame");
                t = bus_free_at;
            }
            bus::Message msg = instantiate_template(*ev.tmpl, t, rng.next_u64());
            LabeledMessage lm;
            lm.claimed_address = claimed_address_of(msg);
            lm.source_device = icd.device_of_address(lm.claimed_address).value_or(-1);
            lm.template_id = ev.tmpl->id;
            lm.label = Label{LabelKind::Benign, 0};
            bus_free_at = t + bus::transfer_duration_us(msg) + cfg.min_gap_us;
            lm.msg = std::move(msg);
            log.entries.push_back(std::move(lm));
        }
    }
    return log;
}

void write_labels_file(const std::string& path, const TrafficLog& log) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    for (const auto& e : log.entries) {
        nlohmann::ordered_json j;
        j["timestamp_us"] = e.msg.timestamp_us;
        j["label"] = e.label.benign() ? "benign" : "malicious";
        j["scenario"] = e.label.scenario;
        j["source_device"] = e.source_device;
        j["claimed_address"] = e.claimed_address;
        j["template_id"] = e.template_id;
        os << j.dump() << "\n";
    }
}

TrafficLog read_traffic(const std::string& capture_path, const std::string& labels_path) {
    const auto words = bus::read_capture_file(capture_path);
    const auto msgs = bus::classify_stream(words);
    TrafficLog log;
    log.entries.reserve(msgs.size());
    for (const auto& m : msgs) {
        LabeledMessage lm;
        lm.msg = m;
        lm.claimed_address = claimed_address_of(m);
        log.entries.push_back(std::move(lm));
    }
    std::ifstream is(labels_path);
    if (is) {
        std::string line;
        std::size_t i = 0;
        while (std::getline(is, line) && i < log.entries.size()) {
            if (line.empty()) continue;
            const auto j = nlohmann::json::parse(line);
            auto& e = log.entries[i++];
            e.label.kind = j.value("label", "benign") == std::string("malicious")
                               ? LabelKind::Malicious
                               : LabelKind::Benign;
            e.label.scenario = j.value("scenario", 0);
            e.source_device = j.value("source_device", -1);
            e.template_id = j.value("template_id", "");
        }
        if (i != log.entries.size())
            throw std::runtime_error("labels file does not align with capture");
    }
    return log;
}

} // namespace vigil::sim
