#include "vigil/harness/datasets.hpp"

namespace vigil::harness {

std::vector<int> fingerprint_device_set() { return {0, 1, 2, 3, 4}; }

signal::Topology make_topology(const sim::Icd& icd, std::uint64_t testbed_seed) {
    std::vector<signal::AttachedDevice> devs;
    for (const auto& d : icd.devices) {
        signal::AttachedDevice ad;
        ad.device_id = d.id;
        ad.signature = signal::make_device_signature(d.id, testbed_seed);
        ad.point = signal::AttachPoint::None;
        devs.push_back(ad);
    }
    return signal::Topology(std::move(devs), testbed_seed ^ 0xd41f7ULL);
}

std::vector<signal::VoltageTrace> gen_traces(signal::Topology& topo,
                                             const std::vector<int>& devices,
                                             std::size_t per_device, std::uint64_t seed,
                                             bool advance_drift) {
    std::vector<signal::VoltageTrace> out;
    out.reserve(per_device * devices.size());
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < per_device; ++i) {
        for (int dev : devices) {
            out.push_back(signal::synthesize(topo, dev, seed + 0x9e37ULL * (++n)));
            if (advance_drift) topo.drift_step();
        }
    }
    return out;
}

} // namespace vigil::harness
