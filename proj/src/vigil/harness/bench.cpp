#include "vigil/harness/bench.hpp"

#include <chrono>
#include <cmath>

#include "vigil/harness/pipeline.hpp"

namespace vigil::harness {

BenchRow time_op(const std::string& name, const std::function<void()>& op,
                 std::size_t n_instances, std::size_t repeats) {
    using clock = std::chrono::steady_clock;
    std::vector<double> means;
    for (std::size_t r = 0; r < repeats; ++r) {
        const auto t0 = clock::now();
        for (std::size_t i = 0; i < n_instances; ++i) op();
        const auto t1 = clock::now();
        const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count() /
                          static_cast<double>(n_instances);
        means.push_back(ms);
    }
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= static_cast<double>(means.size());
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= static_cast<double>(means.size());
    BenchRow row;
    row.name = name;
    row.mean_ms = mean;
    row.cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
    return row;
}

std::vector<BenchRow> bench_all(const Artifacts& art) {
    std::vector<BenchRow> rows;
    signal::Topology topo = art.topology;
    const signal::VoltageTrace trace = signal::synthesize(topo, 1, 42);

    rows.push_back(time_op("physical_intrusion_detection",
                           [&] { (void)art.physical.detect(trace); }, 2000));

    const auto& fp0 = art.fingerprints.begin()->second;
    rows.push_back(time_op("device_fingerprinting_detection",
                           [&] { (void)fp0.score(trace); }, 2000));

    const bus::Message msg = bus::make_rt_to_bc(1, 4, {0x1234}, 0);
    rows.push_back(time_op("device_fingerprinting_prevention",
                           [&] { (void)art.whitelist.filter_write(1, msg); }, 200000));

    // a plausible benign window for the context model
    sim::SimConfig sc;
    sc.frames = 1;
    sc.seed = 4242;
    const sim::TrafficLog one = sim::run(art.icd, sc);
    nn::Seq window;
    std::vector<std::vector<detect::FeatureVector>> history;
    {
        std::vector<detect::FeatureVector> fvs;
        for (std::size_t i = 0; i + 1 < one.entries.size() && fvs.size() < 24; ++i)
            fvs.push_back(detect::extract_features(one.entries[i + 1].msg, &one.entries[i].msg));
        for (std::size_t i = 0; i < art.context.window; ++i)
            window.push_back(art.context.encoder.encode(fvs[i]));
        for (std::size_t w = 0; w + art.context.window <= fvs.size() && history.size() < 10; ++w)
            history.emplace_back(fvs.begin() + static_cast<std::ptrdiff_t>(w),
                                 fvs.begin() + static_cast<std::ptrdiff_t>(w + art.context.window));
    }
    rows.push_back(time_op("context_anomaly_detection",
                           [&] { (void)art.context.window_mse(window); }, 500));

    rows.push_back(time_op(
        "mif_calculator",
        [&] {
            explain::SurrogateConfig cfg;
            auto anomalous = history.back();
            anomalous.back().data_count = 31;
            try {
                const auto s = explain::build_surrogate(art.context, history, anomalous, cfg);
                (void)explain::top_features(s, anomalous, 1);
            } catch (const explain::DegenerateLabels&) {
            }
        },
        20));

    rows.push_back(time_op("device_identifier_detection",
                           [&] { (void)explain::identify_device(art.fingerprints, trace, 0); },
                           1000));

    const explain::CorpusFeatures m1{1, 4, 32, 32, 0, 1};
    rows.push_back(time_op("message_translator",
                           [&] { (void)art.translator.translate({m1}); }, 100));
    return rows;
}

} // namespace vigil::harness
