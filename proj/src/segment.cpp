#include "tapnet/segment.hpp"

#include <algorithm>
#include <cmath>

namespace tapnet {

namespace {
void normalize_peak(std::vector<float>& window) {
    float peak = 0.0f;
    for (float v : window) peak = std::max(peak, std::abs(v));
    if (peak > 0.0f) {
        const float inv = 1.0f / peak;
        for (float& v : window) v *= inv;
    }
}
} // namespace

SegmentResult segment_taps(const Recording& rec, const SegmentParams& params,
                           const DomainTag& domain) {
    rec.validate();
    const std::int64_t n = static_cast<std::int64_t>(rec.samples.size());
    if (n <= params.window) throw config_error("recording shorter than one window");
    if (params.hop < 1 || params.pre_roll < 0) throw config_error("invalid segmentation params");

    const std::int64_t num_hops = n / params.hop;
    std::vector<double> rms(num_hops);
    for (std::int64_t h = 0; h < num_hops; ++h) {
        double acc = 0.0;
        const std::int64_t base = h * params.hop;
        const std::int64_t end = std::min(base + params.hop, n);
        for (std::int64_t i = base; i < end; ++i) {
            acc += static_cast<double>(rec.samples[i]) * rec.samples[i];
        }
        rms[h] = std::sqrt(acc / static_cast<double>(end - base));
    }

    std::vector<double> sorted = rms;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t q =
        static_cast<std::size_t>(params.floor_percentile / 100.0 * (sorted.size() - 1));
    const double noise_floor = sorted[q];
    const double trigger = std::max(params.threshold * noise_floor, 1e-12);

    SegmentResult result;
    std::int64_t quiet_until = 0;  // first sample where detection may resume
    for (std::int64_t h = 0; h < num_hops; ++h) {
        const std::int64_t onset = h * params.hop;
        if (onset < quiet_until) continue;
        if (rms[h] <= trigger) continue;

        const std::int64_t start = std::max<std::int64_t>(0, onset - params.pre_roll);
        Signal s;
        s.samples.assign(static_cast<std::size_t>(params.window), 0.0f);
        const std::int64_t avail = std::min(params.window, n - start);
        std::copy(rec.samples.begin() + start, rec.samples.begin() + start + avail,
                  s.samples.begin());
        if (params.normalize) normalize_peak(s.samples);
        s.domain = domain;
        result.signals.push_back(std::move(s));
        // next window may not start before this one ends
        quiet_until = start + params.window + params.pre_roll;
    }
    result.no_onsets = result.signals.empty();
    return result;
}

} // namespace tapnet
