#pragma once

#include <cstdint>
#include <vector>

#include "tapnet/signal.hpp"
#include "tapnet/wav.hpp"

namespace tapnet {

// Tap onset detection: RMS over fixed hops against a noise floor taken from
// the quiet percentile of the recording.
struct SegmentParams {
    std::int64_t window = kSignalLength;
    std::int64_t hop = 64;
    double threshold = 8.0;        // trigger at threshold * noise floor
    std::int64_t pre_roll = 128;   // samples kept before the onset
    double floor_percentile = 5.0;
    bool normalize = true;         // scale each window to unit peak
};

struct SegmentResult {
    std::vector<Signal> signals;
    bool no_onsets = false;  // warning flag, not an error
};

// Emits one window per detected onset, starting pre_roll samples before it.
// Windows never overlap (the detector stays quiet until the previous window
// plus pre_roll has passed) and short tails are zero-padded to full length.
SegmentResult segment_taps(const Recording& rec, const SegmentParams& params,
                           const DomainTag& domain = DomainTag());

} // namespace tapnet
