#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "tapnet/signal.hpp"

namespace tapnet {

// Modal description of one class, parameterized through a two-spring contact
// model: the contact stiffness k_c is shared, the local defect stiffness k_d
// drops with damage, and the dominant frequency follows the effective series
// stiffness. An overtone with class-specific weight and faster decay gives
// each family (cavity / top disbond / bottom disbond, large vs bubble) its
// own timbre.
struct ClassModes {
    double defect_stiffness = 1.0;  // k_d, relative to k_c
    double damping_ratio = 0.005;   // zeta in (0, 1)
    double overtone_mult = 2.5;     // overtone frequency / fundamental
    double overtone_weight = 0.3;
};

struct SynthSpec {
    double contact_stiffness = 1.0;          // k_c
    double reference_frequency_hz = 4696.0;  // frequency at k_eff == k_c
    std::array<ClassModes, kNumClasses> classes;

    double frequency_multiplier = 1.0;  // per-domain shift (material change)
    double noise_level = 0.05;          // white noise std, relative to unit peak
    double freq_jitter = 0.015;         // +- relative frequency jitter per signal
    double damping_jitter = 0.10;
    double amp_jitter = 0.10;
    std::int64_t onset_jitter = 32;     // uniform onset delay in samples
    double overtone_damp_scale = 1.2;
    bool normalize = true;
    std::string domain = "synth";

    SynthSpec();

    // f = f_ref * sqrt(k_eff / k_c), k_eff = k_c k_d / (k_c + k_d),
    // scaled by the domain multiplier.
    double dominant_frequency_hz(DefectClass c) const;

    void validate() const;

    std::string to_json() const;
    static SynthSpec from_json(const std::string& text);
    static SynthSpec load(const std::string& path);
};

using ClassCounts = std::array<std::size_t, kNumClasses>;

// Per-material sample schedule of the benchmark taxonomy.
constexpr ClassCounts table1_counts() {
    return {15978, 4434, 1470, 4434, 1470, 4434, 1470};
}

// Same proportions scaled to `total` (largest remainder keeps the sum exact).
ClassCounts proportional_counts(std::size_t total);

// Damped-sinusoid tap bursts with per-signal jitter plus white noise,
// deterministic in (seed, signal index); exact per-class counts, class-major
// order.
Dataset generate_synthetic(const SynthSpec& spec, const ClassCounts& counts, std::uint64_t seed);

} // namespace tapnet
