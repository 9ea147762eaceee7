#include "tapnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tapnet/rng.hpp"

namespace tapnet {

using nlohmann::json;

namespace {
constexpr double kTwoPi = 6.283185307179586;
constexpr double kNyquistHz = kSampleRateHz / 2.0;
} // namespace

// Defaults: intact response at ~4.2 kHz, defect classes 15-45% lower via
// reduced k_d. Cavities ring (low damping, strong overtone), bottom disbonds
// are duller than top ones, and bubble variants decay faster than their
// large-area counterparts.
SynthSpec::SynthSpec() {
    classes[static_cast<int>(DefectClass::N)] = ClassModes{4.000, 0.0047, 2.7, 0.25};
    classes[static_cast<int>(DefectClass::LC)] = ClassModes{0.319, 0.0069, 2.3, 0.60};
    classes[static_cast<int>(DefectClass::BC)] = ClassModes{0.944, 0.0075, 2.3, 0.70};
    classes[static_cast<int>(DefectClass::LTD)] = ClassModes{0.404, 0.0090, 2.5, 0.35};
    classes[static_cast<int>(DefectClass::BTD)] = ClassModes{0.690, 0.0106, 2.5, 0.45};
    classes[static_cast<int>(DefectClass::LBD)] = ClassModes{0.522, 0.0064, 2.1, 0.45};
    classes[static_cast<int>(DefectClass::BBD)] = ClassModes{1.370, 0.0099, 2.1, 0.55};
}

double SynthSpec::dominant_frequency_hz(DefectClass c) const {
    const ClassModes& m = classes[static_cast<int>(c)];
    const double k_eff =
        contact_stiffness * m.defect_stiffness / (contact_stiffness + m.defect_stiffness);
    return reference_frequency_hz * std::sqrt(k_eff / contact_stiffness) * frequency_multiplier;
}

void SynthSpec::validate() const {
    if (contact_stiffness <= 0.0) throw spec_error("contact stiffness must be positive");
    if (reference_frequency_hz <= 0.0) throw spec_error("reference frequency must be positive");
    if (noise_level < 0.0 || freq_jitter < 0.0 || damping_jitter < 0.0 || amp_jitter < 0.0) {
        throw spec_error("jitter and noise levels must be non-negative");
    }
    if (onset_jitter < 0 || onset_jitter >= kSignalLength / 4) {
        throw spec_error("onset jitter out of range");
    }
    for (DefectClass c : all_classes()) {
        const ClassModes& m = classes[static_cast<int>(c)];
        if (m.defect_stiffness <= 0.0) throw spec_error("defect stiffness must be positive");
        if (m.damping_ratio <= 0.0 || m.damping_ratio >= 1.0) {
            throw spec_error("damping ratio must be in (0, 1)");
        }
        if (m.overtone_mult < 1.0 || m.overtone_weight < 0.0) {
            throw spec_error("invalid overtone parameters");
        }
        const double f_top = dominant_frequency_hz(c) * m.overtone_mult * (1.0 + freq_jitter);
        if (f_top >= kNyquistHz) {
            throw spec_error(std::string("class ") + to_string(c) + " reaches " +
                             std::to_string(f_top) + " Hz, at or above Nyquist");
        }
    }
    for (int a = 0; a < kNumClasses; ++a) {
        for (int b = a + 1; b < kNumClasses; ++b) {
            const ClassModes& ma = classes[a];
            const ClassModes& mb = classes[b];
            if (ma.defect_stiffness == mb.defect_stiffness &&
                ma.damping_ratio == mb.damping_ratio && ma.overtone_mult == mb.overtone_mult &&
                ma.overtone_weight == mb.overtone_weight) {
                throw spec_error("class parameter sets must be pairwise distinct");
            }
        }
    }
}

ClassCounts proportional_counts(std::size_t total) {
    const ClassCounts ref = table1_counts();
    std::size_t ref_total = 0;
    for (std::size_t n : ref) ref_total += n;

    ClassCounts out{};
    std::array<double, kNumClasses> remainder{};
    std::size_t assigned = 0;
    for (int c = 0; c < kNumClasses; ++c) {
        const double quota =
            static_cast<double>(total) * static_cast<double>(ref[c]) / static_cast<double>(ref_total);
        out[c] = static_cast<std::size_t>(std::floor(quota));
        remainder[c] = quota - std::floor(quota);
        assigned += out[c];
    }
    std::array<int, kNumClasses> order{};
    for (int c = 0; c < kNumClasses; ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return remainder[a] > remainder[b]; });
    for (int k = 0; assigned < total; k = (k + 1) % kNumClasses) {
        out[order[k]] += 1;
        ++assigned;
    }
    return out;
}

Dataset generate_synthetic(const SynthSpec& spec, const ClassCounts& counts, std::uint64_t seed) {
    spec.validate();
    Dataset ds;
    std::size_t total = 0;
    for (std::size_t n : counts) total += n;
    ds.signals.reserve(total);

    std::uint64_t index = 0;
    for (DefectClass cls : all_classes()) {
        const ClassModes& m = spec.classes[static_cast<int>(cls)];
        const double f_base = spec.dominant_frequency_hz(cls);
        for (std::size_t i = 0; i < counts[static_cast<int>(cls)]; ++i, ++index) {
            Rng rng(mix_seed(seed, 0x73796e74ULL + index));

            const double f0 = f_base * (1.0 + spec.freq_jitter * rng.uniform(-1.0, 1.0));
            const double f1 =
                f0 * m.overtone_mult * (1.0 + spec.freq_jitter * rng.uniform(-1.0, 1.0));
            const double zeta =
                m.damping_ratio * (1.0 + spec.damping_jitter * rng.uniform(-1.0, 1.0));
            const double w1 =
                m.overtone_weight * (1.0 + spec.amp_jitter * rng.uniform(-1.0, 1.0));
            const double phi0 = rng.uniform(0.0, kTwoPi);
            const double phi1 = rng.uniform(0.0, kTwoPi);
            const std::int64_t onset =
                spec.onset_jitter > 0
                    ? static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(spec.onset_jitter) + 1))
                    : 0;

            Signal s;
            s.samples.assign(static_cast<std::size_t>(kSignalLength), 0.0f);
            const double d0 = kTwoPi * f0 * zeta;
            const double d1 = kTwoPi * f1 * zeta * spec.overtone_damp_scale;
            for (std::int64_t n = onset; n < kSignalLength; ++n) {
                const double t = static_cast<double>(n - onset) / kSampleRateHz;
                const double v = std::exp(-d0 * t) * std::sin(kTwoPi * f0 * t + phi0) +
                                 w1 * std::exp(-d1 * t) * std::sin(kTwoPi * f1 * t + phi1);
                s.samples[static_cast<std::size_t>(n)] = static_cast<float>(v);
            }
            if (spec.normalize) {
                float peak = 0.0f;
                for (float v : s.samples) peak = std::max(peak, std::abs(v));
                if (peak > 0.0f) {
                    for (float& v : s.samples) v /= peak;
                }
            }
            if (spec.noise_level > 0.0) {
                for (float& v : s.samples) {
                    v += static_cast<float>(spec.noise_level * rng.gaussian());
                }
            }
            s.label = cls;
            s.truth = cls;
            s.domain = DomainTag(spec.domain);
            ds.signals.push_back(std::move(s));
        }
    }
    return ds;
}

std::string SynthSpec::to_json() const {
    json j;
    j["contact_stiffness"] = contact_stiffness;
    j["reference_frequency_hz"] = reference_frequency_hz;
    j["frequency_multiplier"] = frequency_multiplier;
    j["noise_level"] = noise_level;
    j["freq_jitter"] = freq_jitter;
    j["damping_jitter"] = damping_jitter;
    j["amp_jitter"] = amp_jitter;
    j["onset_jitter"] = onset_jitter;
    j["overtone_damp_scale"] = overtone_damp_scale;
    j["normalize"] = normalize;
    j["domain"] = domain;
    json cls = json::object();
    for (DefectClass c : all_classes()) {
        const ClassModes& m = classes[static_cast<int>(c)];
        cls[to_string(c)] = {{"defect_stiffness", m.defect_stiffness},
                             {"damping_ratio", m.damping_ratio},
                             {"overtone_mult", m.overtone_mult},
                             {"overtone_weight", m.overtone_weight}};
    }
    j["classes"] = cls;
    return j.dump(2) + "\n";
}

SynthSpec SynthSpec::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw format_error(std::string("synth spec is not valid JSON: ") + e.what());
    }
    SynthSpec spec;
    spec.contact_stiffness = j.value("contact_stiffness", spec.contact_stiffness);
    spec.reference_frequency_hz = j.value("reference_frequency_hz", spec.reference_frequency_hz);
    spec.frequency_multiplier = j.value("frequency_multiplier", spec.frequency_multiplier);
    spec.noise_level = j.value("noise_level", spec.noise_level);
    spec.freq_jitter = j.value("freq_jitter", spec.freq_jitter);
    spec.damping_jitter = j.value("damping_jitter", spec.damping_jitter);
    spec.amp_jitter = j.value("amp_jitter", spec.amp_jitter);
    spec.onset_jitter = j.value("onset_jitter", spec.onset_jitter);
    spec.overtone_damp_scale = j.value("overtone_damp_scale", spec.overtone_damp_scale);
    spec.normalize = j.value("normalize", spec.normalize);
    spec.domain = j.value("domain", spec.domain);
    if (j.contains("classes")) {
        for (DefectClass c : all_classes()) {
            const char* name = to_string(c);
            if (!j["classes"].contains(name)) continue;
            const json& m = j["classes"][name];
            ClassModes& modes = spec.classes[static_cast<int>(c)];
            modes.defect_stiffness = m.value("defect_stiffness", modes.defect_stiffness);
            modes.damping_ratio = m.value("damping_ratio", modes.damping_ratio);
            modes.overtone_mult = m.value("overtone_mult", modes.overtone_mult);
            modes.overtone_weight = m.value("overtone_weight", modes.overtone_weight);
        }
    }
    spec.validate();
    return spec;
}

SynthSpec SynthSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open synth spec: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

} // namespace tapnet
