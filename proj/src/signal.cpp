#include "tapnet/signal.hpp"

#include <algorithm>
#include <cmath>

#include "tapnet/rng.hpp"

namespace tapnet {

const char* to_string(DefectClass c) {
    switch (c) {
        case DefectClass::N: return "N";
        case DefectClass::LC: return "LC";
        case DefectClass::BC: return "BC";
        case DefectClass::LTD: return "LTD";
        case DefectClass::BTD: return "BTD";
        case DefectClass::LBD: return "LBD";
        case DefectClass::BBD: return "BBD";
    }
    throw spec_error("invalid defect class code");
}

DefectClass defect_class_from_string(const std::string& name) {
    for (DefectClass c : all_classes()) {
        if (name == to_string(c)) return c;
    }
    throw spec_error("unknown defect class name: '" + name + "'");
}

DefectClass defect_class_from_code(int code) {
    if (code < 0 || code >= kNumClasses) {
        throw spec_error("defect class code out of range: " + std::to_string(code));
    }
    return static_cast<DefectClass>(code);
}

void Signal::validate() const {
    if (static_cast<std::int64_t>(samples.size()) != kSignalLength) {
        throw spec_error("signal length must be " + std::to_string(kSignalLength) +
                         ", got " + std::to_string(samples.size()));
    }
    for (float v : samples) {
        if (!std::isfinite(v)) throw spec_error("signal contains a non-finite sample");
    }
    if (label && truth && *label != *truth) {
        throw spec_error("visible label disagrees with shadow truth label");
    }
}

std::array<std::size_t, kNumClasses> Dataset::class_counts() const {
    std::array<std::size_t, kNumClasses> counts{};
    for (const Signal& s : signals) {
        if (s.label) counts[static_cast<int>(*s.label)] += 1;
    }
    return counts;
}

std::size_t Dataset::labeled_count() const {
    std::size_t n = 0;
    for (const Signal& s : signals) {
        if (s.label) ++n;
    }
    return n;
}

void Dataset::validate() const {
    for (const Signal& s : signals) s.validate();
    if (!folds.empty() && folds.size() != signals.size()) {
        throw spec_error("fold assignment size does not match signal count");
    }
}

std::vector<std::size_t> Dataset::fold_indices(int fold) const {
    if (!has_folds()) throw config_error("dataset has no fold assignment");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < folds.size(); ++i) {
        if (folds[i] == fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> Dataset::non_fold_indices(int fold) const {
    if (!has_folds()) throw config_error("dataset has no fold assignment");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < folds.size(); ++i) {
        if (folds[i] != fold && folds[i] != kNoFold) out.push_back(i);
    }
    return out;
}

Dataset Dataset::with_truth_labels() const {
    Dataset out = *this;
    for (Signal& s : out.signals) {
        if (s.truth) s.label = s.truth;
    }
    return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
    Dataset out;
    out.signals.reserve(indices.size());
    if (has_folds()) out.folds.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= signals.size()) throw config_error("subset index out of range");
        out.signals.push_back(signals[i]);
        if (has_folds()) out.folds.push_back(folds[i]);
    }
    return out;
}

Dataset stratified_folds(const Dataset& ds, int num_folds, std::uint64_t seed) {
    if (ds.signals.empty()) throw config_error("cannot fold an empty dataset");
    if (num_folds < 2) throw config_error("fold count must be at least 2");

    std::vector<std::vector<std::size_t>> per_class(kNumClasses);
    for (std::size_t i = 0; i < ds.signals.size(); ++i) {
        const auto& label = ds.signals[i].label;
        if (!label) {
            throw labeling_error("unlabeled signal at index " + std::to_string(i));
        }
        per_class[static_cast<int>(*label)].push_back(i);
    }

    Dataset out = ds;
    out.folds.assign(ds.signals.size(), kNoFold);

    for (int c = 0; c < kNumClasses; ++c) {
        auto& idx = per_class[c];
        if (idx.empty()) continue;
        if (idx.size() < static_cast<std::size_t>(num_folds)) {
            throw stratification_error("class " + std::string(to_string(defect_class_from_code(c))) +
                                       " has " + std::to_string(idx.size()) +
                                       " signals, fewer than " + std::to_string(num_folds) + " folds");
        }
        // Fisher-Yates with a per-class stream, then deal round-robin.
        Rng rng(mix_seed(seed, 0x666f6c64ULL + static_cast<std::uint64_t>(c)));
        for (std::size_t i = idx.size(); i > 1; --i) {
            std::swap(idx[i - 1], idx[rng.below(i)]);
        }
        for (std::size_t i = 0; i < idx.size(); ++i) {
            out.folds[idx[i]] = static_cast<std::uint8_t>(i % num_folds);
        }
    }
    return out;
}

Dataset label_fraction_mask(const Dataset& ds, double fraction, std::uint64_t seed) {
    if (fraction < 0.0 || fraction > 1.0) throw config_error("label fraction must be in [0, 1]");

    std::vector<std::vector<std::size_t>> per_class(kNumClasses);
    for (std::size_t i = 0; i < ds.signals.size(); ++i) {
        const auto& label = ds.signals[i].label;
        if (!label) throw labeling_error("unlabeled signal at index " + std::to_string(i));
        per_class[static_cast<int>(*label)].push_back(i);
    }

    const std::size_t total = ds.signals.size();
    const std::size_t keep_total =
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));

    // Largest-remainder apportionment of keep_total across classes.
    std::array<std::size_t, kNumClasses> keep{};
    std::array<double, kNumClasses> remainder{};
    std::size_t assigned = 0;
    for (int c = 0; c < kNumClasses; ++c) {
        const double quota = fraction * static_cast<double>(per_class[c].size());
        keep[c] = static_cast<std::size_t>(std::floor(quota));
        keep[c] = std::min(keep[c], per_class[c].size());
        remainder[c] = quota - std::floor(quota);
        assigned += keep[c];
    }
    std::array<int, kNumClasses> order{};
    for (int c = 0; c < kNumClasses; ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return remainder[a] > remainder[b]; });
    for (int k = 0; assigned < keep_total; k = (k + 1) % kNumClasses) {
        const int c = order[k];
        if (keep[c] < per_class[c].size()) {
            keep[c] += 1;
            assigned += 1;
        }
    }

    Dataset out = ds;
    for (Signal& s : out.signals) {
        s.truth = s.label;
        s.label.reset();
    }
    for (int c = 0; c < kNumClasses; ++c) {
        auto& idx = per_class[c];
        if (idx.empty()) continue;
        Rng rng(mix_seed(seed, 0x6d61736bULL + static_cast<std::uint64_t>(c)));
        for (std::size_t i = idx.size(); i > 1; --i) {
            std::swap(idx[i - 1], idx[rng.below(i)]);
        }
        for (std::size_t i = 0; i < keep[c]; ++i) {
            out.signals[idx[i]].label = out.signals[idx[i]].truth;
        }
    }
    return out;
}

} // namespace tapnet
