#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tapnet/common.hpp"

namespace tapnet {

// The seven tap-response classes with their stable wire codes.
enum class DefectClass : std::uint8_t {
    N = 0,    // normal
    LC = 1,   // large-area cavity
    BC = 2,   // bubble-like cavity
    LTD = 3,  // large-area top disbond
    BTD = 4,  // bubble-like top disbond
    LBD = 5,  // large-area bottom disbond
    BBD = 6,  // bubble-like bottom disbond
};

constexpr int kNumClasses = 7;
constexpr std::int64_t kSignalLength = 2048;
constexpr double kSampleRateHz = 48000.0;

constexpr std::array<DefectClass, kNumClasses> all_classes() {
    return {DefectClass::N,   DefectClass::LC,  DefectClass::BC, DefectClass::LTD,
            DefectClass::BTD, DefectClass::LBD, DefectClass::BBD};
}

const char* to_string(DefectClass c);
DefectClass defect_class_from_string(const std::string& name);
DefectClass defect_class_from_code(int code);

// Acquisition scenario identifier (a material name in practice). Equality is
// case-sensitive string equality.
struct DomainTag {
    std::string name;

    DomainTag() : name("default") {}
    explicit DomainTag(std::string n) : name(std::move(n)) {
        if (name.empty()) throw spec_error("domain tag must be non-empty");
    }

    bool operator==(const DomainTag& other) const { return name == other.name; }
    bool operator!=(const DomainTag& other) const { return name != other.name; }
};

struct GridPos {
    std::uint16_t row = 0;
    std::uint16_t col = 0;
    bool operator==(const GridPos& o) const { return row == o.row && col == o.col; }
};

// One fixed-length waveform sample. `label` is the visible label; `truth` is
// the shadow ground-truth kept when labels are hidden for transfer runs, so
// target-domain evaluation stays possible.
struct Signal {
    std::vector<float> samples;            // length exactly kSignalLength
    std::optional<DefectClass> label;
    std::optional<DefectClass> truth;
    DomainTag domain;
    std::optional<GridPos> position;

    void validate() const;
};

constexpr std::uint8_t kNoFold = 0xFF;

// Ordered signal collection with fold bookkeeping. Treated as immutable after
// construction; the transforms below return modified copies.
struct Dataset {
    std::vector<Signal> signals;
    std::vector<std::uint8_t> folds;  // empty or one id per signal (kNoFold = unassigned)

    std::size_t size() const { return signals.size(); }
    bool has_folds() const { return !folds.empty(); }

    std::array<std::size_t, kNumClasses> class_counts() const;
    std::size_t labeled_count() const;
    void validate() const;

    // Indices whose fold id is (not) `fold`; requires folds assigned.
    std::vector<std::size_t> fold_indices(int fold) const;
    std::vector<std::size_t> non_fold_indices(int fold) const;

    // Copy where every visible label is replaced by the shadow truth label.
    Dataset with_truth_labels() const;

    // Copy restricted to the given indices, keeping order and fold ids.
    Dataset subset(const std::vector<std::size_t>& indices) const;
};

// Assigns each signal to one of `num_folds` folds, stratified per class so that
// fold sizes within a class differ by at most one. Deterministic in `seed`.
Dataset stratified_folds(const Dataset& ds, int num_folds, std::uint64_t seed);

// Keeps exactly round(fraction * N) labels visible (stratified per class,
// largest-remainder apportionment) and hides the rest in the shadow field.
Dataset label_fraction_mask(const Dataset& ds, double fraction, std::uint64_t seed);

} // namespace tapnet
