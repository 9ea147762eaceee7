#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tapnet/rng.hpp"
#include "tapnet/weights.hpp"

namespace tapnet {

struct GradientCheckEntry {
    std::string name;
    double max_rel_err = 0.0;
    double max_abs_err = 0.0;
    std::int64_t checked = 0;
};

struct GradientCheckReport {
    std::vector<GradientCheckEntry> entries;
    double max_rel_err = 0.0;

    bool passed(double tolerance) const { return max_rel_err < tolerance; }
};

// Compares the analytic gradients already stored in `weights` against central
// finite differences of `eval` (a pure forward evaluation of the same scalar;
// it must not mutate state — run batch norm in the Frozen phase).
//
// Relative error uses max(|analytic|, |numeric|, 1e-6) as denominator so
// negligible gradients do not produce spurious failures. `samples_per_param`
// limits the scalars perturbed per tensor (0 = all of them).
template <typename T>
GradientCheckReport gradient_check(ModelWeights<T>& weights,
                                   const std::function<double()>& eval, double step,
                                   std::int64_t samples_per_param = 0,
                                   std::uint64_t sample_seed = 17) {
    GradientCheckReport report;
    Rng rng(mix_seed(sample_seed, 0x67726164ULL));
    for (auto& p : weights) {
        if (!p.learnable) continue;
        GradientCheckEntry entry;
        entry.name = p.name;

        std::vector<std::size_t> indices;
        if (samples_per_param > 0 &&
            p.value.size() > static_cast<std::size_t>(samples_per_param)) {
            for (std::int64_t k = 0; k < samples_per_param; ++k) {
                indices.push_back(static_cast<std::size_t>(rng.below(p.value.size())));
            }
        } else {
            indices.resize(p.value.size());
            for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
        }

        for (std::size_t idx : indices) {
            const T saved = p.value[idx];
            p.value[idx] = saved + static_cast<T>(step);
            const double f_plus = eval();
            p.value[idx] = saved - static_cast<T>(step);
            const double f_minus = eval();
            p.value[idx] = saved;
            if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
                throw evaluation_error("non-finite evaluation while checking " + p.name);
            }
            const double numeric = (f_plus - f_minus) / (2.0 * step);
            const double analytic = static_cast<double>(p.grad[idx]);
            const double abs_err = std::abs(analytic - numeric);
            const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
            entry.max_abs_err = std::max(entry.max_abs_err, abs_err);
            entry.max_rel_err = std::max(entry.max_rel_err, abs_err / denom);
            entry.checked += 1;
        }
        report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

} // namespace tapnet
