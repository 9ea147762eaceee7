#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "tapnet/tensor.hpp"
#include "tapnet/weights.hpp"

namespace tapnet {

// Probabilities are clamped here before any logarithm.
constexpr double kProbFloor = 1e-12;

// Five-fold Gaussian kernel: sum over bandwidths 2^i * sigma, i in [lo, hi].
struct KernelSpec {
    double sigma = 1.0;
    int exp_lo = -2;
    int exp_hi = 2;

    void validate() const {
        if (sigma <= 0.0) throw spec_error("kernel bandwidth sigma must be > 0");
        if (exp_lo > exp_hi) throw spec_error("kernel exponent range is empty");
    }
};

// Pseudo-label phase-in: 0 for the first tenth of training, linear ramp over
// the second tenth, 1 afterwards.
inline double alpha_schedule(double t, double total) {
    if (total <= 0.0) throw config_error("alpha schedule needs total iterations > 0");
    if (t <= 0.1 * total) return 0.0;
    if (t <= 0.2 * total) return (t - 0.1 * total) / (0.1 * total);
    return 1.0;
}

struct LossWeights {
    double beta = 1.0;       // MMD weight
    double lambda = 1e-4;    // L1 weight decay coefficient
    bool pll_enabled = true; // alpha stays identically 0 when false

    double alpha(double t, double total) const {
        return pll_enabled ? alpha_schedule(t, total) : 0.0;
    }

    void validate() const {
        if (beta < 0.0) throw spec_error("beta must be >= 0");
        if (lambda < 0.0) throw spec_error("lambda must be >= 0");
    }
};

// The decomposed objective of one step. total = l_c + beta*l_da +
// alpha*l_pll + lambda*l_1.
struct LossReport {
    double l_c = 0.0;
    double l_da = 0.0;
    double l_pll = 0.0;
    double l_1 = 0.0;
    double total = 0.0;
};

namespace losses {

// Mean negative log-likelihood over the labeled rows of softmax output
// (batch, classes, 1). label < 0 excludes a row; the mean is over included
// rows only.
template <typename T>
double cross_entropy(const Tensor<T>& probs, const std::vector<int>& labels) {
    if (probs.length != 1) throw shape_error("cross_entropy expects (batch, classes, 1) input");
    if (static_cast<std::int64_t>(labels.size()) != probs.batch) {
        throw shape_error("cross_entropy: one label per row required");
    }
    double sum = 0.0;
    std::int64_t n = 0;
    for (std::int64_t i = 0; i < probs.batch; ++i) {
        if (labels[i] < 0) continue;
        if (labels[i] >= probs.channels) throw shape_error("cross_entropy: label out of range");
        const double p = std::max(static_cast<double>(probs.at(i, labels[i], 0)), kProbFloor);
        sum -= std::log(p);
        ++n;
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

// Accumulates d(cross_entropy)/d(probs) into grad_probs, scaled by `scale`.
template <typename T>
void cross_entropy_backward(const Tensor<T>& probs, const std::vector<int>& labels, double scale,
                            Tensor<T>& grad_probs) {
    std::int64_t n = 0;
    for (int l : labels) {
        if (l >= 0) ++n;
    }
    if (n == 0) return;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::int64_t i = 0; i < probs.batch; ++i) {
        if (labels[i] < 0) continue;
        const double p = static_cast<double>(probs.at(i, labels[i], 0));
        if (p <= kProbFloor) continue;  // clamped region: flat
        grad_probs.at(i, labels[i], 0) += static_cast<T>(-scale * inv_n / p);
    }
}

template <typename T>
int argmax_row(const Tensor<T>& probs, std::int64_t row) {
    // ties break toward the lowest class code
    int best = 0;
    T best_v = probs.at(row, 0, 0);
    for (std::int64_t c = 1; c < probs.channels; ++c) {
        if (probs.at(row, c, 0) > best_v) {
            best_v = probs.at(row, c, 0);
            best = static_cast<int>(c);
        }
    }
    return best;
}

// Cross-entropy of each row against its own argmax. The pseudo target is a
// constant per forward pass: gradient flows only through log p.
template <typename T>
double pseudo_label_loss(const Tensor<T>& probs) {
    if (probs.length != 1) throw shape_error("pseudo_label_loss expects (batch, classes, 1)");
    if (probs.batch == 0) return 0.0;
    double sum = 0.0;
    for (std::int64_t i = 0; i < probs.batch; ++i) {
        const int c = argmax_row(probs, i);
        sum -= std::log(std::max(static_cast<double>(probs.at(i, c, 0)), kProbFloor));
    }
    return sum / static_cast<double>(probs.batch);
}

template <typename T>
void pseudo_label_backward(const Tensor<T>& probs, double scale, Tensor<T>& grad_probs) {
    if (probs.batch == 0) return;
    const double inv_n = 1.0 / static_cast<double>(probs.batch);
    for (std::int64_t i = 0; i < probs.batch; ++i) {
        const int c = argmax_row(probs, i);
        const double p = static_cast<double>(probs.at(i, c, 0));
        if (p <= kProbFloor) continue;
        grad_probs.at(i, c, 0) += static_cast<T>(-scale * inv_n / p);
    }
}

// Sum of absolute values of all learnable scalars.
template <typename T>
double l1_penalty(const ModelWeights<T>& weights) {
    double sum = 0.0;
    for (const auto& p : weights) {
        if (!p.learnable) continue;
        for (T v : p.value) sum += std::abs(static_cast<double>(v));
    }
    return sum;
}

// grad += lambda * sign(theta); the subgradient at exactly 0 is taken as 0.
template <typename T>
void l1_accumulate_subgradient(ModelWeights<T>& weights, double lambda) {
    if (lambda == 0.0) return;
    for (auto& p : weights) {
        if (!p.learnable) continue;
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            if (p.value[i] > T(0)) {
                p.grad[i] += static_cast<T>(lambda);
            } else if (p.value[i] < T(0)) {
                p.grad[i] -= static_cast<T>(lambda);
            }
        }
    }
}

template <typename T>
double squared_distance(const T* a, const T* b, std::int64_t dim) {
    double r2 = 0.0;
    for (std::int64_t k = 0; k < dim; ++k) {
        const double d = static_cast<double>(a[k]) - static_cast<double>(b[k]);
        r2 += d * d;
    }
    return r2;
}

inline double multikernel_from_r2(double r2, const KernelSpec& spec) {
    double sum = 0.0;
    for (int i = spec.exp_lo; i <= spec.exp_hi; ++i) {
        const double bw = std::ldexp(spec.sigma, i);  // 2^i * sigma
        sum += std::exp(-r2 / (2.0 * bw * bw));
    }
    return sum;
}

template <typename T>
double gaussian_multikernel(const T* a, const T* b, std::int64_t dim, const KernelSpec& spec) {
    return multikernel_from_r2(squared_distance(a, b, dim), spec);
}

// Biased empirical MMD^2 between two feature batches (rows of length dim),
// self-pairs included. Exactly zero for identical batches: the three sums run
// in the same accumulation order, so they cancel bitwise.
template <typename T>
double mmd_squared(const T* src, std::int64_t n_s, const T* tgt, std::int64_t n_t,
                   std::int64_t dim, const KernelSpec& spec) {
    if (n_s < 2 || n_t < 2) {
        throw batch_size_error("mmd_squared needs at least 2 samples per domain");
    }
    spec.validate();
    double s_ss = 0.0, s_tt = 0.0, s_st = 0.0;
    for (std::int64_t i = 0; i < n_s; ++i) {
        for (std::int64_t j = 0; j < n_s; ++j) {
            s_ss += multikernel_from_r2(squared_distance(src + i * dim, src + j * dim, dim), spec);
        }
    }
    for (std::int64_t i = 0; i < n_t; ++i) {
        for (std::int64_t j = 0; j < n_t; ++j) {
            s_tt += multikernel_from_r2(squared_distance(tgt + i * dim, tgt + j * dim, dim), spec);
        }
    }
    for (std::int64_t i = 0; i < n_s; ++i) {
        for (std::int64_t j = 0; j < n_t; ++j) {
            s_st += multikernel_from_r2(squared_distance(src + i * dim, tgt + j * dim, dim), spec);
        }
    }
    const double ns = static_cast<double>(n_s);
    const double nt = static_cast<double>(n_t);
    return s_ss / (ns * ns) + s_tt / (nt * nt) - (2.0 / (ns * nt)) * s_st;
}

namespace detail {
inline double multikernel_weight(double r2, const KernelSpec& spec) {
    // d k / d r2  =  -sum_f exp(-r2 / 2 bw^2) / (2 bw^2); the pairwise
    // gradient is 2 * (x - y) * dk/dr2.
    double w = 0.0;
    for (int i = spec.exp_lo; i <= spec.exp_hi; ++i) {
        const double bw = std::ldexp(spec.sigma, i);
        w -= std::exp(-r2 / (2.0 * bw * bw)) / (bw * bw);
    }
    return w;
}
} // namespace detail

// Accumulates upstream * d(mmd^2)/d(features) into grad_src / grad_tgt
// (same row-major layout as the inputs).
template <typename T>
void mmd_squared_backward(const T* src, std::int64_t n_s, const T* tgt, std::int64_t n_t,
                          std::int64_t dim, const KernelSpec& spec, double upstream, T* grad_src,
                          T* grad_tgt) {
    const double ns = static_cast<double>(n_s);
    const double nt = static_cast<double>(n_t);
    const double c_ss = upstream * 2.0 / (ns * ns);
    const double c_tt = upstream * 2.0 / (nt * nt);
    const double c_st = upstream * 2.0 / (ns * nt);

    for (std::int64_t i = 0; i < n_s; ++i) {
        for (std::int64_t j = 0; j < n_s; ++j) {
            if (i == j) continue;
            const T* a = src + i * dim;
            const T* b = src + j * dim;
            const double w = detail::multikernel_weight(squared_distance(a, b, dim), spec);
            for (std::int64_t k = 0; k < dim; ++k) {
                grad_src[i * dim + k] +=
                    static_cast<T>(c_ss * w * (static_cast<double>(a[k]) - static_cast<double>(b[k])));
            }
        }
    }
    for (std::int64_t i = 0; i < n_t; ++i) {
        for (std::int64_t j = 0; j < n_t; ++j) {
            if (i == j) continue;
            const T* a = tgt + i * dim;
            const T* b = tgt + j * dim;
            const double w = detail::multikernel_weight(squared_distance(a, b, dim), spec);
            for (std::int64_t k = 0; k < dim; ++k) {
                grad_tgt[i * dim + k] +=
                    static_cast<T>(c_tt * w * (static_cast<double>(a[k]) - static_cast<double>(b[k])));
            }
        }
    }
    for (std::int64_t i = 0; i < n_s; ++i) {
        for (std::int64_t j = 0; j < n_t; ++j) {
            const T* a = src + i * dim;
            const T* b = tgt + j * dim;
            const double w = detail::multikernel_weight(squared_distance(a, b, dim), spec);
            for (std::int64_t k = 0; k < dim; ++k) {
                const double d = static_cast<double>(a[k]) - static_cast<double>(b[k]);
                grad_src[i * dim + k] -= static_cast<T>(c_st * w * d);
                grad_tgt[j * dim + k] += static_cast<T>(c_st * w * d);
            }
        }
    }
}

} // namespace losses
} // namespace tapnet
