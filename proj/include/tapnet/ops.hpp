#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tapnet/tensor.hpp"

// Differentiable 1-D tensor operations. Each op is a forward/backward pair on
// Tensor<T>; accumulation order is fixed (channel-major, then tap) so forward
// and backward passes are bit-deterministic for a given input.

namespace tapnet::ops {

inline std::int64_t conv1d_output_length(std::int64_t length, std::int64_t kernel,
                                         std::int64_t stride, std::int64_t padding) {
    return (length + 2 * padding - kernel) / stride + 1;
}

template <typename T>
Tensor<T> conv1d_forward(const Tensor<T>& x, const Tensor<T>& kernel, const std::vector<T>& bias,
                         std::int64_t stride, std::int64_t padding) {
    // kernel is laid out as (out_channels, in_channels, taps)
    if (kernel.channels != x.channels) {
        throw shape_error("conv1d: kernel expects " + std::to_string(kernel.channels) +
                          " input channels, got " + std::to_string(x.channels));
    }
    if (stride < 1) throw shape_error("conv1d: stride must be >= 1");
    const std::int64_t out_len = conv1d_output_length(x.length, kernel.length, stride, padding);
    if (out_len < 1) throw shape_error("conv1d: output length would be < 1");
    if (!bias.empty() && static_cast<std::int64_t>(bias.size()) != kernel.batch) {
        throw shape_error("conv1d: bias size mismatch");
    }

    Tensor<T> out(x.batch, kernel.batch, out_len);
    for (std::int64_t b = 0; b < x.batch; ++b) {
        for (std::int64_t co = 0; co < kernel.batch; ++co) {
            T* out_row = out.row(b, co);
            const T b0 = bias.empty() ? T(0) : bias[co];
            for (std::int64_t p = 0; p < out_len; ++p) out_row[p] = b0;
            for (std::int64_t ci = 0; ci < x.channels; ++ci) {
                const T* in_row = x.row(b, ci);
                const T* w_row = kernel.row(co, ci);
                for (std::int64_t k = 0; k < kernel.length; ++k) {
                    const T w = w_row[k];
                    const std::int64_t off = k - padding;
                    std::int64_t p_lo = 0;
                    if (off < 0) p_lo = (-off + stride - 1) / stride;
                    std::int64_t p_hi = (x.length - 1 - off) / stride;  // inclusive
                    if (p_hi > out_len - 1) p_hi = out_len - 1;
                    if (stride == 1) {
                        const T* in = in_row + off;
                        for (std::int64_t p = p_lo; p <= p_hi; ++p) out_row[p] += w * in[p];
                    } else {
                        for (std::int64_t p = p_lo; p <= p_hi; ++p) {
                            out_row[p] += w * in_row[p * stride + off];
                        }
                    }
                }
            }
        }
    }
    return out;
}

template <typename T>
void conv1d_backward(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& grad_out,
                     std::int64_t stride, std::int64_t padding, Tensor<T>& grad_x,
                     Tensor<T>& grad_kernel, std::vector<T>& grad_bias) {
    const std::int64_t out_len = grad_out.length;
    grad_x = Tensor<T>(x.batch, x.channels, x.length);
    grad_kernel = Tensor<T>(kernel.batch, kernel.channels, kernel.length);
    grad_bias.assign(static_cast<std::size_t>(kernel.batch), T(0));

    for (std::int64_t b = 0; b < x.batch; ++b) {
        for (std::int64_t co = 0; co < kernel.batch; ++co) {
            const T* go_row = grad_out.row(b, co);
            T acc_bias = T(0);
            for (std::int64_t p = 0; p < out_len; ++p) acc_bias += go_row[p];
            grad_bias[co] += acc_bias;
            for (std::int64_t ci = 0; ci < x.channels; ++ci) {
                const T* in_row = x.row(b, ci);
                T* gx_row = grad_x.row(b, ci);
                const T* w_row = kernel.row(co, ci);
                T* gw_row = grad_kernel.row(co, ci);
                for (std::int64_t k = 0; k < kernel.length; ++k) {
                    const std::int64_t off = k - padding;
                    std::int64_t p_lo = 0;
                    if (off < 0) p_lo = (-off + stride - 1) / stride;
                    std::int64_t p_hi = (x.length - 1 - off) / stride;
                    if (p_hi > out_len - 1) p_hi = out_len - 1;
                    const T w = w_row[k];
                    T acc_w = T(0);
                    if (stride == 1) {
                        const T* in = in_row + off;
                        T* gx = gx_row + off;
                        for (std::int64_t p = p_lo; p <= p_hi; ++p) {
                            acc_w += go_row[p] * in[p];
                            gx[p] += w * go_row[p];
                        }
                    } else {
                        for (std::int64_t p = p_lo; p <= p_hi; ++p) {
                            const std::int64_t i = p * stride + off;
                            acc_w += go_row[p] * in_row[i];
                            gx_row[i] += w * go_row[p];
                        }
                    }
                    gw_row[k] += acc_w;
                }
            }
        }
    }
}

enum class Phase {
    Train,   // batch statistics, running statistics updated
    Frozen,  // batch statistics, running statistics untouched (gradient checks)
    Eval,    // running statistics
};

template <typename T>
struct BatchNormCache {
    std::vector<T> inv_std;   // per channel
    Tensor<T> x_hat;
    bool used_batch_stats = false;
};

template <typename T>
Tensor<T> batch_norm_forward(const Tensor<T>& x, const std::vector<T>& scale,
                             const std::vector<T>& shift, std::vector<T>& running_mean,
                             std::vector<T>& running_var, Phase phase, T momentum, T epsilon,
                             BatchNormCache<T>* cache) {
    const std::int64_t C = x.channels;
    if (static_cast<std::int64_t>(scale.size()) != C ||
        static_cast<std::int64_t>(shift.size()) != C) {
        throw shape_error("batch_norm: scale/shift must match channel count");
    }
    Tensor<T> out(x.batch, C, x.length);
    const std::int64_t n = x.batch * x.length;

    if (phase == Phase::Eval) {
        for (std::int64_t c = 0; c < C; ++c) {
            const T inv = T(1) / std::sqrt(running_var[c] + epsilon);
            const T g = scale[c] * inv;
            const T b0 = shift[c] - scale[c] * running_mean[c] * inv;
            for (std::int64_t b = 0; b < x.batch; ++b) {
                const T* in_row = x.row(b, c);
                T* out_row = out.row(b, c);
                for (std::int64_t l = 0; l < x.length; ++l) out_row[l] = g * in_row[l] + b0;
            }
        }
        if (cache) cache->used_batch_stats = false;
        return out;
    }

    if (cache) {
        cache->inv_std.assign(static_cast<std::size_t>(C), T(0));
        cache->x_hat = Tensor<T>(x.batch, C, x.length);
        cache->used_batch_stats = true;
    }
    for (std::int64_t c = 0; c < C; ++c) {
        T sum = T(0);
        for (std::int64_t b = 0; b < x.batch; ++b) {
            const T* in_row = x.row(b, c);
            for (std::int64_t l = 0; l < x.length; ++l) sum += in_row[l];
        }
        const T mean = sum / static_cast<T>(n);
        T var_sum = T(0);
        for (std::int64_t b = 0; b < x.batch; ++b) {
            const T* in_row = x.row(b, c);
            for (std::int64_t l = 0; l < x.length; ++l) {
                const T d = in_row[l] - mean;
                var_sum += d * d;
            }
        }
        const T var = var_sum / static_cast<T>(n);  // biased, matches running update
        const T inv = T(1) / std::sqrt(var + epsilon);
        if (cache) cache->inv_std[c] = inv;
        for (std::int64_t b = 0; b < x.batch; ++b) {
            const T* in_row = x.row(b, c);
            T* out_row = out.row(b, c);
            T* xh_row = cache ? cache->x_hat.row(b, c) : nullptr;
            for (std::int64_t l = 0; l < x.length; ++l) {
                const T xh = (in_row[l] - mean) * inv;
                if (xh_row) xh_row[l] = xh;
                out_row[l] = scale[c] * xh + shift[c];
            }
        }
        if (phase == Phase::Train) {
            running_mean[c] = (T(1) - momentum) * running_mean[c] + momentum * mean;
            running_var[c] = (T(1) - momentum) * running_var[c] + momentum * var;
        }
    }
    return out;
}

template <typename T>
Tensor<T> batch_norm_backward(const Tensor<T>& grad_out, const std::vector<T>& scale,
                              const std::vector<T>& running_var, T epsilon,
                              const BatchNormCache<T>& cache, std::vector<T>& grad_scale,
                              std::vector<T>& grad_shift) {
    const std::int64_t C = grad_out.channels;
    Tensor<T> grad_x(grad_out.batch, C, grad_out.length);
    grad_scale.assign(static_cast<std::size_t>(C), T(0));
    grad_shift.assign(static_cast<std::size_t>(C), T(0));

    if (!cache.used_batch_stats) {
        // Statistics were constants (eval); gradient misses the dscale/dshift
        // path only through x_hat, which still depends on running stats.
        for (std::int64_t c = 0; c < C; ++c) {
            const T g = scale[c] / std::sqrt(running_var[c] + epsilon);
            for (std::int64_t b = 0; b < grad_out.batch; ++b) {
                const T* go = grad_out.row(b, c);
                T* gx = grad_x.row(b, c);
                for (std::int64_t l = 0; l < grad_out.length; ++l) gx[l] = g * go[l];
            }
        }
        return grad_x;
    }

    const std::int64_t n = grad_out.batch * grad_out.length;
    for (std::int64_t c = 0; c < C; ++c) {
        T sum_dy = T(0);
        T sum_dy_xh = T(0);
        for (std::int64_t b = 0; b < grad_out.batch; ++b) {
            const T* go = grad_out.row(b, c);
            const T* xh = cache.x_hat.row(b, c);
            for (std::int64_t l = 0; l < grad_out.length; ++l) {
                sum_dy += go[l];
                sum_dy_xh += go[l] * xh[l];
            }
        }
        grad_shift[c] = sum_dy;
        grad_scale[c] = sum_dy_xh;
        const T k = scale[c] * cache.inv_std[c] / static_cast<T>(n);
        for (std::int64_t b = 0; b < grad_out.batch; ++b) {
            const T* go = grad_out.row(b, c);
            const T* xh = cache.x_hat.row(b, c);
            T* gx = grad_x.row(b, c);
            for (std::int64_t l = 0; l < grad_out.length; ++l) {
                gx[l] = k * (static_cast<T>(n) * go[l] - sum_dy - xh[l] * sum_dy_xh);
            }
        }
    }
    return grad_x;
}

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& x) {
    Tensor<T> out(x.batch, x.channels, x.length);
    for (std::int64_t i = 0; i < x.size(); ++i) {
        out.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
    }
    return out;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& x, const Tensor<T>& grad_out) {
    if (!x.same_shape(grad_out)) throw shape_error("relu backward: shape mismatch");
    Tensor<T> grad_x(x.batch, x.channels, x.length);
    for (std::int64_t i = 0; i < x.size(); ++i) {
        grad_x.data[i] = x.data[i] > T(0) ? grad_out.data[i] : T(0);
    }
    return grad_x;
}

template <typename T>
Tensor<T> max_pool1d_forward(const Tensor<T>& x, std::int64_t window, std::int64_t stride,
                             std::vector<std::int64_t>* argmax) {
    if (window < 1 || stride < 1) throw shape_error("max_pool1d: window/stride must be >= 1");
    if (window > x.length) throw shape_error("max_pool1d: window exceeds input length");
    const std::int64_t out_len = (x.length - window) / stride + 1;
    Tensor<T> out(x.batch, x.channels, out_len);
    if (argmax) argmax->assign(static_cast<std::size_t>(out.size()), 0);
    std::int64_t flat = 0;
    for (std::int64_t b = 0; b < x.batch; ++b) {
        for (std::int64_t c = 0; c < x.channels; ++c) {
            const T* in_row = x.row(b, c);
            T* out_row = out.row(b, c);
            for (std::int64_t p = 0; p < out_len; ++p, ++flat) {
                const std::int64_t base = p * stride;
                T best = in_row[base];
                std::int64_t best_i = base;
                for (std::int64_t w = 1; w < window; ++w) {
                    // first maximum wins ties so gradient routing is stable
                    if (in_row[base + w] > best) {
                        best = in_row[base + w];
                        best_i = base + w;
                    }
                }
                out_row[p] = best;
                if (argmax) (*argmax)[flat] = best_i;
            }
        }
    }
    return out;
}

template <typename T>
Tensor<T> max_pool1d_backward(const Tensor<T>& x, const Tensor<T>& grad_out,
                              const std::vector<std::int64_t>& argmax) {
    Tensor<T> grad_x(x.batch, x.channels, x.length);
    std::int64_t flat = 0;
    for (std::int64_t b = 0; b < x.batch; ++b) {
        for (std::int64_t c = 0; c < x.channels; ++c) {
            T* gx_row = grad_x.row(b, c);
            const T* go_row = grad_out.row(b, c);
            for (std::int64_t p = 0; p < grad_out.length; ++p, ++flat) {
                gx_row[argmax[flat]] += go_row[p];
            }
        }
    }
    return grad_x;
}

template <typename T>
Tensor<T> global_avg_pool_forward(const Tensor<T>& x) {
    Tensor<T> out(x.batch, x.channels, 1);
    for (std::int64_t b = 0; b < x.batch; ++b) {
        for (std::int64_t c = 0; c < x.channels; ++c) {
            const T* in_row = x.row(b, c);
            T sum = T(0);
            for (std::int64_t l = 0; l < x.length; ++l) sum += in_row[l];
            out.at(b, c, 0) = sum / static_cast<T>(x.length);
        }
    }
    return out;
}

template <typename T>
Tensor<T> global_avg_pool_backward(std::int64_t input_length, const Tensor<T>& grad_out) {
    Tensor<T> grad_x(grad_out.batch, grad_out.channels, input_length);
    for (std::int64_t b = 0; b < grad_out.batch; ++b) {
        for (std::int64_t c = 0; c < grad_out.channels; ++c) {
            const T g = grad_out.at(b, c, 0) / static_cast<T>(input_length);
            T* gx_row = grad_x.row(b, c);
            for (std::int64_t l = 0; l < input_length; ++l) gx_row[l] = g;
        }
    }
    return grad_x;
}

template <typename T>
Tensor<T> concat_channels(const std::vector<const Tensor<T>*>& xs) {
    if (xs.empty()) throw shape_error("concat_channels: empty input list");
    std::int64_t channels = 0;
    for (const Tensor<T>* x : xs) {
        if (x->batch != xs[0]->batch || x->length != xs[0]->length) {
            throw shape_error("concat_channels: batch/length mismatch");
        }
        channels += x->channels;
    }
    Tensor<T> out(xs[0]->batch, channels, xs[0]->length);
    for (std::int64_t b = 0; b < out.batch; ++b) {
        std::int64_t c_off = 0;
        for (const Tensor<T>* x : xs) {
            for (std::int64_t c = 0; c < x->channels; ++c) {
                const T* in_row = x->row(b, c);
                T* out_row = out.row(b, c_off + c);
                std::copy(in_row, in_row + out.length, out_row);
            }
            c_off += x->channels;
        }
    }
    return out;
}

// Slice of the channel axis: channels [c_begin, c_begin + count).
template <typename T>
Tensor<T> slice_channels(const Tensor<T>& x, std::int64_t c_begin, std::int64_t count) {
    if (c_begin < 0 || c_begin + count > x.channels) {
        throw shape_error("slice_channels: range out of bounds");
    }
    Tensor<T> out(x.batch, count, x.length);
    for (std::int64_t b = 0; b < x.batch; ++b) {
        for (std::int64_t c = 0; c < count; ++c) {
            const T* in_row = x.row(b, c_begin + c);
            std::copy(in_row, in_row + x.length, out.row(b, c));
        }
    }
    return out;
}

template <typename T>
Tensor<T> add(const Tensor<T>& x, const Tensor<T>& y) {
    if (!x.same_shape(y)) {
        throw shape_error("add: shape mismatch " + x.shape_str() + " vs " + y.shape_str());
    }
    Tensor<T> out(x.batch, x.channels, x.length);
    for (std::int64_t i = 0; i < x.size(); ++i) out.data[i] = x.data[i] + y.data[i];
    return out;
}

template <typename T>
Tensor<T> zero_pad_channels(const Tensor<T>& x, std::int64_t target_channels) {
    if (target_channels < x.channels) {
        throw shape_error("zero_pad_channels: target below current channel count");
    }
    Tensor<T> out(x.batch, target_channels, x.length);
    for (std::int64_t b = 0; b < x.batch; ++b) {
        for (std::int64_t c = 0; c < x.channels; ++c) {
            const T* in_row = x.row(b, c);
            std::copy(in_row, in_row + x.length, out.row(b, c));
        }
    }
    return out;
}

// Every `stride`-th sample, out_len entries; the parameter-free length match
// for residual shortcuts across pooling.
template <typename T>
Tensor<T> subsample_length_forward(const Tensor<T>& x, std::int64_t stride, std::int64_t out_len) {
    if ((out_len - 1) * stride >= x.length) throw shape_error("subsample: target too long");
    Tensor<T> out(x.batch, x.channels, out_len);
    for (std::int64_t b = 0; b < x.batch; ++b) {
        for (std::int64_t c = 0; c < x.channels; ++c) {
            const T* in_row = x.row(b, c);
            T* out_row = out.row(b, c);
            for (std::int64_t p = 0; p < out_len; ++p) out_row[p] = in_row[p * stride];
        }
    }
    return out;
}

template <typename T>
Tensor<T> subsample_length_backward(std::int64_t input_length, std::int64_t stride,
                                    const Tensor<T>& grad_out) {
    Tensor<T> grad_x(grad_out.batch, grad_out.channels, input_length);
    for (std::int64_t b = 0; b < grad_out.batch; ++b) {
        for (std::int64_t c = 0; c < grad_out.channels; ++c) {
            const T* go_row = grad_out.row(b, c);
            T* gx_row = grad_x.row(b, c);
            for (std::int64_t p = 0; p < grad_out.length; ++p) gx_row[p * stride] = go_row[p];
        }
    }
    return grad_x;
}

// Softmax over the channel axis, per (batch, position).
template <typename T>
Tensor<T> softmax_forward(const Tensor<T>& x) {
    Tensor<T> out(x.batch, x.channels, x.length);
    for (std::int64_t b = 0; b < x.batch; ++b) {
        for (std::int64_t l = 0; l < x.length; ++l) {
            T m = x.at(b, 0, l);
            for (std::int64_t c = 1; c < x.channels; ++c) m = std::max(m, x.at(b, c, l));
            T denom = T(0);
            for (std::int64_t c = 0; c < x.channels; ++c) {
                const T e = std::exp(x.at(b, c, l) - m);
                out.at(b, c, l) = e;
                denom += e;
            }
            for (std::int64_t c = 0; c < x.channels; ++c) out.at(b, c, l) /= denom;
        }
    }
    return out;
}

template <typename T>
Tensor<T> softmax_backward(const Tensor<T>& probs, const Tensor<T>& grad_out) {
    if (!probs.same_shape(grad_out)) throw shape_error("softmax backward: shape mismatch");
    Tensor<T> grad_x(probs.batch, probs.channels, probs.length);
    for (std::int64_t b = 0; b < probs.batch; ++b) {
        for (std::int64_t l = 0; l < probs.length; ++l) {
            T dot = T(0);
            for (std::int64_t c = 0; c < probs.channels; ++c) {
                dot += grad_out.at(b, c, l) * probs.at(b, c, l);
            }
            for (std::int64_t c = 0; c < probs.channels; ++c) {
                grad_x.at(b, c, l) = probs.at(b, c, l) * (grad_out.at(b, c, l) - dot);
            }
        }
    }
    return grad_x;
}

} // namespace tapnet::ops
