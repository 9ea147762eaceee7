#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tapnet/ops.hpp"
#include "tapnet/rng.hpp"
#include "tapnet/weights.hpp"

namespace tapnet {

using ops::Phase;

// Per-forward context. bn_split > 0 normalizes batch rows [0, split) and
// [split, batch) with separate statistics (experimental per-domain batch norm
// for transfer training); 0 means one mixed batch.
struct ForwardCtx {
    Phase phase = Phase::Eval;
    std::int64_t bn_split = 0;
};

constexpr float kBatchNormEpsilon = 1e-5f;
constexpr float kBatchNormMomentum = 0.1f;

namespace detail {
template <typename T>
Tensor<T> batch_slice(const Tensor<T>& x, std::int64_t b0, std::int64_t count) {
    Tensor<T> out(count, x.channels, x.length);
    const std::size_t row = static_cast<std::size_t>(x.channels * x.length);
    std::copy(x.data.begin() + b0 * row, x.data.begin() + (b0 + count) * row, out.data.begin());
    return out;
}

template <typename T>
Tensor<T> batch_concat(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.channels != b.channels || a.length != b.length) {
        throw shape_error("batch_concat: shape mismatch");
    }
    Tensor<T> out(a.batch + b.batch, a.channels, a.length);
    std::copy(a.data.begin(), a.data.end(), out.data.begin());
    std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
    return out;
}
} // namespace detail

template <typename T>
class Layer {
public:
    virtual ~Layer() = default;
    virtual Tensor<T> forward(const Tensor<T>& x, const ForwardCtx& ctx) = 0;
    virtual Tensor<T> backward(const Tensor<T>& grad_out) = 0;
};

template <typename T>
class ConvLayer : public Layer<T> {
public:
    ConvLayer(ModelWeights<T>& weights, const std::string& prefix, std::int64_t in_channels,
              std::int64_t out_channels, std::int64_t kernel, std::int64_t stride,
              std::int64_t padding, Rng& init)
        : stride_(stride), padding_(padding), in_channels_(in_channels) {
        w_ = weights.add(prefix + ".w", {out_channels, in_channels, kernel}, true);
        b_ = weights.add(prefix + ".b", {out_channels}, true);
        const double std_dev = std::sqrt(2.0 / static_cast<double>(in_channels * kernel));
        for (T& v : w_->value) v = static_cast<T>(init.gaussian() * std_dev);
    }

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override {
        input_ = x;
        return ops::conv1d_forward(x, kernel_view(), b_->value, stride_, padding_);
    }

    Tensor<T> backward(const Tensor<T>& grad_out) override {
        Tensor<T> grad_x, grad_w;
        std::vector<T> grad_b;
        ops::conv1d_backward(input_, kernel_view(), grad_out, stride_, padding_, grad_x, grad_w,
                             grad_b);
        for (std::size_t i = 0; i < w_->grad.size(); ++i) w_->grad[i] += grad_w.data[i];
        for (std::size_t i = 0; i < b_->grad.size(); ++i) b_->grad[i] += grad_b[i];
        return grad_x;
    }

    std::int64_t output_length(std::int64_t in_len) const {
        return ops::conv1d_output_length(in_len, w_->shape[2], stride_, padding_);
    }
    std::int64_t out_channels() const { return w_->shape[0]; }

private:
    Tensor<T> kernel_view() const {
        Tensor<T> k;
        k.batch = w_->shape[0];
        k.channels = w_->shape[1];
        k.length = w_->shape[2];
        k.data = w_->value;
        return k;
    }

    Parameter<T>* w_;
    Parameter<T>* b_;
    std::int64_t stride_;
    std::int64_t padding_;
    std::int64_t in_channels_;
    Tensor<T> input_;
};

template <typename T>
class BatchNormLayer : public Layer<T> {
public:
    BatchNormLayer(ModelWeights<T>& weights, const std::string& prefix, std::int64_t channels) {
        scale_ = weights.add(prefix + ".scale", {channels}, true);
        shift_ = weights.add(prefix + ".shift", {channels}, true);
        mean_ = weights.add(prefix + ".running_mean", {channels}, false);
        var_ = weights.add(prefix + ".running_var", {channels}, false);
        scale_->value.assign(scale_->value.size(), T(1));
        var_->value.assign(var_->value.size(), T(1));
    }

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx& ctx) override {
        split_ = (ctx.phase != Phase::Eval) ? ctx.bn_split : 0;
        if (split_ <= 0 || split_ >= x.batch) {
            split_ = 0;
            return ops::batch_norm_forward(x, scale_->value, shift_->value, mean_->value,
                                           var_->value, ctx.phase, T(kBatchNormMomentum),
                                           T(kBatchNormEpsilon), &cache_);
        }
        // Per-domain statistics: normalize the two batch segments independently.
        // Running statistics see each segment update in turn.
        Tensor<T> head = detail::batch_slice(x, 0, split_);
        Tensor<T> tail = detail::batch_slice(x, split_, x.batch - split_);
        Tensor<T> out_head =
            ops::batch_norm_forward(head, scale_->value, shift_->value, mean_->value, var_->value,
                                    ctx.phase, T(kBatchNormMomentum) / T(2), T(kBatchNormEpsilon),
                                    &cache_);
        Tensor<T> out_tail =
            ops::batch_norm_forward(tail, scale_->value, shift_->value, mean_->value, var_->value,
                                    ctx.phase, T(kBatchNormMomentum) / T(2), T(kBatchNormEpsilon),
                                    &cache_tail_);
        return detail::batch_concat(out_head, out_tail);
    }

    Tensor<T> backward(const Tensor<T>& grad_out) override {
        std::vector<T> gs, gh;
        if (split_ == 0) {
            Tensor<T> gx = ops::batch_norm_backward(grad_out, scale_->value, var_->value,
                                                    T(kBatchNormEpsilon), cache_, gs, gh);
            accumulate(gs, gh);
            return gx;
        }
        Tensor<T> go_head = detail::batch_slice(grad_out, 0, split_);
        Tensor<T> go_tail = detail::batch_slice(grad_out, split_, grad_out.batch - split_);
        Tensor<T> gx_head = ops::batch_norm_backward(go_head, scale_->value, var_->value,
                                                     T(kBatchNormEpsilon), cache_, gs, gh);
        accumulate(gs, gh);
        Tensor<T> gx_tail = ops::batch_norm_backward(go_tail, scale_->value, var_->value,
                                                     T(kBatchNormEpsilon), cache_tail_, gs, gh);
        accumulate(gs, gh);
        return detail::batch_concat(gx_head, gx_tail);
    }

private:
    void accumulate(const std::vector<T>& gs, const std::vector<T>& gh) {
        for (std::size_t i = 0; i < gs.size(); ++i) {
            scale_->grad[i] += gs[i];
            shift_->grad[i] += gh[i];
        }
    }

    Parameter<T>* scale_;
    Parameter<T>* shift_;
    Parameter<T>* mean_;
    Parameter<T>* var_;
    ops::BatchNormCache<T> cache_;
    ops::BatchNormCache<T> cache_tail_;
    std::int64_t split_ = 0;
};

template <typename T>
class ReluLayer : public Layer<T> {
public:
    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override {
        input_ = x;
        return ops::relu_forward(x);
    }
    Tensor<T> backward(const Tensor<T>& grad_out) override {
        return ops::relu_backward(input_, grad_out);
    }

private:
    Tensor<T> input_;
};

// The repeating unit of every family: BN -> ReLU -> Conv (same-padded unless
// a stride is given).
template <typename T>
class ConvBlock : public Layer<T> {
public:
    ConvBlock(ModelWeights<T>& weights, const std::string& prefix, std::int64_t in_channels,
              std::int64_t out_channels, std::int64_t kernel, Rng& init)
        : bn_(weights, prefix + ".bn", in_channels),
          conv_(weights, prefix + ".conv", in_channels, out_channels, kernel, 1, (kernel - 1) / 2,
                init) {}

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx& ctx) override {
        return conv_.forward(relu_.forward(bn_.forward(x, ctx), ctx), ctx);
    }

    Tensor<T> backward(const Tensor<T>& grad_out) override {
        return bn_.backward(relu_.backward(conv_.backward(grad_out)));
    }

    std::int64_t out_channels() const { return conv_.out_channels(); }

private:
    BatchNormLayer<T> bn_;
    ReluLayer<T> relu_;
    ConvLayer<T> conv_;
};

template <typename T>
class MaxPoolLayer : public Layer<T> {
public:
    MaxPoolLayer(std::int64_t window, std::int64_t stride) : window_(window), stride_(stride) {}

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override {
        input_ = x;
        return ops::max_pool1d_forward(x, window_, stride_, &argmax_);
    }
    Tensor<T> backward(const Tensor<T>& grad_out) override {
        return ops::max_pool1d_backward(input_, grad_out, argmax_);
    }

private:
    std::int64_t window_;
    std::int64_t stride_;
    Tensor<T> input_;
    std::vector<std::int64_t> argmax_;
};

template <typename T>
class GlobalAvgPoolLayer : public Layer<T> {
public:
    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx&) override {
        input_length_ = x.length;
        return ops::global_avg_pool_forward(x);
    }
    Tensor<T> backward(const Tensor<T>& grad_out) override {
        return ops::global_avg_pool_backward(input_length_, grad_out);
    }

private:
    std::int64_t input_length_ = 0;
};

// BN -> ReLU before global average pooling.
template <typename T>
class BnReluLayer : public Layer<T> {
public:
    BnReluLayer(ModelWeights<T>& weights, const std::string& prefix, std::int64_t channels)
        : bn_(weights, prefix + ".bn", channels) {}

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx& ctx) override {
        return relu_.forward(bn_.forward(x, ctx), ctx);
    }
    Tensor<T> backward(const Tensor<T>& grad_out) override {
        return bn_.backward(relu_.backward(grad_out));
    }

private:
    BatchNormLayer<T> bn_;
    ReluLayer<T> relu_;
};

// Two conv blocks with an identity shortcut across them. The shortcut is
// parameter-free: channel zero-padding plus strided subsampling whenever the
// main path pools. Disabling the shortcut reproduces the plain chain exactly.
template <typename T>
class ResidualPairLayer : public Layer<T> {
public:
    ResidualPairLayer(ModelWeights<T>& weights, const std::string& first_prefix,
                      const std::string& second_prefix, std::int64_t in_channels,
                      std::int64_t mid_channels, std::int64_t out_channels, std::int64_t kernel,
                      std::int64_t pool_a, std::int64_t pool_b, Rng& init, bool shortcut_enabled)
        : block_a_(weights, first_prefix, in_channels, mid_channels, kernel, init),
          block_b_(weights, second_prefix, mid_channels, out_channels, kernel, init),
          shortcut_enabled_(shortcut_enabled) {
        if (pool_a > 1) pool_a_ = std::make_unique<MaxPoolLayer<T>>(pool_a, pool_a);
        if (pool_b > 1) pool_b_ = std::make_unique<MaxPoolLayer<T>>(pool_b, pool_b);
        sub_stride_ = (pool_a > 1 ? pool_a : 1) * (pool_b > 1 ? pool_b : 1);
    }

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx& ctx) override {
        in_channels_ = x.channels;
        in_length_ = x.length;
        Tensor<T> h = block_a_.forward(x, ctx);
        if (pool_a_) h = pool_a_->forward(h, ctx);
        Tensor<T> y = block_b_.forward(h, ctx);
        if (pool_b_) y = pool_b_->forward(y, ctx);
        if (!shortcut_enabled_) return y;
        Tensor<T> sc = ops::subsample_length_forward(x, sub_stride_, y.length);
        sc = ops::zero_pad_channels(sc, y.channels);
        return ops::add(y, sc);
    }

    Tensor<T> backward(const Tensor<T>& grad_out) override {
        Tensor<T> g = grad_out;
        if (pool_b_) g = pool_b_->backward(g);
        g = block_b_.backward(g);
        if (pool_a_) g = pool_a_->backward(g);
        Tensor<T> grad_x = block_a_.backward(g);
        if (shortcut_enabled_) {
            Tensor<T> gsc = ops::slice_channels(grad_out, 0, in_channels_);
            gsc = ops::subsample_length_backward(in_length_, sub_stride_, gsc);
            grad_x = ops::add(grad_x, gsc);
        }
        return grad_x;
    }

private:
    ConvBlock<T> block_a_;
    ConvBlock<T> block_b_;
    std::unique_ptr<MaxPoolLayer<T>> pool_a_;
    std::unique_ptr<MaxPoolLayer<T>> pool_b_;
    std::int64_t sub_stride_ = 1;
    bool shortcut_enabled_ = true;
    std::int64_t in_channels_ = 0;
    std::int64_t in_length_ = 0;
};

// Dense block: layer j consumes the concatenation of the block input and all
// previous layer outputs, and emits `growth` channels.
template <typename T>
class DenseBlockLayer : public Layer<T> {
public:
    DenseBlockLayer(ModelWeights<T>& weights, const std::string& prefix, std::int64_t in_channels,
                    std::int64_t num_layers, std::int64_t growth, std::int64_t kernel, Rng& init) {
        std::int64_t width = in_channels;
        for (std::int64_t j = 0; j < num_layers; ++j) {
            layers_.push_back(std::make_unique<ConvBlock<T>>(
                weights, prefix + ".l" + std::to_string(j + 1), width, growth, kernel, init));
            widths_.push_back(width);
            width += growth;
        }
        out_channels_ = width;
        growth_ = growth;
    }

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx& ctx) override {
        Tensor<T> acc = x;
        for (auto& layer : layers_) {
            Tensor<T> y = layer->forward(acc, ctx);
            acc = ops::concat_channels<T>({&acc, &y});
        }
        return acc;
    }

    Tensor<T> backward(const Tensor<T>& grad_out) override {
        Tensor<T> g = grad_out;
        for (std::size_t j = layers_.size(); j-- > 0;) {
            Tensor<T> g_y = ops::slice_channels(g, widths_[j], growth_);
            Tensor<T> g_prev = ops::slice_channels(g, 0, widths_[j]);
            g = ops::add(g_prev, layers_[j]->backward(g_y));
        }
        return g;
    }

    std::int64_t out_channels() const { return out_channels_; }

private:
    std::vector<std::unique_ptr<ConvBlock<T>>> layers_;
    std::vector<std::int64_t> widths_;
    std::int64_t growth_ = 0;
    std::int64_t out_channels_ = 0;
};

// Dense-family transition: BN -> ReLU -> 1x1 conv to ceil(reduction * width),
// then pooling.
template <typename T>
class TransitionLayer : public Layer<T> {
public:
    TransitionLayer(ModelWeights<T>& weights, const std::string& prefix, std::int64_t in_channels,
                    std::int64_t out_channels, std::int64_t pool, Rng& init)
        : bn_(weights, prefix + ".bn", in_channels),
          conv_(weights, prefix + ".conv", in_channels, out_channels, 1, 1, 0, init) {
        if (pool > 1) pool_ = std::make_unique<MaxPoolLayer<T>>(pool, pool);
    }

    Tensor<T> forward(const Tensor<T>& x, const ForwardCtx& ctx) override {
        Tensor<T> y = conv_.forward(relu_.forward(bn_.forward(x, ctx), ctx), ctx);
        if (pool_) y = pool_->forward(y, ctx);
        return y;
    }

    Tensor<T> backward(const Tensor<T>& grad_out) override {
        Tensor<T> g = grad_out;
        if (pool_) g = pool_->backward(g);
        return bn_.backward(relu_.backward(conv_.backward(g)));
    }

private:
    BatchNormLayer<T> bn_;
    ReluLayer<T> relu_;
    ConvLayer<T> conv_;
    std::unique_ptr<MaxPoolLayer<T>> pool_;
};

} // namespace tapnet
