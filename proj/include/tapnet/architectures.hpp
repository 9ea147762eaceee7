#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tapnet/model.hpp"
#include "tapnet/signal.hpp"

namespace tapnet {

enum class Family { Plain, Residual, Dense };

const char* to_string(Family f);
Family family_from_string(const std::string& name);

// One stacked stage of the plain/residual families.
struct BlockSpec {
    std::int64_t kernel = 3;
    std::int64_t channels = 16;
    std::int64_t pool = 0;  // 0 or 1 = no pooling
};

struct DenseSpec {
    std::int64_t blocks = 4;
    std::int64_t layers_per_block = 9;
    std::int64_t growth = 6;           // k
    double reduction = 0.5;            // gamma
    std::int64_t kernel = 3;
    std::vector<std::int64_t> transition_pools;  // blocks - 1 entries
};

struct StemSpec {
    std::int64_t kernel = 32;
    std::int64_t stride = 4;
    std::int64_t channels = 16;
    std::int64_t pool = 4;
};

struct ArchitectureSpec {
    Family family = Family::Plain;
    std::int64_t num_classes = kNumClasses;
    std::int64_t input_length = kSignalLength;
    StemSpec stem;
    std::vector<BlockSpec> blocks;  // plain / residual
    DenseSpec dense;                // dense

    void validate() const;

    std::string to_json() const;
    static ArchitectureSpec from_json(const std::string& text);
    static ArchitectureSpec load(const std::string& path);
    void save(const std::string& path) const;
};

ArchitectureSpec default_plain_spec();
ArchitectureSpec default_residual_spec();
ArchitectureSpec default_dense_spec();

// Exact number of learnable scalars (running statistics excluded).
template <typename T>
std::int64_t count_parameters(const Model<T>& model) {
    return model.weights.learnable_count();
}

namespace detail {

template <typename T>
void build_stem(Model<T>& model, const ArchitectureSpec& spec, Rng& init, std::int64_t& length) {
    const StemSpec& stem = spec.stem;
    auto conv = std::make_unique<ConvLayer<T>>(model.weights, "stem", 1, stem.channels,
                                               stem.kernel, stem.stride, 0, init);
    length = conv->output_length(length);
    if (length < 1) throw shape_error("stem reduces length below 1");
    model.add_node("stem", std::move(conv));
    if (stem.pool > 1) {
        if (length < stem.pool) throw shape_error("stem pool exceeds remaining length");
        length = (length - stem.pool) / stem.pool + 1;
        model.add_node("stem_pool", std::make_unique<MaxPoolLayer<T>>(stem.pool, stem.pool));
    }
}

template <typename T>
void build_head(Model<T>& model, const ArchitectureSpec& spec, std::int64_t channels, Rng& init) {
    model.add_node("final", std::make_unique<BnReluLayer<T>>(model.weights, "final", channels));
    model.add_node("gap", std::make_unique<GlobalAvgPoolLayer<T>>());
    model.add_node("head", std::make_unique<ConvLayer<T>>(model.weights, "head", channels,
                                                          spec.num_classes, 1, 1, 0, init));
}

} // namespace detail

template <typename T>
Model<T> build_plain(const ArchitectureSpec& spec, std::uint64_t seed) {
    if (spec.family != Family::Plain) throw spec_error("build_plain requires family=plain");
    spec.validate();
    Model<T> model;
    Rng init(mix_seed(seed, 0x696e6974ULL));
    std::int64_t length = spec.input_length;
    detail::build_stem(model, spec, init, length);
    std::int64_t channels = spec.stem.channels;
    for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
        const BlockSpec& blk = spec.blocks[i];
        const std::string name = "block" + std::to_string(i + 1);
        model.add_node(name, std::make_unique<ConvBlock<T>>(model.weights, name, channels,
                                                            blk.channels, blk.kernel, init));
        channels = blk.channels;
        if (blk.pool > 1) {
            if (length < blk.pool) throw shape_error(name + ": pool exceeds remaining length");
            length = (length - blk.pool) / blk.pool + 1;
            model.add_node("pool" + std::to_string(i + 1),
                           std::make_unique<MaxPoolLayer<T>>(blk.pool, blk.pool));
        }
    }
    detail::build_head(model, spec, channels, init);
    return model;
}

template <typename T>
Model<T> build_residual(const ArchitectureSpec& spec, std::uint64_t seed,
                        bool shortcuts_enabled = true) {
    if (spec.family != Family::Residual) {
        throw spec_error("build_residual requires family=residual");
    }
    spec.validate();
    Model<T> model;
    Rng init(mix_seed(seed, 0x696e6974ULL));
    std::int64_t length = spec.input_length;
    detail::build_stem(model, spec, init, length);
    std::int64_t channels = spec.stem.channels;
    for (std::size_t i = 0; i + 1 < spec.blocks.size(); i += 2) {
        const BlockSpec& a = spec.blocks[i];
        const BlockSpec& b = spec.blocks[i + 1];
        if (a.kernel != b.kernel) throw spec_error("residual pair must share kernel size");
        const std::string name_a = "block" + std::to_string(i + 1);
        const std::string name_b = "block" + std::to_string(i + 2);
        model.add_node("pair" + std::to_string(i / 2 + 1),
                       std::make_unique<ResidualPairLayer<T>>(
                           model.weights, name_a, name_b, channels, a.channels, b.channels,
                           a.kernel, a.pool, b.pool, init, shortcuts_enabled));
        channels = b.channels;
        const std::int64_t factor = (a.pool > 1 ? a.pool : 1) * (b.pool > 1 ? b.pool : 1);
        if (factor > 1) {
            if (length % factor != 0) {
                throw spec_error("residual pair pooling requires length divisible by " +
                                 std::to_string(factor) + ", got " + std::to_string(length));
            }
            length /= factor;
        }
    }
    detail::build_head(model, spec, channels, init);
    return model;
}

template <typename T>
Model<T> build_dense(const ArchitectureSpec& spec, std::uint64_t seed) {
    if (spec.family != Family::Dense) throw spec_error("build_dense requires family=dense");
    spec.validate();
    Model<T> model;
    Rng init(mix_seed(seed, 0x696e6974ULL));
    std::int64_t length = spec.input_length;
    detail::build_stem(model, spec, init, length);
    std::int64_t channels = spec.stem.channels;
    const DenseSpec& d = spec.dense;
    for (std::int64_t i = 0; i < d.blocks; ++i) {
        const std::string name = "dense" + std::to_string(i + 1);
        auto block = std::make_unique<DenseBlockLayer<T>>(model.weights, name, channels,
                                                          d.layers_per_block, d.growth, d.kernel,
                                                          init);
        channels = block->out_channels();
        model.add_node(name, std::move(block));
        if (i + 1 < d.blocks) {
            const std::int64_t compressed =
                static_cast<std::int64_t>(std::ceil(d.reduction * static_cast<double>(channels)));
            if (compressed < 1) throw spec_error("transition would compress below one channel");
            const std::int64_t pool =
                (static_cast<std::size_t>(i) < d.transition_pools.size()) ? d.transition_pools[i]
                                                                          : 2;
            if (pool > 1) {
                if (length < pool) throw shape_error("transition pool exceeds remaining length");
                length = (length - pool) / pool + 1;
            }
            const std::string tname = "trans" + std::to_string(i + 1);
            model.add_node(tname, std::make_unique<TransitionLayer<T>>(model.weights, tname,
                                                                       channels, compressed, pool,
                                                                       init));
            channels = compressed;
        }
    }
    detail::build_head(model, spec, channels, init);
    return model;
}

template <typename T>
Model<T> build_model(const ArchitectureSpec& spec, std::uint64_t seed) {
    switch (spec.family) {
        case Family::Plain: return build_plain<T>(spec, seed);
        case Family::Residual: return build_residual<T>(spec, seed);
        case Family::Dense: return build_dense<T>(spec, seed);
    }
    throw spec_error("unknown architecture family");
}

} // namespace tapnet
