#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tapnet/common.hpp"

namespace tapnet {

// Dense (batch, channels, length) tensor, contiguous row-major:
// index = (b * channels + c) * length + l. Scalar type is float for training
// and double for the finite-difference oracles.
template <typename T>
struct Tensor {
    std::int64_t batch = 0;
    std::int64_t channels = 0;
    std::int64_t length = 0;
    std::vector<T> data;

    Tensor() = default;
    Tensor(std::int64_t b, std::int64_t c, std::int64_t l, T fill = T(0))
        : batch(b), channels(c), length(l),
          data(static_cast<std::size_t>(b * c * l), fill) {
        if (b < 0 || c < 0 || l < 0) throw shape_error("negative tensor extent");
    }

    std::int64_t size() const { return batch * channels * length; }

    T& at(std::int64_t b, std::int64_t c, std::int64_t l) {
        return data[static_cast<std::size_t>((b * channels + c) * length + l)];
    }
    T at(std::int64_t b, std::int64_t c, std::int64_t l) const {
        return data[static_cast<std::size_t>((b * channels + c) * length + l)];
    }

    T* row(std::int64_t b, std::int64_t c) {
        return data.data() + (b * channels + c) * length;
    }
    const T* row(std::int64_t b, std::int64_t c) const {
        return data.data() + (b * channels + c) * length;
    }

    bool same_shape(const Tensor& other) const {
        return batch == other.batch && channels == other.channels && length == other.length;
    }

    std::string shape_str() const {
        return "(" + std::to_string(batch) + ", " + std::to_string(channels) + ", " +
               std::to_string(length) + ")";
    }

    void fill(T v) { data.assign(data.size(), v); }

    bool all_finite() const {
        for (T v : data) {
            if (!std::isfinite(static_cast<double>(v))) return false;
        }
        return true;
    }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out(batch, channels, length);
        for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
        return out;
    }
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

} // namespace tapnet
