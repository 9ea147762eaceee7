#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "tapnet/weights.hpp"

namespace tapnet {

// Cosine annealing: lr(0) = lr0, lr(total) = 0.
inline double cosine_lr(double t, double total, double lr0) {
    if (total <= 0.0) return lr0;
    if (t < 0.0 || t > total) throw config_error("cosine_lr: t outside [0, total]");
    return 0.5 * lr0 * (1.0 + std::cos(3.141592653589793 * t / total));
}

// Momentum SGD: v <- m*v + g; theta <- theta - lr*v.
template <typename T>
class SgdMomentum {
public:
    explicit SgdMomentum(const ModelWeights<T>& weights, double momentum = 0.9)
        : momentum_(momentum) {
        for (const auto& p : weights) {
            velocities_.push_back(p.learnable ? std::vector<T>(p.value.size(), T(0))
                                              : std::vector<T>{});
        }
    }

    void step(ModelWeights<T>& weights, double lr) {
        std::size_t i = 0;
        for (auto& p : weights) {
            if (p.learnable) {
                auto& v = velocities_[i];
                for (std::size_t k = 0; k < p.value.size(); ++k) {
                    v[k] = static_cast<T>(momentum_) * v[k] + p.grad[k];
                    p.value[k] -= static_cast<T>(lr) * v[k];
                }
            }
            ++i;
        }
    }

    double momentum() const { return momentum_; }
    std::vector<std::vector<T>>& velocities() { return velocities_; }
    const std::vector<std::vector<T>>& velocities() const { return velocities_; }

private:
    double momentum_;
    std::vector<std::vector<T>> velocities_;
};

} // namespace tapnet
