#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "tapnet/common.hpp"

namespace tapnet {

// One named tensor of a model: a learnable parameter or a tracked buffer
// (batch-norm running statistics). Gradients live alongside their values so a
// gradient tape is just the aligned view over all learnable entries.
template <typename T>
struct Parameter {
    std::string name;
    std::vector<std::int64_t> shape;
    std::vector<T> value;
    std::vector<T> grad;   // empty for buffers
    bool learnable = true;

    std::size_t size() const { return value.size(); }
};

// The full learnable state of one network, in deterministic registration
// order. Layers hold stable pointers into the deque.
template <typename T>
class ModelWeights {
public:
    Parameter<T>* add(const std::string& name, std::vector<std::int64_t> shape, bool learnable) {
        if (index_.count(name)) throw spec_error("duplicate parameter name: " + name);
        std::size_t n = 1;
        for (std::int64_t e : shape) n *= static_cast<std::size_t>(e);
        params_.push_back(Parameter<T>{name, std::move(shape), std::vector<T>(n, T(0)),
                                       learnable ? std::vector<T>(n, T(0)) : std::vector<T>{},
                                       learnable});
        index_[name] = params_.size() - 1;
        return &params_.back();
    }

    std::size_t count() const { return params_.size(); }

    Parameter<T>& at(std::size_t i) { return params_[i]; }
    const Parameter<T>& at(std::size_t i) const { return params_[i]; }

    Parameter<T>* find(const std::string& name) {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : &params_[it->second];
    }
    const Parameter<T>* find(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : &params_[it->second];
    }

    // Learnable scalar count; buffers (running statistics) excluded.
    std::int64_t learnable_count() const {
        std::int64_t n = 0;
        for (const auto& p : params_) {
            if (p.learnable) n += static_cast<std::int64_t>(p.value.size());
        }
        return n;
    }

    void zero_grad() {
        for (auto& p : params_) {
            if (p.learnable) p.grad.assign(p.grad.size(), T(0));
        }
    }

    bool gradients_finite(std::string* offender = nullptr) const {
        for (const auto& p : params_) {
            for (T g : p.grad) {
                if (!std::isfinite(static_cast<double>(g))) {
                    if (offender) *offender = p.name;
                    return false;
                }
            }
        }
        return true;
    }

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }

private:
    std::deque<Parameter<T>> params_;
    std::unordered_map<std::string, std::size_t> index_;
};

} // namespace tapnet
