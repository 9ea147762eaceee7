#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tapnet/layers.hpp"

namespace tapnet {

// A built network: a named chain of (possibly composite) layers plus the
// parameter registry they share. forward() caches every node output so
// features can be read at any named node, and backward() accepts extra
// gradients injected at node outputs (the MMD feature gradient enters there).
template <typename T>
class Model {
public:
    ModelWeights<T> weights;

    void add_node(std::string name, std::unique_ptr<Layer<T>> layer) {
        names_.push_back(std::move(name));
        chain_.push_back(std::move(layer));
    }

    std::size_t node_count() const { return chain_.size(); }
    const std::vector<std::string>& node_names() const { return names_; }

    int node_index(const std::string& name) const {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i] == name) return static_cast<int>(i);
        }
        return -1;
    }

    int require_node(const std::string& name) const {
        const int idx = node_index(name);
        if (idx < 0) {
            std::string known;
            for (const auto& n : names_) {
                if (!known.empty()) known += ", ";
                known += n;
            }
            throw config_error("unknown layer '" + name + "' (available: " + known + ")");
        }
        return idx;
    }

    const Tensor<T>& forward(const Tensor<T>& x, const ForwardCtx& ctx) {
        outputs_.resize(chain_.size());
        const Tensor<T>* cur = &x;
        for (std::size_t i = 0; i < chain_.size(); ++i) {
            outputs_[i] = chain_[i]->forward(*cur, ctx);
            cur = &outputs_[i];
        }
        return outputs_.back();
    }

    // grad_logits is dL/d(last node output); injections are (node index,
    // dL/d(node output)) pairs added as the backward sweep passes them.
    Tensor<T> backward(const Tensor<T>& grad_logits,
                       const std::vector<std::pair<int, const Tensor<T>*>>& injections = {}) {
        Tensor<T> g = grad_logits;
        for (std::size_t i = chain_.size(); i-- > 0;) {
            for (const auto& [node, extra] : injections) {
                if (node == static_cast<int>(i)) g = ops::add(g, *extra);
            }
            g = chain_[i]->backward(g);
        }
        return g;
    }

    const Tensor<T>& output_of(int node_index) const { return outputs_[node_index]; }
    const Tensor<T>& output_of(const std::string& name) const {
        return outputs_[require_node(name)];
    }

private:
    std::vector<std::unique_ptr<Layer<T>>> chain_;
    std::vector<std::string> names_;
    std::vector<Tensor<T>> outputs_;
};

} // namespace tapnet
