#pragma once

#include <string>
#include <vector>

#include "tapnet/model.hpp"
#include "tapnet/signal.hpp"

namespace tapnet {

// Accuracies are reported in percent; the confusion matrix holds raw counts
// with rows indexed by true class.
struct MetricsBundle {
    double overall_accuracy = 0.0;
    std::vector<double> per_class_accuracy;
    std::vector<std::vector<std::int64_t>> confusion;
    std::vector<double> per_fold_accuracy;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    std::int64_t total = 0;
    double inference_ms_per_signal = 0.0;

    std::string to_json() const;
    static MetricsBundle from_json(const std::string& text);
    void save(const std::string& path) const;
};

// Builds a bundle from already-collected (true, predicted) pairs.
MetricsBundle metrics_from_predictions(const std::vector<int>& truths,
                                       const std::vector<int>& predictions, int num_classes);

// Deterministic argmax evaluation with frozen batch-norm statistics. The
// model is mutated only through its cached activations, never its weights.
MetricsBundle evaluate(Model<float>& model, const Dataset& ds, std::int64_t batch_size = 128);
MetricsBundle evaluate_subset(Model<float>& model, const Dataset& ds,
                              const std::vector<std::size_t>& indices,
                              std::int64_t batch_size = 128);

// Per-signal feature vectors at a named layer, flattened channel-major.
struct Embeddings {
    std::vector<std::string> domains;
    std::vector<int> labels;  // -1 when unlabeled
    std::vector<std::vector<float>> features;
};

Embeddings export_embeddings(Model<float>& model, const Dataset& ds, const std::string& layer,
                             std::int64_t batch_size = 128);
void write_embeddings_csv(const Embeddings& emb, const std::string& path);

void write_confusion_csv(const MetricsBundle& bundle, const std::string& path);

// Mean and population standard deviation of the per-fold accuracies;
// confusion matrices summed.
MetricsBundle aggregate_folds(const std::vector<MetricsBundle>& bundles);

} // namespace tapnet
