#include "tapnet/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace tapnet {

using nlohmann::json;

MetricsBundle metrics_from_predictions(const std::vector<int>& truths,
                                       const std::vector<int>& predictions, int num_classes) {
    if (truths.size() != predictions.size()) {
        throw evaluation_error("truth/prediction count mismatch");
    }
    MetricsBundle bundle;
    bundle.confusion.assign(num_classes, std::vector<std::int64_t>(num_classes, 0));
    for (std::size_t i = 0; i < truths.size(); ++i) {
        if (truths[i] < 0 || truths[i] >= num_classes || predictions[i] < 0 ||
            predictions[i] >= num_classes) {
            throw evaluation_error("class code out of range in predictions");
        }
        bundle.confusion[truths[i]][predictions[i]] += 1;
    }
    bundle.total = static_cast<std::int64_t>(truths.size());
    std::int64_t diag = 0;
    bundle.per_class_accuracy.assign(num_classes, 0.0);
    for (int c = 0; c < num_classes; ++c) {
        const std::int64_t row_sum =
            std::accumulate(bundle.confusion[c].begin(), bundle.confusion[c].end(),
                            static_cast<std::int64_t>(0));
        diag += bundle.confusion[c][c];
        bundle.per_class_accuracy[c] =
            row_sum > 0 ? 100.0 * static_cast<double>(bundle.confusion[c][c]) /
                              static_cast<double>(row_sum)
                        : 0.0;
    }
    bundle.overall_accuracy =
        bundle.total > 0 ? 100.0 * static_cast<double>(diag) / static_cast<double>(bundle.total)
                         : 0.0;
    bundle.per_fold_accuracy = {bundle.overall_accuracy};
    bundle.mean_accuracy = bundle.overall_accuracy;
    bundle.std_accuracy = 0.0;
    return bundle;
}

namespace {

int argmax_logits(const Tensor<float>& logits, std::int64_t row) {
    int best = 0;
    float best_v = logits.at(row, 0, 0);
    for (std::int64_t c = 1; c < logits.channels; ++c) {
        if (logits.at(row, c, 0) > best_v) {
            best_v = logits.at(row, c, 0);
            best = static_cast<int>(c);
        }
    }
    return best;
}

} // namespace

MetricsBundle evaluate_subset(Model<float>& model, const Dataset& ds,
                              const std::vector<std::size_t>& indices,
                              std::int64_t batch_size) {
    if (indices.empty()) throw evaluation_error("nothing to evaluate");
    std::vector<int> truths;
    std::vector<int> predictions;
    truths.reserve(indices.size());
    predictions.reserve(indices.size());

    const auto start = std::chrono::steady_clock::now();
    ForwardCtx ctx{Phase::Eval, 0};
    for (std::size_t base = 0; base < indices.size(); base += batch_size) {
        const std::size_t count = std::min<std::size_t>(batch_size, indices.size() - base);
        Tensor<float> x(static_cast<std::int64_t>(count), 1, kSignalLength);
        for (std::size_t i = 0; i < count; ++i) {
            const Signal& s = ds.signals[indices[base + i]];
            if (!s.label) {
                throw evaluation_error("unlabeled signal at index " +
                                       std::to_string(indices[base + i]));
            }
            std::copy(s.samples.begin(), s.samples.end(), x.row(static_cast<std::int64_t>(i), 0));
            truths.push_back(static_cast<int>(*s.label));
        }
        const Tensor<float>& logits = model.forward(x, ctx);
        for (std::size_t i = 0; i < count; ++i) {
            predictions.push_back(argmax_logits(logits, static_cast<std::int64_t>(i)));
        }
    }
    const auto elapsed = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();

    int num_classes = kNumClasses;
    MetricsBundle bundle = metrics_from_predictions(truths, predictions, num_classes);
    bundle.inference_ms_per_signal = elapsed / static_cast<double>(indices.size());
    return bundle;
}

MetricsBundle evaluate(Model<float>& model, const Dataset& ds, std::int64_t batch_size) {
    std::vector<std::size_t> indices(ds.size());
    std::iota(indices.begin(), indices.end(), 0);
    return evaluate_subset(model, ds, indices, batch_size);
}

Embeddings export_embeddings(Model<float>& model, const Dataset& ds, const std::string& layer,
                             std::int64_t batch_size) {
    const int node = model.require_node(layer);
    Embeddings emb;
    ForwardCtx ctx{Phase::Eval, 0};
    for (std::size_t base = 0; base < ds.size(); base += batch_size) {
        const std::size_t count = std::min<std::size_t>(batch_size, ds.size() - base);
        Tensor<float> x(static_cast<std::int64_t>(count), 1, kSignalLength);
        for (std::size_t i = 0; i < count; ++i) {
            const Signal& s = ds.signals[base + i];
            std::copy(s.samples.begin(), s.samples.end(), x.row(static_cast<std::int64_t>(i), 0));
        }
        model.forward(x, ctx);
        const Tensor<float>& feat = model.output_of(node);
        const std::int64_t dim = feat.channels * feat.length;
        for (std::size_t i = 0; i < count; ++i) {
            const Signal& s = ds.signals[base + i];
            emb.domains.push_back(s.domain.name);
            emb.labels.push_back(s.label ? static_cast<int>(*s.label) : -1);
            const float* row = feat.data.data() + static_cast<std::int64_t>(i) * dim;
            emb.features.emplace_back(row, row + dim);
        }
    }
    return emb;
}

void write_embeddings_csv(const Embeddings& emb, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write embeddings: " + path);
    const std::size_t dim = emb.features.empty() ? 0 : emb.features[0].size();
    out << "domain,label";
    for (std::size_t k = 0; k < dim; ++k) out << ",f" << k;
    out << "\n";
    for (std::size_t i = 0; i < emb.features.size(); ++i) {
        out << emb.domains[i] << ",";
        if (emb.labels[i] >= 0) out << to_string(defect_class_from_code(emb.labels[i]));
        for (float v : emb.features[i]) out << "," << v;
        out << "\n";
    }
}

void write_confusion_csv(const MetricsBundle& bundle, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write confusion matrix: " + path);
    out << "true\\pred";
    for (std::size_t c = 0; c < bundle.confusion.size(); ++c) {
        out << "," << to_string(defect_class_from_code(static_cast<int>(c)));
    }
    out << "\n";
    for (std::size_t r = 0; r < bundle.confusion.size(); ++r) {
        out << to_string(defect_class_from_code(static_cast<int>(r)));
        for (std::int64_t v : bundle.confusion[r]) out << "," << v;
        out << "\n";
    }
    // row-normalized percentages below the counts
    out << "\n";
    for (std::size_t r = 0; r < bundle.confusion.size(); ++r) {
        const auto row_sum = std::accumulate(bundle.confusion[r].begin(),
                                             bundle.confusion[r].end(), static_cast<std::int64_t>(0));
        out << to_string(defect_class_from_code(static_cast<int>(r)));
        for (std::int64_t v : bundle.confusion[r]) {
            out << ","
                << (row_sum > 0 ? 100.0 * static_cast<double>(v) / static_cast<double>(row_sum)
                                : 0.0);
        }
        out << "\n";
    }
}

MetricsBundle aggregate_folds(const std::vector<MetricsBundle>& bundles) {
    if (bundles.empty()) throw aggregation_error("no fold bundles to aggregate");
    const std::size_t num_classes = bundles[0].confusion.size();
    MetricsBundle out;
    out.confusion.assign(num_classes, std::vector<std::int64_t>(num_classes, 0));
    for (const MetricsBundle& b : bundles) {
        if (b.confusion.size() != num_classes) {
            throw aggregation_error("fold bundles disagree on class count");
        }
        for (std::size_t r = 0; r < num_classes; ++r) {
            for (std::size_t c = 0; c < num_classes; ++c) out.confusion[r][c] += b.confusion[r][c];
        }
        out.total += b.total;
        out.per_fold_accuracy.push_back(b.overall_accuracy);
        out.inference_ms_per_signal += b.inference_ms_per_signal;
    }
    out.inference_ms_per_signal /= static_cast<double>(bundles.size());

    double mean = 0.0;
    for (double a : out.per_fold_accuracy) mean += a;
    mean /= static_cast<double>(out.per_fold_accuracy.size());
    double var = 0.0;
    for (double a : out.per_fold_accuracy) var += (a - mean) * (a - mean);
    var /= static_cast<double>(out.per_fold_accuracy.size());  // population
    out.mean_accuracy = mean;
    out.std_accuracy = std::sqrt(var);

    std::int64_t diag = 0;
    out.per_class_accuracy.assign(num_classes, 0.0);
    for (std::size_t c = 0; c < num_classes; ++c) {
        const auto row_sum = std::accumulate(out.confusion[c].begin(), out.confusion[c].end(),
                                             static_cast<std::int64_t>(0));
        diag += out.confusion[c][c];
        out.per_class_accuracy[c] =
            row_sum > 0 ? 100.0 * static_cast<double>(out.confusion[c][c]) /
                              static_cast<double>(row_sum)
                        : 0.0;
    }
    out.overall_accuracy =
        out.total > 0 ? 100.0 * static_cast<double>(diag) / static_cast<double>(out.total) : 0.0;
    return out;
}

std::string MetricsBundle::to_json() const {
    json j;
    j["overall_accuracy"] = overall_accuracy;
    j["per_class_accuracy"] = per_class_accuracy;
    j["confusion"] = confusion;
    j["per_fold_accuracy"] = per_fold_accuracy;
    j["mean_accuracy"] = mean_accuracy;
    j["std_accuracy"] = std_accuracy;
    j["total"] = total;
    j["inference_ms_per_signal"] = inference_ms_per_signal;
    json names = json::array();
    for (DefectClass c : all_classes()) names.push_back(to_string(c));
    j["class_names"] = names;
    return j.dump(2) + "\n";
}

MetricsBundle MetricsBundle::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw format_error(std::string("metrics bundle is not valid JSON: ") + e.what());
    }
    MetricsBundle b;
    b.overall_accuracy = j.value("overall_accuracy", 0.0);
    b.per_class_accuracy = j.value("per_class_accuracy", std::vector<double>{});
    b.confusion = j.value("confusion", std::vector<std::vector<std::int64_t>>{});
    b.per_fold_accuracy = j.value("per_fold_accuracy", std::vector<double>{});
    b.mean_accuracy = j.value("mean_accuracy", 0.0);
    b.std_accuracy = j.value("std_accuracy", 0.0);
    b.total = j.value("total", static_cast<std::int64_t>(0));
    b.inference_ms_per_signal = j.value("inference_ms_per_signal", 0.0);
    return b;
}

void MetricsBundle::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write metrics bundle: " + path);
    out << to_json();
}

} // namespace tapnet
