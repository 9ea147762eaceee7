#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tapnet/architectures.hpp"
#include "tapnet/evaluation.hpp"
#include "tapnet/losses.hpp"
#include "tapnet/model.hpp"
#include "tapnet/optimizer.hpp"
#include "tapnet/signal.hpp"

namespace tapnet {

struct TrainConfig {
    ArchitectureSpec arch;
    std::int64_t iterations = 50000;
    std::int64_t batch_size = 32;  // per domain in transfer mode
    double lr0 = 0.01;
    std::uint64_t seed = 1;
    LossWeights loss;
    KernelSpec kernel;
    std::string feature_layer = "gap";  // MMD feature node
    bool per_domain_bn = false;         // experimental
    std::int64_t checkpoint_every = 0;  // 0 = never mid-run

    void validate(bool transfer_mode) const;
};

struct TrainLogRow {
    std::int64_t t = 0;  // 1-based iteration number
    LossReport report;
    double alpha = 0.0;
    double lr = 0.0;
};

using MetricsLog = std::vector<TrainLogRow>;

void write_metrics_csv(const MetricsLog& log, const std::string& path);

// One training run: owns the model, optimizer state, and the per-domain batch
// streams. Supports mid-run state capture and bit-exact resume.
class Trainer {
public:
    // Classification on the labeled subset `train_indices` of `source`.
    Trainer(const TrainConfig& cfg, const Dataset& source,
            std::vector<std::size_t> train_indices);

    // Transfer: full `source_indices` labeled, `target_indices` carry 0-100%
    // visible labels. Falls back to the pure classification path when beta=0,
    // pseudo-labels are disabled, and no target label is visible, so the
    // degenerate configuration reproduces the classifier bit-for-bit.
    Trainer(const TrainConfig& cfg, const Dataset& source, std::vector<std::size_t> source_indices,
            const Dataset& target, std::vector<std::size_t> target_indices);

    void step();
    void run(std::int64_t until_iteration = -1);  // -1 = cfg.iterations

    std::int64_t iteration() const { return iteration_; }
    Model<float>& model() { return model_; }
    const MetricsLog& log() const { return log_; }
    bool transfer_active() const { return transfer_active_; }

    // checkpoint.tapw + trainer_state.bin under `dir`
    void save_state(const std::string& dir) const;
    void load_state(const std::string& dir);

private:
    void assemble_batch(const Dataset& ds, const std::vector<std::size_t>& pool, Rng& rng,
                        Tensor<float>& x, std::vector<int>& labels, bool labels_required);
    double current_lr() const;
    void classifier_step();
    void transfer_step();
    void finish_step(double l_c, double l_da, double l_pll, double alpha, double lr);

    TrainConfig cfg_;
    const Dataset* source_;
    const Dataset* target_ = nullptr;
    std::vector<std::size_t> source_indices_;
    std::vector<std::size_t> target_indices_;
    bool transfer_active_ = false;  // false in classifier and degenerate modes

    Model<float> model_;
    SgdMomentum<float> optimizer_;
    int feature_node_ = -1;
    Rng rng_source_;
    Rng rng_target_;
    std::int64_t iteration_ = 0;
    MetricsLog log_;
};

struct TrainResult {
    Model<float> model;
    MetricsLog log;
};

// T iterations of mini-batch cross-entropy + L1 training on a fully labeled
// dataset; reproducible from cfg.seed.
TrainResult train_classifier(const Dataset& ds, const TrainConfig& cfg);

// Paired source/target batches per iteration: cross-entropy on source (and
// any labeled target rows), MMD between the domain feature batches, and
// alpha-scheduled pseudo-label loss on target predictions.
TrainResult train_transfer(const Dataset& source, const Dataset& target, const TrainConfig& cfg);

struct CrossValResult {
    std::vector<MetricsBundle> fold_bundles;
    MetricsBundle aggregate;
};

using FoldCallback = std::function<void(int fold, Model<float>& model)>;

// F runs, each training on F-1 folds and evaluating on the held-out one.
CrossValResult cross_validate(const Dataset& ds, const TrainConfig& cfg, int num_folds = 3,
                              const FoldCallback& on_fold = nullptr);

// Transfer cross-validation: all source signals every run, target folds
// rotated; the held-out target fold is evaluated against shadow truth labels.
CrossValResult cross_validate_transfer(const Dataset& source, const Dataset& masked_target,
                                       const TrainConfig& cfg, int num_folds = 3,
                                       const FoldCallback& on_fold = nullptr);

} // namespace tapnet
