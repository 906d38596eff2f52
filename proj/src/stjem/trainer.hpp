// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stjem/data.hpp"
#include "stjem/energy_net.hpp"
#include "stjem/errors.hpp"
#include "stjem/objectives.hpp"
#include "stjem/sgld.hpp"

namespace stjem {

struct OptimizerConfig {
    enum class Kind { Sgd, Adam };
    Kind kind = Kind::Adam;
    double lr = 1e-3;
    double momentum = 0.9;  // sgd
    double beta1 = 0.9;     // adam
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct LrSchedule {
    double decay_factor = 1.0;
    int every_n_epochs = 0;  // 0 = constant
};

struct TrainConfig {
    std::vector<int> hidden_dims = {32, 32};
    Activation activation = Activation::SmoothSwish;
    int batch_size = 64;
    int sgld_samples = 8;  // M; 0 = RES-JEM
    int epochs = 20;
    OptimizerConfig optimizer{};
    LrSchedule lr_schedule{};
    ObjectiveConfig objectives{};
    SgldConfig sgld{};
    bool conditional_negatives = false;  // per-class heads with labels drawn from the batch
    int sgld_stride = 1;                 // regenerate negatives every n batches
    int buffer_capacity = 10000;
    double buffer_reinit_prob = 0.05;
    std::uint64_t seed = 0;
    double divergence_threshold = 50.0;
    int eval_every = 0;  // steps; 0 = each epoch end
    double labeled_unlabeled_ratio = 0.0;
    int threads = 1;
};

struct TrainLog {
    struct StepRow {
        std::int64_t step;
        int epoch;
        double lr;
        LossReport report;
    };
    struct EvalRow {
        std::int64_t step;
        int epoch;
        double accuracy;
        double ece;
        double mean_xent;
        MiDiagnostic mi;
    };
    struct Event {
        std::int64_t step;
        std::string reason;
        std::string action;
    };

    std::vector<StepRow> rows;
    std::vector<EvalRow> evals;
    std::vector<Event> events;

    void write_metrics_csv(std::ostream& os) const;
    void write_eval_csv(std::ostream& os) const;
    void write_events_csv(std::ostream& os) const;
    void write_all(const std::string& dir) const;  // metrics.csv, eval.csv, events.csv
};

struct TrainResult {
    EnergyNetwork net;
    TrainLog log;
};

// Thrown when the rollback budget is exhausted; carries the log so callers
// can still inspect the run.
class training_run_failed : public training_failed {
public:
    training_run_failed(const std::string& what, TrainLog log)
        : training_failed(what), log_(std::move(log)) {}
    const TrainLog& log() const noexcept { return log_; }

private:
    TrainLog log_;
};

struct EvalResult {
    double accuracy;
    double ece;
    double mean_xent;
};

// Accuracy by argmax posterior (ties to the lowest index), ECE on
// max-posterior confidences with 15 bins, mean cross-entropy. Uses the
// labeled rows; throws if there are none.
EvalResult evaluate(const EnergyNetwork& net, const Dataset& data);

// Same metrics for an arbitrary logits function (the combiner evaluates
// ensembles through this).
EvalResult evaluate_logits_fn(const std::function<Logits(std::span<const double>)>& logits_fn,
                              const Dataset& data);

// Per-example posteriors of the labeled rows, for MI diagnostics.
std::vector<ProbVector> dataset_posteriors(const EnergyNetwork& net, const Dataset& data);

// Deterministic batch stream: every labeled row exactly once per epoch; with
// ratio > 0 each batch carries round(batch/(1+ratio)) labeled rows topped up
// with unlabeled rows cycled from their own shuffled stream.
class Batcher {
public:
    Batcher(const Dataset& data, int batch_size, double labeled_unlabeled_ratio,
            std::uint64_t seed);

    int steps_per_epoch() const { return steps_per_epoch_; }
    // Batch for (epoch, step_in_epoch). Pure function of the construction
    // arguments, so resuming needs no extra state.
    Batch make_batch(int epoch, int step_in_epoch) const;

private:
    const Dataset* data_;
    int batch_size_;
    double ratio_;
    std::uint64_t seed_;
    std::vector<int> labeled_idx_;
    std::vector<int> unlabeled_idx_;
    int labeled_per_batch_;
    int steps_per_epoch_;
};

class Trainer {
public:
    Trainer(const TrainConfig& config, const Dataset& train_data,
            const Dataset* eval_data = nullptr);

    // Runs the full schedule. On divergence: roll back to the last
    // checkpoint, halve the learning rate, and retry; more than three
    // rollbacks raises training_run_failed. Checkpoints go under
    // checkpoint_dir when set ("checkpoint.net" + "checkpoint.state").
    TrainResult run(const std::string& checkpoint_dir = "");

    // Restores a run saved by save_checkpoint and continues it; with the
    // same config and data the continuation is bit-identical to the
    // uninterrupted run.
    static Trainer resume(const TrainConfig& config, const Dataset& train_data,
                          const std::string& checkpoint_base, const Dataset* eval_data = nullptr);

    void save_checkpoint(const std::string& base) const;  // base + ".net" / ".state"

    const EnergyNetwork& net() const { return net_; }
    const TrainLog& log() const { return log_; }
    std::int64_t step() const { return step_; }
    std::int64_t total_steps() const { return static_cast<std::int64_t>(batcher_.steps_per_epoch()) * config_.epochs; }

    // Single training step; exposed for tests that need to poison the
    // buffer or inspect per-step reports.
    LossReport train_step();
    ReplayBuffer& buffer() { return buffer_; }

private:
    struct Snapshot {
        std::vector<double> params;
        std::int64_t opt_t;
        std::vector<double> opt_m, opt_v;
        std::vector<std::vector<double>> buffer_entries;
        std::uint64_t buffer_rng, sgld_rng;
        std::int64_t step;
        double lr;
        std::vector<double> cached_negatives;
        std::vector<int> cached_negative_classes;
    };

    Snapshot snapshot() const;
    void restore(const Snapshot& snap);
    void write_state_file(const std::string& path) const;
    void read_state_file(const std::string& path);

    void regenerate_negatives(int scheduled_t, const Batch& batch);
    void apply_update(const ParamGradient& grad);
    void run_eval();
    double epochs_elapsed() const;
    int current_epoch() const { return static_cast<int>(step_ / batcher_.steps_per_epoch()); }

    TrainConfig config_;
    const Dataset* train_data_;
    const Dataset* eval_data_;
    Batcher batcher_;
    EnergyNetwork net_;

    // optimizer state
    std::int64_t opt_t_ = 0;
    std::vector<double> opt_m_, opt_v_;  // adam moments / sgd velocity in opt_m_

    ReplayBuffer buffer_;
    Rng sgld_rng_;
    double lr_;
    std::int64_t step_ = 0;
    int rollbacks_ = 0;
    std::vector<double> cached_negatives_;
    std::vector<int> cached_negative_classes_;

    Snapshot last_checkpoint_;
    TrainLog log_;
};

// One-call wrapper used by the CLI and C API.
TrainResult train(const TrainConfig& config, const Dataset& train_data,
                  const Dataset* eval_data = nullptr, const std::string& out_dir = "");

class RunConfig;

// Maps the flat run configuration onto a TrainConfig.
TrainConfig train_config_from(const RunConfig& rc);

}  // namespace stjem
