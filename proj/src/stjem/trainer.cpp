// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#include "stjem/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "stjem/binio.hpp"
#include "stjem/config.hpp"
#include "stjem/core_math.hpp"

namespace stjem {

namespace {

// Stream ids for deriving independent PRNG streams from the master seed.
constexpr std::uint64_t kStreamNetInit = 1;
constexpr std::uint64_t kStreamSgld = 2;
constexpr std::uint64_t kStreamBuffer = 3;
constexpr std::uint64_t kStreamLabeledPerm = 4;
constexpr std::uint64_t kStreamUnlabeledPerm = 5;

Rng stream(std::uint64_t seed, std::uint64_t id) { return Rng(seed).split(id); }

std::vector<int> shuffled(std::vector<int> idx, Rng rng) {
    for (int i = static_cast<int>(idx.size()) - 1; i > 0; --i)
        std::swap(idx[i], idx[rng.next_below(static_cast<std::uint64_t>(i) + 1)]);
    return idx;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += workers) fn(i);
        });
    for (auto& t : pool) t.join();
}

constexpr char kStateMagic[] = "STJEMSTA";
constexpr std::uint32_t kStateVersion = 1;

}  // namespace

void TrainLog::write_metrics_csv(std::ostream& os) const {
    os << "step,epoch,lr," << LossReport::csv_header() << "\n";
    char head[80];
    for (const StepRow& r : rows) {
        std::snprintf(head, sizeof(head), "%lld,%d,%.17g,", static_cast<long long>(r.step),
                      r.epoch, r.lr);
        os << head << r.report.csv_row() << "\n";
    }
}

void TrainLog::write_eval_csv(std::ostream& os) const {
    os << "step,epoch,accuracy,ece,mean_xent,mi,mean_log_posterior,marginal_entropy\n";
    char buf[256];
    for (const EvalRow& r : evals) {
        std::snprintf(buf, sizeof(buf), "%lld,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      static_cast<long long>(r.step), r.epoch, r.accuracy, r.ece, r.mean_xent,
                      r.mi.mi, r.mi.mean_log_posterior, r.mi.marginal_entropy);
        os << buf;
    }
}

void TrainLog::write_events_csv(std::ostream& os) const {
    os << "step,reason,action\n";
    for (const Event& e : events)
        os << e.step << "," << e.reason << "," << e.action << "\n";
}

void TrainLog::write_all(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write = [&](const std::string& name, auto&& fn) {
        std::ofstream os(fs::path(dir) / name);
        if (!os) throw io_error("cannot open for writing: " + (fs::path(dir) / name).string());
        fn(os);
    };
    write("metrics.csv", [&](std::ostream& os) { write_metrics_csv(os); });
    write("eval.csv", [&](std::ostream& os) { write_eval_csv(os); });
    write("events.csv", [&](std::ostream& os) { write_events_csv(os); });
}

EvalResult evaluate_logits_fn(const std::function<Logits(std::span<const double>)>& logits_fn,
                              const Dataset& data) {
    data.validate();
    std::vector<double> confidences;
    std::vector<bool> correct;
    double xent_sum = 0.0;
    for (int i = 0; i < data.n; ++i) {
        if (!data.labeled_mask[i]) continue;
        ProbVector post = posterior_from_logits(logits_fn(data.row(i)));
        int pred = argmax(post);
        confidences.push_back(post[pred]);
        correct.push_back(pred == data.ys[i]);
        xent_sum += -std::log(post[data.ys[i]]);
    }
    if (confidences.empty()) throw std::invalid_argument("evaluate: no labeled examples");

    EvalResult r;
    const double n = static_cast<double>(confidences.size());
    double hits = 0.0;
    for (bool c : correct) hits += c ? 1.0 : 0.0;
    r.accuracy = hits / n;
    r.ece = ece(confidences, correct, kDefaultEceBins);
    r.mean_xent = xent_sum / n;
    return r;
}

EvalResult evaluate(const EnergyNetwork& net, const Dataset& data) {
    return evaluate_logits_fn([&](std::span<const double> x) { return net.forward(x); }, data);
}

std::vector<ProbVector> dataset_posteriors(const EnergyNetwork& net, const Dataset& data) {
    std::vector<ProbVector> posts;
    posts.reserve(data.n);
    for (int i = 0; i < data.n; ++i)
        if (data.labeled_mask[i]) posts.push_back(posterior_from_logits(net.forward(data.row(i))));
    return posts;
}

Batcher::Batcher(const Dataset& data, int batch_size, double labeled_unlabeled_ratio,
                 std::uint64_t seed)
    : data_(&data), batch_size_(batch_size), ratio_(labeled_unlabeled_ratio), seed_(seed) {
    data.validate();
    if (batch_size < 1) throw std::invalid_argument("Batcher: batch_size must be positive");
    if (ratio_ < 0.0) throw std::invalid_argument("Batcher: negative ratio");

    for (int i = 0; i < data.n; ++i)
        (data.labeled_mask[i] ? labeled_idx_ : unlabeled_idx_).push_back(i);

    if (ratio_ > 0.0) {
        if (unlabeled_idx_.empty())
            throw std::invalid_argument("Batcher: ratio > 0 but dataset has no unlabeled rows");
        if (labeled_idx_.empty())
            throw std::invalid_argument("Batcher: dataset has no labeled rows");
        labeled_per_batch_ = std::max(
            1, static_cast<int>(std::lround(batch_size_ / (1.0 + ratio_))));
        steps_per_epoch_ = (static_cast<int>(labeled_idx_.size()) + labeled_per_batch_ - 1) /
                           labeled_per_batch_;
    } else {
        // plain batcher: every row in sequence, labeled or not
        labeled_per_batch_ = batch_size_;
        steps_per_epoch_ = (data.n + batch_size_ - 1) / batch_size_;
    }
}

Batch Batcher::make_batch(int epoch, int step_in_epoch) const {
    if (step_in_epoch < 0 || step_in_epoch >= steps_per_epoch_)
        throw std::invalid_argument("Batcher: step out of range");

    Batch b;
    b.dx = data_->dx;
    auto push_row = [&](int i) {
        std::span<const double> row = data_->row(i);
        b.xs.insert(b.xs.end(), row.begin(), row.end());
        b.ys.push_back(data_->ys[i]);
        b.labeled_mask.push_back(data_->labeled_mask[i]);
        ++b.n;
    };

    if (ratio_ <= 0.0) {
        std::vector<int> all(data_->n);
        for (int i = 0; i < data_->n; ++i) all[i] = i;
        std::vector<int> perm = shuffled(
            std::move(all), stream(seed_, kStreamLabeledPerm).split(static_cast<std::uint64_t>(epoch)));
        const int lo = step_in_epoch * batch_size_;
        const int hi = std::min(lo + batch_size_, data_->n);
        for (int k = lo; k < hi; ++k) push_row(perm[k]);
        return b;
    }

    std::vector<int> lperm = shuffled(
        labeled_idx_, stream(seed_, kStreamLabeledPerm).split(static_cast<std::uint64_t>(epoch)));
    const int n_lab = static_cast<int>(labeled_idx_.size());
    const int lo = step_in_epoch * labeled_per_batch_;
    const int hi = std::min(lo + labeled_per_batch_, n_lab);
    for (int k = lo; k < hi; ++k) push_row(lperm[k]);

    // Unlabeled rows cycle through their own shuffled stream; the cursor is
    // a pure function of (epoch, step) so resume needs no extra state.
    auto unlabeled_in_step = [&](int s) {
        const int l = std::min(labeled_per_batch_, n_lab - s * labeled_per_batch_);
        if (l == labeled_per_batch_) return batch_size_ - labeled_per_batch_;
        return static_cast<int>(std::lround(l * ratio_));
    };
    std::int64_t consumed = 0;
    for (int e = 0; e < epoch; ++e)
        for (int s = 0; s < steps_per_epoch_; ++s) consumed += unlabeled_in_step(s);
    for (int s = 0; s < step_in_epoch; ++s) consumed += unlabeled_in_step(s);

    const std::int64_t n_unl = static_cast<std::int64_t>(unlabeled_idx_.size());
    const int want = unlabeled_in_step(step_in_epoch);
    for (int k = 0; k < want; ++k) {
        const std::int64_t global = consumed + k;
        const std::uint64_t pass = static_cast<std::uint64_t>(global / n_unl);
        std::vector<int> uperm = shuffled(unlabeled_idx_,
                                          stream(seed_, kStreamUnlabeledPerm).split(pass));
        push_row(uperm[global % n_unl]);
    }
    return b;
}

Trainer::Trainer(const TrainConfig& config, const Dataset& train_data, const Dataset* eval_data)
    : config_(config),
      train_data_(&train_data),
      eval_data_(eval_data ? eval_data : &train_data),
      batcher_(train_data, config.batch_size, config.labeled_unlabeled_ratio, config.seed),
      net_([&] {
          std::vector<int> dims;
          dims.push_back(train_data.dx);
          for (int h : config.hidden_dims) dims.push_back(h);
          dims.push_back(train_data.dy);
          return EnergyNetwork::init(dims, config.activation,
                                     stream(config.seed, kStreamNetInit).state());
      }()),
      buffer_(config.buffer_capacity, train_data.dx, config.buffer_reinit_prob,
              stream(config.seed, kStreamBuffer).state()),
      sgld_rng_(stream(config.seed, kStreamSgld)) {
    if (config.epochs < 1) throw std::invalid_argument("Trainer: epochs must be positive");
    if (config.sgld_samples < 0) throw std::invalid_argument("Trainer: negative sgld_samples");
    if (config.sgld_stride < 1) throw std::invalid_argument("Trainer: sgld_stride must be >= 1");
    if (config.optimizer.lr <= 0.0) throw std::invalid_argument("Trainer: lr must be positive");
    opt_m_.assign(net_.param_count(), 0.0);
    opt_v_.assign(net_.param_count(), 0.0);
    lr_ = config.optimizer.lr;
    last_checkpoint_ = snapshot();
}

double Trainer::epochs_elapsed() const {
    return static_cast<double>(step_) / batcher_.steps_per_epoch();
}

void Trainer::regenerate_negatives(int scheduled_t, const Batch& batch) {
    const int m = config_.sgld_samples;
    std::vector<std::vector<double>> starts = buffer_.sample(m);

    // Per-chain seeds and conditioning classes come off the SGLD stream
    // up front, so chains can run on any number of threads with identical
    // results.
    std::vector<std::uint64_t> chain_seeds(m);
    std::vector<int> classes(m, -1);
    std::vector<int> labeled_classes;
    for (int i = 0; i < batch.n; ++i)
        if (batch.labeled_mask[i]) labeled_classes.push_back(batch.ys[i]);
    for (int j = 0; j < m; ++j) {
        chain_seeds[j] = sgld_rng_.next_u64();
        if (config_.conditional_negatives && !labeled_classes.empty())
            classes[j] = labeled_classes[sgld_rng_.next_below(labeled_classes.size())];
    }

    SgldConfig base = config_.sgld;
    base.n_steps = scheduled_t;
    base.init = SgldConfig::Init::Given;

    std::vector<std::vector<double>> finals(m);
    parallel_for(m, config_.threads, [&](int j) {
        SgldConfig cfg = base;
        if (classes[j] >= 0) cfg.target = GradHead::class_of(classes[j]);
        Rng chain_rng(chain_seeds[j]);
        finals[j] = run_chain(net_, cfg, chain_rng, starts[j]).sample;
    });

    buffer_.push(finals);
    cached_negatives_.clear();
    for (const auto& s : finals)
        cached_negatives_.insert(cached_negatives_.end(), s.begin(), s.end());
    cached_negative_classes_ = classes;
}

void Trainer::apply_update(const ParamGradient& grad) {
    std::span<double> params = net_.mutable_params();
    const OptimizerConfig& opt = config_.optimizer;
    if (opt.kind == OptimizerConfig::Kind::Adam) {
        ++opt_t_;
        const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt_t_));
        const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt_t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double g = grad.values[i];
            opt_m_[i] = opt.beta1 * opt_m_[i] + (1.0 - opt.beta1) * g;
            opt_v_[i] = opt.beta2 * opt_v_[i] + (1.0 - opt.beta2) * g * g;
            params[i] -= lr_ * (opt_m_[i] / c1) / (std::sqrt(opt_v_[i] / c2) + opt.eps);
        }
    } else {
        ++opt_t_;
        for (std::size_t i = 0; i < params.size(); ++i) {
            opt_m_[i] = opt.momentum * opt_m_[i] - lr_ * grad.values[i];
            params[i] += opt_m_[i];
        }
    }
}

LossReport Trainer::train_step() {
    const int epoch = current_epoch();
    const int sie = static_cast<int>(step_ % batcher_.steps_per_epoch());

    // lr is a pure function of progress and rollbacks
    lr_ = config_.optimizer.lr * std::pow(0.5, rollbacks_);
    if (config_.lr_schedule.every_n_epochs > 0)
        lr_ *= std::pow(config_.lr_schedule.decay_factor,
                        epoch / config_.lr_schedule.every_n_epochs);

    Batch batch = batcher_.make_batch(epoch, sie);
    if (config_.sgld_samples > 0) {
        if (step_ % config_.sgld_stride == 0 || cached_negatives_.empty())
            regenerate_negatives(scheduled_steps(config_.sgld, epochs_elapsed()), batch);
        batch.m = config_.sgld_samples;
        batch.negatives = cached_negatives_;
    }

    std::span<const int> neg_classes;
    if (config_.objectives.use_samples_xent) {
        for (int c : cached_negative_classes_)
            if (c < 0)
                throw std::invalid_argument(
                    "Trainer: samples_xent needs conditional_negatives enabled");
        neg_classes = cached_negative_classes_;
    }

    auto [report, grad] = total_loss(net_, batch, config_.objectives, neg_classes);

    const bool divergent = !std::isfinite(report.total) || !std::isfinite(report.grad_norm) ||
                           report.gen_term > config_.divergence_threshold;
    if (!divergent) {
        apply_update(grad);
        log_.rows.push_back({step_, epoch, lr_, report});
        ++step_;
    }
    return report;
}

void Trainer::run_eval() {
    EvalResult r = evaluate(net_, *eval_data_);
    MiDiagnostic mi = mi_diagnostic(dataset_posteriors(net_, *eval_data_));
    log_.evals.push_back({step_, current_epoch(), r.accuracy, r.ece, r.mean_xent, mi});
}

TrainResult Trainer::run(const std::string& checkpoint_dir) {
    namespace fs = std::filesystem;
    std::string base;
    if (!checkpoint_dir.empty()) {
        fs::create_directories(checkpoint_dir);
        base = (fs::path(checkpoint_dir) / "checkpoint").string();
        save_checkpoint(base);
    }

    const std::int64_t total = total_steps();
    const std::int64_t checkpoint_interval =
        config_.eval_every > 0 ? config_.eval_every : batcher_.steps_per_epoch();

    while (step_ < total) {
        std::string divergence_reason;
        try {
            LossReport report = train_step();
            if (!std::isfinite(report.total) || !std::isfinite(report.grad_norm))
                divergence_reason = "non-finite loss";
            else if (report.gen_term > config_.divergence_threshold)
                divergence_reason = "generative term above threshold";
        } catch (const sampler_divergence& e) {
            divergence_reason = e.what();
        }

        if (!divergence_reason.empty()) {
            const std::int64_t at = step_;
            ++rollbacks_;
            if (rollbacks_ > 3) {
                log_.events.push_back({at, divergence_reason, "abort after 3 rollbacks"});
                throw training_run_failed("training failed: " + divergence_reason, log_);
            }
            restore(last_checkpoint_);
            // drop any rows recorded past the checkpoint
            while (!log_.rows.empty() && log_.rows.back().step >= step_) log_.rows.pop_back();
            while (!log_.evals.empty() && log_.evals.back().step > step_) log_.evals.pop_back();
            log_.events.push_back({at, divergence_reason,
                                   "rollback to step " + std::to_string(step_) + ", lr halved"});
            continue;
        }

        if (step_ % checkpoint_interval == 0 || step_ == total) {
            run_eval();
            last_checkpoint_ = snapshot();
            if (!base.empty()) save_checkpoint(base);
        }
    }
    if (log_.evals.empty() || log_.evals.back().step != step_) {
        run_eval();
        if (!base.empty()) save_checkpoint(base);
    }
    return {net_, log_};
}

Trainer::Snapshot Trainer::snapshot() const {
    Snapshot s;
    s.params.assign(net_.params().begin(), net_.params().end());
    s.opt_t = opt_t_;
    s.opt_m = opt_m_;
    s.opt_v = opt_v_;
    s.buffer_entries = buffer_.entries();
    s.buffer_rng = buffer_.rng_state();
    s.sgld_rng = sgld_rng_.state();
    s.step = step_;
    s.lr = lr_;
    s.cached_negatives = cached_negatives_;
    s.cached_negative_classes = cached_negative_classes_;
    return s;
}

void Trainer::restore(const Snapshot& snap) {
    std::copy(snap.params.begin(), snap.params.end(), net_.mutable_params().begin());
    opt_t_ = snap.opt_t;
    opt_m_ = snap.opt_m;
    opt_v_ = snap.opt_v;
    buffer_.restore_entries(snap.buffer_entries);
    buffer_.set_rng_state(snap.buffer_rng);
    sgld_rng_.set_state(snap.sgld_rng);
    step_ = snap.step;
    lr_ = snap.lr;
    cached_negatives_ = snap.cached_negatives;
    cached_negative_classes_ = snap.cached_negative_classes;
}

void Trainer::write_state_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path);
    os.write(kStateMagic, 8);
    binio::put_u32(os, kStateVersion);
    binio::put_u64(os, static_cast<std::uint64_t>(step_));
    binio::put_u32(os, static_cast<std::uint32_t>(rollbacks_));
    binio::put_u64(os, static_cast<std::uint64_t>(opt_t_));
    binio::put_u64(os, opt_m_.size());
    for (double v : opt_m_) binio::put_f64(os, v);
    for (double v : opt_v_) binio::put_f64(os, v);
    binio::put_u64(os, sgld_rng_.state());
    binio::put_u64(os, buffer_.rng_state());
    binio::put_u32(os, static_cast<std::uint32_t>(buffer_.size()));
    binio::put_u32(os, static_cast<std::uint32_t>(buffer_.dim()));
    for (const auto& e : buffer_.entries())
        for (double v : e) binio::put_f64(os, v);
    binio::put_u32(os, static_cast<std::uint32_t>(cached_negatives_.size()));
    for (double v : cached_negatives_) binio::put_f64(os, v);
    binio::put_u32(os, static_cast<std::uint32_t>(cached_negative_classes_.size()));
    for (int c : cached_negative_classes_) binio::put_u32(os, static_cast<std::uint32_t>(c));
    if (!os) throw io_error("write failed: " + path);
}

void Trainer::read_state_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open: " + path);
    binio::Reader r(is);
    r.expect_magic(kStateMagic, "trainer state");
    if (r.u32() != kStateVersion) r.fail("trainer state: unsupported version");
    step_ = static_cast<std::int64_t>(r.u64());
    rollbacks_ = static_cast<int>(r.u32());
    opt_t_ = static_cast<std::int64_t>(r.u64());
    std::uint64_t n_params = r.u64();
    if (n_params != net_.param_count()) r.fail("trainer state: optimizer size mismatch");
    opt_m_.resize(n_params);
    opt_v_.resize(n_params);
    for (double& v : opt_m_) v = r.f64();
    for (double& v : opt_v_) v = r.f64();
    sgld_rng_.set_state(r.u64());
    buffer_.set_rng_state(r.u64());
    std::uint32_t buf_n = r.u32();
    std::uint32_t buf_dim = r.u32();
    if (static_cast<int>(buf_dim) != buffer_.dim()) r.fail("trainer state: buffer dim mismatch");
    std::vector<std::vector<double>> entries(buf_n, std::vector<double>(buf_dim));
    for (auto& e : entries)
        for (double& v : e) v = r.f64();
    buffer_.restore_entries(std::move(entries));
    std::uint32_t neg_n = r.u32();
    cached_negatives_.resize(neg_n);
    for (double& v : cached_negatives_) v = r.f64();
    std::uint32_t cls_n = r.u32();
    cached_negative_classes_.resize(cls_n);
    for (int& c : cached_negative_classes_) c = static_cast<int>(r.u32());
}

void Trainer::save_checkpoint(const std::string& base) const {
    net_.save(base + ".net");
    write_state_file(base + ".state");
}

Trainer Trainer::resume(const TrainConfig& config, const Dataset& train_data,
                        const std::string& checkpoint_base, const Dataset* eval_data) {
    Trainer t(config, train_data, eval_data);
    EnergyNetwork loaded = EnergyNetwork::load(checkpoint_base + ".net");
    if (loaded.layer_dims() != t.net_.layer_dims())
        throw std::invalid_argument(
            "resume: checkpoint layer dims do not match the configured network");
    if (loaded.activation() != t.net_.activation())
        throw std::invalid_argument("resume: checkpoint activation does not match the config");
    t.net_ = std::move(loaded);
    t.read_state_file(checkpoint_base + ".state");
    t.last_checkpoint_ = t.snapshot();
    return t;
}

TrainResult train(const TrainConfig& config, const Dataset& train_data, const Dataset* eval_data,
                  const std::string& out_dir) {
    Trainer trainer(config, train_data, eval_data);
    TrainResult result = trainer.run(out_dir);
    if (!out_dir.empty()) result.log.write_all(out_dir);
    return result;
}

TrainConfig train_config_from(const RunConfig& rc) {
    TrainConfig c;
    c.hidden_dims.clear();
    {
        std::stringstream ss(rc.get("hidden_dims"));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            c.hidden_dims.push_back(std::stoi(item));
        }
    }
    c.activation = activation_from_name(rc.get("activation"));
    c.batch_size = static_cast<int>(rc.get_int("batch_size"));
    c.sgld_samples = static_cast<int>(rc.get_int("sgld_samples"));
    c.epochs = static_cast<int>(rc.get_int("epochs"));
    c.optimizer.kind = rc.get("optimizer") == "sgd" ? OptimizerConfig::Kind::Sgd
                                                    : OptimizerConfig::Kind::Adam;
    c.optimizer.lr = rc.get_real("lr");
    c.optimizer.momentum = rc.get_real("momentum");
    c.optimizer.beta1 = rc.get_real("adam_beta1");
    c.optimizer.beta2 = rc.get_real("adam_beta2");
    c.optimizer.eps = rc.get_real("adam_eps");
    c.lr_schedule.decay_factor = rc.get_real("lr_decay_factor");
    c.lr_schedule.every_n_epochs = static_cast<int>(rc.get_int("lr_decay_every_epochs"));
    c.objectives.xent_weight = rc.get_real("xent_weight");
    c.objectives.gen_weight = rc.get_real("gen_weight");
    c.objectives.unlabeled_weight = rc.get_real("unlabeled_weight");
    c.objectives.samples_xent_weight = rc.get_real("samples_xent_weight");
    c.objectives.use_gen = rc.get_bool("use_gen");
    c.objectives.use_unlabeled = rc.get_bool("use_unlabeled");
    c.objectives.use_samples_xent = rc.get_bool("use_samples_xent");
    c.objectives.differentiate_posterior_weights = rc.get_bool("differentiate_posterior_weights");
    c.sgld.step_size = rc.get_real("sgld_step_size");
    c.sgld.noise_scale = rc.get_real("sgld_noise");
    c.sgld.n_steps = static_cast<int>(rc.get_int("sgld_steps"));
    c.sgld.target = GradHead::marginal();
    c.conditional_negatives = rc.get("sgld_target") == "conditional";
    c.sgld.schedule.kind = rc.get("sgld_schedule") == "linear" ? SgldSchedule::Kind::LinearIncrease
                                                               : SgldSchedule::Kind::Fixed;
    c.sgld.schedule.steps_per_epoch_fraction = rc.get_real("sgld_schedule_fraction");
    c.sgld.schedule.max_steps = static_cast<int>(rc.get_int("sgld_schedule_max_steps"));
    c.sgld_stride = static_cast<int>(rc.get_int("sgld_stride"));
    c.buffer_capacity = static_cast<int>(rc.get_int("buffer_capacity"));
    c.buffer_reinit_prob = rc.get_real("buffer_reinit_prob");
    c.seed = static_cast<std::uint64_t>(rc.get_int("seed"));
    c.divergence_threshold = rc.get_real("divergence_threshold");
    c.eval_every = static_cast<int>(rc.get_int("eval_every"));
    c.labeled_unlabeled_ratio = rc.get_real("labeled_unlabeled_ratio");
    c.threads = static_cast<int>(rc.get_int("threads"));
    return c;
}

}  // namespace stjem
