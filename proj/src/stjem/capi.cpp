// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#include "stjem/stjem.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "stjem/combiner.hpp"
#include "stjem/config.hpp"
#include "stjem/data.hpp"
#include "stjem/energy_net.hpp"
#include "stjem/errors.hpp"
#include "stjem/oracle.hpp"
#include "stjem/sgld.hpp"
#include "stjem/trainer.hpp"

// Opaque handle types: thin wrappers around the C++ objects.
struct stjem_net {
    stjem::EnergyNetwork net;
};
struct stjem_dataset {
    stjem::Dataset data;
};
struct stjem_config {
    stjem::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

int fail(stjem_status code, const std::string& what) {
    g_last_error = what;
    return code;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return STJEM_OK;
    } catch (const stjem::format_error& e) {
        return fail(STJEM_ERR_FORMAT, e.what());
    } catch (const stjem::io_error& e) {
        return fail(STJEM_ERR_IO, e.what());
    } catch (const stjem::sampler_divergence& e) {
        return fail(STJEM_ERR_DIVERGENCE, e.what());
    } catch (const stjem::training_failed& e) {
        return fail(STJEM_ERR_TRAINING_FAILED, e.what());
    } catch (const stjem::resource_limit& e) {
        return fail(STJEM_ERR_RESOURCE_LIMIT, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(STJEM_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(STJEM_ERR_INTERNAL, e.what());
    }
}

int require(bool ok, const char* what) {
    return ok ? STJEM_OK : fail(STJEM_ERR_INVALID_ARGUMENT, what);
}

void copy_to_buf(const std::string& s, char* buf, size_t buflen) {
    if (!buf || buflen == 0) return;
    const size_t n = std::min(s.size(), buflen - 1);
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
}

int build_ensemble(const stjem_net* const* members, int n_members, stjem::ModelEnsemble& out);

}  // namespace

extern "C" {

const char* stjem_last_error(void) { return g_last_error.c_str(); }

int stjem_config_create(stjem_config** out) {
    if (int rc = require(out, "config_create: null output")) return rc;
    return guarded([&] { *out = new stjem_config{stjem::RunConfig()}; });
}

int stjem_config_load(const char* path, stjem_config** out) {
    if (int rc = require(path && out, "config_load: null argument")) return rc;
    return guarded([&] { *out = new stjem_config{stjem::RunConfig::load(path)}; });
}

int stjem_config_set(stjem_config* cfg, const char* key, const char* value) {
    if (int rc = require(cfg && key && value, "config_set: null argument")) return rc;
    return guarded([&] { cfg->cfg.set(key, value); });
}

int stjem_config_get(const stjem_config* cfg, const char* key, char* buf, size_t buflen) {
    if (int rc = require(cfg && key && buf, "config_get: null argument")) return rc;
    return guarded([&] { copy_to_buf(cfg->cfg.get(key), buf, buflen); });
}

int stjem_config_apply_env(stjem_config* cfg) {
    if (int rc = require(cfg, "config_apply_env: null config")) return rc;
    return guarded([&] { cfg->cfg.apply_env_overrides(); });
}

void stjem_config_free(stjem_config* cfg) { delete cfg; }

int stjem_dataset_make(const char* spec, stjem_dataset** out) {
    if (int rc = require(spec && out, "dataset_make: null argument")) return rc;
    return guarded([&] { *out = new stjem_dataset{stjem::dataset_from_spec(spec)}; });
}

int stjem_dataset_load_csv(const char* path, stjem_dataset** out) {
    if (int rc = require(path && out, "dataset_load_csv: null argument")) return rc;
    return guarded([&] { *out = new stjem_dataset{stjem::load_csv(path)}; });
}

int stjem_dataset_dump_csv(const stjem_dataset* d, const char* path) {
    if (int rc = require(d && path, "dataset_dump_csv: null argument")) return rc;
    return guarded([&] { stjem::dump_csv(d->data, path); });
}

int stjem_dataset_mask_labels(const stjem_dataset* d, int keep_n, uint64_t seed,
                              stjem_dataset** out, char* warning_buf, size_t warning_buflen) {
    if (int rc = require(d && out, "dataset_mask_labels: null argument")) return rc;
    return guarded([&] {
        stjem::MaskResult r = stjem::mask_labels(d->data, keep_n, seed);
        copy_to_buf(r.warning, warning_buf, warning_buflen);
        *out = new stjem_dataset{std::move(r.dataset)};
    });
}

int stjem_dataset_split(const stjem_dataset* d, int n_head, stjem_dataset** head,
                        stjem_dataset** tail) {
    if (int rc = require(d && head && tail, "dataset_split: null argument")) return rc;
    return guarded([&] {
        auto [h, t] = d->data.split(n_head);
        *head = new stjem_dataset{std::move(h)};
        *tail = new stjem_dataset{std::move(t)};
    });
}

int stjem_dataset_dims(const stjem_dataset* d, int* n, int* dx, int* dy) {
    if (int rc = require(d, "dataset_dims: null dataset")) return rc;
    if (n) *n = d->data.n;
    if (dx) *dx = d->data.dx;
    if (dy) *dy = d->data.dy;
    return STJEM_OK;
}

int stjem_dataset_row(const stjem_dataset* d, int i, double* x_out, int* label_out,
                      int* labeled_out) {
    if (int rc = require(d, "dataset_row: null dataset")) return rc;
    if (int rc = require(i >= 0 && i < d->data.n, "dataset_row: index out of range")) return rc;
    if (x_out) {
        auto row = d->data.row(i);
        std::memcpy(x_out, row.data(), row.size() * sizeof(double));
    }
    if (label_out) *label_out = d->data.ys[i];
    if (labeled_out) *labeled_out = d->data.labeled_mask[i] ? 1 : 0;
    return STJEM_OK;
}

void stjem_dataset_free(stjem_dataset* d) { delete d; }

int stjem_net_load(const char* path, stjem_net** out) {
    if (int rc = require(path && out, "net_load: null argument")) return rc;
    return guarded([&] { *out = new stjem_net{stjem::EnergyNetwork::load(path)}; });
}

int stjem_net_save(const stjem_net* net, const char* path) {
    if (int rc = require(net && path, "net_save: null argument")) return rc;
    return guarded([&] { net->net.save(path); });
}

int stjem_net_dims(const stjem_net* net, int* dx, int* dy) {
    if (int rc = require(net, "net_dims: null net")) return rc;
    if (dx) *dx = net->net.input_dim();
    if (dy) *dy = net->net.output_dim();
    return STJEM_OK;
}

int stjem_net_forward(const stjem_net* net, const double* x, int dx, double* logits_out, int dy) {
    if (int rc = require(net && x && logits_out, "net_forward: null argument")) return rc;
    if (int rc = require(dx == net->net.input_dim() && dy == net->net.output_dim(),
                         "net_forward: dimension mismatch"))
        return rc;
    return guarded([&] {
        stjem::Logits q = net->net.forward({x, static_cast<size_t>(dx)});
        std::memcpy(logits_out, q.data(), q.size() * sizeof(double));
    });
}

void stjem_net_free(stjem_net* net) { delete net; }

int stjem_train(const stjem_config* cfg, const stjem_dataset* train_data,
                const stjem_dataset* eval_data, const char* out_dir, stjem_net** out_net) {
    if (int rc = require(cfg && train_data && out_net, "train: null argument")) return rc;
    return guarded([&] {
        stjem::TrainConfig tc = stjem::train_config_from(cfg->cfg);
        stjem::TrainResult result =
            stjem::train(tc, train_data->data, eval_data ? &eval_data->data : nullptr,
                         out_dir ? out_dir : "");
        *out_net = new stjem_net{std::move(result.net)};
    });
}

int stjem_evaluate(const stjem_net* net, const stjem_dataset* data, double* accuracy,
                   double* ece_out, double* mean_xent) {
    if (int rc = require(net && data, "evaluate: null argument")) return rc;
    return guarded([&] {
        stjem::EvalResult r = stjem::evaluate(net->net, data->data);
        if (accuracy) *accuracy = r.accuracy;
        if (ece_out) *ece_out = r.ece;
        if (mean_xent) *mean_xent = r.mean_xent;
    });
}

int stjem_sample(const stjem_net* net, int class_index, int n, int n_steps, double step_size,
                 double noise_scale, uint64_t seed, double* out_xs, const char* diagnostics_csv) {
    if (int rc = require(net && out_xs, "sample: null argument")) return rc;
    if (int rc = require(n > 0 && n_steps > 0, "sample: n and n_steps must be positive")) return rc;
    return guarded([&] {
        stjem::SgldConfig cfg;
        cfg.step_size = step_size;
        cfg.noise_scale = noise_scale;
        cfg.n_steps = n_steps;
        cfg.init = stjem::SgldConfig::Init::UniformRandom;
        cfg.target = class_index < 0 ? stjem::GradHead::marginal()
                                     : stjem::GradHead::class_of(class_index);
        stjem::Rng rng(seed);
        const int dx = net->net.input_dim();
        for (int i = 0; i < n; ++i) {
            stjem::Rng chain_rng(rng.next_u64());
            stjem::ChainResult r = stjem::run_chain(net->net, cfg, chain_rng);
            std::memcpy(out_xs + static_cast<size_t>(i) * dx, r.sample.data(),
                        static_cast<size_t>(dx) * sizeof(double));
            if (i == 0 && diagnostics_csv) {
                std::ofstream os(diagnostics_csv);
                if (!os)
                    throw stjem::io_error(std::string("cannot open for writing: ") +
                                          diagnostics_csv);
                r.diagnostics.write_csv(os);
            }
        }
    });
}

int stjem_denoise(const stjem_net* net, const double* xs, int n, int dx, int class_index,
                  int n_steps, double step_size, double* out_xs) {
    if (int rc = require(net && xs && out_xs, "denoise: null argument")) return rc;
    if (int rc = require(n > 0 && dx == net->net.input_dim(), "denoise: bad dimensions")) return rc;
    return guarded([&] {
        stjem::SgldConfig cfg;
        cfg.step_size = step_size;
        cfg.noise_scale = 0.0;
        cfg.n_steps = n_steps;
        cfg.target = class_index < 0 ? stjem::GradHead::marginal()
                                     : stjem::GradHead::class_of(class_index);
        for (int i = 0; i < n; ++i) {
            std::vector<double> result = stjem::denoise(
                net->net, {xs + static_cast<size_t>(i) * dx, static_cast<size_t>(dx)}, cfg);
            std::memcpy(out_xs + static_cast<size_t>(i) * dx, result.data(),
                        static_cast<size_t>(dx) * sizeof(double));
        }
    });
}

int stjem_combine_logits(const stjem_net* const* members, int n_members, const double* x, int dx,
                         double* logits_out, int dy) {
    if (int rc = require(x && logits_out, "combine_logits: null argument")) return rc;
    stjem::ModelEnsemble ensemble;
    if (int rc = build_ensemble(members, n_members, ensemble)) return rc;
    if (int rc = require(dx == ensemble.input_dim() && dy == ensemble.output_dim(),
                         "combine_logits: dimension mismatch"))
        return rc;
    return guarded([&] {
        stjem::Logits q = stjem::combine_logits(ensemble, {x, static_cast<size_t>(dx)});
        std::memcpy(logits_out, q.data(), q.size() * sizeof(double));
    });
}

int stjem_combine_eval(const stjem_net* const* members, int n_members,
                       const stjem_dataset* const* datasets, int n_datasets,
                       const char* out_csv_path) {
    if (int rc = require(datasets && n_datasets >= 1 && out_csv_path,
                         "combine_eval: null argument"))
        return rc;
    stjem::ModelEnsemble ensemble;
    if (int rc = build_ensemble(members, n_members, ensemble)) return rc;
    return guarded([&] {
        std::vector<stjem::Dataset> ds;
        for (int i = 0; i < n_datasets; ++i) {
            if (!datasets[i]) throw std::invalid_argument("combine_eval: null dataset");
            ds.push_back(datasets[i]->data);
        }
        auto rows = stjem::evaluate_combination(ensemble, ds);
        std::ofstream os(out_csv_path);
        if (!os) throw stjem::io_error(std::string("cannot open for writing: ") + out_csv_path);
        stjem::write_combination_csv(rows, os);
    });
}

int stjem_oracle_check(int grid_points, uint64_t seed, char* report_buf, size_t report_buflen,
                       int* all_pass) {
    return guarded([&] {
        stjem::OracleCheckReport report = stjem::oracle_check(grid_points, seed);
        std::ostringstream os;
        for (const auto& item : report.items)
            os << (item.pass ? "[PASS] " : "[FAIL] ") << item.name << ": " << item.detail << "\n";
        copy_to_buf(os.str(), report_buf, report_buflen);
        if (all_pass) *all_pass = report.all_pass() ? 1 : 0;
    });
}

int stjem_write_scatter_ppm(const char* path, const double* xs, int n, int dx, const int* labels,
                            int image_size) {
    if (int rc = require(path && xs, "write_scatter_ppm: null argument")) return rc;
    return guarded([&] {
        std::span<const int> label_span;
        if (labels) label_span = {labels, static_cast<size_t>(n)};
        stjem::write_scatter_ppm(path, {xs, static_cast<size_t>(n) * dx}, n, dx, label_span,
                                 image_size);
    });
}

}  // extern "C"

namespace {

int build_ensemble(const stjem_net* const* members, int n_members, stjem::ModelEnsemble& out) {
    if (int rc = require(members && n_members >= 1, "combine: need at least one member")) return rc;
    for (int i = 0; i < n_members; ++i)
        if (int rc = require(members[i] != nullptr, "combine: null member")) return rc;
    for (int i = 0; i < n_members; ++i) out.members.push_back(members[i]->net);
    const int dy = out.members.front().output_dim();
    out.prior.assign(dy, 1.0 / dy);
    return STJEM_OK;
}

}  // namespace
