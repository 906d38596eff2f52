// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Everything goes through the C API in stjem.h;
// this file only parses arguments and formats output.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stjem/stjem.h"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitTrainingFailed = 2;

[[noreturn]] void die(int rc) {
    std::fprintf(stderr, "error: %s\n", stjem_last_error());
    std::exit(rc == STJEM_ERR_TRAINING_FAILED ? kExitTrainingFailed : kExitValidation);
}

void check(int rc) {
    if (rc != STJEM_OK) die(rc);
}

struct ConfigHandle {
    stjem_config* ptr = nullptr;
    ~ConfigHandle() { stjem_config_free(ptr); }
};
struct DatasetHandle {
    stjem_dataset* ptr = nullptr;
    ~DatasetHandle() { stjem_dataset_free(ptr); }
};
struct NetHandle {
    stjem_net* ptr = nullptr;
    ~NetHandle() { stjem_net_free(ptr); }
};

// Shared --config/--set/--seed/--threads handling. Precedence: defaults,
// then config file, then STJEM_* environment, then explicit flags.
struct ConfigArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::string seed;
    std::string threads;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration file (key = value lines)");
        cmd->add_option("--set", sets, "override a single config key, e.g. --set lr=0.01");
        cmd->add_option("--seed", seed, "master PRNG seed");
        cmd->add_option("--threads", threads, "worker threads for SGLD chains");
    }

    stjem_config* build() const {
        stjem_config* cfg = nullptr;
        if (config_path.empty())
            check(stjem_config_create(&cfg));
        else
            check(stjem_config_load(config_path.c_str(), &cfg));
        check(stjem_config_apply_env(cfg));
        for (const std::string& kv : sets) {
            std::size_t eq = kv.find('=');
            if (eq == std::string::npos) {
                std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
                std::exit(kExitValidation);
            }
            check(stjem_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
        }
        if (!seed.empty()) check(stjem_config_set(cfg, "seed", seed.c_str()));
        if (!threads.empty()) check(stjem_config_set(cfg, "threads", threads.c_str()));
        return cfg;
    }
};

std::vector<double> dataset_points(const stjem_dataset* d, int* n_out, int* dx_out,
                                   std::vector<int>* labels_out) {
    int n = 0, dx = 0, dy = 0;
    check(stjem_dataset_dims(d, &n, &dx, &dy));
    std::vector<double> xs(static_cast<std::size_t>(n) * dx);
    if (labels_out) labels_out->resize(n);
    for (int i = 0; i < n; ++i) {
        int label = 0, labeled = 0;
        check(stjem_dataset_row(d, i, xs.data() + static_cast<std::size_t>(i) * dx, &label,
                                &labeled));
        if (labels_out) (*labels_out)[i] = label;
    }
    *n_out = n;
    *dx_out = dx;
    return xs;
}

std::uint64_t parse_seed(const std::string& s) { return s.empty() ? 0 : std::stoull(s); }

int cmd_train(const ConfigArgs& cargs, const std::string& data_spec,
              const std::string& eval_spec, const std::string& out_dir, int mask_keep,
              std::uint64_t mask_seed, const std::string& dump_data) {
    ConfigHandle cfg{cargs.build()};
    DatasetHandle train_data;
    check(stjem_dataset_make(data_spec.c_str(), &train_data.ptr));

    DatasetHandle masked;
    if (mask_keep >= 0) {
        char warning[256] = {0};
        check(stjem_dataset_mask_labels(train_data.ptr, mask_keep, mask_seed, &masked.ptr,
                                        warning, sizeof(warning)));
        if (warning[0]) std::fprintf(stderr, "warning: %s\n", warning);
        std::swap(masked.ptr, train_data.ptr);
    }
    if (!dump_data.empty()) check(stjem_dataset_dump_csv(train_data.ptr, dump_data.c_str()));

    DatasetHandle eval_data;
    if (!eval_spec.empty()) check(stjem_dataset_make(eval_spec.c_str(), &eval_data.ptr));

    NetHandle net;
    check(stjem_train(cfg.ptr, train_data.ptr, eval_data.ptr, out_dir.c_str(), &net.ptr));

    const std::string model_path = (std::filesystem::path(out_dir) / "model.net").string();
    check(stjem_net_save(net.ptr, model_path.c_str()));

    double acc = 0, ece = 0, xent = 0;
    check(stjem_evaluate(net.ptr, eval_data.ptr ? eval_data.ptr : train_data.ptr, &acc, &ece,
                         &xent));
    std::printf("model: %s\naccuracy: %.6f\nece: %.6f\nmean_xent: %.6f\n", model_path.c_str(),
                acc, ece, xent);
    return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& data_spec) {
    NetHandle net;
    check(stjem_net_load(checkpoint.c_str(), &net.ptr));
    DatasetHandle data;
    check(stjem_dataset_make(data_spec.c_str(), &data.ptr));
    double acc = 0, ece = 0, xent = 0;
    check(stjem_evaluate(net.ptr, data.ptr, &acc, &ece, &xent));
    std::printf("accuracy: %.17g\nece: %.17g\nmean_xent: %.17g\n", acc, ece, xent);
    return 0;
}

int cmd_sample(const std::string& checkpoint, int class_index, int n, int steps, double step_size,
               double noise, std::uint64_t seed, const std::string& out_csv,
               const std::string& ppm, const std::string& diagnostics) {
    NetHandle net;
    check(stjem_net_load(checkpoint.c_str(), &net.ptr));
    int dx = 0, dy = 0;
    check(stjem_net_dims(net.ptr, &dx, &dy));

    std::vector<double> xs(static_cast<std::size_t>(n) * dx);
    check(stjem_sample(net.ptr, class_index, n, steps, step_size, noise, seed, xs.data(),
                       diagnostics.empty() ? nullptr : diagnostics.c_str()));

    std::ofstream os(out_csv);
    if (!os) {
        std::fprintf(stderr, "error: cannot open for writing: %s\n", out_csv.c_str());
        return kExitValidation;
    }
    for (int j = 0; j < dx; ++j) os << "x" << j << ",";
    os << "class\n";
    char buf[40];
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < dx; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g,", xs[static_cast<std::size_t>(i) * dx + j]);
            os << buf;
        }
        os << class_index << "\n";
    }

    if (!ppm.empty()) {
        std::vector<int> labels(n, class_index);
        check(stjem_write_scatter_ppm(ppm.c_str(), xs.data(), n, dx, labels.data(), 256));
    }
    std::printf("wrote %d samples to %s\n", n, out_csv.c_str());
    return 0;
}

int cmd_denoise(const std::string& checkpoint, const std::string& data_spec, int class_index,
                int steps, double step_size, double corrupt_sd, std::uint64_t seed,
                const std::string& out_csv) {
    NetHandle net;
    check(stjem_net_load(checkpoint.c_str(), &net.ptr));
    DatasetHandle data;
    check(stjem_dataset_make(data_spec.c_str(), &data.ptr));

    int n = 0, dx = 0;
    std::vector<double> before = dataset_points(data.ptr, &n, &dx, nullptr);
    if (corrupt_sd > 0.0) {
        // Box-Muller off a splitmix-style scramble of the seed; corruption is
        // presentation-level, the library never sees the clean points.
        std::uint64_t state = seed;
        auto next_u64 = [&state] {
            std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        };
        for (double& v : before) {
            double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
            double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
            v += corrupt_sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        }
    }

    std::vector<double> after(before.size());
    check(stjem_denoise(net.ptr, before.data(), n, dx, class_index, steps, step_size,
                        after.data()));

    std::ofstream os(out_csv);
    if (!os) {
        std::fprintf(stderr, "error: cannot open for writing: %s\n", out_csv.c_str());
        return kExitValidation;
    }
    for (int j = 0; j < dx; ++j) os << "before_x" << j << ",";
    for (int j = 0; j < dx; ++j) os << "after_x" << j << (j + 1 < dx ? "," : "");
    os << "\n";
    char buf[40];
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < dx; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g,", before[static_cast<std::size_t>(i) * dx + j]);
            os << buf;
        }
        for (int j = 0; j < dx; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g%s", after[static_cast<std::size_t>(i) * dx + j],
                          j + 1 < dx ? "," : "");
            os << buf;
        }
        os << "\n";
    }
    std::printf("wrote before/after pairs to %s\n", out_csv.c_str());
    return 0;
}

int cmd_combine(const std::vector<std::string>& checkpoints,
                const std::vector<std::string>& data_specs, const std::string& out_csv) {
    std::vector<NetHandle> nets(checkpoints.size());
    std::vector<const stjem_net*> members;
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        check(stjem_net_load(checkpoints[i].c_str(), &nets[i].ptr));
        members.push_back(nets[i].ptr);
    }
    std::vector<DatasetHandle> datasets(data_specs.size());
    std::vector<const stjem_dataset*> ds;
    for (std::size_t i = 0; i < data_specs.size(); ++i) {
        check(stjem_dataset_make(data_specs[i].c_str(), &datasets[i].ptr));
        ds.push_back(datasets[i].ptr);
    }
    check(stjem_combine_eval(members.data(), static_cast<int>(members.size()), ds.data(),
                             static_cast<int>(ds.size()), out_csv.c_str()));
    std::printf("wrote comparison table to %s\n", out_csv.c_str());
    return 0;
}

int cmd_oracle_check(int grid, std::uint64_t seed) {
    std::vector<char> report(16384);
    int all_pass = 0;
    check(stjem_oracle_check(grid, seed, report.data(), report.size(), &all_pass));
    std::fputs(report.data(), stdout);
    std::printf("oracle-check: %s\n", all_pass ? "PASS" : "FAIL");
    return all_pass ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stjem: stabilized joint energy-based model training"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "train a model and write checkpoints + metrics");
    ConfigArgs train_cfg;
    train_cfg.attach(train);
    std::string train_data, train_eval, train_out, train_dump;
    int mask_keep = -1;
    std::string mask_seed;
    train->add_option("--data", train_data, "training data (csv path or generator spec)")
        ->required();
    train->add_option("--eval-data", train_eval, "held-out data for the eval rows");
    train->add_option("--out", train_out, "output directory")->required();
    train->add_option("--mask-labels", mask_keep, "keep only this many labels (stratified)");
    train->add_option("--mask-seed", mask_seed, "seed for label masking");
    train->add_option("--dump-data", train_dump, "write the materialized training set here");

    // eval
    auto* eval = app.add_subcommand("eval", "accuracy/ECE/cross-entropy of a checkpoint");
    std::string eval_ckpt, eval_data;
    eval->add_option("--checkpoint", eval_ckpt, "model checkpoint (.net)")->required();
    eval->add_option("--data", eval_data, "dataset (csv path or generator spec)")->required();

    // sample
    auto* sample = app.add_subcommand("sample", "draw SGLD samples from a checkpoint");
    std::string sample_ckpt, sample_out, sample_ppm, sample_diag, sample_seed;
    int sample_class = -1, sample_n = 100, sample_steps = 100;
    double sample_step_size = 1.0, sample_noise = 0.01;
    sample->add_option("--checkpoint", sample_ckpt, "model checkpoint (.net)")->required();
    sample->add_option("--class", sample_class, "conditioning class (-1 = marginal)");
    sample->add_option("--n", sample_n, "number of samples");
    sample->add_option("--steps", sample_steps, "SGLD steps per chain");
    sample->add_option("--step-size", sample_step_size, "SGLD step size");
    sample->add_option("--noise", sample_noise, "SGLD noise scale");
    sample->add_option("--seed", sample_seed, "sampling seed");
    sample->add_option("--out", sample_out, "output CSV")->required();
    sample->add_option("--ppm", sample_ppm, "also write a P6 scatter image (2-D only)");
    sample->add_option("--diagnostics", sample_diag, "write the first chain's energy trace CSV");

    // denoise
    auto* denoise = app.add_subcommand("denoise", "greedy energy-ascent denoising");
    std::string den_ckpt, den_data, den_out, den_seed;
    int den_class = -1, den_steps = 50;
    double den_step_size = 0.5, den_corrupt = 0.0;
    denoise->add_option("--checkpoint", den_ckpt, "model checkpoint (.net)")->required();
    denoise->add_option("--data", den_data, "points to denoise (csv path or generator spec)")
        ->required();
    denoise->add_option("--class", den_class, "conditioning class (-1 = marginal)");
    denoise->add_option("--steps", den_steps, "denoising steps");
    denoise->add_option("--step-size", den_step_size, "initial step size (backtracked)");
    denoise->add_option("--corrupt-sd", den_corrupt, "add this much Gaussian noise first");
    denoise->add_option("--seed", den_seed, "corruption seed");
    denoise->add_option("--out", den_out, "before/after CSV")->required();

    // combine
    auto* combine = app.add_subcommand("combine", "compare ensemble members and their combination");
    std::vector<std::string> comb_ckpts, comb_datasets;
    std::string comb_out;
    combine->add_option("--checkpoint", comb_ckpts, "member checkpoints (repeat)")->required();
    combine->add_option("--data", comb_datasets, "evaluation datasets (repeat)")->required();
    combine->add_option("--out", comb_out, "comparison CSV")->required();

    // oracle-check
    auto* oracle = app.add_subcommand("oracle-check", "run the oracle-vs-estimator suite");
    int oracle_grid = 512;
    std::string oracle_seed;
    oracle->add_option("--grid", oracle_grid, "grid points");
    oracle->add_option("--seed", oracle_seed, "net seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    if (train->parsed())
        return cmd_train(train_cfg, train_data, train_eval, train_out, mask_keep,
                         parse_seed(mask_seed), train_dump);
    if (eval->parsed()) return cmd_eval(eval_ckpt, eval_data);
    if (sample->parsed())
        return cmd_sample(sample_ckpt, sample_class, sample_n, sample_steps, sample_step_size,
                          sample_noise, parse_seed(sample_seed), sample_out, sample_ppm,
                          sample_diag);
    if (denoise->parsed())
        return cmd_denoise(den_ckpt, den_data, den_class, den_steps, den_step_size, den_corrupt,
                           parse_seed(den_seed), den_out);
    if (combine->parsed()) return cmd_combine(comb_ckpts, comb_datasets, comb_out);
    if (oracle->parsed()) return cmd_oracle_check(oracle_grid, parse_seed(oracle_seed));
    return kExitValidation;
}
