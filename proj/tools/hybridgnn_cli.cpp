// SPDX-License-Identifier: Apache-2.0
//
// hybridgnn: graph neural network hybrid beamforming for wideband MIMO-OFDM
// Copyright (C) 2026 The hybridgnn authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "hybridgnn/dataset.hpp"
#include "hybridgnn/errors.hpp"
#include "hybridgnn/experiment.hpp"
#include "hybridgnn/model_io.hpp"
#include "hybridgnn/train.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace
{

using nlohmann::json;

constexpr const char *kFooter = R"(Config files are JSON objects with optional sections:
  "preset":  "reference" (8x8/4x2, N_RF=N_s=4, K=8) or "desk" (4x4/2x2, N_RF=N_s=2, K=4)
  "system":  overrides of the preset (tx, rx, n_rf, n_streams, n_subcarriers,
             carrier_hz, bandwidth_hz, element_spacing_m, n_clusters, n_rays,
             angular_spread_rad or angular_spread_deg, cluster_power)
  "train":   learning_rate, halving_period, batch_size, batches_per_epoch, epochs,
             beta1, beta2, epsilon, seed, snr_db, holdout_size
  "layers":  number of message-passing layers (default 2)
  "amo":     max_outer, max_inner, initial_step, contraction, sufficient_decrease,
             gradient_tolerance, objective_tolerance

CSV outputs start with one "# {json}" line describing the run.
  train trace:  epoch,lr,train_loss,holdout_SE
  eval, bench:  designer,grid_name,grid_value,samples,mean_se,se_stderr,mean_seconds,std_seconds,peak_bytes
grid_name is snr_db for SNR sweeps and benchmarks, b for fractional-bandwidth sweeps.
peak_bytes is left empty: allocations are not instrumented.)";

struct Config
{
    hbf::SystemConfig system = hbf::SystemConfig::terahertz_reference();
    hbf::TrainConfig train;
    hbf::AmoConfig amo;
    int layers = 2;
};

Config load_config(const std::string &path)
{
    Config c;
    if (path.empty())
        return c;
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open config '" + path + "'");
    json j;
    try
    {
        j = json::parse(is);
    }
    catch (const json::exception &e)
    {
        throw hbf::ConfigError("config '" + path + "': " + e.what());
    }
    if (!j.is_object())
        throw hbf::ConfigError("config '" + path + "' is not a JSON object");
    const std::string preset = j.value("preset", std::string("reference"));
    if (preset == "desk")
        c.system = hbf::SystemConfig::desk();
    else if (preset != "reference")
        throw hbf::ConfigError("unknown preset '" + preset + "'");
    if (j.contains("system"))
    {
        json merged = hbf::to_json(c.system);
        merged.merge_patch(j["system"]);
        c.system = hbf::system_config_from_json(merged);
    }
    if (j.contains("train"))
        c.train = hbf::train_config_from_json(j["train"]);
    if (j.contains("amo"))
        c.amo = hbf::amo_config_from_json(j["amo"]);
    c.layers = j.value("layers", c.layers);
    return c;
}

std::ofstream open_out(const std::string &path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot write '" + path + "'");
    return os;
}

int cmd_gen(const std::string &config, std::size_t count, std::uint64_t seed, const std::string &out)
{
    const Config c = load_config(config);
    const hbf::ChannelDataset ds = hbf::generate_dataset(c.system, count, seed);
    hbf::dataset_write(out, ds);
    double acc = 0.0;
    for (const auto &s : ds.samples)
        acc += hbf::normalized_channel_power(s);
    std::printf("wrote %zu channels to %s\n", ds.samples.size(), out.c_str());
    if (count > 0)
        std::printf("mean ||H[k]||_F^2/(N_t N_r) = %.6f\n", acc / static_cast<double>(count));
    return 0;
}

struct TrainArgs
{
    std::string config;
    std::string data;
    std::string init_model;
    std::string out;
    std::string trace;
    std::optional<std::uint64_t> seed;
    std::optional<int> epochs;
    bool quiet = false;
};

int cmd_train(const TrainArgs &a)
{
    Config c = load_config(a.config);
    if (a.seed)
        c.train.seed = *a.seed;
    if (a.epochs)
        c.train.epochs = *a.epochs;
    c.train.validate();

    const hbf::ChannelDataset ds = hbf::dataset_read(a.data);
    const hbf::GnnDims dims = hbf::GnnDims::of(ds.config);
    hbf::GnnModel model;
    if (!a.init_model.empty())
        model = hbf::model_load(a.init_model, dims);
    else
    {
        hbf::Rng rng = hbf::derive_rng(c.train.seed, 0xa11ce);
        model = hbf::init_model(dims, c.layers, rng);
    }

    const std::string trace_path = a.trace.empty() ? a.out + ".trace.csv" : a.trace;
    std::ofstream trace = open_out(trace_path);
    const json meta{{"kind", "convergence"}, {"system", hbf::to_json(ds.config)}, {"train", hbf::to_json(c.train)},
                    {"layers", model.layers}, {"dataset", a.data}, {"dataset_samples", ds.samples.size()}};
    hbf::write_trace_csv(trace, {}, meta);

    const hbf::TrainResult res = hbf::train(ds, c.train, model, [&](const hbf::EpochRecord &r) {
        hbf::write_trace_row(trace, r);
        trace.flush();
        if (!a.quiet)
            std::fprintf(stderr, "epoch %d lr %.3g loss %.5f holdout SE %.5f\n", r.epoch, r.learning_rate,
                         r.train_loss, r.holdout_se);
    });
    hbf::model_save(a.out, res.model, {{"train", hbf::to_json(c.train)}, {"dataset", a.data}});
    std::printf("wrote model to %s and trace to %s\n", a.out.c_str(), trace_path.c_str());
    return 0;
}

struct EvalArgs
{
    std::string config;
    std::string kind = "snr-sweep";
    std::string designers = "fully-digital";
    std::string grid = "0";
    int realizations = 1000;
    std::uint64_t seed = 1;
    std::string model;
    std::string out;
    double snr_db = -5.0;
};

int cmd_eval(const EvalArgs &a, bool bench)
{
    const Config c = load_config(a.config);
    hbf::ExperimentSpec spec;
    spec.kind = bench ? hbf::ExperimentKind::Runtime : hbf::parse_experiment_kind(a.kind);
    spec.system = c.system;
    spec.designers = hbf::parse_designers(a.designers);
    spec.grid = bench ? std::vector<double>{a.snr_db} : hbf::parse_grid(a.grid);
    spec.realizations = a.realizations;
    spec.seed = a.seed;
    spec.output = a.out;
    spec.snr_db = a.snr_db;
    spec.amo = c.amo;

    std::optional<hbf::GnnModel> model;
    if (!a.model.empty())
        model = hbf::model_load(a.model);
    hbf::DesignerSet set{model ? &*model : nullptr, c.amo};

    const auto records = bench ? hbf::run_bench(spec, set) : hbf::run_eval(spec, set);
    json meta = hbf::to_json(spec);
    if (!a.model.empty())
        meta["model"] = a.model;
    const std::string grid_name = spec.kind == hbf::ExperimentKind::SquintSweep ? "b" : "snr_db";
    if (a.out.empty())
        hbf::write_records_csv(std::cout, records, meta, grid_name);
    else
    {
        std::ofstream os = open_out(a.out);
        hbf::write_records_csv(os, records, meta, grid_name);
    }
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Hybrid analog/digital beamforming for wideband MIMO-OFDM with a graph neural network"};
    app.footer(kFooter);
    app.require_subcommand(1);

    std::string gen_config, gen_out;
    std::size_t gen_count = 1000;
    std::uint64_t gen_seed = 1;
    auto *gen = app.add_subcommand("gen", "Generate a channel dataset");
    gen->add_option("--config", gen_config, "JSON config file");
    gen->add_option("--count", gen_count, "Number of channel realizations")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Master seed")->capture_default_str();
    gen->add_option("--out", gen_out, "Dataset path")->required();

    TrainArgs ta;
    std::uint64_t train_seed = 0;
    int train_epochs = 0;
    auto *tr = app.add_subcommand("train", "Train a model on a dataset");
    tr->add_option("--config", ta.config, "JSON config file");
    tr->add_option("--data", ta.data, "Dataset path")->required();
    tr->add_option("--model", ta.init_model, "Start from this model instead of a fresh initialization");
    tr->add_option("--out", ta.out, "Output model path")->required();
    tr->add_option("--trace", ta.trace, "Epoch trace CSV (default <out>.trace.csv)");
    auto *seed_opt = tr->add_option("--seed", train_seed, "Training seed (overrides the config)");
    auto *epochs_opt = tr->add_option("--epochs", train_epochs, "Epoch count (overrides the config)");
    tr->add_flag("--quiet", ta.quiet, "No per-epoch progress on stderr");

    EvalArgs ea;
    auto *ev = app.add_subcommand("eval", "Spectral efficiency sweep over SNR or fractional bandwidth");
    ev->add_option("--config", ea.config, "JSON config file");
    ev->add_option("--kind", ea.kind, "snr-sweep or squint-sweep")->capture_default_str();
    ev->add_option("--designers", ea.designers, "Comma list of gnn, amo, av-single, fully-digital")
        ->capture_default_str();
    ev->add_option("--grid", ea.grid, "Comma list of SNRs in dB, or of b = B/f_c")->capture_default_str();
    ev->add_option("--realizations", ea.realizations, "Channels per grid point")->capture_default_str();
    ev->add_option("--seed", ea.seed, "Master seed")->capture_default_str();
    ev->add_option("--model", ea.model, "Model file for the gnn designer");
    ev->add_option("--snr", ea.snr_db, "SNR in dB of a squint sweep")->capture_default_str();
    ev->add_option("--out", ea.out, "CSV path (default stdout)");

    EvalArgs ba;
    ba.realizations = 100;
    ba.snr_db = 0.0;
    auto *be = app.add_subcommand("bench", "Wall-clock seconds per CSI update");
    be->add_option("--config", ba.config, "JSON config file");
    be->add_option("--designers", ba.designers, "Comma list of gnn, amo, av-single, fully-digital")
        ->capture_default_str();
    be->add_option("--realizations", ba.realizations, "Timed channels (3 more are run first and discarded)")
        ->capture_default_str();
    be->add_option("--seed", ba.seed, "Master seed")->capture_default_str();
    be->add_option("--model", ba.model, "Model file for the gnn designer");
    be->add_option("--snr", ba.snr_db, "SNR in dB")->capture_default_str();
    be->add_option("--out", ba.out, "CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*gen)
            return cmd_gen(gen_config, gen_count, gen_seed, gen_out);
        if (*tr)
        {
            if (*seed_opt)
                ta.seed = train_seed;
            if (*epochs_opt)
                ta.epochs = train_epochs;
            return cmd_train(ta);
        }
        if (*ev)
            return cmd_eval(ea, false);
        if (*be)
            return cmd_eval(ba, true);
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
