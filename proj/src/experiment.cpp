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

#include "hybridgnn/experiment.hpp"
#include "hybridgnn/dataset.hpp"
#include "hybridgnn/errors.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace hbf
{

namespace
{

constexpr std::uint64_t kDesignerStream = 0xd5a61266f0c9392cULL;
constexpr int kWarmup = 3;

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (item.empty())
            throw ConfigError("empty entry in list '" + s + "'");
        out.push_back(item);
    }
    return out;
}

Rng designer_rng(std::uint64_t seed, std::uint64_t realization, Designer d)
{
    return derive_rng(seed ^ kDesignerStream, realization * 4 + static_cast<std::uint64_t>(d));
}

SystemConfig at_grid_point(const ExperimentSpec &spec, double value, LinkBudget &lb)
{
    SystemConfig cfg = spec.system;
    switch (spec.kind)
    {
    case ExperimentKind::SnrSweep:
    case ExperimentKind::Runtime:
        lb.snr_db = value;
        break;
    case ExperimentKind::SquintSweep:
        lb.snr_db = spec.snr_db;
        cfg.bandwidth_hz = value * cfg.carrier_hz;
        break;
    case ExperimentKind::Convergence:
        throw ConfigError("convergence traces come from training, not from evaluation");
    }
    cfg.validate();
    return cfg;
}

} // namespace

std::string to_string(ExperimentKind kind)
{
    switch (kind)
    {
    case ExperimentKind::SnrSweep: return "snr-sweep";
    case ExperimentKind::SquintSweep: return "squint-sweep";
    case ExperimentKind::Convergence: return "convergence";
    case ExperimentKind::Runtime: return "runtime";
    }
    return "?";
}

std::string to_string(Designer d)
{
    switch (d)
    {
    case Designer::Gnn: return "gnn";
    case Designer::Amo: return "amo";
    case Designer::AvSingle: return "av-single";
    case Designer::FullyDigital: return "fully-digital";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(const std::string &name)
{
    for (auto k : {ExperimentKind::SnrSweep, ExperimentKind::SquintSweep, ExperimentKind::Convergence,
                   ExperimentKind::Runtime})
        if (to_string(k) == name)
            return k;
    throw ConfigError("unknown experiment kind '" + name + "'");
}

Designer parse_designer(const std::string &name)
{
    for (auto d : {Designer::Gnn, Designer::Amo, Designer::AvSingle, Designer::FullyDigital})
        if (to_string(d) == name)
            return d;
    throw ConfigError("unknown designer '" + name + "' (expected gnn, amo, av-single or fully-digital)");
}

std::vector<Designer> parse_designers(const std::string &comma_separated)
{
    std::vector<Designer> out;
    for (const auto &s : split(comma_separated))
        out.push_back(parse_designer(s));
    if (out.empty())
        throw ConfigError("empty designer list");
    return out;
}

std::vector<double> parse_grid(const std::string &comma_separated)
{
    std::vector<double> out;
    for (const auto &s : split(comma_separated))
    {
        std::size_t used = 0;
        double v = 0.0;
        try
        {
            v = std::stod(s, &used);
        }
        catch (const std::exception &)
        {
            used = 0;
        }
        if (used != s.size() || !std::isfinite(v))
            throw ConfigError("grid entry '" + s + "' is not a finite number");
        out.push_back(v);
    }
    if (out.empty())
        throw ConfigError("empty grid");
    return out;
}

void ExperimentSpec::validate() const
{
    if (grid.empty())
        throw ConfigError("experiment grid is empty");
    if (realizations < 1)
        throw ConfigError("experiment needs at least one realization");
    if (designers.empty())
        throw ConfigError("experiment has no designers");
    if (kind == ExperimentKind::SquintSweep)
        for (double b : grid)
            if (!(b >= 0.0 && b < 2.0))
                throw ConfigError("fractional bandwidth must lie in [0, 2)");
    system.validate();
    amo.validate();
}

DesignOutcome run_designer(Designer d, const ChannelRealization &ch, const SystemConfig &cfg, LinkBudget lb,
                           const DesignerSet &set, Rng &rng)
{
    using clock = std::chrono::steady_clock;
    DesignOutcome out;
    const auto t0 = clock::now();
    switch (d)
    {
    case Designer::FullyDigital: {
        const DigitalSolution sol = fully_digital(ch.h, cfg.n_streams, lb);
        out.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        out.spectral_efficiency = sol.spectral_efficiency;
        return out;
    }
    case Designer::Amo:
        out.beamformer = amo_design(ch.h, cfg.n_rf, cfg.n_streams, set.amo, lb, rng).beamformer;
        break;
    case Designer::AvSingle:
        out.beamformer = av_single(ch, cfg, lb);
        break;
    case Designer::Gnn:
        if (!set.model)
            throw ConfigError("the gnn designer needs a model");
        out.beamformer = forward(ch, *set.model, rng);
        break;
    }
    out.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    out.spectral_efficiency = spectral_efficiency(ch.h, *out.beamformer, lb);
    return out;
}

SampleStats sample_stats(const std::vector<double> &v)
{
    SampleStats s;
    if (v.empty())
        return s;
    double sum = 0.0;
    for (double x : v)
        sum += x;
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1)
    {
        double ss = 0.0;
        for (double x : v)
            ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

std::vector<RunRecord> run_eval(const ExperimentSpec &spec, const DesignerSet &set)
{
    spec.validate();
    if (spec.kind == ExperimentKind::Convergence)
        throw ConfigError("convergence traces come from training, not from evaluation");
    for (Designer d : spec.designers)
        if (d == Designer::Gnn)
        {
            if (!set.model)
                throw ConfigError("the gnn designer needs a model");
            check_compatible(*set.model, spec.system);
        }

    std::vector<RunRecord> records;
    for (double value : spec.grid)
    {
        LinkBudget lb;
        const SystemConfig cfg = at_grid_point(spec, value, lb);
        std::vector<std::vector<double>> se(spec.designers.size()), secs(spec.designers.size());
        for (int i = 0; i < spec.realizations; ++i)
        {
            Rng crng = derive_rng(spec.seed, static_cast<std::uint64_t>(i));
            const ChannelRealization ch = generate_channel(cfg, crng);
            for (std::size_t j = 0; j < spec.designers.size(); ++j)
            {
                Rng drng = designer_rng(spec.seed, static_cast<std::uint64_t>(i), spec.designers[j]);
                const DesignOutcome o = run_designer(spec.designers[j], ch, cfg, lb, set, drng);
                se[j].push_back(o.spectral_efficiency);
                secs[j].push_back(o.seconds);
            }
        }
        for (std::size_t j = 0; j < spec.designers.size(); ++j)
        {
            const SampleStats s = sample_stats(se[j]);
            const SampleStats t = sample_stats(secs[j]);
            RunRecord r;
            r.designer = spec.designers[j];
            r.grid_value = value;
            r.samples = spec.realizations;
            r.mean_se = s.mean;
            r.se_std_error = s.stddev / std::sqrt(static_cast<double>(spec.realizations));
            r.mean_seconds = t.mean;
            r.std_seconds = t.stddev;
            records.push_back(r);
        }
    }
    return records;
}

std::vector<RunRecord> run_bench(const ExperimentSpec &spec, const DesignerSet &set)
{
    spec.validate();
    if (spec.kind == ExperimentKind::Convergence)
        throw ConfigError("convergence traces come from training, not from benchmarking");
    LinkBudget lb;
    const SystemConfig cfg = at_grid_point(spec, spec.grid.front(), lb);
    for (Designer d : spec.designers)
        if (d == Designer::Gnn)
        {
            if (!set.model)
                throw ConfigError("the gnn designer needs a model");
            check_compatible(*set.model, cfg);
        }

    std::vector<ChannelRealization> channels;
    for (int i = 0; i < spec.realizations + kWarmup; ++i)
    {
        Rng crng = derive_rng(spec.seed, static_cast<std::uint64_t>(i));
        channels.push_back(generate_channel(cfg, crng));
    }

    std::vector<RunRecord> records;
    for (Designer d : spec.designers)
    {
        std::vector<double> se, secs;
        for (int i = 0; i < spec.realizations + kWarmup; ++i)
        {
            Rng drng = designer_rng(spec.seed, static_cast<std::uint64_t>(i), d);
            const DesignOutcome o = run_designer(d, channels[static_cast<std::size_t>(i)], cfg, lb, set, drng);
            if (i < kWarmup)
                continue;
            se.push_back(o.spectral_efficiency);
            secs.push_back(o.seconds);
        }
        const SampleStats s = sample_stats(se);
        const SampleStats t = sample_stats(secs);
        RunRecord r;
        r.designer = d;
        r.grid_value = lb.snr_db;
        r.samples = spec.realizations;
        r.mean_se = s.mean;
        r.se_std_error = s.stddev / std::sqrt(static_cast<double>(spec.realizations));
        r.mean_seconds = t.mean;
        r.std_seconds = t.stddev;
        records.push_back(r);
    }
    return records;
}

nlohmann::json to_json(const ExperimentSpec &spec)
{
    nlohmann::json designers = nlohmann::json::array();
    for (Designer d : spec.designers)
        designers.push_back(to_string(d));
    nlohmann::json j{{"kind", to_string(spec.kind)},
                     {"system", to_json(spec.system)},
                     {"designers", designers},
                     {"grid", spec.grid},
                     {"realizations", spec.realizations},
                     {"seed", spec.seed},
                     {"amo", to_json(spec.amo)}};
    if (spec.kind == ExperimentKind::SquintSweep)
        j["snr_db"] = spec.snr_db;
    return j;
}

void write_records_csv(std::ostream &os, const std::vector<RunRecord> &records, const nlohmann::json &metadata,
                       const std::string &grid_name)
{
    os << "# " << metadata.dump() << '\n';
    os << "designer,grid_name,grid_value,samples,mean_se,se_stderr,mean_seconds,std_seconds,peak_bytes\n";
    os << std::setprecision(17);
    for (const auto &r : records)
    {
        os << to_string(r.designer) << ',' << grid_name << ',' << r.grid_value << ',' << r.samples << ',' << r.mean_se
           << ',' << r.se_std_error << ',' << r.mean_seconds << ',' << r.std_seconds << ',';
        if (r.peak_bytes)
            os << *r.peak_bytes;
        os << '\n';
    }
}

void write_trace_row(std::ostream &os, const EpochRecord &r)
{
    os << std::setprecision(17) << r.epoch << ',' << r.learning_rate << ',' << r.train_loss << ',' << r.holdout_se
       << '\n';
}

void write_trace_csv(std::ostream &os, const std::vector<EpochRecord> &trace, const nlohmann::json &metadata)
{
    os << "# " << metadata.dump() << '\n';
    os << "epoch,lr,train_loss,holdout_SE\n";
    for (const auto &r : trace)
        write_trace_row(os, r);
}

nlohmann::json to_json(const TrainConfig &cfg)
{
    return {{"learning_rate", cfg.learning_rate}, {"halving_period", cfg.halving_period},
            {"batch_size", cfg.batch_size},       {"batches_per_epoch", cfg.batches_per_epoch},
            {"epochs", cfg.epochs},               {"beta1", cfg.beta1},
            {"beta2", cfg.beta2},                 {"epsilon", cfg.epsilon},
            {"seed", cfg.seed},                   {"snr_db", cfg.snr_db},
            {"holdout_size", cfg.holdout_size}};
}

TrainConfig train_config_from_json(const nlohmann::json &j)
{
    if (!j.is_object())
        throw ConfigError("training config must be a JSON object");
    TrainConfig c;
    try
    {
        c.learning_rate = j.value("learning_rate", c.learning_rate);
        c.halving_period = j.value("halving_period", c.halving_period);
        c.batch_size = j.value("batch_size", c.batch_size);
        c.batches_per_epoch = j.value("batches_per_epoch", c.batches_per_epoch);
        c.epochs = j.value("epochs", c.epochs);
        c.beta1 = j.value("beta1", c.beta1);
        c.beta2 = j.value("beta2", c.beta2);
        c.epsilon = j.value("epsilon", c.epsilon);
        c.seed = j.value("seed", c.seed);
        c.snr_db = j.value("snr_db", c.snr_db);
        c.holdout_size = j.value("holdout_size", c.holdout_size);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ConfigError(std::string("training config: ") + e.what());
    }
    c.validate();
    return c;
}

nlohmann::json to_json(const AmoConfig &cfg)
{
    return {{"max_outer", cfg.max_outer},
            {"max_inner", cfg.max_inner},
            {"initial_step", cfg.initial_step},
            {"contraction", cfg.contraction},
            {"sufficient_decrease", cfg.sufficient_decrease},
            {"gradient_tolerance", cfg.gradient_tolerance},
            {"objective_tolerance", cfg.objective_tolerance}};
}

AmoConfig amo_config_from_json(const nlohmann::json &j)
{
    if (!j.is_object())
        throw ConfigError("AMO config must be a JSON object");
    AmoConfig c;
    try
    {
        c.max_outer = j.value("max_outer", c.max_outer);
        c.max_inner = j.value("max_inner", c.max_inner);
        c.initial_step = j.value("initial_step", c.initial_step);
        c.contraction = j.value("contraction", c.contraction);
        c.sufficient_decrease = j.value("sufficient_decrease", c.sufficient_decrease);
        c.gradient_tolerance = j.value("gradient_tolerance", c.gradient_tolerance);
        c.objective_tolerance = j.value("objective_tolerance", c.objective_tolerance);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ConfigError(std::string("AMO config: ") + e.what());
    }
    c.validate();
    return c;
}

} // namespace hbf
