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

#pragma once

// Evaluation sweeps, runtime benchmarks and their CSV emission.

#include "hybridgnn/baselines.hpp"
#include "hybridgnn/gnn.hpp"
#include "hybridgnn/train.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hbf
{

enum class ExperimentKind
{
    SnrSweep,
    SquintSweep,
    Convergence,
    Runtime
};

enum class Designer
{
    Gnn,
    Amo,
    AvSingle,
    FullyDigital
};

std::string to_string(ExperimentKind kind);
std::string to_string(Designer d);
// Throw ConfigError on unknown names.
ExperimentKind parse_experiment_kind(const std::string &name);
Designer parse_designer(const std::string &name);
std::vector<Designer> parse_designers(const std::string &comma_separated);
std::vector<double> parse_grid(const std::string &comma_separated);

struct ExperimentSpec
{
    ExperimentKind kind = ExperimentKind::SnrSweep;
    SystemConfig system;
    std::vector<Designer> designers{Designer::FullyDigital};
    // SNR in dB for snr-sweep, fractional bandwidth B / f_c for squint-sweep.
    // Runtime benchmarks use a single point, the SNR.
    std::vector<double> grid{0.0};
    int realizations = 1000;
    std::uint64_t seed = 1;
    std::filesystem::path output;
    // Fixed SNR of a squint sweep.
    double snr_db = -5.0;
    AmoConfig amo;

    // Throws ConfigError if the grid is empty, realizations < 1, a squint
    // grid point is not in [0, 2) or the system config is invalid.
    void validate() const;
};

struct RunRecord
{
    Designer designer = Designer::FullyDigital;
    double grid_value = 0.0;
    int samples = 0;
    double mean_se = 0.0;
    double se_std_error = 0.0;
    double mean_seconds = 0.0;
    double std_seconds = 0.0;
    std::optional<std::size_t> peak_bytes;
};

// The GNN rows need a model compatible with the spec's system config.
struct DesignerSet
{
    const GnnModel *model = nullptr;
    AmoConfig amo;
};

// Spectral efficiency of one designer on one channel, plus the wall-clock
// seconds spent inside the designer call.
struct DesignOutcome
{
    double spectral_efficiency = 0.0;
    double seconds = 0.0;
    std::optional<HybridBeamformer> beamformer;  // absent for fully digital
};

DesignOutcome run_designer(Designer d, const ChannelRealization &ch, const SystemConfig &cfg, LinkBudget lb,
                           const DesignerSet &set, Rng &rng);

// Channel i of every grid point is drawn from derive_rng(seed, i), so points
// differ only in the swept parameter. Designer randomness for channel i is
// independent of the grid point as well.
std::vector<RunRecord> run_eval(const ExperimentSpec &spec, const DesignerSet &set);

// Per designer: mean and sample standard deviation of seconds per CSI update
// over `realizations` channels after three discarded warm-up calls.
std::vector<RunRecord> run_bench(const ExperimentSpec &spec, const DesignerSet &set);

struct SampleStats
{
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for one sample
};
SampleStats sample_stats(const std::vector<double> &v);

nlohmann::json to_json(const ExperimentSpec &spec);

// Columns: designer, grid_name, grid_value, samples, mean_se, se_stderr,
// mean_seconds, std_seconds, peak_bytes. Preceded by "# " and a one-line JSON
// description of the experiment.
void write_records_csv(std::ostream &os, const std::vector<RunRecord> &records, const nlohmann::json &metadata,
                       const std::string &grid_name);

// Columns: epoch, lr, train_loss, holdout_SE.
void write_trace_csv(std::ostream &os, const std::vector<EpochRecord> &trace, const nlohmann::json &metadata);
void write_trace_row(std::ostream &os, const EpochRecord &r);

nlohmann::json to_json(const TrainConfig &cfg);
TrainConfig train_config_from_json(const nlohmann::json &j);
nlohmann::json to_json(const AmoConfig &cfg);
AmoConfig amo_config_from_json(const nlohmann::json &j);

} // namespace hbf
