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

#include "hybridgnn/dataset.hpp"
#include "hybridgnn/gnn.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace hbf
{

struct TrainConfig
{
    double learning_rate = 2e-4;
    int halving_period = 300;  // epochs between learning-rate halvings
    int batch_size = 100;
    int batches_per_epoch = 100;
    int epochs = 300;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 1;
    double snr_db = 0.0;
    int holdout_size = 200;

    // Throws ConfigError unless all counts are positive (epochs may be 0),
    // the learning rate is non-negative and the moment coefficients lie in [0, 1).
    void validate() const;

    // Learning rate in effect during `epoch` (1-based).
    double learning_rate_at(int epoch) const;
};

struct EpochRecord
{
    int epoch = 0;
    double learning_rate = 0.0;
    double train_loss = 0.0;  // mean batch loss over the epoch
    double holdout_se = 0.0;  // mean spectral efficiency on the held-out set
};

struct TrainResult
{
    GnnModel model;
    std::vector<EpochRecord> trace;
};

// Adaptive-moment optimizer state over a flat list of parameter matrices.
class Adam
{
public:
    Adam(const std::vector<RealMatrix *> &params, double beta1, double beta2, double epsilon);

    void step(const std::vector<RealMatrix> &grads, double learning_rate);
    long steps() const { return t_; }

private:
    std::vector<RealMatrix *> params_;
    std::vector<RealMatrix> m_;
    std::vector<RealMatrix> v_;
    double beta1_;
    double beta2_;
    double epsilon_;
    long t_ = 0;
};

struct LossAndGradient
{
    double loss = 0.0;
    std::vector<RealMatrix> gradient;  // GnnModel::parameters() order
};

// Mean batch loss and its gradient with respect to every model parameter.
LossAndGradient loss_and_gradient(const GnnModel &model, const GraphState &init,
                                  std::span<const ChannelRealization *const> batch, LinkBudget lb);

// Fixed 200-sample (by default) evaluation set drawn from a reserved seed.
std::vector<ChannelRealization> holdout_set(const SystemConfig &cfg, int size);

// Mean spectral efficiency of the model on `channels`, with graph
// initializations drawn from `init_seed`.
double mean_spectral_efficiency(const GnnModel &model, std::span<const ChannelRealization> channels, LinkBudget lb,
                                std::uint64_t init_seed);

using EpochCallback = std::function<void(const EpochRecord &)>;

// Mini-batch training on the dataset. Each epoch reshuffles the dataset and
// takes batches_per_epoch consecutive batches, wrapping with a fresh shuffle
// when the dataset is exhausted. Throws NumericError on a non-finite loss.
TrainResult train(const ChannelDataset &ds, const TrainConfig &cfg, GnnModel model, const EpochCallback &on_epoch = {});

} // namespace hbf
