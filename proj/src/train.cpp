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

#include "hybridgnn/train.hpp"
#include "hybridgnn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hbf
{

namespace
{

constexpr std::uint64_t kHoldoutChannelSeed = 0x5eed'0000'ffffull;
constexpr std::uint64_t kHoldoutInitSeed = 0x5eed'0001'ffffull;

} // namespace

void TrainConfig::validate() const
{
    auto fail = [](const std::string &m) { throw ConfigError("invalid train config: " + m); };
    if (!(learning_rate >= 0.0))
        fail("learning rate must be non-negative");
    if (halving_period < 1 || batch_size < 1 || batches_per_epoch < 1 || holdout_size < 1)
        fail("halving period, batch size, batches per epoch and holdout size must be positive");
    if (epochs < 0)
        fail("epochs must be non-negative");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0))
        fail("moment coefficients must lie in [0, 1) and epsilon must be positive");
}

double TrainConfig::learning_rate_at(int epoch) const
{
    const int halvings = std::max(0, epoch - 1) / halving_period;
    return learning_rate * std::ldexp(1.0, -halvings);
}

Adam::Adam(const std::vector<RealMatrix *> &params, double beta1, double beta2, double epsilon)
    : params_(params), beta1_(beta1), beta2_(beta2), epsilon_(epsilon)
{
    for (const RealMatrix *p : params_)
    {
        m_.push_back(RealMatrix::Zero(p->rows(), p->cols()));
        v_.push_back(RealMatrix::Zero(p->rows(), p->cols()));
    }
}

void Adam::step(const std::vector<RealMatrix> &grads, double learning_rate)
{
    if (grads.size() != params_.size())
        throw DimensionError("Adam::step: gradient count differs from parameter count");
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    const double step = learning_rate / c1;
    for (std::size_t i = 0; i < params_.size(); ++i)
    {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i].cwiseAbs2();
        params_[i]->array() -= step * m_[i].array() / ((v_[i].array() / c2).sqrt() + epsilon_);
    }
}

LossAndGradient loss_and_gradient(const GnnModel &model, const GraphState &init,
                                  std::span<const ChannelRealization *const> batch, LinkBudget lb)
{
    ad::Tape tape;
    const ModelVars vars = bind_model(tape, model, true);
    const ad::Var out = traced_loss(tape, vars, model.layers, init, batch, model.dims, lb);
    const ad::Gradients grads = tape.backward(out);

    LossAndGradient r;
    r.loss = out.scalar();
    for (const ad::Var &p : vars.parameters())
        r.gradient.push_back(grads[p]);
    return r;
}

std::vector<ChannelRealization> holdout_set(const SystemConfig &cfg, int size)
{
    return generate_dataset(cfg, static_cast<std::size_t>(size), kHoldoutChannelSeed).samples;
}

double mean_spectral_efficiency(const GnnModel &model, std::span<const ChannelRealization> channels, LinkBudget lb,
                                std::uint64_t init_seed)
{
    if (channels.empty())
        return 0.0;
    constexpr std::size_t kChunk = 50;
    Rng rng(init_seed);
    double acc = 0.0;
    for (std::size_t start = 0; start < channels.size(); start += kChunk)
    {
        std::vector<const ChannelRealization *> chunk;
        for (std::size_t i = start; i < std::min(channels.size(), start + kChunk); ++i)
            chunk.push_back(&channels[i]);
        const auto bfs = forward(chunk, model, rng);
        for (std::size_t i = 0; i < chunk.size(); ++i)
            acc += spectral_efficiency(chunk[i]->h, bfs[i], lb);
    }
    return acc / static_cast<double>(channels.size());
}

TrainResult train(const ChannelDataset &ds, const TrainConfig &cfg, GnnModel model, const EpochCallback &on_epoch)
{
    cfg.validate();
    check_compatible(model, ds.config);
    if (cfg.epochs > 0 && ds.samples.empty())
        throw ConfigError("train: empty dataset");

    const LinkBudget lb{cfg.snr_db};
    const auto holdout = holdout_set(ds.config, cfg.holdout_size);

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(ds.samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t cursor = order.size();

    Adam adam(model.parameters(), cfg.beta1, cfg.beta2, cfg.epsilon);
    TrainResult result;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch)
    {
        const double lr = cfg.learning_rate_at(epoch);
        double loss_acc = 0.0;
        for (int b = 0; b < cfg.batches_per_epoch; ++b)
        {
            std::vector<const ChannelRealization *> batch;
            batch.reserve(static_cast<std::size_t>(cfg.batch_size));
            while (static_cast<int>(batch.size()) < cfg.batch_size)
            {
                if (cursor >= order.size())
                {
                    std::shuffle(order.begin(), order.end(), rng);
                    cursor = 0;
                }
                batch.push_back(&ds.samples[order[cursor++]]);
            }
            const GraphState init = init_graph(batch, model.dims, rng);
            LossAndGradient lg = loss_and_gradient(model, init, batch, lb);
            if (!std::isfinite(lg.loss))
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(b + 1));
            if (lr > 0.0)
                adam.step(lg.gradient, lr);
            loss_acc += lg.loss;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.learning_rate = lr;
        rec.train_loss = loss_acc / cfg.batches_per_epoch;
        rec.holdout_se = mean_spectral_efficiency(model, holdout, lb, kHoldoutInitSeed);
        result.trace.push_back(rec);
        if (on_epoch)
            on_epoch(rec);
    }
    result.model = std::move(model);
    return result;
}

} // namespace hbf
