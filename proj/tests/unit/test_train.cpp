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

#include "hybridgnn/errors.hpp"
#include "hybridgnn/train.hpp"

#include "catch_amalgamated.hpp"
#include "test_support.hpp"

#include <limits>

using namespace hbf;
using Catch::Approx;

namespace
{

SystemConfig tiny()
{
    SystemConfig cfg;
    cfg.tx = {4, 2};
    cfg.rx = {2, 1};
    cfg.n_rf = 2;
    cfg.n_streams = 2;
    cfg.n_subcarriers = 2;
    return cfg;
}

TrainConfig small_schedule()
{
    TrainConfig t;
    t.batch_size = 20;
    t.batches_per_epoch = 5;
    t.epochs = 3;
    t.holdout_size = 20;
    t.learning_rate = 1e-3;
    return t;
}

std::vector<RealMatrix> snapshot(const GnnModel &m)
{
    std::vector<RealMatrix> out;
    for (const RealMatrix *p : m.parameters())
        out.push_back(*p);
    return out;
}

} // namespace

TEST_CASE("learning rate halves every period", "[train]")
{
    TrainConfig t;
    CHECK(t.learning_rate_at(1) == 2e-4);
    CHECK(t.learning_rate_at(300) == 2e-4);
    CHECK(t.learning_rate_at(301) == 1e-4);
    CHECK(t.learning_rate_at(600) == 1e-4);
    CHECK(t.learning_rate_at(601) == 5e-5);
    t.halving_period = 1;
    CHECK(t.learning_rate_at(4) == 2e-4 / 8);
}

TEST_CASE("training configuration validation", "[train]")
{
    CHECK_NOTHROW(TrainConfig{}.validate());
    auto bad = [](auto mutate) {
        TrainConfig t;
        mutate(t);
        CHECK_THROWS_AS(t.validate(), ConfigError);
    };
    bad([](TrainConfig &t) { t.learning_rate = -1.0; });
    bad([](TrainConfig &t) { t.batch_size = 0; });
    bad([](TrainConfig &t) { t.batches_per_epoch = 0; });
    bad([](TrainConfig &t) { t.epochs = -1; });
    bad([](TrainConfig &t) { t.halving_period = 0; });
    bad([](TrainConfig &t) { t.beta1 = 1.0; });
    bad([](TrainConfig &t) { t.beta2 = -0.1; });
    bad([](TrainConfig &t) { t.holdout_size = 0; });
    TrainConfig zero;
    zero.epochs = 0;
    CHECK_NOTHROW(zero.validate());
}

TEST_CASE("Adam matches the bias-corrected update", "[train]")
{
    RealMatrix p(1, 2);
    p << 1.0, -2.0;
    RealMatrix q = p;
    Adam adam({&p}, 0.9, 0.999, 1e-8);
    double m0 = 0, m1 = 0, v0 = 0, v1 = 0;
    const double grads[3][2] = {{0.5, -3.0}, {0.1, 2.0}, {-0.4, 0.0}};
    for (int t = 1; t <= 3; ++t)
    {
        RealMatrix g(1, 2);
        g << grads[t - 1][0], grads[t - 1][1];
        adam.step({g}, 0.01);
        m0 = 0.9 * m0 + 0.1 * g(0);
        m1 = 0.9 * m1 + 0.1 * g(1);
        v0 = 0.999 * v0 + 0.001 * g(0) * g(0);
        v1 = 0.999 * v1 + 0.001 * g(1) * g(1);
        const double b1 = 1 - std::pow(0.9, t), b2 = 1 - std::pow(0.999, t);
        q(0) -= 0.01 * (m0 / b1) / (std::sqrt(v0 / b2) + 1e-8);
        q(1) -= 0.01 * (m1 / b1) / (std::sqrt(v1 / b2) + 1e-8);
        CHECK(p(0) == Approx(q(0)).epsilon(1e-14));
        CHECK(p(1) == Approx(q(1)).epsilon(1e-14));
    }
    CHECK(adam.steps() == 3);

    // First step moves every coordinate by about the learning rate.
    RealMatrix r = RealMatrix::Zero(3, 1);
    Adam fresh({&r}, 0.9, 0.999, 1e-8);
    RealMatrix g(3, 1);
    g << 1e-3, -5.0, 40.0;
    fresh.step({g}, 0.1);
    CHECK(r(0) == Approx(-0.1).epsilon(1e-4));
    CHECK(r(1) == Approx(0.1).epsilon(1e-8));
    CHECK(r(2) == Approx(-0.1).epsilon(1e-8));

    CHECK_THROWS_AS(fresh.step({}, 0.1), DimensionError);
}

TEST_CASE("zero epochs return the initial model", "[train]")
{
    const SystemConfig cfg = tiny();
    Rng rng(1);
    const GnnModel m = init_model(GnnDims::of(cfg), 2, rng);
    TrainConfig t = small_schedule();
    t.epochs = 0;
    const auto ds = generate_dataset(cfg, 0, 2);
    const TrainResult r = train(ds, t, m);
    CHECK(r.trace.empty());
    CHECK(snapshot(r.model) == snapshot(m));
}

TEST_CASE("zero learning rate leaves parameters unchanged", "[train]")
{
    const SystemConfig cfg = tiny();
    Rng rng(3);
    const GnnModel m = init_model(GnnDims::of(cfg), 2, rng);
    TrainConfig t = small_schedule();
    t.learning_rate = 0.0;
    const auto ds = generate_dataset(cfg, 50, 4);
    int calls = 0;
    const TrainResult r = train(ds, t, m, [&](const EpochRecord &rec) { CHECK(rec.epoch == ++calls); });
    CHECK(calls == 3);
    CHECK(snapshot(r.model) == snapshot(m));
    REQUIRE(r.trace.size() == 3);
    CHECK(r.trace[0].holdout_se == r.trace[2].holdout_se);
    CHECK(r.trace[0].learning_rate == 0.0);
}

TEST_CASE("training is reproducible for a fixed seed", "[train]")
{
    const SystemConfig cfg = tiny();
    Rng rng(5);
    const GnnModel m = init_model(GnnDims::of(cfg), 2, rng);
    const auto ds = generate_dataset(cfg, 50, 6);
    const TrainResult a = train(ds, small_schedule(), m);
    const TrainResult b = train(ds, small_schedule(), m);
    CHECK(snapshot(a.model) == snapshot(b.model));
    CHECK(a.trace.back().train_loss == b.trace.back().train_loss);
}

TEST_CASE("gradient descent with a small step does not increase the loss", "[train]")
{
    const SystemConfig cfg = SystemConfig::desk();
    Rng rng(7);
    GnnModel m = init_model(GnnDims::of(cfg), 2, rng);
    const auto ds = generate_dataset(cfg, 20, 8);
    std::vector<const ChannelRealization *> batch;
    for (const auto &c : ds.samples)
        batch.push_back(&c);
    Rng irng(9);
    const GraphState init = init_graph(batch, m.dims, irng);

    double previous = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 10; ++it)
    {
        const LossAndGradient lg = loss_and_gradient(m, init, batch, LinkBudget{0.0});
        CHECK(lg.loss <= previous);
        previous = lg.loss;
        const auto params = m.parameters();
        REQUIRE(params.size() == lg.gradient.size());
        for (std::size_t i = 0; i < params.size(); ++i)
            *params[i] -= 1e-5 * lg.gradient[i];
    }
}

TEST_CASE("training improves the held-out rate on a small system", "[train]")
{
    const SystemConfig cfg = tiny();
    Rng rng(10);
    const GnnModel m = init_model(GnnDims::of(cfg), 2, rng);
    const auto ds = generate_dataset(cfg, 1000, 11);
    TrainConfig t = small_schedule();
    t.epochs = 50;
    t.batch_size = 50;
    t.batches_per_epoch = 10;
    t.holdout_size = 100;
    const auto holdout = holdout_set(cfg, t.holdout_size);
    const double before = mean_spectral_efficiency(m, holdout, LinkBudget{0.0}, 99);
    const TrainResult r = train(ds, t, m);
    const double after = mean_spectral_efficiency(r.model, holdout, LinkBudget{0.0}, 99);
    INFO("before " << before << " after " << after);
    CHECK(after > before);
    CHECK(r.trace.back().holdout_se > r.trace.front().holdout_se);
}

TEST_CASE("non-finite channels abort training", "[train]")
{
    const SystemConfig cfg = tiny();
    Rng rng(12);
    const GnnModel m = init_model(GnnDims::of(cfg), 2, rng);
    auto ds = generate_dataset(cfg, 5, 13);
    for (auto &c : ds.samples)
        c.h[0](0, 0) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    TrainConfig t = small_schedule();
    t.batch_size = 5;
    CHECK_THROWS_AS(train(ds, t, m), NumericError);
}

TEST_CASE("training rejects mismatched or empty inputs", "[train]")
{
    const SystemConfig cfg = tiny();
    Rng rng(14);
    const GnnModel m = init_model(GnnDims::of(cfg), 2, rng);
    CHECK_THROWS_AS(train(generate_dataset(cfg, 0, 1), small_schedule(), m), ConfigError);
    CHECK_THROWS_AS(train(generate_dataset(SystemConfig::desk(), 5, 1), small_schedule(), m), ConfigError);
}
