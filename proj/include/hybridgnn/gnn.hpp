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

// Bipartite graph network for hybrid beamforming.
//
// One analog node (the shared F_RF) is connected to K digital nodes (one
// F_BB[k] per subcarrier); edge k carries the channel of subcarrier k. Each
// of the L layers passes messages along the edges and then updates the node
// representations. The four node networks are shared by every layer and by
// every digital node, so a trained model applies to any subcarrier count.
//
// All batched matrices hold one column per edge, ordered sample-major:
// column s * K + k is subcarrier k of sample s.

#include "hybridgnn/autodiff.hpp"
#include "hybridgnn/channel.hpp"
#include "hybridgnn/system_model.hpp"

#include <array>
#include <span>
#include <vector>

namespace hbf
{

struct GnnDims
{
    int n_tx = 0;
    int n_rx = 0;
    int n_rf = 0;
    int n_streams = 0;

    Eigen::Index analog_width() const { return Eigen::Index(n_tx) * n_rf; }
    Eigen::Index digital_width() const { return Eigen::Index(2) * n_rf * n_streams; }
    Eigen::Index edge_width() const { return Eigen::Index(2) * n_tx * n_rx; }

    static GnnDims of(const SystemConfig &cfg) { return {cfg.n_tx(), cfg.n_rx(), cfg.n_rf, cfg.n_streams}; }
    bool operator==(const GnnDims &) const = default;
};

struct DenseLayer
{
    RealMatrix weight;  // out x in
    RealMatrix bias;    // out x 1
};

// in -> 2 in -> 2 in -> out with rectifiers after the two hidden layers.
struct Mlp
{
    std::array<DenseLayer, 3> layers;

    Eigen::Index input_width() const { return layers[0].weight.cols(); }
    Eigen::Index output_width() const { return layers[2].weight.rows(); }
};

struct GnnModel
{
    GnnDims dims;
    int layers = 2;
    Mlp analog_message;   // (e_k, x, mean m_d, m_a[k]) -> m_a[k]
    Mlp digital_message;  // (e_k, c_k, m_a[k], m_d[k]) -> m_d[k]
    Mlp analog_update;    // (x, mean m_d, mean e) -> x
    Mlp digital_update;   // (c_k, m_a[k], e_k) -> c_k

    // Weights and biases in declared order: the four networks as listed
    // above, each layer's weight followed by its bias.
    std::vector<RealMatrix *> parameters();
    std::vector<const RealMatrix *> parameters() const;
    std::size_t parameter_count() const;
};

Mlp init_mlp(Eigen::Index input, Eigen::Index output, Rng &rng);

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
// Throws ConfigError when layers < 1 or a dimension is not positive.
GnnModel init_model(const GnnDims &dims, int layers, Rng &rng);

// Throws ConfigError if the model cannot serve channels of this shape.
void check_compatible(const GnnModel &model, const SystemConfig &cfg);

struct GraphState
{
    Eigen::Index samples = 0;
    Eigen::Index subcarriers = 0;
    RealMatrix x;    // analog representations, A x S
    RealMatrix c;    // digital representations, D x S K
    RealMatrix m_a;  // messages towards the analog node, A x S K
    RealMatrix m_d;  // messages towards the digital nodes, D x S K
    RealMatrix e;    // edge features, E x S K
};

// [vec(Re H); vec(Im H)] with column-major vec.
RealVector edge_feature(const ComplexMatrix &hk);

// x ~ U[0, 2 pi), c ~ N(0, 1), messages zero. Samples are drawn in order,
// each drawing x before its K digital columns.
GraphState init_graph(const ChannelRealization &ch, const GnnDims &dims, Rng &rng);
GraphState init_graph(std::span<const ChannelRealization *const> batch, const GnnDims &dims, Rng &rng);

// One message-passing step of layer `layer` (1-based, at most model.layers).
void message_pass(GraphState &state, const GnnModel &model, int layer);
// Node update of layer `layer`; uses the messages of the same layer.
void node_update(GraphState &state, const GnnModel &model, int layer);

// exp(jX) with X the column-major N_t x N_RF reshape of x, and
// F_BB[k] = project_power(F_RF, C_k) with C_k built from the two halves of c_k.
HybridBeamformer reconstruct(const GraphState &state, const GnnDims &dims, Eigen::Index sample = 0);

// Runs all layers from a given initial state and reconstructs every sample.
std::vector<HybridBeamformer> propagate(GraphState state, const GnnModel &model);

HybridBeamformer forward(const ChannelRealization &ch, const GnnModel &model, Rng &rng);
std::vector<HybridBeamformer> forward(std::span<const ChannelRealization *const> batch, const GnnModel &model, Rng &rng);

// Negative spectral efficiency.
double loss(const ComplexStack &h, const HybridBeamformer &bf, LinkBudget lb);

// ---- traced evaluation --------------------------------------------------------

struct MlpVars
{
    std::array<ad::Var, 3> weight;
    std::array<ad::Var, 3> bias;
};

struct ModelVars
{
    MlpVars analog_message;
    MlpVars digital_message;
    MlpVars analog_update;
    MlpVars digital_update;

    // Same order as GnnModel::parameters().
    std::vector<ad::Var> parameters() const;
};

// Records the model on the tape, as leaves when trainable.
ModelVars bind_model(ad::Tape &tape, const GnnModel &model, bool trainable);

struct TracedGraph
{
    Eigen::Index samples = 0;
    Eigen::Index subcarriers = 0;
    ad::Var x;
    ad::Var c;
    ad::Var m_a;
    ad::Var m_d;
    ad::Var e;
    ad::Var e_mean;
};

TracedGraph trace_graph(ad::Tape &tape, const GraphState &state);
ad::Var apply_mlp(const MlpVars &net, ad::Var input);
void traced_message_pass(TracedGraph &g, const ModelVars &vars);
void traced_node_update(TracedGraph &g, const ModelVars &vars);

// Mean over the batch of the negative spectral efficiency of the
// reconstructed beamformers. The rate term is a single tape node; the batch
// channels must outlive the tape.
ad::Var traced_loss(ad::Tape &tape, const ModelVars &vars, int layers, const GraphState &init,
                    std::span<const ChannelRealization *const> batch, const GnnDims &dims, LinkBudget lb);

} // namespace hbf
