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

#include "hybridgnn/gnn.hpp"
#include "hybridgnn/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hbf
{

using Eigen::Index;

// ---- model -------------------------------------------------------------------

namespace
{

DenseLayer init_dense(Index in, Index out, Rng &rng)
{
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-bound, bound);
    DenseLayer layer{RealMatrix(out, in), RealMatrix(out, 1)};
    for (Index j = 0; j < in; ++j)
        for (Index i = 0; i < out; ++i)
            layer.weight(i, j) = u(rng);
    for (Index i = 0; i < out; ++i)
        layer.bias(i, 0) = u(rng);
    return layer;
}

template <typename ModelT, typename Out>
void collect(ModelT &model, Out &out)
{
    for (auto *net : {&model.analog_message, &model.digital_message, &model.analog_update, &model.digital_update})
        for (auto &layer : net->layers)
        {
            out.push_back(&layer.weight);
            out.push_back(&layer.bias);
        }
}

} // namespace

Mlp init_mlp(Index input, Index output, Rng &rng)
{
    const Index hidden = 2 * input;
    return Mlp{{init_dense(input, hidden, rng), init_dense(hidden, hidden, rng), init_dense(hidden, output, rng)}};
}

std::vector<RealMatrix *> GnnModel::parameters()
{
    std::vector<RealMatrix *> out;
    collect(*this, out);
    return out;
}

std::vector<const RealMatrix *> GnnModel::parameters() const
{
    std::vector<const RealMatrix *> out;
    collect(*this, out);
    return out;
}

std::size_t GnnModel::parameter_count() const
{
    std::size_t n = 0;
    for (const RealMatrix *p : parameters())
        n += static_cast<std::size_t>(p->size());
    return n;
}

GnnModel init_model(const GnnDims &dims, int layers, Rng &rng)
{
    if (layers < 1)
        throw ConfigError("GNN needs at least one layer");
    if (dims.n_tx < 1 || dims.n_rx < 1 || dims.n_rf < 1 || dims.n_streams < 1)
        throw ConfigError("GNN dimensions must be positive");
    const Index a = dims.analog_width();
    const Index d = dims.digital_width();
    const Index e = dims.edge_width();

    GnnModel m;
    m.dims = dims;
    m.layers = layers;
    m.analog_message = init_mlp(e + a + d + a, a, rng);
    m.digital_message = init_mlp(e + d + a + d, d, rng);
    m.analog_update = init_mlp(a + d + e, a, rng);
    m.digital_update = init_mlp(d + a + e, d, rng);
    return m;
}

void check_compatible(const GnnModel &model, const SystemConfig &cfg)
{
    const GnnDims want = GnnDims::of(cfg);
    if (!(model.dims == want))
        throw ConfigError("model dimensions (N_t=" + std::to_string(model.dims.n_tx) + ", N_r=" +
                          std::to_string(model.dims.n_rx) + ", N_RF=" + std::to_string(model.dims.n_rf) +
                          ", N_s=" + std::to_string(model.dims.n_streams) + ") do not match the system (N_t=" +
                          std::to_string(want.n_tx) + ", N_r=" + std::to_string(want.n_rx) + ", N_RF=" +
                          std::to_string(want.n_rf) + ", N_s=" + std::to_string(want.n_streams) + ")");
}

// ---- graph -------------------------------------------------------------------

RealVector edge_feature(const ComplexMatrix &hk)
{
    const Index n = hk.size();
    RealVector e(2 * n);
    e.head(n) = hk.real().reshaped();
    e.tail(n) = hk.imag().reshaped();
    return e;
}

GraphState init_graph(const ChannelRealization &ch, const GnnDims &dims, Rng &rng)
{
    const ChannelRealization *one[] = {&ch};
    return init_graph(one, dims, rng);
}

GraphState init_graph(std::span<const ChannelRealization *const> batch, const GnnDims &dims, Rng &rng)
{
    if (batch.empty())
        throw ContractViolation("init_graph: empty batch");
    const Index k_count = batch.front()->subcarriers();
    if (k_count < 1)
        throw ContractViolation("init_graph: channel has no subcarriers");
    const Index s_count = static_cast<Index>(batch.size());

    GraphState st;
    st.samples = s_count;
    st.subcarriers = k_count;
    st.x.resize(dims.analog_width(), s_count);
    st.c.resize(dims.digital_width(), s_count * k_count);
    st.m_a = RealMatrix::Zero(dims.analog_width(), s_count * k_count);
    st.m_d = RealMatrix::Zero(dims.digital_width(), s_count * k_count);
    st.e.resize(dims.edge_width(), s_count * k_count);

    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index s = 0; s < s_count; ++s)
    {
        const ChannelRealization &ch = *batch[static_cast<std::size_t>(s)];
        if (ch.subcarriers() != k_count)
            throw DimensionError("init_graph: all samples in a batch need the same subcarrier count");
        for (Index i = 0; i < st.x.rows(); ++i)
        {
            double v = phase(rng);
            // uniform_real_distribution may round up to the open bound
            if (v >= 2.0 * kPi)
                v = 0.0;
            st.x(i, s) = v;
        }
        for (Index k = 0; k < k_count; ++k)
        {
            const Index col = s * k_count + k;
            for (Index i = 0; i < st.c.rows(); ++i)
                st.c(i, col) = normal(rng);
            const ComplexMatrix &hk = ch.h[static_cast<std::size_t>(k)];
            if (hk.rows() != dims.n_rx || hk.cols() != dims.n_tx)
                throw DimensionError("init_graph: channel shape does not match the model dimensions");
            st.e.col(col) = edge_feature(hk);
        }
    }
    return st;
}

// ---- traced building blocks --------------------------------------------------

namespace
{

MlpVars bind_mlp(ad::Tape &tape, const Mlp &net, bool trainable)
{
    MlpVars v;
    for (std::size_t i = 0; i < 3; ++i)
    {
        const DenseLayer &l = net.layers[i];
        v.weight[i] = trainable ? tape.leaf_view(l.weight) : tape.constant_view(l.weight);
        v.bias[i] = trainable ? tape.leaf_view(l.bias) : tape.constant_view(l.bias);
    }
    return v;
}

void check_layer(const GnnModel &model, int layer)
{
    if (layer < 1 || layer > model.layers)
        throw ContractViolation("layer index " + std::to_string(layer) + " outside [1, " + std::to_string(model.layers) +
                                "]");
}

void check_state(const GraphState &st, const GnnDims &dims)
{
    const Index n = st.samples * st.subcarriers;
    if (st.samples < 1 || st.subcarriers < 1 || st.x.rows() != dims.analog_width() || st.x.cols() != st.samples ||
        st.c.rows() != dims.digital_width() || st.c.cols() != n || st.m_a.rows() != dims.analog_width() ||
        st.m_a.cols() != n || st.m_d.rows() != dims.digital_width() || st.m_d.cols() != n ||
        st.e.rows() != dims.edge_width() || st.e.cols() != n)
        throw DimensionError("graph state shapes do not match the model dimensions");
}

// W * X for narrow X. Each weight is read once while a block of rows stays in registers.
template <int Cols>
void narrow_block(const RealMatrix &w, const RealMatrix &x, Index col, RealMatrix &out)
{
    constexpr int rows_per_block = 64;
    using Block = Eigen::Matrix<double, rows_per_block, Cols>;
    using Column = Eigen::Matrix<double, rows_per_block, 1>;
    const Index rows = w.rows();
    Index r = 0;
    for (; r + rows_per_block <= rows; r += rows_per_block)
    {
        Block acc = Block::Zero();
        for (Index j = 0; j < w.cols(); ++j)
            acc.noalias() += Eigen::Map<const Column>(w.data() + j * rows + r) *
                             x.block<1, Cols>(j, col);
        out.block<rows_per_block, Cols>(r, col) = acc;
    }
    if (r < rows)
        out.block(r, col, rows - r, Cols).noalias() = w.bottomRows(rows - r) * x.middleCols<Cols>(col);
}

RealMatrix dense_product(const RealMatrix &w, const RealMatrix &x)
{
    if (x.cols() > 8)
        return w * x;
    RealMatrix out(w.rows(), x.cols());
    Index c = 0;
    for (; c + 4 <= x.cols(); c += 4)
        narrow_block<4>(w, x, c, out);
    switch (x.cols() - c)
    {
    case 3: narrow_block<3>(w, x, c, out); break;
    case 2: narrow_block<2>(w, x, c, out); break;
    case 1: narrow_block<1>(w, x, c, out); break;
    default: break;
    }
    return out;
}

RealMatrix mlp_value(const Mlp &net, const RealMatrix &in)
{
    RealMatrix h = dense_product(net.layers[0].weight, in);
    h = (h.colwise() + net.layers[0].bias.col(0)).cwiseMax(0.0);
    RealMatrix h2 = dense_product(net.layers[1].weight, h);
    h2 = (h2.colwise() + net.layers[1].bias.col(0)).cwiseMax(0.0);
    RealMatrix out = dense_product(net.layers[2].weight, h2);
    out.colwise() += net.layers[2].bias.col(0);
    return out;
}

} // namespace

std::vector<ad::Var> ModelVars::parameters() const
{
    std::vector<ad::Var> out;
    for (const MlpVars *net : {&analog_message, &digital_message, &analog_update, &digital_update})
        for (std::size_t i = 0; i < 3; ++i)
        {
            out.push_back(net->weight[i]);
            out.push_back(net->bias[i]);
        }
    return out;
}

ModelVars bind_model(ad::Tape &tape, const GnnModel &model, bool trainable)
{
    return {bind_mlp(tape, model.analog_message, trainable), bind_mlp(tape, model.digital_message, trainable),
            bind_mlp(tape, model.analog_update, trainable), bind_mlp(tape, model.digital_update, trainable)};
}

TracedGraph trace_graph(ad::Tape &tape, const GraphState &st)
{
    TracedGraph g;
    g.samples = st.samples;
    g.subcarriers = st.subcarriers;
    g.x = tape.constant(st.x);
    g.c = tape.constant(st.c);
    g.m_a = tape.constant(st.m_a);
    g.m_d = tape.constant(st.m_d);
    g.e = tape.constant(st.e);
    g.e_mean = ad::segment_mean(g.e, st.subcarriers);
    return g;
}

ad::Var apply_mlp(const MlpVars &net, ad::Var input)
{
    if (input.rows() != net.weight[0].cols())
        throw ConfigError("network input width " + std::to_string(input.rows()) + " differs from the declared width " +
                          std::to_string(net.weight[0].cols()));
    ad::Var h = ad::relu(ad::affine(net.weight[0], net.bias[0], input));
    h = ad::relu(ad::affine(net.weight[1], net.bias[1], h));
    return ad::affine(net.weight[2], net.bias[2], h);
}

void traced_message_pass(TracedGraph &g, const ModelVars &vars)
{
    const Index k = g.subcarriers;
    const ad::Var md_mean = ad::repeat_cols(ad::segment_mean(g.m_d, k), k);
    const ad::Var x_edges = ad::repeat_cols(g.x, k);

    const ad::Var analog_in[] = {g.e, x_edges, md_mean, g.m_a};
    const ad::Var digital_in[] = {g.e, g.c, g.m_a, g.m_d};
    const ad::Var m_a = apply_mlp(vars.analog_message, ad::concat_rows(analog_in));
    const ad::Var m_d = apply_mlp(vars.digital_message, ad::concat_rows(digital_in));
    g.m_a = m_a;
    g.m_d = m_d;
}

void traced_node_update(TracedGraph &g, const ModelVars &vars)
{
    const ad::Var md_mean = ad::segment_mean(g.m_d, g.subcarriers);
    const ad::Var analog_in[] = {g.x, md_mean, g.e_mean};
    const ad::Var digital_in[] = {g.c, g.m_a, g.e};
    g.x = apply_mlp(vars.analog_update, ad::concat_rows(analog_in));
    g.c = apply_mlp(vars.digital_update, ad::concat_rows(digital_in));
}

// ---- untraced API ------------------------------------------------------------

void message_pass(GraphState &state, const GnnModel &model, int layer)
{
    check_layer(model, layer);
    check_state(state, model.dims);
    const Index k = state.subcarriers;
    const Index n = state.samples * k;
    const RealMatrix md_mean = ad::segment_mean_value(state.m_d, k);

    const Index e = state.e.rows(), a = state.x.rows(), d = state.c.rows();
    RealMatrix analog_in(e + a + d + a, n);
    analog_in.topRows(e) = state.e;
    for (Index j = 0; j < n; ++j)
    {
        analog_in.block(e, j, a, 1) = state.x.col(j / k);
        analog_in.block(e + a, j, d, 1) = md_mean.col(j / k);
    }
    analog_in.bottomRows(a) = state.m_a;

    RealMatrix digital_in(e + d + a + d, n);
    digital_in << state.e, state.c, state.m_a, state.m_d;

    state.m_a = mlp_value(model.analog_message, analog_in);
    state.m_d = mlp_value(model.digital_message, digital_in);
}

void node_update(GraphState &state, const GnnModel &model, int layer)
{
    check_layer(model, layer);
    check_state(state, model.dims);
    const Index k = state.subcarriers;
    RealMatrix analog_in(state.x.rows() + state.m_d.rows() + state.e.rows(), state.samples);
    analog_in << state.x, ad::segment_mean_value(state.m_d, k), ad::segment_mean_value(state.e, k);
    RealMatrix digital_in(state.c.rows() + state.m_a.rows() + state.e.rows(), state.c.cols());
    digital_in << state.c, state.m_a, state.e;

    state.x = mlp_value(model.analog_update, analog_in);
    state.c = mlp_value(model.digital_update, digital_in);
}

HybridBeamformer reconstruct(const GraphState &state, const GnnDims &dims, Index sample)
{
    if (sample < 0 || sample >= state.samples)
        throw ContractViolation("reconstruct: sample index out of range");
    const Index half = Index(dims.n_rf) * dims.n_streams;
    const RealMatrix phases = state.x.col(sample).reshaped(dims.n_tx, dims.n_rf);

    HybridBeamformer bf;
    bf.rf.resize(dims.n_tx, dims.n_rf);
    for (Index j = 0; j < phases.cols(); ++j)
        for (Index i = 0; i < phases.rows(); ++i)
            bf.rf(i, j) = Complex(std::cos(phases(i, j)), std::sin(phases(i, j)));

    bf.baseband.reserve(static_cast<std::size_t>(state.subcarriers));
    for (Index k = 0; k < state.subcarriers; ++k)
    {
        const auto col = state.c.col(sample * state.subcarriers + k);
        ComplexMatrix ck(dims.n_rf, dims.n_streams);
        ck.real() = col.head(half).reshaped(dims.n_rf, dims.n_streams);
        ck.imag() = col.segment(half, half).reshaped(dims.n_rf, dims.n_streams);
        bf.baseband.push_back(project_power(bf.rf, ck));
    }
    return bf;
}

std::vector<HybridBeamformer> propagate(GraphState state, const GnnModel &model)
{
    for (int l = 1; l <= model.layers; ++l)
    {
        message_pass(state, model, l);
        node_update(state, model, l);
    }

    std::vector<HybridBeamformer> out;
    out.reserve(static_cast<std::size_t>(state.samples));
    for (Index s = 0; s < state.samples; ++s)
        out.push_back(reconstruct(state, model.dims, s));
    return out;
}

HybridBeamformer forward(const ChannelRealization &ch, const GnnModel &model, Rng &rng)
{
    return std::move(propagate(init_graph(ch, model.dims, rng), model).front());
}

std::vector<HybridBeamformer> forward(std::span<const ChannelRealization *const> batch, const GnnModel &model, Rng &rng)
{
    return propagate(init_graph(batch, model.dims, rng), model);
}

double loss(const ComplexStack &h, const HybridBeamformer &bf, LinkBudget lb) { return -spectral_efficiency(h, bf, lb); }

// ---- traced loss -------------------------------------------------------------

namespace
{

// Per (sample, subcarrier): F = exp(jX_s), U = F C_k, P = U / ||U||_F,
// M = I + snr H P P^H H^H. Returns -mean(log det M) / ln 2 as one node; the
// backward pass recomputes the small per-subcarrier products.
ad::Var rate_loss(ad::Tape &tape, ad::Var x, ad::Var c, std::span<const ChannelRealization *const> batch,
                  const GnnDims &dims, Index k_count, double snr)
{
    const Index samples = static_cast<Index>(batch.size());
    const Index half = Index(dims.n_rf) * dims.n_streams;
    const double scale = -1.0 / (static_cast<double>(samples * k_count) * std::numbers::ln2);
    std::vector<const ChannelRealization *> channels(batch.begin(), batch.end());

    auto analog = [dims](const RealMatrix &xv, Index s) {
        ComplexMatrix f(dims.n_tx, dims.n_rf);
        for (Index i = 0; i < f.size(); ++i)
            f.data()[i] = std::polar(1.0, xv(i, s));
        return f;
    };
    auto digital = [dims, half](const RealMatrix &cv, Index col) {
        ComplexMatrix ck(dims.n_rf, dims.n_streams);
        for (Index i = 0; i < half; ++i)
            ck.data()[i] = Complex(cv(i, col), cv(half + i, col));
        return ck;
    };
    auto inverse_of = [](const ComplexMatrix &m, double *logdet) {
        Eigen::LLT<ComplexMatrix> llt(m);
        if (llt.info() != Eigen::Success)
            throw NumericError("rate loss: I + snr G G^H is not positive definite");
        if (logdet)
        {
            double acc = 0.0;
            for (Index i = 0; i < m.rows(); ++i)
                acc += std::log(llt.matrixLLT()(i, i).real());
            *logdet = 2.0 * acc;
        }
        return ComplexMatrix(llt.solve(ComplexMatrix::Identity(m.rows(), m.cols())));
    };

    const RealMatrix &xv = x.value();
    const RealMatrix &cv = c.value();
    double total = 0.0;
    for (Index s = 0; s < samples; ++s)
    {
        const ComplexMatrix f = analog(xv, s);
        const ChannelRealization &ch = *channels[static_cast<std::size_t>(s)];
        for (Index k = 0; k < k_count; ++k)
        {
            const ComplexMatrix u = f * digital(cv, s * k_count + k);
            const double n = u.norm();
            if (!(n > 1e-12))
                throw DegenerateInputError("traced_loss: ||F_RF C_k||_F is below 1e-12");
            const ComplexMatrix g = ch.h[static_cast<std::size_t>(k)] * (u / n);
            ComplexMatrix m = ComplexMatrix::Identity(g.rows(), g.rows());
            m.noalias() += snr * g * g.adjoint();
            double logdet = 0.0;
            inverse_of(m, &logdet);
            total += logdet;
        }
    }

    const ad::Var in[] = {x, c};
    return tape.record(
        ad::OpKind::Fused, in, RealMatrix::Constant(1, 1, scale * total),
        [&tape, ix = x.id(), ic = c.id(), channels = std::move(channels), dims, k_count, snr, scale, half, analog,
         digital, inverse_of](const RealMatrix &grad, ad::Gradients &gr) {
            const bool want_x = gr.wants(ix);
            const bool want_c = gr.wants(ic);
            if (!want_x && !want_c)
                return;
            const RealMatrix &xv = tape.value(ix);
            const RealMatrix &cv = tape.value(ic);
            const double w = grad(0, 0) * scale;
            RealMatrix gx = RealMatrix::Zero(xv.rows(), xv.cols());
            RealMatrix gc = RealMatrix::Zero(cv.rows(), cv.cols());
            for (Index s = 0; s < static_cast<Index>(channels.size()); ++s)
            {
                const ComplexMatrix f = analog(xv, s);
                const ChannelRealization &ch = *channels[static_cast<std::size_t>(s)];
                ComplexMatrix gf = ComplexMatrix::Zero(f.rows(), f.cols());
                for (Index k = 0; k < k_count; ++k)
                {
                    const Index col = s * k_count + k;
                    const ComplexMatrix ck = digital(cv, col);
                    const ComplexMatrix u = f * ck;
                    const double n = u.norm();
                    const ComplexMatrix &hk = ch.h[static_cast<std::size_t>(k)];
                    const ComplexMatrix hp = hk * (u / n);
                    ComplexMatrix m = ComplexMatrix::Identity(hp.rows(), hp.rows());
                    m.noalias() += snr * hp * hp.adjoint();
                    // Conjugate gradients: d/dP = 2 snr H^H M^-1 H P, then through the normalization.
                    const ComplexMatrix gp = (2.0 * snr * w) * (hk.adjoint() * (inverse_of(m, nullptr) * hp));
                    const double radial = gp.cwiseProduct(u.conjugate()).sum().real();
                    const ComplexMatrix gu = gp / n - (radial / (n * n * n)) * u;
                    if (want_c)
                    {
                        const ComplexMatrix gck = f.adjoint() * gu;
                        for (Index i = 0; i < half; ++i)
                        {
                            gc(i, col) = gck.data()[i].real();
                            gc(half + i, col) = gck.data()[i].imag();
                        }
                    }
                    if (want_x)
                        gf.noalias() += gu * ck.adjoint();
                }
                if (want_x)
                    for (Index i = 0; i < f.size(); ++i)
                        gx(i, s) = (std::conj(f.data()[i]) * gf.data()[i]).imag();
            }
            if (want_x)
                gr.add(ix, std::move(gx));
            if (want_c)
                gr.add(ic, std::move(gc));
        });
}

} // namespace

ad::Var traced_loss(ad::Tape &tape, const ModelVars &vars, int layers, const GraphState &init,
                    std::span<const ChannelRealization *const> batch, const GnnDims &dims, LinkBudget lb)
{
    if (static_cast<Index>(batch.size()) != init.samples)
        throw DimensionError("traced_loss: batch size differs from the graph state");
    if (layers < 1)
        throw ConfigError("GNN needs at least one layer");

    TracedGraph g = trace_graph(tape, init);
    for (int l = 1; l <= layers; ++l)
    {
        traced_message_pass(g, vars);
        traced_node_update(g, vars);
    }

    return rate_loss(tape, g.x, g.c, batch, dims, init.subcarriers, lb.snr_linear());
}

} // namespace hbf
