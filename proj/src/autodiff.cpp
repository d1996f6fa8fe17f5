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

#include "hybridgnn/autodiff.hpp"
#include "hybridgnn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hbf::ad
{

namespace
{

void require_same_shape(Var a, Var b, const char *what)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()) + ")");
}

void require_scalar(Var s, const char *what)
{
    if (s.rows() != 1 || s.cols() != 1)
        throw DimensionError(std::string(what) + ": expected a 1x1 node");
}

Tape &same_tape(Var a, Var b)
{
    if (a.tape() != b.tape() || a.tape() == nullptr)
        throw ContractViolation("operands recorded on different tapes");
    return *a.tape();
}

} // namespace

// ---- Var / CVar --------------------------------------------------------------

const RealMatrix &Var::value() const { return tape_->value(id_); }

double Var::scalar() const
{
    require_scalar(*this, "Var::scalar");
    return value()(0, 0);
}

ComplexMatrix CVar::value() const
{
    ComplexMatrix out(re.rows(), re.cols());
    out.real() = re.value();
    out.imag() = im.value();
    return out;
}

// ---- Gradients ---------------------------------------------------------------

Gradients::Gradients(const Tape *tape) : tape_(tape), adjoint_(tape->size()), touched_(tape->size(), false) {}

bool Gradients::wants(std::size_t id) const { return tape_->requires_grad(id); }

RealMatrix Gradients::operator[](Var v) const
{
    if (v.id() < touched_.size() && touched_[v.id()])
        return adjoint_[v.id()];
    return RealMatrix::Zero(v.rows(), v.cols());
}

ComplexGrad Gradients::operator[](const CVar &v) const { return {(*this)[v.re], (*this)[v.im]}; }

// ---- Tape --------------------------------------------------------------------

Var Tape::leaf(RealMatrix value)
{
    nodes_.push_back({OpKind::Leaf, {}, std::move(value), {}, true});
    return Var(this, nodes_.size() - 1);
}

Var Tape::constant(RealMatrix value)
{
    nodes_.push_back({OpKind::Constant, {}, std::move(value), {}, false});
    return Var(this, nodes_.size() - 1);
}

Var Tape::leaf_view(const RealMatrix &value)
{
    nodes_.push_back({OpKind::Leaf, {}, RealMatrix(), {}, true, &value});
    return Var(this, nodes_.size() - 1);
}

Var Tape::constant_view(const RealMatrix &value)
{
    nodes_.push_back({OpKind::Constant, {}, RealMatrix(), {}, false, &value});
    return Var(this, nodes_.size() - 1);
}

CVar Tape::leaf_complex(const ComplexMatrix &value) { return {leaf(value.real()), leaf(value.imag())}; }

CVar Tape::constant_complex(const ComplexMatrix &value) { return {constant(value.real()), constant(value.imag())}; }

void Tape::check_owned(Var v) const
{
    if (v.tape() != this || v.id() >= nodes_.size())
        throw ContractViolation("node does not belong to this tape");
}

Var Tape::record(OpKind kind, std::span<const Var> inputs, RealMatrix value, BackwardRule rule)
{
    Node node{kind, {}, std::move(value), std::move(rule), false};
    node.inputs.reserve(inputs.size());
    for (Var in : inputs)
    {
        check_owned(in);
        node.inputs.push_back(in.id());
        node.requires_grad = node.requires_grad || nodes_[in.id()].requires_grad;
    }
    if (!node.requires_grad)
        node.rule = nullptr;
    nodes_.push_back(std::move(node));
    return Var(this, nodes_.size() - 1);
}

Gradients Tape::backward(Var output) const
{
    check_owned(output);
    if (output.rows() != 1 || output.cols() != 1)
        throw ContractViolation("backward: output must be a 1x1 scalar node");

    Gradients grads(this);
    if (!nodes_[output.id()].requires_grad)
        return grads;
    grads.adjoint_[output.id()] = RealMatrix::Ones(1, 1);
    grads.touched_[output.id()] = true;

    for (std::size_t i = output.id() + 1; i-- > 0;)
    {
        const Node &node = nodes_[i];
        if (!grads.touched_[i] || !node.rule)
            continue;
        node.rule(grads.adjoint_[i], grads);
    }
    return grads;
}

// ---- real primitives ---------------------------------------------------------

Var add(Var a, Var b)
{
    Tape &t = same_tape(a, b);
    require_same_shape(a, b, "add");
    const Var in[] = {a, b};
    return t.record(OpKind::Add, in, a.value() + b.value(), [ia = a.id(), ib = b.id()](const RealMatrix &g, Gradients &gr) {
        gr.add(ia, g);
        gr.add(ib, g);
    });
}

Var sub(Var a, Var b)
{
    Tape &t = same_tape(a, b);
    require_same_shape(a, b, "sub");
    const Var in[] = {a, b};
    return t.record(OpKind::Sub, in, a.value() - b.value(), [ia = a.id(), ib = b.id()](const RealMatrix &g, Gradients &gr) {
        gr.add(ia, g);
        gr.add(ib, -g);
    });
}

Var scale(Var a, double s)
{
    const Var in[] = {a};
    return a.tape()->record(OpKind::Scale, in, a.value() * s,
                            [ia = a.id(), s](const RealMatrix &g, Gradients &gr) { gr.add(ia, g * s); });
}

Var scale_by(Var a, Var s)
{
    Tape &t = same_tape(a, s);
    require_scalar(s, "scale_by");
    const Var in[] = {a, s};
    const double sv = s.scalar();
    return t.record(OpKind::ScaleByScalar, in, a.value() * sv,
                    [&t, ia = a.id(), is = s.id(), sv](const RealMatrix &g, Gradients &gr) {
                        gr.add(ia, g * sv);
                        if (gr.wants(is))
                            gr.add(is, RealMatrix::Constant(1, 1, g.cwiseProduct(t.value(ia)).sum()));
                    });
}

Var divide_by(Var a, Var s)
{
    Tape &t = same_tape(a, s);
    require_scalar(s, "divide_by");
    const Var in[] = {a, s};
    const double sv = s.scalar();
    return t.record(OpKind::DivideByScalar, in, a.value() / sv,
                    [&t, ia = a.id(), is = s.id(), sv](const RealMatrix &g, Gradients &gr) {
                        gr.add(ia, g / sv);
                        if (gr.wants(is))
                            gr.add(is, RealMatrix::Constant(1, 1, -g.cwiseProduct(t.value(ia)).sum() / (sv * sv)));
                    });
}

Var cwise_product(Var a, Var b)
{
    Tape &t = same_tape(a, b);
    require_same_shape(a, b, "cwise_product");
    const Var in[] = {a, b};
    return t.record(OpKind::CwiseProduct, in, a.value().cwiseProduct(b.value()),
                    [&t, ia = a.id(), ib = b.id()](const RealMatrix &g, Gradients &gr) {
                        if (gr.wants(ia))
                            gr.add(ia, g.cwiseProduct(t.value(ib)));
                        if (gr.wants(ib))
                            gr.add(ib, g.cwiseProduct(t.value(ia)));
                    });
}

Var matmul(Var a, Var b)
{
    Tape &t = same_tape(a, b);
    if (a.cols() != b.rows())
        throw DimensionError("matmul: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                             std::to_string(b.rows()) + ")");
    RealMatrix v(a.rows(), b.cols());
    v.noalias() = a.value() * b.value();
    const Var in[] = {a, b};
    return t.record(OpKind::MatMul, in, std::move(v), [&t, ia = a.id(), ib = b.id()](const RealMatrix &g, Gradients &gr) {
        if (gr.wants(ia))
            gr.add(ia, g * t.value(ib).transpose());
        if (gr.wants(ib))
            gr.add(ib, t.value(ia).transpose() * g);
    });
}

Var transpose(Var a)
{
    const Var in[] = {a};
    return a.tape()->record(OpKind::Transpose, in, a.value().transpose(),
                            [ia = a.id()](const RealMatrix &g, Gradients &gr) { gr.add(ia, g.transpose()); });
}

Var cos(Var a)
{
    const Var in[] = {a};
    Tape &t = *a.tape();
    return t.record(OpKind::Cos, in, a.value().array().cos().matrix(), [&t, ia = a.id()](const RealMatrix &g, Gradients &gr) {
        gr.add(ia, (-t.value(ia).array().sin() * g.array()).matrix());
    });
}

Var sin(Var a)
{
    const Var in[] = {a};
    Tape &t = *a.tape();
    return t.record(OpKind::Sin, in, a.value().array().sin().matrix(), [&t, ia = a.id()](const RealMatrix &g, Gradients &gr) {
        gr.add(ia, (t.value(ia).array().cos() * g.array()).matrix());
    });
}

Var relu(Var a)
{
    const Var in[] = {a};
    Tape &t = *a.tape();
    return t.record(OpKind::Relu, in, a.value().cwiseMax(0.0), [&t, ia = a.id()](const RealMatrix &g, Gradients &gr) {
        gr.add(ia, (t.value(ia).array() > 0.0).select(g, 0.0));
    });
}

Var affine(Var weight, Var bias, Var x)
{
    Tape &t = same_tape(weight, x);
    same_tape(weight, bias);
    if (weight.cols() != x.rows() || bias.rows() != weight.rows() || bias.cols() != 1)
        throw DimensionError("affine: weight " + std::to_string(weight.rows()) + "x" + std::to_string(weight.cols()) +
                             ", bias " + std::to_string(bias.rows()) + "x" + std::to_string(bias.cols()) + ", input " +
                             std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
    RealMatrix v(weight.rows(), x.cols());
    v.noalias() = weight.value() * x.value();
    v.colwise() += bias.value().col(0);
    const Var in[] = {weight, bias, x};
    return t.record(OpKind::Affine, in, std::move(v),
                    [&t, iw = weight.id(), ib = bias.id(), ix = x.id()](const RealMatrix &g, Gradients &gr) {
                        if (gr.wants(iw))
                        {
                            RealMatrix gw(g.rows(), t.value(ix).rows());
                            gw.noalias() = g * t.value(ix).transpose();
                            gr.add(iw, std::move(gw));
                        }
                        if (gr.wants(ib))
                            gr.add(ib, g.rowwise().sum());
                        if (gr.wants(ix))
                        {
                            RealMatrix gx(t.value(iw).cols(), g.cols());
                            gx.noalias() = t.value(iw).transpose() * g;
                            gr.add(ix, std::move(gx));
                        }
                    });
}

Var concat_rows(std::span<const Var> parts)
{
    if (parts.empty())
        throw ContractViolation("concat_rows: no inputs");
    Tape &t = *parts.front().tape();
    const Eigen::Index cols = parts.front().cols();
    Eigen::Index rows = 0;
    for (Var p : parts)
    {
        same_tape(parts.front(), p);
        if (p.cols() != cols)
            throw DimensionError("concat_rows: column counts differ");
        rows += p.rows();
    }
    RealMatrix v(rows, cols);
    std::vector<std::pair<std::size_t, Eigen::Index>> layout;
    Eigen::Index offset = 0;
    for (Var p : parts)
    {
        v.middleRows(offset, p.rows()) = p.value();
        layout.emplace_back(p.id(), offset);
        offset += p.rows();
    }
    return t.record(OpKind::ConcatRows, parts, std::move(v), [&t, layout](const RealMatrix &g, Gradients &gr) {
        for (auto [id, off] : layout)
            if (gr.wants(id))
                gr.add(id, g.middleRows(off, t.value(id).rows()));
    });
}

RealMatrix segment_mean_value(const RealMatrix &av, Eigen::Index group)
{
    if (group < 1 || av.cols() % group != 0)
        throw DimensionError("segment_mean: column count not divisible by group size");
    const Eigen::Index n = av.cols() / group;
    RealMatrix v(av.rows(), n);
    std::vector<double> buf(static_cast<std::size_t>(group));
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index r = 0; r < av.rows(); ++r)
        {
            for (Eigen::Index i = 0; i < group; ++i)
                buf[static_cast<std::size_t>(i)] = av(r, j * group + i);
            std::sort(buf.begin(), buf.end());
            double s = 0.0;
            for (double x : buf)
                s += x;
            v(r, j) = s / static_cast<double>(group);
        }
    return v;
}

Var segment_mean(Var a, Eigen::Index group)
{
    RealMatrix v = segment_mean_value(a.value(), group);
    const Var in[] = {a};
    return a.tape()->record(OpKind::SegmentMean, in, std::move(v), [ia = a.id(), group](const RealMatrix &g, Gradients &gr) {
        RealMatrix ga(g.rows(), g.cols() * group);
        const double w = 1.0 / static_cast<double>(group);
        for (Eigen::Index j = 0; j < g.cols(); ++j)
            for (Eigen::Index i = 0; i < group; ++i)
                ga.col(j * group + i) = g.col(j) * w;
        gr.add(ia, ga);
    });
}

Var repeat_cols(Var a, Eigen::Index times)
{
    if (times < 1)
        throw DimensionError("repeat_cols: times must be positive");
    const RealMatrix &av = a.value();
    RealMatrix v(av.rows(), av.cols() * times);
    for (Eigen::Index j = 0; j < av.cols(); ++j)
        for (Eigen::Index i = 0; i < times; ++i)
            v.col(j * times + i) = av.col(j);
    const Var in[] = {a};
    return a.tape()->record(OpKind::RepeatCols, in, std::move(v), [ia = a.id(), times](const RealMatrix &g, Gradients &gr) {
        const Eigen::Index n = g.cols() / times;
        RealMatrix ga = RealMatrix::Zero(g.rows(), n);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < times; ++i)
                ga.col(j) += g.col(j * times + i);
        gr.add(ia, ga);
    });
}

Var slice(Var a, Eigen::Index row, Eigen::Index col, Eigen::Index rows, Eigen::Index cols)
{
    if (row < 0 || col < 0 || rows < 0 || cols < 0 || row + rows > a.rows() || col + cols > a.cols())
        throw DimensionError("slice: block out of range");
    const Var in[] = {a};
    return a.tape()->record(OpKind::Slice, in, a.value().block(row, col, rows, cols),
                            [ia = a.id(), row, col, ar = a.rows(), ac = a.cols()](const RealMatrix &g, Gradients &gr) {
                                RealMatrix ga = RealMatrix::Zero(ar, ac);
                                ga.block(row, col, g.rows(), g.cols()) = g;
                                gr.add(ia, ga);
                            });
}

Var reshape(Var a, Eigen::Index rows, Eigen::Index cols)
{
    if (rows * cols != a.rows() * a.cols())
        throw DimensionError("reshape: element count changes");
    const Var in[] = {a};
    return a.tape()->record(OpKind::Reshape, in, a.value().reshaped(rows, cols),
                            [ia = a.id(), ar = a.rows(), ac = a.cols()](const RealMatrix &g, Gradients &gr) {
                                gr.add(ia, g.reshaped(ar, ac));
                            });
}

Var sum(Var a)
{
    const Var in[] = {a};
    return a.tape()->record(OpKind::Sum, in, RealMatrix::Constant(1, 1, a.value().sum()),
                            [ia = a.id(), ar = a.rows(), ac = a.cols()](const RealMatrix &g, Gradients &gr) {
                                gr.add(ia, RealMatrix::Constant(ar, ac, g(0, 0)));
                            });
}

Var mean(std::span<const Var> parts)
{
    if (parts.empty())
        throw ContractViolation("mean: no inputs");
    RealMatrix v = parts.front().value();
    for (std::size_t i = 1; i < parts.size(); ++i)
    {
        same_tape(parts.front(), parts[i]);
        require_same_shape(parts.front(), parts[i], "mean");
        v += parts[i].value();
    }
    const double w = 1.0 / static_cast<double>(parts.size());
    v *= w;
    std::vector<std::size_t> ids;
    for (Var p : parts)
        ids.push_back(p.id());
    return parts.front().tape()->record(OpKind::Mean, parts, std::move(v), [ids, w](const RealMatrix &g, Gradients &gr) {
        for (std::size_t id : ids)
            gr.add(id, g * w);
    });
}

// ---- complex helpers ---------------------------------------------------------

CVar add(const CVar &a, const CVar &b) { return {add(a.re, b.re), add(a.im, b.im)}; }

CVar sub(const CVar &a, const CVar &b) { return {sub(a.re, b.re), sub(a.im, b.im)}; }

CVar scale(const CVar &a, double s) { return {scale(a.re, s), scale(a.im, s)}; }

CVar scale_by(const CVar &a, Var s) { return {scale_by(a.re, s), scale_by(a.im, s)}; }

CVar divide_by(const CVar &a, Var s) { return {divide_by(a.re, s), divide_by(a.im, s)}; }

CVar matmul(const CVar &a, const CVar &b)
{
    return {sub(matmul(a.re, b.re), matmul(a.im, b.im)), add(matmul(a.re, b.im), matmul(a.im, b.re))};
}

CVar adjoint(const CVar &a) { return {transpose(a.re), scale(transpose(a.im), -1.0)}; }

CVar expj(Var x) { return {cos(x), sin(x)}; }

Var frobenius_norm(const CVar &a)
{
    Tape &t = same_tape(a.re, a.im);
    require_same_shape(a.re, a.im, "frobenius_norm");
    const double n = std::sqrt(a.re.value().squaredNorm() + a.im.value().squaredNorm());
    const Var in[] = {a.re, a.im};
    return t.record(OpKind::FrobeniusNorm, in, RealMatrix::Constant(1, 1, n),
                    [&t, ir = a.re.id(), ii = a.im.id(), n](const RealMatrix &g, Gradients &gr) {
                        if (n == 0.0)
                            return;
                        const double w = g(0, 0) / n;
                        gr.add(ir, t.value(ir) * w);
                        gr.add(ii, t.value(ii) * w);
                    });
}

Var logdet_hpd(const CVar &m)
{
    Tape &t = same_tape(m.re, m.im);
    require_same_shape(m.re, m.im, "logdet_hpd");
    if (m.rows() != m.cols())
        throw DimensionError("logdet_hpd: matrix must be square");

    const ComplexMatrix full = m.value();
    const double asym = (full - full.adjoint()).cwiseAbs().maxCoeff();
    const double scale_ref = std::max(1.0, full.cwiseAbs().maxCoeff());
    if (!(asym <= 1e-9 * scale_ref))
        throw ContractViolation("logdet_hpd: matrix is not Hermitian (asymmetry " + std::to_string(asym) + ")");

    const ComplexMatrix herm = 0.5 * (full + full.adjoint());
    Eigen::LLT<ComplexMatrix> llt(herm);
    if (llt.info() != Eigen::Success)
        throw NumericError("logdet_hpd: Cholesky factorization failed (matrix not positive definite)");
    const auto diag = llt.matrixL().toDenseMatrix().diagonal().real();
    if ((diag.array() <= 0.0).any())
        throw NumericError("logdet_hpd: Cholesky factorization failed (matrix not positive definite)");
    const double value = 2.0 * diag.array().log().sum();

    ComplexMatrix inv = llt.solve(ComplexMatrix::Identity(m.rows(), m.cols()));
    const Var in[] = {m.re, m.im};
    return t.record(OpKind::LogDetHpd, in, RealMatrix::Constant(1, 1, value),
                    [ir = m.re.id(), ii = m.im.id(), inv = std::move(inv)](const RealMatrix &g, Gradients &gr) {
                        // M^-1 is Hermitian, so Re(M^-T) = Re(M^-1) and -Im(M^-T) = Im(M^-1).
                        gr.add(ir, inv.real() * g(0, 0));
                        gr.add(ii, inv.imag() * g(0, 0));
                    });
}

// ---- finite differences ------------------------------------------------------

double relative_error(double analytic, double numeric, double floor)
{
    const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / denom;
}

namespace
{

double evaluate(const TracedFunction &f, const std::vector<RealMatrix> &point)
{
    Tape tape;
    std::vector<Var> leaves;
    leaves.reserve(point.size());
    for (const auto &p : point)
        leaves.push_back(tape.leaf(p));
    const Var out = f(tape, leaves);
    const double v = out.scalar();
    if (!std::isfinite(v))
        throw NumericError("grad_check: non-finite function value");
    return v;
}

} // namespace

GradCheckResult grad_check(const TracedFunction &f, const std::vector<RealMatrix> &point, double step, double floor)
{
    Tape tape;
    std::vector<Var> leaves;
    for (const auto &p : point)
        leaves.push_back(tape.leaf(p));
    const Var out = f(tape, leaves);
    if (!std::isfinite(out.scalar()))
        throw NumericError("grad_check: non-finite function value");
    const Gradients grads = tape.backward(out);

    GradCheckResult result;
    std::vector<RealMatrix> probe = point;
    for (std::size_t i = 0; i < point.size(); ++i)
    {
        const RealMatrix analytic = grads[leaves[i]];
        for (Eigen::Index j = 0; j < point[i].size(); ++j)
        {
            const double x0 = point[i].data()[j];
            probe[i].data()[j] = x0 + step;
            const double fp = evaluate(f, probe);
            probe[i].data()[j] = x0 - step;
            const double fm = evaluate(f, probe);
            probe[i].data()[j] = x0;

            const double numeric = (fp - fm) / (2.0 * step);
            const double err = relative_error(analytic.data()[j], numeric, floor);
            if (err >= result.max_rel_error)
            {
                result.max_rel_error = err;
                result.worst_input = i;
                result.worst_index = j;
                result.analytic = analytic.data()[j];
                result.numeric = numeric;
            }
        }
    }
    return result;
}

} // namespace hbf::ad
