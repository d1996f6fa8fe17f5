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

// Matrix-level reverse-mode differentiation.
//
// Every recorded value is a dense real matrix. Complex quantities are carried
// as (real, imaginary) pairs of real nodes, so the gradient of a real scalar
// with respect to a complex input is returned as the pair of partials with
// respect to its real and imaginary parts.

#include "hybridgnn/types.hpp"

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <vector>

namespace hbf::ad
{

class Tape;
class Gradients;

enum class OpKind : std::uint8_t
{
    Leaf,
    Constant,
    Add,
    Sub,
    Scale,
    ScaleByScalar,
    DivideByScalar,
    CwiseProduct,
    MatMul,
    Transpose,
    Cos,
    Sin,
    Relu,
    Affine,
    ConcatRows,
    SegmentMean,
    RepeatCols,
    Slice,
    Reshape,
    Sum,
    Mean,
    FrobeniusNorm,
    LogDetHpd,
    // Ops defined outside this header with their own backward rule.
    Fused,
};

// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var
{
public:
    Var() = default;

    std::size_t id() const { return id_; }
    Tape *tape() const { return tape_; }
    bool valid() const { return tape_ != nullptr; }

    const RealMatrix &value() const;
    Eigen::Index rows() const { return value().rows(); }
    Eigen::Index cols() const { return value().cols(); }
    double scalar() const;

private:
    friend class Tape;
    Var(Tape *tape, std::size_t id) : tape_(tape), id_(id) {}

    Tape *tape_ = nullptr;
    std::size_t id_ = 0;
};

struct ComplexGrad
{
    RealMatrix re;
    RealMatrix im;
};

// Complex matrix as a pair of real nodes of identical shape.
struct CVar
{
    Var re;
    Var im;

    Eigen::Index rows() const { return re.rows(); }
    Eigen::Index cols() const { return re.cols(); }
    ComplexMatrix value() const;
};

// Adjoints produced by a backward sweep, indexed by node id.
class Gradients
{
public:
    // Zero matrix of the node's shape when the node was never reached.
    RealMatrix operator[](Var v) const;
    ComplexGrad operator[](const CVar &v) const;

    // Used by backward rules.
    bool wants(std::size_t id) const;
    void add(std::size_t id, RealMatrix &&g)
    {
        if (!wants(id))
            return;
        if (!touched_[id])
        {
            adjoint_[id] = std::move(g);
            touched_[id] = true;
        }
        else
            adjoint_[id] += g;
    }
    template <typename Derived>
    void add(std::size_t id, const Eigen::MatrixBase<Derived> &g)
    {
        if (!wants(id))
            return;
        if (!touched_[id])
        {
            adjoint_[id] = g;
            touched_[id] = true;
        }
        else
            adjoint_[id] += g;
    }

private:
    friend class Tape;
    explicit Gradients(const Tape *tape);

    const Tape *tape_;
    std::vector<RealMatrix> adjoint_;
    std::vector<bool> touched_;
};

using BackwardRule = std::function<void(const RealMatrix &grad_out, Gradients &grads)>;

class Tape
{
public:
    Tape() = default;
    Tape(const Tape &) = delete;
    Tape &operator=(const Tape &) = delete;

    // Differentiable input.
    Var leaf(RealMatrix value);
    // Input that never receives a gradient.
    Var constant(RealMatrix value);

    // As leaf() and constant(), but referring to caller storage that must
    // outlive the tape and stay unchanged while it is in use.
    Var leaf_view(const RealMatrix &value);
    Var constant_view(const RealMatrix &value);

    CVar leaf_complex(const ComplexMatrix &value);
    CVar constant_complex(const ComplexMatrix &value);

    // Appends a node. Inputs must already be on this tape.
    Var record(OpKind kind, std::span<const Var> inputs, RealMatrix value, BackwardRule rule);

    const RealMatrix &value(std::size_t id) const
    {
        const Node &n = nodes_[id];
        return n.view ? *n.view : n.value;
    }
    OpKind kind(std::size_t id) const { return nodes_[id].kind; }
    bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
    const std::vector<std::size_t> &inputs(std::size_t id) const { return nodes_[id].inputs; }
    std::size_t size() const { return nodes_.size(); }

    // Reverse sweep from a 1x1 node. Throws ContractViolation otherwise.
    Gradients backward(Var output) const;

private:
    struct Node
    {
        OpKind kind;
        std::vector<std::size_t> inputs;
        RealMatrix value;
        BackwardRule rule;
        bool requires_grad;
        const RealMatrix *view = nullptr;
    };

    void check_owned(Var v) const;

    // deque keeps references to earlier values stable while recording.
    std::deque<Node> nodes_;
};

// ---- real primitives -------------------------------------------------------

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double s);
// a * s where s is a 1x1 node.
Var scale_by(Var a, Var s);
// a / s where s is a 1x1 node.
Var divide_by(Var a, Var s);
Var cwise_product(Var a, Var b);
Var matmul(Var a, Var b);
Var transpose(Var a);
Var cos(Var a);
Var sin(Var a);
Var relu(Var a);
// weight * x + bias * 1^T, bias is a column vector.
Var affine(Var weight, Var bias, Var x);
Var concat_rows(std::span<const Var> parts);
// Mean over consecutive groups of `group` columns: (r x n*group) -> (r x n).
// Summation order is independent of column order within a group.
Var segment_mean(Var a, Eigen::Index group);
// Value of segment_mean without recording.
RealMatrix segment_mean_value(const RealMatrix &a, Eigen::Index group);
// Each column repeated `times` times consecutively: (r x n) -> (r x n*times).
Var repeat_cols(Var a, Eigen::Index times);
Var slice(Var a, Eigen::Index row, Eigen::Index col, Eigen::Index rows, Eigen::Index cols);
// Column-major reshape.
Var reshape(Var a, Eigen::Index rows, Eigen::Index cols);
Var sum(Var a);
// Entrywise mean over a collection of equally shaped nodes.
Var mean(std::span<const Var> parts);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, double s) { return scale(a, s); }
inline Var operator*(double s, Var a) { return scale(a, s); }

// ---- complex helpers over (re, im) pairs -----------------------------------

CVar add(const CVar &a, const CVar &b);
CVar sub(const CVar &a, const CVar &b);
CVar scale(const CVar &a, double s);
CVar scale_by(const CVar &a, Var s);
CVar divide_by(const CVar &a, Var s);
CVar matmul(const CVar &a, const CVar &b);
// Conjugate transpose.
CVar adjoint(const CVar &a);
// exp(jX) for a real matrix X.
CVar expj(Var x);
// ||A||_F as a 1x1 node.
Var frobenius_norm(const CVar &a);
// ln det(M) for Hermitian positive definite M, via Cholesky.
// Throws ContractViolation if M is not Hermitian within 1e-9 and
// NumericError if the factorization fails.
Var logdet_hpd(const CVar &m);

// ---- finite-difference checking ---------------------------------------------

using TracedFunction = std::function<Var(Tape &, std::span<const Var>)>;

struct GradCheckResult
{
    double max_rel_error = 0.0;
    std::size_t worst_input = 0;
    Eigen::Index worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

// Relative error |a - n| / max(|a|, |n|, floor) with floor guarding
// coordinates whose derivative vanishes.
double relative_error(double analytic, double numeric, double floor = 1e-8);

// Compares backward() against central differences at `point` for every
// coordinate of every input, using relative_error with the given floor.
// A 1e-5 step resolves derivatives to roughly 1e-10 in absolute terms, so
// coordinates below 1e-6 are compared against 1e-6. Throws NumericError on
// non-finite evaluations.
GradCheckResult grad_check(const TracedFunction &f, const std::vector<RealMatrix> &point, double step = 1e-5,
                           double floor = 1e-6);

} // namespace hbf::ad
