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

#include "hybridgnn/types.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace hbf
{

// Analog matrix shared by all subcarriers plus one digital matrix per subcarrier.
struct HybridBeamformer
{
    ComplexMatrix rf;       // N_t x N_RF, unit-modulus entries
    ComplexStack baseband;  // K matrices of size N_RF x N_s
};

// Transmit SNR with unit noise power.
struct LinkBudget
{
    double snr_db = 0.0;

    double snr_linear() const { return std::pow(10.0, snr_db / 10.0); }
};

// log2 det(M) for Hermitian positive definite M via Cholesky.
template <typename Scalar>
Scalar log2det_hpd(const CMatrixT<Scalar> &m)
{
    Eigen::LLT<CMatrixT<Scalar>> llt(m);
    if (llt.info() != Eigen::Success)
        return std::numeric_limits<Scalar>::quiet_NaN();
    Scalar acc = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        acc += std::log(llt.matrixLLT()(i, i).real());
    return Scalar(2) * acc / std::numbers::ln2_v<Scalar>;
}

// log2 det(I + snr G G^H) for an effective channel G = H F.
template <typename Scalar>
Scalar rate_of_effective_channel(const CMatrixT<Scalar> &g, Scalar snr)
{
    CMatrixT<Scalar> m = CMatrixT<Scalar>::Identity(g.rows(), g.rows());
    m.noalias() += snr * g * g.adjoint();
    return log2det_hpd(m);
}

// Per-subcarrier average of log2 det(I + snr H[k] F[k] F[k]^H H[k]^H) for
// arbitrary full precoders F[k] (N_t x N_s). No constraint checks.
double spectral_efficiency(const ComplexStack &h, const ComplexStack &precoders, LinkBudget lb);

// Spectral efficiency of a hybrid beamformer. Throws DimensionError on shape
// mismatch and ContractViolation if either constraint is violated by more
// than `tol`.
double spectral_efficiency(const ComplexStack &h, const HybridBeamformer &bf, LinkBudget lb, double tol = 1e-6);

// C / ||F_RF C||_F, which gives ||F_RF F_BB||_F = 1. Throws
// DegenerateInputError when ||F_RF C||_F <= 1e-12.
ComplexMatrix project_power(const ComplexMatrix &rf, const ComplexMatrix &c);

struct ConstraintReport
{
    double modulus_error = 0.0;  // max over entries of | |F_RF(i,j)| - 1 |
    double power_error = 0.0;    // max over k of | ||F_RF F_BB[k]||_F - 1 |
    bool passed = false;
};

ConstraintReport validate_beamformer(const HybridBeamformer &bf, double tol);

// Power-only report for a fully digital precoder set.
ConstraintReport validate_precoders(const ComplexStack &precoders, double tol);

} // namespace hbf
