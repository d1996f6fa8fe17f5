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

// Reference designers: the fully digital upper bound, alternating manifold
// optimization over the unit-modulus manifold, and the analog beam built from
// center-frequency array responses.

#include "hybridgnn/channel.hpp"
#include "hybridgnn/system_model.hpp"

#include <vector>

namespace hbf
{

// Power allocation maximizing sum log(1 + p_i g_i) subject to sum p_i = total,
// found by bisection on the water level. Non-positive gains receive no power.
RealVector water_filling(const RealVector &gains, double total = 1.0, double tol = 1e-12);

struct DigitalSolution
{
    ComplexStack precoders;  // K matrices of size N_t x N_s, unit Frobenius norm
    double spectral_efficiency = 0.0;
};

// Per subcarrier: top N_s right singular vectors of H[k] with water-filled
// power. Throws ContractViolation if N_s > min(N_t, N_r).
DigitalSolution fully_digital(const ComplexStack &h, int n_streams, LinkBudget lb);

// Analog columns are the unit-modulus transmit responses at the carrier
// wavelength for the N_RF strongest rays (ties to the lower ray index);
// F_BB[k] is the water-filled eigen-precoder of H[k] F_RF, power-projected.
// Throws ConfigError when there are fewer rays than RF chains.
HybridBeamformer av_single(const ChannelRealization &ch, const SystemConfig &cfg, LinkBudget lb);

struct AmoConfig
{
    int max_outer = 100;
    int max_inner = 50;
    double initial_step = 1.0;
    double contraction = 0.5;
    double sufficient_decrease = 1e-4;
    double gradient_tolerance = 1e-6;
    double objective_tolerance = 1e-6;

    void validate() const;
};

struct AmoResult
{
    HybridBeamformer beamformer;
    // sum_k ||F_opt[k] - F_RF F_BB[k]||_F^2 after each outer alternation.
    std::vector<double> objective;
    int outer_iterations = 0;
    int riemannian_steps = 0;
    // Set when F_RF^H F_RF needed the 1e-10 ridge.
    bool regularized = false;
};

// Entrywise projection onto the unit circle. Entries already of unit modulus
// to within rounding are returned unchanged, zeros map to 1.
ComplexMatrix retract(const ComplexMatrix &x);

// Euclidean gradient of sum_k ||F_opt[k] - F_RF F_BB[k]||_F^2 in F_RF,
// projected onto the tangent space of the unit-modulus manifold at F_RF.
ComplexMatrix riemannian_gradient(const ComplexMatrix &rf, const ComplexStack &targets, const ComplexStack &baseband);

double amo_objective(const ComplexMatrix &rf, const ComplexStack &targets, const ComplexStack &baseband);

// Least-squares digital matrices for a fixed analog matrix.
ComplexStack least_squares_baseband(const ComplexMatrix &rf, const ComplexStack &targets, bool *regularized = nullptr);

// Alternating minimization towards the fully digital precoders. The analog
// matrix starts from `initial_rf` when given, otherwise from phases uniform on
// [0, 2 pi) drawn from `rng`.
AmoResult amo_design(const ComplexStack &h, int n_rf, int n_streams, const AmoConfig &cfg, LinkBudget lb, Rng &rng,
                     const ComplexMatrix *initial_rf = nullptr);

// Same, against explicitly given targets.
AmoResult amo_factorize(const ComplexStack &targets, int n_rf, const AmoConfig &cfg, Rng &rng,
                        const ComplexMatrix *initial_rf = nullptr);

} // namespace hbf
