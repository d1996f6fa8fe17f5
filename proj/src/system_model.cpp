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

#include "hybridgnn/system_model.hpp"
#include "hybridgnn/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace hbf
{

double spectral_efficiency(const ComplexStack &h, const ComplexStack &precoders, LinkBudget lb)
{
    if (h.size() != precoders.size() || h.empty())
        throw DimensionError("spectral_efficiency: need one precoder per subcarrier");
    const double snr = lb.snr_linear();
    double acc = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k)
    {
        if (h[k].cols() != precoders[k].rows())
            throw DimensionError("spectral_efficiency: precoder rows differ from transmit antennas");
        const ComplexMatrix g = h[k] * precoders[k];
        const double r = rate_of_effective_channel<double>(g, snr);
        if (!std::isfinite(r))
            throw NumericError("spectral_efficiency: Cholesky failed on subcarrier " + std::to_string(k));
        acc += r;
    }
    return std::max(0.0, acc / static_cast<double>(h.size()));
}

double spectral_efficiency(const ComplexStack &h, const HybridBeamformer &bf, LinkBudget lb, double tol)
{
    if (bf.baseband.size() != h.size())
        throw DimensionError("spectral_efficiency: need one digital matrix per subcarrier");
    for (std::size_t k = 0; k < h.size(); ++k)
        if (h[k].cols() != bf.rf.rows() || bf.baseband[k].rows() != bf.rf.cols())
            throw DimensionError("spectral_efficiency: beamformer shape does not match the channel");
    const auto report = validate_beamformer(bf, tol);
    if (!report.passed)
        throw ContractViolation("spectral_efficiency: constraint violation (modulus " + std::to_string(report.modulus_error) +
                                ", power " + std::to_string(report.power_error) + ")");
    ComplexStack full;
    full.reserve(h.size());
    for (const auto &bb : bf.baseband)
        full.push_back(bf.rf * bb);
    return spectral_efficiency(h, full, lb);
}

ComplexMatrix project_power(const ComplexMatrix &rf, const ComplexMatrix &c)
{
    if (rf.cols() != c.rows())
        throw DimensionError("project_power: F_RF columns differ from C rows");
    const double n = (rf * c).norm();
    if (!(n > 1e-12))
        throw DegenerateInputError("project_power: ||F_RF C||_F is below 1e-12");
    return c / n;
}

namespace
{

// Keeps NaN once seen so a corrupted matrix cannot pass.
void worst(double &acc, double e)
{
    if (!std::isnan(acc) && !(e <= acc))
        acc = e;
}

} // namespace

ConstraintReport validate_beamformer(const HybridBeamformer &bf, double tol)
{
    ConstraintReport rep;
    if (!bf.rf.allFinite())
        rep.modulus_error = std::numeric_limits<double>::infinity();
    else if (bf.rf.size() > 0)
        rep.modulus_error = (bf.rf.cwiseAbs().array() - 1.0).abs().maxCoeff();
    for (const auto &bb : bf.baseband)
        worst(rep.power_error, std::abs((bf.rf * bb).norm() - 1.0));
    rep.passed = rep.modulus_error <= tol && rep.power_error <= tol;
    return rep;
}

ConstraintReport validate_precoders(const ComplexStack &precoders, double tol)
{
    ConstraintReport rep;
    for (const auto &f : precoders)
        worst(rep.power_error, std::abs(f.norm() - 1.0));
    rep.passed = rep.power_error <= tol;
    return rep;
}

} // namespace hbf
