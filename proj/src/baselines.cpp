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

#include "hybridgnn/baselines.hpp"
#include "hybridgnn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace hbf
{

using Eigen::Index;

RealVector water_filling(const RealVector &gains, double total, double tol)
{
    const Index n = gains.size();
    RealVector p = RealVector::Zero(n);
    if (n == 0 || !(total > 0.0))
        return p;
    const bool any_positive = (gains.array() > 0.0).any();
    if (!any_positive)
    {
        p.setConstant(total / static_cast<double>(n));
        return p;
    }

    auto allocated = [&](double level) {
        double s = 0.0;
        for (Index i = 0; i < n; ++i)
            if (gains(i) > 0.0)
                s += std::max(0.0, level - 1.0 / gains(i));
        return s;
    };

    double lo = 0.0;
    double hi = total;
    for (Index i = 0; i < n; ++i)
        if (gains(i) > 0.0)
            hi = std::max(hi, total + 1.0 / gains(i));
    while (hi - lo > tol * std::max(1.0, hi))
    {
        const double mid = 0.5 * (lo + hi);
        if (allocated(mid) > total)
            hi = mid;
        else
            lo = mid;
    }
    const double level = 0.5 * (lo + hi);
    for (Index i = 0; i < n; ++i)
        if (gains(i) > 0.0)
            p(i) = std::max(0.0, level - 1.0 / gains(i));
    const double s = p.sum();
    if (s > 0.0)
        p *= total / s;
    return p;
}

namespace
{

// Water-filled top-`n_streams` right singular directions of `g`.
ComplexMatrix eigen_precoder(const ComplexMatrix &g, int n_streams, double snr)
{
    Eigen::JacobiSVD<ComplexMatrix> svd(g, Eigen::ComputeThinV);
    const RealVector sv = svd.singularValues().head(n_streams);
    const RealVector power = water_filling((snr * sv.array().square()).matrix());
    return svd.matrixV().leftCols(n_streams) * power.cwiseSqrt().asDiagonal();
}

} // namespace

DigitalSolution fully_digital(const ComplexStack &h, int n_streams, LinkBudget lb)
{
    if (h.empty())
        throw ContractViolation("fully_digital: no subcarriers");
    DigitalSolution sol;
    const double snr = lb.snr_linear();
    for (const auto &hk : h)
    {
        if (n_streams < 1 || n_streams > std::min(hk.rows(), hk.cols()))
            throw ContractViolation("fully_digital: need 1 <= N_s <= min(N_t, N_r)");
        ComplexMatrix f = eigen_precoder(hk, n_streams, snr);
        if (!f.allFinite())
            throw NumericError("fully_digital: SVD produced non-finite values");
        sol.precoders.push_back(std::move(f));
    }
    sol.spectral_efficiency = spectral_efficiency(h, sol.precoders, lb);
    return sol;
}

HybridBeamformer av_single(const ChannelRealization &ch, const SystemConfig &cfg, LinkBudget lb)
{
    if (static_cast<int>(ch.rays.size()) < cfg.n_rf)
        throw ConfigError("av_single: " + std::to_string(ch.rays.size()) + " rays cannot fill " + std::to_string(cfg.n_rf) +
                          " RF chains");
    std::vector<std::size_t> idx(ch.rays.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(ch.rays[a].gain) > std::abs(ch.rays[b].gain); });

    const double lambda_c = kSpeedOfLight / cfg.carrier_hz;
    const double amp = std::sqrt(static_cast<double>(cfg.n_tx()));
    HybridBeamformer bf;
    bf.rf.resize(cfg.n_tx(), cfg.n_rf);
    for (int j = 0; j < cfg.n_rf; ++j)
    {
        const Ray &r = ch.rays[idx[static_cast<std::size_t>(j)]];
        bf.rf.col(j) = amp * array_response(cfg.tx, cfg.spacing(), lambda_c, r.aod_azimuth, r.aod_elevation);
    }
    bf.rf = retract(bf.rf);

    const double snr = lb.snr_linear();
    for (const auto &hk : ch.h)
        bf.baseband.push_back(project_power(bf.rf, eigen_precoder(hk * bf.rf, cfg.n_streams, snr)));
    return bf;
}

void AmoConfig::validate() const
{
    if (max_outer < 1 || max_inner < 1)
        throw ConfigError("AMO iteration limits must be positive");
    if (!(initial_step > 0.0) || !(contraction > 0.0 && contraction < 1.0) || !(sufficient_decrease > 0.0))
        throw ConfigError("AMO Armijo parameters need step > 0, contraction in (0, 1), decrease coefficient > 0");
    if (!(gradient_tolerance > 0.0) || !(objective_tolerance > 0.0))
        throw ConfigError("AMO tolerances must be positive");
}

ComplexMatrix retract(const ComplexMatrix &x)
{
    constexpr double kUnitSlack = 8.0 * std::numeric_limits<double>::epsilon();
    ComplexMatrix y(x.rows(), x.cols());
    for (Index i = 0; i < x.size(); ++i)
    {
        const Complex v = x.data()[i];
        const double a = std::abs(v);
        if (a == 0.0)
            y.data()[i] = Complex(1.0, 0.0);
        else if (std::abs(a - 1.0) <= kUnitSlack)
            y.data()[i] = v;
        else
            y.data()[i] = v / a;
    }
    return y;
}

double amo_objective(const ComplexMatrix &rf, const ComplexStack &targets, const ComplexStack &baseband)
{
    double g = 0.0;
    for (std::size_t k = 0; k < targets.size(); ++k)
        g += (targets[k] - rf * baseband[k]).squaredNorm();
    return g;
}

ComplexMatrix riemannian_gradient(const ComplexMatrix &rf, const ComplexStack &targets, const ComplexStack &baseband)
{
    ComplexMatrix egrad = ComplexMatrix::Zero(rf.rows(), rf.cols());
    for (std::size_t k = 0; k < targets.size(); ++k)
        egrad.noalias() -= 2.0 * (targets[k] - rf * baseband[k]) * baseband[k].adjoint();
    // Remove the radial component Re{grad .* conj(F)} .* F.
    const RealMatrix radial = egrad.cwiseProduct(rf.conjugate()).real();
    return egrad - (rf.array() * radial.array().cast<Complex>()).matrix();
}

ComplexStack least_squares_baseband(const ComplexMatrix &rf, const ComplexStack &targets, bool *regularized)
{
    const ComplexMatrix gram = rf.adjoint() * rf;
    Eigen::LLT<ComplexMatrix> llt(gram);
    bool ridge = llt.info() != Eigen::Success;
    if (!ridge)
    {
        const RealVector d = llt.matrixLLT().diagonal().real();
        // Rounding leaves pivots near sqrt(eps) times the scale on singular input.
        ridge = d.minCoeff() <= 1e-6 * std::sqrt(std::max(1.0, gram.real().diagonal().maxCoeff()));
    }
    if (ridge)
        llt.compute(gram + 1e-10 * ComplexMatrix::Identity(gram.rows(), gram.cols()));
    if (regularized)
        *regularized = ridge;

    ComplexStack out;
    out.reserve(targets.size());
    for (const auto &t : targets)
        out.push_back(llt.solve(rf.adjoint() * t));
    return out;
}

AmoResult amo_factorize(const ComplexStack &targets, int n_rf, const AmoConfig &cfg, Rng &rng,
                        const ComplexMatrix *initial_rf)
{
    cfg.validate();
    if (targets.empty())
        throw ContractViolation("amo: no subcarriers");
    const Index n_tx = targets.front().rows();
    if (n_rf < 1 || n_rf > n_tx)
        throw ConfigError("amo: need 1 <= N_RF <= N_t");

    ComplexMatrix rf;
    if (initial_rf)
    {
        if (initial_rf->rows() != n_tx || initial_rf->cols() != n_rf)
            throw DimensionError("amo: initial analog matrix has the wrong shape");
        rf = retract(*initial_rf);
    }
    else
    {
        std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
        rf.resize(n_tx, n_rf);
        for (Index j = 0; j < n_rf; ++j)
            for (Index i = 0; i < n_tx; ++i)
                rf(i, j) = std::polar(1.0, phase(rng));
    }

    AmoResult res;
    ComplexStack baseband;
    double previous = std::numeric_limits<double>::infinity();
    for (int outer = 0; outer < cfg.max_outer; ++outer)
    {
        bool ridge = false;
        baseband = least_squares_baseband(rf, targets, &ridge);
        res.regularized = res.regularized || ridge;

        double g = amo_objective(rf, targets, baseband);
        for (int inner = 0; inner < cfg.max_inner; ++inner)
        {
            const ComplexMatrix tangent = riemannian_gradient(rf, targets, baseband);
            const double slope = tangent.squaredNorm();
            if (std::sqrt(slope) < cfg.gradient_tolerance)
                break;

            double step = cfg.initial_step;
            bool accepted = false;
            for (int backtrack = 0; backtrack < 64; ++backtrack, step *= cfg.contraction)
            {
                ComplexMatrix candidate = retract(rf - step * tangent);
                const double gc = amo_objective(candidate, targets, baseband);
                if (gc <= g - cfg.sufficient_decrease * step * slope)
                {
                    rf = std::move(candidate);
                    g = gc;
                    accepted = true;
                    break;
                }
            }
            if (!accepted)
                break;
            ++res.riemannian_steps;
        }

        res.objective.push_back(g);
        ++res.outer_iterations;
        if (std::abs(previous - g) < cfg.objective_tolerance)
            break;
        previous = g;
    }

    res.beamformer.rf = rf;
    for (const auto &bb : baseband)
        res.beamformer.baseband.push_back(project_power(rf, bb));
    return res;
}

AmoResult amo_design(const ComplexStack &h, int n_rf, int n_streams, const AmoConfig &cfg, LinkBudget lb, Rng &rng,
                     const ComplexMatrix *initial_rf)
{
    const DigitalSolution opt = fully_digital(h, n_streams, lb);
    return amo_factorize(opt.precoders, n_rf, cfg, rng, initial_rf);
}

} // namespace hbf
