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

#include <stdexcept>
#include <string>

namespace hbf
{

// Shape or dimension disagreement between operands.
struct DimensionError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

// A documented precondition was violated by the caller.
struct ContractViolation : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

// Invalid system, model or experiment configuration.
struct ConfigError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

// Decomposition failure, non-finite value or degenerate input.
struct NumericError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// Input whose norm is too small to normalize.
struct DegenerateInputError : NumericError
{
    using NumericError::NumericError;
};

// Malformed dataset or model file.
struct FormatError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

} // namespace hbf
