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

#include "hybridgnn/model_io.hpp"
#include "hybridgnn/errors.hpp"

#include "binary_io.hpp"

#include <fstream>

namespace hbf
{

namespace
{

constexpr std::string_view kMagic = "SQNN";
constexpr std::uint32_t kVersion = 1;

nlohmann::json widths(const Mlp &net)
{
    return {net.input_width(), net.layers[0].weight.rows(), net.layers[1].weight.rows(), net.output_width()};
}

GnnDims dims_from(const nlohmann::json &j)
{
    return {j.at("n_tx").get<int>(), j.at("n_rx").get<int>(), j.at("n_rf").get<int>(), j.at("n_streams").get<int>()};
}

nlohmann::json parse_header(std::istream &is)
{
    const std::string text = io::read_header(is, kMagic, kVersion);
    try
    {
        return nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw FormatError(std::string("model header: ") + e.what());
    }
}

} // namespace

void model_save(const std::filesystem::path &path, const GnnModel &model, const nlohmann::json &metadata)
{
    nlohmann::json h;
    h["dims"] = {{"n_tx", model.dims.n_tx},
                 {"n_rx", model.dims.n_rx},
                 {"n_rf", model.dims.n_rf},
                 {"n_streams", model.dims.n_streams}};
    h["layers"] = model.layers;
    h["widths"] = {{"analog_message", widths(model.analog_message)},
                   {"digital_message", widths(model.digital_message)},
                   {"analog_update", widths(model.analog_update)},
                   {"digital_update", widths(model.digital_update)}};
    h["activation"] = "relu";
    h["weight_order"] = "column-major";
    h["parameter_count"] = model.parameter_count();
    h["training"] = metadata.is_null() ? nlohmann::json::object() : metadata;

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    io::write_header(os, kMagic, kVersion, h.dump());
    for (const RealMatrix *p : model.parameters())
        for (Eigen::Index i = 0; i < p->size(); ++i)
            io::write_le(os, p->data()[i]);
    if (!os)
        throw std::runtime_error("write failed for " + path.string());
}

nlohmann::json model_header(const std::filesystem::path &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + path.string());
    return parse_header(is);
}

GnnModel model_load(const std::filesystem::path &path, std::optional<GnnDims> expected)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + path.string());
    const nlohmann::json h = parse_header(is);

    GnnDims dims;
    int layers = 0;
    try
    {
        dims = dims_from(h.at("dims"));
        layers = h.at("layers").get<int>();
        if (h.at("activation").get<std::string>() != "relu")
            throw FormatError("model header: unsupported activation");
    }
    catch (const nlohmann::json::exception &e)
    {
        throw FormatError(std::string("model header: ") + e.what());
    }
    if (expected && !(*expected == dims))
        throw ConfigError("model file dimensions (N_t=" + std::to_string(dims.n_tx) + ", N_r=" +
                          std::to_string(dims.n_rx) + ", N_RF=" + std::to_string(dims.n_rf) + ", N_s=" +
                          std::to_string(dims.n_streams) + ") do not match the expected configuration");

    // Shapes come from the dims; the stored widths must agree with them.
    Rng scratch(0);
    GnnModel model;
    try
    {
        model = init_model(dims, layers, scratch);
    }
    catch (const ConfigError &e)
    {
        throw FormatError(std::string("model header: ") + e.what());
    }
    if (!h.contains("widths") || !h.at("widths").is_object())
        throw FormatError("model header: missing widths");
    const auto &w = h.at("widths");
    const std::pair<const char *, const Mlp *> nets[] = {{"analog_message", &model.analog_message},
                                                         {"digital_message", &model.digital_message},
                                                         {"analog_update", &model.analog_update},
                                                         {"digital_update", &model.digital_update}};
    for (auto [name, net] : nets)
        if (!w.contains(name) || w.at(name) != widths(*net))
            throw FormatError(std::string("model header: widths of ") + name + " disagree with the dimensions");

    for (RealMatrix *p : model.parameters())
        for (Eigen::Index i = 0; i < p->size(); ++i)
            p->data()[i] = io::read_le<double>(is, "weights");
    if (is.peek() != std::char_traits<char>::eof())
        throw FormatError("trailing bytes after the model weights");
    return model;
}

} // namespace hbf
