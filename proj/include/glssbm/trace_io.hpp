#pragma once

#include <filesystem>

#include "json.hpp"

#include "glssbm/model.hpp"
#include "glssbm/network.hpp"
#include "glssbm/sampler.hpp"

namespace glssbm {

void to_json(nlohmann::json& j, const ModelConfig& cfg);
void to_json(nlohmann::json& j, const SamplerConfig& cfg);

/// Writes a trace as traceplot-ready files:
///   gamma.csv   S x N block labels (1-based), header = node ids
///   beta.csv    S x K, header beta_1..beta_K
///   tau.csv     S x K(K-1), header tau_k_l for k != l in row-major order
///   pi.csv      S x K, header pi_1..pi_K
///   z.jsonl     one JSON array of N position rows per sample
///   loglik.csv  one log-likelihood per sample, header "loglik"
///   trace.json  configs, acceptance rates and dimensions
void write_trace(const TraceStore& trace, const DirectedNetwork& net, const std::filesystem::path& dir);

/// Reads a directory written by write_trace. Configs are restored from
/// trace.json.
TraceStore read_trace(const std::filesystem::path& dir);

void write_state_json(const ParamState& state, const std::filesystem::path& path);
ParamState read_state_json(const std::filesystem::path& path);

}  // namespace glssbm
