#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "glssbm/model.hpp"
#include "glssbm/postprocess.hpp"
#include "glssbm/sampler.hpp"

namespace glssbm {

struct PathsConfig {
  std::filesystem::path edges;
  std::filesystem::path nodes;
  std::filesystem::path metadata;
  std::filesystem::path votes;
  std::filesystem::path output;
  std::filesystem::path trace;  // defaults to <output>/trace
};

struct SimulateConfig {
  int nodes = 0;
  std::vector<double> beta;  // optional per-block override
  std::vector<double> tau;   // optional: one value for every off-diagonal entry, or K(K-1) row-major
};

/// Everything a command needs. Built by parse_config; the section set
/// records which sections the file actually contained.
struct RunConfig {
  PathsConfig paths;
  ModelConfig model = ModelConfig::make(1, 0);
  SamplerConfig sampler;
  std::vector<int> grid_dims;
  std::vector<int> grid_blocks;
  int cv_folds = 10;
  SimulateConfig simulate;
  AlignMode align = AlignMode::PerBlock;
  unsigned threads = 1;
  std::set<std::string> sections;
};

/// Parses "key = value" lines. Keys are "section.name", either written out
/// in full or under a "[section]" header; '#' starts a comment. Relative
/// paths resolve against the config file's directory. Throws InputError
/// naming unknown keys and violated constraints.
RunConfig parse_config(const std::filesystem::path& path);

/// Same, from text; relative paths resolve against `base_dir`.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});

}  // namespace glssbm
