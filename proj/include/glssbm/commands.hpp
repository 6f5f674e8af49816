#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "glssbm/config.hpp"

namespace glssbm {

enum class Command { Simulate, Fit, Select, Report, Cv, Votes };

std::optional<Command> parse_command(const std::string& name);
const char* to_string(Command cmd);

/// Runs one workflow and writes its files under cfg.paths.output:
///   simulate  nodes.txt, edges.csv, truth.json
///   fit       trace/ (see write_trace), checkpoint.json, fit.json
///   select    selection.csv
///   report    report/*.csv, network.graphml
///   cv        roc.csv, auc.csv
///   votes     kde.csv, vote_groups.csv
/// Progress lines go to `log`. Throws InputError when the config lacks
/// what the command needs.
void run_command(Command cmd, const RunConfig& cfg, std::ostream& log);

}  // namespace glssbm
