#include "glssbm/commands.hpp"

#include <filesystem>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "glssbm/analysis.hpp"
#include "glssbm/csv.hpp"
#include "glssbm/error.hpp"
#include "glssbm/network.hpp"
#include "glssbm/postprocess.hpp"
#include "glssbm/selection.hpp"
#include "glssbm/trace_io.hpp"

namespace glssbm {

namespace {

namespace fs = std::filesystem;

void require(bool ok, Command cmd, const std::string& what) {
  if (!ok) throw InputError(fmt::format("'{}' requires {}", to_string(cmd), what));
}

DirectedNetwork load_network(const RunConfig& cfg, Command cmd) {
  require(!cfg.paths.edges.empty() && !cfg.paths.nodes.empty(), cmd, "paths.edges and paths.nodes");
  return load_edge_list(cfg.paths.edges, cfg.paths.nodes);
}

fs::path trace_dir(const RunConfig& cfg) {
  return cfg.paths.trace.empty() ? cfg.paths.output / "trace" : cfg.paths.trace;
}

std::vector<NodeMeta> load_meta_if_any(const RunConfig& cfg, const DirectedNetwork& net) {
  if (cfg.paths.metadata.empty()) return {};
  return load_metadata(cfg.paths.metadata, net);
}

void simulate(const RunConfig& cfg, std::ostream& log) {
  require(cfg.simulate.nodes > 0, Command::Simulate, "simulate.N");
  const int k = cfg.model.num_blocks;
  Rng rng(cfg.sampler.seed);
  ParamState truth = sample_from_prior(cfg.model, static_cast<std::size_t>(cfg.simulate.nodes), rng);
  if (!cfg.simulate.beta.empty()) {
    if (cfg.simulate.beta.size() != static_cast<std::size_t>(k))
      throw InputError(fmt::format("simulate.beta needs {} values", k));
    for (int a = 0; a < k; ++a) truth.beta[a] = cfg.simulate.beta[static_cast<std::size_t>(a)];
  }
  if (!cfg.simulate.tau.empty()) {
    const auto off = static_cast<std::size_t>(k * (k - 1));
    const auto& t = cfg.simulate.tau;
    if (t.size() != 1 && t.size() != off) throw InputError(fmt::format("simulate.tau needs 1 or {} values", off));
    std::size_t c = 0;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        if (a != b) truth.tau(a, b) = t.size() == 1 ? t.front() : t[c++];
  }
  truth.validate();
  const auto net = generate_network(truth, rng);
  write_edge_list(net, cfg.paths.output / "edges.csv", cfg.paths.output / "nodes.txt");
  write_state_json(truth, cfg.paths.output / "truth.json");
  fmt::print(log, "simulated {} nodes, {} edges\n", net.size(), net.edge_count());
}

void fit(const RunConfig& cfg, std::ostream& log) {
  const auto net = load_network(cfg, Command::Fit);
  const auto trace = run_chain(net, DyadMask::all_observed(net.size()), cfg.model, cfg.sampler);
  write_trace(trace, net, trace_dir(cfg));
  nlohmann::json summary{{"samples", trace.size()},
                         {"node_acceptance", trace.acceptance.node_rate()},
                         {"beta_acceptance", trace.acceptance.beta_rate()},
                         {"label_changes", trace.acceptance.label_changes}};
  if (!trace.samples.empty()) write_state_json(trace.samples.back(), cfg.paths.output / "checkpoint.json");
  if (trace.size() >= 2) {
    const auto w = waic(trace);
    summary["waic"] = {{"pred", w.pred}, {"penalty", w.penalty}, {"waic", w.waic}};
  }
  auto out = csv::open_output(cfg.paths.output / "fit.json");
  out << summary.dump(2) << '\n';
  fmt::print(log, "stored {} samples (node acceptance {:.3f}, beta acceptance {:.3f})\n", trace.size(),
             trace.acceptance.node_rate(), trace.acceptance.beta_rate());
}

void select(const RunConfig& cfg, std::ostream& log) {
  require(!cfg.grid_dims.empty() && !cfg.grid_blocks.empty(), Command::Select, "grid.dims and grid.blocks");
  const auto net = load_network(cfg, Command::Select);
  const auto grid = fit_grid(net, DyadMask::all_observed(net.size()), cfg.grid_dims, cfg.grid_blocks, cfg.model,
                             cfg.sampler, cfg.threads);
  write_grid_csv(grid, cfg.paths.output / "selection.csv");
  const auto& best = grid.best_row();
  fmt::print(log, "best model: d={} K={} (WAIC {})\n", best.dim, best.blocks, best.result.waic);
}

PosteriorSummary posterior_summary(const RunConfig& cfg, const DirectedNetwork& net) {
  const auto trace = relabel_trace(read_trace(trace_dir(cfg)));
  if (trace.samples.front().size() != net.size()) throw InputError("trace and network disagree on the node count");
  const auto ref = classical_mds(net, trace.model.latent_dim);
  return summarize(align_trace(trace, ref, cfg.align), net);
}

void report(const RunConfig& cfg, std::ostream& log) {
  const auto net = load_network(cfg, Command::Report);
  const auto meta = load_meta_if_any(cfg, net);
  const auto summary = posterior_summary(cfg, net);
  write_summary(summary, net, meta, cfg.paths.output / "report");
  export_graph(net, meta, cfg.paths.output / "network.graphml");
  fmt::print(log, "wrote report for {} blocks\n", summary.allocation.size());
}

void cross_validate(const RunConfig& cfg, std::ostream& log) {
  const auto net = load_network(cfg, Command::Cv);
  const auto result = kfold_dyad_cv(net, cfg.model, cfg.sampler, cfg.cv_folds, cfg.sampler.seed, cfg.threads);
  write_roc_csv(result.roc, cfg.paths.output / "roc.csv");
  auto out = csv::open_output(cfg.paths.output / "auc.csv");
  out << "fold,auc\n";
  for (std::size_t f = 0; f < result.fold_auc.size(); ++f) out << f + 1 << ',' << csv::format_double(result.fold_auc[f]) << '\n';
  out << "pooled," << csv::format_double(result.roc.auc) << '\n';
  fmt::print(log, "pooled AUC {:.4f}\n", result.roc.auc);
}

void votes(const RunConfig& cfg, std::ostream& log) {
  require(!cfg.paths.votes.empty(), Command::Votes, "paths.votes");
  const auto net = load_network(cfg, Command::Votes);
  const auto table = load_votes(cfg.paths.votes, net);
  const auto summary = posterior_summary(cfg, net);
  const auto rep = vote_density_report(summary, table);
  write_kde_csv(rep, cfg.paths.output / "kde.csv");
  auto out = csv::open_output(cfg.paths.output / "vote_groups.csv");
  out << "vote_id,group,count,mean,point_mass\n";
  for (const auto& vd : rep)
    for (const auto& g : vd.groups)
      out << csv::escape(vd.vote_id) << ',' << to_string(g.group) << ',' << g.count << ','
          << csv::format_double(g.mean) << ',' << (g.point_mass() ? 1 : 0) << '\n';
  fmt::print(log, "wrote densities for {} votes\n", rep.size());
}

}  // namespace

std::optional<Command> parse_command(const std::string& name) {
  if (name == "simulate") return Command::Simulate;
  if (name == "fit") return Command::Fit;
  if (name == "select") return Command::Select;
  if (name == "report") return Command::Report;
  if (name == "cv") return Command::Cv;
  if (name == "votes") return Command::Votes;
  return std::nullopt;
}

const char* to_string(Command cmd) {
  switch (cmd) {
    case Command::Simulate: return "simulate";
    case Command::Fit: return "fit";
    case Command::Select: return "select";
    case Command::Report: return "report";
    case Command::Cv: return "cv";
    case Command::Votes: return "votes";
  }
  return "?";
}

void run_command(Command cmd, const RunConfig& cfg, std::ostream& log) {
  require(!cfg.paths.output.empty(), cmd, "an output directory (paths.output or --out)");
  fs::create_directories(cfg.paths.output);
  switch (cmd) {
    case Command::Simulate: simulate(cfg, log); break;
    case Command::Fit: fit(cfg, log); break;
    case Command::Select: select(cfg, log); break;
    case Command::Report: report(cfg, log); break;
    case Command::Cv: cross_validate(cfg, log); break;
    case Command::Votes: votes(cfg, log); break;
  }
}

}  // namespace glssbm
