#include "glssbm/trace_io.hpp"

#include <fstream>

#include <fmt/format.h>

#include "glssbm/csv.hpp"
#include "glssbm/error.hpp"

namespace glssbm {

void to_json(nlohmann::json& j, const ModelConfig& cfg) {
  j = nlohmann::json{{"K", cfg.num_blocks},
                     {"d", cfg.latent_dim},
                     {"T", cfg.concentration},
                     {"E0", cfg.tau_prior_a},
                     {"E1", cfg.tau_prior_b},
                     {"mu_beta", cfg.beta_prior_mean},
                     {"sigma_beta", cfg.beta_prior_sd},
                     {"sigma", cfg.position_sd}};
}

void to_json(nlohmann::json& j, const SamplerConfig& cfg) {
  j = nlohmann::json{{"iterations", cfg.iterations}, {"burn_in", cfg.burn_in},
                     {"thin", cfg.thin},             {"delta", cfg.delta},
                     {"delta_beta", cfg.delta_beta}, {"seed", cfg.seed},
                     {"paper_literal_tau", cfg.paper_literal_tau}};
}

namespace {

ModelConfig model_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  cfg.num_blocks = j.at("K").get<int>();
  cfg.latent_dim = j.at("d").get<int>();
  cfg.concentration = j.at("T").get<double>();
  cfg.tau_prior_a = j.at("E0").get<double>();
  cfg.tau_prior_b = j.at("E1").get<double>();
  cfg.beta_prior_mean = j.at("mu_beta").get<double>();
  cfg.beta_prior_sd = j.at("sigma_beta").get<double>();
  cfg.position_sd = j.at("sigma").get<std::vector<double>>();
  return cfg;
}

SamplerConfig sampler_from_json(const nlohmann::json& j) {
  SamplerConfig cfg;
  cfg.iterations = j.at("iterations").get<int>();
  cfg.burn_in = j.at("burn_in").get<int>();
  cfg.thin = j.at("thin").get<int>();
  cfg.delta = j.at("delta").get<double>();
  cfg.delta_beta = j.at("delta_beta").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.paper_literal_tau = j.at("paper_literal_tau").get<bool>();
  return cfg;
}

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path, std::size_t columns) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw InputError(path.string() + ": missing header");
  std::vector<std::vector<double>> rows;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (csv::trim(lines[ln]).empty()) continue;
    const auto f = csv::split(lines[ln]);
    if (f.size() != columns) throw InputError(fmt::format("{}:{}: expected {} columns", path.string(), ln + 1, columns));
    std::vector<double> row(columns);
    for (std::size_t c = 0; c < columns; ++c) {
      try {
        row[c] = std::stod(f[c]);
      } catch (const std::exception&) {
        throw InputError(fmt::format("{}:{}: bad number '{}'", path.string(), ln + 1, f[c]));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_trace(const TraceStore& trace, const DirectedNetwork& net, const std::filesystem::path& dir) {
  using csv::format_double;
  std::filesystem::create_directories(dir);
  const int k = trace.model.num_blocks;
  const int d = trace.model.latent_dim;

  auto gamma = csv::open_output(dir / "gamma.csv");
  auto beta = csv::open_output(dir / "beta.csv");
  auto tau = csv::open_output(dir / "tau.csv");
  auto pi = csv::open_output(dir / "pi.csv");
  auto z = csv::open_output(dir / "z.jsonl");
  auto ll = csv::open_output(dir / "loglik.csv");

  for (std::size_t i = 0; i < net.size(); ++i) gamma << (i ? "," : "") << csv::escape(net.node_ids()[i]);
  gamma << '\n';
  for (int a = 0; a < k; ++a) {
    beta << (a ? "," : "") << "beta_" << a + 1;
    pi << (a ? "," : "") << "pi_" << a + 1;
  }
  beta << '\n';
  pi << '\n';
  bool first = true;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (a != b) {
        tau << (first ? "" : ",") << "tau_" << a + 1 << '_' << b + 1;
        first = false;
      }
  tau << '\n';
  ll << "loglik\n";

  for (std::size_t t = 0; t < trace.size(); ++t) {
    const auto& s = trace.samples[t];
    for (std::size_t i = 0; i < s.size(); ++i) gamma << (i ? "," : "") << s.labels[i] + 1;
    gamma << '\n';
    for (int a = 0; a < k; ++a) {
      beta << (a ? "," : "") << format_double(s.beta[a]);
      pi << (a ? "," : "") << format_double(s.pi[a]);
    }
    beta << '\n';
    pi << '\n';
    first = true;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        if (a != b) {
          tau << (first ? "" : ",") << format_double(s.tau(a, b));
          first = false;
        }
    tau << '\n';
    z << '[';
    for (Eigen::Index i = 0; i < s.positions.rows(); ++i) {
      z << (i ? ",[" : "[");
      for (int c = 0; c < d; ++c) z << (c ? "," : "") << format_double(s.positions(i, c));
      z << ']';
    }
    z << "]\n";
    ll << format_double(trace.loglik[t]) << '\n';
  }

  nlohmann::json meta{{"samples", trace.size()},
                      {"nodes", net.size()},
                      {"model", trace.model},
                      {"sampler", trace.sampler},
                      {"acceptance",
                       {{"node_proposals", trace.acceptance.node_proposals},
                        {"node_accepted", trace.acceptance.node_accepted},
                        {"label_changes", trace.acceptance.label_changes},
                        {"beta_proposals", trace.acceptance.beta_proposals},
                        {"beta_accepted", trace.acceptance.beta_accepted}}}};
  auto m = csv::open_output(dir / "trace.json");
  m << meta.dump(2) << '\n';
  if (!gamma || !beta || !tau || !pi || !z || !ll || !m) throw IoError("failed writing trace to " + dir.string());
}

TraceStore read_trace(const std::filesystem::path& dir) {
  TraceStore trace;
  std::size_t n = 0;
  std::size_t s_count = 0;
  {
    std::ifstream in(dir / "trace.json");
    if (!in) throw IoError("cannot open " + (dir / "trace.json").string());
    try {
      const auto meta = nlohmann::json::parse(in);
      trace.model = model_from_json(meta.at("model"));
      trace.sampler = sampler_from_json(meta.at("sampler"));
      n = meta.at("nodes").get<std::size_t>();
      s_count = meta.at("samples").get<std::size_t>();
      const auto& acc = meta.at("acceptance");
      trace.acceptance.node_proposals = acc.at("node_proposals").get<std::uint64_t>();
      trace.acceptance.node_accepted = acc.at("node_accepted").get<std::uint64_t>();
      trace.acceptance.label_changes = acc.at("label_changes").get<std::uint64_t>();
      trace.acceptance.beta_proposals = acc.at("beta_proposals").get<std::uint64_t>();
      trace.acceptance.beta_accepted = acc.at("beta_accepted").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError("malformed trace.json: " + std::string(e.what()));
    }
  }
  const int k = trace.model.num_blocks;
  const int d = trace.model.latent_dim;
  const auto uk = static_cast<std::size_t>(k);

  const auto gamma = read_numeric_csv(dir / "gamma.csv", n);
  const auto beta = read_numeric_csv(dir / "beta.csv", uk);
  const auto tau = read_numeric_csv(dir / "tau.csv", uk * (uk - 1));
  const auto pi = read_numeric_csv(dir / "pi.csv", uk);
  const auto ll = read_numeric_csv(dir / "loglik.csv", 1);
  const auto z_lines = csv::read_lines(dir / "z.jsonl");
  if (gamma.size() != s_count || beta.size() != s_count || tau.size() != s_count || pi.size() != s_count ||
      ll.size() != s_count || z_lines.size() < s_count)
    throw InputError("trace files disagree on the sample count in " + dir.string());

  for (std::size_t t = 0; t < s_count; ++t) {
    ParamState s;
    s.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.labels[i] = static_cast<int>(gamma[t][i]) - 1;
    s.beta = Eigen::Map<const Eigen::VectorXd>(beta[t].data(), k);
    s.pi = Eigen::Map<const Eigen::VectorXd>(pi[t].data(), k);
    s.tau = Eigen::MatrixXd::Zero(k, k);
    std::size_t c = 0;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        if (a != b) s.tau(a, b) = tau[t][c++];
    s.positions.resize(static_cast<Eigen::Index>(n), d);
    try {
      const auto z = nlohmann::json::parse(z_lines[t]);
      if (z.size() != n) throw InputError("z.jsonl row count differs from N");
      for (std::size_t i = 0; i < n; ++i)
        for (int cc = 0; cc < d; ++cc)
          s.positions(static_cast<Eigen::Index>(i), cc) = z[i].at(static_cast<std::size_t>(cc)).get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError(fmt::format("z.jsonl line {}: {}", t + 1, e.what()));
    }
    trace.samples.push_back(std::move(s));
    trace.loglik.push_back(ll[t][0]);
  }
  return trace;
}

void write_state_json(const ParamState& state, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  out << nlohmann::json(state).dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

ParamState read_state_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in).get<ParamState>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace glssbm
