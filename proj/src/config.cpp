#include "glssbm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "glssbm/csv.hpp"
#include "glssbm/error.hpp"

namespace glssbm {

namespace {

double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw InputError(fmt::format("{}: '{}' is not a number", key, v));
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw InputError(fmt::format("{}: '{}' is not an integer", key, v));
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw InputError(fmt::format("{}: '{}' is not an unsigned integer", key, v));
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const auto l = csv::to_lower(v);
  if (l == "true" || l == "yes" || l == "1") return true;
  if (l == "false" || l == "no" || l == "0") return false;
  throw InputError(fmt::format("{}: '{}' is not a boolean", key, v));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  for (auto& item : csv::split(v))
    if (!item.empty()) out.push_back(item);
  return out;
}

// "0..2" or "0,1,2"
std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  if (const auto dots = v.find(".."); dots != std::string::npos) {
    const auto lo = parse_int(key, csv::trim(v.substr(0, dots)));
    const auto hi = parse_int(key, csv::trim(v.substr(dots + 2)));
    if (hi < lo) throw InputError(fmt::format("{}: empty range '{}'", key, v));
    for (auto x = lo; x <= hi; ++x) out.push_back(static_cast<int>(x));
    return out;
  }
  for (const auto& item : split_list(v)) out.push_back(static_cast<int>(parse_int(key, item)));
  return out;
}

std::vector<double> parse_real_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(parse_real(key, item));
  return out;
}

int positive_int(const std::string& key, const std::string& v, long long min) {
  const auto x = parse_int(key, v);
  if (x < min) throw InputError(fmt::format("{} must be >= {} (got {})", key, min, x));
  return static_cast<int>(x);
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  std::optional<double> sigma2;
  std::vector<double> sigma2_list;
  auto resolve = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"paths.edges", [&](auto&, auto& v) { cfg.paths.edges = resolve(v); }},
      {"paths.nodes", [&](auto&, auto& v) { cfg.paths.nodes = resolve(v); }},
      {"paths.metadata", [&](auto&, auto& v) { cfg.paths.metadata = resolve(v); }},
      {"paths.votes", [&](auto&, auto& v) { cfg.paths.votes = resolve(v); }},
      {"paths.output", [&](auto&, auto& v) { cfg.paths.output = resolve(v); }},
      {"paths.trace", [&](auto&, auto& v) { cfg.paths.trace = resolve(v); }},
      {"model.K", [&](auto& k, auto& v) { cfg.model.num_blocks = positive_int(k, v, 1); }},
      {"model.d", [&](auto& k, auto& v) { cfg.model.latent_dim = positive_int(k, v, 0); }},
      {"model.T", [&](auto& k, auto& v) { cfg.model.concentration = parse_real(k, v); }},
      {"model.E0", [&](auto& k, auto& v) { cfg.model.tau_prior_a = parse_real(k, v); }},
      {"model.E1", [&](auto& k, auto& v) { cfg.model.tau_prior_b = parse_real(k, v); }},
      {"model.mu_beta", [&](auto& k, auto& v) { cfg.model.beta_prior_mean = parse_real(k, v); }},
      {"model.sigma_beta", [&](auto& k, auto& v) { cfg.model.beta_prior_sd = parse_real(k, v); }},
      {"model.sigma2",
       [&](auto& k, auto& v) {
         auto list = parse_real_list(k, v);
         if (list.size() == 1) {
           sigma2 = list.front();
         } else {
           sigma2_list = std::move(list);
         }
       }},
      {"sampler.iterations", [&](auto& k, auto& v) { cfg.sampler.iterations = positive_int(k, v, 0); }},
      {"sampler.burn_in", [&](auto& k, auto& v) { cfg.sampler.burn_in = positive_int(k, v, 0); }},
      {"sampler.thin", [&](auto& k, auto& v) { cfg.sampler.thin = positive_int(k, v, 1); }},
      {"sampler.delta", [&](auto& k, auto& v) { cfg.sampler.delta = parse_real(k, v); }},
      {"sampler.delta_beta", [&](auto& k, auto& v) { cfg.sampler.delta_beta = parse_real(k, v); }},
      {"sampler.seed", [&](auto& k, auto& v) { cfg.sampler.seed = parse_u64(k, v); }},
      {"sampler.paper_literal_tau", [&](auto& k, auto& v) { cfg.sampler.paper_literal_tau = parse_bool(k, v); }},
      {"grid.dims", [&](auto& k, auto& v) { cfg.grid_dims = parse_int_list(k, v); }},
      {"grid.blocks", [&](auto& k, auto& v) { cfg.grid_blocks = parse_int_list(k, v); }},
      {"cv.folds", [&](auto& k, auto& v) { cfg.cv_folds = positive_int(k, v, 2); }},
      {"simulate.N", [&](auto& k, auto& v) { cfg.simulate.nodes = positive_int(k, v, 1); }},
      {"simulate.beta", [&](auto& k, auto& v) { cfg.simulate.beta = parse_real_list(k, v); }},
      {"simulate.tau", [&](auto& k, auto& v) { cfg.simulate.tau = parse_real_list(k, v); }},
      {"report.procrustes",
       [&](auto& k, auto& v) {
         const auto l = csv::to_lower(v);
         if (l == "block") {
           cfg.align = AlignMode::PerBlock;
         } else if (l == "global") {
           cfg.align = AlignMode::Global;
         } else {
           throw InputError(fmt::format("{} must be 'block' or 'global' (got '{}')", k, v));
         }
       }},
      {"run.threads", [&](auto& k, auto& v) { cfg.threads = static_cast<unsigned>(positive_int(k, v, 1)); }},
  };

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const auto line = csv::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw InputError(fmt::format("line {}: malformed section header", line_no));
      section = csv::trim(line.substr(1, line.size() - 2));
      cfg.sections.insert(section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(fmt::format("line {}: expected 'key = value'", line_no));
    std::string key = csv::trim(line.substr(0, eq));
    const std::string value = csv::trim(line.substr(eq + 1));
    if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
    const auto it = setters.find(key);
    if (it == setters.end()) throw InputError(fmt::format("line {}: unknown key '{}'", line_no, key));
    cfg.sections.insert(key.substr(0, key.find('.')));
    it->second(key, value);
  }

  const auto k = static_cast<std::size_t>(cfg.model.num_blocks);
  if (!sigma2_list.empty()) {
    if (sigma2_list.size() != k) throw InputError(fmt::format("model.sigma2 needs 1 or {} values", k));
  } else {
    sigma2_list.assign(k, sigma2.value_or(5.0));
  }
  cfg.model.position_sd.clear();
  for (double v : sigma2_list) {
    if (!(v > 0)) throw InputError("model.sigma2 entries must be > 0");
    cfg.model.position_sd.push_back(std::sqrt(v));
  }
  cfg.model.validate();
  cfg.sampler.validate();
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str(), path.parent_path());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace glssbm
