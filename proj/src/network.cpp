#include "glssbm/network.hpp"

#include <iostream>

#include <fmt/format.h>

#include "glssbm/csv.hpp"
#include "glssbm/error.hpp"

namespace glssbm {

void default_warning_sink(const std::string& message) { std::clog << "warning: " << message << '\n'; }

DirectedNetwork::DirectedNetwork(std::vector<std::string> node_ids, std::vector<std::uint8_t> adjacency)
    : ids_(std::move(node_ids)), adj_(std::move(adjacency)) {
  const std::size_t n = ids_.size();
  if (adj_.size() != n * n) {
    throw InputError(fmt::format("adjacency has {} entries, expected {}x{}", adj_.size(), n, n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(ids_[i], i).second) throw InputError("duplicate node id '" + ids_[i] + "'");
    for (std::size_t j = 0; j < n; ++j) {
      const auto v = adj_[i * n + j];
      if (v > 1) throw InputError(fmt::format("adjacency entry ({},{}) is not binary", i, j));
      if (i == j && v != 0) throw InputError(fmt::format("self-loop at node '{}'", ids_[i]));
    }
  }
}

DirectedNetwork DirectedNetwork::from_adjacency(std::size_t n, std::vector<std::uint8_t> adjacency) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = fmt::format("n{}", i + 1);
  return DirectedNetwork(std::move(ids), std::move(adjacency));
}

std::size_t DirectedNetwork::edge_count() const {
  std::size_t c = 0;
  for (auto v : adj_) c += v;
  return c;
}

std::optional<std::size_t> DirectedNetwork::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

DyadMask::DyadMask(std::size_t n, bool observed) : n_(n), bits_(n * n, observed ? 1 : 0) {
  for (std::size_t i = 0; i < n; ++i) bits_[i * n + i] = 0;
}

void DyadMask::set(std::size_t i, std::size_t j, bool observed) {
  if (i == j) return;
  bits_[i * n_ + j] = observed ? 1 : 0;
}

std::size_t DyadMask::observed_count() const {
  std::size_t c = 0;
  for (auto v : bits_) c += v;
  return c;
}

DyadMask DyadMask::complement() const {
  DyadMask out(n_, false);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (i != j) out.bits_[i * n_ + j] = bits_[i * n_ + j] ? 0 : 1;
  return out;
}

std::optional<std::size_t> VoteTable::vote_index(const std::string& vote_id) const {
  for (std::size_t v = 0; v < vote_ids.size(); ++v)
    if (vote_ids[v] == vote_id) return v;
  return std::nullopt;
}

DirectedNetwork load_edge_list(const std::filesystem::path& edges_path,
                               const std::filesystem::path& nodes_path, const WarningSink& warn) {
  std::vector<std::string> ids;
  for (const auto& raw : csv::read_lines(nodes_path)) {
    auto id = csv::trim(raw);
    if (!id.empty()) ids.push_back(std::move(id));
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!index.emplace(ids[i], i).second) {
      throw InputError(fmt::format("{}: duplicate node id '{}'", nodes_path.string(), ids[i]));
    }
  }

  const std::size_t n = ids.size();
  std::vector<std::uint8_t> adj(n * n, 0);
  const auto lines = csv::read_lines(edges_path);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (csv::trim(lines[ln]).empty()) continue;
    const auto where = fmt::format("{}:{}", edges_path.string(), ln + 1);
    std::vector<std::string> f;
    try {
      f = csv::split(lines[ln]);
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    if (f.size() != 2) throw InputError(where + ": expected \"src,dst\"");
    auto src = index.find(f[0]);
    if (src == index.end()) throw InputError(where + ": unknown node id '" + f[0] + "'");
    auto dst = index.find(f[1]);
    if (dst == index.end()) throw InputError(where + ": unknown node id '" + f[1] + "'");
    if (src->second == dst->second) throw InputError(where + ": self-loop '" + f[0] + "'");
    auto& cell = adj[src->second * n + dst->second];
    if (cell != 0 && warn) warn(where + ": duplicate edge " + f[0] + "," + f[1]);
    cell = 1;
  }
  return DirectedNetwork(std::move(ids), std::move(adj));
}

namespace {

void check_header(const std::vector<std::string>& lines, const std::filesystem::path& path,
                  const std::vector<std::string>& expected) {
  if (lines.empty()) return;
  auto got = csv::split(lines[0]);
  for (auto& g : got) g = csv::to_lower(g);
  if (got != expected) {
    std::string want;
    for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
    throw InputError(fmt::format("{}:1: expected header \"{}\"", path.string(), want));
  }
}

}  // namespace

std::vector<NodeMeta> load_metadata(const std::filesystem::path& path, const DirectedNetwork& net) {
  std::vector<NodeMeta> meta(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) meta[i] = {net.node_ids()[i], net.node_ids()[i], "Unknown"};

  const auto lines = csv::read_lines(path);
  check_header(lines, path, {"id", "name", "party"});
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (csv::trim(lines[ln]).empty()) continue;
    const auto where = fmt::format("{}:{}", path.string(), ln + 1);
    std::vector<std::string> f;
    try {
      f = csv::split(lines[ln]);
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    if (f.size() != 3) throw InputError(where + ": expected 3 fields \"id,name,party\"");
    auto idx = net.index_of(f[0]);
    if (!idx) throw InputError(where + ": node id '" + f[0] + "' is not in the network");
    meta[*idx] = {f[0], f[1], f[2].empty() ? "Unknown" : f[2]};
  }
  return meta;
}

VoteTable load_votes(const std::filesystem::path& path, const DirectedNetwork& net) {
  const auto lines = csv::read_lines(path);
  check_header(lines, path, {"id", "vote_id", "value"});

  struct Row {
    std::size_t node;
    std::string vote;
    Vote value;
    std::size_t line;
  };
  std::vector<Row> rows;
  VoteTable table;
  table.node_count = net.size();
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (csv::trim(lines[ln]).empty()) continue;
    const auto where = fmt::format("{}:{}", path.string(), ln + 1);
    std::vector<std::string> f;
    try {
      f = csv::split(lines[ln]);
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    if (f.size() != 3) throw InputError(where + ": expected 3 fields \"id,vote_id,value\"");
    auto idx = net.index_of(f[0]);
    if (!idx) throw InputError(where + ": node id '" + f[0] + "' is not in the network");
    const auto token = csv::to_lower(f[2]);
    Vote v;
    if (token == "ta") {
      v = Vote::Yes;
    } else if (token == "nil") {
      v = Vote::No;
    } else if (token == "absent") {
      v = Vote::Absent;
    } else {
      throw InputError(where + ": unknown vote value '" + f[2] + "' (expected TA, NIL or ABSENT)");
    }
    if (!table.vote_index(f[1])) table.vote_ids.push_back(f[1]);
    rows.push_back({*idx, f[1], v, ln + 1});
  }

  const std::size_t nv = table.vote_ids.size();
  table.values.assign(net.size() * nv, Vote::Absent);
  std::vector<std::uint8_t> seen(net.size() * nv, 0);
  for (const auto& r : rows) {
    const std::size_t cell = r.node * nv + *table.vote_index(r.vote);
    if (seen[cell] && table.values[cell] != r.value) {
      throw InputError(fmt::format("{}:{}: conflicting value for ({}, {})", path.string(), r.line,
                                   net.node_ids()[r.node], r.vote));
    }
    seen[cell] = 1;
    table.values[cell] = r.value;
  }
  return table;
}

void write_edge_list(const DirectedNetwork& net, const std::filesystem::path& edges_path,
                     const std::filesystem::path& nodes_path) {
  auto nodes = csv::open_output(nodes_path);
  for (const auto& id : net.node_ids()) nodes << id << '\n';
  auto edges = csv::open_output(edges_path);
  const std::size_t n = net.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (net.edge(i, j)) edges << csv::escape(net.node_ids()[i]) << ',' << csv::escape(net.node_ids()[j]) << '\n';
  if (!nodes || !edges) throw IoError("failed writing edge list");
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

void export_graph(const DirectedNetwork& net, std::span<const NodeMeta> meta, const std::filesystem::path& path) {
  if (!meta.empty() && meta.size() != net.size()) {
    throw InputError(fmt::format("metadata has {} records for {} nodes", meta.size(), net.size()));
  }
  auto out = csv::open_output(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
         "  <key id=\"name\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n"
         "  <key id=\"party\" for=\"node\" attr.name=\"party\" attr.type=\"string\">\n"
         "    <default>Unknown</default>\n"
         "  </key>\n"
         "  <graph id=\"G\" edgedefault=\"directed\">\n";
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& id = net.node_ids()[i];
    const std::string name = meta.empty() ? id : meta[i].display_name;
    const std::string party = meta.empty() ? "Unknown" : meta[i].party;
    out << "    <node id=\"" << xml_escape(id) << "\">\n"
        << "      <data key=\"name\">" << xml_escape(name) << "</data>\n"
        << "      <data key=\"party\">" << xml_escape(party) << "</data>\n"
        << "    </node>\n";
  }
  std::size_t e = 0;
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = 0; j < net.size(); ++j)
      if (net.edge(i, j)) {
        out << "    <edge id=\"e" << e++ << "\" source=\"" << xml_escape(net.node_ids()[i]) << "\" target=\""
            << xml_escape(net.node_ids()[j]) << "\"/>\n";
      }
  out << "  </graph>\n</graphml>\n";
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace glssbm
