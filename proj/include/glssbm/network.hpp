#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace glssbm {

/// Receives non-fatal diagnostics (duplicate edges and the like).
using WarningSink = std::function<void(const std::string&)>;

/// Writes to std::clog with a "warning: " prefix.
void default_warning_sink(const std::string& message);

/// Directed binary network. Entry (i, j) is 1 iff node i follows node j.
/// Immutable once constructed.
class DirectedNetwork {
 public:
  DirectedNetwork() = default;

  /// Takes a row-major n*n 0/1 adjacency. Throws InputError on duplicate
  /// ids, a non-binary entry, a nonzero diagonal or a size mismatch.
  DirectedNetwork(std::vector<std::string> node_ids, std::vector<std::uint8_t> adjacency);

  /// Network with ids "n1".."nN" and the given adjacency.
  static DirectedNetwork from_adjacency(std::size_t n, std::vector<std::uint8_t> adjacency);

  std::size_t size() const { return ids_.size(); }
  bool edge(std::size_t i, std::size_t j) const { return adj_[i * ids_.size() + j] != 0; }
  std::size_t edge_count() const;

  const std::vector<std::string>& node_ids() const { return ids_; }
  const std::vector<std::uint8_t>& adjacency() const { return adj_; }
  std::optional<std::size_t> index_of(const std::string& id) const;

  friend bool operator==(const DirectedNetwork& a, const DirectedNetwork& b) {
    return a.ids_ == b.ids_ && a.adj_ == b.adj_;
  }

 private:
  std::vector<std::string> ids_;
  std::vector<std::uint8_t> adj_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Which ordered off-diagonal dyads contribute to the likelihood.
/// Diagonal entries are always false.
class DyadMask {
 public:
  DyadMask() = default;
  explicit DyadMask(std::size_t n, bool observed = true);

  static DyadMask all_observed(std::size_t n) { return DyadMask(n, true); }

  std::size_t size() const { return n_; }
  bool observed(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool observed);
  std::size_t observed_count() const;

  /// Off-diagonal complement.
  DyadMask complement() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct NodeMeta {
  std::string id;
  std::string display_name;
  std::string party;
};

enum class Vote { Yes, No, Absent };

/// Complete (node x vote) table; cells not present in the source default to Absent.
struct VoteTable {
  std::vector<std::string> vote_ids;
  std::size_t node_count = 0;
  std::vector<Vote> values;  // row-major, node_count x vote_ids.size()

  Vote at(std::size_t node, std::size_t vote) const { return values[node * vote_ids.size() + vote]; }
  std::optional<std::size_t> vote_index(const std::string& vote_id) const;
};

/// Nodes file: one id per line (blank lines skipped). Edge file: "src,dst"
/// per line, no header. Duplicate edges collapse with a warning; self-loops
/// and unknown ids are rejected with the offending line number.
DirectedNetwork load_edge_list(const std::filesystem::path& edges_path,
                               const std::filesystem::path& nodes_path,
                               const WarningSink& warn = default_warning_sink);

/// CSV with header "id,name,party". Returns one record per network node,
/// in network order; unlisted nodes get party "Unknown".
std::vector<NodeMeta> load_metadata(const std::filesystem::path& path, const DirectedNetwork& net);

/// CSV with header "id,vote_id,value", value in {TA, NIL, ABSENT}
/// (case-insensitive). Vote ids keep first-appearance order.
VoteTable load_votes(const std::filesystem::path& path, const DirectedNetwork& net);

/// Writes the node list and "src,dst" edge list read by load_edge_list.
void write_edge_list(const DirectedNetwork& net, const std::filesystem::path& edges_path,
                     const std::filesystem::path& nodes_path);

/// GraphML export with "name" and "party" node attributes. An empty meta
/// span exports every node with party "Unknown".
void export_graph(const DirectedNetwork& net, std::span<const NodeMeta> meta,
                  const std::filesystem::path& path);

}  // namespace glssbm
