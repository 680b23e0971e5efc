#pragma once
// Source-level content sharing network: an edge A -> B means B published
// near-verbatim copies of articles that A published first.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nudgesim/corpus.hpp"

namespace nudgesim {

// Which source's article total divides the raw copy count of an edge.
enum class NormalizeSide {
  copier,  // target of the edge: "fraction of B's output copied from A"
  origin,  // source of the edge
};

std::string_view to_string(NormalizeSide side);
NormalizeSide parse_normalize_side(std::string_view text);

struct Edge {
  std::uint64_t raw_count = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

using EdgeKey = std::pair<std::string, std::string>;

struct CsnGraph {
  // Node id -> total articles published by that source.
  std::map<std::string, std::uint64_t> nodes;
  std::map<EdgeKey, Edge> edges;
  NormalizeSide normalization = NormalizeSide::copier;

  bool empty() const { return nodes.empty(); }
  std::vector<std::string> node_ids() const;

  friend bool operator==(const CsnGraph&, const CsnGraph&) = default;
};

// Nodes are exactly the sources appearing in at least one pair. Throws
// DataError if such a source has no positive article count.
CsnGraph build_csn(std::span<const CopyPair> pairs,
                   const std::map<std::string, std::uint64_t>& article_counts,
                   NormalizeSide side = NormalizeSide::copier);

// Format:
//   #csn v1
//   #normalization <copier|origin>
//   #node <id> <article_count>          (one per node)
//   <from> <to> <raw_count> <weight>    (one per edge)
// Fields are tab separated; other `#` lines are comments. Floats use the
// shortest round-trip decimal form, so load(save(g)) == g exactly.
void save_graph(const CsnGraph& g, std::ostream& out, std::string_view comment = {});
void save_graph(const CsnGraph& g, const std::filesystem::path& path, std::string_view comment = {});
CsnGraph load_graph(std::istream& in);
CsnGraph load_graph(const std::filesystem::path& path);

struct CommunityAssignment {
  // Labels are contiguous from 0, numbered by first appearance in node order.
  std::map<std::string, int> community;
  double modularity = 0.0;
  int count = 0;
};

// Q = (1/m) sum_ij [w_ij - k_out(i) k_in(j) / m] delta(c_i, c_j), evaluated on
// normalized edge weights. Returns 0 for a graph without edges.
double directed_modularity(const CsnGraph& g, const std::map<std::string, int>& community);

// Louvain-style local moving and aggregation on the directed objective. Nodes
// are visited in id order and ties go to the lowest community index, so the
// result is deterministic.
CommunityAssignment detect_communities(const CsnGraph& g);

void write_communities_csv(std::ostream& out, const CommunityAssignment& ca, std::string_view comment = {});

}  // namespace nudgesim
