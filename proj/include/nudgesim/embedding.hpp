#pragma once
// Source vectors from second-order biased random walks over the CSN and
// skip-gram training with negative sampling.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nudgesim/graph.hpp"

namespace nudgesim {

struct WalkParams {
  double p = 1.0;  // return parameter: weight of stepping back is scaled by 1/p
  double q = 1.0;  // in-out parameter: weight of moving two hops away is scaled by 1/q
  std::size_t walk_length = 80;
  std::size_t walks_per_node = 10;
  // false: walk the undirected view with weights summed over both directions.
  bool directed = false;
  std::uint64_t seed = 42;

  friend bool operator==(const WalkParams&, const WalkParams&) = default;
};

struct TrainParams {
  std::size_t dims = 64;
  std::size_t window = 10;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;  // decayed linearly towards 1e-4 of its start
  std::uint64_t seed = 42;

  friend bool operator==(const TrainParams&, const TrainParams&) = default;
};

struct WalkCorpus {
  std::vector<std::string> nodes;  // index -> source id, sorted
  std::vector<std::vector<std::uint32_t>> walks;
};

// Neighbour lists (sorted by index) of the view the walker moves on.
std::vector<std::vector<std::pair<std::uint32_t, double>>> walk_adjacency(const CsnGraph& g, bool directed);

// walks_per_node rounds; in round r the walk from node i uses RNG stream
// r * |V| + i. Walks stop early at nodes without outgoing neighbours.
WalkCorpus generate_walks(const CsnGraph& g, const WalkParams& params);

struct SourceVectors {
  std::size_t dims = 0;
  std::map<std::string, std::vector<double>> vectors;
  WalkParams walk;
  TrainParams train;

  const std::vector<double>* find(std::string_view id) const;

  friend bool operator==(const SourceVectors&, const SourceVectors&) = default;
};

// Single-threaded, so a fixed seed reproduces the vectors bit for bit. Throws
// DataError when no walk has two or more nodes.
SourceVectors train_embeddings(const WalkCorpus& corpus, const TrainParams& params);

// Convenience: generate_walks followed by train_embeddings.
SourceVectors embed_graph(const CsnGraph& g, const WalkParams& walk, const TrainParams& train);

// 1 - cos(a, b), in [0, 2]. A zero vector is at distance 1 from everything.
// Throws DataError on dimension mismatch.
double cosine_distance(std::span<const double> a, std::span<const double> b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct Homophily {
  double intra_mean = 0.0;
  double inter_mean = 0.0;
  std::size_t intra_pairs = 0;
  std::size_t inter_pairs = 0;

  bool holds() const { return intra_pairs > 0 && inter_pairs > 0 && intra_mean > inter_mean; }
};

// Mean pairwise cosine within and across groups, over sources present in both.
Homophily homophily(const SourceVectors& sv, const std::map<std::string, int>& groups);

// First line `#vectors v1` followed by key=value hyperparameters, then one
// `id v0 ... v{dims-1}` row per source, tab separated.
void save_vectors(const SourceVectors& sv, std::ostream& out, std::string_view comment = {});
void save_vectors(const SourceVectors& sv, const std::filesystem::path& path, std::string_view comment = {});
SourceVectors load_vectors(std::istream& in);
SourceVectors load_vectors(const std::filesystem::path& path);

}  // namespace nudgesim
