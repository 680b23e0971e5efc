#include "nudgesim/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "nudgesim/error.hpp"
#include "nudgesim/rng.hpp"
#include "nudgesim/text_io.hpp"

namespace nudgesim {
namespace {

using Adjacency = std::vector<std::vector<std::pair<std::uint32_t, double>>>;

bool has_neighbour(const Adjacency& adj, std::uint32_t from, std::uint32_t to) {
  const auto& list = adj[from];
  auto it = std::lower_bound(list.begin(), list.end(), to,
                             [](const auto& e, std::uint32_t v) { return e.first < v; });
  return it != list.end() && it->first == to;
}

// Inverse-CDF draw over `weights`; falls back to the last positive entry
// when rounding leaves the target past the final cumulative sum.
std::size_t draw(const std::vector<double>& weights, double total, Rng& rng) {
  const double target = rng.uniform() * total;
  double cum = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    cum += weights[k];
    last = k;
    if (target < cum) return k;
  }
  return last;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Adjacency walk_adjacency(const CsnGraph& g, bool directed) {
  const auto ids = g.node_ids();
  std::map<std::string, std::uint32_t> index;
  for (std::uint32_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);

  std::vector<std::map<std::uint32_t, double>> acc(ids.size());
  for (const auto& [key, e] : g.edges) {
    const auto a = index.at(key.first);
    const auto b = index.at(key.second);
    acc[a][b] += e.weight;
    if (!directed) acc[b][a] += e.weight;
  }
  Adjacency adj(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) adj[i].assign(acc[i].begin(), acc[i].end());
  return adj;
}

WalkCorpus generate_walks(const CsnGraph& g, const WalkParams& params) {
  if (g.empty()) throw DataError("cannot generate walks on an empty graph");
  if (!(params.p > 0.0) || !(params.q > 0.0)) throw UsageError("walk parameters p and q must be positive");
  if (params.walk_length == 0) throw UsageError("walk_length must be at least 1");

  WalkCorpus corpus;
  corpus.nodes = g.node_ids();
  const auto adj = walk_adjacency(g, params.directed);
  const std::uint64_t n = corpus.nodes.size();

  std::vector<double> weights;
  corpus.walks.reserve(n * params.walks_per_node);
  for (std::uint64_t r = 0; r < params.walks_per_node; ++r) {
    for (std::uint32_t start = 0; start < n; ++start) {
      Rng rng(params.seed, r * n + start);
      std::vector<std::uint32_t> walk{start};
      walk.reserve(params.walk_length);
      while (walk.size() < params.walk_length) {
        const std::uint32_t cur = walk.back();
        const auto& nbrs = adj[cur];
        if (nbrs.empty()) break;
        weights.clear();
        double total = 0.0;
        for (const auto& [x, w] : nbrs) {
          double bias = 1.0;
          if (walk.size() >= 2) {
            const std::uint32_t prev = walk[walk.size() - 2];
            if (x == prev) {
              bias = 1.0 / params.p;
            } else if (!has_neighbour(adj, prev, x)) {
              bias = 1.0 / params.q;
            }
          }
          weights.push_back(w * bias);
          total += w * bias;
        }
        walk.push_back(nbrs[draw(weights, total, rng)].first);
      }
      corpus.walks.push_back(std::move(walk));
    }
  }
  return corpus;
}

SourceVectors train_embeddings(const WalkCorpus& corpus, const TrainParams& params) {
  if (params.dims == 0) throw UsageError("dims must be at least 1");
  if (params.window == 0) throw UsageError("window must be at least 1");
  if (params.epochs == 0) throw UsageError("epochs must be at least 1");
  if (!(params.learning_rate > 0.0)) throw UsageError("learning_rate must be positive");

  const std::size_t n = corpus.nodes.size();
  const std::size_t dims = params.dims;
  std::vector<double> counts(n, 0.0);
  std::size_t tokens = 0;
  bool any_pair = false;
  for (const auto& walk : corpus.walks) {
    for (auto v : walk) {
      if (v >= n) throw DataError("walk references unknown node index");
      counts[v] += 1.0;
    }
    tokens += walk.size();
    any_pair = any_pair || walk.size() >= 2;
  }
  if (!any_pair) throw DataError("no training pairs: every walk has a single node");

  // Negative sampling distribution: count^0.75, sampled by inverse CDF.
  std::vector<double> neg_cdf(n, 0.0);
  double neg_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    neg_total += std::pow(counts[i], 0.75);
    neg_cdf[i] = neg_total;
  }

  Rng rng(params.seed, stream_id("skip-gram"));
  std::vector<double> syn0(n * dims), syn1(n * dims, 0.0), grad(dims);
  for (auto& x : syn0) x = (rng.uniform() - 0.5) / static_cast<double>(dims);

  auto sample_negative = [&]() -> std::uint32_t {
    const double target = rng.uniform() * neg_total;
    auto it = std::upper_bound(neg_cdf.begin(), neg_cdf.end(), target);
    if (it == neg_cdf.end()) --it;
    return static_cast<std::uint32_t>(it - neg_cdf.begin());
  };

  const double total_words = static_cast<double>(tokens * params.epochs);
  double processed = 0.0;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    for (const auto& walk : corpus.walks) {
      const std::size_t len = walk.size();
      for (std::size_t pos = 0; pos < len; ++pos, processed += 1.0) {
        const double lr = params.learning_rate * std::max(1e-4, 1.0 - processed / (total_words + 1.0));
        const std::uint32_t center = walk[pos];
        // Shrunk window as in word2vec: nearer contexts are sampled more often.
        const std::size_t span = params.window - rng.uniform_index(params.window);
        const std::size_t lo = pos >= span ? pos - span : 0;
        const std::size_t hi = std::min(len - 1, pos + span);
        double* in = &syn0[center * dims];
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == pos) continue;
          const std::uint32_t context = walk[c];
          std::fill(grad.begin(), grad.end(), 0.0);
          for (std::size_t k = 0; k <= params.negatives; ++k) {
            std::uint32_t target = context;
            double label = 1.0;
            if (k > 0) {
              target = sample_negative();
              if (target == context) continue;
              label = 0.0;
            }
            double* out = &syn1[target * dims];
            double f = 0.0;
            for (std::size_t d = 0; d < dims; ++d) f += in[d] * out[d];
            const double g = (label - sigmoid(f)) * lr;
            for (std::size_t d = 0; d < dims; ++d) grad[d] += g * out[d];
            for (std::size_t d = 0; d < dims; ++d) out[d] += g * in[d];
          }
          for (std::size_t d = 0; d < dims; ++d) in[d] += grad[d];
        }
      }
    }
  }

  SourceVectors sv;
  sv.dims = dims;
  sv.train = params;
  for (std::size_t i = 0; i < n; ++i) {
    sv.vectors.emplace(corpus.nodes[i], std::vector<double>(syn0.begin() + i * dims, syn0.begin() + (i + 1) * dims));
  }
  return sv;
}

SourceVectors embed_graph(const CsnGraph& g, const WalkParams& walk, const TrainParams& train) {
  auto sv = train_embeddings(generate_walks(g, walk), train);
  sv.walk = walk;
  return sv;
}

const std::vector<double>* SourceVectors::find(std::string_view id) const {
  auto it = vectors.find(std::string(id));
  return it == vectors.end() ? nullptr : &it->second;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DataError("cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  // sqrt(na * nb) rather than sqrt(na) * sqrt(nb): exact for a == b.
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  return 1.0 - cosine_similarity(a, b);
}

Homophily homophily(const SourceVectors& sv, const std::map<std::string, int>& groups) {
  std::vector<std::pair<const std::vector<double>*, int>> members;
  for (const auto& [id, grp] : groups) {
    if (const auto* v = sv.find(id)) members.emplace_back(v, grp);
  }
  Homophily h;
  double intra = 0.0, inter = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const double c = cosine_similarity(*members[i].first, *members[j].first);
      if (members[i].second == members[j].second) {
        intra += c;
        ++h.intra_pairs;
      } else {
        inter += c;
        ++h.inter_pairs;
      }
    }
  }
  if (h.intra_pairs) h.intra_mean = intra / static_cast<double>(h.intra_pairs);
  if (h.inter_pairs) h.inter_mean = inter / static_cast<double>(h.inter_pairs);
  return h;
}

void save_vectors(const SourceVectors& sv, std::ostream& out, std::string_view comment) {
  const auto& w = sv.walk;
  const auto& t = sv.train;
  out << "#vectors v1\tdims=" << sv.dims << "\tp=" << format_double(w.p) << "\tq=" << format_double(w.q)
      << "\twalk_length=" << w.walk_length << "\twalks_per_node=" << w.walks_per_node
      << "\tdirected=" << (w.directed ? 1 : 0) << "\twalk_seed=" << w.seed << "\twindow=" << t.window
      << "\tnegatives=" << t.negatives << "\tepochs=" << t.epochs
      << "\tlearning_rate=" << format_double(t.learning_rate) << "\ttrain_seed=" << t.seed << '\n';
  if (!comment.empty()) out << "# " << comment << '\n';
  for (const auto& [id, v] : sv.vectors) {
    out << id;
    for (double x : v) out << '\t' << format_double(x);
    out << '\n';
  }
}

void save_vectors(const SourceVectors& sv, const std::filesystem::path& path, std::string_view comment) {
  auto out = open_output(path);
  save_vectors(sv, out, comment);
}

SourceVectors load_vectors(std::istream& in) {
  SourceVectors sv;
  std::string line;
  std::size_t lineno = 1;
  auto fail = [&](const std::string& why) {
    return DataError("vectors line " + std::to_string(lineno) + ": " + why);
  };
  if (!std::getline(in, line)) throw fail("empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split(line, '\t');
  if (header.empty() || header[0] != "#vectors v1") throw fail("missing '#vectors v1' header");
  for (std::size_t i = 1; i < header.size(); ++i) {
    auto kv = split(header[i], '=');
    if (kv.size() != 2) throw fail("bad header entry '" + std::string(header[i]) + "'");
    const auto key = kv[0];
    auto num = parse_double(kv[1]);
    if (!num) throw fail("bad value for '" + std::string(key) + "'");
    const auto as_size = static_cast<std::size_t>(*num);
    if (key == "dims") sv.dims = as_size;
    else if (key == "p") sv.walk.p = *num;
    else if (key == "q") sv.walk.q = *num;
    else if (key == "walk_length") sv.walk.walk_length = as_size;
    else if (key == "walks_per_node") sv.walk.walks_per_node = as_size;
    else if (key == "directed") sv.walk.directed = *num != 0.0;
    else if (key == "walk_seed") sv.walk.seed = std::stoull(std::string(kv[1]));
    else if (key == "window") sv.train.window = as_size;
    else if (key == "negatives") sv.train.negatives = as_size;
    else if (key == "epochs") sv.train.epochs = as_size;
    else if (key == "learning_rate") sv.train.learning_rate = *num;
    else if (key == "train_seed") sv.train.seed = std::stoull(std::string(kv[1]));
  }
  if (sv.dims == 0) throw fail("header lacks dims");
  sv.train.dims = sv.dims;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != sv.dims + 1) {
      throw fail("expected " + std::to_string(sv.dims + 1) + " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> v(sv.dims);
    for (std::size_t d = 0; d < sv.dims; ++d) {
      auto x = parse_double(fields[d + 1]);
      if (!x) throw fail("non-numeric component");
      v[d] = *x;
    }
    if (!sv.vectors.emplace(std::string(fields[0]), std::move(v)).second) {
      throw fail("duplicate source '" + std::string(fields[0]) + "'");
    }
  }
  return sv;
}

SourceVectors load_vectors(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_vectors(in);
}

}  // namespace nudgesim
