#include "nudgesim/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "nudgesim/error.hpp"
#include "nudgesim/text_io.hpp"

namespace nudgesim {

std::string_view to_string(NormalizeSide side) {
  return side == NormalizeSide::copier ? "copier" : "origin";
}

NormalizeSide parse_normalize_side(std::string_view text) {
  if (text == "copier") return NormalizeSide::copier;
  if (text == "origin") return NormalizeSide::origin;
  throw UsageError("unknown normalization side '" + std::string(text) + "' (expected copier or origin)");
}

std::vector<std::string> CsnGraph::node_ids() const {
  std::vector<std::string> ids;
  ids.reserve(nodes.size());
  for (const auto& [id, count] : nodes) ids.push_back(id);
  return ids;
}

CsnGraph build_csn(std::span<const CopyPair> pairs,
                   const std::map<std::string, std::uint64_t>& article_counts, NormalizeSide side) {
  CsnGraph g;
  g.normalization = side;
  for (const auto& p : pairs) {
    if (p.earlier_source == p.later_source) {
      throw DataError("copy pair " + p.earlier + " -> " + p.later + " does not cross sources");
    }
    for (const auto* src : {&p.earlier_source, &p.later_source}) {
      auto it = article_counts.find(*src);
      if (it == article_counts.end() || it->second == 0) {
        throw DataError("source '" + *src + "' has no published articles; cannot normalize");
      }
      g.nodes.emplace(*src, it->second);
    }
    ++g.edges[{p.earlier_source, p.later_source}].raw_count;
  }
  for (auto& [key, edge] : g.edges) {
    const auto& divisor_node = side == NormalizeSide::copier ? key.second : key.first;
    edge.weight = static_cast<double>(edge.raw_count) / static_cast<double>(g.nodes.at(divisor_node));
  }
  return g;
}

void save_graph(const CsnGraph& g, std::ostream& out, std::string_view comment) {
  out << "#csn v1\n";
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "#normalization\t" << to_string(g.normalization) << '\n';
  for (const auto& [id, count] : g.nodes) out << "#node\t" << id << '\t' << count << '\n';
  for (const auto& [key, e] : g.edges) {
    out << key.first << '\t' << key.second << '\t' << e.raw_count << '\t' << format_double(e.weight) << '\n';
  }
}

void save_graph(const CsnGraph& g, const std::filesystem::path& path, std::string_view comment) {
  auto out = open_output(path);
  save_graph(g, out, comment);
}

CsnGraph load_graph(std::istream& in) {
  CsnGraph g;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) -> DataError {
    return DataError("graph line " + std::to_string(lineno) + ": " + why);
  };
  if (!std::getline(in, line) || trim(line) != "#csn v1") {
    lineno = 1;
    throw fail("missing '#csn v1' header");
  }
  lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (line.front() == '#') {
      if (fields[0] == "#node") {
        if (fields.size() != 3) throw fail("expected '#node <id> <article_count>'");
        auto count = parse_int(fields[2]);
        if (!count || *count < 0) throw fail("invalid article count");
        if (!g.nodes.emplace(std::string(fields[1]), static_cast<std::uint64_t>(*count)).second) {
          throw fail("duplicate node '" + std::string(fields[1]) + "'");
        }
      } else if (fields[0] == "#normalization") {
        if (fields.size() != 2) throw fail("expected '#normalization <side>'");
        try {
          g.normalization = parse_normalize_side(fields[1]);
        } catch (const UsageError& e) {
          throw fail(e.what());
        }
      }
      continue;
    }
    if (fields.size() != 4) throw fail("expected 4 tab-separated fields, got " + std::to_string(fields.size()));
    std::string from(fields[0]), to(fields[1]);
    if (from.empty() || to.empty()) throw fail("empty endpoint");
    if (from == to) throw fail("self-loop on '" + from + "'");
    auto raw = parse_int(fields[2]);
    auto weight = parse_double(fields[3]);
    if (!raw || *raw <= 0) throw fail("raw_count must be a positive integer");
    if (!weight || *weight <= 0.0) throw fail("weight must be a positive number");
    // Plain edge lists without #node lines are accepted; counts are unknown.
    g.nodes.emplace(from, 0);
    g.nodes.emplace(to, 0);
    Edge e{static_cast<std::uint64_t>(*raw), *weight};
    if (!g.edges.emplace(EdgeKey{from, to}, e).second) throw fail("duplicate edge " + from + " -> " + to);
  }
  return g;
}

CsnGraph load_graph(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_graph(in);
}

double directed_modularity(const CsnGraph& g, const std::map<std::string, int>& community) {
  double m = 0.0;
  for (const auto& [key, e] : g.edges) m += e.weight;
  if (m <= 0.0) return 0.0;
  std::map<int, std::pair<double, double>> tot;  // community -> (out, in)
  double internal = 0.0;
  for (const auto& [key, e] : g.edges) {
    const int ca = community.at(key.first);
    const int cb = community.at(key.second);
    if (ca == cb) internal += e.weight;
    tot[ca].first += e.weight;
    tot[cb].second += e.weight;
  }
  double expected = 0.0;
  for (const auto& [c, io] : tot) expected += io.first * io.second;
  return internal / m - expected / (m * m);
}

namespace {

struct WorkGraph {
  std::vector<std::vector<std::pair<int, double>>> out;
  std::vector<std::vector<std::pair<int, double>>> in;
  std::vector<double> self;
  std::vector<double> k_out;
  std::vector<double> k_in;
  double m = 0.0;

  int size() const { return static_cast<int>(out.size()); }

  void finish() {
    const int n = size();
    k_out.assign(n, 0.0);
    k_in.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      k_out[i] += self[i];
      k_in[i] += self[i];
      for (const auto& [j, w] : out[i]) {
        k_out[i] += w;
        k_in[j] += w;
      }
    }
  }
};

constexpr double kMinGain = 1e-12;

// One round of local moving. Returns true if any node changed community.
bool move_nodes(const WorkGraph& wg, std::vector<int>& comm) {
  const int n = wg.size();
  const double m = wg.m;
  std::vector<double> tot_out(n, 0.0), tot_in(n, 0.0);
  for (int i = 0; i < n; ++i) {
    tot_out[comm[i]] += wg.k_out[i];
    tot_in[comm[i]] += wg.k_in[i];
  }
  std::vector<double> link(n, 0.0);
  std::vector<char> seen(n, 0);
  std::vector<int> touched;

  bool any_move = false;
  for (int pass = 0; pass < 10000; ++pass) {
    bool moved = false;
    for (int i = 0; i < n; ++i) {
      const int ci = comm[i];
      for (const auto* adj : {&wg.out[i], &wg.in[i]}) {
        for (const auto& [j, w] : *adj) {
          const int cj = comm[j];
          if (!seen[cj]) {
            seen[cj] = 1;
            touched.push_back(cj);
          }
          link[cj] += w;
        }
      }
      tot_out[ci] -= wg.k_out[i];
      tot_in[ci] -= wg.k_in[i];
      auto gain = [&](int c) {
        return link[c] / m - (wg.k_out[i] * tot_in[c] + wg.k_in[i] * tot_out[c]) / (m * m);
      };
      int best = ci;
      double best_gain = gain(ci);
      std::sort(touched.begin(), touched.end());
      for (int c : touched) {
        const double gc = gain(c);
        if (gc > best_gain + kMinGain) {
          best = c;
          best_gain = gc;
        }
      }
      tot_out[best] += wg.k_out[i];
      tot_in[best] += wg.k_in[i];
      if (best != ci) {
        comm[i] = best;
        moved = true;
      }
      for (int c : touched) {
        link[c] = 0.0;
        seen[c] = 0;
      }
      touched.clear();
    }
    if (!moved) break;
    any_move = true;
  }
  return any_move;
}

// Renumbers communities 0..k-1 by first appearance and returns k.
int renumber(std::vector<int>& comm) {
  std::vector<int> map(comm.size(), -1);
  int next = 0;
  for (int& c : comm) {
    if (map[c] < 0) map[c] = next++;
    c = map[c];
  }
  return next;
}

WorkGraph aggregate(const WorkGraph& wg, const std::vector<int>& comm, int k) {
  WorkGraph agg;
  agg.out.resize(k);
  agg.in.resize(k);
  agg.self.assign(k, 0.0);
  agg.m = wg.m;
  std::map<std::pair<int, int>, double> weights;
  for (int i = 0; i < wg.size(); ++i) {
    agg.self[comm[i]] += wg.self[i];
    for (const auto& [j, w] : wg.out[i]) {
      if (comm[i] == comm[j]) {
        agg.self[comm[i]] += w;
      } else {
        weights[{comm[i], comm[j]}] += w;
      }
    }
  }
  for (const auto& [key, w] : weights) {
    agg.out[key.first].emplace_back(key.second, w);
    agg.in[key.second].emplace_back(key.first, w);
  }
  agg.finish();
  return agg;
}

}  // namespace

CommunityAssignment detect_communities(const CsnGraph& g) {
  const auto ids = g.node_ids();
  const int n = static_cast<int>(ids.size());
  std::map<std::string, int> index;
  for (int i = 0; i < n; ++i) index.emplace(ids[i], i);

  WorkGraph wg;
  wg.out.resize(n);
  wg.in.resize(n);
  wg.self.assign(n, 0.0);
  for (const auto& [key, e] : g.edges) {
    const int a = index.at(key.first);
    const int b = index.at(key.second);
    wg.out[a].emplace_back(b, e.weight);
    wg.in[b].emplace_back(a, e.weight);
    wg.m += e.weight;
  }
  wg.finish();

  std::vector<int> membership(n);
  for (int i = 0; i < n; ++i) membership[i] = i;

  if (wg.m > 0.0) {
    while (true) {
      std::vector<int> comm(wg.size());
      for (int i = 0; i < wg.size(); ++i) comm[i] = i;
      if (!move_nodes(wg, comm)) break;
      const int k = renumber(comm);
      for (int& c : membership) c = comm[c];
      if (k == wg.size()) break;
      wg = aggregate(wg, comm, k);
    }
  }

  CommunityAssignment ca;
  ca.count = renumber(membership);
  for (int i = 0; i < n; ++i) ca.community.emplace(ids[i], membership[i]);
  ca.modularity = directed_modularity(g, ca.community);
  return ca;
}

void write_communities_csv(std::ostream& out, const CommunityAssignment& ca, std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "source,community\n";
  for (const auto& [id, c] : ca.community) out << csv_field(id) << ',' << c << '\n';
}

}  // namespace nudgesim
