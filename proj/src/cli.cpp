#include "nudgesim/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "nudgesim/corpus.hpp"
#include "nudgesim/embedding.hpp"
#include "nudgesim/error.hpp"
#include "nudgesim/graph.hpp"
#include "nudgesim/groundtruth.hpp"
#include "nudgesim/nudge.hpp"
#include "nudgesim/report.hpp"
#include "nudgesim/text_io.hpp"

namespace nudgesim {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::shared_ptr<spdlog::logger> log() {
  static auto logger = [] {
    auto l = spdlog::stderr_logger_mt("nudgesim");
    l->set_pattern("[%l] %v");
    return l;
  }();
  const char* level = std::getenv("NUDGESIM_LOG");
  logger->set_level(level ? spdlog::level::from_str(level) : spdlog::level::info);
  return logger;
}

struct GlobalOptions {
  std::uint64_t seed = 42;
  std::string out_dir = ".";
};

struct BuildOptions {
  std::string articles;
  double threshold = kDefaultCopyThreshold;
  std::string normalize = "copier";
};

struct AnnotateOptions {
  std::string labels;
  std::string csn;
  std::string out;
  std::string leaning_map;
};

struct EmbedOptions {
  std::string csn;
  std::string out;
  WalkParams walk;
  TrainParams train;
};

struct SimulateOptions {
  std::string personas;
  std::string scores;
  std::string vectors;
  double alpha = 0.5;
  std::size_t steps = 500;
  std::size_t limit = 0;  // 0: use each persona's L
  double epsilon = 1e-9;
  std::string mode = "constrained";
};

std::string config_line(const json& cfg) { return "config " + cfg.dump(); }

std::string safe_name(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
}

int cmd_build_csn(const GlobalOptions& g, const BuildOptions& o, std::ostream& out) {
  if (!(o.threshold > 0.0 && o.threshold <= 1.0)) throw UsageError("--threshold must lie in (0, 1]");
  const NormalizeSide side = parse_normalize_side(o.normalize);
  const json cfg = {{"command", "build-csn"},
                    {"articles", fs::path(o.articles).filename().string()},
                    {"threshold", o.threshold},
                    {"normalize", o.normalize},
                    {"seed", g.seed}};

  const ArticleSet set = load_articles(o.articles);
  for (const auto& w : set.warnings) log()->warn("{}: {}", o.articles, w);
  if (set.articles.empty()) throw DataError("no valid articles in " + o.articles);

  const TfidfMatrix matrix = tfidf_vectors(set.articles);
  if (matrix.empty_docs > 0) log()->warn("{} article(s) without tokens excluded from pairing", matrix.empty_docs);
  const auto pairs = similar_pairs(matrix, set.articles, o.threshold);
  const CsnGraph graph = build_csn(pairs, article_counts(set.articles), side);

  const fs::path dir(g.out_dir);
  {
    auto f = open_output(dir / "pairs.tsv");
    write_pairs_tsv(f, pairs, config_line(cfg));
  }
  save_graph(graph, dir / "csn.tsv", config_line(cfg));

  out << "articles " << set.articles.size() << " (skipped " << set.skipped << ")\n"
      << "pairs " << pairs.size() << '\n'
      << "nodes " << graph.nodes.size() << '\n'
      << "edges " << graph.edges.size() << '\n';
  if (!graph.empty()) {
    const auto communities = detect_communities(graph);
    auto f = open_output(dir / "communities.csv");
    write_communities_csv(f, communities, config_line(cfg));
    out << "communities " << communities.count << " (modularity " << format_double(communities.modularity) << ")\n";
  }
  return 0;
}

LeaningMap load_leaning_map(const std::string& path) {
  LeaningMap map = LeaningMap::defaults();
  if (path.empty()) return map;
  auto in = open_input(path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw DataError(path + ": expected a JSON object of name -> leaning");
  for (const auto& [name, value] : doc.items()) {
    if (!value.is_number() || value.get<double>() < -1.0 || value.get<double>() > 1.0) {
      throw DataError(path + ": leaning for '" + name + "' must be a number in [-1, 1]");
    }
    std::string key = name;
    for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    map.categories[key] = value.get<double>();
  }
  return map;
}

int cmd_annotate(const GlobalOptions& g, const AnnotateOptions& o, std::ostream& out) {
  const json cfg = {{"command", "annotate"},
                    {"labels", fs::path(o.labels).filename().string()},
                    {"csn", fs::path(o.csn).filename().string()},
                    {"leaning_map", o.leaning_map.empty() ? "default" : fs::path(o.leaning_map).filename().string()},
                    {"seed", g.seed}};
  const LeaningMap leaning = load_leaning_map(o.leaning_map);
  std::vector<SourceLabels> labels;
  {
    auto in = open_input(o.labels);
    labels = read_labels_csv(in, leaning);
  }
  const CsnGraph graph = load_graph(fs::path(o.csn));
  const auto scores = impute_missing(score_labels(labels), graph);

  const fs::path path = o.out.empty() ? fs::path(g.out_dir) / "scores.csv" : fs::path(o.out);
  {
    auto f = open_output(path);
    write_scores_csv(f, scores, config_line(cfg));
  }
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& s : scores) ++counts[static_cast<int>(s.provenance)];
  out << "labeled " << counts[0] << '\n' << "imputed " << counts[1] << '\n' << "unavailable " << counts[2] << '\n';
  for (const auto& s : scores) {
    if (s.provenance == Provenance::unavailable) log()->info("source '{}' has no usable scores; excluded downstream", s.source_id);
  }
  return 0;
}

int cmd_embed(const GlobalOptions& g, EmbedOptions o, std::ostream& out) {
  o.walk.seed = g.seed;
  o.train.seed = g.seed;
  const CsnGraph graph = load_graph(fs::path(o.csn));
  if (graph.empty()) throw DataError(o.csn + ": graph has no nodes");
  const json cfg = {{"command", "embed"}, {"csn", fs::path(o.csn).filename().string()}, {"seed", g.seed}};

  const SourceVectors sv = embed_graph(graph, o.walk, o.train);
  const fs::path path = o.out.empty() ? fs::path(g.out_dir) / "vectors.tsv" : fs::path(o.out);
  save_vectors(sv, path, config_line(cfg));
  out << "vectors " << sv.vectors.size() << " x " << sv.dims << '\n';

  if (!graph.edges.empty()) {
    const auto communities = detect_communities(graph);
    const Homophily h = homophily(sv, communities.community);
    if (h.intra_pairs > 0 && h.inter_pairs > 0) {
      log()->info("homophily over {} communities: intra-community mean cosine {:.4f}, inter {:.4f} ({})",
                  communities.count, h.intra_mean, h.inter_mean, h.holds() ? "holds" : "violated");
    }
  }
  return 0;
}

json profile_json(const UserProfile& u) {
  return {{"sources", u.trusted}, {"quality", u.quality}, {"leaning", u.leaning}};
}

json run_json(const Trajectory& t) {
  std::size_t recommended = 0, accepted = 0;
  for (const auto& r : t.steps) {
    recommended += r.recommended ? 1 : 0;
    accepted += r.accepted ? 1 : 0;
  }
  json first = nullptr;
  if (!t.steps.empty() && t.steps.front().recommended) {
    first = {{"source", *t.steps.front().recommended},
             {"trust_cost", *t.steps.front().trust_cost},
             {"accept_probability", *t.steps.front().accept_probability}};
  }
  return {{"user_id", t.user_id},
          {"mode", std::string(to_string(t.config.mode))},
          {"L", t.config.limit},
          {"start", profile_json(t.initial)},
          {"end", profile_json(t.final_profile)},
          {"convergence_point", t.convergence_point ? json(*t.convergence_point) : json(nullptr)},
          {"first_recommendation", first},
          {"recommendations", recommended},
          {"accepted", accepted}};
}

int cmd_simulate(const GlobalOptions& g, const SimulateOptions& o, std::ostream& out) {
  std::vector<Mode> modes;
  if (o.mode == "both") {
    modes = {Mode::constrained, Mode::unconstrained};
  } else {
    modes = {parse_mode(o.mode)};
  }
  SimConfig base;
  base.steps = o.steps;
  base.alpha = o.alpha;
  base.seed = g.seed;
  base.epsilon_converge = o.epsilon;
  base.limit = o.limit == 0 ? 1 : o.limit;
  base.validate();

  std::vector<Persona> personas;
  {
    auto in = open_input(o.personas);
    personas = read_personas(in);
  }
  std::vector<SourceScore> scores;
  {
    auto in = open_input(o.scores);
    scores = read_scores_csv(in);
  }
  const SourceVectors vectors = load_vectors(fs::path(o.vectors));
  const SourceCatalog catalog = SourceCatalog::from_scores(scores, vectors);
  if (catalog.size() == 0) throw DataError("catalog is empty: no source has both usable scores and a vector");
  log()->info("catalog: {} sources", catalog.size());

  const json cfg = {{"command", "simulate"},
                    {"personas", fs::path(o.personas).filename().string()},
                    {"scores", fs::path(o.scores).filename().string()},
                    {"vectors", fs::path(o.vectors).filename().string()},
                    {"alpha", o.alpha},
                    {"T", o.steps},
                    {"L", o.limit == 0 ? json("per persona") : json(o.limit)},
                    {"epsilon_converge", o.epsilon},
                    {"mode", o.mode},
                    {"seed", g.seed}};

  const fs::path dir(g.out_dir);
  json runs = json::array();
  for (const auto& p : personas) {
    SimConfig cfg_user = base;
    cfg_user.limit = o.limit == 0 ? p.limit : o.limit;
    for (const auto& id : p.sources) {
      if (!catalog.find(id)) {
        throw DataError("persona '" + p.user_id + "' references unknown source '" + id + "'");
      }
    }
    const UserProfile u0 = profile_from_sources(p.user_id, p.sources, catalog, cfg_user.limit);
    std::vector<Trajectory> trajs;
    for (Mode m : modes) {
      cfg_user.mode = m;
      trajs.push_back(simulate(u0, catalog, cfg_user));
      const Trajectory& t = trajs.back();
      const std::string stem = "trajectory_" + safe_name(p.user_id) + "_" + std::string(to_string(m));
      {
        auto f = open_output(dir / (stem + ".csv"));
        write_trajectory_csv(f, t, config_line(cfg));
      }
      write_text(dir / (stem + ".svg"), trajectory_svg(t));
      runs.push_back(run_json(t));
      out << p.user_id << ' ' << to_string(m) << ": q " << format_double(t.initial.quality) << " -> "
          << format_double(t.final_profile.quality) << ", l " << format_double(t.initial.leaning) << " -> "
          << format_double(t.final_profile.leaning) << ", convergence "
          << (t.convergence_point ? std::to_string(*t.convergence_point) : std::string("none")) << '\n';
    }
    if (trajs.size() == 2) {
      const std::string stem = "trust_cost_" + safe_name(p.user_id);
      auto f = open_output(dir / (stem + ".csv"));
      write_trust_cost_comparison_csv(f, trajs[0], trajs[1], config_line(cfg));
      write_text(dir / (stem + ".svg"), trust_cost_svg(trajs[0], trajs[1]));
    }
  }
  const json summary = {{"config", cfg}, {"catalog_size", catalog.size()}, {"runs", runs}};
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trust nudging simulation pipeline"};
  app.name("nudgesim");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI file with defaults; [build-csn], [embed], ... sections per subcommand");

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Directory for outputs")->capture_default_str();

  BuildOptions build;
  auto* build_cmd = app.add_subcommand("build-csn", "Detect copied articles and build the content sharing network");
  build_cmd->add_option("articles", build.articles, "Articles JSONL")->required();
  build_cmd->add_option("--threshold", build.threshold, "Cosine similarity threshold in (0, 1]")->capture_default_str();
  build_cmd->add_option("--normalize", build.normalize, "Edge weight divisor: copier or origin")->capture_default_str();

  AnnotateOptions annotate;
  auto* annotate_cmd = app.add_subcommand("annotate", "Compute source quality and leaning");
  annotate_cmd->add_option("labels", annotate.labels, "Labels CSV")->required();
  annotate_cmd->add_option("csn", annotate.csn, "CSN edge list")->required();
  annotate_cmd->add_option("--out", annotate.out, "Scores CSV (default <out-dir>/scores.csv)");
  annotate_cmd->add_option("--leaning-map", annotate.leaning_map, "JSON object mapping leaning categories to [-1, 1]");

  EmbedOptions embed;
  auto* embed_cmd = app.add_subcommand("embed", "Learn source vectors from the CSN");
  embed_cmd->add_option("csn", embed.csn, "CSN edge list")->required();
  embed_cmd->add_option("--out", embed.out, "Vectors TSV (default <out-dir>/vectors.tsv)");
  embed_cmd->add_option("--dims", embed.train.dims)->capture_default_str();
  embed_cmd->add_option("--p", embed.walk.p)->capture_default_str();
  embed_cmd->add_option("--q", embed.walk.q)->capture_default_str();
  embed_cmd->add_option("--walk-length", embed.walk.walk_length)->capture_default_str();
  embed_cmd->add_option("--walks-per-node", embed.walk.walks_per_node)->capture_default_str();
  embed_cmd->add_option("--window", embed.train.window)->capture_default_str();
  embed_cmd->add_option("--negatives", embed.train.negatives)->capture_default_str();
  embed_cmd->add_option("--epochs", embed.train.epochs)->capture_default_str();
  embed_cmd->add_option("--learning-rate", embed.train.learning_rate)->capture_default_str();
  embed_cmd->add_flag("--directed", embed.walk.directed, "Walk along edge direction only");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run trust-nudging simulations for personas");
  sim_cmd->add_option("personas", sim.personas, "Personas JSON")->required();
  sim_cmd->add_option("scores", sim.scores, "Scores CSV")->required();
  sim_cmd->add_option("vectors", sim.vectors, "Vectors TSV")->required();
  sim_cmd->add_option("--alpha", sim.alpha, "Trust cost weight of network distance, in (0, 1)")->capture_default_str();
  sim_cmd->add_option("--T", sim.steps, "Iterations")->capture_default_str();
  sim_cmd->add_option("--L", sim.limit, "Attention limit (overrides each persona's L)");
  sim_cmd->add_option("--epsilon", sim.epsilon, "Convergence tolerance on q_u = 1")->capture_default_str();
  sim_cmd->add_option("--mode", sim.mode, "constrained, unconstrained or both")
      ->check(CLI::IsMember({"constrained", "unconstrained", "both"}))
      ->capture_default_str();

  std::vector<std::string> argv_storage{"nudgesim"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (build_cmd->parsed()) return cmd_build_csn(g, build, out);
    if (annotate_cmd->parsed()) return cmd_annotate(g, annotate, out);
    if (embed_cmd->parsed()) return cmd_embed(g, embed, out);
    if (sim_cmd->parsed()) return cmd_simulate(g, sim, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace nudgesim
