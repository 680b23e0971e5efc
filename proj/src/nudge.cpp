#include "nudgesim/nudge.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>

#include <json.hpp>

#include "nudgesim/error.hpp"
#include "nudgesim/text_io.hpp"

namespace nudgesim {

SourceCatalog::SourceCatalog(std::vector<Source> sources) : sources_(std::move(sources)) {
  std::sort(sources_.begin(), sources_.end(), [](const Source& a, const Source& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    const Source& s = sources_[i];
    if (!index_.emplace(s.id, i).second) throw DataError("catalog: duplicate source '" + s.id + "'");
    if (!(s.quality >= 0.0 && s.quality <= 1.0)) throw DataError("catalog: quality of '" + s.id + "' outside [0, 1]");
    if (!(s.leaning >= -1.0 && s.leaning <= 1.0)) throw DataError("catalog: leaning of '" + s.id + "' outside [-1, 1]");
    if (i == 0) dims_ = s.vector.size();
    if (s.vector.size() != dims_ || dims_ == 0) throw DataError("catalog: vector of '" + s.id + "' has wrong dimension");
  }
}

SourceCatalog SourceCatalog::from_scores(std::span<const SourceScore> scores, const SourceVectors& vectors) {
  std::vector<Source> sources;
  for (const auto& s : scores) {
    if (!s.usable()) continue;
    const auto* v = vectors.find(s.source_id);
    if (!v) continue;
    sources.push_back({s.source_id, *s.quality, *s.leaning, *v});
  }
  return SourceCatalog(std::move(sources));
}

const Source* SourceCatalog::find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &sources_[it->second];
}

double SourceCatalog::max_quality() const {
  double best = 0.0;
  for (const auto& s : sources_) best = std::max(best, s.quality);
  return best;
}

bool UserProfile::trusts(std::string_view id) const {
  return std::find(trusted.begin(), trusted.end(), id) != trusted.end();
}

UserProfile profile_from_sources(std::string user_id, std::span<const std::string> trusted,
                                 const SourceCatalog& catalog, std::size_t limit) {
  if (trusted.empty()) throw DataError("user '" + user_id + "' trusts no sources");
  if (trusted.size() > limit) {
    throw DataError("user '" + user_id + "' trusts " + std::to_string(trusted.size()) +
                    " sources, more than the attention limit " + std::to_string(limit));
  }
  UserProfile u;
  u.user_id = std::move(user_id);
  for (const auto& id : trusted) {
    if (!catalog.find(id)) throw DataError("user '" + u.user_id + "': unknown source '" + id + "'");
    if (u.trusts(id)) throw DataError("user '" + u.user_id + "': source '" + id + "' listed twice");
    u.trusted.push_back(id);
  }
  update_scores(u, catalog);
  return u;
}

void update_scores(UserProfile& u, const SourceCatalog& catalog) {
  const double n = static_cast<double>(u.trusted.size());
  double q = 0.0, l = 0.0;
  std::vector<double> v(catalog.dims(), 0.0);
  for (const auto& id : u.trusted) {
    const Source& s = *catalog.find(id);
    q += s.quality;
    l += s.leaning;
    for (std::size_t d = 0; d < v.size(); ++d) v[d] += s.vector[d];
  }
  u.quality = q / n;
  u.leaning = l / n;
  for (double& x : v) x /= n;
  u.vector = std::move(v);
}

double leaning_gap(double user_leaning, double source_leaning) {
  return std::abs(user_leaning - source_leaning) / 2.0;
}

double trust_cost(const Source& s, const UserProfile& u, double alpha) {
  return (1.0 - alpha) * leaning_gap(u.leaning, s.leaning) + alpha * cosine_distance(u.vector, s.vector);
}

const Source* select_recommendation(const UserProfile& u, const SourceCatalog& catalog, double alpha) {
  const Source* best = nullptr;
  double best_cost = 0.0;
  for (const auto& s : catalog.sources()) {
    if (!(s.quality > u.quality) || u.trusts(s.id)) continue;
    const double c = trust_cost(s, u, alpha);
    if (!best || c < best_cost) {
      best = &s;
      best_cost = c;
    }
  }
  return best;
}

const Source* select_unconstrained(const UserProfile& u, const SourceCatalog& catalog) {
  const Source* best = nullptr;
  for (const auto& s : catalog.sources()) {
    if (!(s.quality > u.quality) || u.trusts(s.id)) continue;
    if (!best || s.quality > best->quality) best = &s;
  }
  return best;
}

std::vector<DropCandidate> drop_distribution(const UserProfile& u, const Source& s_prime,
                                             const SourceCatalog& catalog, double alpha) {
  std::vector<DropCandidate> dist;
  dist.reserve(u.trusted.size() + 1);
  double total = 0.0;
  for (const auto& id : u.trusted) {
    const double c = trust_cost(*catalog.find(id), u, alpha);
    dist.push_back({id, c});
    total += c;
  }
  const double c_new = trust_cost(s_prime, u, alpha);
  dist.push_back({s_prime.id, c_new});
  total += c_new;
  for (auto& d : dist) {
    d.probability = total > 0.0 ? d.probability / total : 1.0 / static_cast<double>(dist.size());
  }
  return dist;
}

std::size_t invert_cdf(std::span<const DropCandidate> dist, double uniform) {
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i].probability <= 0.0) continue;
    cum += dist[i].probability;
    last_positive = i;
    if (uniform < cum) return i;
  }
  return last_positive;
}

std::string_view to_string(Mode m) { return m == Mode::constrained ? "constrained" : "unconstrained"; }

Mode parse_mode(std::string_view text) {
  if (text == "constrained") return Mode::constrained;
  if (text == "unconstrained") return Mode::unconstrained;
  throw UsageError("unknown mode '" + std::string(text) + "'");
}

void SimConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie strictly inside (0, 1)");
  if (steps < 1) throw UsageError("T must be at least 1");
  if (limit < 1) throw UsageError("L must be at least 1");
  if (!(epsilon_converge >= 0.0)) throw UsageError("epsilon_converge must be non-negative");
}

StepRecord step(UserProfile& u, const SourceCatalog& catalog, const SimConfig& config, Rng& rng, std::size_t t) {
  StepRecord rec;
  rec.t = t;
  const bool converged = u.quality >= 1.0 - config.epsilon_converge;
  const Source* s = nullptr;
  if (!converged) {
    s = config.mode == Mode::constrained ? select_recommendation(u, catalog, config.alpha)
                                         : select_unconstrained(u, catalog);
  }
  if (s) {
    rec.recommended = s->id;
    rec.trust_cost = trust_cost(*s, u, config.alpha);
    const double draw = rng.uniform();
    if (u.trusted.size() < config.limit) {
      const double p = std::clamp(1.0 - *rec.trust_cost, 0.0, 1.0);
      rec.accept_probability = p;
      if (draw < p) {
        rec.accepted = true;
        u.trusted.push_back(s->id);
      }
    } else {
      const auto dist = drop_distribution(u, *s, catalog, config.alpha);
      rec.accept_probability = 1.0 - dist.back().probability;
      const std::size_t victim = invert_cdf(dist, draw);
      rec.dropped = dist[victim].id;
      if (victim + 1 != dist.size()) {
        rec.accepted = true;
        u.trusted.erase(u.trusted.begin() + static_cast<std::ptrdiff_t>(victim));
        u.trusted.push_back(s->id);
      }
    }
    if (rec.accepted) update_scores(u, catalog);
  }
  rec.quality = u.quality;
  rec.leaning = u.leaning;
  return rec;
}

Trajectory simulate(const UserProfile& u0, const SourceCatalog& catalog, const SimConfig& config) {
  config.validate();
  if (u0.trusted.size() > config.limit) {
    throw DataError("user '" + u0.user_id + "' starts above the attention limit");
  }
  Trajectory traj;
  traj.user_id = u0.user_id;
  traj.config = config;
  traj.initial = u0;
  UserProfile u = u0;
  update_scores(u, catalog);
  Rng rng(config.seed, stream_id(u0.user_id));
  traj.steps.reserve(config.steps);
  for (std::size_t t = 0; t < config.steps; ++t) {
    traj.steps.push_back(step(u, catalog, config, rng, t));
    if (!traj.convergence_point && u.quality >= 1.0 - config.epsilon_converge) traj.convergence_point = t;
  }
  traj.final_profile = std::move(u);
  return traj;
}

Trajectory simulate_unconstrained(const UserProfile& u0, const SourceCatalog& catalog, SimConfig config) {
  config.mode = Mode::unconstrained;
  return simulate(u0, catalog, config);
}

std::optional<std::size_t> convergence_point(std::span<const double> quality_series, double epsilon) {
  for (std::size_t i = 0; i < quality_series.size(); ++i) {
    if (quality_series[i] >= 1.0 - epsilon) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> convergence_point(const Trajectory& traj) {
  std::vector<double> q;
  q.reserve(traj.steps.size());
  for (const auto& r : traj.steps) q.push_back(r.quality);
  return convergence_point(q, traj.config.epsilon_converge);
}

std::vector<Persona> read_personas(std::istream& in) {
  using json = nlohmann::json;
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) throw DataError("personas: expected a JSON list");
  std::vector<Persona> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& p = doc[i];
    const std::string where = "personas[" + std::to_string(i) + "]";
    if (!p.is_object() || !p.contains("user_id") || !p["user_id"].is_string() || !p.contains("sources") ||
        !p["sources"].is_array() || !p.contains("L") || !p["L"].is_number_unsigned()) {
      throw DataError(where + ": expected {\"user_id\": str, \"sources\": [str], \"L\": positive int}");
    }
    Persona persona;
    persona.user_id = p["user_id"].get<std::string>();
    persona.limit = p["L"].get<std::size_t>();
    for (const auto& s : p["sources"]) {
      if (!s.is_string()) throw DataError(where + ": source ids must be strings");
      persona.sources.push_back(s.get<std::string>());
    }
    if (persona.limit == 0) throw DataError(where + ": L must be positive");
    if (!seen.insert(persona.user_id).second) throw DataError(where + ": duplicate user_id '" + persona.user_id + "'");
    out.push_back(std::move(persona));
  }
  return out;
}

}  // namespace nudgesim
