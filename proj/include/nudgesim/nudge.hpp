#pragma once
// Trust-constrained recommendation engine and its simulation loop.
//
// A user trusts a bounded set of sources S_u. Each step recommends the source
// of higher quality than the user's mean that is cheapest in trust cost
//
//     t(s, u) = (1 - alpha) * |l_u - l_s| / 2 + alpha * (1 - cos(v_u, v_s))
//
// Below capacity the user accepts with probability max(0, 1 - t). At
// capacity one of S_u + {s'} is dropped with probability proportional to its
// trust cost; dropping s' means the recommendation was rejected.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nudgesim/embedding.hpp"
#include "nudgesim/groundtruth.hpp"
#include "nudgesim/rng.hpp"

namespace nudgesim {

struct Source {
  std::string id;
  double quality = 0.0;  // [0, 1]
  double leaning = 0.0;  // [-1, 1]
  std::vector<double> vector;
};

class SourceCatalog {
 public:
  SourceCatalog() = default;
  // Validates ranges, unique ids and a common vector dimension; sorts by id.
  explicit SourceCatalog(std::vector<Source> sources);

  // Usable scores (labeled or imputed) that also have a trained vector.
  static SourceCatalog from_scores(std::span<const SourceScore> scores, const SourceVectors& vectors);

  const Source* find(std::string_view id) const;
  std::span<const Source> sources() const { return sources_; }
  std::size_t size() const { return sources_.size(); }
  std::size_t dims() const { return dims_; }
  double max_quality() const;

 private:
  std::vector<Source> sources_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::size_t dims_ = 0;
};

struct UserProfile {
  std::string user_id;
  std::vector<std::string> trusted;  // insertion order
  double quality = 0.0;
  double leaning = 0.0;
  std::vector<double> vector;

  bool trusts(std::string_view id) const;
};

// Throws DataError for an unknown or repeated source, an empty set, or more
// than `limit` sources.
UserProfile profile_from_sources(std::string user_id, std::span<const std::string> trusted,
                                 const SourceCatalog& catalog, std::size_t limit);

// Recomputes quality, leaning and vector as plain means over `trusted`.
void update_scores(UserProfile& u, const SourceCatalog& catalog);

double leaning_gap(double user_leaning, double source_leaning);
double trust_cost(const Source& s, const UserProfile& u, double alpha);

// argmin of trust cost over sources not in S_u with quality > q_u; ties go
// to the smallest id. nullptr when nothing qualifies.
const Source* select_recommendation(const UserProfile& u, const SourceCatalog& catalog, double alpha);

// Same eligibility, but picks the highest quality (ties by id) and ignores trust.
const Source* select_unconstrained(const UserProfile& u, const SourceCatalog& catalog);

struct DropCandidate {
  std::string id;
  double probability = 0.0;
};

// Members of S_u in order, then s'. Proportional to trust cost against the
// current profile; uniform when every cost is zero.
std::vector<DropCandidate> drop_distribution(const UserProfile& u, const Source& s_prime,
                                             const SourceCatalog& catalog, double alpha);

// First index whose cumulative probability exceeds `uniform` (in [0, 1)).
std::size_t invert_cdf(std::span<const DropCandidate> dist, double uniform);

enum class Mode { constrained, unconstrained };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view text);

struct SimConfig {
  std::size_t steps = 500;  // T
  std::size_t limit = 5;    // L
  double alpha = 0.5;
  std::uint64_t seed = 42;
  double epsilon_converge = 1e-9;
  Mode mode = Mode::constrained;

  // Throws UsageError unless 0 < alpha < 1, T >= 1 and L >= 1.
  void validate() const;
};

struct StepRecord {
  std::size_t t = 0;
  std::optional<std::string> recommended;
  std::optional<double> trust_cost;
  std::optional<double> accept_probability;  // 1 - t below capacity, survival chance of s' at capacity
  bool accepted = false;
  std::optional<std::string> dropped;
  double quality = 0.0;  // after the step
  double leaning = 0.0;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct Trajectory {
  std::string user_id;
  SimConfig config;
  UserProfile initial;
  UserProfile final_profile;
  std::vector<StepRecord> steps;
  std::optional<std::size_t> convergence_point;
};

// One iteration of the loop. Draws exactly one uniform from `rng` whenever a
// recommendation is made, none otherwise.
StepRecord step(UserProfile& u, const SourceCatalog& catalog, const SimConfig& config, Rng& rng,
                std::size_t t = 0);

// Runs config.steps iterations using RNG stream stream_id(user_id). The
// selection rule follows config.mode.
Trajectory simulate(const UserProfile& u0, const SourceCatalog& catalog, const SimConfig& config);
Trajectory simulate_unconstrained(const UserProfile& u0, const SourceCatalog& catalog, SimConfig config);

std::optional<std::size_t> convergence_point(std::span<const double> quality_series, double epsilon = 1e-9);
std::optional<std::size_t> convergence_point(const Trajectory& traj);

struct Persona {
  std::string user_id;
  std::vector<std::string> sources;
  std::size_t limit = 0;
};

// JSON list of {"user_id", "sources": [...], "L"}.
std::vector<Persona> read_personas(std::istream& in);

}  // namespace nudgesim
