#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "nudgesim/error.hpp"
#include "nudgesim/nudge.hpp"
#include "nudgesim/rng.hpp"

using namespace nudgesim;

namespace {

// Plain restatement of the cost definition, independent of the library.
double cost_oracle(double lu, const std::vector<double>& vu, double ls, const std::vector<double>& vs, double alpha) {
  double dot = 0.0, nu = 0.0, ns = 0.0;
  for (std::size_t k = 0; k < vu.size(); ++k) {
    dot += vu[k] * vs[k];
    nu += vu[k] * vu[k];
    ns += vs[k] * vs[k];
  }
  const double d = (nu == 0.0 || ns == 0.0) ? 1.0 : 1.0 - dot / (std::sqrt(nu) * std::sqrt(ns));
  return (1.0 - alpha) * std::abs(lu - ls) / 2.0 + alpha * d;
}

struct Means {
  double q = 0.0, l = 0.0;
  std::vector<double> v;
};

Means means_oracle(const std::vector<std::string>& members, const SourceCatalog& c) {
  Means m;
  m.v.assign(c.dims(), 0.0);
  for (const auto& id : members) {
    const Source& s = *c.find(id);
    m.q += s.quality;
    m.l += s.leaning;
    for (std::size_t k = 0; k < m.v.size(); ++k) m.v[k] += s.vector[k];
  }
  const double n = static_cast<double>(members.size());
  m.q /= n;
  m.l /= n;
  for (double& x : m.v) x /= n;
  return m;
}

SourceCatalog random_catalog(Rng& rng, std::size_t n, std::size_t dims) {
  std::vector<Source> sources;
  for (std::size_t i = 0; i < n; ++i) {
    Source s;
    s.id = "src" + std::to_string(1000 + i);
    const double r = rng.uniform();
    s.quality = r < 0.2 ? 0.0 : (r > 0.9 ? 1.0 : rng.uniform());
    s.leaning = 2.0 * rng.uniform() - 1.0;
    s.vector.resize(dims);
    for (auto& x : s.vector) x = rng.uniform() - 0.5;
    sources.push_back(std::move(s));
  }
  return SourceCatalog(std::move(sources));
}

std::vector<std::string> random_members(Rng& rng, const SourceCatalog& c, std::size_t k) {
  std::vector<std::string> ids;
  for (const auto& s : c.sources()) ids.push_back(s.id);
  for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.uniform_index(i)]);
  ids.resize(k);
  return ids;
}

SourceCatalog tiny_catalog() {
  return SourceCatalog({{"low", 0.2, -0.2, {1.0, 0.0}},
                        {"mid", 0.4, 0.0, {0.0, 1.0}},
                        {"high", 0.9, 0.3, {1.0, 1.0}},
                        {"top", 1.0, 1.0, {-1.0, 0.0}}});
}

}  // namespace

TEST_CASE("profile_from_sources: means") {
  const auto c = tiny_catalog();
  const auto one = profile_from_sources("u", std::vector<std::string>{"high"}, c, 5);
  CHECK(one.quality == 0.9);
  CHECK(one.leaning == 0.3);
  CHECK(one.vector == std::vector<double>{1.0, 1.0});
  const auto two = profile_from_sources("u", std::vector<std::string>{"low", "mid"}, c, 5);
  CHECK(two.quality == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(two.leaning == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(two.vector == std::vector<double>{0.5, 0.5});
}

TEST_CASE("profile_from_sources: conspiracy-heavy profile averages to 0.075") {
  std::vector<Source> sources;
  const double qs[] = {0.0, 0.0, 0.0, 0.0, 0.375};
  std::vector<std::string> ids;
  for (int i = 0; i < 5; ++i) {
    sources.push_back({"c" + std::to_string(i), qs[i], 0.6, {1.0, static_cast<double>(i)}});
    ids.push_back("c" + std::to_string(i));
  }
  const SourceCatalog c(std::move(sources));
  CHECK(profile_from_sources("A", ids, c, 5).quality == doctest::Approx(0.075).epsilon(1e-15));
}

TEST_CASE("profile_from_sources: invalid membership") {
  const auto c = tiny_catalog();
  CHECK_THROWS_AS(profile_from_sources("u", std::vector<std::string>{}, c, 5), DataError);
  CHECK_THROWS_WITH_AS(profile_from_sources("u", std::vector<std::string>{"nope"}, c, 5), doctest::Contains("nope"),
                       DataError);
  CHECK_THROWS_AS(profile_from_sources("u", std::vector<std::string>{"low", "low"}, c, 5), DataError);
  CHECK_THROWS_AS(profile_from_sources("u", std::vector<std::string>{"low", "mid", "high"}, c, 2), DataError);
}

TEST_CASE("SourceCatalog: validation") {
  CHECK_THROWS_AS(SourceCatalog({{"a", 0.5, 0.0, {1.0}}, {"a", 0.5, 0.0, {1.0}}}), DataError);
  CHECK_THROWS_AS(SourceCatalog({{"a", 1.5, 0.0, {1.0}}}), DataError);
  CHECK_THROWS_AS(SourceCatalog({{"a", 0.5, -2.0, {1.0}}}), DataError);
  CHECK_THROWS_AS(SourceCatalog({{"a", 0.5, 0.0, {1.0}}, {"b", 0.5, 0.0, {1.0, 2.0}}}), DataError);
  CHECK(tiny_catalog().max_quality() == 1.0);
  CHECK(tiny_catalog().sources().front().id == "high");
}

TEST_CASE("trust_cost: hand evaluations") {
  UserProfile u;
  u.leaning = 0.4;
  u.vector = {3.0, 4.0};
  SUBCASE("identical profile costs nothing") {
    const Source s{"s", 0.5, 0.4, {3.0, 4.0}};
    CHECK(std::abs(trust_cost(s, u, 0.5) - 0.0) < 1e-12);
  }
  SUBCASE("opposite leaning, orthogonal vectors") {
    u.leaning = -1.0;
    const Source s{"s", 0.5, 1.0, {-4.0, 3.0}};
    CHECK(leaning_gap(u.leaning, s.leaning) == 1.0);
    CHECK(std::abs(cosine_distance(u.vector, s.vector) - 1.0) < 1e-12);
    CHECK(std::abs(trust_cost(s, u, 0.5) - 1.0) < 1e-12);
  }
  SUBCASE("leaning gap 0.2 and cosine 0.9") {
    u.leaning = 0.2;
    u.vector = {1.0, 0.0};
    const Source s{"s", 0.5, 0.6, {0.9, std::sqrt(1.0 - 0.81)}};
    CHECK(std::abs(leaning_gap(u.leaning, s.leaning) - 0.2) < 1e-12);
    CHECK(std::abs(cosine_distance(u.vector, s.vector) - 0.1) < 1e-12);
    CHECK(std::abs(trust_cost(s, u, 0.5) - 0.15) < 1e-12);
  }
  SUBCASE("range is [0, 1 + alpha]") {
    Rng rng(8);
    for (int k = 0; k < 500; ++k) {
      const double alpha = 0.01 + 0.98 * rng.uniform();
      u.leaning = 2.0 * rng.uniform() - 1.0;
      u.vector = {rng.uniform() - 0.5, rng.uniform() - 0.5};
      const Source s{"s", 0.5, 2.0 * rng.uniform() - 1.0, {rng.uniform() - 0.5, rng.uniform() - 0.5}};
      const double t = trust_cost(s, u, alpha);
      CHECK(t >= -1e-15);
      CHECK(t <= 1.0 + alpha + 1e-12);
      CHECK(t == doctest::Approx(cost_oracle(u.leaning, u.vector, s.leaning, s.vector, alpha)).epsilon(1e-12));
    }
  }
}

TEST_CASE("select_recommendation") {
  const auto c = tiny_catalog();
  SUBCASE("nothing above the profile") {
    const auto u = profile_from_sources("u", std::vector<std::string>{"top"}, c, 5);
    CHECK(select_recommendation(u, c, 0.5) == nullptr);
    CHECK(select_unconstrained(u, c) == nullptr);
  }
  SUBCASE("cheapest eligible wins") {
    const SourceCatalog cc({{"base", 0.1, 0.0, {1.0, 0.0}},
                            {"far", 0.9, 0.0, {0.0, 1.0}},      // cost 0.5 * 1.0
                            {"near", 0.8, 0.0, {1.0, 0.2}},     // small angle
                            {"worse", 0.05, 0.0, {1.0, 0.0}}});  // cost 0 but not better quality
    const auto u = profile_from_sources("u", std::vector<std::string>{"base"}, cc, 5);
    CHECK(select_recommendation(u, cc, 0.5)->id == "near");
    CHECK(select_unconstrained(u, cc)->id == "far");
  }
  SUBCASE("trusted sources are never recommended") {
    const SourceCatalog cc({{"a", 0.1, 0.0, {1.0, 0.0}},
                            {"b", 0.9, 0.0, {1.0, 0.0}},
                            {"c", 0.6, 0.9, {0.0, 1.0}}});
    const auto u = profile_from_sources("u", std::vector<std::string>{"a", "b"}, cc, 5);
    // b is the cheapest source above q_u = 0.5 but already trusted.
    CHECK(select_recommendation(u, cc, 0.5)->id == "c");
  }
  SUBCASE("ties go to the smallest id") {
    const SourceCatalog cc({{"a", 0.1, 0.0, {1.0, 0.0}},
                            {"z", 0.9, 0.0, {2.0, 0.0}},
                            {"m", 0.9, 0.0, {3.0, 0.0}}});
    const auto u = profile_from_sources("u", std::vector<std::string>{"a"}, cc, 5);
    CHECK(select_recommendation(u, cc, 0.5)->id == "m");
    CHECK(select_unconstrained(u, cc)->id == "m");
  }
}

TEST_CASE("drop_distribution") {
  UserProfile u;
  u.trusted = {"a", "b"};
  u.leaning = 0.0;
  u.vector = {1.0, 0.0};
  SUBCASE("proportional to cost") {
    // With equal leanings, cost = alpha * (1 - cos): cosines 0.6, 0.4, 0.0 give 0.2, 0.3, 0.5.
    const SourceCatalog c({{"a", 0.1, 0.0, {0.6, 0.8}},
                           {"b", 0.2, 0.0, {0.4, std::sqrt(0.84)}},
                           {"s", 0.9, 0.0, {0.0, 1.0}}});
    const auto dist = drop_distribution(u, *c.find("s"), c, 0.5);
    REQUIRE(dist.size() == 3);
    CHECK(dist[0].id == "a");
    CHECK(dist[2].id == "s");
    CHECK(std::abs(dist[0].probability - 0.2) < 1e-12);
    CHECK(std::abs(dist[1].probability - 0.3) < 1e-12);
    CHECK(std::abs(dist[2].probability - 0.5) < 1e-12);
  }
  SUBCASE("equal costs are uniform") {
    const SourceCatalog c({{"a", 0.1, 0.0, {0.0, 1.0}}, {"b", 0.2, 0.0, {0.0, 2.0}}, {"s", 0.9, 0.0, {0.0, 3.0}}});
    for (const auto& d : drop_distribution(u, *c.find("s"), c, 0.5)) CHECK(std::abs(d.probability - 1.0 / 3) < 1e-12);
  }
  SUBCASE("all-zero costs fall back to uniform") {
    const SourceCatalog c({{"a", 0.1, 0.0, {1.0, 0.0}}, {"b", 0.2, 0.0, {2.0, 0.0}}, {"s", 0.9, 0.0, {5.0, 0.0}}});
    for (const auto& d : drop_distribution(u, *c.find("s"), c, 0.5)) CHECK(d.probability == 1.0 / 3);
  }
  SUBCASE("sums to one on random profiles") {
    Rng rng(1000);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto c = random_catalog(rng, 12, 4);
      const std::size_t l = 1 + rng.uniform_index(8);
      auto members = random_members(rng, c, l + 1);
      const std::string s_prime = members.back();
      members.pop_back();
      const auto prof = profile_from_sources("u", members, c, l);
      const auto dist = drop_distribution(prof, *c.find(s_prime), c, 0.05 + 0.9 * rng.uniform());
      double sum = 0.0;
      for (const auto& d : dist) {
        CHECK(d.probability >= 0.0);
        sum += d.probability;
      }
      CHECK(std::abs(sum - 1.0) < 1e-9);
      CHECK(dist.size() == l + 1);
    }
  }
}

TEST_CASE("invert_cdf") {
  const std::vector<DropCandidate> d{{"a", 0.2}, {"b", 0.3}, {"c", 0.5}};
  CHECK(invert_cdf(d, 0.0) == 0);
  CHECK(invert_cdf(d, 0.19) == 0);
  CHECK(invert_cdf(d, 0.2) == 1);
  CHECK(invert_cdf(d, 0.49) == 1);
  CHECK(invert_cdf(d, 0.5) == 2);
  CHECK(invert_cdf(d, 0.9999999) == 2);
  const std::vector<DropCandidate> zero_tail{{"a", 0.5}, {"b", 0.5}, {"c", 0.0}};
  CHECK(invert_cdf(zero_tail, 0.9999999999999999) == 1);
}

TEST_CASE("step: below-capacity boundaries") {
  SimConfig cfg;
  cfg.limit = 5;
  SUBCASE("zero cost is always accepted") {
    const SourceCatalog c({{"base", 0.2, 0.1, {1.0, 2.0}}, {"twin", 0.8, 0.1, {2.0, 4.0}}});
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      auto u = profile_from_sources("u", std::vector<std::string>{"base"}, c, 5);
      Rng rng(seed);
      const auto rec = step(u, c, cfg, rng, 0);
      CHECK(*rec.accept_probability == 1.0);
      CHECK(rec.accepted);
      CHECK(u.trusted == std::vector<std::string>{"base", "twin"});
      CHECK(rec.quality == doctest::Approx(0.5).epsilon(1e-15));
    }
  }
  SUBCASE("cost of one or more is never accepted") {
    const SourceCatalog c({{"base", 0.2, -1.0, {1.0, 0.0}}, {"far", 0.8, 1.0, {0.0, 1.0}}});
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      auto u = profile_from_sources("u", std::vector<std::string>{"base"}, c, 5);
      Rng rng(seed);
      const auto rec = step(u, c, cfg, rng, 0);
      CHECK(rec.recommended == "far");
      CHECK(*rec.accept_probability == 0.0);
      CHECK_FALSE(rec.accepted);
      CHECK_FALSE(rec.dropped);
      CHECK(u.trusted == std::vector<std::string>{"base"});
    }
  }
  SUBCASE("no eligible source is a no-op that draws nothing") {
    const SourceCatalog c({{"best", 1.0, 0.0, {1.0}}, {"meh", 0.3, 0.0, {1.0}}});
    auto u = profile_from_sources("u", std::vector<std::string>{"best"}, c, 5);
    Rng rng(5), untouched(5);
    const auto rec = step(u, c, cfg, rng, 3);
    CHECK(rec.t == 3);
    CHECK_FALSE(rec.recommended);
    CHECK_FALSE(rec.trust_cost);
    CHECK_FALSE(rec.accept_probability);
    CHECK_FALSE(rec.accepted);
    CHECK(rng.next_u64() == untouched.next_u64());
  }
}

TEST_CASE("simulate: at-capacity drops match a CDF-inversion oracle") {
  std::size_t at_capacity_steps = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng world(seed + 500);
    const auto c = random_catalog(world, 40, 6);
    SimConfig cfg;
    cfg.limit = 2;
    cfg.steps = 100;
    cfg.seed = seed;
    cfg.alpha = 0.3 + 0.4 * world.uniform();
    // Start from the two lowest-quality sources so there is room to climb.
    std::vector<const Source*> by_q;
    for (const auto& s : c.sources()) by_q.push_back(&s);
    std::stable_sort(by_q.begin(), by_q.end(), [](auto* a, auto* b) { return a->quality < b->quality; });
    const std::vector<std::string> start{by_q[0]->id, by_q[1]->id};
    const auto u0 = profile_from_sources("oracle-user", start, c, cfg.limit);
    const auto traj = simulate(u0, c, cfg);

    Rng rng(cfg.seed, stream_id("oracle-user"));
    std::vector<std::string> members = start;
    for (const auto& rec : traj.steps) {
      if (!rec.recommended) continue;
      const double draw = rng.uniform();
      const Means m = means_oracle(members, c);
      if (members.size() < cfg.limit) {
        const Source& s = *c.find(*rec.recommended);
        const double p = std::clamp(1.0 - cost_oracle(m.l, m.v, s.leaning, s.vector, cfg.alpha), 0.0, 1.0);
        CHECK(rec.accepted == (draw < p));
        if (rec.accepted) members.push_back(s.id);
        continue;
      }
      ++at_capacity_steps;
      std::vector<std::string> candidates = members;
      candidates.push_back(*rec.recommended);
      std::vector<double> costs;
      for (const auto& id : candidates) {
        const Source& s = *c.find(id);
        costs.push_back(cost_oracle(m.l, m.v, s.leaning, s.vector, cfg.alpha));
      }
      const double total = std::accumulate(costs.begin(), costs.end(), 0.0);
      std::size_t victim = candidates.size() - 1;
      double cum = 0.0;
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        cum += total > 0.0 ? costs[k] / total : 1.0 / static_cast<double>(candidates.size());
        if (draw < cum) {
          victim = k;
          break;
        }
      }
      REQUIRE(rec.dropped);
      CHECK(*rec.dropped == candidates[victim]);
      CHECK(rec.accepted == (victim + 1 != candidates.size()));
      CHECK(*rec.accept_probability == doctest::Approx(1.0 - costs.back() / total).epsilon(1e-12));
      if (rec.accepted) {
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(victim));
        members.push_back(*rec.recommended);
      }
    }
    CHECK(members == traj.final_profile.trusted);
  }
  CHECK(at_capacity_steps >= 100);
}

TEST_CASE("simulate: forced convergence") {
  std::vector<Source> sources{{"start", 0.2, 0.0, {1.0, 0.0}}};
  for (int i = 0; i < 8; ++i) sources.push_back({"gold" + std::to_string(i), 1.0, 0.0, {1.0 + i, 0.0}});
  const SourceCatalog c(std::move(sources));
  SimConfig cfg;
  cfg.limit = 5;
  cfg.steps = 500;
  const auto u0 = profile_from_sources("u", std::vector<std::string>{"start"}, c, cfg.limit);
  const auto traj = simulate(u0, c, cfg);
  REQUIRE(traj.convergence_point);
  CHECK(traj.final_profile.quality == 1.0);
  CHECK(convergence_point(traj) == traj.convergence_point);
  for (std::size_t t = *traj.convergence_point + 1; t < traj.steps.size(); ++t) {
    CHECK_FALSE(traj.steps[t].recommended);
    CHECK(traj.steps[t].quality == 1.0);
  }
}

TEST_CASE("simulate: deterministic, and seeds matter") {
  Rng world(77);
  const auto c = random_catalog(world, 60, 8);
  SimConfig cfg;
  cfg.steps = 200;
  const auto members = random_members(world, c, 5);
  const auto u0 = profile_from_sources("det", members, c, cfg.limit);
  const auto a = simulate(u0, c, cfg);
  const auto b = simulate(u0, c, cfg);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t t = 0; t < a.steps.size(); ++t) {
    CHECK(a.steps[t].recommended == b.steps[t].recommended);
    CHECK(a.steps[t].accepted == b.steps[t].accepted);
    CHECK(a.steps[t].dropped == b.steps[t].dropped);
    CHECK(a.steps[t].quality == b.steps[t].quality);
    CHECK(a.steps[t].leaning == b.steps[t].leaning);
  }
  CHECK(a.final_profile.trusted == b.final_profile.trusted);
}

TEST_CASE("simulate: invariants on random catalogs") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Rng world(seed * 31 + 1);
    const auto c = random_catalog(world, 25 + world.uniform_index(40), 5);
    SimConfig cfg;
    cfg.steps = 150;
    cfg.seed = seed;
    cfg.limit = 1 + world.uniform_index(6);
    cfg.alpha = 0.1 + 0.8 * world.uniform();
    const auto members = random_members(world, c, 1 + world.uniform_index(cfg.limit));
    const auto u0 = profile_from_sources("inv", members, c, cfg.limit);

    for (Mode mode : {Mode::constrained, Mode::unconstrained}) {
      cfg.mode = mode;
      const auto traj = simulate(u0, c, cfg);
      std::vector<std::string> state = u0.trusted;
      double q_before = u0.quality;
      double l_before = u0.leaning;
      std::vector<double> v_before = u0.vector;
      for (const auto& rec : traj.steps) {
        if (rec.recommended) {
          const Source& s = *c.find(*rec.recommended);
          CHECK(s.quality > q_before);
          CHECK(std::find(state.begin(), state.end(), s.id) == state.end());
          CHECK(*rec.trust_cost == doctest::Approx(cost_oracle(l_before, v_before, s.leaning, s.vector, cfg.alpha)).epsilon(1e-12));
          for (const auto& other : c.sources()) {
            if (!(other.quality > q_before) || std::find(state.begin(), state.end(), other.id) != state.end()) continue;
            if (mode == Mode::constrained) {
              CHECK(cost_oracle(l_before, v_before, other.leaning, other.vector, cfg.alpha) >= *rec.trust_cost - 1e-12);
            } else {
              CHECK(other.quality <= s.quality);
            }
          }
          const bool below = state.size() < cfg.limit;
          if (rec.accepted) {
            if (!below) state.erase(std::find(state.begin(), state.end(), *rec.dropped));
            state.push_back(s.id);
            if (below) CHECK(rec.quality > q_before);
          }
        } else {
          CHECK_FALSE(rec.accepted);
          CHECK_FALSE(rec.trust_cost);
        }
        CHECK(state.size() >= 1);
        CHECK(state.size() <= cfg.limit);
        const Means m = means_oracle(state, c);
        CHECK(std::abs(rec.quality - m.q) < 1e-9);
        CHECK(std::abs(rec.leaning - m.l) < 1e-9);
        q_before = m.q;
        l_before = m.l;
        v_before = m.v;
      }
      const Means final_means = means_oracle(traj.final_profile.trusted, c);
      for (std::size_t k = 0; k < final_means.v.size(); ++k) {
        CHECK(std::abs(traj.final_profile.vector[k] - final_means.v[k]) < 1e-9);
      }
    }

    cfg.mode = Mode::constrained;
    const auto con = simulate(u0, c, cfg);
    const auto unc = simulate_unconstrained(u0, c, cfg);
    if (con.steps[0].trust_cost) CHECK(*con.steps[0].trust_cost <= *unc.steps[0].trust_cost);
  }
}

TEST_CASE("simulate_unconstrained: recommends the top source first") {
  const SourceCatalog c({{"start", 0.1, -1.0, {1.0, 0.0}},
                         {"near", 0.5, -1.0, {1.0, 0.1}},
                         {"apex", 1.0, 1.0, {-1.0, 0.0}}});
  const auto u0 = profile_from_sources("u", std::vector<std::string>{"start"}, c, 5);
  SimConfig cfg;
  cfg.steps = 1;
  const auto unc = simulate_unconstrained(u0, c, cfg);
  CHECK(unc.steps[0].recommended == "apex");
  CHECK(unc.config.mode == Mode::unconstrained);
  const auto con = simulate(u0, c, cfg);
  CHECK(con.steps[0].recommended == "near");
  CHECK(*con.steps[0].trust_cost < *unc.steps[0].trust_cost);
}

TEST_CASE("convergence_point on series") {
  const std::vector<double> a{0.5, 1.0, 1.0}, b{0.1, 0.9, 0.999}, c{1.0, 0.5};
  CHECK(convergence_point(a, 1e-9) == 1);
  CHECK_FALSE(convergence_point(b, 1e-9));
  CHECK(convergence_point(c, 1e-9) == 0);
  CHECK(convergence_point(b, 1e-3) == 2);
}

TEST_CASE("SimConfig validation") {
  SimConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg.alpha = 1.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = SimConfig{};
  cfg.steps = 0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = SimConfig{};
  cfg.limit = 0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  CHECK(parse_mode("unconstrained") == Mode::unconstrained);
  CHECK_THROWS_AS(parse_mode("both"), UsageError);
}

TEST_CASE("read_personas") {
  std::istringstream ok(R"([{"user_id": "A", "sources": ["x", "y"], "L": 5}, {"user_id": "B", "sources": ["z"], "L": 1}])");
  const auto ps = read_personas(ok);
  REQUIRE(ps.size() == 2);
  CHECK(ps[0].user_id == "A");
  CHECK(ps[0].sources == std::vector<std::string>{"x", "y"});
  CHECK(ps[1].limit == 1);
  std::istringstream dup(R"([{"user_id": "A", "sources": [], "L": 5}, {"user_id": "A", "sources": [], "L": 5}])");
  CHECK_THROWS_AS(read_personas(dup), DataError);
  std::istringstream zero(R"([{"user_id": "A", "sources": ["x"], "L": 0}])");
  CHECK_THROWS_AS(read_personas(zero), DataError);
  std::istringstream junk("{oops");
  CHECK_THROWS_AS(read_personas(junk), DataError);
}
