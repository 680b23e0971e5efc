// Writes the synthetic news world used by the tests and the acceptance suite:
// articles.jsonl, labels.csv and personas.json. Output depends only on the seed.
//
//   make_fixture <out_dir> [seed]

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nudgesim/corpus.hpp"
#include "nudgesim/rng.hpp"
#include "nudgesim/text_io.hpp"

using nudgesim::Rng;

namespace {

enum Group { CR, HR, MR, MC, ML, HL, LC, GHOST, LONELY };

struct SourceDef {
  std::string id;
  Group group;
  std::optional<double> quality;  // nullopt: no label row
  double leaning = 0.0;
  std::string os_flags;
  std::string mbfc_flags;
};

std::vector<SourceDef> world() {
  std::vector<SourceDef> s;
  auto add = [&](Group g, const std::string& prefix, const std::vector<double>& qs, const std::vector<double>& ls) {
    for (std::size_t i = 0; i < qs.size(); ++i) {
      char id[32];
      std::snprintf(id, sizeof(id), "%s-%02zu", prefix.c_str(), i + 1);
      s.push_back({id, g, qs[i], ls[i], "", ""});
    }
  };
  add(CR, "cr", {0, 0, 0, 0, 0.375, 0, 0.2, 0.3, 0}, {0.5, 0.6, 0.71, 0.5, 0.8, 0.9, 1.0, 0.7, 1.0});
  add(HR, "hr", {0.6, 0.45, 0.5, 0.57, 0.5, 0.65, 0.7, 0.4, 0.75}, {1, 1, 1, 1, 1, 0.9, 0.8, 1.0, 0.75});
  add(MR, "mr", {1, 1, 1, 0.95, 0.9, 0.85, 0.8, 0.92}, {0.5, 0.4, 0.3, 0.5, 0.6, 0.45, 0.55, 0.35});
  add(MC, "mc", {1, 1, 1, 1, 0.95, 0.9, 0.88, 0.97}, {0, 0.1, -0.1, 0.05, 0.2, -0.2, 0, 0.1});
  add(ML, "ml", {1, 1, 1, 0.95, 0.9, 0.85, 0.8, 0.93}, {-0.5, -0.4, -0.3, -0.5, -0.6, -0.45, -0.55, -0.35});
  add(HL, "hl", {0.1, 0.3, 0.35, 0.45, 0.55, 0.6, 0.7, 0.2, 0.65}, {-1, -0.8, -0.9, -0.77, -0.8, -0.75, -0.7, -1, -0.85});
  add(LC, "lc", {0, 0.2, 0.29, 0, 0, 0.4, 0.5, 0.35}, {-0.3, -0.1, 0.05, -0.24, -0.2, 0, 0.1, -0.1});

  // Zero quality comes from flags; the NewsGuard column is filled anyway for
  // some of them so the flag has something to override.
  const std::array<const char*, 4> os = {"conspiracy", "fake;bias", "junksci", "unreliable;clickbait"};
  int k = 0;
  for (auto& d : s) {
    if (d.quality && *d.quality == 0.0) {
      if (d.group == CR) {
        d.os_flags = os[k++ % os.size()];
      } else {
        d.mbfc_flags = "questionable source";
      }
    }
  }

  // Unlabeled but embedded in a community: imputed from neighbours.
  s.push_back({"mc-unrated", MC, std::nullopt, 0.0, "", ""});
  s.push_back({"hl-unrated", HL, std::nullopt, 0.0, "", ""});
  s.push_back({"cr-unrated", CR, std::nullopt, 0.0, "", ""});
  // Unlabeled and only connected to each other: unavailable.
  s.push_back({"ghost-a", GHOST, std::nullopt, 0.0, "", ""});
  s.push_back({"ghost-b", GHOST, std::nullopt, 0.0, "", ""});
  // Labeled but nobody copies it and it copies nobody: not in the network.
  s.push_back({"lonely-gazette", LONELY, 0.8, 0.1, "", ""});
  return s;
}

double copy_rate(Group from, Group to) {
  if (from == GHOST || to == GHOST || from == LONELY || to == LONELY) return 0.0;
  if (from == to) return 0.22;
  static const std::map<std::pair<Group, Group>, bool> adjacent = {
      {{LC, CR}, true}, {{CR, HR}, true}, {{HR, MR}, true}, {{MR, MC}, true},
      {{MC, ML}, true}, {{ML, HL}, true}, {{LC, MC}, true}};
  if (adjacent.contains({from, to}) || adjacent.contains({to, from})) return 0.05;
  return 0.004;
}

std::vector<std::string> vocabulary(Rng& rng, std::size_t n) {
  static const std::array<const char*, 20> onsets = {"b", "c", "d", "f", "g", "h", "k", "l", "m", "n",
                                                     "p", "r", "s", "t", "v", "w", "z", "br", "st", "tr"};
  static const std::array<const char*, 6> vowels = {"a", "e", "i", "o", "u", "ai"};
  std::map<std::string, bool> seen;
  std::vector<std::string> words;
  while (words.size() < n) {
    std::string w;
    const auto syllables = 2 + rng.uniform_index(2);
    for (std::size_t k = 0; k < syllables; ++k) {
      w += onsets[rng.uniform_index(onsets.size())];
      w += vowels[rng.uniform_index(vowels.size())];
    }
    if (seen.emplace(w, true).second) words.push_back(w);
  }
  return words;
}

std::string words(Rng& rng, const std::vector<std::string>& vocab, std::size_t n) {
  std::string out;
  for (std::size_t k = 0; k < n; ++k) {
    if (k) out += ' ';
    out += vocab[rng.uniform_index(vocab.size())];
  }
  return out;
}

std::string leaning_field(double l) {
  // Round values go through the category names, the rest stay numeric.
  static const std::map<double, const char*> names = {{-1.0, "left"}, {-0.5, "left-center"}, {0.0, "center"},
                                                      {0.5, "right-center"}, {1.0, "right"}};
  auto it = names.find(l);
  return it != names.end() ? it->second : nudgesim::format_double(l);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2 || argc > 3) {
    std::cerr << "usage: make_fixture <out_dir> [seed]\n";
    return 2;
  }
  const std::filesystem::path out_dir = argv[1];
  const std::uint64_t seed = argc == 3 ? std::strtoull(argv[2], nullptr, 10) : 2019;
  std::filesystem::create_directories(out_dir);

  Rng rng(seed, nudgesim::stream_id("fixture"));
  const auto sources = world();
  const auto vocab = vocabulary(rng, 3000);
  const auto suffixes = std::vector<std::string>{"Reporting by staff writers.", "Read more on our site.",
                                                 "Republished with permission.", "Updated with new details."};

  struct Draft {
    std::string source;
    std::string title;
    std::string body;
    nudgesim::UnixSeconds at;
  };
  std::vector<Draft> drafts;
  const nudgesim::UnixSeconds start = 1546300800;  // 2019-01-01
  const nudgesim::UnixSeconds span = 180 * 86400;
  for (const auto& src : sources) {
    const std::size_t originals = src.group == GHOST ? 5 : (src.group == LONELY ? 8 : 12);
    for (std::size_t k = 0; k < originals; ++k) {
      Draft d{src.id, words(rng, vocab, 5 + rng.uniform_index(4)), words(rng, vocab, 40 + rng.uniform_index(21)),
              start + static_cast<nudgesim::UnixSeconds>(rng.uniform_index(span))};
      const std::size_t original_index = drafts.size();
      drafts.push_back(d);
      for (const auto& other : sources) {
        if (other.id == src.id) continue;
        double rate = copy_rate(src.group, other.group);
        if (src.group == GHOST && other.group == GHOST && src.id == "ghost-a") rate = 0.6;
        if (rng.uniform() >= rate) continue;
        Draft copy = drafts[original_index];
        copy.source = other.id;
        copy.at += 3600 + static_cast<nudgesim::UnixSeconds>(rng.uniform_index(72 * 3600));
        if (rng.uniform() < 0.5) copy.body += " " + suffixes[rng.uniform_index(suffixes.size())];
        drafts.push_back(std::move(copy));
      }
    }
  }

  {
    auto out = nudgesim::open_output(out_dir / "articles.jsonl");
    std::size_t n = 0;
    for (const auto& d : drafts) {
      char id[32];
      std::snprintf(id, sizeof(id), "art-%05zu", ++n);
      nlohmann::ordered_json j;
      j["id"] = id;
      j["source"] = d.source;
      j["title"] = d.title;
      j["content"] = d.body;
      j["published_at"] = nudgesim::format_timestamp(d.at);
      out << j.dump() << '\n';
    }
  }

  {
    auto out = nudgesim::open_output(out_dir / "labels.csv");
    out << "source,newsguard,os_flags,mbfc_flags,allsides,buzzfeed,mbfc_bias\n";
    for (const auto& s : sources) {
      if (!s.quality) continue;
      std::string newsguard;
      if (*s.quality > 0.0) {
        newsguard = nudgesim::format_double(*s.quality * 100.0);
      } else if (!s.os_flags.empty()) {
        newsguard = "62";
      }
      const std::string lean = leaning_field(s.leaning);
      // Category names appear in two columns so both code paths are used.
      const bool named = lean.find_first_not_of("-0123456789.") != std::string::npos;
      out << s.id << ',' << newsguard << ',' << s.os_flags << ',' << s.mbfc_flags << ',' << lean << ",,"
          << (named ? lean : "") << '\n';
    }
  }

  {
    nlohmann::ordered_json personas = nlohmann::ordered_json::array();
    auto persona = [&](const char* user, std::vector<std::string> ids) {
      nlohmann::ordered_json p;
      p["user_id"] = user;
      p["sources"] = ids;
      p["L"] = 5;
      personas.push_back(p);
    };
    persona("user-a", {"cr-01", "cr-02", "cr-03", "cr-04", "cr-05"});
    persona("user-b", {"hl-01", "hl-02", "hl-03", "hl-04", "hl-05"});
    persona("user-c", {"hr-01", "hr-02", "hr-03", "hr-04", "hr-05"});
    persona("user-d", {"lc-01", "lc-02", "lc-03", "lc-04", "lc-05"});
    auto out = nudgesim::open_output(out_dir / "personas.json");
    out << personas.dump(2) << '\n';
  }

  std::cout << "wrote " << drafts.size() << " articles from " << sources.size() << " sources to " << out_dir.string()
            << '\n';
  return 0;
}
