#include "nudgesim/groundtruth.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>

#include "nudgesim/error.hpp"
#include "nudgesim/text_io.hpp"

namespace nudgesim {
namespace {

std::string lower(std::string_view s) {
  std::string out(trim(s));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Open Sources tags that exist in the data but do not lower quality.
const std::set<std::string, std::less<>> kBenignOsTags = {"bias",   "clickbait", "hate",   "political",
                                                          "reliable", "rumor",   "satire", "state"};

void parse_os_flags(std::string_view field, std::set<Flag>& flags, const std::string& where) {
  for (auto tag_view : split(field, ';')) {
    const std::string tag = lower(tag_view);
    if (tag.empty()) continue;
    if (tag == "fake") {
      flags.insert(Flag::os_fake);
    } else if (tag == "conspiracy") {
      flags.insert(Flag::os_conspiracy);
    } else if (tag == "junksci" || tag == "junk science") {
      flags.insert(Flag::os_junksci);
    } else if (tag == "unreliable") {
      flags.insert(Flag::os_unreliable);
    } else if (!kBenignOsTags.contains(tag)) {
      throw DataError(where + ": unknown os_flags tag '" + tag + "'");
    }
  }
}

void parse_mbfc_flags(std::string_view field, std::set<Flag>& flags, const std::string& where) {
  for (auto tag_view : split(field, ';')) {
    const std::string tag = lower(tag_view);
    if (tag.empty() || tag == "satire") continue;
    if (tag == "conspiracy") {
      flags.insert(Flag::mbfc_conspiracy);
    } else if (tag == "pseudoscience") {
      flags.insert(Flag::mbfc_pseudoscience);
    } else if (tag == "conspiracy-pseudoscience") {
      flags.insert(Flag::mbfc_conspiracy);
      flags.insert(Flag::mbfc_pseudoscience);
    } else if (tag == "questionable" || tag == "questionable source") {
      flags.insert(Flag::mbfc_questionable);
    } else {
      throw DataError(where + ": unknown mbfc_flags tag '" + tag + "'");
    }
  }
}

double mean(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

}  // namespace

std::optional<double> quality_score(const SourceLabels& labels) {
  if (labels.newsguard_score && (*labels.newsguard_score < 0.0 || *labels.newsguard_score > 100.0)) {
    throw DataError("source '" + labels.source_id + "': NewsGuard score " +
                    format_double(*labels.newsguard_score) + " outside [0, 100]");
  }
  if (!labels.flags.empty()) return 0.0;
  if (labels.newsguard_score) return *labels.newsguard_score / 100.0;
  return std::nullopt;
}

std::optional<double> leaning_score(const SourceLabels& labels) {
  double sum = 0.0;
  int n = 0;
  for (const auto& v : {labels.allsides_bias, labels.buzzfeed_leaning, labels.mbfc_bias}) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::labeled:
      return "labeled";
    case Provenance::imputed:
      return "imputed";
    case Provenance::unavailable:
      return "unavailable";
  }
  return "unavailable";
}

std::vector<SourceScore> score_labels(std::span<const SourceLabels> labels) {
  std::vector<SourceScore> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    SourceScore s{l.source_id, quality_score(l), leaning_score(l), Provenance::unavailable};
    if (s.quality && s.leaning) s.provenance = Provenance::labeled;
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.source_id < b.source_id; });
  return out;
}

std::vector<SourceScore> impute_missing(std::span<const SourceScore> scores, const CsnGraph& g) {
  std::map<std::string, SourceScore> by_id;
  for (const auto& s : scores) {
    if (!by_id.emplace(s.source_id, s).second) {
      throw DataError("duplicate score for source '" + s.source_id + "'");
    }
  }
  for (const auto& [id, count] : g.nodes) by_id.try_emplace(id, SourceScore{id, {}, {}, Provenance::unavailable});

  std::map<std::string, std::set<std::string>> neighbours;
  for (const auto& [key, e] : g.edges) {
    neighbours[key.first].insert(key.second);
    neighbours[key.second].insert(key.first);
  }

  // Imputation reads only labeled sources, so the input snapshot is enough to
  // make the pass order-independent.
  const auto snapshot = by_id;
  for (auto& [id, s] : by_id) {
    if (s.provenance == Provenance::labeled) continue;
    if (s.quality && s.leaning) continue;  // already imputed
    std::vector<double> qs, ls;
    if (auto it = neighbours.find(id); it != neighbours.end()) {
      for (const auto& nb : it->second) {
        const auto& ns = snapshot.at(nb);
        if (ns.provenance != Provenance::labeled) continue;
        qs.push_back(*ns.quality);
        ls.push_back(*ns.leaning);
      }
    }
    if (qs.empty()) {
      s.provenance = Provenance::unavailable;
      continue;
    }
    if (!s.quality) s.quality = mean(qs);
    if (!s.leaning) s.leaning = mean(ls);
    s.provenance = Provenance::imputed;
  }

  std::vector<SourceScore> out;
  out.reserve(by_id.size());
  for (auto& [id, s] : by_id) out.push_back(std::move(s));
  return out;
}

LeaningMap LeaningMap::defaults() {
  return LeaningMap{{
      {"extreme left", -1.0},
      {"far left", -1.0},
      {"left", -1.0},
      {"left-center", -0.5},
      {"lean left", -0.5},
      {"center", 0.0},
      {"least biased", 0.0},
      {"right-center", 0.5},
      {"lean right", 0.5},
      {"right", 1.0},
      {"far right", 1.0},
      {"extreme right", 1.0},
  }};
}

std::optional<double> LeaningMap::resolve(std::string_view text) const {
  if (auto v = parse_double(text)) {
    if (*v < -1.0 || *v > 1.0) return std::nullopt;
    return v;
  }
  auto it = categories.find(lower(text));
  if (it == categories.end()) return std::nullopt;
  return it->second;
}

std::vector<SourceLabels> read_labels_csv(std::istream& in, const LeaningMap& leaning) {
  static const std::vector<std::string> kHeader = {"source",   "newsguard", "os_flags", "mbfc_flags",
                                                   "allsides", "buzzfeed",  "mbfc_bias"};
  std::vector<SourceLabels> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t row = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty() || line.front() == '#') continue;
    const std::string where = "labels row " + std::to_string(row);
    auto fields = parse_csv_record(line);
    if (!fields) throw DataError(where + ": malformed CSV");
    if (!have_header) {
      std::vector<std::string> header;
      for (const auto& f : *fields) header.push_back(lower(f));
      if (header != kHeader) throw DataError(where + ": expected header source,newsguard,os_flags,mbfc_flags,allsides,buzzfeed,mbfc_bias");
      have_header = true;
      continue;
    }
    if (fields->size() != kHeader.size()) {
      throw DataError(where + ": expected 7 fields, got " + std::to_string(fields->size()));
    }
    const auto& f = *fields;
    SourceLabels l;
    l.source_id = std::string(trim(f[0]));
    if (l.source_id.empty()) throw DataError(where + ": empty source id");
    if (!seen.insert(l.source_id).second) throw DataError(where + ": duplicate source '" + l.source_id + "'");
    if (!trim(f[1]).empty()) {
      auto ng = parse_double(f[1]);
      if (!ng) throw DataError(where + ": newsguard is not a number");
      if (*ng < 0.0 || *ng > 100.0) throw DataError(where + ": newsguard " + std::string(trim(f[1])) + " outside [0, 100]");
      l.newsguard_score = *ng;
    }
    parse_os_flags(f[2], l.flags, where);
    parse_mbfc_flags(f[3], l.flags, where);
    auto lean = [&](const std::string& field, const char* name) -> std::optional<double> {
      if (trim(field).empty()) return std::nullopt;
      auto v = leaning.resolve(field);
      if (!v) throw DataError(where + ": " + name + " value '" + field + "' is not in [-1, 1] or a known category");
      return v;
    };
    l.allsides_bias = lean(f[4], "allsides");
    l.buzzfeed_leaning = lean(f[5], "buzzfeed");
    l.mbfc_bias = lean(f[6], "mbfc_bias");
    out.push_back(std::move(l));
  }
  if (!have_header) throw DataError("labels file is empty");
  return out;
}

void write_scores_csv(std::ostream& out, std::span<const SourceScore> scores, std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "source,quality,leaning,provenance\n";
  for (const auto& s : scores) {
    out << csv_field(s.source_id) << ',' << (s.quality ? format_double(*s.quality) : "") << ','
        << (s.leaning ? format_double(*s.leaning) : "") << ',' << to_string(s.provenance) << '\n';
  }
}

std::vector<SourceScore> read_scores_csv(std::istream& in) {
  std::vector<SourceScore> out;
  std::string line;
  std::size_t row = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty() || line.front() == '#') continue;
    const std::string where = "scores row " + std::to_string(row);
    auto fields = parse_csv_record(line);
    if (!fields) throw DataError(where + ": malformed CSV");
    if (!have_header) {
      if (fields->size() != 4 || (*fields)[0] != "source") throw DataError(where + ": expected header source,quality,leaning,provenance");
      have_header = true;
      continue;
    }
    if (fields->size() != 4) throw DataError(where + ": expected 4 fields");
    const auto& f = *fields;
    SourceScore s;
    s.source_id = f[0];
    auto opt = [&](const std::string& v, double lo, double hi, const char* name) -> std::optional<double> {
      if (trim(v).empty()) return std::nullopt;
      auto d = parse_double(v);
      if (!d || *d < lo || *d > hi) throw DataError(where + ": invalid " + name + " '" + v + "'");
      return d;
    };
    s.quality = opt(f[1], 0.0, 1.0, "quality");
    s.leaning = opt(f[2], -1.0, 1.0, "leaning");
    if (f[3] == "labeled") {
      s.provenance = Provenance::labeled;
    } else if (f[3] == "imputed") {
      s.provenance = Provenance::imputed;
    } else if (f[3] == "unavailable") {
      s.provenance = Provenance::unavailable;
    } else {
      throw DataError(where + ": unknown provenance '" + f[3] + "'");
    }
    if (s.provenance != Provenance::unavailable && (!s.quality || !s.leaning)) {
      throw DataError(where + ": " + f[3] + " source without both scores");
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace nudgesim
