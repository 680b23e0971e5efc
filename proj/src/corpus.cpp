#include "nudgesim/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "nudgesim/error.hpp"
#include "nudgesim/text_io.hpp"

namespace nudgesim {
namespace {

using json = nlohmann::json;

bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

// Decodes one UTF-8 sequence starting at i. Invalid bytes decode to U+FFFD
// and consume a single byte.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + len > s.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Non-ASCII code points count as letters unless they fall in a punctuation,
// symbol or emoji block. Locale-independent on purpose.
bool is_alnum(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  }
  if (cp <= 0xBF) return false;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;
  if (cp >= 0xFF1A && cp <= 0xFF20) return false;
  if (cp >= 0xFF3B && cp <= 0xFF40) return false;
  if (cp >= 0xFF5B && cp <= 0xFF65) return false;
  if (cp >= 0xFFF0 && cp <= 0xFFFF) return false;
  if (cp >= 0x1F000 && cp <= 0x1FAFF) return false;
  return true;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  return cp;
}

std::optional<Article> parse_article(const std::string& line, std::string& why) {
  json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded()) {
    why = "invalid JSON";
    return std::nullopt;
  }
  if (!obj.is_object()) {
    why = "not a JSON object";
    return std::nullopt;
  }
  for (const char* key : {"id", "source", "title", "content", "published_at"}) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
      why = std::string("missing or non-string field '") + key + "'";
      return std::nullopt;
    }
  }
  Article a;
  a.id = obj["id"].get<std::string>();
  a.source = obj["source"].get<std::string>();
  a.title = obj["title"].get<std::string>();
  a.body = obj["content"].get<std::string>();
  if (trim(a.id).empty() || trim(a.source).empty()) {
    why = "empty id or source";
    return std::nullopt;
  }
  if (trim(a.body).empty()) {
    why = "empty content";
    return std::nullopt;
  }
  auto ts = parse_timestamp(obj["published_at"].get<std::string>());
  if (!ts) {
    why = "unparseable or out-of-range published_at";
    return std::nullopt;
  }
  a.published_at = *ts;
  return a;
}

}  // namespace

std::optional<UnixSeconds> parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  s = trim(s);
  int y, mo, d, h, mi, sec;
  if (!read_digits(s, 0, 4, y) || s.size() < 19 || s[4] != '-' || !read_digits(s, 5, 2, mo) ||
      s[7] != '-' || !read_digits(s, 8, 2, d) || (s[10] != 'T' && s[10] != ' ') ||
      !read_digits(s, 11, 2, h) || s[13] != ':' || !read_digits(s, 14, 2, mi) || s[16] != ':' ||
      !read_digits(s, 17, 2, sec)) {
    return std::nullopt;
  }
  if (h > 23 || mi > 59 || sec > 59) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;

  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t digits_start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == digits_start) return std::nullopt;
  }
  long offset = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' || s[pos] == 'z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      int oh, om;
      if (!read_digits(s, pos + 1, 2, oh)) return std::nullopt;
      std::size_t mpos = pos + 3;
      if (mpos < s.size() && s[mpos] == ':') ++mpos;
      if (!read_digits(s, mpos, 2, om) || oh > 23 || om > 59) return std::nullopt;
      offset = (s[pos] == '+' ? 1 : -1) * (oh * 3600L + om * 60L);
      pos = mpos + 2;
    }
  }
  if (pos != s.size()) return std::nullopt;

  const auto days = sys_days{ymd}.time_since_epoch().count();
  const UnixSeconds t = static_cast<UnixSeconds>(days) * 86400 + h * 3600L + mi * 60L + sec - offset;
  constexpr UnixSeconds lo = 631152000;   // 1990-01-01T00:00:00Z
  constexpr UnixSeconds hi = 4102444800;  // 2100-01-01T00:00:00Z
  if (t < lo || t >= hi) return std::nullopt;
  return t;
}

std::string format_timestamp(UnixSeconds t) {
  using namespace std::chrono;
  const auto secs = sys_seconds{seconds{t}};
  const auto day_point = floor<days>(secs);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{secs - day_point};
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

ArticleSet read_articles(std::istream& in) {
  ArticleSet set;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::string why;
    auto article = parse_article(line, why);
    if (!article) {
      ++set.skipped;
      set.warnings.push_back("line " + std::to_string(lineno) + ": " + why);
      continue;
    }
    if (!seen.insert(article->id).second) {
      throw DataError("line " + std::to_string(lineno) + ": duplicate article id '" + article->id + "'");
    }
    set.articles.push_back(std::move(*article));
  }
  return set;
}

ArticleSet load_articles(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_articles(in);
}

std::map<std::string, std::uint64_t> article_counts(std::span<const Article> articles) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& a : articles) ++counts[a.source];
  return counts;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  std::size_t cur_len = 0;
  auto flush = [&] {
    if (cur_len >= 2) tokens.push_back(cur);
    cur.clear();
    cur_len = 0;
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = decode_utf8(text, i);
    if (cp != 0xFFFD && is_alnum(cp)) {
      append_utf8(cur, to_lower(cp));
      ++cur_len;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

TfidfMatrix tfidf_vectors(std::span<const Article> articles) {
  if (articles.empty()) throw DataError("tfidf_vectors: empty article set");

  std::vector<std::map<std::string, std::uint32_t>> counts(articles.size());
  std::map<std::string, std::uint32_t> df;
  for (std::size_t i = 0; i < articles.size(); ++i) {
    std::string text = articles[i].title;
    text.push_back(' ');
    text += articles[i].body;
    for (auto& tok : tokenize(text)) ++counts[i][std::move(tok)];
    for (const auto& [term, c] : counts[i]) ++df[term];
  }

  TfidfMatrix m;
  m.vocabulary.reserve(df.size());
  std::unordered_map<std::string, std::uint32_t> term_id;
  std::vector<double> idf;
  idf.reserve(df.size());
  const double n = static_cast<double>(articles.size());
  for (const auto& [term, d] : df) {
    term_id.emplace(term, static_cast<std::uint32_t>(m.vocabulary.size()));
    m.vocabulary.push_back(term);
    idf.push_back(std::log((1.0 + n) / (1.0 + d)) + 1.0);
  }

  m.docs.resize(articles.size());
  for (std::size_t i = 0; i < articles.size(); ++i) {
    DocVector& doc = m.docs[i];
    doc.article_id = articles[i].id;
    if (counts[i].empty()) {
      ++m.empty_docs;
      continue;
    }
    // counts[i] iterates in lexicographic order, which is term-id order.
    double norm2 = 0.0;
    for (const auto& [term, c] : counts[i]) {
      const std::uint32_t id = term_id.at(term);
      const double w = c * idf[id];
      doc.entries.emplace_back(id, w);
      norm2 += w * w;
    }
    const double norm = std::sqrt(norm2);
    for (auto& e : doc.entries) e.second /= norm;
  }
  return m;
}

double sparse_dot(const DocVector& a, const DocVector& b) {
  double dot = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return dot;
}

std::vector<CopyPair> similar_pairs(const TfidfMatrix& matrix, std::span<const Article> articles,
                                    double threshold) {
  if (matrix.docs.size() != articles.size()) {
    throw DataError("similar_pairs: vectors and articles are not aligned");
  }
  const std::size_t n = articles.size();

  // postings[term] = (doc, weight), docs ascending.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> postings(matrix.vocabulary.size());
  for (std::size_t d = 0; d < n; ++d) {
    for (const auto& [term, w] : matrix.docs[d].entries) {
      postings[term].emplace_back(static_cast<std::uint32_t>(d), w);
    }
  }

  std::vector<CopyPair> pairs;
  std::vector<double> acc(n, 0.0);
  std::vector<std::uint32_t> touched;
  for (std::size_t i = 0; i < n; ++i) {
    const DocVector& doc = matrix.docs[i];
    if (doc.empty()) continue;
    // Accumulating in ascending term order gives the same sum, bit for bit,
    // as sparse_dot on the pair.
    for (const auto& [term, w] : doc.entries) {
      const auto& plist = postings[term];
      auto it = std::upper_bound(plist.begin(), plist.end(), static_cast<std::uint32_t>(i),
                                 [](std::uint32_t v, const auto& p) { return v < p.first; });
      for (; it != plist.end(); ++it) {
        if (acc[it->first] == 0.0) touched.push_back(it->first);
        acc[it->first] += w * it->second;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::uint32_t j : touched) {
      const double sim = acc[j];
      acc[j] = 0.0;
      const Article& a = articles[i];
      const Article& b = articles[j];
      if (sim < threshold || a.source == b.source || a.published_at == b.published_at) continue;
      const bool a_first = a.published_at < b.published_at;
      const Article& early = a_first ? a : b;
      const Article& late = a_first ? b : a;
      pairs.push_back({early.id, late.id, early.source, late.source, sim});
    }
    touched.clear();
  }

  std::sort(pairs.begin(), pairs.end(), [](const CopyPair& x, const CopyPair& y) {
    return std::tie(x.earlier_source, x.later_source, x.earlier, x.later) <
           std::tie(y.earlier_source, y.later_source, y.earlier, y.later);
  });
  return pairs;
}

void write_pairs_tsv(std::ostream& out, std::span<const CopyPair> pairs, std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  for (const auto& p : pairs) {
    out << p.earlier << '\t' << p.later << '\t' << p.earlier_source << '\t' << p.later_source << '\t'
        << format_double(p.similarity) << '\n';
  }
}

}  // namespace nudgesim
