#pragma once
// Article ingestion, TF-IDF vectorization and cross-source near-duplicate
// detection.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nudgesim {

// Seconds since 1970-01-01T00:00:00Z.
using UnixSeconds = std::int64_t;

struct Article {
  std::string id;
  std::string source;
  std::string title;
  std::string body;
  UnixSeconds published_at = 0;
};

struct ArticleSet {
  std::vector<Article> articles;
  std::size_t skipped = 0;
  // One message per skipped line, prefixed with its 1-based line number.
  std::vector<std::string> warnings;
};

// Accepts `YYYY-MM-DDTHH:MM:SS[.fff][Z|+HH:MM|-HH:MM]` ('T' may be a space;
// no zone means UTC). Fractions are truncated. Dates outside
// [1990-01-01, 2100-01-01) are rejected.
std::optional<UnixSeconds> parse_timestamp(std::string_view text);
std::string format_timestamp(UnixSeconds t);

// JSONL reader. Malformed lines are skipped and counted; a duplicate article
// id throws DataError.
ArticleSet read_articles(std::istream& in);
ArticleSet load_articles(const std::filesystem::path& path);

std::map<std::string, std::uint64_t> article_counts(std::span<const Article> articles);

// Lowercased tokens split at every non-alphanumeric code point; tokens shorter
// than two code points are dropped.
std::vector<std::string> tokenize(std::string_view text);

struct DocVector {
  std::string article_id;
  // (term id, weight), ascending by term id, L2-normalized.
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool empty() const { return entries.empty(); }
};

struct TfidfMatrix {
  // Term id i is vocabulary[i]; ids follow lexicographic term order.
  std::vector<std::string> vocabulary;
  // Aligned with the input article order. Articles without tokens get an
  // empty vector and are never paired.
  std::vector<DocVector> docs;
  std::size_t empty_docs = 0;
};

// tf = raw count over title + body, idf = ln((1 + N) / (1 + df)) + 1.
TfidfMatrix tfidf_vectors(std::span<const Article> articles);

double sparse_dot(const DocVector& a, const DocVector& b);

struct CopyPair {
  std::string earlier;
  std::string later;
  std::string earlier_source;
  std::string later_source;
  double similarity = 0.0;

  friend bool operator==(const CopyPair&, const CopyPair&) = default;
};

inline constexpr double kDefaultCopyThreshold = 0.85;

// All cross-source article pairs with cosine >= threshold, oriented from the
// earlier to the later publication. Pairs with equal timestamps are dropped.
// Candidates come from a shared-term inverted index; the result is identical
// to exhaustive comparison. Output is sorted by
// (earlier_source, later_source, earlier, later).
std::vector<CopyPair> similar_pairs(const TfidfMatrix& matrix, std::span<const Article> articles,
                                    double threshold = kDefaultCopyThreshold);

// `earlier_id  later_id  earlier_source  later_source  similarity`, tab
// separated. `comment`, when non-empty, is written first as a `#` line.
void write_pairs_tsv(std::ostream& out, std::span<const CopyPair> pairs,
                     std::string_view comment = {});

}  // namespace nudgesim
