#pragma once
// Source quality and leaning from multi-provider labels, with one-pass
// imputation from CSN neighbours for unlabeled sources.

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nudgesim/graph.hpp"

namespace nudgesim {

enum class Flag {
  os_fake,
  os_conspiracy,
  os_junksci,
  os_unreliable,
  mbfc_conspiracy,
  mbfc_pseudoscience,
  mbfc_questionable,
};

struct SourceLabels {
  std::string source_id;
  std::optional<double> newsguard_score;  // provider scale 0..100
  std::set<Flag> flags;
  std::optional<double> allsides_bias;     // already mapped to [-1, 1]
  std::optional<double> buzzfeed_leaning;  // already mapped to [-1, 1]
  std::optional<double> mbfc_bias;         // already mapped to [-1, 1]
};

// Any flag forces 0; otherwise NewsGuard / 100. Throws DataError for a
// NewsGuard score outside [0, 100].
std::optional<double> quality_score(const SourceLabels& labels);

// Mean of the leaning providers that are present.
std::optional<double> leaning_score(const SourceLabels& labels);

enum class Provenance { labeled, imputed, unavailable };

std::string_view to_string(Provenance p);

struct SourceScore {
  std::string source_id;
  std::optional<double> quality;
  std::optional<double> leaning;
  Provenance provenance = Provenance::unavailable;

  bool usable() const { return provenance != Provenance::unavailable && quality && leaning; }

  friend bool operator==(const SourceScore&, const SourceScore&) = default;
};

// labeled when both scores come from labels; otherwise unavailable and
// carrying whatever partial value the labels gave.
std::vector<SourceScore> score_labels(std::span<const SourceLabels> labels);

// Fills the missing quality / leaning of every non-labeled source (including
// CSN nodes absent from `scores`) with the unweighted mean over its labeled
// in- and out-neighbours. Imputed values never feed other imputations.
// Output is sorted by source id.
std::vector<SourceScore> impute_missing(std::span<const SourceScore> scores, const CsnGraph& g);

// Categorical leaning names accepted in the label file, e.g. "left-center".
struct LeaningMap {
  std::map<std::string, double> categories;

  static LeaningMap defaults();
  // Numbers in [-1, 1] pass through; names are looked up case-insensitively.
  std::optional<double> resolve(std::string_view text) const;
};

// Header `source,newsguard,os_flags,mbfc_flags,allsides,buzzfeed,mbfc_bias`;
// flags are semicolon separated. Throws DataError naming the row on bad input.
std::vector<SourceLabels> read_labels_csv(std::istream& in, const LeaningMap& leaning = LeaningMap::defaults());

// `source,quality,leaning,provenance`; absent values are empty fields.
void write_scores_csv(std::ostream& out, std::span<const SourceScore> scores, std::string_view comment = {});
std::vector<SourceScore> read_scores_csv(std::istream& in);

}  // namespace nudgesim
