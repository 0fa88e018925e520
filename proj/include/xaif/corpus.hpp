#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace xaif {

// Lowercased word tokens split on runs of non-alphanumeric bytes. Bytes >= 0x80
// count as word characters so UTF-8 sequences are never split.
std::vector<std::string> tokenize(std::string_view raw);

std::string join_tokens(std::span<const std::string> tokens);

struct Document {
  std::string id;
  std::string raw;
  std::vector<std::string> tokens;

  static Document from_text(std::string id, std::string raw);
  // Builds a document whose raw text is the space-joined token list.
  static Document from_tokens(std::string id, std::vector<std::string> tokens);

  bool empty() const { return tokens.empty(); }
};

class StopwordSet {
 public:
  StopwordSet() = default;
  explicit StopwordSet(std::vector<std::string> words);

  // About 170 common English function words.
  static const StopwordSet& builtin_english();
  static StopwordSet none();
  // One token per line; blank lines and lines starting with '#' are skipped.
  static StopwordSet load(const std::filesystem::path& path);

  bool contains(std::string_view token) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Distinct non-stopword tokens in order of first appearance; these are the
// interpretable features an explanation ranks.
std::vector<std::string> unique_features(const Document& doc, const StopwordSet& stopwords);

struct LabeledItem {
  Document doc;
  std::size_t label = 0;
};

struct LabeledDataset {
  std::vector<LabeledItem> items;
  std::vector<std::string> label_names;  // dense id -> name, sorted by name
  std::vector<std::size_t> train;        // indices into items
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;

  std::size_t num_labels() const { return label_names.size(); }
  std::vector<Document> documents(std::span<const std::size_t> indices) const;
};

// Labels are mapped to dense ids in sorted name order, then items are
// shuffled with `seed` and the last 20% (rounded) become the test split.
// Rows whose text tokenizes to nothing are dropped. Throws DataError with
// fewer than two distinct labels.
LabeledDataset make_dataset(std::vector<std::pair<std::string, std::string>> text_label_rows,
                            std::uint64_t seed);

// Header row required. Throws ConfigError naming a missing column, DataError
// for unreadable files or degenerate label sets.
LabeledDataset load_csv(const std::filesystem::path& path, std::string_view text_column,
                        std::string_view label_column, std::uint64_t seed);

}  // namespace xaif
