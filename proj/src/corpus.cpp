#include "xaif/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "xaif/csv.hpp"
#include "xaif/errors.hpp"
#include "xaif/rng.hpp"

namespace xaif {
namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

char lower_ascii(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower_ascii);
  return out;
}

// NLTK-style English list, already in tokenizer form (contractions split).
constexpr std::string_view kEnglishStopwords[] = {
    "i",       "me",      "my",       "myself",  "we",         "our",     "ours",    "ourselves",
    "you",     "your",    "yours",    "yourself", "yourselves", "he",     "him",     "his",
    "himself", "she",     "her",      "hers",    "herself",    "it",      "its",     "itself",
    "they",    "them",    "their",    "theirs",  "themselves", "what",    "which",   "who",
    "whom",    "this",    "that",     "these",   "those",      "am",      "is",      "are",
    "was",     "were",    "be",       "been",    "being",      "have",    "has",     "had",
    "having",  "do",      "does",     "did",     "doing",      "a",       "an",      "the",
    "and",     "but",     "if",       "or",      "because",    "as",      "until",   "while",
    "of",      "at",      "by",       "for",     "with",       "about",   "against", "between",
    "into",    "through", "during",   "before",  "after",      "above",   "below",   "to",
    "from",    "up",      "down",     "in",      "out",        "on",      "off",     "over",
    "under",   "again",   "further",  "then",    "once",       "here",    "there",   "when",
    "where",   "why",     "how",      "all",     "any",        "both",    "each",    "few",
    "more",    "most",    "other",    "some",    "such",       "no",      "nor",     "not",
    "only",    "own",     "same",     "so",      "than",       "too",     "very",    "s",
    "t",       "can",     "will",     "just",    "don",        "should",  "now",     "d",
    "ll",      "m",       "o",        "re",      "ve",         "y",       "ain",     "aren",
    "couldn",  "didn",    "doesn",    "hadn",    "hasn",       "haven",   "isn",     "ma",
    "mightn",  "mustn",   "needn",    "shan",    "shouldn",    "wasn",    "weren",   "won",
    "wouldn",  "also",    "would",    "could",   "get",        "got",     "really",  "like"};

}  // namespace

std::vector<std::string> tokenize(std::string_view raw) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current.push_back(lower_ascii(ch));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

Document Document::from_text(std::string id, std::string raw) {
  Document doc{std::move(id), std::move(raw), {}};
  doc.tokens = tokenize(doc.raw);
  return doc;
}

Document Document::from_tokens(std::string id, std::vector<std::string> tokens) {
  std::string raw = join_tokens(tokens);
  return Document{std::move(id), std::move(raw), std::move(tokens)};
}

StopwordSet::StopwordSet(std::vector<std::string> words) {
  for (auto& w : words) words_.insert(lowercase(w));
}

const StopwordSet& StopwordSet::builtin_english() {
  static const StopwordSet set = [] {
    std::vector<std::string> words;
    for (const auto w : kEnglishStopwords) words.emplace_back(w);
    return StopwordSet(std::move(words));
  }();
  return set;
}

StopwordSet StopwordSet::none() { return StopwordSet{}; }

StopwordSet StopwordSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file '" + path.string() + "'");
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    words.push_back(line.substr(start));
  }
  return StopwordSet(std::move(words));
}

bool StopwordSet::contains(std::string_view token) const {
  if (words_.empty()) return false;
  return words_.count(lowercase(token)) > 0;
}

std::vector<std::string> unique_features(const Document& doc, const StopwordSet& stopwords) {
  std::vector<std::string> features;
  std::unordered_set<std::string_view> seen;
  for (const auto& token : doc.tokens) {
    if (stopwords.contains(token)) continue;
    if (seen.insert(token).second) features.push_back(token);
  }
  return features;
}

std::vector<Document> LabeledDataset::documents(std::span<const std::size_t> indices) const {
  std::vector<Document> docs;
  docs.reserve(indices.size());
  for (const auto i : indices) docs.push_back(items.at(i).doc);
  return docs;
}

LabeledDataset make_dataset(std::vector<std::pair<std::string, std::string>> text_label_rows,
                            std::uint64_t seed) {
  std::map<std::string, std::size_t> label_ids;
  for (const auto& row : text_label_rows) label_ids.emplace(row.second, 0);
  if (label_ids.size() < 2) {
    throw DataError("dataset needs at least 2 distinct labels, found " +
                    std::to_string(label_ids.size()));
  }

  LabeledDataset ds;
  ds.seed = seed;
  for (auto& [name, id] : label_ids) {
    id = ds.label_names.size();
    ds.label_names.push_back(name);
  }
  for (std::size_t row = 0; row < text_label_rows.size(); ++row) {
    auto& [text, label] = text_label_rows[row];
    Document doc = Document::from_text(std::to_string(row), std::move(text));
    if (doc.empty()) continue;
    ds.items.push_back(LabeledItem{std::move(doc), label_ids.at(label)});
  }

  std::vector<std::size_t> order(ds.items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto test_count = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(order.size())));
  const std::size_t train_count = order.size() - test_count;
  ds.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_count));
  ds.test.assign(order.begin() + static_cast<std::ptrdiff_t>(train_count), order.end());
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.test.begin(), ds.test.end());
  return ds;
}

LabeledDataset load_csv(const std::filesystem::path& path, std::string_view text_column,
                        std::string_view label_column, std::uint64_t seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
  const auto rows = csv::read_all(in);
  if (rows.empty()) throw DataError("dataset '" + path.string() + "' has no header row");

  const auto& header = rows.front();
  auto column_index = [&](std::string_view name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ConfigError("dataset '" + path.string() + "' has no column named '" +
                        std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t text_idx = column_index(text_column);
  const std::size_t label_idx = column_index(label_column);

  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() <= std::max(text_idx, label_idx)) {
      throw DataError("dataset '" + path.string() + "' row " + std::to_string(r + 1) +
                      " has " + std::to_string(row.size()) + " fields");
    }
    pairs.emplace_back(row[text_idx], row[label_idx]);
  }
  return make_dataset(std::move(pairs), seed);
}

}  // namespace xaif
