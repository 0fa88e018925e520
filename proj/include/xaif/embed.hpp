#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xaif/corpus.hpp"

namespace xaif {

// Immutable token -> vector table. Rows are stored contiguously so neighbour
// queries are a single dot_rows sweep.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  // Duplicate tokens keep the first occurrence. Throws FormatError on a
  // dimension mismatch or a non-finite component.
  void add(std::string token, std::span<const double> vector);

  // Word-vector text format: "token v1 v2 ... vdim" per line, optional
  // "count dim" header. Errors carry the 1-based line number.
  static EmbeddingStore load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  bool contains(std::string_view token) const { return find(token).has_value(); }
  std::optional<std::size_t> find(std::string_view token) const;
  const std::string& token(std::size_t row) const { return tokens_[row]; }
  std::span<const double> vector(std::size_t row) const {
    return {data_.data() + row * dim_, dim_};
  }
  double norm(std::size_t row) const { return norms_[row]; }
  std::span<const double> matrix() const { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> data_;
  std::vector<double> norms_;
};

struct Neighbor {
  std::string token;
  double cosine = 0.0;
};

struct CandidateSet {
  std::string word;
  std::vector<Neighbor> candidates;  // cosine descending, ties by token
};

inline constexpr std::size_t kDefaultMaxCandidates = 50;
inline constexpr double kDefaultMinCosine = 0.5;

// Exhaustive cosine scan. Empty when `word` is out of vocabulary.
CandidateSet nearest_neighbors(const EmbeddingStore& store, std::string_view word,
                               std::size_t max_candidates = kDefaultMaxCandidates,
                               double min_cosine = kDefaultMinCosine);

// Cosine of the mean in-vocabulary token vectors. 1.0 for identical token
// lists, 0.0 when either side has no in-vocabulary token.
double semantic_similarity(const EmbeddingStore& store, const Document& a, const Document& b);

// Optional token -> coarse POS tag table ("token<TAB>tag" per line).
class PosLexicon {
 public:
  PosLexicon() = default;
  static PosLexicon load(const std::filesystem::path& path);
  // Sorted by token.
  void save(const std::filesystem::path& path) const;

  void add(std::string token, std::string tag);
  std::optional<std::string_view> tag(std::string_view token) const;
  // A replacement is compatible unless both tokens are tagged and the tags differ.
  bool compatible(std::string_view original, std::string_view replacement) const;
  std::size_t size() const { return tags_.size(); }

 private:
  std::unordered_map<std::string, std::string> tags_;
};

}  // namespace xaif
