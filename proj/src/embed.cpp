#include "xaif/embed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "xaif/errors.hpp"
#include "xaif/simd/kernels.hpp"

namespace xaif {
namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) parts.push_back(line.substr(start, i - start));
  }
  return parts;
}

std::optional<double> parse_double(std::string_view text) {
  // from_chars for double is available in libstdc++ 11.
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

bool is_unsigned_integer(std::string_view text) {
  return !text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; });
}

double clamp_cosine(double c) { return std::clamp(c, -1.0, 1.0); }

}  // namespace

void EmbeddingStore::add(std::string token, std::span<const double> vector) {
  if (index_.count(token) > 0) return;
  if (tokens_.empty() && dim_ == 0) dim_ = vector.size();
  if (vector.size() != dim_ || dim_ == 0) {
    throw FormatError("embedding for '" + token + "' has " + std::to_string(vector.size()) +
                      " components, expected " + std::to_string(dim_));
  }
  for (const double v : vector) {
    if (!std::isfinite(v)) throw FormatError("embedding for '" + token + "' is not finite");
  }
  index_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
  data_.insert(data_.end(), vector.begin(), vector.end());
  norms_.push_back(std::sqrt(simd::dot(vector, vector)));
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file '" + path.string() + "'");
  EmbeddingStore store;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto parts = split_spaces(line);
    if (parts.empty()) continue;
    if (line_no == 1 && parts.size() == 2 && is_unsigned_integer(parts[0]) &&
        is_unsigned_integer(parts[1])) {
      continue;  // "count dim" header
    }
    if (parts.size() < 2) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": no vector components");
    }
    values.clear();
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const auto v = parse_double(parts[i]);
      if (!v) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": cannot parse '" +
                          std::string(parts[i]) + "' as a number");
      }
      values.push_back(*v);
    }
    if (store.dim_ != 0 && values.size() != store.dim_) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(store.dim_) + " components, found " +
                        std::to_string(values.size()));
    }
    try {
      store.add(std::string(parts[0]), values);
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return store;
}

void EmbeddingStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write embedding file '" + path.string() + "'");
  out << size() << ' ' << dim_ << '\n';
  out << std::setprecision(17);
  for (std::size_t r = 0; r < size(); ++r) {
    out << tokens_[r];
    for (const double v : vector(r)) out << ' ' << v;
    out << '\n';
  }
}

std::optional<std::size_t> EmbeddingStore::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

CandidateSet nearest_neighbors(const EmbeddingStore& store, std::string_view word,
                               std::size_t max_candidates, double min_cosine) {
  if (max_candidates == 0) throw ParameterError("max_candidates must be >= 1");
  if (!(min_cosine >= -1.0 && min_cosine <= 1.0)) {
    throw ParameterError("min_cosine must lie in [-1, 1]");
  }
  CandidateSet result{std::string(word), {}};
  const auto query = store.find(word);
  if (!query || store.norm(*query) == 0.0) return result;

  std::vector<double> dots(store.size());
  simd::active().dot_rows(store.matrix().data(), store.size(), store.dim(),
                          store.vector(*query).data(), dots.data());
  const double query_norm = store.norm(*query);
  for (std::size_t r = 0; r < store.size(); ++r) {
    if (r == *query || store.norm(r) == 0.0) continue;
    const double cosine = clamp_cosine(dots[r] / (query_norm * store.norm(r)));
    if (cosine >= min_cosine) result.candidates.push_back({store.token(r), cosine});
  }
  std::sort(result.candidates.begin(), result.candidates.end(),
            [](const Neighbor& a, const Neighbor& b) {
              return a.cosine != b.cosine ? a.cosine > b.cosine : a.token < b.token;
            });
  if (result.candidates.size() > max_candidates) result.candidates.resize(max_candidates);
  return result;
}

double semantic_similarity(const EmbeddingStore& store, const Document& a, const Document& b) {
  if (a.tokens == b.tokens) return 1.0;
  auto mean_vector = [&](const Document& doc, std::vector<double>& mean) {
    mean.assign(store.dim(), 0.0);
    std::size_t count = 0;
    for (const auto& token : doc.tokens) {
      if (const auto row = store.find(token)) {
        simd::axpy(1.0, store.vector(*row), mean);
        ++count;
      }
    }
    return count;
  };
  std::vector<double> ma;
  std::vector<double> mb;
  if (mean_vector(a, ma) == 0 || mean_vector(b, mb) == 0) return 0.0;
  const double na = std::sqrt(simd::dot(ma, ma));
  const double nb = std::sqrt(simd::dot(mb, mb));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return clamp_cosine(simd::dot(ma, mb) / (na * nb));
}

PosLexicon PosLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open POS lexicon '" + path.string() + "'");
  PosLexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected token<TAB>tag");
    }
    lexicon.add(line.substr(0, tab), line.substr(tab + 1));
  }
  return lexicon;
}

void PosLexicon::save(const std::filesystem::path& path) const {
  std::vector<std::pair<std::string_view, std::string_view>> sorted(tags_.begin(), tags_.end());
  std::sort(sorted.begin(), sorted.end());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write POS lexicon '" + path.string() + "'");
  for (const auto& [token, tag] : sorted) out << token << '\t' << tag << '\n';
}

void PosLexicon::add(std::string token, std::string tag) {
  tags_.emplace(std::move(token), std::move(tag));
}

std::optional<std::string_view> PosLexicon::tag(std::string_view token) const {
  const auto it = tags_.find(std::string(token));
  if (it == tags_.end()) return std::nullopt;
  return std::string_view(it->second);
}

bool PosLexicon::compatible(std::string_view original, std::string_view replacement) const {
  const auto a = tag(original);
  const auto b = tag(replacement);
  return !a || !b || *a == *b;
}

}  // namespace xaif
