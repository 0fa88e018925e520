#include "xaif/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "xaif/csv.hpp"
#include "xaif/errors.hpp"
#include "xaif/rng.hpp"

namespace xaif {
namespace {

constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t",
                                   "v", "z", "br", "dr", "gr", "kl", "pl", "st", "tr", "sk"};
constexpr const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou", "ee"};
constexpr const char* kCodas[] = {"", "", "n", "r", "s", "l", "k", "m", "x"};
constexpr const char* kFillers[] = {"the", "a", "and", "of", "to", "it", "is", "was", "with", "my",
                                    "this", "that", "for", "on", "i", "very", "so", "but"};
constexpr const char* kTags[] = {"NOUN", "VERB", "ADJ"};

template <typename T, std::size_t N>
const T& pick(Rng& rng, const T (&items)[N]) {
  return items[rng.below(N)];
}

std::string make_word(Rng& rng, std::unordered_set<std::string>& used) {
  const auto& stop = StopwordSet::builtin_english();
  for (;;) {
    std::string w;
    const auto syllables = 2 + rng.below(2);
    for (std::uint64_t s = 0; s < syllables; ++s) {
      w += pick(rng, kOnsets);
      w += pick(rng, kVowels);
    }
    w += pick(rng, kCodas);
    if (!stop.contains(w) && used.insert(w).second) return w;
  }
}

std::vector<double> unit_gaussian(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  for (auto& x : v) {
    x = rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

struct Concept {
  std::vector<std::string> forms;
  std::vector<std::vector<double>> usage;  // per label, cumulative form weights
};

std::size_t draw(Rng& rng, const std::vector<double>& cumulative) {
  const double u = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace

SynthCorpus make_synthetic_corpus(const SynthOptions& o) {
  if (o.num_labels < 2) throw ParameterError("synthetic corpus needs at least 2 labels");
  if (o.forms_per_concept < 2) throw ParameterError("synthetic concepts need at least 2 forms");
  if (o.signal_concepts_per_label < 2) throw ParameterError("need at least 2 signal concepts per label");
  if (o.min_neutral > o.max_neutral || o.max_neutral > o.neutral_concepts) {
    throw ParameterError("neutral concept range is inconsistent");
  }
  if (o.dim == 0) throw ParameterError("embedding dimension must be >= 1");

  Rng rng(o.seed);
  std::unordered_set<std::string> used;
  SynthCorpus out;

  const std::size_t signal_total = o.num_labels * o.signal_concepts_per_label;
  std::vector<Concept> concepts(signal_total + o.neutral_concepts);
  for (std::size_t c = 0; c < concepts.size(); ++c) {
    const auto centre = unit_gaussian(rng, o.dim);
    const std::string tag = kTags[rng.below(std::size(kTags))];
    auto& con = concepts[c];
    for (std::size_t f = 0; f < o.forms_per_concept; ++f) {
      auto word = make_word(rng, used);
      auto noise = unit_gaussian(rng, o.dim);
      std::vector<double> v(o.dim);
      for (std::size_t d = 0; d < o.dim; ++d) v[d] = centre[d] + o.synonym_noise * noise[d];
      out.embeddings.add(word, v);
      out.pos.add(word, tag);
      con.forms.push_back(std::move(word));
    }
    const bool neutral = c >= signal_total;
    for (std::size_t label = 0; label < o.num_labels; ++label) {
      std::vector<double> cumulative;
      double total = 0.0;
      for (std::size_t f = 0; f < o.forms_per_concept; ++f) {
        total += neutral ? std::exp(o.usage_skew * rng.normal()) : 1.0;
        cumulative.push_back(total);
      }
      con.usage.push_back(std::move(cumulative));
    }
  }
  for (std::size_t i = 0; i < o.distractors; ++i) {
    auto word = make_word(rng, used);
    out.embeddings.add(word, unit_gaussian(rng, o.dim));
    out.pos.add(word, kTags[rng.below(std::size(kTags))]);
  }

  std::vector<std::string> label_names;
  for (std::size_t l = 0; l < o.num_labels; ++l) label_names.push_back("c" + std::to_string(l));

  for (std::size_t doc = 0; doc < o.num_docs; ++doc) {
    const std::size_t label = rng.below(o.num_labels);
    std::vector<std::string> tokens;
    auto add_concept = [&](std::size_t c, std::size_t usage_label) {
      tokens.push_back(concepts[c].forms[draw(rng, concepts[c].usage[usage_label])]);
    };
    const std::size_t own = label * o.signal_concepts_per_label;
    for (const auto c : rng.sample_without_replacement(o.signal_concepts_per_label, 2)) {
      add_concept(own + c, label);
    }
    if (rng.uniform() < 0.35) {
      const std::size_t other = (label + 1 + rng.below(o.num_labels - 1)) % o.num_labels;
      add_concept(other * o.signal_concepts_per_label + rng.below(o.signal_concepts_per_label), other);
    }
    const auto neutral_count = static_cast<std::size_t>(rng.between(o.min_neutral, o.max_neutral));
    for (const auto c : rng.sample_without_replacement(o.neutral_concepts, neutral_count)) {
      add_concept(signal_total + c, label);
    }
    const auto fillers = 4 + rng.below(5);
    for (std::uint64_t i = 0; i < fillers; ++i) tokens.emplace_back(pick(rng, kFillers));
    rng.shuffle(std::span<std::string>(tokens));

    std::string text = join_tokens(tokens);
    text.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(text.front())));
    text += '.';
    out.rows.emplace_back(std::move(text), label_names[label]);
  }
  return out;
}

void write_dataset_csv(const std::vector<std::pair<std::string, std::string>>& rows,
                       const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  csv::write_row(out, {"text", "label"});
  for (const auto& [text, label] : rows) csv::write_row(out, {text, label});
}

}  // namespace xaif
