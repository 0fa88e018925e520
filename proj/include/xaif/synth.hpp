#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "xaif/embed.hpp"

namespace xaif {

// Toy corpus generator for demos and tests. Words are grouped into concepts
// whose surface forms are near-synonyms in the generated embedding space.
// Label-bearing concepts drive the class; neutral concepts have forms whose
// usage leans towards particular labels, so swapping a form for its synonym
// moves the victim's output a little without flipping it.
struct SynthOptions {
  std::size_t num_docs = 600;
  std::size_t num_labels = 3;
  std::size_t signal_concepts_per_label = 6;
  std::size_t neutral_concepts = 60;
  std::size_t forms_per_concept = 4;
  std::size_t distractors = 150;
  std::size_t dim = 32;
  double synonym_noise = 0.45;   // per-form deviation from the concept centre
  double usage_skew = 1.5;       // how strongly neutral forms lean to a label
  std::size_t min_neutral = 8;
  std::size_t max_neutral = 14;
  std::uint64_t seed = 1;
};

struct SynthCorpus {
  std::vector<std::pair<std::string, std::string>> rows;  // (text, label)
  EmbeddingStore embeddings;
  PosLexicon pos;
};

SynthCorpus make_synthetic_corpus(const SynthOptions& options);

void write_dataset_csv(const std::vector<std::pair<std::string, std::string>>& rows,
                       const std::filesystem::path& path);

}  // namespace xaif
