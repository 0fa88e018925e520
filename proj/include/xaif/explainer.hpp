#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "xaif/corpus.hpp"
#include "xaif/model.hpp"
#include "xaif/ranksim.hpp"

namespace xaif {

// Surrogate coefficients ranked by |weight| descending, exact ties broken by
// token order so the ranking is total.
struct Explanation {
  RankedList entries;
  std::size_t label = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  std::vector<std::string> features() const;
  // 1-based rank of `token`, or 0 when absent.
  std::size_t rank_of(const std::string& token) const;

  bool operator==(const Explanation&) const = default;
};

struct SamplingConfig {
  std::size_t n = 1000;
  double kernel_width = 25.0;
  double surrogate_l2 = 1.0;
  std::uint64_t seed = 0;
  // Enumerate all 2^U masks instead of sampling (U <= 20). `n` is ignored.
  bool exhaustive = false;
};

// Throws ParameterError unless n >= 2, kernel_width > 0 and surrogate_l2 > 0.
void validate(const SamplingConfig& config);

struct PerturbationSample {
  std::vector<std::uint8_t> mask;  // 1 = feature kept, indexed like unique_features()
  Document doc;
};

// Sample 0 keeps every feature. Each further sample removes all occurrences
// of k distinct features, k uniform over [1, U-1], chosen without
// replacement. Stopwords are never removed. Requires U >= 2 and n >= 2.
std::vector<PerturbationSample> sample_perturbations(const Document& doc,
                                                     const StopwordSet& stopwords, std::size_t n,
                                                     std::uint64_t seed);

// All 2^U masks, all-ones first, then in increasing binary order of the
// removed-feature set. Requires 1 <= U <= 20.
std::vector<PerturbationSample> enumerate_perturbations(const Document& doc,
                                                        const StopwordSet& stopwords);

// Document with every occurrence of the masked-out features removed.
Document apply_mask(const Document& doc, const std::vector<std::string>& features,
                    const std::vector<std::uint8_t>& mask);

// Exponential kernel over the cosine distance between a mask and the all-ones mask.
double proximity_weight(const std::vector<std::uint8_t>& mask, double kernel_width);

// LIME-style explanation of f's argmax class. With a single feature the
// weight is P(label | doc) - P(label | doc without it); with none the
// explanation is empty.
Explanation explain(const Classifier& f, const Document& doc, const SamplingConfig& config,
                    const StopwordSet& stopwords = StopwordSet::builtin_english());

// Weighted ridge fit with an unpenalised intercept on binary masks. Returns
// one coefficient per mask column (intercept excluded).
std::vector<double> fit_weighted_ridge(const std::vector<std::vector<std::uint8_t>>& masks,
                                       const std::vector<double>& targets,
                                       const std::vector<double>& sample_weights, double l2);

// Orders coefficients into an explanation (|w| desc, token asc).
std::vector<FeatureWeight> rank_features(const std::vector<std::string>& features,
                                         const std::vector<double>& coefficients);

std::vector<std::string> top_k(const Explanation& explanation, std::size_t k);

nlohmann::json to_json(const Explanation& explanation);
Explanation explanation_from_json(const nlohmann::json& j);

}  // namespace xaif
