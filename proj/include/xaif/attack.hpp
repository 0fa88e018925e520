#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xaif/corpus.hpp"
#include "xaif/embed.hpp"
#include "xaif/explainer.hpp"
#include "xaif/model.hpp"
#include "xaif/ranksim.hpp"

namespace xaif {

enum class Strategy { xaifooler, random, lom, lp, inherency };

std::string_view to_string(Strategy strategy);
// Throws ConfigError for an unknown name.
Strategy parse_strategy(std::string_view name);

enum class AttackStatus { succeeded, no_improvement, budget_exhausted };

std::string_view to_string(AttackStatus status);

struct AttackConfig {
  std::size_t k = 3;              // protected / evaluated top-k
  double delta = 0.80;            // minimum semantic similarity
  double epsilon = 0.1;           // budget as a fraction of unique features
  std::size_t min_budget = 3;     // budget floor in tokens
  double rbo_p = 0.49;
  std::size_t max_candidates = kDefaultMaxCandidates;
  double min_cosine = kDefaultMinCosine;
  SamplingConfig sampling;
  bool require_topk_demotion = true;
  bool ascending_order = false;   // visit low prediction-change words first
  std::uint64_t seed = 0;         // drives the random baseline
};

// Named parameter sets: "default" (epsilon 0.1, floor 3), "budget20"
// (epsilon 0.2, floor 1), and dataset-shaped "long" (k 5, p 0.75, n 4500),
// "medium" (k 3, p 0.49, n 2500), "short" (k 2, p 0.32, n 1500).
AttackConfig attack_preset(std::string_view name);

// Throws ParameterError for out-of-domain fields.
void validate(const AttackConfig& config);

// ceil(max(epsilon * unique_features, min_budget))
std::size_t perturbation_budget(std::size_t unique_features, double epsilon,
                                std::size_t min_budget);

struct SearchOrder {
  std::vector<std::size_t> positions;
  std::vector<double> scores;  // prediction change for the word at each position
};

// Eligible positions (not a stopword, not a base top-k feature) ranked by
// |P(label | doc) - P(label | doc without that word)|, descending (ascending
// when requested); ties keep document order.
SearchOrder order_words(const Classifier& f, const Document& doc, const Explanation& base,
                        std::size_t k, const StopwordSet& stopwords, bool ascending = false);

struct Substitution {
  std::size_t position = 0;
  std::string old_token;
  std::string new_token;
};

struct ConstraintAudit {
  bool prediction_preserved = false;  // argmax unchanged
  bool semantic_ok = false;           // Sim_s >= delta
  bool budget_ok = false;             // substitutions <= budget
  bool topk_present = false;          // every base top-k feature in the perturbed explanation
  bool topk_demoted = false;          // some base top-k feature ranks strictly lower
  bool demotion_required = false;

  bool all_passed() const {
    return prediction_preserved && semantic_ok && budget_ok && topk_present &&
           (topk_demoted || !demotion_required);
  }
};

struct AttackResult {
  Strategy strategy = Strategy::xaifooler;
  AttackStatus status = AttackStatus::no_improvement;
  Document base_doc;
  Document pert_doc;
  Explanation base_expl;
  Explanation pert_expl;
  double similarity = 1.0;  // RBO(base_expl, pert_expl)
  RankMetrics metrics;
  double semantic_similarity = 1.0;
  std::size_t budget = 0;
  std::vector<Substitution> substitutions;
  // Objective after each accepted substitution (RBO, -LOM shift or -L2); strictly decreasing.
  std::vector<double> objective_trace;
  std::size_t explanations_computed = 0;
  ConstraintAudit audit;
};

struct AttackContext {
  const Classifier& model;
  const EmbeddingStore& embeddings;
  const StopwordSet& stopwords = StopwordSet::builtin_english();
  const PosLexicon* pos = nullptr;
};

// Greedy search that minimises RBO between base and perturbed explanations
// while preserving the prediction, the semantics (>= delta), the budget and
// the presence of every base top-k feature. When `base` is null the base
// explanation is computed with config.sampling.
AttackResult xaifooler_attack(const AttackContext& ctx, const Document& doc,
                              const AttackConfig& config, const Explanation* base = nullptr);

// Same skeleton with a different acceptance rule: random (first constraint-
// satisfying random replacement), lom (centre-of-mass shift grows), lp (L2
// distance grows). Strategy::inherency re-explains the unchanged document
// with a derived seed.
AttackResult baseline_attack(const AttackContext& ctx, const Document& doc,
                             const AttackConfig& config, Strategy strategy,
                             const Explanation* base = nullptr);

AttackResult run_strategy(const AttackContext& ctx, const Document& doc,
                          const AttackConfig& config, Strategy strategy,
                          const Explanation* base = nullptr);

struct InherencyRow {
  std::uint64_t seed = 0;
  RankMetrics metrics;
  double rbo = 1.0;
};

// Explains the same document once per seed and compares every run against
// the first. Throws ParameterError with fewer than two seeds.
std::vector<InherencyRow> inherency_probe(const Classifier& f, const Document& doc,
                                          const SamplingConfig& sampling,
                                          const std::vector<std::uint64_t>& seeds, std::size_t k,
                                          double rbo_p,
                                          const StopwordSet& stopwords = StopwordSet::builtin_english());

// `trials` seeds derived from sampling.seed.
std::vector<InherencyRow> inherency_probe(const Classifier& f, const Document& doc,
                                          const SamplingConfig& sampling, std::size_t trials,
                                          std::size_t k, double rbo_p,
                                          const StopwordSet& stopwords = StopwordSet::builtin_english());

nlohmann::json to_json(const Document& doc);
nlohmann::json to_json(const AttackResult& result);

}  // namespace xaif
