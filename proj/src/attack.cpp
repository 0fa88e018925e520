#include "xaif/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "xaif/errors.hpp"
#include "xaif/rng.hpp"

namespace xaif {
namespace {

struct Probe {
  std::size_t label = 0;
  bool preserved = false;
};

Probe predict_label(const Classifier& f, const Document& doc) {
  const auto probs = f.predict_proba(doc);
  check_probability_vector(probs, f.num_labels());
  return {argmax(probs), true};
}

bool all_topk_present(const std::vector<std::string>& protected_features, const Explanation& e) {
  return std::all_of(protected_features.begin(), protected_features.end(),
                     [&](const std::string& token) { return e.rank_of(token) != 0; });
}

bool some_topk_demoted(const std::vector<std::string>& protected_features, const Explanation& base,
                       const Explanation& pert) {
  return std::any_of(protected_features.begin(), protected_features.end(), [&](const std::string& t) {
    const std::size_t after = pert.rank_of(t);
    const std::size_t effective = after == 0 ? pert.entries.size() + 1 : after;
    return effective > base.rank_of(t);
  });
}

// Lower is better for every guided strategy; the base explanation scores `initial`.
double objective(Strategy strategy, const Explanation& base, const Explanation& pert,
                 double rbo_p) {
  switch (strategy) {
    case Strategy::xaifooler:
      return rbo(base.entries, pert.entries, rbo_p);
    case Strategy::lom: {
      const auto cb = center_of_mass(base.entries);
      const auto cp = center_of_mass(pert.entries);
      if (!cb || !cp || base.entries.empty()) return 0.0;
      return -std::abs(*cp - *cb) / static_cast<double>(base.entries.size());
    }
    case Strategy::lp:
      return -lp_distance(base.entries, pert.entries, 2.0);
    default:
      return 0.0;
  }
}

double initial_objective(Strategy strategy) { return strategy == Strategy::xaifooler ? 1.0 : 0.0; }

void finalize(const AttackContext& ctx, const AttackConfig& config, AttackResult& result) {
  result.similarity = rbo(result.base_expl.entries, result.pert_expl.entries, config.rbo_p);
  if (!result.base_expl.entries.empty()) {
    result.metrics = metrics_abs_rc_ins(result.base_expl.entries, result.pert_expl.entries, config.k);
  }
  result.semantic_similarity = semantic_similarity(ctx.embeddings, result.base_doc, result.pert_doc);

  const auto protected_features = top_k(result.base_expl, config.k);
  auto& audit = result.audit;
  audit.prediction_preserved = predict_label(ctx.model, result.pert_doc).label == result.base_expl.label;
  audit.semantic_ok = result.semantic_similarity >= config.delta;
  audit.budget_ok = result.substitutions.size() <= result.budget;
  audit.topk_present = all_topk_present(protected_features, result.pert_expl);
  audit.topk_demoted = some_topk_demoted(protected_features, result.base_expl, result.pert_expl);
}

void revert(AttackResult& result) {
  result.pert_doc = result.base_doc;
  result.pert_expl = result.base_expl;
  result.substitutions.clear();
  result.objective_trace.clear();
}

AttackResult search(const AttackContext& ctx, const Document& doc, const AttackConfig& config,
                    Strategy strategy, const Explanation* base) {
  validate(config);
  AttackResult result;
  result.strategy = strategy;
  result.base_doc = doc;
  if (base != nullptr) {
    result.base_expl = *base;
  } else {
    result.base_expl = explain(ctx.model, doc, config.sampling, ctx.stopwords);
    ++result.explanations_computed;
  }
  result.pert_doc = doc;
  result.pert_expl = result.base_expl;
  result.budget = perturbation_budget(unique_features(doc, ctx.stopwords).size(), config.epsilon,
                                      config.min_budget);
  result.audit.demotion_required = config.require_topk_demotion;

  const std::size_t label = result.base_expl.label;
  const auto protected_features = top_k(result.base_expl, config.k);
  Rng rng(derive_seed(config.seed, stable_hash(doc.id), 0x5eed));

  std::vector<std::size_t> positions;
  if (strategy == Strategy::random) {
    positions = order_words(ctx.model, doc, result.base_expl, config.k, ctx.stopwords).positions;
    std::sort(positions.begin(), positions.end());
    rng.shuffle(std::span<std::size_t>(positions));
  } else {
    positions = order_words(ctx.model, doc, result.base_expl, config.k, ctx.stopwords,
                            config.ascending_order)
                    .positions;
  }
  if (result.base_expl.entries.empty() || positions.empty()) {
    finalize(ctx, config, result);
    return result;
  }

  std::vector<std::string> tokens = doc.tokens;
  double best = initial_objective(strategy);
  bool hit_budget = false;

  for (const std::size_t pos : positions) {
    if (result.substitutions.size() >= result.budget) {
      hit_budget = true;
      break;
    }
    const std::string original = tokens[pos];
    auto candidates =
        nearest_neighbors(ctx.embeddings, original, config.max_candidates, config.min_cosine).candidates;
    if (ctx.pos != nullptr) {
      std::erase_if(candidates, [&](const Neighbor& n) { return !ctx.pos->compatible(original, n.token); });
    }
    if (candidates.empty()) continue;
    if (strategy == Strategy::random) {
      const auto pick = static_cast<std::size_t>(rng.below(candidates.size()));
      candidates = {candidates[pick]};
    }

    std::optional<std::pair<double, std::size_t>> chosen;  // (objective, candidate index)
    Explanation chosen_expl;
    Document chosen_doc;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      auto trial_tokens = tokens;
      trial_tokens[pos] = candidates[c].token;
      Document trial = Document::from_tokens(doc.id, std::move(trial_tokens));
      if (predict_label(ctx.model, trial).label != label) continue;
      if (semantic_similarity(ctx.embeddings, doc, trial) < config.delta) continue;
      Explanation trial_expl = explain(ctx.model, trial, config.sampling, ctx.stopwords);
      ++result.explanations_computed;
      if (!all_topk_present(protected_features, trial_expl)) continue;
      const double value = objective(strategy, result.base_expl, trial_expl, config.rbo_p);
      if (!chosen || value < chosen->first) {
        chosen = std::make_pair(value, c);
        chosen_expl = std::move(trial_expl);
        chosen_doc = std::move(trial);
      }
    }
    if (!chosen) continue;
    const bool accept = strategy == Strategy::random || chosen->first < best;
    if (!accept) continue;

    if (strategy != Strategy::random) best = chosen->first;
    result.substitutions.push_back({pos, original, candidates[chosen->second].token});
    result.objective_trace.push_back(chosen->first);
    tokens[pos] = candidates[chosen->second].token;
    result.pert_doc = std::move(chosen_doc);
    result.pert_expl = std::move(chosen_expl);
  }
  if (result.substitutions.size() >= result.budget) hit_budget = true;

  if (result.substitutions.empty()) {
    result.status = AttackStatus::no_improvement;
  } else if (config.require_topk_demotion &&
             !some_topk_demoted(protected_features, result.base_expl, result.pert_expl)) {
    result.status = hit_budget ? AttackStatus::budget_exhausted : AttackStatus::no_improvement;
    revert(result);
  } else {
    result.status = AttackStatus::succeeded;
  }
  finalize(ctx, config, result);
  return result;
}

AttackResult inherency_run(const AttackContext& ctx, const Document& doc,
                           const AttackConfig& config, const Explanation* base) {
  validate(config);
  AttackResult result;
  result.strategy = Strategy::inherency;
  result.base_doc = doc;
  result.pert_doc = doc;
  if (base != nullptr) {
    result.base_expl = *base;
  } else {
    result.base_expl = explain(ctx.model, doc, config.sampling, ctx.stopwords);
    ++result.explanations_computed;
  }
  SamplingConfig rerun = config.sampling;
  rerun.seed = derive_seed(result.base_expl.seed, 1);
  result.pert_expl = explain(ctx.model, doc, rerun, ctx.stopwords);
  ++result.explanations_computed;
  result.budget = perturbation_budget(unique_features(doc, ctx.stopwords).size(), config.epsilon,
                                      config.min_budget);
  result.status = AttackStatus::succeeded;
  result.audit.demotion_required = false;
  finalize(ctx, config, result);
  return result;
}

}  // namespace

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::xaifooler:
      return "xaifooler";
    case Strategy::random:
      return "random";
    case Strategy::lom:
      return "lom";
    case Strategy::lp:
      return "lp";
    case Strategy::inherency:
      return "inherency";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (const auto s : {Strategy::xaifooler, Strategy::random, Strategy::lom, Strategy::lp,
                       Strategy::inherency}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "' (expected xaifooler, random, lom, lp or inherency)");
}

std::string_view to_string(AttackStatus status) {
  switch (status) {
    case AttackStatus::succeeded:
      return "succeeded";
    case AttackStatus::no_improvement:
      return "no_improvement";
    case AttackStatus::budget_exhausted:
      return "budget_exhausted";
  }
  return "unknown";
}

AttackConfig attack_preset(std::string_view name) {
  AttackConfig c;
  if (name == "default") return c;
  if (name == "budget20") {
    c.epsilon = 0.2;
    c.min_budget = 1;
    return c;
  }
  if (name == "long") {
    c.k = 5;
    c.rbo_p = 0.75;
    c.sampling.n = 4500;
    return c;
  }
  if (name == "medium") {
    c.k = 3;
    c.rbo_p = 0.49;
    c.sampling.n = 2500;
    return c;
  }
  if (name == "short") {
    c.k = 2;
    c.rbo_p = 0.32;
    c.sampling.n = 1500;
    return c;
  }
  throw ConfigError("unknown attack preset '" + std::string(name) + "'");
}

void validate(const AttackConfig& config) {
  if (config.k == 0) throw ParameterError("k must be >= 1");
  if (!(config.delta > 0.0 && config.delta <= 1.0)) throw ParameterError("delta must lie in (0, 1]");
  if (!(config.epsilon > 0.0 && config.epsilon <= 1.0)) {
    throw ParameterError("epsilon must lie in (0, 1]");
  }
  if (!(config.rbo_p > 0.0 && config.rbo_p < 1.0)) throw ParameterError("rbo_p must lie in (0, 1)");
  if (config.max_candidates == 0) throw ParameterError("max_candidates must be >= 1");
  if (!(config.min_cosine >= -1.0 && config.min_cosine <= 1.0)) {
    throw ParameterError("min_cosine must lie in [-1, 1]");
  }
  validate(config.sampling);
}

std::size_t perturbation_budget(std::size_t unique_features, double epsilon,
                                std::size_t min_budget) {
  const double raw = std::max(epsilon * static_cast<double>(unique_features),
                              static_cast<double>(min_budget));
  // Guard against 0.1 * 30 = 3.0000000000000004 style round-up.
  return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

SearchOrder order_words(const Classifier& f, const Document& doc, const Explanation& base,
                        std::size_t k, const StopwordSet& stopwords, bool ascending) {
  const auto protected_list = top_k(base, k);
  const std::unordered_set<std::string> protected_set(protected_list.begin(), protected_list.end());
  const auto base_probs = f.predict_proba(doc);
  check_probability_vector(base_probs, f.num_labels());
  const std::size_t label = argmax(base_probs);

  std::vector<std::string> eligible;
  for (const auto& token : unique_features(doc, stopwords)) {
    if (protected_set.count(token) == 0) eligible.push_back(token);
  }
  std::unordered_map<std::string, double> word_score;
  for (const auto& word : eligible) {
    std::vector<std::string> kept;
    for (const auto& token : doc.tokens) {
      if (token != word) kept.push_back(token);
    }
    const auto probs = f.predict_proba(Document::from_tokens(doc.id, std::move(kept)));
    check_probability_vector(probs, f.num_labels());
    word_score.emplace(word, std::abs(base_probs[label] - probs[label]));
  }

  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    if (word_score.count(doc.tokens[i]) > 0) positions.push_back(i);
  }
  std::stable_sort(positions.begin(), positions.end(), [&](std::size_t a, std::size_t b) {
    const double sa = word_score.at(doc.tokens[a]);
    const double sb = word_score.at(doc.tokens[b]);
    return ascending ? sa < sb : sa > sb;
  });
  SearchOrder order;
  order.positions = std::move(positions);
  for (const auto pos : order.positions) order.scores.push_back(word_score.at(doc.tokens[pos]));
  return order;
}

AttackResult xaifooler_attack(const AttackContext& ctx, const Document& doc,
                              const AttackConfig& config, const Explanation* base) {
  return search(ctx, doc, config, Strategy::xaifooler, base);
}

AttackResult baseline_attack(const AttackContext& ctx, const Document& doc,
                             const AttackConfig& config, Strategy strategy,
                             const Explanation* base) {
  if (strategy == Strategy::inherency) return inherency_run(ctx, doc, config, base);
  return search(ctx, doc, config, strategy, base);
}

AttackResult run_strategy(const AttackContext& ctx, const Document& doc,
                          const AttackConfig& config, Strategy strategy, const Explanation* base) {
  return strategy == Strategy::xaifooler ? xaifooler_attack(ctx, doc, config, base)
                                         : baseline_attack(ctx, doc, config, strategy, base);
}

std::vector<InherencyRow> inherency_probe(const Classifier& f, const Document& doc,
                                          const SamplingConfig& sampling,
                                          const std::vector<std::uint64_t>& seeds, std::size_t k,
                                          double rbo_p, const StopwordSet& stopwords) {
  if (seeds.size() < 2) throw ParameterError("inherency probe needs at least 2 trials");
  std::vector<Explanation> runs;
  for (const auto seed : seeds) {
    SamplingConfig config = sampling;
    config.seed = seed;
    runs.push_back(explain(f, doc, config, stopwords));
  }
  std::vector<InherencyRow> rows;
  for (std::size_t t = 0; t < runs.size(); ++t) {
    InherencyRow row;
    row.seed = seeds[t];
    row.rbo = rbo(runs.front().entries, runs[t].entries, rbo_p);
    if (!runs.front().entries.empty()) row.metrics = metrics_abs_rc_ins(runs.front().entries, runs[t].entries, k);
    rows.push_back(row);
  }
  return rows;
}

std::vector<InherencyRow> inherency_probe(const Classifier& f, const Document& doc,
                                          const SamplingConfig& sampling, std::size_t trials,
                                          std::size_t k, double rbo_p,
                                          const StopwordSet& stopwords) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t t = 0; t < trials; ++t) seeds.push_back(t == 0 ? sampling.seed : derive_seed(sampling.seed, t));
  return inherency_probe(f, doc, sampling, seeds, k, rbo_p, stopwords);
}

nlohmann::json to_json(const Document& doc) {
  return {{"id", doc.id}, {"raw", doc.raw}, {"tokens", doc.tokens}};
}

nlohmann::json to_json(const AttackResult& r) {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& s : r.substitutions) {
    subs.push_back({{"position", s.position}, {"old", s.old_token}, {"new", s.new_token}});
  }
  return {
      {"strategy", to_string(r.strategy)},
      {"status", to_string(r.status)},
      {"base_doc", to_json(r.base_doc)},
      {"pert_doc", to_json(r.pert_doc)},
      {"base_explanation", to_json(r.base_expl)},
      {"pert_explanation", to_json(r.pert_expl)},
      {"substitutions", std::move(subs)},
      {"budget", r.budget},
      {"metrics",
       {{"rbo", r.similarity},
        {"abs", r.metrics.abs},
        {"rc", r.metrics.rc},
        {"ins", r.metrics.ins},
        {"sim", r.semantic_similarity}}},
      {"objective_trace", r.objective_trace},
      {"audit",
       {{"prediction_preserved", r.audit.prediction_preserved},
        {"semantic_ok", r.audit.semantic_ok},
        {"budget_ok", r.audit.budget_ok},
        {"topk_present", r.audit.topk_present},
        {"topk_demoted", r.audit.topk_demoted},
        {"demotion_required", r.audit.demotion_required}}},
      {"explanations_computed", r.explanations_computed},
  };
}

}  // namespace xaif
