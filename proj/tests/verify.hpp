#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "xaif/attack.hpp"

namespace xaif::testing {

struct Verdict {
  bool prediction = false;
  bool semantic = false;
  bool budget = false;
  bool presence = false;
  bool demotion = false;
  bool protected_ok = false;
  bool edits_consistent = false;
  bool explanation_reproduced = false;
  std::string detail;

  bool all() const {
    return prediction && semantic && budget && presence && demotion && protected_ok &&
           edits_consistent && explanation_reproduced;
  }
};

// Recomputes every constraint from scratch: fresh classifier calls, a fresh
// semantic similarity, a fresh explanation of the perturbed document and a
// budget derived from the document itself.
inline Verdict verify_result(const AttackContext& ctx, const AttackConfig& config, const AttackResult& r) {
  Verdict v;
  const auto& base = r.base_doc;
  const auto& pert = r.pert_doc;

  v.prediction = argmax(ctx.model.predict_proba(base)) == argmax(ctx.model.predict_proba(pert));
  v.semantic = semantic_similarity(ctx.embeddings, base, pert) >= config.delta;

  std::set<std::string> features;
  for (const auto& t : base.tokens) {
    if (!ctx.stopwords.contains(t)) features.insert(t);
  }
  const double raw = std::max(config.epsilon * static_cast<double>(features.size()),
                              static_cast<double>(config.min_budget));
  const auto allowed = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  v.budget = r.substitutions.size() <= allowed;

  const auto fresh = explain(ctx.model, pert, config.sampling, ctx.stopwords);
  v.explanation_reproduced = fresh == r.pert_expl;

  std::vector<std::string> topk;
  for (std::size_t i = 0; i < std::min(config.k, r.base_expl.entries.size()); ++i) {
    topk.push_back(r.base_expl.entries[i].token);
  }
  v.presence = std::all_of(topk.begin(), topk.end(), [&](const std::string& t) { return fresh.rank_of(t) > 0; });
  v.demotion = !config.require_topk_demotion ||
               std::any_of(topk.begin(), topk.end(), [&](const std::string& t) {
                 const auto after = fresh.rank_of(t);
                 return after > r.base_expl.rank_of(t);
               });

  v.protected_ok = true;
  std::set<std::size_t> positions;
  for (const auto& s : r.substitutions) {
    if (s.position >= base.tokens.size()) {
      v.protected_ok = false;
      continue;
    }
    const auto& original = base.tokens[s.position];
    if (ctx.stopwords.contains(original) || std::find(topk.begin(), topk.end(), original) != topk.end()) {
      v.protected_ok = false;
      v.detail += "protected position " + std::to_string(s.position) + " (" + original + "); ";
    }
    positions.insert(s.position);
  }

  v.edits_consistent = base.tokens.size() == pert.tokens.size() && positions.size() == r.substitutions.size();
  if (v.edits_consistent) {
    for (std::size_t i = 0; i < base.tokens.size(); ++i) {
      const bool edited = positions.count(i) > 0;
      if (edited == (base.tokens[i] == pert.tokens[i])) v.edits_consistent = false;
    }
    for (const auto& s : r.substitutions) {
      if (base.tokens[s.position] != s.old_token || pert.tokens[s.position] != s.new_token) {
        v.edits_consistent = false;
      }
    }
  }
  if (!v.prediction) v.detail += "prediction changed; ";
  if (!v.semantic) v.detail += "semantic similarity below delta; ";
  if (!v.budget) v.detail += "budget exceeded; ";
  if (!v.presence) v.detail += "top-k feature missing; ";
  if (!v.demotion) v.detail += "no top-k demotion; ";
  if (!v.edits_consistent) v.detail += "edit log does not match documents; ";
  if (!v.explanation_reproduced) v.detail += "perturbed explanation not reproducible; ";
  return v;
}

}  // namespace xaif::testing
