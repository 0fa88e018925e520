#pragma once

// Similarity measures over ranked feature lists and the explanation-shift
// metrics built on them. Everything here is a pure function.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace xaif {

struct FeatureWeight {
  std::string token;
  double weight = 0.0;

  bool operator==(const FeatureWeight&) const = default;
};

// Rank order is list order.
using RankedList = std::vector<FeatureWeight>;

std::vector<std::string> feature_ids(const RankedList& list);

// Extrapolated rank-biased overlap on feature identity (Webber, Moffat and
// Zobel's RBO_ext for uneven lists). Identical lists score exactly 1 and
// lists without a common feature exactly 0. Throws ParameterError unless 0 < p < 1.
double rbo(std::span<const std::string> a, std::span<const std::string> b, double p);
double rbo(const RankedList& a, const RankedList& b, double p);

// Share of total RBO weight carried by ranks 1..k:
//   1 - p^(k-1) + (1-p)/p * k * (ln(1/(1-p)) - sum_{i<k} p^i / i)
double rbo_prefix_mass(double p, std::size_t k);

// Bisection for the p whose top-k mass equals `target_mass` (within 1e-9).
// Throws ParameterError for k == 0 or a target outside (0, 1), RangeError
// when the target is not bracketed by the attainable masses.
double solve_p_for_mass(std::size_t k, double target_mass);

// |topk(a) n topk(b)| / |topk(a) u topk(b)|; 1 when both prefixes are empty.
double jaccard(const RankedList& a, const RankedList& b, std::size_t k);

// Computed over the features both lists share; nullopt with fewer than two.
std::optional<double> kendall_tau(const RankedList& a, const RankedList& b);
std::optional<double> spearman_rho(const RankedList& a, const RankedList& b);

// L_p norm of the weight difference over the union of features; a feature
// missing from one list has weight 0 there. p_norm may be +infinity.
double lp_distance(const RankedList& a, const RankedList& b, double p_norm);

// sum_i i * |w_i| / sum_i |w_i| with 1-based positions; nullopt when every weight is 0.
std::optional<double> center_of_mass(std::span<const double> weights);
std::optional<double> center_of_mass(const RankedList& list);

struct RankMetrics {
  double abs = 0.0;  // summed rank displacement of the base top-k
  double rc = 0.0;   // 1 - max(0, Spearman over the shared top-k)
  double ins = 1.0;  // fraction of the base top-k still in the perturbed top-k
};

// A base feature missing from `pert` is placed at rank |pert| + 1. With fewer
// than two shared top-k features the correlation counts as 0, except that
// identical top-k prefixes always correlate perfectly. INS divides by
// min(k, |base|). Throws ParameterError for k == 0 or an empty base.
RankMetrics metrics_abs_rc_ins(const RankedList& base, const RankedList& pert, std::size_t k);

}  // namespace xaif
