#include "xaif/ranksim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "xaif/errors.hpp"

namespace xaif {
namespace {

void check_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("RBO parameter p must lie in (0, 1)");
}

std::unordered_map<std::string_view, std::size_t> positions(const RankedList& list,
                                                            std::size_t limit) {
  std::unordered_map<std::string_view, std::size_t> pos;
  for (std::size_t i = 0; i < std::min(limit, list.size()); ++i) pos.emplace(list[i].token, i + 1);
  return pos;
}

// Shared features in a's order, with b's ranks relabelled 1..m among them.
std::vector<std::size_t> shared_relative_ranks(const RankedList& a, const RankedList& b) {
  const auto pos_b = positions(b, b.size());
  std::vector<std::pair<std::size_t, std::size_t>> shared;  // (rank in b, index in a-order)
  for (const auto& item : a) {
    const auto it = pos_b.find(item.token);
    if (it != pos_b.end()) shared.emplace_back(it->second, shared.size());
  }
  std::vector<std::pair<std::size_t, std::size_t>> by_b = shared;
  std::sort(by_b.begin(), by_b.end());
  std::vector<std::size_t> relative(shared.size());
  for (std::size_t r = 0; r < by_b.size(); ++r) relative[by_b[r].second] = r + 1;
  return relative;
}

std::optional<double> spearman_of(const std::vector<std::size_t>& rank_b) {
  const std::size_t m = rank_b.size();
  if (m < 2) return std::nullopt;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = static_cast<double>(i + 1) - static_cast<double>(rank_b[i]);
    sum_sq += d * d;
  }
  const double md = static_cast<double>(m);
  return 1.0 - 6.0 * sum_sq / (md * (md * md - 1.0));
}

RankedList prefix(const RankedList& list, std::size_t k) {
  return RankedList(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(std::min(k, list.size())));
}

}  // namespace

std::vector<std::string> feature_ids(const RankedList& list) {
  std::vector<std::string> out;
  out.reserve(list.size());
  for (const auto& item : list) out.push_back(item.token);
  return out;
}

double rbo(std::span<const std::string> a, std::span<const std::string> b, double p) {
  check_p(p);
  if (std::equal(a.begin(), a.end(), b.begin(), b.end())) return 1.0;
  if (a.empty() || b.empty()) return 0.0;

  const auto& shorter = a.size() <= b.size() ? a : b;
  const auto& longer = a.size() <= b.size() ? b : a;
  const std::size_t s = shorter.size();
  const std::size_t l = longer.size();

  std::unordered_set<std::string_view> seen_short;
  std::unordered_set<std::string_view> seen_long;
  double overlap = 0.0;        // X_d
  double overlap_at_s = 0.0;   // X_s
  double sum = 0.0;
  double weight = 1.0;         // p^d
  for (std::size_t d = 1; d <= l; ++d) {
    weight *= p;
    if (d <= s) {
      const std::string_view x = shorter[d - 1];
      seen_short.insert(x);
      if (seen_long.count(x) > 0) overlap += 1.0;
    }
    const std::string_view y = longer[d - 1];
    seen_long.insert(y);
    if (seen_short.count(y) > 0) overlap += 1.0;
    if (d == s) overlap_at_s = overlap;

    const double dd = static_cast<double>(d);
    sum += overlap / dd * weight;
    if (d > s) {
      const double sd = static_cast<double>(s);
      sum += overlap_at_s * (dd - sd) / (sd * dd) * weight;
    }
  }
  const double tail = ((overlap - overlap_at_s) / static_cast<double>(l) +
                       overlap_at_s / static_cast<double>(s)) * weight;
  const double value = (1.0 - p) / p * sum + tail;
  return std::clamp(value, 0.0, 1.0);
}

double rbo(const RankedList& a, const RankedList& b, double p) {
  const auto fa = feature_ids(a);
  const auto fb = feature_ids(b);
  return rbo(fa, fb, p);
}

double rbo_prefix_mass(double p, std::size_t k) {
  check_p(p);
  if (k == 0) throw ParameterError("prefix mass needs k >= 1");
  // tail = ln(1/(1-p)) - sum_{i<k} p^i/i = sum_{i>=k} p^i/i. The direct series
  // avoids cancellation for small p; the closed form is used when it converges slowly.
  double tail = 0.0;
  if (p <= 0.5) {
    double term_power = std::pow(p, static_cast<double>(k));
    for (std::size_t i = k; i < k + 4000; ++i) {
      const double term = term_power / static_cast<double>(i);
      tail += term;
      if (term < 1e-20 * tail) break;
      term_power *= p;
    }
  } else {
    tail = -std::log1p(-p);
    double power = 1.0;
    for (std::size_t i = 1; i < k; ++i) {
      power *= p;
      tail -= power / static_cast<double>(i);
    }
  }
  const double kd = static_cast<double>(k);
  const double mass = 1.0 - std::pow(p, kd - 1.0) + (1.0 - p) / p * kd * tail;
  return std::clamp(mass, 0.0, 1.0);
}

double solve_p_for_mass(std::size_t k, double target_mass) {
  if (k == 0) throw ParameterError("solve_p_for_mass needs k >= 1");
  if (!(target_mass > 0.0 && target_mass < 1.0)) {
    throw ParameterError("target mass must lie in (0, 1)");
  }
  double lo = 1e-12;
  double hi = 1.0 - 1e-12;
  // Mass decreases in p.
  if (rbo_prefix_mass(lo, k) < target_mass || rbo_prefix_mass(hi, k) > target_mass) {
    throw RangeError("top-" + std::to_string(k) + " mass " + std::to_string(target_mass) +
                     " is not attainable for any p in (0, 1)");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double mass = rbo_prefix_mass(mid, k);
    if (std::abs(mass - target_mass) <= 1e-12) return mid;
    if (mass > target_mass) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double jaccard(const RankedList& a, const RankedList& b, std::size_t k) {
  if (k == 0) throw ParameterError("jaccard needs k >= 1");
  const auto pa = positions(a, k);
  const auto pb = positions(b, k);
  if (pa.empty() && pb.empty()) return 1.0;
  std::size_t shared = 0;
  for (const auto& [token, rank] : pa) shared += pb.count(token);
  return static_cast<double>(shared) / static_cast<double>(pa.size() + pb.size() - shared);
}

std::optional<double> kendall_tau(const RankedList& a, const RankedList& b) {
  const auto rank_b = shared_relative_ranks(a, b);
  const std::size_t m = rank_b.size();
  if (m < 2) return std::nullopt;
  long long concordant = 0;
  long long discordant = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (rank_b[i] < rank_b[j]) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double pairs = static_cast<double>(m) * static_cast<double>(m - 1) / 2.0;
  return static_cast<double>(concordant - discordant) / pairs;
}

std::optional<double> spearman_rho(const RankedList& a, const RankedList& b) {
  return spearman_of(shared_relative_ranks(a, b));
}

double lp_distance(const RankedList& a, const RankedList& b, double p_norm) {
  if (!(p_norm >= 1.0)) throw ParameterError("L_p distance needs p >= 1");
  std::unordered_map<std::string_view, double> diff;
  for (const auto& item : a) diff[item.token] += item.weight;
  for (const auto& item : b) diff[item.token] -= item.weight;
  // Accumulate in a fixed order so the result does not depend on hashing.
  std::vector<double> magnitudes;
  magnitudes.reserve(diff.size());
  for (const auto& item : a) magnitudes.push_back(std::abs(diff[item.token]));
  const auto pa = positions(a, a.size());
  for (const auto& item : b) {
    if (pa.count(item.token) == 0) magnitudes.push_back(std::abs(diff[item.token]));
  }
  if (std::isinf(p_norm)) {
    return magnitudes.empty() ? 0.0 : *std::max_element(magnitudes.begin(), magnitudes.end());
  }
  double total = 0.0;
  for (const double m : magnitudes) total += p_norm == 1.0 ? m : std::pow(m, p_norm);
  if (p_norm == 1.0) return total;
  if (p_norm == 2.0) return std::sqrt(total);
  return std::pow(total, 1.0 / p_norm);
}

std::optional<double> center_of_mass(std::span<const double> weights) {
  double mass = 0.0;
  double moment = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = std::abs(weights[i]);
    mass += w;
    moment += static_cast<double>(i + 1) * w;
  }
  if (mass == 0.0) return std::nullopt;
  return moment / mass;
}

std::optional<double> center_of_mass(const RankedList& list) {
  std::vector<double> weights;
  weights.reserve(list.size());
  for (const auto& item : list) weights.push_back(item.weight);
  return center_of_mass(weights);
}

RankMetrics metrics_abs_rc_ins(const RankedList& base, const RankedList& pert, std::size_t k) {
  if (k == 0) throw ParameterError("metrics need k >= 1");
  if (base.empty()) throw ParameterError("metrics need a non-empty base explanation");

  const RankedList base_top = prefix(base, k);
  const RankedList pert_top = prefix(pert, k);
  const auto pert_rank = positions(pert, pert.size());

  RankMetrics m;
  m.abs = 0.0;
  for (std::size_t i = 0; i < base_top.size(); ++i) {
    const auto it = pert_rank.find(base_top[i].token);
    const std::size_t r = it == pert_rank.end() ? pert.size() + 1 : it->second;
    m.abs += std::abs(static_cast<double>(i + 1) - static_cast<double>(r));
  }

  const bool same_prefix = feature_ids(base_top) == feature_ids(pert_top);
  const double correlation =
      same_prefix ? 1.0 : spearman_of(shared_relative_ranks(base_top, pert_top)).value_or(0.0);
  m.rc = 1.0 - std::max(0.0, correlation);

  const auto pert_top_pos = positions(pert_top, pert_top.size());
  std::size_t kept = 0;
  for (const auto& item : base_top) kept += pert_top_pos.count(item.token);
  m.ins = static_cast<double>(kept) / static_cast<double>(base_top.size());
  return m;
}

}  // namespace xaif
