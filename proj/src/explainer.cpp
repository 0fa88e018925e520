#include "xaif/explainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <Eigen/Dense>

#include "xaif/errors.hpp"
#include "xaif/rng.hpp"
#include "xaif/simd/kernels.hpp"

namespace xaif {
namespace {

// Coefficients this small are rounding residue of a constant target.
constexpr double kCoefficientFloor = 1e-10;

double label_probability(const Classifier& f, const Document& doc, std::size_t label) {
  const auto probs = f.predict_proba(doc);
  check_probability_vector(probs, f.num_labels());
  return probs[label];
}

}  // namespace

std::vector<std::string> Explanation::features() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.token);
  return out;
}

std::size_t Explanation::rank_of(const std::string& token) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].token == token) return i + 1;
  }
  return 0;
}

void validate(const SamplingConfig& config) {
  if (!config.exhaustive && config.n < 2) throw ParameterError("sampling rate n must be >= 2");
  if (!(config.kernel_width > 0.0)) throw ParameterError("kernel_width must be > 0");
  if (!(config.surrogate_l2 > 0.0)) throw ParameterError("surrogate_l2 must be > 0");
}

Document apply_mask(const Document& doc, const std::vector<std::string>& features,
                    const std::vector<std::uint8_t>& mask) {
  std::unordered_set<std::string_view> removed;
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (mask[j] == 0) removed.insert(features[j]);
  }
  std::vector<std::string> kept;
  kept.reserve(doc.tokens.size());
  for (const auto& token : doc.tokens) {
    if (removed.count(token) == 0) kept.push_back(token);
  }
  return Document::from_tokens(doc.id, std::move(kept));
}

std::vector<PerturbationSample> sample_perturbations(const Document& doc,
                                                     const StopwordSet& stopwords, std::size_t n,
                                                     std::uint64_t seed) {
  const auto features = unique_features(doc, stopwords);
  const std::size_t u = features.size();
  if (u < 2) throw ParameterError("sampling needs at least 2 unique features, document has " + std::to_string(u));
  if (n < 2) throw ParameterError("sampling rate n must be >= 2");

  Rng rng(seed);
  std::vector<PerturbationSample> samples;
  samples.reserve(n);
  samples.push_back({std::vector<std::uint8_t>(u, 1), doc});
  for (std::size_t i = 1; i < n; ++i) {
    const auto k = static_cast<std::size_t>(rng.between(1, u - 1));
    std::vector<std::uint8_t> mask(u, 1);
    for (const auto j : rng.sample_without_replacement(u, k)) mask[j] = 0;
    Document perturbed = apply_mask(doc, features, mask);
    samples.push_back({std::move(mask), std::move(perturbed)});
  }
  return samples;
}

std::vector<PerturbationSample> enumerate_perturbations(const Document& doc,
                                                        const StopwordSet& stopwords) {
  const auto features = unique_features(doc, stopwords);
  const std::size_t u = features.size();
  if (u < 1 || u > 20) throw ParameterError("exhaustive sampling needs 1 <= U <= 20, got " + std::to_string(u));
  const std::size_t total = std::size_t{1} << u;
  std::vector<PerturbationSample> samples;
  samples.reserve(total);
  for (std::size_t removed = 0; removed < total; ++removed) {
    std::vector<std::uint8_t> mask(u, 1);
    for (std::size_t j = 0; j < u; ++j) {
      if ((removed >> j) & 1U) mask[j] = 0;
    }
    Document perturbed = removed == 0 ? doc : apply_mask(doc, features, mask);
    samples.push_back({std::move(mask), std::move(perturbed)});
  }
  return samples;
}

double proximity_weight(const std::vector<std::uint8_t>& mask, double kernel_width) {
  const auto kept = static_cast<double>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
  // cos(mask, ones) = kept / sqrt(kept * U)
  const double similarity = kept == 0.0 ? 0.0 : std::sqrt(kept / static_cast<double>(mask.size()));
  const double distance = 1.0 - similarity;
  return std::exp(-(distance * distance) / (kernel_width * kernel_width));
}

std::vector<double> fit_weighted_ridge(const std::vector<std::vector<std::uint8_t>>& masks,
                                       const std::vector<double>& targets,
                                       const std::vector<double>& sample_weights, double l2) {
  if (masks.empty() || masks.size() != targets.size() || masks.size() != sample_weights.size()) {
    throw ParameterError("ridge fit needs equally sized, non-empty masks/targets/weights");
  }
  if (!(l2 > 0.0)) throw ParameterError("ridge penalty must be > 0");
  const std::size_t d = masks.front().size();

  double total_weight = 0.0;
  double y_mean = 0.0;
  std::vector<double> x_mean(d, 0.0);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const double w = sample_weights[i];
    total_weight += w;
    y_mean += w * targets[i];
    for (std::size_t j = 0; j < d; ++j) x_mean[j] += w * masks[i][j];
  }
  y_mean /= total_weight;
  for (auto& m : x_mean) m /= total_weight;

  const auto& kernels = simd::active();
  std::vector<double> gram(d * d, 0.0);
  std::vector<double> rhs(d, 0.0);
  std::vector<double> centered(d);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) centered[j] = masks[i][j] - x_mean[j];
    kernels.rank1_update_upper(sample_weights[i], centered.data(), gram.data(), d);
    kernels.axpy(sample_weights[i] * (targets[i] - y_mean), centered.data(), rhs.data(), d);
  }

  Eigen::MatrixXd a(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = r; c < d; ++c) {
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = gram[r * d + c];
      a(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = gram[r * d + c];
    }
    a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) += l2;
  }
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(d));
  const Eigen::VectorXd beta = a.ldlt().solve(b);
  std::vector<double> out(beta.data(), beta.data() + d);
  for (auto& c : out) {
    if (std::abs(c) <= kCoefficientFloor) c = 0.0;
  }
  return out;
}

std::vector<FeatureWeight> rank_features(const std::vector<std::string>& features,
                                         const std::vector<double>& coefficients) {
  std::vector<FeatureWeight> entries;
  entries.reserve(features.size());
  for (std::size_t j = 0; j < features.size(); ++j) entries.push_back({features[j], coefficients[j]});
  std::sort(entries.begin(), entries.end(), [](const FeatureWeight& a, const FeatureWeight& b) {
    const double ma = std::abs(a.weight);
    const double mb = std::abs(b.weight);
    return ma != mb ? ma > mb : a.token < b.token;
  });
  return entries;
}

Explanation explain(const Classifier& f, const Document& doc, const SamplingConfig& config,
                    const StopwordSet& stopwords) {
  validate(config);
  const auto base_probs = f.predict_proba(doc);
  check_probability_vector(base_probs, f.num_labels());

  Explanation out;
  out.label = argmax(base_probs);
  out.seed = config.seed;
  out.n = config.n;

  const auto features = unique_features(doc, stopwords);
  if (features.empty()) return out;
  if (features.size() == 1) {
    const Document without = apply_mask(doc, features, {0});
    const double delta = base_probs[out.label] - label_probability(f, without, out.label);
    out.entries.push_back({features.front(), std::abs(delta) <= kCoefficientFloor ? 0.0 : delta});
    return out;
  }

  auto samples = config.exhaustive ? enumerate_perturbations(doc, stopwords)
                                   : sample_perturbations(doc, stopwords, config.n, config.seed);
  if (config.exhaustive) out.n = samples.size();

  std::vector<std::vector<std::uint8_t>> masks;
  std::vector<double> targets;
  std::vector<double> weights;
  masks.reserve(samples.size());
  targets.reserve(samples.size());
  weights.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    // sample 0 is the unperturbed document
    targets.push_back(i == 0 ? base_probs[out.label]
                             : label_probability(f, samples[i].doc, out.label));
    weights.push_back(proximity_weight(samples[i].mask, config.kernel_width));
    masks.push_back(std::move(samples[i].mask));
  }
  const auto coefficients = fit_weighted_ridge(masks, targets, weights, config.surrogate_l2);
  out.entries = rank_features(features, coefficients);
  return out;
}

std::vector<std::string> top_k(const Explanation& explanation, std::size_t k) {
  if (k == 0) throw ParameterError("top_k needs k >= 1");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, explanation.entries.size()); ++i) {
    out.push_back(explanation.entries[i].token);
  }
  return out;
}

nlohmann::json to_json(const Explanation& explanation) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& e : explanation.entries) features.push_back({{"token", e.token}, {"weight", e.weight}});
  return {{"label", explanation.label},
          {"n", explanation.n},
          {"seed", explanation.seed},
          {"features", std::move(features)}};
}

Explanation explanation_from_json(const nlohmann::json& j) {
  try {
    Explanation e;
    e.label = j.at("label").get<std::size_t>();
    e.n = j.at("n").get<std::size_t>();
    e.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& f : j.at("features")) {
      e.entries.push_back({f.at("token").get<std::string>(), f.at("weight").get<double>()});
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("invalid explanation JSON: ") + ex.what());
  }
}

}  // namespace xaif
