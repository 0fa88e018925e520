#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "xaif/attack.hpp"
#include "xaif/corpus.hpp"
#include "xaif/explainer.hpp"
#include "xaif/model.hpp"

namespace xaif {

struct SweepPreset {
  std::size_t base_n = 0;
  std::vector<std::size_t> rates;
};

// Longer documents get larger sampling rates.
SweepPreset sweep_preset(double mean_tokens);
double mean_length(std::span<const Document> docs);

struct StabilityRow {
  std::string doc_id;
  std::size_t n = 0;
  double rbo = 1.0;
  double abs = 0.0;
  double ins = 1.0;
};

struct StabilityAggregate {
  std::size_t n = 0;
  std::size_t docs = 0;
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double mean_abs = 0.0;
  double mean_ins = 0.0;
};

struct StabilitySweepReport {
  std::size_t base_n = 0;
  std::vector<std::size_t> rates;
  std::vector<StabilityRow> rows;  // doc-major, rates in the given order
  std::vector<StabilityAggregate> aggregates;  // one per rate
  std::vector<std::string> skipped;  // documents without any feature
};

struct SweepOptions {
  std::size_t base_n = 2000;
  std::vector<std::size_t> rates = {250, 500, 1000, 2000};
  std::size_t k = 3;  // for ABS / INS
  double rbo_p = 0.49;
  SamplingConfig sampling;  // kernel width and surrogate penalty; n and seed are overridden
  std::uint64_t seed = 0;
};

// Per-(doc, rate) seed is derive_seed(derive_seed(seed, stable_hash(doc id)), n),
// so the base-rate row compares an explanation with itself.
StabilitySweepReport stability_sweep(const Classifier& f, std::span<const Document> docs,
                                     const SweepOptions& options,
                                     const StopwordSet& stopwords = StopwordSet::builtin_english());

void write_stability_csv(const StabilitySweepReport& report, std::ostream& out);
void write_stability_summary_csv(const StabilitySweepReport& report, std::ostream& out);
nlohmann::json to_json(const StabilitySweepReport& report);

// Add-one smoothed unigram model; perplexity stands in for a language-model score.
class UnigramLm {
 public:
  UnigramLm() = default;
  explicit UnigramLm(std::span<const Document> corpus);
  double log_prob(const std::string& token) const;
  // Throws ParameterError for an empty document.
  double perplexity(const Document& doc) const;

 private:
  std::unordered_map<std::string, std::size_t> counts_;
  std::size_t total_ = 0;
};

struct CampaignRow {
  std::string doc_id;
  Strategy strategy = Strategy::xaifooler;
  std::string status;  // attack status, or "error: <message>"
  RankMetrics metrics;
  double rbo = 1.0;
  double sim = 1.0;
  std::optional<double> ppl_proxy;
  std::size_t substitutions = 0;
  std::size_t budget = 0;
  double seconds = 0.0;
  bool failed = false;  // row holds an error, metrics are meaningless
};

struct StrategyAggregate {
  Strategy strategy = Strategy::xaifooler;
  std::size_t docs = 0;       // rows without error
  std::size_t succeeded = 0;
  std::size_t errors = 0;
  double abs = 0.0;
  double rc = 0.0;
  double ins = 0.0;
  double sim = 0.0;
  double rbo = 0.0;
  std::optional<double> ppl_proxy;
};

struct CampaignOptions {
  AttackConfig attack;
  std::vector<Strategy> strategies = {Strategy::inherency, Strategy::random, Strategy::lom,
                                      Strategy::lp, Strategy::xaifooler};
  std::uint64_t seed = 0;
  const UnigramLm* ppl = nullptr;  // set to fill the ppl_proxy column
  bool record_timings = false;     // otherwise seconds stays blank so reports are reproducible
  nlohmann::json config_snapshot = nlohmann::json::object();
};

struct CampaignReport {
  std::vector<CampaignRow> rows;  // doc-major, strategies in the given order
  std::vector<StrategyAggregate> aggregates;
  std::vector<AttackResult> results;  // parallel to rows; empty result for error rows
  nlohmann::json config_snapshot;
  bool has_ppl = false;
  bool has_timings = false;
};

// Every strategy attacks the same base explanation of each document; the base
// sampling seed is derive_seed(seed, stable_hash(doc id)).
CampaignReport run_campaign(const AttackContext& ctx, std::span<const Document> docs,
                            const CampaignOptions& options);

std::vector<StrategyAggregate> aggregate_rows(std::span<const CampaignRow> rows,
                                              std::span<const Strategy> strategies);

void write_campaign_csv(const CampaignReport& report, std::ostream& out);
void write_campaign_summary_csv(const CampaignReport& report, std::ostream& out);
nlohmann::json to_json(const CampaignReport& report);

// Fixed-precision rendering used by every CSV report.
std::string format_number(double value);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace xaif
