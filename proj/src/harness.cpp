#include "xaif/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>

#include "xaif/csv.hpp"
#include "xaif/errors.hpp"
#include "xaif/rng.hpp"

namespace xaif {
namespace {

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::uint64_t document_seed(std::uint64_t seed, const Document& doc) {
  return derive_seed(seed, stable_hash(doc.id));
}

nlohmann::json metrics_json(const RankMetrics& m) {
  return {{"abs", m.abs}, {"rc", m.rc}, {"ins", m.ins}};
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6f", value);
  std::string out = buffer;
  if (out == "-0.000000") out.erase(0, 1);
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

SweepPreset sweep_preset(double mean_tokens) {
  if (mean_tokens < 40.0) return {2000, {250, 500, 1000, 2000}};
  if (mean_tokens < 150.0) return {3000, {500, 1000, 2000, 3000}};
  return {5000, {1000, 2000, 3500, 5000}};
}

double mean_length(std::span<const Document> docs) {
  if (docs.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& d : docs) total += d.tokens.size();
  return static_cast<double>(total) / static_cast<double>(docs.size());
}

StabilitySweepReport stability_sweep(const Classifier& f, std::span<const Document> docs,
                                     const SweepOptions& options, const StopwordSet& stopwords) {
  if (docs.empty()) throw ParameterError("stability sweep needs at least one document");
  if (options.rates.empty()) throw ParameterError("stability sweep needs at least one rate");

  StabilitySweepReport report;
  report.base_n = options.base_n;
  report.rates = options.rates;

  for (const auto& doc : docs) {
    const std::uint64_t doc_seed = document_seed(options.seed, doc);
    SamplingConfig sampling = options.sampling;
    sampling.exhaustive = false;
    sampling.n = options.base_n;
    sampling.seed = derive_seed(doc_seed, options.base_n);
    const Explanation base = explain(f, doc, sampling, stopwords);
    if (base.entries.empty()) {
      report.skipped.push_back(doc.id);
      continue;
    }
    for (const auto n : options.rates) {
      sampling.n = n;
      sampling.seed = derive_seed(doc_seed, n);
      const Explanation e = n == options.base_n ? base : explain(f, doc, sampling, stopwords);
      const auto m = metrics_abs_rc_ins(base.entries, e.entries, options.k);
      report.rows.push_back({doc.id, n, rbo(base.entries, e.entries, options.rbo_p), m.abs, m.ins});
    }
  }

  for (const auto n : options.rates) {
    StabilityAggregate agg;
    agg.n = n;
    std::vector<double> sims;
    std::vector<double> abs_values;
    std::vector<double> ins_values;
    for (const auto& row : report.rows) {
      if (row.n != n) continue;
      sims.push_back(row.rbo);
      abs_values.push_back(row.abs);
      ins_values.push_back(row.ins);
    }
    agg.docs = sims.size();
    agg.mean = mean_of(sims);
    agg.min = sims.empty() ? 0.0 : *std::min_element(sims.begin(), sims.end());
    agg.median = median_of(sims);
    agg.mean_abs = mean_of(abs_values);
    agg.mean_ins = mean_of(ins_values);
    report.aggregates.push_back(agg);
  }
  return report;
}

void write_stability_csv(const StabilitySweepReport& report, std::ostream& out) {
  csv::write_row(out, {"doc_id", "n", "rbo", "abs", "ins"});
  for (const auto& r : report.rows) {
    csv::write_row(out, {r.doc_id, std::to_string(r.n), format_number(r.rbo), format_number(r.abs),
                         format_number(r.ins)});
  }
}

void write_stability_summary_csv(const StabilitySweepReport& report, std::ostream& out) {
  csv::write_row(out, {"n", "docs", "mean", "median", "min", "mean_abs", "mean_ins"});
  for (const auto& a : report.aggregates) {
    csv::write_row(out, {std::to_string(a.n), std::to_string(a.docs), format_number(a.mean),
                         format_number(a.median), format_number(a.min), format_number(a.mean_abs),
                         format_number(a.mean_ins)});
  }
}

nlohmann::json to_json(const StabilitySweepReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"doc_id", r.doc_id}, {"n", r.n}, {"rbo", r.rbo}, {"abs", r.abs}, {"ins", r.ins}});
  }
  nlohmann::json aggregates = nlohmann::json::array();
  for (const auto& a : report.aggregates) {
    aggregates.push_back({{"n", a.n},
                          {"docs", a.docs},
                          {"mean", a.mean},
                          {"median", a.median},
                          {"min", a.min},
                          {"mean_abs", a.mean_abs},
                          {"mean_ins", a.mean_ins}});
  }
  return {{"base_n", report.base_n},
          {"rates", report.rates},
          {"rows", std::move(rows)},
          {"aggregates", std::move(aggregates)},
          {"skipped", report.skipped}};
}

UnigramLm::UnigramLm(std::span<const Document> corpus) {
  for (const auto& doc : corpus) {
    for (const auto& t : doc.tokens) ++counts_[t];
    total_ += doc.tokens.size();
  }
}

double UnigramLm::log_prob(const std::string& token) const {
  const auto it = counts_.find(token);
  const double count = it == counts_.end() ? 0.0 : static_cast<double>(it->second);
  // one extra slot for unseen tokens
  const double vocab = static_cast<double>(counts_.size()) + 1.0;
  return std::log((count + 1.0) / (static_cast<double>(total_) + vocab));
}

double UnigramLm::perplexity(const Document& doc) const {
  if (doc.tokens.empty()) throw ParameterError("perplexity of an empty document");
  double total = 0.0;
  for (const auto& t : doc.tokens) total += log_prob(t);
  return std::exp(-total / static_cast<double>(doc.tokens.size()));
}

CampaignReport run_campaign(const AttackContext& ctx, std::span<const Document> docs,
                            const CampaignOptions& options) {
  if (docs.empty()) throw ParameterError("campaign needs at least one document");
  if (options.strategies.empty()) throw ParameterError("campaign needs at least one strategy");
  validate(options.attack);

  using Clock = std::chrono::steady_clock;
  CampaignReport report;
  report.config_snapshot = options.config_snapshot;
  report.has_ppl = options.ppl != nullptr;
  report.has_timings = options.record_timings;

  for (const auto& doc : docs) {
    AttackConfig config = options.attack;
    config.sampling.seed = document_seed(options.seed, doc);
    config.seed = derive_seed(options.seed, stable_hash(doc.id), 1);

    const auto base_start = Clock::now();
    std::optional<Explanation> base;
    std::string base_error;
    try {
      base = explain(ctx.model, doc, config.sampling, ctx.stopwords);
      if (base->entries.empty()) {
        base.reset();
        base_error = "document has no explainable features";
      }
    } catch (const Error& e) {
      base_error = e.what();
    }
    const double base_seconds = std::chrono::duration<double>(Clock::now() - base_start).count();

    for (const auto strategy : options.strategies) {
      CampaignRow row;
      row.doc_id = doc.id;
      row.strategy = strategy;
      if (!base) {
        row.failed = true;
        row.status = "error: " + base_error;
        report.rows.push_back(std::move(row));
        report.results.emplace_back();
        continue;
      }
      const auto start = Clock::now();
      try {
        AttackResult result = run_strategy(ctx, doc, config, strategy, &*base);
        row.status = std::string(to_string(result.status));
        row.metrics = result.metrics;
        row.rbo = result.similarity;
        row.sim = result.semantic_similarity;
        row.substitutions = result.substitutions.size();
        row.budget = result.budget;
        if (options.ppl != nullptr && !result.pert_doc.tokens.empty()) {
          row.ppl_proxy = options.ppl->perplexity(result.pert_doc);
        }
        report.results.push_back(std::move(result));
      } catch (const Error& e) {
        row.failed = true;
        row.status = std::string("error: ") + e.what();
        report.results.emplace_back();
      }
      row.seconds = base_seconds + std::chrono::duration<double>(Clock::now() - start).count();
      report.rows.push_back(std::move(row));
    }
  }
  report.aggregates = aggregate_rows(report.rows, options.strategies);
  return report;
}

std::vector<StrategyAggregate> aggregate_rows(std::span<const CampaignRow> rows,
                                              std::span<const Strategy> strategies) {
  std::vector<StrategyAggregate> out;
  for (const auto strategy : strategies) {
    StrategyAggregate agg;
    agg.strategy = strategy;
    double ppl_total = 0.0;
    std::size_t ppl_count = 0;
    for (const auto& row : rows) {
      if (row.strategy != strategy) continue;
      if (row.failed) {
        ++agg.errors;
        continue;
      }
      ++agg.docs;
      if (row.status == to_string(AttackStatus::succeeded)) ++agg.succeeded;
      agg.abs += row.metrics.abs;
      agg.rc += row.metrics.rc;
      agg.ins += row.metrics.ins;
      agg.sim += row.sim;
      agg.rbo += row.rbo;
      if (row.ppl_proxy) {
        ppl_total += *row.ppl_proxy;
        ++ppl_count;
      }
    }
    if (agg.docs > 0) {
      const auto d = static_cast<double>(agg.docs);
      agg.abs /= d;
      agg.rc /= d;
      agg.ins /= d;
      agg.sim /= d;
      agg.rbo /= d;
    }
    if (ppl_count > 0) agg.ppl_proxy = ppl_total / static_cast<double>(ppl_count);
    out.push_back(agg);
  }
  return out;
}

void write_campaign_csv(const CampaignReport& report, std::ostream& out) {
  csv::write_row(out, {"doc_id", "strategy", "abs", "rc", "ins", "sim", "ppl_proxy", "status",
                       "substitutions", "seconds"});
  for (const auto& r : report.rows) {
    const bool blank = r.failed;
    csv::write_row(out, {r.doc_id, std::string(to_string(r.strategy)),
                         blank ? "" : format_number(r.metrics.abs),
                         blank ? "" : format_number(r.metrics.rc),
                         blank ? "" : format_number(r.metrics.ins),
                         blank ? "" : format_number(r.sim),
                         r.ppl_proxy ? format_number(*r.ppl_proxy) : "", r.status,
                         blank ? "" : std::to_string(r.substitutions),
                         report.has_timings ? format_number(r.seconds) : ""});
  }
}

void write_campaign_summary_csv(const CampaignReport& report, std::ostream& out) {
  csv::write_row(out, {"strategy", "docs", "succeeded", "errors", "abs", "rc", "ins", "sim", "rbo",
                       "ppl_proxy"});
  for (const auto& a : report.aggregates) {
    csv::write_row(out, {std::string(to_string(a.strategy)), std::to_string(a.docs),
                         std::to_string(a.succeeded), std::to_string(a.errors), format_number(a.abs),
                         format_number(a.rc), format_number(a.ins), format_number(a.sim),
                         format_number(a.rbo), a.ppl_proxy ? format_number(*a.ppl_proxy) : ""});
  }
}

nlohmann::json to_json(const CampaignReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    nlohmann::json row = {{"doc_id", r.doc_id},
                          {"strategy", to_string(r.strategy)},
                          {"status", r.status}};
    if (!r.failed) {
      row["metrics"] = metrics_json(r.metrics);
      row["rbo"] = r.rbo;
      row["sim"] = r.sim;
      row["budget"] = r.budget;
      row["substitutions"] = r.substitutions;
      if (r.ppl_proxy) row["ppl_proxy"] = *r.ppl_proxy;
      row["detail"] = to_json(report.results[i]);
    }
    if (report.has_timings) row["seconds"] = r.seconds;
    rows.push_back(std::move(row));
  }
  nlohmann::json aggregates = nlohmann::json::array();
  for (const auto& a : report.aggregates) {
    nlohmann::json agg = {{"strategy", to_string(a.strategy)},
                          {"docs", a.docs},
                          {"succeeded", a.succeeded},
                          {"errors", a.errors},
                          {"abs", a.abs},
                          {"rc", a.rc},
                          {"ins", a.ins},
                          {"sim", a.sim},
                          {"rbo", a.rbo}};
    if (a.ppl_proxy) agg["ppl_proxy"] = *a.ppl_proxy;
    aggregates.push_back(std::move(agg));
  }
  return {{"config", report.config_snapshot}, {"rows", std::move(rows)}, {"aggregates", std::move(aggregates)}};
}

}  // namespace xaif
