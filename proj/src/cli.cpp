#include "xaif/cli.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xaif/attack.hpp"
#include "xaif/corpus.hpp"
#include "xaif/embed.hpp"
#include "xaif/errors.hpp"
#include "xaif/explainer.hpp"
#include "xaif/harness.hpp"
#include "xaif/model.hpp"
#include "xaif/settings.hpp"
#include "xaif/synth.hpp"

namespace xaif {
namespace {

namespace fs = std::filesystem;

struct Args {
  std::uint64_t seed = 0;
  std::string config_path;
  std::string output = "xaif_out";

  std::string data;
  std::string model;
  std::string embeddings;
  std::string pos;
  std::string text;
  std::string rates;
  std::string strategies;
  std::string strategy = "xaifooler";
  std::size_t n = 0;
  std::size_t base_n = 0;
  std::size_t docs = 0;
  std::size_t labels = 3;
  bool exhaustive = false;
  bool ppl_proxy = false;
  bool timings = false;
};

struct Runtime {
  Settings settings;
  fs::path output;
};

StopwordSet stopwords_for(const Settings& s) {
  return s.stopwords_path.empty() ? StopwordSet::builtin_english() : StopwordSet::load(s.stopwords_path);
}

LabeledDataset dataset_for(const Settings& s, const std::string& path) {
  if (path.empty()) throw ConfigError("--data is required");
  return load_csv(path, s.text_column, s.label_column, s.seed);
}

BowLogisticModel model_for(const std::string& path) {
  if (path.empty()) throw ConfigError("--model is required");
  return load_model(path);
}

EmbeddingStore embeddings_for(const Settings& s) {
  if (s.embeddings_path.empty()) throw ConfigError("an embeddings file is required (--embeddings)");
  return EmbeddingStore::load(s.embeddings_path);
}

std::optional<PosLexicon> pos_for(const Settings& s) {
  if (s.pos_lexicon_path.empty()) return std::nullopt;
  return PosLexicon::load(s.pos_lexicon_path);
}

std::vector<Document> evaluation_docs(const LabeledDataset& ds, std::size_t limit) {
  auto docs = ds.documents(ds.test);
  if (limit > 0 && docs.size() > limit) docs.resize(limit);
  if (docs.empty()) throw DataError("the test split is empty");
  return docs;
}

std::string stream_text(const auto& writer, const auto& report) {
  std::ostringstream s;
  writer(report, s);
  return s.str();
}

int cmd_synth(const Runtime& rt, const Args& a, std::ostream& out) {
  SynthOptions o;
  o.seed = rt.settings.seed;
  if (a.docs > 0) o.num_docs = a.docs;
  o.num_labels = a.labels;
  const auto corpus = make_synthetic_corpus(o);
  fs::create_directories(rt.output);
  write_dataset_csv(corpus.rows, rt.output / "dataset.csv");
  corpus.embeddings.save(rt.output / "embeddings.txt");
  corpus.pos.save(rt.output / "pos.tsv");
  out << "wrote " << corpus.rows.size() << " documents, " << corpus.embeddings.size()
      << " embeddings to " << rt.output.string() << "\n";
  return 0;
}

int cmd_train(const Runtime& rt, const Args& a, std::ostream& out) {
  const auto& s = rt.settings;
  const auto ds = dataset_for(s, a.data);
  TrainOptions opts = s.train;
  opts.seed = s.seed;
  const auto model = train_bow_logistic(ds, opts);
  const fs::path path = a.model.empty() ? rt.output / "model.json" : fs::path(a.model);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_model(model, path);
  out << "train accuracy " << format_number(accuracy(model, ds, ds.train)) << "\n"
      << "test accuracy " << format_number(accuracy(model, ds, ds.test)) << "\n"
      << "model written to " << path.string() << "\n";
  return 0;
}

int cmd_explain(const Runtime& rt, const Args& a, std::ostream& out) {
  const auto& s = rt.settings;
  const auto model = model_for(a.model);
  if (a.text.empty()) throw ConfigError("--text is required");
  SamplingConfig sampling = s.attack.sampling;
  sampling.seed = s.seed;
  const auto doc = Document::from_text("input", a.text);
  const auto e = explain(model, doc, sampling, stopwords_for(s));
  auto j = to_json(e);
  j["label_name"] = model.label_names().at(e.label);
  const auto text = j.dump(2) + "\n";
  write_text_file(rt.output / "explanation.json", text);
  out << text;
  return 0;
}

int cmd_stability(const Runtime& rt, const Args& a, std::ostream& out) {
  const auto& s = rt.settings;
  const auto model = model_for(a.model);
  const auto ds = dataset_for(s, a.data);
  const auto docs = evaluation_docs(ds, s.sweep_docs);

  SweepOptions opts;
  const auto preset = sweep_preset(mean_length(docs));
  opts.rates = s.sweep_rates.empty() ? preset.rates : s.sweep_rates;
  opts.base_n = s.sweep_base_n > 0 ? s.sweep_base_n
                : s.sweep_rates.empty() ? preset.base_n
                                        : *std::max_element(opts.rates.begin(), opts.rates.end());
  opts.k = s.attack.k;
  opts.rbo_p = s.attack.rbo_p;
  opts.sampling = s.attack.sampling;
  opts.seed = s.seed;

  const auto report = stability_sweep(model, docs, opts, stopwords_for(s));
  write_text_file(rt.output / "stability.csv", stream_text(write_stability_csv, report));
  const auto summary = stream_text(write_stability_summary_csv, report);
  write_text_file(rt.output / "stability_summary.csv", summary);
  auto j = to_json(report);
  j["config"] = s.to_json();
  write_text_file(rt.output / "stability.json", j.dump(2) + "\n");
  out << summary;
  return 0;
}

CampaignReport campaign(const Runtime& rt, const Args& a, const std::vector<Strategy>& strategies,
                        bool ppl) {
  const auto& s = rt.settings;
  const auto model = model_for(a.model);
  const auto ds = dataset_for(s, a.data);
  const auto embeddings = embeddings_for(s);
  const auto pos = pos_for(s);
  const auto stopwords = stopwords_for(s);
  const auto docs = evaluation_docs(ds, s.campaign_docs);

  std::optional<UnigramLm> lm;
  if (ppl) lm.emplace(ds.documents(ds.train));

  CampaignOptions opts;
  opts.attack = s.attack;
  opts.strategies = strategies;
  opts.seed = s.seed;
  opts.ppl = lm ? &*lm : nullptr;
  opts.record_timings = s.record_timings;
  opts.config_snapshot = s.to_json();
  AttackContext ctx{model, embeddings, stopwords, pos ? &*pos : nullptr};
  return run_campaign(ctx, docs, opts);
}

int cmd_attack(const Runtime& rt, const Args& a, std::ostream& out) {
  const auto& s = rt.settings;
  const auto strategy = parse_strategy(a.strategy);
  if (!a.text.empty()) {
    const auto model = model_for(a.model);
    const auto embeddings = embeddings_for(s);
    const auto pos = pos_for(s);
    const auto stopwords = stopwords_for(s);
    AttackConfig config = s.attack;
    config.sampling.seed = s.seed;
    config.seed = s.seed;
    AttackContext ctx{model, embeddings, stopwords, pos ? &*pos : nullptr};
    const auto result = run_strategy(ctx, Document::from_text("input", a.text), config, strategy);
    const auto text = to_json(result).dump(2) + "\n";
    write_text_file(rt.output / "attack.json", text);
    out << text;
    return 0;
  }
  const auto report = campaign(rt, a, {strategy}, s.ppl_proxy);
  write_text_file(rt.output / "attack.csv", stream_text(write_campaign_csv, report));
  write_text_file(rt.output / "attack.json", to_json(report).dump(2) + "\n");
  out << stream_text(write_campaign_summary_csv, report);
  return 0;
}

int cmd_eval(const Runtime& rt, const Args& a, std::ostream& out) {
  const auto& s = rt.settings;
  const auto report = campaign(rt, a, s.strategies, s.ppl_proxy);
  write_text_file(rt.output / "campaign.csv", stream_text(write_campaign_csv, report));
  const auto summary = stream_text(write_campaign_summary_csv, report);
  write_text_file(rt.output / "campaign_summary.csv", summary);
  write_text_file(rt.output / "campaign.json", to_json(report).dump(2) + "\n");
  out << summary;
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explanation stability measurement and attack toolkit", "xaif"};
  app.require_subcommand(1);
  app.fallthrough();
  Args a;
  auto* seed_opt = app.add_option("--seed", a.seed, "Global random seed");
  app.add_option("--config", a.config_path, "Config file (JSON object or key=value lines)");
  app.add_option("--output", a.output, "Output directory")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset, embeddings and POS lexicon");
  synth->add_option("--docs", a.docs, "Number of documents");
  synth->add_option("--labels", a.labels, "Number of labels")->capture_default_str();

  auto* train = app.add_subcommand("train", "Train the bag-of-words victim on a CSV dataset");
  train->add_option("--data", a.data, "CSV dataset")->required();
  train->add_option("--model", a.model, "Model file to write (default <output>/model.json)");

  auto* expl = app.add_subcommand("explain", "Explain one prediction");
  expl->add_option("--model", a.model, "Model file")->required();
  expl->add_option("--text", a.text, "Input text")->required();
  auto* n_opt = expl->add_option("--n", a.n, "Sampling rate");
  auto* exh_flag = expl->add_flag("--exhaustive", a.exhaustive, "Enumerate every perturbation mask");

  auto* stab = app.add_subcommand("stability", "Sampling-rate stability sweep");
  stab->add_option("--model", a.model, "Model file")->required();
  stab->add_option("--data", a.data, "CSV dataset")->required();
  auto* rates_opt = stab->add_option("--rates", a.rates, "Comma-separated sampling rates");
  auto* base_opt = stab->add_option("--base-n", a.base_n, "Base sampling rate");
  auto* sweep_docs_opt = stab->add_option("--docs", a.docs, "Number of test documents");

  auto* atk = app.add_subcommand("attack", "Attack a single text or the test split of a dataset");
  atk->add_option("--model", a.model, "Model file")->required();
  auto* atk_data = atk->add_option("--data", a.data, "CSV dataset");
  auto* atk_text = atk->add_option("--text", a.text, "Input text");
  atk_data->excludes(atk_text);
  auto* atk_emb = atk->add_option("--embeddings", a.embeddings, "Word-vector file");
  auto* atk_pos = atk->add_option("--pos", a.pos, "POS lexicon (token<TAB>tag)");
  atk->add_option("--strategy", a.strategy, "xaifooler, random, lom, lp or inherency")->capture_default_str();
  auto* atk_docs = atk->add_option("--docs", a.docs, "Number of test documents");
  auto* atk_ppl = atk->add_flag("--ppl-proxy", a.ppl_proxy, "Report a unigram perplexity proxy");

  auto* ev = app.add_subcommand("eval", "Run every strategy over the test split");
  ev->add_option("--model", a.model, "Model file")->required();
  ev->add_option("--data", a.data, "CSV dataset")->required();
  auto* ev_emb = ev->add_option("--embeddings", a.embeddings, "Word-vector file");
  auto* ev_pos = ev->add_option("--pos", a.pos, "POS lexicon (token<TAB>tag)");
  auto* ev_strat = ev->add_option("--strategies", a.strategies, "Comma-separated strategies");
  auto* ev_docs = ev->add_option("--docs", a.docs, "Number of test documents");
  auto* ev_ppl = ev->add_flag("--ppl-proxy", a.ppl_proxy, "Report a unigram perplexity proxy");
  auto* ev_time = ev->add_flag("--timings", a.timings, "Fill the seconds column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    Runtime rt;
    auto& s = rt.settings;
    if (!a.config_path.empty()) s.load_file(a.config_path);
    if (seed_opt->count() > 0) s.seed = a.seed;
    rt.output = a.output;

    if (n_opt->count() > 0) s.attack.sampling.n = a.n;
    if (exh_flag->count() > 0) s.attack.sampling.exhaustive = true;
    if (rates_opt->count() > 0) s.sweep_rates = parse_size_list(a.rates);
    if (base_opt->count() > 0) s.sweep_base_n = a.base_n;
    if (sweep_docs_opt->count() > 0) s.sweep_docs = a.docs;
    if (atk_docs->count() > 0 || ev_docs->count() > 0) s.campaign_docs = a.docs;
    if (atk_emb->count() > 0 || ev_emb->count() > 0) s.embeddings_path = a.embeddings;
    if (atk_pos->count() > 0 || ev_pos->count() > 0) s.pos_lexicon_path = a.pos;
    if (ev_strat->count() > 0) s.strategies = parse_strategy_list(a.strategies);
    if (atk_ppl->count() > 0 || ev_ppl->count() > 0) s.ppl_proxy = true;
    if (ev_time->count() > 0) s.record_timings = true;

    if (synth->parsed()) return cmd_synth(rt, a, out);
    if (train->parsed()) return cmd_train(rt, a, out);
    if (expl->parsed()) return cmd_explain(rt, a, out);
    if (stab->parsed()) return cmd_stability(rt, a, out);
    if (atk->parsed()) {
      if (a.data.empty() && a.text.empty()) throw ConfigError("attack needs --data or --text");
      return cmd_attack(rt, a, out);
    }
    if (ev->parsed()) return cmd_eval(rt, a, out);
    err << app.help();
    return 1;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace xaif
