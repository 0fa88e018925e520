#include "xaif/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "xaif/errors.hpp"
#include "xaif/simd/kernels.hpp"

namespace xaif {
namespace {

void softmax_in_place(std::vector<double>& v) {
  const double top = *std::max_element(v.begin(), v.end());
  double total = 0.0;
  for (auto& x : v) {
    x = std::exp(x - top);
    total += x;
  }
  for (auto& x : v) x /= total;
}

}  // namespace

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

void check_probability_vector(std::span<const double> probs, std::size_t num_labels) {
  if (probs.size() != num_labels) {
    throw InterfaceError("classifier returned " + std::to_string(probs.size()) +
                         " probabilities, expected " + std::to_string(num_labels));
  }
  double total = 0.0;
  for (const double p : probs) {
    if (!std::isfinite(p) || p < -1e-12) {
      throw InterfaceError("classifier returned an invalid probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw InterfaceError("classifier probabilities sum to " + std::to_string(total) +
                         ", not 1");
  }
}

BowLogisticModel::BowLogisticModel(std::vector<std::string> vocabulary,
                                   std::vector<std::string> label_names,
                                   std::vector<double> weights_by_label, std::vector<double> bias,
                                   double l2_penalty)
    : vocabulary_(std::move(vocabulary)),
      label_names_(std::move(label_names)),
      bias_(std::move(bias)),
      l2_penalty_(l2_penalty) {
  const std::size_t labels = bias_.size();
  const std::size_t vocab = vocabulary_.size();
  if (labels < 2) throw FormatError("model needs at least 2 labels");
  if (label_names_.size() != labels) throw FormatError("label table does not match bias length");
  if (weights_by_label.size() != labels * vocab) {
    throw FormatError("weight matrix is not " + std::to_string(labels) + " x " +
                      std::to_string(vocab));
  }
  for (std::size_t j = 0; j < vocab; ++j) {
    if (!index_.emplace(vocabulary_[j], j).second) {
      throw FormatError("duplicate vocabulary token '" + vocabulary_[j] + "'");
    }
  }
  weights_.resize(labels * vocab);
  for (std::size_t c = 0; c < labels; ++c) {
    for (std::size_t j = 0; j < vocab; ++j) {
      const double w = weights_by_label[c * vocab + j];
      if (!std::isfinite(w)) throw FormatError("non-finite weight");
      weights_[j * labels + c] = w;
    }
  }
}

std::ptrdiff_t BowLogisticModel::feature_index(const std::string& token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::vector<double> BowLogisticModel::weights_by_label() const {
  const std::size_t labels = num_labels();
  std::vector<double> out(weights_.size());
  for (std::size_t j = 0; j < vocab_size(); ++j) {
    for (std::size_t c = 0; c < labels; ++c) out[c * vocab_size() + j] = weights_[j * labels + c];
  }
  return out;
}

std::vector<std::size_t> BowLogisticModel::present_features(const Document& doc) const {
  std::vector<std::size_t> features;
  features.reserve(doc.tokens.size());
  for (const auto& token : doc.tokens) {
    const auto it = index_.find(token);
    if (it != index_.end()) features.push_back(it->second);
  }
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  return features;
}

std::vector<double> BowLogisticModel::scores(std::span<const std::size_t> features) const {
  const std::size_t labels = num_labels();
  std::vector<double> out = bias_;
  const auto& kernels = simd::active();
  for (const auto j : features) kernels.axpy(1.0, weights_.data() + j * labels, out.data(), labels);
  return out;
}

std::vector<double> BowLogisticModel::predict_proba(const Document& doc) const {
  auto out = scores(present_features(doc));
  softmax_in_place(out);
  return out;
}

BowLogisticModel train_bow_logistic(const LabeledDataset& dataset, const TrainOptions& options,
                                    std::vector<double>* loss_trace) {
  if (dataset.num_labels() < 2) {
    throw DataError("training needs at least 2 labels, dataset has " +
                    std::to_string(dataset.num_labels()));
  }
  if (!(options.l2_penalty >= 0.0) || !std::isfinite(options.l2_penalty)) {
    throw ParameterError("l2_penalty must be a finite non-negative number");
  }
  if (dataset.train.empty()) throw DataError("training split is empty");

  std::map<std::string, std::size_t> vocab_map;
  for (const auto i : dataset.train) {
    for (const auto& token : dataset.items.at(i).doc.tokens) vocab_map.emplace(token, 0);
  }
  BowLogisticModel model;
  model.label_names_ = dataset.label_names;
  model.l2_penalty_ = options.l2_penalty;
  for (auto& [token, index] : vocab_map) {
    index = model.vocabulary_.size();
    model.vocabulary_.push_back(token);
    model.index_.emplace(token, index);
  }
  const std::size_t labels = dataset.num_labels();
  const std::size_t vocab = model.vocabulary_.size();
  model.weights_.assign(vocab * labels, 0.0);
  model.bias_.assign(labels, 0.0);

  std::vector<std::vector<std::size_t>> rows;
  std::vector<std::size_t> targets;
  double mean_active = 0.0;
  for (const auto i : dataset.train) {
    rows.push_back(model.present_features(dataset.items.at(i).doc));
    targets.push_back(dataset.items.at(i).label);
    mean_active += static_cast<double>(rows.back().size() + 1);
  }
  const double n = static_cast<double>(rows.size());
  mean_active /= n;
  // Softmax cross-entropy has Hessian <= 0.5 * mean(x x^T) (x) I, whose norm is
  // bounded by 0.5 * mean |x|^2 for presence features plus the bias.
  const double step = 1.0 / (0.5 * mean_active + options.l2_penalty);

  const auto& kernels = simd::active();
  std::vector<double> grad_w(vocab * labels);
  std::vector<double> grad_b(labels);
  double previous_loss = std::numeric_limits<double>::infinity();

  auto evaluate = [&](bool with_gradient) {
    if (with_gradient) {
      std::fill(grad_w.begin(), grad_w.end(), 0.0);
      std::fill(grad_b.begin(), grad_b.end(), 0.0);
    }
    double loss = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      auto p = model.scores(rows[r]);
      softmax_in_place(p);
      loss -= std::log(std::max(p[targets[r]], 1e-300));
      if (!with_gradient) continue;
      p[targets[r]] -= 1.0;
      kernels.axpy(1.0 / n, p.data(), grad_b.data(), labels);
      for (const auto j : rows[r]) kernels.axpy(1.0 / n, p.data(), grad_w.data() + j * labels, labels);
    }
    loss /= n;
    const double sq = kernels.dot(model.weights_.data(), model.weights_.data(), model.weights_.size());
    return loss + 0.5 * options.l2_penalty * sq;
  };

  auto record = [&](double loss, std::size_t epoch) {
    if (!std::isfinite(loss) || loss > previous_loss + 1e-12 * std::max(1.0, std::abs(previous_loss))) {
      throw TrainingError("training loss increased at epoch " + std::to_string(epoch) + " (" +
                          std::to_string(previous_loss) + " -> " + std::to_string(loss) + ")");
    }
    previous_loss = loss;
    if (loss_trace != nullptr) loss_trace->push_back(loss);
  };

  for (std::size_t epoch = 0; epoch < options.max_epochs; ++epoch) {
    record(evaluate(true), epoch);
    kernels.axpy(options.l2_penalty, model.weights_.data(), grad_w.data(), grad_w.size());
    kernels.axpy(-step, grad_w.data(), model.weights_.data(), grad_w.size());
    kernels.axpy(-step, grad_b.data(), model.bias_.data(), labels);
  }
  record(evaluate(false), options.max_epochs);
  return model;
}

double accuracy(const Classifier& model, const LabeledDataset& dataset,
                std::span<const std::size_t> indices) {
  if (indices.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto i : indices) {
    const auto& item = dataset.items.at(i);
    if (argmax(model.predict_proba(item.doc)) == item.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

void save_model(const BowLogisticModel& model, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "xaif-bow-logistic";
  j["version"] = kModelFormatVersion;
  j["labels"] = model.label_names();
  j["vocabulary"] = model.vocabulary();
  j["l2_penalty"] = model.l2_penalty();
  j["bias"] = model.bias();
  const auto flat = model.weights_by_label();
  auto rows = nlohmann::json::array();
  for (std::size_t c = 0; c < model.num_labels(); ++c) {
    rows.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(c * model.vocab_size()),
                                       flat.begin() + static_cast<std::ptrdiff_t>((c + 1) * model.vocab_size())));
  }
  j["weights"] = std::move(rows);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model file '" + path.string() + "'");
  out << j.dump() << '\n';
  if (!out) throw DataError("failed writing model file '" + path.string() + "'");
}

BowLogisticModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path.string() + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("malformed model file '" + path.string() + "' at byte offset " +
                      std::to_string(e.byte) + ": " + e.what());
  }
  try {
    if (!j.is_object()) throw FormatError("model file root is not an object");
    if (j.value("format", std::string{}) != "xaif-bow-logistic") {
      throw FormatError("model file '" + path.string() + "' is not a bow-logistic model");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw FormatError("model file version " + std::to_string(version) +
                        " is not supported (expected version " +
                        std::to_string(kModelFormatVersion) + ")");
    }
    auto labels = j.at("labels").get<std::vector<std::string>>();
    auto vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    auto bias = j.at("bias").get<std::vector<double>>();
    const auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
    if (rows.size() != bias.size()) throw FormatError("weight rows do not match label count");
    std::vector<double> flat;
    flat.reserve(rows.size() * vocabulary.size());
    for (const auto& row : rows) {
      if (row.size() != vocabulary.size()) throw FormatError("weight row length != vocabulary size");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return BowLogisticModel(std::move(vocabulary), std::move(labels), std::move(flat),
                            std::move(bias), j.at("l2_penalty").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("model file '" + path.string() + "' has an invalid field: " + e.what());
  }
}

}  // namespace xaif
