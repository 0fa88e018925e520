#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "xaif/corpus.hpp"

namespace xaif {

// Black-box victim: the only surface the explainer and the attacks may use.
// Implementations must be deterministic and safe to call concurrently.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::size_t num_labels() const = 0;
  virtual std::vector<double> predict_proba(const Document& doc) const = 0;
};

std::size_t argmax(std::span<const double> values);

// Throws InterfaceError unless `probs` has `num_labels` finite entries summing to 1 within 1e-6.
void check_probability_vector(std::span<const double> probs, std::size_t num_labels);

struct TrainOptions {
  double l2_penalty = 1e-3;
  std::size_t max_epochs = 400;
  std::uint64_t seed = 0;
};

// Multinomial logistic regression over binary bag-of-words presence features.
class BowLogisticModel final : public Classifier {
 public:
  BowLogisticModel() = default;
  BowLogisticModel(std::vector<std::string> vocabulary, std::vector<std::string> label_names,
                   std::vector<double> weights_by_label, std::vector<double> bias,
                   double l2_penalty);

  std::size_t num_labels() const override { return bias_.size(); }
  std::vector<double> predict_proba(const Document& doc) const override;

  std::size_t vocab_size() const { return vocabulary_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const std::vector<std::string>& label_names() const { return label_names_; }
  const std::vector<double>& bias() const { return bias_; }
  double l2_penalty() const { return l2_penalty_; }
  // -1 when the token is out of vocabulary.
  std::ptrdiff_t feature_index(const std::string& token) const;
  // Coefficient for (label, feature).
  double weight(std::size_t label, std::size_t feature) const {
    return weights_[feature * num_labels() + label];
  }
  // Row-major num_labels x vocab_size copy.
  std::vector<double> weights_by_label() const;

  // Distinct in-vocabulary feature indices of a document, ascending.
  std::vector<std::size_t> present_features(const Document& doc) const;
  std::vector<double> scores(std::span<const std::size_t> features) const;

 private:
  friend BowLogisticModel train_bow_logistic(const LabeledDataset&, const TrainOptions&,
                                             std::vector<double>*);

  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> label_names_;
  std::vector<double> weights_;  // vocab_size x num_labels, feature-major
  std::vector<double> bias_;
  double l2_penalty_ = 0.0;
};

// Full-batch gradient descent from zero weights on the training split. The
// step size is the inverse of an upper bound on the loss curvature, so the
// penalised loss never increases; a measured increase throws TrainingError.
// `loss_trace`, if given, receives the loss before each epoch and after the last.
BowLogisticModel train_bow_logistic(const LabeledDataset& dataset, const TrainOptions& options,
                                    std::vector<double>* loss_trace = nullptr);

double accuracy(const Classifier& model, const LabeledDataset& dataset,
                std::span<const std::size_t> indices);

inline constexpr int kModelFormatVersion = 1;

void save_model(const BowLogisticModel& model, const std::filesystem::path& path);
// Throws FormatError (truncation, bad JSON with byte offset, version mismatch, shape errors)
// or DataError when the file cannot be opened.
BowLogisticModel load_model(const std::filesystem::path& path);

}  // namespace xaif
