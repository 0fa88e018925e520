#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "xaif/corpus.hpp"
#include "xaif/model.hpp"
#include "xaif/rng.hpp"

namespace xaif::testing {

class ConstantClassifier final : public Classifier {
 public:
  explicit ConstantClassifier(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::size_t num_labels() const override { return probs_.size(); }
  std::vector<double> predict_proba(const Document&) const override { return probs_; }

 private:
  std::vector<double> probs_;
};

// Two-label victim: P(label 1) = sigmoid(bias + sum of present token logits).
class LinearClassifier final : public Classifier {
 public:
  LinearClassifier(std::map<std::string, double> logits, double bias = 0.0)
      : logits_(std::move(logits)), bias_(bias) {}
  std::size_t num_labels() const override { return 2; }
  std::vector<double> predict_proba(const Document& doc) const override {
    double z = bias_;
    std::vector<std::string> seen;
    for (const auto& t : doc.tokens) {
      if (std::find(seen.begin(), seen.end(), t) != seen.end()) continue;
      seen.push_back(t);
      const auto it = logits_.find(t);
      if (it != logits_.end()) z += it->second;
    }
    const double p1 = 1.0 / (1.0 + std::exp(-z));
    return {1.0 - p1, p1};
  }

 private:
  std::map<std::string, double> logits_;
  double bias_;
};

// Black box over an arbitrary function of the token list.
class FunctionClassifier final : public Classifier {
 public:
  FunctionClassifier(std::size_t labels, std::function<std::vector<double>(const Document&)> fn)
      : labels_(labels), fn_(std::move(fn)) {}
  std::size_t num_labels() const override { return labels_; }
  std::vector<double> predict_proba(const Document& doc) const override { return fn_(doc); }

 private:
  std::size_t labels_;
  std::function<std::vector<double>(const Document&)> fn_;
};

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("xaif_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace xaif::testing
