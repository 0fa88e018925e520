#include <doctest.h>

#include <cmath>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "support.hpp"
#include "xaif/errors.hpp"
#include "xaif/model.hpp"
#include "xaif/synth.hpp"

using namespace xaif;

namespace {

LabeledDataset good_bad() {
  std::vector<std::pair<std::string, std::string>> rows;
  for (int i = 0; i < 10; ++i) {
    rows.emplace_back("good", "pos");
    rows.emplace_back("bad", "neg");
  }
  return make_dataset(rows, 4);
}

LabeledDataset synthetic(std::uint64_t seed) {
  SynthOptions o;
  o.num_docs = 200;
  o.seed = seed;
  return make_dataset(make_synthetic_corpus(o).rows, seed);
}

std::vector<double> softmax(std::vector<double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (auto& v : z) total += (v = std::exp(v - m));
  for (auto& v : z) v /= total;
  return z;
}

}  // namespace

TEST_CASE("separable toy data is learned") {
  const auto ds = good_bad();
  std::vector<double> trace;
  const auto model = train_bow_logistic(ds, {}, &trace);
  CHECK(accuracy(model, ds, ds.test) == 1.0);
  CHECK(accuracy(model, ds, ds.train) == 1.0);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
  const auto pos = model.predict_proba(Document::from_text("x", "good"));
  CHECK(model.label_names()[argmax(pos)] == "pos");
}

TEST_CASE("training rejects degenerate inputs") {
  LabeledDataset one_label = good_bad();
  one_label.label_names = {"only"};
  for (auto& item : one_label.items) item.label = 0;
  CHECK_THROWS_AS(train_bow_logistic(one_label, {}), DataError);
  TrainOptions bad;
  bad.l2_penalty = -1.0;
  CHECK_THROWS_AS(train_bow_logistic(good_bad(), bad), ParameterError);
}

TEST_CASE("training is deterministic and the loss never rises") {
  const auto ds = synthetic(5);
  std::vector<double> trace;
  const auto a = train_bow_logistic(ds, {}, &trace);
  const auto b = train_bow_logistic(ds, {});
  CHECK(a.weights_by_label() == b.weights_by_label());
  CHECK(a.bias() == b.bias());
  REQUIRE(trace.size() > 2);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
  CHECK(accuracy(a, ds, ds.test) > 0.8);
}

TEST_CASE("predict_proba follows a hand-computed softmax") {
  // label 1 favours "good"
  const BowLogisticModel model({"bad", "good"}, {"neg", "pos"}, {1.5, -0.5, -1.0, 2.0}, {0.2, -0.1}, 0.0);
  const auto p = model.predict_proba(Document::from_text("d", "good good"));
  const auto expected = softmax({0.2 - 0.5, -0.1 + 2.0});
  CHECK(p[0] == doctest::Approx(expected[0]).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(expected[1]).epsilon(1e-12));
  CHECK(argmax(p) == 1);

  const auto oov = model.predict_proba(Document::from_text("d", "unknown words only"));
  const auto bias_only = softmax({0.2, -0.1});
  CHECK(oov[0] == doctest::Approx(bias_only[0]).epsilon(1e-12));
  CHECK(model.predict_proba(Document::from_text("d", "")) == oov);

  CHECK(model.predict_proba(Document::from_text("d", "bad good")) ==
        model.predict_proba(Document::from_text("d", "good bad bad")));
}

TEST_CASE("probabilities are normalised and argmax survives positive scaling") {
  const auto ds = synthetic(9);
  const auto model = train_bow_logistic(ds, {});
  auto w = model.weights_by_label();
  auto bias = model.bias();
  for (auto& v : w) v *= 3.5;
  for (auto& v : bias) v *= 3.5;
  const BowLogisticModel scaled(model.vocabulary(), model.label_names(), w, bias, model.l2_penalty());
  for (const auto& item : ds.items) {
    const auto p = model.predict_proba(item.doc);
    double total = 0.0;
    for (const double v : p) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(argmax(p) == argmax(scaled.predict_proba(item.doc)));
  }
}

TEST_CASE("model files round-trip") {
  const auto dir = testing::temp_dir("model_io");
  const auto ds = synthetic(2);
  const auto model = train_bow_logistic(ds, {});
  save_model(model, dir / "m.json");
  const auto loaded = load_model(dir / "m.json");
  CHECK(loaded.vocabulary() == model.vocabulary());
  CHECK(loaded.label_names() == model.label_names());
  for (const auto& item : ds.items) CHECK(loaded.predict_proba(item.doc) == model.predict_proba(item.doc));
}

TEST_CASE("model file errors") {
  const auto dir = testing::temp_dir("model_errors");
  save_model(train_bow_logistic(good_bad(), {}), dir / "m.json");
  std::ifstream in(dir / "m.json", std::ios::binary);
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

  std::ofstream(dir / "truncated.json", std::ios::binary) << text.substr(0, text.size() / 2);
  try {
    load_model(dir / "truncated.json");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("offset") != std::string::npos);
  }

  auto bumped = nlohmann::json::parse(text);
  bumped["version"] = 7;
  std::ofstream(dir / "v7.json", std::ios::binary) << bumped.dump();
  try {
    load_model(dir / "v7.json");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    CHECK(msg.find('7') != std::string::npos);
    CHECK(msg.find('1') != std::string::npos);
  }

  try {
    load_model(dir / "absent.json");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("absent.json") != std::string::npos);
  }
}

TEST_CASE("check_probability_vector rejects malformed output") {
  CHECK_NOTHROW(check_probability_vector(std::vector<double>{0.25, 0.75}, 2));
  CHECK_THROWS_AS(check_probability_vector(std::vector<double>{0.5, 0.6}, 2), InterfaceError);
  CHECK_THROWS_AS(check_probability_vector(std::vector<double>{1.0}, 2), InterfaceError);
  CHECK_THROWS_AS(check_probability_vector(std::vector<double>{NAN, 1.0}, 2), InterfaceError);
}
