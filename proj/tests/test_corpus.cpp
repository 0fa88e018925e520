#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "support.hpp"
#include "xaif/corpus.hpp"
#include "xaif/csv.hpp"
#include "xaif/errors.hpp"
#include "xaif/rng.hpp"

using namespace xaif;

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string ten_rows() {
  std::string text = "id,text,label\n";
  for (int i = 0; i < 10; ++i) {
    text += std::to_string(i) + ",\"doc number " + std::to_string(i) + ", fine\"," + (i % 2 ? "pos" : "neg") + "\n";
  }
  return text;
}

}  // namespace

TEST_CASE("tokenize") {
  CHECK(tokenize("I have a skin rash") == std::vector<std::string>{"i", "have", "a", "skin", "rash"});
  CHECK(tokenize("joint pain.") == std::vector<std::string>{"joint", "pain"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  --  ").empty());
  CHECK(tokenize("Don't STOP-now 42x") == std::vector<std::string>{"don", "t", "stop", "now", "42x"});
  CHECK(tokenize("café au lait") == std::vector<std::string>{"café", "au", "lait"});
}

TEST_CASE("tokenize is idempotent through join") {
  Rng rng(1);
  const std::string alphabet = "abcXYZ019 .,;!-'\t";
  for (int trial = 0; trial < 200; ++trial) {
    std::string raw;
    const auto len = rng.below(40);
    for (std::uint64_t i = 0; i < len; ++i) raw.push_back(alphabet[rng.below(alphabet.size())]);
    const auto tokens = tokenize(raw);
    CHECK(tokenize(join_tokens(tokens)) == tokens);
    CHECK(tokenize(raw) == tokens);
  }
}

TEST_CASE("stopwords") {
  const auto& sw = StopwordSet::builtin_english();
  CHECK(sw.size() > 150);
  CHECK(sw.contains("the"));
  CHECK(sw.contains("The"));
  CHECK_FALSE(sw.contains("rash"));
  CHECK(StopwordSet::none().size() == 0);

  const auto dir = testing::temp_dir("stopwords");
  write_file(dir / "sw.txt", "Foo\nbar\r\n\n");
  const auto loaded = StopwordSet::load(dir / "sw.txt");
  CHECK(loaded.contains("foo"));
  CHECK(loaded.contains("BAR"));
  CHECK(loaded.size() == 2);
  CHECK_THROWS_AS(StopwordSet::load(dir / "missing.txt"), DataError);
}

TEST_CASE("unique features keep first-appearance order and skip stopwords") {
  const auto doc = Document::from_text("d", "the rash and the itch and rash again");
  CHECK(unique_features(doc, StopwordSet::builtin_english()) ==
        std::vector<std::string>{"rash", "itch"});
  CHECK(unique_features(doc, StopwordSet::none()) ==
        std::vector<std::string>{"the", "rash", "and", "itch", "again"});
}

TEST_CASE("csv reader handles quoting") {
  std::istringstream in("\xEF\xBB\xBFh1,h2\r\n\"a,b\",\"say \"\"hi\"\"\"\nx,\"multi\nline\"\n");
  const auto rows = csv::read_all(in);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"h1", "h2"});
  CHECK(rows[1] == std::vector<std::string>{"a,b", "say \"hi\""});
  CHECK(rows[2] == std::vector<std::string>{"x", "multi\nline"});

  std::ostringstream out;
  csv::write_row(out, {"plain", "with,comma", "q\"uote"});
  CHECK(out.str() == "plain,\"with,comma\",\"q\"\"uote\"\n");
  std::istringstream back(out.str());
  CHECK(csv::read_all(back)[0] == std::vector<std::string>{"plain", "with,comma", "q\"uote"});
}

TEST_CASE("load_csv splits 80/20 deterministically") {
  const auto dir = testing::temp_dir("load_csv");
  write_file(dir / "ten.csv", ten_rows());
  const auto ds = load_csv(dir / "ten.csv", "text", "label", 7);
  CHECK(ds.train.size() == 8);
  CHECK(ds.test.size() == 2);
  CHECK(ds.label_names == std::vector<std::string>{"neg", "pos"});

  std::set<std::size_t> all(ds.train.begin(), ds.train.end());
  for (const auto i : ds.test) CHECK(all.insert(i).second);
  CHECK(all.size() == ds.items.size());
  for (const auto& item : ds.items) CHECK(item.label < ds.num_labels());

  const auto again = load_csv(dir / "ten.csv", "text", "label", 7);
  CHECK(again.train == ds.train);
  CHECK(again.test == ds.test);

  bool some_seed_differs = false;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    some_seed_differs |= load_csv(dir / "ten.csv", "text", "label", seed).test != ds.test;
  }
  CHECK(some_seed_differs);
}

TEST_CASE("load_csv errors") {
  const auto dir = testing::temp_dir("load_csv_errors");
  write_file(dir / "one_label.csv", "text,label\na b,x\nc d,x\ne f,x\n");
  CHECK_THROWS_AS(load_csv(dir / "one_label.csv", "text", "label", 1), DataError);

  write_file(dir / "ten.csv", ten_rows());
  try {
    load_csv(dir / "ten.csv", "body", "label", 1);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("body") != std::string::npos);
  }
  CHECK_THROWS_AS(load_csv(dir / "nope.csv", "text", "label", 1), DataError);
}

TEST_CASE("make_dataset drops empty documents") {
  const auto ds = make_dataset({{"good one", "a"}, {"...", "b"}, {"bad one", "b"}, {"meh", "a"}}, 3);
  CHECK(ds.items.size() == 3);
  for (const auto& item : ds.items) CHECK_FALSE(item.doc.empty());
}
