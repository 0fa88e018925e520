#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "support.hpp"
#include "xaif/embed.hpp"
#include "xaif/errors.hpp"
#include "xaif/rng.hpp"

using namespace xaif;

namespace {

double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

EmbeddingStore toy_store() {
  EmbeddingStore s;
  s.add("sick", std::vector<double>{1.0, 0.0, 0.0});
  s.add("ill", std::vector<double>{0.9, 0.1, 0.0});
  s.add("unwell", std::vector<double>{0.8, 0.3, 0.1});
  s.add("happy", std::vector<double>{0.0, 1.0, 0.0});
  s.add("car", std::vector<double>{-0.2, 0.1, 1.0});
  return s;
}

}  // namespace

TEST_CASE("load word vectors") {
  const auto dir = testing::temp_dir("embed_load");
  std::ofstream(dir / "three.txt") << "a 1 0 0 0\nb 0 1 0 0\nc 0 0 1 0.5\n";
  const auto store = EmbeddingStore::load(dir / "three.txt");
  CHECK(store.size() == 3);
  CHECK(store.dim() == 4);

  std::ofstream(dir / "header.txt") << "2 3\nx 1 2 3\nx 9 9 9\ny 3 2 1\n";
  const auto with_header = EmbeddingStore::load(dir / "header.txt");
  CHECK(with_header.size() == 2);
  CHECK(with_header.vector(*with_header.find("x"))[0] == 1.0);

  std::ofstream(dir / "short.txt") << "a 1 0 0 0\nb 1 2 3\n";
  try {
    EmbeddingStore::load(dir / "short.txt");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  std::ofstream(dir / "nan.txt") << "a 1 zero 0\n";
  CHECK_THROWS_AS(EmbeddingStore::load(dir / "nan.txt"), FormatError);

  std::ofstream(dir / "empty.txt") << "";
  const auto empty = EmbeddingStore::load(dir / "empty.txt");
  CHECK(empty.size() == 0);
  CHECK(nearest_neighbors(empty, "a").candidates.empty());
  CHECK_THROWS_AS(EmbeddingStore::load(dir / "missing.txt"), DataError);
}

TEST_CASE("save and reload preserves vectors") {
  const auto dir = testing::temp_dir("embed_save");
  const auto store = toy_store();
  store.save(dir / "v.txt");
  const auto back = EmbeddingStore::load(dir / "v.txt");
  REQUIRE(back.size() == store.size());
  for (std::size_t r = 0; r < store.size(); ++r) {
    const auto row = *back.find(store.token(r));
    for (std::size_t d = 0; d < store.dim(); ++d) CHECK(back.vector(row)[d] == store.vector(r)[d]);
  }
}

TEST_CASE("nearest neighbours match an exhaustive cosine ranking") {
  const auto store = toy_store();
  const auto got = nearest_neighbors(store, "sick", 2, -1.0);
  REQUIRE(got.candidates.size() == 2);

  std::vector<std::pair<double, std::string>> oracle;
  const auto q = store.vector(*store.find("sick"));
  for (std::size_t r = 0; r < store.size(); ++r) {
    if (store.token(r) == "sick") continue;
    oracle.emplace_back(-cosine(q, store.vector(r)), store.token(r));
  }
  std::sort(oracle.begin(), oracle.end());
  CHECK(got.candidates[0].token == oracle[0].second);
  CHECK(got.candidates[1].token == oracle[1].second);
  CHECK(got.candidates[0].cosine == doctest::Approx(-oracle[0].first));

  CHECK(nearest_neighbors(store, "zebra").candidates.empty());
  CHECK(nearest_neighbors(store, "sick", 50, 1.0).candidates.empty());
}

TEST_CASE("neighbour lists are sound and scale-free") {
  Rng rng(17);
  EmbeddingStore store, scaled;
  for (int i = 0; i < 60; ++i) {
    std::vector<double> v(8);
    for (auto& x : v) x = rng.normal();
    store.add("w" + std::to_string(i), v);
    for (auto& x : v) x *= 4.0;
    scaled.add("w" + std::to_string(i), v);
  }
  for (int i = 0; i < 60; i += 7) {
    const std::string w = "w" + std::to_string(i);
    const auto set = nearest_neighbors(store, w, 10, 0.2);
    for (std::size_t j = 0; j < set.candidates.size(); ++j) {
      const auto& c = set.candidates[j];
      CHECK(c.token != w);
      CHECK(c.cosine >= 0.2);
      CHECK(c.cosine <= 1.0 + 1e-12);
      CHECK(c.cosine == doctest::Approx(cosine(store.vector(*store.find(w)), store.vector(*store.find(c.token)))));
      if (j > 0) CHECK(set.candidates[j - 1].cosine >= c.cosine);
    }
    const auto other = nearest_neighbors(scaled, w, 10, 0.2);
    REQUIRE(other.candidates.size() == set.candidates.size());
    for (std::size_t j = 0; j < set.candidates.size(); ++j) {
      CHECK(other.candidates[j].token == set.candidates[j].token);
    }
  }
}

TEST_CASE("semantic similarity of documents") {
  EmbeddingStore s;
  s.add("a", std::vector<double>{1, 0});
  s.add("b", std::vector<double>{0, 1});
  s.add("c", std::vector<double>{1, 1});
  const auto d1 = Document::from_text("1", "a b");
  const auto d2 = Document::from_text("2", "a c");
  // means (0.5, 0.5) and (1, 0.5)
  const double expected = (0.5 * 1 + 0.5 * 0.5) / (std::sqrt(0.5) * std::sqrt(1.25));
  CHECK(semantic_similarity(s, d1, d2) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(semantic_similarity(s, d2, d1) == semantic_similarity(s, d1, d2));
  CHECK(semantic_similarity(s, d1, d1) == 1.0);
  CHECK(semantic_similarity(s, Document::from_text("x", "zz yy"), Document::from_text("y", "qq")) == 0.0);
  CHECK(semantic_similarity(s, Document::from_text("x", "zz"), Document::from_text("y", "zz")) == 1.0);
}

TEST_CASE("pos lexicon") {
  const auto dir = testing::temp_dir("pos");
  std::ofstream(dir / "pos.tsv") << "run\tVERB\nsprint\tVERB\nquick\tADJ\n";
  const auto lex = PosLexicon::load(dir / "pos.tsv");
  CHECK(lex.size() == 3);
  CHECK(lex.compatible("run", "sprint"));
  CHECK_FALSE(lex.compatible("run", "quick"));
  CHECK(lex.compatible("run", "untagged"));
  lex.save(dir / "again.tsv");
  CHECK(PosLexicon::load(dir / "again.tsv").tag("quick") == "ADJ");
  std::ofstream(dir / "bad.tsv") << "no tab here\n";
  CHECK_THROWS_AS(PosLexicon::load(dir / "bad.tsv"), FormatError);
}
