#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "xaif/errors.hpp"
#include "xaif/ranksim.hpp"
#include "xaif/rng.hpp"

using namespace xaif;

namespace {

RankedList list_of(const std::vector<std::string>& tokens, std::vector<double> weights = {}) {
  RankedList out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const double w = weights.empty() ? static_cast<double>(tokens.size() - i) : weights[i];
    out.push_back({tokens[i], w});
  }
  return out;
}

std::vector<std::string> ids(std::initializer_list<int> values) {
  std::vector<std::string> out;
  for (const int v : values) out.push_back(std::to_string(v));
  return out;
}

// Term-by-term extrapolated RBO for uneven lists, written straight from the
// published definition.
double rbo_oracle(std::vector<std::string> a, std::vector<std::string> b, double p) {
  if (a == b) return 1.0;
  if (a.size() > b.size()) std::swap(a, b);
  const std::size_t s = a.size();
  const std::size_t l = b.size();
  if (s == 0) return 0.0;
  auto overlap = [&](std::size_t d) {
    std::set<std::string> sa(a.begin(), a.begin() + static_cast<long>(std::min(d, s)));
    std::size_t x = 0;
    for (std::size_t i = 0; i < d; ++i) x += sa.count(b[i]);
    return static_cast<double>(x);
  };
  const double xs = overlap(s);
  const double xl = overlap(l);
  double sum1 = 0.0;
  for (std::size_t d = 1; d <= l; ++d) sum1 += overlap(d) / d * std::pow(p, d);
  double sum2 = 0.0;
  for (std::size_t d = s + 1; d <= l; ++d) {
    sum2 += xs * static_cast<double>(d - s) / static_cast<double>(s * d) * std::pow(p, d);
  }
  const double value = (1 - p) / p * (sum1 + sum2) + ((xl - xs) / l + xs / s) * std::pow(p, l);
  return std::clamp(value, 0.0, 1.0);
}

std::vector<std::string> random_list(Rng& rng, std::size_t len, std::size_t alphabet) {
  std::vector<std::string> out;
  for (const auto i : rng.sample_without_replacement(alphabet, len)) out.push_back("t" + std::to_string(i));
  return out;
}

}  // namespace

TEST_CASE("rbo matches reference values") {
  struct Case {
    std::vector<std::string> a, b;
    double p8, p9;
  };
  const std::vector<Case> cases = {
      {ids({1, 2, 3}), {}, 0.0, 0.0},
      {ids({1, 2}), ids({2, 1}), 0.8, 0.9},
      {ids({1, 2, 3}), ids({1, 2}), 1.0, 1.0},
      {ids({1, 2, 3}), ids({3, 2, 1}), 0.72, 0.855},
      {ids({1, 2, 3, 4}), ids({3, 1, 7, 5}), 0.421333, 0.4635},
  };
  for (const auto& c : cases) {
    CHECK(rbo(c.a, c.b, 0.8) == doctest::Approx(c.p8).epsilon(1e-5));
    CHECK(rbo(c.a, c.b, 0.9) == doctest::Approx(c.p9).epsilon(1e-5));
  }
}

TEST_CASE("rbo of a one-swap list equals the series summed by hand") {
  const std::vector<std::string> a = {"x", "y", "z"};
  const std::vector<std::string> b = {"y", "x", "z"};
  // A_1 = 0, A_2 = A_3 = 1; extrapolation keeps A_3 beyond depth 3.
  const double p = 0.9;
  const double expected = (1 - p) * (0.0 + p * 1.0 + p * p * 1.0) + std::pow(p, 3) * 1.0;
  CHECK(rbo(a, b, p) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rbo agrees with the term-by-term oracle on random pairs") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = random_list(rng, rng.between(0, 12), 16);
    const auto b = random_list(rng, rng.between(0, 12), 16);
    const double p = 0.05 + 0.9 * rng.uniform();
    CHECK(rbo(a, b, p) == doctest::Approx(rbo_oracle(a, b, p)).epsilon(1e-12));
  }
}

TEST_CASE("rbo properties") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_list(rng, rng.between(1, 30), 40);
    const auto b = random_list(rng, rng.between(1, 30), 40);
    const double p = 0.1 + 0.85 * rng.uniform();
    const double ab = rbo(a, b, p);
    CHECK(ab == rbo(b, a, p));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(rbo(a, a, p) == 1.0);
  }
  CHECK(rbo(std::vector<std::string>{"a", "b"}, std::vector<std::string>{"c", "d", "e"}, 0.5) == 0.0);
  CHECK_THROWS_AS(rbo(std::vector<std::string>{"a"}, std::vector<std::string>{"a"}, 1.0), ParameterError);
  CHECK_THROWS_AS(rbo(std::vector<std::string>{"a"}, std::vector<std::string>{"a"}, 0.0), ParameterError);
}

TEST_CASE("swapping the top pair costs at least as much as any deeper adjacent swap") {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_list(rng, rng.between(2, 20), 30);
    const double p = 0.1 + 0.85 * rng.uniform();
    auto top = a;
    std::swap(top[0], top[1]);
    const double top_sim = rbo(a, top, p);
    for (std::size_t r = 1; r + 1 < a.size(); ++r) {
      auto deeper = a;
      std::swap(deeper[r], deeper[r + 1]);
      CHECK(top_sim <= rbo(a, deeper, p) + 1e-12);
    }
  }
}

TEST_CASE("rbo ignores weights") {
  const auto a = list_of({"a", "b", "c"}, {3, 2, 1});
  const auto b = list_of({"a", "b", "c"}, {30, 0.2, 0.1});
  CHECK(rbo(a, b, 0.7) == 1.0);
}

TEST_CASE("prefix mass shape") {
  CHECK(rbo_prefix_mass(1e-6, 1) == doctest::Approx(1.0).epsilon(1e-4));
  for (const double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (std::size_t k = 1; k < 10; ++k) {
      CHECK(rbo_prefix_mass(p, k) < rbo_prefix_mass(p, k + 1));
      CHECK(rbo_prefix_mass(p, k) > rbo_prefix_mass(p + 0.05, k));
    }
  }
  // top-5 mass at p = 0.75 is the documented 90% anchor
  CHECK(rbo_prefix_mass(0.75, 5) == doctest::Approx(0.90).epsilon(0.01));
}

TEST_CASE("prefix mass equals the summed rank weights") {
  // Agreement at rank i counts towards every depth d >= i, each depth weighing (1-p) p^(d-1) / d.
  constexpr std::size_t depth = 5000;
  for (const double p : {0.3, 0.6, 0.9}) {
    std::vector<double> tail(depth + 2, 0.0);
    for (std::size_t d = depth; d >= 1; --d) tail[d] = tail[d + 1] + (1 - p) * std::pow(p, d - 1) / d;
    for (const std::size_t k : {1u, 3u, 5u}) {
      double mass = 0.0;
      for (std::size_t i = 1; i <= k; ++i) mass += tail[i];
      CHECK(rbo_prefix_mass(p, k) == doctest::Approx(mass).epsilon(1e-9));
    }
  }
}

TEST_CASE("solve_p_for_mass inverts the mass curve") {
  for (const std::size_t k : {1u, 2u, 3u, 5u, 10u}) {
    for (const double m : {0.5, 0.8, 0.9, 0.95}) {
      double p = 0.0;
      try {
        p = solve_p_for_mass(k, m);
      } catch (const RangeError&) {
        continue;  // k = 1 cannot reach low masses
      }
      CHECK(rbo_prefix_mass(p, k) == doctest::Approx(m).epsilon(1e-6));
    }
  }
  CHECK(solve_p_for_mass(5, 0.90) == doctest::Approx(0.75).epsilon(0.02));
  CHECK_THROWS_AS(solve_p_for_mass(0, 0.9), ParameterError);
  CHECK_THROWS_AS(solve_p_for_mass(3, 1.0), ParameterError);
}

TEST_CASE("jaccard") {
  CHECK(jaccard(list_of({"a", "b", "c"}), list_of({"c", "b", "a"}), 3) == 1.0);
  CHECK(jaccard(list_of({"a", "b"}), list_of({"c", "d"}), 2) == 0.0);
  CHECK(jaccard(list_of({"a", "b", "c"}), list_of({"b", "c", "d"}), 3) == doctest::Approx(0.5));
  CHECK(jaccard({}, {}, 3) == 1.0);
  // order-blind within the prefixes
  Rng rng(3);
  auto a = list_of({"a", "b", "c", "d", "e"});
  auto b = list_of({"c", "x", "a", "e", "y"});
  const double j = jaccard(a, b, 4);
  for (int i = 0; i < 20; ++i) {
    rng.shuffle(std::span<FeatureWeight>(a.data(), 4));
    rng.shuffle(std::span<FeatureWeight>(b.data(), 4));
    CHECK(jaccard(a, b, 4) == j);
  }
}

namespace {

double kendall_oracle(const std::vector<int>& rank_a, const std::vector<int>& rank_b) {
  long concordant = 0, discordant = 0;
  const std::size_t m = rank_a.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const long s = static_cast<long>(rank_a[i] - rank_a[j]) * (rank_b[i] - rank_b[j]);
      (s > 0 ? concordant : discordant) += 1;
    }
  }
  return static_cast<double>(concordant - discordant) / static_cast<double>(m * (m - 1) / 2);
}

double spearman_oracle(const std::vector<int>& rank_a, const std::vector<int>& rank_b) {
  long d2 = 0;
  const auto m = static_cast<long>(rank_a.size());
  for (std::size_t i = 0; i < rank_a.size(); ++i) d2 += (rank_a[i] - rank_b[i]) * (rank_a[i] - rank_b[i]);
  return 1.0 - 6.0 * static_cast<double>(d2) / static_cast<double>(m * (m * m - 1));
}

}  // namespace

TEST_CASE("kendall and spearman equal brute force on every permutation pair up to 6") {
  for (int m = 2; m <= 6; ++m) {
    std::vector<int> base(m);
    std::iota(base.begin(), base.end(), 0);
    std::vector<std::string> names;
    for (int i = 0; i < m; ++i) names.push_back("f" + std::to_string(i));
    auto pa = base;
    do {
      auto pb = base;
      do {
        std::vector<std::string> la, lb;
        for (const int i : pa) la.push_back(names[i]);
        for (const int i : pb) lb.push_back(names[i]);
        // rank of feature f in each list
        std::vector<int> ra(m), rb(m);
        for (int r = 0; r < m; ++r) {
          ra[pa[r]] = r + 1;
          rb[pb[r]] = r + 1;
        }
        const auto tau = kendall_tau(list_of(la), list_of(lb));
        const auto rho = spearman_rho(list_of(la), list_of(lb));
        REQUIRE(tau.has_value());
        REQUIRE(rho.has_value());
        CHECK(*tau == kendall_oracle(ra, rb));
        CHECK(*rho == spearman_oracle(ra, rb));
      } while (std::next_permutation(pb.begin(), pb.end()));
    } while (std::next_permutation(pa.begin(), pa.end()));
  }
}

TEST_CASE("rank correlations: named values and the shared-feature restriction") {
  CHECK(*kendall_tau(list_of({"a", "b", "c"}), list_of({"a", "c", "b"})) == doctest::Approx(1.0 / 3.0));
  CHECK(*kendall_tau(list_of({"a", "b", "c"}), list_of({"c", "b", "a"})) == -1.0);
  CHECK(*spearman_rho(list_of({"a", "b", "c"}), list_of({"b", "a", "c"})) == doctest::Approx(0.5));
  CHECK(*spearman_rho(list_of({"a", "b", "c"}), list_of({"c", "b", "a"})) == -1.0);
  CHECK_FALSE(kendall_tau(list_of({"a", "b"}), list_of({"a", "c"})).has_value());
  CHECK_FALSE(spearman_rho(list_of({"a"}), list_of({"a"})).has_value());
  // unshared features are dropped before ranking
  CHECK(*kendall_tau(list_of({"a", "x", "b"}), list_of({"a", "b", "y"})) == 1.0);
}

TEST_CASE("lp distance") {
  CHECK(lp_distance(list_of({"a", "b"}), list_of({"a", "b"}), 2) == 0.0);
  const auto w1 = list_of({"a", "b", "c"}, {3, 2, 1});
  const auto w2 = list_of({"a", "b", "c"}, {4, 3, 2});
  CHECK(lp_distance(w1, w2, 1) == doctest::Approx(3.0));
  CHECK(rbo(w1, w2, 0.9) == 1.0);
  CHECK(lp_distance(list_of({"a"}, {2}), list_of({"b"}, {1}), 2) == doctest::Approx(std::sqrt(5.0)));
  CHECK(lp_distance(w1, w2, std::numeric_limits<double>::infinity()) == doctest::Approx(1.0));
  CHECK_THROWS_AS(lp_distance(w1, w2, 0.5), ParameterError);
}

TEST_CASE("center of mass") {
  const std::vector<double> w1 = {1, 0, 5, 0, 1};
  const std::vector<double> w2 = {1.3, 1.2, 2, 1.2, 1.3};
  CHECK(*center_of_mass(w1) == doctest::Approx(3.0));
  CHECK(*center_of_mass(w2) == doctest::Approx(3.0));
  CHECK(*center_of_mass(std::vector<double>{0.4}) == 1.0);
  CHECK(*center_of_mass(std::vector<double>{-2, 2}) == doctest::Approx(1.5));
  CHECK_FALSE(center_of_mass(std::vector<double>{0, 0}).has_value());
}

TEST_CASE("abs, rc and ins") {
  const auto base = list_of({"x", "y", "a", "b", "c"});
  const auto same = metrics_abs_rc_ins(base, base, 3);
  CHECK(same.abs == 0.0);
  CHECK(same.rc == 0.0);
  CHECK(same.ins == 1.0);

  const auto reversed = metrics_abs_rc_ins(base, list_of({"a", "y", "x", "b", "c"}), 3);
  CHECK(reversed.rc == 1.0);
  CHECK(reversed.ins == 1.0);

  const auto moved = metrics_abs_rc_ins(base, list_of({"y", "a", "x", "b", "c"}), 2);
  CHECK(moved.abs == 3.0);  // x: 1 -> 3, y: 2 -> 1

  // absent features take rank len(pert) + 1
  const auto dropped = metrics_abs_rc_ins(base, list_of({"a", "b"}), 2);
  CHECK(dropped.abs == doctest::Approx(std::abs(1 - 3) + std::abs(2 - 3)));
  CHECK(dropped.ins == 0.0);
  CHECK(dropped.rc == 1.0);

  CHECK_THROWS_AS(metrics_abs_rc_ins({}, base, 3), ParameterError);
  CHECK_THROWS_AS(metrics_abs_rc_ins(base, base, 0), ParameterError);
}
