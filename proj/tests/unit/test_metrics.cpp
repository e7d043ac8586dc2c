#include "oracles.hpp"
#include "protctx/metrics.hpp"

#include <doctest.h>

#include <random>

using namespace protctx;

namespace {

ECSet ecs(std::initializer_list<const char*> xs) {
  ECSet s;
  for (auto x : xs) s.insert(ECNumber::parse(x));
  return s;
}

ECSet random_ec_set(std::mt19937_64& rng) {
  ECSet s;
  for (auto n = rng() % 6; n > 0; --n) {
    std::array<int, 4> lv{};
    const int depth = rng() % 5 == 0 ? 1 + static_cast<int>(rng() % 3) : 4;
    for (int l = 0; l < depth; ++l) lv[l] = 1 + static_cast<int>(rng() % 3);
    s.insert(ECNumber::make(lv, depth));
  }
  return s;
}

template <typename F>
std::size_t error_line(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("ECNumber parsing and rendering") {
  const auto e = ECNumber::parse("4.1.1.23");
  CHECK(e.depth == 4);
  CHECK(e.to_string() == "4.1.1.23");
  const auto w = ECNumber::parse("1.2.-.-");
  CHECK(w.depth == 2);
  CHECK(w.to_string() == "1.2.-.-");
  CHECK_THROWS_AS(ECNumber::parse("1.-.3.4"), std::invalid_argument);
  CHECK_THROWS_AS(ECNumber::parse("0.1.2.3"), std::invalid_argument);
  CHECK_THROWS_AS(ECNumber::parse("1.2.3"), std::invalid_argument);
  CHECK_THROWS_AS(ECNumber::make({1, 2, 0, 4}, 4), std::invalid_argument);
}

TEST_CASE("parse_ec_set finds EC tokens in free text") {
  CHECK(parse_ec_set("the enzyme is EC 4.1.1.23.") == ecs({"4.1.1.23"}));
  CHECK(parse_ec_set("either 1.1.1.1 or 1.1.1.1") == ecs({"1.1.1.1"}));
  CHECK(parse_ec_set("no enzymes here").empty());
  CHECK(parse_ec_set("[ec:2.7.11.1], EC3.4.-.- and 1.2.3.-") ==
        ecs({"2.7.11.1", "3.4.-.-", "1.2.3.-"}));
  CHECK(parse_ec_set("version 1.2.3.4.5 and 10.1.2.3x").empty());
  CHECK(parse_ec_set("IP 192.168.0.1").empty());  // zero components are not EC numbers
}

TEST_CASE("parse_ec_set round-trips canonical renderings") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto s = random_ec_set(rng);
    std::string text;
    for (const auto& e : s) text += e.to_string() + "; ";
    CHECK(parse_ec_set(text) == s);
  }
}

TEST_CASE("truncate_ec") {
  CHECK(truncate_ec(ECNumber::parse("1.2.3.5"), 3) == "1.2.3");
  CHECK(truncate_ec(ECNumber::parse("1.2.3.5"), 4) == "1.2.3.5");
  CHECK_FALSE(truncate_ec(ECNumber::parse("1.2.-.-"), 3).has_value());
  CHECK(truncate_ec(ECNumber::parse("1.2.-.-"), 2) == "1.2");
}

TEST_CASE("micro_prf worked examples") {
  const std::vector<ECSet> p1{ecs({"1.2.3.5"})}, g1{ecs({"1.2.3.4"})};
  CHECK(micro_prf(p1, g1, 3).f1 == 1.0);
  CHECK(micro_prf(p1, g1, 4).f1 == 0.0);

  const std::vector<ECSet> p{ecs({"1.1.1.1"}), ecs({"2.7.1.1"})};
  const std::vector<ECSet> g{ecs({"1.1.1.1"}), ecs({"2.7.1.2", "3.1.1.1"})};
  const auto l4 = micro_prf(p, g, 4);
  CHECK(l4.tp == 1);
  CHECK(l4.fp == 1);
  CHECK(l4.fn == 2);
  CHECK(l4.precision == doctest::Approx(0.5));
  CHECK(l4.recall == doctest::Approx(1.0 / 3.0));
  CHECK(l4.f1 == doctest::Approx(0.4));
  const auto l2 = micro_prf(p, g, 2);
  CHECK(l2.precision == 1.0);
  CHECK(l2.recall == doctest::Approx(2.0 / 3.0));
  CHECK(l2.f1 == doctest::Approx(0.8));

  const std::vector<ECSet> empty(2);
  const auto z = micro_prf(empty, g, 1);
  CHECK(z.precision == 0.0);
  CHECK(z.recall == 0.0);
  CHECK(z.f1 == 0.0);
  CHECK_THROWS_AS(micro_prf(p1, g, 1), std::invalid_argument);
  CHECK_THROWS_AS(micro_prf(p, g, 5), std::invalid_argument);
}

TEST_CASE("micro_prf equals the set-arithmetic oracle") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 50;
    std::vector<ECSet> p(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = random_ec_set(rng);
      g[i] = random_ec_set(rng);
    }
    for (int level = 1; level <= 4; ++level) {
      const auto got = micro_prf(p, g, level);
      const auto want = oracle::set_arithmetic_prf(p, g, level);
      CHECK(got.tp == want.tp);
      CHECK(got.fp == want.fp);
      CHECK(got.fn == want.fn);
      CHECK(std::abs(got.f1 - want.f1) <= 1e-12);
    }
  }
}

TEST_CASE("coarser levels never lose matches for single-label items") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    std::vector<ECSet> p(20), g(20);
    for (std::size_t i = 0; i < p.size(); ++i) {
      std::array<int, 4> a{}, b{};
      for (int l = 0; l < 4; ++l) {
        a[l] = 1 + static_cast<int>(rng() % 2);
        b[l] = 1 + static_cast<int>(rng() % 2);
      }
      p[i].insert(ECNumber::make(a, 4));
      g[i].insert(ECNumber::make(b, 4));
    }
    for (int level = 1; level < 4; ++level) {
      CHECK(micro_prf(p, g, level).tp >= micro_prf(p, g, level + 1).tp);
    }
  }
}

TEST_CASE("truncation can merge several matches into one") {
  // Two exact matches at level 4 collapse to a single level-3 label.
  const std::vector<ECSet> p{ecs({"1.1.1.1", "1.1.1.2"})};
  CHECK(micro_prf(p, p, 4).tp == 2);
  CHECK(micro_prf(p, p, 3).tp == 1);
}

TEST_CASE("EC table parsing") {
  const auto t = parse_ec_table("i1\t1.1.1.1;2.7.1.1\ni2\t\n");
  CHECK(t.at("i1") == ecs({"1.1.1.1", "2.7.1.1"}));
  CHECK(t.at("i2").empty());
  CHECK(error_line([] { parse_ec_table("i1\t1.1.1.1\ni1\t1.1.1.2\n"); }) == 2);
  CHECK(error_line([] { parse_ec_table("i1\t1.x.1.1\n"); }) == 1);
  CHECK(error_line([] { parse_ec_table("\t1.1.1.1\n"); }) == 1);
}

TEST_CASE("ARI fixed cases") {
  const std::vector<int> a{0, 0, 1, 1}, b{0, 1, 0, 1};
  CHECK(adjusted_rand_index(a, b) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(adjusted_rand_index(a, a) == 1.0);
  const std::vector<int> one{0, 0, 0}, singles{0, 1, 2};
  CHECK(adjusted_rand_index(one, one) == 1.0);
  CHECK(adjusted_rand_index(singles, singles) == 1.0);
  CHECK(adjusted_rand_index(one, singles) == 0.0);

  Labeling la{{"x", "a"}, {"y", "a"}, {"z", "b"}}, lb{{"x", "1"}, {"y", "1"}, {"z", "2"}};
  CHECK(adjusted_rand_index(la, lb) == 1.0);
  lb.erase("z");
  lb["w"] = "2";
  CHECK_THROWS_AS(adjusted_rand_index(la, lb), std::invalid_argument);
}

TEST_CASE("ARI agrees with pair counting, symmetric and relabeling-invariant") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 150; ++t) {
    const std::size_t n = 2 + rng() % 49;
    const int ka = 1 + static_cast<int>(rng() % 6), kb = 1 + static_cast<int>(rng() % 6);
    std::vector<int> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng() % static_cast<unsigned>(ka));
      b[i] = static_cast<int>(rng() % static_cast<unsigned>(kb));
    }
    const double ari = adjusted_rand_index(a, b);
    CHECK(std::abs(ari - oracle::pair_counting_ari(a, b)) <= 1e-12);
    CHECK(adjusted_rand_index(b, a) == ari);
    std::vector<int> relabeled(n);
    for (std::size_t i = 0; i < n; ++i) relabeled[i] = 100 - a[i] * 7;
    CHECK(adjusted_rand_index(relabeled, b) == ari);
  }
}

TEST_CASE("embedding loading") {
  const auto e = load_embeddings("P1\t1\t2\t3\nP2,4,5,6\n");
  CHECK(e.size() == 2);
  CHECK(e.dim == 3);
  CHECK(e.row(1)[2] == 6.0);
  CHECK(error_line([] { load_embeddings("P1\t1\t2\t3\nP2\t1\t2\t3\t4\n"); }) == 2);
  CHECK(error_line([] { load_embeddings("P1,1,NaN\n"); }) == 1);
  CHECK(error_line([] { load_embeddings("P1,1,inf\n"); }) == 1);
  CHECK(error_line([] { load_embeddings("P1,1\nP1,2\n"); }) == 2);
  CHECK(error_line([] { load_embeddings("P1,1\nP2,x\n"); }) == 2);
  CHECK(error_line([] { load_embeddings("P1\n"); }) == 1);
}

TEST_CASE("labeling files") {
  const auto l = parse_labeling("P1\tc1\nP2\tc2\n");
  CHECK(l.at("P2") == "c2");
  CHECK(error_line([] { parse_labeling("P1\tc1\nP1\tc2\n"); }) == 2);
  CHECK(error_line([] { parse_labeling("P1\n"); }) == 1);
}

namespace {

// Best 2-partition by mean within-cluster pairwise distance, by enumeration.
std::vector<int> best_two_partition(const EmbeddingSet& e) {
  const std::size_t n = e.size();
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0;
    for (std::size_t k = 0; k < e.dim; ++k) s += (e.row(i)[k] - e.row(j)[k]) * (e.row(i)[k] - e.row(j)[k]);
    return std::sqrt(s);
  };
  double best = 1e300;
  std::vector<int> out;
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    if (mask & 1u) continue;  // fix item 0 in cluster 0
    double sum = 0;
    int pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (((mask >> i) & 1u) == ((mask >> j) & 1u)) {
          sum += dist(i, j);
          ++pairs;
        }
    const double mean = pairs ? sum / pairs : 0;
    if (mean < best) {
      best = mean;
      out.assign(n, 0);
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<int>((mask >> i) & 1u);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("agglomerative clustering") {
  const auto e = load_embeddings("a,0,0\nb,10,10\nc,0.1,0\nd,10,10.2\n");
  const auto lab = agglomerative_cluster(e, 2, Linkage::Average, DistanceMetric::Euclidean);
  CHECK(lab.at("a") == "0");
  CHECK(lab.at("b") == "1");
  CHECK(lab.at("c") == "0");
  CHECK(lab.at("d") == "1");
  const auto oracle_part = best_two_partition(e);
  CHECK((oracle_part[0] == oracle_part[2] && oracle_part[1] == oracle_part[3] &&
         oracle_part[0] != oracle_part[1]));

  const auto singles = agglomerative_cluster(e, 4, Linkage::Average, DistanceMetric::Euclidean);
  CHECK(singles.at("d") == "3");
  const auto all = agglomerative_cluster(e, 1, Linkage::Average, DistanceMetric::Euclidean);
  for (const auto& [id, l] : all) CHECK(l == "0");
  CHECK_THROWS_AS(agglomerative_cluster(e, 0), std::invalid_argument);
  CHECK_THROWS_AS(agglomerative_cluster(e, 5), std::invalid_argument);
  CHECK_THROWS(agglomerative_cluster(load_embeddings("a,0,0\nb,1,0\n"), 1));
  CHECK(agglomerative_cluster(e, 2, Linkage::Average, DistanceMetric::Euclidean) == lab);
}

TEST_CASE("ari_report") {
  // One-hot embeddings per truth cluster give a perfect score.
  const auto e = load_embeddings("a,1,0,0\nb,0,1,0\nc,1,0,0\nd,0,0,1\ne,0,1,0\n");
  const Labeling truth{{"a", "x"}, {"b", "y"}, {"c", "x"}, {"d", "z"}, {"e", "y"}};
  const auto r = ari_report(e, truth);
  CHECK(r.k == 3);
  CHECK(r.n == 5);
  CHECK(r.ari == 1.0);

  const Labeling single{{"a", "x"}, {"b", "x"}, {"c", "x"}, {"d", "x"}, {"e", "x"}};
  CHECK(ari_report(e, single).ari == 1.0);

  Labeling missing = truth;
  missing.erase("e");
  CHECK_THROWS_AS(ari_report(e, missing), std::invalid_argument);
}

TEST_CASE("ari_report on random embeddings equals the pair-counting oracle") {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> g(0, 1);
  std::string text;
  Labeling truth;
  for (int i = 0; i < 50; ++i) {
    const std::string id = "P" + std::to_string(i);
    text += id;
    for (int k = 0; k < 8; ++k) text += "," + std::to_string(g(rng));
    text += "\n";
    truth[id] = "c" + std::to_string(rng() % 4);
  }
  const auto e = load_embeddings(text);
  const auto r = ari_report(e, truth);
  const auto pred = agglomerative_cluster(e, r.k);
  std::vector<int> a, b;
  for (const auto& [id, l] : truth) {
    a.push_back(std::stoi(l.substr(1)));
    b.push_back(std::stoi(pred.at(id)));
  }
  CHECK(std::abs(r.ari - oracle::pair_counting_ari(a, b)) <= 1e-12);
  CHECK(std::abs(r.ari) < 0.3);
}
