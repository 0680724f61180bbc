#include "doctest.h"

#include <cmath>

#include "fsec/embeddings.hpp"
#include "fsec/error.hpp"
#include "fsec/rng.hpp"
#include "support/fixtures.hpp"

using namespace fsec;
using namespace fsec::testing;

TEST_SUITE_BEGIN("embeddings");

TEST_CASE("two-line file parses into a table of size two") {
  TempDir dir;
  const std::string path = dir.path("emb.txt");
  write_file(path, "cat 0.1 0.2 0.3\ndog -1 2 3.5\n");
  const EmbeddingTable table = load_table(path, 3);
  CHECK(table.size() == 2);
  const auto cat = table.lookup("cat");
  CHECK(cat[0] == doctest::Approx(0.1f));
  CHECK(cat[2] == doctest::Approx(0.3f));
}

TEST_CASE("wrong float count names the line") {
  TempDir dir;
  const std::string path = dir.path("emb.txt");
  write_file(path, "dog 1 2 3\ncat 0.1 0.2\n");
  CHECK_THROWS_WITH_AS(load_table(path, 3), doctest::Contains(":2"), Error);
}

TEST_CASE("unknown tokens return the zero vector") {
  TempDir dir;
  const std::string path = dir.path("emb.txt");
  write_file(path, "cat 1 1 1\n");
  const EmbeddingTable table = load_table(path, 3);
  const auto missing = table.lookup("zebra");
  REQUIRE(missing.size() == 3);
  for (float v : missing) CHECK(v == 0.0f);
}

TEST_CASE("lookup is case-insensitive") {
  TempDir dir;
  const std::string path = dir.path("emb.txt");
  write_file(path, "attack 1 2 3\n");
  const EmbeddingTable table = load_table(path, 3);
  const auto a = table.lookup("Attack");
  const auto b = table.lookup("attack");
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  CHECK(table.contains("ATTACK"));
}

TEST_CASE("word2vec-style header line is skipped; duplicates keep the first entry") {
  TempDir dir;
  const std::string path = dir.path("emb.txt");
  write_file(path, "2 3\ncat 1 1 1\ncat 9 9 9\n");
  const EmbeddingTable table = load_table(path, 3);
  CHECK(table.size() == 1);
  CHECK(table.lookup("cat")[0] == 1.0f);
}

TEST_CASE("l2 distance basics") {
  const std::vector<double> a = {1.0, 2.0, 3.0};
  CHECK(l2_distance(std::span<const double>(a), std::span<const double>(a)) == 0.0);

  const std::vector<double> origin = {0.0, 0.0};
  const std::vector<double> p = {3.0, 4.0};
  CHECK(l2_distance(std::span<const double>(origin), std::span<const double>(p)) ==
        doctest::Approx(5.0));

  const std::vector<double> shorter = {1.0};
  CHECK_THROWS_AS(
      l2_distance(std::span<const double>(a), std::span<const double>(shorter)), Error);
}

TEST_CASE("random 300-d pair matches the elementwise sum-of-squares oracle") {
  Rng rng(42);
  std::vector<double> a(300), b(300);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.uniform_real() * 2.0 - 1.0;
    b[i] = rng.uniform_real() * 2.0 - 1.0;
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
  const double expected = std::sqrt(sq);
  CHECK(std::fabs(l2_distance(std::span<const double>(a), std::span<const double>(b)) -
                  expected) < 1e-10);
}

TEST_CASE("symmetry and triangle inequality on sampled triples") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(8), b(8), c(8);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = rng.uniform_real() * 4.0 - 2.0;
      b[i] = rng.uniform_real() * 4.0 - 2.0;
      c[i] = rng.uniform_real() * 4.0 - 2.0;
    }
    const auto sa = std::span<const double>(a);
    const auto sb = std::span<const double>(b);
    const auto sc = std::span<const double>(c);
    CHECK(l2_distance(sa, sb) == l2_distance(sb, sa));
    CHECK(l2_distance(sa, sc) <= l2_distance(sa, sb) + l2_distance(sb, sc) + 1e-9);
  }
}

TEST_SUITE_END();
