#include <atomic>
#include <cmath>

#include "doctest.h"
#include "ideo/common.hpp"

using namespace ideo;

TEST_CASE("rng streams are reproducible") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(mix_seed(1, {2, 3}) == mix_seed(1, {2, 3}));
  CHECK(mix_seed(1, {2, 3}) != mix_seed(1, {3, 2}));
}

TEST_CASE("rng distributions have the expected moments") {
  Rng rng(7);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, sp = 0;
  for (int i = 0; i < n; ++i) {
    su += rng.uniform();
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    sp += static_cast<double>(rng.poisson(3.5));
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(sp / n == doctest::Approx(3.5).epsilon(0.01));
}

TEST_CASE("below and categorical stay in range") {
  Rng rng(3);
  const auto cum = cumulative({1.0, 0.0, 3.0});
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 40000; ++i) {
    CHECK(rng.below(7) < 7u);
    ++counts[rng.categorical(cum)];
  }
  CHECK(counts[1] == 0);
  CHECK(static_cast<double>(counts[2]) / counts[0] == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("word tokens are lowercase alphanumeric runs") {
  const auto t = word_tokens("Don't STOP-me, now_ 42!");
  REQUIRE(t.size() == 5);
  CHECK(t[0] == "don't");
  CHECK(t[1] == "stop");
  CHECK(t[2] == "me");
  CHECK(t[3] == "now_");
  CHECK(t[4] == "42");
  CHECK(word_tokens("").empty());
}

TEST_CASE("number formatting") {
  CHECK(format_fixed(-0.0000001, 6) == "0.000000");
  CHECK(format_fixed(1.5, 2) == "1.50");
  CHECK(std::stod(format_exact(0.1)) == 0.1);
}

TEST_CASE("delimited lines honor CSV quoting") {
  const auto f = parse_delimited_line("a,\"b,c\",\"d\"\"e\"", ',');
  REQUIRE(f.size() == 3);
  CHECK(f[1] == "b,c");
  CHECK(f[2] == "d\"e");
  const auto t = parse_delimited_line("a\t\"b\"", '\t');
  CHECK(t[1] == "\"b\"");
}

TEST_CASE("parse errors carry kinds") {
  CHECK_THROWS_AS(parse_double("abc", "x"), Error);
  CHECK_THROWS_AS(parse_double("nan", "x"), Error);
  try {
    read_file("/nonexistent/file");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("parallel_for visits every index once and propagates exceptions") {
  set_worker_count(4);
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS(parallel_for(10, [](std::size_t i) {
    if (i == 5) fail(ErrorKind::Config, "boom");
  }));
  set_worker_count(1);
}
