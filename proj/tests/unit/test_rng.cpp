#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "mmreg/rng.hpp"

using namespace mmreg;

TEST_CASE("raw stream is the standard mt19937_64 sequence") {
  Rng rng(0);
  std::mt19937_64 ref(0);
  for (int i = 0; i < 5; ++i) CHECK(rng.next() == ref());

  Rng rng42(42);
  std::mt19937_64 ref42(42);
  for (int i = 0; i < 5; ++i) CHECK(rng42.next() == ref42());
}

TEST_CASE("determinism and substreams") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());

  Rng s0 = Rng::stream(7, 0);
  Rng s0b = Rng::stream(7, 0);
  Rng s1 = Rng::stream(7, 1);
  CHECK(s0.next() == s0b.next());
  CHECK(Rng::stream(7, 0).next() != s1.next());
}

TEST_CASE("uniform01 range") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal moments") {
  Rng rng(2024);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("below is in range and covers all values") {
  Rng rng(3);
  std::set<std::size_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t v = rng.below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("sample_without_replacement") {
  Rng rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    const auto idx = rng.sample_without_replacement(20, 6);
    CHECK(idx.size() == 6);
    std::set<Index> uniq(idx.begin(), idx.end());
    CHECK(uniq.size() == 6);
    CHECK(*uniq.begin() >= 0);
    CHECK(*uniq.rbegin() < 20);
  }
  const auto all = rng.sample_without_replacement(9, 9);
  std::set<Index> uniq(all.begin(), all.end());
  CHECK(uniq.size() == 9);
}
