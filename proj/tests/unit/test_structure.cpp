#include "doctest.h"
#include "wstress/structure.hpp"

using namespace wstress;
using Vec = std::vector<double>;

namespace {

Vec uniform(std::size_t n) {
  Vec q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = midpoint(i, n);
  return q;
}

}  // namespace

TEST_CASE("flat detector") {
  auto q = uniform(100);
  for (std::size_t i = 5; i < 15; ++i) q[i] = 0.1;  // cells (0.05, 0.15]
  const QuantileGrid g(q);
  StructureFlag f;
  CHECK(find_flat(g, 0.1, &f));
  CHECK(f.first == 5);
  CHECK(f.last == 14);
  CHECK(f.str() == "flat@0.1");
  CHECK(!find_flat(g, 0.5));
  CHECK(!find_flat(g, 0.2));
  CHECK(find_flat(g, 0.16, nullptr, 3, 0.02));
  CHECK(!find_flat(QuantileGrid(uniform(100)), 0.1));
}

TEST_CASE("jump detector") {
  const QuantileGrid base(uniform(100));
  auto q = uniform(100);
  for (std::size_t i = 90; i < 100; ++i) q[i] += 1.0;
  const QuantileGrid g(q);
  StructureFlag f;
  CHECK(find_jump(base, g, 0.9, &f));
  CHECK(f.first == 89);
  CHECK(!find_jump(base, g, 0.5));
  CHECK(!find_jump(base, base, 0.9));
  const auto flags = detect_structure(base, g, Vec{0.5, 0.9});
  REQUIRE(flags.size() == 1);
  CHECK(flags[0].str() == "jump@0.9");
}

TEST_CASE("increment measures") {
  const QuantileGrid g(Vec{0, 1, 3, 3});
  CHECK(max_increment(g) == 2.0);
  CHECK(max_increment_change(g) == 2.0);
}
