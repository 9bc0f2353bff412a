#include <doctest.h>

#include "rplsim/core.hpp"
#include "rplsim/rng.hpp"

using namespace rplsim;

TEST_CASE("distance basics") {
  CHECK(distance({0, 0}, {0, 0}) == doctest::Approx(0.0));
  CHECK(distance({0, 0}, {3, 4}) == doctest::Approx(5.0));
  CHECK(distance({10, 10}, {70, 10}) == doctest::Approx(60.0));
}

TEST_CASE("distance is a metric on random triples") {
  RngStream rng(42);
  for (int i = 0; i < 200; ++i) {
    Position a{rng.next_double() * 200, rng.next_double() * 200};
    Position b{rng.next_double() * 200, rng.next_double() * 200};
    Position c{rng.next_double() * 200, rng.next_double() * 200};
    CHECK(distance(a, b) == doctest::Approx(distance(b, a)));
    CHECK(distance(a, b) >= 0.0);
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9);
  }
}

TEST_CASE("dag_rank levels") {
  CHECK(dag_rank(Rank{256}) == 1);
  CHECK(dag_rank(Rank{512}) == 2);
  CHECK(dag_rank(Rank{700}) == 2);
  CHECK_THROWS_AS(dag_rank(Rank{255}), std::invalid_argument);
  CHECK_THROWS_AS(dag_rank(Rank{0}), std::invalid_argument);
}

TEST_CASE("dag_rank is monotone in rank value") {
  RngStream rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto lo = static_cast<std::uint32_t>(rng.next_in(256, 60000));
    const auto hi = static_cast<std::uint32_t>(rng.next_in(lo, 65535));
    CHECK(dag_rank(Rank{lo}) <= dag_rank(Rank{hi}));
  }
}

TEST_CASE("simtime conversions are microsecond exact") {
  CHECK(SimTime::from_seconds(0.00096).us == 960);
  CHECK(SimTime::from_us(1800000000).seconds() == doctest::Approx(1800.0));
  CHECK(SimTime::zero() < SimTime::from_us(1));
}

TEST_CASE("rng streams are deterministic and independent") {
  RngStream a(derive_seed(1, 5));
  RngStream b(derive_seed(1, 5));
  RngStream c(derive_seed(1, 6));
  bool all_same = true;
  bool any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    all_same = all_same && x == b.next_u64();
    any_diff = any_diff || x != c.next_u64();
  }
  CHECK(all_same);
  CHECK(any_diff);
}

TEST_CASE("rng bounded draws stay in range") {
  RngStream rng(99);
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.next_in(1, 5000);
    CHECK(v >= 1);
    CHECK(v <= 5000);
    const double d = rng.next_double();
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
  }
}
