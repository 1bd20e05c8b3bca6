#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "recmem/rng.hpp"
#include "recmem/strings.hpp"

using namespace recmem;

TEST_CASE("trim and collapse") {
  CHECK(trim("  a b \t\n") == "a b");
  CHECK(trim("") == "");
  CHECK(collapse_spaces("a   b\t\tc") == "a b c");
  CHECK(collapse_spaces("  x  ") == "x");
}

TEST_CASE("split on multi-char delimiter") {
  auto f = split("1::Toy Story (1995)::Animation|Children's|Comedy", "::");
  REQUIRE(f.size() == 3);
  CHECK(f[0] == "1");
  CHECK(f[1] == "Toy Story (1995)");
  CHECK(f[2] == "Animation|Children's|Comedy");
  CHECK(split("", "::").size() == 1);
  CHECK(split("a::", "::").size() == 2);
}

TEST_CASE("canonical integers") {
  CHECK(parse_canonical_int("42").value() == 42);
  CHECK(parse_canonical_int("0").value() == 0);
  CHECK(!parse_canonical_int("007"));
  CHECK(!parse_canonical_int(""));
  CHECK(!parse_canonical_int("-1"));
  CHECK(!parse_canonical_int("12a"));
  CHECK(parse_canonical_int("978300760").value() == 978300760);
}

TEST_CASE("fixed formatting rounds half away from zero") {
  CHECK(format_fixed(0.125, 2) == "0.13");
  CHECK(format_fixed(1.0, 4) == "1.0000");
  CHECK(format_fixed(0.0, 2) == "0.00");
  CHECK(format_fixed(-0.125, 2) == "-0.13");
  CHECK(format_pct(3136.0 / 3883.0) == "80.76");
  CHECK(format_pct(0.0) == "0.00");
  CHECK(format_pct(1.0) == "100.00");
}

TEST_CASE("placeholder substitution") {
  CHECK(substitute("User {user_id} saw {x}.", {{"user_id", "7"}, {"x", "Heat (1995)"}}) ==
        "User 7 saw Heat (1995).");
  CHECK(substitute("{unknown} stays", {{"a", "b"}}) == "{unknown} stays");
  CHECK(substitute("no placeholders", {}) == "no placeholders");
}

TEST_CASE("rng determinism and bounds") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng r(7);
  for (int i = 0; i < 1000; ++i) {
    auto v = r.bounded(10);
    CHECK(v < 10);
    double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(mix_seed(42, 1) != mix_seed(42, 2));
  CHECK(mix_seed(42, 1) == mix_seed(42, 1));
}

TEST_CASE("seeded shuffle is a permutation") {
  std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
  auto w = v;
  Rng r(3);
  r.shuffle(w);
  auto sorted = w;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == v);
}
