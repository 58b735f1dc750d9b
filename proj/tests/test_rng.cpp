#include <doctest.h>

#include <set>
#include <stdexcept>
#include <vector>

#include "cdp/rng.hpp"
#include "cdp/stats.hpp"

using namespace cdp;

TEST_SUITE("rng") {
  // Known-answer vectors published with the Random123 reference implementation.
  TEST_CASE("philox known answers") {
    CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) ==
          Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("unit interval mapping") {
    CHECK(to_unit_interval(0, 0) == 0.0);
    CHECK(to_unit_interval(0xffffffffu, 0xffffffffu) < 1.0);
    CHECK(to_unit_interval(0x80000000u, 0) == 0.5);
  }

  TEST_CASE("field values depend only on seed and counter") {
    const UniformField a(42), b(42), c(43);
    const FieldCounter ctr{1, 2, 3, 4};
    CHECK(a(ctr) == b(ctr));
    CHECK(a(ctr) != c(ctr));
    CHECK(a(ctr) != a(FieldCounter{1, 2, 3, 5}));
  }

  TEST_CASE("derived seeds are distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i)
      for (std::uint64_t s = 0; s < 3; ++s) seen.insert(derive_seed(7, i, s));
    CHECK(seen.size() == 3000);
    CHECK(derive_seed(7, 3, 1) == derive_seed(7, 3, 1));
    CHECK(derive_seed(7, 3) != derive_seed(8, 3));
  }

  TEST_CASE("hash_words separates domains and word order") {
    const std::vector<std::int64_t> ab{1, 2}, ba{2, 1};
    CHECK(hash_words(0, ab) != hash_words(0, ba));
    CHECK(hash_words(0, ab) != hash_words(1, ab));
    CHECK(hash_words(0, ab) == hash_words(0, ab));
  }

  TEST_CASE("stream is uniform by a chi-square test") {
    UniformStream stream(2024);
    constexpr int bins = 20;
    std::vector<std::uint64_t> counts(bins, 0);
    for (int i = 0; i < 200000; ++i) ++counts[static_cast<int>(stream.next() * bins)];
    const std::vector<double> expected(bins, 1.0 / bins);
    CHECK(stats::chi_square_statistic(counts, expected) < stats::chi_square_quantile(bins - 1, 0.999));
  }
}
