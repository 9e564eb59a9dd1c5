#include <doctest.h>

#include <cmath>
#include <set>

#include "boolperc/random.hpp"

using namespace boolperc;

TEST_CASE("philox known-answer vectors") {
  using B = Philox4x32::Block;
  CHECK(Philox4x32::apply(B{0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::apply(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::apply(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are deterministic and distinct") {
  RandomStream a(42), b(42), c(42, 1), d(43);
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    firsts.insert(x);
  }
  CHECK(firsts.size() == 100);
  RandomStream a2(42);
  CHECK(a2.next_u64() != c.next_u64());
  RandomStream a3(42);
  CHECK(a3.next_u64() != d.next_u64());
}

TEST_CASE("derive_seed separates experiments and indices") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t e = 0; e < 8; ++e)
    for (std::uint64_t i = 0; i < 200; ++i) seen.insert(derive_seed(7, e, i));
  CHECK(seen.size() == 8 * 200);
  CHECK(derive_seed(7, 1, 2) == derive_seed(7, 1, 2));
}

TEST_CASE("uniform, normal and poisson moments") {
  RandomStream rng(2024);
  const int n = 200000;
  double su = 0, su2 = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    su2 += u * u;
    const double g = rng.normal();
    sn += g;
    sn2 += g * g;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(su2 / n - (su / n) * (su / n) == doctest::Approx(1.0 / 12).epsilon(0.02));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));

  for (double mean : {0.0, 0.7, 5.0, 29.0, 31.0, 300.0, 1e5}) {
    const int m = 20000;
    double s = 0, s2 = 0;
    for (int i = 0; i < m; ++i) {
      const double k = static_cast<double>(rng.poisson(mean));
      s += k;
      s2 += k * k;
    }
    const double avg = s / m;
    const double var = s2 / m - avg * avg;
    CAPTURE(mean);
    CHECK(std::abs(avg - mean) <= 5.0 * std::sqrt(std::max(mean, 1e-12) / m) + 1e-12);
    if (mean > 0) CHECK(var == doctest::Approx(mean).epsilon(0.06));
  }
}

TEST_CASE("poisson rejects bad means") {
  RandomStream rng(1);
  CHECK_THROWS(rng.poisson(-1.0));
  CHECK_THROWS(rng.poisson(std::nan("")));
}
