// Exact Weingarten tables and expected-moment formulas, checked against
// closed forms, the convolution identity, and limit values from the free
// cumulant route.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rqc/perms.hpp"
#include "rqc/weingarten.hpp"

using namespace rqc;

namespace {

double to_double(const bigrat& r) { return r.convert_to<double>(); }

// left side of the convolution identity at (sigma, pi)
bigrat convolution(const WeingartenTable& t, const Perm& sigma, const Perm& pi) {
  const int p = sigma.size();
  bigint N = t.N;
  std::vector<bigint> npow(p + 1);
  npow[0] = 1;
  for (int i = 1; i <= p; ++i) npow[i] = npow[i - 1] * N;
  const Perm si = inverse_perm(sigma);
  bigrat sum = 0;
  for (const auto& tau : all_permutations(p))
    sum += t.wg(cycle_type(compose(si, tau))) *
           bigrat(npow[cycle_count(compose(inverse_perm(tau), pi))]);
  return sum;
}

}  // namespace

TEST_CASE("order one table") {
  for (long long N : {1, 2, 5, 10}) {
    auto t = weingarten_table(1, N);
    REQUIRE(t.wg(std::vector<int>{1}) == bigrat(1, N));
  }
}

TEST_CASE("order two closed form") {
  for (long long N : {2, 3, 5, 8, 20}) {
    auto t = weingarten_table(2, N);
    REQUIRE(t.wg(std::vector<int>{1, 1}) == bigrat(1, N * N - 1));
    REQUIRE(t.wg(std::vector<int>{2}) == -bigrat(1, N * (N * N - 1)));
  }
}

TEST_CASE("order three closed form") {
  for (long long N : {3, 4, 6, 10}) {
    auto t = weingarten_table(3, N);
    bigint den = bigint(N) * (N * N - 1) * (N * N - 4);
    REQUIRE(t.wg(std::vector<int>{1, 1, 1}) == bigrat(N * N - 2, den));
    REQUIRE(t.wg(std::vector<int>{2, 1}) == -bigrat(N, den));
    REQUIRE(t.wg(std::vector<int>{3}) == bigrat(2, den));
  }
}

TEST_CASE("convolution identity holds exactly") {
  for (int p = 1; p <= 5; ++p) {
    for (long long N : {(long long)p, (long long)p + 3}) {
      auto t = weingarten_table(p, N);
      const Perm id = identity_perm(p);
      for (const auto& pi : all_permutations(p))
        REQUIRE(convolution(t, id, pi) == (pi == id ? 1 : 0));
    }
  }
  // a non-identity sigma as well
  auto t = weingarten_table(4, 6);
  Perm sigma = perm_from_cycle_type({2, 1, 1});
  for (const auto& pi : all_permutations(4))
    REQUIRE(convolution(t, sigma, pi) == (pi == sigma ? 1 : 0));
}

TEST_CASE("asymptotics approach the mobius weights") {
  for (int p = 2; p <= 5; ++p) {
    for (const auto& type : integer_partitions(p)) {
      Perm rep = perm_from_cycle_type(type);
      double mob = mobius(rep).convert_to<double>();
      int expo = p + length(rep);
      auto scaled = [&](long long N) {
        bigrat r = weingarten_table(p, N).wg(type);
        for (int i = 0; i < expo; ++i) r *= N;
        return to_double(r);
      };
      double e50 = std::abs(scaled(50) - mob);
      double e100 = std::abs(scaled(100) - mob);
      double e200 = std::abs(scaled(200) - mob);
      if (e50 < 1e-9) continue;
      // correction decays like N^-2: quadrupling accuracy per doubling
      REQUIRE(e100 < 0.30 * e50);
      REQUIRE(e200 < 0.30 * e100);
    }
  }
}

TEST_CASE("frozen second moment of the partially transposed Choi matrix") {
  REQUIRE(exact_moment_choi_gamma(4, 2, 3, 2) == bigrat(11, 21));
}

TEST_CASE("first moments equal the trace normalizations") {
  const std::vector<std::array<long long, 3>> grid = {
      {2, 2, 3}, {3, 2, 5}, {4, 3, 7}, {5, 2, 10}, {2, 3, 6}};
  for (auto [n, k, d] : grid) {
    REQUIRE(exact_moment_choi_gamma(n, k, d, 1) == bigrat(1, k));
    REQUIRE(exact_moment_choi(n, k, d, 1) == bigrat(1, k));
    REQUIRE(exact_moment_ccgamma(n, k, d, 1) == bigrat(1, n));
    REQUIRE(exact_moment_mgamma(n, k, d, 1) == bigrat(d, n * k));
  }
}

TEST_CASE("partial transpose preserves the first two Choi moments") {
  const std::vector<std::array<long long, 3>> grid = {
      {2, 2, 3}, {3, 2, 5}, {4, 3, 7}};
  for (auto [n, k, d] : grid)
    for (int p : {1, 2})
      REQUIRE(exact_moment_choi_gamma(n, k, d, p) ==
              exact_moment_choi(n, k, d, p));
}

TEST_CASE("direct and bucketed paths agree") {
  for (auto m : {ExactModel::choi_gamma, ExactModel::choi, ExactModel::ccgamma,
                 ExactModel::mgamma}) {
    for (int p : {3, 4, 5}) {
      REQUIRE(exact_moment_direct(m, 3, 2, 4, p) ==
              exact_moment_bucketed(m, 3, 2, 4, p));
      REQUIRE(exact_moment_direct(m, 2, 3, 5, p) ==
              exact_moment_bucketed(m, 2, 3, 5, p));
    }
  }
}

TEST_CASE("order seven bucketed path approaches its limit moment") {
  // limit m7 at k=2, t=0.1 from the free cumulant route
  const double m7 = 670009.0 / 8000000;
  double e50 = std::abs(to_double(exact_moment_choi_gamma(50, 2, 10, 7)) - m7);
  double e100 = std::abs(to_double(exact_moment_choi_gamma(100, 2, 20, 7)) - m7);
  REQUIRE(e50 < 0.15 * m7);
  REQUIRE(e100 < 0.65 * e50);
}

TEST_CASE("pure output moments approach their limit law") {
  // m2 equals d/(nk) exactly at every n; m3 -> 23/500 at k=2, t=0.1
  for (long long n : {50, 100, 200})
    REQUIRE(exact_moment_mgamma(n, 2, n / 5, 2) == bigrat(n / 5, 2 * n));
  double v3a = to_double(exact_moment_mgamma(100, 2, 20, 3));
  double v3b = to_double(exact_moment_mgamma(200, 2, 40, 3));
  REQUIRE(std::abs(v3a - 0.046) < 0.01);
  REQUIRE(std::abs(v3b - 0.046) < std::abs(v3a - 0.046));
}

TEST_CASE("large-n moments approach the limit law values") {
  // limit moments from the free cumulant route at k=2, t=0.1
  const double m2 = 13.0 / 40, m3 = 23.0 / 100, m6 = 333653.0 / 3200000;
  // d = t n k with t = 0.1, k = 2
  auto vat = [](long long n, int p) {
    return to_double(exact_moment_choi_gamma(n, 2, n / 5, p));
  };
  double e2a = std::abs(vat(400, 2) - m2), e2b = std::abs(vat(1600, 2) - m2);
  REQUIRE(e2a < 0.02 * m2);
  REQUIRE(e2b < 0.3 * e2a);
  double e3a = std::abs(vat(400, 3) - m3), e3b = std::abs(vat(1600, 3) - m3);
  REQUIRE(e3a < 0.02 * m3);
  REQUIRE(e3b < 0.3 * e3a);
  double e6a = std::abs(vat(50, 6) - m6), e6b = std::abs(vat(100, 6) - m6);
  REQUIRE(e6a < 0.1 * m6);
  REQUIRE(e6b < 0.65 * e6a);
}

TEST_CASE("complementary model moments match their limits") {
  // odd moments decay to zero, the second tends to t
  double v3a = to_double(exact_moment_ccgamma(100, 2, 20, 3));
  double v3b = to_double(exact_moment_ccgamma(200, 2, 40, 3));
  REQUIRE(std::abs(v3a) < 0.05);
  REQUIRE(std::abs(v3b) < std::abs(v3a));
  double v2a = to_double(exact_moment_ccgamma(100, 2, 20, 2));
  double v2b = to_double(exact_moment_ccgamma(200, 2, 40, 2));
  REQUIRE(std::abs(v2a - 0.1) < 0.02);
  REQUIRE(std::abs(v2b - 0.1) < std::abs(v2a - 0.1));
}

TEST_CASE("dimension and order guards") {
  REQUIRE_THROWS_AS(weingarten_table(8, 30), std::domain_error);
  REQUIRE_THROWS_AS(weingarten_table(4, 3), std::domain_error);
  REQUIRE_THROWS_AS(weingarten_table(0, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(exact_moment_choi_gamma(2, 2, 5, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(exact_moment_choi_gamma(2, 2, 0, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(exact_moment_choi_gamma(2, 2, 3, 8), std::domain_error);
  REQUIRE_THROWS_AS(exact_moment_choi_gamma(2, 2, 3, 7), std::domain_error);
  REQUIRE_THROWS_AS(exact_moment_choi_gamma(2, 2, 3, 0), std::invalid_argument);
}

TEST_CASE("tables are cached and consistent") {
  auto a = weingarten_table(4, 9);
  auto b = weingarten_table(4, 9);
  REQUIRE(a.values == b.values);
  REQUIRE(wg(perm_from_cycle_type({2, 2}), 9) == a.wg(std::vector<int>{2, 2}));
}