// Permutation and noncrossing-partition layer, checked against brute force.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "rqc/perms.hpp"

using namespace rqc;

namespace {

// all set partitions of {0..p-1} via restricted growth strings
std::vector<Partition> all_set_partitions(int p) {
  std::vector<Partition> out;
  std::vector<int> rgs(p, 0);
  auto emit = [&] {
    int nb = *std::max_element(rgs.begin(), rgs.end()) + 1;
    Partition part(nb);
    for (int i = 0; i < p; ++i) part[rgs[i]].push_back(i);
    out.push_back(part);
  };
  auto rec = [&](auto&& self, int i, int maxu) -> void {
    if (i == p) {
      emit();
      return;
    }
    for (int b = 0; b <= maxu + 1; ++b) {
      rgs[i] = b;
      self(self, i + 1, std::max(maxu, b));
    }
  };
  if (p == 0)
    out.push_back({});
  else
    rec(rec, 0, -1);
  return out;
}

bool crossing(const Partition& part) {
  int p = 0;
  for (const auto& b : part) p += b.size();
  std::vector<int> blk(p);
  for (std::size_t k = 0; k < part.size(); ++k)
    for (int e : part[k]) blk[e] = k;
  for (int a = 0; a < p; ++a)
    for (int b = a + 1; b < p; ++b)
      for (int c = b + 1; c < p; ++c)
        for (int d = c + 1; d < p; ++d)
          if (blk[a] == blk[c] && blk[b] == blk[d] && blk[a] != blk[b])
            return true;
  return false;
}

std::set<Perm> brute_geodesic_set(const Perm& beta) {
  std::set<Perm> out;
  const Perm id = identity_perm(beta.size());
  for (const auto& a : all_permutations(beta.size()))
    if (is_on_geodesic(id, a, beta)) out.insert(a);
  return out;
}

}  // namespace

TEST_CASE("basic permutation algebra") {
  Perm a = perm_from_one_based({2, 3, 1});
  REQUIRE(a == Perm{1, 2, 0});
  REQUIRE(compose(a, inverse_perm(a)) == identity_perm(3));
  REQUIRE(compose(inverse_perm(a), a) == identity_perm(3));
  Perm b = perm_from_one_based({2, 1, 3});
  REQUIRE(compose(a, b) == Perm{2, 1, 0});  // a(b(i))
  REQUIRE_THROWS_AS(perm_from_one_based({1, 1, 3}), std::invalid_argument);
  REQUIRE_THROWS_AS(perm_from_one_based({0, 1, 2}), std::invalid_argument);
}

TEST_CASE("full cycle maps i to i-1") {
  REQUIRE(full_cycle(5) == perm_from_one_based({5, 1, 2, 3, 4}));
  REQUIRE(cycle_count(full_cycle(7)) == 1);
  REQUIRE(length(full_cycle(7)) == 6);
}

TEST_CASE("cycle statistics") {
  Perm s = perm_from_one_based({2, 1, 4, 5, 3, 6});
  REQUIRE(cycle_count(s) == 3);
  REQUIRE(cycle_type(s) == std::vector<int>{3, 2, 1});
  REQUIRE(even_cycle_count(s) == 1);
  REQUIRE(length(s) == 3);
  auto cyc = cycle_decomposition(s);
  REQUIRE(cyc.size() == 3);
  REQUIRE(cyc[0] == std::vector<int>{0, 1});
  REQUIRE(cyc[1] == std::vector<int>{2, 3, 4});
  REQUIRE(cyc[2] == std::vector<int>{5});
}

TEST_CASE("length is a conjugation-invariant metric") {
  for (const auto& s : all_permutations(5)) {
    REQUIRE(length(s) == length(inverse_perm(s)));
    REQUIRE(length(s) == 5 - cycle_count(s));
  }
  auto perms4 = all_permutations(4);
  for (const auto& s : perms4)
    for (const auto& t : perms4) {
      REQUIRE(cycle_count(compose(s, t)) == cycle_count(compose(t, s)));
      REQUIRE(length(compose(s, t)) <= length(s) + length(t));
    }
}

TEST_CASE("geodesic predicate") {
  // one-line [3,4,1,2] is the square of the 4-cycle: lengths 2 + 3 != 3
  Perm g = full_cycle(4);
  Perm mid = perm_from_one_based({3, 4, 1, 2});
  REQUIRE(length(mid) == 2);
  REQUIRE_FALSE(is_on_geodesic(identity_perm(4), mid, g));
  REQUIRE(is_on_geodesic(identity_perm(4), identity_perm(4), g));
  REQUIRE(is_on_geodesic(identity_perm(4), g, g));
  Perm t01 = perm_from_one_based({2, 1, 3, 4});
  REQUIRE(is_on_geodesic(identity_perm(4), t01, g));
}

TEST_CASE("catalan numbers") {
  REQUIRE(catalan(0) == 1);
  REQUIRE(catalan(1) == 1);
  REQUIRE(catalan(2) == 2);
  REQUIRE(catalan(3) == 5);
  REQUIRE(catalan(6) == 132);
  REQUIRE(catalan(10) == 16796);
  REQUIRE(catalan(12) == 208012);
  REQUIRE(catalan(30) == bigint("3814986502092304"));
  REQUIRE_THROWS_AS(catalan(33), std::domain_error);
  REQUIRE_THROWS_AS(catalan(-1), std::domain_error);
}

TEST_CASE("integer partitions") {
  REQUIRE(integer_partitions(5).size() == 7);
  REQUIRE(integer_partitions(7).size() == 15);
  auto parts = integer_partitions(4);
  REQUIRE(parts.front() == std::vector<int>{4});
  REQUIRE(parts.back() == std::vector<int>{1, 1, 1, 1});
  for (const auto& t : integer_partitions(8))
    REQUIRE(cycle_type(perm_from_cycle_type(t)) == t);
}

TEST_CASE("noncrossing partitions match the brute-force filter") {
  for (int p = 0; p <= 8; ++p) {
    const auto& ncs = noncrossing_partitions(p);
    REQUIRE(bigint(ncs.size()) == catalan(p));
    std::set<Partition> got(ncs.begin(), ncs.end());
    REQUIRE(got.size() == ncs.size());
    std::set<Partition> expect;
    for (const auto& part : all_set_partitions(p))
      if (!crossing(part)) expect.insert(part);
    REQUIRE(got == expect);
  }
  REQUIRE(bigint(noncrossing_partitions(10).size()) == catalan(10));
  REQUIRE_THROWS_AS(noncrossing_partitions(13), std::domain_error);
}

TEST_CASE("geodesic enumeration for the full cycle") {
  for (int p = 1; p <= 7; ++p) {
    auto got = enumerate_geodesic(full_cycle(p));
    REQUIRE(bigint(got.size()) == catalan(p));
    std::set<Perm> gotset(got.begin(), got.end());
    REQUIRE(gotset.size() == got.size());
    REQUIRE(gotset == brute_geodesic_set(full_cycle(p)));
  }
  REQUIRE_THROWS_AS(enumerate_geodesic(perm_from_one_based({2, 3, 1, 4})),
                    std::invalid_argument);
}

TEST_CASE("geodesic interval for arbitrary endpoints") {
  std::vector<std::vector<int>> types = {{3, 2, 1}, {2, 2}, {4, 2}, {6}, {5, 1}};
  for (const auto& type : types) {
    Perm beta = perm_from_cycle_type(type);
    auto got = geodesic_interval(beta);
    bigint expect_count = 1;
    for (int r : type) expect_count *= catalan(r);
    REQUIRE(bigint(got.size()) == expect_count);
    std::set<Perm> gotset(got.begin(), got.end());
    REQUIRE(gotset.size() == got.size());
    REQUIRE(gotset == brute_geodesic_set(beta));
  }
}

TEST_CASE("geodesic elements satisfy the even-cycle count identity") {
  for (int p = 1; p <= 7; ++p) {
    const Perm g = full_cycle(p);
    const Perm gi = inverse_perm(g);
    for (const auto& a : enumerate_geodesic(g))
      REQUIRE(cycle_count(compose(g, a)) == 1 + even_cycle_count(a));
    for (const auto& a : geodesic_interval(gi))
      REQUIRE(cycle_count(compose(gi, a)) == 1 + even_cycle_count(a));
  }
  // fails off the geodesic: the square of the 4-cycle
  Perm sq = perm_from_one_based({3, 4, 1, 2});
  REQUIRE(cycle_count(compose(inverse_perm(full_cycle(4)), sq)) !=
          1 + even_cycle_count(sq));
}

TEST_CASE("mobius weights") {
  REQUIRE(mobius(identity_perm(4)) == 1);
  REQUIRE(mobius(perm_from_cycle_type({2})) == -1);
  REQUIRE(mobius(perm_from_cycle_type({3})) == 2);
  REQUIRE(mobius(perm_from_cycle_type({4})) == -5);
  REQUIRE(mobius(perm_from_cycle_type({5})) == 14);
  REQUIRE(mobius(perm_from_cycle_type({2, 2})) == 1);
  REQUIRE(mobius(perm_from_cycle_type({3, 2})) == -2);
}

TEST_CASE("kreweras complement") {
  const Perm g = full_cycle(4);
  const Perm id = identity_perm(4);
  REQUIRE(kreweras(id, g) == g);
  REQUIRE(kreweras(g, g) == id);
  for (const auto& a : enumerate_geodesic(g)) {
    Perm k = kreweras(a, g);
    REQUIRE(is_on_geodesic(id, k, g));
    REQUIRE(length(a) + length(k) == length(g));
    // double complement is conjugation by the full cycle
    REQUIRE(kreweras(k, g) == compose(inverse_perm(g), compose(a, g)));
  }
  REQUIRE_THROWS_AS(kreweras(perm_from_one_based({3, 4, 1, 2}), g),
                    std::domain_error);
}

TEST_CASE("meander loop counts") {
  for (int q : {1, 2, 3, 4, 5}) {
    const Perm id = identity_perm(q);
    const Perm g = full_cycle(q);
    REQUIRE(meander_loops(id, id) == 1);
    REQUIRE(meander_loops(id, g) == q);
  }
  const Perm tau = full_cycle(2);
  REQUIRE(meander_loops(tau, tau) == 1);
  // loops - |a1| - |a2| - 1 is always even
  for (int q = 1; q <= 5; ++q) {
    auto geo = enumerate_geodesic(full_cycle(q));
    for (const auto& a1 : geo)
      for (const auto& a2 : geo) {
        int e = meander_loops(a1, a2) - length(a1) - length(a2) - 1;
        REQUIRE(e % 2 == 0);
      }
  }
}

TEST_CASE("noncrossing partitions to permutations") {
  // increasing-order block cycles are geodesic for the increasing full
  // cycle, i.e. for the inverse of the canonical one
  for (int p = 1; p <= 6; ++p) {
    std::set<Perm> viancs;
    for (const auto& part : noncrossing_partitions(p))
      viancs.insert(perm_from_noncrossing(part, p));
    std::set<Perm> viageo;
    for (const auto& a : enumerate_geodesic(full_cycle(p)))
      viageo.insert(inverse_perm(a));
    REQUIRE(viancs == viageo);
  }
}

TEST_CASE("all permutations") {
  REQUIRE(all_permutations(0).size() == 1);
  REQUIRE(all_permutations(4).size() == 24);
  REQUIRE(all_permutations(6).size() == 720);
  REQUIRE_THROWS_AS(all_permutations(9), std::domain_error);
}
