#pragma once
// Exact rational Weingarten function on S_p and the four expected-moment
// formulas for Choi-type matrices of Haar-random isometry channels. All
// arithmetic is exact; these serve as oracles for Monte Carlo sampling.

#include <array>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rqc/perms.hpp"

namespace rqc {

using bigrat = boost::multiprecision::cpp_rational;

struct WeingartenTable {
  int p = 0;
  long long N = 0;
  // keyed by cycle type, a descending integer partition of p
  std::map<std::vector<int>, bigrat> values;

  // lookup by cycle type; permutations go through cycle_type first
  const bigrat& wg(const std::vector<int>& type) const {
    auto it = values.find(type);
    if (it == values.end()) throw std::invalid_argument("unknown cycle type");
    return it->second;
  }
};

// Inverts the class-collapsed Gram system: with sigma = id, for every class
// c' with representative pi, sum_tau Wg(type(tau)) N^{#(tau^-1 pi)} must be
// delta_{id, pi}. Collapsing by class shrinks p=7 from 5040^2 to 15^2.
inline WeingartenTable weingarten_table(int p, long long N) {
  if (p < 1) throw std::invalid_argument("order must be positive");
  if (p > 7) throw std::domain_error("weingarten_table limited to p <= 7");
  if (N < p)
    throw std::domain_error("dimension below order: Gram system not invertible");

  static std::map<std::pair<int, long long>, WeingartenTable> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  if (auto it = cache.find({p, N}); it != cache.end()) return it->second;

  const auto classes = integer_partitions(p);
  const int nc = classes.size();
  std::map<std::vector<int>, int> class_index;
  for (int i = 0; i < nc; ++i) class_index[classes[i]] = i;

  std::vector<bigint> npow(p + 1);
  npow[0] = 1;
  for (int i = 1; i <= p; ++i) npow[i] = npow[i - 1] * N;

  // M[c'][c] = sum over tau in class c of N^{#(tau^-1 pi_{c'})}
  std::vector<std::vector<bigrat>> M(nc, std::vector<bigrat>(nc, 0));
  for (int cp = 0; cp < nc; ++cp) {
    const Perm pi = perm_from_cycle_type(classes[cp]);
    for (const auto& tau : all_permutations(p)) {
      int c = class_index.at(cycle_type(tau));
      M[cp][c] += bigrat(npow[cycle_count(compose(inverse_perm(tau), pi))]);
    }
  }

  std::vector<bigrat> rhs(nc, 0);
  rhs[class_index.at(std::vector<int>(p, 1))] = 1;

  // Gaussian elimination with exact rationals
  for (int col = 0; col < nc; ++col) {
    int piv = -1;
    for (int r = col; r < nc; ++r)
      if (M[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) throw std::domain_error("Gram system not invertible");
    std::swap(M[col], M[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (int r = 0; r < nc; ++r) {
      if (r == col || M[r][col] == 0) continue;
      bigrat f = M[r][col] / M[col][col];
      for (int c2 = col; c2 < nc; ++c2) M[r][c2] -= f * M[col][c2];
      rhs[r] -= f * rhs[col];
    }
  }

  WeingartenTable table;
  table.p = p;
  table.N = N;
  for (int i = 0; i < nc; ++i) table.values[classes[i]] = rhs[i] / M[i][i];
  return cache.emplace(std::make_pair(p, N), std::move(table)).first->second;
}

inline bigrat wg(const Perm& s, long long N) {
  return weingarten_table(static_cast<int>(s.size()), N).wg(cycle_type(s));
}

enum class ExactModel { choi_gamma, choi, ccgamma, mgamma };

namespace detail {

// exponents of n, k, d in the summand for a given (alpha, beta) pair;
// a* = (#alpha, #(gamma^-1 alpha), #(gamma alpha)), b* likewise for beta
inline std::array<int, 3> summand_exponents(ExactModel m, int a_id, int a_gi,
                                            int a_g, int b_id, int b_gi,
                                            int b_g) {
  switch (m) {
    case ExactModel::choi_gamma:
      return {a_id, a_gi, b_g};
    case ExactModel::choi:
      return {a_id, a_gi, b_gi};
    case ExactModel::ccgamma:
      return {a_gi, a_id, b_g};
    case ExactModel::mgamma:
      return {a_gi, a_g, b_id};
  }
  throw std::logic_error("unreachable");
}

inline bigrat moment_normalization(ExactModel m, long long n, long long k,
                                   long long d) {
  switch (m) {
    case ExactModel::choi_gamma:
    case ExactModel::choi:
      return bigrat(1, bigint(k) * d);
    case ExactModel::ccgamma:
      return bigrat(1, bigint(n) * d);
    case ExactModel::mgamma:
      return bigrat(1, bigint(n) * k);
  }
  throw std::logic_error("unreachable");
}

inline void check_moment_args(long long n, long long k, long long d, int p) {
  if (n < 1 || k < 1) throw std::invalid_argument("dimensions must be positive");
  if (d < 1 || d > n * k) throw std::invalid_argument("require 1 <= d <= n*k");
  if (p < 1) throw std::invalid_argument("moment order must be positive");
  if (p > 7) throw std::domain_error("exact moments limited to p <= 7");
}

// cycle type of inv_a composed with b, packed into base-8 digits
inline int packed_type_of_product(const Perm& inv_a, const Perm& b) {
  const int p = inv_a.size();
  std::array<int, 8> sizes{};
  std::array<char, 8> seen{};
  int ns = 0;
  for (int i = 0; i < p; ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (int j = i; !seen[j]; j = inv_a[b[j]]) {
      seen[j] = 1;
      ++len;
    }
    sizes[ns++] = len;
  }
  std::sort(sizes.begin(), sizes.begin() + ns, std::greater<int>());
  int code = 0;
  for (int i = 0; i < ns; ++i) code = code * 8 + sizes[i];
  return code;
}

struct BucketTable {
  // (n-exp, k-exp, d-exp, class index) -> number of (alpha, beta) pairs
  std::vector<std::pair<std::array<int, 4>, long long>> buckets;
  std::vector<std::vector<int>> classes;
};

// counts S_p x S_p summands by exponent signature; independent of (n,k,d)
inline const BucketTable& bucket_table(ExactModel m, int p) {
  static std::map<std::pair<int, int>, BucketTable> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  const auto key = std::make_pair(static_cast<int>(m), p);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  BucketTable bt;
  bt.classes = integer_partitions(p);
  std::map<int, int> code_to_class;
  for (std::size_t i = 0; i < bt.classes.size(); ++i) {
    int code = 0;
    for (int s : bt.classes[i]) code = code * 8 + s;
    code_to_class[code] = static_cast<int>(i);
  }

  const Perm g = full_cycle(p);
  const Perm gi = inverse_perm(g);
  const auto perms = all_permutations(p);
  struct Side {
    Perm inv;
    int c_id, c_gi, c_g;
  };
  std::vector<Side> sides;
  sides.reserve(perms.size());
  for (const auto& s : perms)
    sides.push_back({inverse_perm(s), cycle_count(s),
                     cycle_count(compose(gi, s)), cycle_count(compose(g, s))});

  std::map<std::array<int, 4>, long long> counts;
  for (std::size_t ia = 0; ia < perms.size(); ++ia) {
    const auto& A = sides[ia];
    for (std::size_t ib = 0; ib < perms.size(); ++ib) {
      const auto& B = sides[ib];
      auto e = summand_exponents(m, A.c_id, A.c_gi, A.c_g, B.c_id, B.c_gi, B.c_g);
      int cls = code_to_class.at(packed_type_of_product(A.inv, perms[ib]));
      ++counts[{e[0], e[1], e[2], cls}];
    }
  }
  bt.buckets.assign(counts.begin(), counts.end());
  return cache.emplace(key, std::move(bt)).first->second;
}

}  // namespace detail

// direct S_p x S_p sum, intended for p <= 5
inline bigrat exact_moment_direct(ExactModel m, long long n, long long k,
                                  long long d, int p) {
  detail::check_moment_args(n, k, d, p);
  const auto& table = weingarten_table(p, n * k);
  std::vector<bigint> npow(p + 1), kpow(p + 1), dpow(p + 1);
  npow[0] = kpow[0] = dpow[0] = 1;
  for (int i = 1; i <= p; ++i) {
    npow[i] = npow[i - 1] * n;
    kpow[i] = kpow[i - 1] * k;
    dpow[i] = dpow[i - 1] * d;
  }
  const Perm g = full_cycle(p);
  const Perm gi = inverse_perm(g);
  const auto perms = all_permutations(p);
  bigrat sum = 0;
  for (const auto& a : perms) {
    const Perm ainv = inverse_perm(a);
    const int a_id = cycle_count(a);
    const int a_gi = cycle_count(compose(gi, a));
    const int a_g = cycle_count(compose(g, a));
    for (const auto& b : perms) {
      auto e = detail::summand_exponents(
          m, a_id, a_gi, a_g, cycle_count(b), cycle_count(compose(gi, b)),
          cycle_count(compose(g, b)));
      sum += table.wg(cycle_type(compose(ainv, b))) * bigrat(npow[e[0]] * kpow[e[1]] * dpow[e[2]]);
    }
  }
  return detail::moment_normalization(m, n, k, d) * sum;
}

// cycle-type bucketed sum, the p in {6,7} path; exact same value as direct
inline bigrat exact_moment_bucketed(ExactModel m, long long n, long long k,
                                    long long d, int p) {
  detail::check_moment_args(n, k, d, p);
  const auto& table = weingarten_table(p, n * k);
  const auto& bt = detail::bucket_table(m, p);
  std::vector<bigint> npow(p + 1), kpow(p + 1), dpow(p + 1);
  npow[0] = kpow[0] = dpow[0] = 1;
  for (int i = 1; i <= p; ++i) {
    npow[i] = npow[i - 1] * n;
    kpow[i] = kpow[i - 1] * k;
    dpow[i] = dpow[i - 1] * d;
  }
  // per-class integer sums keep the rational arithmetic to one pass
  std::vector<bigint> class_sum(bt.classes.size(), 0);
  for (const auto& [key, count] : bt.buckets)
    class_sum[key[3]] += npow[key[0]] * kpow[key[1]] * dpow[key[2]] * count;
  bigrat sum = 0;
  for (std::size_t c = 0; c < bt.classes.size(); ++c)
    sum += table.wg(bt.classes[c]) * bigrat(class_sum[c]);
  return detail::moment_normalization(m, n, k, d) * sum;
}

inline bigrat exact_moment(ExactModel m, long long n, long long k, long long d,
                           int p) {
  return p <= 5 ? exact_moment_direct(m, n, k, d, p)
                : exact_moment_bucketed(m, n, k, d, p);
}

// E (kd)^-1 Tr (C^Gamma)^p for the partially transposed Choi matrix
inline bigrat exact_moment_choi_gamma(long long n, long long k, long long d,
                                      int p) {
  return exact_moment(ExactModel::choi_gamma, n, k, d, p);
}

// E (kd)^-1 Tr C^p for the Choi matrix itself
inline bigrat exact_moment_choi(long long n, long long k, long long d, int p) {
  return exact_moment(ExactModel::choi, n, k, d, p);
}

// E (nd)^-1 Tr (C_c^Gamma)^p for the complementary channel's Choi matrix
inline bigrat exact_moment_ccgamma(long long n, long long k, long long d,
                                   int p) {
  return exact_moment(ExactModel::ccgamma, n, k, d, p);
}

// E (nk)^-1 Tr (M^Gamma)^p for the partially transposed pure output
inline bigrat exact_moment_mgamma(long long n, long long k, long long d,
                                  int p) {
  return exact_moment(ExactModel::mgamma, n, k, d, p);
}

}  // namespace rqc
