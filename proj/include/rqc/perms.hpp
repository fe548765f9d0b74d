#pragma once
// Permutations of {0..p-1} stored as image vectors, their cycle statistics,
// Cayley-distance geodesics, noncrossing partitions and related combinatorics.

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace rqc {

using bigint = boost::multiprecision::cpp_int;

// sigma[i] is the image of i under sigma
using Perm = std::vector<int>;

// blocks sorted by minimal element, each block ascending
using Partition = std::vector<std::vector<int>>;

inline void validate_perm(const Perm& s) {
  std::vector<char> seen(s.size(), 0);
  for (int v : s) {
    if (v < 0 || v >= static_cast<int>(s.size()) || seen[v])
      throw std::invalid_argument("not a permutation");
    seen[v] = 1;
  }
}

inline Perm identity_perm(int p) {
  if (p < 0) throw std::invalid_argument("negative size");
  Perm s(p);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

// builds a Perm from one-line notation on {1..p}
inline Perm perm_from_one_based(const std::vector<int>& img) {
  Perm s(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) s[i] = img[i] - 1;
  validate_perm(s);
  return s;
}

// (a o b)(i) = a(b(i))
inline Perm compose(const Perm& a, const Perm& b) {
  if (a.size() != b.size()) throw std::invalid_argument("size mismatch");
  Perm r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[b[i]];
  return r;
}

inline Perm inverse_perm(const Perm& a) {
  Perm r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[a[i]] = i;
  return r;
}

// cycles listed by minimal element, each in orbit order [c, s(c), s(s(c)), ...]
inline std::vector<std::vector<int>> cycle_decomposition(const Perm& s) {
  int p = s.size();
  std::vector<char> seen(p, 0);
  std::vector<std::vector<int>> cycles;
  for (int i = 0; i < p; ++i) {
    if (seen[i]) continue;
    std::vector<int> c;
    for (int j = i; !seen[j]; j = s[j]) {
      seen[j] = 1;
      c.push_back(j);
    }
    cycles.push_back(std::move(c));
  }
  return cycles;
}

inline int cycle_count(const Perm& s) {
  int p = s.size(), n = 0;
  std::vector<char> seen(p, 0);
  for (int i = 0; i < p; ++i) {
    if (seen[i]) continue;
    ++n;
    for (int j = i; !seen[j]; j = s[j]) seen[j] = 1;
  }
  return n;
}

// Cayley distance to the identity: p minus the number of cycles
inline int length(const Perm& s) {
  return static_cast<int>(s.size()) - cycle_count(s);
}

// cycle sizes in descending order
inline std::vector<int> cycle_type(const Perm& s) {
  std::vector<int> t;
  for (const auto& c : cycle_decomposition(s)) t.push_back(c.size());
  std::sort(t.begin(), t.end(), std::greater<int>());
  return t;
}

inline int even_cycle_count(const Perm& s) {
  int n = 0;
  for (const auto& c : cycle_decomposition(s))
    if (c.size() % 2 == 0) ++n;
  return n;
}

// the canonical full cycle i -> i-1 (mod p)
inline Perm full_cycle(int p) {
  if (p <= 0) throw std::invalid_argument("size must be positive");
  Perm s(p);
  for (int i = 0; i < p; ++i) s[i] = (i + p - 1) % p;
  return s;
}

// whether b lies on a Cayley geodesic between a and c
inline bool is_on_geodesic(const Perm& a, const Perm& b, const Perm& c) {
  const Perm ai = inverse_perm(a), bi = inverse_perm(b);
  return length(compose(ai, b)) + length(compose(bi, c)) ==
         length(compose(ai, c));
}

inline bigint catalan(int n) {
  if (n < 0 || n > 32) throw std::domain_error("catalan index out of range");
  static const std::vector<bigint> table = [] {
    std::vector<bigint> t(33);
    t[0] = 1;
    for (int i = 0; i < 32; ++i) t[i + 1] = t[i] * 2 * (2 * i + 1) / (i + 2);
    return t;
  }();
  return table[n];
}

// partitions of p into descending parts, largest-first lexicographic order
inline std::vector<std::vector<int>> integer_partitions(int p) {
  if (p < 0) throw std::invalid_argument("negative size");
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int rest, int maxpart) -> void {
    if (rest == 0) {
      out.push_back(cur);
      return;
    }
    for (int part = std::min(rest, maxpart); part >= 1; --part) {
      cur.push_back(part);
      self(self, rest - part, part);
      cur.pop_back();
    }
  };
  rec(rec, p, p);
  return out;
}

// canonical representative: consecutive blocks of the given sizes as cycles
inline Perm perm_from_cycle_type(const std::vector<int>& type) {
  int p = std::accumulate(type.begin(), type.end(), 0);
  Perm s = identity_perm(p);
  int base = 0;
  for (int len : type) {
    if (len <= 0) throw std::invalid_argument("cycle sizes must be positive");
    for (int j = 0; j < len; ++j) s[base + j] = base + (j + 1) % len;
    base += len;
  }
  return s;
}

inline std::vector<Perm> all_permutations(int p) {
  if (p < 0 || p > 8) throw std::domain_error("all_permutations limited to p <= 8");
  Perm s = identity_perm(p);
  std::vector<Perm> out;
  do {
    out.push_back(s);
  } while (std::next_permutation(s.begin(), s.end()));
  return out;
}

// product over cycles of (-1)^(r-1) * Cat(r-1), r the cycle size
inline bigint mobius(const Perm& s) {
  bigint m = 1;
  for (const auto& c : cycle_decomposition(s)) {
    int r = c.size();
    m *= catalan(r - 1);
    if (r % 2 == 0) m = -m;
  }
  return m;
}

// all noncrossing partitions of {0..p-1}; cached, p <= 12
inline const std::vector<Partition>& noncrossing_partitions(int p) {
  if (p < 0) throw std::invalid_argument("negative size");
  if (p > 12) throw std::domain_error("noncrossing_partitions limited to p <= 12");
  static std::map<int, std::vector<Partition>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  if (auto it = cache.find(p); it != cache.end()) return it->second;
  for (int q = 0; q <= p; ++q) {
    if (cache.count(q)) continue;
    std::vector<Partition> out;
    if (q == 0) {
      out.push_back({});
    } else {
      // split at k = max(block of 0): {1..k} carries a partition whose
      // block of k absorbs 0, {k+1..q-1} carries an independent one
      for (int k = 0; k < q; ++k) {
        const auto& left = cache.at(k);
        const auto& right = cache.at(q - 1 - k);
        for (const auto& L : left) {
          Partition head;
          if (k == 0) {
            head.push_back({0});
          } else {
            std::vector<int> joined{0};
            for (const auto& b : L) {
              if (b.back() == k - 1) {
                for (int e : b) joined.push_back(e + 1);
              }
            }
            head.push_back(std::move(joined));
            for (const auto& b : L) {
              if (b.back() == k - 1) continue;
              std::vector<int> nb;
              for (int e : b) nb.push_back(e + 1);
              head.push_back(std::move(nb));
            }
          }
          for (const auto& R : right) {
            Partition q2 = head;
            for (const auto& b : R) {
              std::vector<int> nb;
              for (int e : b) nb.push_back(e + k + 1);
              q2.push_back(std::move(nb));
            }
            out.push_back(std::move(q2));
          }
        }
      }
    }
    cache.emplace(q, std::move(out));
  }
  return cache.at(p);
}

// permutation whose cycles traverse each block in increasing order
inline Perm perm_from_noncrossing(const Partition& pi, int p) {
  Perm s = identity_perm(p);
  for (const auto& b : pi)
    for (std::size_t j = 0; j < b.size(); ++j) s[b[j]] = b[(j + 1) % b.size()];
  return s;
}

// all alpha with id - alpha - beta geodesic, built cycle by cycle: each
// orbit of beta carries an independent noncrossing partition whose blocks
// become cycles oriented along that orbit
inline std::vector<Perm> geodesic_interval(const Perm& beta) {
  int p = beta.size();
  auto cycles = cycle_decomposition(beta);
  std::vector<std::vector<std::vector<std::pair<int, int>>>> lifts;
  for (const auto& orbit : cycles) {
    int r = orbit.size();
    const auto& ncs = noncrossing_partitions(r);
    std::vector<std::vector<std::pair<int, int>>> cl;
    cl.reserve(ncs.size());
    for (const auto& part : ncs) {
      std::vector<std::pair<int, int>> assign;
      for (const auto& b : part)
        for (std::size_t j = 0; j < b.size(); ++j)
          assign.emplace_back(orbit[b[j]], orbit[b[(j + 1) % b.size()]]);
      cl.push_back(std::move(assign));
    }
    lifts.push_back(std::move(cl));
  }
  std::vector<Perm> out;
  std::vector<std::size_t> idx(lifts.size(), 0);
  while (true) {
    Perm s = identity_perm(p);
    for (std::size_t c = 0; c < lifts.size(); ++c)
      for (auto [from, to] : lifts[c][idx[c]]) s[from] = to;
    out.push_back(std::move(s));
    std::size_t c = 0;
    while (c < lifts.size() && ++idx[c] == lifts[c].size()) idx[c++] = 0;
    if (c == lifts.size()) break;
  }
  return out;
}

// geodesic enumeration for the canonical full cycle only
inline std::vector<Perm> enumerate_geodesic(const Perm& gamma) {
  if (gamma != full_cycle(gamma.size()))
    throw std::invalid_argument("enumerate_geodesic expects the canonical full cycle");
  return geodesic_interval(gamma);
}

// Kreweras complement alpha^{-1} gamma of a geodesic element
inline Perm kreweras(const Perm& alpha, const Perm& gamma) {
  if (!is_on_geodesic(identity_perm(alpha.size()), alpha, gamma))
    throw std::domain_error("kreweras requires a geodesic element");
  return compose(inverse_perm(alpha), gamma);
}

// number of cycles of a1 (a2^Kr)^{-1}, both w.r.t. the canonical full cycle
inline int meander_loops(const Perm& a1, const Perm& a2) {
  if (a1.size() != a2.size()) throw std::invalid_argument("size mismatch");
  const Perm g = full_cycle(a1.size());
  const Perm id = identity_perm(a1.size());
  if (!is_on_geodesic(id, a1, g) || !is_on_geodesic(id, a2, g))
    throw std::domain_error("meander_loops requires geodesic elements");
  return cycle_count(compose(a1, inverse_perm(kreweras(a2, g))));
}

}  // namespace rqc
