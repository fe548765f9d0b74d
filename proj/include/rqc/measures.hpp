#pragma once
// Limiting spectral measures of the four matrix models, free convolution
// closed forms, moment/cumulant transforms, and the combinatorial limit
// moment routes. Densities carry a cached Gauss-Legendre quadrature with a
// sin^2 substitution that absorbs the square-root edges.

#include <cmath>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rqc/perms.hpp"

namespace rqc {

inline constexpr int kQuadratureNodes = 2048;
inline constexpr double kAtomMassTol = 1e-14;

// nodes and weights on [-1,1], cached by node count
inline const std::pair<std::vector<double>, std::vector<double>>&
gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("node count must be positive");
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on the Legendre polynomial
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1, p1 = 0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
      }
      pp = n * (z * p0 - p1) / (z * z - 1);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1 - z * z) * pp * pp);
  }
  return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

struct Atom {
  double location = 0;
  double mass = 0;
};

struct SpectralMeasure {
  std::vector<Atom> atoms;
  bool has_density = false;
  double support_lo = 0;
  double support_hi = 0;
  std::function<double(double)> density;

  // quadrature nodes/weights for the a.c. part, fixed at construction
  std::vector<double> qx, qw;

  double total_mass() const { return moment(0); }

  double moment(int p) const {
    double m = 0;
    for (const auto& a : atoms) m += a.mass * std::pow(a.location, p);
    for (std::size_t i = 0; i < qx.size(); ++i) m += qw[i] * std::pow(qx[i], p);
    return m;
  }

  double variance() const {
    double m1 = moment(1);
    return moment(2) - m1 * m1;
  }

  // largest absolute support point
  double norm() const {
    bool any = false;
    double r = 0;
    for (const auto& a : atoms)
      if (a.mass > 0) {
        r = std::max(r, std::abs(a.location));
        any = true;
      }
    if (has_density) {
      r = std::max({r, std::abs(support_lo), std::abs(support_hi)});
      any = true;
    }
    if (!any) throw std::domain_error("norm of an empty measure");
    return r;
  }
};

inline double norm(const SpectralMeasure& mu) { return mu.norm(); }

namespace detail {

inline void append_atom(std::vector<Atom>& atoms, double loc, double mass) {
  if (mass > kAtomMassTol) atoms.push_back({loc, mass});
}

// builds the measure and its quadrature; the substitution x = lo+(hi-lo)
// sin^2(theta) clusters nodes at both edges where the densities have
// square-root behaviour
inline SpectralMeasure make_measure(std::vector<Atom> atoms, double lo,
                                    double hi,
                                    std::function<double(double)> dens) {
  SpectralMeasure mu;
  mu.atoms = std::move(atoms);
  if (dens && hi - lo > 1e-13) {
    mu.has_density = true;
    mu.support_lo = lo;
    mu.support_hi = hi;
    auto raw = std::move(dens);
    mu.density = [raw, lo, hi](double x) {
      if (x < lo || x > hi) return 0.0;
      return std::max(0.0, raw(x));
    };
    const auto& [gx, gw] = gauss_legendre(kQuadratureNodes);
    mu.qx.resize(gx.size());
    mu.qw.resize(gx.size());
    for (std::size_t i = 0; i < gx.size(); ++i) {
      double theta = M_PI / 4 * (gx[i] + 1);
      double s = std::sin(theta);
      double x = lo + (hi - lo) * s * s;
      mu.qx[i] = x;
      mu.qw[i] = gw[i] * (M_PI / 4) * (hi - lo) * std::sin(2 * theta) *
                 mu.density(x);
    }
  }
  return mu;
}

inline void check_unit_interval(double v, const char* name) {
  if (!(v >= 0 && v <= 1))
    throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

inline void check_open_unit_interval(double v, const char* name) {
  if (!(v > 0 && v < 1))
    throw std::invalid_argument(std::string(name) + " must lie in (0,1)");
}

}  // namespace detail

// endpoints of the multiplicative free convolution support, (minus, plus)
inline std::pair<double, double> phi_pm(double s, double t) {
  detail::check_unit_interval(s, "s");
  detail::check_unit_interval(t, "t");
  double mid = s + t - 2 * s * t;
  double rad = 2 * std::sqrt(std::max(0.0, s * t * (1 - s) * (1 - t)));
  return {mid - rad, mid + rad};
}

// endpoints of the additive convolution power support, (minus, plus)
inline std::pair<double, double> gamma_pm(double s, double T) {
  detail::check_unit_interval(s, "s");
  if (T < 1) throw std::domain_error("convolution power must be >= 1");
  double mid = (T - 2) * s + 1;
  double rad = 2 * std::sqrt(std::max(0.0, (T - 1) * s * (1 - s)));
  return {mid - rad, mid + rad};
}

// free additive convolution power b_s^{boxplus T}
inline SpectralMeasure bernoulli_boxplus_power(double s, double T) {
  detail::check_unit_interval(s, "s");
  if (T < 1) throw std::domain_error("convolution power must be >= 1");
  auto [glo, ghi] = gamma_pm(s, T);
  std::vector<Atom> atoms;
  detail::append_atom(atoms, 0.0, std::max(0.0, 1 - T * s));
  detail::append_atom(atoms, T, std::max(0.0, 1 - T * (1 - s)));
  if (ghi - glo <= 1e-13)  // T = 1 or degenerate s: atoms only
    return detail::make_measure(std::move(atoms), 0, 0, nullptr);
  auto dens = [T, glo, ghi](double x) {
    return T * std::sqrt(std::max(0.0, (ghi - x) * (x - glo))) /
           (2 * M_PI * x * (T - x));
  };
  return detail::make_measure(std::move(atoms), glo, ghi, dens);
}

// free multiplicative convolution b_s boxtimes b_t
inline SpectralMeasure bernoulli_boxtimes(double s, double t) {
  auto [plo, phi] = phi_pm(s, t);
  std::vector<Atom> atoms;
  detail::append_atom(atoms, 0.0, 1 - std::min(s, t));
  detail::append_atom(atoms, 1.0, std::max(0.0, s + t - 1));
  if (phi - plo <= 1e-13)
    return detail::make_measure(std::move(atoms), 0, 0, nullptr);
  auto dens = [plo, phi](double x) {
    return std::sqrt(std::max(0.0, (phi - x) * (x - plo))) /
           (2 * M_PI * x * (1 - x));
  };
  return detail::make_measure(std::move(atoms), plo, phi, dens);
}

// semicircle law with the given mean and scale sigma (support radius 2 sigma)
inline SpectralMeasure semicircle(double mean, double sigma) {
  if (sigma < 0) throw std::invalid_argument("negative scale");
  if (sigma <= 1e-13) {
    std::vector<Atom> atoms{{mean, 1.0}};
    return detail::make_measure(std::move(atoms), 0, 0, nullptr);
  }
  auto dens = [mean, sigma](double x) {
    return std::sqrt(std::max(0.0, 4 * sigma * sigma - (x - mean) * (x - mean))) /
           (2 * M_PI * sigma * sigma);
  };
  return detail::make_measure({}, mean - 2 * sigma, mean + 2 * sigma, dens);
}

// image under x -> c x, c > 0
inline SpectralMeasure dilate(const SpectralMeasure& mu, double c) {
  if (!(c > 0)) throw std::invalid_argument("dilation factor must be positive");
  std::vector<Atom> atoms;
  for (const auto& a : mu.atoms) atoms.push_back({c * a.location, a.mass});
  if (!mu.has_density)
    return detail::make_measure(std::move(atoms), 0, 0, nullptr);
  auto base = mu.density;
  auto dens = [base, c](double y) { return base(y / c) / c; };
  return detail::make_measure(std::move(atoms), c * mu.support_lo,
                              c * mu.support_hi, dens);
}

// symmetric square root: pushes mass at x to equal masses at +-sqrt(x);
// the a.c. part must be supported on an interval starting at 0, otherwise
// the image would have interior edges the cached quadrature cannot resolve
inline SpectralMeasure symmetric_sqrt(const SpectralMeasure& mu) {
  if (mu.has_density && std::abs(mu.support_lo) > 1e-9)
    throw std::domain_error(
        "symmetric square root needs a.c. support starting at zero");
  std::vector<Atom> atoms;
  for (const auto& a : mu.atoms) {
    if (a.location < -1e-12)
      throw std::domain_error("symmetric square root needs nonnegative support");
    if (a.location <= 1e-12) {
      detail::append_atom(atoms, 0.0, a.mass);
    } else {
      double r = std::sqrt(a.location);
      detail::append_atom(atoms, r, a.mass / 2);
      detail::append_atom(atoms, -r, a.mass / 2);
    }
  }
  if (!mu.has_density)
    return detail::make_measure(std::move(atoms), 0, 0, nullptr);
  double hi = std::sqrt(std::max(0.0, mu.support_hi));
  auto base = mu.density;
  auto dens = [base](double y) { return std::abs(y) * base(y * y); };
  return detail::make_measure(std::move(atoms), -hi, hi, dens);
}

// limit law of the partially transposed Choi matrix
inline SpectralMeasure mu_c_gamma(int k, double t) {
  if (k < 2) throw std::invalid_argument("output dimension k must be >= 2");
  detail::check_open_unit_interval(t, "t");
  const double s = (k + 1) / (2.0 * k);
  auto [plo, phi] = phi_pm(s, t);
  const double lo = 2 * plo - 1, hi = 2 * phi - 1;
  std::vector<Atom> atoms;
  detail::append_atom(atoms, -1.0, std::max(0.0, t - s) / t);
  detail::append_atom(atoms, 1.0, std::max(0.0, s + t - 1) / t);
  auto dens = [lo, hi, t](double x) {
    return std::sqrt(std::max(0.0, (hi - x) * (x - lo))) /
           (2 * M_PI * t * (1 - x) * (1 + x));
  };
  return detail::make_measure(std::move(atoms), lo, hi, dens);
}

// limit law of the Choi matrix itself: D_{kt} of b_{1/k^2}^{boxplus 1/t}
inline SpectralMeasure mu_c(int k, double t) {
  if (k < 2) throw std::invalid_argument("output dimension k must be >= 2");
  detail::check_open_unit_interval(t, "t");
  SpectralMeasure m = dilate(bernoulli_boxplus_power(1.0 / (k * k), 1.0 / t),
                             k * t);
  // the top atom sits at k exactly: k t / t accumulates rounding
  for (auto& a : m.atoms)
    if (a.location > 0.5) a.location = k;
  return m;
}

// limit law of the partially transposed complementary Choi matrix:
// symmetric square root of D_t applied to b_t^{boxplus 1/t}
inline SpectralMeasure mu_cc_gamma(double t) {
  detail::check_open_unit_interval(t, "t");
  SpectralMeasure m =
      symmetric_sqrt(dilate(bernoulli_boxplus_power(t, 1.0 / t), t));
  for (auto& a : m.atoms)
    if (a.location > 0.5)
      a.location = 1.0;
    else if (a.location < -0.5)
      a.location = -1.0;
  return m;
}

// limit law of the partially transposed pure output as k -> infinity
inline SpectralMeasure mu_m_gamma_limit(double t) {
  detail::check_open_unit_interval(t, "t");
  return semicircle(t, std::sqrt(t * (1 - t)));
}

struct FreeCumulants {
  int p_max = 0;
  std::vector<double> values;  // values[j-1] = kappa_j

  double kappa(int j) const {
    if (j < 1 || j > p_max) throw std::invalid_argument("cumulant order");
    return values[j - 1];
  }
};

// m_p as the sum over noncrossing partitions of products of block cumulants
inline double moments_from_cumulants(const FreeCumulants& kc, int p) {
  if (p < 0 || p > 12) throw std::domain_error("moment order limited to p <= 12");
  if (p == 0) return 1.0;
  if (p > kc.p_max) throw std::invalid_argument("cumulants not long enough");
  double m = 0;
  for (const auto& part : noncrossing_partitions(p)) {
    double prod = 1;
    for (const auto& b : part) prod *= kc.kappa(b.size());
    m += prod;
  }
  return m;
}

// inverse transform, solved recursively order by order
inline FreeCumulants cumulants_from_moments(const std::vector<double>& m,
                                            int p) {
  if (p < 1 || p > 12) throw std::domain_error("order limited to p <= 12");
  if (static_cast<int>(m.size()) < p)
    throw std::invalid_argument("moments not long enough");
  FreeCumulants kc;
  kc.p_max = p;
  kc.values.assign(p, 0.0);
  for (int n = 1; n <= p; ++n) {
    double rest = 0;
    for (const auto& part : noncrossing_partitions(n)) {
      if (part.size() == 1) continue;  // the full block carries kappa_n
      double prod = 1;
      for (const auto& b : part) prod *= kc.values[b.size() - 1];
      rest += prod;
    }
    kc.values[n - 1] = m[n - 1] - rest;
  }
  return kc;
}

// free cumulants of the Bernoulli law b_t (all moments equal t)
inline FreeCumulants bernoulli_cumulants(double t, int p) {
  return cumulants_from_moments(std::vector<double>(p, t), p);
}

// p-th moment of the finite-k pure output limit: k^{-p} sum over NC(p) of
// products f(r) = kappa_r(b_t) * (k for odd r, k^2 for even r)
inline double mu_m_gamma_moments(int k, double t, int p) {
  if (k < 1) throw std::invalid_argument("output dimension k must be >= 1");
  detail::check_open_unit_interval(t, "t");
  if (p < 0 || p > 12) throw std::domain_error("moment order limited to p <= 12");
  if (p == 0) return 1.0;
  const FreeCumulants kb = bernoulli_cumulants(t, p);
  double sum = 0;
  for (const auto& part : noncrossing_partitions(p)) {
    double prod = 1;
    for (const auto& b : part) {
      int r = b.size();
      prod *= kb.kappa(r) * (r % 2 == 1 ? k : static_cast<double>(k) * k);
    }
    sum += prod;
  }
  return sum / std::pow(k, p);
}

// p-th limit moment of the partially transposed Choi matrix as the double
// geodesic sum: over beta below the inverse full cycle and alpha below beta,
// t^{|beta|} k^{e(alpha)-#alpha} Mob(alpha^-1 beta)
inline double limit_moment_c_gamma(int k, double t, int p) {
  if (k < 2) throw std::invalid_argument("output dimension k must be >= 2");
  detail::check_open_unit_interval(t, "t");
  if (p < 1 || p > 10) throw std::domain_error("order limited to p <= 10");
  const Perm gi = inverse_perm(full_cycle(p));
  double sum = 0;
  for (const auto& beta : geodesic_interval(gi)) {
    const double tw = std::pow(t, length(beta));
    double inner = 0;
    for (const auto& alpha : geodesic_interval(beta)) {
      double kw = std::pow(k, even_cycle_count(alpha) - cycle_count(alpha));
      inner += kw * mobius(compose(inverse_perm(alpha), beta))
                        .convert_to<double>();
    }
    sum += tw * inner;
  }
  return sum;
}

// even-order limit moments of the complementary model at fixed k, as a sum
// over pairs of noncrossing permutations weighted by meander loop counts;
// odd orders vanish by symmetry and set the flag when requested
inline double limit_moment_ccgamma_fixed_k(int k, double t, int order,
                                           bool* odd_order = nullptr) {
  if (k < 2) throw std::invalid_argument("output dimension k must be >= 2");
  detail::check_open_unit_interval(t, "t");
  if (order < 0) throw std::invalid_argument("order must be nonnegative");
  if (odd_order) *odd_order = (order % 2 == 1);
  if (order % 2 == 1) return 0.0;
  if (order == 0) return 1.0;
  const int q = order / 2;
  if (q > 5) throw std::domain_error("order limited to 2q <= 10");
  const FreeCumulants kb = bernoulli_cumulants(t, q);
  auto kappa_of = [&](const Perm& a) {
    double prod = 1;
    for (const auto& c : cycle_decomposition(a)) prod *= kb.kappa(c.size());
    return prod;
  };
  const auto geo = enumerate_geodesic(full_cycle(q));
  double sum = 0;
  for (const auto& a1 : geo) {
    const double k1 = kappa_of(a1);
    const int l1 = length(a1);
    for (const auto& a2 : geo) {
      int e = meander_loops(a1, a2) - l1 - length(a2);
      sum += std::pow(k, e) * k1 * kappa_of(a2);
    }
  }
  return sum / (t * k);
}

// closed-form norms of the limit laws, matching the measure-level norm()
inline double norm_mu_c_gamma(int k, double t) {
  if (k < 2) throw std::invalid_argument("output dimension k must be >= 2");
  detail::check_open_unit_interval(t, "t");
  const double s = (k + 1) / (2.0 * k);
  if (t + s < 1) return 2 * phi_pm(s, t).second - 1;
  return 1.0;
}

inline double norm_mu_c(int k, double t) {
  if (k < 2) throw std::invalid_argument("output dimension k must be >= 2");
  detail::check_open_unit_interval(t, "t");
  if (t + 1.0 / (k * k) < 1) return k * phi_pm(1.0 / (k * k), t).second;
  return k;
}

inline double norm_mu_cc_gamma(double t) {
  detail::check_open_unit_interval(t, "t");
  if (t <= 0.5) return 2 * std::sqrt(t * (1 - t));
  return 1.0;
}

inline double norm_mu_m_gamma_limit(double t) {
  detail::check_open_unit_interval(t, "t");
  return t + 2 * std::sqrt(t * (1 - t));
}

}  // namespace rqc
