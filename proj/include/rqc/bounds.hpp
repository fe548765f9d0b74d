#pragma once
// Renyi entropies, additivity-rate and capacity bounds, the PPT threshold,
// and the PPT-violation scans. Everything here is a closed-form scalar
// function of (p, k, t); the heavy entropy sums over k^2 atoms are collapsed
// to two-atom closed forms so large k stays cheap and exact.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rqc/measures.hpp"

namespace rqc {

inline constexpr double kEntropySupportTol = 1e-15;
inline constexpr double kProbabilitySumTol = 1e-10;

enum class log_base { natural, two };

// Entropy order plus output base. Internally everything is in nats; rescale
// at the reporting boundary only, so a report never mixes bases.
struct entropy_params {
  double p = 1.0;
  log_base base = log_base::natural;
};

// Converts a value in nats to the requested base.
inline double rescale_log(double nats, log_base base) {
  return base == log_base::two ? nats / std::numbers::ln2 : nats;
}

namespace detail {

inline void check_entropy_order(double p) {
  if (std::isnan(p) || p < 0)
    throw std::invalid_argument("entropy order p must be >= 0");
}

inline void check_output_dimension(long long k) {
  if (k < 2) throw std::invalid_argument("output dimension k must be >= 2");
}

// The limit-norm closed forms take int; reject k beyond that range instead
// of truncating. The pure entropy helpers stay long long throughout.
inline int narrow_output_dimension(long long k) {
  check_output_dimension(k);
  if (k > std::numeric_limits<int>::max())
    throw std::invalid_argument("output dimension k too large for the norm"
                                " closed forms");
  return static_cast<int>(k);
}

// Renyi entropy of a distribution holding `head` once and `tail` with
// multiplicity `tail_count`, without materializing the vector. Exact
// counterpart of renyi_entropy on the expanded vector.
inline double renyi_two_atom(double head, double tail, double tail_count,
                             double p) {
  check_entropy_order(p);
  if (head < 0 || tail < 0)
    throw std::invalid_argument("probabilities must be nonnegative");
  if (std::isinf(p)) return -std::log(std::max(head, tail));
  if (p == 1.0) {
    double h = 0.0;
    if (head > 0) h -= head * std::log(head);
    if (tail > 0) h -= tail_count * tail * std::log(tail);
    return h;
  }
  if (p == 0.0) {
    double support = (head > kEntropySupportTol ? 1.0 : 0.0) +
                     (tail > kEntropySupportTol ? tail_count : 0.0);
    return std::log(support);
  }
  // log(head^p + tail_count * tail^p) / (1 - p), factored through the larger
  // atom to keep the sum well scaled for large p.
  const double big = std::max(head, tail);
  const double sum = std::pow(head / big, p) +
                     tail_count * std::pow(tail / big, p);
  return (p * std::log(big) + std::log(sum)) / (1.0 - p);
}

// Correction exponent c_p = p / (2p - 2) carried by bounds that are routed
// through the 2-entropy when evaluated at an order p > 2; identity below
// order 2, limit 1/2 at p = inf.
inline double two_entropy_exponent(double p) {
  if (!(p > 2.0)) return 1.0;
  return std::isinf(p) ? 0.5 : p / (2.0 * p - 2.0);
}

}  // namespace detail

// Renyi entropy H_p(x) in nats. p = 0 counts the support, p = 1 is Shannon
// with the 0 log 0 = 0 convention, p = inf is -log max, and otherwise
// H_p = log(sum x_i^p) / (1 - p). The input must be a probability vector.
inline double renyi_entropy(const std::vector<double>& x, double p) {
  detail::check_entropy_order(p);
  if (x.empty()) throw std::invalid_argument("empty probability vector");
  double sum = 0.0;
  for (double v : x) {
    if (v < -1e-12)
      throw std::invalid_argument("probability vector has a negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbabilitySumTol)
    throw std::invalid_argument("probability vector does not sum to 1");
  if (std::isinf(p)) return -std::log(*std::max_element(x.begin(), x.end()));
  if (p == 1.0) {
    double h = 0.0;
    for (double v : x)
      if (v > 0) h -= v * std::log(v);
    return h;
  }
  if (p == 0.0) {
    std::size_t support = 0;
    for (double v : x)
      if (v > kEntropySupportTol) ++support;
    if (support == 0)
      throw std::invalid_argument("probability vector has empty support");
    return std::log(static_cast<double>(support));
  }
  double s = 0.0;
  for (double v : x)
    if (v > 0) s += std::pow(v, p);
  return std::log(s) / (1.0 - p);
}

// Output distribution that achieves the limiting minimal output entropy of a
// single random channel: the top weight y = min(1, phi^+(t, 1/k)) and the
// remaining mass spread evenly over the other k - 1 levels.
inline std::vector<double> x_kt(long long k, double t) {
  detail::check_output_dimension(k);
  detail::check_open_unit_interval(t, "t");
  const double kd = static_cast<double>(k);
  const double y = std::min(1.0, phi_pm(t, 1.0 / kd).second);
  std::vector<double> x(static_cast<std::size_t>(k), (1.0 - y) / (kd - 1.0));
  x[0] = y;
  return x;
}

// h_{p,k,t} = H_p(x_kt): the limiting minimal output p-entropy of a single
// random channel, evaluated through the two-atom closed form.
inline double h_pkt(double p, long long k, double t) {
  detail::check_output_dimension(k);
  detail::check_open_unit_interval(t, "t");
  const double kd = static_cast<double>(k);
  const double y = std::min(1.0, phi_pm(t, 1.0 / kd).second);
  return detail::renyi_two_atom(y, (1.0 - y) / (kd - 1.0), kd - 1.0, p);
}

// Limiting output distribution of a conjugate channel pair fed with a Bell
// state: one large atom t + (1-t)/k^2 and k^2 - 1 atoms of (1-t)/k^2.
// Materializes k^2 entries, so it is guarded against absurd k; the entropy
// helpers below use the equivalent two-atom form instead.
inline std::vector<double> gamma_kt(long long k, double t) {
  detail::check_output_dimension(k);
  detail::check_open_unit_interval(t, "t");
  if (k > 10000)
    throw std::length_error(
        "gamma_kt materializes k^2 atoms; use h_gamma_kt for large k");
  const double kd = static_cast<double>(k);
  const double tail = (1.0 - t) / (kd * kd);
  std::vector<double> g(static_cast<std::size_t>(k * k), tail);
  g[0] = t + tail;
  return g;
}

// H_p(gamma_kt) through the two-atom closed form; exact for any k.
inline double h_gamma_kt(double p, long long k, double t) {
  detail::check_output_dimension(k);
  detail::check_open_unit_interval(t, "t");
  const double kd = static_cast<double>(k);
  const double tail = (1.0 - t) / (kd * kd);
  return detail::renyi_two_atom(t + tail, tail, kd * kd - 1.0, p);
}

// Single-channel additivity-rate lower bound
// alpha^Gamma_{p,k,t} = -log ||mu^(CGamma)_{k,t}|| / h_{p,k,t}, clamped to
// [0,1]. Zero output entropy means the channel is additive outright, so the
// rate is 1; a unit norm makes the bound vacuous, so it is 0. For p > 2 the
// numerator carries the correction exponent c_p = p / (2p - 2), because the
// bound is routed through the 2-entropy there; c_p tends to 1/2 at p = inf.
inline double alpha_gamma(double p, long long k, double t) {
  detail::check_entropy_order(p);
  const double h = h_pkt(p, k, t);
  if (h < 1e-14) return 1.0;
  const double b = norm_mu_c_gamma(detail::narrow_output_dimension(k), t);
  if (b >= 1.0) return 0.0;
  const double c = detail::two_entropy_exponent(p);
  return std::clamp(-c * std::log(b) / h, 0.0, 1.0);
}

// Entropy gain factor of a conjugate pair over a Bell input:
// v_{p,k,t} = 2 h_{p,k,t} / H_p(gamma_{k,t}).
inline double v_pkt(double p, long long k, double t) {
  const double denom = h_gamma_kt(p, k, t);
  if (denom < 1e-14)
    throw std::domain_error("degenerate Bell-output entropy in v_pkt");
  return 2.0 * h_pkt(p, k, t) / denom;
}

// Lower bound on the additivity rate of a conjugate channel pair L (x) Lbar:
// the product v_{p,k,t} * alpha^Gamma_{p,k,t}.
inline double conjugate_pair_rate_lower(double p, long long k, double t) {
  return v_pkt(p, k, t) * alpha_gamma(p, k, t);
}

struct capacity_range {
  double lower = 0.0;
  double upper = 0.0;
};

// Asymptotic classical-capacity bounds for a random channel with output
// dimension k and aspect ratio t, in nats:
//   lower = log k - h_{1,k,t}   (Holevo quantity of a rotated optimal output)
//   upper = log k + log ||mu^(CGamma)_{k,t}||
// The upper bound collapses to log k once the limit norm reaches 1, i.e. for
// t >= (k-1)/(2k).
inline capacity_range capacity_bounds(long long k, double t) {
  detail::check_output_dimension(k);
  detail::check_open_unit_interval(t, "t");
  const double logk = std::log(static_cast<double>(k));
  return {logk - h_pkt(1.0, k, t),
          logk + std::log(norm_mu_c_gamma(detail::narrow_output_dimension(k), t))};
}

// PPT threshold for random channels: t_PPT = (1 - sqrt(1 - 1/k^2)) / 2.
// Channels with t below it are asymptotically PPT, above it non-PPT.
inline double t_ppt(long long k) {
  detail::check_output_dimension(k);
  const double kd = static_cast<double>(k);
  return 0.5 * (1.0 - std::sqrt(1.0 - 1.0 / (kd * kd)));
}

// Limiting smallest eigenvalue of the partially transposed Choi matrix:
// 2 phi^-(s,t) - 1 with s = (k+1)/(2k) while t < s, and the hard floor -1
// once t >= s. Positive exactly when t < t_ppt(k).
inline double ppt_min_eig_prediction(long long k, double t) {
  detail::check_output_dimension(k);
  detail::check_open_unit_interval(t, "t");
  const double s = (static_cast<double>(k) + 1) / (2.0 * k);
  if (t >= s) return -1.0;
  return 2.0 * phi_pm(s, t).first - 1.0;
}

struct ppt_scan_row {
  long long k = 0;
  double t = 0.0;            // pinned to 1/(4k^2), inside the PPT region
  double tensor_value = 0.0; // limit sup-norm of the conjugate-pair output
  double single_value_sq = 0.0; // squared limit sup-norm of one channel
  bool violated = false;     // tensor_value > single_value_sq
};

struct ppt_scan_result {
  std::vector<ppt_scan_row> rows;
  long long minimal_violating_k = -1; // -1 when no k in range violates
};

// Scans k over [k_lo, k_hi] at t = 1/(4k^2) (safely below the PPT threshold)
// and tests the infinity-entropy violation condition for the conjugate pair:
// t + (1-t)/k^2 > phi^+(t, 1/k)^2. Reports each comparison and the minimal
// violating k.
inline ppt_scan_result ppt_violation_k_scan(long long k_lo, long long k_hi) {
  if (k_lo < 2 || k_hi < k_lo)
    throw std::invalid_argument("scan range must satisfy 2 <= k_lo <= k_hi");
  ppt_scan_result out;
  out.rows.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
  for (long long k = k_lo; k <= k_hi; ++k) {
    const double kd = static_cast<double>(k);
    const double t = 1.0 / (4.0 * kd * kd);
    const double tensor = t + (1.0 - t) / (kd * kd);
    const double single = phi_pm(t, 1.0 / kd).second;
    ppt_scan_row row{k, t, tensor, single * single,
                     tensor > single * single};
    if (row.violated && out.minimal_violating_k < 0)
      out.minimal_violating_k = k;
    out.rows.push_back(row);
  }
  return out;
}

// Asymptotic (k -> infinity) entropy order beyond which PPT channels violate
// additivity: the root of p^2 - 3p/4 + 1 = (5/4)^p on [2, 100], found by
// bisection. The left side dominates at p = 2 and the exponential wins for
// large p, so the crossing is the minimal violating order.
inline double ppt_violation_p_threshold() {
  auto gap = [](double p) {
    return p * p - 0.75 * p + 1.0 - std::pow(1.25, p);
  };
  double lo = 2.0, hi = 100.0;
  if (!(gap(lo) > 0.0) || !(gap(hi) < 0.0))
    throw std::domain_error("no sign change for the p-threshold on [2,100]");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Finite-k minimal entropy order p in [2, 100] with an additivity violation
// at t = 1/(4k^2): the smallest p where (||x_kt||_p^p)^2 < ||gamma_kt||_p^p,
// equivalently 2 h_{p,k,t} > H_p(gamma_{k,t}). Bisection on the exact
// two-atom sums; throws when no order up to 100 violates (small k).
inline double ppt_violation_p_finite(long long k) {
  detail::check_output_dimension(k);
  const double kd = static_cast<double>(k);
  const double t = 1.0 / (4.0 * kd * kd);
  auto violates = [&](double p) {
    return 2.0 * h_pkt(p, k, t) > h_gamma_kt(p, k, t);
  };
  double lo = 2.0, hi = 100.0;
  if (violates(lo)) return lo;
  if (!violates(hi))
    throw std::domain_error("no additivity violation for p in [2,100]");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (violates(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Phase diagram of the single-channel additivity rate when t ~ k^-tau and
// k -> infinity, for p in [0, 2]:
//   (p-1)/(2p)  on 0 < tau <= 1 - 1/p (empty for p <= 1),
//   tau/2       on 1 - 1/p <= tau <= 2,
//   1           on tau >= 2,
// continuous across both seams.
inline double asymptotic_rate(double p, double tau) {
  if (std::isnan(p) || p < 0 || p > 2)
    throw std::invalid_argument("asymptotic_rate needs p in [0,2]");
  if (!(tau > 0)) throw std::invalid_argument("asymptotic_rate needs tau > 0");
  if (tau >= 2.0) return 1.0;
  if (p > 1.0 && tau <= 1.0 - 1.0 / p) return (p - 1.0) / (2.0 * p);
  return tau / 2.0;
}

enum class limit_regime { constant_t, power_law_t };

// Leading behaviour h_{p,k,t} ~ log_k_coefficient * log k + constant_term as
// k -> infinity. constant_known marks whether the additive term is pinned by
// the closed forms (the power-law regime only fixes the log k coefficient).
struct asymptotic_term {
  double log_k_coefficient = 0.0;
  double constant_term = 0.0;
  bool constant_known = false;
};

// Asymptotics of the minimal output entropy h_{p,k,t} as k -> infinity. In
// the constant-t regime `value` is t itself; in the power-law regime t is
// k^-value with value = tau > 0.
inline asymptotic_term asymptotic_h(double p, limit_regime regime,
                                    double value) {
  detail::check_entropy_order(p);
  if (regime == limit_regime::constant_t) {
    const double t = value;
    detail::check_open_unit_interval(t, "t");
    if (std::isinf(p)) return {0.0, -std::log(t), true};
    if (p > 1.0) return {0.0, p / (1.0 - p) * std::log(t), true};
    if (p == 1.0)
      return {1.0 - t, -t * std::log(t) - (1.0 - t) * std::log(1.0 - t),
              true};
    return {1.0, p / (1.0 - p) * std::log(1.0 - t), true};
  }
  const double tau = value;
  if (!(tau > 0)) throw std::invalid_argument("power-law regime needs tau > 0");
  if (p > 1.0) {
    const double ratio = std::isinf(p) ? 1.0 : 1.0 - 1.0 / p;
    if (tau <= ratio)
      return {std::isinf(p) ? tau : tau * p / (p - 1.0), 0.0, false};
  }
  return {1.0, 0.0, false};
}

// Norm scaling ||mu^(CGamma)_{k,t}|| ~ prefactor * k^k_exponent as
// k -> infinity. In the constant-t regime the prefactor is exact (and the
// norm is exactly 1 for every k once t >= 1/2); the power-law regime pins
// only the exponent.
struct norm_asymptotics {
  double k_exponent = 0.0;
  double prefactor = 0.0;
  bool prefactor_known = false;
};

inline norm_asymptotics asymptotic_norm(limit_regime regime, double value) {
  if (regime == limit_regime::constant_t) {
    const double t = value;
    detail::check_open_unit_interval(t, "t");
    if (t >= 0.5) return {0.0, 1.0, true};
    return {0.0, 2.0 * std::sqrt(t * (1.0 - t)), true};
  }
  const double tau = value;
  if (!(tau > 0)) throw std::invalid_argument("power-law regime needs tau > 0");
  if (tau > 2.0) return {-1.0, std::numeric_limits<double>::quiet_NaN(), false};
  return {-0.5 * tau, std::numeric_limits<double>::quiet_NaN(), false};
}

// An observed additivity violation turns into an upper bound on the rate:
// alpha_p <= Hmin_pair / (2 Hmin_single). A perfectly additive pair gives 1.
inline double additivity_rate_upper_from_violation(double h_min_single,
                                                   double h_min_pair) {
  if (!(h_min_single > 0) || !(h_min_pair > 0))
    throw std::invalid_argument("entropies must be positive");
  return h_min_pair / (2.0 * h_min_single);
}

// Generic norm-based additivity-rate lower bound -log(B^c) / Hmin, clamped
// to [0,1]. B is one of the five contraction norms of the channel and Hmin
// its minimal output p-entropy. The correction exponent c_p = p/(2p-2)
// applies for p > 2 only to the B values derived through the 2-entropy
// (the Choi-type norms), not to the sup-norm ones; callers flag which kind
// they pass.
inline double hat_alpha(double b, double h_min, double p,
                        bool two_entropy_derived = true) {
  detail::check_entropy_order(p);
  if (!(b > 0)) throw std::invalid_argument("norm bound B must be positive");
  if (!(h_min > 0))
    throw std::invalid_argument("minimal output entropy must be positive");
  const double c =
      two_entropy_derived ? detail::two_entropy_exponent(p) : 1.0;
  return std::clamp(-c * std::log(b) / h_min, 0.0, 1.0);
}

// One-stop scalar report for a random channel family at (k, t, p): the
// limit-law norms, the entropy and rate bounds, capacity bounds, and the PPT
// verdict with its margins. All logs are nats.
struct BoundReport {
  long long k = 0;
  double t = 0.0;
  double p = 1.0;
  // Limit norms of the four matrix models; the image of the identity has no
  // k-by-k limit law, its operator norm grows like t * n.
  double norm_c = 0.0;
  double norm_c_gamma = 0.0;
  double norm_cc_gamma = 0.0;
  double norm_m_gamma = 0.0;
  double l_identity_per_n = 0.0;
  double h = 0.0;                 // h_{p,k,t}
  bool h_is_upper_bound_only = false; // the limit is only <= h when p < 1
  double alpha_gamma_lower = 0.0; // single-channel rate lower bound
  double v = 0.0;                 // conjugate-pair gain factor
  double pair_rate_lower = 0.0;   // v * alpha_gamma
  double capacity_lower = 0.0;
  double capacity_upper = 0.0;
  double t_ppt_value = 0.0;
  bool ppt_in_limit = false;      // t < t_ppt
  double ppt_margin = 0.0;        // t_ppt - t, sign matches the verdict
  double min_eig_limit = 0.0;     // limiting lambda_min of the PT Choi matrix
};

inline BoundReport bound_report(long long k, double t, double p) {
  detail::check_output_dimension(k);
  detail::check_open_unit_interval(t, "t");
  detail::check_entropy_order(p);
  BoundReport r;
  r.k = k;
  r.t = t;
  r.p = p;
  const int ki = detail::narrow_output_dimension(k);
  r.norm_c = norm_mu_c(ki, t);
  r.norm_c_gamma = norm_mu_c_gamma(ki, t);
  r.norm_cc_gamma = norm_mu_cc_gamma(t);
  r.norm_m_gamma = norm_mu_m_gamma_limit(t);
  r.l_identity_per_n = t;
  r.h = h_pkt(p, k, t);
  r.h_is_upper_bound_only = p < 1.0;
  r.alpha_gamma_lower = alpha_gamma(p, k, t);
  r.v = v_pkt(p, k, t);
  r.pair_rate_lower = r.v * r.alpha_gamma_lower;
  const capacity_range cap = capacity_bounds(k, t);
  r.capacity_lower = cap.lower;
  r.capacity_upper = cap.upper;
  r.t_ppt_value = t_ppt(k);
  r.ppt_in_limit = t < r.t_ppt_value;
  r.ppt_margin = r.t_ppt_value - t;
  r.min_eig_limit = ppt_min_eig_prediction(k, t);
  return r;
}

}  // namespace rqc
