#pragma once
// Haar-random isometries, channel constructions built from them (Choi-type
// matrices, partial transposes, Bell-state outputs), named reference
// channels, the panel of contraction norms, and a threaded Monte Carlo
// spectrum sampler with counter-based reproducibility.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "rqc/rng.hpp"

namespace rqc {

using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;

inline cmat sample_ginibre(int rows, int cols, rng_stream& g) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("matrix dimensions");
  cmat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = g.complex_normal();
  return m;
}

namespace detail {

// QR with the phase convention that makes Q Haar distributed: each column
// is rotated so the corresponding diagonal of R is positive real
inline cmat qr_orthonormal(const cmat& gin, int cols) {
  Eigen::HouseholderQR<cmat> qr(gin);
  cmat q = qr.householderQ() * cmat::Identity(gin.rows(), cols);
  for (int j = 0; j < cols; ++j) {
    std::complex<double> rjj = qr.matrixQR()(j, j);
    double a = std::abs(rjj);
    q.col(j) *= (a > 0) ? rjj / a : 1.0;
  }
  return q;
}

}  // namespace detail

inline cmat sample_haar_unitary(int n, rng_stream& g) {
  return detail::qr_orthonormal(sample_ginibre(n, n, g), n);
}

// columns form an orthonormal family: V^H V = I_cols; distributed as the
// first cols columns of a Haar unitary
inline cmat sample_isometry(int rows, int cols, rng_stream& g) {
  if (cols > rows) throw std::invalid_argument("isometry needs rows >= cols");
  return detail::qr_orthonormal(sample_ginibre(rows, cols, g), cols);
}

// a sampled channel: isometry plus its dimension bookkeeping
struct ChannelSample {
  cmat v;  // nk x d
  int n = 0, k = 0, d = 0;
  double t_effective = 0;
  std::uint64_t seed = 0;
  std::uint32_t trial = 0;
};

inline ChannelSample sample_channel(int n, int k, int d, std::uint64_t seed,
                                    std::uint32_t trial = 0) {
  if (n < 1 || k < 1 || d < 1 || d > n * k)
    throw std::invalid_argument("need 1 <= d <= n*k");
  rng_stream g(seed, trial, 0);
  ChannelSample s;
  s.v = sample_isometry(n * k, d, g);
  s.n = n;
  s.k = k;
  s.d = d;
  s.t_effective = static_cast<double>(d) / (static_cast<double>(n) * k);
  s.seed = seed;
  s.trial = trial;
  return s;
}

// The isometry V : C^d -> C^n (x) C^k of a channel with environment
// dimension n and output dimension k uses row index m*k + x for
// environment m and output x. The channel is X -> Tr_env V X V^H.

inline cmat apply_channel(const cmat& v, int n, int k, const cmat& x) {
  const int d = v.cols();
  if (v.rows() != static_cast<long>(n) * k || x.rows() != d || x.cols() != d)
    throw std::invalid_argument("dimension mismatch");
  cmat out = cmat::Zero(k, k);
  for (int m = 0; m < n; ++m) {
    cmat a = v.block(m * k, 0, k, d);
    out += a * x * a.adjoint();
  }
  return out;
}

inline cmat apply_complementary(const cmat& v, int n, int k, const cmat& x) {
  const int d = v.cols();
  if (v.rows() != static_cast<long>(n) * k || x.rows() != d || x.cols() != d)
    throw std::invalid_argument("dimension mismatch");
  cmat out = cmat::Zero(n, n);
  for (int xx = 0; xx < k; ++xx) {
    cmat b(n, d);
    for (int m = 0; m < n; ++m) b.row(m) = v.row(m * k + xx);
    out += b * x * b.adjoint();
  }
  return out;
}

// Choi matrix, indexed (x*d + i, y*d + j), trace d and positive
inline cmat choi(const cmat& v, int n, int k) {
  const int d = v.cols();
  if (v.rows() != static_cast<long>(n) * k)
    throw std::invalid_argument("dimension mismatch");
  cmat w(n, k * d);
  for (int m = 0; m < n; ++m)
    for (int x = 0; x < k; ++x)
      for (int i = 0; i < d; ++i) w(m, x * d + i) = v(m * k + x, i);
  return (w.adjoint() * w).transpose();
}

// Choi matrix of the complementary channel, indexed (m*d + i, mm*d + j)
inline cmat choi_complement(const cmat& v, int n, int k) {
  const int d = v.cols();
  if (v.rows() != static_cast<long>(n) * k)
    throw std::invalid_argument("dimension mismatch");
  cmat w(k, n * d);
  for (int m = 0; m < n; ++m)
    for (int x = 0; x < k; ++x)
      for (int i = 0; i < d; ++i) w(x, m * d + i) = v(m * k + x, i);
  return (w.adjoint() * w).transpose();
}

// transpose of the second tensor factor of a (p*q) x (p*q) block matrix
inline cmat partial_transpose(const cmat& b, int p, int q) {
  const long dim = b.rows();
  if (b.cols() != dim || p < 1 || q < 1 || dim != static_cast<long>(p) * q)
    throw std::invalid_argument("partial transpose needs a square p*q matrix");
  cmat out(dim, dim);
  for (long i = 0; i < p; ++i)
    for (long j = 0; j < p; ++j)
      for (int a = 0; a < q; ++a)
        for (int bb = 0; bb < q; ++bb)
          out(i * q + bb, j * q + a) = b(i * q + a, j * q + bb);
  return out;
}

// swap operator on C^k (x) C^k
inline cmat flip_matrix(int k) {
  cmat f = cmat::Zero(static_cast<long>(k) * k, static_cast<long>(k) * k);
  for (int x = 0; x < k; ++x)
    for (int y = 0; y < k; ++y) f(x * k + y, y * k + x) = 1.0;
  return f;
}

// unnormalized maximally entangled projector sum_{ij} |ii><jj| on C^d (x) C^d
inline cmat bell_unnormalized(int d) {
  cmat e = cmat::Zero(static_cast<long>(d) * d, static_cast<long>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) e(i * d + i, j * d + j) = 1.0;
  return e;
}

// trace-one output of the channel tensored with its conjugate applied to
// the normalized maximally entangled state, a k^2 x k^2 matrix
inline cmat bell_output(const cmat& v, int n, int k) {
  const int d = v.cols();
  if (v.rows() != static_cast<long>(n) * k)
    throw std::invalid_argument("dimension mismatch");
  cmat out = cmat::Zero(static_cast<long>(k) * k, static_cast<long>(k) * k);
  cvec w(static_cast<long>(k) * k);
  for (int m = 0; m < n; ++m) {
    cmat am = v.block(m * k, 0, k, d);
    for (int mm = 0; mm < n; ++mm) {
      cmat prod = am * v.block(mm * k, 0, k, d).adjoint();
      for (int x = 0; x < k; ++x)
        for (int y = 0; y < k; ++y) w(x * k + y) = prod(x, y);
      out += w * w.adjoint();
    }
  }
  return out / d;
}

// partial transpose (on the output factor) of the projector onto the range
// of the isometry; this nk x nk matrix carries the pure-output moment
// formulas under the normalized trace
inline cmat projector_gamma(const cmat& v, int n, int k) {
  if (v.rows() != static_cast<long>(n) * k)
    throw std::invalid_argument("dimension mismatch");
  return partial_transpose(v * v.adjoint(), n, k);
}

// ascending eigenvalues; rejects matrices that are not Hermitian
inline std::vector<double> hermitian_eigenvalues(const cmat& m) {
  const double scale = std::max(1.0, m.norm());
  if ((m - m.adjoint()).norm() > 1e-12 * scale)
    throw std::runtime_error("matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<cmat> es((m + m.adjoint()) / 2.0,
                                         Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigenvalue decomposition failed");
  std::vector<double> ev(es.eigenvalues().data(),
                         es.eigenvalues().data() + m.rows());
  return ev;
}

inline double spectral_norm(const cmat& m) {
  auto ev = hermitian_eigenvalues(m);
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

// norm of the trace-one Bell-state output of the channel paired with its
// conjugate; always at least d/(nk) because the diagonal sums to one over
// at most k^2 entries of which one carries the range overlap
inline double bell_output_norm(const cmat& v, int n, int k) {
  const double d = v.cols();
  if (static_cast<double>(k) * k * d * d > 2e9)
    throw std::domain_error("bell output exceeds the memory guard");
  return spectral_norm(bell_output(v, n, k));
}

// isometry of the conjugate-antisymmetrizing channel with environment d^2,
// output d, input d: rows ((i*d + j)*d + l), columns s
inline cmat werner_holevo_isometry(int d) {
  if (d < 2) throw std::invalid_argument("dimension must be >= 2");
  const double c = 1.0 / std::sqrt(2.0 * (d - 1));
  cmat v = cmat::Zero(static_cast<long>(d) * d * d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l)
        for (int s = 0; s < d; ++s) {
          double val = (l == j && s == i ? 1.0 : 0.0) -
                       (l == i && s == j ? 1.0 : 0.0);
          if (val != 0) v((i * d + j) * d + l, s) = c * val;
        }
  return v;
}

// embeds the antisymmetric subspace: input dimension d(d-1)/2, environment
// and output both d; basis pairs (a < b) map to (e_a e_b - e_b e_a)/sqrt(2)
inline cmat antisymmetric_isometry(int d) {
  if (d < 2) throw std::invalid_argument("dimension must be >= 2");
  const int din = d * (d - 1) / 2;
  cmat v = cmat::Zero(static_cast<long>(d) * d, din);
  int col = 0;
  const double c = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      v(a * d + b, col) = c;
      v(b * d + a, col) = -c;
      ++col;
    }
  return v;
}

// trivial environment: the channel is the identity on C^d
inline cmat identity_isometry(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  return cmat::Identity(d, d);
}

// fully depolarizing channel with Kraus operators e_i e_j^* / sqrt(d)
inline cmat depolarizing_isometry(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  cmat v = cmat::Zero(static_cast<long>(d) * d * d, d);
  const double c = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) v((i * d + j) * d + i, j) = c;
  return v;
}

// Choi matrix of the dual map, indexed (i*k + x, j*k + y); isospectral to
// the Choi matrix of the channel itself
inline cmat choi_of_dual(const cmat& v, int n, int k) {
  const int d = v.cols();
  if (v.rows() != static_cast<long>(n) * k)
    throw std::invalid_argument("dimension mismatch");
  cmat out = cmat::Zero(static_cast<long>(d) * k, static_cast<long>(d) * k);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int x = 0; x < k; ++x)
        for (int y = 0; y < k; ++y) {
          std::complex<double> s = 0;
          for (int m = 0; m < n; ++m)
            s += std::conj(v(m * k + x, i)) * v(m * k + y, j);
          out(i * k + x, j * k + y) = s;
        }
  return out;
}

// verifies that the channel and its dual share Choi spectra, both plain and
// partially transposed, within an absolute tolerance of 1e-9
inline bool dual_choi_spectrum_check(const cmat& v, int n, int k) {
  const int d = v.cols();
  auto close = [](const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - b[i]) > 1e-9) return false;
    return true;
  };
  cmat c = choi(v, n, k);
  cmat cd = choi_of_dual(v, n, k);
  if (!close(hermitian_eigenvalues(c), hermitian_eigenvalues(cd)))
    return false;
  return close(hermitian_eigenvalues(partial_transpose(c, k, d)),
               hermitian_eigenvalues(partial_transpose(cd, d, k)));
}

// isometry of the tensor product channel; environment legs are grouped
// before output legs so the result uses the same row convention
inline cmat tensor_isometry(const cmat& v1, int n1, int k1, const cmat& v2,
                            int n2, int k2) {
  const int d1 = v1.cols(), d2 = v2.cols();
  if (v1.rows() != static_cast<long>(n1) * k1 ||
      v2.rows() != static_cast<long>(n2) * k2)
    throw std::invalid_argument("dimension mismatch");
  const int n = n1 * n2, k = k1 * k2, d = d1 * d2;
  cmat v = cmat::Zero(static_cast<long>(n) * k, d);
  for (int m1 = 0; m1 < n1; ++m1)
    for (int m2 = 0; m2 < n2; ++m2)
      for (int x1 = 0; x1 < k1; ++x1)
        for (int x2 = 0; x2 < k2; ++x2) {
          long row = (static_cast<long>(m1) * n2 + m2) * k + (x1 * k2 + x2);
          for (int i1 = 0; i1 < d1; ++i1)
            for (int i2 = 0; i2 < d2; ++i2)
              v(row, i1 * d2 + i2) =
                  v1(m1 * k1 + x1, i1) * v2(m2 * k2 + x2, i2);
        }
  return v;
}

// Norms of the 27 contractions [Q (x) R (x) S](u u^H) of the trace-d pure
// state u[m,x,i] = V(m k + x, i), with Q,R,S ranging over identity, trace,
// and transpose on the environment/output/input factor. Index layout:
// 9*q + 3*r + s with 0 = id, 1 = Tr, 2 = transpose, environment slowest.
inline std::array<double, 27> all_contraction_norms(const cmat& v, int n,
                                                    int k) {
  const int d = v.cols();
  if (v.rows() != static_cast<long>(n) * k)
    throw std::invalid_argument("dimension mismatch");
  const int dims[3] = {n, k, d};
  auto u = [&](int m, int x, int i) { return v(m * k + x, i); };
  std::array<double, 27> out{};
  for (int code = 0; code < 27; ++code) {
    const int op[3] = {code / 9, (code / 3) % 3, code % 3};
    std::vector<int> kept;
    long kdim = 1, tdim = 1;
    for (int f = 0; f < 3; ++f) {
      if (op[f] == 1)
        tdim *= dims[f];
      else {
        kept.push_back(f);
        kdim *= dims[f];
      }
    }
    if (kept.empty()) {  // full trace of a trace-d state
      out[code] = d;
      continue;
    }
    cmat m = cmat::Zero(kdim, kdim);
    std::vector<long> kstride(kept.size(), 1);
    for (int f = static_cast<int>(kept.size()) - 2; f >= 0; --f)
      kstride[f] = kstride[f + 1] * dims[kept[f + 1]];
    for (long a = 0; a < kdim; ++a)
      for (long b = 0; b < kdim; ++b) {
        int li[3] = {0, 0, 0}, ri[3] = {0, 0, 0};
        for (std::size_t f = 0; f < kept.size(); ++f) {
          int av = static_cast<int>(a / kstride[f]) % dims[kept[f]];
          int bv = static_cast<int>(b / kstride[f]) % dims[kept[f]];
          if (op[kept[f]] == 0) {
            li[kept[f]] = av;
            ri[kept[f]] = bv;
          } else {  // transpose: row and column swap on this factor
            li[kept[f]] = bv;
            ri[kept[f]] = av;
          }
        }
        std::complex<double> s = 0;
        for (long c = 0; c < tdim; ++c) {
          long rem = c;
          for (int f = 2; f >= 0; --f)
            if (op[f] == 1) {
              li[f] = ri[f] = static_cast<int>(rem % dims[f]);
              rem /= dims[f];
            }
          s += u(li[0], li[1], li[2]) * std::conj(u(ri[0], ri[1], ri[2]));
        }
        m(a, b) = s;
      }
    out[code] = spectral_norm(m);
  }
  return out;
}

// the five operator-norm bounds derived from one channel
struct FiveBounds {
  double b_c = 0;         // Choi matrix
  double b_c_gamma = 0;   // its partial transpose
  double b_cc_gamma = 0;  // partial transpose of the complementary Choi
  double b_m_gamma = 0;   // partial transpose of the range projector
  double b_i = 0;         // image of the identity under the channel
};

inline FiveBounds bounds_of_channel(const cmat& v, int n, int k) {
  const int d = v.cols();
  FiveBounds b;
  cmat c = choi(v, n, k);
  cmat cc = choi_complement(v, n, k);
  b.b_c = spectral_norm(c);
  b.b_c_gamma = spectral_norm(partial_transpose(c, k, d));
  b.b_cc_gamma = spectral_norm(partial_transpose(cc, n, d));
  b.b_m_gamma = spectral_norm(projector_gamma(v, n, k));
  b.b_i = spectral_norm(apply_channel(v, n, k, cmat::Identity(d, d)));
  return b;
}

// ---- Monte Carlo spectrum sampling ----

enum class SampleModel { c, c_gamma, cc_gamma, m_gamma };

struct SampleConfig {
  SampleModel model = SampleModel::c_gamma;
  int n = 100;
  int k = 2;
  double t = 0.1;
  int d = 0;  // 0 derives round(t*n*k)
  std::uint64_t seed = 1;
  int trials = 10;
  int bins = 200;
  int threads = 1;
  bool force = false;
  bool drop_kernel = false;
};

struct TrialStats {
  double min_eig = 0;
  double max_eig = 0;
  // normalized trace moments (1/dim) sum lambda^p for p = 1, 2, 3
  std::array<double, 3> moments{};
};

struct SampleResult {
  int n = 0, k = 0, d = 0;
  double t = 0;
  std::size_t matrix_dim = 0;
  std::vector<double> edges;            // bins + 1 ascending
  std::vector<std::uint64_t> counts;    // per bin, all trials pooled
  std::vector<TrialStats> trial_stats;  // indexed by trial
};

namespace detail {

inline cmat sample_model_matrix(const SampleConfig& cfg, int d,
                                std::uint32_t trial) {
  rng_stream g(cfg.seed, trial, 0);
  cmat v = sample_isometry(cfg.n * cfg.k, d, g);
  switch (cfg.model) {
    case SampleModel::c:
      return choi(v, cfg.n, cfg.k);
    case SampleModel::c_gamma:
      return partial_transpose(choi(v, cfg.n, cfg.k), cfg.k, d);
    case SampleModel::cc_gamma:
      return partial_transpose(choi_complement(v, cfg.n, cfg.k), cfg.n, d);
    case SampleModel::m_gamma:
      return projector_gamma(v, cfg.n, cfg.k);
  }
  throw std::logic_error("unknown model");
}

}  // namespace detail

// derives the input dimension and validates the cost guards
inline int resolve_sample_dimension(const SampleConfig& cfg) {
  if (cfg.n < 1 || cfg.k < 2) throw std::invalid_argument("need n >= 1, k >= 2");
  if (cfg.trials < 1 || cfg.bins < 1)
    throw std::invalid_argument("trials and bins must be positive");
  int d = cfg.d;
  if (d == 0) {
    if (!(cfg.t > 0 && cfg.t < 1))
      throw std::invalid_argument("t must lie in (0,1)");
    d = static_cast<int>(std::lround(cfg.t * cfg.n * cfg.k));
  }
  if (d < 1 || d > cfg.n * cfg.k)
    throw std::invalid_argument("input dimension must satisfy 1 <= d <= n*k");
  const double nn = cfg.n, kk = cfg.k;
  if (!cfg.force) {
    if (nn * nn * kk * kk * (kk * kk + d) > 2e10)
      throw std::domain_error(
          "requested size exceeds the cost guard; pass force to override");
    if (cfg.model == SampleModel::cc_gamma &&
        static_cast<double>(cfg.n) * d > 5000)
      throw std::domain_error(
          "complementary model needs n*d <= 5000; pass force to override");
  }
  return d;
}

inline SampleResult monte_carlo_spectrum(const SampleConfig& cfg) {
  const int d = resolve_sample_dimension(cfg);
  SampleResult res;
  res.n = cfg.n;
  res.k = cfg.k;
  res.d = d;
  res.t = static_cast<double>(d) / (static_cast<double>(cfg.n) * cfg.k);
  res.matrix_dim = cfg.model == SampleModel::c || cfg.model == SampleModel::c_gamma
                       ? static_cast<std::size_t>(cfg.k) * d
                   : cfg.model == SampleModel::cc_gamma
                       ? static_cast<std::size_t>(cfg.n) * d
                       : static_cast<std::size_t>(cfg.n) * cfg.k;

  const double lo = cfg.model == SampleModel::c ? -0.05 : -1.1;
  const double hi = cfg.model == SampleModel::c ? cfg.k + 0.5 : 1.1;
  res.edges.resize(cfg.bins + 1);
  for (int b = 0; b <= cfg.bins; ++b)
    res.edges[b] = lo + (hi - lo) * b / cfg.bins;
  res.counts.assign(cfg.bins, 0);
  res.trial_stats.resize(cfg.trials);

  const int nthreads = std::max(1, std::min(cfg.threads, cfg.trials));
  std::vector<std::vector<std::uint64_t>> local(
      nthreads, std::vector<std::uint64_t>(cfg.bins, 0));
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mtx;
  auto work = [&](int tid) {
    try {
      for (int trial = tid; trial < cfg.trials; trial += nthreads) {
        cmat m = detail::sample_model_matrix(cfg, d, trial);
        std::vector<double> ev = hermitian_eigenvalues(m);
        if (cfg.drop_kernel && cfg.model == SampleModel::c) {
          // rank of the Choi matrix is at most n: remove structural zeros
          long excess = static_cast<long>(ev.size()) - cfg.n;
          if (excess > 0) {
            std::sort(ev.begin(), ev.end(),
                      [](double a, double b) { return std::abs(a) < std::abs(b); });
            ev.erase(ev.begin(), ev.begin() + excess);
            std::sort(ev.begin(), ev.end());
          }
        }
        TrialStats st;
        st.min_eig = ev.front();
        st.max_eig = ev.back();
        for (double x : ev) {
          st.moments[0] += x;
          st.moments[1] += x * x;
          st.moments[2] += x * x * x;
          int b = static_cast<int>((x - lo) / (hi - lo) * cfg.bins);
          b = std::clamp(b, 0, cfg.bins - 1);
          ++local[tid][b];
        }
        for (auto& mo : st.moments) mo /= static_cast<double>(ev.size());
        res.trial_stats[trial] = st;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lk(err_mtx);
      if (!first_error) first_error = std::current_exception();
    }
  };
  if (nthreads == 1) {
    work(0);
  } else {
    for (int tid = 0; tid < nthreads; ++tid) pool.emplace_back(work, tid);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  for (int tid = 0; tid < nthreads; ++tid)
    for (int b = 0; b < cfg.bins; ++b) res.counts[b] += local[tid][b];
  return res;
}

}  // namespace rqc
