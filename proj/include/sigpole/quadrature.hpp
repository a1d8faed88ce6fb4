#pragma once

// Evaluators for the simplex integral
//   L(P;H) = int_{0<s_1<...<s_{2k}<1} prod_{{a,b} in P} (s_b - s_a)^{2H-2} ds
// and a grid oracle for the mean iterated integrals of fBm built on Wick's
// theorem.

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "sigpole/blowup.hpp"
#include "sigpole/combinatorics.hpp"
#include "sigpole/errors.hpp"

namespace sigpole {

enum class Method { direct_mc, pullback_mc, adaptive, closed_form, wick_grid };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::direct_mc: return "direct-mc";
    case Method::pullback_mc: return "pullback-mc";
    case Method::adaptive: return "adaptive";
    case Method::closed_form: return "closed-form";
    case Method::wick_grid: return "wick-grid";
  }
  return "unknown";
}

inline bool is_stochastic(Method m) { return m == Method::direct_mc || m == Method::pullback_mc; }

struct EvalResult {
  double value = 0;
  Method method = Method::closed_form;
  /// Standard error; stochastic methods only.
  std::optional<double> std_error;
  /// IQR/1.349/sqrt(N), alongside std_error (heavy tails for H <= 3/4).
  std::optional<double> robust_error;
  /// Achieved tolerance; deterministic methods only.
  std::optional<double> tol;
  /// Samples for stochastic methods, integrand evaluations or grid tuples otherwise.
  std::uint64_t count = 0;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  double H = 0;
  std::string subject;  // partition or word

  /// Standard error for stochastic results, tolerance otherwise.
  double uncertainty() const { return std_error ? *std_error : tol.value_or(0.0); }
};

// ---------------------------------------------------------------------------
// fBm covariance

struct FbmCovariance {
  double H;

  explicit FbmCovariance(double hurst) : H(hurst) {
    if (!(hurst > 0 && hurst <= 1)) throw DomainError("Hurst parameter must lie in (0,1]");
  }

  /// R(s,t) = (s^{2H} + t^{2H} - |s-t|^{2H}) / 2
  double operator()(double s, double t) const {
    const double e = 2 * H;
    return 0.5 * (std::pow(s, e) + std::pow(t, e) - std::pow(std::abs(s - t), e));
  }

  /// E[(B_{s1}-B_{s0})(B_{t1}-B_{t0})]
  double increments(double s0, double s1, double t0, double t1) const {
    const auto& r = *this;
    return r(s1, t1) - r(s1, t0) - r(s0, t1) + r(s0, t0);
  }
};

// ---------------------------------------------------------------------------
// Seeds and sampling

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of worker w (0-based): splitmix64(master + golden * (w + 1)).
inline std::uint64_t worker_seed(std::uint64_t master, int worker) {
  return splitmix64(master + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(worker + 1));
}

/// Uniform on (0,1), never 0 or 1.
inline double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double factorial(int n) {
  double r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

namespace detail {

inline void require_convergent(double H) {
  if (!(H > 0.5) || !(H <= 1.0) || !std::isfinite(H))
    throw DomainError("outside convergent region; use poles (numeric evaluation needs 1/2 < H <= 1)");
}

struct SampleSummary {
  double mean = 0;
  double std_error = 0;
  double robust_error = 0;
};

/// Splits n samples over workers, worker w taking its share in order, and
/// reduces in worker order so the result depends only on (seed, workers).
inline SampleSummary run_workers(std::uint64_t n, std::uint64_t seed, int workers,
                                 const std::function<double(std::mt19937_64&)>& draw) {
  if (n < 2) throw DomainError("need at least 2 samples");
  if (workers < 1) throw DomainError("workers must be >= 1");
  std::vector<std::vector<double>> values(static_cast<std::size_t>(workers));
  auto job = [&](int w) {
    const std::uint64_t share = n / static_cast<std::uint64_t>(workers) +
                                (static_cast<std::uint64_t>(w) < n % static_cast<std::uint64_t>(workers) ? 1 : 0);
    std::mt19937_64 rng(worker_seed(seed, w));
    auto& out = values[static_cast<std::size_t>(w)];
    out.reserve(share);
    for (std::uint64_t i = 0; i < share; ++i) out.push_back(draw(rng));
  };
  if (workers == 1) {
    job(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(job, w);
    for (auto& t : pool) t.join();
  }
  std::vector<double> all;
  all.reserve(n);
  for (const auto& v : values) all.insert(all.end(), v.begin(), v.end());
  double sum = 0;
  for (double v : all) sum += v;
  const double mean = sum / static_cast<double>(n);
  double ss = 0;
  for (double v : all) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  auto quantile = [&](double p) {
    const auto idx = static_cast<std::size_t>(p * static_cast<double>(n - 1));
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(idx), all.end());
    return all[idx];
  };
  const double q1 = quantile(0.25);
  const double q3 = quantile(0.75);
  const double root_n = std::sqrt(static_cast<double>(n));
  return {mean, sd / root_n, (q3 - q1) / 1.349 / root_n};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Direct Monte Carlo

/// Sorted uniforms have density (2k)! on the increasing simplex, so the
/// sample mean of the integrand is divided by (2k)!.
inline EvalResult l_direct_mc(const PairPartition& partition, double H, std::uint64_t samples,
                              std::uint64_t seed, int workers = 1) {
  detail::require_convergent(H);
  const int n = partition.size();
  const double alpha = 2 * H - 2;
  const auto pairs = partition.pairs();
  auto draw = [&](std::mt19937_64& rng) {
    double s[64];
    for (int i = 0; i < n; ++i) s[i] = open_uniform(rng);
    std::sort(s, s + n);
    double value = 1;
    for (auto [a, b] : pairs) value *= std::pow(s[b - 1] - s[a - 1], alpha);
    return value;
  };
  const auto summary = detail::run_workers(samples, seed, workers, draw);
  const double scale = factorial(n);
  EvalResult r;
  r.value = summary.mean / scale;
  r.method = Method::direct_mc;
  r.std_error = summary.std_error / scale;
  r.robust_error = summary.robust_error / scale;
  r.count = samples;
  r.seed = seed;
  r.workers = workers;
  r.H = H;
  r.subject = to_string(partition);
  return r;
}

// ---------------------------------------------------------------------------
// Closed forms

/// prod Gamma(lambda_i + 1) / Gamma(n + sum lambda_i + 1), the integral of
/// prod x_i^{lambda_i} over {x_i > 0, sum x_i < 1}.
inline double dirichlet_closed_form(const std::vector<double>& lambda) {
  if (lambda.empty()) throw DimensionError("dirichlet_closed_form needs at least one exponent");
  double log_value = 0;
  double total = static_cast<double>(lambda.size());
  for (double l : lambda) {
    const double a = l + 1;
    if (!std::isfinite(a)) throw DomainError("dirichlet_closed_form: exponent must be finite");
    if (a <= 0 && a == std::floor(a)) throw DomainError("dirichlet_closed_form: pole of Gamma at " + std::to_string(a));
    if (!(a > 0)) throw DomainError("dirichlet_closed_form: needs lambda_i > -1");
    log_value += std::lgamma(a);
    total += l;
  }
  log_value -= std::lgamma(total + 1);
  return std::exp(log_value);
}

/// Gamma(2H-1)^k / Gamma(2kH+1); only the all-adjacent partition, whose
/// intervals are the singletons {2l}, reduces to the Dirichlet formula.
inline EvalResult l_closed_form(const PairPartition& partition, double H) {
  detail::require_convergent(H);
  if (!partition.is_all_adjacent())
    throw DomainError("closed form is available only for the all-adjacent partition " +
                      to_string(PairPartition::all_adjacent(partition.k())));
  std::vector<double> lambda(static_cast<std::size_t>(partition.size()), 0.0);
  for (int l = 1; l <= partition.k(); ++l) lambda[static_cast<std::size_t>(2 * l - 1)] = 2 * H - 2;
  EvalResult r;
  r.value = dirichlet_closed_form(lambda);
  r.method = Method::closed_form;
  r.tol = 4 * std::numeric_limits<double>::epsilon() * r.value * partition.size();
  r.count = 0;
  r.H = H;
  r.subject = to_string(partition);
  return r;
}

// ---------------------------------------------------------------------------
// Adaptive quadrature (2k <= 4)
//
// Coordinates s_j = u_j u_{j+1} ... u_n with u in (0,1)^n. Then
// ds = prod u_i^{i-1} du, s_b - s_a = s_b (1 - u_a ... u_{b-1}), and u_n
// integrates out to 1/(2kH). Each adjacent pair {a,a+1} leaves a factor
// (1-u_a)^alpha, removed by 1 - u_a = w^{1/(1+alpha)}; the other pairs are
// singular only at corners, which tanh-sinh handles at the endpoints. Every
// coordinate carries its complement 1 - u so products near 1 keep their
// relative accuracy.

namespace detail {

struct AdaptiveState {
  int vars = 0;  // n - 1
  double alpha = 0;
  std::vector<double> beta;             // exponent of u_i
  std::vector<bool> adjacent;           // pair {i, i+1} in P
  std::vector<std::pair<int, int>> far;  // pairs with b > a + 1
  std::vector<double> u, cu;
  std::uint64_t evaluations = 0;
  double inner_tol = 1e-12;
  double worst_error = 0;
  std::vector<std::unique_ptr<boost::math::quadrature::tanh_sinh<double>>> rules;  // one per depth
};

/// Nonadjacent factors and monomials at a full point, in log space. Points
/// within ~1e-300 of a corner can overflow a double; their quadrature
/// weights are of the same order, so the log is capped instead.
inline double adaptive_leaf(AdaptiveState& st) {
  ++st.evaluations;
  double log_value = 0;
  for (int i = 0; i < st.vars; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    if (st.beta[ii] != 0) log_value += st.beta[ii] * std::log(st.u[ii]);
  }
  for (auto [a, b] : st.far) {
    double log_product = 0;
    for (int i = a; i < b; ++i) log_product += std::log1p(-st.cu[static_cast<std::size_t>(i - 1)]);
    log_value += st.alpha * std::log(-std::expm1(log_product));
  }
  return std::exp(std::min(log_value, 690.0));
}

inline double adaptive_level(AdaptiveState& st, int depth, double tol) {
  if (depth == st.vars) return adaptive_leaf(st);
  const auto d = static_cast<std::size_t>(depth);
  const bool adj = st.adjacent[d];
  const double inv = 1.0 / (1.0 + st.alpha);
  auto integrand = [&](double x, double xc) {
    const double lower = xc <= 0 ? -xc : 1.0 - xc;  // distance to 0
    const double upper = xc > 0 ? xc : 1.0 - x;     // distance to 1
    if (adj) {
      // 1 - u = w^{1/(1+alpha)}
      st.cu[d] = std::pow(lower, inv);
      st.u[d] = -std::expm1(inv * std::log1p(-upper));
    } else {
      st.u[d] = lower;
      st.cu[d] = upper;
    }
    if (!(st.u[d] > 0)) return 0.0;
    return adaptive_level(st, depth + 1, st.inner_tol);
  };
  auto& rule = *st.rules[d];  // integrate is not const-qualified in this Boost
  double error = 0;
  double l1 = 0;
  std::size_t levels = 0;
  double value = rule.integrate(integrand, 0.0, 1.0, tol, &error, &l1, &levels);
  if (adj) value *= inv;
  st.worst_error = std::max(st.worst_error, depth == 0 ? error * (adj ? inv : 1.0) : 0.0);
  return value;
}

}  // namespace detail

/// Nested tanh-sinh in the coordinates above; 2k <= 4. tol is absolute and
/// relative: success when the error estimate is within tol * max(1, |L|).
/// Fails with NumericError (carrying the best estimate) past the budget.
inline EvalResult l_adaptive(const PairPartition& partition, double H, double tol = 1e-10,
                             std::uint64_t max_evaluations = 200'000'000) {
  detail::require_convergent(H);
  if (partition.size() > 4) throw SizeError("adaptive quadrature supports 2k <= 4");
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  const int n = partition.size();
  const double alpha = 2 * H - 2;

  detail::AdaptiveState st;
  st.vars = n - 1;
  st.alpha = alpha;
  st.beta.assign(static_cast<std::size_t>(n - 1), 0.0);
  st.adjacent.assign(static_cast<std::size_t>(n - 1), false);
  st.u.assign(static_cast<std::size_t>(n - 1), 0.5);
  st.cu.assign(static_cast<std::size_t>(n - 1), 0.5);
  for (int i = 1; i < n; ++i) {
    int closed = 0;
    for (auto [a, b] : partition.pairs())
      if (b <= i) ++closed;
    st.beta[static_cast<std::size_t>(i - 1)] = (i - 1) + alpha * closed;
  }
  for (auto [a, b] : partition.pairs()) {
    if (b == a + 1 && alpha != 0)
      st.adjacent[static_cast<std::size_t>(a - 1)] = true;
    else if (alpha != 0)
      st.far.emplace_back(a, b);
  }
  for (int i = 1; i < n; ++i) st.rules.push_back(std::make_unique<boost::math::quadrature::tanh_sinh<double>>(15));
  st.inner_tol = std::min(tol * 1e-2, 1e-12);
  const double outer_tol = std::min(tol * 1e-1, 1e-10);

  double value = detail::adaptive_level(st, 0, outer_tol);
  value /= 2.0 * partition.k() * H;
  const double error = st.worst_error / (2.0 * partition.k() * H);

  EvalResult r;
  r.value = value;
  r.method = Method::adaptive;
  r.tol = error;
  r.count = st.evaluations;
  r.H = H;
  r.subject = to_string(partition);
  if (!std::isfinite(value) || error > tol * std::max(1.0, std::abs(value)) || st.evaluations > max_evaluations)
    throw NumericError("adaptive quadrature did not reach tolerance " + std::to_string(tol) + " (estimate " +
                           std::to_string(value) + ", error " + std::to_string(error) + ")",
                       value, error);
  return r;
}

// ---------------------------------------------------------------------------
// Pullback Monte Carlo (2k <= 6)

/// lambda_S = 2H-2 added once per interval of I(P) (a multiset), 0 elsewhere.
inline ExponentAssignment interval_exponents(const PairPartition& partition, double H) {
  ExponentAssignment lambda(partition.size());
  for (const auto& iv : interval_set(partition)) lambda.add(Subset::range(iv.lo, iv.hi), {2 * H - 2, 0.0});
  return lambda;
}

namespace detail {

/// The frame depends only on the chart, so it is built once per (n, q) with
/// a fixed seed and shared; building it costs a few hundred quad-precision
/// inversions.
inline OmegaPrimeFrame cached_frame(const BlowupChart& chart) {
  static std::mutex mutex;
  static std::map<std::vector<std::int64_t>, OmegaPrimeFrame> cache;
  std::vector<std::int64_t> key(chart.q().values().begin(), chart.q().values().begin() + chart.n() + 1);
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  try {
    return cache.emplace(key, omega_prime_frame(chart, 150, 0x5EEDULL)).first->second;
  } catch (const NumericError& e) {
    throw NumericError(std::string("bounding box construction failed: ") + e.what(), 0.0, e.achieved());
  }
}

}  // namespace detail

/// Averages the pulled-back integrand over Omega'. Sampling: y_1..y_{n-1}
/// uniform in the empirical box, f_[1,n] log-uniform over its observed range
/// (a unit-Jacobian change of coordinates), rejection outside Omega'. The
/// full-set form is taken from the draw rather than recomputed from y, which
/// would cancel catastrophically. A zero exponent assignment estimates 1/n!.
inline EvalResult pullback_mc(const BlowupChart& chart, const ExponentAssignment& lambda, std::uint64_t samples,
                              std::uint64_t seed, int workers = 1) {
  if (chart.n() > 6) throw SizeError("pullback Monte Carlo supports n <= 6");
  const OmegaPrimeFrame frame = detail::cached_frame(chart);
  const int n = chart.n();
  const double full_lo = frame.full_lo / 10;
  const double log_lo = std::log(full_lo);
  const double log_width = std::log(frame.full_hi) - log_lo;
  double slab_volume = log_width;
  for (int i = 0; i + 1 < n; ++i) slab_volume *= frame.box.hi[static_cast<std::size_t>(i)] - frame.box.lo[static_cast<std::size_t>(i)];
  const auto full = chart.full_mask();
  const double q_n = static_cast<double>(chart.q()(n));

  auto draw = [&](std::mt19937_64& rng) {
    std::vector<double> y(static_cast<std::size_t>(n));
    double partial = 0;
    for (int i = 0; i + 1 < n; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      y[ii] = frame.box.lo[ii] + (frame.box.hi[ii] - frame.box.lo[ii]) * open_uniform(rng);
      partial += y[ii];
    }
    const double z = std::exp(log_lo + log_width * open_uniform(rng));
    y[static_cast<std::size_t>(n - 1)] = z + q_n - partial;
    auto f = f_values<double>(chart, y);
    f[full] = z;
    if (!detail::all_positive(chart, f)) return 0.0;
    double total = 0;
    for (double v : F_from_f(chart, f)) total += v;
    if (!(total < 1)) return 0.0;
    return pullback_integrand_from_f(chart, lambda, f).real() * z;
  };
  const auto summary = detail::run_workers(samples, seed, workers, draw);
  EvalResult r;
  r.value = summary.mean * slab_volume;
  r.method = Method::pullback_mc;
  r.std_error = summary.std_error * slab_volume;
  r.robust_error = summary.robust_error * slab_volume;
  r.count = samples;
  r.seed = seed;
  r.workers = workers;
  return r;
}

inline EvalResult l_via_pullback(const PairPartition& partition, double H, std::uint64_t samples, std::uint64_t seed,
                                 int workers = 1) {
  detail::require_convergent(H);
  if (partition.size() > 6) throw SizeError("pullback check supports 2k <= 6");
  const BlowupChart chart(partition.size());
  auto r = pullback_mc(chart, interval_exponents(partition, H), samples, seed, workers);
  r.H = H;
  r.subject = to_string(partition);
  return r;
}

// ---------------------------------------------------------------------------
// Wick grid oracle

namespace detail {

/// sum over 0 <= t_1 < ... < t_n < m of sum_P prod_{pairs} c(t_a, t_b).
inline double wick_grid_sum(const std::vector<PairPartition>& partitions, int n, int m, const FbmCovariance& cov,
                            std::uint64_t& tuples) {
  std::vector<double> lag(static_cast<std::size_t>(m), 0.0);
  const double h = 1.0 / m;
  for (int j = 0; j < m; ++j) lag[static_cast<std::size_t>(j)] = cov.increments(0.0, h, j * h, (j + 1) * h);
  std::vector<int> t(static_cast<std::size_t>(n));
  double total = 0;
  auto recurse = [&](auto&& self, int depth, int from) -> void {
    if (depth == n) {
      ++tuples;
      double sum = 0;
      for (const auto& p : partitions) {
        double prod = 1;
        for (auto [a, b] : p.pairs()) prod *= lag[static_cast<std::size_t>(t[b - 1] - t[a - 1])];
        sum += prod;
      }
      total += sum;
      return;
    }
    for (int v = from; v <= m - (n - depth); ++v) {
      t[static_cast<std::size_t>(depth)] = v;
      self(self, depth + 1, v + 1);
    }
  };
  recurse(recurse, 0, 0);
  return total;
}

}  // namespace detail

/// Riemann sum over strictly increasing multi-indices of an m-point grid,
/// Richardson-extrapolated over {m, 2m} with error order m^{-(2H-1)}
/// (order 1 at H = 1). tol reports |extrapolated - A(2m)|. Cost grows like
/// C(2m, 2k). A letter of odd multiplicity gives exactly 0.
inline EvalResult wick_grid_oracle(const Word& word, double H, int m) {
  if (m < 8) throw DomainError("wick grid needs m >= 8");
  if (!(H > 0.5) || H > 1) throw DomainError("outside convergent region; use poles (wick grid needs 1/2 < H <= 1)");
  EvalResult r;
  r.method = Method::wick_grid;
  r.H = H;
  r.subject = to_string(word);
  const auto partitions = enumerate_refining(word);
  if (partitions.empty()) {
    r.value = 0;
    r.tol = 0;
    return r;
  }
  const FbmCovariance cov(H);
  std::uint64_t tuples = 0;
  const double coarse = detail::wick_grid_sum(partitions, word.size(), m, cov, tuples);
  const double fine = detail::wick_grid_sum(partitions, word.size(), 2 * m, cov, tuples);
  const double factor = std::pow(2.0, 2 * H - 1);
  const double extrapolated = (factor * fine - coarse) / (factor - 1);
  r.value = extrapolated;
  r.tol = std::abs(extrapolated - fine);
  r.count = tuples;
  return r;
}

}  // namespace sigpole
