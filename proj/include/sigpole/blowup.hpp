#pragma once

// Blowup of the orthant: affine forms f_S(y) = -q(|S|) + sum_{i in S} y_i,
// the region Omega = {f_S > 0 for all nonempty S}, the map
// F_i(y) = prod_{S containing i} f_S(y) from Omega onto (0,inf)^n, its
// Jacobian factorisation dF/dy = D A, the positive factor R, and the
// pulled-back simplex integrand.
//
// Subsets of [1,n] are bitmasks; a chart indexes them by mask value.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "sigpole/errors.hpp"
#include "sigpole/linalg.hpp"
#include "sigpole/rational.hpp"
#include "sigpole/subset.hpp"

namespace sigpole {

// ---------------------------------------------------------------------------
// Gap function

/// q(0..n): q(0) = 1, q(a) + q(b) < q(max(a,b)+1), 3 q(a) <= q(a+1).
class GapFunction {
 public:
  explicit GapFunction(std::vector<std::int64_t> values) : q_(std::move(values)) {
    if (q_.empty()) throw DomainError("gap function needs q(0)");
    if (q_[0] != 1) throw DomainError("gap function requires q(0) = 1");
    for (auto v : q_)
      if (v <= 0) throw DomainError("gap function values must be positive integers");
    const int top = n();
    for (int a = 0; a + 1 <= top; ++a) {
      if (3 * q_[a] > q_[a + 1])
        throw DomainError("gap function violates 3q(a) <= q(a+1) at a = " + std::to_string(a));
      for (int b = 0; b + 1 <= top; ++b)
        if (q_[a] + q_[b] >= q_[std::max(a, b) + 1])
          throw DomainError("gap function violates q(a)+q(b) < q(max(a,b)+1) at a = " + std::to_string(a) +
                            ", b = " + std::to_string(b));
    }
  }

  /// q(r) = 3^r for r = 0..n.
  static GapFunction powers_of_three(int n) {
    std::vector<std::int64_t> v{1};
    for (int r = 1; r <= n; ++r) v.push_back(v.back() * 3);
    return GapFunction(std::move(v));
  }

  int n() const { return static_cast<int>(q_.size()) - 1; }
  std::int64_t operator()(int r) const { return q_.at(static_cast<std::size_t>(r)); }
  const std::vector<std::int64_t>& values() const& { return q_; }
  std::vector<std::int64_t> values() && { return std::move(q_); }

 private:
  std::vector<std::int64_t> q_;
};

// ---------------------------------------------------------------------------
// Monotone lists

/// Nonempty subsets S_1 < S_2 < ... < S_r, strictly increasing by inclusion.
class MonotoneList {
 public:
  MonotoneList() = default;

  explicit MonotoneList(std::vector<Subset> sets) : sets_(std::move(sets)) {
    std::sort(sets_.begin(), sets_.end(), [](Subset a, Subset b) {
      return a.size() != b.size() ? a.size() < b.size() : a.bits < b.bits;
    });
    for (std::size_t i = 0; i < sets_.size(); ++i) {
      if (sets_[i].empty()) throw DomainError("monotone list may not contain the empty set");
      if (i > 0 && (sets_[i] == sets_[i - 1] || !sets_[i - 1].subset_of(sets_[i])))
        throw DomainError("list is not monotone: " + to_string(sets_[i - 1]) + " vs " + to_string(sets_[i]));
    }
  }

  const std::vector<Subset>& sets() const& { return sets_; }
  std::vector<Subset> sets() && { return std::move(sets_); }
  std::size_t size() const { return sets_.size(); }
  bool contains(Subset s) const { return std::find(sets_.begin(), sets_.end(), s) != sets_.end(); }

 private:
  std::vector<Subset> sets_;
};

/// Every nonempty monotone list of nonempty subsets of [1,n].
inline std::vector<MonotoneList> all_monotone_lists(int n) {
  if (n < 1 || n > 6) throw SizeError("all_monotone_lists supports 1 <= n <= 6");
  std::vector<MonotoneList> out;
  std::vector<Subset> chain;
  const std::uint64_t limit = std::uint64_t{1} << n;
  auto extend = [&](auto&& self, Subset last) -> void {
    for (std::uint64_t bits = 1; bits < limit; ++bits) {
      const Subset s{bits};
      if (s == last || !last.subset_of(s)) continue;
      chain.push_back(s);
      out.emplace_back(chain);
      self(self, s);
      chain.pop_back();
    }
  };
  extend(extend, Subset{});
  return out;
}

// ---------------------------------------------------------------------------
// Chart

struct CauchyBinetTerm {
  std::vector<Subset> columns;
  std::int64_t det_squared = 0;
};

/// Dimension n, gap function q and the subset tables. Immutable once built.
class BlowupChart {
 public:
  static constexpr int kMaxDimension = 16;
  static constexpr int kMaxExactDimension = 4;

  explicit BlowupChart(int n) : BlowupChart(n, GapFunction::powers_of_three(n)) {}

  BlowupChart(int n, GapFunction q) : n_(n), q_(std::move(q)) {
    if (n < 1 || n > kMaxDimension)
      throw SizeError("chart dimension must be in [1," + std::to_string(kMaxDimension) + "]");
    if (q_.n() < n) throw DomainError("gap function must be defined on 0..n");
    containing_.resize(static_cast<std::size_t>(n) + 1);
    for (std::uint64_t bits = 1; bits <= full_mask(); ++bits)
      for (int i = 1; i <= n; ++i)
        if ((bits >> (i - 1)) & 1U) containing_[static_cast<std::size_t>(i)].push_back(Subset{bits});
    if (n <= kMaxExactDimension) build_cauchy_binet();
  }

  int n() const { return n_; }
  const GapFunction& q() const { return q_; }
  std::uint64_t full_mask() const { return (std::uint64_t{1} << n_) - 1; }
  /// Number of nonempty subsets, 2^n - 1.
  std::size_t subset_count() const { return static_cast<std::size_t>(full_mask()); }
  /// Nonempty subsets containing position i.
  const std::vector<Subset>& containing(int i) const { return containing_.at(static_cast<std::size_t>(i)); }
  /// Index sets {S_1..S_n} with det(1_{S_1} ... 1_{S_n}) != 0; n <= 4 only.
  const std::vector<CauchyBinetTerm>& cauchy_binet_terms() const {
    if (n_ > kMaxExactDimension) throw SizeError("Cauchy-Binet expansion is only tabulated for n <= 4");
    return cauchy_binet_;
  }

  void require_subset(Subset s) const {
    if (s.empty()) throw DomainError("f_S is only evaluated for nonempty S (f of the empty set is -1)");
    if (!s.subset_of(Subset{full_mask()})) throw DimensionError("subset outside [1,n]");
  }

  template <class T>
  void require_point(std::span<const T> y) const {
    if (static_cast<int>(y.size()) != n_)
      throw DimensionError("point has " + std::to_string(y.size()) + " coordinates, chart has n = " + std::to_string(n_));
  }

 private:
  void build_cauchy_binet() {
    std::vector<std::uint64_t> masks;
    for (std::uint64_t bits = 1; bits <= full_mask(); ++bits) masks.push_back(bits);
    std::vector<std::size_t> pick(static_cast<std::size_t>(n_));
    auto recurse = [&](auto&& self, std::size_t depth, std::size_t from) -> void {
      if (depth == pick.size()) {
        ExactMatrix<std::int64_t> m(n_);
        for (int c = 0; c < n_; ++c)
          for (int r = 0; r < n_; ++r) m(r, c) = (masks[pick[static_cast<std::size_t>(c)]] >> r) & 1U;
        const std::int64_t det = bareiss_determinant(m);
        if (det != 0) {
          CauchyBinetTerm term;
          for (auto i : pick) term.columns.push_back(Subset{masks[i]});
          term.det_squared = det * det;
          cauchy_binet_.push_back(std::move(term));
        }
        return;
      }
      for (std::size_t i = from; i < masks.size(); ++i) {
        pick[depth] = i;
        self(self, depth + 1, i + 1);
      }
    };
    recurse(recurse, 0, 0);
  }

  int n_;
  GapFunction q_;
  std::vector<std::vector<Subset>> containing_;
  std::vector<CauchyBinetTerm> cauchy_binet_;
};

// ---------------------------------------------------------------------------
// Affine forms and the region

/// f_S(y) = -q(|S|) + sum_{i in S} y_i.
template <class T>
T f_eval(const BlowupChart& chart, Subset s, std::span<const T> y) {
  chart.require_subset(s);
  chart.require_point(y);
  T sum = T(-chart.q()(s.size()));
  for (int i : s.members()) sum += y[static_cast<std::size_t>(i - 1)];
  return sum;
}

/// All f_S indexed by mask; entry 0 holds f of the empty set, -1.
template <class T>
std::vector<T> f_values(const BlowupChart& chart, std::span<const T> y) {
  chart.require_point(y);
  std::vector<T> f(static_cast<std::size_t>(chart.full_mask()) + 1, T(0));
  f[0] = T(-1);
  // sums over subsets by lowest set bit
  std::vector<T> sums(f.size(), T(0));
  for (std::uint64_t bits = 1; bits <= chart.full_mask(); ++bits) {
    const int low = std::countr_zero(bits);
    sums[bits] = sums[bits & (bits - 1)] + y[static_cast<std::size_t>(low)];
    f[bits] = sums[bits] - T(chart.q()(std::popcount(bits)));
  }
  return f;
}

template <class T>
bool omega_contains(const BlowupChart& chart, std::span<const T> y) {
  const auto f = f_values(chart, y);
  for (std::uint64_t bits = 1; bits <= chart.full_mask(); ++bits)
    if (!(f[bits] > 0)) return false;
  return true;
}

/// Nonempty S with f_S(y) == 0.
template <class T>
std::vector<Subset> vanishing_set(const BlowupChart& chart, std::span<const T> y) {
  const auto f = f_values(chart, y);
  std::vector<Subset> out;
  for (std::uint64_t bits = 1; bits <= chart.full_mask(); ++bits)
    if (f[bits] == 0) out.push_back(Subset{bits});
  return out;
}

// ---------------------------------------------------------------------------
// The map F

template <class T>
std::vector<T> F_from_f(const BlowupChart& chart, const std::vector<T>& f) {
  std::vector<T> x(static_cast<std::size_t>(chart.n()), T(1));
  for (int i = 1; i <= chart.n(); ++i)
    for (auto s : chart.containing(i)) x[static_cast<std::size_t>(i - 1)] *= f[s.bits];
  return x;
}

/// F_i(y) = prod_{S containing i} f_S(y).
template <class T>
std::vector<T> F_eval(const BlowupChart& chart, std::span<const T> y) {
  return F_from_f(chart, f_values(chart, y));
}

template <class T>
bool omega_prime_contains(const BlowupChart& chart, std::span<const T> y) {
  if (!omega_contains(chart, y)) return false;
  T total(0);
  for (const auto& v : F_eval(chart, y)) total += v;
  return total < 1;
}

// ---------------------------------------------------------------------------
// Jacobian

/// A_ij = sum_{S containing i and j} 1/f_S. Empty when some f_S vanishes.
inline std::optional<Eigen::MatrixXd> a_matrix_from_f(const BlowupChart& chart, const std::vector<double>& f) {
  const int n = chart.n();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (std::uint64_t bits = 1; bits <= chart.full_mask(); ++bits) {
    if (f[bits] == 0.0) return std::nullopt;
    const double w = 1.0 / f[bits];
    const auto members = Subset{bits}.members();
    for (int i : members)
      for (int j : members) a(i - 1, j - 1) += w;
  }
  return a;
}

inline std::optional<Eigen::MatrixXd> a_matrix(const BlowupChart& chart, std::span<const double> y) {
  return a_matrix_from_f(chart, f_values(chart, y));
}

/// dF_i/dy_j = sum_{S containing i, j} prod_{S' containing i, S' != S} f_S'.
/// Valid everywhere, including where some f_S vanishes.
inline Eigen::MatrixXd jacobian_product_rule(const BlowupChart& chart, std::span<const double> y) {
  const auto f = f_values(chart, y);
  const int n = chart.n();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i <= n; ++i)
    for (auto s : chart.containing(i)) {
      double rest = 1.0;
      for (auto t : chart.containing(i))
        if (t != s) rest *= f[t.bits];
      for (int j : s.members()) jac(i - 1, j - 1) += rest;
    }
  return jac;
}

/// dF/dy = D A with D = diag(F_i); falls back to the product rule when the
/// point lies on some hyperplane f_S = 0.
inline Eigen::MatrixXd jacobian_matrix(const BlowupChart& chart, std::span<const double> y) {
  const auto f = f_values(chart, y);
  auto a = a_matrix_from_f(chart, f);
  if (!a) return jacobian_product_rule(chart, y);
  const auto x = F_from_f(chart, f);
  Eigen::MatrixXd jac = *a;
  for (int i = 0; i < chart.n(); ++i) jac.row(i) *= x[static_cast<std::size_t>(i)];
  return jac;
}

/// det dF/dy = prod_S f_S^{|S|} det A on the A-path.
inline double det_jacobian(const BlowupChart& chart, std::span<const double> y) {
  const auto f = f_values(chart, y);
  auto a = a_matrix_from_f(chart, f);
  if (!a) return lu_determinant(jacobian_product_rule(chart, y));
  double det = lu_determinant(*a);
  for (std::uint64_t bits = 1; bits <= chart.full_mask(); ++bits) det *= std::pow(f[bits], std::popcount(bits));
  return det;
}

// ---------------------------------------------------------------------------
// R = det(dF/dy) / prod_S f_S^{|S|-1}

namespace detail {

template <class T>
T det_a_times_product(const BlowupChart& chart, const std::vector<T>& f) {
  const int n = chart.n();
  T product(1);
  for (std::uint64_t bits = 1; bits <= chart.full_mask(); ++bits) product *= f[bits];
  if constexpr (std::is_floating_point_v<T>) {
    auto a = a_matrix_from_f(chart, f);
    if (!a) throw DomainError("interior R requires every f_S != 0");
    return lu_determinant(*a) * product;
  } else {
    ExactMatrix<T> a(n);
    for (std::uint64_t bits = 1; bits <= chart.full_mask(); ++bits) {
      if (f[bits] == 0) throw DomainError("interior R requires every f_S != 0");
      const T w = T(1) / f[bits];
      const auto members = Subset{bits}.members();
      for (int i : members)
        for (int j : members) a(i - 1, j - 1) += w;
    }
    return bareiss_determinant(std::move(a)) * product;
  }
}

}  // namespace detail

/// det A(y) * prod_S f_S(y); needs every f_S(y) != 0.
template <class T>
T r_interior(const BlowupChart& chart, std::span<const T> y) {
  return detail::det_a_times_product(chart, f_values(chart, y));
}

/// sum over n-element sets {S_1..S_n} of det(1_{S_1}..1_{S_n})^2 times the
/// product of the remaining f_P. Polynomial, so defined on the boundary.
template <class T>
T r_exact(const BlowupChart& chart, std::span<const T> y) {
  if (chart.n() > BlowupChart::kMaxExactDimension) throw SizeError("exact R is limited to n <= 4");
  const auto f = f_values(chart, y);
  T total(0);
  for (const auto& term : chart.cauchy_binet_terms()) {
    T product(static_cast<std::int64_t>(term.det_squared));
    for (std::uint64_t bits = 1; bits <= chart.full_mask(); ++bits) {
      if (std::find(term.columns.begin(), term.columns.end(), Subset{bits}) != term.columns.end()) continue;
      product *= f[bits];
    }
    total += product;
  }
  return total;
}

// ---------------------------------------------------------------------------
// P_S

template <class T>
T ps_from_f(const BlowupChart& chart, Subset s, const std::vector<T>& f) {
  chart.require_subset(s);
  T total(0);
  for (int i : s.members()) {
    T product(1);
    for (auto t : chart.containing(i))
      if (!s.subset_of(t)) product *= f[t.bits];
    total += product;
  }
  return total;
}

/// P_S = sum_{i in S} prod_{T containing i, S not inside T} f_T.
template <class T>
T ps_eval(const BlowupChart& chart, Subset s, std::span<const T> y) {
  return ps_from_f(chart, s, f_values(chart, y));
}

// ---------------------------------------------------------------------------
// Boundary witnesses

/// A point where f_S vanishes exactly for S in the list and is positive for
/// every other nonempty S. The list is extended to a maximal flag
/// C_1 < ... < C_n; unlisted ranks get alpha_k = q(k) + theta*(q(k+1)-q(k))/2
/// with theta in (0,1) (q(n+1) is taken as 3q(n)), listed ranks alpha_k = q(k),
/// and y is the sequence of successive differences along the flag.
inline std::vector<Rational> witness_point(const BlowupChart& chart, const MonotoneList& list,
                                           const Rational& theta = make_rational(1, 2)) {
  if (theta <= 0 || theta >= 1) throw DomainError("witness_point: theta must lie in (0,1)");
  const int n = chart.n();
  const Subset all{chart.full_mask()};
  for (auto s : list.sets())
    if (!s.subset_of(all)) throw DimensionError("monotone list leaves [1,n]");

  std::vector<int> order;  // j_1, ..., j_n
  std::vector<bool> listed_rank(static_cast<std::size_t>(n) + 1, false);
  Subset current;
  auto append_from = [&](Subset target) {
    for (int i : target.members())
      if (!current.contains(i)) {
        order.push_back(i);
        current = current | Subset::of({i});
      }
  };
  for (auto s : list.sets()) {
    append_from(s);
    listed_rank[static_cast<std::size_t>(s.size())] = true;
  }
  append_from(all);

  const auto& q = chart.q();
  std::vector<Rational> alpha(static_cast<std::size_t>(n) + 1, Rational(0));
  for (int k = 1; k <= n; ++k) {
    const Rational qk(q(k));
    if (listed_rank[static_cast<std::size_t>(k)]) {
      alpha[k] = qk;
    } else {
      const Rational next = k < n ? Rational(q(k + 1)) : Rational(3 * q(n));
      alpha[k] = qk + theta * (next - qk) / 2;
    }
  }
  std::vector<Rational> y(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) y[static_cast<std::size_t>(order[k - 1] - 1)] = alpha[k] - alpha[k - 1];
  return y;
}

// ---------------------------------------------------------------------------
// Inverse of F

using Quad = boost::multiprecision::cpp_bin_float_quad;

template <class T = double>
struct FInverseResult {
  std::vector<T> y;
  double residual = 0;  // max_i |F_i(y) - x_i|, evaluated in T
  int polish_iterations = 0;
  int flow_substeps = 0;
};

namespace detail {

template <class T>
bool all_positive(const BlowupChart& chart, const std::vector<T>& f) {
  for (std::uint64_t bits = 1; bits <= chart.full_mask(); ++bits)
    if (!(f[bits] > 0)) return false;
  return true;
}

/// d log F / dy = A, or empty outside Omega.
template <class T>
std::optional<std::vector<T>> log_jacobian(const BlowupChart& chart, const std::vector<T>& f) {
  if (!all_positive(chart, f)) return std::nullopt;
  const int n = chart.n();
  std::vector<T> a(static_cast<std::size_t>(n * n), T(0));
  for (std::uint64_t bits = 1; bits <= chart.full_mask(); ++bits) {
    const T w = T(1) / f[bits];
    const auto members = Subset{bits}.members();
    for (int i : members)
      for (int j : members) a[static_cast<std::size_t>((i - 1) * n + (j - 1))] += w;
  }
  return a;
}

template <class T>
std::vector<T> log_F(const BlowupChart& chart, const std::vector<T>& f) {
  using std::log;
  std::vector<T> out(static_cast<std::size_t>(chart.n()), T(0));
  for (int i = 1; i <= chart.n(); ++i)
    for (auto s : chart.containing(i)) out[static_cast<std::size_t>(i - 1)] += log(f[s.bits]);
  return out;
}

/// dy/dtau = A(y)^{-1} v; empty once y has left Omega.
template <class T>
std::optional<std::vector<T>> flow_velocity(const BlowupChart& chart, const std::vector<T>& y,
                                            const std::vector<T>& v) {
  const auto a = log_jacobian(chart, f_values<T>(chart, y));
  if (!a) return std::nullopt;
  return solve_linear(*a, v);
}

template <class T>
std::vector<T> axpy(const std::vector<T>& y, const T& h, const std::vector<T>& d) {
  std::vector<T> out(y);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * d[i];
  return out;
}

/// One RK4 step, halved recursively when a stage leaves Omega.
template <class T>
bool rk4_step(const BlowupChart& chart, std::vector<T>& y, const std::vector<T>& v, const T& h, int depth,
              int& substeps) {
  ++substeps;
  auto k1 = flow_velocity(chart, y, v);
  std::optional<std::vector<T>> k2, k3, k4;
  const T half = h / 2;
  if (k1) k2 = flow_velocity(chart, axpy(y, half, *k1), v);
  if (k2) k3 = flow_velocity(chart, axpy(y, half, *k2), v);
  if (k3) k4 = flow_velocity(chart, axpy(y, h, *k3), v);
  if (k4) {
    std::vector<T> next(y);
    for (std::size_t i = 0; i < y.size(); ++i) next[i] += h / 6 * ((*k1)[i] + 2 * (*k2)[i] + 2 * (*k3)[i] + (*k4)[i]);
    if (all_positive(chart, f_values<T>(chart, next))) {
      y = std::move(next);
      return true;
    }
  }
  if (depth >= 30) return false;
  return rk4_step(chart, y, v, half, depth + 1, substeps) && rk4_step(chart, y, v, half, depth + 1, substeps);
}

}  // namespace detail

/// Solves F(y) = x for x in the open orthant. Lifts the path
/// tau -> exp((1-tau) log F(y0) + tau log x) from y0 = (t,...,t),
/// t = q(n)/n + 1, using d log F / dy = A, with 64 RK4 steps, then polishes
/// with damped Newton on log F(y) = log x (at most 200 iterations).
///
/// With q = 3^r the forms f_S at the solution can be many orders of
/// magnitude below q(n), so binary64 coordinates cannot reach residuals of
/// 1e-8 once n >= 4; use T = Quad there.
template <class T = double>
FInverseResult<T> f_inverse(const BlowupChart& chart, std::span<const double> x, double tol = 1e-10) {
  using std::abs;
  using std::log;
  chart.require_point(x);
  const int n = chart.n();
  for (double xi : x)
    if (!(xi > 0) || !std::isfinite(xi)) throw DomainError("f_inverse requires every x_i > 0");

  constexpr int kFlowSteps = 64;
  constexpr int kPolishBudget = 200;

  std::vector<T> y(static_cast<std::size_t>(n), T(chart.q()(n)) / n + 1);
  std::vector<T> target(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) target[static_cast<std::size_t>(i)] = log(T(x[static_cast<std::size_t>(i)]));

  auto log_residual = [&](const std::vector<T>& point) -> std::optional<std::vector<T>> {
    const auto f = f_values<T>(chart, point);
    if (!detail::all_positive(chart, f)) return std::nullopt;
    auto r = detail::log_F(chart, f);
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] -= target[static_cast<std::size_t>(i)];
    return r;
  };
  auto squared = [](const std::vector<T>& r) {
    T s(0);
    for (const auto& v : r) s += v * v;
    return s;
  };

  FInverseResult<T> result;
  std::vector<T> v = *log_residual(y);
  for (auto& e : v) e = -e;
  const T h = T(1) / kFlowSteps;
  for (int step = 0; step < kFlowSteps; ++step)
    if (!detail::rk4_step(chart, y, v, h, 0, result.flow_substeps))
      throw NumericError("f_inverse: flow left Omega and could not be refined", 0.0,
                         std::numeric_limits<double>::infinity());

  std::vector<T> r = *log_residual(y);
  for (int it = 0; it < kPolishBudget; ++it) {
    const auto a = detail::log_jacobian(chart, f_values<T>(chart, y));
    if (!a) break;
    std::vector<T> minus_r(r);
    for (auto& e : minus_r) e = -e;
    const auto delta = solve_linear(*a, minus_r);
    T step(1);
    bool improved = false;
    const T current = squared(r);
    for (int halving = 0; halving < 60; ++halving, step /= 2) {
      auto candidate = detail::axpy(y, step, delta);
      auto rc = log_residual(candidate);
      if (rc && squared(*rc) < current) {
        y = std::move(candidate);
        r = std::move(*rc);
        improved = true;
        break;
      }
    }
    ++result.polish_iterations;
    if (!improved) break;
  }

  const auto fx = F_eval<T>(chart, y);
  double worst = 0;
  for (int i = 0; i < n; ++i)
    worst = std::max(worst, static_cast<double>(abs(fx[static_cast<std::size_t>(i)] - T(x[static_cast<std::size_t>(i)]))));
  result.y = std::move(y);
  result.residual = worst;
  if (!(result.residual <= tol))
    throw NumericError("f_inverse: residual " + std::to_string(result.residual) + " above tolerance after " +
                           std::to_string(result.polish_iterations) + " polishing iterations",
                       0.0, result.residual);
  return result;
}

template <class T>
std::vector<double> to_doubles(const std::vector<T>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(static_cast<double>(e));
  return out;
}

// ---------------------------------------------------------------------------
// Pullback of the simplex integrand

/// Complex exponents lambda_S, one per nonempty S; zero unless set.
class ExponentAssignment {
 public:
  explicit ExponentAssignment(int n) : n_(n), values_((std::size_t{1} << n), {0.0, 0.0}) {
    if (n < 1 || n > BlowupChart::kMaxDimension) throw SizeError("exponent assignment dimension out of range");
  }

  int n() const { return n_; }

  void set(Subset s, std::complex<double> lambda) {
    if (s.empty() || !s.subset_of(Subset::full(n_))) throw DomainError("exponents are indexed by nonempty S in [1,n]");
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) throw DomainError("exponent must be finite");
    values_[s.bits] = lambda;
  }

  /// Adds to the exponent; I(P) is a multiset.
  void add(Subset s, std::complex<double> lambda) { set(s, values_.at(s.bits) + lambda); }

  std::complex<double> operator[](Subset s) const { return values_.at(s.bits); }

  std::vector<Subset> support() const {
    std::vector<Subset> out;
    for (std::uint64_t bits = 1; bits < values_.size(); ++bits)
      if (values_[bits] != std::complex<double>{}) out.push_back(Subset{bits});
    return out;
  }

  /// sum_{T subset of S} lambda_T for every S (zeta transform).
  std::vector<std::complex<double>> subset_sums() const {
    auto sums = values_;
    for (int i = 0; i < n_; ++i)
      for (std::uint64_t bits = 0; bits < sums.size(); ++bits)
        if ((bits >> i) & 1U) sums[bits] += sums[bits ^ (std::uint64_t{1} << i)];
    return sums;
  }

 private:
  int n_;
  std::vector<std::complex<double>> values_;
};

/// |S| - 1 + sum_{T subset of S} lambda_T, the exponent of f_S after pullback.
inline std::vector<std::complex<double>> pullback_exponents(const ExponentAssignment& lambda) {
  auto e = lambda.subset_sums();
  for (std::uint64_t bits = 1; bits < e.size(); ++bits) e[bits] += static_cast<double>(std::popcount(bits) - 1);
  e[0] = 0;
  return e;
}

namespace detail {

/// det A with the full-set term split off by the matrix determinant lemma,
/// det(B + 11^T / f_[1,n]) = det B (1 + 1^T B^{-1} 1 / f_[1,n]); avoids the
/// cancellation when f_[1,n] is many orders below the other forms.
inline double det_a_split(const BlowupChart& chart, const std::vector<double>& f) {
  const int n = chart.n();
  if (n == 1) return 1.0 / f[1];
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (std::uint64_t bits = 1; bits < chart.full_mask(); ++bits) {
    const double w = 1.0 / f[bits];
    const auto members = Subset{bits}.members();
    for (int i : members)
      for (int j : members) b(i - 1, j - 1) += w;
  }
  const auto lu = b.partialPivLu();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  return lu.determinant() * (1.0 + ones.dot(lu.solve(ones)) / f[chart.full_mask()]);
}

}  // namespace detail

/// The pulled-back integrand from the table of forms f (indexed by mask).
/// Lets callers supply forms computed more accurately than from y.
inline std::complex<double> pullback_integrand_from_f(const BlowupChart& chart, const ExponentAssignment& lambda,
                                                      const std::vector<double>& f) {
  if (lambda.n() != chart.n()) throw DimensionError("exponent assignment and chart dimensions differ");
  if (!detail::all_positive(chart, f)) throw DomainError("pullback_integrand: some f_S <= 0, point is outside Omega'");
  const auto exponents = pullback_exponents(lambda);
  std::complex<double> log_value = 0;
  double log_product_f = 0;
  for (std::uint64_t bits = 1; bits <= chart.full_mask(); ++bits) {
    const double lf = std::log(f[bits]);
    log_product_f += lf;
    log_value += exponents[bits] * lf;
    const auto lam = lambda[Subset{bits}];
    if (lam != std::complex<double>{}) {
      const double ps = ps_from_f(chart, Subset{bits}, f);
      if (!(ps > 0)) throw DomainError("pullback_integrand: P_S <= 0");
      log_value += lam * std::log(ps);
    }
  }
  const double det_a = detail::det_a_split(chart, f);
  if (!(det_a > 0)) throw DomainError("pullback_integrand: R <= 0");
  log_value += std::log(det_a) + log_product_f;
  return std::exp(log_value);
}

/// prod_S f_S^{|S|-1+sum_{T in S} lambda_T} P_S^{lambda_S} R(y), with powers
/// exp(lambda log base) over positive bases.
inline std::complex<double> pullback_integrand(const BlowupChart& chart, const ExponentAssignment& lambda,
                                               std::span<const double> y) {
  return pullback_integrand_from_f(chart, lambda, f_values(chart, y));
}

/// prod_S (F(y).1_S)^{lambda_S} det(dF/dy): the integrand before the
/// algebraic rearrangement, for cross-checking pullback_integrand.
inline std::complex<double> pushforward_density(const BlowupChart& chart, const ExponentAssignment& lambda,
                                                std::span<const double> y) {
  if (lambda.n() != chart.n()) throw DimensionError("exponent assignment and chart dimensions differ");
  const auto x = F_eval(chart, y);
  std::complex<double> log_value = 0;
  for (std::uint64_t bits = 1; bits <= chart.full_mask(); ++bits) {
    const auto lam = lambda[Subset{bits}];
    if (lam == std::complex<double>{}) continue;
    double sum = 0;
    for (int i : Subset{bits}.members()) sum += x[static_cast<std::size_t>(i - 1)];
    if (!(sum > 0)) throw DomainError("pushforward_density: nonpositive base");
    log_value += lam * std::log(sum);
  }
  const double det = lu_determinant(jacobian_product_rule(chart, y));
  if (!(det > 0)) throw DomainError("pushforward_density: nonpositive Jacobian");
  return std::exp(log_value) * det;
}

// ---------------------------------------------------------------------------
// Bounding box of Omega'

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  double volume() const {
    double v = 1;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
  }
};

/// Empirical description of Omega' = F^{-1}(simplex): a box for y_1..y_n
/// and the observed range of f_[1,n] = sum y - q(n). The lower faces
/// y_i > q(1) are exact; everything else comes from pushing simplex points
/// (interior, on the face sum x = 1, and with coordinates near 0) through
/// f_inverse, padded by `margin` of the observed width. For q = 3^r the
/// full-set form sits at ~1e-3 (n = 3) and ~1e-11 (n = 4) while the others
/// stay O(1), so Omega' is a thin slab along sum y = q(n).
struct OmegaPrimeFrame {
  Box box;
  double full_lo = 0;  // range of f_[1,n]
  double full_hi = 0;
};

inline OmegaPrimeFrame omega_prime_frame(const BlowupChart& chart, int samples = 600, std::uint64_t seed = 1,
                                         double margin = 0.1) {
  const int n = chart.n();
  const double floor_value = static_cast<double>(chart.q()(1));
  OmegaPrimeFrame frame;
  frame.box = Box{std::vector<double>(static_cast<std::size_t>(n), floor_value),
                  std::vector<double>(static_cast<std::size_t>(n), floor_value)};
  frame.full_lo = std::numeric_limits<double>::infinity();
  frame.full_hi = 0;
  std::mt19937_64 rng(seed);
  auto uniform = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  constexpr double kEdge = 1e-12;

  auto visit = [&](std::vector<double> x) {
    for (auto& v : x) v = std::max(v, kEdge);
    const auto y = f_inverse<Quad>(chart, x, 1e-9).y;
    Quad sum(0);
    for (int i = 0; i < n; ++i) {
      auto& hi = frame.box.hi[static_cast<std::size_t>(i)];
      hi = std::max(hi, static_cast<double>(y[static_cast<std::size_t>(i)]));
      sum += y[static_cast<std::size_t>(i)];
    }
    const double full = static_cast<double>(sum - chart.q()(n));
    frame.full_lo = std::min(frame.full_lo, full);
    frame.full_hi = std::max(frame.full_hi, full);
  };

  for (int i = 0; i < n; ++i) {  // near the vertices
    std::vector<double> x(static_cast<std::size_t>(n), kEdge);
    x[static_cast<std::size_t>(i)] = 1.0 - n * kEdge;
    visit(x);
  }
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int s = 0; s < samples; ++s) {
    double total = 0;
    std::vector<double> e(static_cast<std::size_t>(n) + 1);
    for (auto& v : e) {
      v = -std::log(uniform());
      total += v;
    }
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = e[static_cast<std::size_t>(i)] / total;
    if (s % 3 == 1) {
      double partial = 0;
      for (double v : x) partial += v;
      for (auto& v : x) v = v / partial * (1.0 - kEdge);
    } else if (s % 3 == 2) {
      for (auto& v : x)
        if (uniform() < 0.5) v = kEdge;
    }
    visit(x);
  }
  for (int i = 0; i < n; ++i) {
    auto& hi = frame.box.hi[static_cast<std::size_t>(i)];
    hi += margin * (hi - floor_value);
  }
  frame.full_hi *= 1.0 + margin;
  return frame;
}

inline Box omega_prime_bounding_box(const BlowupChart& chart, int samples = 600, std::uint64_t seed = 1,
                                    double margin = 0.1) {
  return omega_prime_frame(chart, samples, seed, margin).box;
}

}  // namespace sigpole
