#pragma once

// Self-check suites run by `sigpole verify`. Each check is independent and
// reports pass/fail with a short detail string.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sigpole/blowup.hpp"
#include "sigpole/combinatorics.hpp"
#include "sigpole/poles.hpp"
#include "sigpole/quadrature.hpp"
#include "sigpole/serialize.hpp"
#include "sigpole/signature.hpp"

namespace sigpole {

struct Check {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct VerifyOptions {
  bool quick = false;
  std::vector<std::int64_t> q;  // empty: 3^r
  std::uint64_t seed = 0x46424D30ULL;
};

namespace detail {

inline Check run_check(const std::string& suite, const std::string& name, const std::function<std::string()>& body) {
  Check c{suite, name, false, "", 0};
  const auto start = std::chrono::steady_clock::now();
  try {
    c.detail = body();
    c.passed = c.detail.empty() || c.detail.rfind("ok", 0) == 0;
  } catch (const std::exception& e) {
    c.detail = std::string("exception: ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return c;
}

inline std::string close(double got, double want, double rel, const std::string& what) {
  if (std::abs(got - want) <= rel * std::abs(want)) return "";
  return what + ": got " + format_double(got) + ", want " + format_double(want);
}

inline BlowupChart verify_chart(int n, const VerifyOptions& o) {
  if (o.q.empty()) return BlowupChart(n);
  std::vector<std::int64_t> q(o.q.begin(), o.q.begin() + std::min<std::size_t>(o.q.size(), n + 1));
  return BlowupChart(n, GapFunction(q));
}

struct MarkedSet {
  const char* set;
  int twice_bracket;
  Rational offset;
  Rational step;
};

inline const char* eighteen_point_pairs() { return "1-7,2-8,3-5,4-6,9-11,10-18,12-17,13-14,15-16"; }

inline std::vector<MarkedSet> marked_sets() {
  return {{"2-8,10-11,13-17", 16, make_rational(1, 8), make_rational(1, 16)},
          {"3-4,6-11,13-14,17-18", 4, make_rational(-2), make_rational(1, 4)},
          {"1-3,5-6,8-9,12,14,16,18", 6, make_rational(-5, 6), make_rational(1, 6)},
          {"4-6,14,16", 8, make_rational(3, 8), make_rational(1, 8)},
          {"2-7,10-11,13-17", 14, make_rational(1, 14), make_rational(1, 14)}};
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline std::vector<Check> verify_combinatorics(const VerifyOptions& o) {
  const std::string suite = "combinatorics";
  std::vector<Check> out;
  out.push_back(detail::run_check(suite, "ten-letter word refinement", [] {
    const Word w({6, 3, 1, 3, 6, 6, 1, 5, 6, 5});
    const auto p1 = parse_pairs("1-2,3-4,5-6,7-8,9-10");
    const auto p2 = parse_pairs("1-6,2-4,3-7,5-9,8-10");
    const auto p3 = parse_pairs("1-9,2-4,3-7,5-6,8-10");
    const auto p4 = parse_pairs("1-9,2-7,3-4,5-6,8-10");
    if (refines(p1, w) || !refines(p2, w) || !refines(p3, w) || refines(p4, w)) return std::string("mismatch");
    return std::string();
  }));
  out.push_back(detail::run_check(suite, "eighteen-point bracket counts", [] {
    const auto p = parse_pairs(detail::eighteen_point_pairs());
    for (const auto& f : detail::marked_sets()) {
      const auto s = parse_position_set(f.set);
      if (2 * bracket_count(s, p) != f.twice_bracket) return std::string("2[S|P] wrong for ") + f.set;
      if (bracket_breakdown(s, p).twice_bracket != f.twice_bracket) return std::string("breakdown wrong for ") + f.set;
    }
    return std::string();
  }));
  const int max_k = o.quick ? 3 : 4;
  out.push_back(detail::run_check(suite, "bracket identities, 2k <= " + std::to_string(2 * max_k), [max_k] {
    std::size_t cases = 0;
    for (int k = 1; k <= max_k; ++k)
      for (const auto& p : all_pair_partitions(k))
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (2 * k)); ++bits) {
          const auto s = PositionSet::from_mask(Subset{bits});
          const int b = bracket_count(s, p);
          if (bracket_count_via_aug_def(s, p) != b) return "aug/def mismatch at " + to_string(p) + " S=" + to_string(s);
          if (bracket_breakdown(s, p).twice_bracket != 2 * b) return "breakdown mismatch at " + to_string(p);
          int sum = 0;
          for (const auto& iv : s.maximal_intervals()) sum += bracket_count(PositionSet::from_intervals({iv}), p);
          if (sum != b) return "additivity fails at " + to_string(p) + " S=" + to_string(s);
          ++cases;
        }
    return "ok (" + std::to_string(cases) + " cases)";
  }));
  out.push_back(detail::run_check(suite, "refining counts", [] {
    for (int k = 1; k <= 5; ++k) {
      const auto n = enumerate_refining(Word(std::vector<int>(2 * k, 1))).size();
      if (n != odd_double_factorial(2 * k)) return "wrong count at k=" + std::to_string(k);
    }
    if (!enumerate_refining(Word({1, 2, 2, 3})).empty()) return std::string("odd letters refined");
    return std::string();
  }));
  return out;
}

inline std::vector<Check> verify_poles(const VerifyOptions& o) {
  const std::string suite = "poles";
  std::vector<Check> out;
  out.push_back(detail::run_check(suite, "eighteen-point progressions", [] {
    const auto p = parse_pairs(detail::eighteen_point_pairs());
    const auto poles = candidate_poles(p);
    for (const auto& f : detail::marked_sets()) {
      const auto s = parse_position_set(f.set);
      const int b = bracket_count(s, p);
      const RationalProgression got(1 - make_rational(s.size(), 2 * b), make_rational(1, 2 * b));
      if (!(got == RationalProgression(f.offset, f.step))) return std::string("progression wrong for ") + f.set;
      if (!poles.contains(f.offset)) return "offset " + to_string(f.offset) + " missing from the candidate set";
    }
    return std::string();
  }));
  out.push_back(detail::run_check(suite, "k=1 contributions", [] {
    const auto c = candidate_contributions(parse_pairs("1-2"));
    if (c.size() != 2 || !(c[0].progression == RationalProgression(make_rational(1, 2), make_rational(1, 2))) ||
        !(c[1].progression == RationalProgression(Rational(0), make_rational(1, 2))))
      return std::string("expected {1/2 - l/2} and {0 - l/2}");
    return std::string();
  }));
  const int max_k = o.quick ? 3 : 4;
  out.push_back(detail::run_check(suite, "enumeration strategies agree", [max_k] {
    for (int k = 1; k <= max_k; ++k)
      for (const auto& p : all_pair_partitions(k)) {
        const auto a = candidate_poles(p, EnumerationStrategy::exhaustive);
        const auto b = candidate_poles(p, EnumerationStrategy::interval_families);
        if (!(a == b)) return "strategies differ at " + to_string(p);
        if (auto m = a.max(); m && *m > make_rational(1, 2)) return "candidate above 1/2 at " + to_string(p);
      }
    return std::string();
  }));
  out.push_back(detail::run_check(suite, "hyperplane specialization", [] {
    for (int k = 1; k <= 3; ++k)
      for (const auto& p : all_pair_partitions(k)) {
        const auto family = hyperplane_candidates(p.size(), interval_support(p));
        if (!(specialize_diagonal(family) == candidate_poles(p))) return "mismatch at " + to_string(p);
      }
    return std::string();
  }));
  out.push_back(detail::run_check(suite, "gamma-ratio poles contained", [] {
    for (int k = 1; k <= 3; ++k) {
      const auto p = PairPartition::all_adjacent(k);
      const auto poles = candidate_poles(p);
      for (int m = 0; m <= 40; ++m) {
        // Gamma(2H-1)^k has order-k poles at H = (1-m)/2; for m >= 2 the
        // denominator Gamma(2kH+1) removes one order.
        if (k - (m >= 2 ? 1 : 0) == 0) continue;
        const Rational h = make_rational(1 - m, 2);
        if (!poles.contains(h)) return "missing " + to_string(h) + " at k=" + std::to_string(k);
      }
    }
    return std::string();
  }));
  return out;
}

inline std::vector<Check> verify_blowup(const VerifyOptions& o) {
  const std::string suite = "blowup";
  std::vector<Check> out;
  out.push_back(detail::run_check(suite, "witness points, n <= 3", [&o] {
    std::size_t lists = 0;
    for (int n = 1; n <= 3; ++n) {
      const auto chart = detail::verify_chart(n, o);
      for (const auto& list : all_monotone_lists(n)) {
        const auto y = witness_point(chart, list);
        auto zero = vanishing_set<Rational>(chart, y);
        auto listed = list.sets();
        std::sort(zero.begin(), zero.end());
        std::sort(listed.begin(), listed.end());
        if (zero != listed) return "vanishing set differs from the list at n=" + std::to_string(n);
        if (!(r_exact<Rational>(chart, y) > 0)) return std::string("R <= 0 at a witness point");
        const auto f = f_values<Rational>(chart, y);
        for (std::uint64_t bits = 1; bits <= chart.full_mask(); ++bits)
          if (!(ps_from_f(chart, Subset{bits}, f) > 0)) return std::string("P_S <= 0 at a witness point");
        ++lists;
      }
    }
    return "ok (" + std::to_string(lists) + " lists)";
  }));
  out.push_back(detail::run_check(suite, "Jacobian factorization", [&o] {
    std::mt19937_64 rng(o.seed);
    for (int n = 1; n <= 3; ++n) {
      const auto chart = detail::verify_chart(n, o);
      for (int t = 0; t < 50; ++t) {
        std::vector<double> y(static_cast<std::size_t>(n));
        for (auto& v : y) v = static_cast<double>(chart.q()(n)) / n + 1 + 5 * open_uniform(rng);
        const auto f = f_values<double>(chart, y);
        double prod = 1;
        for (std::uint64_t bits = 1; bits <= chart.full_mask(); ++bits) prod *= std::pow(f[bits], std::popcount(bits) - 1);
        const double lhs = lu_determinant(jacobian_product_rule(chart, y));
        const double via_exact = prod * r_exact<double>(chart, y);
        const double via_interior = prod * r_interior<double>(chart, y);
        if (auto e = detail::close(via_exact, lhs, 1e-9, "det J vs exact R"); !e.empty()) return e;
        if (auto e = detail::close(via_interior, lhs, 1e-9, "det J vs interior R"); !e.empty()) return e;
      }
    }
    return std::string();
  }));
  out.push_back(detail::run_check(suite, "finite-difference Jacobian", [&o] {
    const auto chart = detail::verify_chart(2, o);
    const std::vector<double> y{5, 5};
    const double h = 1e-5;
    Eigen::MatrixXd fd(2, 2);
    for (int j = 0; j < 2; ++j) {
      auto plus = y, minus = y;
      plus[static_cast<std::size_t>(j)] += h;
      minus[static_cast<std::size_t>(j)] -= h;
      const auto fp = F_eval<double>(chart, plus), fm = F_eval<double>(chart, minus);
      for (int i = 0; i < 2; ++i) fd(i, j) = (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2 * h);
    }
    return detail::close(fd.determinant(), det_jacobian(chart, y), 1e-8, "finite-difference determinant");
  }));
  const int max_n = o.quick ? 3 : 4;
  out.push_back(detail::run_check(suite, "inverse round trip, n <= " + std::to_string(max_n), [&o, max_n] {
    std::mt19937_64 rng(o.seed + 1);
    double worst = 0;
    for (int n = 1; n <= max_n; ++n) {
      const auto chart = detail::verify_chart(n, o);
      for (int t = 0; t < (o.quick ? 20 : 100); ++t) {
        std::vector<double> x(static_cast<std::size_t>(n));
        for (auto& v : x) v = open_uniform(rng);
        const auto r = f_inverse<Quad>(chart, x, 1e-8);
        if (!omega_contains<Quad>(chart, r.y)) return std::string("inverse left Omega");
        worst = std::max(worst, r.residual);
      }
    }
    return "ok (worst residual " + format_double(worst) + ")";
  }));
  out.push_back(detail::run_check(suite, "pairwise sign rule", [&o] {
    std::mt19937_64 rng(o.seed + 2);
    const int n = 4;
    const auto chart = detail::verify_chart(n, o);
    const auto& q = chart.q();
    for (std::uint64_t a = 1; a <= chart.full_mask(); ++a)
      for (std::uint64_t b = 1; b <= chart.full_mask(); ++b) {
        const Subset s0{a}, s1{b};
        const Subset u = s0 | s1;
        const std::int64_t rhs = -q(u.size()) + q(s0.size()) + q(s1.size());
        if (s0.monotone_with(s1) != (rhs > 0)) return "sign rule fails for " + to_string(s0) + ", " + to_string(s1);
        // A point on both hyperplanes: free coordinates random, then solve.
        std::vector<Rational> y(static_cast<std::size_t>(n));
        for (auto& v : y) v = make_rational(static_cast<std::int64_t>(rng() % 50), 7);
        const auto only0 = Subset{s0.bits & ~s1.bits}, only1 = Subset{s1.bits & ~s0.bits};
        if (only0.empty() || only1.empty()) continue;
        const int i0 = only0.members().front(), i1 = only1.members().front();
        y[static_cast<std::size_t>(i0 - 1)] = 0;
        y[static_cast<std::size_t>(i1 - 1)] = 0;
        y[static_cast<std::size_t>(i0 - 1)] = -f_eval<Rational>(chart, s0, y);
        y[static_cast<std::size_t>(i1 - 1)] = -f_eval<Rational>(chart, s1, y);
        Rational on_intersection = 0;
        for (int i : (s0 & s1).members()) on_intersection += y[static_cast<std::size_t>(i - 1)];
        if (f_eval<Rational>(chart, u, y) + on_intersection != rhs) return std::string("identity fails");
        if (f_eval<Rational>(chart, u, y) >= 0) return "union form nonnegative for " + to_string(s0) + ", " + to_string(s1);
      }
    return std::string();
  }));
  return out;
}

inline std::vector<Check> verify_quadrature(const VerifyOptions& o) {
  const std::string suite = "quadrature";
  std::vector<Check> out;
  out.push_back(detail::run_check(suite, "k=1 adaptive", [] {
    for (double H : {0.6, 0.75, 0.9}) {
      const double want = 1 / (2 * H * (2 * H - 1));
      if (auto e = detail::close(l_adaptive(parse_pairs("1-2"), H, 1e-10).value, want, 1e-8, "L"); !e.empty()) return e;
    }
    return std::string();
  }));
  out.push_back(detail::run_check(suite, "all-adjacent k=2 adaptive vs Dirichlet", [] {
    const auto p = PairPartition::all_adjacent(2);
    for (double H : {0.75, 0.8, 0.9})
      if (auto e = detail::close(l_adaptive(p, H, 1e-8).value, l_closed_form(p, H).value, 1e-6, "L"); !e.empty()) return e;
    return std::string();
  }));
  out.push_back(detail::run_check(suite, "direct Monte Carlo within 3 sigma", [&o] {
    const auto r = l_direct_mc(parse_pairs("1-2"), 0.9, o.quick ? 100'000 : 1'000'000, o.seed);
    const double want = 1 / (2 * 0.9 * 0.8);
    if (std::abs(r.value - want) > 3 * *r.std_error) return "off by " + format_double((r.value - want) / *r.std_error) + " sigma";
    return std::string();
  }));
  out.push_back(detail::run_check(suite, "pullback volume", [&o] {
    const BlowupChart chart(2);
    const auto r = pullback_mc(chart, ExponentAssignment(2), o.quick ? 50'000 : 400'000, o.seed);
    if (std::abs(r.value - 0.5) > 3 * *r.std_error) return "estimate " + format_double(r.value) + " vs 1/2";
    return std::string();
  }));
  out.push_back(detail::run_check(suite, "Wick oracle second moment", [] {
    const auto r = wick_grid_oracle(Word({1, 1}), 0.75, 64);
    return detail::close(r.value, 0.5, 1e-3, "E[B_1^2]/2");
  }));
  return out;
}

inline std::vector<Check> verify_signature(const VerifyOptions& o) {
  const std::string suite = "signature";
  std::vector<Check> out;
  out.push_back(detail::run_check(suite, "k=1 mean signature", [] {
    for (double H : {0.6, 0.9, 1.0})
      if (auto e = detail::close(mean_iterated_integral(Word({1, 1}), H, NormalizationMode::matching).value, 0.5, 1e-8,
                                 "E(1,1)");
          !e.empty())
        return e;
    return std::string();
  }));
  out.push_back(detail::run_check(suite, "normalization at H=1", [] {
    const auto m = mean_iterated_integral(Word({1, 1, 1, 1}), 1.0, NormalizationMode::matching);
    if (auto e = detail::close(m.sum_l, 3.0 / 24, 1e-8, "sum L"); !e.empty()) return e;
    if (auto e = detail::close(m.value, 1.0 / 8, 1e-8, "eq405-consistent"); !e.empty()) return e;
    const auto p = mean_iterated_integral(Word({1, 1, 1, 1}), 1.0, NormalizationMode::extra_factorial);
    if (auto e = detail::close(p.value, 1.0 / 16, 1e-8, "paper-406"); !e.empty()) return e;
    if (!p.discrepancy) return std::string("discrepancy not flagged");
    return std::string();
  }));
  out.push_back(detail::run_check(suite, "Wick oracle agreement", [&o] {
    const int m = o.quick ? 24 : 64;
    for (double H : {0.75, 1.0}) {
      const auto w = wick_grid_oracle(Word({1, 1, 1, 1}), H, m);
      const auto v = mean_iterated_integral(Word({1, 1, 1, 1}), H, NormalizationMode::matching);
      if (std::abs(w.value - v.value) > 3 * v.uncertainty + 2 * *w.tol + 1e-3)
        return "H=" + format_double(H) + ": oracle " + format_double(w.value) + " vs " + format_double(v.value);
    }
    return std::string();
  }));
  out.push_back(detail::run_check(suite, "empty refinement and table", [] {
    if (mean_iterated_integral(Word({1, 2, 2, 3}), 0.8, NormalizationMode::matching).value != 0)
      return std::string("(1,2,2,3) is not 0");
    const auto t = gamma_table(1, 2, 0.75, NormalizationMode::matching);
    int halves = 0, zeros = 0;
    for (const auto& e : t.entries) {
      if (std::abs(e.value - 0.5) < 1e-8) ++halves;
      if (e.value == 0) ++zeros;
    }
    if (halves != 2 || zeros != 2) return std::string("k=1, d=2 table wrong");
    return std::string();
  }));
  return out;
}

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names{"combinatorics", "poles", "blowup", "quadrature", "signature", "all"};
  return names;
}

inline std::vector<Check> verify(const std::string& suite, const VerifyOptions& o) {
  std::vector<Check> out;
  auto append = [&](std::vector<Check> v) { out.insert(out.end(), v.begin(), v.end()); };
  const bool all = suite == "all";
  if (all || suite == "combinatorics") append(verify_combinatorics(o));
  if (all || suite == "poles") append(verify_poles(o));
  if (all || suite == "blowup") append(verify_blowup(o));
  if (all || suite == "quadrature") append(verify_quadrature(o));
  if (all || suite == "signature") append(verify_signature(o));
  if (!all && out.empty()) throw ParseError("unknown suite '" + suite + "'");
  return out;
}

}  // namespace sigpole
