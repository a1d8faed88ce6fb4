#pragma once

// Mean iterated integrals of fBm as prefactor * sum_{P <= w} L(P;H), the
// coefficient tables built from them, and per-word pole reports.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sigpole/combinatorics.hpp"
#include "sigpole/errors.hpp"
#include "sigpole/poles.hpp"
#include "sigpole/quadrature.hpp"

namespace sigpole {

// ---------------------------------------------------------------------------
// Normalization

/// Two readings of the prefactor. `matching` is H^k (2H-1)^k, which sums each
/// matching once and agrees with the Gaussian moment check; `extra_factorial`
/// additionally divides by k!.
enum class NormalizationMode { matching, extra_factorial };

inline std::string to_string(NormalizationMode m) {
  return m == NormalizationMode::matching ? "eq405-consistent" : "paper-406";
}

inline NormalizationMode parse_normalization(std::string_view text) {
  if (text == "eq405-consistent") return NormalizationMode::matching;
  if (text == "paper-406") return NormalizationMode::extra_factorial;
  throw ParseError("unknown normalization mode '" + std::string(text) +
                   "' (expected eq405-consistent or paper-406)");
}

inline double prefactor(NormalizationMode mode, double H, int k) {
  double p = std::pow(H * (2 * H - 1), k);
  if (mode == NormalizationMode::extra_factorial) p /= factorial(k);
  return p;
}

// ---------------------------------------------------------------------------
// Evaluator selection

/// How L(P;H) is computed. No method means: adaptive for 2k <= 4,
/// direct Monte Carlo beyond.
struct EvalOptions {
  std::optional<Method> method;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0x46424D30ULL;
  double tol = 1e-8;
  int workers = 1;
};

inline Method resolve_method(const PairPartition& partition, const EvalOptions& options) {
  if (options.method) return *options.method;
  return partition.size() <= 4 ? Method::adaptive : Method::direct_mc;
}

inline EvalResult evaluate_l(const PairPartition& partition, double H, const EvalOptions& options) {
  switch (resolve_method(partition, options)) {
    case Method::adaptive: return l_adaptive(partition, H, options.tol);
    case Method::direct_mc: return l_direct_mc(partition, H, options.samples, options.seed, options.workers);
    case Method::pullback_mc: return l_via_pullback(partition, H, options.samples, options.seed, options.workers);
    case Method::closed_form: return l_closed_form(partition, H);
    case Method::wick_grid: break;
  }
  throw DomainError("wick-grid evaluates words, not single partitions");
}

// ---------------------------------------------------------------------------
// Mean iterated integral

struct PartitionTerm {
  PairPartition partition;
  EvalResult result;
};

struct MeanSignature {
  Word word{std::vector<int>{1, 1}};
  double H = 0;
  NormalizationMode mode = NormalizationMode::matching;
  double value = 0;
  /// Combined standard error (stochastic) or summed tolerance, after the prefactor.
  double uncertainty = 0;
  bool stochastic = false;
  std::optional<Method> method;  // empty when no partition refines the word
  double prefactor = 0;
  double sum_l = 0;
  std::vector<PartitionTerm> terms;
  /// The value under the other mode; they differ by k! for k >= 2.
  double other_mode_value = 0;
  std::optional<std::string> discrepancy;
};

inline std::string discrepancy_note(NormalizationMode mode, int k, double other) {
  if (k < 2) return {};
  if (mode == NormalizationMode::extra_factorial)
    return "prefactor includes 1/k! = 1/" + std::to_string(static_cast<long long>(factorial(k))) +
           "; counting each matching once (eq405-consistent) gives " + std::to_string(other);
  return "the alternative paper-406 normalization divides by a further k! = " +
         std::to_string(static_cast<long long>(factorial(k))) + ", giving " + std::to_string(other);
}

inline MeanSignature mean_iterated_integral(const Word& word, double H, NormalizationMode mode,
                                            const EvalOptions& options = {}) {
  MeanSignature out;
  out.word = word;
  out.H = H;
  out.mode = mode;
  const int k = word.k();
  out.prefactor = prefactor(mode, H, k);
  const auto partitions = enumerate_refining(word);
  if (partitions.empty()) return out;

  double variance = 0;
  double tolerance = 0;
  for (const auto& p : partitions) {
    auto r = evaluate_l(p, H, options);
    out.sum_l += r.value;
    if (r.std_error) {
      variance += *r.std_error * *r.std_error;
      out.stochastic = true;
    } else {
      tolerance += r.tol.value_or(0.0);
    }
    out.method = r.method;
    out.terms.push_back({p, std::move(r)});
  }
  out.value = out.prefactor * out.sum_l;
  out.uncertainty = out.prefactor * (std::sqrt(variance) + tolerance);
  const auto other = mode == NormalizationMode::matching ? NormalizationMode::extra_factorial : NormalizationMode::matching;
  out.other_mode_value = prefactor(other, H, k) * out.sum_l;
  if (auto note = discrepancy_note(mode, k, out.other_mode_value); !note.empty()) out.discrepancy = note;
  return out;
}

// ---------------------------------------------------------------------------
// Coefficient table

struct GammaEntry {
  Word word;
  double value = 0;
  double uncertainty = 0;
  std::optional<Method> method;
  bool stochastic = false;
};

struct GammaTable {
  int k = 0;
  int d = 0;
  double H = 0;
  NormalizationMode mode = NormalizationMode::matching;
  std::vector<GammaEntry> entries;  // lexicographic in the word
  std::size_t classes = 0;          // distinct position partitions evaluated
};

/// Every word of length 2k over [1,d]. Words inducing the same position
/// partition share one evaluation.
inline GammaTable gamma_table(int k, int d, double H, NormalizationMode mode, const EvalOptions& options = {}) {
  if (k < 1 || d < 1) throw DomainError("gamma_table needs k >= 1 and d >= 1");
  const double count = std::pow(static_cast<double>(d), 2 * k);
  if (count > 1e6) throw SizeError("gamma_table: d^(2k) = " + std::to_string(count) + " words is too many");

  GammaTable table{k, d, H, mode, {}, 0};
  std::map<std::vector<int>, GammaEntry> by_class;
  std::vector<int> letters(static_cast<std::size_t>(2 * k), 1);
  while (true) {
    const Word w(letters);
    const auto key = w.level_set_key();
    auto it = by_class.find(key);
    if (it == by_class.end()) {
      const auto m = mean_iterated_integral(w, H, mode, options);
      it = by_class.emplace(key, GammaEntry{w, m.value, m.uncertainty, m.method, m.stochastic}).first;
    }
    GammaEntry entry = it->second;
    entry.word = w;
    table.entries.push_back(std::move(entry));

    int pos = 2 * k - 1;
    while (pos >= 0 && letters[static_cast<std::size_t>(pos)] == d) letters[static_cast<std::size_t>(pos--)] = 1;
    if (pos < 0) break;
    ++letters[static_cast<std::size_t>(pos)];
  }
  table.classes = by_class.size();
  return table;
}

// ---------------------------------------------------------------------------
// Pole report

struct PartitionPoles {
  PairPartition partition;
  std::vector<PoleContribution> contributions;
  PoleSet poles;
};

struct PoleReport {
  Word word;
  PoleSet poles;  // union over refining partitions
  std::vector<PartitionPoles> partitions;
};

inline PoleReport candidate_pole_report(const Word& word) {
  PoleReport report{word, {}, {}};
  for (const auto& p : enumerate_refining(word)) {
    auto contributions = candidate_contributions(p);
    auto poles = pole_set_of(contributions);
    report.poles.merge(poles);
    report.partitions.push_back({p, std::move(contributions), std::move(poles)});
  }
  return report;
}

}  // namespace sigpole
