#pragma once

// Candidate singularity sets for L(P;H) as unions of exact rational
// progressions {offset - step*l : l = 0,1,2,...}.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sigpole/combinatorics.hpp"
#include "sigpole/errors.hpp"
#include "sigpole/rational.hpp"
#include "sigpole/subset.hpp"

namespace sigpole {

/// {offset - step*l : l in N}, step > 0.
class RationalProgression {
 public:
  RationalProgression(Rational offset, Rational step) : offset_(std::move(offset)), step_(std::move(step)) {
    if (step_ <= 0) throw DomainError("progression step must be positive");
  }

  const Rational& offset() const { return offset_; }
  const Rational& step() const { return step_; }

  /// Index l with offset - step*l == x, if any.
  std::optional<BigInt> index_of(const Rational& x) const {
    if (x > offset_) return std::nullopt;
    const Rational l = (offset_ - x) / step_;
    if (!is_integer(l)) return std::nullopt;
    return boost::multiprecision::numerator(l);
  }

  bool contains(const Rational& x) const { return index_of(x).has_value(); }

  /// Set containment; exact because both sides are progressions.
  bool contains(const RationalProgression& other) const {
    return contains(other.offset_) && is_integer(other.step_ / step_);
  }

  friend bool operator==(const RationalProgression&, const RationalProgression&) = default;

 private:
  Rational offset_;
  Rational step_;
};

inline std::string to_string(const RationalProgression& p) {
  return "{" + to_string(p.offset()) + " - " + to_string(p.step()) + "*l}";
}

/// Orders by offset descending, then step ascending.
inline bool progression_before(const RationalProgression& a, const RationalProgression& b) {
  if (a.offset() != b.offset()) return a.offset() > b.offset();
  return a.step() < b.step();
}

/// A finite union of progressions. No stored progression is contained in
/// another; every member is <= 1/2.
class PoleSet {
 public:
  void add(const RationalProgression& p) {
    if (p.offset() > make_rational(1, 2))
      throw DomainError("candidate pole above 1/2: " + to_string(p.offset()));
    for (const auto& q : progressions_)
      if (q.contains(p)) return;
    std::erase_if(progressions_, [&](const RationalProgression& q) { return p.contains(q); });
    progressions_.insert(std::upper_bound(progressions_.begin(), progressions_.end(), p, progression_before), p);
  }

  void merge(const PoleSet& other) {
    for (const auto& p : other.progressions_) add(p);
  }

  const std::vector<RationalProgression>& progressions() const& { return progressions_; }
  std::vector<RationalProgression> progressions() && { return std::move(progressions_); }
  bool empty() const { return progressions_.empty(); }

  bool contains(const Rational& x) const {
    return std::any_of(progressions_.begin(), progressions_.end(), [&](const auto& p) { return p.contains(x); });
  }

  /// Largest candidate; the set is holomorphic-free above it.
  std::optional<Rational> max() const {
    if (progressions_.empty()) return std::nullopt;
    return progressions_.front().offset();
  }

  friend bool operator==(const PoleSet&, const PoleSet&) = default;

 private:
  std::vector<RationalProgression> progressions_;
};

/// One progression 1 - (|S|+l)/(2[S|P]) together with the subset that
/// produced it. The witness is the numerically smallest S (as a bitmask)
/// attaining the pair (|S|, [S|P]).
struct PoleContribution {
  RationalProgression progression;
  PositionSet witness;
  int size = 0;
  int bracket = 0;
};

enum class EnumerationStrategy { automatic, exhaustive, interval_families };

namespace detail {

struct SizeBracket {
  int size;
  int bracket;
  friend auto operator<=>(const SizeBracket&, const SizeBracket&) = default;
};

inline PoleContribution make_contribution(int size, int bracket, Subset witness) {
  const Rational step = make_rational(1, 2 * bracket);
  const Rational offset = 1 - make_rational(size, 2 * bracket);
  return {RationalProgression(offset, step), PositionSet::from_mask(witness), size, bracket};
}

inline std::vector<PoleContribution> finish(const std::vector<std::pair<SizeBracket, Subset>>& found) {
  std::vector<PoleContribution> out;
  for (const auto& [key, mask] : found)
    if (key.bracket > 0) out.push_back(make_contribution(key.size, key.bracket, mask));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return progression_before(a.progression, b.progression);
  });
  return out;
}

/// Every nonempty S, as bitmasks in increasing order.
inline std::vector<PoleContribution> contributions_exhaustive(const PairPartition& partition) {
  const int n = partition.size();
  if (n > 30) throw SizeError("exhaustive subset enumeration limited to 2k <= 30");
  std::vector<std::uint64_t> interval_masks;
  for (const auto& iv : interval_set(partition)) interval_masks.push_back(iv.mask().bits);

  const int k = partition.k();
  std::vector<std::uint64_t> first(static_cast<std::size_t>((n + 1) * (k + 1)), 0);
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t s = 1; s < limit; ++s) {
    int bracket = 0;
    for (auto m : interval_masks) bracket += (m & ~s) == 0;
    auto& slot = first[static_cast<std::size_t>(std::popcount(s) * (k + 1) + bracket)];
    if (slot == 0) slot = s;
  }
  std::vector<std::pair<SizeBracket, Subset>> found;
  for (int size = 0; size <= n; ++size)
    for (int b = 0; b <= k; ++b)
      if (auto s = first[static_cast<std::size_t>(size * (k + 1) + b)]; s != 0)
        found.push_back({{size, b}, Subset{s}});
  return finish(found);
}

/// Scans positions left to right, treating S as a family of pairwise
/// nonadjacent runs. A run [a,b] contributes the number of intervals of
/// I(P) inside it, so [S|P] accumulates run by run. Polynomial in 2k.
inline std::vector<PoleContribution> contributions_interval_families(const PairPartition& partition) {
  const int n = partition.size();
  const int k = partition.k();
  if (n > 64) throw SizeError("interval-family enumeration limited to 2k <= 64");

  // inside[a][b] = number of intervals of I(P) contained in [a,b].
  std::vector<std::vector<int>> inside(static_cast<std::size_t>(n + 2), std::vector<int>(static_cast<std::size_t>(n + 2), 0));
  const auto intervals = interval_set(partition);
  for (int a = 1; a <= n; ++a)
    for (int b = a; b <= n; ++b)
      for (const auto& iv : intervals)
        if (a <= iv.lo && iv.hi <= b) ++inside[a][b];

  constexpr std::uint64_t none = std::numeric_limits<std::uint64_t>::max();
  // State: (open run start or 0, |S| so far, bracket so far) -> minimal mask.
  const auto idx = [&](int start, int size, int bracket) {
    return static_cast<std::size_t>((start * (n + 1) + size) * (k + 1) + bracket);
  };
  const std::size_t states = static_cast<std::size_t>((n + 1) * (n + 1) * (k + 1));
  std::vector<std::uint64_t> cur(states, none), next(states, none);
  cur[idx(0, 0, 0)] = 0;
  auto relax = [](std::uint64_t& slot, std::uint64_t mask) {
    if (mask < slot) slot = mask;
  };

  for (int p = 1; p <= n; ++p) {
    std::fill(next.begin(), next.end(), none);
    const std::uint64_t bit = std::uint64_t{1} << (p - 1);
    for (int start = 0; start <= n; ++start)
      for (int size = 0; size < p; ++size)
        for (int b = 0; b <= k; ++b) {
          const std::uint64_t mask = cur[idx(start, size, b)];
          if (mask == none) continue;
          if (start == 0) {
            relax(next[idx(0, size, b)], mask);
            relax(next[idx(p, size + 1, b)], mask | bit);
          } else {
            relax(next[idx(start, size + 1, b)], mask | bit);
            relax(next[idx(0, size, b + inside[start][p - 1])], mask);
          }
        }
    std::swap(cur, next);
  }

  std::vector<std::uint64_t> best(static_cast<std::size_t>((n + 1) * (k + 1)), none);
  for (int start = 0; start <= n; ++start)
    for (int size = 0; size <= n; ++size)
      for (int b = 0; b <= k; ++b) {
        const std::uint64_t mask = cur[idx(start, size, b)];
        if (mask == none) continue;
        const int total = start == 0 ? b : b + inside[start][n];
        auto& slot = best[static_cast<std::size_t>(size * (k + 1) + total)];
        slot = std::min(slot, mask);
      }
  std::vector<std::pair<SizeBracket, Subset>> found;
  for (int size = 1; size <= n; ++size)
    for (int b = 0; b <= k; ++b)
      if (auto m = best[static_cast<std::size_t>(size * (k + 1) + b)]; m != none)
        found.push_back({{size, b}, Subset{m}});
  return finish(found);
}

}  // namespace detail

/// Distinct progressions 1 - (|S|+l)/(2[S|P]) over all S with [S|P] > 0.
inline std::vector<PoleContribution> candidate_contributions(
    const PairPartition& partition, EnumerationStrategy strategy = EnumerationStrategy::automatic) {
  if (strategy == EnumerationStrategy::automatic)
    strategy = partition.size() <= 16 ? EnumerationStrategy::exhaustive : EnumerationStrategy::interval_families;
  return strategy == EnumerationStrategy::exhaustive ? detail::contributions_exhaustive(partition)
                                                     : detail::contributions_interval_families(partition);
}

inline PoleSet pole_set_of(const std::vector<PoleContribution>& contributions) {
  PoleSet set;
  for (const auto& c : contributions) set.add(c.progression);
  return set;
}

/// Union of candidate progressions for L(P;H).
inline PoleSet candidate_poles(const PairPartition& partition,
                               EnumerationStrategy strategy = EnumerationStrategy::automatic) {
  return pole_set_of(candidate_contributions(partition, strategy));
}

/// Union over all pair partitions refining the word; empty if none do.
inline PoleSet candidate_poles_for_word(const Word& word) {
  PoleSet set;
  for (const auto& partition : enumerate_refining(word)) set.merge(candidate_poles(partition));
  return set;
}

struct CandidateWitness {
  PositionSet subset;
  BigInt l;
  RationalProgression progression;
};

struct CandidateQuery {
  bool member = false;
  std::optional<CandidateWitness> witness;
};

/// Exact membership of h0 in the candidate set, with the first attaining
/// (S, l) in contribution order.
inline CandidateQuery is_candidate(const PairPartition& partition, const Rational& h0) {
  for (const auto& c : candidate_contributions(partition))
    if (auto l = c.progression.index_of(h0))
      return {true, CandidateWitness{c.witness, *l, c.progression}};
  return {};
}

// ---------------------------------------------------------------------------
// Hyperplane candidates for the general simplex integral.

/// |S| + sum_{T in terms} lambda_T in {0, -1, -2, ...}
struct Hyperplane {
  Subset subset;
  int size = 0;
  std::vector<Subset> terms;
};

struct HyperplaneFamily {
  int n = 0;
  std::vector<Hyperplane> hyperplanes;
};

/// One hyperplane per nonempty S in [1,n] having at least one support set
/// inside it; lambda vanishes off the support. Support is a multiset.
inline HyperplaneFamily hyperplane_candidates(int n, const std::vector<Subset>& support) {
  if (n < 1 || n > 20) throw SizeError("hyperplane_candidates supports 1 <= n <= 20");
  const Subset all = Subset::full(n);
  for (auto t : support)
    if (t.empty() || !t.subset_of(all)) throw DomainError("support sets must be nonempty subsets of [1,n]");

  HyperplaneFamily family{n, {}};
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t bits = 1; bits < limit; ++bits) {
    const Subset s{bits};
    Hyperplane h{s, s.size(), {}};
    for (auto t : support)
      if (t.subset_of(s)) h.terms.push_back(t);
    if (!h.terms.empty()) family.hyperplanes.push_back(std::move(h));
  }
  return family;
}

/// Restricts to lambda_T = slope*H + intercept on every support set and
/// solves each hyperplane for H.
inline std::vector<PoleContribution> specialize(const HyperplaneFamily& family, const Rational& slope,
                                                const Rational& intercept) {
  if (slope <= 0) throw DomainError("specialize: slope must be positive");
  std::vector<std::pair<detail::SizeBracket, Subset>> seen;
  for (const auto& h : family.hyperplanes) {
    const detail::SizeBracket key{h.size, static_cast<int>(h.terms.size())};
    auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& e) { return e.first == key; });
    if (it == seen.end()) seen.push_back({key, h.subset});
  }
  std::vector<PoleContribution> out;
  for (const auto& [key, subset] : seen) {
    const Rational m(key.bracket);
    const Rational step = 1 / (m * slope);
    const Rational offset = -(Rational(key.size) + m * intercept) / (m * slope);
    out.push_back({RationalProgression(offset, step), PositionSet::from_mask(subset), key.size, key.bracket});
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return progression_before(a.progression, b.progression); });
  return out;
}

/// Diagonal lambda = 2H - 2 on the support.
inline PoleSet specialize_diagonal(const HyperplaneFamily& family) {
  return pole_set_of(specialize(family, Rational(2), Rational(-2)));
}

/// I(P) as chart subsets of [1, 2k].
inline std::vector<Subset> interval_support(const PairPartition& partition) {
  std::vector<Subset> out;
  for (const auto& iv : interval_set(partition)) out.push_back(iv.mask());
  return out;
}

}  // namespace sigpole
