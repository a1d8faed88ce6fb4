#pragma once

// Words, pair partitions of [1,2k], the interval map and the bracket count.
// Positions are 1-based throughout.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sigpole/errors.hpp"
#include "sigpole/subset.hpp"

namespace sigpole {

// ---------------------------------------------------------------------------
// Word

/// A word (i_1, ..., i_{2k}) of positive letters. Its level sets partition
/// the positions [1, 2k].
class Word {
 public:
  explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {
    if (letters_.size() < 2 || letters_.size() % 2 != 0)
      throw DimensionError("word length must be even and at least 2, got " +
                           std::to_string(letters_.size()));
    for (int c : letters_)
      if (c < 1) throw DomainError("word letters must be positive integers");
  }

  int size() const { return static_cast<int>(letters_.size()); }
  int k() const { return size() / 2; }
  int letter(int position) const { return letters_.at(static_cast<std::size_t>(position - 1)); }
  const std::vector<int>& letters() const& { return letters_; }
  std::vector<int> letters() && { return std::move(letters_); }

  /// Positions grouped by letter, blocks ordered by first occurrence.
  std::vector<std::vector<int>> level_sets() const {
    std::vector<std::vector<int>> blocks;
    std::map<int, std::size_t> index;
    for (int p = 1; p <= size(); ++p) {
      auto [it, fresh] = index.try_emplace(letter(p), blocks.size());
      if (fresh) blocks.emplace_back();
      blocks[it->second].push_back(p);
    }
    return blocks;
  }

  /// Letters relabelled 1, 2, ... in order of first appearance. Two words
  /// have the same key iff they induce the same position partition.
  std::vector<int> level_set_key() const {
    std::vector<int> key(letters_.size());
    std::map<int, int> relabel;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      auto [it, fresh] = relabel.try_emplace(letters_[i], static_cast<int>(relabel.size()) + 1);
      key[i] = it->second;
    }
    return key;
  }

  /// True iff every letter occurs an even number of times.
  bool even_multiplicities() const {
    for (const auto& block : level_sets())
      if (block.size() % 2 != 0) return false;
    return true;
  }

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<int> letters_;
};

// ---------------------------------------------------------------------------
// Interval and PositionSet

/// Integer interval [lo, hi]; [n] is the singleton [n, n].
struct Interval {
  int lo = 1;
  int hi = 1;

  constexpr int size() const { return hi - lo + 1; }
  constexpr bool contains(int p) const { return lo <= p && p <= hi; }
  constexpr bool contains(const Interval& other) const {
    return lo <= other.lo && other.hi <= hi;
  }
  constexpr Subset mask() const { return Subset::range(lo, hi); }

  friend constexpr bool operator==(const Interval&, const Interval&) = default;
  friend constexpr auto operator<=>(const Interval&, const Interval&) = default;
};

/// A subset S of positions together with its decomposition into maximal,
/// pairwise nonadjacent intervals (computed on construction).
class PositionSet {
 public:
  PositionSet() = default;

  explicit PositionSet(std::vector<int> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    if (!members_.empty() && members_.front() < 1)
      throw DimensionError("positions are 1-based; got " + std::to_string(members_.front()));
    decompose();
  }

  static PositionSet from_intervals(const std::vector<Interval>& intervals) {
    std::vector<int> members;
    for (const auto& iv : intervals) {
      if (iv.lo > iv.hi) throw ParseError("interval with lo > hi");
      for (int p = iv.lo; p <= iv.hi; ++p) members.push_back(p);
    }
    return PositionSet(std::move(members));
  }

  static PositionSet from_mask(Subset s) { return PositionSet(s.members()); }

  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  bool contains(int p) const { return std::binary_search(members_.begin(), members_.end(), p); }
  bool contains(const Interval& iv) const {
    // Intervals are contiguous, so containment reduces to one maximal interval.
    for (const auto& m : intervals_)
      if (m.contains(iv)) return true;
    return false;
  }
  // rvalue overloads return copies so range-for over a temporary is safe
  const std::vector<int>& members() const& { return members_; }
  std::vector<int> members() && { return std::move(members_); }
  const std::vector<Interval>& maximal_intervals() const& { return intervals_; }
  std::vector<Interval> maximal_intervals() && { return std::move(intervals_); }
  int max_position() const { return members_.empty() ? 0 : members_.back(); }

  Subset mask() const { return Subset::of(members_); }

  friend bool operator==(const PositionSet& a, const PositionSet& b) {
    return a.members_ == b.members_;
  }

 private:
  void decompose() {
    intervals_.clear();
    for (int p : members_) {
      if (!intervals_.empty() && intervals_.back().hi + 1 == p)
        intervals_.back().hi = p;
      else
        intervals_.push_back({p, p});
    }
  }

  std::vector<int> members_;
  std::vector<Interval> intervals_;
};

// ---------------------------------------------------------------------------
// PairPartition

/// A perfect matching of [1, 2k], stored in canonical form: each pair as
/// (smaller, larger), pairs sorted by first element.
class PairPartition {
 public:
  using Pair = std::pair<int, int>;

  explicit PairPartition(std::vector<Pair> pairs) {
    if (pairs.empty()) throw InvalidPairError("pair partition must have at least one pair");
    const int n = 2 * static_cast<int>(pairs.size());
    partner_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (auto& [a, b] : pairs) {
      if (a == b) throw InvalidPairError("pair with equal elements {" + std::to_string(a) + "," + std::to_string(b) + "}");
      if (a > b) std::swap(a, b);
      if (a < 1 || b > n)
        throw InvalidPairError("pair {" + std::to_string(a) + "," + std::to_string(b) +
                               "} outside [1," + std::to_string(n) + "]");
      if (partner_[a] != 0 || partner_[b] != 0)
        throw InvalidPairError("position used twice in pair partition");
      partner_[a] = b;
      partner_[b] = a;
    }
    std::sort(pairs.begin(), pairs.end());
    pairs_ = std::move(pairs);
  }

  int k() const { return static_cast<int>(pairs_.size()); }
  int size() const { return 2 * k(); }
  const std::vector<Pair>& pairs() const& { return pairs_; }
  std::vector<Pair> pairs() && { return std::move(pairs_); }
  int partner(int p) const { return partner_.at(static_cast<std::size_t>(p)); }

  /// Image under p -> 2k + 1 - p.
  PairPartition reflected() const {
    std::vector<Pair> out;
    for (auto [a, b] : pairs_) out.emplace_back(size() + 1 - b, size() + 1 - a);
    return PairPartition(std::move(out));
  }

  /// {{1,2},{3,4},...,{2k-1,2k}}
  static PairPartition all_adjacent(int k) {
    std::vector<Pair> out;
    for (int l = 1; l <= k; ++l) out.emplace_back(2 * l - 1, 2 * l);
    return PairPartition(std::move(out));
  }

  bool is_all_adjacent() const {
    return std::all_of(pairs_.begin(), pairs_.end(), [](Pair p) { return p.second == p.first + 1; });
  }

  friend bool operator==(const PairPartition& a, const PairPartition& b) { return a.pairs_ == b.pairs_; }
  friend auto operator<=>(const PairPartition& a, const PairPartition& b) { return a.pairs_ <=> b.pairs_; }

 private:
  std::vector<Pair> pairs_;
  std::vector<int> partner_;
};

// ---------------------------------------------------------------------------
// Interval map

/// I({a,b}) = [min+1, max].
inline Interval interval_of_pair(int a, int b) {
  if (a == b) throw InvalidPairError("interval_of_pair: equal elements");
  if (a < 1 || b < 1) throw InvalidPairError("interval_of_pair: positions are 1-based");
  return {std::min(a, b) + 1, std::max(a, b)};
}

/// Range-checked against [1, two_k].
inline Interval interval_of_pair(std::pair<int, int> pair, int two_k) {
  if (pair.first > two_k || pair.second > two_k)
    throw InvalidPairError("interval_of_pair: position beyond " + std::to_string(two_k));
  return interval_of_pair(pair.first, pair.second);
}

/// The multiset I(P), one interval per pair, in canonical pair order.
inline std::vector<Interval> interval_set(const PairPartition& partition) {
  std::vector<Interval> out;
  out.reserve(partition.pairs().size());
  for (auto pair : partition.pairs()) out.push_back(interval_of_pair(pair, partition.size()));
  return out;
}

/// P <= w: every pair of P joins positions with the same letter.
inline bool refines(const PairPartition& partition, const Word& word) {
  if (partition.size() != word.size())
    throw DimensionError("refines: partition of [1," + std::to_string(partition.size()) +
                         "] vs word of length " + std::to_string(word.size()));
  return std::all_of(partition.pairs().begin(), partition.pairs().end(),
                     [&](auto p) { return word.letter(p.first) == word.letter(p.second); });
}

namespace detail {

inline void enumerate_matchings(const Word& word, std::vector<int>& partner,
                                std::vector<PairPartition::Pair>& current,
                                std::vector<PairPartition>& out) {
  const int n = word.size();
  int first = 1;
  while (first <= n && partner[first] != 0) ++first;
  if (first > n) {
    out.emplace_back(current);
    return;
  }
  for (int second = first + 1; second <= n; ++second) {
    if (partner[second] != 0 || word.letter(second) != word.letter(first)) continue;
    partner[first] = second;
    partner[second] = first;
    current.emplace_back(first, second);
    enumerate_matchings(word, partner, current, out);
    current.pop_back();
    partner[first] = partner[second] = 0;
  }
}

}  // namespace detail

/// All pair partitions refining the word, lexicographic in canonical form.
/// Empty when some letter has odd multiplicity.
inline std::vector<PairPartition> enumerate_refining(const Word& word) {
  std::vector<PairPartition> out;
  if (!word.even_multiplicities()) return out;
  std::vector<int> partner(static_cast<std::size_t>(word.size()) + 1, 0);
  std::vector<PairPartition::Pair> current;
  detail::enumerate_matchings(word, partner, current, out);
  return out;
}

/// Every pair partition of [1, 2k]; (2k-1)!! of them.
inline std::vector<PairPartition> all_pair_partitions(int k) {
  return enumerate_refining(Word(std::vector<int>(static_cast<std::size_t>(2 * k), 1)));
}

/// (2m-1)!! for a block of size 2m; 1 for m = 0.
inline std::uint64_t odd_double_factorial(int block_size) {
  std::uint64_t r = 1;
  for (int j = block_size - 1; j > 1; j -= 2) r *= static_cast<std::uint64_t>(j);
  return r;
}

// ---------------------------------------------------------------------------
// Bracket count

namespace detail {

inline void require_within(const PositionSet& s, const PairPartition& partition) {
  if (s.max_position() > partition.size())
    throw DimensionError("position set exceeds [1," + std::to_string(partition.size()) + "]");
}

inline void require_within(const Interval& iv, const PairPartition& partition) {
  if (iv.lo < 1 || iv.lo > iv.hi || iv.hi > partition.size())
    throw DimensionError("interval not inside [1," + std::to_string(partition.size()) + "]");
}

}  // namespace detail

/// [S|P]: number of intervals of I(P) contained in S, with multiplicity.
inline int bracket_count(const PositionSet& s, const PairPartition& partition) {
  detail::require_within(s, partition);
  int count = 0;
  for (const auto& iv : interval_set(partition))
    if (s.contains(iv)) ++count;
  return count;
}

/// Aug_P(I): I plus the element just left of it when that element is paired
/// into I.
inline PositionSet augmentation(const Interval& iv, const PairPartition& partition) {
  detail::require_within(iv, partition);
  std::vector<int> members;
  if (iv.lo >= 2 && iv.contains(partition.partner(iv.lo - 1))) members.push_back(iv.lo - 1);
  for (int p = iv.lo; p <= iv.hi; ++p) members.push_back(p);
  return PositionSet(std::move(members));
}

/// Def_P(I): elements of I whose partner lies outside Aug_P(I).
inline PositionSet deficiency(const Interval& iv, const PairPartition& partition) {
  const PositionSet aug = augmentation(iv, partition);
  std::vector<int> members;
  for (int p = iv.lo; p <= iv.hi; ++p)
    if (!aug.contains(partition.partner(p))) members.push_back(p);
  return PositionSet(std::move(members));
}

/// Decomposition of 2[S|P] = |S| + (augmented components) - (deficient points).
struct BracketBreakdown {
  int size = 0;
  int augmented_components = 0;
  int deficient_points = 0;
  int twice_bracket = 0;
};

inline BracketBreakdown bracket_breakdown(const PositionSet& s, const PairPartition& partition) {
  detail::require_within(s, partition);
  BracketBreakdown b;
  b.size = s.size();
  for (const auto& iv : s.maximal_intervals()) {
    const int aug = augmentation(iv, partition).size();
    if (aug > iv.size()) ++b.augmented_components;
    b.deficient_points += deficiency(iv, partition).size();
  }
  b.twice_bracket = b.size + b.augmented_components - b.deficient_points;
  return b;
}

/// [S|P] via the per-component identity 2[I|P] = |Aug_P(I)| - |Def_P(I)|.
inline int bracket_count_via_aug_def(const PositionSet& s, const PairPartition& partition) {
  detail::require_within(s, partition);
  int twice = 0;
  for (const auto& iv : s.maximal_intervals())
    twice += augmentation(iv, partition).size() - deficiency(iv, partition).size();
  if (twice % 2 != 0 || twice < 0)
    throw ConsistencyError("sum of |Aug| - |Def| is " + std::to_string(twice));
  return twice / 2;
}

// ---------------------------------------------------------------------------
// Text formats: word "6,3,1,3", pairs "1-7,2-8", sets "2-8,10-11,12".

namespace detail {

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline int parse_positive(std::string_view s) {
  s = trim(s);
  if (s.empty()) throw ParseError("empty number");
  long value = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw ParseError("not a positive integer: '" + std::string(s) + "'");
    value = value * 10 + (c - '0');
    if (value > 1'000'000) throw ParseError("number too large: '" + std::string(s) + "'");
  }
  if (value < 1) throw ParseError("positions and letters are positive: '" + std::string(s) + "'");
  return static_cast<int>(value);
}

}  // namespace detail

inline Word parse_word(std::string_view text) {
  std::vector<int> letters;
  for (auto part : detail::split(text, ',')) letters.push_back(detail::parse_positive(part));
  try {
    return Word(std::move(letters));
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid word: ") + e.what());
  }
}

inline PairPartition parse_pairs(std::string_view text) {
  std::vector<PairPartition::Pair> pairs;
  for (auto part : detail::split(text, ',')) {
    auto ends = detail::split(part, '-');
    if (ends.size() != 2) throw ParseError("pair must look like a-b: '" + std::string(part) + "'");
    pairs.emplace_back(detail::parse_positive(ends[0]), detail::parse_positive(ends[1]));
  }
  return PairPartition(std::move(pairs));
}

/// Empty text (or "{}") is the empty set.
inline PositionSet parse_position_set(std::string_view text) {
  text = detail::trim(text);
  if (text.empty() || text == "{}") return PositionSet{};
  std::vector<Interval> intervals;
  for (auto part : detail::split(text, ',')) {
    auto ends = detail::split(part, '-');
    if (ends.size() == 1) {
      const int p = detail::parse_positive(ends[0]);
      intervals.push_back({p, p});
    } else if (ends.size() == 2) {
      const int lo = detail::parse_positive(ends[0]);
      const int hi = detail::parse_positive(ends[1]);
      if (lo > hi) throw ParseError("interval with lo > hi: '" + std::string(part) + "'");
      intervals.push_back({lo, hi});
    } else {
      throw ParseError("bad interval: '" + std::string(part) + "'");
    }
  }
  return PositionSet::from_intervals(intervals);
}

inline std::string to_string(const Word& w) {
  std::string out;
  for (int p = 1; p <= w.size(); ++p) {
    if (p > 1) out += ",";
    out += std::to_string(w.letter(p));
  }
  return out;
}

inline std::string to_string(const PairPartition& partition) {
  std::string out;
  for (auto [a, b] : partition.pairs()) {
    if (!out.empty()) out += ",";
    out += std::to_string(a) + "-" + std::to_string(b);
  }
  return out;
}

inline std::string to_string(const Interval& iv) {
  return iv.lo == iv.hi ? std::to_string(iv.lo) : std::to_string(iv.lo) + "-" + std::to_string(iv.hi);
}

inline std::string to_string(const PositionSet& s) {
  std::string out;
  for (const auto& iv : s.maximal_intervals()) {
    if (!out.empty()) out += ",";
    out += to_string(iv);
  }
  return out;
}

}  // namespace sigpole
