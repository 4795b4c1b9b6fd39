#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "blockgroup/euclid.hpp"
#include "blockgroup/subset.hpp"

namespace blockgroup {

/// Names a sum of generators: bit (i-1) set means g_i participates.
/// Value 0 is the identity (the empty set).  Limited to t <= 63.
struct ComboIndex {
  std::uint64_t bits = 0;

  std::vector<int> generator_indices() const {
    std::vector<int> out;
    std::uint64_t b = bits;
    while (b != 0) {
      out.push_back(std::countr_zero(b) + 1);
      b &= b - 1;
    }
    return out;
  }

  bool operator==(const ComboIndex&) const = default;
};

/// One arithmetic-progression piece of a generator: the positions
/// lo + offset, lo + offset + modulus, ... up to hi, all inside (lo, hi].
struct GeneratorSegment {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t offset = 0;   ///< least positive offset within the interval
  std::int64_t modulus = 0;  ///< step between consecutive positions
};

/// Resolved layout of one generator g_i: the level a (largest m with
/// t_m < i), the segments covering (n_0, n_1], ..., (n_a, n_{a+1}], and the
/// single tail point in (n_{a+1}, n] when present.
struct GeneratorPlan {
  int index = 0;  ///< i, 1-based
  int level_a = 0;
  std::vector<GeneratorSegment> segments;
  std::optional<std::int64_t> tail_point;
};

/// Computes the segment layout of g_i from the division chain.
///
/// Level a is the largest index with t_a < i.  Segment j (0 <= j <= a)
/// consists of the x in (n_j, n_{j+1}] with x - n_j congruent to i - t_j
/// modulo r_{2j}.  When k != 2a+1 the layout ends with the single point
/// n_{a+1} + [i - t_a]_{r_{2a+1}} where [y]_z is the least strictly
/// positive residue; when k == 2a+1 there is no tail point.
inline GeneratorPlan plan_generator(const EuclidDecomposition& dec, int i) {
  if (i < 1 || i > dec.t) {
    throw std::out_of_range("plan_generator: generator index outside [1, t]");
  }
  GeneratorPlan plan;
  plan.index = i;

  int a = 0;
  while (a + 1 < static_cast<int>(dec.partial_t.size()) &&
         dec.partial_t[static_cast<std::size_t>(a + 1)] < i) {
    ++a;
  }
  plan.level_a = a;

  for (int j = 0; j <= a; ++j) {
    GeneratorSegment seg;
    seg.lo = dec.partial_n_at(j);
    seg.hi = dec.partial_n_at(j + 1);
    seg.modulus = dec.remainder(2 * j);
    if (seg.modulus <= 0) {
      throw std::logic_error("plan_generator: zero modulus inside the segment range");
    }
    seg.offset = least_positive_residue(i - dec.partial_t_at(j), seg.modulus);
    plan.segments.push_back(seg);
  }

  if (dec.k != 2 * a + 1) {
    const std::int64_t step = dec.remainder(2 * a + 1);
    if (step <= 0) {
      throw std::logic_error("plan_generator: zero modulus for the tail point");
    }
    const std::int64_t point =
        dec.partial_n_at(a + 1) + least_positive_residue(i - dec.partial_t_at(a), step);
    if (point < 1 || point > dec.n) {
      throw std::logic_error("plan_generator: tail point outside [1, n]");
    }
    plan.tail_point = point;
  }
  return plan;
}

/// Realizes a plan as a subset of [n].
inline SubsetMask realize_plan(const EuclidDecomposition& dec, const GeneratorPlan& plan) {
  SubsetMask g(static_cast<int>(dec.n));
  for (const GeneratorSegment& seg : plan.segments) {
    for (std::int64_t x = seg.lo + seg.offset; x <= seg.hi; x += seg.modulus) {
      g.set(static_cast<int>(x));
    }
  }
  if (plan.tail_point) {
    g.set(static_cast<int>(*plan.tail_point));
  }
  return g;
}

/// Builds the generator g_i of the subgroup for (n, t) given by dec.
inline SubsetMask build_generator(const EuclidDecomposition& dec, int i) {
  return realize_plan(dec, plan_generator(dec, i));
}

/// The t generators g_1 .. g_t over [n] together with their division-chain
/// metadata.  Construction always validates the triangular property: within
/// positions 1..t, generator g_j contains exactly position j.  That property
/// makes the 2^t generator sums pairwise distinct and drives coset
/// canonicalization, so a violating input is rejected loudly.
class GeneratorSet {
 public:
  GeneratorSet(EuclidDecomposition dec, std::vector<SubsetMask> gens)
      : dec_(std::move(dec)), gens_(std::move(gens)) {
    if (static_cast<std::int64_t>(gens_.size()) != dec_.t) {
      throw std::invalid_argument("GeneratorSet: expected exactly t generators");
    }
    const int t = block_len();
    for (const SubsetMask& g : gens_) {
      if (g.ground_size() != ground_size()) {
        throw std::invalid_argument("GeneratorSet: generator over wrong ground set");
      }
    }
    for (int u = 1; u <= t; ++u) {
      for (int j = 1; j <= t; ++j) {
        if (gens_[static_cast<std::size_t>(j - 1)].contains(u) != (u == j)) {
          throw std::invalid_argument(
              "GeneratorSet: triangular property violated at position " + std::to_string(u) +
              " of generator " + std::to_string(j));
        }
      }
    }
    plans_.reserve(gens_.size());
    for (int i = 1; i <= t; ++i) {
      plans_.push_back(plan_generator(dec_, i));
    }
  }

  int ground_size() const { return static_cast<int>(dec_.n); }
  int block_len() const { return static_cast<int>(dec_.t); }
  const EuclidDecomposition& euclid() const { return dec_; }

  /// g_i, 1-based.
  const SubsetMask& generator(int i) const {
    if (i < 1 || i > block_len()) {
      throw std::out_of_range("GeneratorSet: generator index outside [1, t]");
    }
    return gens_[static_cast<std::size_t>(i - 1)];
  }

  const std::vector<SubsetMask>& generators() const { return gens_; }

  /// Layout metadata for g_i as derived from the division chain.  Describes
  /// the intended construction; for generator sets built from raw masks the
  /// masks may deviate from it.
  const GeneratorPlan& plan(int i) const {
    if (i < 1 || i > block_len()) {
      throw std::out_of_range("GeneratorSet: plan index outside [1, t]");
    }
    return plans_[static_cast<std::size_t>(i - 1)];
  }

  /// Copy with one position of one generator toggled.  Exists for
  /// fault-injection tests; the triangular check still runs, so flips
  /// inside [1, t] are rejected at construction.
  GeneratorSet with_flipped_bit(int i, int pos) const {
    std::vector<SubsetMask> gens = gens_;
    if (i < 1 || i > block_len()) {
      throw std::out_of_range("with_flipped_bit: generator index outside [1, t]");
    }
    gens[static_cast<std::size_t>(i - 1)].flip(pos);
    return GeneratorSet(dec_, std::move(gens));
  }

 private:
  EuclidDecomposition dec_;
  std::vector<SubsetMask> gens_;
  std::vector<GeneratorPlan> plans_;
};

/// Builds all t generators for (n, t) from the general construction.
inline GeneratorSet build_generator_set(int n, int t) {
  EuclidDecomposition dec = euclid_decompose(n, t);
  std::vector<SubsetMask> gens;
  gens.reserve(static_cast<std::size_t>(t));
  for (int i = 1; i <= t; ++i) {
    gens.push_back(build_generator(dec, i));
  }
  return GeneratorSet(std::move(dec), std::move(gens));
}

/// Assembles the generators from the closed-form displays that apply when
/// the division chain has depth k <= 3, independently of the general
/// segment machinery:
///
///   k = 1 (t divides n):   g_i = {x : x = i mod t}
///   k = 2 (r = n mod t divides t):
///       g_i = {x : x = i mod t}  or  (x > n - r and x = i mod r)
///   k = 3 (r' = t mod r divides r, with q = floor(n / t)):
///       i <= t - r':  {x : x = i mod t} or (x > qt and x - qt = i mod r)
///       i >  t - r':  {x : x = i mod t} or (x > qt and x - qt = i mod r')
///
/// Returns nullopt when k > 3.
inline std::optional<GeneratorSet> closed_form_generators(int n, int t) {
  EuclidDecomposition dec = euclid_decompose(n, t);
  if (dec.k > 3) return std::nullopt;

  std::vector<SubsetMask> gens;
  gens.reserve(static_cast<std::size_t>(t));

  const std::int64_t q = dec.quotient(1);
  for (int i = 1; i <= t; ++i) {
    SubsetMask g(n);
    for (std::int64_t x = i; x <= n; x += t) {
      g.set(static_cast<int>(x));
    }
    if (dec.k == 2) {
      const std::int64_t r = dec.remainder(1);
      for (std::int64_t x = n - r + 1; x <= n; ++x) {
        if (least_positive_residue(x - i, r) == r) g.set(static_cast<int>(x));
      }
    } else if (dec.k == 3) {
      const std::int64_t r = dec.remainder(1);
      const std::int64_t rp = dec.remainder(2);
      const std::int64_t mod = (i <= t - rp) ? r : rp;
      for (std::int64_t x = q * t + 1; x <= n; ++x) {
        if (least_positive_residue((x - q * t) - i, mod) == mod) g.set(static_cast<int>(x));
      }
    }
    gens.push_back(std::move(g));
  }
  return GeneratorSet(std::move(dec), std::move(gens));
}

/// The generator sum named by combo: XOR of g_i over the set bits.
/// combo 0 yields the empty set.
inline SubsetMask span_element(const GeneratorSet& gs, ComboIndex combo) {
  const int t = gs.block_len();
  if (t > 63) {
    throw std::domain_error("span_element: combo enumeration supports t <= 63");
  }
  if (combo.bits >> t != 0) {
    throw std::domain_error("span_element: combo out of range [0, 2^t)");
  }
  SubsetMask acc(gs.ground_size());
  std::uint64_t b = combo.bits;
  while (b != 0) {
    acc ^= gs.generator(std::countr_zero(b) + 1);
    b &= b - 1;
  }
  return acc;
}

struct Canonical {
  SubsetMask rep;
  ComboIndex combo;
};

/// Coset canonicalization: combo collects s's members inside [1, t]; the
/// representative is s XOR the generator sum named by combo.  The triangular
/// property clears positions 1..t from the representative, so two masks get
/// equal representatives exactly when their symmetric difference lies in the
/// generated subgroup.
inline Canonical canonicalize(const GeneratorSet& gs, const SubsetMask& s) {
  if (s.ground_size() != gs.ground_size()) {
    throw std::invalid_argument("canonicalize: ground-set mismatch");
  }
  const int t = gs.block_len();
  if (t > 63) {
    throw std::domain_error("canonicalize: supports t <= 63");
  }
  ComboIndex combo;
  for (int i = 1; i <= t; ++i) {
    if (s.contains(i)) combo.bits |= std::uint64_t{1} << (i - 1);
  }
  Canonical out{s ^ span_element(gs, combo), combo};
  return out;
}

/// Rank over GF(2) of the given masks viewed as rows of a bit matrix.
inline int gf2_rank(const std::vector<SubsetMask>& rows) {
  std::vector<std::vector<std::uint64_t>> basis;  // reduced pivot rows
  std::vector<std::pair<std::size_t, int>> pivots;  // (word, bit) per basis row
  for (const SubsetMask& row : rows) {
    std::vector<std::uint64_t> v = row.words();
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const auto [pw, pb] = pivots[b];
      if (pw < v.size() && ((v[pw] >> pb) & 1U)) {
        for (std::size_t w = 0; w < v.size() && w < basis[b].size(); ++w) v[w] ^= basis[b][w];
      }
    }
    std::size_t pw = v.size();
    int pb = 0;
    for (std::size_t w = 0; w < v.size(); ++w) {
      if (v[w] != 0) {
        pw = w;
        pb = std::countr_zero(v[w]);
        break;
      }
    }
    if (pw == v.size()) continue;  // dependent row
    basis.push_back(std::move(v));
    pivots.emplace_back(pw, pb);
  }
  return static_cast<int>(basis.size());
}

}  // namespace blockgroup
