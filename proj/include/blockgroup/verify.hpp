#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "blockgroup/group.hpp"
#include "blockgroup/subset.hpp"

namespace blockgroup {

enum class VerifyMode { exhaustive, sampled };

struct VerifyFailure {
  std::uint64_t combo_bits = 0;  ///< the generator sum that misses a window
  int missed_start = 0;          ///< first element of a missed window
};

/// Outcome of checking that every nonzero generator sum meets every window
/// of t consecutive positions mod n.  The check passes iff failures is
/// empty; in exhaustive mode combos_checked equals 2^t - 1.
struct VerificationReport {
  VerifyMode mode = VerifyMode::exhaustive;
  std::uint64_t combos_checked = 0;
  std::vector<VerifyFailure> failures;
  double elapsed_ms = 0.0;
  bool group_order_confirmed = false;  ///< GF(2) rank is t (plus span distinctness for t <= 16)

  bool pass() const { return failures.empty(); }
};

struct VerifyBudget {
  int max_exhaustive_t = 16;         ///< exhaustive up to this t, sampled beyond
  std::uint64_t sample_count = 100000;
  std::uint64_t seed = 1;
  int jobs = 1;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stateless draw of a nonzero t-bit combo: position `index` of the stream
/// keyed by `seed`.  Counter-based, so concurrent workers can consume
/// disjoint index ranges and reproduce the exact same values.
inline std::uint64_t draw_nonzero_combo(std::uint64_t seed, std::uint64_t index, int t) {
  const std::uint64_t mask = (t >= 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << t) - 1);
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::uint64_t h = splitmix64(seed ^ 0x8f1bbcdcbfa53e0bULL);
    h = splitmix64(h ^ index);
    h = splitmix64(h ^ (attempt * 0xd6e8feb86659fd93ULL + 1));
    const std::uint64_t c = h & mask;
    if (c != 0) return c;
  }
}

inline std::uint64_t gray_code(std::uint64_t c) { return c ^ (c >> 1); }

/// Checks the combo counter range [lo, hi) (exhaustive, Gray-code order) or
/// the sample index range (sampled), appending failures in order.
inline void verify_worker(const GeneratorSet& gs, VerifyMode mode, const VerifyBudget& budget,
                          std::uint64_t lo, std::uint64_t hi, std::vector<VerifyFailure>& out) {
  const int t = gs.block_len();
  if (mode == VerifyMode::exhaustive) {
    SubsetMask current(gs.ground_size());
    std::uint64_t g = gray_code(lo - 1);
    while (g != 0) {
      current ^= gs.generator(std::countr_zero(g) + 1);
      g &= g - 1;
    }
    for (std::uint64_t c = lo; c < hi; ++c) {
      current ^= gs.generator(std::countr_zero(c) + 1);
      if (current.empty() || max_cyclic_gap(current) > t) {
        out.push_back({gray_code(c), first_missed_window(current, t).value()});
      }
    }
  } else {
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      const std::uint64_t combo = draw_nonzero_combo(budget.seed, idx, t);
      SubsetMask element(gs.ground_size());
      std::uint64_t b = combo;
      while (b != 0) {
        element ^= gs.generator(std::countr_zero(b) + 1);
        b &= b - 1;
      }
      if (element.empty() || max_cyclic_gap(element) > t) {
        out.push_back({combo, first_missed_window(element, t).value()});
      }
    }
  }
}

/// All 2^t generator sums pairwise distinct, by direct enumeration.
inline bool spans_distinct(const GeneratorSet& gs) {
  const int t = gs.block_len();
  std::unordered_set<SubsetMask, SubsetMaskHash> seen;
  seen.reserve(std::size_t{2} << t);
  SubsetMask current(gs.ground_size());
  if (!seen.insert(current).second) return false;
  const std::uint64_t total = std::uint64_t{1} << t;
  for (std::uint64_t c = 1; c < total; ++c) {
    current ^= gs.generator(std::countr_zero(c) + 1);
    if (!seen.insert(current).second) return false;
  }
  return true;
}

}  // namespace detail

/// Checks that every nonzero generator sum meets every window of t
/// consecutive positions mod n.  Exhaustive over all 2^t - 1 sums when
/// t <= budget.max_exhaustive_t; otherwise tests budget.sample_count sums
/// drawn from a seeded deterministic stream (zero excluded).  The combo
/// space is split into contiguous ranges across budget.jobs workers and the
/// partial reports are merged in worker order, so the report is identical
/// for any worker count.  A failing report is a normal return value.
inline VerificationReport verify_group(const GeneratorSet& gs, const VerifyBudget& budget = {}) {
  const int t = gs.block_len();
  if (t > 63) {
    throw std::domain_error("verify_group: combo enumeration supports t <= 63");
  }
  const auto start = std::chrono::steady_clock::now();

  VerificationReport report;
  report.mode = (t <= budget.max_exhaustive_t) ? VerifyMode::exhaustive : VerifyMode::sampled;

  std::uint64_t lo = 0;
  std::uint64_t total = 0;
  if (report.mode == VerifyMode::exhaustive) {
    lo = 1;
    total = (std::uint64_t{1} << t) - 1;
  } else {
    lo = 0;
    total = budget.sample_count;
  }

  int jobs = budget.jobs < 1 ? 1 : budget.jobs;
  if (static_cast<std::uint64_t>(jobs) > total && total > 0) {
    jobs = static_cast<int>(total);
  }
  if (total == 0) jobs = 1;

  std::vector<std::vector<VerifyFailure>> partial(static_cast<std::size_t>(jobs));
  if (jobs == 1) {
    detail::verify_worker(gs, report.mode, budget, lo, lo + total, partial[0]);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    const std::uint64_t chunk = total / static_cast<std::uint64_t>(jobs);
    const std::uint64_t extra = total % static_cast<std::uint64_t>(jobs);
    std::uint64_t at = lo;
    for (int w = 0; w < jobs; ++w) {
      const std::uint64_t len = chunk + (static_cast<std::uint64_t>(w) < extra ? 1 : 0);
      workers.emplace_back(detail::verify_worker, std::cref(gs), report.mode, std::cref(budget),
                           at, at + len, std::ref(partial[static_cast<std::size_t>(w)]));
      at += len;
    }
    for (auto& th : workers) th.join();
  }
  for (auto& p : partial) {
    report.failures.insert(report.failures.end(), p.begin(), p.end());
  }
  report.combos_checked = total;

  bool order_ok = gf2_rank(gs.generators()) == t;
  if (order_ok && report.mode == VerifyMode::exhaustive && t <= 16) {
    order_ok = detail::spans_distinct(gs);
  }
  report.group_order_confirmed = order_ok;

  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

struct CosetPartitionSummary {
  std::uint64_t coset_count = 0;
  std::uint64_t agreement_violations = 0;  ///< pairs in a common coset whose difference misses a window
};

/// Canonicalizes all 2^n subsets of [n] and partitions them into cosets by
/// representative.  coset_count is the number of distinct representatives;
/// agreement_violations counts unordered pairs of distinct subsets in a
/// common coset whose symmetric difference misses some window of t
/// consecutive positions.
///
/// Per coset, the differences from the first member to all others are
/// tested individually; the remaining pair differences are covered by
/// verifying that the difference set is XOR-closed (its GF(2) span has
/// exactly the set's cardinality), so every pair difference is itself one
/// of the tested values.  Each missing difference value accounts for
/// 2^(t-1) pairs.
inline CosetPartitionSummary verify_coset_partition(const GeneratorSet& gs, int guard_n = 20) {
  const int n = gs.ground_size();
  const int t = gs.block_len();
  if (n > guard_n) {
    throw std::domain_error("verify_coset_partition: ground set too large (guard n <= " +
                            std::to_string(guard_n) + ")");
  }

  // Single-word arithmetic: n <= guard_n <= 63.
  std::vector<std::uint64_t> gen_words(static_cast<std::size_t>(t));
  for (int i = 1; i <= t; ++i) {
    gen_words[static_cast<std::size_t>(i - 1)] = gs.generator(i).words().empty()
                                                     ? 0
                                                     : gs.generator(i).words()[0];
  }

  // span_tab[combo] = XOR of the generators named by combo.
  const std::uint64_t span_size = std::uint64_t{1} << t;
  std::vector<std::uint64_t> span_tab(span_size, 0);
  {
    std::uint64_t current = 0;
    for (std::uint64_t c = 1; c < span_size; ++c) {
      current ^= gen_words[static_cast<std::size_t>(std::countr_zero(c))];
      span_tab[detail::gray_code(c)] = current;
    }
  }

  const std::uint64_t universe = std::uint64_t{1} << n;
  const std::uint64_t tmask = (std::uint64_t{1} << t) - 1;
  const std::uint64_t coset_slots = std::uint64_t{1} << (n - t);

  // Bucket subsets by canonical representative (low t bits of a
  // representative are zero, so rep >> t indexes the cosets).
  std::vector<std::uint32_t> coset_size(coset_slots, 0);
  for (std::uint64_t s = 0; s < universe; ++s) {
    const std::uint64_t rep = s ^ span_tab[s & tmask];
    ++coset_size[rep >> t];
  }
  std::vector<std::uint64_t> offsets(coset_slots + 1, 0);
  for (std::uint64_t i = 0; i < coset_slots; ++i) offsets[i + 1] = offsets[i] + coset_size[i];
  std::vector<std::uint32_t> members(universe);
  {
    std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::uint64_t s = 0; s < universe; ++s) {
      const std::uint64_t rep = s ^ span_tab[s & tmask];
      members[cursor[rep >> t]++] = static_cast<std::uint32_t>(s);
    }
  }

  CosetPartitionSummary summary;
  auto gap_hits = [n, t](std::uint64_t w) {
    int first = -1, prev = -1, best = 0;
    std::uint64_t x = w;
    while (x != 0) {
      const int pos = std::countr_zero(x) + 1;
      if (first < 0) {
        first = pos;
      } else if (pos - prev > best) {
        best = pos - prev;
      }
      prev = pos;
      x &= x - 1;
    }
    if (first + n - prev > best) best = first + n - prev;
    return best <= t;
  };

  std::vector<std::uint64_t> diffs;
  for (std::uint64_t cs = 0; cs < coset_slots; ++cs) {
    const std::uint64_t begin = offsets[cs];
    const std::uint64_t end = offsets[cs + 1];
    if (begin == end) continue;
    ++summary.coset_count;

    const std::uint64_t anchor = members[begin];
    diffs.clear();
    std::uint64_t missing = 0;
    for (std::uint64_t m = begin + 1; m < end; ++m) {
      const std::uint64_t d = members[m] ^ anchor;
      diffs.push_back(d);
      if (d == 0 || !gap_hits(d)) ++missing;
    }

    // XOR-closure of the difference set: rank r over GF(2) must satisfy
    // 2^r == |diffs| + 1, i.e. the set together with zero is a subgroup.
    std::vector<std::uint64_t> basis;
    for (std::uint64_t d : diffs) {
      for (std::uint64_t b : basis) {
        const std::uint64_t reduced = d ^ b;
        if (reduced < d) d = reduced;
      }
      if (d != 0) {
        basis.push_back(d);
        for (std::size_t i = basis.size() - 1; i > 0; --i) {
          if (basis[i] > basis[i - 1]) std::swap(basis[i], basis[i - 1]);
        }
      }
    }
    if ((std::uint64_t{1} << basis.size()) != diffs.size() + 1) {
      throw std::logic_error(
          "verify_coset_partition: coset difference set is not XOR-closed");
    }
    if (missing > 0 && t >= 1) {
      summary.agreement_violations += missing << (t - 1);
    }
  }
  return summary;
}

}  // namespace blockgroup
