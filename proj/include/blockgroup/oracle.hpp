#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "blockgroup/group.hpp"
#include "blockgroup/subset.hpp"
#include "blockgroup/verify.hpp"

namespace blockgroup {

/// A base set together with all of its distinct cyclic translates mod n.
struct TranslateFamily {
  int n = 0;
  SubsetMask base;
  std::vector<SubsetMask> members;

  static TranslateFamily of_base(const SubsetMask& base) {
    TranslateFamily fam;
    fam.n = base.ground_size();
    fam.base = base;
    fam.members = cyclic_translates(base);
    return fam;
  }

  /// Translates of the block {1, ..., t} inside [n].
  static TranslateFamily of_block(int n, int t) {
    if (t < 1 || t > n) throw std::domain_error("TranslateFamily::of_block: need 1 <= t <= n");
    SubsetMask b(n);
    for (int p = 1; p <= t; ++p) b.set(p);
    return of_base(b);
  }
};

enum class ExtremalQuantity { v, v_bar };

struct OracleBudget {
  int max_n = 8;          ///< guard on the 2^n-vertex compatibility graph
  double timeout_ms = 0;  ///< 0 means no limit
};

/// Result of a maximum-family search.  lower_bound always carries a
/// validated witness family; upper_bound comes from the completed search,
/// a greedy-coloring bound, or a verified subgroup coset bound.  The value
/// is exact precisely when the bounds coincide (timed_out reports whether
/// the branch-and-bound search itself ran to completion).
struct OracleResult {
  ExtremalQuantity quantity = ExtremalQuantity::v;
  std::uint64_t value = 0;
  std::uint64_t lower_bound = 0;
  std::uint64_t upper_bound = 0;
  std::vector<SubsetMask> witness;
  std::uint64_t nodes_explored = 0;
  bool timed_out = false;

  bool exact() const { return lower_bound == upper_bound; }
};

/// All supersets of a nonempty base inside [n]: 2^(n-|base|) sets, any two
/// of which intersect in at least the base itself.
inline std::vector<SubsetMask> kernel_family(int n, const SubsetMask& base) {
  if (base.ground_size() != n) {
    throw std::invalid_argument("kernel_family: base over wrong ground set");
  }
  if (base.empty()) {
    throw std::invalid_argument("kernel_family: base must be nonempty");
  }
  std::vector<int> free;
  for (int p = 1; p <= n; ++p) {
    if (!base.contains(p)) free.push_back(p);
  }
  if (free.size() > 30) {
    throw std::domain_error("kernel_family: too many supersets to enumerate");
  }
  std::vector<SubsetMask> out;
  out.reserve(std::size_t{1} << free.size());
  const std::uint64_t total = std::uint64_t{1} << free.size();
  for (std::uint64_t sel = 0; sel < total; ++sel) {
    SubsetMask s = base;
    for (std::size_t i = 0; i < free.size(); ++i) {
      if ((sel >> i) & 1U) s.set(free[i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace detail {

/// Exact maximum clique by branch and bound with greedy sequential coloring
/// (color classes built lowest-vertex-first; candidates expanded in reverse
/// color order).  Vertices are expected pre-sorted by descending degree.
class MaxCliqueSearch {
 public:
  MaxCliqueSearch(int vertex_count, std::vector<std::vector<std::uint64_t>> adjacency,
                  double timeout_ms)
      : V_(vertex_count),
        W_((vertex_count + 63) / 64),
        adj_(std::move(adjacency)),
        has_deadline_(timeout_ms > 0) {
    if (has_deadline_) {
      deadline_ = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double, std::milli>(timeout_ms));
    }
  }

  void run() {
    if (V_ == 0) {
      root_bound_ = 0;
      return;
    }
    std::vector<std::uint64_t> all(static_cast<std::size_t>(W_), 0);
    for (int v = 0; v < V_; ++v) all[static_cast<std::size_t>(v) / 64] |= bit(v);

    greedy_initial(all);
    // Recursion consumes at least one vertex per level; sizing the per-depth
    // scratch pools up front keeps references across recursive calls valid.
    ensure_depth(V_ + 1);
    root_bound_ = color(all, 0);
    if (root_bound_ > static_cast<int>(best_.size())) {
      expand(all, 0);
    }
  }

  const std::vector<int>& best() const { return best_; }
  std::uint64_t nodes() const { return nodes_; }
  bool timed_out() const { return timed_out_; }
  int root_bound() const { return root_bound_; }

 private:
  static std::uint64_t bit(int v) { return std::uint64_t{1} << (v % 64); }

  bool test(const std::vector<std::uint64_t>& s, int v) const {
    return (s[static_cast<std::size_t>(v) / 64] & bit(v)) != 0;
  }

  static void clear(std::vector<std::uint64_t>& s, int v) {
    s[static_cast<std::size_t>(v) / 64] &= ~bit(v);
  }

  bool any(const std::vector<std::uint64_t>& s) const {
    for (std::uint64_t w : s) {
      if (w != 0) return true;
    }
    return false;
  }

  int first(const std::vector<std::uint64_t>& s) const {
    for (std::size_t w = 0; w < s.size(); ++w) {
      if (s[w] != 0) return static_cast<int>(w * 64) + std::countr_zero(s[w]);
    }
    return -1;
  }

  void greedy_initial(const std::vector<std::uint64_t>& all) {
    std::vector<std::uint64_t> cand = all;
    while (any(cand)) {
      const int v = first(cand);
      best_.push_back(v);
      for (int w = 0; w < W_; ++w) {
        cand[static_cast<std::size_t>(w)] &= adj_[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)];
      }
    }
  }

  void ensure_depth(int depth) {
    while (static_cast<int>(order_pool_.size()) <= depth) {
      order_pool_.emplace_back();
      color_pool_.emplace_back();
      child_pool_.emplace_back(static_cast<std::size_t>(W_), 0);
      scratch_a_.emplace_back(static_cast<std::size_t>(W_), 0);
      scratch_b_.emplace_back(static_cast<std::size_t>(W_), 0);
    }
  }

  /// Greedy coloring of the candidate set; fills order/colors for the depth
  /// (colors ascending) and returns the number of classes used.
  int color(const std::vector<std::uint64_t>& cand, int depth) {
    auto& order = order_pool_[static_cast<std::size_t>(depth)];
    auto& colors = color_pool_[static_cast<std::size_t>(depth)];
    auto& uncolored = scratch_a_[static_cast<std::size_t>(depth)];
    auto& q = scratch_b_[static_cast<std::size_t>(depth)];
    order.clear();
    colors.clear();
    uncolored = cand;
    int k = 0;
    while (any(uncolored)) {
      ++k;
      q = uncolored;
      while (any(q)) {
        const int v = first(q);
        order.push_back(v);
        colors.push_back(k);
        clear(uncolored, v);
        clear(q, v);
        for (int w = 0; w < W_; ++w) {
          q[static_cast<std::size_t>(w)] &= ~adj_[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)];
        }
      }
    }
    return k;
  }

  bool time_up() {
    if (!has_deadline_ || timed_out_) return timed_out_;
    if (std::chrono::steady_clock::now() >= deadline_) {
      timed_out_ = true;
    }
    return timed_out_;
  }

  void expand(std::vector<std::uint64_t>& cand, int depth) {
    ++nodes_;
    if (time_up()) return;
    color(cand, depth);
    auto& order = order_pool_[static_cast<std::size_t>(depth)];
    auto& colors = color_pool_[static_cast<std::size_t>(depth)];
    for (int i = static_cast<int>(order.size()) - 1; i >= 0; --i) {
      const int v = order[static_cast<std::size_t>(i)];
      if (static_cast<int>(current_.size()) + colors[static_cast<std::size_t>(i)] <=
          static_cast<int>(best_.size())) {
        return;
      }
      auto& child = child_pool_[static_cast<std::size_t>(depth)];
      for (int w = 0; w < W_; ++w) {
        child[static_cast<std::size_t>(w)] =
            cand[static_cast<std::size_t>(w)] & adj_[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)];
      }
      current_.push_back(v);
      if (!any(child)) {
        if (current_.size() > best_.size()) best_ = current_;
      } else {
        std::vector<std::uint64_t> saved = child;  // child_pool_ is reused below this depth
        expand(saved, depth + 1);
      }
      current_.pop_back();
      clear(cand, v);
      if (timed_out_) return;
    }
  }

  int V_;
  int W_;
  std::vector<std::vector<std::uint64_t>> adj_;
  std::vector<int> best_;
  std::vector<int> current_;
  std::uint64_t nodes_ = 0;
  bool timed_out_ = false;
  bool has_deadline_ = false;
  std::chrono::steady_clock::time_point deadline_;
  int root_bound_ = 0;

  std::vector<std::vector<int>> order_pool_, color_pool_;
  std::vector<std::vector<std::uint64_t>> child_pool_, scratch_a_, scratch_b_;
};

inline SubsetMask mask_from_bits(int n, std::uint32_t bits) {
  SubsetMask s(n);
  while (bits != 0) {
    s.set(std::countr_zero(bits) + 1);
    bits &= bits - 1;
  }
  return s;
}

inline std::uint32_t bits_from_mask(const SubsetMask& s) {
  std::uint32_t out = 0;
  for (int p : s.positions()) out |= std::uint32_t{1} << (p - 1);
  return out;
}

/// Builds the compatibility graph on the given vertex subsets and runs the
/// clique search.  Vertices are sorted by descending degree (ties by mask
/// value) before the search for deterministic, well-ordered branching.
struct GraphSearchOutcome {
  std::vector<std::uint32_t> best_masks;
  std::uint64_t nodes = 0;
  bool timed_out = false;
  int root_bound = 0;
};

template <typename EdgePred>
GraphSearchOutcome clique_search(const std::vector<std::uint32_t>& vertices, EdgePred edge,
                                 double timeout_ms) {
  const int V = static_cast<int>(vertices.size());
  GraphSearchOutcome out;
  if (V == 0) return out;

  std::vector<std::vector<bool>> e(static_cast<std::size_t>(V),
                                   std::vector<bool>(static_cast<std::size_t>(V), false));
  std::vector<int> degree(static_cast<std::size_t>(V), 0);
  for (int i = 0; i < V; ++i) {
    for (int j = i + 1; j < V; ++j) {
      if (edge(vertices[static_cast<std::size_t>(i)], vertices[static_cast<std::size_t>(j)])) {
        e[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
        e[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = true;
        ++degree[static_cast<std::size_t>(i)];
        ++degree[static_cast<std::size_t>(j)];
      }
    }
  }
  std::vector<int> perm(static_cast<std::size_t>(V));
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](int a, int b) {
    if (degree[static_cast<std::size_t>(a)] != degree[static_cast<std::size_t>(b)]) {
      return degree[static_cast<std::size_t>(a)] > degree[static_cast<std::size_t>(b)];
    }
    return vertices[static_cast<std::size_t>(a)] < vertices[static_cast<std::size_t>(b)];
  });

  const int W = (V + 63) / 64;
  std::vector<std::vector<std::uint64_t>> adj(static_cast<std::size_t>(V),
                                              std::vector<std::uint64_t>(static_cast<std::size_t>(W), 0));
  for (int i = 0; i < V; ++i) {
    for (int j = 0; j < V; ++j) {
      if (e[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]
           [static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])]) {
        adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j) / 64] |=
            std::uint64_t{1} << (j % 64);
      }
    }
  }

  MaxCliqueSearch search(V, std::move(adj), timeout_ms);
  search.run();
  out.nodes = search.nodes();
  out.timed_out = search.timed_out();
  out.root_bound = search.root_bound();
  out.best_masks.reserve(search.best().size());
  for (int v : search.best()) {
    out.best_masks.push_back(vertices[static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])]);
  }
  return out;
}

/// True when the nonempty set is a run of consecutive positions mod n.
inline bool is_cyclic_block(const SubsetMask& s) {
  if (s.empty()) return false;
  const int n = s.ground_size();
  return max_cyclic_gap(s) == n - static_cast<int>(s.count()) + 1;
}

/// Upper bound 2^(n-t) from the coset partition of a verified hitting
/// subgroup; only available when the base is a cyclic block and the
/// subgroup passes exhaustive verification.
inline std::optional<std::uint64_t> coset_bound_for(const TranslateFamily& fam) {
  if (!is_cyclic_block(fam.base)) return std::nullopt;
  const int t = static_cast<int>(fam.base.count());
  GeneratorSet gs = build_generator_set(fam.n, t);
  VerifyBudget vb;
  vb.max_exhaustive_t = t;  // force the exhaustive check
  if (!verify_group(gs, vb).pass()) return std::nullopt;
  return std::uint64_t{1} << (fam.n - t);
}

/// Re-validates a candidate family against the defining pairwise condition,
/// independent of how the search produced it.
inline void validate_family(const TranslateFamily& fam, const std::vector<SubsetMask>& family,
                            ExtremalQuantity quantity) {
  auto contains_member = [&](const SubsetMask& s) {
    for (const SubsetMask& m : fam.members) {
      bool sub = true;
      for (int p : m.positions()) {
        if (!s.contains(p)) {
          sub = false;
          break;
        }
      }
      if (sub) return true;
    }
    return false;
  };
  auto avoids_member = [&](const SubsetMask& d) {
    for (const SubsetMask& m : fam.members) {
      bool disjoint = true;
      for (int p : m.positions()) {
        if (d.contains(p)) {
          disjoint = false;
          break;
        }
      }
      if (disjoint) return true;
    }
    return false;
  };
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i; j < family.size(); ++j) {
      bool ok = false;
      if (quantity == ExtremalQuantity::v) {
        SubsetMask inter = family[i];
        for (int p : inter.positions()) {
          if (!family[j].contains(p)) inter.reset(p);
        }
        ok = contains_member(inter);
      } else {
        ok = (i == j) ? !fam.members.empty() : avoids_member(family[i] ^ family[j]);
      }
      if (!ok) {
        throw std::logic_error("oracle witness failed independent re-validation");
      }
    }
  }
}

}  // namespace detail

/// Exact maximum size of a family of subsets of [n] in which every pairwise
/// intersection (including a set with itself) contains some member of the
/// translate family.  Branch-and-bound maximum clique on the 2^n-vertex
/// compatibility graph; on timeout the result carries certified bounds
/// instead of an exact value.
inline OracleResult oracle_v(const TranslateFamily& fam, const OracleBudget& budget = {}) {
  if (fam.n < 1) throw std::domain_error("oracle_v: need n >= 1");
  if (fam.n > budget.max_n) {
    throw std::domain_error("oracle_v: ground set exceeds the search guard (n <= " +
                            std::to_string(budget.max_n) + ")");
  }
  std::vector<std::uint32_t> members;
  for (const SubsetMask& m : fam.members) members.push_back(detail::bits_from_mask(m));

  auto contains_some = [&](std::uint32_t s) {
    for (std::uint32_t m : members) {
      if ((s & m) == m) return true;
    }
    return false;
  };

  std::vector<std::uint32_t> vertices;
  const std::uint32_t universe_end = static_cast<std::uint32_t>(std::uint64_t{1} << fam.n);
  for (std::uint32_t s = 0; s < universe_end; ++s) {
    if (contains_some(s)) vertices.push_back(s);
  }

  auto edge = [&](std::uint32_t a, std::uint32_t b) { return contains_some(a & b); };
  detail::GraphSearchOutcome found = detail::clique_search(vertices, edge, budget.timeout_ms);

  OracleResult res;
  res.quantity = ExtremalQuantity::v;
  res.nodes_explored = found.nodes;
  res.timed_out = found.timed_out;
  res.lower_bound = found.best_masks.size();
  for (std::uint32_t m : found.best_masks) res.witness.push_back(detail::mask_from_bits(fam.n, m));

  if (!fam.base.empty()) {
    const std::uint64_t kernel_bound = std::uint64_t{1}
                                       << (fam.n - static_cast<int>(fam.base.count()));
    if (kernel_bound > res.lower_bound) {
      if (!res.timed_out) {
        throw std::logic_error("oracle_v: completed search fell below the kernel bound");
      }
      res.lower_bound = kernel_bound;
      res.witness = kernel_family(fam.n, fam.base);
    }
  }

  if (!res.timed_out) {
    res.upper_bound = res.lower_bound;
  } else {
    res.upper_bound = static_cast<std::uint64_t>(found.root_bound);
    if (auto cb = detail::coset_bound_for(fam); cb && *cb < res.upper_bound) {
      res.upper_bound = *cb;
    }
    if (res.upper_bound < res.lower_bound) {
      throw std::logic_error("oracle_v: certified bounds crossed");
    }
  }
  res.value = res.lower_bound;
  detail::validate_family(fam, res.witness, ExtremalQuantity::v);
  return res;
}

/// Exact maximum size of a family in which every two members agree on some
/// member of the translate family (their symmetric difference avoids it).
/// The compatibility relation depends only on the symmetric difference, so
/// by default the search is rooted at the empty set and runs on its
/// neighborhood; root_at_empty = false runs the unreduced search (used to
/// validate the reduction).
inline OracleResult oracle_vbar(const TranslateFamily& fam, const OracleBudget& budget = {},
                                bool root_at_empty = true) {
  if (fam.n < 1) throw std::domain_error("oracle_vbar: need n >= 1");
  if (fam.n > budget.max_n) {
    throw std::domain_error("oracle_vbar: ground set exceeds the search guard (n <= " +
                            std::to_string(budget.max_n) + ")");
  }
  std::vector<std::uint32_t> members;
  for (const SubsetMask& m : fam.members) members.push_back(detail::bits_from_mask(m));

  auto diff_avoids_some = [&](std::uint32_t d) {
    for (std::uint32_t m : members) {
      if ((d & m) == 0) return true;
    }
    return false;
  };

  OracleResult res;
  res.quantity = ExtremalQuantity::v_bar;

  const std::uint32_t universe_end = static_cast<std::uint32_t>(std::uint64_t{1} << fam.n);
  auto edge = [&](std::uint32_t a, std::uint32_t b) { return diff_avoids_some(a ^ b); };

  detail::GraphSearchOutcome found;
  if (root_at_empty) {
    std::vector<std::uint32_t> vertices;
    for (std::uint32_t s = 1; s < universe_end; ++s) {
      if (diff_avoids_some(s)) vertices.push_back(s);
    }
    found = detail::clique_search(vertices, edge, budget.timeout_ms);
    res.lower_bound = found.best_masks.size() + 1;
    res.witness.push_back(SubsetMask(fam.n));
    res.upper_bound = static_cast<std::uint64_t>(found.root_bound) + 1;
  } else {
    std::vector<std::uint32_t> vertices;
    for (std::uint32_t s = 0; s < universe_end; ++s) vertices.push_back(s);
    found = detail::clique_search(vertices, edge, budget.timeout_ms);
    res.lower_bound = found.best_masks.size();
    res.upper_bound = static_cast<std::uint64_t>(found.root_bound);
  }
  for (std::uint32_t m : found.best_masks) res.witness.push_back(detail::mask_from_bits(fam.n, m));
  res.nodes_explored = found.nodes;
  res.timed_out = found.timed_out;

  if (!fam.base.empty()) {
    const std::uint64_t kernel_bound = std::uint64_t{1}
                                       << (fam.n - static_cast<int>(fam.base.count()));
    if (kernel_bound > res.lower_bound) {
      if (!res.timed_out) {
        throw std::logic_error("oracle_vbar: completed search fell below the kernel bound");
      }
      res.lower_bound = kernel_bound;
      res.witness = kernel_family(fam.n, fam.base);
    }
  }

  if (!res.timed_out) {
    res.upper_bound = res.lower_bound;
  } else {
    if (auto cb = detail::coset_bound_for(fam); cb && *cb < res.upper_bound) {
      res.upper_bound = *cb;
    }
    if (res.upper_bound < res.lower_bound) {
      throw std::logic_error("oracle_vbar: certified bounds crossed");
    }
  }
  res.value = res.lower_bound;
  detail::validate_family(fam, res.witness, ExtremalQuantity::v_bar);
  return res;
}

struct TheoremRow {
  int n = 0;
  int t = 0;
  OracleResult v_result;
  OracleResult vbar_result;
  std::uint64_t predicted = 0;  ///< 2^(n-t)
  bool agree = false;           ///< both exact and equal to predicted
};

/// Tabulates both extremal quantities against 2^(n-t) for every block
/// family with 1 <= t <= n <= n_max.  Timeouts surface as rows whose
/// results carry bounds instead of exact values.
inline std::vector<TheoremRow> check_theorems(int n_max, const OracleBudget& budget = {}) {
  if (n_max < 1) throw std::domain_error("check_theorems: need n_max >= 1");
  if (n_max > budget.max_n) {
    throw std::domain_error("check_theorems: n_max exceeds the search guard (n <= " +
                            std::to_string(budget.max_n) + ")");
  }
  std::vector<TheoremRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    for (int t = 1; t <= n; ++t) {
      TheoremRow row;
      row.n = n;
      row.t = t;
      TranslateFamily fam = TranslateFamily::of_block(n, t);
      row.v_result = oracle_v(fam, budget);
      row.vbar_result = oracle_vbar(fam, budget);
      row.predicted = std::uint64_t{1} << (n - t);
      row.agree = row.v_result.exact() && row.vbar_result.exact() &&
                  row.v_result.value == row.predicted && row.vbar_result.value == row.predicted;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace blockgroup
