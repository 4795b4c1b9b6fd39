#include <gtest/gtest.h>

#include "blockgroup/group.hpp"
#include "blockgroup/json_io.hpp"
#include "blockgroup/verify.hpp"
#include "test_oracles.hpp"

using blockgroup::build_generator_set;
using blockgroup::ComboIndex;
using blockgroup::CosetPartitionSummary;
using blockgroup::GeneratorSet;
using blockgroup::span_element;
using blockgroup::SubsetMask;
using blockgroup::VerificationReport;
using blockgroup::verify_coset_partition;
using blockgroup::verify_group;
using blockgroup::VerifyBudget;
using blockgroup::VerifyMode;

namespace {

// Ground truth for a generator set, by direct window enumeration over every
// nonzero generator sum.  Returns false iff some sum misses some window.
bool all_sums_hit_direct(const GeneratorSet& gs) {
  const int t = gs.block_len();
  for (std::uint64_t c = 1; c < (std::uint64_t{1} << t); ++c) {
    if (!testing_oracles::hits_all_windows_direct(span_element(gs, ComboIndex{c}), t)) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST(VerifyGroup, ExhaustivePassExamples) {
  const auto r13 = verify_group(build_generator_set(13, 5));
  EXPECT_EQ(r13.mode, VerifyMode::exhaustive);
  EXPECT_EQ(r13.combos_checked, 31u);
  EXPECT_TRUE(r13.pass());
  EXPECT_TRUE(r13.group_order_confirmed);

  const auto r6 = verify_group(build_generator_set(6, 2));
  EXPECT_EQ(r6.combos_checked, 3u);
  EXPECT_TRUE(r6.pass());
  EXPECT_TRUE(r6.group_order_confirmed);
}

TEST(VerifyGroup, DetectsRemovedPoint) {
  // Removing 11 from g_1 opens a run of seven empty positions after 6.
  const GeneratorSet corrupted = build_generator_set(13, 5).with_flipped_bit(1, 11);
  const auto report = verify_group(corrupted);
  ASSERT_FALSE(report.pass());
  bool saw_singleton_combo = false;
  for (const auto& f : report.failures) {
    const SubsetMask elem = span_element(corrupted, ComboIndex{f.combo_bits});
    ASSERT_TRUE(testing_oracles::window_missed_direct(elem, 5, f.missed_start))
        << "combo " << f.combo_bits;
    if (f.combo_bits == 1) {
      saw_singleton_combo = true;
      EXPECT_EQ(f.missed_start, 7);
    }
  }
  EXPECT_TRUE(saw_singleton_combo);
}

// Every single-bit flip outside the block prefix: the verifier's verdict
// must coincide with independent window enumeration over all 31 sums, and
// every clear-flip (a removed point) must be detected.  Set-flips may leave
// the hitting property genuinely intact; the verdict still has to agree.
TEST(VerifyGroup, VerdictMatchesGroundTruthOnAllSingleBitFlips) {
  const GeneratorSet gs = build_generator_set(13, 5);
  int removals = 0;
  int removals_detected = 0;
  int absorbed_additions = 0;
  for (int i = 1; i <= 5; ++i) {
    for (int pos = 6; pos <= 13; ++pos) {
      const bool was_set = gs.generator(i).contains(pos);
      const GeneratorSet flipped = gs.with_flipped_bit(i, pos);
      const bool truth = all_sums_hit_direct(flipped);
      const auto report = verify_group(flipped);
      ASSERT_EQ(report.pass(), truth) << "generator " << i << " position " << pos;
      for (const auto& f : report.failures) {
        ASSERT_TRUE(testing_oracles::window_missed_direct(
            span_element(flipped, ComboIndex{f.combo_bits}), 5, f.missed_start));
      }
      if (was_set) {
        ++removals;
        if (!report.pass()) ++removals_detected;
      } else if (truth) {
        ++absorbed_additions;
      }
    }
  }
  EXPECT_EQ(removals, 12);
  EXPECT_EQ(removals_detected, removals);
  // Some additions are absorbed without breaking the property; that is a
  // fact about this group, pinned here so the suite notices if it drifts.
  EXPECT_EQ(absorbed_additions, 21);
}

TEST(VerifyGroup, ExhaustiveSweepSmall) {
  for (int n = 1; n <= 24; ++n) {
    for (int t = 1; t <= std::min(n, 12); ++t) {
      const auto report = verify_group(build_generator_set(n, t));
      ASSERT_TRUE(report.pass()) << "n=" << n << " t=" << t;
      ASSERT_TRUE(report.group_order_confirmed) << "n=" << n << " t=" << t;
      ASSERT_EQ(report.combos_checked, (std::uint64_t{1} << t) - 1);
    }
  }
}

TEST(VerifyGroup, SampledModeDeterministicAndclean) {
  const GeneratorSet gs = build_generator_set(130, 21);
  VerifyBudget budget;
  budget.max_exhaustive_t = 16;  // forces sampling at t = 21
  budget.sample_count = 20000;
  budget.seed = 42;
  const auto a = verify_group(gs, budget);
  EXPECT_EQ(a.mode, VerifyMode::sampled);
  EXPECT_EQ(a.combos_checked, 20000u);
  EXPECT_TRUE(a.pass());
  EXPECT_TRUE(a.group_order_confirmed);

  const auto b = verify_group(gs, budget);
  EXPECT_EQ(a.combos_checked, b.combos_checked);
  ASSERT_EQ(a.failures.size(), b.failures.size());

  // A generator set squashed to singletons leaves positions 22..130 bare, so
  // every sampled sum misses a window and every witness must be genuine.
  std::vector<SubsetMask> singletons;
  for (int i = 1; i <= 21; ++i) singletons.push_back(SubsetMask::from_positions(130, {i}));
  const GeneratorSet squashed(blockgroup::euclid_decompose(130, 21), singletons);
  const auto c = verify_group(squashed, budget);
  ASSERT_EQ(c.failures.size(), budget.sample_count);
  const auto c2 = verify_group(squashed, budget);
  for (std::size_t i = 0; i < c.failures.size(); ++i) {
    ASSERT_EQ(c.failures[i].combo_bits, c2.failures[i].combo_bits);
    ASSERT_EQ(c.failures[i].missed_start, c2.failures[i].missed_start);
  }
  for (std::size_t i = 0; i < 50; ++i) {
    ASSERT_TRUE(testing_oracles::window_missed_direct(
        span_element(squashed, ComboIndex{c.failures[i].combo_bits}), 21,
        c.failures[i].missed_start));
  }
}

TEST(VerifyGroup, WorkerCountDoesNotChangeTheReport) {
  const GeneratorSet corrupted = build_generator_set(13, 5).with_flipped_bit(1, 11);
  VerifyBudget one;
  one.jobs = 1;
  VerifyBudget many;
  many.jobs = 5;
  const auto a = verify_group(corrupted, one);
  const auto b = verify_group(corrupted, many);
  ASSERT_EQ(a.failures.size(), b.failures.size());
  for (std::size_t i = 0; i < a.failures.size(); ++i) {
    ASSERT_EQ(a.failures[i].combo_bits, b.failures[i].combo_bits);
    ASSERT_EQ(a.failures[i].missed_start, b.failures[i].missed_start);
  }
  EXPECT_EQ(a.combos_checked, b.combos_checked);

  const GeneratorSet big = build_generator_set(257, 24);
  VerifyBudget s1;
  s1.sample_count = 5000;
  s1.seed = 7;
  s1.jobs = 1;
  VerifyBudget s3 = s1;
  s3.jobs = 3;
  EXPECT_EQ(verify_group(big, s1).failures.size(), verify_group(big, s3).failures.size());
}

TEST(VerifyGroup, RejectsOversizedBlock) {
  EXPECT_THROW(verify_group(build_generator_set(70, 64)), std::domain_error);
}

TEST(CosetPartition, Examples) {
  const auto r62 = verify_coset_partition(build_generator_set(6, 2));
  EXPECT_EQ(r62.coset_count, 16u);
  EXPECT_EQ(r62.agreement_violations, 0u);

  const auto r135 = verify_coset_partition(build_generator_set(13, 5));
  EXPECT_EQ(r135.coset_count, 256u);
  EXPECT_EQ(r135.agreement_violations, 0u);

  const auto rnn = verify_coset_partition(build_generator_set(4, 4));
  EXPECT_EQ(rnn.coset_count, 1u);
  EXPECT_EQ(rnn.agreement_violations, 0u);
}

TEST(CosetPartition, RefusesLargeGround) {
  EXPECT_THROW(verify_coset_partition(build_generator_set(21, 3)), std::domain_error);
}

// The two checks see the same structure: the within-coset differences are
// exactly the nonzero generator sums.  A corrupted set must fail both ways;
// an intact one must pass both ways.
TEST(CosetPartition, AgreesWithGroupVerdict) {
  for (int n = 1; n <= 12; ++n) {
    for (int t = 1; t <= n; ++t) {
      const GeneratorSet gs = build_generator_set(n, t);
      const auto coset = verify_coset_partition(gs);
      const auto group = verify_group(gs);
      ASSERT_EQ(coset.agreement_violations == 0, group.pass()) << "n=" << n << " t=" << t;
      ASSERT_EQ(coset.coset_count, std::uint64_t{1} << (n - t));
    }
  }

  const GeneratorSet corrupted = build_generator_set(13, 5).with_flipped_bit(1, 11);
  const auto coset = verify_coset_partition(corrupted);
  const auto group = verify_group(corrupted);
  EXPECT_FALSE(group.pass());
  EXPECT_GT(coset.agreement_violations, 0u);
  EXPECT_EQ(coset.coset_count, 256u);  // canonicalization is intact either way
}

TEST(ReportJson, Shape) {
  const auto report = verify_group(build_generator_set(13, 5));
  const nlohmann::json j = blockgroup::to_json(report, 13, 5);
  EXPECT_EQ(j.at("n").get<int>(), 13);
  EXPECT_EQ(j.at("mode").get<std::string>(), "exhaustive");
  EXPECT_EQ(j.at("combos_checked").get<std::uint64_t>(), 31u);
  EXPECT_TRUE(j.at("failures").is_array());
  EXPECT_TRUE(j.at("failures").empty());
  EXPECT_TRUE(j.at("group_order_confirmed").get<bool>());
  EXPECT_TRUE(j.at("elapsed_ms").is_number());

  const auto bad = verify_group(build_generator_set(13, 5).with_flipped_bit(1, 11));
  const nlohmann::json jb = blockgroup::to_json(bad, 13, 5);
  EXPECT_FALSE(jb.at("failures").empty());
  EXPECT_TRUE(jb.at("failures").at(0).contains("combo_bits"));
  EXPECT_TRUE(jb.at("failures").at(0).contains("missed_start"));
}
