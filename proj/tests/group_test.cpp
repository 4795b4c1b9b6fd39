#include <gtest/gtest.h>

#include <random>
#include <unordered_set>

#include "blockgroup/group.hpp"
#include "blockgroup/json_io.hpp"
#include "test_oracles.hpp"

using blockgroup::build_generator;
using blockgroup::build_generator_set;
using blockgroup::canonicalize;
using blockgroup::closed_form_generators;
using blockgroup::ComboIndex;
using blockgroup::euclid_decompose;
using blockgroup::GeneratorSet;
using blockgroup::gf2_rank;
using blockgroup::span_element;
using blockgroup::SubsetMask;
using blockgroup::SubsetMaskHash;

TEST(BuildGenerator, HandExamples13x5) {
  const auto dec = euclid_decompose(13, 5);
  EXPECT_EQ(build_generator(dec, 1), SubsetMask::from_positions(13, {1, 6, 11}));
  EXPECT_EQ(build_generator(dec, 2), SubsetMask::from_positions(13, {2, 7, 12}));
  EXPECT_EQ(build_generator(dec, 3), SubsetMask::from_positions(13, {3, 8, 13}));
  EXPECT_EQ(build_generator(dec, 4), SubsetMask::from_positions(13, {4, 9, 11, 13}));
  EXPECT_EQ(build_generator(dec, 5), SubsetMask::from_positions(13, {5, 10, 12, 13}));
  EXPECT_THROW(build_generator(dec, 0), std::out_of_range);
  EXPECT_THROW(build_generator(dec, 6), std::out_of_range);
}

TEST(BuildGenerator, DividingCase) {
  const auto dec = euclid_decompose(6, 2);
  EXPECT_EQ(build_generator(dec, 1), SubsetMask::from_positions(6, {1, 3, 5}));
  EXPECT_EQ(build_generator(dec, 2), SubsetMask::from_positions(6, {2, 4, 6}));
}

TEST(BuildGeneratorSet, BlockEqualsGround) {
  // t = n degenerates to singletons through the general machinery.
  const GeneratorSet gs = build_generator_set(5, 5);
  for (int i = 1; i <= 5; ++i) {
    EXPECT_EQ(gs.generator(i), SubsetMask::from_positions(5, {i}));
  }
}

TEST(BuildGeneratorSet, TriangularPropertySweep) {
  for (int n = 1; n <= 128; ++n) {
    for (int t = 1; t <= n; ++t) {
      const GeneratorSet gs = build_generator_set(n, t);
      for (int u = 1; u <= t; ++u) {
        for (int j = 1; j <= t; ++j) {
          ASSERT_EQ(gs.generator(j).contains(u), u == j) << "n=" << n << " t=" << t;
        }
      }
    }
  }
}

TEST(BuildGeneratorSet, SegmentsDisjointOrderedAndRealized) {
  for (int n : {13, 21, 34, 55, 89, 97, 100, 128, 200}) {
    for (int t = 1; t <= n && t <= 64; ++t) {
      const GeneratorSet gs = build_generator_set(n, t);
      for (int i = 1; i <= t; ++i) {
        const auto& plan = gs.plan(i);
        SubsetMask rebuilt(n);
        std::int64_t prev_hi = 0;
        for (const auto& seg : plan.segments) {
          ASSERT_EQ(seg.lo, prev_hi);  // consecutive intervals, hence disjoint
          ASSERT_LT(seg.lo, seg.hi);
          ASSERT_GE(seg.offset, 1);
          ASSERT_LE(seg.offset, seg.modulus);
          prev_hi = seg.hi;
          for (std::int64_t x = seg.lo + seg.offset; x <= seg.hi; x += seg.modulus) {
            ASSERT_FALSE(rebuilt.contains(static_cast<int>(x)));
            rebuilt.set(static_cast<int>(x));
          }
        }
        if (plan.tail_point) {
          ASSERT_GT(*plan.tail_point, prev_hi);
          ASSERT_LE(*plan.tail_point, n);
          rebuilt.set(static_cast<int>(*plan.tail_point));
        }
        ASSERT_EQ(rebuilt, gs.generator(i)) << "n=" << n << " t=" << t << " i=" << i;
      }
    }
  }
}

TEST(ClosedForm, DividingCase) {
  const auto gs = closed_form_generators(6, 2);
  ASSERT_TRUE(gs.has_value());
  EXPECT_EQ(gs->generator(1), SubsetMask::from_positions(6, {1, 3, 5}));
  EXPECT_EQ(gs->generator(2), SubsetMask::from_positions(6, {2, 4, 6}));
}

TEST(ClosedForm, RemainderOneCase) {
  // 7 = 2*3 + 1: every generator picks up the point n, and every nonzero
  // sum of generators still meets every window of 3.
  const auto gs = closed_form_generators(7, 3);
  ASSERT_TRUE(gs.has_value());
  EXPECT_EQ(gs->generator(1), SubsetMask::from_positions(7, {1, 4, 7}));
  EXPECT_EQ(gs->generator(2), SubsetMask::from_positions(7, {2, 5, 7}));
  EXPECT_EQ(gs->generator(3), SubsetMask::from_positions(7, {3, 6, 7}));
  for (std::uint64_t combo = 1; combo < 8; ++combo) {
    ASSERT_TRUE(
        testing_oracles::hits_all_windows_direct(span_element(*gs, ComboIndex{combo}), 3));
  }
  // And it coincides with the general construction.
  const GeneratorSet general = build_generator_set(7, 3);
  for (int i = 1; i <= 3; ++i) {
    EXPECT_EQ(gs->generator(i), general.generator(i));
  }
}

TEST(ClosedForm, AbsentBeyondDepthThree) {
  EXPECT_FALSE(closed_form_generators(13, 5).has_value());  // depth 4
  EXPECT_TRUE(closed_form_generators(11, 4).has_value());   // depth 3
}

TEST(ClosedForm, MatchesGeneralConstructionSampled) {
  for (int n = 1; n <= 120; ++n) {
    for (int t = 1; t <= n; ++t) {
      const auto closed = closed_form_generators(n, t);
      const auto dec = euclid_decompose(n, t);
      ASSERT_EQ(closed.has_value(), dec.k <= 3);
      if (!closed) continue;
      const GeneratorSet general = build_generator_set(n, t);
      for (int i = 1; i <= t; ++i) {
        ASSERT_EQ(closed->generator(i), general.generator(i)) << "n=" << n << " t=" << t;
      }
    }
  }
}

TEST(SpanElement, Examples) {
  const GeneratorSet gs = build_generator_set(13, 5);
  EXPECT_EQ(span_element(gs, ComboIndex{0}), SubsetMask(13));
  EXPECT_EQ(span_element(gs, ComboIndex{1}), gs.generator(1));
  // g_1 xor g_4: position 11 cancels.
  EXPECT_EQ(span_element(gs, ComboIndex{0b01001}),
            SubsetMask::from_positions(13, {1, 4, 6, 9, 13}));
  EXPECT_THROW(span_element(gs, ComboIndex{1ull << 5}), std::domain_error);
}

TEST(SpanElement, AllDistinctSmall) {
  for (auto [n, t] : std::vector<std::pair<int, int>>{{13, 5}, {20, 7}, {37, 11}, {64, 12}}) {
    const GeneratorSet gs = build_generator_set(n, t);
    std::unordered_set<SubsetMask, SubsetMaskHash> seen;
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << t); ++c) {
      ASSERT_TRUE(seen.insert(span_element(gs, ComboIndex{c})).second);
    }
    EXPECT_EQ(seen.size(), std::uint64_t{1} << t);
  }
}

TEST(Canonicalize, HandExample) {
  const GeneratorSet gs = build_generator_set(13, 5);
  const auto canon = canonicalize(gs, SubsetMask::from_positions(13, {1, 2}));
  EXPECT_EQ(canon.combo.bits, 0b11u);
  EXPECT_EQ(canon.rep, SubsetMask::from_positions(13, {6, 7, 11, 12}));
}

TEST(Canonicalize, UntouchedWhenBlockPrefixEmpty) {
  const GeneratorSet gs = build_generator_set(13, 5);
  const auto s = SubsetMask::from_positions(13, {7, 9, 13});
  const auto canon = canonicalize(gs, s);
  EXPECT_EQ(canon.combo.bits, 0u);
  EXPECT_EQ(canon.rep, s);
}

TEST(Canonicalize, CosetStabilityIdempotenceAndMembership) {
  std::mt19937_64 rng(909);
  const GeneratorSet gs = build_generator_set(19, 6);
  for (int trial = 0; trial < 500; ++trial) {
    SubsetMask s(19);
    for (int p = 1; p <= 19; ++p) {
      if (rng() & 1U) s.set(p);
    }
    const auto canon = canonicalize(gs, s);
    for (int i = 1; i <= 6; ++i) {
      ASSERT_FALSE(canon.rep.contains(i));
    }
    // Same coset, same representative.
    const std::uint64_t shift = rng() & 0x3f;
    const auto shifted = s ^ span_element(gs, ComboIndex{shift});
    ASSERT_EQ(canonicalize(gs, shifted).rep, canon.rep);
    // Idempotent, and the cleared part is reproduced by the combo.
    ASSERT_EQ(canonicalize(gs, canon.rep).rep, canon.rep);
    ASSERT_EQ(canon.rep ^ span_element(gs, canon.combo), s);
  }
}

TEST(GeneratorSet, RawConstructionValidatesTriangular) {
  auto dec = euclid_decompose(13, 5);
  std::vector<SubsetMask> gens;
  for (int i = 1; i <= 5; ++i) gens.push_back(build_generator(dec, i));

  // Clearing the diagonal bit of g_2 breaks the triangular property.
  auto bad = gens;
  bad[1].reset(2);
  EXPECT_THROW(GeneratorSet(dec, bad), std::invalid_argument);

  // Setting an off-diagonal bit inside [t] breaks it too.
  bad = gens;
  bad[1].set(4);
  EXPECT_THROW(GeneratorSet(dec, bad), std::invalid_argument);

  // Flips outside [t] pass construction.
  bad = gens;
  bad[1].flip(11);
  EXPECT_NO_THROW(GeneratorSet(dec, bad));

  EXPECT_THROW(GeneratorSet(dec, std::vector<SubsetMask>(gens.begin(), gens.end() - 1)),
               std::invalid_argument);
}

TEST(GeneratorSet, FlipHookRejectsBlockPrefixFlips) {
  const GeneratorSet gs = build_generator_set(13, 5);
  EXPECT_THROW(gs.with_flipped_bit(2, 4), std::invalid_argument);
  EXPECT_THROW(gs.with_flipped_bit(3, 3), std::invalid_argument);
  EXPECT_NO_THROW(gs.with_flipped_bit(2, 11));
}

TEST(Gf2Rank, GeneratorsHaveFullRank) {
  for (auto [n, t] : std::vector<std::pair<int, int>>{{13, 5}, {64, 16}, {127, 40}, {300, 128}}) {
    EXPECT_EQ(gf2_rank(build_generator_set(n, t).generators()), t);
  }
}

TEST(Gf2Rank, DetectsDependence) {
  std::vector<SubsetMask> rows;
  rows.push_back(SubsetMask::from_positions(8, {1, 2}));
  rows.push_back(SubsetMask::from_positions(8, {2, 3}));
  rows.push_back(SubsetMask::from_positions(8, {1, 3}));  // xor of the first two
  EXPECT_EQ(gf2_rank(rows), 2);
  rows.push_back(SubsetMask(8));  // zero row
  EXPECT_EQ(gf2_rank(rows), 2);
  rows.push_back(SubsetMask::from_positions(8, {5}));
  EXPECT_EQ(gf2_rank(rows), 3);
}

TEST(GeneratorSetJson, EmitAndRebuild) {
  const GeneratorSet gs = build_generator_set(13, 5);
  const nlohmann::json j = blockgroup::to_json(gs);
  EXPECT_EQ(j.at("n").get<int>(), 13);
  EXPECT_EQ(j.at("t").get<int>(), 5);
  EXPECT_EQ(j.at("euclid").at("k").get<int>(), 4);
  EXPECT_EQ(j.at("generators").at(0).get<std::vector<int>>(), (std::vector<int>{1, 6, 11}));

  const GeneratorSet back = blockgroup::generator_set_from_json(j);
  for (int i = 1; i <= 5; ++i) {
    EXPECT_EQ(back.generator(i), gs.generator(i));
  }

  // Byte-identical re-emission after a parse round trip.
  const std::string text = j.dump();
  EXPECT_EQ(nlohmann::json::parse(text).dump(), text);
  EXPECT_EQ(blockgroup::to_json(back).dump(), text);
}

TEST(GeneratorSetJson, RejectsTamperedDocuments) {
  nlohmann::json j = blockgroup::to_json(build_generator_set(13, 5));
  j["euclid"]["k"] = 3;
  EXPECT_THROW(blockgroup::generator_set_from_json(j), std::invalid_argument);

  nlohmann::json j2 = blockgroup::to_json(build_generator_set(13, 5));
  j2["generators"][0] = std::vector<int>{2, 6, 11};  // breaks the triangular property
  EXPECT_THROW(blockgroup::generator_set_from_json(j2), std::invalid_argument);
}
