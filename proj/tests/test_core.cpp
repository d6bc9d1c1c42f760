#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "okfrac/core.hpp"
#include "oracles.hpp"

namespace okfrac {
namespace {

using Q = Rational;

Instance<Q> make(std::initializer_list<Item<Q>> items, Q capacity) {
  return {std::vector<Item<Q>>(items), capacity};
}

TEST(Normalize, ClampsOversizedItems) {
  const auto inst = normalize(make({{1, Q(5), Q(10)}}, Q(4)));
  EXPECT_EQ(inst.items[0].size, Q(4));
}

TEST(Normalize, TieBreakByIdInValueOrder) {
  const auto inst = normalize(make({{2, Q(3), Q(2)}, {1, Q(3), Q(1)}}, Q(2)));
  ASSERT_EQ(inst.items.size(), 2u);
  EXPECT_EQ(inst.items[0].id, 1);
  EXPECT_EQ(inst.items[1].id, 2);
}

TEST(Normalize, Idempotent) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const auto once = testing::random_small_instance(rng, 6);
    const auto twice = normalize(once);
    ASSERT_EQ(once.items.size(), twice.items.size());
    EXPECT_EQ(once.capacity, twice.capacity);
    for (std::size_t i = 0; i < once.items.size(); ++i) {
      EXPECT_EQ(once.items[i].id, twice.items[i].id);
      EXPECT_EQ(once.items[i].value, twice.items[i].value);
      EXPECT_EQ(once.items[i].size, twice.items[i].size);
    }
  }
}

TEST(Normalize, RejectsBadInput) {
  EXPECT_THROW(normalize(Instance<Q>{{}, Q(1)}), InvalidInstance);
  EXPECT_THROW(normalize(make({{1, Q(1), Q(1)}}, Q(0))), InvalidInstance);
  EXPECT_THROW(normalize(make({{1, Q(1), Q(0)}}, Q(1))), InvalidInstance);
  EXPECT_THROW(normalize(make({{1, Q(1), Q(-1)}}, Q(1))), InvalidInstance);
  EXPECT_THROW(normalize(make({{1, Q(-1), Q(1)}}, Q(1))), InvalidInstance);
  EXPECT_THROW(normalize(make({{1, Q(1), Q(1)}, {1, Q(2), Q(1)}}, Q(1))), InvalidInstance);
}

TEST(SolveFractional, TwoItemExample) {
  const auto sol = solve_fractional(normalize(make({{1, Q(6), Q(3)}, {2, Q(4), Q(4)}}, Q(5))));
  EXPECT_EQ(sol.packing.fraction(1), Q(1));
  EXPECT_EQ(sol.packing.fraction(2), Q(1, 2));
  EXPECT_EQ(sol.objective, Q(8));
  EXPECT_EQ(sol.support_size, 2u);
  EXPECT_EQ(sol.utilizations.at(1), Q(3, 5));
  EXPECT_EQ(sol.utilizations.at(2), Q(2, 5));
  EXPECT_EQ(sol.threshold_density, Q(1));
}

TEST(SolveFractional, SingleItemExactlyFills) {
  const auto sol = solve_fractional(normalize(make({{1, Q(7), Q(10)}}, Q(10))));
  EXPECT_EQ(sol.packing.fraction(1), Q(1));
  EXPECT_EQ(sol.objective, Q(7));
  EXPECT_EQ(sol.support_size, 1u);
  EXPECT_EQ(sol.utilizations.at(1), Q(1));
}

TEST(SolveFractional, DensityTieGoesToMoreValuableItem) {
  // Both density 1; the value-6 item is packed first.
  const auto sol = solve_fractional(normalize(make({{1, Q(3), Q(3)}, {2, Q(6), Q(6)}}, Q(6))));
  EXPECT_EQ(sol.packing.fraction(2), Q(1));
  EXPECT_EQ(sol.packing.fraction(1), Q(0));
}

TEST(SolveFractional, ZeroValueItemsOnlyPad) {
  const auto sol = solve_fractional(normalize(make({{1, Q(0), Q(2)}, {2, Q(5), Q(1)}}, Q(2))));
  EXPECT_EQ(sol.packing.fraction(2), Q(1));
  EXPECT_EQ(sol.packing.fraction(1), Q(1, 2));
  EXPECT_EQ(sol.objective, Q(5));
}

TEST(SolveFractional, MatchesExhaustiveOracleOnEightItems) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 100; ++t) {
    const auto inst = testing::random_small_instance(rng, 8);
    EXPECT_EQ(solve_fractional(inst).objective, testing::exhaustive_optimum(inst));
  }
}

TEST(SolveFractional, StructureInvariants) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 300; ++t) {
    const auto inst = testing::random_small_instance(rng, 1 + t % 10);
    const auto sol = solve_fractional(inst);
    std::size_t strictly_fractional = 0;
    Q util(0);
    for (const auto& item : inst.items) {
      const Q x = sol.packing.fraction(item.id);
      ASSERT_GE(x, 0);
      ASSERT_LE(x, 1);
      if (x > 0 && x < 1) ++strictly_fractional;
      const Q rho = density(item);
      if (rho > sol.threshold_density) EXPECT_EQ(x, 1);
      if (rho < sol.threshold_density) EXPECT_EQ(x, 0);
      util += sol.utilizations.at(item.id);
    }
    EXPECT_LE(strictly_fractional, 1u);
    EXPECT_LE(util, 1);
    EXPECT_LE(packed_size(sol.packing, inst), inst.capacity);
  }
}

TEST(SolveFractional, InvariantUnderListOrder) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    auto inst = testing::random_small_instance(rng, 7, 3, 3, 6);  // many ties
    const auto ref = solve_fractional(inst);
    std::shuffle(inst.items.begin(), inst.items.end(), rng);
    const auto again = solve_fractional(inst);
    EXPECT_EQ(ref.packing.fractions, again.packing.fractions);
    EXPECT_EQ(ref.objective, again.objective);
  }
}

TEST(SolveFractional, DensityRankMonotoneUnderSubsets) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 100; ++t) {
    const auto full = testing::random_small_instance(rng, 9);
    Instance<Q> sub{{}, full.capacity};
    for (const auto& item : full.items)
      if (rng() % 2) sub.items.push_back(item);
    auto rank_in = [](const Instance<Q>& inst, const Item<Q>& item) {
      return std::count_if(inst.items.begin(), inst.items.end(),
                           [&](const Item<Q>& o) { return density_before(o, item); });
    };
    for (const auto& item : sub.items) EXPECT_LE(rank_in(sub, item), rank_in(full, item));
  }
}

TEST(ObjectiveOf, Basics) {
  const auto inst = normalize(make({{1, Q(6), Q(3)}, {2, Q(4), Q(4)}}, Q(5)));
  const FractionalPacking<Q> zero{IdMap<Q>({{1, Q(0)}, {2, Q(0)}}), inst.capacity};
  EXPECT_EQ(objective_of(zero, inst), Q(0));
  const auto sol = solve_fractional(inst);
  EXPECT_EQ(objective_of(sol.packing, inst), sol.objective);
  const FractionalPacking<Q> half{IdMap<Q>({{1, Q(1)}, {2, Q(1, 2)}}), inst.capacity};
  EXPECT_EQ(objective_of(half, inst), Q(8));
  const FractionalPacking<Q> stray{IdMap<Q>({{3, Q(1)}}), inst.capacity};
  EXPECT_THROW(objective_of(stray, inst), KeyMismatch);
}

TEST(SolveFractional, FloatModeAgreesWithRational) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto inst = testing::random_small_instance(rng, 10);
    const auto exact = solve_fractional(inst);
    const auto approx = solve_fractional(convert<double>(inst));
    EXPECT_NEAR(approx.objective, to_double(exact.objective), 1e-12 * (1 + to_double(exact.objective)));
    EXPECT_LE(packed_size(approx.packing, convert<double>(inst)),
              to_double(inst.capacity) * (1 + 1e-9));
  }
}

}  // namespace
}  // namespace okfrac
