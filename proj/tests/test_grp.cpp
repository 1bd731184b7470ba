#include <random>

#include <gtest/gtest.h>

#include "corfree/grp.hpp"

using namespace corfree;

namespace {

  std::vector<FiniteGroup> small_groups() {
    return {trivial_group(),        cyclic_group(4),       dihedral_group(3),
            dihedral_group(4),      quaternion_group(),    alternating_group_4(),
            symmetric_group(4),     heisenberg_group(3),
            direct_product(cyclic_group(2), cyclic_group(6))};
  }

  // A reflection of D4: an element outside the rotation subgroup of order 4.
  Elt some_reflection(FiniteGroup const& d4) {
    for (std::size_t x = 0; x < d4.order(); ++x) {
      if (d4.element_order(Elt(x)) == 2 && !d4.is_abelian()) {
        auto s = generated_subgroup(d4, {Elt(x)});
        if (!s.is_normal()) {
          return Elt(x);
        }
      }
    }
    return d4.identity();
  }

}  // namespace

TEST(Generators, SingleThreeCycleGivesC3) {
  auto g = group_from_generators(3, {{1, 2, 0}});
  EXPECT_EQ(g.order(), 3U);
  EXPECT_TRUE(g.is_abelian());
  EXPECT_EQ(g.identity(), 0);
}

TEST(Generators, SquareSymmetriesGiveD4) {
  auto g = group_from_generators(4, {{1, 2, 3, 0}, {2, 1, 0, 3}});
  EXPECT_EQ(g.order(), 8U);
  EXPECT_FALSE(g.is_abelian());
  EXPECT_EQ(g.identity(), 0);
}

TEST(Generators, NoGeneratorsGiveTrivialGroup) {
  auto g = group_from_generators(1, {});
  EXPECT_EQ(g.order(), 1U);
}

TEST(Generators, CapIsEnforced) {
  EXPECT_THROW(group_from_generators(5, {{1, 2, 3, 4, 0}, {1, 0, 2, 3, 4}}, 100), SizeCapError);
  EXPECT_THROW(group_from_generators(3, {{0, 0, 1}}), ValidationError);
}

TEST(Generators, NamedFamiliesHaveTheRightOrders) {
  EXPECT_EQ(dihedral_group(5).order(), 10U);
  EXPECT_EQ(symmetric_group(4).order(), 24U);
  EXPECT_EQ(alternating_group_4().order(), 12U);
  EXPECT_EQ(quaternion_group().order(), 8U);
  EXPECT_EQ(heisenberg_group(3).order(), 27U);
  EXPECT_EQ(direct_product(cyclic_group(3), cyclic_group(5)).order(), 15U);
}

TEST(NormalClosure, AbelianParentKeepsSubgroup) {
  auto g = cyclic_group(4);
  auto s = generated_subgroup(g, {2});
  EXPECT_EQ(normal_closure(g, s), s);
}

TEST(NormalClosure, ReflectionInD4) {
  auto g = dihedral_group(4);
  auto r = some_reflection(g);
  auto s = generated_subgroup(g, {r});
  auto n = normal_closure(g, s);
  EXPECT_EQ(n.order(), 4U);
  EXPECT_TRUE(n.is_normal());
  // contains the rotation of order 2, which is central
  bool has_central_involution = false;
  for (Elt x : n.elements()) {
    bool central = true;
    for (std::size_t y = 0; y < g.order(); ++y) {
      central = central && g.mul(x, Elt(y)) == g.mul(Elt(y), x);
    }
    has_central_involution = has_central_involution || (central && x != g.identity());
  }
  EXPECT_TRUE(has_central_involution);
}

TEST(NormalClosure, TrivialStaysTrivial) {
  for (auto const& g : small_groups()) {
    EXPECT_EQ(normal_closure(g, trivial_subgroup(g)).order(), 1U);
  }
}

TEST(NormalClosure, RandomSubgroupsProperty) {
  std::mt19937_64 rng(1);
  for (auto const& g : small_groups()) {
    for (int k = 0; k < 10; ++k) {
      std::uniform_int_distribution<std::size_t> pick(0, g.order() - 1);
      auto s = generated_subgroup(g, {Elt(pick(rng)), Elt(pick(rng))});
      auto n = normal_closure(g, s);
      EXPECT_TRUE(n.is_normal());
      EXPECT_TRUE(s.is_subset_of(n));
      EXPECT_EQ(n == s, s.is_normal());
    }
  }
}

TEST(Subgroups, RejectNonSubgroups) {
  auto g = dihedral_group(3);
  EXPECT_THROW(Subgroup(g, {1}), ValidationError);
  EXPECT_THROW(Subgroup(g, {0, 7}), ValidationError);
  auto r = generated_subgroup(g, {1});
  EXPECT_NO_THROW(Subgroup(g, r.elements()));
}

TEST(Quotients, CyclicByOrderTwo) {
  auto g = cyclic_group(4);
  auto q = quotient_group(g, generated_subgroup(g, {2}));
  EXPECT_EQ(q.group.order(), 2U);
  EXPECT_TRUE(q.projection.is_surjective());
  EXPECT_EQ(q.projection.kernel().order(), 2U);
}

TEST(Quotients, D4ByCenterHasExponentTwo) {
  auto g = dihedral_group(4);
  auto z = commutator_subgroup(g);  // the center of D4
  ASSERT_EQ(z.order(), 2U);
  auto q = quotient_group(g, z);
  EXPECT_EQ(q.group.order(), 4U);
  for (std::size_t x = 0; x < 4; ++x) {
    EXPECT_LE(q.group.element_order(Elt(x)), 2U);
  }
}

TEST(Quotients, ByWholeGroupIsTrivial) {
  auto g = symmetric_group(3);
  EXPECT_EQ(quotient_group(g, whole_group(g)).group.order(), 1U);
}

TEST(Quotients, NonNormalIsRejected) {
  auto g = dihedral_group(4);
  EXPECT_THROW(quotient_group(g, generated_subgroup(g, {some_reflection(g)})), NormalityError);
}

TEST(Quotients, LagrangeProperty) {
  for (auto const& g : small_groups()) {
    for (std::size_t x = 0; x < g.order(); x += 3) {
      auto n = normal_closure(g, generated_subgroup(g, {Elt(x)}));
      auto q = quotient_group(g, n);
      EXPECT_EQ(g.order(), n.order() * q.group.order());
      EXPECT_EQ(q.projection.kernel(), n);
    }
  }
}

TEST(Abelianization, Heisenberg) {
  auto ab = abelianization(heisenberg_group(3));
  EXPECT_EQ(ab.group.factors(), (Vec{3, 3}));
}

TEST(Abelianization, CyclicIsItself) {
  auto g  = cyclic_group(4);
  auto ab = abelianization(g);
  EXPECT_EQ(ab.group.factors(), (Vec{4}));
  EXPECT_EQ(ab.commutator.order(), 1U);
}

TEST(Abelianization, D4) {
  auto ab = abelianization(dihedral_group(4));
  EXPECT_EQ(ab.group.factors(), (Vec{2, 2}));
}

TEST(Abelianization, KillsCommutators) {
  for (auto const& g : small_groups()) {
    auto ab = abelianization(g);
    EXPECT_EQ(ab.group.order() * Int(ab.commutator.order()), Int(g.order()));
    for (std::size_t a = 0; a < g.order(); ++a) {
      for (std::size_t b = 0; b < g.order(); b += 2) {
        EXPECT_EQ(ab(g.commutator(Elt(a), Elt(b))), ab.group.zero());
      }
    }
  }
}

TEST(Tables, EverySingleEntryCorruptionIsRejected) {
  for (auto const& g : {cyclic_group(3), dihedral_group(3), quaternion_group()}) {
    auto const t = g.table();
    for (std::size_t a = 0; a < t.size(); ++a) {
      for (std::size_t b = 0; b < t.size(); ++b) {
        for (std::size_t v = 0; v < t.size(); ++v) {
          if (Elt(v) == t[a][b]) {
            continue;
          }
          auto bad = t;
          bad[a][b] = Elt(v);
          EXPECT_THROW(FiniteGroup::from_table(bad), ValidationError);
        }
      }
    }
    EXPECT_EQ(FiniteGroup::from_table(t), g);
  }
}

TEST(Homomorphisms, FromGeneratorImages) {
  auto c4  = cyclic_group(4);
  auto c2  = cyclic_group(2);
  auto phi = GroupHom::from_generator_images(c4, c2, {{1, 1}});
  EXPECT_TRUE(phi.is_surjective());
  EXPECT_FALSE(phi.is_injective());
  EXPECT_EQ(phi.kernel().order(), 2U);
  EXPECT_THROW(GroupHom(c2, c4, {0, 1}), ValidationError);
  auto id = GroupHom::identity(c4);
  EXPECT_EQ(phi.after(id).images(), phi.images());
}
