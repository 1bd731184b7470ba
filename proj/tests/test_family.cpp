#include <random>

#include <gtest/gtest.h>

#include "corfree/checks.hpp"
#include "corfree/corpus.hpp"
#include "corfree/family.hpp"

using namespace corfree;

namespace {

  Subgroup reflection(FiniteGroup const& d4) {
    for (std::size_t x = 0; x < d4.order(); ++x) {
      auto s = generated_subgroup(d4, {Elt(x)});
      if (s.order() == 2 && !s.is_normal()) {
        return s;
      }
    }
    return trivial_subgroup(d4);
  }

  FiniteAbelianGroup ab(Vec f) {
    return FiniteAbelianGroup::from_cyclic_orders(f);
  }

}  // namespace

TEST(Validate, NormalSubgroupOfC4) {
  auto       c4 = cyclic_group(4);
  FamilySpec s({{"a", Fiber(c4, generated_subgroup(c4, {2}))}}, std::nullopt, {2});
  auto       r = validate_family(s);
  ASSERT_EQ(r.fibers.size(), 1U);
  EXPECT_TRUE(r.fibers[0].u_normal);
  EXPECT_EQ(r.fibers[0].closure_order, 2U);
}

TEST(Validate, ReflectionInD4) {
  auto       d4 = dihedral_group(4);
  FamilySpec s({{"a", Fiber(d4, reflection(d4))}}, std::nullopt, {2});
  auto       r = validate_family(s);
  EXPECT_FALSE(r.fibers[0].u_normal);
  EXPECT_EQ(r.fibers[0].closure_order, 4U);
}

TEST(Validate, PrimeSetMustCoverOrders) {
  auto       s3 = dihedral_group(3);
  FamilySpec s({{"a", Fiber::full(s3)}}, std::nullopt, {2});
  EXPECT_THROW(validate_family(s), ValidationError);
  FamilySpec dup({{"a", Fiber::full(s3)}, {"a", Fiber::full(s3)}}, std::nullopt, {2, 3});
  EXPECT_THROW(validate_family(dup), ValidationError);
}

TEST(NormalClosureFamily, Examples) {
  auto       d4 = dihedral_group(4);
  auto       c2 = cyclic_group(2);
  FamilySpec s({{"a", Fiber(d4, reflection(d4))}}, Fiber(direct_product(c2, c2), trivial_subgroup(direct_product(c2, c2))),
               {2});
  auto n = normal_closure_family(s);
  EXPECT_EQ(n.at("a").u.order(), 4U);
  EXPECT_EQ(n.tail(), s.tail());
  EXPECT_EQ(normal_closure_family(n), n);
}

TEST(NormalClosureFamily, IdempotentAndAbelianizationInvariant) {
  for (auto const& inst : generate_corpus(3, 25)) {
    auto n = normal_closure_family(inst.spec);
    EXPECT_EQ(normal_closure_family(n), n);
    EXPECT_EQ(abelianize_family(n), abelianize_family(inst.spec));
  }
}

TEST(Abelianize, Examples) {
  auto       c4 = cyclic_group(4);
  auto       c2 = cyclic_group(2);
  FamilySpec s({{"a", Fiber(c4, generated_subgroup(c4, {2}))}, {"b", Fiber::full(c2)}}, std::nullopt, {2});
  auto       f = abelianize_family(s);
  EXPECT_EQ(f.flavor(), Flavor::compactified);
  EXPECT_EQ(f.at("a").group(), ab({4}));
  EXPECT_EQ(f.at("a").sub(), ab({2}));
  EXPECT_EQ(f.at("b").group(), ab({2}));
  EXPECT_EQ(f.at("b").sub(), ab({2}));

  auto h = heisenberg_group(3);
  auto z = commutator_subgroup(h);
  FamilySpec hs({{"h", Fiber(h, z)}}, std::nullopt, {3});
  auto       hf = abelianize_family(hs);
  EXPECT_EQ(hf.at("h").group(), ab({3, 3}));
  EXPECT_TRUE(hf.at("h").sub().is_trivial());

  EXPECT_TRUE(abelianize_family(FamilySpec({}, std::nullopt, {2})).finite_sum().is_trivial());
}

TEST(Quotient, Examples) {
  auto       d4 = dihedral_group(4);
  FamilySpec s({{"a", Fiber(d4, reflection(d4))}}, std::nullopt, {2});
  auto       z = quotient_family(s, {{"a", commutator_subgroup(d4)}});
  EXPECT_EQ(z.at("a").group.order(), 4U);
  auto id = quotient_family(s, {{"a", trivial_subgroup(d4)}});
  EXPECT_EQ(id.at("a").group.order(), 8U);
  EXPECT_EQ(id.at("a").u.order(), 2U);
  auto nr = unramified_quotient(s);
  EXPECT_EQ(nr.at("a").group.order(), 2U);
  EXPECT_EQ(nr.at("a").u.order(), 1U);
  EXPECT_THROW(quotient_family(s, {{"a", reflection(d4)}}), NormalityError);
}

TEST(Morphisms, IdentityHasEveryProperty) {
  for (auto const& inst : generate_corpus(4, 20)) {
    auto p = morphism_predicates(FamilyMorphism::identity(inst.spec));
    EXPECT_TRUE(p.all()) << inst.name;
    EXPECT_TRUE(p.fibrewise_injective);
  }
}

TEST(Morphisms, HandCases) {
  for (auto const& h : checks::hand_morphisms()) {
    auto p = morphism_predicates(h.morphism);
    auto expects = [&](char const* name) {
      return std::find(h.expected_failures.begin(), h.expected_failures.end(), name)
             == h.expected_failures.end();
    };
    EXPECT_EQ(p.strict, expects("strict")) << h.name;
    EXPECT_EQ(p.fibrewise_surjective, expects("fibrewise_surjective")) << h.name;
    EXPECT_EQ(p.index_map_open, expects("index_map_open")) << h.name;
    EXPECT_EQ(p.star_unique_preimage, expects("star_unique_preimage")) << h.name;
  }
}

TEST(Morphisms, RejectMalformedData) {
  auto       c2 = cyclic_group(2);
  auto       c4 = cyclic_group(4);
  FamilySpec a({{"a", Fiber::full(c4)}}, std::nullopt, {2});
  FamilySpec b({{"a", Fiber::bare(c2)}}, std::nullopt, {2});
  // U = C4 does not land in U = 1
  EXPECT_THROW(FamilyMorphism(a, b, {{"a", "a"}}, {{"a", GroupHom(c4, c2, {0, 1, 0, 1})}}), ValidationError);
  EXPECT_THROW(FamilyMorphism(a, b, {{"a", "x"}}, {}), ValidationError);
  EXPECT_THROW(FamilyMorphism(a, b, {}, {}), ValidationError);
}

TEST(Towers, ConstantAndTwoLevel) {
  auto       c4 = cyclic_group(4);
  auto       c2 = cyclic_group(2);
  FamilySpec s({{"a", Fiber(c4, generated_subgroup(c4, {2}))}}, Fiber::full(c2), {2});
  Tower      constant{{s, s, s}, {FamilyMorphism::identity(s), FamilyMorphism::identity(s)}};
  EXPECT_TRUE(check_tower(constant).passed);

  FamilySpec top({{"a", Fiber::full(c4)}}, Fiber::full(c2), {2});
  FamilySpec bottom({{"a", Fiber::full(c2)}}, Fiber::full(c2), {2});
  auto       q = GroupHom(c4, c2, {0, 1, 0, 1});
  Tower      two{{bottom, top},
                 {FamilyMorphism(top, bottom, {{"a", "a"}, {"tail", "tail"}},
                                 {{"a", q}, {"tail", GroupHom::identity(c2)}})}};
  EXPECT_TRUE(check_tower(two).passed);
}

TEST(Towers, NonSurjectiveTransitionFails) {
  auto       c4 = cyclic_group(4);
  auto       c2 = cyclic_group(2);
  FamilySpec top({{"a", Fiber::full(c2)}}, std::nullopt, {2});
  FamilySpec bottom({{"a", Fiber::full(c4)}}, std::nullopt, {2});
  Tower      t{{bottom, top}, {FamilyMorphism(top, bottom, {{"a", "a"}}, {{"a", GroupHom(c2, c4, {0, 2})}})}};
  auto       cert = check_tower(t);
  EXPECT_FALSE(cert.passed);
  ASSERT_EQ(cert.steps.size(), 1U);
  ASSERT_FALSE(cert.steps[0].failures.empty());
  EXPECT_NE(cert.steps[0].failures[0].find("a"), std::string::npos);
}

TEST(Truncation, Examples) {
  auto       c4 = cyclic_group(4);
  auto       c3 = cyclic_group(3);
  FamilySpec none({{"a", Fiber::full(c4)}}, std::nullopt, {2});
  EXPECT_EQ(truncate(none, 5).indices.size(), 1U);
  EXPECT_TRUE(truncate(none, 5).beyond_trivial());

  FamilySpec full({}, Fiber::full(c3), {3});
  auto       t = truncate(full, 2);
  EXPECT_EQ(t.indices.size(), 2U);
  EXPECT_EQ(t.indices[1].first, "tau2");
  EXPECT_TRUE(t.beyond_trivial());

  FamilySpec half({}, Fiber(c4, generated_subgroup(c4, {2})), {2});
  auto       h = truncate(half, 1);
  EXPECT_EQ(h.indices.size(), 1U);
  ASSERT_TRUE(h.beyond.has_value());
  EXPECT_EQ(h.beyond->order(), 2U);
}

TEST(Truncation, EmbeddingIsStrictAndInjective) {
  for (auto const& inst : generate_corpus(6, 20)) {
    if (!inst.spec.tail()) {
      continue;
    }
    for (std::size_t n = 0; n < 3; ++n) {
      auto p = morphism_predicates(truncation_embedding(inst.spec, n));
      EXPECT_TRUE(p.strict && p.fibrewise_injective) << inst.name;
    }
  }
}
