#include <random>

#include <gtest/gtest.h>

#include "corfree/checks.hpp"
#include "corfree/corpus.hpp"
#include "corfree/freeprod.hpp"

using namespace corfree;

namespace {

  FiniteAbelianGroup ab(Vec f) {
    return FiniteAbelianGroup::from_cyclic_orders(f);
  }

  GModule negation(FiniteGroup const& c2, Int n) {
    return GModule::from_generators(c2, ab({n}), {{1, {{n - 1}}}});
  }

  // C2 * C2 acting on Z/3 by negation on both factors.
  std::pair<FamilySpec, FamilyModule> neg_pair() {
    auto         c2 = cyclic_group(2);
    FamilySpec   s({{"a", Fiber::bare(c2)}, {"b", Fiber::bare(c2)}}, std::nullopt, {2, 3});
    FamilyModule m{ab({3}), {{"a", negation(c2, 3)}, {"b", negation(c2, 3)}}};
    return {s, m};
  }

}  // namespace

TEST(Oracle, FrozenValues) {
  auto c3 = cyclic_group(3);
  FamilySpec s({{"a", Fiber::bare(c3)}, {"b", Fiber::bare(c3)}}, std::nullopt, {3});
  EXPECT_EQ(oracle_h1(truncate(s, 0), FamilyModule::trivial(ab({3}))).value(), ab({3, 3}));

  auto [ns, nm] = neg_pair();
  auto o        = oracle_h1(truncate(ns, 0), nm);
  EXPECT_EQ(o.value(), ab({3}));
  EXPECT_EQ(o.z1_order(), 9);
  EXPECT_EQ(o.b1_order(), 3);
}

TEST(Oracle, SingleFactorIsOrdinaryCohomology) {
  for (auto const& inst : generate_corpus(12, 30)) {
    auto const& [name, f] = inst.spec.exceptional().front();
    FamilySpec one({{name, f}}, std::nullopt, inst.spec.prime_set());
    auto       gm = inst.module.at(name, f.group);
    EXPECT_EQ(oracle_h1(truncate(one, 0), inst.module).value(), cohomology(gm, 1).value());
  }
}

TEST(FourTerm, TermsOfTheNegationExample) {
  auto [s, m] = neg_pair();
  auto seq    = four_term_sequence(truncate(s, 0), m);
  // A/A^G = Z/3, sum A/A^{G_t} = (Z/3)^2, H^1(G,A) = Z/3, sum H^1(G_t,A) = 0
  EXPECT_EQ(seq.terms[0], ab({3}));
  EXPECT_EQ(seq.terms[1], ab({3, 3}));
  EXPECT_EQ(seq.terms[2], ab({3}));
  EXPECT_TRUE(seq.terms[3].is_trivial());
  auto r = check_exactness(seq);
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(FourTerm, TrivialActionSplits) {
  auto       c4 = cyclic_group(4);
  auto       c2 = cyclic_group(2);
  FamilySpec s({{"a", Fiber::bare(c4)}, {"b", Fiber::bare(c2)}}, std::nullopt, {2});
  auto       seq = four_term_sequence(truncate(s, 0), FamilyModule::trivial(ab({2})));
  EXPECT_TRUE(seq.terms[0].is_trivial());
  EXPECT_TRUE(seq.terms[1].is_trivial());
  EXPECT_EQ(seq.terms[2], seq.terms[3]);
  EXPECT_EQ(seq.terms[3], ab({2, 2}));
  EXPECT_TRUE(check_exactness(seq).passed);
}

TEST(FourTerm, SingleFactorCollapses) {
  auto       c4 = cyclic_group(4);
  FamilySpec s({{"a", Fiber::bare(c4)}}, std::nullopt, {2});
  auto       seq = four_term_sequence(truncate(s, 0), FamilyModule::trivial(ab({2})));
  EXPECT_EQ(seq.terms[2], ab({2}));
  EXPECT_TRUE(is_isomorphism(seq.maps[2]));
  EXPECT_TRUE(check_exactness(seq).passed);
}

TEST(FourTerm, ZeroSequenceIsExact) {
  FamilySpec s({{"a", Fiber::bare(trivial_group())}}, std::nullopt, {2});
  auto       seq = four_term_sequence(truncate(s, 0), FamilyModule::trivial(ab({2})));
  for (auto const& t : seq.terms) {
    EXPECT_TRUE(t.is_trivial());
  }
  EXPECT_TRUE(check_exactness(seq).passed);
}

TEST(FourTerm, CorpusIsExactWithBookkeeping) {
  for (auto const& inst : generate_corpus(0, 30)) {
    auto r = checks::exactness_record(inst);
    EXPECT_TRUE(r.pass) << r.to_json().dump();
  }
}

TEST(FourTerm, MutationsAreDetected) {
  std::mt19937_64 rng(13);
  std::size_t     tried = 0;
  for (auto const& inst : generate_corpus(1, 30)) {
    auto seq = four_term_sequence(truncate(inst.spec, inst.level), inst.module);
    auto out = checks::mutate_map(seq, rng);
    if (!out) {
      continue;
    }
    ++tried;
    EXPECT_TRUE(out->detected) << inst.name << ": " << out->what;
  }
  EXPECT_GT(tried, 10U);
}

TEST(HFormula, TailExamples) {
  auto       c3 = cyclic_group(3);
  FamilySpec s({}, Fiber::full(c3), {3});
  auto       h = h_formula(s, FamilyModule::trivial(ab({3})), 1);
  ASSERT_TRUE(h.family.tail().has_value());
  EXPECT_EQ(h.family.tail()->group(), ab({3}));
  EXPECT_TRUE(h.family.tail()->sub().is_trivial());
  EXPECT_TRUE(h.direct_sum);
  EXPECT_FALSE(h.finite);
  EXPECT_NE(h.summary.find("direct sum over T0"), std::string::npos);

  auto       v4 = direct_product(cyclic_group(2), cyclic_group(2));
  FamilySpec k({}, Fiber(v4, generated_subgroup(v4, {v4.generators().front()})), {2});
  auto       hk = h_formula(k, FamilyModule::trivial(ab({2})), 1);
  EXPECT_EQ(hk.family.tail()->group(), ab({2, 2}));
  EXPECT_EQ(hk.family.tail()->sub(), ab({2}));
  EXPECT_FALSE(hk.direct_sum);

  auto empty = h_formula(FamilySpec({}, std::nullopt, {2}), FamilyModule::trivial(ab({2})), 2);
  EXPECT_TRUE(empty.family.finite_sum().is_trivial());
  EXPECT_THROW(h_formula(s, FamilyModule::trivial(ab({3})), 3), PreconditionError);
}

TEST(HighDegree, Examples) {
  auto       c2 = cyclic_group(2);
  FamilySpec s({}, Fiber::full(c2), {2});
  auto       h = high_degree_formula(s, FamilyModule::trivial(ab({2})), 3);
  ASSERT_TRUE(h.tail_summand.has_value());
  EXPECT_EQ(*h.tail_summand, ab({2}));

  FamilySpec two({{"a", Fiber::full(c2)}, {"b", Fiber::full(c2)}}, std::nullopt, {2, 3});
  auto       z = high_degree_formula(two, FamilyModule::trivial(ab({3})), 3);
  EXPECT_TRUE(z.finite_part.is_trivial());
  auto y = high_degree_formula(two, FamilyModule::trivial(ab({2})), 3);
  EXPECT_EQ(y.finite_part, ab({2, 2}));

  auto       c4 = cyclic_group(4);
  FamilySpec bad({{"a", Fiber(c4, generated_subgroup(c4, {2}))}}, std::nullopt, {2});
  EXPECT_THROW(high_degree_formula(bad, FamilyModule::trivial(ab({2})), 3), PreconditionError);
}

TEST(AbelianizationFormula, Examples) {
  auto       c4 = cyclic_group(4);
  auto       c2 = cyclic_group(2);
  FamilySpec s({{"a", Fiber(c4, generated_subgroup(c4, {2}))}}, Fiber::full(c2), {2});
  auto       f = abelianization_formula(s);
  EXPECT_EQ(f.flavor(), Flavor::compactified);
  EXPECT_EQ(f.at("a").group(), ab({4}));
  EXPECT_EQ(f.at("a").sub(), ab({2}));
  EXPECT_EQ(f.tail()->group(), ab({2}));
  EXPECT_EQ(f.tail()->sub(), ab({2}));

  FamilySpec fin({{"a", Fiber::bare(c4)}, {"b", Fiber::bare(c2)}}, std::nullopt, {2});
  EXPECT_EQ(abelianization_formula(fin).finite_sum(), ab({2, 4}));
  FamilySpec triv({{"a", Fiber::bare(trivial_group())}}, std::nullopt, {2});
  EXPECT_TRUE(abelianization_formula(triv).finite_sum().is_trivial());
}

TEST(Duality, FamilyExamplesAndInvolution) {
  auto z4   = ab({4});
  auto pair = AbPair(z4, {{2}});
  auto d    = pair.dual();
  EXPECT_EQ(d.group(), z4);
  EXPECT_EQ(d.sub(), ab({2}));

  RestrictedAbFamily whole({{"a", AbPair::whole(ab({2, 4}))}}, AbPair::whole(ab({3})), Flavor::compactified);
  auto               dw = dualize_family(whole);
  EXPECT_EQ(dw.flavor(), Flavor::discretized);
  EXPECT_TRUE(dw.at("a").sub().is_trivial());
  EXPECT_TRUE(dw.tail()->sub().is_trivial());
  EXPECT_EQ(dualize_family(dw), whole);

  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    auto p = checks::random_pair(rng);
    auto r = checks::duality_record(p, std::to_string(k));
    EXPECT_TRUE(r.pass) << r.to_json().dump();
    EXPECT_EQ(p.sub().order() * p.dual().sub().order(), p.group().order());
  }
}

TEST(CrossCheck, Examples) {
  auto       c4 = cyclic_group(4);
  FamilySpec s({{"a", Fiber(c4, generated_subgroup(c4, {2}))}}, std::nullopt, {2});
  auto       r = cross_check_h1_vs_ab(s, 2);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.fibers[0].h1, ab({2}));
  EXPECT_EQ(r.fibers[0].nr, ab({2}));

  auto       h = heisenberg_group(3);
  FamilySpec hs({{"h", Fiber(h, commutator_subgroup(h))}, {"e", Fiber::bare(trivial_group())}}, std::nullopt, {3});
  auto       hr = cross_check_h1_vs_ab(hs, 3);
  EXPECT_TRUE(hr.passed);
  EXPECT_EQ(hr.fibers[0].h1, ab({3, 3}));
  EXPECT_EQ(hr.fibers[0].nr, ab({3, 3}));
  EXPECT_TRUE(hr.fibers[1].h1.is_trivial());
}

TEST(CrossCheck, Corpus) {
  for (auto const& inst : generate_corpus(2, 30)) {
    for (Int p : inst.spec.prime_set()) {
      EXPECT_TRUE(cross_check_h1_vs_ab(inst.spec, p).passed) << inst.name << " p=" << p;
    }
  }
}

TEST(NormalClosureInvariance, Corpus) {
  for (auto const& inst : generate_corpus(5, 20)) {
    auto r = checks::normal_closure_record(inst.name, inst.spec, inst.module, inst.level, checks::digest(inst, "nc"));
    EXPECT_TRUE(r.pass) << r.to_json().dump();
  }
}

TEST(Colimit, TailOfC3) {
  auto       c3 = cyclic_group(3);
  FamilySpec s({}, Fiber::full(c3), {3});
  auto       sys = truncation_colimit(s, FamilyModule::trivial(ab({3})), 1, 4);
  EXPECT_TRUE(sys.passed);
  ASSERT_EQ(sys.levels.size(), 5U);
  for (std::size_t n = 0; n < sys.levels.size(); ++n) {
    EXPECT_EQ(sys.levels[n].rank(), n);
  }
  for (bool b : sys.injective) {
    EXPECT_TRUE(b);
  }
}

TEST(Colimit, DegreeTwoAndConstant) {
  auto       c2 = cyclic_group(2);
  FamilySpec s({}, Fiber::full(c2), {2});
  auto       sys = truncation_colimit(s, FamilyModule::trivial(ab({2})), 2, 3);
  EXPECT_TRUE(sys.passed);
  EXPECT_EQ(sys.levels.back(), ab({2, 2, 2}));

  FamilySpec fin({{"a", Fiber::bare(c2)}}, std::nullopt, {2});
  auto       flat = truncation_colimit(fin, FamilyModule::trivial(ab({2})), 1, 3);
  EXPECT_TRUE(flat.passed);
  for (auto const& l : flat.levels) {
    EXPECT_EQ(l, ab({2}));
  }
}

TEST(Colimit, Preconditions) {
  auto       c4 = cyclic_group(4);
  FamilySpec s({}, Fiber(c4, generated_subgroup(c4, {2})), {2});
  EXPECT_THROW(truncation_colimit(s, FamilyModule::trivial(ab({2})), 1, 2), PreconditionError);
  auto         c2 = cyclic_group(2);
  FamilySpec   t({}, Fiber::full(c2), {2, 3});
  FamilyModule m{ab({3}), {{"tail", negation(c2, 3)}}};
  EXPECT_THROW(truncation_colimit(t, m, 1, 2), ValidationError);
}

TEST(Colimit, CorpusTails) {
  for (auto const& inst : generate_corpus(7, 30)) {
    if (inst.spec.tail()) {
      auto sys = truncation_colimit(inst.spec, inst.module, 1, 3);
      EXPECT_TRUE(sys.passed) << inst.name;
    }
  }
}

TEST(Splitting, Examples) {
  auto       c4 = cyclic_group(4);
  auto       c2 = cyclic_group(2);
  FamilySpec s({{"a", Fiber::bare(c4)}, {"b", Fiber::bare(c2)}, {"c", Fiber::bare(c2)}}, std::nullopt, {2});
  auto       m = FamilyModule::trivial(ab({2}));
  auto       r = splitting_check(truncate(s, 0), {"a"}, m);
  EXPECT_TRUE(r.passed) << r.detail;
  EXPECT_EQ(r.sub_h1, ab({2}));
  EXPECT_EQ(r.full_h1, ab({2, 2, 2}));
  auto all = splitting_check(truncate(s, 0), {"a", "b", "c"}, m);
  EXPECT_TRUE(all.passed);
  EXPECT_EQ(all.sub_h1, all.full_h1);
  auto none = splitting_check(truncate(s, 0), {}, m);
  EXPECT_TRUE(none.passed);
  EXPECT_TRUE(none.sub_h1.is_trivial());
}

TEST(Corestriction, Examples) {
  auto       c4 = cyclic_group(4);
  FamilySpec big({{"a", Fiber::full(c4)}}, std::nullopt, {2});
  FamilySpec mid({{"a", Fiber(c4, generated_subgroup(c4, {2}))}}, std::nullopt, {2});
  FamilySpec small({{"a", Fiber::bare(c4)}}, std::nullopt, {2});
  auto       r = corestriction_compare(big, mid);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.fibers[0].ann_small, 2);
  EXPECT_EQ(r.fibers[0].ann_large, 1);
  EXPECT_TRUE(corestriction_compare(big, small).passed);
  auto same = corestriction_compare(mid, mid);
  EXPECT_TRUE(same.passed && same.fibers[0].equal);
  EXPECT_THROW(corestriction_compare(mid, big), ValidationError);
}
