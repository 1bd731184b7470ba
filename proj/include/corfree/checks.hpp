#ifndef CORFREE_CHECKS_HPP_
#define CORFREE_CHECKS_HPP_

// Named checks shared by the command line tool and the acceptance runner.
// Each produces report records; nothing here depends on wall-clock time.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ab.hpp"
#include "coh.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "family.hpp"
#include "freeprod.hpp"
#include "grp.hpp"
#include "io.hpp"
#include "report.hpp"
#include "restricted.hpp"
#include "topo.hpp"

namespace corfree::checks {

  inline std::string digest(FamilySpec const& spec, FamilyModule const* m, std::string const& extra) {
    io::Json j{{"family", io::family_json(spec)}, {"extra", extra}};
    if (m != nullptr) {
      j["module"] = io::module_json(*m);
    }
    return sha256_hex(j.dump());
  }

  inline std::string digest(CorpusInstance const& inst, std::string const& extra) {
    return digest(inst.spec, &inst.module, extra + "/level=" + std::to_string(inst.level));
  }

  ////////////////////////////////////////////////////////////////////////
  // Four-term sequence
  ////////////////////////////////////////////////////////////////////////

  inline Record exactness_record(std::string const& name, FamilySpec const& spec, FamilyModule const& m,
                                 std::size_t level, std::string const& dig) {
    Record r;
    r.check        = "exact-check " + name;
    r.input_digest = dig;
    auto tr        = truncate(spec, level);
    auto seq       = four_term_sequence(tr, m);
    auto rep       = check_exactness(seq);
    r.pass         = rep.passed && cardinality_bookkeeping(seq);
    for (std::size_t k = 0; k < 4; ++k) {
      r.invariant_factors.push_back(seq.terms[k].factors());
    }
    r.witnesses.push_back("H1(G,A) = " + seq.terms[2].to_string() + "  |Z1| = "
                          + std::to_string(seq.z1_order) + "  |B1| = " + std::to_string(seq.b1_order));
    if (!rep.passed) {
      r.witnesses.push_back("position " + rep.position + ": " + rep.detail);
    }
    return r;
  }

  inline Record exactness_record(CorpusInstance const& inst) {
    return exactness_record(inst.name, inst.spec, inst.module, inst.level, digest(inst, "exact"));
  }

  ////////////////////////////////////////////////////////////////////////
  // Abelianization and cohomology formulas
  ////////////////////////////////////////////////////////////////////////

  inline Record cross_check_record(std::string const& name, FamilySpec const& spec,
                                   std::string const& dig) {
    Record r;
    r.check        = "cross-check " + name;
    r.input_digest = dig;
    for (Int p : spec.prime_set()) {
      auto rep = cross_check_h1_vs_ab(spec, p);
      r.pass   = r.pass && rep.passed;
      for (auto const& f : rep.fibers) {
        if (!f.iso || !f.nr_iso) {
          r.witnesses.push_back("p=" + std::to_string(p) + " fiber " + f.name + ": H1 "
                                + f.h1.to_string() + " vs dual " + f.ab_dual.to_string() + ", nr "
                                + f.nr.to_string() + " vs " + f.nr_dual.to_string());
        }
      }
    }
    return r;
  }

  // Every formula output agrees for (G_t, U_t) and (G_t, U~_t).
  inline Record normal_closure_record(std::string const& name, FamilySpec const& spec,
                                      FamilyModule const& m, std::size_t level, std::string const& dig) {
    Record r;
    r.check        = "normal-closure " + name;
    r.input_digest = dig;
    auto closed    = normal_closure_family(spec);
    auto note      = [&](bool ok, std::string what) {
      if (!ok) {
        r.pass = false;
        r.witnesses.push_back(std::move(what));
      }
    };
    for (int deg : {1, 2}) {
      auto a = h_formula(spec, m, deg);
      auto b = h_formula(closed, m, deg);
      note(a.family == b.family && a.summary == b.summary,
           "h_formula degree " + std::to_string(deg) + " differs");
    }
    note(abelianization_formula(spec) == abelianization_formula(closed), "abelianization differs");
    auto ta = truncate(spec, level);
    auto tb = truncate(closed, level);
    note(ta.beyond == tb.beyond, "truncation quotient differs");
    if (ta.beyond_trivial()) {
      auto sa = four_term_sequence(ta, m);
      auto sb = four_term_sequence(tb, m);
      note(sa.terms == sb.terms, "four-term groups differ");
    }
    for (Int p : spec.prime_set()) {
      auto ca = cross_check_h1_vs_ab(spec, p);
      auto cb = cross_check_h1_vs_ab(closed, p);
      for (std::size_t k = 0; k < ca.fibers.size(); ++k) {
        note(ca.fibers[k].nr == cb.fibers[k].nr && ca.fibers[k].nr_dual == cb.fibers[k].nr_dual,
             "nr part differs at " + ca.fibers[k].name);
      }
    }
    bool all_closed = true;
    for (auto const& [n, f] : spec.fibers()) {
      all_closed = all_closed && normal_closure(f.group, f.u).order() == f.group.order();
    }
    if (all_closed) {
      note(high_degree_formula(spec, m, 3).summary == high_degree_formula(closed, m, 3).summary,
           "degree 3 formula differs");
    }
    return r;
  }

  inline Record colimit_record(std::string const& name, FamilySpec const& spec, FamilyModule const& m,
                               int degree, std::size_t n_max, std::string const& dig) {
    Record r;
    r.check        = "colimit " + name + " degree " + std::to_string(degree);
    r.input_digest = dig;
    auto sys       = truncation_colimit(spec, m, degree, n_max);
    r.pass         = sys.passed;
    for (auto const& l : sys.levels) {
      r.invariant_factors.push_back(l.factors());
    }
    r.witnesses.push_back("tail growth " + std::to_string(sys.tail_growth));
    for (auto const& f : sys.failures) {
      r.witnesses.push_back(f);
    }
    return r;
  }

  inline Record dimension_shift_record(std::string const& name, GModule const& m, std::string const& dig) {
    Record r;
    r.check        = "dimension-shift " + name;
    r.input_digest = dig;
    auto rep       = dimension_shift_check(m);
    auto co        = coinduced_module(m);
    auto h1co      = cohomology(co.coind, 1).value();
    r.pass         = rep.passed && h1co.is_trivial();
    r.invariant_factors = {rep.h1_shifted.factors(), rep.h2.factors()};
    r.witnesses.push_back("H1(G,A') = " + rep.h1_shifted.to_string() + ", H2(G,A) = " + rep.h2.to_string()
                          + ", H1(G,Coind A) = " + h1co.to_string());
    if (!rep.passed) {
      r.witnesses.push_back(rep.detail);
    }
    return r;
  }

  ////////////////////////////////////////////////////////////////////////
  // Duality
  ////////////////////////////////////////////////////////////////////////

  inline FiniteAbelianGroup random_ab(std::mt19937_64& rng) {
    static Vec const orders = {2, 3, 4, 5, 6, 8, 9, 12};
    std::size_t      rank   = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    Vec              f;
    for (std::size_t i = 0; i < rank; ++i) {
      f.push_back(orders[std::uniform_int_distribution<std::size_t>(0, orders.size() - 1)(rng)]);
    }
    return FiniteAbelianGroup::from_cyclic_orders(f);
  }

  inline AbPair random_pair(std::mt19937_64& rng) {
    auto             a = random_ab(rng);
    std::size_t      k = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
    std::vector<Vec> gens;
    for (std::size_t j = 0; j < k; ++j) {
      Vec v;
      for (Int d : a.factors()) {
        v.push_back(std::uniform_int_distribution<Int>(0, d - 1)(rng));
      }
      gens.push_back(std::move(v));
    }
    return AbPair(a, std::move(gens));
  }

  inline Record duality_record(AbPair const& p, std::string const& name) {
    Record r;
    r.check        = "duality " + name;
    r.input_digest = sha256_hex(p.to_string() + io::Json(p.generators()).dump());
    auto d         = p.dual();
    bool law       = checked_mul(p.sub().order(), d.sub().order()) == p.group().order();
    bool inv       = d.dual() == p;
    bool cert      = p.parts().certified;
    r.pass         = law && inv && cert;
    r.invariant_factors = {p.sub().factors(), d.sub().factors()};
    if (!law) {
      r.witnesses.push_back("|B| |ann B| != |A| for " + p.to_string());
    }
    if (!inv) {
      r.witnesses.push_back("ann(ann B) != B for " + p.to_string());
    }
    if (!cert) {
      r.witnesses.push_back("pairing on A/B x ann B not certified");
    }
    return r;
  }

  inline Record family_duality_record(RestrictedAbFamily const& f, std::string const& name) {
    Record r;
    r.check        = "family-duality " + name;
    r.input_digest = sha256_hex(name + to_string(f.flavor()));
    auto d         = dualize_family(f);
    bool inv       = dualize_family(d) == f;
    bool flip      = d.flavor() == dual_flavor(f.flavor())
                && (f.flavor() == Flavor::plain || d.flavor() != f.flavor());
    r.pass = inv && flip;
    r.witnesses.push_back(to_string(f.flavor()) + " -> " + to_string(d.flavor()));
    return r;
  }

  ////////////////////////////////////////////////////////////////////////
  // Mutations
  ////////////////////////////////////////////////////////////////////////

  struct MutationOutcome {
    bool        detected = false;
    std::string how;  // "exactness", "well-definedness", "canonical maps" or "validation"
    std::string what;
  };

  // Adds a nonzero amount to one entry of one map.  Returns nullopt when the
  // sequence has no map with a nonzero target entry to corrupt.
  inline std::optional<MutationOutcome> mutate_map(FourTermSequence seq, std::mt19937_64& rng) {
    std::vector<std::pair<std::size_t, std::pair<std::size_t, std::size_t>>> slots;
    for (std::size_t k = 0; k < 3; ++k) {
      auto const& f = seq.maps[k];
      for (std::size_t i = 0; i < f.target().rank(); ++i) {
        if (f.target().factors()[i] < 2) {
          continue;
        }
        for (std::size_t j = 0; j < f.source().rank(); ++j) {
          slots.push_back({k, {i, j}});
        }
      }
    }
    if (slots.empty()) {
      return std::nullopt;
    }
    auto [k, ij] = slots[std::uniform_int_distribution<std::size_t>(0, slots.size() - 1)(rng)];
    auto [i, j]  = ij;
    auto const& f = seq.maps[k];
    Matrix      m = f.matrix();
    Int         d = f.target().factors()[i];
    m[i][j] += std::uniform_int_distribution<Int>(1, d - 1)(rng);
    seq.maps[k] = AbHom(f.source(), f.target(), m, AbHom::unchecked);

    MutationOutcome out;
    out.what = "d" + std::to_string(k) + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
    auto rep = check_exactness(seq);
    out.detected = !rep.passed;
    if (!rep.well_defined) {
      out.how = "well-definedness";
    } else if (!rep.exact) {
      out.how = "exactness";
    } else if (rep.canonical && !*rep.canonical) {
      out.how = "canonical maps";
    }
    return out;
  }

  inline MutationOutcome mutate_table(FiniteGroup const& g, std::mt19937_64& rng) {
    auto              table = g.table();
    std::size_t const n     = table.size();
    auto              pick  = [&](std::size_t m) {
      return std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
    };
    std::size_t a = pick(n);
    std::size_t b = pick(n);
    Elt         v = Elt((std::size_t(table[a][b]) + 1 + pick(n - 1)) % n);
    table[a][b]   = v;
    MutationOutcome out;
    out.what = g.label() + " table[" + std::to_string(a) + "][" + std::to_string(b) + "]";
    try {
      FiniteGroup::from_table(table);
    } catch (ValidationError const&) {
      out.detected = true;
      out.how      = "validation";
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Topology
  ////////////////////////////////////////////////////////////////////////

  inline ElementSet random_subset(FiniteGroup const& g, std::mt19937_64& rng) {
    ElementSet out;
    for (std::size_t x = 0; x < g.order(); ++x) {
      if (std::bernoulli_distribution(0.5)(rng)) {
        out.push_back(Elt(x));
      }
    }
    return out;
  }

  // Random subset of the total space, biased so that about half of the
  // parts contain U.
  inline OpenSetSpec random_open_candidate(FamilySpec const& fam, std::mt19937_64& rng,
                                           std::size_t max_exceptions = 3) {
    auto biased = [&](Fiber const& f) {
      auto s = random_subset(f.group, rng);
      if (std::bernoulli_distribution(0.5)(rng)) {
        s = set_union(s, f.u.elements());
      }
      return s;
    };
    std::map<std::string, ElementSet> parts;
    for (auto const& [n, f] : fam.exceptional()) {
      parts[n] = random_subset(f.group, rng);
    }
    ElementSet                        def;
    std::map<std::size_t, ElementSet> exc;
    if (fam.tail()) {
      def           = biased(*fam.tail());
      std::size_t k = std::uniform_int_distribution<std::size_t>(0, max_exceptions)(rng);
      for (std::size_t j = 0; j < k; ++j) {
        exc[std::uniform_int_distribution<std::size_t>(1, 5)(rng)] = biased(*fam.tail());
      }
    }
    return OpenSetSpec(fam, std::move(parts), std::move(def), std::move(exc),
                       std::bernoulli_distribution(0.7)(rng));
  }

  struct HandMorphism {
    std::string              name;
    FamilyMorphism           morphism;
    std::vector<std::string> expected_failures;  // failed hypotheses, in certificate order
  };

  // Positive and negative cases with known answers.
  inline std::vector<HandMorphism> hand_morphisms() {
    auto c2 = cyclic_group(2);
    auto c4 = cyclic_group(4);
    auto s3 = dihedral_group(3);
    std::vector<HandMorphism> out;

    // identity on a family with a tail
    FamilySpec fam({{"a", Fiber(s3, generated_subgroup(s3, {s3.generators().back()}))}},
                   Fiber::full(c2), {2, 3});
    out.push_back({"identity", FamilyMorphism::identity(fam), {}});

    // C4 -> C4/C2 with U = C2 upstairs, U = 1 downstairs: strict and onto
    FamilySpec up({{"a", Fiber(c4, generated_subgroup(c4, {2}))}}, Fiber::full(c2), {2});
    FamilySpec down({{"a", Fiber::bare(c2)}}, Fiber::full(c2), {2});
    auto       q = GroupHom(c4, c2, {0, 1, 0, 1});
    out.push_back({"quotient",
                   FamilyMorphism(up, down, {{"a", "a"}, {"tail", "tail"}},
                                  {{"a", q}, {"tail", GroupHom::identity(c2)}}),
                   {}});

    // same map with U = 1 upstairs: the preimage of 1 is C2, not strict
    FamilySpec up_bare({{"a", Fiber::bare(c4)}}, Fiber::full(c2), {2});
    out.push_back({"not-strict",
                   FamilyMorphism(up_bare, down, {{"a", "a"}, {"tail", "tail"}},
                                  {{"a", q}, {"tail", GroupHom::identity(c2)}}),
                   {"strict"}});

    // inclusion C2 -> C4 is not surjective
    FamilySpec small({{"a", Fiber::full(c2)}}, Fiber::full(c2), {2});
    FamilySpec big({{"a", Fiber::full(c4)}}, Fiber::full(c2), {2});
    out.push_back({"inclusion",
                   FamilyMorphism(small, big, {{"a", "a"}, {"tail", "tail"}},
                                  {{"a", GroupHom(c2, c4, {0, 2})}, {"tail", GroupHom::identity(c2)}}),
                   {"fibrewise_surjective"}});

    // an exceptional index collapsing to *: image {*} of an isolated point
    FamilySpec two({{"a", Fiber::full(c2)}, {"b", Fiber::full(c2)}}, Fiber::full(c2), {2});
    FamilySpec one({{"a", Fiber::full(c2)}}, Fiber::full(c2), {2});
    out.push_back({"collapse-to-star",
                   FamilyMorphism(two, one, {{"a", "a"}, {"b", "*"}, {"tail", "tail"}},
                                  {{"a", GroupHom::identity(c2)}, {"tail", GroupHom::identity(c2)}}),
                   {"index_map_open", "star_unique_preimage"}});

    // finite source onto a family with a tail cannot cover the tail
    FamilySpec fin({{"a", Fiber::full(c2)}}, std::nullopt, {2});
    out.push_back({"finite-into-infinite",
                   FamilyMorphism(fin, one, {{"a", "a"}}, {{"a", GroupHom::identity(c2)}}),
                   {"fibrewise_surjective", "index_map_open"}});

    // finite families, everything bijective
    FamilySpec fin2({{"a", Fiber::bare(s3)}, {"b", Fiber::full(c2)}}, std::nullopt, {2, 3});
    out.push_back({"finite-identity", FamilyMorphism::identity(fin2), {}});
    return out;
  }

  // is_open against the basis oracle on one candidate, plus closure of the
  // open sets under pairwise intersection and union.
  inline Record topology_record(FamilySpec const& fam, std::mt19937_64& rng, std::size_t trials,
                                std::string const& name) {
    Record r;
    r.check        = "topo " + name;
    r.input_digest = digest(fam, nullptr, "topo/" + std::to_string(trials));
    std::vector<OpenSetSpec> open;
    std::size_t              n_open = 0;
    for (std::size_t k = 0; k < trials; ++k) {
      auto v     = random_open_candidate(fam, rng);
      auto fast  = is_open(v);
      bool slow  = is_open_by_basis(v);
      if (fast.open != slow) {
        r.pass = false;
        r.witnesses.push_back("candidate " + std::to_string(k) + ": is_open " + (fast.open ? "yes" : "no")
                              + ", basis oracle " + (slow ? "yes" : "no"));
      }
      if (slow) {
        open.push_back(std::move(v));
        ++n_open;
      }
    }
    for (std::size_t i = 0; i + 1 < open.size(); i += 2) {
      auto meet = intersect(open[i], open[i + 1]);
      auto join = unite(open[i], open[i + 1]);
      if (!is_open(meet).open || !is_open_by_basis(meet) || !is_open(join).open
          || !is_open_by_basis(join)) {
        r.pass = false;
        r.witnesses.push_back("open sets " + std::to_string(i) + ", " + std::to_string(i + 1)
                              + " not closed under meet/join");
      }
    }
    r.witnesses.push_back(std::to_string(n_open) + " of " + std::to_string(trials) + " candidates open");
    return r;
  }

  inline Record hand_morphism_record(HandMorphism const& h, std::mt19937_64& rng) {
    Record r;
    r.check        = "open-map " + h.name;
    r.input_digest = digest(h.morphism.source(), nullptr, "open-map/" + h.name);
    auto cert      = open_map_certificate(h.morphism);
    r.pass         = cert.failed_hypotheses == h.expected_failures;
    std::string got;
    for (auto const& f : cert.failed_hypotheses) {
      got += (got.empty() ? "" : ",") + f;
    }
    r.witnesses.push_back("failed hypotheses: " + (got.empty() ? std::string("none") : got));
    // preimages of open sets are open for every morphism, and images of
    // open sets are open once the certificate holds
    for (int k = 0; k < 16; ++k) {
      auto v = random_open_candidate(h.morphism.target(), rng);
      if (is_open_by_basis(v) && !is_open_by_basis(preimage(h.morphism, v))) {
        r.pass = false;
        r.witnesses.push_back("preimage of an open set is not open");
        break;
      }
    }
    if (cert.certified) {
      for (int k = 0; k < 16; ++k) {
        auto v = random_open_candidate(h.morphism.source(), rng);
        if (is_open_by_basis(v) && !is_open_by_basis(image(h.morphism, v))) {
          r.pass = false;
          r.witnesses.push_back("image of an open set is not open");
          break;
        }
      }
    }
    return r;
  }

}  // namespace corfree::checks

#endif  // CORFREE_CHECKS_HPP_
