#ifndef CORFREE_CORPUS_HPP_
#define CORFREE_CORPUS_HPP_

// Seeded random families and modules for the property suite.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ab.hpp"
#include "coh.hpp"
#include "error.hpp"
#include "family.hpp"
#include "freeprod.hpp"
#include "grp.hpp"

namespace corfree {

  struct CorpusInstance {
    std::string  name;
    FamilySpec   spec;
    FamilyModule module;
    std::size_t  level = 0;  // truncation level used by the finite checks
  };

  struct CorpusOptions {
    std::size_t count        = 30;
    std::size_t max_group    = 27;
    Int         max_coeff    = 9;
    double      trivial_rate = 0.35;
  };

  // Every automorphism of A in matrix form.
  inline std::vector<Matrix> automorphisms(FiniteAbelianGroup const& a) {
    std::size_t const   r = a.rank();
    std::vector<Matrix> out;
    Matrix              m = zero_matrix(r, r);
    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
      if (pos == r * r) {
        AbHom f(a, a, m, AbHom::unchecked);
        if (f.is_well_defined() && is_isomorphism(f)) {
          out.push_back(m);
        }
        return;
      }
      std::size_t i = pos / r;
      std::size_t k = pos % r;
      for (Int x = 0; x < a.factors()[i]; ++x) {
        m[i][k] = x;
        rec(pos + 1);
      }
    };
    rec(0);
    return out;
  }

  inline std::vector<FiniteGroup> corpus_groups(std::size_t max_order) {
    std::vector<FiniteGroup> all = {
        cyclic_group(2),
        cyclic_group(3),
        cyclic_group(4),
        cyclic_group(5),
        cyclic_group(6),
        cyclic_group(7),
        cyclic_group(8),
        cyclic_group(9),
        direct_product(cyclic_group(2), cyclic_group(2)),
        dihedral_group(3),
        dihedral_group(4),
        quaternion_group(),
        direct_product(cyclic_group(2), cyclic_group(4)),
        dihedral_group(5),
        alternating_group_4(),
        dihedral_group(6),
        direct_product(cyclic_group(3), cyclic_group(3)),
        direct_product(direct_product(cyclic_group(2), cyclic_group(2)), cyclic_group(2)),
        direct_product(dihedral_group(3), cyclic_group(3)),
        dihedral_group(9),
        heisenberg_group(3),
    };
    std::vector<FiniteGroup> out;
    for (auto& g : all) {
      if (g.order() <= max_order) {
        out.push_back(std::move(g));
      }
    }
    return out;
  }

  inline std::vector<FiniteAbelianGroup> corpus_coefficients(Int max_order) {
    std::vector<Vec> all = {{2}, {3}, {4}, {5}, {6}, {7}, {8}, {9}, {2, 2}, {2, 4}, {3, 3}, {2, 2, 2}};
    std::vector<FiniteAbelianGroup> out;
    for (auto const& f : all) {
      auto a = FiniteAbelianGroup::from_cyclic_orders(f);
      if (a.order() <= max_order) {
        out.push_back(std::move(a));
      }
    }
    return out;
  }

  class CorpusGenerator {
   public:
    explicit CorpusGenerator(std::uint64_t seed, CorpusOptions opts = {})
        : _rng(seed),
          _opts(opts),
          _groups(corpus_groups(opts.max_group)),
          _coeffs(corpus_coefficients(opts.max_coeff)) {
      for (auto const& a : _coeffs) {
        _auts.push_back(automorphisms(a));
      }
    }

    CorpusInstance next() {
      CorpusInstance inst;
      inst.name = "family" + std::to_string(_counter++);

      std::size_t ci = pick(_coeffs.size());
      auto const& a  = _coeffs[ci];

      bool        with_tail = coin(0.5);
      std::size_t n_ex      = with_tail ? 1 + pick(3) : 2 + pick(3);

      std::vector<FamilySpec::Entry> ex;
      std::vector<Int>               primes;
      FamilyModule                   m{a, {}};
      auto add_primes = [&](FiniteGroup const& g) {
        for (Int p : prime_divisors(Int(g.order()))) {
          primes.push_back(p);
        }
      };
      for (std::size_t k = 0; k < n_ex; ++k) {
        auto g    = _groups[pick(_groups.size())];
        auto name = "v" + std::to_string(k + 1);
        ex.emplace_back(name, Fiber(g, random_subgroup(g)));
        add_primes(g);
        if (!coin(_opts.trivial_rate)) {
          m.fibers.emplace(name, random_action(g, ci));
        }
      }
      std::optional<Fiber> tail;
      if (with_tail) {
        auto g = _groups[pick(_groups.size())];
        tail   = Fiber(g, generating_normal_closure(g));
        add_primes(g);
        // U~_tail = G_tail, and continuity at * forces a trivial tail action
        inst.level = 1;
      }
      if (coin(0.3)) {
        std::vector<Int> extra = {2, 3, 5, 7};
        primes.push_back(extra[pick(extra.size())]);
      }
      inst.spec   = FamilySpec(std::move(ex), std::move(tail), std::move(primes));
      inst.module = std::move(m);
      validate_family(inst.spec);
      return inst;
    }

    std::vector<CorpusInstance> generate(std::size_t n) {
      std::vector<CorpusInstance> out;
      for (std::size_t k = 0; k < n; ++k) {
        out.push_back(next());
      }
      return out;
    }

    std::mt19937_64& rng() noexcept {
      return _rng;
    }

   private:
    std::size_t pick(std::size_t n) {
      return std::uniform_int_distribution<std::size_t>(0, n - 1)(_rng);
    }

    bool coin(double p) {
      return std::bernoulli_distribution(p)(_rng);
    }

    Subgroup random_subgroup(FiniteGroup const& g) {
      std::vector<Elt> gens;
      std::size_t      k = pick(3);
      for (std::size_t i = 0; i < k; ++i) {
        gens.push_back(Elt(pick(g.order())));
      }
      return generated_subgroup(g, gens);
    }

    // A subgroup whose normal closure is all of G; a single element when
    // one is found, else G itself.
    Subgroup generating_normal_closure(FiniteGroup const& g) {
      for (int tries = 0; tries < 8; ++tries) {
        auto u = generated_subgroup(g, {Elt(pick(g.order()))});
        if (normal_closure(g, u).order() == g.order()) {
          return u;
        }
      }
      return whole_group(g);
    }

    GModule random_action(FiniteGroup const& g, std::size_t ci) {
      auto const& a    = _coeffs[ci];
      auto const& auts = _auts[ci];
      auto        gens = g.generators();
      for (int tries = 0; tries < 64; ++tries) {
        std::vector<std::pair<Elt, Matrix>> data;
        for (Elt s : gens) {
          data.emplace_back(s, auts[pick(auts.size())]);
        }
        try {
          auto mod = GModule::from_generators(g, a, data);
          if (!mod.is_trivial_action() || tries == 63) {
            return mod;
          }
        } catch (ValidationError const&) {
        }
      }
      return GModule::trivial(g, a);
    }

    std::mt19937_64                  _rng;
    CorpusOptions                    _opts;
    std::vector<FiniteGroup>         _groups;
    std::vector<FiniteAbelianGroup>  _coeffs;
    std::vector<std::vector<Matrix>> _auts;
    std::size_t                      _counter = 0;
  };

  inline std::vector<CorpusInstance> generate_corpus(std::uint64_t seed, std::size_t n,
                                                     CorpusOptions const& opts = {}) {
    return CorpusGenerator(seed, opts).generate(n);
  }

}  // namespace corfree

#endif  // CORFREE_CORPUS_HPP_
