#ifndef CORFREE_FAMILY_HPP_
#define CORFREE_FAMILY_HPP_

// Families (G_t, U_t) over T = T0 + {*}: finitely many named fibers, an
// optional tail pattern repeated over t_1, t_2, ... and the trivial fiber at
// the point at infinity.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ab.hpp"
#include "error.hpp"
#include "grp.hpp"
#include "restricted.hpp"

namespace corfree {

  inline constexpr char const* star_index = "*";
  inline constexpr char const* tail_index = "tail";

  struct Fiber {
    FiniteGroup group;
    Subgroup    u;

    Fiber() = default;

    Fiber(FiniteGroup g, Subgroup s) : group(std::move(g)), u(std::move(s)) {
      detail::require(u.parent() == group, "U_t is not a subgroup of G_t");
    }

    static Fiber full(FiniteGroup const& g) {
      return Fiber(g, whole_group(g));
    }

    static Fiber bare(FiniteGroup const& g) {
      return Fiber(g, trivial_subgroup(g));
    }

    bool operator==(Fiber const&) const = default;
  };

  inline std::vector<Int> prime_divisors(Int n) {
    std::vector<Int> out;
    for (Int p = 2; p * p <= n; ++p) {
      if (n % p == 0) {
        out.push_back(p);
        while (n % p == 0) {
          n /= p;
        }
      }
    }
    if (n > 1) {
      out.push_back(n);
    }
    return out;
  }

  class FamilySpec {
   public:
    using Entry = std::pair<std::string, Fiber>;

    FamilySpec() = default;

    FamilySpec(std::vector<Entry> exceptional, std::optional<Fiber> tail, std::vector<Int> primes)
        : _exceptional(std::move(exceptional)), _tail(std::move(tail)), _primes(std::move(primes)) {
      std::sort(_primes.begin(), _primes.end());
      _primes.erase(std::unique(_primes.begin(), _primes.end()), _primes.end());
    }

    std::vector<Entry> const& exceptional() const noexcept {
      return _exceptional;
    }

    std::optional<Fiber> const& tail() const noexcept {
      return _tail;
    }

    std::vector<Int> const& prime_set() const noexcept {
      return _primes;
    }

    bool has(std::string const& name) const {
      return find(name) != nullptr;
    }

    Fiber const& at(std::string const& name) const {
      auto const* f = find(name);
      if (f == nullptr) {
        throw PreconditionError("no fiber named " + name);
      }
      return *f;
    }

    std::vector<std::string> names() const {
      std::vector<std::string> out;
      for (auto const& [n, f] : _exceptional) {
        out.push_back(n);
      }
      return out;
    }

    // Every fiber including the tail pattern, tail last.
    std::vector<Entry> fibers() const {
      auto out = _exceptional;
      if (_tail) {
        out.emplace_back(tail_index, *_tail);
      }
      return out;
    }

    bool operator==(FamilySpec const&) const = default;

   private:
    Fiber const* find(std::string const& name) const {
      for (auto const& [n, f] : _exceptional) {
        if (n == name) {
          return &f;
        }
      }
      if (name == tail_index && _tail) {
        return &*_tail;
      }
      return nullptr;
    }

    std::vector<Entry>   _exceptional;
    std::optional<Fiber> _tail;
    std::vector<Int>     _primes;
  };

  ////////////////////////////////////////////////////////////////////////
  // Validation and transforms
  ////////////////////////////////////////////////////////////////////////

  struct FiberReport {
    std::string name;
    std::size_t order         = 0;
    std::size_t u_order       = 0;
    std::size_t closure_order = 0;
    bool        u_normal      = false;
  };

  struct FamilyReport {
    std::vector<FiberReport> fibers;
  };

  // Throws ValidationError on the first violated invariant.
  inline FamilyReport validate_family(FamilySpec const& spec) {
    detail::require(!spec.prime_set().empty(), "prime set is empty");
    for (Int p : spec.prime_set()) {
      detail::require(p >= 2 && prime_divisors(p) == std::vector<Int>{p},
                      "prime set contains " + std::to_string(p) + ", which is not prime");
    }
    FamilyReport out;
    std::vector<std::string> seen;
    for (auto const& [name, fib] : spec.fibers()) {
      detail::require(!name.empty() && name != star_index, "invalid fiber name '" + name + "'");
      if (name != tail_index) {
        detail::require(std::find(seen.begin(), seen.end(), name) == seen.end(),
                        "duplicate fiber name " + name);
        seen.push_back(name);
      }
      detail::require(fib.u.parent() == fib.group, "U_" + name + " is not a subgroup of G_" + name);
      for (Int q : prime_divisors(Int(fib.group.order()))) {
        detail::require(std::binary_search(spec.prime_set().begin(), spec.prime_set().end(), q),
                        "order of G_" + name + " has prime divisor " + std::to_string(q)
                            + " outside the prime set");
      }
      auto closure = normal_closure(fib.group, fib.u);
      out.fibers.push_back({name, fib.group.order(), fib.u.order(), closure.order(),
                            closure.order() == fib.u.order()});
    }
    return out;
  }

  inline FamilySpec normal_closure_family(FamilySpec const& spec) {
    auto close = [](Fiber const& f) { return Fiber(f.group, normal_closure(f.group, f.u)); };
    std::vector<FamilySpec::Entry> ex;
    for (auto const& [n, f] : spec.exceptional()) {
      ex.emplace_back(n, close(f));
    }
    std::optional<Fiber> tail;
    if (spec.tail()) {
      tail = close(*spec.tail());
    }
    return FamilySpec(std::move(ex), std::move(tail), spec.prime_set());
  }

  // (G^ab, image of U).
  inline AbPair abelianize_fiber(Fiber const& f) {
    auto ab = abelianization(f.group);
    std::vector<Vec> gens;
    for (Elt x : f.u.elements()) {
      if (std::any_of(ab(x).begin(), ab(x).end(), [](Int c) { return c != 0; })) {
        gens.push_back(ab(x));
      }
    }
    return AbPair(ab.group, std::move(gens));
  }

  inline RestrictedAbFamily abelianize_family(FamilySpec const& spec) {
    std::vector<RestrictedAbFamily::Entry> ex;
    for (auto const& [n, f] : spec.exceptional()) {
      ex.emplace_back(n, abelianize_fiber(f));
    }
    std::optional<AbPair> tail;
    if (spec.tail()) {
      tail = abelianize_fiber(*spec.tail());
    }
    return RestrictedAbFamily(std::move(ex), std::move(tail), Flavor::compactified);
  }

  // Normal subgroups V_t per fiber, keyed by name ("tail" for the pattern);
  // missing names mean V_t trivial.
  inline FamilySpec quotient_family(FamilySpec const& spec, std::map<std::string, Subgroup> const& v) {
    auto apply = [&](std::string const& name, Fiber const& f) {
      auto it = v.find(name);
      if (it == v.end()) {
        return f;
      }
      if (!(it->second.parent() == f.group)) {
        throw ValidationError("V_" + name + " is not a subgroup of G_" + name);
      }
      auto q = quotient_group(f.group, it->second);
      return Fiber(q.group, q.projection.image_of(f.u));
    };
    std::vector<FamilySpec::Entry> ex;
    for (auto const& [n, f] : spec.exceptional()) {
      ex.emplace_back(n, apply(n, f));
    }
    std::optional<Fiber> tail;
    if (spec.tail()) {
      tail = apply(tail_index, *spec.tail());
    }
    for (auto const& [name, sub] : v) {
      detail::require(spec.has(name), "quotient requested at unknown fiber " + name);
    }
    return FamilySpec(std::move(ex), std::move(tail), spec.prime_set());
  }

  // Quotient by the normal closures: fibers G_t / U~_t.
  inline FamilySpec unramified_quotient(FamilySpec const& spec) {
    std::map<std::string, Subgroup> v;
    for (auto const& [n, f] : spec.fibers()) {
      v.emplace(n, normal_closure(f.group, f.u));
    }
    return quotient_family(spec, v);
  }

  ////////////////////////////////////////////////////////////////////////
  // Morphisms
  ////////////////////////////////////////////////////////////////////////

  // Index map: exceptional source names go to target names or "*"; the
  // source tail goes to the target tail (index-wise) or to "*".  Fiber maps
  // are given for every source index not sent to "*".
  class FamilyMorphism {
   public:
    FamilyMorphism() = default;

    FamilyMorphism(FamilySpec source, FamilySpec target, std::map<std::string, std::string> index_map,
                   std::map<std::string, GroupHom> fiber_maps)
        : _source(std::move(source)),
          _target(std::move(target)),
          _index(std::move(index_map)),
          _maps(std::move(fiber_maps)) {
      for (auto const& [name, fib] : _source.fibers()) {
        auto it = _index.find(name);
        detail::require(it != _index.end(), "index map is undefined at " + name);
        auto const& dst = it->second;
        if (dst == star_index) {
          continue;
        }
        if (name == tail_index) {
          detail::require(dst == tail_index, "the tail must map to the tail or to *");
        } else {
          detail::require(dst != tail_index && _target.has(dst),
                          "index " + name + " maps to unknown target index " + dst);
        }
        auto m = _maps.find(name);
        detail::require(m != _maps.end(), "missing fiber map at " + name);
        auto const& tf = _target.at(dst);
        detail::require(m->second.source() == fib.group && m->second.target() == tf.group,
                        "fiber map at " + name + " does not match the fibers");
        detail::require(m->second.image_of(fib.u).is_subset_of(tf.u),
                        "fiber map at " + name + " does not send U into U");
      }
      for (auto const& [name, dst] : _index) {
        detail::require(_source.has(name), "index map mentions unknown source index " + name);
      }
    }

    static FamilyMorphism identity(FamilySpec const& spec) {
      std::map<std::string, std::string> idx;
      std::map<std::string, GroupHom>    maps;
      for (auto const& [n, f] : spec.fibers()) {
        idx[n] = n;
        maps.emplace(n, GroupHom::identity(f.group));
      }
      return FamilyMorphism(spec, spec, std::move(idx), std::move(maps));
    }

    FamilySpec const& source() const noexcept {
      return _source;
    }

    FamilySpec const& target() const noexcept {
      return _target;
    }

    std::map<std::string, std::string> const& index_map() const noexcept {
      return _index;
    }

    std::map<std::string, GroupHom> const& fiber_maps() const noexcept {
      return _maps;
    }

    std::string const& image_index(std::string const& name) const {
      return _index.at(name);
    }

   private:
    FamilySpec                         _source;
    FamilySpec                         _target;
    std::map<std::string, std::string> _index;
    std::map<std::string, GroupHom>    _maps;
  };

  struct MorphismPredicates {
    bool strict               = false;
    bool fibrewise_surjective = false;
    bool star_unique_preimage = false;
    bool index_map_open       = false;
    bool fibrewise_injective  = false;
    std::vector<std::string> failures;  // "<predicate>: <index>"

    bool all() const {
      return strict && fibrewise_surjective && star_unique_preimage && index_map_open;
    }
  };

  inline MorphismPredicates morphism_predicates(FamilyMorphism const& m) {
    MorphismPredicates out;
    out.strict               = true;
    out.fibrewise_surjective = true;
    out.star_unique_preimage = true;
    out.fibrewise_injective  = true;
    auto const& src = m.source();
    auto const& tgt = m.target();
    std::map<std::string, int> hits;
    for (auto const& [name, fib] : src.fibers()) {
      auto const& dst = m.image_index(name);
      hits[dst] += 1;
      if (dst == star_index) {
        out.star_unique_preimage = false;
        out.failures.push_back("star_unique_preimage: " + name);
        // the fiber over * is trivial, so the preimage of U_* is all of G_t
        if (fib.u.order() != fib.group.order()) {
          out.strict = false;
          out.failures.push_back("strict: " + name);
        }
        if (fib.group.order() != 1) {
          out.fibrewise_injective = false;
        }
        continue;
      }
      auto const& phi = m.fiber_maps().at(name);
      auto const& tf  = tgt.at(dst);
      if (!(phi.preimage(tf.u) == fib.u)) {
        out.strict = false;
        out.failures.push_back("strict: " + name);
      }
      if (!phi.is_surjective()) {
        out.fibrewise_surjective = false;
        out.failures.push_back("fibrewise_surjective: " + name);
      }
      if (!phi.is_injective()) {
        out.fibrewise_injective = false;
      }
    }
    for (auto const& [name, fib] : tgt.fibers()) {
      if (hits[name] == 0) {
        out.fibrewise_surjective = false;
        out.failures.push_back("fibrewise_surjective: " + name + " not in the image");
      }
      if (hits[name] > 1) {
        out.fibrewise_injective = false;
      }
    }
    // Open sets of T are the sets avoiding *, plus cofinite sets with *.
    // With an infinite target, a point sent to * has image {*}, which is not
    // open; with a finite source, {*} is open in the source.
    bool const target_infinite = tgt.tail().has_value();
    bool const source_infinite = src.tail().has_value();
    out.index_map_open = !target_infinite || (out.star_unique_preimage && source_infinite);
    if (!out.index_map_open) {
      out.failures.push_back(std::string("index_map_open: ")
                             + (source_infinite ? "an index maps to *" : "finite source"));
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Towers
  ////////////////////////////////////////////////////////////////////////

  // transitions[k] : levels[k + 1] -> levels[k]
  struct Tower {
    std::vector<FamilySpec>     levels;
    std::vector<FamilyMorphism> transitions;
  };

  struct TowerCertificate {
    bool passed = true;
    struct Step {
      std::size_t              level = 0;
      bool                     surjective_and_strict = false;
      bool                     star_unique_preimage  = false;
      std::vector<std::string> failures;
    };
    std::vector<Step> steps;
  };

  inline TowerCertificate check_tower(Tower const& t) {
    detail::require(!t.levels.empty(), "tower has no levels");
    detail::require(t.transitions.size() + 1 == t.levels.size(),
                    "tower needs one transition per adjacent pair of levels");
    TowerCertificate out;
    for (std::size_t k = 0; k < t.transitions.size(); ++k) {
      auto const& m = t.transitions[k];
      detail::require(m.source() == t.levels[k + 1] && m.target() == t.levels[k],
                      "transition " + std::to_string(k) + " does not connect its levels");
      auto p = morphism_predicates(m);
      TowerCertificate::Step step;
      step.level                 = k;
      step.surjective_and_strict = p.strict && p.fibrewise_surjective;
      step.star_unique_preimage  = p.star_unique_preimage;
      step.failures              = p.failures;
      out.passed = out.passed && step.surjective_and_strict && step.star_unique_preimage;
      out.steps.push_back(std::move(step));
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Truncation
  ////////////////////////////////////////////////////////////////////////

  inline std::string tail_name(std::size_t k) {
    return "tau" + std::to_string(k);
  }

  struct TruncatedFamily {
    FamilySpec  base;
    std::size_t level = 0;
    // exceptional fibers followed by tau1..tauN
    std::vector<FamilySpec::Entry> indices;
    // G_tail / U~_tail for the indices beyond the truncation
    std::optional<FiniteGroup> beyond;

    bool beyond_trivial() const {
      return !beyond || beyond->order() == 1;
    }

    // The finite family on the retained indices.
    FamilySpec as_family() const {
      return FamilySpec(indices, std::nullopt, base.prime_set());
    }
  };

  inline TruncatedFamily truncate(FamilySpec const& spec, std::size_t n) {
    TruncatedFamily out;
    out.base    = spec;
    out.level   = n;
    out.indices = spec.exceptional();
    if (spec.tail()) {
      for (std::size_t k = 1; k <= n; ++k) {
        out.indices.emplace_back(tail_name(k), *spec.tail());
      }
      auto const& t = *spec.tail();
      out.beyond    = quotient_group(t.group, normal_closure(t.group, t.u)).group;
    }
    return out;
  }

  // truncate(spec, n) -> truncate(spec, n + 1) on the retained finite families.
  inline FamilyMorphism truncation_embedding(FamilySpec const& spec, std::size_t n) {
    auto small = truncate(spec, n).as_family();
    auto large = truncate(spec, n + 1).as_family();
    std::map<std::string, std::string> idx;
    std::map<std::string, GroupHom>    maps;
    for (auto const& [name, f] : small.exceptional()) {
      idx[name] = name;
      maps.emplace(name, GroupHom::identity(f.group));
    }
    return FamilyMorphism(small, large, std::move(idx), std::move(maps));
  }

  inline std::string describe(FamilySpec const& spec) {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (auto const& [n, f] : spec.fibers()) {
      os << (first ? "" : ", ") << n << ": (" << f.group.label() << ", |U|=" << f.u.order() << ")";
      first = false;
    }
    os << "}";
    return os.str();
  }

}  // namespace corfree

#endif  // CORFREE_FAMILY_HPP_
