#ifndef CORFREE_RESTRICTED_HPP_
#define CORFREE_RESTRICTED_HPP_

// Finitely described families (A_t, B_t) of finite abelian groups: finitely
// many named fibers plus one tail pattern repeated over t_1, t_2, ...

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ab.hpp"
#include "error.hpp"

namespace corfree {

  enum class Flavor { plain, discretized, compactified };

  inline std::string to_string(Flavor f) {
    switch (f) {
      case Flavor::plain:
        return "plain";
      case Flavor::discretized:
        return "discretized";
      case Flavor::compactified:
        return "compactified";
    }
    return "?";
  }

  inline Flavor dual_flavor(Flavor f) {
    switch (f) {
      case Flavor::discretized:
        return Flavor::compactified;
      case Flavor::compactified:
        return Flavor::discretized;
      default:
        return Flavor::plain;
    }
  }

  // A finite abelian group with a distinguished subgroup B.
  class AbPair {
   public:
    AbPair() = default;

    AbPair(FiniteAbelianGroup group, std::vector<Vec> generators)
        : _group(std::move(group)), _gens(std::move(generators)) {
      for (auto& g : _gens) {
        detail::require(g.size() == _group.rank(),
                        "subgroup generator has the wrong length");
        g = _group.normalize(g);
      }
      _lattice = subgroup_lattice(_group, _gens, lattice_modulus());
      _parts   = sub_and_quotient(_group, _gens);
    }

    static AbPair whole(FiniteAbelianGroup const& a) {
      std::vector<Vec> gens;
      for (std::size_t i = 0; i < a.rank(); ++i) {
        Vec e(a.rank(), 0);
        e[i] = 1;
        gens.push_back(std::move(e));
      }
      return AbPair(a, std::move(gens));
    }

    static AbPair zero(FiniteAbelianGroup const& a) {
      return AbPair(a, {});
    }

    FiniteAbelianGroup const& group() const noexcept {
      return _group;
    }

    std::vector<Vec> const& generators() const noexcept {
      return _gens;
    }

    // B as a lattice in Z^r (contains the relations of A), canonical.
    ModLattice const& lattice() const noexcept {
      return _lattice;
    }

    FiniteAbelianGroup const& sub() const noexcept {
      return _parts.sub;
    }

    FiniteAbelianGroup const& quotient() const noexcept {
      return _parts.quotient;
    }

    SubAndQuotient const& parts() const noexcept {
      return _parts;
    }

    bool contains(Vec const& x) const {
      return _lattice.contains(x);
    }

    bool is_subset_of(AbPair const& that) const {
      return _group == that._group && _lattice.is_subset_of(that._lattice);
    }

    // (A^dual, annihilator of B).  The pairing is sum x_i y_i / d_i, so the
    // dual has the same coordinates and the annihilator of the annihilator
    // is B again.
    AbPair dual() const {
      auto ann = annihilator_lattice(_group, _gens);
      std::vector<Vec> gens;
      for (std::size_t i = 0; i < ann.dim(); ++i) {
        Vec v = _group.normalize(ann.basis_row(i));
        if (std::any_of(v.begin(), v.end(), [](Int x) { return x != 0; })) {
          gens.push_back(std::move(v));
        }
      }
      return AbPair(_group, std::move(gens));
    }

    std::string to_string() const {
      return "(" + _group.to_string() + ", " + _parts.sub.to_string() + ")";
    }

    bool operator==(AbPair const& that) const {
      return _group == that._group && _lattice == that._lattice;
    }

   private:
    Int lattice_modulus() const {
      return std::max<Int>(1, _group.exponent());
    }

    FiniteAbelianGroup _group;
    std::vector<Vec>   _gens;
    ModLattice         _lattice;
    SubAndQuotient     _parts;
  };

  class RestrictedAbFamily {
   public:
    using Entry = std::pair<std::string, AbPair>;

    RestrictedAbFamily() = default;

    RestrictedAbFamily(std::vector<Entry> exceptional, std::optional<AbPair> tail, Flavor flavor)
        : _exceptional(std::move(exceptional)), _tail(std::move(tail)), _flavor(flavor) {}

    std::vector<Entry> const& exceptional() const noexcept {
      return _exceptional;
    }

    std::optional<AbPair> const& tail() const noexcept {
      return _tail;
    }

    Flavor flavor() const noexcept {
      return _flavor;
    }

    RestrictedAbFamily with_flavor(Flavor f) const {
      auto out    = *this;
      out._flavor = f;
      return out;
    }

    AbPair const& at(std::string const& name) const {
      for (auto const& [n, p] : _exceptional) {
        if (n == name) {
          return p;
        }
      }
      if (name == "tail" && _tail) {
        return *_tail;
      }
      throw PreconditionError("no fiber named " + name);
    }

    // Direct sum of the exceptional groups (the restricted structure is
    // vacuous on a finite index set).
    FiniteAbelianGroup finite_sum() const {
      Vec orders;
      for (auto const& [n, p] : _exceptional) {
        for (Int d : p.group().factors()) {
          orders.push_back(d);
        }
      }
      return FiniteAbelianGroup::from_cyclic_orders(orders);
    }

    // A tail pattern with nontrivial A_tail makes the product infinite.
    bool is_finite() const {
      return !_tail || _tail->group().is_trivial();
    }

    bool operator==(RestrictedAbFamily const&) const = default;

   private:
    std::vector<Entry>    _exceptional;
    std::optional<AbPair> _tail;
    Flavor                _flavor = Flavor::plain;
  };

  inline RestrictedAbFamily dualize_family(RestrictedAbFamily const& f) {
    std::vector<RestrictedAbFamily::Entry> ex;
    for (auto const& [n, p] : f.exceptional()) {
      ex.emplace_back(n, p.dual());
    }
    std::optional<AbPair> tail;
    if (f.tail()) {
      tail = f.tail()->dual();
    }
    return RestrictedAbFamily(std::move(ex), std::move(tail), dual_flavor(f.flavor()));
  }

}  // namespace corfree

#endif  // CORFREE_RESTRICTED_HPP_
