#ifndef CORFREE_TOPO_HPP_
#define CORFREE_TOPO_HPP_

// Open subsets of a corestricted bundle over a one-point compactification
// with finite fibers.  V is open iff, when * is in V, U_t lies in V for
// almost all t (the fiberwise condition is automatic for finite fibers).

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "family.hpp"
#include "grp.hpp"

namespace corfree {

  using ElementSet = std::vector<Elt>;  // sorted, unique

  inline ElementSet normalize_set(ElementSet s, FiniteGroup const& g) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (Elt x : s) {
      detail::require(x >= 0 && static_cast<std::size_t>(x) < g.order(),
                      "element " + std::to_string(x) + " is not in " + g.label());
    }
    return s;
  }

  inline bool is_subset(ElementSet const& a, ElementSet const& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  }

  inline ElementSet set_intersection(ElementSet const& a, ElementSet const& b) {
    ElementSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
  }

  inline ElementSet set_union(ElementSet const& a, ElementSet const& b) {
    ElementSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
  }

  class OpenSetSpec {
   public:
    OpenSetSpec() = default;

    // tail_exceptions are keyed by k >= 1 for the index tau_k.
    OpenSetSpec(FamilySpec family, std::map<std::string, ElementSet> exceptional_parts,
                ElementSet tail_default, std::map<std::size_t, ElementSet> tail_exceptions,
                bool contains_star)
        : _family(std::move(family)),
          _parts(std::move(exceptional_parts)),
          _tail_default(std::move(tail_default)),
          _tail_exceptions(std::move(tail_exceptions)),
          _star(contains_star) {
      for (auto& [name, s] : _parts) {
        detail::require(name != tail_index && _family.has(name), "no exceptional fiber " + name);
        s = normalize_set(std::move(s), _family.at(name).group);
      }
      if (_family.tail()) {
        auto const& g = _family.tail()->group;
        _tail_default = normalize_set(std::move(_tail_default), g);
        for (auto& [k, s] : _tail_exceptions) {
          detail::require(k >= 1, "tail exception indices start at 1");
          s = normalize_set(std::move(s), g);
        }
      } else {
        detail::require(_tail_default.empty() && _tail_exceptions.empty(),
                        "tail data given for a family without tail");
      }
    }

    FamilySpec const& family() const noexcept {
      return _family;
    }

    bool contains_star() const noexcept {
      return _star;
    }

    ElementSet part(std::string const& name) const {
      auto it = _parts.find(name);
      return it == _parts.end() ? ElementSet{} : it->second;
    }

    std::map<std::string, ElementSet> const& exceptional_parts() const noexcept {
      return _parts;
    }

    ElementSet const& tail_default() const noexcept {
      return _tail_default;
    }

    std::map<std::size_t, ElementSet> const& tail_exceptions() const noexcept {
      return _tail_exceptions;
    }

    // V intersected with the fiber over tau_k.
    ElementSet tail_part(std::size_t k) const {
      auto it = _tail_exceptions.find(k);
      return it == _tail_exceptions.end() ? _tail_default : it->second;
    }

    std::size_t max_exception() const {
      return _tail_exceptions.empty() ? 0 : _tail_exceptions.rbegin()->first;
    }

    bool operator==(OpenSetSpec const&) const = default;

   private:
    FamilySpec                        _family;
    std::map<std::string, ElementSet> _parts;
    ElementSet                        _tail_default;
    std::map<std::size_t, ElementSet> _tail_exceptions;
    bool                              _star = false;
  };

  struct OpenResult {
    bool        open = true;
    std::string witness = "none";
  };

  inline OpenResult is_open(OpenSetSpec const& v) {
    auto const& fam = v.family();
    if (!v.contains_star() || !fam.tail()) {
      return {};
    }
    if (is_subset(fam.tail()->u.elements(), v.tail_default())) {
      return {};
    }
    // every tau_k outside the finite exception list violates the condition
    std::size_t k = 1;
    while (v.tail_exceptions().count(k) != 0) {
      ++k;
    }
    return {false, tail_name(k)};
  }

  // Interior of V computed from a basis of the topology on a finite window
  // tau_1..tau_K (K past every exception): singletons in the fibers over T0
  // and the neighbourhoods {*} + union of U_t over t outside a finite F.
  // Indices beyond the window all look like the tail default.
  inline bool is_open_by_basis(OpenSetSpec const& v) {
    auto const& fam = v.family();
    if (!v.contains_star()) {
      return true;  // interior contains every non-star point of V
    }
    struct Slot {
      ElementSet u;
      ElementSet part;
    };
    std::vector<Slot> window;
    for (auto const& [name, f] : fam.exceptional()) {
      window.push_back({f.u.elements(), v.part(name)});
    }
    bool beyond_ok = true;
    if (fam.tail()) {
      std::size_t const k_max = v.max_exception() + 2;
      for (std::size_t k = 1; k <= k_max; ++k) {
        window.push_back({fam.tail()->u.elements(), v.tail_part(k)});
      }
      beyond_ok = is_subset(fam.tail()->u.elements(), v.tail_default());
    }
    if (window.size() > 20) {
      throw SizeCapError("basis oracle window too large");
    }
    // * is interior iff some basic neighbourhood N_F lies inside V.
    std::size_t const w = window.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << w); ++mask) {
      bool inside = beyond_ok;
      for (std::size_t i = 0; inside && i < w; ++i) {
        if ((mask >> i & 1U) == 0 && !is_subset(window[i].u, window[i].part)) {
          inside = false;
        }
      }
      if (inside) {
        return true;
      }
    }
    return false;
  }

  inline OpenSetSpec intersect(OpenSetSpec const& a, OpenSetSpec const& b) {
    detail::require(a.family() == b.family(), "open sets live on different families");
    std::map<std::string, ElementSet> parts;
    for (auto const& name : a.family().names()) {
      parts[name] = set_intersection(a.part(name), b.part(name));
    }
    std::map<std::size_t, ElementSet> exc;
    for (auto const* s : {&a, &b}) {
      for (auto const& [k, ignored] : s->tail_exceptions()) {
        exc[k] = set_intersection(a.tail_part(k), b.tail_part(k));
      }
    }
    return OpenSetSpec(a.family(), std::move(parts),
                       set_intersection(a.tail_default(), b.tail_default()), std::move(exc),
                       a.contains_star() && b.contains_star());
  }

  inline OpenSetSpec unite(OpenSetSpec const& a, OpenSetSpec const& b) {
    detail::require(a.family() == b.family(), "open sets live on different families");
    std::map<std::string, ElementSet> parts;
    for (auto const& name : a.family().names()) {
      parts[name] = set_union(a.part(name), b.part(name));
    }
    std::map<std::size_t, ElementSet> exc;
    for (auto const* s : {&a, &b}) {
      for (auto const& [k, ignored] : s->tail_exceptions()) {
        exc[k] = set_union(a.tail_part(k), b.tail_part(k));
      }
    }
    return OpenSetSpec(a.family(), std::move(parts), set_union(a.tail_default(), b.tail_default()),
                       std::move(exc), a.contains_star() || b.contains_star());
  }

  ////////////////////////////////////////////////////////////////////////
  // Morphisms
  ////////////////////////////////////////////////////////////////////////

  struct OpenMapCertificate {
    bool                     certified = false;
    MorphismPredicates       predicates;
    std::vector<std::string> failed_hypotheses;
  };

  // Certifies the hypotheses of the open mapping statement.  A failed
  // hypothesis says nothing about openness.
  inline OpenMapCertificate open_map_certificate(FamilyMorphism const& m) {
    OpenMapCertificate out;
    out.predicates = morphism_predicates(m);
    auto const& p  = out.predicates;
    if (!p.fibrewise_surjective) {
      out.failed_hypotheses.push_back("fibrewise_surjective");
    }
    if (!p.strict) {
      out.failed_hypotheses.push_back("strict");
    }
    if (!p.index_map_open) {
      out.failed_hypotheses.push_back("index_map_open");
    }
    if (!p.star_unique_preimage) {
      out.failed_hypotheses.push_back("star_unique_preimage");
    }
    out.certified = out.failed_hypotheses.empty();
    return out;
  }

  inline OpenSetSpec preimage(FamilyMorphism const& m, OpenSetSpec const& v) {
    detail::require(v.family() == m.target(), "open set is not on the morphism's target");
    auto const& src = m.source();
    auto pull = [&](std::string const& name, ElementSet const& target_part) {
      auto const& g = src.at(name).group;
      ElementSet  out;
      if (m.image_index(name) == star_index) {
        if (v.contains_star()) {
          for (std::size_t x = 0; x < g.order(); ++x) {
            out.push_back(Elt(x));
          }
        }
        return out;
      }
      auto const& phi = m.fiber_maps().at(name);
      for (std::size_t x = 0; x < g.order(); ++x) {
        if (std::binary_search(target_part.begin(), target_part.end(), phi(Elt(x)))) {
          out.push_back(Elt(x));
        }
      }
      return out;
    };
    std::map<std::string, ElementSet> parts;
    for (auto const& name : src.names()) {
      auto const& dst = m.image_index(name);
      parts[name]     = pull(name, dst == star_index ? ElementSet{} : v.part(dst));
    }
    ElementSet                        def;
    std::map<std::size_t, ElementSet> exc;
    if (src.tail()) {
      def = pull(tail_index, v.tail_default());
      if (m.image_index(tail_index) != star_index) {
        for (auto const& [k, s] : v.tail_exceptions()) {
          exc[k] = pull(tail_index, s);
        }
      }
    }
    return OpenSetSpec(src, std::move(parts), std::move(def), std::move(exc), v.contains_star());
  }

  inline OpenSetSpec image(FamilyMorphism const& m, OpenSetSpec const& v) {
    detail::require(v.family() == m.source(), "open set is not on the morphism's source");
    auto const& src  = m.source();
    auto const& tgt  = m.target();
    bool        star = v.contains_star();
    auto push = [&](std::string const& name, ElementSet const& part) {
      ElementSet out;
      auto const& phi = m.fiber_maps().at(name);
      for (Elt x : part) {
        out.push_back(phi(x));
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    };
    std::map<std::string, ElementSet> parts;
    for (auto const& name : src.names()) {
      auto const& dst = m.image_index(name);
      auto        p   = v.part(name);
      if (dst == star_index) {
        star = star || !p.empty();
        continue;
      }
      parts[dst] = set_union(parts[dst], push(name, p));
    }
    ElementSet                        def;
    std::map<std::size_t, ElementSet> exc;
    if (src.tail()) {
      if (m.image_index(tail_index) == star_index) {
        // infinitely many fibers collapse onto *
        star = star || !v.tail_default().empty();
        for (auto const& [k, s] : v.tail_exceptions()) {
          star = star || !s.empty();
        }
      } else {
        def = push(tail_index, v.tail_default());
        for (auto const& [k, s] : v.tail_exceptions()) {
          exc[k] = push(tail_index, s);
        }
      }
    }
    if (!tgt.tail()) {
      def.clear();
      exc.clear();
    }
    return OpenSetSpec(tgt, std::move(parts), std::move(def), std::move(exc), star);
  }

}  // namespace corfree

#endif  // CORFREE_TOPO_HPP_
