#ifndef CORFREE_GRP_HPP_
#define CORFREE_GRP_HPP_

// Finite groups as explicit Cayley tables, their subgroups, quotients,
// homomorphisms and abelianizations.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "ab.hpp"
#include "error.hpp"

namespace corfree {

  using Elt         = std::int32_t;
  using Permutation = std::vector<Elt>;

  inline constexpr std::size_t default_order_cap = 2000;

  class FiniteGroup {
    struct Data {
      std::size_t      order = 1;
      std::vector<Elt> table{0};
      std::vector<Elt> inverse{0};
      Elt              identity = 0;
      std::string      label    = "1";
    };

   public:
    FiniteGroup() : _data(std::make_shared<Data const>()) {}

    // Validates every group axiom; throws ValidationError naming the first
    // violation found.
    static FiniteGroup from_table(std::vector<std::vector<Elt>> const& table,
                                  std::string                         label = "") {
      std::size_t const n = table.size();
      detail::require(n >= 1, "Cayley table must be nonempty");
      std::vector<Elt> flat;
      flat.reserve(n * n);
      for (auto const& row : table) {
        detail::require(row.size() == n, "Cayley table must be square");
        flat.insert(flat.end(), row.begin(), row.end());
      }
      return from_flat(n, std::move(flat), std::move(label));
    }

    static FiniteGroup from_flat(std::size_t n, std::vector<Elt> flat, std::string label = "") {
      detail::require(flat.size() == n * n, "Cayley table must be square");
      for (Elt x : flat) {
        detail::require(x >= 0 && static_cast<std::size_t>(x) < n,
                        "Cayley table entry out of range");
      }
      auto at = [&](std::size_t a, std::size_t b) { return flat[a * n + b]; };
      for (std::size_t a = 0; a < n; ++a) {
        std::vector<char> row(n, 0), col(n, 0);
        for (std::size_t b = 0; b < n; ++b) {
          detail::require(!row[at(a, b)], "Cayley table row " + std::to_string(a)
                                              + " is not a permutation");
          detail::require(!col[at(b, a)], "Cayley table column " + std::to_string(a)
                                              + " is not a permutation");
          row[at(a, b)] = col[at(b, a)] = 1;
        }
      }
      std::size_t e = n;
      for (std::size_t a = 0; a < n && e == n; ++a) {
        bool ok = true;
        for (std::size_t b = 0; b < n && ok; ++b) {
          ok = at(a, b) == static_cast<Elt>(b) && at(b, a) == static_cast<Elt>(b);
        }
        if (ok) {
          e = a;
        }
      }
      detail::require(e < n, "Cayley table has no two-sided identity");
      auto data      = std::make_shared<Data>();
      data->order    = n;
      data->table    = std::move(flat);
      data->identity = static_cast<Elt>(e);
      data->label    = label.empty() ? "G" + std::to_string(n) : std::move(label);
      data->inverse.assign(n, 0);
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          if (data->table[a * n + b] == data->identity) {
            data->inverse[a] = static_cast<Elt>(b);
          }
        }
      }
      FiniteGroup g(std::move(data));
      // Light's test: associativity need only be checked against generators.
      for (Elt s : g.generators()) {
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t b = 0; b < n; ++b) {
            Elt x = static_cast<Elt>(a), y = static_cast<Elt>(b);
            detail::require(g.mul(g.mul(x, s), y) == g.mul(x, g.mul(s, y)),
                            "Cayley table is not associative");
          }
        }
      }
      return g;
    }

    std::size_t order() const noexcept {
      return _data->order;
    }

    Elt identity() const noexcept {
      return _data->identity;
    }

    std::string const& label() const noexcept {
      return _data->label;
    }

    FiniteGroup relabel(std::string label) const {
      auto data   = std::make_shared<Data>(*_data);
      data->label = std::move(label);
      return FiniteGroup(std::move(data));
    }

    Elt mul(Elt a, Elt b) const {
      return _data->table[static_cast<std::size_t>(a) * _data->order
                          + static_cast<std::size_t>(b)];
    }

    Elt inv(Elt a) const {
      return _data->inverse[static_cast<std::size_t>(a)];
    }

    Elt conj(Elt g, Elt x) const {
      return mul(mul(g, x), inv(g));
    }

    Elt commutator(Elt a, Elt b) const {
      return mul(mul(a, b), mul(inv(a), inv(b)));
    }

    std::vector<std::vector<Elt>> table() const {
      std::vector<std::vector<Elt>> out(order(), std::vector<Elt>(order()));
      for (std::size_t a = 0; a < order(); ++a) {
        for (std::size_t b = 0; b < order(); ++b) {
          out[a][b] = mul(static_cast<Elt>(a), static_cast<Elt>(b));
        }
      }
      return out;
    }

    std::size_t element_order(Elt g) const {
      std::size_t k = 1;
      for (Elt x = g; x != identity(); x = mul(x, g)) {
        ++k;
      }
      return k;
    }

    bool is_abelian() const {
      for (std::size_t a = 0; a < order(); ++a) {
        for (std::size_t b = a + 1; b < order(); ++b) {
          if (mul(Elt(a), Elt(b)) != mul(Elt(b), Elt(a))) {
            return false;
          }
        }
      }
      return true;
    }

    // Deterministic generating set: elements of largest order first, each
    // kept only if it enlarges the span.
    std::vector<Elt> generators() const {
      std::vector<Elt> by_order(order());
      std::iota(by_order.begin(), by_order.end(), 0);
      std::vector<std::size_t> ord(order());
      for (std::size_t g = 0; g < order(); ++g) {
        ord[g] = element_order(Elt(g));
      }
      std::stable_sort(by_order.begin(), by_order.end(),
                       [&](Elt a, Elt b) { return ord[a] > ord[b]; });
      std::vector<Elt>  gens;
      std::vector<char> in(order(), 0);
      in[identity()]     = 1;
      std::size_t count = 1;
      for (Elt g : by_order) {
        if (count == order()) {
          break;
        }
        if (in[g]) {
          continue;
        }
        gens.push_back(g);
        // closure of the current span
        std::vector<Elt> members;
        for (std::size_t x = 0; x < order(); ++x) {
          if (in[x]) {
            members.push_back(Elt(x));
          }
        }
        std::vector<Elt> frontier = members;
        while (!frontier.empty()) {
          std::vector<Elt> next;
          for (Elt x : frontier) {
            for (Elt s : gens) {
              Elt y = mul(x, s);
              if (!in[y]) {
                in[y] = 1;
                ++count;
                next.push_back(y);
              }
            }
          }
          frontier = std::move(next);
        }
      }
      return gens;
    }

    bool operator==(FiniteGroup const& that) const {
      return _data == that._data
             || (_data->order == that._data->order && _data->table == that._data->table);
    }

   private:
    explicit FiniteGroup(std::shared_ptr<Data const> data) : _data(std::move(data)) {}

    std::shared_ptr<Data const> _data;
  };

  // Closure of the generators under (g*h)(i) = g(h(i)); element 0 is the
  // identity, the rest in breadth-first order.
  inline FiniteGroup group_from_generators(std::size_t                     degree,
                                           std::vector<Permutation> const& generators,
                                           std::size_t cap = default_order_cap,
                                           std::string label = "") {
    detail::require(degree >= 1, "permutation degree must be positive");
    for (auto const& p : generators) {
      detail::require(p.size() == degree, "generator has the wrong degree");
      std::vector<char> seen(degree, 0);
      for (Elt x : p) {
        detail::require(x >= 0 && static_cast<std::size_t>(x) < degree && !seen[x],
                        "generator is not a permutation");
        seen[x] = 1;
      }
    }
    Permutation id(degree);
    std::iota(id.begin(), id.end(), 0);
    std::vector<Permutation>   elts{id};
    std::map<Permutation, Elt> index{{id, 0}};
    for (std::size_t k = 0; k < elts.size(); ++k) {
      for (auto const& s : generators) {
        Permutation y(degree);
        for (std::size_t i = 0; i < degree; ++i) {
          y[i] = elts[k][s[i]];
        }
        if (index.emplace(y, static_cast<Elt>(elts.size())).second) {
          elts.push_back(std::move(y));
          if (elts.size() > cap) {
            throw SizeCapError("permutation group closure exceeds order cap "
                               + std::to_string(cap));
          }
        }
      }
    }
    std::size_t const n = elts.size();
    std::vector<Elt>  flat(n * n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        Permutation y(degree);
        for (std::size_t i = 0; i < degree; ++i) {
          y[i] = elts[a][elts[b][i]];
        }
        flat[a * n + b] = index.at(y);
      }
    }
    return FiniteGroup::from_flat(n, std::move(flat), label.empty() ? "G" + std::to_string(n) : label);
  }

  // Table of an operation on 0..n-1 given as a callable.
  template <typename Op>
  FiniteGroup group_from_operation(std::size_t n, Op&& op, std::string label) {
    std::vector<Elt> flat(n * n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        flat[a * n + b] = static_cast<Elt>(op(a, b));
      }
    }
    return FiniteGroup::from_flat(n, std::move(flat), std::move(label));
  }

  inline FiniteGroup trivial_group() {
    return FiniteGroup();
  }

  inline FiniteGroup cyclic_group(std::size_t n) {
    detail::require(n >= 1, "cyclic group order must be positive");
    return group_from_operation(
        n, [n](std::size_t a, std::size_t b) { return (a + b) % n; }, "C" + std::to_string(n));
  }

  inline FiniteGroup direct_product(FiniteGroup const& g, FiniteGroup const& h) {
    std::size_t const m = h.order();
    return group_from_operation(
        g.order() * m,
        [&](std::size_t a, std::size_t b) {
          return static_cast<std::size_t>(g.mul(Elt(a / m), Elt(b / m))) * m
                 + static_cast<std::size_t>(h.mul(Elt(a % m), Elt(b % m)));
        },
        g.label() + "x" + h.label());
  }

  // Dihedral group of order 2n acting on an n-gon.
  inline FiniteGroup dihedral_group(std::size_t n) {
    detail::require(n >= 2, "dihedral group needs n >= 2");
    if (n == 2) {
      return direct_product(cyclic_group(2), cyclic_group(2)).relabel("D2");
    }
    Permutation rot(n), ref(n);
    for (std::size_t i = 0; i < n; ++i) {
      rot[i] = static_cast<Elt>((i + 1) % n);
      ref[i] = static_cast<Elt>((n - i) % n);
    }
    return group_from_generators(n, {rot, ref}, default_order_cap, "D" + std::to_string(n));
  }

  inline FiniteGroup symmetric_group(std::size_t n) {
    if (n <= 1) {
      return trivial_group();
    }
    Permutation cyc(n), tr(n);
    std::iota(tr.begin(), tr.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      cyc[i] = static_cast<Elt>((i + 1) % n);
    }
    std::swap(tr[0], tr[1]);
    return group_from_generators(n, {cyc, tr}, default_order_cap, "S" + std::to_string(n));
  }

  inline FiniteGroup alternating_group_4() {
    return group_from_generators(4, {{1, 2, 0, 3}, {1, 0, 3, 2}}, default_order_cap, "A4");
  }

  inline FiniteGroup quaternion_group() {
    // i = (0 1 2 3)(4 5 6 7), j = (0 4 2 6)(1 7 3 5) on 8 points
    return group_from_generators(8, {{1, 2, 3, 0, 5, 6, 7, 4}, {4, 7, 6, 5, 2, 1, 0, 3}},
                                 default_order_cap, "Q8");
  }

  // Upper unitriangular 3x3 matrices over Z/p: (a,b,c)(a',b',c') =
  // (a+a', b+b', c+c'+ab').
  inline FiniteGroup heisenberg_group(std::size_t p) {
    std::size_t const n = p * p * p;
    auto unpack = [p](std::size_t x) {
      return std::array<std::size_t, 3>{x / (p * p), (x / p) % p, x % p};
    };
    return group_from_operation(
        n,
        [&](std::size_t x, std::size_t y) {
          auto [a, b, c]    = unpack(x);
          auto [a2, b2, c2] = unpack(y);
          return ((a + a2) % p) * p * p + ((b + b2) % p) * p + (c + c2 + a * b2) % p;
        },
        "Heis" + std::to_string(n));
  }

  ////////////////////////////////////////////////////////////////////////
  // Subgroups
  ////////////////////////////////////////////////////////////////////////

  class Subgroup {
   public:
    Subgroup() = default;

    // Throws ValidationError unless `elements` is a subgroup of `parent`.
    Subgroup(FiniteGroup parent, std::vector<Elt> elements)
        : _parent(std::move(parent)), _elements(std::move(elements)) {
      std::sort(_elements.begin(), _elements.end());
      _elements.erase(std::unique(_elements.begin(), _elements.end()), _elements.end());
      std::vector<char> in(_parent.order(), 0);
      for (Elt x : _elements) {
        detail::require(x >= 0 && static_cast<std::size_t>(x) < _parent.order(),
                        "subgroup element out of range");
        in[x] = 1;
      }
      detail::require(in[_parent.identity()], "subgroup does not contain the identity");
      for (Elt x : _elements) {
        detail::require(in[_parent.inv(x)], "subgroup is not closed under inversion");
        for (Elt y : _elements) {
          detail::require(in[_parent.mul(x, y)], "subgroup is not closed under multiplication");
        }
      }
    }

    FiniteGroup const& parent() const noexcept {
      return _parent;
    }

    std::vector<Elt> const& elements() const noexcept {
      return _elements;
    }

    std::size_t order() const noexcept {
      return _elements.size();
    }

    bool contains(Elt x) const {
      return std::binary_search(_elements.begin(), _elements.end(), x);
    }

    bool is_subset_of(Subgroup const& that) const {
      return std::includes(that._elements.begin(), that._elements.end(), _elements.begin(),
                           _elements.end());
    }

    bool is_normal() const {
      for (std::size_t g = 0; g < _parent.order(); ++g) {
        for (Elt x : _elements) {
          if (!contains(_parent.conj(Elt(g), x))) {
            return false;
          }
        }
      }
      return true;
    }

    bool operator==(Subgroup const& that) const {
      return _parent == that._parent && _elements == that._elements;
    }

   private:
    FiniteGroup      _parent;
    std::vector<Elt> _elements{0};
  };

  inline Subgroup generated_subgroup(FiniteGroup const& g, std::vector<Elt> const& gens) {
    std::vector<char> in(g.order(), 0);
    std::vector<Elt>  elts{g.identity()};
    in[g.identity()] = 1;
    for (Elt s : gens) {
      detail::require(s >= 0 && static_cast<std::size_t>(s) < g.order(),
                      "subgroup generator out of range");
    }
    for (std::size_t k = 0; k < elts.size(); ++k) {
      for (Elt s : gens) {
        Elt y = g.mul(elts[k], s);
        if (!in[y]) {
          in[y] = 1;
          elts.push_back(y);
        }
      }
    }
    return Subgroup(g, std::move(elts));
  }

  inline Subgroup whole_group(FiniteGroup const& g) {
    std::vector<Elt> all(g.order());
    std::iota(all.begin(), all.end(), 0);
    return Subgroup(g, std::move(all));
  }

  inline Subgroup trivial_subgroup(FiniteGroup const& g) {
    return Subgroup(g, {g.identity()});
  }

  // Smallest normal subgroup containing s: closure of all conjugates.
  inline Subgroup normal_closure(FiniteGroup const& g, Subgroup const& s) {
    detail::require(s.parent() == g, "subgroup does not belong to this group");
    std::vector<Elt> gens;
    std::vector<char> seen(g.order(), 0);
    for (Elt x : s.elements()) {
      for (std::size_t h = 0; h < g.order(); ++h) {
        Elt y = g.conj(Elt(h), x);
        if (!seen[y]) {
          seen[y] = 1;
          gens.push_back(y);
        }
      }
    }
    return generated_subgroup(g, gens);
  }

  inline Subgroup commutator_subgroup(FiniteGroup const& g) {
    std::vector<Elt>  gens;
    std::vector<char> seen(g.order(), 0);
    for (std::size_t a = 0; a < g.order(); ++a) {
      for (std::size_t b = 0; b < g.order(); ++b) {
        Elt c = g.commutator(Elt(a), Elt(b));
        if (!seen[c]) {
          seen[c] = 1;
          gens.push_back(c);
        }
      }
    }
    return generated_subgroup(g, gens);
  }

  ////////////////////////////////////////////////////////////////////////
  // Homomorphisms
  ////////////////////////////////////////////////////////////////////////

  class GroupHom {
   public:
    GroupHom() = default;

    GroupHom(FiniteGroup source, FiniteGroup target, std::vector<Elt> images)
        : _source(std::move(source)), _target(std::move(target)), _images(std::move(images)) {
      detail::require(_images.size() == _source.order(), "hom needs one image per element");
      for (Elt y : _images) {
        detail::require(y >= 0 && static_cast<std::size_t>(y) < _target.order(),
                        "hom image out of range");
      }
      detail::require(_images[_source.identity()] == _target.identity(),
                      "hom does not preserve the identity");
      for (std::size_t a = 0; a < _source.order(); ++a) {
        for (std::size_t b = 0; b < _source.order(); ++b) {
          detail::require(_images[_source.mul(Elt(a), Elt(b))]
                              == _target.mul(_images[a], _images[b]),
                          "map is not multiplicative");
        }
      }
    }

    // Extends generator images to a hom; throws if they are inconsistent.
    static GroupHom from_generator_images(FiniteGroup const&             source,
                                          FiniteGroup const&             target,
                                          std::vector<std::pair<Elt, Elt>> const& gens) {
      std::vector<Elt> img(source.order(), -1);
      img[source.identity()] = target.identity();
      std::vector<Elt> queue{source.identity()};
      for (std::size_t k = 0; k < queue.size(); ++k) {
        for (auto [s, t] : gens) {
          Elt x = source.mul(queue[k], s);
          Elt y = target.mul(img[queue[k]], t);
          if (img[x] < 0) {
            img[x] = y;
            queue.push_back(x);
          } else if (img[x] != y) {
            throw ValidationError("generator images do not define a homomorphism");
          }
        }
      }
      detail::require(queue.size() == source.order(), "generator list does not generate the source");
      return GroupHom(source, target, std::move(img));
    }

    static GroupHom identity(FiniteGroup const& g) {
      std::vector<Elt> img(g.order());
      std::iota(img.begin(), img.end(), 0);
      return GroupHom(g, g, std::move(img));
    }

    FiniteGroup const& source() const noexcept {
      return _source;
    }

    FiniteGroup const& target() const noexcept {
      return _target;
    }

    std::vector<Elt> const& images() const noexcept {
      return _images;
    }

    Elt operator()(Elt x) const {
      return _images[static_cast<std::size_t>(x)];
    }

    bool is_surjective() const {
      std::vector<char> hit(_target.order(), 0);
      for (Elt y : _images) {
        hit[y] = 1;
      }
      return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
    }

    bool is_injective() const {
      return kernel().order() == 1;
    }

    Subgroup kernel() const {
      std::vector<Elt> k;
      for (std::size_t x = 0; x < _source.order(); ++x) {
        if (_images[x] == _target.identity()) {
          k.push_back(Elt(x));
        }
      }
      return Subgroup(_source, std::move(k));
    }

    Subgroup image_of(Subgroup const& h) const {
      std::vector<Elt> out;
      for (Elt x : h.elements()) {
        out.push_back(_images[x]);
      }
      return Subgroup(_target, std::move(out));
    }

    Subgroup preimage(Subgroup const& h) const {
      std::vector<Elt> out;
      for (std::size_t x = 0; x < _source.order(); ++x) {
        if (h.contains(_images[x])) {
          out.push_back(Elt(x));
        }
      }
      return Subgroup(_source, std::move(out));
    }

    // this after first
    GroupHom after(GroupHom const& first) const {
      std::vector<Elt> img(first.source().order());
      for (std::size_t x = 0; x < img.size(); ++x) {
        img[x] = _images[first(Elt(x))];
      }
      return GroupHom(first.source(), _target, std::move(img));
    }

   private:
    FiniteGroup      _source;
    FiniteGroup      _target;
    std::vector<Elt> _images{0};
  };

  // The subgroup as a group in its own right (elements in increasing parent
  // order) together with the inclusion.
  inline std::pair<FiniteGroup, GroupHom> subgroup_as_group(Subgroup const& h) {
    auto const&         g    = h.parent();
    auto const&         elts = h.elements();
    std::map<Elt, Elt>  pos;
    for (std::size_t i = 0; i < elts.size(); ++i) {
      pos[elts[i]] = Elt(i);
    }
    auto sub = group_from_operation(
        elts.size(), [&](std::size_t a, std::size_t b) { return pos.at(g.mul(elts[a], elts[b])); },
        g.label() + "_sub" + std::to_string(elts.size()));
    return {sub, GroupHom(sub, g, elts)};
  }

  struct Quotient {
    FiniteGroup      group;
    GroupHom         projection;
    std::vector<Elt> representatives;  // minimal element index per coset
  };

  // G/N on coset representatives (minimal index per coset).
  inline Quotient quotient_group(FiniteGroup const& g, Subgroup const& n) {
    detail::require(n.parent() == g, "subgroup does not belong to this group");
    if (!n.is_normal()) {
      throw NormalityError("quotient by a subgroup that is not normal");
    }
    std::vector<Elt> coset(g.order(), -1);
    std::vector<Elt> reps;
    for (std::size_t x = 0; x < g.order(); ++x) {
      if (coset[x] >= 0) {
        continue;
      }
      Elt c = Elt(reps.size());
      reps.push_back(Elt(x));
      for (Elt k : n.elements()) {
        coset[g.mul(Elt(x), k)] = c;
      }
    }
    auto q = group_from_operation(
        reps.size(),
        [&](std::size_t a, std::size_t b) { return coset[g.mul(reps[a], reps[b])]; },
        g.label() + "/" + std::to_string(n.order()));
    return {q, GroupHom(g, q, coset), reps};
  }

  struct Abelianization {
    FiniteAbelianGroup group;
    std::vector<Vec>   images;  // projection of every element of G
    Subgroup           commutator;

    Vec const& operator()(Elt g) const {
      return images[static_cast<std::size_t>(g)];
    }
  };

  // G^ab = G/[G,G] in invariant-factor form plus the projection.
  inline Abelianization abelianization(FiniteGroup const& g) {
    auto comm = commutator_subgroup(g);
    auto quo  = quotient_group(g, comm);
    auto const& q = quo.group;
    auto gens = q.generators();
    std::size_t const k = gens.size();
    // coordinates along a BFS tree of the Cayley graph
    std::vector<Vec>  coord(q.order());
    std::vector<char> seen(q.order(), 0);
    coord[q.identity()] = Vec(k, 0);
    seen[q.identity()]  = 1;
    std::vector<Elt> order{q.identity()};
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        Elt y = q.mul(order[i], gens[j]);
        if (!seen[y]) {
          seen[y] = 1;
          coord[y] = coord[order[i]];
          coord[y][j] += 1;
          order.push_back(y);
        }
      }
    }
    Int n = 1;
    for (std::size_t x = 0; x < q.order(); ++x) {
      n = lcm(n, Int(q.element_order(Elt(x))));
    }
    ModLattice rel(k, n);
    for (std::size_t x = 0; x < q.order(); ++x) {
      for (std::size_t j = 0; j < k; ++j) {
        Vec r         = coord[x];
        r[j]         += 1;
        auto const& t = coord[q.mul(Elt(x), gens[j])];
        for (std::size_t l = 0; l < k; ++l) {
          r[l] -= t[l];
        }
        rel.insert(r);
      }
    }
    Subquotient view(full_lattice(k, n), rel);
    Abelianization out{view.group(), std::vector<Vec>(g.order()), comm};
    for (std::size_t x = 0; x < g.order(); ++x) {
      out.images[x] = view.coords(coord[quo.projection(Elt(x))]);
    }
    return out;
  }

}  // namespace corfree

#endif  // CORFREE_GRP_HPP_
