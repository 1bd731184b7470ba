#ifndef CORFREE_COH_HPP_
#define CORFREE_COH_HPP_

// Cohomology of finite groups with coefficients in finite modules.
//
// Cochains are inhomogeneous and normalized.  A 1-cocycle is determined by
// its values on a generating set S, a normalized 2-cocycle by its values on
// G x S; the remaining values follow from the cocycle identity along a
// breadth-first spanning tree of the Cayley graph.  The cocycle identity is
// then imposed on every edge, which is enough: for degree 2, if
// (df)(g, h, s) = 0 for all s in S then (df)(g, h, -) is constant along right
// multiplication by S and vanishes at 1.

#include <cstddef>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ab.hpp"
#include "error.hpp"
#include "grp.hpp"

namespace corfree {

  inline constexpr std::size_t default_cochain_cap = 1 << 16;

  struct CohomologyOptions {
    // Upper bound on |G|^degree * rank(A).
    std::size_t cap = default_cochain_cap;
  };

  ////////////////////////////////////////////////////////////////////////
  // GModule
  ////////////////////////////////////////////////////////////////////////

  class GModule {
   public:
    struct trusted_t {};
    static constexpr trusted_t trusted{};

    GModule() : _action{identity_matrix(0)} {}

    // Validates that g -> action[g] is a homomorphism into Aut(coeff).
    GModule(FiniteGroup group, FiniteAbelianGroup coeff, std::vector<Matrix> action)
        : GModule(std::move(group), std::move(coeff), std::move(action), trusted) {
      std::size_t const n = _group.order();
      for (std::size_t g = 0; g < n; ++g) {
        detail::require(AbHom(_coeff, _coeff, _action[g], AbHom::unchecked).is_well_defined(),
                        "action matrix is not an endomorphism of the coefficients");
      }
      detail::require(reduce(_action[_group.identity()]) == reduce(identity_matrix(_coeff.rank())),
                      "identity does not act as the identity matrix");
      for (std::size_t g = 0; g < n; ++g) {
        for (std::size_t h = 0; h < n; ++h) {
          detail::require(reduce(multiply(_action[g], _action[h]))
                              == reduce(_action[_group.mul(Elt(g), Elt(h))]),
                          "action is not a homomorphism");
        }
      }
    }

    GModule(FiniteGroup group, FiniteAbelianGroup coeff, std::vector<Matrix> action, trusted_t)
        : _group(std::move(group)), _coeff(std::move(coeff)), _action(std::move(action)) {
      detail::require(_action.size() == _group.order(), "need one action matrix per element");
      for (auto& m : _action) {
        detail::require(m.size() == _coeff.rank(), "action matrix has wrong shape");
        for (auto const& row : m) {
          detail::require(row.size() == _coeff.rank(), "action matrix has wrong shape");
        }
        m = reduce(m);
      }
    }

    static GModule trivial(FiniteGroup group, FiniteAbelianGroup coeff) {
      std::vector<Matrix> action(group.order(), identity_matrix(coeff.rank()));
      return GModule(std::move(group), std::move(coeff), std::move(action), trusted);
    }

    // The action is determined by the matrices of a generating set.  An
    // empty list means the trivial action; a nonempty list that does not
    // generate the group is rejected.
    static GModule from_generators(FiniteGroup const&                         group,
                                   FiniteAbelianGroup const&                  coeff,
                                   std::vector<std::pair<Elt, Matrix>> const& gens) {
      if (gens.empty()) {
        return trivial(group, coeff);
      }
      std::size_t const   n = group.order();
      std::vector<Matrix> action(n);
      std::vector<char>   seen(n, 0);
      action[group.identity()] = identity_matrix(coeff.rank());
      seen[group.identity()]   = 1;
      std::vector<Elt> queue{group.identity()};
      for (auto const& [s, m] : gens) {
        detail::require(s >= 0 && static_cast<std::size_t>(s) < n, "action element out of range");
        detail::require(m.size() == coeff.rank(), "action matrix has wrong shape");
      }
      for (std::size_t k = 0; k < queue.size(); ++k) {
        for (auto const& [s, m] : gens) {
          Elt y = group.mul(queue[k], s);
          if (!seen[y]) {
            seen[y]   = 1;
            action[y] = multiply(action[queue[k]], m);
            queue.push_back(y);
          }
        }
      }
      detail::require(queue.size() == n,
                      "action is given on elements that do not generate the group");
      return GModule(group, coeff, std::move(action));
    }

    FiniteGroup const& group() const noexcept {
      return _group;
    }

    FiniteAbelianGroup const& coeff() const noexcept {
      return _coeff;
    }

    Matrix const& action(Elt g) const {
      return _action[static_cast<std::size_t>(g)];
    }

    Vec act(Elt g, Vec const& a) const {
      auto const& m = action(g);
      Vec         out(_coeff.rank(), 0);
      for (std::size_t i = 0; i < out.size(); ++i) {
        Int acc = 0;
        for (std::size_t j = 0; j < a.size(); ++j) {
          acc += m[i][j] * a[j];
        }
        out[i] = mod(acc, _coeff.factors()[i]);
      }
      return out;
    }

    bool is_trivial_action() const {
      auto id = identity_matrix(_coeff.rank());
      for (auto const& m : _action) {
        if (m != reduce(id)) {
          return false;
        }
      }
      return true;
    }

    // Module for phi.source() acting through phi.
    GModule pullback(GroupHom const& phi) const {
      detail::require(phi.target() == _group, "pullback along a hom into another group");
      std::vector<Matrix> action(phi.source().order());
      for (std::size_t x = 0; x < action.size(); ++x) {
        action[x] = _action[phi(Elt(x))];
      }
      return GModule(phi.source(), _coeff, std::move(action), trusted);
    }

    GModule restrict_to(Subgroup const& h) const {
      return pullback(subgroup_as_group(h).second);
    }

   private:
    Matrix reduce(Matrix m) const {
      for (std::size_t i = 0; i < m.size(); ++i) {
        for (auto& x : m[i]) {
          x = mod(x, _coeff.factors()[i]);
        }
      }
      return m;
    }

    FiniteGroup         _group;
    FiniteAbelianGroup  _coeff;
    std::vector<Matrix> _action;
  };

  ////////////////////////////////////////////////////////////////////////
  // Cochains
  ////////////////////////////////////////////////////////////////////////

  // Inhomogeneous cochain: degree 0 holds one value, degree 1 one value per
  // element, degree 2 one value per pair (g, h) at index g * |G| + h.
  struct Cochain {
    int              degree = 0;
    std::vector<Vec> values;

    Vec const& operator()(std::size_t g) const {
      return values[g];
    }

    bool operator==(Cochain const&) const = default;
  };

  // Exhaustive check of the cocycle identity of the given degree.
  inline bool is_cocycle(GModule const& m, Cochain const& f) {
    auto const&       g = m.group();
    auto const&       a = m.coeff();
    std::size_t const n = g.order();
    switch (f.degree) {
      case 0:
        for (std::size_t x = 0; x < n; ++x) {
          if (m.act(Elt(x), f.values[0]) != a.normalize(f.values[0])) {
            return false;
          }
        }
        return true;
      case 1:
        for (std::size_t x = 0; x < n; ++x) {
          for (std::size_t y = 0; y < n; ++y) {
            Vec rhs = a.add(f.values[x], m.act(Elt(x), f.values[y]));
            if (a.normalize(f.values[g.mul(Elt(x), Elt(y))]) != rhs) {
              return false;
            }
          }
        }
        return true;
      case 2:
        for (std::size_t x = 0; x < n; ++x) {
          for (std::size_t y = 0; y < n; ++y) {
            for (std::size_t z = 0; z < n; ++z) {
              Vec lhs = a.add(m.act(Elt(x), f.values[y * n + z]),
                              f.values[x * n + g.mul(Elt(y), Elt(z))]);
              Vec rhs = a.add(f.values[g.mul(Elt(x), Elt(y)) * n + z], f.values[x * n + y]);
              if (lhs != rhs) {
                return false;
              }
            }
          }
        }
        return true;
      default:
        throw PreconditionError("cocycle check is implemented for degrees 0..2");
    }
  }

  // Coboundary of a normalized 1-cochain c: (dc)(g,h) = g c(h) - c(gh) + c(g).
  inline Cochain coboundary(GModule const& m, Cochain const& c) {
    auto const&       g = m.group();
    auto const&       a = m.coeff();
    std::size_t const n = g.order();
    Cochain           out{c.degree + 1, {}};
    if (c.degree == 0) {
      for (std::size_t x = 0; x < n; ++x) {
        out.values.push_back(a.add(m.act(Elt(x), c.values[0]), a.scale(c.values[0], -1)));
      }
      return out;
    }
    detail::require<PreconditionError>(c.degree == 1, "coboundary implemented for degrees 0, 1");
    out.values.resize(n * n);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        Vec v = a.add(m.act(Elt(x), c.values[y]), c.values[x]);
        out.values[x * n + y] = a.add(v, a.scale(c.values[g.mul(Elt(x), Elt(y))], -1));
      }
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Fixed points
  ////////////////////////////////////////////////////////////////////////

  struct FixedSubmodule {
    FiniteAbelianGroup group;
    AbHom              inclusion;  // group -> coeff
    Subquotient        view;       // fixed lattice / relations, coeff coordinates

    // Coordinates in `group` of a fixed element of the coefficients.
    Vec coords(Vec const& a) const {
      return view.coords(a);
    }
  };

  inline FixedSubmodule fixed_points(GModule const& m, std::vector<Elt> const& elements) {
    auto const& a = m.coeff();
    Int const   n = a.exponent();
    Matrix      rows;
    for (Elt h : elements) {
      auto const& mh = m.action(h);
      for (std::size_t i = 0; i < a.rank(); ++i) {
        Vec r(a.rank());
        for (std::size_t j = 0; j < a.rank(); ++j) {
          r[j] = (mh[i][j] - (i == j ? 1 : 0)) * (n / a.factors()[i]);
        }
        rows.push_back(std::move(r));
      }
    }
    auto lat = kernel_mod(rows, a.rank(), n);
    auto rel = a.relations(n);
    for (std::size_t i = 0; i < rel.dim(); ++i) {
      lat.insert(rel.basis_row(i));
    }
    Subquotient view(lat, rel);
    Matrix      incl = zero_matrix(a.rank(), view.group().rank());
    for (std::size_t j = 0; j < view.group().rank(); ++j) {
      Vec e(view.group().rank(), 0);
      e[j]   = 1;
      Vec im = view.lift(e);
      for (std::size_t i = 0; i < a.rank(); ++i) {
        incl[i][j] = im[i];
      }
    }
    return {view.group(), AbHom(view.group(), a, std::move(incl)), view};
  }

  // A^H = {a : h a = a for all h in H}.
  inline FixedSubmodule fixed_submodule(GModule const& m, Subgroup const& h) {
    detail::require(h.parent() == m.group(), "subgroup does not belong to the module's group");
    return fixed_points(m, h.elements());
  }

  ////////////////////////////////////////////////////////////////////////
  // Cocycle spaces
  ////////////////////////////////////////////////////////////////////////

  namespace detail {

    class CocycleSpace {
     public:
      CocycleSpace(GModule module, int degree, CohomologyOptions const& opts)
          : _module(std::move(module)), _degree(degree) {
        auto const&       g = _module.group();
        auto const&       a = _module.coeff();
        std::size_t const n = g.order();
        std::size_t const r = a.rank();
        std::size_t       size = r;
        for (int k = 0; k < degree; ++k) {
          size *= n;
        }
        if (size > opts.cap) {
          throw SizeCapError("cochain space |G|^" + std::to_string(degree) + " * rank = "
                             + std::to_string(size) + " exceeds cap " + std::to_string(opts.cap));
        }
        _modulus = a.exponent();
        _gens    = g.generators();
        // spanning tree: reached[h] = (predecessor, generator slot)
        _tree_order = {g.identity()};
        _tree_parent.assign(n, {-1, 0});
        std::vector<char> seen(n, 0);
        seen[g.identity()] = 1;
        for (std::size_t k = 0; k < _tree_order.size(); ++k) {
          for (std::size_t s = 0; s < _gens.size(); ++s) {
            Elt y = g.mul(_tree_order[k], _gens[s]);
            if (!seen[y]) {
              seen[y]         = 1;
              _tree_parent[y] = {_tree_order[k], s};
              _tree_order.push_back(y);
            }
          }
        }
        if (degree == 0) {
          build_degree0();
        } else if (degree == 1) {
          build_degree1();
        } else if (degree == 2) {
          build_degree2();
        } else {
          throw PreconditionError("direct cocycle spaces exist only for degrees 0..2");
        }
        _view = Subquotient(_cocycles, _coboundaries);
      }

      GModule const& module() const noexcept {
        return _module;
      }

      int degree() const noexcept {
        return _degree;
      }

      Subquotient const& view() const noexcept {
        return _view;
      }

      std::size_t param_dim() const noexcept {
        return _param_dim;
      }

      std::vector<Elt> const& generators() const noexcept {
        return _gens;
      }

      // Parameters of a cochain: f itself (degree 0), f(s) (degree 1),
      // f(g, s) for g != 1 (degree 2).
      Vec params_of(Cochain const& f) const {
        require<Error>(f.degree == _degree, "cochain has the wrong degree");
        auto const&       a = _module.coeff();
        std::size_t const r = a.rank();
        std::size_t const n = _module.group().order();
        Vec               u(_param_dim, 0);
        if (_degree == 0) {
          return a.normalize(f.values[0]);
        }
        if (_degree == 1) {
          for (std::size_t s = 0; s < _gens.size(); ++s) {
            Vec v = a.normalize(f.values[_gens[s]]);
            std::copy(v.begin(), v.end(), u.begin() + static_cast<std::ptrdiff_t>(s * r));
          }
          return u;
        }
        for (std::size_t x = 0; x < n; ++x) {
          if (Elt(x) == _module.group().identity()) {
            continue;
          }
          for (std::size_t s = 0; s < _gens.size(); ++s) {
            Vec v = a.normalize(f.values[x * n + _gens[s]]);
            std::copy(v.begin(), v.end(),
                      u.begin() + static_cast<std::ptrdiff_t>(slot2(Elt(x), s) * r));
          }
        }
        return u;
      }

      // The unique cocycle with the given parameters (parameters must
      // satisfy the cocycle equations).
      Cochain expand(Vec const& u) const {
        auto const&       a = _module.coeff();
        std::size_t const n = _module.group().order();
        Cochain           f{_degree, {}};
        if (_degree == 0) {
          f.values.push_back(a.normalize(u));
          return f;
        }
        f.values.reserve(_expansion.size());
        for (auto const& m : _expansion) {
          Vec v(a.rank(), 0);
          for (std::size_t i = 0; i < a.rank(); ++i) {
            Int acc = 0;
            for (std::size_t j = 0; j < u.size(); ++j) {
              acc += m[i][j] * u[j];
            }
            v[i] = mod(acc, a.factors()[i]);
          }
          f.values.push_back(std::move(v));
        }
        (void) n;
        return f;
      }

      Vec class_of(Cochain const& f) const {
        return _view.coords(params_of(f));
      }

      Cochain representative(Vec const& coords) const {
        return expand(_view.lift(coords));
      }

     private:
      std::size_t slot2(Elt x, std::size_t s) const {
        auto const& g = _module.group();
        std::size_t idx = static_cast<std::size_t>(x);
        if (x > g.identity()) {
          --idx;
        }
        return idx * _gens.size() + s;
      }

      ModLattice param_relations() const {
        auto const&       a = _module.coeff();
        std::size_t const r = a.rank();
        ModLattice        rel(_param_dim, _modulus);
        for (std::size_t b = 0; b * r < _param_dim; ++b) {
          for (std::size_t i = 0; i < r; ++i) {
            Vec e(_param_dim, 0);
            e[b * r + i] = a.factors()[i];
            rel.insert(e);
          }
        }
        return rel;
      }

      // Rows of `eqs` are r x U blocks; coordinate i is reduced mod d_i.
      void append_equation(Matrix& eqs, Matrix const& block) const {
        auto const& a = _module.coeff();
        for (std::size_t i = 0; i < block.size(); ++i) {
          Vec  row(_param_dim);
          bool nonzero = false;
          for (std::size_t j = 0; j < _param_dim; ++j) {
            row[j]  = mod(block[i][j], a.factors()[i]) * (_modulus / a.factors()[i]);
            nonzero = nonzero || row[j] != 0;
          }
          if (nonzero) {
            eqs.push_back(std::move(row));
          }
        }
      }

      void finish(Matrix const& eqs, std::vector<Vec> const& boundary_gens) {
        auto rel   = param_relations();
        _cocycles  = kernel_mod(eqs, _param_dim, _modulus);
        for (std::size_t i = 0; i < rel.dim(); ++i) {
          _cocycles.insert(rel.basis_row(i));
        }
        _coboundaries = rel;
        for (auto const& b : boundary_gens) {
          _coboundaries.insert(b);
        }
      }

      void build_degree0() {
        auto const& a = _module.coeff();
        _param_dim    = a.rank();
        Matrix eqs;
        for (std::size_t x = 0; x < _module.group().order(); ++x) {
          Matrix block = _module.action(Elt(x));
          for (std::size_t i = 0; i < a.rank(); ++i) {
            block[i][i] -= 1;
          }
          append_equation(eqs, block);
        }
        finish(eqs, {});
      }

      void build_degree1() {
        auto const&       g = _module.group();
        auto const&       a = _module.coeff();
        std::size_t const n = g.order();
        std::size_t const r = a.rank();
        std::size_t const S = _gens.size();
        _param_dim          = S * r;
        auto block_select = [&](std::size_t s) {
          Matrix e = zero_matrix(r, _param_dim);
          for (std::size_t i = 0; i < r; ++i) {
            e[i][s * r + i] = 1;
          }
          return e;
        };
        auto add_into = [&](Matrix& dst, Matrix const& src, Int sign) {
          for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < _param_dim; ++j) {
              dst[i][j] = mod(dst[i][j] + sign * src[i][j], _modulus);
            }
          }
        };
        // f(g s) = f(g) + g f(s)
        _expansion.assign(n, zero_matrix(r, _param_dim));
        for (std::size_t k = 1; k < _tree_order.size(); ++k) {
          Elt  h          = _tree_order[k];
          auto [prev, s]  = _tree_parent[h];
          _expansion[h]   = _expansion[prev];
          add_into(_expansion[h], multiply(_module.action(prev), block_select(s)), 1);
        }
        Matrix eqs;
        for (std::size_t x = 0; x < n; ++x) {
          for (std::size_t s = 0; s < S; ++s) {
            Matrix block = _expansion[g.mul(Elt(x), _gens[s])];
            add_into(block, _expansion[x], -1);
            add_into(block, multiply(_module.action(Elt(x)), block_select(s)), -1);
            append_equation(eqs, block);
          }
        }
        // principal crossed homomorphisms s -> s a - a
        std::vector<Vec> bgens;
        for (std::size_t j = 0; j < r; ++j) {
          Vec u(_param_dim, 0);
          for (std::size_t s = 0; s < S; ++s) {
            auto const& m = _module.action(_gens[s]);
            for (std::size_t i = 0; i < r; ++i) {
              u[s * r + i] = m[i][j] - (i == j ? 1 : 0);
            }
          }
          bgens.push_back(std::move(u));
        }
        finish(eqs, bgens);
      }

      void build_degree2() {
        auto const&       g = _module.group();
        auto const&       a = _module.coeff();
        std::size_t const n = g.order();
        std::size_t const r = a.rank();
        std::size_t const S = _gens.size();
        Elt const         e = g.identity();
        _param_dim          = (n - 1) * S * r;
        // E_{x,s}: selects parameter block f(x, s); zero at x = 1
        auto add_select = [&](Matrix& dst, Elt x, std::size_t s, Matrix const* act, Int sign) {
          if (x == e) {
            return;
          }
          std::size_t base = slot2(x, s) * r;
          for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < r; ++j) {
              Int c = act == nullptr ? (i == j ? 1 : 0) : (*act)[i][j];
              if (c != 0) {
                dst[i][base + j] = mod(dst[i][base + j] + sign * c, _modulus);
              }
            }
          }
        };
        auto add_into = [&](Matrix& dst, Matrix const& src, Int sign) {
          for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < _param_dim; ++j) {
              if (src[i][j] != 0) {
                dst[i][j] = mod(dst[i][j] + sign * src[i][j], _modulus);
              }
            }
          }
        };
        // f(x, h s) = f(x, h) + f(x h, s) - x f(h, s)
        _expansion.assign(n * n, zero_matrix(r, _param_dim));
        for (std::size_t x = 0; x < n; ++x) {
          for (std::size_t k = 1; k < _tree_order.size(); ++k) {
            Elt  h         = _tree_order[k];
            auto [prev, s] = _tree_parent[h];
            Matrix m       = _expansion[x * n + prev];
            add_select(m, g.mul(Elt(x), prev), s, nullptr, 1);
            add_select(m, prev, s, &_module.action(Elt(x)), -1);
            _expansion[x * n + h] = std::move(m);
          }
        }
        Matrix eqs;
        for (std::size_t x = 0; x < n; ++x) {
          for (std::size_t h = 0; h < n; ++h) {
            for (std::size_t s = 0; s < S; ++s) {
              Matrix block = _expansion[x * n + g.mul(Elt(h), _gens[s])];
              add_into(block, _expansion[x * n + h], -1);
              add_select(block, g.mul(Elt(x), Elt(h)), s, nullptr, -1);
              add_select(block, Elt(h), s, &_module.action(Elt(x)), 1);
              append_equation(eqs, block);
            }
          }
        }
        // coboundaries of c = e_{y, j}: f(x, s) = x c(s) - c(x s) + c(x)
        std::vector<Vec> bgens;
        for (std::size_t y = 0; y < n; ++y) {
          if (Elt(y) == e) {
            continue;
          }
          for (std::size_t j = 0; j < r; ++j) {
            Vec u(_param_dim, 0);
            for (std::size_t x = 0; x < n; ++x) {
              if (Elt(x) == e) {
                continue;
              }
              for (std::size_t s = 0; s < S; ++s) {
                std::size_t base = slot2(Elt(x), s) * r;
                if (_gens[s] == Elt(y)) {
                  auto const& m = _module.action(Elt(x));
                  for (std::size_t i = 0; i < r; ++i) {
                    u[base + i] += m[i][j];
                  }
                }
                if (g.mul(Elt(x), _gens[s]) == Elt(y)) {
                  u[base + j] -= 1;
                }
                if (Elt(x) == Elt(y)) {
                  u[base + j] += 1;
                }
              }
            }
            bgens.push_back(std::move(u));
          }
        }
        finish(eqs, bgens);
      }

      GModule                                   _module;
      int                                       _degree;
      Int                                       _modulus = 1;
      std::vector<Elt>                          _gens;
      std::vector<Elt>                          _tree_order;
      std::vector<std::pair<Elt, std::size_t>>  _tree_parent;
      std::size_t                               _param_dim = 0;
      std::vector<Matrix>                       _expansion;
      ModLattice                                _cocycles;
      ModLattice                                _coboundaries;
      Subquotient                               _view;
    };

  }  // namespace detail

  ////////////////////////////////////////////////////////////////////////
  // Cohomology groups
  ////////////////////////////////////////////////////////////////////////

  class CohomologyGroup {
   public:
    CohomologyGroup() = default;

    CohomologyGroup(GModule const& m, int degree, CohomologyOptions const& opts = {})
        : _space(std::make_shared<detail::CocycleSpace const>(m, degree, opts)) {
      auto const& value = _space->view().group();
      for (std::size_t k = 0; k < value.rank(); ++k) {
        Vec e(value.rank(), 0);
        e[k] = 1;
        _representatives.push_back(_space->representative(e));
      }
      std::ostringstream os;
      if (degree == 0) {
        os << "fixed points of " << m.coeff().to_string();
      } else {
        os << (degree == 1 ? "crossed homomorphisms" : "normalized 2-cocycles")
           << " parametrized by " << _space->param_dim() << " coordinates over "
           << _space->generators().size() << " generators";
      }
      _ambient = os.str();
    }

    int degree() const {
      return _space->degree();
    }

    FiniteAbelianGroup const& value() const {
      return _space->view().group();
    }

    // One cocycle per invariant factor of value().
    std::vector<Cochain> const& representatives() const noexcept {
      return _representatives;
    }

    std::string const& ambient() const noexcept {
      return _ambient;
    }

    GModule const& module() const {
      return _space->module();
    }

    // Class of a cocycle in invariant coordinates of value().
    Vec class_of(Cochain const& f) const {
      return _space->class_of(f);
    }

    Cochain cocycle(Vec const& coords) const {
      return _space->representative(coords);
    }

    // True iff f is a cocycle that is cohomologous to zero.
    bool is_coboundary(Cochain const& f) const {
      auto c = class_of(f);
      return std::all_of(c.begin(), c.end(), [](Int x) { return x == 0; });
    }

   private:
    std::shared_ptr<detail::CocycleSpace const> _space;
    std::vector<Cochain>                        _representatives;
    std::string                                 _ambient;
  };

  inline CohomologyGroup cohomology(GModule const& m, int degree, CohomologyOptions const& opts = {}) {
    return CohomologyGroup(m, degree, opts);
  }

  ////////////////////////////////////////////////////////////////////////
  // Maps between cohomology groups
  ////////////////////////////////////////////////////////////////////////

  // Pull back a cochain along phi: H -> G, pushing values through `values`
  // (a hom of coefficient groups given by its matrix, or none).
  inline Cochain pull_back(Cochain const&      f,
                           GroupHom const&     phi,
                           FiniteAbelianGroup const& target_coeff,
                           Matrix const*       values = nullptr) {
    std::size_t const m = phi.source().order();
    std::size_t const n = phi.target().order();
    auto push = [&](Vec const& v) {
      if (values == nullptr) {
        return target_coeff.normalize(v);
      }
      Vec out(target_coeff.rank(), 0);
      for (std::size_t i = 0; i < out.size(); ++i) {
        Int acc = 0;
        for (std::size_t j = 0; j < v.size(); ++j) {
          acc += (*values)[i][j] * v[j];
        }
        out[i] = mod(acc, target_coeff.factors()[i]);
      }
      return out;
    };
    Cochain out{f.degree, {}};
    if (f.degree == 0) {
      out.values.push_back(push(f.values[0]));
    } else if (f.degree == 1) {
      for (std::size_t x = 0; x < m; ++x) {
        out.values.push_back(push(f.values[phi(Elt(x))]));
      }
    } else {
      for (std::size_t x = 0; x < m; ++x) {
        for (std::size_t y = 0; y < m; ++y) {
          out.values.push_back(push(f.values[phi(Elt(x)) * n + phi(Elt(y))]));
        }
      }
    }
    return out;
  }

  struct Inflation {
    Quotient        quotient;         // G/N
    FixedSubmodule  fixed;            // A^N
    GModule         quotient_module;  // A^N as a G/N-module
    CohomologyGroup source;           // H^i(G/N, A^N)
    CohomologyGroup target;           // H^i(G, A)
    AbHom           map;
  };

  // H^i(G/N, A^N) -> H^i(G, A), induced by G -> G/N and A^N -> A.
  inline Inflation inflation(GModule const& m, Subgroup const& n, int degree,
                             CohomologyOptions const& opts = {}) {
    auto const& g = m.group();
    detail::require(n.parent() == g, "subgroup does not belong to the module's group");
    auto quo   = quotient_group(g, n);
    auto fixed = fixed_submodule(m, n);
    auto const& fa = fixed.group;
    std::vector<Matrix> action(quo.group.order());
    for (std::size_t q = 0; q < action.size(); ++q) {
      Elt    rep = quo.representatives[q];
      Matrix mat = zero_matrix(fa.rank(), fa.rank());
      for (std::size_t j = 0; j < fa.rank(); ++j) {
        Vec e(fa.rank(), 0);
        e[j]   = 1;
        Vec im = fixed.coords(m.act(rep, fixed.inclusion.apply(e)));
        for (std::size_t i = 0; i < fa.rank(); ++i) {
          mat[i][j] = im[i];
        }
      }
      action[q] = std::move(mat);
    }
    GModule qm(quo.group, fa, std::move(action), GModule::trusted);
    CohomologyGroup src(qm, degree, opts);
    CohomologyGroup tgt(m, degree, opts);
    Matrix          mat = zero_matrix(tgt.value().rank(), src.value().rank());
    for (std::size_t k = 0; k < src.representatives().size(); ++k) {
      auto pulled = pull_back(src.representatives()[k], quo.projection, m.coeff(),
                              &fixed.inclusion.matrix());
      Vec  c      = tgt.class_of(pulled);
      for (std::size_t i = 0; i < c.size(); ++i) {
        mat[i][k] = c[i];
      }
    }
    AbHom map(src.value(), tgt.value(), std::move(mat));
    return {std::move(quo), std::move(fixed), std::move(qm), std::move(src), std::move(tgt),
            std::move(map)};
  }

  struct Restriction {
    FiniteGroup     subgroup;
    CohomologyGroup source;  // H^i(G, A)
    CohomologyGroup target;  // H^i(H, A)
    AbHom           map;
  };

  inline Restriction restriction(GModule const& m, Subgroup const& h, int degree,
                                 CohomologyOptions const& opts = {}) {
    detail::require(h.parent() == m.group(), "subgroup does not belong to the module's group");
    auto [sub, incl] = subgroup_as_group(h);
    CohomologyGroup src(m, degree, opts);
    CohomologyGroup tgt(m.pullback(incl), degree, opts);
    Matrix          mat = zero_matrix(tgt.value().rank(), src.value().rank());
    for (std::size_t k = 0; k < src.representatives().size(); ++k) {
      Vec c = tgt.class_of(pull_back(src.representatives()[k], incl, m.coeff()));
      for (std::size_t i = 0; i < c.size(); ++i) {
        mat[i][k] = c[i];
      }
    }
    AbHom map(src.value(), tgt.value(), std::move(mat));
    return {sub, std::move(src), std::move(tgt), std::move(map)};
  }

  // Image of inflation from G/N~ where N~ is the normal closure of U.
  struct NrPart {
    Subgroup           closure;
    Inflation          inflation;
    FiniteAbelianGroup value;       // H^i_nr as an abstract group
    std::vector<Vec>   generators;  // in coordinates of inflation.target.value()
    ModLattice         lattice;     // the subgroup, in the same coordinates

    bool contains(Vec const& coords) const {
      return lattice.contains(coords);
    }
  };

  inline NrPart h_nr(FiniteGroup const& g, Subgroup const& u, GModule const& m, int degree,
                     CohomologyOptions const& opts = {}) {
    detail::require(m.group() == g, "module is over a different group");
    auto closure = normal_closure(g, u);
    auto infl    = inflation(m, closure, degree, opts);
    auto lat     = image_lattice(infl.map);
    std::vector<Vec> gens;
    for (std::size_t k = 0; k < infl.map.source().rank(); ++k) {
      Vec col(infl.map.target().rank());
      for (std::size_t i = 0; i < col.size(); ++i) {
        col[i] = infl.map.matrix()[i][k];
      }
      gens.push_back(std::move(col));
    }
    Subquotient view(lat, infl.map.target().relations(infl.map.modulus()));
    // re-express the lattice with the target's own modulus for membership tests
    ModLattice own = infl.map.target().relations(std::max<Int>(1, infl.map.target().exponent()));
    for (auto const& v : gens) {
      own.insert(v);
    }
    return {closure, std::move(infl), view.group(), std::move(gens), std::move(own)};
  }

  ////////////////////////////////////////////////////////////////////////
  // Coinduced modules and dimension shifting
  ////////////////////////////////////////////////////////////////////////

  struct Coinduced {
    GModule     coind;       // Maps(G, A), (g f)(x) = f(x g)
    AbHom       embedding;   // a -> (x -> x a)
    GModule     quotient;    // A' = Coind / A
    AbHom       projection;  // Coind -> A'
    Subquotient quotient_view;
  };

  // Coordinates of Maps(G, A): (coefficient i, point x) at index i * |G| + x,
  // which keeps the invariant factors sorted.
  inline Coinduced coinduced_module(GModule const& m) {
    auto const&       g = m.group();
    auto const&       a = m.coeff();
    std::size_t const n = g.order();
    std::size_t const r = a.rank();
    Vec               factors;
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t x = 0; x < n; ++x) {
        factors.push_back(a.factors()[i]);
      }
    }
    FiniteAbelianGroup coeff(factors);
    std::size_t const  dim = r * n;
    std::vector<Matrix> action(n, zero_matrix(dim, dim));
    for (std::size_t h = 0; h < n; ++h) {
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t x = 0; x < n; ++x) {
          // (h f)(x) = f(x h)
          action[h][i * n + x][i * n + g.mul(Elt(x), Elt(h))] = 1;
        }
      }
    }
    GModule coind(g, coeff, std::move(action), GModule::trusted);
    Matrix  emb = zero_matrix(dim, r);
    for (std::size_t x = 0; x < n; ++x) {
      auto const& mx = m.action(Elt(x));
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
          emb[i * n + x][j] = mx[i][j];
        }
      }
    }
    AbHom embedding(a, coeff, emb);
    Int const  big = coeff.exponent();
    ModLattice sub = coeff.relations(big);
    for (std::size_t j = 0; j < r; ++j) {
      Vec col(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        col[k] = emb[k][j];
      }
      sub.insert(col);
    }
    Subquotient view(full_lattice(dim, big), sub);
    auto const& qa = view.group();
    std::vector<Matrix> qaction(n, zero_matrix(qa.rank(), qa.rank()));
    for (std::size_t h = 0; h < n; ++h) {
      for (std::size_t j = 0; j < qa.rank(); ++j) {
        Vec e(qa.rank(), 0);
        e[j]   = 1;
        Vec im = view.coords(coind.act(Elt(h), coeff.normalize(view.lift(e))));
        for (std::size_t i = 0; i < qa.rank(); ++i) {
          qaction[h][i][j] = im[i];
        }
      }
    }
    GModule quotient(g, qa, std::move(qaction), GModule::trusted);
    Matrix  proj = zero_matrix(qa.rank(), dim);
    for (std::size_t k = 0; k < dim; ++k) {
      Vec e(dim, 0);
      e[k]   = 1;
      Vec im = view.coords(e);
      for (std::size_t i = 0; i < qa.rank(); ++i) {
        proj[i][k] = im[i];
      }
    }
    AbHom projection(coeff, qa, std::move(proj));
    return {std::move(coind), std::move(embedding), std::move(quotient), std::move(projection),
            std::move(view)};
  }

  struct DimensionShiftReport {
    FiniteAbelianGroup h1_shifted;  // H^1(G, A')
    FiniteAbelianGroup h2;          // H^2(G, A)
    AbHom              connecting;  // H^1(G, A') -> H^2(G, A)
    bool               lands_in_a    = false;  // every d(lift) takes values in A
    bool               isomorphism   = false;
    bool               passed        = false;
    std::string        detail;
  };

  // Connecting map of 0 -> A -> Coind A -> A' -> 0 in degree 1, computed on
  // representatives, compared against the direct H^2(G, A).
  inline DimensionShiftReport dimension_shift_check(GModule const& m,
                                                    CohomologyOptions const& opts = {}) {
    auto const&       g = m.group();
    auto const&       a = m.coeff();
    std::size_t const n = g.order();
    std::size_t const r = a.rank();
    auto              co = coinduced_module(m);
    CohomologyGroup   h1(co.quotient, 1, opts);
    CohomologyGroup   h2(m, 2, opts);
    DimensionShiftReport out;
    out.h1_shifted  = h1.value();
    out.h2          = h2.value();
    out.lands_in_a  = true;
    auto const& big = co.coind.coeff();
    Matrix      mat = zero_matrix(h2.value().rank(), h1.value().rank());
    for (std::size_t k = 0; k < h1.representatives().size(); ++k) {
      auto const&      f = h1.representatives()[k];
      std::vector<Vec> lifted(n);
      for (std::size_t x = 0; x < n; ++x) {
        lifted[x] = big.normalize(co.quotient_view.lift(f.values[x]));
      }
      Cochain c{2, std::vector<Vec>(n * n)};
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          // d(lift)(x, y) = x F(y) - F(xy) + F(x), a function G -> A
          Vec df = big.add(co.coind.act(Elt(x), lifted[y]), lifted[x]);
          df     = big.add(df, big.scale(lifted[g.mul(Elt(x), Elt(y))], -1));
          Vec at_one(r);
          for (std::size_t i = 0; i < r; ++i) {
            at_one[i] = df[i * n + g.identity()];
          }
          at_one = a.normalize(at_one);
          if (co.embedding.apply(at_one) != df) {
            out.lands_in_a = false;
          }
          c.values[x * n + y] = std::move(at_one);
        }
      }
      Vec cls = h2.class_of(c);
      for (std::size_t i = 0; i < cls.size(); ++i) {
        mat[i][k] = cls[i];
      }
    }
    out.connecting  = AbHom(h1.value(), h2.value(), std::move(mat), AbHom::unchecked);
    out.isomorphism = out.connecting.is_well_defined() && is_isomorphism(out.connecting);
    out.passed      = out.lands_in_a && out.isomorphism && out.h1_shifted == out.h2;
    std::ostringstream os;
    os << "H1(G,A') = " << out.h1_shifted.to_string() << ", H2(G,A) = " << out.h2.to_string()
       << (out.passed ? ", connecting map is an isomorphism"
                      : ", connecting map check FAILED");
    out.detail = os.str();
    return out;
  }

  // A' from 0 -> A -> Coind A -> A' -> 0.
  inline GModule shifted_module(GModule const& m) {
    return coinduced_module(m).quotient;
  }

  // H^i(G, A) for any i >= 0; degrees above 2 go through i - 2 dimension
  // shifts down to a degree-2 computation.
  inline FiniteAbelianGroup cohomology_value(GModule const& m, int degree,
                                             CohomologyOptions const& opts = {}) {
    detail::require<PreconditionError>(degree >= 0, "cohomological degree must be >= 0");
    if (degree <= 2) {
      return cohomology(m, degree, opts).value();
    }
    GModule cur = m;
    for (int k = 2; k < degree; ++k) {
      std::size_t next_rank = cur.coeff().rank() * cur.group().order();
      if (next_rank * cur.group().order() * cur.group().order() > opts.cap) {
        throw SizeCapError("dimension shift to degree " + std::to_string(degree)
                           + " exceeds the cochain cap");
      }
      cur = shifted_module(cur);
    }
    return cohomology(cur, 2, opts).value();
  }

}  // namespace corfree

#endif  // CORFREE_COH_HPP_
