#ifndef CORFREE_FREEPROD_HPP_
#define CORFREE_FREEPROD_HPP_

// Invariants of corestricted free products of finite groups: the restricted
// product values, the exact sequence in low degrees with its explicit maps,
// higher degrees, abelianization and duality, truncation colimits, and
// oracles computing the same groups by other routes.

#include <algorithm>
#include <array>
#include <numeric>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ab.hpp"
#include "coh.hpp"
#include "error.hpp"
#include "family.hpp"
#include "grp.hpp"
#include "restricted.hpp"

namespace corfree {

  ////////////////////////////////////////////////////////////////////////
  // Modules over a free product
  ////////////////////////////////////////////////////////////////////////

  // A module over the free product is a common coefficient group with an
  // action of every factor.  Keys are fiber names; "tail" covers every tau_k.
  // Missing fibers act trivially.
  struct FamilyModule {
    FiniteAbelianGroup             coeff;
    std::map<std::string, GModule> fibers;

    static FamilyModule trivial(FiniteAbelianGroup a) {
      return {std::move(a), {}};
    }

    GModule at(std::string const& name, FiniteGroup const& g) const {
      auto it = fibers.find(name);
      if (it == fibers.end() && name.rfind("tau", 0) == 0) {
        it = fibers.find(tail_index);
      }
      if (it == fibers.end()) {
        return GModule::trivial(g, coeff);
      }
      detail::require(it->second.group() == g, "module at " + name + " is over the wrong group");
      detail::require(it->second.coeff() == coeff, "module at " + name + " has other coefficients");
      return it->second;
    }

    bool is_trivial_action() const {
      return std::all_of(fibers.begin(), fibers.end(),
                         [](auto const& kv) { return kv.second.is_trivial_action(); });
    }
  };

  using IndexedModules = std::vector<std::pair<std::string, GModule>>;

  // A discrete module is fixed by U_t for almost all t, so the tail pattern
  // must act trivially on U_tail (hence on its normal closure).
  inline void require_continuous(FamilySpec const& spec, FamilyModule const& m) {
    if (!spec.tail()) {
      return;
    }
    auto const& t   = *spec.tail();
    auto        gm = m.at(tail_index, t.group);
    auto const  id = identity_matrix(m.coeff.rank());
    for (Elt u : t.u.elements()) {
      auto const& a = gm.action(u);
      for (std::size_t i = 0; i < id.size(); ++i) {
        for (std::size_t j = 0; j < id.size(); ++j) {
          detail::require(mod(a[i][j], m.coeff.factors()[i]) == id[i][j],
                          "the tail acts nontrivially on U_tail; the module is not continuous at *");
        }
      }
    }
  }

  inline IndexedModules modules_on(std::vector<FamilySpec::Entry> const& indices,
                                   FamilyModule const& m) {
    IndexedModules out;
    for (auto const& [n, f] : indices) {
      out.emplace_back(n, m.at(n, f.group));
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Direct sums with invariant coordinates
  ////////////////////////////////////////////////////////////////////////

  class DirectSum {
   public:
    DirectSum() = default;

    explicit DirectSum(std::vector<FiniteAbelianGroup> parts) : _parts(std::move(parts)) {
      Int         n   = 1;
      std::size_t dim = 0;
      for (auto const& p : _parts) {
        _offsets.push_back(dim);
        dim += p.rank();
        n = lcm(n, p.exponent());
      }
      _offsets.push_back(dim);
      ModLattice rel(dim, n);
      for (std::size_t k = 0; k < _parts.size(); ++k) {
        for (std::size_t i = 0; i < _parts[k].rank(); ++i) {
          Vec e(dim, 0);
          e[_offsets[k] + i] = _parts[k].factors()[i];
          rel.insert(e);
        }
      }
      _view = Subquotient(full_lattice(dim, n), rel);
    }

    FiniteAbelianGroup const& group() const {
      return _view.group();
    }

    std::vector<FiniteAbelianGroup> const& parts() const noexcept {
      return _parts;
    }

    Vec join(std::vector<Vec> const& components) const {
      Vec flat(_offsets.back(), 0);
      for (std::size_t k = 0; k < _parts.size(); ++k) {
        for (std::size_t i = 0; i < _parts[k].rank(); ++i) {
          flat[_offsets[k] + i] = components[k][i];
        }
      }
      return _view.coords(flat);
    }

    std::vector<Vec> split(Vec const& c) const {
      Vec              flat = _view.lift(c);
      std::vector<Vec> out;
      for (std::size_t k = 0; k < _parts.size(); ++k) {
        Vec v(flat.begin() + static_cast<std::ptrdiff_t>(_offsets[k]),
              flat.begin() + static_cast<std::ptrdiff_t>(_offsets[k + 1]));
        out.push_back(_parts[k].normalize(v));
      }
      return out;
    }

   private:
    std::vector<FiniteAbelianGroup> _parts;
    std::vector<std::size_t>        _offsets;
    Subquotient                     _view;
  };

  // Matrix of the hom whose value on the j-th basis vector is image(e_j).
  template <typename F>
  AbHom hom_from_basis(FiniteAbelianGroup const& src, FiniteAbelianGroup const& tgt, F&& image) {
    Matrix m = zero_matrix(tgt.rank(), src.rank());
    for (std::size_t j = 0; j < src.rank(); ++j) {
      Vec e(src.rank(), 0);
      e[j]   = 1;
      Vec im = image(e);
      for (std::size_t i = 0; i < tgt.rank(); ++i) {
        m[i][j] = mod(im[i], tgt.factors()[i]);
      }
    }
    return AbHom(src, tgt, std::move(m), AbHom::unchecked);
  }

  // A^H for the union of the given action matrices, as a lattice mod exp(A).
  inline ModLattice fixed_lattice(FiniteAbelianGroup const& a, std::vector<Matrix const*> const& mats) {
    Int const n = a.exponent();
    Matrix    rows;
    for (auto const* m : mats) {
      for (std::size_t i = 0; i < a.rank(); ++i) {
        Vec r(a.rank());
        for (std::size_t j = 0; j < a.rank(); ++j) {
          r[j] = ((*m)[i][j] - (i == j ? 1 : 0)) * (n / a.factors()[i]);
        }
        rows.push_back(std::move(r));
      }
    }
    auto lat = kernel_mod(rows, a.rank(), n);
    auto rel = a.relations(n);
    for (std::size_t i = 0; i < rel.dim(); ++i) {
      lat.insert(rel.basis_row(i));
    }
    return lat;
  }

  inline std::vector<Matrix const*> all_actions(GModule const& m) {
    std::vector<Matrix const*> out;
    for (std::size_t g = 0; g < m.group().order(); ++g) {
      out.push_back(&m.action(Elt(g)));
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Crossed homomorphism oracle
  ////////////////////////////////////////////////////////////////////////

  // H^1 of the free product of finitely many factors.  A crossed
  // homomorphism on a free product is the same as one on each factor, so
  // Z^1 is the product of the factor Z^1 (each solved from the full cocycle
  // identity on all pairs of elements) and B^1 is the image of A.
  class OracleH1 {
   public:
    OracleH1() = default;

    OracleH1(IndexedModules modules, FiniteAbelianGroup coeff, std::size_t cap = default_cochain_cap)
        : _modules(std::move(modules)), _coeff(std::move(coeff)) {
      std::size_t const r   = _coeff.rank();
      Int const         n   = _coeff.exponent();
      std::size_t       dim = 0;
      for (auto const& [name, m] : _modules) {
        detail::require(m.coeff() == _coeff, "fiber " + name + " has other coefficients");
        _offsets.push_back(dim);
        dim += m.group().order() * r;
      }
      _offsets.push_back(dim);
      if (dim > cap) {
        throw SizeCapError("oracle cochain space of dimension " + std::to_string(dim)
                           + " exceeds cap " + std::to_string(cap));
      }
      _dim = dim;
      ModLattice z(dim, n);
      for (std::size_t k = 0; k < _modules.size(); ++k) {
        auto const&       m   = _modules[k].second;
        auto const&       g   = m.group();
        std::size_t const ord = g.order();
        std::size_t const off = _offsets[k];
        std::size_t const loc = ord * r;
        // f(xy) - f(x) - x f(y) = 0
        Matrix eqs;
        for (std::size_t x = 0; x < ord; ++x) {
          for (std::size_t y = 0; y < ord; ++y) {
            std::size_t const xy = g.mul(Elt(x), Elt(y));
            auto const&       mx = m.action(Elt(x));
            for (std::size_t i = 0; i < r; ++i) {
              Vec row(loc, 0);
              row[xy * r + i] += 1;
              row[x * r + i] -= 1;
              for (std::size_t j = 0; j < r; ++j) {
                row[y * r + j] -= mx[i][j];
              }
              for (auto& c : row) {
                c = mod(c, _coeff.factors()[i]) * (n / _coeff.factors()[i]);
              }
              if (std::any_of(row.begin(), row.end(), [](Int c) { return c != 0; })) {
                eqs.push_back(std::move(row));
              }
            }
          }
        }
        auto local = kernel_mod(eqs, loc, n);
        for (std::size_t i = 0; i < loc; ++i) {
          Vec v(dim, 0);
          auto row = local.basis_row(i);
          std::copy(row.begin(), row.end(), v.begin() + static_cast<std::ptrdiff_t>(off));
          z.insert(std::move(v));
        }
      }
      auto rel = relations();
      for (std::size_t i = 0; i < dim; ++i) {
        z.insert(rel.basis_row(i));
      }
      ModLattice b = rel;
      for (std::size_t j = 0; j < r; ++j) {
        Vec a(r, 0);
        a[j] = 1;
        b.insert(principal(std::vector<Vec>(_modules.size(), a)));
      }
      _z    = z;
      _b    = b;
      _view = Subquotient(z, b);
    }

    FiniteAbelianGroup const& value() const {
      return _view.group();
    }

    IndexedModules const& modules() const noexcept {
      return _modules;
    }

    FiniteAbelianGroup const& coeff() const noexcept {
      return _coeff;
    }

    Int z1_order() const {
      return Subquotient(_z, relations()).order();
    }

    Int b1_order() const {
      return Subquotient(_b, relations()).order();
    }

    // Flat vector of the tuple (x -> x a_t - a_t)_t.
    Vec principal(std::vector<Vec> const& a) const {
      Vec v(_dim, 0);
      for (std::size_t k = 0; k < _modules.size(); ++k) {
        auto const& m = _modules[k].second;
        for (std::size_t x = 0; x < m.group().order(); ++x) {
          Vec gx = m.act(Elt(x), a[k]);
          for (std::size_t i = 0; i < _coeff.rank(); ++i) {
            v[_offsets[k] + x * _coeff.rank() + i] = gx[i] - _coeff.normalize(a[k])[i];
          }
        }
      }
      return v;
    }

    // Flat vector of a tuple of factor cocycles (values per element).
    Vec flatten(std::vector<Cochain> const& fs) const {
      Vec v(_dim, 0);
      for (std::size_t k = 0; k < _modules.size(); ++k) {
        for (std::size_t x = 0; x < fs[k].values.size(); ++x) {
          for (std::size_t i = 0; i < _coeff.rank(); ++i) {
            v[_offsets[k] + x * _coeff.rank() + i] = fs[k].values[x][i];
          }
        }
      }
      return v;
    }

    std::vector<Cochain> unflatten(Vec const& v) const {
      std::vector<Cochain> out;
      for (std::size_t k = 0; k < _modules.size(); ++k) {
        Cochain f{1, {}};
        for (std::size_t x = 0; x < _modules[k].second.group().order(); ++x) {
          Vec val(_coeff.rank());
          for (std::size_t i = 0; i < _coeff.rank(); ++i) {
            val[i] = v[_offsets[k] + x * _coeff.rank() + i];
          }
          f.values.push_back(_coeff.normalize(val));
        }
        out.push_back(std::move(f));
      }
      return out;
    }

    Vec class_of(std::vector<Cochain> const& fs) const {
      return _view.coords(flatten(fs));
    }

    Vec class_of_flat(Vec const& v) const {
      return _view.coords(v);
    }

    std::vector<Cochain> representative(Vec const& c) const {
      return unflatten(_view.lift(c));
    }

   private:
    ModLattice relations() const {
      ModLattice rel(_dim, _coeff.exponent());
      for (std::size_t k = 0; k < _modules.size(); ++k) {
        for (std::size_t x = 0; x < _modules[k].second.group().order(); ++x) {
          for (std::size_t i = 0; i < _coeff.rank(); ++i) {
            Vec e(_dim, 0);
            e[_offsets[k] + x * _coeff.rank() + i] = _coeff.factors()[i];
            rel.insert(std::move(e));
          }
        }
      }
      return rel;
    }

    IndexedModules           _modules;
    FiniteAbelianGroup       _coeff;
    std::vector<std::size_t> _offsets;
    std::size_t              _dim = 0;
    ModLattice               _z;
    ModLattice               _b;
    Subquotient              _view;
  };

  inline void require_trivial_beyond(TruncatedFamily const& fam) {
    detail::require<PreconditionError>(
        fam.beyond_trivial(),
        "the truncation has a nontrivial part beyond level " + std::to_string(fam.level)
            + " (G_tail / U~_tail = " + (fam.beyond ? fam.beyond->label() : "1")
            + "); finite-level oracles need U~_tail = G_tail");
  }

  inline OracleH1 oracle_h1(TruncatedFamily const& fam, FamilyModule const& m,
                            std::size_t cap = default_cochain_cap) {
    require_trivial_beyond(fam);
    return OracleH1(modules_on(fam.indices, m), m.coeff, cap);
  }

  ////////////////////////////////////////////////////////////////////////
  // The four-term sequence
  ////////////////////////////////////////////////////////////////////////

  struct FourTermContext {
    TruncatedFamily family;
    FamilyModule    module;
  };

  // 0 -> A/A^G -> sum A/A^{G_t} -> H^1(G, A) -> sum H^1(G_t, A) -> 0
  struct FourTermSequence {
    std::array<FiniteAbelianGroup, 4> terms;
    std::array<AbHom, 3>              maps;
    std::optional<FourTermContext>    context;
    Int                               z1_order = 1;  // 0 when it overflows
    Int                               b1_order = 1;
  };

  inline constexpr std::array<char const*, 4> four_term_names = {
      "A/A^G", "sum A/A^G_t", "H1(G,A)", "sum H1(G_t,A)"};

  namespace detail {

    inline FourTermSequence build_four_term(IndexedModules const& modules,
                                            FiniteAbelianGroup const& a, std::size_t cap) {
      std::size_t const r = a.rank();
      Int const         n = a.exponent();
      auto const        full = full_lattice(r, n);

      std::vector<Matrix const*> every;
      std::vector<Subquotient>   local;
      std::vector<FiniteAbelianGroup> local_groups;
      std::vector<CohomologyGroup>    h1;
      std::vector<FiniteAbelianGroup> h1_groups;
      for (auto const& [name, m] : modules) {
        auto mats = all_actions(m);
        every.insert(every.end(), mats.begin(), mats.end());
        local.emplace_back(full, fixed_lattice(a, mats));
        local_groups.push_back(local.back().group());
        h1.push_back(cohomology(m, 1, {cap}));
        h1_groups.push_back(h1.back().value());
      }
      Subquotient global(full, fixed_lattice(a, every));
      DirectSum   sum1(local_groups);
      DirectSum   sum3(h1_groups);
      OracleH1    oracle(modules, a, cap);

      FourTermSequence seq;
      seq.terms    = {global.group(), sum1.group(), oracle.value(), sum3.group()};
      try {
        seq.z1_order = oracle.z1_order();
        seq.b1_order = oracle.b1_order();
      } catch (SizeCapError const&) {
        seq.z1_order = seq.b1_order = 0;  // too large to count
      }
      // diagonal
      seq.maps[0] = hom_from_basis(seq.terms[0], seq.terms[1], [&](Vec const& e) {
        Vec              x = global.lift(e);
        std::vector<Vec> comps;
        for (auto const& l : local) {
          comps.push_back(l.coords(x));
        }
        return sum1.join(comps);
      });
      // (a_t) -> class of the cocycle equal to g a_t - a_t on G_t
      seq.maps[1] = hom_from_basis(seq.terms[1], seq.terms[2], [&](Vec const& e) {
        auto             comps = sum1.split(e);
        std::vector<Vec> lifts;
        for (std::size_t k = 0; k < comps.size(); ++k) {
          lifts.push_back(a.normalize(local[k].lift(comps[k])));
        }
        return oracle.class_of_flat(oracle.principal(lifts));
      });
      // restriction to the factors
      seq.maps[2] = hom_from_basis(seq.terms[2], seq.terms[3], [&](Vec const& e) {
        auto             reps = oracle.representative(e);
        std::vector<Vec> comps;
        for (std::size_t k = 0; k < reps.size(); ++k) {
          comps.push_back(h1[k].class_of(reps[k]));
        }
        return sum3.join(comps);
      });
      return seq;
    }

  }  // namespace detail

  inline FourTermSequence four_term_sequence(TruncatedFamily const& fam, FamilyModule const& m,
                                             std::size_t cap = default_cochain_cap) {
    require_trivial_beyond(fam);
    auto seq    = detail::build_four_term(modules_on(fam.indices, m), m.coeff, cap);
    seq.context = FourTermContext{fam, m};
    return seq;
  }

  struct ExactnessReport {
    bool passed       = false;
    bool well_defined = false;
    bool exact        = false;  // kernel = image everywhere, ends included
    // maps agree with the explicit maps recomputed from the context
    std::optional<bool> canonical;
    // |ker d0|, |ker d1 / im d0|, |ker d2 / im d1|, |coker d2|; -1 if the
    // position is not even a complex
    std::array<Int, 4>  obstruction{1, 1, 1, 1};
    std::string         position;  // first failing position
    Vec                 witness;
    std::string         detail;
  };

  namespace detail {

    inline Vec first_outside(ModLattice const& a, ModLattice const& b, FiniteAbelianGroup const& g) {
      for (std::size_t i = 0; i < a.dim(); ++i) {
        Vec v = a.basis_row(i);
        if (!b.contains(v)) {
          return g.normalize(v);
        }
      }
      return {};
    }

    inline std::string vec_string(Vec const& v) {
      std::ostringstream os;
      os << "(";
      for (std::size_t i = 0; i < v.size(); ++i) {
        os << (i ? "," : "") << v[i];
      }
      os << ")";
      return os.str();
    }

  }  // namespace detail

  inline ExactnessReport check_exactness(FourTermSequence const& seq) {
    ExactnessReport out;
    auto fail = [&](std::string pos, Vec w, std::string why) {
      if (out.position.empty()) {
        out.position = std::move(pos);
        out.witness  = std::move(w);
        out.detail   = std::move(why);
      }
    };
    out.well_defined = true;
    for (std::size_t k = 0; k < 3; ++k) {
      auto const& f = seq.maps[k];
      if (!(f.source() == seq.terms[k]) || !(f.target() == seq.terms[k + 1])) {
        out.well_defined = false;
        fail("d" + std::to_string(k), {}, "map does not connect consecutive terms");
        continue;
      }
      if (!f.is_well_defined()) {
        out.well_defined = false;
        for (std::size_t j = 0; j < f.source().rank(); ++j) {
          Vec e(f.source().rank(), 0);
          e[j] = f.source().factors()[j];
          auto im = f.apply(e);
          if (std::any_of(im.begin(), im.end(), [](Int x) { return x != 0; })) {
            fail("d" + std::to_string(k), e, "map does not respect the relations of its source");
            break;
          }
        }
      }
    }
    if (out.well_defined) {
      out.exact = true;
      // injectivity at the left
      {
        auto const& f   = seq.maps[0];
        auto        ker = kernel_lattice(f);
        auto        rel = seq.terms[0].relations(f.modulus());
        out.obstruction[0] = Subquotient(ker, rel).order();
        if (out.obstruction[0] != 1) {
          out.exact = false;
          fail(four_term_names[0], detail::first_outside(ker, rel, seq.terms[0]),
               "first map is not injective");
        }
      }
      for (std::size_t p = 1; p <= 2; ++p) {
        auto const& in  = seq.maps[p - 1];
        auto const& outm = seq.maps[p];
        Int const   m   = lcm(in.modulus(), outm.modulus());
        auto        ker = with_modulus(kernel_lattice(outm), m);
        auto        img = with_modulus(image_lattice(in), m);
        if (!img.is_subset_of(ker)) {
          out.exact          = false;
          out.obstruction[p] = -1;
          fail(four_term_names[p], detail::first_outside(img, ker, seq.terms[p]),
               "consecutive maps do not compose to zero");
          continue;
        }
        out.obstruction[p] = Subquotient(ker, img).order();
        if (out.obstruction[p] != 1) {
          out.exact = false;
          fail(four_term_names[p], detail::first_outside(ker, img, seq.terms[p]),
               "kernel is larger than the image");
        }
      }
      {
        auto const& f   = seq.maps[2];
        auto        img = image_lattice(f);
        auto        all = full_lattice(seq.terms[3].rank(), f.modulus());
        out.obstruction[3] = Subquotient(all, img).order();
        if (out.obstruction[3] != 1) {
          out.exact = false;
          fail(four_term_names[3], detail::first_outside(all, img, seq.terms[3]),
               "last map is not surjective");
        }
      }
    } else {
      out.exact = false;
    }
    if (seq.context) {
      auto canon = detail::build_four_term(modules_on(seq.context->family.indices, seq.context->module),
                                           seq.context->module.coeff, default_cochain_cap);
      out.canonical = canon.terms == seq.terms;
      if (!*out.canonical) {
        fail("terms", {}, "terms differ from the recomputed terms");
      }
      for (std::size_t k = 0; *out.canonical && k < 3; ++k) {
        auto const& a = seq.maps[k].matrix();
        auto const& b = canon.maps[k].matrix();
        for (std::size_t i = 0; i < a.size(); ++i) {
          for (std::size_t j = 0; j < a[i].size(); ++j) {
            Int d = seq.terms[k + 1].factors()[i];
            if (mod(a[i][j], d) != mod(b[i][j], d)) {
              out.canonical = false;
              Vec e(a[i].size(), 0);
              e[j] = 1;
              fail("d" + std::to_string(k), e,
                   "entry (" + std::to_string(i) + "," + std::to_string(j)
                       + ") differs from the explicit map");
            }
          }
        }
      }
    }
    out.passed = out.well_defined && out.exact && out.canonical.value_or(true);
    if (out.passed) {
      out.detail = "exact";
    }
    return out;
  }

  // |H^1(G)| = |sum A/A^G_t| * |sum H^1(G_t)| / |A/A^G| for an exact sequence.
  inline bool cardinality_bookkeeping(FourTermSequence const& seq) {
    return checked_mul(seq.terms[2].order(), seq.terms[0].order())
           == checked_mul(seq.terms[1].order(), seq.terms[3].order());
  }

  ////////////////////////////////////////////////////////////////////////
  // Right-hand sides of the theorem
  ////////////////////////////////////////////////////////////////////////

  struct HFormula {
    int                degree = 1;
    RestrictedAbFamily family;  // (H^i(G_t, A), H^i_nr(G_t, A)), discretized
    bool               direct_sum = true;  // nr part vanishes on the tail
    bool               finite     = true;
    std::string        summary;
  };

  inline HFormula h_formula(FamilySpec const& spec, FamilyModule const& m, int degree,
                            CohomologyOptions const& opts = {}) {
    detail::require<PreconditionError>(degree == 1 || degree == 2, "h_formula covers degrees 1, 2");
    auto pair_at = [&](std::string const& name, Fiber const& f) {
      auto nr = h_nr(f.group, f.u, m.at(name, f.group), degree, opts);
      return AbPair(nr.inflation.target.value(), nr.generators);
    };
    std::vector<RestrictedAbFamily::Entry> ex;
    for (auto const& [n, f] : spec.exceptional()) {
      ex.emplace_back(n, pair_at(n, f));
    }
    std::optional<AbPair> tail;
    if (spec.tail()) {
      tail = pair_at(tail_index, *spec.tail());
    }
    HFormula out;
    out.degree     = degree;
    out.family     = RestrictedAbFamily(std::move(ex), tail, Flavor::discretized);
    out.direct_sum = !tail || tail->sub().is_trivial();
    out.finite     = !tail || tail->group().is_trivial();
    std::ostringstream os;
    os << "H^" << degree << ": exceptional sum " << out.family.finite_sum().to_string();
    if (tail) {
      os << "; tail pair " << tail->to_string() << " over t_1, t_2, ...";
      if (out.finite) {
        os << "; tail contributes nothing";
      } else if (out.direct_sum) {
        os << "; direct sum over T0 (countably infinite)";
      } else {
        os << "; restricted product, uncountable";
      }
    }
    out.summary = os.str();
    return out;
  }

  struct HighDegreeFormula {
    int                                                   degree = 3;
    std::vector<std::pair<std::string, FiniteAbelianGroup>> summands;  // exceptional fibers
    std::optional<FiniteAbelianGroup>                     tail_summand;
    FiniteAbelianGroup                                    finite_part;
    std::string                                           summary;
  };

  // H^i(G, A) = sum_t H^i(G_t, A) for i >= 3, provided cd(G_t / U~_t) <= 1;
  // for a finite quotient that means G_t / U~_t = 1.
  inline HighDegreeFormula high_degree_formula(FamilySpec const& spec, FamilyModule const& m, int degree,
                                               CohomologyOptions const& opts = {}) {
    detail::require<PreconditionError>(degree >= 3, "high_degree_formula needs degree >= 3");
    for (auto const& [n, f] : spec.fibers()) {
      auto closure = normal_closure(f.group, f.u);
      if (closure.order() != f.group.order()) {
        throw PreconditionError("fiber " + n + ": G_t/U~_t has order "
                                + std::to_string(f.group.order() / closure.order())
                                + "; a nontrivial finite group has cohomological dimension "
                                  "above 1, so the degree >= 3 formula does not apply");
      }
    }
    HighDegreeFormula out;
    out.degree = degree;
    Vec orders;
    for (auto const& [n, f] : spec.exceptional()) {
      auto v = cohomology_value(m.at(n, f.group), degree, opts);
      for (Int d : v.factors()) {
        orders.push_back(d);
      }
      out.summands.emplace_back(n, std::move(v));
    }
    out.finite_part = FiniteAbelianGroup::from_cyclic_orders(orders);
    if (spec.tail()) {
      out.tail_summand = cohomology_value(m.at(tail_index, spec.tail()->group), degree, opts);
    }
    std::ostringstream os;
    os << "H^" << degree << " = " << out.finite_part.to_string();
    if (out.tail_summand) {
      os << " + sum over t_1, t_2, ... of " << out.tail_summand->to_string();
    }
    out.summary = os.str();
    return out;
  }

  inline RestrictedAbFamily abelianization_formula(FamilySpec const& spec) {
    return abelianize_family(spec).with_flavor(Flavor::compactified);
  }

  ////////////////////////////////////////////////////////////////////////
  // Cross-check: H^1 with Z/p coefficients against the abelianization
  ////////////////////////////////////////////////////////////////////////

  struct FiberCrossCheck {
    std::string        name;
    FiniteAbelianGroup h1;
    FiniteAbelianGroup ab_dual;  // ((G^ab)/p)^dual
    FiniteAbelianGroup nr;
    FiniteAbelianGroup nr_dual;  // ((G^ab / Ubar)/p)^dual
    bool               iso     = false;
    bool               nr_iso  = false;
  };

  struct CrossCheckReport {
    bool                         passed = true;
    Int                          prime  = 2;
    std::vector<FiberCrossCheck> fibers;
  };

  inline FiniteAbelianGroup p_torsion(FiniteAbelianGroup const& a, Int p) {
    Vec orders;
    for (Int d : a.factors()) {
      orders.push_back(std::gcd(d, p));
    }
    return FiniteAbelianGroup::from_cyclic_orders(orders);
  }

  inline FiberCrossCheck cross_check_fiber(std::string const& name, Fiber const& f, Int p) {
    FiberCrossCheck out;
    out.name = name;
    FiniteAbelianGroup zp({p});
    auto               m  = GModule::trivial(f.group, zp);
    auto               h  = cohomology(m, 1);
    auto               ab = abelianization(f.group);
    out.h1      = h.value();
    out.ab_dual = p_torsion(dual_group(ab.group).group, p);
    // elements of G over the basis of G^ab
    std::vector<Elt> lifts(ab.group.rank(), -1);
    for (std::size_t x = 0; x < f.group.order(); ++x) {
      auto const& v = ab(Elt(x));
      for (std::size_t j = 0; j < v.size(); ++j) {
        Vec e(v.size(), 0);
        e[j] = 1;
        if (lifts[j] < 0 && v == e) {
          lifts[j] = Elt(x);
        }
      }
    }
    // class -> (f(g_j))_j for the factors divisible by p
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < ab.group.rank(); ++j) {
      if (ab.group.factors()[j] % p == 0) {
        cols.push_back(j);
      }
    }
    FiniteAbelianGroup target(Vec(cols.size(), p));
    bool               values_ok = true;
    auto evaluate = hom_from_basis(out.h1, target, [&](Vec const& e) {
      auto c = h.cocycle(e);
      for (std::size_t j = 0; j < ab.group.rank(); ++j) {
        if (ab.group.factors()[j] % p != 0 && c.values[lifts[j]][0] != 0) {
          values_ok = false;
        }
      }
      Vec im;
      for (auto j : cols) {
        im.push_back(c.values[lifts[j]][0]);
      }
      return im;
    });
    out.iso = values_ok && target == out.ab_dual && is_isomorphism(evaluate);
    // unramified part against the characters killing Ubar
    auto nr   = h_nr(f.group, f.u, m, 1);
    out.nr    = nr.value;
    auto dual = abelianize_fiber(f).dual();
    out.nr_dual = p_torsion(dual.sub(), p);
    bool kills_u = true;
    for (auto const& g : nr.generators) {
      auto c = nr.inflation.target.cocycle(g);
      for (Elt u : f.u.elements()) {
        kills_u = kills_u && c.values[u][0] == 0;
      }
    }
    out.nr_iso = kills_u && out.nr == out.nr_dual;
    return out;
  }

  inline CrossCheckReport cross_check_h1_vs_ab(FamilySpec const& spec, Int p) {
    detail::require<PreconditionError>(
        std::binary_search(spec.prime_set().begin(), spec.prime_set().end(), p),
        std::to_string(p) + " is not in the prime set");
    CrossCheckReport out;
    out.prime = p;
    for (auto const& [n, f] : spec.fibers()) {
      auto r     = cross_check_fiber(n, f, p);
      out.passed = out.passed && r.iso && r.nr_iso;
      out.fibers.push_back(std::move(r));
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Truncation colimits
  ////////////////////////////////////////////////////////////////////////

  struct ColimitSystem {
    int                             degree = 1;
    std::vector<FiniteAbelianGroup> levels;
    std::vector<AbHom>              transitions;  // level N -> level N + 1
    std::vector<bool>               injective;
    std::vector<bool>               matches_formula;
    std::optional<std::size_t>      stabilization;
    Int                             tail_growth = 1;  // expected |L_{N+1}| / |L_N| for N >= 1
    bool                            direct_sum  = true;
    bool                            passed      = true;
    std::vector<std::string>        failures;
  };

  inline ColimitSystem truncation_colimit(FamilySpec const& spec, FamilyModule const& m, int degree,
                                          std::size_t n_max, CohomologyOptions const& opts = {}) {
    detail::require<PreconditionError>(degree == 1 || degree == 2, "colimits cover degrees 1, 2");
    require_continuous(spec, m);
    if (spec.tail()) {
      auto const& t = *spec.tail();
      detail::require<PreconditionError>(
          normal_closure(t.group, t.u).order() == t.group.order(),
          "truncation colimits need U~_tail = G_tail");
    }
    ColimitSystem out;
    out.degree = degree;
    auto hf    = h_formula(spec, m, degree, opts);
    out.direct_sum = hf.direct_sum;
    if (!hf.direct_sum) {
      out.passed = false;
      out.failures.push_back("h_formula summary is not a direct sum");
    }
    std::vector<TruncatedFamily> levels;
    for (std::size_t n = 0; n <= n_max; ++n) {
      levels.push_back(truncate(spec, n));
    }
    auto fail = [&](std::string why) {
      out.passed = false;
      out.failures.push_back(std::move(why));
    };
    if (spec.tail()) {
      auto tm = m.at(tail_index, spec.tail()->group);
      if (degree == 1) {
        Subquotient q(full_lattice(m.coeff.rank(), m.coeff.exponent()),
                      fixed_lattice(m.coeff, all_actions(tm)));
        out.tail_growth = checked_mul(q.order(), cohomology(tm, 1, opts).value().order());
      } else {
        out.tail_growth = cohomology(tm, 2, opts).value().order();
      }
    }
    if (degree == 1) {
      std::vector<OracleH1> oracles;
      for (std::size_t n = 0; n <= n_max; ++n) {
        oracles.push_back(oracle_h1(levels[n], m, opts.cap));
        out.levels.push_back(oracles.back().value());
        auto seq   = four_term_sequence(levels[n], m, opts.cap);
        auto rep   = check_exactness(seq);
        bool match = rep.passed && seq.terms[2] == out.levels.back() && cardinality_bookkeeping(seq);
        if (m.is_trivial_action()) {
          // H^1(G) = sum H^1(G_t) on the nose
          std::vector<FiniteAbelianGroup> hs;
          for (auto const& [name, f] : levels[n].indices) {
            hs.push_back(hf.family.at(name.rfind("tau", 0) == 0 ? std::string(tail_index) : name)
                             .group());
          }
          match = match && DirectSum(hs).group() == out.levels.back();
        }
        out.matches_formula.push_back(match);
        if (!match) {
          fail("level " + std::to_string(n) + " differs from the finite formula");
        }
      }
      for (std::size_t n = 0; n < n_max; ++n) {
        auto const& lo = oracles[n];
        auto const& hi = oracles[n + 1];
        out.transitions.push_back(hom_from_basis(lo.value(), hi.value(), [&](Vec const& e) {
          auto reps = lo.representative(e);
          auto const& g = spec.tail()->group;
          reps.push_back(Cochain{1, std::vector<Vec>(g.order(), m.coeff.zero())});
          return hi.class_of(reps);
        }));
      }
    } else {
      for (std::size_t n = 0; n <= n_max; ++n) {
        std::vector<FiniteAbelianGroup> hs;
        std::vector<FiniteAbelianGroup> formula;
        for (auto const& [name, f] : levels[n].indices) {
          hs.push_back(cohomology(m.at(name, f.group), 2, opts).value());
          formula.push_back(
              hf.family.at(name.rfind("tau", 0) == 0 ? std::string(tail_index) : name).group());
        }
        out.levels.push_back(DirectSum(hs).group());
        bool match = DirectSum(formula).group() == out.levels.back();
        out.matches_formula.push_back(match);
        if (!match) {
          fail("level " + std::to_string(n) + " differs from the finite formula");
        }
        if (n > 0) {
          std::vector<FiniteAbelianGroup> prev(hs.begin(), hs.end() - 1);
          DirectSum lo(prev), hi(hs);
          out.transitions.push_back(hom_from_basis(lo.group(), hi.group(), [&](Vec const& e) {
            auto comps = lo.split(e);
            comps.push_back(hs.back().zero());
            return hi.join(comps);
          }));
        }
      }
    }
    for (std::size_t n = 0; n < out.transitions.size(); ++n) {
      auto const& t   = out.transitions[n];
      bool        inj = t.is_well_defined() && is_injective(t);
      out.injective.push_back(inj);
      if (!inj) {
        fail("transition " + std::to_string(n) + " is not injective");
      }
      if (is_surjective(t) && !out.stabilization) {
        out.stabilization = n;
      }
      if (n >= 1 && out.levels[n + 1].order() != checked_mul(out.levels[n].order(), out.tail_growth)) {
        fail("level " + std::to_string(n + 1) + " does not grow by the tail contribution");
      }
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Splittings and changes of U
  ////////////////////////////////////////////////////////////////////////

  struct SplittingReport {
    bool               passed = false;
    FiniteAbelianGroup sub_h1;
    FiniteAbelianGroup full_h1;
    FiniteAbelianGroup sub_ab;
    FiniteAbelianGroup full_ab;
    bool               h1_split = false;
    bool               ab_split = false;
    std::string        detail;
  };

  // The free factor on `subset` is a retract (kill the other factors); its
  // H^1 and abelianization are direct summands.  Needs the other factors to
  // act trivially so the module comes from the retract.
  inline SplittingReport splitting_check(TruncatedFamily const& fam, std::vector<std::string> const& subset,
                                         FamilyModule const& m, std::size_t cap = default_cochain_cap) {
    require_trivial_beyond(fam);
    std::set<std::string> keep(subset.begin(), subset.end());
    std::vector<FamilySpec::Entry> sub_idx;
    for (auto const& [n, f] : fam.indices) {
      if (keep.count(n) != 0) {
        sub_idx.emplace_back(n, f);
        keep.erase(n);
      } else if (!m.at(n, f.group).is_trivial_action()) {
        throw PreconditionError("factor " + n
                                + " outside the subset acts nontrivially; the module does not "
                                  "factor through the retraction");
      }
    }
    detail::require(keep.empty(), "subset names an index outside the truncation");
    SplittingReport out;
    OracleH1 full(modules_on(fam.indices, m), m.coeff, cap);
    OracleH1 part(modules_on(sub_idx, m), m.coeff, cap);
    out.full_h1 = full.value();
    out.sub_h1  = part.value();
    std::vector<bool> in_sub;
    for (auto const& [n, f] : fam.indices) {
      in_sub.push_back(std::any_of(sub_idx.begin(), sub_idx.end(),
                                   [&](auto const& e) { return e.first == n; }));
    }
    auto section = hom_from_basis(out.sub_h1, out.full_h1, [&](Vec const& e) {
      auto                 reps = part.representative(e);
      std::vector<Cochain> ext;
      std::size_t          k = 0;
      for (std::size_t i = 0; i < fam.indices.size(); ++i) {
        if (in_sub[i]) {
          ext.push_back(reps[k++]);
        } else {
          ext.push_back(Cochain{1, std::vector<Vec>(fam.indices[i].second.group.order(),
                                                    m.coeff.zero())});
        }
      }
      return full.class_of(ext);
    });
    auto retraction = hom_from_basis(out.full_h1, out.sub_h1, [&](Vec const& e) {
      auto                 reps = full.representative(e);
      std::vector<Cochain> res;
      for (std::size_t i = 0; i < reps.size(); ++i) {
        if (in_sub[i]) {
          res.push_back(reps[i]);
        }
      }
      return part.class_of(res);
    });
    out.h1_split = section.is_well_defined() && retraction.is_well_defined()
                   && retraction.after(section) == AbHom::identity(out.sub_h1)
                   && is_injective(section);
    // abelianization of a free product is the direct sum
    std::vector<FiniteAbelianGroup> all_ab, sub_ab;
    for (std::size_t i = 0; i < fam.indices.size(); ++i) {
      all_ab.push_back(abelianization(fam.indices[i].second.group).group);
      if (in_sub[i]) {
        sub_ab.push_back(all_ab.back());
      }
    }
    DirectSum full_sum(all_ab), sub_sum(sub_ab);
    out.full_ab = full_sum.group();
    out.sub_ab  = sub_sum.group();
    auto ab_section = hom_from_basis(out.sub_ab, out.full_ab, [&](Vec const& e) {
      auto             comps = sub_sum.split(e);
      std::vector<Vec> ext;
      std::size_t      k = 0;
      for (std::size_t i = 0; i < all_ab.size(); ++i) {
        ext.push_back(in_sub[i] ? comps[k++] : all_ab[i].zero());
      }
      return full_sum.join(ext);
    });
    auto ab_retraction = hom_from_basis(out.full_ab, out.sub_ab, [&](Vec const& e) {
      auto             comps = full_sum.split(e);
      std::vector<Vec> res;
      for (std::size_t i = 0; i < comps.size(); ++i) {
        if (in_sub[i]) {
          res.push_back(comps[i]);
        }
      }
      return sub_sum.join(res);
    });
    out.ab_split = ab_section.is_well_defined() && ab_retraction.is_well_defined()
                   && ab_retraction.after(ab_section) == AbHom::identity(out.sub_ab);
    out.passed = out.h1_split && out.ab_split;
    std::ostringstream os;
    os << "H1: " << out.sub_h1.to_string() << " is " << (out.h1_split ? "" : "NOT ")
       << "a summand of " << out.full_h1.to_string() << "; ab: " << out.sub_ab.to_string() << " is "
       << (out.ab_split ? "" : "NOT ") << "a summand of " << out.full_ab.to_string();
    out.detail = os.str();
    return out;
  }

  struct CorestrictionFiber {
    std::string name;
    Int         ubar_small  = 1;  // |image of U'|
    Int         ubar_large  = 1;  // |image of U|
    Int         ann_small   = 1;  // |annihilator of image of U'|
    Int         ann_large   = 1;
    bool        contained   = false;
    bool        dual_injects = false;
    bool        equal       = false;
  };

  struct CorestrictionReport {
    bool                            passed = true;
    std::vector<CorestrictionFiber> fibers;
  };

  // spec_small has U'_t inside U_t of spec_large, same groups.
  inline CorestrictionReport corestriction_compare(FamilySpec const& spec_large,
                                                   FamilySpec const& spec_small) {
    auto const big   = spec_large.fibers();
    auto const small = spec_small.fibers();
    detail::require(big.size() == small.size(), "families have different index sets");
    for (std::size_t i = 0; i < big.size(); ++i) {
      detail::require(big[i].first == small[i].first && big[i].second.group == small[i].second.group,
                      "families differ at index " + big[i].first);
      detail::require(small[i].second.u.is_subset_of(big[i].second.u),
                      "U'_" + big[i].first + " is not contained in U_" + big[i].first);
    }
    auto ab_big   = abelianization_formula(spec_large);
    auto ab_small = abelianization_formula(spec_small);
    auto d_big    = dualize_family(ab_big);
    auto d_small  = dualize_family(ab_small);
    CorestrictionReport out;
    for (auto const& [name, ignored] : big) {
      CorestrictionFiber r;
      r.name         = name;
      auto const& lb = ab_big.at(name);
      auto const& ls = ab_small.at(name);
      r.ubar_large   = lb.sub().order();
      r.ubar_small   = ls.sub().order();
      r.ann_large    = d_big.at(name).sub().order();
      r.ann_small    = d_small.at(name).sub().order();
      r.contained    = ls.is_subset_of(lb);
      r.dual_injects = d_big.at(name).is_subset_of(d_small.at(name));
      r.equal        = ls == lb;
      out.passed     = out.passed && r.contained && r.dual_injects;
      out.fibers.push_back(std::move(r));
    }
    return out;
  }

}  // namespace corfree

#endif  // CORFREE_FREEPROD_HPP_
