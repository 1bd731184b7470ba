#ifndef CORFREE_AB_HPP_
#define CORFREE_AB_HPP_

// Finite abelian groups in invariant-factor form and the exact integer linear
// algebra everything else is built on.
//
// Subgroups of Z^n are handled as lattices L with N*Z^n <= L for a fixed
// modulus N (usually an exponent).  Such a lattice is stored as an upper
// triangular basis reduced mod N that also has the Howell property, so coset
// representatives are canonical and every computation stays bounded by N.

#include <algorithm>
#include <cstdlib>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace corfree {

  using Int    = std::int64_t;
  using Vec    = std::vector<Int>;
  using Matrix = std::vector<Vec>;  // row-major

  ////////////////////////////////////////////////////////////////////////
  // Integer helpers
  ////////////////////////////////////////////////////////////////////////

  inline Int mod(Int a, Int m) {
    Int r = a % m;
    return r < 0 ? r + m : r;
  }

  inline Int lcm(Int a, Int b) {
    if (a == 0 || b == 0) {
      return 0;
    }
    return a / std::gcd(a, b) * b;
  }

  struct ExtGcd {
    Int g;
    Int x;
    Int y;
  };

  // g = gcd(a, b) >= 0 with a*x + b*y = g.
  inline ExtGcd ext_gcd(Int a, Int b) {
    Int old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
      Int q   = old_r / r;
      Int tmp = old_r - q * r;
      old_r   = r;
      r       = tmp;
      tmp     = old_s - q * s;
      old_s   = s;
      s       = tmp;
      tmp     = old_t - q * t;
      old_t   = t;
      t       = tmp;
    }
    if (old_r < 0) {
      return {-old_r, -old_s, -old_t};
    }
    return {old_r, old_s, old_t};
  }

  inline Int checked_mul(Int a, Int b) {
    Int out;
    if (__builtin_mul_overflow(a, b, &out)) {
      throw SizeCapError("integer overflow in group order computation");
    }
    return out;
  }

  inline Matrix identity_matrix(std::size_t n) {
    Matrix m(n, Vec(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      m[i][i] = 1;
    }
    return m;
  }

  inline Matrix zero_matrix(std::size_t rows, std::size_t cols) {
    return Matrix(rows, Vec(cols, 0));
  }

  inline Matrix multiply(Matrix const& a, Matrix const& b) {
    std::size_t const n = a.size();
    std::size_t const k = b.size();
    std::size_t const m = k == 0 ? 0 : b[0].size();
    Matrix            out(n, Vec(m, 0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < k; ++l) {
        if (a[i][l] == 0) {
          continue;
        }
        for (std::size_t j = 0; j < m; ++j) {
          out[i][j] += a[i][l] * b[l][j];
        }
      }
    }
    return out;
  }

  // Determinant by fraction-free (Bareiss) elimination.
  inline Int determinant(Matrix m) {
    std::size_t const n = m.size();
    if (n == 0) {
      return 1;
    }
    Int sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (m[k][k] == 0) {
        std::size_t p = k + 1;
        while (p < n && m[p][k] == 0) {
          ++p;
        }
        if (p == n) {
          return 0;
        }
        std::swap(m[k], m[p]);
        sign = -sign;
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        for (std::size_t j = k + 1; j < n; ++j) {
          m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        }
      }
      prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
  }

  ////////////////////////////////////////////////////////////////////////
  // Smith normal form
  ////////////////////////////////////////////////////////////////////////

  struct SmithForm {
    Vec    diagonal;  // min(rows, cols) entries, s_1 | s_2 | ..., all >= 0
    Matrix left;      // U, rows x rows, unimodular
    Matrix right;     // V, cols x cols, unimodular
    Matrix right_inverse;
  };

  // U * M * V = diag(s_1, ...).
  inline SmithForm smith_normal_form(Matrix m) {
    std::size_t const rows = m.size();
    std::size_t const cols = rows == 0 ? 0 : m[0].size();
    SmithForm         out;
    out.left          = identity_matrix(rows);
    out.right         = identity_matrix(cols);
    out.right_inverse = identity_matrix(cols);

    auto row_swap = [&](std::size_t a, std::size_t b) {
      std::swap(m[a], m[b]);
      std::swap(out.left[a], out.left[b]);
    };
    auto col_swap = [&](std::size_t a, std::size_t b) {
      for (auto& r : m) {
        std::swap(r[a], r[b]);
      }
      for (auto& r : out.right) {
        std::swap(r[a], r[b]);
      }
      std::swap(out.right_inverse[a], out.right_inverse[b]);
    };
    // row_a += q * row_b
    auto row_add = [&](std::size_t a, std::size_t b, Int q) {
      for (std::size_t j = 0; j < cols; ++j) {
        m[a][j] += q * m[b][j];
      }
      for (std::size_t j = 0; j < rows; ++j) {
        out.left[a][j] += q * out.left[b][j];
      }
    };
    // col_a += q * col_b; inverse gets row_b -= q * row_a
    auto col_add = [&](std::size_t a, std::size_t b, Int q) {
      for (auto& r : m) {
        r[a] += q * r[b];
      }
      for (auto& r : out.right) {
        r[a] += q * r[b];
      }
      for (std::size_t j = 0; j < cols; ++j) {
        out.right_inverse[b][j] -= q * out.right_inverse[a][j];
      }
    };

    std::size_t const steps = std::min(rows, cols);
    for (std::size_t t = 0; t < steps; ++t) {
      while (true) {
        // smallest nonzero entry of the trailing block becomes the pivot
        std::size_t pr = rows, pc = cols;
        for (std::size_t i = t; i < rows; ++i) {
          for (std::size_t j = t; j < cols; ++j) {
            if (m[i][j] != 0
                && (pr == rows || std::abs(m[i][j]) < std::abs(m[pr][pc]))) {
              pr = i;
              pc = j;
            }
          }
        }
        if (pr == rows) {
          break;
        }
        if (pr != t) {
          row_swap(pr, t);
        }
        if (pc != t) {
          col_swap(pc, t);
        }
        bool clean = true;
        for (std::size_t i = t + 1; i < rows; ++i) {
          if (m[i][t] != 0) {
            row_add(i, t, -(m[i][t] / m[t][t]));
            clean = clean && m[i][t] == 0;
          }
        }
        for (std::size_t j = t + 1; j < cols; ++j) {
          if (m[t][j] != 0) {
            col_add(j, t, -(m[t][j] / m[t][t]));
            clean = clean && m[t][j] == 0;
          }
        }
        if (!clean) {
          continue;
        }
        // pivot must divide the whole trailing block
        std::size_t bad = rows;
        for (std::size_t i = t + 1; i < rows && bad == rows; ++i) {
          for (std::size_t j = t + 1; j < cols; ++j) {
            if (m[i][j] % m[t][t] != 0) {
              bad = i;
              break;
            }
          }
        }
        if (bad == rows) {
          break;
        }
        row_add(t, bad, 1);
      }
      if (m[t][t] < 0) {
        for (std::size_t j = 0; j < cols; ++j) {
          m[t][j] = -m[t][j];
        }
        for (std::size_t j = 0; j < rows; ++j) {
          out.left[t][j] = -out.left[t][j];
        }
      }
    }
    out.diagonal.resize(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      out.diagonal[t] = m[t][t];
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Lattices containing N * Z^n
  ////////////////////////////////////////////////////////////////////////

  class ModLattice {
   public:
    ModLattice() = default;

    ModLattice(std::size_t dim, Int modulus) : _modulus(modulus), _rows(dim) {
      detail::require<Error>(modulus >= 1, "lattice modulus must be >= 1");
    }

    std::size_t dim() const noexcept {
      return _rows.size();
    }

    Int modulus() const noexcept {
      return _modulus;
    }

    void insert(Vec v) {
      detail::require<Error>(v.size() == dim(), "lattice vector has wrong length");
      for (auto& x : v) {
        x = mod(x, _modulus);
      }
      std::vector<Vec> work{std::move(v)};
      while (!work.empty()) {
        Vec w = std::move(work.back());
        work.pop_back();
        for (std::size_t i = 0; i < dim(); ++i) {
          if (w[i] == 0) {
            continue;
          }
          Vec row = basis_row(i);
          Int p   = row[i];
          if (w[i] % p == 0) {
            Int q = w[i] / p;
            for (std::size_t j = i; j < dim(); ++j) {
              w[j] = mod(w[j] - q * row[j], _modulus);
            }
            continue;
          }
          auto [g, a, b] = ext_gcd(p, w[i]);
          Int wi         = w[i];
          Vec fresh(dim(), 0);
          for (std::size_t j = i; j < dim(); ++j) {
            fresh[j] = mod(a * row[j] + b * w[j], _modulus);
            w[j]     = mod((wi / g) * row[j] - (p / g) * w[j], _modulus);
          }
          fresh[i] = g;
          Vec spill(dim(), 0);
          bool any = false;
          for (std::size_t j = i + 1; j < dim(); ++j) {
            spill[j] = mod((_modulus / g) * fresh[j], _modulus);
            any      = any || spill[j] != 0;
          }
          _rows[i] = std::move(fresh);
          if (any) {
            work.push_back(std::move(spill));
          }
        }
      }
    }

    // Pivot of the basis row at column i (N when the row is N * e_i).
    Int pivot(std::size_t i) const {
      return _rows[i].empty() ? _modulus : _rows[i][i];
    }

    Vec basis_row(std::size_t i) const {
      if (_rows[i].empty()) {
        Vec e(dim(), 0);
        e[i] = _modulus;
        return e;
      }
      return _rows[i];
    }

    // Canonical representative of v + L.
    Vec reduce(Vec v) const {
      for (auto& x : v) {
        x = mod(x, _modulus);
      }
      for (std::size_t i = 0; i < dim(); ++i) {
        if (v[i] == 0 || _rows[i].empty()) {
          continue;
        }
        Int q = v[i] / _rows[i][i];
        if (q == 0) {
          continue;
        }
        for (std::size_t j = i; j < dim(); ++j) {
          v[j] = mod(v[j] - q * _rows[i][j], _modulus);
        }
      }
      return v;
    }

    bool contains(Vec const& v) const {
      auto r = reduce(v);
      return std::all_of(r.begin(), r.end(), [](Int x) { return x == 0; });
    }

    bool is_subset_of(ModLattice const& other) const {
      for (std::size_t i = 0; i < dim(); ++i) {
        if (!other.contains(basis_row(i))) {
          return false;
        }
      }
      return true;
    }

    // Index [Z^n : L] as the list of pivots.
    Vec pivots() const {
      Vec out(dim());
      for (std::size_t i = 0; i < dim(); ++i) {
        out[i] = pivot(i);
      }
      return out;
    }

    bool operator==(ModLattice const& that) const {
      return _modulus == that._modulus && dim() == that.dim() && is_subset_of(that)
             && that.is_subset_of(*this);
    }

   private:
    Int              _modulus = 1;
    std::vector<Vec> _rows;  // empty = implicit N * e_i
  };

  // Lattice {x in Z^n : F x = 0 mod N}; F is rows x n.
  inline ModLattice kernel_mod(Matrix const& f, std::size_t n, Int modulus) {
    struct Column {
      Vec f;
      Vec x;
    };
    std::size_t const   rows = f.size();
    std::vector<Column> active;
    active.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      Column c{Vec(rows), Vec(n, 0)};
      for (std::size_t r = 0; r < rows; ++r) {
        c.f[r] = mod(f[r][j], modulus);
      }
      c.x[j] = 1;
      active.push_back(std::move(c));
    }
    // Active columns vanish above the current row, so updates start at r.
    auto combine = [modulus](Column& p, Column& c, std::size_t r) {
      Int pr = p.f[r], cr = c.f[r];
      if (cr % pr == 0) {
        Int q = cr / pr;
        for (std::size_t k = r; k < p.f.size(); ++k) {
          c.f[k] = mod(c.f[k] - q * p.f[k], modulus);
        }
        for (std::size_t k = 0; k < p.x.size(); ++k) {
          c.x[k] = mod(c.x[k] - q * p.x[k], modulus);
        }
        return;
      }
      auto [g, a, b] = ext_gcd(pr, cr);
      for (std::size_t k = r; k < p.f.size(); ++k) {
        Int np = a * p.f[k] + b * c.f[k];
        Int nc = (cr / g) * p.f[k] - (pr / g) * c.f[k];
        p.f[k] = mod(np, modulus);
        c.f[k] = mod(nc, modulus);
      }
      for (std::size_t k = 0; k < p.x.size(); ++k) {
        Int np = a * p.x[k] + b * c.x[k];
        Int nc = (cr / g) * p.x[k] - (pr / g) * c.x[k];
        p.x[k] = mod(np, modulus);
        c.x[k] = mod(nc, modulus);
      }
    };
    for (std::size_t r = 0; r < rows; ++r) {
      std::optional<std::size_t> piv;
      for (std::size_t k = 0; k < active.size(); ++k) {
        if (active[k].f[r] == 0) {
          continue;
        }
        if (!piv) {
          piv = k;
        } else {
          combine(active[*piv], active[k], r);
        }
      }
      if (!piv) {
        continue;
      }
      Column p = std::move(active[*piv]);
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(*piv));
      Int const scale = modulus / std::gcd(p.f[r], modulus);
      Column    spawn{Vec(rows), Vec(n)};
      bool      nonzero = false;
      for (std::size_t k = 0; k < rows; ++k) {
        spawn.f[k] = mod(scale * p.f[k], modulus);
      }
      for (std::size_t k = 0; k < n; ++k) {
        spawn.x[k] = mod(scale * p.x[k], modulus);
        nonzero    = nonzero || spawn.x[k] != 0;
      }
      if (nonzero) {
        active.push_back(std::move(spawn));
      }
    }
    ModLattice out(n, modulus);
    for (auto& c : active) {
      out.insert(c.x);
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // FiniteAbelianGroup
  ////////////////////////////////////////////////////////////////////////

  class FiniteAbelianGroup {
   public:
    FiniteAbelianGroup() = default;

    explicit FiniteAbelianGroup(Vec factors) : _factors(std::move(factors)) {
      for (std::size_t i = 0; i < _factors.size(); ++i) {
        detail::require(_factors[i] >= 2, "invariant factors must be >= 2");
        detail::require(i == 0 || _factors[i] % _factors[i - 1] == 0,
                        "invariant factors must form a divisibility chain");
      }
    }

    // Any list of cyclic orders (entries 1 and 0 are not allowed to mean Z).
    static FiniteAbelianGroup from_cyclic_orders(Vec const& orders) {
      if (orders.empty()) {
        return {};
      }
      Matrix d = zero_matrix(orders.size(), orders.size());
      for (std::size_t i = 0; i < orders.size(); ++i) {
        detail::require(orders[i] >= 1, "cyclic orders must be positive");
        d[i][i] = orders[i];
      }
      Vec out;
      for (Int s : smith_normal_form(d).diagonal) {
        if (s > 1) {
          out.push_back(s);
        }
      }
      return FiniteAbelianGroup(std::move(out));
    }

    Vec const& factors() const noexcept {
      return _factors;
    }

    std::size_t rank() const noexcept {
      return _factors.size();
    }

    Int order() const {
      Int n = 1;
      for (Int d : _factors) {
        n = checked_mul(n, d);
      }
      return n;
    }

    Int exponent() const noexcept {
      return _factors.empty() ? 1 : _factors.back();
    }

    bool is_trivial() const noexcept {
      return _factors.empty();
    }

    Vec zero() const {
      return Vec(rank(), 0);
    }

    Vec normalize(Vec x) const {
      detail::require(x.size() == rank(), "element vector has wrong length");
      for (std::size_t i = 0; i < rank(); ++i) {
        x[i] = mod(x[i], _factors[i]);
      }
      return x;
    }

    bool is_element(Vec const& x) const {
      if (x.size() != rank()) {
        return false;
      }
      for (std::size_t i = 0; i < rank(); ++i) {
        if (x[i] < 0 || x[i] >= _factors[i]) {
          return false;
        }
      }
      return true;
    }

    Vec add(Vec const& x, Vec const& y) const {
      Vec out(rank());
      for (std::size_t i = 0; i < rank(); ++i) {
        out[i] = mod(x[i] + y[i], _factors[i]);
      }
      return out;
    }

    Vec scale(Vec const& x, Int k) const {
      Vec out(rank());
      for (std::size_t i = 0; i < rank(); ++i) {
        out[i] = mod(k * x[i], _factors[i]);
      }
      return out;
    }

    // All elements in lexicographic order; throws above `cap`.
    std::vector<Vec> elements(Int cap = 1 << 20) const {
      if (order() > cap) {
        throw SizeCapError("group too large to enumerate: " + to_string());
      }
      std::vector<Vec> out;
      Vec              x = zero();
      while (true) {
        out.push_back(x);
        std::size_t i = rank();
        while (i > 0) {
          --i;
          if (++x[i] < _factors[i]) {
            break;
          }
          x[i] = 0;
          if (i == 0) {
            return out;
          }
        }
        if (rank() == 0) {
          return out;
        }
      }
    }

    // Relation lattice diag(d_i) inside Z^rank with modulus N (d_i | N).
    ModLattice relations(Int modulus) const {
      ModLattice out(rank(), modulus);
      for (std::size_t i = 0; i < rank(); ++i) {
        detail::require<Error>(modulus % _factors[i] == 0,
                               "lattice modulus must be a multiple of every factor");
        Vec e(rank(), 0);
        e[i] = _factors[i];
        out.insert(e);
      }
      return out;
    }

    std::string to_string() const {
      if (_factors.empty()) {
        return "0";
      }
      std::ostringstream os;
      for (std::size_t i = 0; i < rank(); ++i) {
        os << (i == 0 ? "" : " + ") << "Z/" << _factors[i];
      }
      return os.str();
    }

    bool operator==(FiniteAbelianGroup const&) const = default;

   private:
    Vec _factors;
  };

  ////////////////////////////////////////////////////////////////////////
  // Subquotients top / bottom of lattices in Z^n
  ////////////////////////////////////////////////////////////////////////

  // The finite group top/bottom in invariant-factor form, with coordinate
  // maps in both directions.
  class Subquotient {
   public:
    Subquotient() = default;

    Subquotient(ModLattice const& top, ModLattice const& bottom)
        : _n(top.dim()), _modulus(top.modulus()) {
      detail::require<Error>(bottom.dim() == _n && bottom.modulus() == _modulus,
                             "subquotient lattices must share dimension and modulus");
      detail::require<Error>(bottom.is_subset_of(top),
                             "subquotient bottom is not contained in top");
      _top_pivots.resize(_n);
      _top_rows.resize(_n);
      _trivial = true;
      for (std::size_t i = 0; i < _n; ++i) {
        _top_rows[i]   = top.basis_row(i);
        _top_pivots[i] = top.pivot(i);
        _index.push_back(bottom.pivot(i) / top.pivot(i));
        _trivial = _trivial && _index.back() == 1;
      }
      if (_trivial) {
        return;
      }
      // N kills top / bottom, so all coordinate arithmetic is mod N
      Int const d = _modulus;
      // top coordinates of N * e_k, right to left
      _wrap.assign(_n, Vec(_n, 0));
      for (std::size_t kk = _n; kk > 0; --kk) {
        std::size_t k = kk - 1;
        Int         q = _modulus / _top_pivots[k];
        Vec         v(_n, 0);
        for (std::size_t j = k + 1; j < _n; ++j) {
          v[j] = -q * _top_rows[k][j];
        }
        Vec y = top_coordinates(std::move(v), k + 1);
        y[k]  = mod(y[k] + q, d);
        _wrap[k] = std::move(y);
      }
      // bottom expressed in the basis of top
      ModLattice rel(_n, d);
      for (std::size_t i = 0; i < _n; ++i) {
        rel.insert(top_coordinates(bottom.basis_row(i)));
      }
      for (std::size_t i = 0; i < _n; ++i) {
        if (rel.pivot(i) > 1) {
          _gens.push_back(i);
        }
      }
      std::size_t const        s = _gens.size();
      std::vector<std::size_t> slot(_n, s);
      for (std::size_t k = 0; k < s; ++k) {
        slot[_gens[k]] = k;
      }
      // generators with unit pivot are eliminated by back substitution
      _expr.assign(_n, Vec(s, 0));
      for (std::size_t ii = _n; ii > 0; --ii) {
        std::size_t i = ii - 1;
        if (slot[i] < s) {
          _expr[i][slot[i]] = 1;
          continue;
        }
        Vec row = rel.basis_row(i);
        for (std::size_t k = i + 1; k < _n; ++k) {
          if (row[k] == 0) {
            continue;
          }
          for (std::size_t j = 0; j < s; ++j) {
            _expr[i][j] = mod(_expr[i][j] - row[k] * _expr[k][j], d);
          }
        }
      }
      Matrix relm;
      for (std::size_t k = 0; k < s; ++k) {
        std::size_t i   = _gens[k];
        Vec         row = rel.basis_row(i);
        Vec         r(s, 0);
        r[k] = row[i];
        for (std::size_t l = i + 1; l < _n; ++l) {
          if (row[l] == 0) {
            continue;
          }
          for (std::size_t j = 0; j < s; ++j) {
            r[j] = mod(r[j] + row[l] * _expr[l][j], d);
          }
        }
        relm.push_back(r);
      }
      for (std::size_t k = 0; k < s; ++k) {
        Vec r(s, 0);
        r[k] = d;
        relm.push_back(r);
      }
      auto snf       = smith_normal_form(relm);
      _right         = snf.right;
      _right_inverse = snf.right_inverse;
      Vec factors;
      for (std::size_t k = 0; k < s; ++k) {
        if (snf.diagonal[k] > 1) {
          _kept.push_back(k);
          factors.push_back(snf.diagonal[k]);
        }
      }
      _group = FiniteAbelianGroup(factors);
    }

    FiniteAbelianGroup const& group() const noexcept {
      return _group;
    }

    // Throws SizeCapError when the order does not fit in an Int.
    Int order() const {
      Int d = 1;
      for (Int k : _index) {
        d = checked_mul(d, k);
      }
      return d;
    }

    bool is_trivial() const noexcept {
      return _trivial;
    }

    std::size_t dim() const noexcept {
      return _n;
    }

    Int modulus() const noexcept {
      return _modulus;
    }

    // Invariant coordinates of the class of v; v must lie in top.
    Vec coords(Vec const& v) const {
      detail::require<Error>(v.size() == _n, "subquotient vector has wrong length");
      if (_trivial) {
        top_coordinates(v);  // membership check only
        return {};
      }
      Vec const         y = top_coordinates(v);
      std::size_t const s = _gens.size();
      Vec               x(s, 0);
      for (std::size_t i = 0; i < _n; ++i) {
        if (y[i] == 0) {
          continue;
        }
        for (std::size_t j = 0; j < s; ++j) {
          x[j] = mod(x[j] + y[i] * _expr[i][j], _modulus);
        }
      }
      Vec out(_kept.size(), 0);
      for (std::size_t k = 0; k < _kept.size(); ++k) {
        Int acc = 0;
        for (std::size_t j = 0; j < s; ++j) {
          acc = mod(acc + x[j] * mod(_right[j][_kept[k]], _modulus), _modulus);
        }
        out[k] = mod(acc, _group.factors()[k]);
      }
      return out;
    }

    // A representative in Z^n (entries mod N) of the class with coordinates c.
    Vec lift(Vec const& c) const {
      detail::require<Error>(c.size() == _kept.size(), "coordinate vector has wrong length");
      Vec out(_n, 0);
      if (_trivial) {
        return out;
      }
      std::size_t const s = _gens.size();
      Vec               x(s, 0);
      for (std::size_t k = 0; k < _kept.size(); ++k) {
        for (std::size_t j = 0; j < s; ++j) {
          x[j] = mod(x[j] + c[k] * mod(_right_inverse[_kept[k]][j], _modulus), _modulus);
        }
      }
      for (std::size_t j = 0; j < s; ++j) {
        if (x[j] == 0) {
          continue;
        }
        auto const& z = _top_rows[_gens[j]];
        for (std::size_t l = 0; l < _n; ++l) {
          out[l] = mod(out[l] + x[j] * z[l], _modulus);
        }
      }
      return out;
    }

   private:
    // Coordinates (mod N) of v with respect to the triangular basis of
    // top.  Arithmetic is exact: every multiple of N shed from a column is
    // accounted for through the precomputed coordinates of N * e_i.
    Vec top_coordinates(Vec v, std::size_t start = 0) const {
      Int const d = _trivial ? 1 : _modulus;
      Vec       y(_n, 0);
      for (std::size_t i = start; i < _n; ++i) {
        Int t = v[i] >= 0 ? v[i] / _modulus : -((-v[i] + _modulus - 1) / _modulus);
        if (t != 0) {
          v[i] -= t * _modulus;
          if (d > 1) {
            Int tt = mod(t, d);
            for (std::size_t j = i; j < _n; ++j) {
              y[j] = mod(y[j] + tt * _wrap[i][j], d);
            }
          }
        }
        if (v[i] == 0) {
          continue;
        }
        detail::require<Error>(v[i] % _top_pivots[i] == 0,
                               "vector does not lie in the subquotient top");
        Int q = v[i] / _top_pivots[i];
        y[i]  = mod(y[i] + q, d);
        for (std::size_t j = i + 1; j < _n; ++j) {
          v[j] -= q * _top_rows[i][j];
        }
      }
      return y;
    }

    std::size_t              _n       = 0;
    Int                      _modulus = 1;
    bool                     _trivial = true;
    Vec                      _index;  // bottom pivot / top pivot per row
    Vec                      _top_pivots;
    std::vector<Vec>         _top_rows;
    std::vector<Vec>         _wrap;  // top coordinates of N * e_i
    std::vector<std::size_t> _gens;
    std::vector<Vec>         _expr;
    Matrix                   _right;
    Matrix                   _right_inverse;
    std::vector<std::size_t> _kept;
    FiniteAbelianGroup       _group;
  };

  inline ModLattice full_lattice(std::size_t dim, Int modulus) {
    ModLattice out(dim, modulus);
    for (std::size_t i = 0; i < dim; ++i) {
      Vec e(dim, 0);
      e[i] = 1;
      out.insert(e);
    }
    return out;
  }

  // The same lattice viewed with a multiple of its modulus.
  inline ModLattice with_modulus(ModLattice const& l, Int modulus) {
    detail::require<Error>(modulus % l.modulus() == 0, "new modulus must be a multiple");
    ModLattice out(l.dim(), modulus);
    for (std::size_t i = 0; i < l.dim(); ++i) {
      out.insert(l.basis_row(i));
      Vec e(l.dim(), 0);
      e[i] = l.modulus();
      out.insert(e);
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Homomorphisms
  ////////////////////////////////////////////////////////////////////////

  class AbHom {
   public:
    struct unchecked_t {};
    static constexpr unchecked_t unchecked{};

    AbHom() = default;

    AbHom(FiniteAbelianGroup source, FiniteAbelianGroup target, Matrix matrix)
        : AbHom(std::move(source), std::move(target), std::move(matrix), unchecked) {
      detail::require(is_well_defined(),
                      "matrix does not respect the relations of the source group");
    }

    // Shape is checked, relations are not (used to build corrupted maps).
    AbHom(FiniteAbelianGroup source, FiniteAbelianGroup target, Matrix matrix, unchecked_t)
        : _source(std::move(source)), _target(std::move(target)), _matrix(std::move(matrix)) {
      detail::require(_matrix.size() == _target.rank(), "hom matrix has wrong row count");
      for (std::size_t i = 0; i < _matrix.size(); ++i) {
        detail::require(_matrix[i].size() == _source.rank(), "hom matrix has wrong column count");
        for (auto& x : _matrix[i]) {
          x = mod(x, _target.factors()[i]);
        }
      }
    }

    static AbHom zero(FiniteAbelianGroup source, FiniteAbelianGroup target) {
      Matrix m = zero_matrix(target.rank(), source.rank());
      return AbHom(std::move(source), std::move(target), std::move(m));
    }

    static AbHom identity(FiniteAbelianGroup const& a) {
      return AbHom(a, a, identity_matrix(a.rank()));
    }

    FiniteAbelianGroup const& source() const noexcept {
      return _source;
    }

    FiniteAbelianGroup const& target() const noexcept {
      return _target;
    }

    Matrix const& matrix() const noexcept {
      return _matrix;
    }

    bool is_well_defined() const {
      for (std::size_t j = 0; j < _source.rank(); ++j) {
        for (std::size_t i = 0; i < _target.rank(); ++i) {
          if (mod(_source.factors()[j] * _matrix[i][j], _target.factors()[i]) != 0) {
            return false;
          }
        }
      }
      return true;
    }

    Vec apply(Vec const& x) const {
      Vec out(_target.rank(), 0);
      for (std::size_t i = 0; i < _target.rank(); ++i) {
        Int acc = 0;
        for (std::size_t j = 0; j < _source.rank(); ++j) {
          acc += _matrix[i][j] * x[j];
        }
        out[i] = mod(acc, _target.factors()[i]);
      }
      return out;
    }

    // this after first
    AbHom after(AbHom const& first) const {
      detail::require(first.target() == _source, "composition of incompatible homs");
      return AbHom(first.source(), _target, multiply(_matrix, first.matrix()), unchecked);
    }

    // Common modulus for lattices over source or target.
    Int modulus() const {
      return lcm(_source.exponent(), _target.exponent());
    }

    bool operator==(AbHom const&) const = default;

   private:
    FiniteAbelianGroup _source;
    FiniteAbelianGroup _target;
    Matrix             _matrix;
  };

  // Lattice of x in Z^rank(source) with f(x) = 0, modulus f.modulus().
  inline ModLattice kernel_lattice(AbHom const& f) {
    Int const  n = f.modulus();
    auto const& tf = f.target().factors();
    Matrix     scaled(f.target().rank());
    for (std::size_t i = 0; i < scaled.size(); ++i) {
      scaled[i] = f.matrix()[i];
      for (auto& x : scaled[i]) {
        x *= n / tf[i];
      }
    }
    auto k = kernel_mod(scaled, f.source().rank(), n);
    auto r = f.source().relations(n);
    for (std::size_t i = 0; i < r.dim(); ++i) {
      k.insert(r.basis_row(i));
    }
    return k;
  }

  // Lattice spanned by the image of f plus the relations of the target.
  inline ModLattice image_lattice(AbHom const& f) {
    auto out = f.target().relations(f.modulus());
    for (std::size_t j = 0; j < f.source().rank(); ++j) {
      Vec col(f.target().rank());
      for (std::size_t i = 0; i < col.size(); ++i) {
        col[i] = f.matrix()[i][j];
      }
      out.insert(col);
    }
    return out;
  }

  inline Subquotient kernel(AbHom const& f) {
    return Subquotient(kernel_lattice(f), f.source().relations(f.modulus()));
  }

  inline Subquotient image(AbHom const& f) {
    return Subquotient(image_lattice(f), f.target().relations(f.modulus()));
  }

  inline bool is_injective(AbHom const& f) {
    return kernel(f).is_trivial();
  }

  inline bool is_surjective(AbHom const& f) {
    return image(f).group() == f.target();
  }

  inline bool is_isomorphism(AbHom const& f) {
    return f.is_well_defined() && is_injective(f) && is_surjective(f);
  }

  // Subgroup of A generated by `gens`, as a lattice with modulus N.
  inline ModLattice subgroup_lattice(FiniteAbelianGroup const& a,
                                     std::vector<Vec> const&   gens,
                                     Int                       modulus) {
    auto out = a.relations(modulus);
    for (auto const& g : gens) {
      out.insert(g);
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Pontryagin duality
  ////////////////////////////////////////////////////////////////////////

  // An element of Q/Z as a reduced fraction num/den with 0 <= num < den.
  struct QZ {
    Int num = 0;
    Int den = 1;

    static QZ make(Int num, Int den) {
      detail::require<Error>(den > 0, "Q/Z denominator must be positive");
      num   = mod(num, den);
      Int g = std::gcd(num, den);
      if (g == 0) {
        return {0, 1};
      }
      return {num / g, den / g};
    }

    QZ operator+(QZ const& o) const {
      Int l = lcm(den, o.den);
      return make(num * (l / den) + o.num * (l / o.den), l);
    }

    bool is_zero() const noexcept {
      return num == 0;
    }

    bool operator==(QZ const&) const = default;
  };

  // (x, chi) -> sum_i x_i chi_i / d_i in Q/Z, for chi in the dual of
  // Z/d_1 + ... + Z/d_r written in the same invariant factors.
  class DualPairing {
   public:
    DualPairing() = default;

    DualPairing(FiniteAbelianGroup left, FiniteAbelianGroup right)
        : _left(std::move(left)), _right(std::move(right)) {
      detail::require(_left == _right, "pairing requires matching invariant factors");
    }

    FiniteAbelianGroup const& left() const noexcept {
      return _left;
    }

    FiniteAbelianGroup const& right() const noexcept {
      return _right;
    }

    QZ operator()(Vec const& x, Vec const& chi) const {
      QZ out;
      for (std::size_t i = 0; i < _left.rank(); ++i) {
        out = out + QZ::make(x[i] * chi[i], _left.factors()[i]);
      }
      return out;
    }

    // Exhaustive: biadditive on generators, no nonzero element pairs trivially
    // with everything on either side.
    bool is_nondegenerate(Int cap = 1 << 12) const {
      auto xs = _left.elements(cap);
      auto cs = _right.elements(cap);
      for (auto const& x : xs) {
        if (x == _left.zero()) {
          continue;
        }
        bool seen = false;
        for (auto const& c : cs) {
          if (!(*this)(x, c).is_zero()) {
            seen = true;
            break;
          }
        }
        if (!seen) {
          return false;
        }
      }
      for (auto const& c : cs) {
        if (c == _right.zero()) {
          continue;
        }
        bool seen = false;
        for (auto const& x : xs) {
          if (!(*this)(x, c).is_zero()) {
            seen = true;
            break;
          }
        }
        if (!seen) {
          return false;
        }
      }
      return true;
    }

    bool is_biadditive(Int cap = 1 << 10) const {
      auto xs = _left.elements(cap);
      auto cs = _right.elements(cap);
      for (auto const& x : xs) {
        for (auto const& y : xs) {
          for (auto const& c : cs) {
            if ((*this)(_left.add(x, y), c) != (*this)(x, c) + (*this)(y, c)) {
              return false;
            }
          }
        }
      }
      return true;
    }

   private:
    FiniteAbelianGroup _left;
    FiniteAbelianGroup _right;
  };

  struct DualGroup {
    FiniteAbelianGroup group;
    DualPairing        pairing;
  };

  inline DualGroup dual_group(FiniteAbelianGroup const& a) {
    return {a, DualPairing(a, a)};
  }

  inline FiniteAbelianGroup hom_group(FiniteAbelianGroup const& a, FiniteAbelianGroup const& b) {
    Vec orders;
    for (Int d : a.factors()) {
      for (Int e : b.factors()) {
        orders.push_back(std::gcd(d, e));
      }
    }
    return FiniteAbelianGroup::from_cyclic_orders(orders);
  }

  // Lattice (modulus exp A) of characters chi of A killing every generator.
  inline ModLattice annihilator_lattice(FiniteAbelianGroup const& a, std::vector<Vec> const& gens) {
    Int const n = a.exponent();
    Matrix    rows;
    for (auto const& g : gens) {
      Vec r(a.rank());
      for (std::size_t i = 0; i < a.rank(); ++i) {
        r[i] = g[i] * (n / a.factors()[i]);
      }
      rows.push_back(r);
    }
    auto k = kernel_mod(rows, a.rank(), n);
    auto r = a.relations(n);
    for (std::size_t i = 0; i < r.dim(); ++i) {
      k.insert(r.basis_row(i));
    }
    return k;
  }

  struct SubAndQuotient {
    FiniteAbelianGroup sub;
    FiniteAbelianGroup quotient;
    FiniteAbelianGroup annihilator;
    Subquotient        sub_view;          // B inside A
    Subquotient        quotient_view;     // A / B
    Subquotient        annihilator_view;  // ann(B) inside A^dual
    // ann(B) and (A/B)^dual have the same invariant factors and the pairing
    // A/B x ann(B) -> Q/Z is well defined and nondegenerate.
    bool certified = false;
  };

  inline SubAndQuotient sub_and_quotient(FiniteAbelianGroup const& a, std::vector<Vec> const& gens) {
    for (auto const& g : gens) {
      detail::require(g.size() == a.rank(), "generator vector has wrong length");
    }
    Int const n   = a.exponent();
    auto      rel = a.relations(n);
    auto      sub = subgroup_lattice(a, gens, n);
    SubAndQuotient out;
    out.sub_view         = Subquotient(sub, rel);
    out.quotient_view    = Subquotient(full_lattice(a.rank(), n), sub);
    out.annihilator_view = Subquotient(annihilator_lattice(a, gens), rel);
    out.sub              = out.sub_view.group();
    out.quotient         = out.quotient_view.group();
    out.annihilator      = out.annihilator_view.group();

    bool ok = out.annihilator == dual_group(out.quotient).group
              && checked_mul(out.sub.order(), out.annihilator.order()) == a.order();
    if (ok) {
      DualPairing pairing(a, a);
      // annihilator generators kill B
      for (std::size_t k = 0; ok && k < out.annihilator.rank(); ++k) {
        Vec e(out.annihilator.rank(), 0);
        e[k]     = 1;
        Vec chi  = a.normalize(out.annihilator_view.lift(e));
        for (auto const& g : gens) {
          if (!pairing(a.normalize(g), chi).is_zero()) {
            ok = false;
            break;
          }
        }
      }
      // nondegenerate on A/B x ann(B): the pairing matrix on generators has
      // order |A/B| as a subgroup of Hom(A/B, Q/Z), checked via orders of
      // annihilator generators acting on quotient generators.
      if (ok && out.quotient.order() <= (1 << 12)) {
        auto qs = out.quotient.elements();
        auto cs = out.annihilator.elements();
        for (auto const& q : qs) {
          if (q == out.quotient.zero()) {
            continue;
          }
          Vec  x    = a.normalize(out.quotient_view.lift(q));
          bool seen = false;
          for (auto const& c : cs) {
            Vec chi = a.normalize(out.annihilator_view.lift(c));
            if (!pairing(x, chi).is_zero()) {
              seen = true;
              break;
            }
          }
          if (!seen) {
            ok = false;
            break;
          }
        }
      }
    }
    out.certified = ok;
    return out;
  }

}  // namespace corfree

#endif  // CORFREE_AB_HPP_
