#ifndef CORFREE_IO_HPP_
#define CORFREE_IO_HPP_

// JSON spec files: groups, abelian groups, families, modules, towers and
// open sets.  Element indices are zero-based everywhere.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ab.hpp"
#include "coh.hpp"
#include "error.hpp"
#include "family.hpp"
#include "freeprod.hpp"
#include "grp.hpp"
#include "topo.hpp"

namespace corfree::io {

  using Json = nlohmann::ordered_json;

  inline Json read_json_file(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
      throw ParseError("cannot open " + path);
    }
    try {
      return Json::parse(in);
    } catch (nlohmann::json::exception const& e) {
      throw ParseError(path + ": " + e.what());
    }
  }

  namespace detail {

    inline Json const& field(Json const& j, char const* key, std::string const& where) {
      if (!j.is_object() || !j.contains(key)) {
        throw ParseError(where + ": missing field '" + key + "'");
      }
      return j.at(key);
    }

    template <typename T>
    T get(Json const& j, std::string const& where) {
      try {
        return j.get<T>();
      } catch (nlohmann::json::exception const& e) {
        throw ParseError(where + ": " + e.what());
      }
    }

  }  // namespace detail

  inline FiniteGroup parse_group(Json const& j, std::size_t cap = default_order_cap,
                                 std::string const& where = "group") {
    auto kind = detail::get<std::string>(detail::field(j, "kind", where), where + ".kind");
    if (kind == "cyclic") {
      auto n = detail::get<std::size_t>(detail::field(j, "n", where), where + ".n");
      if (n > cap) {
        throw SizeCapError(where + ": order " + std::to_string(n) + " exceeds cap");
      }
      return cyclic_group(n);
    }
    if (kind == "trivial") {
      return trivial_group();
    }
    if (kind == "perm") {
      auto degree = detail::get<std::size_t>(detail::field(j, "degree", where), where + ".degree");
      auto gens   = detail::get<std::vector<Permutation>>(detail::field(j, "generators", where),
                                                        where + ".generators");
      return group_from_generators(degree, gens, cap);
    }
    if (kind == "table") {
      auto table = detail::get<std::vector<std::vector<Elt>>>(detail::field(j, "table", where),
                                                              where + ".table");
      if (table.size() > cap) {
        throw SizeCapError(where + ": table order exceeds cap");
      }
      return FiniteGroup::from_table(table);
    }
    if (kind == "dihedral") {
      return dihedral_group(detail::get<std::size_t>(detail::field(j, "n", where), where + ".n"));
    }
    if (kind == "symmetric") {
      return symmetric_group(detail::get<std::size_t>(detail::field(j, "n", where), where + ".n"));
    }
    if (kind == "quaternion") {
      return quaternion_group();
    }
    if (kind == "heisenberg") {
      return heisenberg_group(detail::get<std::size_t>(detail::field(j, "p", where), where + ".p"));
    }
    if (kind == "product") {
      auto const& fs = detail::field(j, "factors", where);
      FiniteGroup out;
      for (std::size_t k = 0; k < fs.size(); ++k) {
        out = direct_product(out, parse_group(fs[k], cap, where + ".factors[" + std::to_string(k) + "]"));
      }
      return out;
    }
    throw ParseError(where + ": unknown group kind '" + kind + "'");
  }

  inline FiniteAbelianGroup parse_ab(Json const& j, std::string const& where = "coeff") {
    auto kind = detail::get<std::string>(detail::field(j, "kind", where), where + ".kind");
    if (kind != "ab") {
      throw ParseError(where + ": expected kind 'ab'");
    }
    auto f = detail::get<Vec>(detail::field(j, "factors", where), where + ".factors");
    return FiniteAbelianGroup::from_cyclic_orders(f);
  }

  inline Fiber parse_fiber(Json const& j, std::size_t cap, std::string const& where) {
    auto g    = parse_group(detail::field(j, "group", where), cap, where + ".group");
    auto gens = j.contains("subgroup_generators")
                    ? detail::get<std::vector<Elt>>(j.at("subgroup_generators"),
                                                    where + ".subgroup_generators")
                    : std::vector<Elt>{};
    for (Elt x : gens) {
      if (x < 0 || static_cast<std::size_t>(x) >= g.order()) {
        throw ValidationError(where + ": subgroup generator " + std::to_string(x) + " out of range");
      }
    }
    // explicit element lists are taken literally so corrupted subgroups fail
    if (j.contains("subgroup_elements")) {
      auto elts = detail::get<std::vector<Elt>>(j.at("subgroup_elements"), where + ".subgroup_elements");
      return Fiber(g, Subgroup(g, elts));
    }
    return Fiber(g, generated_subgroup(g, gens));
  }

  inline FamilySpec parse_family(Json const& j, std::size_t cap = default_order_cap) {
    if (j.contains("index_space")) {
      auto kind = detail::get<std::string>(j.at("index_space"), "index_space");
      if (kind != "one-point-compactification" && kind != "finite") {
        throw ParseError("index space '" + kind
                         + "' is not supported; only finite sets and one-point compactifications");
      }
    }
    auto primes = detail::get<std::vector<Int>>(detail::field(j, "prime_set", "family"), "prime_set");
    std::vector<FamilySpec::Entry> ex;
    if (j.contains("exceptional")) {
      auto const& e = j.at("exceptional");
      if (!e.is_object()) {
        throw ParseError("exceptional: expected an object");
      }
      for (auto it = e.begin(); it != e.end(); ++it) {
        ex.emplace_back(it.key(), parse_fiber(it.value(), cap, "exceptional." + it.key()));
      }
    }
    std::optional<Fiber> tail;
    if (j.contains("tail") && !j.at("tail").is_null()) {
      tail = parse_fiber(j.at("tail"), cap, "tail");
    }
    FamilySpec spec(std::move(ex), std::move(tail), std::move(primes));
    validate_family(spec);
    return spec;
  }

  inline GModule parse_gmodule(Json const& j, FiniteGroup const& g, FiniteAbelianGroup const& a,
                               std::string const& where) {
    std::vector<std::pair<Elt, Matrix>> gens;
    if (j.contains("action")) {
      for (auto const& item : j.at("action")) {
        auto e = detail::get<Elt>(detail::field(item, "element", where), where + ".element");
        auto m = detail::get<Matrix>(detail::field(item, "matrix", where), where + ".matrix");
        if (e < 0 || static_cast<std::size_t>(e) >= g.order()) {
          throw ValidationError(where + ": action element out of range");
        }
        if (m.size() != a.rank()) {
          throw ValidationError(where + ": action matrix has the wrong shape");
        }
        gens.emplace_back(e, std::move(m));
      }
    }
    auto out = GModule::from_generators(g, a, gens);
    for (auto const& [e, m] : gens) {
      auto const& have = out.action(e);
      for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t k = 0; k < m[i].size(); ++k) {
          if (mod(m[i][k], a.factors()[i]) != have[i][k]) {
            throw ValidationError(where + ": listed action matrices are inconsistent");
          }
        }
      }
    }
    return out;
  }

  // {"coeff": {"kind":"ab",...}, "fibers": {name: {"action": [...]}, "tail": {...}}}
  inline FamilyModule parse_module(Json const& j, FamilySpec const& spec) {
    FamilyModule m;
    m.coeff = parse_ab(detail::field(j, "coeff", "module"), "module.coeff");
    if (j.contains("fibers")) {
      auto const& fs = j.at("fibers");
      for (auto it = fs.begin(); it != fs.end(); ++it) {
        if (!spec.has(it.key())) {
          throw ValidationError("module: no fiber named " + it.key());
        }
        m.fibers.emplace(it.key(), parse_gmodule(it.value(), spec.at(it.key()).group, m.coeff,
                                                 "module.fibers." + it.key()));
      }
    }
    return m;
  }

  inline GroupHom parse_group_hom(Json const& j, FiniteGroup const& src, FiniteGroup const& tgt,
                                  std::string const& where) {
    if (j.contains("images")) {
      auto img = detail::get<std::vector<Elt>>(j.at("images"), where + ".images");
      return GroupHom(src, tgt, std::move(img));
    }
    if (j.contains("generator_images")) {
      auto pairs = detail::get<std::vector<std::pair<Elt, Elt>>>(j.at("generator_images"),
                                                                  where + ".generator_images");
      return GroupHom::from_generator_images(src, tgt, pairs);
    }
    throw ParseError(where + ": need 'images' or 'generator_images'");
  }

  inline FamilyMorphism parse_morphism(Json const& j, FamilySpec const& src, FamilySpec const& tgt,
                                       std::string const& where) {
    auto idx = detail::get<std::map<std::string, std::string>>(detail::field(j, "index_map", where),
                                                                where + ".index_map");
    std::map<std::string, GroupHom> maps;
    if (j.contains("fiber_maps")) {
      auto const& fm = j.at("fiber_maps");
      for (auto it = fm.begin(); it != fm.end(); ++it) {
        if (!src.has(it.key()) || !idx.count(it.key())) {
          throw ValidationError(where + ": fiber map at unknown index " + it.key());
        }
        auto const& dst = idx.at(it.key());
        if (dst == star_index || !tgt.has(dst)) {
          throw ValidationError(where + ": fiber map at " + it.key() + " has no target fiber");
        }
        maps.emplace(it.key(), parse_group_hom(it.value(), src.at(it.key()).group, tgt.at(dst).group,
                                               where + ".fiber_maps." + it.key()));
      }
    }
    return FamilyMorphism(src, tgt, std::move(idx), std::move(maps));
  }

  inline Tower parse_tower(Json const& j, std::size_t cap = default_order_cap) {
    Tower t;
    for (auto const& lv : detail::field(j, "levels", "tower")) {
      t.levels.push_back(parse_family(lv, cap));
    }
    auto const& tr = detail::field(j, "transitions", "tower");
    if (tr.size() + 1 != t.levels.size()) {
      throw ValidationError("tower: need one transition per adjacent pair of levels");
    }
    for (std::size_t k = 0; k < tr.size(); ++k) {
      t.transitions.push_back(parse_morphism(tr[k], t.levels[k + 1], t.levels[k],
                                             "tower.transitions[" + std::to_string(k) + "]"));
    }
    return t;
  }

  inline OpenSetSpec parse_open_set(Json const& j, FamilySpec const& fam, std::string const& where) {
    std::map<std::string, ElementSet> parts;
    if (j.contains("parts")) {
      parts = detail::get<std::map<std::string, ElementSet>>(j.at("parts"), where + ".parts");
    }
    ElementSet def;
    if (j.contains("tail_default")) {
      def = detail::get<ElementSet>(j.at("tail_default"), where + ".tail_default");
    }
    std::map<std::size_t, ElementSet> exc;
    if (j.contains("tail_exceptions")) {
      auto const& e = j.at("tail_exceptions");
      for (auto it = e.begin(); it != e.end(); ++it) {
        std::size_t k = 0;
        try {
          k = std::stoul(it.key());
        } catch (std::exception const&) {
          throw ParseError(where + ": tail exception key '" + it.key() + "' is not an index");
        }
        exc[k] = detail::get<ElementSet>(it.value(), where + ".tail_exceptions");
      }
    }
    bool star = j.contains("contains_star") && detail::get<bool>(j.at("contains_star"), where);
    return OpenSetSpec(fam, std::move(parts), std::move(def), std::move(exc), star);
  }

  ////////////////////////////////////////////////////////////////////////
  // Writing
  ////////////////////////////////////////////////////////////////////////

  inline Json group_json(FiniteGroup const& g) {
    return Json{{"kind", "table"}, {"table", g.table()}};
  }

  inline Json ab_json(FiniteAbelianGroup const& a) {
    return Json{{"kind", "ab"}, {"factors", a.factors()}};
  }

  inline Json fiber_json(Fiber const& f) {
    return Json{{"group", group_json(f.group)}, {"subgroup_elements", f.u.elements()}};
  }

  inline Json family_json(FamilySpec const& spec) {
    Json ex = Json::object();
    for (auto const& [n, f] : spec.exceptional()) {
      ex[n] = fiber_json(f);
    }
    return Json{{"prime_set", spec.prime_set()},
                {"exceptional", ex},
                {"tail", spec.tail() ? fiber_json(*spec.tail()) : Json(nullptr)}};
  }

  inline Json gmodule_json(GModule const& m) {
    Json act = Json::array();
    for (auto g : m.group().generators()) {
      act.push_back(Json{{"element", g}, {"matrix", m.action(g)}});
    }
    return Json{{"action", act}};
  }

  inline Json module_json(FamilyModule const& m) {
    Json fs = Json::object();
    for (auto const& [n, gm] : m.fibers) {
      fs[n] = gmodule_json(gm);
    }
    return Json{{"coeff", ab_json(m.coeff)}, {"fibers", fs}};
  }

}  // namespace corfree::io

#endif  // CORFREE_IO_HPP_
