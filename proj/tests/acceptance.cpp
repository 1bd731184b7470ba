// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "corfree/checks.hpp"
#include "corfree/corpus.hpp"

using namespace corfree;

namespace {

  struct Outcome {
    bool        pass = true;
    std::string detail;
  };

  Outcome from_records(std::vector<Record> const& rs, std::string const& what) {
    Outcome     out;
    std::size_t bad = 0;
    for (auto const& r : rs) {
      if (!r.pass) {
        if (bad++ == 0) {
          out.detail = "first failure: " + r.check + (r.witnesses.empty() ? "" : " (" + r.witnesses.back() + ")");
        }
      }
    }
    out.pass = bad == 0 && !rs.empty();
    if (out.pass) {
      out.detail = std::to_string(rs.size()) + " " + what;
    }
    return out;
  }

  std::vector<CorpusInstance> const& corpus() {
    static auto const c = generate_corpus(0, 30);
    return c;
  }

  Outcome criterion1() {
    std::vector<Record> rs;
    for (auto const& inst : corpus()) {
      rs.push_back(checks::exactness_record(inst));
    }
    return from_records(rs, "families exact");
  }

  Outcome criterion2() {
    auto       c2 = cyclic_group(2);
    auto       z3 = FiniteAbelianGroup::from_cyclic_orders({3});
    FamilySpec spec({{"a", Fiber::bare(c2)}, {"b", Fiber::bare(c2)}}, std::nullopt, {2});
    auto       neg = GModule::from_generators(c2, z3, {{1, {{-1}}}});
    FamilyModule m{z3, {{"a", neg}, {"b", neg}}};
    auto seq = four_term_sequence(truncate(spec, 0), m);
    auto rep = check_exactness(seq);
    std::vector<Vec> want = {{3}, {3, 3}, {3}, {}};
    bool ok = rep.passed;
    for (std::size_t k = 0; k < 4; ++k) {
      ok = ok && seq.terms[k].factors() == want[k];
    }
    return {ok, "0 -> " + seq.terms[0].to_string() + " -> " + seq.terms[1].to_string() + " -> "
                    + seq.terms[2].to_string() + " -> " + seq.terms[3].to_string() + " -> 0"};
  }

  Outcome criterion3() {
    std::mt19937_64     rng(3);
    std::vector<Record> rs;
    for (int k = 0; k < 200; ++k) {
      rs.push_back(checks::duality_record(checks::random_pair(rng), std::to_string(k)));
    }
    for (int k = 0; k < 20; ++k) {
      std::vector<RestrictedAbFamily::Entry> ex;
      for (int j = 0; j < 3; ++j) {
        ex.emplace_back("t" + std::to_string(j), checks::random_pair(rng));
      }
      Flavor f = k % 2 == 0 ? Flavor::compactified : Flavor::discretized;
      rs.push_back(checks::family_duality_record(
          RestrictedAbFamily(ex, checks::random_pair(rng), f), "family" + std::to_string(k)));
    }
    for (auto const& inst : corpus()) {
      rs.push_back(checks::family_duality_record(abelianization_formula(inst.spec), inst.name));
    }
    return from_records(rs, "duality records");
  }

  Outcome criterion4() {
    std::vector<Record> rs;
    std::size_t         pairs = 0;
    for (auto const& inst : corpus()) {
      rs.push_back(checks::cross_check_record(inst.name, inst.spec, checks::digest(inst, "cross")));
      pairs += inst.spec.prime_set().size();
    }
    auto out = from_records(rs, "families");
    if (out.pass) {
      out.detail += ", " + std::to_string(pairs) + " (family, p) pairs";
    }
    return out;
  }

  Outcome criterion5() {
    std::vector<Record> rs;
    std::size_t         differing = 0;
    for (auto const& inst : corpus()) {
      rs.push_back(checks::normal_closure_record(inst.name, inst.spec, inst.module, inst.level,
                                                 checks::digest(inst, "closure")));
      for (auto const& [n, f] : inst.spec.fibers()) {
        differing += normal_closure(f.group, f.u).order() != f.u.order();
      }
    }
    auto out = from_records(rs, "families");
    if (out.pass) {
      out.detail += ", " + std::to_string(differing) + " fibers with U != U~";
    }
    return out;
  }

  Outcome criterion6() {
    std::vector<Record> rs;
    for (auto const& inst : corpus()) {
      if (!inst.spec.tail()) {
        continue;
      }
      for (int deg : {1, 2}) {
        rs.push_back(checks::colimit_record(inst.name, inst.spec, inst.module, deg, 6,
                                            checks::digest(inst, "colimit")));
      }
    }
    return from_records(rs, "tower records over levels 0..6");
  }

  Outcome criterion7() {
    std::vector<Record> rs;
    std::set<std::string> seen;
    for (auto const& inst : corpus()) {
      for (auto const& [n, f] : inst.spec.fibers()) {
        auto m   = inst.module.at(n, f.group);
        auto dig = sha256_hex(io::gmodule_json(m).dump() + io::group_json(f.group).dump()
                              + io::ab_json(m.coeff()).dump());
        if (!seen.insert(dig).second) {
          continue;
        }
        rs.push_back(checks::dimension_shift_record(inst.name + "/" + n, m, dig));
      }
    }
    return from_records(rs, "distinct fiber modules");
  }

  Outcome criterion8() {
    std::mt19937_64                 rng(8);
    std::vector<FourTermSequence>   seqs;
    for (auto const& inst : corpus()) {
      seqs.push_back(four_term_sequence(truncate(inst.spec, inst.level), inst.module));
    }
    std::map<std::string, int> how;
    int                        detected = 0;
    int                        total    = 0;
    std::string                missed;
    for (std::size_t k = 0; total < 25; ++k) {
      auto r = checks::mutate_map(seqs[k % seqs.size()], rng);
      if (!r) {
        continue;
      }
      ++total;
      detected += r->detected;
      how[r->how] += r->detected;
      if (!r->detected && missed.empty()) {
        missed = corpus()[k % seqs.size()].name + " " + r->what;
      }
    }
    for (int k = 0; k < 25; ++k) {
      auto const& inst = corpus()[std::size_t(k) % corpus().size()];
      auto const& f    = inst.spec.exceptional()[std::size_t(k) % inst.spec.exceptional().size()].second;
      auto        r    = checks::mutate_table(f.group, rng);
      ++total;
      detected += r.detected;
      how[r.how] += r.detected;
      if (!r.detected && missed.empty()) {
        missed = r.what;
      }
    }
    std::string detail = std::to_string(detected) + "/" + std::to_string(total) + " detected (";
    bool        first  = true;
    for (auto const& [k, v] : how) {
      if (!k.empty()) {
        detail += (first ? "" : ", ") + k + " " + std::to_string(v);
        first = false;
      }
    }
    detail += ")";
    if (!missed.empty()) {
      detail += "; missed " + missed;
    }
    return {detected == total && total == 50, detail};
  }

  Outcome criterion9() {
    std::mt19937_64     rng(9);
    std::vector<Record> rs;
    for (auto const& inst : corpus()) {
      rs.push_back(checks::topology_record(inst.spec, rng, 40, inst.name));
    }
    for (auto const& h : checks::hand_morphisms()) {
      rs.push_back(checks::hand_morphism_record(h, rng));
    }
    return from_records(rs, "topology records");
  }

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"four-term exactness on the corpus", criterion1},
      {"C2 * C2 on Z/3 by negation", criterion2},
      {"duality identities", criterion3},
      {"cohomology vs abelianization", criterion4},
      {"normal-closure invariance", criterion5},
      {"truncation colimits", criterion6},
      {"dimension shifting", criterion7},
      {"mutation sensitivity", criterion8},
      {"topology predicates", criterion9},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    auto    t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (std::exception const& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu: %s  %s  [%s] (%.2fs)\n", k + 1, o.pass ? "PASS" : "FAIL",
                criteria[k].first.c_str(), o.detail.c_str(), s);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
