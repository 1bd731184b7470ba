// corfree: command line front end for the family, cohomology and topology
// checks.  Exit status: 0 all checks pass, 1 some check failed, 2 the input
// could not be parsed or validated.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corfree/checks.hpp"
#include "corfree/corpus.hpp"
#include "corfree/io.hpp"
#include "corfree/report.hpp"

using namespace corfree;

namespace {

  struct RunConfig {
    std::string   command;
    std::string   spec_path;
    std::string   module_path;
    int           degree   = 1;
    std::size_t   truncate = 0;
    bool          truncate_given = false;
    std::uint64_t seed     = 0;
    std::size_t   count    = 30;
    std::size_t   cap      = default_order_cap;
    std::string   out_path;
    std::string   format   = "text";
  };

  std::string slurp(std::string const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw ParseError("cannot open " + path);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }

  io::Json parse_text(std::string const& text, std::string const& path) {
    try {
      return io::Json::parse(text);
    } catch (nlohmann::json::exception const& e) {
      throw ParseError(path + ": " + e.what());
    }
  }

  struct Inputs {
    std::string                 text;  // raw bytes of every input, for the digest
    io::Json                    spec;
    std::optional<io::Json>     module;
  };

  Inputs load(RunConfig const& cfg) {
    if (cfg.spec_path.empty()) {
      throw ParseError(cfg.command + " needs --spec");
    }
    Inputs in;
    in.text = slurp(cfg.spec_path);
    in.spec = parse_text(in.text, cfg.spec_path);
    if (!cfg.module_path.empty()) {
      auto t = slurp(cfg.module_path);
      in.text += '\0' + t;
      in.module = parse_text(t, cfg.module_path);
    } else if (in.spec.contains("module")) {
      in.module = in.spec.at("module");
    }
    return in;
  }

  std::string input_digest(Inputs const& in, RunConfig const& cfg) {
    std::ostringstream os;
    os << cfg.command << '\0' << cfg.degree << '\0' << cfg.truncate << '\0' << cfg.seed << '\0'
       << in.text;
    return sha256_hex(os.str());
  }

  FamilyModule module_of(Inputs const& in, FamilySpec const& spec) {
    if (!in.module) {
      throw ParseError("this command needs module data (--module or a 'module' field in the spec)");
    }
    return io::parse_module(*in.module, spec);
  }

  Record validate_record(FamilySpec const& spec, std::string const& dig) {
    Record r;
    r.check        = "validate";
    r.input_digest = dig;
    auto rep       = validate_family(spec);
    for (auto const& f : rep.fibers) {
      std::ostringstream os;
      os << f.name << ": |G| = " << f.order << ", |U| = " << f.u_order << ", |U~| = " << f.closure_order
         << (f.u_normal ? ", U normal" : "");
      r.witnesses.push_back(os.str());
    }
    return r;
  }

  Record abelianize_record(FamilySpec const& spec, std::string const& dig) {
    Record r;
    r.check        = "abelianize";
    r.input_digest = dig;
    auto fam       = abelianization_formula(spec);
    for (auto const& [n, p] : fam.exceptional()) {
      r.witnesses.push_back(n + ": " + p.to_string());
      r.invariant_factors.push_back(p.group().factors());
    }
    if (fam.tail()) {
      r.witnesses.push_back("tail: " + fam.tail()->to_string());
      r.invariant_factors.push_back(fam.tail()->group().factors());
    }
    r.witnesses.push_back("flavor " + to_string(fam.flavor()));
    return r;
  }

  void cohomology_records(FamilySpec const& spec, FamilyModule const& m, RunConfig const& cfg,
                          std::string const& dig, Report& rep) {
    Record r;
    r.input_digest = dig;
    r.check        = "cohomology degree " + std::to_string(cfg.degree);
    if (cfg.degree >= 3) {
      auto hf = high_degree_formula(spec, m, cfg.degree);
      for (auto const& [n, v] : hf.summands) {
        r.invariant_factors.push_back(v.factors());
      }
      if (hf.tail_summand) {
        r.invariant_factors.push_back(hf.tail_summand->factors());
      }
      r.witnesses.push_back(hf.summary);
      rep.add(std::move(r));
      return;
    }
    if (cfg.degree < 1) {
      throw PreconditionError("degree must be at least 1");
    }
    auto hf = h_formula(spec, m, cfg.degree);
    for (auto const& [n, p] : hf.family.exceptional()) {
      r.witnesses.push_back(n + ": " + p.to_string());
      r.invariant_factors.push_back(p.group().factors());
    }
    if (hf.family.tail()) {
      r.witnesses.push_back("tail: " + hf.family.tail()->to_string());
    }
    r.witnesses.push_back(hf.summary);
    rep.add(std::move(r));
    // the finite truncation, when it is a plain free product
    auto tr = truncate(spec, cfg.truncate);
    if (cfg.degree == 1 && tr.beyond_trivial()) {
      Record o;
      o.check        = "cohomology oracle level " + std::to_string(cfg.truncate);
      o.input_digest = dig;
      auto h1        = oracle_h1(tr, m);
      o.invariant_factors.push_back(h1.value().factors());
      o.witnesses.push_back("H1 = " + h1.value().to_string());
      rep.add(std::move(o));
    }
  }

  Record tower_record(Tower const& t, std::string const& dig) {
    Record r;
    r.check        = "tower-check";
    r.input_digest = dig;
    auto cert      = check_tower(t);
    r.pass         = cert.passed;
    for (auto const& s : cert.steps) {
      std::string line = "level " + std::to_string(s.level) + ": "
                         + (s.surjective_and_strict ? "surjective and strict" : "not surjective and strict")
                         + (s.star_unique_preimage ? ", * has a unique preimage" : "");
      for (auto const& f : s.failures) {
        line += "; " + f;
      }
      r.witnesses.push_back(line);
    }
    return r;
  }

  void topo_records(io::Json const& j, std::size_t cap, std::string const& dig, Report& rep) {
    auto fam = io::parse_family(io::detail::field(j, "family", "topo"), cap);
    if (j.contains("open_sets")) {
      auto const& sets = j.at("open_sets");
      for (std::size_t k = 0; k < sets.size(); ++k) {
        auto    where = "open_sets[" + std::to_string(k) + "]";
        auto    v     = io::parse_open_set(sets[k], fam, where);
        auto    res   = is_open(v);
        bool    slow  = is_open_by_basis(v);
        Record  r;
        r.check        = "topo-check " + where;
        r.input_digest = dig;
        r.pass         = res.open == slow;
        r.witnesses.push_back(std::string(res.open ? "open" : "not open") + ", witness " + res.witness);
        if (sets[k].contains("expect_open")) {
          bool want = io::detail::get<bool>(sets[k].at("expect_open"), where);
          r.pass    = r.pass && want == res.open;
          r.witnesses.push_back(std::string("expected ") + (want ? "open" : "not open"));
        }
        rep.add(std::move(r));
      }
    }
    if (j.contains("morphisms")) {
      auto const& ms = j.at("morphisms");
      for (std::size_t k = 0; k < ms.size(); ++k) {
        auto   where = "morphisms[" + std::to_string(k) + "]";
        auto   tgt   = io::parse_family(io::detail::field(ms[k], "target", where), cap);
        auto   m     = io::parse_morphism(ms[k], fam, tgt, where);
        auto   cert  = open_map_certificate(m);
        Record r;
        r.check        = "topo-check " + where;
        r.input_digest = dig;
        std::string failed;
        for (auto const& f : cert.failed_hypotheses) {
          failed += (failed.empty() ? "" : ", ") + f;
        }
        r.witnesses.push_back(cert.certified ? "open map certified"
                                             : "hypotheses not met: " + failed);
        if (ms[k].contains("expect_certified")) {
          bool want = io::detail::get<bool>(ms[k].at("expect_certified"), where);
          r.pass    = want == cert.certified;
        }
        rep.add(std::move(r));
      }
    }
  }

  void corpus_records(RunConfig const& cfg, Report& rep) {
    auto corpus = generate_corpus(cfg.seed, cfg.count);
    for (auto const& inst : corpus) {
      auto   dig = checks::digest(inst, "corpus/seed=" + std::to_string(cfg.seed));
      Record r;
      r.check        = "corpus " + inst.name;
      r.input_digest = dig;
      std::vector<Record> parts = {
          checks::exactness_record(inst),
          checks::cross_check_record(inst.name, inst.spec, dig),
          checks::normal_closure_record(inst.name, inst.spec, inst.module, inst.level, dig),
      };
      for (auto const& [n, f] : inst.spec.fibers()) {
        parts.push_back(checks::dimension_shift_record(inst.name + "/" + n, inst.module.at(n, f.group), dig));
      }
      if (inst.spec.tail()) {
        parts.push_back(checks::colimit_record(inst.name, inst.spec, inst.module, 1, 3, dig));
      }
      r.invariant_factors = parts.front().invariant_factors;
      r.witnesses.push_back(describe(inst.spec) + " on " + inst.module.coeff.to_string());
      for (auto const& p : parts) {
        if (!p.pass) {
          r.pass = false;
          r.witnesses.push_back("failed: " + p.check
                                + (p.witnesses.empty() ? "" : " (" + p.witnesses.back() + ")"));
        }
      }
      rep.add(std::move(r));
    }
  }

  Report run(RunConfig const& cfg) {
    Report rep;
    if (cfg.command == "corpus") {
      corpus_records(cfg, rep);
      return rep;
    }
    auto in  = load(cfg);
    auto dig = input_digest(in, cfg);
    if (cfg.command == "tower-check") {
      rep.add(tower_record(io::parse_tower(in.spec, cfg.cap), dig));
      return rep;
    }
    if (cfg.command == "topo-check") {
      topo_records(in.spec, cfg.cap, dig, rep);
      return rep;
    }
    auto spec = io::parse_family(in.spec, cfg.cap);
    if (cfg.command == "validate") {
      rep.add(validate_record(spec, dig));
    } else if (cfg.command == "abelianize") {
      rep.add(abelianize_record(spec, dig));
    } else if (cfg.command == "cohomology") {
      cohomology_records(spec, module_of(in, spec), cfg, dig, rep);
    } else if (cfg.command == "exact-check") {
      auto m = module_of(in, spec);
      require_continuous(spec, m);
      rep.add(checks::exactness_record(cfg.spec_path, spec, m, cfg.truncate, dig));
    } else if (cfg.command == "duality-check") {
      auto fam = abelianization_formula(spec);
      rep.add(checks::family_duality_record(fam, "abelianization"));
      for (auto const& [n, p] : fam.exceptional()) {
        rep.add(checks::duality_record(p, n));
      }
      if (fam.tail()) {
        rep.add(checks::duality_record(*fam.tail(), tail_index));
      }
    } else if (cfg.command == "cross-check") {
      rep.add(checks::cross_check_record(cfg.spec_path, spec, dig));
    } else if (cfg.command == "colimit") {
      auto        m     = module_of(in, spec);
      std::size_t n_max = cfg.truncate_given ? cfg.truncate : 6;
      rep.add(checks::colimit_record(cfg.spec_path, spec, m, cfg.degree, n_max, dig));
    } else {
      throw ParseError("unknown command " + cfg.command);
    }
    return rep;
  }

  void diagnose(std::string const& kind, std::string const& what, RunConfig const& cfg) {
    if (cfg.format == "structured") {
      std::cerr << nlohmann::ordered_json{{"error", kind}, {"message", what}}.dump() << '\n';
    } else {
      std::cerr << "error (" << kind << "): " << what << '\n';
    }
  }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formula checks for free products of finite group families"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--spec", cfg.spec_path, "family, tower or topology spec (JSON)");
  app.add_option("--module", cfg.module_path, "module data (JSON)");
  app.add_option("--degree", cfg.degree, "cohomological degree");
  auto* trunc = app.add_option("--truncate", cfg.truncate, "truncation level (N_max for colimit)");
  app.add_option("--seed", cfg.seed, "corpus seed");
  app.add_option("--count", cfg.count, "corpus size")->check(CLI::PositiveNumber);
  app.add_option("--cap", cfg.cap, "group order cap")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out_path, "append the report to this file");
  app.add_option("--format", cfg.format, "report format")->check(CLI::IsMember({"text", "structured"}));

  std::vector<std::pair<char const*, char const*>> const commands = {
      {"validate", "check a family spec"},
      {"abelianize", "fiberwise abelianization (G_t^ab, image of U_t)"},
      {"cohomology", "H^i of the corestricted free product by the fiber formula"},
      {"exact-check", "build and verify the four-term exact sequence"},
      {"duality-check", "duality identities on the abelianized family"},
      {"cross-check", "H^1 with Z/p coefficients against the dual of the abelianization"},
      {"colimit", "truncation colimit for a tail with U~ = G"},
      {"tower-check", "certify the hypotheses of a tower of families"},
      {"topo-check", "open sets and open-map certificates"},
      {"corpus", "generate random families and run the invariant suite"},
  };
  for (auto const& [name, help] : commands) {
    app.add_subcommand(name, help)->callback([&cfg, name = std::string(name)] { cfg.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  cfg.truncate_given = trunc->count() > 0;

  Report rep;
  try {
    rep = run(cfg);
  } catch (ParseError const& e) {
    diagnose("parse", e.what(), cfg);
    return 2;
  } catch (ValidationError const& e) {
    diagnose("validation", e.what(), cfg);
    return 2;
  } catch (PreconditionError const& e) {
    diagnose("precondition", e.what(), cfg);
    return 2;
  } catch (SizeCapError const& e) {
    diagnose("size-cap", e.what(), cfg);
    return 2;
  } catch (Error const& e) {
    diagnose("error", e.what(), cfg);
    return 2;
  }
  if (cfg.out_path.empty()) {
    rep.write(std::cout, cfg.format);
  } else {
    std::ofstream out(cfg.out_path, std::ios::app);
    if (!out) {
      diagnose("io", "cannot write " + cfg.out_path, cfg);
      return 2;
    }
    rep.write(out, cfg.format);
  }
  return rep.all_pass() ? 0 : 1;
}
