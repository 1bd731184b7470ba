#include <gtest/gtest.h>

#include "corfree/corpus.hpp"
#include "corfree/io.hpp"
#include "corfree/report.hpp"

using namespace corfree;
using io::Json;

TEST(Parse, NamedGroups) {
  EXPECT_EQ(io::parse_group(Json::parse(R"({"kind":"cyclic","n":5})")).order(), 5U);
  EXPECT_EQ(io::parse_group(Json::parse(R"({"kind":"dihedral","n":4})")).order(), 8U);
  EXPECT_EQ(io::parse_group(Json::parse(R"({"kind":"quaternion"})")).order(), 8U);
  EXPECT_EQ(io::parse_group(Json::parse(R"({"kind":"trivial"})")).order(), 1U);
  auto p = io::parse_group(Json::parse(R"({"kind":"perm","degree":4,"generators":[[1,2,3,0],[2,1,0,3]]})"));
  EXPECT_EQ(p.order(), 8U);
  EXPECT_THROW(io::parse_group(Json::parse(R"({"kind":"cyclic","n":100})"), 27), SizeCapError);
}

TEST(Parse, TablesRoundTrip) {
  for (auto const& g : corpus_groups(27)) {
    EXPECT_EQ(io::parse_group(io::group_json(g)), g);
  }
}

TEST(Parse, Errors) {
  EXPECT_THROW(io::parse_group(Json::parse(R"({"n":3})")), ParseError);
  EXPECT_THROW(io::parse_group(Json::parse(R"({"kind":"cyclic","n":"x"})")), ParseError);
  EXPECT_THROW(io::parse_ab(Json::parse(R"({"kind":"cyclic","n":3})")), ParseError);
  EXPECT_THROW(io::parse_family(Json::parse(R"({"exceptional":{}})")), ParseError);
  EXPECT_THROW(io::parse_family(Json::parse(R"({"prime_set":[2],"index_space":"cantor"})")), ParseError);
  EXPECT_THROW(io::read_json_file("/nonexistent/file.json"), ParseError);
}

TEST(Parse, CorruptedInputIsRejected) {
  // {0, 1} is not closed in S3
  auto bad = Json::parse(R"({"prime_set":[2,3],
    "exceptional":{"a":{"group":{"kind":"symmetric","n":3},"subgroup_elements":[0,1]}}})");
  EXPECT_THROW(io::parse_family(bad), ValidationError);
  auto range = Json::parse(R"({"prime_set":[2],
    "exceptional":{"a":{"group":{"kind":"cyclic","n":2},"subgroup_generators":[5]}}})");
  EXPECT_THROW(io::parse_family(range), ValidationError);
  auto table = Json::parse(R"({"kind":"table","table":[[0,1],[1,1]]})");
  EXPECT_THROW(io::parse_group(table), ValidationError);
}

TEST(Parse, FamilyAndModule) {
  auto j = Json::parse(R"({"prime_set":[2,3],
    "exceptional":{"a":{"group":{"kind":"cyclic","n":2}},"b":{"group":{"kind":"cyclic","n":2}}},
    "tail":null})");
  auto spec = io::parse_family(j);
  EXPECT_EQ(spec.names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_FALSE(spec.tail().has_value());
  auto m = io::parse_module(Json::parse(R"({"coeff":{"kind":"ab","factors":[3]},
    "fibers":{"a":{"action":[{"element":1,"matrix":[[2]]}]}}})"),
                            spec);
  EXPECT_FALSE(m.fibers.at("a").is_trivial_action());
  EXPECT_EQ(m.fibers.count("b"), 0U);
  EXPECT_THROW(io::parse_module(Json::parse(R"({"coeff":{"kind":"ab","factors":[3]},
    "fibers":{"zz":{}}})"),
                                spec),
               ValidationError);
  // C3 cannot act on Z/3 by negation
  auto c3 = io::parse_family(Json::parse(R"({"prime_set":[3],
    "exceptional":{"a":{"group":{"kind":"cyclic","n":3}}}})"));
  EXPECT_THROW(io::parse_module(Json::parse(R"({"coeff":{"kind":"ab","factors":[3]},
    "fibers":{"a":{"action":[{"element":1,"matrix":[[2]]}]}}})"),
                                c3),
               ValidationError);
}

TEST(Parse, CorpusRoundTrip) {
  for (auto const& inst : generate_corpus(9, 20)) {
    auto spec = io::parse_family(io::family_json(inst.spec));
    EXPECT_EQ(spec, inst.spec) << inst.name;
    auto m = io::parse_module(io::module_json(inst.module), spec);
    EXPECT_EQ(m.coeff, inst.module.coeff);
    for (auto const& [n, gm] : inst.module.fibers) {
      for (std::size_t x = 0; x < gm.group().order(); ++x) {
        EXPECT_EQ(m.fibers.at(n).action(Elt(x)), gm.action(Elt(x))) << inst.name << " " << n;
      }
    }
  }
}

TEST(Parse, OpenSets) {
  auto fam = io::parse_family(Json::parse(R"({"prime_set":[2],
    "tail":{"group":{"kind":"cyclic","n":2},"subgroup_generators":[1]}})"));
  auto v   = io::parse_open_set(Json::parse(R"({"tail_default":[0,1],"tail_exceptions":{"2":[0]},
    "contains_star":true})"),
                                fam, "v");
  EXPECT_EQ(v.tail_part(2), (ElementSet{0}));
  EXPECT_EQ(v.tail_part(1), (ElementSet{0, 1}));
  EXPECT_THROW(io::parse_open_set(Json::parse(R"({"tail_exceptions":{"x":[0]}})"), fam, "v"), ParseError);
}

TEST(Report, DigestAndSerialization) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  Record r;
  r.check        = "demo";
  r.input_digest = sha256_hex("x");
  r.pass         = false;
  r.witnesses    = {"w"};
  auto j         = r.to_json();
  EXPECT_EQ(j["result"], "fail");
  EXPECT_EQ(j["check"], "demo");
  Report rep;
  rep.add(r);
  EXPECT_FALSE(rep.all_pass());
  std::ostringstream s;
  rep.write_structured(s);
  EXPECT_EQ(Json::parse(s.str())["witnesses"][0], "w");
}
