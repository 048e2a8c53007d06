#include <gtest/gtest.h>

#include <sstream>

#include "orbitlift/error.hpp"
#include "orbitlift/io.hpp"

using namespace orbitlift;
using io::Json;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

io::Table parse(const std::string& text, char prefix = 'y') {
  std::istringstream in(text);
  return io::parse_table(in, prefix);
}

}  // namespace

TEST(Csv, ParsesScientificNotation) {
  const auto t = parse("t,y1,y2\n0,1e-3,-2.5E+1\n0.5,+3,4\n");
  ASSERT_EQ(t.t.size(), 2);
  EXPECT_EQ(t.rows(0, 0), 1e-3);
  EXPECT_EQ(t.rows(0, 1), -25.0);
  EXPECT_EQ(t.rows(1, 0), 3.0);
}

TEST(Csv, RejectsMalformedInput) {
  EXPECT_EQ(kind_of([] { parse(""); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { parse("t,y1\n"); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { parse("t,v1\n0,1\n"); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { parse("t,y1\n0,abc\n"); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { parse("t,y1\n0,1,2\n"); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { parse("t,y1\n1,1\n0,1\n"); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { parse("t,y1\n0,nan\n"); }), ErrorKind::ParseError);
}

TEST(Csv, ShortestRoundTrip) {
  Vector t(3);
  t << 0, 0.1, 1.0 / 3;
  Matrix rows(3, 2);
  rows << 1e-300, -2, 3.14159, 0, 1e21, -0.0;
  std::ostringstream out;
  io::write_table(out, t, rows, 'v');
  EXPECT_EQ(out.str().substr(0, 8), "t,v1,v2\n");
  const auto back = parse(out.str(), 'v');
  EXPECT_EQ(back.t, t);
  EXPECT_EQ(back.rows, rows);
  EXPECT_EQ(io::format_double(0.1), "0.1");
}

TEST(GroupJson, Types) {
  EXPECT_EQ(io::group_from_json(Json::parse(R"({"type":"symmetric","n":5})")).order(), 120u);
  EXPECT_EQ(io::group_from_json(Json::parse(R"({"type":"matrix","dim":2,"generators":[[[0,1],[1,0]]],"max_order":1024})")).order(), 2u);
  EXPECT_EQ(io::group_from_json(Json::parse(R"({"type":"dihedral","m":6})")).order(), 12u);
  EXPECT_EQ(kind_of([] { io::group_from_json(Json::parse(R"({"type":"lie","n":5})")); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { io::group_from_json(Json::parse(R"({"type":"symmetric","n":5,"x":1})")); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] {
              io::group_from_json(Json::parse(R"({"type":"matrix","dim":2,"generators":[[[0.5403023058681398,-0.8414709848078965],[0.8414709848078965,0.5403023058681398]]],"max_order":1000})"));
            }),
            ErrorKind::OrderExceeded);
}

TEST(MapJson, GeneratorSystem) {
  const auto m = io::map_from_json(Json::parse(R"([{"degree":5,"terms":[{"c":1,"e":[5,0]},{"c":-10,"e":[3,2]},{"c":5,"e":[1,4]}]}])"), 2);
  ASSERT_EQ(m.degrees(), (std::vector<int>{2, 5}));
  Vector v(2);
  v << 0.5, -1.5;
  EXPECT_NEAR(m(v)(1), std::pow(0.5, 5) - 10 * std::pow(0.5, 3) * 2.25 + 5 * 0.5 * std::pow(1.5, 4), 1e-12);
  EXPECT_EQ(kind_of([] { io::map_from_json(Json::parse(R"([{"degree":4,"terms":[{"c":1,"e":[5,0]}]}])"), 2); }),
            ErrorKind::ParseError);
}

TEST(ConfigJson, DefaultsAndOverrides) {
  const auto cfg = io::config_from_json(Json::parse(
      R"({"group":{"type":"symmetric","n":3},"map":"symmetric","tolerances":{"tol_zero":1e-9,"tol_deriv":1e-4},"seed":7})"));
  EXPECT_EQ(cfg.tol_zero, 1e-9);
  EXPECT_EQ(cfg.tol_deriv, 1e-4);
  EXPECT_EQ(cfg.residual_tol, 1e-7);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.verify_options().seed, 7u);
  EXPECT_EQ(cfg.lift_options().tol_zero, 1e-9);
}

TEST(ConfigJson, RejectsUnknownKeysAndBadTolerances) {
  EXPECT_EQ(kind_of([] { io::config_from_json(Json::parse(R"({"grop":{}})")); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { io::config_from_json(Json::parse(R"({"tolerances":{"tol_x":1}})")); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { io::config_from_json(Json::parse(R"({"tolerances":{"tol_zero":0}})")); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { io::config_from_json(Json::parse(R"({"tolerances":{"tol_deriv":-1}})")); }), ErrorKind::ParseError);
}

TEST(SynthJson, Parses) {
  const auto doc = io::synth_from_json(Json::parse(R"({"schema_version":1,"group":{"type":"symmetric","n":2},
      "grid":{"start":-1,"stop":1,"count":2001},"coords":[{"poly":[0,1]},{"poly":[0,-1],"trig":[{"sin":0.5,"freq":2}]}],"seed":3})"));
  EXPECT_EQ(doc.spec.grid.count, 2001);
  EXPECT_EQ(doc.spec.coords.size(), 2u);
  EXPECT_EQ(doc.spec.scramble_seed, 3u);
  EXPECT_DOUBLE_EQ(doc.spec.coords[1].value(0.5), -0.5 + 0.5 * std::sin(1.0));
  EXPECT_EQ(kind_of([] { io::synth_from_json(Json::parse(R"({"schema_version":2,"grid":{},"coords":[]})")); }),
            ErrorKind::ParseError);
}

TEST(ReportJson, SchemaFields) {
  VerificationReport r;
  r.pass = true;
  const auto j = io::to_json(r);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["rng"], "mt19937_64");
  EXPECT_TRUE(j["singular_events"].is_array());
  EXPECT_TRUE(j.contains("tolerances"));
}
