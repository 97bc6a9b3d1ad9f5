#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ballerg/config.hpp"
#include "doctest.h"

using namespace ballerg;

namespace {

const char* kFull = R"({
  "map": {"type": "composite", "factors": [
    {"type": "unitary", "matrix": [[[0, 1], 0], [0, 1]]},
    {"type": "mobius", "u": [[-1, 0], [0, -1]], "a": [-0.5, 0]},
    {"type": "involution", "a": [[0.1, -0.2], 0.3]},
    {"type": "monomial", "dim": 2, "components": [
      [{"coef": 0.5, "powers": [1, 0]}, {"coef": [0, 0.25], "powers": [0, 2]}],
      []]},
    {"type": "linear", "matrix": [[0.5, 0], [0, 0.1]]}
  ]},
  "tol": 1e-4, "jmax": 32, "grid": {"levels": 12, "dirs": 3, "seed": 99},
  "epsilon": 0.9, "eta": 0.25, "rows": 7, "ratio_a": 0.4, "radius": 0.75,
  "points": [[0.1, [0, 0.2]]], "sequence": [[0.5, 0], [-0.5, 0]], "out": "results"
})";

ErrorCode code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse failure");
  return ErrorCode::InvalidArgument;
}

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config round trip") {
  const RunConfig c = parse_config(kFull);
  CHECK(c.map->kind() == "composite");
  CHECK(c.jmax == 32);
  CHECK(c.seed == 99);
  CHECK(c.points.front()[1] == Complex{0.0, 0.2});
  const std::string printed = print_config(c);
  const RunConfig again = parse_config(printed);
  CHECK(print_config(again) == printed);

  // Evaluation agrees after the round trip.
  const CVector z{0.3, Complex{0.1, 0.1}};
  const auto w1 = evaluate_raw(*c.map, z);
  const auto w2 = evaluate_raw(*again.map, z);
  for (std::size_t i = 0; i < 2; ++i) CHECK(w1[i] == w2[i]);

  // Defaults print and parse too.
  const std::string defaults = print_config(RunConfig{});
  CHECK(print_config(parse_config(defaults)) == defaults);
}

TEST_CASE("config errors name the field") {
  CHECK(code_of("{") == ErrorCode::ParseError);
  CHECK(message_of(R"({"tol": "x"})").find("tol") != std::string::npos);
  CHECK(message_of(R"({"bogus": 1})").find("bogus") != std::string::npos);
  CHECK(message_of(R"({"grid": {"levels": -3}})").find("grid.levels") != std::string::npos);
  CHECK(message_of(R"({"map": {"type": "linear", "matrix": [[1, 0], [0]]}})")
            .find("map.matrix[1]") != std::string::npos);
  CHECK(message_of(R"({"map": {"type": "warp"}})").find("map.type") != std::string::npos);
  CHECK(message_of(R"({"map": {"type": "unitary", "matrix": [[2, 0], [0, 1]]}})").find("map") !=
        std::string::npos);
  CHECK(message_of(R"({"map": {"type": "monomial", "dim": 2, "components": [[{"coef": 1, "powers": [1]}], []]}})")
            .find("map") != std::string::npos);
  CHECK(code_of(R"({"epsilon": 1.5})") == ErrorCode::ParseError);
  CHECK(code_of(R"({"points": [[[1, 2, 3]]]})") == ErrorCode::ParseError);
}

TEST_CASE("trace CSV") {
  ConvergenceTrace gap("cesaro_gap");
  gap.push(1, 0.3);
  std::ostringstream one;
  write_traces_csv(one, {gap});
  CHECK(one.str() == "j,name,value\n1,cesaro_gap,0.29999999999999999\n");

  ConvergenceTrace b("b"), a("a");
  b.push(2, 1.0);
  b.push(5, 2.0);
  a.push(3, 0.5);
  std::ostringstream sorted;
  write_traces_csv(sorted, {b, a});
  CHECK(sorted.str() == "j,name,value\n3,a,0.5\n2,b,1\n5,b,2\n");

  CHECK_THROWS_AS(emit_traces({}, "unused.csv"), Error);
  CHECK_THROWS_AS(emit_traces({gap}, "/nonexistent-dir/x.csv"), Error);

  const auto path = std::filesystem::temp_directory_path() / "ballerg_config_test.csv";
  emit_traces({gap}, path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == one.str());
  std::filesystem::remove(path);
}

TEST_CASE("map printing") {
  const auto m = parse_map(R"({"type": "involution", "a": [0.25, [0, -0.5]]})");
  CHECK(print_map(m) == R"({"a":[[0.25,0.0],[0.0,-0.5]],"type":"involution"})");
  CHECK(print_map(parse_map(print_map(m))) == print_map(m));
}
