#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "secexp/error.hpp"
#include "secexp/problem.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>

using namespace secexp;
using nlohmann::json;

namespace {

json keyed_doc() {
  return json::parse(R"({
    "scenario": "keyed",
    "source": [0.5, 0.5],
    "d": "hamming", "D": 0.25,
    "d_e": [[0, 1], [1, 0]], "D_e": "1/10",
    "R": 1, "r": 0.1, "alpha": "inf",
    "options": {"seed": 7}
  })");
}

std::string error_of(const json& j) {
  try {
    problem_from_json(j);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("keyed spec parses with exact levels and the inf sentinel") {
  ProblemSpec p = problem_from_json(keyed_doc());
  CHECK(p.scenario == "keyed");
  CHECK(p.nx == 2);
  CHECK(p.ny == 2);
  CHECK(p.nv == 2);
  CHECK(p.D == Rational(1, 4));
  CHECK(p.De == Rational(1, 10));
  CHECK(std::isinf(p.alpha));
  CHECK(*p.R == 1.0);
  CHECK(p.search.seed == 7);
  CHECK(p.spec_d().is_hamming());
  CHECK(p.spec_e().exact_level() == Rational(1, 10));
}

TEST_CASE("canonical dump round-trips to the same digest") {
  ProblemSpec p = problem_from_json(keyed_doc());
  json canon = problem_to_json(p);
  CHECK(canon["alpha"] == "inf");
  CHECK(canon["D_e"] == "1/10");
  ProblemSpec q = problem_from_json(canon);
  CHECK(problem_digest(q) == problem_digest(p));
  CHECK(problem_to_json(q).dump() == canon.dump());

  json other = keyed_doc();
  other["D_e"] = 0.1;  // the same level written as a decimal
  CHECK(problem_digest(problem_from_json(other)) == problem_digest(p));
  other["D_e"] = 0.11;
  CHECK(problem_digest(problem_from_json(other)) != problem_digest(p));

  json fin = keyed_doc();
  fin["alpha"] = 0.05;
  CHECK(problem_from_json(problem_to_json(problem_from_json(fin))).alpha == 0.05);
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("validation errors name the field") {
  json j = keyed_doc();
  j["d_e"] = json::parse("[[0, -1], [1, 0]]");
  CHECK(error_of(j).find("d_e[0][1]") != std::string::npos);

  j = keyed_doc();
  j.erase("R");
  CHECK(error_of(j).find("'R'") != std::string::npos);

  j = keyed_doc();
  j["source"] = json::parse("[0.5, 0.6]");
  CHECK(error_of(j).find("sum") != std::string::npos);

  j = keyed_doc();
  j["d"] = json::parse("[[1, 2], [2, 1]]");
  j["D"] = 0.5;
  CHECK(error_of(j).find("below the smallest attainable level") != std::string::npos);

  j = keyed_doc();
  j["scenario"] = "other";
  CHECK(error_of(j).find("scenario") != std::string::npos);

  j = keyed_doc();
  j["extra"] = 1;
  CHECK(error_of(j).find("extra") != std::string::npos);

  j = keyed_doc();
  j["alphabets"] = {{"V", 3}};
  CHECK(error_of(j).find("alphabets.V") != std::string::npos);

  CHECK_THROWS_AS(problem_from_text("{not json"), ValidationError);
}

TEST_CASE("perfect scenario needs only the eavesdropper side") {
  ProblemSpec p = problem_from_text(R"({"scenario":"perfect","source":["1/2","1/2"],"d_e":"hamming","D_e":0.1})");
  CHECK_FALSE(p.d.has_value());
  CHECK_THROWS_AS(p.spec_d(), ValidationError);
  CHECK(problem_from_json(problem_to_json(p)).nv == 2);
}

TEST_CASE("CSV cells keep full precision") {
  CHECK(csv_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(csv_number(1.0 / 3)) == 1.0 / 3);
  CHECK(csv_number(kInf) == "inf");
  CsvTable t({"a", "b"});
  t.add({"1", "x,y"});
  CHECK(t.str() == "a,b\n1,\"x,y\"\n");
  CHECK_THROWS_AS(t.add({"1"}), ValidationError);
}

TEST_CASE("atomic write replaces the file") {
  auto dir = std::filesystem::temp_directory_path() / "secexp_problem_test";
  std::filesystem::remove_all(dir);
  const std::string path = (dir / "sub" / "out.csv").string();
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  CHECK(read_file(path) == "second\n");
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "sub")) files += e.is_regular_file();
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("grid and list parsing") {
  auto g = parse_grid("0:0.5:0.1");
  REQUIRE(g.size() == 6);
  CHECK(g.back() == 0.5);
  CHECK(parse_grid("0:1/3:1/9").size() == 4);
  CHECK_THROWS_AS(parse_grid("0:1"), ValidationError);
  CHECK(parse_int_list("4,8,12") == std::vector<int>{4, 8, 12});
  CHECK_THROWS_AS(parse_int_list("4,x"), ValidationError);
}
