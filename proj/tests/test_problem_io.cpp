#include <string>

#include "distsdp/error.hpp"
#include "distsdp/problem_io.hpp"
#include "doctest.h"
#include "instances.hpp"

using namespace distsdp;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error for " << text);
  return ErrorCode::Io;
}

std::string message_of(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parses the example fixture") {
  const Problem p = load_problem(std::string(DISTSDP_FIXTURES) + "/example1.json");
  CHECK(p.M.n() == 8);
  CHECK(p.agents.size() == 5);
  CHECK(p.agents[0] == std::vector<int>{0, 1, 3});
  CHECK(p.M.entries().size() == 10);
  CHECK(p.owner.size() == 10);
  CHECK(p.owner[0] == 0);
  CHECK(p.owner[9] == 4);
  CHECK(p.M.weight(2, 7) == 1.0);
  CHECK(p.warnings.empty());
}

TEST_CASE("round trip through dump") {
  const Problem a = fixtures::example1(5, true);
  const Problem b = parse_problem(dump_problem(a));
  REQUIRE(b.M.entries().size() == a.M.entries().size());
  for (std::size_t e = 0; e < a.M.entries().size(); ++e) {
    CHECK(b.M.entries()[e].j == a.M.entries()[e].j);
    CHECK(b.M.entries()[e].l == a.M.entries()[e].l);
    CHECK(b.M.entries()[e].w == a.M.entries()[e].w);
  }
  CHECK(b.owner == a.owner);
  CHECK(b.agents == a.agents);
}

TEST_CASE("diagonal entries are dropped with a warning") {
  const Problem p = parse_problem(R"({"n":2,"agents":[[1,2]],"edges":[[1,1,4,1],[1,2,1,1]]})");
  CHECK(p.M.entries().size() == 1);
  REQUIRE(p.warnings.size() == 1);
  CHECK(p.warnings[0].find("edges[0]") != std::string::npos);
}

TEST_CASE("edges without an owner go to the lowest agent holding both ends") {
  const Problem p = parse_problem(R"({"n":3,"agents":[[1,2],[1,2,3]],"edges":[[1,2,1],[2,3,1]]})");
  CHECK(p.owner == std::vector<int>{0, 1});
  CHECK(code_of(R"({"n":3,"agents":[[1,2],[2,3]],"edges":[[1,3,1]]})") == ErrorCode::OwnershipViolation);
}

TEST_CASE("validation errors name the field") {
  CHECK(code_of("{") == ErrorCode::InvalidProblem);
  CHECK(message_of("{\n\"n\": 2,\n}").find("line") != std::string::npos);
  CHECK(code_of(R"({"agents":[[1]],"edges":[]})") == ErrorCode::InvalidProblem);
  CHECK(message_of(R"({"agents":[[1]],"edges":[]})").find("n: missing") != std::string::npos);
  CHECK(message_of(R"({"n":0,"agents":[[1]],"edges":[]})").find("n:") != std::string::npos);
  CHECK(message_of(R"({"n":2,"agents":[[1,3]],"edges":[]})").find("agents[0][1]") != std::string::npos);
  CHECK(message_of(R"({"n":2,"agents":[[1,2]],"edges":[[1,2,-1,1]]})").find("edges[0][2]") != std::string::npos);
  CHECK(message_of(R"({"n":2,"agents":[[1,2]],"edges":[[1,2,"x",1]]})").find("edges[0][2]") != std::string::npos);
  CHECK(message_of(R"({"n":2,"agents":[[1,2]],"edges":[[2,1,1,1]]})").find("edges[0]") != std::string::npos);
  CHECK(message_of(R"({"n":2,"agents":[[1,2]],"edges":[[1,2,1,2]]})").find("edges[0][3]") != std::string::npos);
  CHECK(message_of(R"({"n":2,"agents":[[1,2]],"edges":[[1,2,1,1],[1,2,1,1]]})").find("edges[1]") != std::string::npos);
  CHECK(message_of(R"({"n":2,"agents":[[1,2]],"edges":[[1,2]]})").find("edges[0]") != std::string::npos);
  CHECK(message_of(R"({"n":2,"agents":[[1.5]],"edges":[]})").find("agents[0][0]") != std::string::npos);
}

TEST_CASE("missing file is an io error") {
  try {
    load_problem("/nonexistent/problem.json");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
    CHECK(std::string(error_code_name(e.code())) == "IO");
  }
}
