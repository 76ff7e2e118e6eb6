#include "distsdp/problem_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "distsdp/error.hpp"

namespace distsdp {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw Error(ErrorCode::InvalidProblem, field + ": " + msg);
}

long as_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) {
    // Accept integral floats such as 3.0.
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d == static_cast<double>(static_cast<long>(d))) return static_cast<long>(d);
    }
    fail(field, "expected an integer, got " + v.dump());
  }
  return v.get<long>();
}

int lowest_holder(const std::vector<std::vector<int>>& agents, int j, int l) {
  for (std::size_t a = 0; a < agents.size(); ++a) {
    bool hj = false, hl = false;
    for (int x : agents[a]) {
      hj = hj || x == j;
      hl = hl || x == l;
    }
    if (hj && hl) return static_cast<int>(a);
  }
  return -1;
}

}  // namespace

Problem parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidProblem, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("<root>", "expected an object");
  for (const char* key : {"n", "edges", "agents"})
    if (!doc.contains(key)) fail(key, "missing field");

  const long n = as_int(doc["n"], "n");
  if (n < 1) fail("n", "must be positive");

  Problem prob;
  prob.M = CoefficientMatrix(static_cast<int>(n));

  const json& agents = doc["agents"];
  if (!agents.is_array()) fail("agents", "expected an array");
  for (std::size_t a = 0; a < agents.size(); ++a) {
    const std::string field = "agents[" + std::to_string(a) + "]";
    if (!agents[a].is_array()) fail(field, "expected an array of indices");
    std::vector<int> J;
    for (std::size_t k = 0; k < agents[a].size(); ++k) {
      const long idx = as_int(agents[a][k], field + "[" + std::to_string(k) + "]");
      if (idx < 1 || idx > n)
        fail(field + "[" + std::to_string(k) + "]", "index " + std::to_string(idx) + " outside 1.." + std::to_string(n));
      J.push_back(static_cast<int>(idx - 1));
    }
    prob.agents.push_back(std::move(J));
  }

  const json& edges = doc["edges"];
  if (!edges.is_array()) fail("edges", "expected an array");
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::string field = "edges[" + std::to_string(e) + "]";
    const json& row = edges[e];
    if (!row.is_array() || (row.size() != 3 && row.size() != 4))
      fail(field, "expected [j, l, w, owner]");
    const long j = as_int(row[0], field + "[0]");
    const long l = as_int(row[1], field + "[1]");
    if (!row[2].is_number()) fail(field + "[2]", "weight must be a number");
    const double w = row[2].get<double>();
    if (j < 1 || j > n || l < 1 || l > n) fail(field, "index outside 1.." + std::to_string(n));
    if (j == l) {
      prob.warnings.push_back(field + ": diagonal entry (" + std::to_string(j) + ", " +
                              std::to_string(l) + ") dropped");
      continue;
    }
    if (j > l) fail(field, "expected j < l");
    if (!(w >= 0.0)) fail(field + "[2]", "weight must be >= 0");
    int owner;
    if (row.size() == 4) {
      const long o = as_int(row[3], field + "[3]");
      if (o < 1 || o > static_cast<long>(prob.agents.size()))
        fail(field + "[3]", "owner " + std::to_string(o) + " is not an agent");
      owner = static_cast<int>(o - 1);
    } else {
      owner = lowest_holder(prob.agents, static_cast<int>(j - 1), static_cast<int>(l - 1));
      if (owner < 0) throw Error(ErrorCode::OwnershipViolation, field + ": no agent holds both endpoints");
    }
    try {
      prob.M.add(static_cast<int>(j - 1), static_cast<int>(l - 1), w);
    } catch (const Error& err) {
      fail(field, err.what());
    }
    prob.owner.push_back(owner);
  }
  return prob;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::string dump_problem(const Problem& problem) {
  json doc;
  doc["n"] = problem.M.n();
  json edges = json::array();
  const auto& entries = problem.M.entries();
  for (std::size_t e = 0; e < entries.size(); ++e)
    edges.push_back({entries[e].j + 1, entries[e].l + 1, entries[e].w, problem.owner[e] + 1});
  doc["edges"] = edges;
  json agents = json::array();
  for (const auto& J : problem.agents) {
    json a = json::array();
    for (int x : J) a.push_back(x + 1);
    agents.push_back(a);
  }
  doc["agents"] = agents;
  return doc.dump();
}

}  // namespace distsdp
