#include "distsdp/partition.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <sstream>

#include "distsdp/error.hpp"

namespace distsdp {

namespace {

std::string set_string(const std::vector<int>& xs) {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < xs.size(); ++k) os << (k ? "," : "") << xs[k] + 1;
  os << '}';
  return os.str();
}

bool sorted_contains(const std::vector<int>& xs, int x) {
  return std::binary_search(xs.begin(), xs.end(), x);
}

}  // namespace

int AgentPartition::shared_count() const {
  int sn = 0;
  for (const auto& s : S) sn += static_cast<int>(s.size());
  return sn;
}

bool AgentPartition::contains(int agent, int j) const { return sorted_contains(J[agent], j); }

AgentPartition build_partition(const std::vector<std::vector<int>>& Jin,
                               const CoefficientMatrix& M, const std::vector<int>& owner) {
  AgentPartition part;
  part.n = M.n();
  part.m = static_cast<int>(Jin.size());
  const int n = part.n;
  const int m = part.m;
  if (m < 1) throw Error(ErrorCode::InvalidProblem, "at least one agent is required");

  part.J.resize(m);
  for (int a = 0; a < m; ++a) {
    std::vector<int> J = Jin[a];
    std::sort(J.begin(), J.end());
    J.erase(std::unique(J.begin(), J.end()), J.end());
    if (J.empty())
      throw Error(ErrorCode::InvalidProblem, "agent " + std::to_string(a + 1) + " has an empty index set");
    if (J.front() < 0 || J.back() >= n)
      throw Error(ErrorCode::InvalidProblem, "agent " + std::to_string(a + 1) + " has an index outside 1.." + std::to_string(n));
    part.J[a] = std::move(J);
  }

  const auto& entries = M.entries();
  if (owner.size() != entries.size())
    throw Error(ErrorCode::OwnershipViolation, "ownership list does not match the entry list");
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const int o = owner[e];
    if (o < 0 || o >= m || !part.contains(o, entries[e].j) || !part.contains(o, entries[e].l)) {
      std::ostringstream os;
      os << "entry (" << entries[e].j + 1 << ", " << entries[e].l + 1 << ") owned by agent " << o + 1
         << " which does not hold both indices";
      throw Error(ErrorCode::OwnershipViolation, os.str());
    }
  }
  part.owner = owner;

  std::vector<std::vector<int>> holders(n);
  for (int a = 0; a < m; ++a)
    for (int j : part.J[a]) holders[j].push_back(a);
  for (int j = 0; j < n; ++j)
    if (holders[j].empty())
      throw Error(ErrorCode::OrphanIndex, "index " + std::to_string(j + 1) + " belongs to no agent");

  // Overlap graph.
  std::vector<std::vector<int>> nbrs(m);
  for (int j = 0; j < n; ++j)
    for (int a : holders[j])
      for (int b : holders[j])
        if (a != b) nbrs[a].push_back(b);
  for (auto& v : nbrs) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  {
    std::vector<char> seen(m, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b : nbrs[a])
        if (!seen[b]) {
          seen[b] = 1;
          ++count;
          stack.push_back(b);
        }
    }
    if (count != m) throw Error(ErrorCode::DisconnectedAgents, "agent overlap graph is not connected");
  }

  part.parent.assign(m, -1);
  part.children.assign(m, {});
  part.S.assign(m, {});
  part.R.assign(m, {});
  part.home.assign(n, -1);
  std::vector<char> covered(n, 0);
  for (int j : part.J[0]) covered[j] = 1;
  part.R[0] = part.J[0];
  for (int i = 1; i < m; ++i) {
    std::vector<int> sep;
    for (int j : part.J[i])
      if (covered[j]) sep.push_back(j);
    if (sep.empty())
      throw Error(ErrorCode::DisconnectedAgents,
                  "agent " + std::to_string(i + 1) + " shares no index with a lower-numbered agent");
    int best = -1;
    for (int k = 0; k < i; ++k) {
      const bool holds_all = std::all_of(sep.begin(), sep.end(),
                                         [&](int j) { return part.contains(k, j); });
      if (!holds_all) continue;
      if (best < 0 || nbrs[k].size() > nbrs[best].size()) best = k;
    }
    if (best < 0) {
      std::vector<int> lower;
      for (int b : nbrs[i])
        if (b < i) lower.push_back(b);
      throw Error(ErrorCode::MultipleParents,
                  "agent " + std::to_string(i + 1) + " shares " + set_string(sep) +
                      " with agents " + set_string(lower) + " and no single one holds all of it");
    }
    part.parent[i] = best;
    part.children[best].push_back(i);
    part.S[i] = sep;
    for (int j : part.J[i])
      if (!covered[j]) {
        part.R[i].push_back(j);
        covered[j] = 1;
      }
  }
  for (int a = 0; a < m; ++a)
    for (int j : part.R[a]) part.home[j] = a;

  // Columns passed from a grandparent through a child are relayed rather
  // than owned; the algorithms tolerate it but flag it.
  for (int i = 0; i < m; ++i) {
    if (part.parent[i] < 0) continue;
    for (int c : part.children[i]) {
      std::vector<int> both;
      std::set_intersection(part.S[c].begin(), part.S[c].end(), part.S[i].begin(), part.S[i].end(),
                            std::back_inserter(both));
      if (!both.empty()) {
        std::ostringstream os;
        os << "agent " << c + 1 << " and agent " << part.parent[i] + 1 << " share " << set_string(both)
           << " through agent " << i + 1 << " (child and parent sets overlap)";
        part.warnings.push_back(os.str());
      }
    }
  }
  return part;
}

AgentPartition build_partition(const Problem& problem) {
  AgentPartition part = build_partition(problem.agents, problem.M, problem.owner);
  part.warnings.insert(part.warnings.begin(), problem.warnings.begin(), problem.warnings.end());
  return part;
}

std::vector<int> reorder_indices(const AgentPartition& part) {
  const int n = part.n;
  const int m = part.m;
  // Nodes: indices 0..n-1, then two barriers per agent (before and after R_i)
  // so that the precedence graph stays linear in size.
  const int total = n + 2 * m;
  std::vector<std::vector<int>> out(total);
  std::vector<int> indeg(total, 0);
  auto edge = [&](int a, int b) {
    out[a].push_back(b);
    ++indeg[b];
  };
  for (int i = 0; i < m; ++i) {
    const int before = n + 2 * i;
    const int after = before + 1;
    for (int c : part.children[i])
      for (int x : part.R[c]) edge(x, before);
    for (int x : part.R[i]) {
      edge(before, x);
      edge(x, after);
    }
    for (int y : part.S[i]) edge(after, y);
  }
  // Barriers are released first; indices by smallest original label.
  auto key = [n](int v) { return v >= n ? -1 : v; };
  auto cmp = [&](int a, int b) { return key(a) > key(b) || (key(a) == key(b) && a > b); };
  std::priority_queue<int, std::vector<int>, decltype(cmp)> ready(cmp);
  for (int v = 0; v < total; ++v)
    if (indeg[v] == 0) ready.push(v);
  std::vector<int> perm;
  perm.reserve(n);
  int done = 0;
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    ++done;
    if (v < n) perm.push_back(v);
    for (int w : out[v])
      if (--indeg[w] == 0) ready.push(w);
  }
  if (done != total) throw Error(ErrorCode::CyclicPrecedence, "index precedence has a cycle");
  return perm;
}

bool ordering_holds(const AgentPartition& part) {
  for (int i = 0; i < part.m; ++i) {
    for (int x : part.R[i]) {
      for (int c : part.children[i])
        for (int y : part.R[c])
          if (!(y < x)) return false;
      for (int y : part.S[i])
        if (!(x < y)) return false;
    }
  }
  return true;
}

Problem permute_problem(const Problem& problem, const std::vector<int>& perm) {
  const int n = problem.M.n();
  if (static_cast<int>(perm.size()) != n)
    throw Error(ErrorCode::DimensionMismatch, "permutation length differs from n");
  std::vector<int> inv(n, -1);
  for (int k = 0; k < n; ++k) inv[perm[k]] = k;
  Problem out;
  out.M = CoefficientMatrix(n);
  for (const Entry& e : problem.M.entries()) out.M.add(inv[e.j], inv[e.l], e.w);
  out.owner = problem.owner;
  for (const auto& J : problem.agents) {
    std::vector<int> mapped;
    for (int x : J) mapped.push_back(inv[x]);
    std::sort(mapped.begin(), mapped.end());
    out.agents.push_back(std::move(mapped));
  }
  out.warnings = problem.warnings;
  return out;
}

AgentPartition permute_partition(const AgentPartition& part, const CoefficientMatrix& permuted_M,
                                 const std::vector<int>& perm) {
  std::vector<int> inv(part.n, -1);
  for (int k = 0; k < part.n; ++k) inv[perm[k]] = k;
  std::vector<std::vector<int>> J;
  for (const auto& Ji : part.J) {
    std::vector<int> mapped;
    for (int x : Ji) mapped.push_back(inv[x]);
    J.push_back(std::move(mapped));
  }
  return build_partition(J, permuted_M, part.owner);
}

static void check_sigma(double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw Error(ErrorCode::BadSigma, "sigma must lie in (0, 1)");
}

StepSizes sync_step_sizes(const AgentPartition& part, const CoefficientMatrix& M, double sigma) {
  check_sigma(sigma);
  if (part.n != M.n()) throw Error(ErrorCode::DimensionMismatch, "partition and matrix sizes differ");
  // Every entry of row j is owned inside the subtree rooted at home(j), so the
  // full row 1-norm is the sum over the agents that contribute to the update.
  StepSizes out{Vector::Ones(M.n())};
  for (int j = 0; j < M.n(); ++j) {
    const double d = M.row_norm1(j);
    if (d > 0.0) out.theta(j) = (1.0 - sigma) / d;
  }
  return out;
}

double agent_max_row_norm(const AgentPartition& part, const CoefficientMatrix& M, int agent) {
  std::vector<double> rows(M.n(), 0.0);
  const auto& entries = M.entries();
  for (std::size_t e = 0; e < entries.size(); ++e) {
    if (part.owner[e] != agent) continue;
    rows[entries[e].j] += entries[e].w;
    rows[entries[e].l] += entries[e].w;
  }
  return rows.empty() ? 0.0 : *std::max_element(rows.begin(), rows.end());
}

StepSizes async_step_sizes(const AgentPartition& part, const CoefficientMatrix& M, int B,
                           double sigma) {
  check_sigma(sigma);
  if (B < 1) throw Error(ErrorCode::InvalidProblem, "B must be at least 1");
  if (part.n != M.n()) throw Error(ErrorCode::DimensionMismatch, "partition and matrix sizes differ");
  double L = 0.0;
  for (int a = 0; a < part.m; ++a) L = std::max(L, 2.0 * agent_max_row_norm(part, M, a));
  StepSizes out{Vector::Ones(M.n())};
  if (L > 0.0) {
    const double n = M.n();
    out.theta.setConstant((1.0 - sigma) / ((1.0 + B + n * B) * L));
  }
  return out;
}

std::string describe_partition(const AgentPartition& part) {
  std::ostringstream os;
  os << "agents=" << part.m << " n=" << part.n << " sn=" << part.shared_count() << '\n';
  for (int a = 0; a < part.m; ++a) {
    os << "agent " << a + 1 << ": J=" << set_string(part.J[a]) << " parent=";
    if (part.parent[a] < 0)
      os << '-';
    else
      os << part.parent[a] + 1;
    os << " children=" << set_string(part.children[a]) << " S=" << set_string(part.S[a])
       << " R=" << set_string(part.R[a]) << '\n';
  }
  for (const auto& w : part.warnings) os << "warning: " << w << '\n';
  return os.str();
}

}  // namespace distsdp
