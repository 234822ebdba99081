// Brute-force reference implementations used only by the tests. They work on
// plain integer matrices and string group sets and share no code with the
// library's bitset paths.
#ifndef DLNR_TESTS_ORACLES_HPP
#define DLNR_TESTS_ORACLES_HPP

#include <random>
#include <set>
#include <string>
#include <vector>

#include "dlnr/temporal_graph.hpp"

namespace oracle {

using Mat = std::vector<std::vector<int>>;
using Groups = std::vector<std::set<std::string>>;

inline Mat zeros(std::size_t n) { return Mat(n, std::vector<int>(n, 0)); }

inline Mat random_matrix(std::size_t n, double density, std::mt19937_64 &rng) {
  std::bernoulli_distribution coin(density);
  Mat a = zeros(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) a[i][j] = coin(rng);
  return a;
}

inline dlnr::Panel to_panel(const Mat &a) {
  dlnr::Panel p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[i][j]) p.set(i, j);
  return p;
}

inline Mat from_panel(const dlnr::Panel &p) {
  Mat a = zeros(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) a[i][j] = p(i, j);
  return a;
}

/// Random memberships: DNC, RNC, or both (ordered DNC first).
inline Groups random_groups(std::size_t n, std::mt19937_64 &rng, double dual_rate = 0.15) {
  std::uniform_real_distribution<double> u(0, 1);
  Groups g(n);
  for (auto &s : g) {
    double x = u(rng);
    if (x < dual_rate) s = {"DNC", "RNC"};
    else if (x < dual_rate + (1 - dual_rate) / 2) s = {"DNC"};
    else s = {"RNC"};
  }
  return g;
}

inline dlnr::NodeTable to_node_table(const Groups &g) {
  dlnr::NodeTable nodes;
  for (std::size_t v = 0; v < g.size(); ++v) {
    std::vector<dlnr::Group> groups;
    if (g[v].count("DNC")) groups.push_back(dlnr::Group::DNC);
    if (g[v].count("RNC")) groups.push_back(dlnr::Group::RNC);
    nodes.add("v" + std::to_string(v), dlnr::Membership(groups));
  }
  return nodes;
}

inline bool share(const std::set<std::string> &a, const std::set<std::string> &b) {
  for (const auto &x : a)
    if (b.count(x)) return true;
  return false;
}

inline bool share3(const std::set<std::string> &a, const std::set<std::string> &b, const std::set<std::string> &c) {
  for (const auto &x : a)
    if (b.count(x) && c.count(x)) return true;
  return false;
}

/// Block name "X->Y" for a dyad: DNC is listed first in dual sets.
inline std::string block(const std::set<std::string> &s, const std::set<std::string> &r) {
  for (const char *g : {"DNC", "RNC"})
    if (s.count(g) && r.count(g)) return std::string(g) + "->" + g;
  std::string sp = s.count("DNC") ? "DNC" : "RNC";
  std::string rp = r.count("DNC") ? "DNC" : "RNC";
  return sp + "->" + rp;
}

inline int indeg(const Mat &a, std::size_t v) {
  int d = 0;
  for (std::size_t u = 0; u < a.size(); ++u) d += a[u][v];
  return d;
}

inline int outdeg(const Mat &a, std::size_t v) {
  int d = 0;
  for (std::size_t u = 0; u < a.size(); ++u) d += a[v][u];
  return d;
}

/// Pair counts of maximal cliques (size >= min_size) by subset enumeration.
inline Mat clique_pairs(const Mat &a, std::size_t min_size = 3) {
  const std::size_t n = a.size();
  auto adj = [&](std::size_t i, std::size_t j) { return a[i][j] || a[j][i]; };
  Mat out = zeros(n);
  for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
    std::vector<std::size_t> members;
    for (std::size_t v = 0; v < n; ++v)
      if (mask >> v & 1) members.push_back(v);
    if (members.size() < min_size) continue;
    bool clique = true;
    for (std::size_t x = 0; x < members.size() && clique; ++x)
      for (std::size_t y = x + 1; y < members.size() && clique; ++y) clique = adj(members[x], members[y]);
    if (!clique) continue;
    bool maximal = true;
    for (std::size_t v = 0; v < n && maximal; ++v) {
      if (mask >> v & 1) continue;
      bool all = true;
      for (auto m : members) all = all && adj(v, m);
      if (all) maximal = false;
    }
    if (!maximal) continue;
    for (auto x : members)
      for (auto y : members)
        if (x != y) ++out[x][y];
  }
  return out;
}

/// Global statistic of the pair (prev, cur) for a structural or covariate
/// term, written as a plain sum over the edges of `cur`.
inline double global_statistic(const std::string &term, const Mat &prev, const Mat &cur, const Groups &g) {
  const std::size_t n = cur.size();
  Mat cliques;
  if (term == "cluster") cliques = clique_pairs(prev);
  double total = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !cur[i][j]) continue;
      double v = 0;
      if (term == "lag") v = prev[i][j];
      else if (term == "receiver") v = indeg(prev, j);
      else if (term == "sender") v = outdeg(prev, i);
      else if (term == "cluster") v = cliques[i][j];
      else if (term == "group2path") {
        for (std::size_t k = 0; k < n; ++k)
          if (k != i && k != j && prev[i][k] && prev[k][j] && share3(g[i], g[k], g[j])) v += 1;
      } else if (term == "cross2path") {
        for (std::size_t k = 0; k < n; ++k)
          if (k != i && k != j && prev[i][k] && prev[k][j] && share(g[i], g[k]) && !share(g[i], g[j])) v += 1;
      } else if (term == "recip:group") {
        v = prev[j][i] && share(g[i], g[j]);
      } else if (term == "recip:between") {
        v = prev[j][i] && !share(g[i], g[j]);
      } else if (term.rfind("mix:", 0) == 0) {
        v = block(g[i], g[j]) == term.substr(4);
      } else {
        throw std::runtime_error("oracle: no global statistic for " + term);
      }
      total += v;
    }
  return total;
}

/// Change statistic by toggling (i,j) in `cur`.
inline double change_statistic(const std::string &term, const Mat &prev, Mat cur, const Groups &g, std::size_t i,
                               std::size_t j) {
  cur[i][j] = 1;
  double on = global_statistic(term, prev, cur, g);
  cur[i][j] = 0;
  double off = global_statistic(term, prev, cur, g);
  return on - off;
}

// ---------------------------------------------------------------------------
// GLI oracles

inline double density(const Mat &a) {
  double e = 0;
  for (auto &row : a)
    for (int x : row) e += x;
  double n = static_cast<double>(a.size());
  return e / (n * (n - 1));
}

inline double mean_degree(const Mat &a) {
  double e = 0;
  for (auto &row : a)
    for (int x : row) e += x;
  return e / static_cast<double>(a.size());
}

/// Reachability closure on the symmetrized graph (Floyd-Warshall style).
inline double connectedness(const Mat &a) {
  const std::size_t n = a.size();
  Mat r = zeros(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r[i][j] = (i == j) || a[i][j] || a[j][i];
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = 1;
  double pairs = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs += r[i][j];
  return pairs / (static_cast<double>(n) * (n - 1) / 2.0);
}

/// (003, 300) by exhaustive triple enumeration.
inline std::pair<std::uint64_t, std::uint64_t> empty_and_complete_triads(const Mat &a) {
  std::uint64_t empty = 0, complete = 0;
  const std::size_t n = a.size();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y)
      for (std::size_t z = y + 1; z < n; ++z) {
        int arcs = a[x][y] + a[y][x] + a[x][z] + a[z][x] + a[y][z] + a[z][y];
        empty += arcs == 0;
        complete += arcs == 6;
      }
  return {empty, complete};
}

}  // namespace oracle

#endif  // DLNR_TESTS_ORACLES_HPP
