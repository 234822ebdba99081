#ifndef DLNR_GLI_HPP
#define DLNR_GLI_HPP

#include <array>
#include <numeric>

#include "temporal_graph.hpp"

namespace dlnr {

inline double gli_density(const Panel &p) {
  const double n = static_cast<double>(p.size());
  if (p.size() < 2) return 0.0;
  return static_cast<double>(p.edge_count()) / (n * (n - 1.0));
}

/// Mean in- and out-degree coincide (both equal edges / n); the direction is
/// kept for reporting symmetry.
inline double gli_mean_degree(const Panel &p, Direction) {
  if (p.size() == 0) return 0.0;
  return static_cast<double>(p.edge_count()) / static_cast<double>(p.size());
}

/// Sizes of the weak components, in order of smallest member.
inline std::vector<std::size_t> weak_component_sizes(const Panel &p) {
  const std::size_t n = p.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (p(i, j)) {
        std::size_t a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  std::vector<std::size_t> size(n, 0);
  for (std::size_t v = 0; v < n; ++v) ++size[find(v)];
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < n; ++v)
    if (size[v]) out.push_back(size[v]);
  return out;
}

/// Krackhardt connectedness: share of unordered pairs joined by a semipath.
inline double gli_connectedness(const Panel &p) {
  const std::size_t n = p.size();
  if (n < 2) return 0.0;
  double joined = 0;
  for (std::size_t s : weak_component_sizes(p)) joined += static_cast<double>(s) * static_cast<double>(s - 1) / 2.0;
  return joined / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

// ---------------------------------------------------------------------------
// Triad census (Holland-Leinhardt MAN typology)

enum class Triad : std::uint8_t {
  T003, T012, T102, T021D, T021U, T021C, T111D, T111U, T030T, T030C, T201, T120D, T120U, T120C, T210, T300
};

inline constexpr std::array<const char *, 16> kTriadNames = {"003",  "012",  "102",  "021D", "021U", "021C",
                                                             "111D", "111U", "030T", "030C", "201",  "120D",
                                                             "120U", "120C", "210",  "300"};

using TriadCensus = std::array<std::uint64_t, 16>;

/// Classifies the subgraph induced on {a, b, c}.
inline Triad classify_triad(const Panel &p, std::size_t a, std::size_t b, std::size_t c) {
  const std::array<std::size_t, 3> v = {a, b, c};
  auto arc = [&](int x, int y) { return p(v[x], v[y]); };
  int mutual = 0, asym = 0;
  for (int x = 0; x < 3; ++x)
    for (int y = x + 1; y < 3; ++y) {
      bool f = arc(x, y), r = arc(y, x);
      if (f && r) ++mutual;
      else if (f || r) ++asym;
    }
  int outdeg[3] = {0, 0, 0}, indeg[3] = {0, 0, 0};
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      if (x != y && arc(x, y)) {
        ++outdeg[x];
        ++indeg[y];
      }
  auto any_node = [&](auto pred) {
    for (int x = 0; x < 3; ++x)
      if (pred(x)) return true;
    return false;
  };

  switch (mutual * 10 + asym) {
    case 0: return Triad::T003;
    case 1: return Triad::T012;
    case 10: return Triad::T102;
    case 2:
      if (any_node([&](int x) { return outdeg[x] == 2; })) return Triad::T021D;
      if (any_node([&](int x) { return indeg[x] == 2; })) return Triad::T021U;
      return Triad::T021C;
    case 11: {
      // The node outside the mutual pair either sends (D) or receives (U) the asymmetric arc.
      int outside = -1;
      for (int x = 0; x < 3; ++x) {
        int y = (x + 1) % 3, z = (x + 2) % 3;
        if (arc(y, z) && arc(z, y)) outside = x;
      }
      return outdeg[outside] == 1 ? Triad::T111D : Triad::T111U;
    }
    case 3:
      if (any_node([&](int x) { return outdeg[x] == 2; })) return Triad::T030T;
      return Triad::T030C;
    case 20: return Triad::T201;
    case 12: {
      int outside = -1;
      for (int x = 0; x < 3; ++x) {
        int y = (x + 1) % 3, z = (x + 2) % 3;
        if (arc(y, z) && arc(z, y)) outside = x;
      }
      if (outdeg[outside] == 2) return Triad::T120D;
      if (indeg[outside] == 2) return Triad::T120U;
      return Triad::T120C;
    }
    case 21: return Triad::T210;
    case 30: return Triad::T300;
    default: break;
  }
  return Triad::T003;
}

inline TriadCensus triad_census(const Panel &p) {
  TriadCensus census{};
  const std::size_t n = p.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) ++census[static_cast<std::size_t>(classify_triad(p, a, b, c))];
  return census;
}

struct TriadCounts {
  std::uint64_t null_003 = 0;
  std::uint64_t complete_300 = 0;
};

/// Triangles of a symmetric panel.
inline std::uint64_t edge_triangles(const Panel &und) {
  std::uint64_t count = 0;
  for (std::size_t a = 0; a < und.size(); ++a)
    for (std::size_t b = a + 1; b < und.size(); ++b)
      if (und(a, b)) {
        auto ra = und.out_row(a), rb = und.out_row(b);
        for (std::size_t w = 0; w < und.words(); ++w) count += static_cast<std::uint64_t>(std::popcount(ra[w] & rb[w]));
      }
  return count / 3;
}

/// Empty (003) and complete (300) triads without a full census.
inline TriadCounts gli_triads(const Panel &p) {
  const std::size_t n = p.size();
  TriadCounts out;
  const Panel und = symmetrize(p);
  // 300: triangles of the mutual graph.
  Panel mutual(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && p(i, j) && p(j, i)) mutual.set(i, j);
  out.complete_300 = edge_triangles(mutual);
  // 003: C(n,3) minus triples holding at least one undirected edge.
  std::uint64_t edges = und.edge_count() / 2, paths = 0, triangles = 0;
  for (std::size_t v = 0; v < n; ++v) {
    std::uint64_t d = und.out_degree(v);
    paths += d * (d - 1) / 2;
  }
  triangles = edge_triangles(und);
  // Triples with exactly one/two/three undirected edges: e1 + e2 + e3.
  // sum_edges (n-2) = e1 + 2 e2 + 3 e3, sum_v C(d,2) = e2 + 3 e3, triangles = e3.
  const std::uint64_t nn = n;
  std::uint64_t all = n < 3 ? 0 : nn * (nn - 1) * (nn - 2) / 6;
  std::uint64_t e3 = triangles, e2 = paths - 3 * e3;
  std::uint64_t e1 = edges * (n >= 2 ? nn - 2 : 0) - 2 * e2 - 3 * e3;
  out.null_003 = all - e1 - e2 - e3;
  return out;
}

/// Undirected triangles of the symmetrized panel.
inline std::uint64_t gli_undirected_triangles(const Panel &p) { return edge_triangles(symmetrize(p)); }

// ---------------------------------------------------------------------------
// Report bundle

enum class Gli : std::uint8_t { Density, Connectedness, MeanIndegree, MeanOutdegree, Triad003, Triad300 };

inline constexpr std::array<const char *, 6> kGliNames = {"density",        "connectedness", "mean_indegree",
                                                          "mean_outdegree", "triad_003",     "triad_300"};
inline constexpr std::size_t kGliCount = kGliNames.size();

using GliVector = std::array<double, kGliCount>;

inline GliVector compute_glis(const Panel &p) {
  TriadCounts tri = gli_triads(p);
  return {gli_density(p),
          gli_connectedness(p),
          gli_mean_degree(p, Direction::In),
          gli_mean_degree(p, Direction::Out),
          static_cast<double>(tri.null_003),
          static_cast<double>(tri.complete_300)};
}

}  // namespace dlnr

#endif  // DLNR_GLI_HPP
