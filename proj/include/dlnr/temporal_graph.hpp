#ifndef DLNR_TEMPORAL_GRAPH_HPP
#define DLNR_TEMPORAL_GRAPH_HPP

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "common.hpp"

namespace dlnr {

// ---------------------------------------------------------------------------
// Node table

enum class Group : std::uint8_t { DNC = 0, RNC = 1 };

inline const char *group_name(Group g) { return g == Group::DNC ? "DNC" : "RNC"; }

inline Group parse_group(std::string_view s, const std::string &where) {
  if (s == "DNC") return Group::DNC;
  if (s == "RNC") return Group::RNC;
  fail(ErrorKind::Input, where + ": unknown group '" + std::string(s) + "'");
}

/// Ordered, non-empty subset of {DNC, RNC}. The first listed group is primary.
class Membership {
 public:
  Membership() = default;
  explicit Membership(std::vector<Group> groups) : groups_(std::move(groups)) {
    if (groups_.empty() || groups_.size() > 2 || (groups_.size() == 2 && groups_[0] == groups_[1]))
      fail(ErrorKind::Input, "membership must be one or two distinct groups");
  }

  Group primary() const { return groups_.front(); }
  bool has(Group g) const { return std::find(groups_.begin(), groups_.end(), g) != groups_.end(); }
  bool dual() const { return groups_.size() == 2; }
  const std::vector<Group> &groups() const { return groups_; }

  /// First group of this (ordered) membership that `other` also holds.
  std::optional<Group> first_shared(const Membership &other) const {
    for (Group g : groups_)
      if (other.has(g)) return g;
    return std::nullopt;
  }

  bool intersects(const Membership &other) const { return first_shared(other).has_value(); }

  std::string to_string() const {
    std::string s;
    for (Group g : groups_) {
      if (!s.empty()) s += '|';
      s += group_name(g);
    }
    return s;
  }

 private:
  std::vector<Group> groups_{Group::DNC};
};

class NodeTable {
 public:
  NodeTable() = default;

  std::size_t add(std::string id, Membership m) {
    if (index_.count(id)) fail(ErrorKind::Input, "duplicate node id: " + id);
    index_.emplace(id, ids_.size());
    ids_.push_back(std::move(id));
    membership_.push_back(std::move(m));
    return ids_.size() - 1;
  }

  std::size_t size() const { return ids_.size(); }
  const std::string &id(std::size_t v) const { return ids_.at(v); }
  const Membership &membership(std::size_t v) const { return membership_.at(v); }

  std::optional<std::size_t> find(const std::string &id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Members holding group g (dual members counted in both).
  std::size_t group_size(Group g) const {
    return static_cast<std::size_t>(
        std::count_if(membership_.begin(), membership_.end(), [g](const Membership &m) { return m.has(g); }));
  }
  std::size_t dual_size() const {
    return static_cast<std::size_t>(
        std::count_if(membership_.begin(), membership_.end(), [](const Membership &m) { return m.dual(); }));
  }

 private:
  std::vector<std::string> ids_;
  std::vector<Membership> membership_;
  std::unordered_map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Panels

/// One directed binary network over n nodes, stored as out- and in-neighbour
/// bitsets so that neighbourhood intersections are word-parallel.
class Panel {
 public:
  using Word = std::uint64_t;

  Panel() = default;
  explicit Panel(std::size_t n) : n_(n), words_((n + 63) / 64), out_(n * words_, 0), in_(n * words_, 0) {}

  std::size_t size() const { return n_; }
  std::size_t words() const { return words_; }

  bool operator()(std::size_t i, std::size_t j) const { return (out_[i * words_ + j / 64] >> (j % 64)) & 1u; }

  void set(std::size_t i, std::size_t j, bool value = true) {
    if (i == j && value) fail(ErrorKind::Input, "self-loops are not allowed");
    Word bit_j = Word{1} << (j % 64), bit_i = Word{1} << (i % 64);
    if (value) {
      out_[i * words_ + j / 64] |= bit_j;
      in_[j * words_ + i / 64] |= bit_i;
    } else {
      out_[i * words_ + j / 64] &= ~bit_j;
      in_[j * words_ + i / 64] &= ~bit_i;
    }
  }

  std::span<const Word> out_row(std::size_t i) const { return {out_.data() + i * words_, words_}; }
  std::span<const Word> in_row(std::size_t j) const { return {in_.data() + j * words_, words_}; }

  std::size_t out_degree(std::size_t i) const { return popcount(out_row(i)); }
  std::size_t in_degree(std::size_t j) const { return popcount(in_row(j)); }

  std::size_t edge_count() const { return popcount(std::span<const Word>(out_)); }

  bool operator==(const Panel &o) const { return n_ == o.n_ && out_ == o.out_; }

  static std::size_t popcount(std::span<const Word> w) {
    std::size_t c = 0;
    for (Word x : w) c += static_cast<std::size_t>(std::popcount(x));
    return c;
  }

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<Word> out_;
  std::vector<Word> in_;
};

/// Bitset mask over n nodes.
inline std::vector<Panel::Word> node_mask(std::size_t n, auto &&predicate) {
  std::vector<Panel::Word> mask((n + 63) / 64, 0);
  for (std::size_t v = 0; v < n; ++v)
    if (predicate(v)) mask[v / 64] |= Panel::Word{1} << (v % 64);
  return mask;
}

/// Undirected graph: {i,j} present iff i->j or j->i. The result is a Panel
/// whose out and in rows coincide.
inline Panel symmetrize(const Panel &p) {
  Panel s(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p(i, j) || p(j, i)) {
        s.set(i, j);
        s.set(j, i);
      }
  return s;
}

// ---------------------------------------------------------------------------
// Temporal network

enum class Direction { In, Out };

class TemporalNetwork {
 public:
  TemporalNetwork() = default;
  TemporalNetwork(std::size_t n, std::size_t T) : n_(n), panels_(T, Panel(n)) {}

  std::size_t nodes() const { return n_; }
  std::size_t panels() const { return panels_.size(); }

  /// Panel t, 1-based.
  const Panel &panel(std::size_t t) const {
    check(t);
    return panels_[t - 1];
  }
  Panel &panel(std::size_t t) {
    check(t);
    return panels_[t - 1];
  }

  std::size_t degree(std::size_t t, std::size_t v, Direction d) const {
    const Panel &p = panel(t);
    if (v >= n_) fail(ErrorKind::Input, "node index out of range");
    return d == Direction::In ? p.in_degree(v) : p.out_degree(v);
  }

  Panel symmetrized(std::size_t t) const { return symmetrize(panel(t)); }

  bool operator==(const TemporalNetwork &o) const { return n_ == o.n_ && panels_ == o.panels_; }

 private:
  void check(std::size_t t) const {
    if (t < 1 || t > panels_.size())
      fail(ErrorKind::Input, "panel index " + std::to_string(t) + " out of range 1.." + std::to_string(panels_.size()));
  }

  std::size_t n_ = 0;
  std::vector<Panel> panels_;
};

struct EdgeRecord {
  long long t = 0;
  std::string src;
  std::string dst;
};

/// Builds the panel series from (t, src, dst) records. Duplicate records are
/// idempotent and reported through `warnings`.
inline TemporalNetwork load_temporal_network(const std::vector<EdgeRecord> &records, const NodeTable &nodes,
                                             std::size_t T, std::vector<std::string> *warnings = nullptr) {
  TemporalNetwork net(nodes.size(), T);
  for (const auto &r : records) {
    auto s = nodes.find(r.src);
    auto d = nodes.find(r.dst);
    if (!s) fail(ErrorKind::Input, "unknown node id: " + r.src);
    if (!d) fail(ErrorKind::Input, "unknown node id: " + r.dst);
    if (r.t < 1 || static_cast<std::size_t>(r.t) > T)
      fail(ErrorKind::Input, "edge time " + std::to_string(r.t) + " out of range 1.." + std::to_string(T));
    if (*s == *d) fail(ErrorKind::Input, "self-loop record rejected: " + r.src + " at t=" + std::to_string(r.t));
    Panel &p = net.panel(static_cast<std::size_t>(r.t));
    if (p(*s, *d)) {
      if (warnings) warnings->push_back("duplicate edge record (" + std::to_string(r.t) + "," + r.src + "," + r.dst + ")");
      continue;
    }
    p.set(*s, *d);
  }
  return net;
}

// ---------------------------------------------------------------------------
// Time covariates

enum class HourClass : std::uint8_t { H00 = 0, H06 = 1, H12 = 2, H18 = 3 };

inline int hour_of(HourClass h) { return 6 * static_cast<int>(h); }

inline HourClass hour_class_from_hour(long long hour, const std::string &where) {
  switch (hour) {
    case 0: return HourClass::H00;
    case 6: return HourClass::H06;
    case 12: return HourClass::H12;
    case 18: return HourClass::H18;
    default: fail(ErrorKind::Input, where + ": hour must be one of 0,6,12,18, got " + std::to_string(hour));
  }
}

enum class Epoch : std::uint8_t { PreCon, DNCCon, InterCon, RNCCon, PreDeb, Deb, PreElec, Elec, PostElec };

inline constexpr std::array<const char *, 9> kEpochNames = {"PreCon", "DNCCon", "InterCon", "RNCCon", "PreDeb",
                                                            "Deb",    "PreElec", "Elec",    "PostElec"};

inline const char *epoch_name(Epoch e) { return kEpochNames[static_cast<std::size_t>(e)]; }

inline std::optional<Epoch> find_epoch(std::string_view s) {
  for (std::size_t k = 0; k < kEpochNames.size(); ++k)
    if (s == kEpochNames[k]) return static_cast<Epoch>(k);
  return std::nullopt;
}

struct PanelTime {
  HourClass hour = HourClass::H00;
  Epoch epoch = Epoch::PreCon;
};

class TimeCovariates {
 public:
  TimeCovariates() = default;
  explicit TimeCovariates(std::vector<PanelTime> per_panel) : rows_(std::move(per_panel)) { validate(); }

  std::size_t panels() const { return rows_.size(); }

  const PanelTime &at(std::size_t t) const {
    if (t < 1 || t > rows_.size())
      fail(ErrorKind::Simulation, "no covariates for panel " + std::to_string(t));
    return rows_[t - 1];
  }

  bool has_epoch(Epoch e) const {
    return std::any_of(rows_.begin(), rows_.end(), [e](const PanelTime &p) { return p.epoch == e; });
  }
  bool has_hour(HourClass h) const {
    return std::any_of(rows_.begin(), rows_.end(), [h](const PanelTime &p) { return p.hour == h; });
  }

  std::size_t epoch_length(Epoch e) const {
    return static_cast<std::size_t>(
        std::count_if(rows_.begin(), rows_.end(), [e](const PanelTime &p) { return p.epoch == e; }));
  }

 private:
  // Epochs must occupy contiguous, non-overlapping runs.
  void validate() const {
    std::vector<bool> closed(kEpochNames.size(), false);
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      auto e = static_cast<std::size_t>(rows_[k].epoch);
      if (closed[e]) fail(ErrorKind::Input, std::string("epoch ") + kEpochNames[e] + " is not contiguous");
      if (k + 1 < rows_.size() && rows_[k + 1].epoch != rows_[k].epoch) closed[e] = true;
    }
  }

  std::vector<PanelTime> rows_;
};

// ---------------------------------------------------------------------------
// Built-in layout of the 2004 blog study: 47 nodes, 484 six-hourly panels.

/// 33 DNC-only, 13 RNC-only and one dual-credentialed node (34 DNC, 14 RNC).
inline NodeTable study_node_table() {
  NodeTable nodes;
  char buf[16];
  for (int k = 1; k <= 33; ++k) {
    std::snprintf(buf, sizeof buf, "dnc%02d", k);
    nodes.add(buf, Membership({Group::DNC}));
  }
  for (int k = 1; k <= 13; ++k) {
    std::snprintf(buf, sizeof buf, "rnc%02d", k);
    nodes.add(buf, Membership({Group::RNC}));
  }
  nodes.add("dual01", Membership({Group::DNC, Group::RNC}));
  return nodes;
}

/// Panel counts per epoch on the 7/22 - 11/19 six-hourly calendar.
inline constexpr std::array<std::size_t, 9> kStudyEpochLengths = {16, 16, 124, 16, 71, 93, 76, 4, 68};

/// Covariates for the first `T` panels of the study calendar (starting at
/// midnight, hours cycling 0/6/12/18). T defaults to the full 484 panels.
inline TimeCovariates study_calendar(std::size_t T = 484) {
  std::vector<PanelTime> rows;
  rows.reserve(T);
  std::size_t epoch = 0, used = 0;
  for (std::size_t k = 0; k < T; ++k) {
    while (epoch + 1 < kStudyEpochLengths.size() && used >= kStudyEpochLengths[epoch]) {
      ++epoch;
      used = 0;
    }
    rows.push_back({static_cast<HourClass>(k % 4), static_cast<Epoch>(epoch)});
    ++used;
  }
  return TimeCovariates(std::move(rows));
}

// ---------------------------------------------------------------------------
// CSV loaders

inline NodeTable read_node_csv(const std::string &path) {
  auto table = read_csv_file(path, {"id", "groups"});
  std::size_t c_id = table.column("id"), c_groups = table.column("groups");
  NodeTable nodes;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::string where = path + ":" + std::to_string(table.line_numbers[r]);
    std::vector<Group> groups;
    for (const auto &g : split(table.rows[r][c_groups], '|')) groups.push_back(parse_group(g, where));
    try {
      nodes.add(table.rows[r][c_id], Membership(std::move(groups)));
    } catch (const Error &e) {
      fail(ErrorKind::Input, where + ": " + e.what());
    }
  }
  return nodes;
}

inline TimeCovariates read_time_csv(const std::string &path) {
  auto table = read_csv_file(path, {"t", "hour", "epoch"});
  std::size_t c_t = table.column("t"), c_h = table.column("hour"), c_e = table.column("epoch");
  std::map<long long, PanelTime> by_t;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::string where = path + ":" + std::to_string(table.line_numbers[r]);
    long long t = parse_integer(table.rows[r][c_t], where);
    PanelTime pt;
    pt.hour = hour_class_from_hour(parse_integer(table.rows[r][c_h], where), where);
    auto e = find_epoch(table.rows[r][c_e]);
    if (!e) fail(ErrorKind::Input, where + ": unknown epoch '" + table.rows[r][c_e] + "'");
    pt.epoch = *e;
    if (!by_t.emplace(t, pt).second) fail(ErrorKind::Input, where + ": duplicate panel " + std::to_string(t));
  }
  std::vector<PanelTime> rows;
  long long expect = 1;
  for (const auto &[t, pt] : by_t) {
    if (t != expect) fail(ErrorKind::Input, path + ": missing panel " + std::to_string(expect));
    rows.push_back(pt);
    ++expect;
  }
  return TimeCovariates(std::move(rows));
}

inline std::vector<EdgeRecord> read_edge_csv(const std::string &path) {
  auto table = read_csv_file(path, {"t", "src", "dst"});
  std::size_t c_t = table.column("t"), c_s = table.column("src"), c_d = table.column("dst");
  std::vector<EdgeRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::string where = path + ":" + std::to_string(table.line_numbers[r]);
    records.push_back({parse_integer(table.rows[r][c_t], where), table.rows[r][c_s], table.rows[r][c_d]});
  }
  return records;
}

inline void write_edge_csv(std::ostream &out, const TemporalNetwork &net, const NodeTable &nodes) {
  out << "t,src,dst\n";
  for (std::size_t t = 1; t <= net.panels(); ++t) {
    const Panel &p = net.panel(t);
    for (std::size_t i = 0; i < net.nodes(); ++i)
      for (std::size_t j = 0; j < net.nodes(); ++j)
        if (p(i, j)) out << t << ',' << nodes.id(i) << ',' << nodes.id(j) << '\n';
  }
}

inline void write_node_csv(std::ostream &out, const NodeTable &nodes) {
  out << "id,groups\n";
  for (std::size_t v = 0; v < nodes.size(); ++v) out << nodes.id(v) << ',' << nodes.membership(v).to_string() << '\n';
}

inline void write_time_csv(std::ostream &out, const TimeCovariates &cov) {
  out << "t,hour,epoch\n";
  for (std::size_t t = 1; t <= cov.panels(); ++t)
    out << t << ',' << hour_of(cov.at(t).hour) << ',' << epoch_name(cov.at(t).epoch) << '\n';
}

}  // namespace dlnr

#endif  // DLNR_TEMPORAL_GRAPH_HPP
