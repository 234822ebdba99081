#ifndef DLNR_TERMS_HPP
#define DLNR_TERMS_HPP

#include <numbers>
#include <string>
#include <vector>

#include "temporal_graph.hpp"

namespace dlnr {

// ---------------------------------------------------------------------------
// Dyad classification
//
// A dyad is in-group when the two membership sets intersect. Its mixing block
// is G->G for the first group in the sender's (ordered) membership that the
// receiver also holds; out-group dyads use the two primary groups.

enum class MixBlock : std::uint8_t { DNC_DNC, RNC_RNC, DNC_RNC, RNC_DNC };

inline const char *mix_block_name(MixBlock b) {
  switch (b) {
    case MixBlock::DNC_DNC: return "DNC->DNC";
    case MixBlock::RNC_RNC: return "RNC->RNC";
    case MixBlock::DNC_RNC: return "DNC->RNC";
    case MixBlock::RNC_DNC: return "RNC->DNC";
  }
  return "?";
}

inline MixBlock make_block(Group from, Group to) {
  if (from == Group::DNC) return to == Group::DNC ? MixBlock::DNC_DNC : MixBlock::DNC_RNC;
  return to == Group::RNC ? MixBlock::RNC_RNC : MixBlock::RNC_DNC;
}

inline bool in_group(const Membership &a, const Membership &b) { return a.intersects(b); }

inline MixBlock classify_dyad(const Membership &sender, const Membership &receiver) {
  if (auto g = sender.first_shared(receiver)) return make_block(*g, *g);
  return make_block(sender.primary(), receiver.primary());
}

/// True when i, k and j share at least one common group.
inline bool in_group_triple(const Membership &i, const Membership &k, const Membership &j) {
  for (Group g : i.groups())
    if (k.has(g) && j.has(g)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Term descriptors

enum class TermKind : std::uint8_t {
  Intercept,
  Mix,
  Lag,
  Receiver,
  Sender,
  Clique,
  GroupTwoPath,
  CrossTwoPath,
  GroupReciprocity,
  BetweenReciprocity,
  Hour,
  HarmonicCos,
  HarmonicSin,
  EpochDummy,
  Interaction,
};

inline constexpr double kWeeklyPeriod = 28.0;

struct TermDescriptor {
  TermKind kind = TermKind::Intercept;
  MixBlock block = MixBlock::DNC_DNC;     // Mix
  HourClass hour = HourClass::H06;        // Hour, Interaction
  Epoch epoch = Epoch::DNCCon;            // EpochDummy
  TermKind base = TermKind::Receiver;     // Interaction
  double period = kWeeklyPeriod;          // HarmonicCos / HarmonicSin
  std::string label;

  /// Reads the lagged panel (as opposed to attributes or time only).
  bool structural() const {
    switch (kind) {
      case TermKind::Lag:
      case TermKind::Receiver:
      case TermKind::Sender:
      case TermKind::Clique:
      case TermKind::GroupTwoPath:
      case TermKind::CrossTwoPath:
      case TermKind::GroupReciprocity:
      case TermKind::BetweenReciprocity:
      case TermKind::Interaction: return true;
      default: return false;
    }
  }
};

inline std::string hour_suffix(HourClass h) {
  static constexpr std::array<const char *, 4> kSuffix = {"00", "06", "12", "18"};
  return kSuffix[static_cast<std::size_t>(h)];
}

/// Canonical model-spec label of a descriptor.
inline std::string canonical_label(const TermDescriptor &d) {
  switch (d.kind) {
    case TermKind::Intercept: return "intercept";
    case TermKind::Mix: return std::string("mix:") + mix_block_name(d.block);
    case TermKind::Lag: return "lag";
    case TermKind::Receiver: return "receiver";
    case TermKind::Sender: return "sender";
    case TermKind::Clique: return "cluster";
    case TermKind::GroupTwoPath: return "group2path";
    case TermKind::CrossTwoPath: return "cross2path";
    case TermKind::GroupReciprocity: return "recip:group";
    case TermKind::BetweenReciprocity: return "recip:between";
    case TermKind::Hour: return "hour:" + hour_suffix(d.hour);
    case TermKind::HarmonicCos:
    case TermKind::HarmonicSin: {
      std::string s = d.kind == TermKind::HarmonicCos ? "harmonic:cos" : "harmonic:sin";
      if (d.period != kWeeklyPeriod) s += ":" + format_number(d.period);
      return s;
    }
    case TermKind::EpochDummy: return std::string("epoch:") + epoch_name(d.epoch);
    case TermKind::Interaction:
      return std::string(d.base == TermKind::Lag ? "lag" : "receiver") + "*hour:" + hour_suffix(d.hour);
  }
  return "?";
}

/// Row label used in coefficient comparison tables.
inline std::string table_label(const TermDescriptor &d) {
  switch (d.kind) {
    case TermKind::Intercept: return "Intercept";
    case TermKind::Mix:
      switch (d.block) {
        case MixBlock::DNC_DNC: return "DNC";
        case MixBlock::RNC_RNC: return "RNC";
        case MixBlock::DNC_RNC: return "DNC->RNC";
        case MixBlock::RNC_DNC: return "RNC->DNC";
      }
      break;
    case TermKind::Lag: return "A[t-1]";
    case TermKind::Receiver: return "Receiver";
    case TermKind::Sender: return "Sender";
    case TermKind::Clique: return "Cluster";
    case TermKind::GroupTwoPath: return "Group-2-Path";
    case TermKind::CrossTwoPath: return "Cross-Group-2-Path";
    case TermKind::GroupReciprocity: return "Group-Reciprocity";
    case TermKind::BetweenReciprocity: return "Between-Group-Reciprocity";
    case TermKind::Hour: return "phi" + hour_suffix(d.hour);
    case TermKind::HarmonicCos: return "theta1";
    case TermKind::HarmonicSin: return "theta2";
    case TermKind::EpochDummy: return epoch_name(d.epoch);
    case TermKind::Interaction:
      return std::string(d.base == TermKind::Lag ? "A[t-1]" : "Receiver") + " x phi" + hour_suffix(d.hour);
  }
  return "?";
}

namespace detail {

inline HourClass parse_hour_label(const std::string &s, const std::string &label) {
  if (s == "06") return HourClass::H06;
  if (s == "12") return HourClass::H12;
  if (s == "18") return HourClass::H18;
  if (s == "00") fail(ErrorKind::Spec, "hour:00 is the reference class and cannot be a term: " + label);
  fail(ErrorKind::Spec, "unknown hour class in term: " + label);
}

}  // namespace detail

/// Parses one model-spec label (e.g. `mix:DNC->RNC`, `receiver*hour:12`).
inline TermDescriptor parse_term(const std::string &raw) {
  std::string label(trim(raw));
  TermDescriptor d;
  auto starts = [&](const char *p) { return label.rfind(p, 0) == 0; };
  if (label == "intercept") {
    d.kind = TermKind::Intercept;
  } else if (label == "lag") {
    d.kind = TermKind::Lag;
  } else if (label == "receiver") {
    d.kind = TermKind::Receiver;
  } else if (label == "sender") {
    d.kind = TermKind::Sender;
  } else if (label == "cluster") {
    d.kind = TermKind::Clique;
  } else if (label == "group2path") {
    d.kind = TermKind::GroupTwoPath;
  } else if (label == "cross2path") {
    d.kind = TermKind::CrossTwoPath;
  } else if (label == "recip:group") {
    d.kind = TermKind::GroupReciprocity;
  } else if (label == "recip:between") {
    d.kind = TermKind::BetweenReciprocity;
  } else if (starts("mix:")) {
    d.kind = TermKind::Mix;
    std::string b = label.substr(4);
    if (b == "DNC->DNC") d.block = MixBlock::DNC_DNC;
    else if (b == "RNC->RNC") d.block = MixBlock::RNC_RNC;
    else if (b == "DNC->RNC") d.block = MixBlock::DNC_RNC;
    else if (b == "RNC->DNC") d.block = MixBlock::RNC_DNC;
    else fail(ErrorKind::Spec, "unknown mixing block in term: " + label);
  } else if (starts("hour:")) {
    d.kind = TermKind::Hour;
    d.hour = detail::parse_hour_label(label.substr(5), label);
  } else if (starts("harmonic:")) {
    auto parts = split(label.substr(9), ':');
    if (parts[0] == "cos") d.kind = TermKind::HarmonicCos;
    else if (parts[0] == "sin") d.kind = TermKind::HarmonicSin;
    else fail(ErrorKind::Spec, "harmonic phase must be cos or sin: " + label);
    if (parts.size() > 2) fail(ErrorKind::Spec, "malformed harmonic term: " + label);
    if (parts.size() == 2) {
      try {
        d.period = parse_real(parts[1], label);
      } catch (const Error &) {
        fail(ErrorKind::Spec, "harmonic period is not a number: " + label);
      }
      if (!(d.period > 0)) fail(ErrorKind::Spec, "harmonic period must be positive: " + label);
    }
  } else if (starts("epoch:")) {
    d.kind = TermKind::EpochDummy;
    auto e = find_epoch(label.substr(6));
    if (!e) fail(ErrorKind::Spec, "unknown epoch in term: " + label);
    if (*e == Epoch::PreCon) fail(ErrorKind::Spec, "epoch:PreCon is the reference epoch and cannot be a term");
    d.epoch = *e;
  } else if (starts("receiver*hour:") || starts("lag*hour:")) {
    d.kind = TermKind::Interaction;
    auto star = label.find('*');
    d.base = label.substr(0, star) == "lag" ? TermKind::Lag : TermKind::Receiver;
    d.hour = detail::parse_hour_label(label.substr(star + 6), label);
  } else {
    fail(ErrorKind::Spec, "unknown term label: " + label);
  }
  d.label = canonical_label(d);
  return d;
}

// ---------------------------------------------------------------------------
// Clique comembership

/// Counts, for every node pair, the maximal cliques of size >= min_size that
/// contain both nodes. `undirected` must be symmetric. Result is n*n row-major.
inline std::vector<std::uint32_t> clique_comembership(const Panel &undirected, std::size_t min_size = 3) {
  using Word = Panel::Word;
  const std::size_t n = undirected.size(), W = undirected.words();
  std::vector<std::uint32_t> counts(n * n, 0);
  if (n == 0) return counts;

  std::vector<std::size_t> current;
  auto first_bit = [&](const std::vector<Word> &s) -> std::size_t {
    for (std::size_t w = 0; w < W; ++w)
      if (s[w]) return w * 64 + static_cast<std::size_t>(std::countr_zero(s[w]));
    return n;
  };
  auto empty = [&](const std::vector<Word> &s) {
    return std::all_of(s.begin(), s.end(), [](Word x) { return x == 0; });
  };

  // Bron-Kerbosch with Tomita pivoting.
  auto expand = [&](auto &&self, std::vector<Word> P, std::vector<Word> X) -> void {
    if (empty(P) && empty(X)) {
      if (current.size() >= min_size)
        for (std::size_t a = 0; a < current.size(); ++a)
          for (std::size_t b = a + 1; b < current.size(); ++b) {
            ++counts[current[a] * n + current[b]];
            ++counts[current[b] * n + current[a]];
          }
      return;
    }
    std::size_t pivot = n, best = 0;
    for (std::size_t w = 0; w < W; ++w) {
      Word candidates = P[w] | X[w];
      while (candidates) {
        std::size_t u = w * 64 + static_cast<std::size_t>(std::countr_zero(candidates));
        candidates &= candidates - 1;
        auto nu = undirected.out_row(u);
        std::size_t c = 0;
        for (std::size_t k = 0; k < W; ++k) c += static_cast<std::size_t>(std::popcount(P[k] & nu[k]));
        if (pivot == n || c > best) {
          pivot = u;
          best = c;
        }
      }
    }
    auto npivot = undirected.out_row(pivot);
    std::vector<Word> todo(W);
    for (std::size_t k = 0; k < W; ++k) todo[k] = P[k] & ~npivot[k];
    for (std::size_t v = first_bit(todo); v < n; v = first_bit(todo)) {
      todo[v / 64] &= ~(Word{1} << (v % 64));
      auto nv = undirected.out_row(v);
      std::vector<Word> P2(W), X2(W);
      for (std::size_t k = 0; k < W; ++k) {
        P2[k] = P[k] & nv[k];
        X2[k] = X[k] & nv[k];
      }
      current.push_back(v);
      self(self, std::move(P2), std::move(X2));
      current.pop_back();
      P[v / 64] &= ~(Word{1} << (v % 64));
      X[v / 64] |= Word{1} << (v % 64);
    }
  };

  std::vector<Word> all(W, 0);
  for (std::size_t v = 0; v < n; ++v) all[v / 64] |= Word{1} << (v % 64);
  expand(expand, all, std::vector<Word>(W, 0));
  return counts;
}

// ---------------------------------------------------------------------------
// Lagged context: everything the structural terms read from panel t-1.

class LaggedContext {
 public:
  LaggedContext(const TemporalNetwork &net, const NodeTable &nodes, std::size_t t)
      : nodes_(&nodes), t_(t) {
    if (t < 2) fail(ErrorKind::Input, "change statistics need a lagged panel (t >= 2), got t=" + std::to_string(t));
    if (nodes.size() != net.nodes()) fail(ErrorKind::Input, "node table does not match network size");
    prev_ = &net.panel(t - 1);
    const std::size_t n = net.nodes();
    for (Group g : {Group::DNC, Group::RNC})
      group_mask_[static_cast<std::size_t>(g)] = node_mask(n, [&](std::size_t v) { return nodes.membership(v).has(g); });
  }

  const Panel &previous() const { return *prev_; }
  std::size_t t() const { return t_; }

  double lag(std::size_t i, std::size_t j) const { return (*prev_)(i, j) ? 1.0 : 0.0; }
  double receiver(std::size_t, std::size_t j) const { return static_cast<double>(prev_->in_degree(j)); }
  double sender(std::size_t i, std::size_t) const { return static_cast<double>(prev_->out_degree(i)); }

  double clique(std::size_t i, std::size_t j) const {
    if (cliques_.empty()) cliques_ = clique_comembership(symmetrize(*prev_));
    return static_cast<double>(cliques_[i * prev_->size() + j]);
  }

  double group_two_path(std::size_t i, std::size_t j) const {
    const auto &mi = nodes_->membership(i), &mj = nodes_->membership(j);
    std::size_t count = 0;
    auto out = prev_->out_row(i), in = prev_->in_row(j);
    for (std::size_t w = 0; w < prev_->words(); ++w) {
      Panel::Word allowed = 0;
      for (Group g : mi.groups())
        if (mj.has(g)) allowed |= group_mask_[static_cast<std::size_t>(g)][w];
      count += static_cast<std::size_t>(std::popcount(out[w] & in[w] & allowed));
    }
    return static_cast<double>(count);
  }

  double cross_two_path(std::size_t i, std::size_t j) const {
    const auto &mi = nodes_->membership(i), &mj = nodes_->membership(j);
    if (in_group(mi, mj)) return 0.0;
    std::size_t count = 0;
    auto out = prev_->out_row(i), in = prev_->in_row(j);
    for (std::size_t w = 0; w < prev_->words(); ++w) {
      Panel::Word allowed = 0;
      for (Group g : mi.groups()) allowed |= group_mask_[static_cast<std::size_t>(g)][w];
      count += static_cast<std::size_t>(std::popcount(out[w] & in[w] & allowed));
    }
    return static_cast<double>(count);
  }

  double reciprocity(std::size_t i, std::size_t j, bool within_group) const {
    if (!(*prev_)(j, i)) return 0.0;
    return in_group(nodes_->membership(i), nodes_->membership(j)) == within_group ? 1.0 : 0.0;
  }

  double mixing(std::size_t i, std::size_t j, MixBlock b) const {
    return classify_dyad(nodes_->membership(i), nodes_->membership(j)) == b ? 1.0 : 0.0;
  }

 private:
  const NodeTable *nodes_;
  const Panel *prev_;
  std::size_t t_;
  std::array<std::vector<Panel::Word>, 2> group_mask_;
  mutable std::vector<std::uint32_t> cliques_;
};

// ---------------------------------------------------------------------------
// Per-dyad change statistics. All read panel t-1 only.

namespace detail {
inline void check_dyad(std::size_t i, std::size_t j, std::size_t n) {
  if (i == j) fail(ErrorKind::Input, "change statistics are undefined for i == j");
  if (i >= n || j >= n) fail(ErrorKind::Input, "node index out of range");
}
}  // namespace detail

inline double x_mixing(const TemporalNetwork &net, const NodeTable &nodes, std::size_t i, std::size_t j,
                       std::size_t t, MixBlock block) {
  detail::check_dyad(i, j, net.nodes());
  return LaggedContext(net, nodes, t).mixing(i, j, block);
}

inline double x_lag(const TemporalNetwork &net, std::size_t i, std::size_t j, std::size_t t) {
  detail::check_dyad(i, j, net.nodes());
  if (t < 2) fail(ErrorKind::Input, "lag needs t >= 2");
  return net.panel(t - 1)(i, j) ? 1.0 : 0.0;
}

inline double x_receiver(const TemporalNetwork &net, std::size_t i, std::size_t j, std::size_t t) {
  detail::check_dyad(i, j, net.nodes());
  if (t < 2) fail(ErrorKind::Input, "receiver needs t >= 2");
  return static_cast<double>(net.degree(t - 1, j, Direction::In));
}

inline double x_sender(const TemporalNetwork &net, std::size_t i, std::size_t j, std::size_t t) {
  detail::check_dyad(i, j, net.nodes());
  if (t < 2) fail(ErrorKind::Input, "sender needs t >= 2");
  return static_cast<double>(net.degree(t - 1, i, Direction::Out));
}

inline double x_clique(const TemporalNetwork &net, const NodeTable &nodes, std::size_t i, std::size_t j,
                       std::size_t t) {
  detail::check_dyad(i, j, net.nodes());
  return LaggedContext(net, nodes, t).clique(i, j);
}

inline double x_group_two_path(const TemporalNetwork &net, const NodeTable &nodes, std::size_t i, std::size_t j,
                               std::size_t t) {
  detail::check_dyad(i, j, net.nodes());
  return LaggedContext(net, nodes, t).group_two_path(i, j);
}

inline double x_cross_two_path(const TemporalNetwork &net, const NodeTable &nodes, std::size_t i, std::size_t j,
                               std::size_t t) {
  detail::check_dyad(i, j, net.nodes());
  return LaggedContext(net, nodes, t).cross_two_path(i, j);
}

enum class ReciprocityScope { Group, Between };

inline double x_reciprocity(const TemporalNetwork &net, const NodeTable &nodes, std::size_t i, std::size_t j,
                            std::size_t t, ReciprocityScope scope) {
  detail::check_dyad(i, j, net.nodes());
  return LaggedContext(net, nodes, t).reciprocity(i, j, scope == ReciprocityScope::Group);
}

inline double x_hour(const TimeCovariates &cov, std::size_t t, HourClass cls) {
  return cov.at(t).hour == cls ? 1.0 : 0.0;
}

inline double x_epoch(const TimeCovariates &cov, std::size_t t, Epoch label) {
  return cov.at(t).epoch == label ? 1.0 : 0.0;
}

enum class Phase { Cos, Sin };

inline double x_harmonic(double t, Phase phase, double period = kWeeklyPeriod) {
  if (!(period > 0)) fail(ErrorKind::Spec, "harmonic period must be positive");
  double angle = 2.0 * std::numbers::pi * t / period;
  return phase == Phase::Cos ? std::cos(angle) : std::sin(angle);
}

inline double x_interaction(double base_value, double hour_indicator) { return base_value * hour_indicator; }

/// Value of descriptor `d` for dyad (i,j) at panel ctx.t().
inline double term_value(const TermDescriptor &d, const LaggedContext &ctx, const TimeCovariates &cov,
                         std::size_t i, std::size_t j) {
  const std::size_t t = ctx.t();
  switch (d.kind) {
    case TermKind::Intercept: return 1.0;
    case TermKind::Mix: return ctx.mixing(i, j, d.block);
    case TermKind::Lag: return ctx.lag(i, j);
    case TermKind::Receiver: return ctx.receiver(i, j);
    case TermKind::Sender: return ctx.sender(i, j);
    case TermKind::Clique: return ctx.clique(i, j);
    case TermKind::GroupTwoPath: return ctx.group_two_path(i, j);
    case TermKind::CrossTwoPath: return ctx.cross_two_path(i, j);
    case TermKind::GroupReciprocity: return ctx.reciprocity(i, j, true);
    case TermKind::BetweenReciprocity: return ctx.reciprocity(i, j, false);
    case TermKind::Hour: return x_hour(cov, t, d.hour);
    case TermKind::HarmonicCos: return x_harmonic(static_cast<double>(t), Phase::Cos, d.period);
    case TermKind::HarmonicSin: return x_harmonic(static_cast<double>(t), Phase::Sin, d.period);
    case TermKind::EpochDummy: return x_epoch(cov, t, d.epoch);
    case TermKind::Interaction: {
      double base = d.base == TermKind::Lag ? ctx.lag(i, j) : ctx.receiver(i, j);
      return x_interaction(base, x_hour(cov, t, d.hour));
    }
  }
  return 0.0;
}

}  // namespace dlnr

#endif  // DLNR_TERMS_HPP
