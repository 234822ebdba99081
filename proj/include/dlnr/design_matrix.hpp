#ifndef DLNR_DESIGN_MATRIX_HPP
#define DLNR_DESIGN_MATRIX_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <set>

#include "terms.hpp"

namespace dlnr {

// ---------------------------------------------------------------------------
// Model specification

struct ModelSpec {
  std::string name;
  std::vector<TermDescriptor> terms;

  std::size_t size() const { return terms.size(); }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(terms.size());
    for (const auto &d : terms) out.push_back(d.label);
    return out;
  }

  bool contains(const std::string &label) const {
    return std::any_of(terms.begin(), terms.end(), [&](const TermDescriptor &d) { return d.label == label; });
  }

  /// Throws if labels repeat or an intercept sits alongside all four mixing blocks.
  void validate() const {
    if (terms.empty()) fail(ErrorKind::Spec, "model '" + name + "' has no terms");
    std::set<std::string> seen;
    int blocks = 0;
    bool intercept = false;
    for (const auto &d : terms) {
      if (!seen.insert(d.label).second) fail(ErrorKind::Spec, "duplicate term in model '" + name + "': " + d.label);
      if (d.kind == TermKind::Mix) ++blocks;
      if (d.kind == TermKind::Intercept) intercept = true;
    }
    if (intercept && blocks == 4)
      fail(ErrorKind::Spec, "model '" + name + "': intercept is collinear with the four mixing blocks");
  }
};

inline ModelSpec make_spec(std::string name, const std::vector<std::string> &labels) {
  ModelSpec spec{std::move(name), {}};
  for (const auto &l : labels) spec.terms.push_back(parse_term(l));
  spec.validate();
  return spec;
}

/// Line-oriented spec: one term label per line, `#` starts a comment.
inline ModelSpec parse_model_spec(std::istream &in, std::string name, std::string source = {}) {
  ModelSpec spec{std::move(name), {}};
  if (source.empty()) source = spec.name;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    std::string_view body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    try {
      spec.terms.push_back(parse_term(std::string(body)));
    } catch (const Error &e) {
      fail(ErrorKind::Spec, source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  spec.validate();
  return spec;
}

inline ModelSpec read_model_spec(const std::string &path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Input, "cannot open file: " + path);
  return parse_model_spec(in, std::filesystem::path(path).stem().string(), path);
}

inline void write_model_spec(std::ostream &out, const ModelSpec &spec) {
  out << "# " << spec.name << '\n';
  for (const auto &d : spec.terms) out << d.label << '\n';
}

/// Throws when the spec needs an hour or epoch the covariates never take.
inline void check_spec_covariates(const ModelSpec &spec, const TimeCovariates &cov) {
  for (const auto &d : spec.terms) {
    if ((d.kind == TermKind::Hour || d.kind == TermKind::Interaction) && !cov.has_hour(d.hour))
      fail(ErrorKind::Spec, "term " + d.label + " references an hour absent from the time covariates");
    if (d.kind == TermKind::EpochDummy && !cov.has_epoch(d.epoch))
      fail(ErrorKind::Spec, "term " + d.label + " references an epoch absent from the time covariates");
  }
}

// ---------------------------------------------------------------------------
// Observation set

struct RowKey {
  std::uint32_t t;
  std::uint32_t i;
  std::uint32_t j;
};

/// Stacked dyad-panel observations for t = 2..T, panel-major, dyads row-major
/// over ordered pairs (i != j).
struct ObservationSet {
  std::size_t nodes = 0;
  std::size_t panels = 0;
  std::vector<RowKey> rows;
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> column_labels;

  std::size_t n_obs() const { return rows.size(); }
  std::size_t dyads_per_panel() const { return nodes * (nodes - 1); }
};

/// Fills rows [0, n(n-1)) of X/y with the observations of panel t.
template <class MatrixOut, class VectorOut>
void fill_panel_block(const TemporalNetwork &net, const NodeTable &nodes, const TimeCovariates &cov,
                      const ModelSpec &spec, std::size_t t, MatrixOut &&X, VectorOut &&y) {
  LaggedContext ctx(net, nodes, t);
  const Panel &now = net.panel(t);
  const std::size_t n = net.nodes();
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      y(r) = now(i, j) ? 1.0 : 0.0;
      for (std::size_t c = 0; c < spec.terms.size(); ++c)
        X(r, static_cast<Eigen::Index>(c)) = term_value(spec.terms[c], ctx, cov, i, j);
      ++r;
    }
}

inline void check_inputs(const TemporalNetwork &net, const NodeTable &nodes, const TimeCovariates &cov,
                         const ModelSpec &spec) {
  if (net.panels() < 2) fail(ErrorKind::Input, "at least two panels are required");
  if (net.nodes() < 2) fail(ErrorKind::Input, "at least two nodes are required");
  if (nodes.size() != net.nodes()) fail(ErrorKind::Input, "node table does not match network size");
  if (cov.panels() < net.panels())
    fail(ErrorKind::Input, "time covariates cover " + std::to_string(cov.panels()) + " panels, network has " +
                               std::to_string(net.panels()));
  spec.validate();
  check_spec_covariates(spec, cov);
}

inline ObservationSet build_observations(const TemporalNetwork &net, const NodeTable &nodes,
                                         const TimeCovariates &cov, const ModelSpec &spec, unsigned threads = 0) {
  check_inputs(net, nodes, cov, spec);
  ObservationSet obs;
  obs.nodes = net.nodes();
  obs.panels = net.panels();
  obs.column_labels = spec.labels();
  const std::size_t per = obs.dyads_per_panel(), T = net.panels(), p = spec.size();
  const std::size_t total = (T - 1) * per;
  obs.rows.resize(total);
  obs.y.resize(static_cast<Eigen::Index>(total));
  obs.X.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(p));

  parallel_for(T - 1, threads, [&](std::size_t k) {
    const std::size_t t = k + 2;
    const auto start = static_cast<Eigen::Index>(k * per), len = static_cast<Eigen::Index>(per);
    fill_panel_block(net, nodes, cov, spec, t, obs.X.middleRows(start, len), obs.y.segment(start, len));
    std::size_t r = k * per;
    for (std::size_t i = 0; i < obs.nodes; ++i)
      for (std::size_t j = 0; j < obs.nodes; ++j)
        if (i != j)
          obs.rows[r++] = {static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
  });
  if (!obs.X.allFinite()) fail(ErrorKind::Fit, "design matrix contains non-finite values");
  return obs;
}

/// CSV export `t,i,j,y,<term columns>` with node ids for i and j.
inline void write_observations_csv(std::ostream &out, const ObservationSet &obs, const NodeTable &nodes) {
  out << "t,i,j,y";
  for (const auto &l : obs.column_labels) out << ',' << l;
  out << '\n';
  for (std::size_t r = 0; r < obs.n_obs(); ++r) {
    const auto &k = obs.rows[r];
    out << k.t << ',' << nodes.id(k.i) << ',' << nodes.id(k.j) << ',' << obs.y(static_cast<Eigen::Index>(r));
    for (Eigen::Index c = 0; c < obs.X.cols(); ++c) out << ',' << format_number(obs.X(static_cast<Eigen::Index>(r), c));
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Design sources consumed by the fitter.
//
// A design source exposes its rows as a fixed sequence of blocks:
//   n_rows(), n_cols(), n_blocks(), labels(),
//   visit(b, fn)  calls fn(X_block, y_block) for block b.
// Block boundaries never depend on the thread count.

/// Blocks over an in-memory observation set.
class DenseDesign {
 public:
  explicit DenseDesign(const ObservationSet &obs, std::size_t block_rows = 0) : obs_(&obs) {
    block_ = block_rows ? block_rows : std::max<std::size_t>(obs.dyads_per_panel(), 1);
    if (obs.nodes == 0) block_ = block_rows ? block_rows : 4096;
  }
  DenseDesign(const Eigen::MatrixXd &X, const Eigen::VectorXd &y, std::vector<std::string> labels,
              std::size_t block_rows = 4096)
      : X_(&X), yv_(&y), own_labels_(std::move(labels)), block_(block_rows) {}

  std::size_t n_rows() const { return static_cast<std::size_t>(matrix().rows()); }
  std::size_t n_cols() const { return static_cast<std::size_t>(matrix().cols()); }
  std::size_t n_blocks() const { return (n_rows() + block_ - 1) / block_; }
  const std::vector<std::string> &labels() const { return obs_ ? obs_->column_labels : own_labels_; }

  template <class Fn>
  void visit(std::size_t b, Fn &&fn) const {
    const auto start = static_cast<Eigen::Index>(b * block_);
    const auto len = static_cast<Eigen::Index>(std::min(block_, n_rows() - b * block_));
    fn(matrix().middleRows(start, len), response().segment(start, len));
  }

 private:
  const Eigen::MatrixXd &matrix() const { return obs_ ? obs_->X : *X_; }
  const Eigen::VectorXd &response() const { return obs_ ? obs_->y : *yv_; }

  const ObservationSet *obs_ = nullptr;
  const Eigen::MatrixXd *X_ = nullptr;
  const Eigen::VectorXd *yv_ = nullptr;
  std::vector<std::string> own_labels_;
  std::size_t block_ = 4096;
};

/// Rebuilds each panel's rows on demand instead of holding the full matrix.
class StreamingDesign {
 public:
  StreamingDesign(const TemporalNetwork &net, const NodeTable &nodes, const TimeCovariates &cov,
                  const ModelSpec &spec)
      : net_(&net), nodes_(&nodes), cov_(&cov), spec_(&spec), labels_(spec.labels()) {
    check_inputs(net, nodes, cov, spec);
  }

  std::size_t n_rows() const { return (net_->panels() - 1) * per(); }
  std::size_t n_cols() const { return spec_->size(); }
  std::size_t n_blocks() const { return net_->panels() - 1; }
  const std::vector<std::string> &labels() const { return labels_; }

  template <class Fn>
  void visit(std::size_t b, Fn &&fn) const {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(per()), static_cast<Eigen::Index>(n_cols()));
    Eigen::VectorXd y(static_cast<Eigen::Index>(per()));
    fill_panel_block(*net_, *nodes_, *cov_, *spec_, b + 2, X, y);
    fn(X, y);
  }

 private:
  std::size_t per() const { return net_->nodes() * (net_->nodes() - 1); }

  const TemporalNetwork *net_;
  const NodeTable *nodes_;
  const TimeCovariates *cov_;
  const ModelSpec *spec_;
  std::vector<std::string> labels_;
};

}  // namespace dlnr

#endif  // DLNR_DESIGN_MATRIX_HPP
