#ifndef DLNR_SIMULATE_HPP
#define DLNR_SIMULATE_HPP

#include <algorithm>
#include <optional>

#include "design_matrix.hpp"
#include "gli.hpp"
#include "glm_fit.hpp"

namespace dlnr {

// RNG stream tags; keep draws for different purposes independent.
inline constexpr std::uint64_t kForecastStream = 0x466f7265;  // "Fore"
inline constexpr std::uint64_t kSynthStream = 0x53796e74;     // "Synt"

namespace detail {

inline void check_theta(const Eigen::VectorXd &theta, const ModelSpec &spec) {
  if (static_cast<std::size_t>(theta.size()) != spec.size())
    fail(ErrorKind::Simulation, "coefficient vector has " + std::to_string(theta.size()) + " entries, model '" +
                                    spec.name + "' has " + std::to_string(spec.size()) + " terms");
}

}  // namespace detail

/// Edge probabilities for panel t given the panel t-1 stored in `net`,
/// one per ordered dyad (i != j) in row-major order.
inline Eigen::VectorXd dyad_probabilities(const Eigen::VectorXd &theta, const ModelSpec &spec,
                                          const TemporalNetwork &net, const NodeTable &nodes,
                                          const TimeCovariates &cov, std::size_t t) {
  detail::check_theta(theta, spec);
  if (t < 2 || t > net.panels()) fail(ErrorKind::Simulation, "target panel out of range: " + std::to_string(t));
  if (t > cov.panels()) fail(ErrorKind::Simulation, "no covariates for panel " + std::to_string(t));
  const std::size_t n = net.nodes(), per = n * (n - 1);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(per), static_cast<Eigen::Index>(spec.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(per));
  fill_panel_block(net, nodes, cov, spec, t, X, y);
  Eigen::VectorXd eta = X * theta;
  return eta.unaryExpr([](double e) { return logistic(e); });
}

/// Draws one panel from dyad probabilities using counter-based uniforms.
inline Panel sample_panel(const Eigen::VectorXd &prob, std::size_t n, CounterKey key) {
  Panel out(n);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      key.i = i;
      key.j = j;
      if (counter_uniform(key) < prob(r)) out.set(i, j);
      ++r;
    }
  return out;
}

/// One-step-ahead forecast of panel t conditioned on the observed panel t-1.
inline std::vector<Panel> forecast_step(const Eigen::VectorXd &theta, const ModelSpec &spec,
                                        const TemporalNetwork &net, const NodeTable &nodes,
                                        const TimeCovariates &cov, std::size_t t, std::size_t reps,
                                        std::optional<std::uint64_t> seed, unsigned threads = 0) {
  if (!seed) fail(ErrorKind::Simulation, "a seed is required for forecasting");
  Eigen::VectorXd prob = dyad_probabilities(theta, spec, net, nodes, cov, t);
  std::vector<Panel> out(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    out[r] = sample_panel(prob, net.nodes(), CounterKey{*seed, kForecastStream, r, t, 0, 0});
  });
  return out;
}

inline std::vector<Panel> forecast_step(const FitResult &fit, const ModelSpec &spec, const TemporalNetwork &net,
                                        const NodeTable &nodes, const TimeCovariates &cov, std::size_t t,
                                        std::size_t reps, std::optional<std::uint64_t> seed,
                                        unsigned threads = 0) {
  return forecast_step(fit.theta, spec, net, nodes, cov, t, reps, seed, threads);
}

/// Generates panels 2..T sequentially from `initial`, each conditioned on the
/// previously generated panel.
inline TemporalNetwork synth_generate(const Eigen::VectorXd &theta, const ModelSpec &spec, const NodeTable &nodes,
                                      const TimeCovariates &cov, std::size_t T, const Panel &initial,
                                      std::optional<std::uint64_t> seed) {
  if (!seed) fail(ErrorKind::Simulation, "a seed is required for synthetic generation");
  if (T < 1) fail(ErrorKind::Simulation, "need at least one panel");
  if (initial.size() != nodes.size()) fail(ErrorKind::Simulation, "initial panel does not match node table");
  if (cov.panels() < T) fail(ErrorKind::Simulation, "time covariates cover fewer than " + std::to_string(T) + " panels");
  detail::check_theta(theta, spec);
  check_spec_covariates(spec, cov);
  TemporalNetwork net(nodes.size(), T);
  net.panel(1) = initial;
  for (std::size_t t = 2; t <= T; ++t) {
    Eigen::VectorXd prob = dyad_probabilities(theta, spec, net, nodes, cov, t);
    net.panel(t) = sample_panel(prob, nodes.size(), CounterKey{*seed, kSynthStream, 0, t, 0, 0});
  }
  return net;
}

// ---------------------------------------------------------------------------
// Forecast adequacy

/// Type-7 (linear interpolation) empirical quantile of sorted data.
inline double sorted_quantile(const std::vector<double> &sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  auto lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct BandCell {
  std::size_t t = 0;
  std::string gli;
  double observed = 0;
  double mean = 0;
  double lo = 0;
  double hi = 0;

  bool covers_observed() const { return lo <= observed && observed <= hi; }
};

struct ForecastBand {
  std::size_t replicates = 0;
  std::vector<std::string> gli_names;
  std::vector<BandCell> cells;  // panel-major, gli-minor

  /// Share of panels whose observed value of `gli` lies inside the band.
  double coverage(const std::string &gli) const {
    std::size_t in = 0, total = 0;
    for (const auto &c : cells)
      if (c.gli == gli) {
        ++total;
        in += c.covers_observed();
      }
    return total ? static_cast<double>(in) / static_cast<double>(total) : 0.0;
  }
};

struct AdequacyOptions {
  std::size_t reps = 100;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  double lower_q = 0.025;
  double upper_q = 0.975;
  bool undirected_triangles = false;  // adds a "triangles" GLI
};

/// Pointwise forecast bands for every panel t = 2..T. The band is the
/// [lower_q, upper_q] empirical quantile range, widened if needed so that it
/// contains the simulated mean.
inline ForecastBand adequacy_report(const Eigen::VectorXd &theta, const ModelSpec &spec, const TemporalNetwork &net,
                                    const NodeTable &nodes, const TimeCovariates &cov,
                                    const AdequacyOptions &opts) {
  if (opts.reps < 2) fail(ErrorKind::Simulation, "adequacy needs at least 2 replicates");
  if (!opts.seed) fail(ErrorKind::Simulation, "a seed is required for forecasting");
  if (net.panels() < 2) fail(ErrorKind::Simulation, "adequacy needs at least two panels");
  check_spec_covariates(spec, cov);

  ForecastBand band;
  band.replicates = opts.reps;
  band.gli_names.assign(kGliNames.begin(), kGliNames.end());
  if (opts.undirected_triangles) band.gli_names.emplace_back("triangles");
  const std::size_t G = band.gli_names.size(), T = net.panels();

  auto glis = [&](const Panel &p) {
    std::vector<double> v;
    auto base = compute_glis(p);
    v.assign(base.begin(), base.end());
    if (opts.undirected_triangles) v.push_back(static_cast<double>(gli_undirected_triangles(p)));
    return v;
  };

  std::vector<std::vector<BandCell>> per_panel(T - 1);
  parallel_for(T - 1, opts.threads, [&](std::size_t k) {
    const std::size_t t = k + 2;
    Eigen::VectorXd prob = dyad_probabilities(theta, spec, net, nodes, cov, t);
    std::vector<std::vector<double>> draws(G, std::vector<double>(opts.reps));
    for (std::size_t r = 0; r < opts.reps; ++r) {
      Panel sim = sample_panel(prob, net.nodes(), CounterKey{*opts.seed, kForecastStream, r, t, 0, 0});
      auto v = glis(sim);
      for (std::size_t g = 0; g < G; ++g) draws[g][r] = v[g];
    }
    auto observed = glis(net.panel(t));
    auto &cells = per_panel[k];
    for (std::size_t g = 0; g < G; ++g) {
      auto &d = draws[g];
      double mean = 0;
      for (double x : d) mean += x;
      mean /= static_cast<double>(d.size());
      std::sort(d.begin(), d.end());
      mean = std::clamp(mean, d.front(), d.back());  // summation rounding
      double lo = sorted_quantile(d, opts.lower_q), hi = sorted_quantile(d, opts.upper_q);
      cells.push_back({t, band.gli_names[g], observed[g], mean, std::min(lo, mean), std::max(hi, mean)});
    }
  });
  for (auto &cells : per_panel)
    for (auto &c : cells) band.cells.push_back(std::move(c));
  return band;
}

inline void write_adequacy_csv(std::ostream &out, const ForecastBand &band) {
  out << "t,gli,observed,mean,lo,hi\n";
  for (const auto &c : band.cells)
    out << c.t << ',' << c.gli << ',' << format_number(c.observed) << ',' << format_number(c.mean) << ','
        << format_number(c.lo) << ',' << format_number(c.hi) << '\n';
}

}  // namespace dlnr

#endif  // DLNR_SIMULATE_HPP
