#ifndef DLNR_MODEL_SELECT_HPP
#define DLNR_MODEL_SELECT_HPP

#include <optional>

#include "design_matrix.hpp"
#include "glm_fit.hpp"

namespace dlnr {

/// The five nested specifications.
///   M1 mixing blocks + weekly harmonics + hour dummies
///   M2 + lag
///   M3 + receiver, sender
///   M4 + in-group/cross-group two-paths, group/between reciprocity
///   M5 + cluster, epoch dummies, receiver x hour, lag x hour
inline std::vector<ModelSpec> builtin_sequence() {
  std::vector<std::string> labels = {"mix:DNC->DNC", "mix:RNC->RNC", "mix:DNC->RNC", "mix:RNC->DNC",
                                     "harmonic:cos", "harmonic:sin", "hour:06",      "hour:12",
                                     "hour:18"};
  std::vector<ModelSpec> seq;
  seq.push_back(make_spec("Model 1", labels));
  labels.push_back("lag");
  seq.push_back(make_spec("Model 2", labels));
  labels.insert(labels.end(), {"receiver", "sender"});
  seq.push_back(make_spec("Model 3", labels));
  labels.insert(labels.end(), {"group2path", "cross2path", "recip:group", "recip:between"});
  seq.push_back(make_spec("Model 4", labels));
  labels.push_back("cluster");
  for (const char *e : {"DNCCon", "InterCon", "RNCCon", "PreDeb", "Deb", "PreElec", "Elec", "PostElec"})
    labels.push_back(std::string("epoch:") + e);
  labels.insert(labels.end(), {"receiver*hour:06", "receiver*hour:12", "receiver*hour:18", "lag*hour:06",
                               "lag*hour:12", "lag*hour:18"});
  seq.push_back(make_spec("Model 5", labels));
  return seq;
}

struct ModelEntry {
  ModelSpec spec;
  std::optional<FitResult> fit;  // empty when fitting threw
  std::string failure;           // cause when !usable()

  bool usable() const { return fit && fit->converged; }
};

struct SelectionReport {
  std::vector<ModelEntry> models;
  std::size_t preferred = 0;
  std::size_t n_obs = 0;
};

struct SelectionOptions {
  FitOptions fit;
  bool streaming = false;  // rebuild rows per pass instead of materializing X
};

/// Fits one spec against the data.
inline FitResult fit_model(const ModelSpec &spec, const TemporalNetwork &net, const NodeTable &nodes,
                           const TimeCovariates &cov, const SelectionOptions &opts = {}) {
  if (opts.streaming) return fit_logistic(StreamingDesign(net, nodes, cov, spec), opts.fit);
  ObservationSet obs = build_observations(net, nodes, cov, spec, opts.fit.threads);
  return fit_logistic(DenseDesign(obs), opts.fit);
}

/// Chooses the minimum-BIC converged model; ties go to the earlier entry.
inline std::size_t choose_preferred(const std::vector<ModelEntry> &models) {
  std::optional<std::size_t> best;
  for (std::size_t m = 0; m < models.size(); ++m)
    if (models[m].usable() && (!best || models[m].fit->bic < models[*best].fit->bic)) best = m;
  if (!best) fail(ErrorKind::Fit, "no model in the sequence produced a converged fit");
  return *best;
}

inline SelectionReport run_sequence(const std::vector<ModelSpec> &specs, const TemporalNetwork &net,
                                    const NodeTable &nodes, const TimeCovariates &cov,
                                    const SelectionOptions &opts = {}) {
  if (specs.size() < 2) fail(ErrorKind::Spec, "model selection needs at least two specifications");
  SelectionReport report;
  report.n_obs = (net.panels() - 1) * net.nodes() * (net.nodes() - 1);
  for (const auto &spec : specs) {
    ModelEntry entry{spec, std::nullopt, {}};
    try {
      entry.fit = fit_model(spec, net, nodes, cov, opts);
      if (!entry.fit->converged) entry.failure = fit_status_name(entry.fit->status);
    } catch (const Error &e) {
      entry.failure = e.what();
    }
    report.models.push_back(std::move(entry));
  }
  report.preferred = choose_preferred(report.models);
  return report;
}

}  // namespace dlnr

#endif  // DLNR_MODEL_SELECT_HPP
