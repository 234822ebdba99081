#ifndef DLNR_REPORT_HPP
#define DLNR_REPORT_HPP

#include <iomanip>
#include <json.hpp>
#include <map>
#include <ostream>

#include "model_select.hpp"

namespace dlnr {

// Report numbers are rounded to 10 significant digits before they reach the
// JSON writer, which then prints the shortest round-trip form.
inline nlohmann::ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_sig10(v);
}

inline std::string star(const FitResult &fit, std::size_t c) { return fit.significant(c) ? "*" : ""; }

inline nlohmann::ordered_json fit_to_json(const FitResult &fit, const std::string &model_name) {
  nlohmann::ordered_json j;
  j["model"] = model_name;
  j["status"] = fit_status_name(fit.status);
  j["converged"] = fit.converged;
  j["ridge"] = fit.ridge;
  j["iterations"] = fit.iterations;
  j["n_obs"] = fit.n_obs;
  j["k"] = fit.k();
  j["loglik"] = json_number(fit.loglik);
  j["deviance"] = json_number(fit.deviance);
  j["bic"] = json_number(fit.bic);
  auto &terms = j["terms"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < fit.k(); ++c) {
    auto e = static_cast<Eigen::Index>(c);
    terms.push_back({{"term", fit.labels[c]},
                     {"estimate", json_number(fit.theta(e))},
                     {"se", json_number(fit.se(e))},
                     {"z", json_number(fit.z(e))},
                     {"p", json_number(fit.p_value(e))},
                     {"significant", fit.significant(c)}});
  }
  return j;
}

/// Aligned per-term table followed by the model-level statistics.
inline void write_fit_text(std::ostream &out, const FitResult &fit, const ModelSpec &spec) {
  std::size_t width = 4;
  for (const auto &d : spec.terms) width = std::max(width, table_label(d).size());
  out << spec.name << '\n';
  out << std::left << std::setw(static_cast<int>(width)) << "term" << std::right << std::setw(18) << "estimate"
      << std::setw(18) << "se" << std::setw(18) << "z" << "  sig\n";
  for (std::size_t c = 0; c < fit.k(); ++c) {
    auto e = static_cast<Eigen::Index>(c);
    out << std::left << std::setw(static_cast<int>(width)) << table_label(spec.terms[c]) << std::right
        << std::setw(18) << format_number(fit.theta(e)) << std::setw(18) << format_number(fit.se(e))
        << std::setw(18) << format_number(fit.z(e)) << "  " << star(fit, c) << '\n';
  }
  out << "loglik     " << format_number(fit.loglik) << '\n';
  out << "deviance   " << format_number(fit.deviance) << '\n';
  out << "BIC        " << format_number(fit.bic) << '\n';
  out << "n_obs      " << fit.n_obs << '\n';
  out << "iterations " << fit.iterations << '\n';
  out << "status     " << fit_status_name(fit.status) << (fit.ridge ? " (ridge)" : "") << '\n';
}

/// Comparison table: one column per model, BIC first, then the union of
/// terms in order of first appearance. Estimates carry `*` at p < 0.05.
inline void write_selection_text(std::ostream &out, const SelectionReport &report) {
  std::vector<std::string> rows;
  std::map<std::string, std::string> row_label;
  for (const auto &m : report.models)
    for (const auto &d : m.spec.terms)
      if (!row_label.count(d.label)) {
        rows.push_back(d.label);
        row_label[d.label] = table_label(d);
      }
  std::size_t width = 4;
  for (const auto &[k, v] : row_label) width = std::max(width, v.size());
  const int col = 16;

  out << std::left << std::setw(static_cast<int>(width)) << "" << std::right;
  for (const auto &m : report.models) out << std::setw(col) << m.spec.name;
  out << '\n';
  out << std::left << std::setw(static_cast<int>(width)) << "BIC" << std::right;
  for (const auto &m : report.models) out << std::setw(col) << (m.fit ? format_number(m.fit->bic) : "failed");
  out << '\n';
  for (const auto &label : rows) {
    out << std::left << std::setw(static_cast<int>(width)) << row_label[label] << std::right;
    for (const auto &m : report.models) {
      std::string cell;
      if (m.fit)
        for (std::size_t c = 0; c < m.fit->k(); ++c)
          if (m.fit->labels[c] == label) cell = format_number(m.fit->theta(static_cast<Eigen::Index>(c))) + star(*m.fit, c);
      out << std::setw(col) << cell;
    }
    out << '\n';
  }
  out << std::left << std::setw(static_cast<int>(width)) << "k" << std::right;
  for (const auto &m : report.models) out << std::setw(col) << m.spec.size();
  out << '\n';
  out << std::left << std::setw(static_cast<int>(width)) << "deviance" << std::right;
  for (const auto &m : report.models) out << std::setw(col) << (m.fit ? format_number(m.fit->deviance) : "");
  out << '\n';
  for (const auto &m : report.models)
    if (!m.usable()) out << "note: " << m.spec.name << " excluded: " << m.failure << '\n';
  out << "preferred: " << report.models[report.preferred].spec.name << " (n_obs " << report.n_obs << ")\n";
}

inline nlohmann::ordered_json selection_to_json(const SelectionReport &report) {
  nlohmann::ordered_json j;
  j["n_obs"] = report.n_obs;
  j["preferred"] = report.models[report.preferred].spec.name;
  auto &models = j["models"] = nlohmann::ordered_json::array();
  for (const auto &m : report.models) {
    nlohmann::ordered_json e;
    if (m.fit) {
      e = fit_to_json(*m.fit, m.spec.name);
    } else {
      e["model"] = m.spec.name;
      e["status"] = "failed";
      e["k"] = m.spec.size();
    }
    e["usable"] = m.usable();
    if (!m.failure.empty()) e["failure"] = m.failure;
    models.push_back(std::move(e));
  }
  return j;
}

}  // namespace dlnr

#endif  // DLNR_REPORT_HPP
