// Shared synthetic-data fixtures for the tests.
#ifndef DLNR_TESTS_FIXTURES_HPP
#define DLNR_TESTS_FIXTURES_HPP

#include <map>

#include "dlnr/dlnr.hpp"

namespace fixture {

/// Model-4 coefficients of the magnitude seen in fits of the blog data:
/// strongly negative mixing blocks, lag near 3, balance terms near +-0.5.
inline const std::map<std::string, double> &model4_truth() {
  static const std::map<std::string, double> truth = {
      {"mix:DNC->DNC", -3.0}, {"mix:RNC->RNC", -2.6}, {"mix:DNC->RNC", -3.6}, {"mix:RNC->DNC", -3.3},
      {"harmonic:cos", 0.1},  {"harmonic:sin", 0.15}, {"hour:06", -0.2},      {"hour:12", -0.3},
      {"hour:18", -0.4},      {"lag", 3.0},           {"receiver", 0.06},     {"sender", -0.05},
      {"group2path", 0.5},    {"cross2path", -0.5},   {"recip:group", -0.5},  {"recip:between", 0.5}};
  return truth;
}

inline Eigen::VectorXd theta_for(const dlnr::ModelSpec &spec, const std::map<std::string, double> &values) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.size()));
  for (std::size_t k = 0; k < spec.size(); ++k) {
    auto it = values.find(spec.terms[k].label);
    if (it != values.end()) theta(static_cast<Eigen::Index>(k)) = it->second;
  }
  return theta;
}

/// Random membership table of n nodes with one dual member.
inline dlnr::NodeTable small_nodes(std::size_t n) {
  dlnr::NodeTable nodes;
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<dlnr::Group> g;
    if (v + 1 == n) g = {dlnr::Group::DNC, dlnr::Group::RNC};
    else if (v % 3 == 2) g = {dlnr::Group::RNC};
    else g = {dlnr::Group::DNC};
    nodes.add("v" + std::to_string(v), dlnr::Membership(g));
  }
  return nodes;
}

}  // namespace fixture

#endif  // DLNR_TESTS_FIXTURES_HPP
