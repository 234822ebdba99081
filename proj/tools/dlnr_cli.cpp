// dlnr: command-line front end for dynamic lagged-logistic network regression.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dlnr/dlnr.hpp"

namespace fs = std::filesystem;
using namespace dlnr;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kSpec = 3, kFit = 4, kSimulation = 5, kInternal = 70 };

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Input: return kInput;
    case ErrorKind::Spec: return kSpec;
    case ErrorKind::Fit: return kFit;
    case ErrorKind::Simulation: return kSimulation;
  }
  return kInternal;
}

const char *kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Input: return "input";
    case ErrorKind::Spec: return "spec";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::Simulation: return "simulation";
  }
  return "internal";
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

struct Config {
  std::string edges, nodes, times, out = ".", theta;
  std::vector<std::string> specs;
  bool builtin_sequence = false;
  bool study_nodes = false;
  bool study_calendar = false;
  bool streaming = false;
  bool triangles = false;
  bool census = false;
  std::string export_observations;
  std::size_t reps = 100;
  std::size_t panels = 0;
  std::optional<std::uint64_t> seed;
  double tol = 1e-8;
  int max_iter = 100;
  unsigned threads = 0;
};

struct Data {
  NodeTable nodes;
  TimeCovariates cov;
  TemporalNetwork net;
};

NodeTable load_nodes(const Config &c) {
  if (c.study_nodes) return study_node_table();
  if (c.nodes.empty()) fail(ErrorKind::Input, "--nodes is required");
  return read_node_csv(c.nodes);
}

TimeCovariates load_times(const Config &c) {
  if (c.study_calendar) return study_calendar(c.panels ? c.panels : 484);
  if (c.times.empty()) fail(ErrorKind::Input, "--times is required");
  return read_time_csv(c.times);
}

Data load_data(const Config &c) {
  Data d;
  d.nodes = load_nodes(c);
  d.cov = load_times(c);
  if (c.edges.empty()) fail(ErrorKind::Input, "--edges is required");
  auto records = read_edge_csv(c.edges);
  std::vector<std::string> warnings;
  d.net = load_temporal_network(records, d.nodes, d.cov.panels(), &warnings);
  for (const auto &w : warnings) std::cerr << "dlnr: warning: " << w << '\n';
  return d;
}

FitOptions fit_options(const Config &c) {
  FitOptions o;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.threads = c.threads;
  return o;
}

fs::path out_path(const Config &c, const std::string &file) {
  fs::create_directories(c.out);
  return fs::path(c.out) / file;
}

std::ofstream open_out(const fs::path &p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) fail(ErrorKind::Input, "cannot write file: " + p.string());
  return f;
}

ModelSpec single_spec(const Config &c) {
  if (c.specs.size() != 1) fail(ErrorKind::Input, "exactly one --spec is required");
  return read_model_spec(c.specs.front());
}

/// Coefficients from `term,value` CSV or a fit.json report, ordered as `spec`.
Eigen::VectorXd read_theta(const std::string &path, const ModelSpec &spec) {
  std::map<std::string, double> by_label;
  if (fs::path(path).extension() == ".json") {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Input, "cannot open file: " + path);
    nlohmann::json j;
    try {
      in >> j;
      for (const auto &t : j.at("terms")) by_label[t.at("term").get<std::string>()] = t.at("estimate").get<double>();
    } catch (const nlohmann::json::exception &e) {
      fail(ErrorKind::Input, path + ": " + e.what());
    }
  } else {
    auto table = read_csv_file(path, {"term", "value"});
    std::size_t ct = table.column("term"), cv = table.column("value");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      std::string where = path + ":" + std::to_string(table.line_numbers[r]);
      by_label[parse_term(table.rows[r][ct]).label] = parse_real(table.rows[r][cv], where);
    }
  }
  Eigen::VectorXd theta(static_cast<Eigen::Index>(spec.size()));
  for (std::size_t k = 0; k < spec.size(); ++k) {
    auto it = by_label.find(spec.terms[k].label);
    if (it == by_label.end()) fail(ErrorKind::Input, path + ": no coefficient for term " + spec.terms[k].label);
    theta(static_cast<Eigen::Index>(k)) = it->second;
  }
  return theta;
}

int cmd_fit(const Config &c) {
  Data d = load_data(c);
  ModelSpec spec = single_spec(c);
  SelectionOptions opts{fit_options(c), c.streaming};
  if (!c.export_observations.empty()) {
    ObservationSet obs = build_observations(d.net, d.nodes, d.cov, spec, c.threads);
    auto f = open_out(c.export_observations);
    write_observations_csv(f, obs, d.nodes);
  }
  FitResult fit = fit_model(spec, d.net, d.nodes, d.cov, opts);
  {
    auto f = open_out(out_path(c, "fit.json"));
    f << fit_to_json(fit, spec.name).dump(2) << '\n';
  }
  {
    auto f = open_out(out_path(c, "fit.txt"));
    write_fit_text(f, fit, spec);
  }
  write_fit_text(std::cout, fit, spec);
  return fit.converged ? kOk : kFit;
}

int cmd_select(const Config &c) {
  Data d = load_data(c);
  std::vector<ModelSpec> specs;
  if (c.builtin_sequence) specs = builtin_sequence();
  for (const auto &s : c.specs) specs.push_back(read_model_spec(s));
  SelectionReport report = run_sequence(specs, d.net, d.nodes, d.cov, {fit_options(c), c.streaming});
  {
    auto f = open_out(out_path(c, "select.txt"));
    write_selection_text(f, report);
  }
  {
    auto f = open_out(out_path(c, "select.json"));
    f << selection_to_json(report).dump(2) << '\n';
  }
  write_selection_text(std::cout, report);
  return kOk;
}

int cmd_simulate(const Config &c) {
  if (!c.seed) fail(ErrorKind::Simulation, "--seed is required for simulate");
  Data d = load_data(c);
  ModelSpec spec = single_spec(c);
  Eigen::VectorXd theta;
  if (!c.theta.empty()) {
    theta = read_theta(c.theta, spec);
  } else {
    FitResult fit = fit_model(spec, d.net, d.nodes, d.cov, {fit_options(c), c.streaming});
    if (!fit.converged) fail(ErrorKind::Fit, std::string("fit did not converge: ") + fit_status_name(fit.status));
    theta = fit.theta;
  }
  AdequacyOptions opts;
  opts.reps = c.reps;
  opts.seed = c.seed;
  opts.threads = c.threads;
  opts.undirected_triangles = c.triangles;
  ForecastBand band = adequacy_report(theta, spec, d.net, d.nodes, d.cov, opts);
  auto f = open_out(out_path(c, "adequacy.csv"));
  write_adequacy_csv(f, band);
  for (const auto &g : band.gli_names)
    std::cout << g << " coverage " << format_number(band.coverage(g)) << '\n';
  return kOk;
}

int cmd_gli(const Config &c) {
  NodeTable nodes = load_nodes(c);
  std::size_t T = c.panels;
  if (!T) T = load_times(c).panels();
  if (c.edges.empty()) fail(ErrorKind::Input, "--edges is required");
  std::vector<std::string> warnings;
  TemporalNetwork net = load_temporal_network(read_edge_csv(c.edges), nodes, T, &warnings);
  for (const auto &w : warnings) std::cerr << "dlnr: warning: " << w << '\n';

  auto f = open_out(out_path(c, "gli.csv"));
  f << "t";
  for (const char *g : kGliNames) f << ',' << g;
  if (c.triangles) f << ",triangles";
  if (c.census)
    for (const char *name : kTriadNames) f << ",census_" << name;
  f << '\n';
  for (std::size_t t = 1; t <= net.panels(); ++t) {
    const Panel &p = net.panel(t);
    f << t;
    for (double v : compute_glis(p)) f << ',' << format_number(v);
    if (c.triangles) f << ',' << gli_undirected_triangles(p);
    if (c.census)
      for (auto v : triad_census(p)) f << ',' << v;
    f << '\n';
  }
  return kOk;
}

int cmd_synth(const Config &c) {
  if (!c.seed) fail(ErrorKind::Simulation, "--seed is required for synth");
  NodeTable nodes = load_nodes(c);
  TimeCovariates cov = load_times(c);
  std::size_t T = c.panels ? c.panels : cov.panels();
  ModelSpec spec = single_spec(c);
  if (c.theta.empty()) fail(ErrorKind::Input, "--theta is required for synth");
  Eigen::VectorXd theta = read_theta(c.theta, spec);
  Panel initial(nodes.size());
  if (!c.edges.empty()) {
    std::vector<EdgeRecord> first;
    for (auto &r : read_edge_csv(c.edges))
      if (r.t == 1) first.push_back(std::move(r));
    initial = load_temporal_network(first, nodes, 1).panel(1);
  }
  TemporalNetwork net = synth_generate(theta, spec, nodes, cov, T, initial, c.seed);
  {
    auto f = open_out(out_path(c, "edges.csv"));
    write_edge_csv(f, net, nodes);
  }
  {
    auto f = open_out(out_path(c, "nodes.csv"));
    write_node_csv(f, nodes);
  }
  {
    auto f = open_out(out_path(c, "times.csv"));
    std::vector<PanelTime> rows;
    for (std::size_t t = 1; t <= T; ++t) rows.push_back(cov.at(t));
    write_time_csv(f, TimeCovariates(std::move(rows)));
  }
  return kOk;
}

void add_data_options(CLI::App *sub, Config &c) {
  sub->add_option("--edges", c.edges, "edge CSV (t,src,dst)");
  sub->add_option("--nodes", c.nodes, "node CSV (id,groups)");
  sub->add_option("--times", c.times, "time CSV (t,hour,epoch)");
  sub->add_flag("--study-nodes", c.study_nodes, "use the built-in 47-node table instead of --nodes");
  sub->add_flag("--study-calendar", c.study_calendar, "use the built-in 484-panel calendar instead of --times");
  sub->add_option("--panels", c.panels, "panel count (defaults to the time covariates)");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--threads", c.threads, "worker threads (0 = all cores)");
}

void add_fit_options(CLI::App *sub, Config &c) {
  sub->add_option("--tol", c.tol, "relative deviance tolerance")->capture_default_str();
  sub->add_option("--max-iter", c.max_iter, "maximum IRLS iterations")->capture_default_str();
  sub->add_flag("--streaming", c.streaming, "rebuild rows per pass instead of holding the design matrix");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Dynamic lagged-logistic network regression"};
  app.require_subcommand(1);
  Config c;

  auto *fit = app.add_subcommand("fit", "fit one model specification");
  add_data_options(fit, c);
  add_fit_options(fit, c);
  fit->add_option("--spec", c.specs, "model-spec file")->required();
  fit->add_option("--export-observations", c.export_observations, "write the observation set CSV here");

  auto *select = app.add_subcommand("select", "fit a model sequence and compare by BIC");
  add_data_options(select, c);
  add_fit_options(select, c);
  select->add_option("--spec", c.specs, "model-spec file (repeatable, in order)");
  select->add_flag("--builtin-sequence", c.builtin_sequence, "use the five built-in nested models");

  auto *simulate = app.add_subcommand("simulate", "one-step forecast adequacy bands");
  add_data_options(simulate, c);
  add_fit_options(simulate, c);
  simulate->add_option("--spec", c.specs, "model-spec file")->required();
  simulate->add_option("--theta", c.theta, "coefficients (term,value CSV or fit.json); fitted when omitted");
  simulate->add_option("--reps", c.reps, "replicates per panel")->capture_default_str();
  simulate->add_option("--seed", c.seed, "random seed");
  simulate->add_flag("--triangles", c.triangles, "add the undirected triangle count");

  auto *gli = app.add_subcommand("gli", "graph-level indices per panel");
  add_data_options(gli, c);
  gli->add_flag("--triangles", c.triangles, "add the undirected triangle count");
  gli->add_flag("--census", c.census, "add the full 16-class triad census");

  auto *synth = app.add_subcommand("synth", "generate a synthetic panel series");
  add_data_options(synth, c);
  synth->add_option("--spec", c.specs, "model-spec file")->required();
  synth->add_option("--theta", c.theta, "coefficients (term,value CSV or fit.json)");
  synth->add_option("--seed", c.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*fit) return cmd_fit(c);
    if (*select) {
      if (!c.builtin_sequence && c.specs.size() < 2)
        fail(ErrorKind::Input, "select needs --builtin-sequence or at least two --spec files");
      return cmd_select(c);
    }
    if (*simulate) return cmd_simulate(c);
    if (*gli) return cmd_gli(c);
    if (*synth) return cmd_synth(c);
  } catch (const Error &e) {
    std::cerr << "dlnr: error[" << kind_name(e.kind()) << "]: " << one_line(e.what()) << '\n';
    return exit_code(e.kind());
  } catch (const std::exception &e) {
    std::cerr << "dlnr: error[internal]: " << one_line(e.what()) << '\n';
    return kInternal;
  }
  return kUsage;
}
