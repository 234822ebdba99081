#include <gtest/gtest.h>

#include <sstream>

#include "dlnr/design_matrix.hpp"
#include "dlnr/glm_fit.hpp"
#include "dlnr/simulate.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace dlnr;

namespace {

struct Data {
  NodeTable nodes;
  TimeCovariates cov;
  TemporalNetwork net;
};

Data make_data(std::size_t n, std::size_t T, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Data d{fixture::small_nodes(n), study_calendar(T), TemporalNetwork(n, T)};
  for (std::size_t t = 1; t <= T; ++t) d.net.panel(t) = oracle::to_panel(oracle::random_matrix(n, 0.25, rng));
  return d;
}

const std::vector<std::string> kMany = {"mix:DNC->DNC", "mix:RNC->RNC", "mix:DNC->RNC", "mix:RNC->DNC", "lag",
                                        "receiver",     "sender",       "cluster",      "group2path",   "cross2path",
                                        "recip:group",  "recip:between", "hour:06",     "harmonic:cos", "lag*hour:06"};

}  // namespace

TEST(ModelSpec, ValidationRules) {
  EXPECT_THROW(make_spec("dup", {"lag", "lag"}), Error);
  EXPECT_THROW(make_spec("collinear", {"intercept", "mix:DNC->DNC", "mix:RNC->RNC", "mix:DNC->RNC", "mix:RNC->DNC"}),
               Error);
  EXPECT_NO_THROW(make_spec("ok", {"intercept", "mix:DNC->DNC", "lag"}));
  EXPECT_THROW(make_spec("empty", {}), Error);
}

TEST(ModelSpec, LineOrientedFileWithComments) {
  std::istringstream in("# a comment\nlag   # inertia\n\n  receiver\nmix:DNC->RNC\n");
  ModelSpec spec = parse_model_spec(in, "m");
  EXPECT_EQ(spec.labels(), (std::vector<std::string>{"lag", "receiver", "mix:DNC->RNC"}));
  std::istringstream bad("lag\nnonsense\n");
  try {
    parse_model_spec(bad, "m");
    FAIL();
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("m:2"), std::string::npos);
  }
}

TEST(BuildObservations, TwoNodesLagOnly) {
  NodeTable nodes = fixture::small_nodes(2);
  TemporalNetwork net(2, 2);
  net.panel(1).set(1, 0);
  net.panel(2).set(0, 1);
  ObservationSet obs = build_observations(net, nodes, study_calendar(2), make_spec("lag", {"lag"}));
  ASSERT_EQ(obs.n_obs(), 2u);
  EXPECT_EQ(obs.X(0, 0), 0.0);  // (0,1) had no edge at t=1
  EXPECT_EQ(obs.X(1, 0), 1.0);  // (1,0) did
  EXPECT_EQ(obs.y(0), 1.0);
  EXPECT_EQ(obs.y(1), 0.0);
  EXPECT_EQ(obs.rows[0].t, 2u);
  EXPECT_EQ(obs.rows[1].i, 1u);
}

TEST(BuildObservations, FullStudyRowCount) {
  NodeTable nodes = study_node_table();
  TimeCovariates cov = study_calendar();
  TemporalNetwork net(47, 484);
  ObservationSet obs = build_observations(net, nodes, cov, make_spec("mix", {"mix:DNC->DNC", "mix:RNC->DNC"}));
  EXPECT_EQ(obs.n_obs(), 483u * 47u * 46u);
  EXPECT_EQ(obs.n_obs(), 1044246u);
}

TEST(BuildObservations, EmptySeriesKeepsAttributeColumns) {
  Data d{fixture::small_nodes(6), study_calendar(5), TemporalNetwork(6, 5)};
  ModelSpec spec = make_spec("m", kMany);
  ObservationSet obs = build_observations(d.net, d.nodes, d.cov, spec);
  for (std::size_t c = 0; c < spec.size(); ++c) {
    auto col = obs.X.col(static_cast<Eigen::Index>(c));
    if (spec.terms[c].kind == TermKind::Mix) {
      EXPECT_GT(col.sum(), 0.0) << spec.terms[c].label;
    } else if (spec.terms[c].structural()) {
      EXPECT_EQ(col.cwiseAbs().sum(), 0.0) << spec.terms[c].label;
    }
  }
  // The four blocks partition every row.
  Eigen::VectorXd blocks = obs.X.leftCols(4).rowwise().sum();
  EXPECT_TRUE((blocks.array() == 1.0).all());
}

TEST(BuildObservations, DeterministicAcrossThreadCounts) {
  Data d = make_data(9, 6, 17);
  ModelSpec spec = make_spec("m", kMany);
  ObservationSet a = build_observations(d.net, d.nodes, d.cov, spec, 1);
  ObservationSet b = build_observations(d.net, d.nodes, d.cov, spec, 4);
  EXPECT_EQ(a.column_labels, spec.labels());
  EXPECT_TRUE(a.X == b.X);
  EXPECT_TRUE(a.y == b.y);
}

TEST(BuildObservations, ResponseMeanIsDensityOverLaterPanels) {
  Data d = make_data(7, 5, 3);
  ObservationSet obs = build_observations(d.net, d.nodes, d.cov, make_spec("m", {"lag"}));
  double edges = 0;
  for (std::size_t t = 2; t <= 5; ++t) edges += static_cast<double>(d.net.panel(t).edge_count());
  EXPECT_DOUBLE_EQ(obs.y.mean(), edges / (4.0 * 7 * 6));
}

TEST(BuildObservations, MatchesPerDyadOperations) {
  Data d = make_data(8, 3, 99);
  ModelSpec spec = make_spec("m", {"receiver", "group2path", "cluster", "hour:06", "receiver*hour:06"});
  ObservationSet obs = build_observations(d.net, d.nodes, d.cov, spec);
  for (std::size_t r = 0; r < obs.n_obs(); ++r) {
    auto [t, i, j] = obs.rows[r];
    auto e = static_cast<Eigen::Index>(r);
    EXPECT_EQ(obs.X(e, 0), x_receiver(d.net, i, j, t));
    EXPECT_EQ(obs.X(e, 1), x_group_two_path(d.net, d.nodes, i, j, t));
    EXPECT_EQ(obs.X(e, 2), x_clique(d.net, d.nodes, i, j, t));
    EXPECT_EQ(obs.X(e, 3), x_hour(d.cov, t, HourClass::H06));
    EXPECT_EQ(obs.X(e, 4), obs.X(e, 0) * obs.X(e, 3));
  }
}

TEST(BuildObservations, InputErrors) {
  Data d = make_data(5, 4, 1);
  // a four-panel calendar has no Elec panels
  EXPECT_THROW(build_observations(d.net, d.nodes, d.cov, make_spec("m", {"epoch:Elec"})), Error);
  EXPECT_THROW(build_observations(d.net, d.nodes, study_calendar(3), make_spec("m", {"lag"})), Error);
  TemporalNetwork one(5, 1);
  EXPECT_THROW(build_observations(one, d.nodes, d.cov, make_spec("m", {"lag"})), Error);
}

TEST(DesignSources, StreamingBlocksEqualDenseBlocks) {
  Data d = make_data(7, 5, 5);
  ModelSpec spec = make_spec("m", kMany);
  ObservationSet obs = build_observations(d.net, d.nodes, d.cov, spec);
  DenseDesign dense(obs);
  StreamingDesign stream(d.net, d.nodes, d.cov, spec);
  ASSERT_EQ(dense.n_blocks(), stream.n_blocks());
  ASSERT_EQ(dense.n_rows(), stream.n_rows());
  for (std::size_t b = 0; b < dense.n_blocks(); ++b) {
    Eigen::MatrixXd Xd, Xs;
    Eigen::VectorXd yd, ys;
    dense.visit(b, [&](const auto &X, const auto &y) {
      Xd = X;
      yd = y;
    });
    stream.visit(b, [&](const auto &X, const auto &y) {
      Xs = X;
      ys = y;
    });
    EXPECT_TRUE(Xd == Xs);
    EXPECT_TRUE(yd == ys);
  }
}

TEST(ObservationsCsv, HeaderAndRows) {
  Data d = make_data(3, 2, 2);
  ObservationSet obs = build_observations(d.net, d.nodes, d.cov, make_spec("m", {"lag", "hour:06"}));
  std::ostringstream out;
  write_observations_csv(out, obs, d.nodes);
  std::istringstream in(out.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "t,i,j,y,lag,hour:06");
  EXPECT_EQ(first.substr(0, 8), "2,v0,v1,");
  std::size_t lines = 1;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, obs.n_obs());
}
