#ifndef DLNR_GLM_FIT_HPP
#define DLNR_GLM_FIT_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "common.hpp"

namespace dlnr {

struct FitOptions {
  double tol = 1e-8;                  // relative deviance change
  int max_iter = 100;
  double separation_bound = 50.0;     // max |x_c theta_c| beyond this is reported as separation
  bool ridge_on_separation = false;   // add 1e-8 to the information diagonal when separation is found
  unsigned threads = 0;
};

enum class FitStatus { Converged, MaxIterations, Separation };

inline const char *fit_status_name(FitStatus s) {
  switch (s) {
    case FitStatus::Converged: return "converged";
    case FitStatus::MaxIterations: return "max_iterations";
    case FitStatus::Separation: return "separation";
  }
  return "?";
}

struct FitResult {
  std::vector<std::string> labels;
  Eigen::VectorXd theta;
  Eigen::VectorXd se;
  Eigen::VectorXd z;
  Eigen::VectorXd p_value;
  double loglik = 0;
  double deviance = 0;
  double bic = 0;
  std::size_t n_obs = 0;
  int iterations = 0;
  bool converged = false;
  bool ridge = false;
  FitStatus status = FitStatus::MaxIterations;

  std::size_t k() const { return static_cast<std::size_t>(theta.size()); }
  bool significant(std::size_t c) const { return p_value(static_cast<Eigen::Index>(c)) < 0.05; }
};

/// Schwarz criterion: deviance + k ln(n_obs).
inline double bic(double deviance, std::size_t k, double n_obs) {
  return deviance + static_cast<double>(k) * std::log(n_obs);
}
inline double bic(const FitResult &fit, std::size_t n_obs) { return bic(fit.deviance, fit.k(), static_cast<double>(n_obs)); }

/// Two-sided normal p-value.
inline double two_sided_p(double z) { return std::erfc(std::abs(z) / std::numbers::sqrt2); }

/// Log-likelihood, score X'(y - p) and information X'WX at theta.
struct LikelihoodPass {
  double loglik = 0;
  Eigen::VectorXd score;
  Eigen::MatrixXd information;
  double y_sum = 0;
  std::size_t n = 0;
};

template <class Design>
LikelihoodPass likelihood_pass(const Design &design, const Eigen::VectorXd &theta, unsigned threads = 0,
                               bool with_information = true) {
  const auto p = static_cast<Eigen::Index>(design.n_cols());
  const std::size_t B = design.n_blocks();
  std::vector<LikelihoodPass> part(B);
  parallel_for(B, threads, [&](std::size_t b) {
    design.visit(b, [&](const auto &X, const auto &y) {
      LikelihoodPass &out = part[b];
      Eigen::VectorXd eta = X * theta;
      Eigen::VectorXd resid(eta.size()), w(eta.size());
      double ll = 0;
      for (Eigen::Index r = 0; r < eta.size(); ++r) {
        double pr = logistic(eta(r));
        resid(r) = y(r) - pr;
        w(r) = pr * (1.0 - pr);
        ll += y(r) * eta(r) - softplus(eta(r));
      }
      out.loglik = ll;
      out.score = X.transpose() * resid;
      if (with_information) out.information = X.transpose() * (X.array().colwise() * w.array()).matrix();
      out.y_sum = y.sum();
      out.n = static_cast<std::size_t>(y.size());
    });
  });
  LikelihoodPass total;
  total.score = Eigen::VectorXd::Zero(p);
  if (with_information) total.information = Eigen::MatrixXd::Zero(p, p);
  for (const auto &b : part) {
    total.loglik += b.loglik;
    total.score += b.score;
    if (with_information) total.information += b.information;
    total.y_sum += b.y_sum;
    total.n += b.n;
  }
  return total;
}

template <class Design>
double log_likelihood(const Design &design, const Eigen::VectorXd &theta, unsigned threads = 0) {
  return likelihood_pass(design, theta, threads, false).loglik;
}

/// Names the columns that make X'X singular; empty when X has full column rank.
template <class Design>
std::vector<std::string> collinear_columns(const Design &design, unsigned threads = 0) {
  const auto p = static_cast<Eigen::Index>(design.n_cols());
  const std::size_t B = design.n_blocks();
  std::vector<Eigen::MatrixXd> part(B);
  parallel_for(B, threads, [&](std::size_t b) {
    design.visit(b, [&](const auto &X, const auto &) { part[b] = X.transpose() * X; });
  });
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(p, p);
  for (const auto &m : part) xtx += m;

  std::vector<std::string> bad;
  Eigen::VectorXd scale(p);
  for (Eigen::Index c = 0; c < p; ++c) {
    if (xtx(c, c) <= 0) bad.push_back(design.labels()[static_cast<std::size_t>(c)]);
    scale(c) = xtx(c, c) > 0 ? 1.0 / std::sqrt(xtx(c, c)) : 0.0;
  }
  if (!bad.empty()) return bad;
  Eigen::MatrixXd corr = scale.asDiagonal() * xtx * scale.asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(corr);
  qr.setThreshold(1e-10);
  if (qr.rank() == p) return bad;
  for (Eigen::Index k = qr.rank(); k < p; ++k)
    bad.push_back(design.labels()[static_cast<std::size_t>(qr.colsPermutation().indices()(k))]);
  return bad;
}

/// Largest |x| per column.
template <class Design>
Eigen::VectorXd column_max_abs(const Design &design, unsigned threads = 0) {
  const std::size_t B = design.n_blocks();
  std::vector<Eigen::VectorXd> part(B);
  parallel_for(B, threads, [&](std::size_t b) {
    design.visit(b, [&](const auto &X, const auto &) { part[b] = X.cwiseAbs().colwise().maxCoeff().transpose(); });
  });
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(design.n_cols()));
  for (const auto &m : part)
    if (m.size()) out = out.cwiseMax(m);
  return out;
}

/// Maximum-likelihood logistic regression by IRLS (Newton) with step halving.
///
/// Throws ErrorKind::Fit for a degenerate response or a rank-deficient
/// design. Non-convergence and separation return the best iterate with
/// converged = false and the cause in `status`.
template <class Design>
FitResult fit_logistic(const Design &design, const FitOptions &opts = {}) {
  const auto p = static_cast<Eigen::Index>(design.n_cols());
  if (design.n_rows() == 0) fail(ErrorKind::Fit, "no observations");
  if (p == 0) fail(ErrorKind::Fit, "model has no terms");

  auto bad = collinear_columns(design, opts.threads);
  if (!bad.empty()) {
    std::string names;
    for (const auto &b : bad) names += (names.empty() ? "" : ", ") + b;
    fail(ErrorKind::Fit, "rank-deficient design; collinear columns: " + names);
  }

  // separation is judged on each term's largest contribution to eta, which
  // is |theta| itself for indicator columns
  const Eigen::VectorXd reach = column_max_abs(design, opts.threads);
  auto spread = [&](const Eigen::VectorXd &v) { return v.cwiseAbs().cwiseProduct(reach).maxCoeff(); };

  FitResult fit;
  fit.labels = design.labels();
  fit.n_obs = design.n_rows();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  LikelihoodPass cur = likelihood_pass(design, theta, opts.threads);
  if (cur.y_sum <= 0 || cur.y_sum >= static_cast<double>(cur.n))
    fail(ErrorKind::Fit, "response must contain both 0 and 1 values");

  double ridge = 0.0;
  auto solve = [&](const LikelihoodPass &at) -> Eigen::VectorXd {
    Eigen::MatrixXd H = at.information;
    H.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    return ldlt.solve(at.score);
  };

  fit.status = FitStatus::MaxIterations;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    Eigen::VectorXd step = solve(cur);
    double dev_old = -2.0 * cur.loglik;
    double factor = 1.0;
    Eigen::VectorXd next = theta + step;
    LikelihoodPass trial = likelihood_pass(design, next, opts.threads);
    for (int halve = 0; halve < 30 && (!std::isfinite(trial.loglik) || -2.0 * trial.loglik > dev_old * (1 + 1e-12)); ++halve) {
      factor *= 0.5;
      next = theta + factor * step;
      trial = likelihood_pass(design, next, opts.threads);
    }
    theta = std::move(next);
    cur = std::move(trial);
    double dev_new = -2.0 * cur.loglik;
    if (spread(theta) > opts.separation_bound) {
      fit.status = FitStatus::Separation;
      ++it;
      break;
    }
    if (std::abs(dev_old - dev_new) / (std::abs(dev_new) + 0.1) < opts.tol) {
      Eigen::VectorXd last = solve(cur);
      // deviance near zero with theta still moving: keep going until the bound trips
      if (spread(last) > 1e-3 * std::max(1.0, spread(theta))) continue;
      Eigen::VectorXd polish = theta + last;
      LikelihoodPass after = likelihood_pass(design, polish, opts.threads);
      if (std::isfinite(after.loglik) && after.loglik >= cur.loglik - 1e-9 * std::abs(cur.loglik)) {
        theta = std::move(polish);
        cur = std::move(after);
      }
      fit.status = FitStatus::Converged;
      ++it;
      break;
    }
  }
  if (fit.status == FitStatus::Separation && opts.ridge_on_separation) {
    ridge = 1e-8;
    fit.ridge = true;
  }

  fit.iterations = it;
  fit.converged = fit.status == FitStatus::Converged;
  fit.theta = theta;
  fit.loglik = cur.loglik;
  fit.deviance = std::max(0.0, -2.0 * cur.loglik);
  fit.bic = bic(fit.deviance, static_cast<std::size_t>(p), static_cast<double>(fit.n_obs));

  Eigen::MatrixXd H = cur.information;
  H.diagonal().array() += ridge;
  Eigen::MatrixXd cov = H.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  fit.se.resize(p);
  fit.z.resize(p);
  fit.p_value.resize(p);
  for (Eigen::Index c = 0; c < p; ++c) {
    fit.se(c) = cov(c, c) > 0 ? std::sqrt(cov(c, c)) : std::numeric_limits<double>::quiet_NaN();
    fit.z(c) = theta(c) / fit.se(c);
    fit.p_value(c) = two_sided_p(fit.z(c));
  }
  return fit;
}

}  // namespace dlnr

#endif  // DLNR_GLM_FIT_HPP
