#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "treespace/errors.hpp"

namespace treespace {

// Weighted covariance of the rows of X about their weighted mean. Weights
// need not be normalised.
inline Eigen::MatrixXd weighted_covariance(const Eigen::MatrixXd& X, const std::vector<double>& w) {
  if (static_cast<std::size_t>(X.rows()) != w.size()) throw InvalidArgument("one weight per row is required");
  double total = 0.0;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    total += w[static_cast<std::size_t>(i)];
    mean += w[static_cast<std::size_t>(i)] * X.row(i).transpose();
  }
  if (!(total > 0.0)) throw InvalidArgument("total weight must be positive");
  mean /= total;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(X.cols(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::VectorXd d = X.row(i).transpose() - mean;
    C += w[static_cast<std::size_t>(i)] * d * d.transpose();
  }
  return C / total;
}

// Unbiased covariance of the rows of X.
inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& X) {
  if (X.rows() < 2) return Eigen::MatrixXd::Zero(X.cols(), X.cols());
  Eigen::RowVectorXd mean = X.colwise().mean();
  Eigen::MatrixXd D = X.rowwise() - mean;
  return D.transpose() * D / static_cast<double>(X.rows() - 1);
}

// ||A - B||_F / ||B||_F; zero when both vanish.
inline double frobenius_relative_error(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const double num = (A - B).norm();
  const double den = B.norm();
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Asymptotic Kolmogorov tail probability P(K > lambda).
inline double kolmogorov_tail(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

// Two-sample Kolmogorov-Smirnov test. Ties (atoms) are handled by comparing
// the empirical distribution functions after each distinct value.
inline KsResult ks_two_sample(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw InvalidArgument("both samples must be non-empty");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() || j < y.size()) {
    double v;
    if (j == y.size() || (i < x.size() && x[i] <= y[j])) {
      v = x[i];
    } else {
      v = y[j];
    }
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const double ne = nx * ny / (nx + ny);
  const double sq = std::sqrt(ne);
  return {d, kolmogorov_tail((sq + 0.12 + 0.11 / sq) * d)};
}

// Rows drawn from N(0, cov). The covariance only needs to be positive
// semidefinite.
inline Eigen::MatrixXd gaussian_draws(const Eigen::MatrixXd& cov, std::size_t count, std::mt19937_64& rng) {
  const auto d = cov.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
  Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd L = es.eigenvectors() * root.asDiagonal();
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), d);
  Eigen::VectorXd z(d);
  for (std::size_t r = 0; r < count; ++r) {
    for (Eigen::Index k = 0; k < d; ++k) z[k] = N(rng);
    out.row(static_cast<Eigen::Index>(r)) = (L * z).transpose();
  }
  return out;
}

}  // namespace treespace
