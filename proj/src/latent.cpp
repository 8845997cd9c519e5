#include "mmalign/latent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmalign/error.hpp"

namespace mmalign::latent {

FeatureSequence::FeatureSequence(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.cols() == 0) {
    throw Error(ErrorCode::InvalidParameters, "feature sequence must be non-empty");
  }
}

FeatureSequence FeatureSequence::scalar(const std::vector<double>& values) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = values[i];
  return FeatureSequence(std::move(m));
}

double euclidean_cost(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  return (a - b).norm();
}

double squared_euclidean_cost(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  return (a - b).squaredNorm();
}

WarpPath dtw_align(const FeatureSequence& a, const FeatureSequence& b, const PointwiseCost& cost) {
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "sequences have dimensions " +
                                                  std::to_string(a.dimension()) + " and " +
                                                  std::to_string(b.dimension()));
  }
  const auto n = static_cast<std::size_t>(a.length());
  const auto m = static_cast<std::size_t>(b.length());
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<double> acc(n * m, inf);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * m + j]; };
  const Eigen::MatrixXd& av = a.values();
  const Eigen::MatrixXd& bv = b.values();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::RowVectorXd ai = av.row(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < m; ++j) {
      const double c = cost(ai, bv.row(static_cast<Eigen::Index>(j)));
      double best = (i == 0 && j == 0) ? 0.0 : inf;
      if (i > 0 && j > 0) best = std::min(best, at(i - 1, j - 1));
      if (i > 0) best = std::min(best, at(i - 1, j));
      if (j > 0) best = std::min(best, at(i, j - 1));
      at(i, j) = c + best;
    }
  }

  WarpPath path;
  path.total_cost = at(n - 1, m - 1);
  std::size_t i = n - 1;
  std::size_t j = m - 1;
  path.pairs.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const double diag = at(i - 1, j - 1);
      const double up = at(i - 1, j);
      const double left = at(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    } else if (i > 0) {
      --i;
    } else {
      --j;
    }
    path.pairs.emplace_back(i, j);
  }
  std::reverse(path.pairs.begin(), path.pairs.end());
  return path;
}

namespace {

Eigen::MatrixXd centered(const Eigen::MatrixXd& m) {
  return m.rowwise() - m.colwise().mean();
}

// Inverse square root of a symmetric positive definite block.
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& cov, bool strict, const char* which) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::RankDeficient, std::string("eigen-decomposition of ") + which + " failed");
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double largest = lambda.maxCoeff();
  const double tol = strict ? largest * static_cast<double>(cov.rows()) *
                                  std::numeric_limits<double>::epsilon() * 16.0
                            : 0.0;
  if (!(largest > 0.0) || lambda.minCoeff() <= tol) {
    throw Error(ErrorCode::RankDeficient, std::string(which) + " covariance block is singular");
  }
  return eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

}  // namespace

CcaResult cca_align(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Eigen::Index k,
                    double ridge) {
  if (x.rows() != y.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "X and Y need the same number of rows");
  }
  if (x.rows() < 3) throw Error(ErrorCode::InvalidParameters, "CCA needs at least 3 observations");
  if (k < 1 || k > std::min(x.cols(), y.cols())) {
    throw Error(ErrorCode::InvalidParameters, "k must be in [1, min(d_x, d_y)]");
  }
  if (!(ridge >= 0.0)) throw Error(ErrorCode::InvalidParameters, "ridge must be non-negative");

  const double denom = static_cast<double>(x.rows() - 1);
  const Eigen::MatrixXd xc = centered(x);
  const Eigen::MatrixXd yc = centered(y);
  Eigen::MatrixXd cxx = xc.transpose() * xc / denom;
  Eigen::MatrixXd cyy = yc.transpose() * yc / denom;
  const Eigen::MatrixXd cxy = xc.transpose() * yc / denom;
  if (ridge > 0.0) {
    cxx.diagonal().array() += ridge * cxx.trace() / static_cast<double>(cxx.rows());
    cyy.diagonal().array() += ridge * cyy.trace() / static_cast<double>(cyy.rows());
  }
  const bool strict = ridge == 0.0;
  const Eigen::MatrixXd wx = inverse_sqrt(cxx, strict, "X");
  const Eigen::MatrixXd wy = inverse_sqrt(cyy, strict, "Y");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(wx * cxy * wy, Eigen::ComputeThinU | Eigen::ComputeThinV);
  CcaResult r;
  r.x_projection = wx * svd.matrixU().leftCols(k);
  r.y_projection = wy * svd.matrixV().leftCols(k);
  r.correlations = svd.singularValues().head(k).cwiseMax(0.0).cwiseMin(1.0);
  return r;
}

namespace {

constexpr const char* kContinuous = "continuous data";
constexpr const char* kSemanticExplicit = "discrete elements, semantic representation, explicit alignment";
constexpr const char* kSemanticImplicit = "discrete elements, semantic representation, implicit alignment";
constexpr const char* kPlainExplicit = "discrete elements, non-semantic representation, explicit alignment";
constexpr const char* kPlainImplicit = "discrete elements, non-semantic representation, implicit alignment";

}  // namespace

std::vector<Strategy> advise(const StrategyQuery& query) {
  if (query.data_kind == DataKind::Continuous) {
    if (query.representation || query.integration) {
      throw Error(ErrorCode::InvalidQuery,
                  "continuous data takes no representation or integration qualifier");
    }
    return {{"adversarial training", kContinuous}, {"dynamic time warping", kContinuous}};
  }
  if (!query.representation || !query.integration) {
    throw Error(ErrorCode::IncompleteQuery,
                "discrete data needs both a representation and an integration mode");
  }
  const bool semantic = *query.representation == Representation::Semantic;
  const bool explicit_alignment = *query.integration == Integration::Explicit;
  if (semantic && explicit_alignment) {
    return {{"adversarial auto-encoders", kSemanticExplicit},
            {"deep CCA", kSemanticExplicit},
            {"optimal transport", kSemanticExplicit}};
  }
  if (semantic) return {{"cross-modal self-attention transformers", kSemanticImplicit}};
  if (explicit_alignment) return {{"supervised element labeling", kPlainExplicit}};
  return {{"late fusion", kPlainImplicit}, {"hidden Markov models", kPlainImplicit}};
}

std::optional<DataKind> parse_data_kind(const std::string& s) {
  if (s == "continuous") return DataKind::Continuous;
  if (s == "discrete") return DataKind::Discrete;
  return std::nullopt;
}

std::optional<Representation> parse_representation(const std::string& s) {
  if (s == "semantic") return Representation::Semantic;
  if (s == "non-semantic" || s == "nonsemantic") return Representation::NonSemantic;
  return std::nullopt;
}

std::optional<Integration> parse_integration(const std::string& s) {
  if (s == "explicit") return Integration::Explicit;
  if (s == "implicit") return Integration::Implicit;
  return std::nullopt;
}

}  // namespace mmalign::latent
