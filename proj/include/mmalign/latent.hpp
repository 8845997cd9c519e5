#pragma once

// Alignment primitives for continuous and latent-space data: dynamic time
// warping, classical canonical correlation analysis, and the strategy
// advisor that maps a data description to candidate alignment techniques.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mmalign::latent {

/// Rows are time steps; columns are feature dimensions.
class FeatureSequence {
 public:
  explicit FeatureSequence(Eigen::MatrixXd values);
  /// Scalar sequence (d = 1).
  static FeatureSequence scalar(const std::vector<double>& values);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Eigen::Index length() const noexcept { return values_.rows(); }
  Eigen::Index dimension() const noexcept { return values_.cols(); }

 private:
  Eigen::MatrixXd values_;
};

using PointwiseCost =
    std::function<double(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b)>;

/// Euclidean distance; absolute difference for scalars.
double euclidean_cost(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b);
double squared_euclidean_cost(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b);

struct WarpPath {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total_cost = 0.0;
};

/// Minimum-cost monotone path with steps (1,0), (0,1), (1,1), no window.
/// On equal accumulated cost the backtrack prefers the diagonal, then the
/// step advancing `a`. Throws DimensionMismatch.
WarpPath dtw_align(const FeatureSequence& a, const FeatureSequence& b,
                   const PointwiseCost& cost = euclidean_cost);

struct CcaResult {
  Eigen::MatrixXd x_projection;  // d_x x k
  Eigen::MatrixXd y_projection;  // d_y x k
  Eigen::VectorXd correlations;  // k values, non-increasing, in [0, 1]
};

inline constexpr double kDefaultCcaRidge = 1e-8;

/// Classical CCA: whiten both (ridge-regularized) covariance blocks, then
/// take the SVD of the whitened cross-covariance. The ridge added to each
/// block is `ridge * trace(block) / dim`. With ridge == 0 a singular block
/// throws RankDeficient. Throws DimensionMismatch on row count mismatch,
/// InvalidParameters for n < 3 or k outside [1, min(d_x, d_y)].
CcaResult cca_align(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Eigen::Index k,
                    double ridge = kDefaultCcaRidge);

enum class DataKind { Continuous, Discrete };
enum class Representation { Semantic, NonSemantic };
enum class Integration { Explicit, Implicit };

struct StrategyQuery {
  DataKind data_kind = DataKind::Continuous;
  std::optional<Representation> representation;
  std::optional<Integration> integration;
};

struct Strategy {
  std::string name;
  std::string basis;  // the branch of the decision tree that selects it

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// Techniques suited to the described data. Continuous data takes no further
/// qualifiers; discrete data needs both. Throws IncompleteQuery when a
/// discrete query lacks a qualifier and InvalidQuery when a continuous query
/// carries one.
std::vector<Strategy> advise(const StrategyQuery& query);

std::optional<DataKind> parse_data_kind(const std::string& s);
std::optional<Representation> parse_representation(const std::string& s);
std::optional<Integration> parse_integration(const std::string& s);

}  // namespace mmalign::latent
