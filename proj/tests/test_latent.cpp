#include "doctest.h"

#include <random>

#include "mmalign/error.hpp"
#include "mmalign/latent.hpp"
#include "oracles.hpp"

using namespace mmalign;
using namespace mmalign::latent;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidConfig;
}

std::vector<std::string> names(const std::vector<Strategy>& s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.name);
  return out;
}

// n x d with one latent factor shared by X and Y plus independent noise.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> one_factor(std::mt19937_64& rng, Eigen::Index n, Eigen::Index dx,
                                                       Eigen::Index dy, double noise) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(n, dx), y(n, dy);
  Eigen::VectorXd wx(dx), wy(dy);
  for (auto i = 0; i < dx; ++i) wx(i) = g(rng);
  for (auto i = 0; i < dy; ++i) wy(i) = g(rng);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double z = g(rng);
    for (auto i = 0; i < dx; ++i) x(r, i) = wx(i) * z + noise * g(rng) + 3.0;
    for (auto i = 0; i < dy; ++i) y(r, i) = wy(i) * z + noise * g(rng) - 1.0;
  }
  return {x, y};
}

}  // namespace

TEST_CASE("DTW examples") {
  auto a = FeatureSequence::scalar({0, 3});
  auto b = FeatureSequence::scalar({1, 2});
  auto p = dtw_align(a, b);
  CHECK(p.total_cost == doctest::Approx(2.0));
  CHECK(p.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});

  CHECK(dtw_align(FeatureSequence::scalar({1, 2, 3}), FeatureSequence::scalar({1, 2, 2, 3})).total_cost == 0.0);

  auto s = FeatureSequence::scalar({4, 1, 1, 7, 2});
  auto self = dtw_align(s, s);
  CHECK(self.total_cost == 0.0);
  for (std::size_t i = 0; i < self.pairs.size(); ++i) CHECK(self.pairs[i] == std::make_pair(i, i));

  CHECK(code_of([] {
          dtw_align(FeatureSequence(Eigen::MatrixXd::Zero(3, 2)), FeatureSequence(Eigen::MatrixXd::Zero(3, 1)));
        }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("DTW path shape and symmetry on random pairs") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> len(1, 12);
  std::normal_distribution<double> g(0, 1);
  for (int t = 0; t < 200; ++t) {
    Eigen::MatrixXd a(len(rng), 3), b(len(rng), 3);
    for (auto i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    for (auto i = 0; i < b.size(); ++i) b.data()[i] = g(rng);
    const auto p = dtw_align(FeatureSequence(a), FeatureSequence(b));
    REQUIRE(!p.pairs.empty());
    CHECK(p.pairs.front() == std::make_pair<std::size_t, std::size_t>(0, 0));
    CHECK(p.pairs.back() ==
          std::make_pair(static_cast<std::size_t>(a.rows() - 1), static_cast<std::size_t>(b.rows() - 1)));
    double sum = 0.0;
    for (std::size_t k = 0; k < p.pairs.size(); ++k) {
      const auto [i, j] = p.pairs[k];
      sum += euclidean_cost(a.row(static_cast<Eigen::Index>(i)), b.row(static_cast<Eigen::Index>(j)));
      if (k == 0) continue;
      const auto di = i - p.pairs[k - 1].first;
      const auto dj = j - p.pairs[k - 1].second;
      CHECK(di <= 1);
      CHECK(dj <= 1);
      CHECK(di + dj >= 1);
    }
    CHECK(sum == doctest::Approx(p.total_cost).epsilon(1e-12));
    const auto q = dtw_align(FeatureSequence(b), FeatureSequence(a));
    CHECK(q.total_cost == doctest::Approx(p.total_cost).epsilon(1e-12));
  }
}

TEST_CASE("DTW matches exhaustive enumeration") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> len(1, 7);
  std::uniform_int_distribution<int> small(0, 4);  // ties are common with small integers
  for (int t = 0; t < 100; ++t) {
    Eigen::MatrixXd a(len(rng), 1), b(len(rng), 1);
    for (auto i = 0; i < a.size(); ++i) a.data()[i] = small(rng);
    for (auto i = 0; i < b.size(); ++i) b.data()[i] = small(rng);
    CHECK(dtw_align(FeatureSequence(a), FeatureSequence(b), squared_euclidean_cost).total_cost ==
          oracle::dtw_exhaustive(a, b, squared_euclidean_cost));
  }
}

TEST_CASE("CCA examples") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0, 1);
  Eigen::MatrixXd x(200, 3);
  for (auto i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  auto self = cca_align(x, x, 3, 0.0);
  for (auto i = 0; i < 3; ++i) CHECK(std::abs(self.correlations(i) - 1.0) < 1e-9);

  // Y orthogonal to centered X.
  Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd z(200, 2);
  for (auto i = 0; i < z.size(); ++i) z.data()[i] = g(rng);
  Eigen::MatrixXd basis(200, 4);
  basis << Eigen::VectorXd::Ones(200), xc;
  const Eigen::MatrixXd q = basis.householderQr().householderQ() * Eigen::MatrixXd::Identity(200, 4);
  const Eigen::MatrixXd y = z - q * (q.transpose() * z);
  auto orth = cca_align(x, y, 2);
  CHECK(orth.correlations.maxCoeff() < 1e-9);

  // Projections have unit sample variance.
  auto [fx, fy] = one_factor(rng, 300, 4, 3, 0.7);
  auto r = cca_align(fx, fy, 3);
  const Eigen::MatrixXd px = (fx.rowwise() - fx.colwise().mean()) * r.x_projection;
  for (auto c = 0; c < 3; ++c) CHECK(px.col(c).squaredNorm() / 299.0 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("CCA first correlation matches the eigen oracle") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    auto [x, y] = one_factor(rng, 500, 5, 4, 0.5 + 0.1 * t);
    auto r = cca_align(x, y, 4);
    auto o = oracle::cca_correlations(x, y);
    CHECK(std::abs(r.correlations(0) - o[0]) < 1e-6);
    for (auto i = 1; i < 4; ++i) CHECK(r.correlations(i) <= r.correlations(i - 1));
    CHECK(r.correlations.minCoeff() >= 0.0);
    CHECK(r.correlations.maxCoeff() <= 1.0);
  }
}

TEST_CASE("CCA is invariant under affine transforms of X") {
  std::mt19937_64 rng(13);
  auto [x, y] = one_factor(rng, 400, 3, 3, 0.8);
  Eigen::Matrix3d a;
  a << 2, 1, 0, 0, 1, 0.5, 0.3, 0, 3;
  Eigen::MatrixXd xt = (x * a).rowwise() + Eigen::RowVector3d(5, -2, 1);
  auto r1 = cca_align(x, y, 3, 0.0);
  auto r2 = cca_align(xt, y, 3, 0.0);
  for (auto i = 0; i < 3; ++i) CHECK(std::abs(r1.correlations(i) - r2.correlations(i)) < 1e-6);
}

TEST_CASE("CCA errors") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(10, 3);
  CHECK(code_of([&] { cca_align(x, Eigen::MatrixXd::Random(9, 3), 1); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { cca_align(x, x, 4); }) == ErrorCode::InvalidParameters);
  CHECK(code_of([&] { cca_align(x.topRows(2), x.topRows(2), 1); }) == ErrorCode::InvalidParameters);
  Eigen::MatrixXd singular = x;
  singular.col(2) = singular.col(0) + singular.col(1);
  CHECK(code_of([&] { cca_align(singular, x, 2, 0.0); }) == ErrorCode::RankDeficient);
  CHECK_NOTHROW(cca_align(singular, x, 2));
}

TEST_CASE("advisor table") {
  using V = std::vector<std::string>;
  CHECK(names(advise({DataKind::Continuous, {}, {}})) == V{"adversarial training", "dynamic time warping"});
  CHECK(names(advise({DataKind::Discrete, Representation::Semantic, Integration::Explicit})) ==
        V{"adversarial auto-encoders", "deep CCA", "optimal transport"});
  CHECK(names(advise({DataKind::Discrete, Representation::Semantic, Integration::Implicit})) ==
        V{"cross-modal self-attention transformers"});
  CHECK(names(advise({DataKind::Discrete, Representation::NonSemantic, Integration::Explicit})) ==
        V{"supervised element labeling"});
  CHECK(names(advise({DataKind::Discrete, Representation::NonSemantic, Integration::Implicit})) ==
        V{"late fusion", "hidden Markov models"});
  CHECK(code_of([] { advise({DataKind::Discrete, {}, Integration::Explicit}); }) == ErrorCode::IncompleteQuery);
  CHECK(code_of([] { advise({DataKind::Discrete, Representation::Semantic, {}}); }) == ErrorCode::IncompleteQuery);
  CHECK(code_of([] { advise({DataKind::Continuous, Representation::Semantic, {}}); }) == ErrorCode::InvalidQuery);
  CHECK(parse_representation("non-semantic") == Representation::NonSemantic);
  CHECK(!parse_data_kind("sparse"));
}
