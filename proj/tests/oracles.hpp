#pragma once

// Reference implementations used by the tests. Each one is written the slow,
// obvious way and shares no code with the library beyond its data types.

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmalign/gaze.hpp"
#include "mmalign/latent.hpp"
#include "mmalign/pitch.hpp"
#include "mmalign/stats.hpp"
#include "mmalign/timeline.hpp"

namespace oracle {

using IndexPairs = std::vector<std::pair<std::size_t, std::size_t>>;

inline double overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

// All pairs whose overlap exceeds min_overlap, by double loop.
inline IndexPairs join(std::span<const mmalign::timeline::Element> a,
                       std::span<const mmalign::timeline::Element> b, double min_overlap = 0.0) {
  IndexPairs out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double o = overlap(a[i].interval.start, a[i].interval.end, b[j].interval.start, b[j].interval.end);
      if (o > min_overlap) out.emplace_back(i, j);
    }
  }
  return out;
}

// Word pitch by scanning every frame for every word.
struct WordMean {
  std::optional<double> mean;
  std::size_t voiced = 0;
};

inline std::vector<WordMean> word_pitch(const mmalign::pitch::PitchTrack& track,
                                        const mmalign::timeline::ElementStream& words) {
  std::vector<WordMean> out;
  for (const auto& w : words.elements()) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& f : track.frames) {
      if (f.f0 && f.time >= w.interval.start && f.time < w.interval.end) {
        sum += *f.f0;
        ++n;
      }
    }
    out.push_back({n ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt, n});
  }
  return out;
}

// Count overlapping words per segment and filter.
inline std::vector<mmalign::gaze::AddressSegment> min_words(const std::vector<mmalign::gaze::AddressSegment>& segs,
                                                            const mmalign::timeline::ElementStream& words,
                                                            std::size_t minimum) {
  std::vector<mmalign::gaze::AddressSegment> out;
  for (auto s : segs) {
    std::size_t n = 0;
    for (const auto& w : words.elements()) {
      if (overlap(s.interval.start, s.interval.end, w.interval.start, w.interval.end) > 0.0) ++n;
    }
    s.word_count = n;
    if (n >= minimum) out.push_back(s);
  }
  return out;
}

// Maximal runs of frontal in-band samples, no notes correction.
inline std::vector<std::pair<double, double>> yaw_runs(const std::vector<mmalign::gaze::GazeSample>& s, double lo,
                                                       double hi, double period) {
  std::vector<std::pair<double, double>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!(s[i].frontal && s[i].yaw_deg >= lo && s[i].yaw_deg <= hi)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < s.size() && s[j + 1].frontal && s[j + 1].yaw_deg >= lo && s[j + 1].yaw_deg <= hi) ++j;
    out.emplace_back(s[i].t, s[j].t + period);
    i = j + 1;
  }
  return out;
}

// Minimum DTW cost by enumerating every monotone path.
inline double dtw_exhaustive(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                             const std::function<double(const Eigen::RowVectorXd&, const Eigen::RowVectorXd&)>& cost) {
  const auto n = a.rows();
  const auto m = b.rows();
  double best = std::numeric_limits<double>::infinity();
  std::function<void(Eigen::Index, Eigen::Index, double)> walk = [&](Eigen::Index i, Eigen::Index j, double acc) {
    acc += cost(a.row(i), b.row(j));
    if (i == n - 1 && j == m - 1) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < n) walk(i + 1, j, acc);
    if (j + 1 < m) walk(i, j + 1, acc);
    if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, acc);
  };
  walk(0, 0, 0.0);
  return best;
}

// Canonical correlations from the generalized symmetric eigenproblem
// (Cxy Cyy^-1 Cyx) v = rho^2 Cxx v, in long double. Descending.
inline std::vector<double> cca_correlations(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  MatL xl = x.cast<long double>();
  MatL yl = y.cast<long double>();
  xl.rowwise() -= xl.colwise().mean();
  yl.rowwise() -= yl.colwise().mean();
  const MatL cxx = xl.transpose() * xl;
  const MatL cyy = yl.transpose() * yl;
  const MatL cxy = xl.transpose() * yl;
  const MatL m = cxy * cyy.ldlt().solve(cxy.transpose());
  const MatL msym = (m + m.transpose()) / 2.0L;
  Eigen::GeneralizedSelfAdjointEigenSolver<MatL> es(msym, cxx);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    out.push_back(static_cast<double>(std::sqrt(std::max<long double>(0.0L, es.eigenvalues()(i)))));
  }
  std::sort(out.rbegin(), out.rend());
  return out;
}

// OLS with one dummy per group and no intercept, in long double.
struct DummyOls {
  std::vector<double> beta;
  std::vector<double> se;
  Eigen::MatrixXd cov;  // slopes only
  double rss = 0.0;
};

inline DummyOls dummy_ols(const mmalign::stats::Panel& p) {
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  std::map<std::string, Eigen::Index> gidx;
  for (const auto& r : p.rows) gidx.emplace(r.group, static_cast<Eigen::Index>(gidx.size()));
  const auto n = static_cast<Eigen::Index>(p.rows.size());
  const auto k = static_cast<Eigen::Index>(p.regressor_names.size());
  const auto g = static_cast<Eigen::Index>(gidx.size());
  MatL X = MatL::Zero(n, k + g);
  VecL y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = p.rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < k; ++j) X(i, j) = r.regressors[static_cast<std::size_t>(j)];
    X(i, k + gidx.at(r.group)) = 1.0L;
    y(i) = r.y;
  }
  const MatL xtx = X.transpose() * X;
  const MatL inv = xtx.inverse();
  const VecL b = inv * (X.transpose() * y);
  const VecL e = y - X * b;
  const long double rss = e.squaredNorm();
  const long double s2 = rss / static_cast<long double>(n - k - g);
  DummyOls out;
  out.cov = (s2 * inv.topLeftCorner(k, k)).cast<double>();
  for (Eigen::Index j = 0; j < k; ++j) {
    out.beta.push_back(static_cast<double>(b(j)));
    out.se.push_back(static_cast<double>(std::sqrt(s2 * inv(j, j))));
  }
  out.rss = static_cast<double>(rss);
  return out;
}

// Fightin' Words evaluated with 50 significant decimal digits.
inline std::map<std::string, double> fightin_words_z(const mmalign::stats::WordCounts& a,
                                                     const mmalign::stats::WordCounts& b, double prior) {
  using F = boost::multiprecision::cpp_bin_float_50;
  std::set<std::string> vocab;
  F na = 0, nb = 0;
  for (const auto& [w, c] : a) {
    na += c;
    if (c > 0) vocab.insert(w);
  }
  for (const auto& [w, c] : b) {
    nb += c;
    if (c > 0) vocab.insert(w);
  }
  const F grand = na + nb;
  const F a0 = prior;
  std::map<std::string, double> out;
  for (const auto& w : vocab) {
    const F ya = a.count(w) ? F(a.at(w)) : F(0);
    const F yb = b.count(w) ? F(b.at(w)) : F(0);
    const F alpha = F(prior) * (ya + yb) / grand;
    // Single-word vocabularies are defined as no difference.
    const F delta = vocab.size() == 1 ? F(0)
                                      : log((ya + alpha) / (na + a0 - ya - alpha)) -
                                            log((yb + alpha) / (nb + a0 - yb - alpha));
    const F var = 1 / (ya + alpha) + 1 / (yb + alpha);
    out[w] = static_cast<double>(delta / sqrt(var));
  }
  return out;
}

// Four-way classification token by token.
inline std::map<mmalign::stats::Situation, mmalign::stats::WordCounts> four_way(
    const std::vector<mmalign::timeline::ElementStream>& transcripts,
    const std::map<std::string, std::vector<mmalign::gaze::AddressSegment>>& segs,
    const std::map<std::string, std::string>& party, const std::string& target,
    const mmalign::stats::TokenOptions& opt) {
  using mmalign::stats::Situation;
  std::map<Situation, mmalign::stats::WordCounts> out;
  for (const auto& t : transcripts) {
    const bool is_target = party.at(*t.speaker_id()) == target;
    for (const auto& e : t.elements()) {
      bool inside = false;
      auto it = segs.find(t.session_id());
      if (it != segs.end()) {
        for (const auto& s : it->second) {
          if (overlap(e.interval.start, e.interval.end, s.interval.start, s.interval.end) > 0.0) inside = true;
        }
      }
      const Situation sit = inside ? (is_target ? Situation::TargetToTarget : Situation::OthersToTarget)
                                   : (is_target ? Situation::TargetToOthers : Situation::OthersToOthers);
      ++out[sit][mmalign::stats::normalize_token(std::get<mmalign::timeline::Word>(e.payload).text, opt)];
    }
  }
  return out;
}

}  // namespace oracle
