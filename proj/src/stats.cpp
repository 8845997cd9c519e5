#include "mmalign/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "mmalign/error.hpp"

namespace mmalign::stats {

std::size_t RegressionResult::index_of(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error(ErrorCode::UnknownRegressor, "no coefficient named '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

RegressionResult fe_regress(const Panel& panel, bool allow_single_group) {
  const std::size_t n = panel.rows.size();
  const std::size_t k = panel.regressor_names.size();
  if (n == 0) throw Error(ErrorCode::EmptyPanel, "panel has no rows");
  if (k == 0) throw Error(ErrorCode::InvalidParameters, "panel has no regressors");

  std::unordered_map<std::string, std::size_t> group_index;
  std::vector<std::size_t> row_group(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = panel.rows[r];
    if (row.regressors.size() != k) {
      throw Error(ErrorCode::InvalidParameters,
                  "row " + std::to_string(r) + " has " + std::to_string(row.regressors.size()) +
                      " regressors, expected " + std::to_string(k));
    }
    if (!std::isfinite(row.y)) {
      throw Error(ErrorCode::InvalidParameters, "row " + std::to_string(r) + " has a non-finite y");
    }
    row_group[r] = group_index.try_emplace(row.group, group_index.size()).first->second;
  }
  const std::size_t g = group_index.size();
  if (g < 2 && !allow_single_group) {
    throw Error(ErrorCode::SingleGroup, "fixed effects need at least two groups");
  }
  if (n <= k + g) {
    throw Error(ErrorCode::InsufficientData, "n - k - G must be positive");
  }

  Eigen::MatrixXd x(n, k);
  Eigen::VectorXd y(n);
  for (std::size_t r = 0; r < n; ++r) {
    y(r) = panel.rows[r].y;
    for (std::size_t c = 0; c < k; ++c) x(r, c) = panel.rows[r].regressors[c];
  }

  // Within transformation.
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(g, k + 1);
  Eigen::VectorXd sizes = Eigen::VectorXd::Zero(g);
  for (std::size_t r = 0; r < n; ++r) {
    sums.row(row_group[r]).head(k) += x.row(r);
    sums(row_group[r], k) += y(r);
    sizes(row_group[r]) += 1.0;
  }
  const Eigen::MatrixXd means = sums.array().colwise() / sizes.array();
  for (std::size_t r = 0; r < n; ++r) {
    x.row(r) -= means.row(row_group[r]).head(k);
    y(r) -= means(row_group[r], k);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  // Pivots below this fraction of the largest count as zero; demeaned
  // collinear columns leave round-off well above machine epsilon.
  qr.setThreshold(kRankTolerance);
  if (static_cast<std::size_t>(qr.rank()) < k) {
    throw Error(ErrorCode::RankDeficientDesign,
                "design has rank " + std::to_string(qr.rank()) + " after demeaning, needs " +
                    std::to_string(k));
  }
  RegressionResult res;
  res.names = panel.regressor_names;
  res.coefficients = qr.solve(y);
  const Eigen::VectorXd resid = y - x * res.coefficients;
  res.rss = resid.squaredNorm();
  res.n_obs = n;
  res.n_groups = g;
  res.df_residual = n - k - g;
  res.sigma2 = res.rss / static_cast<double>(res.df_residual);

  const Eigen::MatrixXd r_factor =
      qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv = r_factor.template triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd unscaled_perm = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  const Eigen::MatrixXd unscaled = perm * unscaled_perm * perm.transpose();
  res.covariance = res.sigma2 * unscaled;
  res.standard_errors = res.covariance.diagonal().cwiseSqrt();

  const double nd = static_cast<double>(n);
  res.deviance = res.rss;
  res.log_likelihood = -0.5 * nd * (std::log(2.0 * std::numbers::pi * res.rss / nd) + 1.0);
  return res;
}

std::vector<Margin> margins(const RegressionResult& result, std::span<const MarginCell> cells) {
  std::vector<Margin> out;
  out.reserve(cells.size());
  const auto k = static_cast<Eigen::Index>(result.names.size());
  for (const auto& cell : cells) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(k);
    for (const auto& [name, value] : cell.settings) {
      c(static_cast<Eigen::Index>(result.index_of(name))) = value;
    }
    Margin m;
    m.label = cell.label;
    m.predicted = c.dot(result.coefficients);
    m.se = std::sqrt(std::max(0.0, c.dot(result.covariance * c)));
    m.ci_low = m.predicted - kZ95 * m.se;
    m.ci_high = m.predicted + kZ95 * m.se;
    out.push_back(std::move(m));
  }
  return out;
}

FightinWordsResult fightin_words(const WordCounts& counts_a, const WordCounts& counts_b,
                                 double prior_scale) {
  if (!(prior_scale > 0.0) || !std::isfinite(prior_scale)) {
    throw Error(ErrorCode::NonPositivePrior, "prior_scale must be positive");
  }
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> vocab;
  double n_a = 0.0;
  double n_b = 0.0;
  for (const auto& [w, c] : counts_a) {
    if (c < 0) throw Error(ErrorCode::InvalidParameters, "negative count for '" + w + "'");
    vocab[w].first += c;
    n_a += static_cast<double>(c);
  }
  for (const auto& [w, c] : counts_b) {
    if (c < 0) throw Error(ErrorCode::InvalidParameters, "negative count for '" + w + "'");
    vocab[w].second += c;
    n_b += static_cast<double>(c);
  }
  std::erase_if(vocab, [](const auto& kv) { return kv.second.first + kv.second.second == 0; });
  if (vocab.empty()) throw Error(ErrorCode::EmptyVocabulary, "no word has a positive count");

  const double grand = n_a + n_b;
  const double alpha0 = prior_scale;
  FightinWordsResult res;
  res.words.reserve(vocab.size());
  for (const auto& [w, c] : vocab) {
    const double ya = static_cast<double>(c.first);
    const double yb = static_cast<double>(c.second);
    const double alpha = prior_scale * (ya + yb) / grand;
    const double log_odds_a = std::log((ya + alpha) / (n_a + alpha0 - ya - alpha));
    const double log_odds_b = std::log((yb + alpha) / (n_b + alpha0 - yb - alpha));
    WordScore s;
    s.word = w;
    s.count_a = c.first;
    s.count_b = c.second;
    // A word that is the whole vocabulary has infinite odds in both groups.
    s.delta = vocab.size() == 1 ? 0.0 : log_odds_a - log_odds_b;
    s.variance = 1.0 / (ya + alpha) + 1.0 / (yb + alpha);
    s.z = s.delta / std::sqrt(s.variance);
    res.words.push_back(std::move(s));
  }
  std::sort(res.words.begin(), res.words.end(), [](const WordScore& a, const WordScore& b) {
    if (a.z != b.z) return a.z > b.z;
    return a.word < b.word;
  });
  return res;
}

std::string situation_name(Situation s, const std::string& target_party) {
  switch (s) {
    case Situation::OthersToTarget: return "others->" + target_party;
    case Situation::TargetToTarget: return target_party + "->" + target_party;
    case Situation::OthersToOthers: return "others->others";
    case Situation::TargetToOthers: return target_party + "->others";
  }
  return "unknown";
}

const WordCounts& FourWayCounts::at(Situation s) const {
  static const WordCounts empty;
  const auto it = cells.find(s);
  return it == cells.end() ? empty : it->second;
}

WordCounts FourWayCounts::rest(Situation s) const {
  WordCounts pooled;
  for (const auto& [cell, counts] : cells) {
    if (cell == s) continue;
    for (const auto& [w, c] : counts) pooled[w] += c;
  }
  return pooled;
}

std::string normalize_token(const std::string& word, const TokenOptions& options) {
  std::string out = word;
  if (options.lowercase) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto c = static_cast<unsigned char>(out[i]);
      if (c >= 'A' && c <= 'Z') {
        out[i] = static_cast<char>(c + ('a' - 'A'));
      } else if (c == 0xC3 && i + 1 < out.size()) {
        // U+00C0..U+00DE except U+00D7 (multiplication sign).
        auto next = static_cast<unsigned char>(out[i + 1]);
        if (next >= 0x80 && next <= 0x9E && next != 0x97) out[i + 1] = static_cast<char>(next + 0x20);
        ++i;
      }
    }
  }
  if (options.stemmer) out = options.stemmer(out);
  return out;
}

FourWayCounts four_situation_split(
    std::span<const timeline::ElementStream> transcripts,
    const std::map<std::string, std::vector<gaze::AddressSegment>>& segments_by_session,
    const std::map<std::string, std::string>& speaker_party, const std::string& target_party,
    const TokenOptions& options) {
  FourWayCounts out;
  for (Situation s : kAllSituations) out.cells[s];
  for (const auto& words : transcripts) {
    const auto& speaker = words.speaker_id();
    const auto party = speaker ? speaker_party.find(*speaker) : speaker_party.end();
    if (party == speaker_party.end()) {
      throw Error(ErrorCode::MissingPartyMetadata,
                  "no party for speaker '" + speaker.value_or("") + "' of session '" +
                      words.session_id() + "'");
    }
    const bool from_target = party->second == target_party;

    std::vector<bool> addressed(words.size(), false);
    const auto seg_it = segments_by_session.find(words.session_id());
    if (seg_it != segments_by_session.end() && !seg_it->second.empty()) {
      std::vector<timeline::Element> segs;
      for (std::size_t k = 0; k < seg_it->second.size(); ++k) {
        segs.push_back({"seg" + std::to_string(k), seg_it->second[k].interval,
                        timeline::Label{seg_it->second[k].label}});
      }
      std::sort(segs.begin(), segs.end(), [](const timeline::Element& a, const timeline::Element& b) {
        return a.interval.start < b.interval.start;
      });
      for (const auto& [i, k] : timeline::join_elements(words.elements(), segs)) addressed[i] = true;
    }
    for (std::size_t i = 0; i < words.size(); ++i) {
      const auto* w = std::get_if<timeline::Word>(&words[i].payload);
      if (w == nullptr) continue;
      Situation s;
      if (addressed[i]) {
        s = from_target ? Situation::TargetToTarget : Situation::OthersToTarget;
      } else {
        s = from_target ? Situation::TargetToOthers : Situation::OthersToOthers;
      }
      ++out.cells[s][normalize_token(w->text, options)];
      ++out.tokens;
    }
  }
  return out;
}

}  // namespace mmalign::stats
