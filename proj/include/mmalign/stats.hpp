#pragma once

// Fixed-effects (within) regression with delta-method margins, and the
// log-odds lexical comparison with an informative Dirichlet prior.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mmalign/gaze.hpp"
#include "mmalign/timeline.hpp"

namespace mmalign::stats {

struct PanelRow {
  double y = 0.0;
  std::string group;
  std::vector<double> regressors;  // aligned with Panel::regressor_names
};

struct Panel {
  std::vector<std::string> regressor_names;
  std::vector<PanelRow> rows;
};

struct RegressionResult {
  std::vector<std::string> names;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;
  Eigen::MatrixXd covariance;
  std::size_t n_obs = 0;
  std::size_t n_groups = 0;
  std::size_t df_residual = 0;
  double rss = 0.0;
  double sigma2 = 0.0;          // rss / df_residual
  double log_likelihood = 0.0;  // Gaussian, at the ML variance rss / n
  double deviance = 0.0;        // equals rss for the Gaussian family

  /// Index of a coefficient by name; throws UnknownRegressor.
  std::size_t index_of(const std::string& name) const;
};

/// Relative pivot tolerance of the rank check in fe_regress.
inline constexpr double kRankTolerance = 1e-10;

/// Within estimator: demean y and regressors per group, then least squares.
/// Residual variance uses n - k - G degrees of freedom.
/// Throws EmptyPanel, SingleGroup (unless allowed), RankDeficientDesign,
/// InsufficientData and InvalidParameters for ragged rows.
RegressionResult fe_regress(const Panel& panel, bool allow_single_group = false);

struct MarginCell {
  std::string label;
  std::map<std::string, double> settings;  // unnamed regressors are 0
};

struct Margin {
  std::string label;
  double predicted = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

inline constexpr double kZ95 = 1.96;

/// Linear prediction c'beta at each cell with the group effect at zero and a
/// 95% interval c'beta +- 1.96 sqrt(c' V c). Throws UnknownRegressor.
std::vector<Margin> margins(const RegressionResult& result, std::span<const MarginCell> cells);

using WordCounts = std::map<std::string, std::int64_t>;

struct WordScore {
  std::string word;
  std::int64_t count_a = 0;
  std::int64_t count_b = 0;
  double delta = 0.0;
  double variance = 0.0;
  double z = 0.0;
};

struct FightinWordsResult {
  std::vector<WordScore> words;  // by z descending, ties by word
};

inline constexpr double kDefaultPriorScale = 1.0;

/// Log-odds difference of each word between groups a and b under an
/// informative Dirichlet prior alpha_w = prior_scale * total_w / grand_total.
/// Words with zero total count are skipped. Throws EmptyVocabulary and
/// NonPositivePrior.
FightinWordsResult fightin_words(const WordCounts& counts_a, const WordCounts& counts_b,
                                 double prior_scale = kDefaultPriorScale);

enum class Situation { OthersToTarget, TargetToTarget, OthersToOthers, TargetToOthers };

inline constexpr Situation kAllSituations[] = {Situation::OthersToTarget, Situation::TargetToTarget,
                                               Situation::OthersToOthers, Situation::TargetToOthers};

std::string situation_name(Situation s, const std::string& target_party);

struct FourWayCounts {
  std::map<Situation, WordCounts> cells;
  std::size_t tokens = 0;

  const WordCounts& at(Situation s) const;
  /// Pooled counts of every cell except `s`.
  WordCounts rest(Situation s) const;
};

struct TokenOptions {
  bool lowercase = true;
  std::function<std::string(const std::string&)> stemmer;  // disabled when empty
};

/// Lowercases ASCII and Latin-1 supplement letters encoded as UTF-8, then
/// applies the stemmer when present.
std::string normalize_token(const std::string& word, const TokenOptions& options);

/// Splits word tokens by speaker party (target or other) and by whether the
/// token overlaps an address segment of its session. Transcripts need a
/// speaker id. Throws MissingPartyMetadata.
FourWayCounts four_situation_split(std::span<const timeline::ElementStream> transcripts,
                                   const std::map<std::string, std::vector<gaze::AddressSegment>>& segments_by_session,
                                   const std::map<std::string, std::string>& speaker_party,
                                   const std::string& target_party = "AfD",
                                   const TokenOptions& options = {});

}  // namespace mmalign::stats
