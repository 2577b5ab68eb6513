#pragma once
// Psychosocial profiling of inferred groups: moral framing, grievance, cognitive
// distortions, emoji use, and the statistics used to compare groups.

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ideo/boost.hpp"
#include "ideo/corpus.hpp"
#include "ideo/proxies.hpp"
#include "ideo/wordvec.hpp"

namespace ideo {

enum class Foundation { Care, Fairness, Loyalty, Authority, Sanctity };
inline constexpr std::array<Foundation, 5> kFoundations = {Foundation::Care, Foundation::Fairness, Foundation::Loyalty,
                                                           Foundation::Authority, Foundation::Sanctity};
inline constexpr int kNumFoundations = 5;

std::string_view foundation_name(Foundation f);
Foundation parse_foundation(std::string_view s);
/// Care and fairness.
bool is_individualizing(Foundation f);

/// user -> Left | Neutral | Right | FarRight
using GroupAssignment = std::map<std::string, Label>;
inline constexpr std::array<Label, 4> kProfileGroups = {Label::Left, Label::Neutral, Label::Right, Label::FarRight};

struct GroupOptions {
  /// P(Right) within 0.5 +- band is Neutral.
  double neutral_band = 0.1;
  /// Minimum P(FarRight) for the far-right group.
  double far_right_threshold = 0.5;
};

/// FarRight where the far-right model says so, otherwise the left-right decision with a
/// neutral band. Users missing from the left-right predictions are not assigned.
GroupAssignment assign_groups(const Predictions& left_right, const Predictions* far_right,
                              const GroupOptions& options = {});

// ---------------------------------------------------------------------------
// Moral foundations

struct MoralDictionary {
  std::array<std::vector<std::string>, kNumFoundations> virtue;
  std::array<std::vector<std::string>, kNumFoundations> vice;
};

/// word<TAB>foundation<TAB>pole (virtue|vice), optional header line.
MoralDictionary load_moral_dictionary(const std::filesystem::path& path);

/// One axis per foundation: mean virtue vector minus mean vice vector.
struct MoralAxes {
  Eigen::Matrix<double, kNumFoundations, Eigen::Dynamic> axes;
  std::array<int, kNumFoundations> virtue_found{};
  std::array<int, kNumFoundations> vice_found{};
};

/// Config error when a foundation has no embedded virtue or vice word.
MoralAxes build_axes(const MoralDictionary& dictionary, const WordVectors& vectors);

using FoundationRow = Eigen::Matrix<double, 1, kNumFoundations>;

struct UserMoralScores {
  std::vector<std::string> users;  // users with at least one embedded token
  Eigen::Matrix<double, Eigen::Dynamic, kNumFoundations> bias;
  Eigen::Matrix<double, Eigen::Dynamic, kNumFoundations> intensity;
  std::vector<std::int64_t> embedded_tokens;
  /// Token-weighted bias over all scored users.
  FoundationRow corpus_bias = FoundationRow::Zero();
  std::size_t excluded = 0;
};

/// Lowercase token multiset of each user's concatenated text, aligned with `users`.
std::vector<Counts> user_token_counts(const CorpusIndex& corpus, const std::vector<std::string>& users);

UserMoralScores frameaxis_scores(const std::vector<std::string>& users, const std::vector<Counts>& tokens,
                                 const MoralAxes& axes, const WordVectors& vectors);
UserMoralScores frameaxis_scores(const CorpusIndex& corpus, const std::vector<std::string>& users,
                                 const MoralAxes& axes, const WordVectors& vectors);

struct ViceVirtue {
  double virtue = 0.0;
  double vice = 0.0;
};
/// Intensity goes to virtue for positive bias, to vice for negative bias.
ViceVirtue vice_virtue(double bias, double intensity);

// ---------------------------------------------------------------------------
// Grievance

struct GrievanceDictionary {
  std::vector<std::string> categories;  // sorted
  /// word -> category indices (a word may belong to several categories)
  std::unordered_map<std::string, std::vector<int>> words;
  /// Loaded for completeness; scoring is a plain rate.
  std::unordered_map<std::string, double> weights;
};

/// word<TAB>category<TAB>weight, optional header line.
GrievanceDictionary load_grievance_dictionary(const std::filesystem::path& path);

struct GrievanceScores {
  std::vector<std::string> users;  // users with at least one token
  std::vector<std::string> categories;
  Eigen::MatrixXd rate;            // users x categories, matched tokens / all tokens
};

GrievanceScores grievance_scores(const std::vector<std::string>& users, const std::vector<Counts>& tokens,
                                 const GrievanceDictionary& dictionary);

/// Bin edges of width 2 IQR n^(-1/3) spanning the sample (Sturges count when the IQR is
/// zero). Empty when the sample holds a single value.
std::vector<double> freedman_diaconis_edges(const std::vector<double>& sample);
/// Counts on the given edges; the last bin is closed on the right.
std::vector<double> histogram_counts(const std::vector<double>& sample, const std::vector<double>& edges);
/// (count + 1) / (n + bins)
Eigen::VectorXd laplace_distribution(const std::vector<double>& counts);
/// sum p ln(p / q) over strictly positive p and q.
double kl_divergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
/// sign(mean(group) - mean(neutral)) * KL(P_group || P_neutral) on shared pooled bins.
double signed_kl(const std::vector<double>& group, const std::vector<double>& neutral);

// ---------------------------------------------------------------------------
// Rank tests and multiple comparisons

enum class Alternative { Greater, Less, TwoSided };

struct RankTest {
  double u = 0.0;  // U statistic of the first sample
  double z = 0.0;
  double p = 1.0;
};

/// Two-sample rank-sum test with the tie-corrected normal approximation. Greater tests
/// whether the first sample tends to be larger.
RankTest mann_whitney(const std::vector<double>& a, const std::vector<double>& b, Alternative alternative,
                      bool continuity = true);

/// Holm step-down over a family of `family_size` tests (>= p.size(); untested members count
/// toward the family). Returns the rejection flag per p-value.
std::vector<bool> holm_reject(const std::vector<double>& p, double alpha, std::size_t family_size = 0);

enum class MoralMeasure { Bias, Intensity };

struct HypothesisResult {
  std::string dataset;
  Foundation foundation = Foundation::Care;
  MoralMeasure measure = MoralMeasure::Bias;
  Label group = Label::Right;  // compared against Left
  /// Hypothesized direction: true when Left should be higher.
  bool left_higher = true;
  bool testable = false;
  std::size_t n_left = 0;
  std::size_t n_group = 0;
  double u = 0.0;
  double p = 1.0;
  bool win = false;
};

struct DatasetMoral {
  std::string name;
  UserMoralScores scores;
  GroupAssignment groups;
};

struct HypothesisTable {
  std::vector<std::string> datasets;
  std::vector<HypothesisResult> tests;  // 20 per dataset
  double alpha = 0.05;

  /// Supported hypotheses for one foundation x dataset cell (0..4).
  int wins(Foundation f, const std::string& dataset) const;
  int testable(Foundation f, const std::string& dataset) const;
};

/// For each dataset: foundations x {bias, intensity} x {Right, FarRight} one-sided rank
/// tests against Left, Holm-adjusted within the dataset's 20 tests.
HypothesisTable mft_hypothesis_table(const std::vector<DatasetMoral>& datasets, double alpha = 0.05,
                                     bool continuity = true);

// ---------------------------------------------------------------------------
// Cognitive distortions

struct CdsPatterns {
  std::vector<std::string> distortions;  // sorted
  /// lowercase n-gram (tokens joined by one space) -> distortion indices
  std::unordered_map<std::string, std::vector<int>> ngrams;
  int max_n = 1;
};

/// ngram<TAB>distortion, optional header line; n-grams of 1 to 5 tokens.
CdsPatterns load_cds_patterns(const std::filesystem::path& path);
CdsPatterns make_cds_patterns(const std::vector<std::pair<std::string, std::string>>& ngram_distortion);

/// Per distortion, whether the text contains one of its n-grams.
std::vector<bool> cds_matches(std::string_view text, const CdsPatterns& patterns);

struct CdsPrevalence {
  Label group = Label::Left;
  std::string distortion;  // "any" for the union of all distortions
  std::size_t posts = 0;
  double prevalence = 0.0;
  std::vector<double> bootstrap;
};

/// Per group and distortion (plus "any"): share of the group's posts with a matching
/// n-gram, and B bootstrap replicates over posts. Empty groups are skipped with a warning.
std::vector<CdsPrevalence> cds_prevalence(const CorpusIndex& corpus, const CdsPatterns& patterns,
                                          const GroupAssignment& groups, int bootstrap = 100,
                                          std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Regression models

struct LogisticFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd se;
  int iterations = 0;
  bool converged = false;
};

/// Logistic regression by iteratively reweighted least squares, stopping when the score
/// norm falls below tol.
LogisticFit logistic_irls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tol = 1e-8,
                          int max_iterations = 100);

struct PoissonFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd se;
  int iterations = 0;
  bool converged = false;
};

/// Zero-truncated Poisson regression with log link by Newton's method; y >= 1.
PoissonFit truncated_poisson_newton(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tol = 1e-8,
                                    int max_iterations = 200);

struct OddsEstimate {
  std::string emoji;
  Label group = Label::Left;
  std::size_t users = 0;
  std::size_t present = 0;
  double coefficient = 0.0;
  double se = 0.0;
  double odds = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  /// All-present or all-absent group: the estimate is infinite and reported as censored.
  bool censored = false;
};

/// Presence (>= 1 use) per user regressed on group indicators without an intercept.
std::vector<OddsEstimate> emoji_odds(const CorpusIndex& corpus, const GroupAssignment& groups,
                                     const std::vector<std::string>& emoji);

struct HurdleTerm {
  Label group = Label::Left;
  bool reference = false;
  /// Zero part (logistic on presence). Reference row holds the intercept.
  double zero_coef = 0.0;
  double zero_se = 0.0;
  bool zero_censored = false;
  /// Count part (truncated Poisson, log link). Reference row holds the intercept.
  double count_coef = 0.0;
  double count_se = 0.0;
  /// Fewer than two distinct positive counts; the rate sits on the boundary.
  bool count_degenerate = false;
  std::size_t users = 0;
  std::size_t positive = 0;
};

struct HurdleResult {
  std::string emoji;
  Label reference = Label::Neutral;
  std::vector<HurdleTerm> terms;  // reference first
  bool degenerate = false;
};

/// Counts per user and group; groups other than the reference get coefficients relative to it.
HurdleResult hurdle_model(const std::vector<std::pair<Label, std::int64_t>>& user_counts, Label reference,
                          const std::string& emoji = {});
HurdleResult hurdle_model(const CorpusIndex& corpus, const GroupAssignment& groups, const std::string& emoji,
                          Label reference);

/// The k emoji used by the most users (ties lexicographic).
std::vector<std::string> top_emoji(const CorpusIndex& corpus, std::size_t k);
/// Most widely used flag emoji, if any.
std::optional<std::string> top_flag_emoji(const CorpusIndex& corpus);

// ---------------------------------------------------------------------------
// Profile report

struct PsychoResources {
  MoralDictionary moral;
  GrievanceDictionary grievance;
  CdsPatterns cds;
  WordVectors vectors;
};

PsychoResources load_psycho_resources(const std::filesystem::path& moral, const std::filesystem::path& grievance,
                                      const std::filesystem::path& cds, const std::filesystem::path& word_vectors);

struct ProfileOptions {
  int bootstrap = 100;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  bool continuity = true;
  std::vector<std::string> emoji;  // empty: top_emoji_count most used
  std::size_t top_emoji_count = 10;
  std::string hurdle_emoji;        // empty: most used flag
  Label hurdle_reference = Label::Neutral;
};

struct GroupMoral {
  Label group = Label::Left;
  std::size_t users = 0;
  FoundationRow bias_mean = FoundationRow::Zero();
  FoundationRow intensity_mean = FoundationRow::Zero();
  FoundationRow virtue_mean = FoundationRow::Zero();
  FoundationRow vice_mean = FoundationRow::Zero();
};

struct GrievanceDivergence {
  Label group = Label::Left;
  std::string category;
  double signed_kl = 0.0;
  double group_mean = 0.0;
  double neutral_mean = 0.0;
};

struct DatasetProfile {
  std::string name;
  std::map<Label, std::size_t> group_sizes;
  UserMoralScores moral;
  std::vector<GroupMoral> moral_groups;
  std::vector<GrievanceDivergence> grievance;
  std::vector<CdsPrevalence> cds;
  std::vector<OddsEstimate> odds;
  std::optional<HurdleResult> hurdle;
};

struct ProfileReport {
  std::vector<DatasetProfile> datasets;
  HypothesisTable hypotheses;
};

DatasetProfile profile_dataset(const std::string& name, const CorpusIndex& corpus, const GroupAssignment& groups,
                               const PsychoResources& resources, const MoralAxes& axes,
                               const ProfileOptions& options = {});

struct ProfileInput {
  std::string name;
  const CorpusIndex* corpus = nullptr;
  GroupAssignment groups;
};

ProfileReport profile(const std::vector<ProfileInput>& datasets, const PsychoResources& resources,
                      const ProfileOptions& options = {});

std::string profile_report_json(const ProfileReport& report);
/// profile_report.json plus figure CSVs: vice_virtue, grievance_signed_kl, hypotheses,
/// cds_prevalence, emoji_odds, hurdle.
void save_profile_report(const ProfileReport& report, const std::filesystem::path& dir);

}  // namespace ideo
