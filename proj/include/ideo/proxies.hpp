#pragma once
// Weak labels for seed users from behavioral proxies, and gold-standard labels.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ideo/corpus.hpp"
#include "ideo/mediaslant.hpp"

namespace ideo {

enum class Mode { LeftRight, FarRight };
enum class Label { Left, Neutral, Right, Moderate, FarRight };

std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view s);
std::string_view label_name(Label l);
Label parse_label(std::string_view s);
Mode label_mode(Label l);

/// Training classes for a mode, in class-index order. Left-right excludes Neutral.
std::vector<Label> mode_classes(Mode m);
/// Class index of a label within mode_classes, or nullopt (e.g. Neutral).
std::optional<int> class_index(Mode m, Label l);

struct SeedLabels {
  Mode mode = Mode::LeftRight;
  std::string proxy_name;
  std::map<std::string, Label> labels;
  double coverage = 0.0;
  bool gold = false;

  std::size_t size() const { return labels.size(); }
  /// Count per label.
  std::map<Label, std::size_t> counts() const;
  /// Copy without labels that have no training class (Neutral).
  SeedLabels trainable() const;
};

/// Checks mode purity and sets coverage = labeled / corpus users.
void finalize_coverage(SeedLabels& seeds, std::size_t corpus_users);

using HashtagCodes = std::map<std::string, int>;  // hashtag -> {-1, 0, 1}

struct PartyRoster {
  std::map<std::string, Label> party_label;                    // party handle -> Left|Right
  std::map<std::string, std::vector<std::string>> followers;   // party handle -> follower ids
};

using PoliticianRoster = std::map<std::string, Label>;  // politician user id -> Left|Right
using MbfcClasses = std::map<std::string, std::string>;  // domain -> class

/// Sign of x with exact zero mapped to Neutral.
Label sign_label(double lean);

/// Mean hashtag code over coded occurrences; nullopt when none are coded.
std::optional<double> hashtag_lean(const UserRecord& user, const HashtagCodes& codes);
/// Mean slant over shared-domain occurrences present in the table.
std::optional<double> media_lean(const UserRecord& user, const SlantTable& table);

SeedLabels hashtag_proxy(const CorpusIndex& corpus, const HashtagCodes& codes);
SeedLabels party_follower_proxy(const CorpusIndex& corpus, const PartyRoster& roster);
SeedLabels politician_endorser_proxy(const CorpusIndex& corpus, const PoliticianRoster& roster);
SeedLabels mpp_left_right(const CorpusIndex& corpus, const SlantTable& table);
/// FarRight iff media lean > threshold (strict), otherwise Moderate.
SeedLabels mpp_far_right(const CorpusIndex& corpus, const SlantTable& table, double threshold = 0.5);
SeedLabels mbfc_far_right(const CorpusIndex& corpus, const MbfcClasses& mbfc);

struct GoldSplit {
  SeedLabels validation;
  SeedLabels test;
};

/// Reads user_id,label rows; indeterminable rows are dropped, labels outside the mode
/// are dropped with a warning, unknown tokens raise Format errors.
SeedLabels load_gold(const std::filesystem::path& path, Mode mode);
/// Even split by a seeded per-class shuffle; odd counts put the extra user in validation.
GoldSplit split_gold(const SeedLabels& gold, std::uint64_t seed);

HashtagCodes load_hashtag_codes(const std::filesystem::path& path);
/// party_roster.csv: party,label,followers_file (relative to the roster's directory).
PartyRoster load_party_roster(const std::filesystem::path& path);
PoliticianRoster load_politicians(const std::filesystem::path& path);
MbfcClasses load_mbfc(const std::filesystem::path& path);

void save_seeds(const SeedLabels& seeds, const std::filesystem::path& path);
SeedLabels load_seeds(const std::filesystem::path& path);

/// Proxy names used on the command line and in reports.
inline constexpr std::string_view kProxyHashtags = "hashtags";
inline constexpr std::string_view kProxyPartyFollowers = "party-followers";
inline constexpr std::string_view kProxyPoliticianEndorsers = "politician-endorsers";
inline constexpr std::string_view kProxyLeftRightMpp = "lr-mpp";
inline constexpr std::string_view kProxyFarRightMpp = "fr-mpp";
inline constexpr std::string_view kProxyMbfcMpp = "mbfc-mpp";

}  // namespace ideo
