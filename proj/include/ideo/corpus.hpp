#pragma once
// Post ingestion and per-user aggregation.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ideo/common.hpp"

namespace ideo {

struct Post {
  std::string post_id;
  std::string user_id;
  std::string text;
  std::optional<std::string> reshare_of;
  /// Author of the reshared post when the source record carries it.
  std::optional<std::string> reshare_user_id;
  bool is_quote = false;
  std::vector<std::string> hashtags;
  std::vector<std::string> urls;
  std::vector<std::string> mentions;
  std::optional<std::int64_t> timestamp;
};

/// Multiset keyed by string with deterministic (lexicographic) iteration.
using Counts = std::map<std::string, std::int64_t>;

struct UserRecord {
  std::string user_id;
  std::int64_t post_count = 0;
  /// Posts joined by '\n' in (timestamp, post_id) order, URLs/hashtags/mentions removed.
  std::string concatenated_text;
  /// Cleaned text of each post, same order as concatenated_text.
  std::vector<std::string> post_texts;
  Counts hashtag_counts;
  std::set<std::string> reshared_post_ids;
  Counts shared_domains;
  Counts retweeted_user_ids;
  Counts emoji_counts;

  bool operator==(const UserRecord&) const = default;
};

struct CorpusIndex {
  std::string dataset_id;
  std::map<std::string, UserRecord> users;
  std::map<std::string, std::int64_t> post_reshare_counts;

  std::size_t n_users() const { return users.size(); }
  std::int64_t n_posts() const;
  /// User ids in index (lexicographic) order.
  std::vector<std::string> user_ids() const;
  const UserRecord* find(std::string_view user_id) const;

  bool operator==(const CorpusIndex&) const = default;
};

enum class InputFormat { Generic, Twitter, Parler };
InputFormat parse_input_format(std::string_view name);

struct IngestOptions {
  InputFormat format = InputFormat::Generic;
  /// Quote posts count as reshares unless excluded.
  bool exclude_quotes = false;
  std::string dataset_id;
  /// Fraction of malformed lines above which ingestion fails.
  double max_malformed_fraction = 0.5;
};

struct IngestStats {
  std::int64_t lines = 0;
  std::int64_t malformed = 0;
  std::int64_t duplicates = 0;
  std::int64_t dropped_urls = 0;
};

/// Parses one line of the given format into a Post. Returns nullopt for malformed records.
std::optional<Post> parse_post(std::string_view line, InputFormat format);

/// Accumulates posts from any number of shards. The finished index depends only on the
/// multiset of posts added, never on the order they arrive or how they were sharded.
class CorpusBuilder {
 public:
  explicit CorpusBuilder(IngestOptions options = {});

  /// Parses and adds one line; blank lines are ignored.
  void add_line(std::string_view line);
  void add(Post post);
  void merge(CorpusBuilder&& other);

  /// Builds the index; throws CorpusQuality when the malformed fraction exceeds the limit.
  CorpusIndex finish();
  const IngestStats& stats() const { return stats_; }

 private:
  IngestOptions options_;
  IngestStats stats_;
  std::vector<Post> posts_;
};

CorpusIndex ingest(std::istream& in, const IngestOptions& options = {}, IngestStats* stats = nullptr);
CorpusIndex ingest_file(const std::filesystem::path& path, const IngestOptions& options = {},
                        IngestStats* stats = nullptr);

/// Registrable domains (public suffix + one label) of the parseable URLs.
std::vector<std::string> extract_domains(const std::vector<std::string>& urls,
                                         std::int64_t* dropped = nullptr);
std::optional<std::string> registrable_domain(std::string_view url);

/// Emoji grapheme clusters with multiplicity; regional-indicator pairs count as one flag.
Counts extract_emoji(std::string_view text);

/// Hashtags / mentions found in free text (#\w+ / @\w+), lowercased, without the sigil.
std::vector<std::string> hashtags_in_text(std::string_view text);
std::vector<std::string> mentions_in_text(std::string_view text);
/// Removes whitespace tokens that start with http, '#' or '@'.
std::string clean_text(std::string_view text);

/// Writes user_id<TAB>concatenated_text with newlines folded to spaces; the sentence
/// encoder adapter reads this.
void write_user_texts(const CorpusIndex& corpus, const std::filesystem::path& path);

/// Persists the index as JSON lines (one user per line) so later stages skip re-ingestion.
void save_corpus(const CorpusIndex& corpus, const std::filesystem::path& path);
CorpusIndex load_corpus(const std::filesystem::path& path);

}  // namespace ideo
