#pragma once
// Synthetic corpora with planted ideologies: posts, ground truth, and every side input the
// proxies, lenses and profiles consume.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ideo/corpus.hpp"
#include "ideo/mediaslant.hpp"
#include "ideo/proxies.hpp"
#include "ideo/wordvec.hpp"

namespace ideo {

struct SynthConfig {
  std::size_t n_users = 2000;
  double prior_left = 0.4;
  double prior_neutral = 0.2;
  double prior_right = 0.4;
  /// Share of right users who are far-right.
  double far_right_fraction = 0.25;
  /// Probability that a draw (token, hashtag, domain, follow, post profile) uses the
  /// author's class distribution rather than the common one. 0 makes classes identical.
  double class_signal = 0.3;
  /// Probability that a reshare targets a post from the author's own class.
  double homophily = 0.9;
  /// Share of users who post links to tabled news domains.
  double share_fraction = 0.15;
  /// Share of class vocabulary drawn from this corpus's own pool, whose semantic
  /// direction differs from the common pool. 1 makes corpora fully disjoint.
  double context_shift = 0.0;
  int corpus_index = 0;

  std::size_t vocab_per_class = 400;
  std::size_t shared_vocab = 2000;
  std::size_t hashtags_per_class = 40;
  std::size_t shared_hashtags = 60;
  std::size_t domains_per_class = 20;
  double posts_per_user = 6.0;
  double reshares_per_user = 4.0;
  int tokens_per_post = 12;
  std::size_t influencers_per_class = 25;
  std::size_t politicians_per_side = 10;
  double party_follow_rate = 0.1;
  std::size_t gold_size = 600;
  int word_dim = 50;
  std::size_t survey_participants = 400;

  /// Shared by corpora meant to live in one world (vocabulary vectors, domains, slants).
  std::uint64_t world_seed = 1;
  std::uint64_t rng_seed = 0;
  std::string dataset_id = "synth";

  void validate() const;
};

struct SynthCorpus {
  SynthConfig config;
  std::vector<Post> posts;
  /// Left | Neutral | Right | FarRight per user.
  std::map<std::string, Label> truth;
  WordVectors word_vectors;
  SlantTable slants;
  MbfcClasses mbfc;
  HashtagCodes hashtag_codes;
  PartyRoster parties;
  PoliticianRoster politicians;
  std::vector<SurveyRecord> survey;
  std::vector<AnchorRating> anchors;
  std::multimap<std::string, std::string> pubmap;
  /// user -> left|right|far-right|indeterminable
  std::map<std::string, std::string> gold;

  CorpusIndex index() const;
};

SynthCorpus generate(const SynthConfig& config);

/// Writes posts.jsonl, truth.csv, gold.csv, gold_left_right.csv, wordvecs.txt, slants.tsv,
/// survey.csv, anchors.csv, pubmap.csv, mbfc.csv, hashtag_codes.csv, party_roster.csv with
/// follower files, politicians.csv, mft_dictionary.tsv, grievance.tsv and cds.tsv.
void write_synth(const SynthCorpus& corpus, const std::filesystem::path& dir);

std::string post_json(const Post& post);

/// JSON object with SynthConfig field names as keys; unknown keys raise Config errors.
SynthConfig synth_config_from_json(const std::string& text, SynthConfig defaults = {});

/// Ground truth restricted to Left/Right, with FarRight counted as Right.
std::map<std::string, Label> left_right_truth(const std::map<std::string, Label>& truth);

}  // namespace ideo
