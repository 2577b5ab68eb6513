#include <cmath>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "ideo/common.hpp"
#include "ideo/psycho.hpp"
#include "ideo/synth.hpp"

using namespace ideo;

namespace {

SynthConfig small(std::uint64_t seed = 3) {
  SynthConfig c;
  c.n_users = 600;
  c.rng_seed = seed;
  c.gold_size = 100;
  c.survey_participants = 150;
  return c;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("ideo_synth_" + name);
  std::filesystem::remove_all(p);
  return p;
}

double accuracy(const SeedLabels& seeds, const std::map<std::string, Label>& truth) {
  std::size_t hit = 0, n = 0;
  for (const auto& [u, l] : seeds.labels) {
    auto it = truth.find(u);
    if (it == truth.end() || l == Label::Neutral) continue;
    ++n;
    hit += it->second == l;
  }
  return n ? static_cast<double>(hit) / static_cast<double>(n) : 0.0;
}

}  // namespace

TEST_CASE("same seed gives byte-identical output, different seed differs") {
  const auto a = generate(small(3)), b = generate(small(3)), c = generate(small(4));
  std::string sa, sb, sc;
  for (const auto& p : a.posts) sa += post_json(p) + "\n";
  for (const auto& p : b.posts) sb += post_json(p) + "\n";
  for (const auto& p : c.posts) sc += post_json(p) + "\n";
  CHECK(sa == sb);
  CHECK(sa != sc);
  CHECK(a.truth == b.truth);
  CHECK(a.gold == b.gold);
}

TEST_CASE("class priors are respected") {
  SynthConfig cfg = small();
  cfg.n_users = 5000;
  cfg.posts_per_user = 1;
  cfg.reshares_per_user = 0;
  const auto s = generate(cfg);
  std::map<Label, double> n;
  for (const auto& [u, l] : s.truth) n[l] += 1;
  const double N = 5000;
  const auto within = [&](double count, double p) { return std::abs(count - N * p) <= 3 * std::sqrt(N * p * (1 - p)); };
  CHECK(within(n[Label::Left], 0.4));
  CHECK(within(n[Label::Neutral], 0.2));
  CHECK(within(n[Label::Right] + n[Label::FarRight], 0.4));
  CHECK(within(n[Label::FarRight], 0.1));
}

TEST_CASE("validate rejects bad configurations") {
  SynthConfig c;
  c.prior_left = 0.5;
  CHECK_THROWS_AS(generate(c), Error);
  c = SynthConfig{};
  c.homophily = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = SynthConfig{};
  c.n_users = 2;
  CHECK_THROWS_AS(c.validate(), Error);
  c = SynthConfig{};
  c.politicians_per_side = c.influencers_per_class + 1;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("written corpus round-trips through ingestion and the loaders") {
  const auto s = generate(small());
  const auto dir = scratch("roundtrip");
  write_synth(s, dir);
  IngestOptions opt;
  opt.dataset_id = s.config.dataset_id;
  const auto from_file = ingest_file(dir / "posts.jsonl", opt);
  const auto direct = s.index();
  REQUIRE(from_file.users.size() == direct.users.size());
  for (const auto& [id, u] : direct.users) {
    const auto& v = from_file.users.at(id);
    CHECK(u.concatenated_text == v.concatenated_text);
    CHECK(u.hashtag_counts == v.hashtag_counts);
    CHECK(u.shared_domains == v.shared_domains);
    CHECK(u.reshared_post_ids == v.reshared_post_ids);
  }
  CHECK(load_slant_table(dir / "slants.tsv").slant == s.slants.slant);
  CHECK(load_hashtag_codes(dir / "hashtag_codes.csv") == s.hashtag_codes);
  CHECK(load_mbfc(dir / "mbfc.csv") == s.mbfc);
  CHECK(load_politicians(dir / "politicians.csv") == s.politicians);
  const auto roster = load_party_roster(dir / "party_roster.csv");
  CHECK(roster.party_label == s.parties.party_label);
  CHECK(roster.followers == s.parties.followers);
  CHECK(load_survey(dir / "survey.csv").size() == s.survey.size());
  CHECK(load_anchors(dir / "anchors.csv").size() == s.anchors.size());
  CHECK(load_pubmap(dir / "pubmap.csv").size() == s.pubmap.size());
  CHECK(WordVectors::load(dir / "wordvecs.txt").dim() == s.config.word_dim);
  const auto gold = load_gold(dir / "gold_left_right.csv", Mode::LeftRight);
  CHECK(gold.labels.size() > 50);
  const auto res = load_psycho_resources(dir / "mft_dictionary.tsv", dir / "grievance.tsv", dir / "cds.tsv",
                                         dir / "wordvecs.txt");
  CHECK(res.grievance.categories.size() == 4);
  std::filesystem::remove_all(dir);
}

TEST_CASE("planted signals reach the proxies") {
  SynthConfig cfg = small();
  cfg.n_users = 2000;
  const auto s = generate(cfg);
  const auto corpus = s.index();
  const auto lr = left_right_truth(s.truth);
  const auto hashtags = hashtag_proxy(corpus, s.hashtag_codes);
  CHECK(hashtags.labels.size() > 100);
  CHECK(accuracy(hashtags, lr) > 0.75);
  const auto media = mpp_left_right(corpus, s.slants);
  CHECK(media.labels.size() > 100);
  CHECK(accuracy(media, lr) > 0.65);
  const auto politicians = politician_endorser_proxy(corpus, s.politicians);
  CHECK(accuracy(politicians, lr) > 0.8);
  const auto far = mbfc_far_right(corpus, s.mbfc);
  std::size_t far_hit = 0, far_n = 0;
  for (const auto& [u, l] : far.labels) {
    if (l != Label::FarRight) continue;
    ++far_n;
    far_hit += s.truth.at(u) == Label::FarRight;
  }
  REQUIRE(far_n > 10);
  CHECK(static_cast<double>(far_hit) / static_cast<double>(far_n) > 0.3);
}

TEST_CASE("no class signal and no homophily makes proxies uninformative") {
  SynthConfig cfg = small();
  cfg.n_users = 3000;
  cfg.class_signal = 0.0;
  cfg.homophily = 0.0;
  const auto s = generate(cfg);
  const auto hashtags = hashtag_proxy(s.index(), s.hashtag_codes);
  REQUIRE(hashtags.labels.size() > 200);
  CHECK(std::abs(accuracy(hashtags, left_right_truth(s.truth)) - 0.5) < 0.08);
}

TEST_CASE("left_right_truth folds far-right into right and drops neutral") {
  const std::map<std::string, Label> t = {
      {"a", Label::Left}, {"b", Label::Neutral}, {"c", Label::Right}, {"d", Label::FarRight}};
  const auto lr = left_right_truth(t);
  CHECK(lr.size() == 3);
  CHECK(lr.at("d") == Label::Right);
  CHECK(lr.count("b") == 0);
}

TEST_CASE("post_json escapes and round-trips through the generic parser") {
  Post p;
  p.post_id = "x1";
  p.user_id = "u\"1";
  p.text = "line\nbreak \xF0\x9F\x94\xA5";
  p.reshare_of = "x0";
  p.reshare_user_id = "u0";
  p.hashtags = {"tag"};
  p.timestamp = 42;
  const auto back = parse_post(post_json(p), InputFormat::Generic);
  REQUIRE(back.has_value());
  CHECK(back->user_id == p.user_id);
  CHECK(back->text == p.text);
  CHECK(back->reshare_of == p.reshare_of);
  CHECK(back->reshare_user_id == p.reshare_user_id);
  CHECK(back->timestamp == p.timestamp);
}

TEST_CASE("synth config JSON overrides defaults and rejects unknown keys") {
  const auto c = synth_config_from_json(R"({"n_users": 50, "homophily": 0.2, "dataset_id": "z"})");
  CHECK(c.n_users == 50);
  CHECK(c.homophily == 0.2);
  CHECK(c.dataset_id == "z");
  CHECK(c.class_signal == SynthConfig{}.class_signal);
  CHECK_THROWS_AS(synth_config_from_json(R"({"users": 5})"), Error);
  CHECK_THROWS_AS(synth_config_from_json(R"({"n_users": "many"})"), Error);
}
