#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ideo/corpus.hpp"
#include "json.hpp"

using namespace ideo;
using nlohmann::json;

namespace {

CorpusIndex ingest_string(const std::string& s, IngestOptions opts = {}, IngestStats* stats = nullptr) {
  std::istringstream in(s);
  return ingest(in, opts, stats);
}

std::string post_line(const std::string& id, const std::string& user, const std::string& text,
                      const std::string& reshare = "", const std::string& reshare_user = "") {
  json j{{"post_id", id}, {"user_id", user}, {"text", text}};
  if (!reshare.empty()) j["reshare_of"] = reshare;
  if (!reshare_user.empty()) j["reshare_user_id"] = reshare_user;
  return j.dump() + "\n";
}

std::vector<json> read_jsonl(const std::string& name) {
  std::ifstream in(std::string(IDEO_TEST_DATA) + "/" + name);
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

}  // namespace

TEST_CASE("empty stream yields an empty index") {
  const auto c = ingest_string("");
  CHECK(c.n_users() == 0);
  CHECK(c.post_reshare_counts.empty());
}

TEST_CASE("a reshare records post, author and count") {
  const auto c = ingest_string(post_line("p", "B", "original") + post_line("q", "A", "RT", "p", "B"));
  const auto* a = c.find("A");
  REQUIRE(a != nullptr);
  CHECK(a->reshared_post_ids == std::set<std::string>{"p"});
  CHECK(a->retweeted_user_ids == Counts{{"B", 1}});
  CHECK(c.post_reshare_counts.at("p") == 1);
}

TEST_CASE("reshare author falls back to the corpus post author") {
  const auto c = ingest_string(post_line("p", "B", "original") + post_line("q", "A", "RT", "p"));
  CHECK(c.find("A")->retweeted_user_ids == Counts{{"B", 1}});
}

TEST_CASE("post counts are conserved") {
  IngestStats stats;
  const auto c = ingest_string(post_line("1", "A", "x") + post_line("2", "A", "y") + "{not json\n" +
                                   post_line("3", "B", "z"),
                               {}, &stats);
  CHECK(c.n_posts() == 3);
  CHECK(stats.malformed == 1);
  CHECK(stats.lines == 4);
  CHECK(c.n_posts() == stats.lines - stats.malformed);
}

TEST_CASE("too many malformed lines is a corpus-quality error") {
  try {
    ingest_string("x\ny\n" + post_line("1", "A", "t"));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CorpusQuality);
  }
}

TEST_CASE("text hygiene removes urls, hashtags and mentions") {
  const auto c = ingest_string(post_line("1", "A", "Hello @bob see https://x.com/a #Vote now") +
                               post_line("2", "A", "Second #two"));
  const auto* a = c.find("A");
  CHECK(a->concatenated_text == "Hello see now\nSecond");
  for (const auto& tok : split(a->concatenated_text, ' ')) {
    CHECK_FALSE(tok.rfind("http", 0) == 0);
    CHECK_FALSE(tok.rfind("#", 0) == 0);
    CHECK_FALSE(tok.rfind("@", 0) == 0);
  }
  CHECK(a->hashtag_counts == Counts{{"two", 1}, {"vote", 1}});
}

TEST_CASE("explicit hashtag field overrides text extraction and is normalized") {
  json j{{"post_id", "1"}, {"user_id", "A"}, {"text", "#ignored"}, {"hashtags", {"#Auspol", "auspol"}}};
  const auto c = ingest_string(j.dump() + "\n");
  CHECK(c.find("A")->hashtag_counts == Counts{{"auspol", 2}});
}

TEST_CASE("ingestion is idempotent and order independent") {
  std::string a = post_line("1", "A", "x #t") + post_line("2", "B", "y", "1") + post_line("3", "C", "z", "1");
  std::string b = post_line("3", "C", "z", "1") + post_line("1", "A", "x #t") + post_line("2", "B", "y", "1");
  CHECK(ingest_string(a) == ingest_string(a));
  CHECK(ingest_string(a) == ingest_string(b));

  CorpusBuilder s1, s2;
  s1.add_line(post_line("3", "C", "z", "1"));
  s2.add_line(post_line("1", "A", "x #t"));
  s2.add_line(post_line("2", "B", "y", "1"));
  s1.merge(std::move(s2));
  CHECK(s1.finish() == ingest_string(a));
}

TEST_CASE("reshare symmetry holds") {
  std::string s;
  for (int i = 0; i < 30; ++i) {
    s += post_line("r" + std::to_string(i), "u" + std::to_string(i % 7), "t", "p" + std::to_string(i % 4));
  }
  const auto c = ingest_string(s);
  std::map<std::string, std::int64_t> direct;
  for (int i = 0; i < 30; ++i) ++direct["p" + std::to_string(i % 4)];
  CHECK(c.post_reshare_counts == direct);
}

TEST_CASE("quote posts are reshares unless excluded") {
  json q{{"post_id", "2"}, {"user_id", "A"}, {"text", "hm"}, {"reshare_of", "1"}, {"is_quote", true}};
  const std::string s = post_line("1", "B", "orig") + q.dump() + "\n";
  CHECK(ingest_string(s).find("A")->reshared_post_ids.size() == 1);
  IngestOptions opts;
  opts.exclude_quotes = true;
  CHECK(ingest_string(s, opts).find("A")->reshared_post_ids.empty());
}

TEST_CASE("twitter v1 and v2 adapters") {
  json v1{{"id_str", "10"},
          {"user", {{"id_str", "u1"}}},
          {"full_text", "RT hi #Tag"},
          {"retweeted_status", {{"id_str", "9"}, {"user", {{"id_str", "u2"}}}}},
          {"entities", {{"hashtags", {{{"text", "Tag"}}}}, {"urls", {{{"expanded_url", "https://www.abc.net.au/x"}}}}}}};
  json v2{{"id", "11"},
          {"author_id", "u3"},
          {"text", "quoting"},
          {"referenced_tweets", {{{"type", "quoted"}, {"id", "9"}}}}};
  IngestOptions opts;
  opts.format = InputFormat::Twitter;
  const auto c = ingest_string(v1.dump() + "\n" + v2.dump() + "\n", opts);
  const auto* u1 = c.find("u1");
  REQUIRE(u1);
  CHECK(u1->hashtag_counts == Counts{{"tag", 1}});
  CHECK(u1->shared_domains == Counts{{"abc.net.au", 1}});
  CHECK(u1->retweeted_user_ids == Counts{{"u2", 1}});
  CHECK(c.find("u3")->reshared_post_ids == std::set<std::string>{"9"});
  CHECK(c.post_reshare_counts.at("9") == 2);
}

TEST_CASE("parler adapter extracts hashtags from body") {
  json p{{"id", "a1"}, {"creator", "pat"}, {"body", "Stop the #Steal now"}, {"echo_of", "a0"}};
  IngestOptions opts;
  opts.format = InputFormat::Parler;
  const auto c = ingest_string(p.dump() + "\n", opts);
  const auto* u = c.find("pat");
  REQUIRE(u);
  CHECK(u->hashtag_counts == Counts{{"steal", 1}});
  CHECK(u->reshared_post_ids == std::set<std::string>{"a0"});
}

TEST_CASE("domain extraction examples") {
  CHECK(extract_domains({"https://www.foxnews.com/politics/x?y=1"}) == std::vector<std::string>{"foxnews.com"});
  CHECK(extract_domains({}).empty());
  std::int64_t dropped = 0;
  CHECK(extract_domains({"not a url", "http://Vox.com/a"}, &dropped) == std::vector<std::string>{"vox.com"});
  CHECK(dropped == 1);
}

TEST_CASE("domain extraction matches the reference URL parser vectors") {
  const auto cases = read_jsonl("domain_oracle.jsonl");
  REQUIRE(cases.size() >= 20);
  for (const auto& c : cases) {
    const auto got = registrable_domain(c["url"].get<std::string>());
    INFO(c["url"].get<std::string>());
    if (c["domain"].is_null()) {
      CHECK_FALSE(got.has_value());
    } else {
      REQUIRE(got.has_value());
      CHECK(*got == c["domain"].get<std::string>());
    }
  }
}

TEST_CASE("emoji examples") {
  CHECK(extract_emoji("g'day 🇦🇺🇦🇺") == Counts{{"🇦🇺", 2}});
  CHECK(extract_emoji("no emoji").empty());
  CHECK(extract_emoji("🏳️‍🌈☕") == Counts{{"🏳️‍🌈", 1}, {"☕", 1}});
}

TEST_CASE("emoji extraction matches grapheme segmentation vectors") {
  const auto cases = read_jsonl("emoji_oracle.jsonl");
  REQUIRE(cases.size() >= 20);
  for (const auto& c : cases) {
    Counts expected;
    for (const auto& [k, v] : c["emoji"].items()) expected[k] = v.get<std::int64_t>();
    INFO(c["text"].get<std::string>());
    CHECK(extract_emoji(c["text"].get<std::string>()) == expected);
  }
}

TEST_CASE("emoji counts are aggregated per user") {
  const auto c = ingest_string(post_line("1", "A", "go 🇦🇺") + post_line("2", "A", "🇦🇺 🔥"));
  CHECK(c.find("A")->emoji_counts == Counts{{"🇦🇺", 2}, {"🔥", 1}});
}

TEST_CASE("corpus save/load round trip") {
  const auto c = ingest_string(post_line("1", "A", "x #t https://www.vox.com/a 😀") + post_line("2", "B", "y", "1"));
  const auto path = std::filesystem::temp_directory_path() / "ideo_corpus_rt.jsonl";
  save_corpus(c, path);
  CHECK(load_corpus(path) == c);
  std::filesystem::remove(path);
}
