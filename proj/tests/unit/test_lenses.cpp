#include <cstring>
#include <fstream>

#include "doctest.h"
#include "ideo/lenses.hpp"
#include "json.hpp"

using namespace ideo;

namespace {

const std::string kData = IDEO_TEST_DATA;

CorpusIndex toy_corpus() {
  CorpusIndex c;
  auto add = [&](std::string id, Counts tags, std::set<std::string> reshares) {
    UserRecord u;
    u.user_id = id;
    u.post_count = 1;
    u.hashtag_counts = std::move(tags);
    u.reshared_post_ids = std::move(reshares);
    for (const auto& p : u.reshared_post_ids) ++c.post_reshare_counts[p];
    c.users[id] = u;
  };
  add("A", {{"x", 10}, {"y", 11}}, {"p1", "p2"});
  add("B", {{"x", 1}}, {"p2", "p3"});
  add("C", {{"z", 3}}, {"p2"});
  add("D", {}, {});
  return c;
}

std::string temp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST_CASE("hashtag vocabulary keeps tags with at least ten occurrences") {
  const auto c = toy_corpus();
  const auto v = hashtag_vocabulary(c);
  CHECK(v.tags == std::vector<std::string>{"x", "y"});
  CHECK(v.df == std::vector<std::int64_t>{2, 1});
  CHECK(v.idf[0] == doctest::Approx(1.5108256237659907).epsilon(1e-15));
  CHECK(v.idf[1] == doctest::Approx(1.916290731874155).epsilon(1e-15));
  CHECK(v.idf[1] > v.idf[0]);  // lower df, higher idf
  // Nine occurrences is one short.
  auto c9 = c;
  c9.users["B"].hashtag_counts.clear();
  c9.users["A"].hashtag_counts["x"] = 9;
  CHECK(hashtag_vocabulary(c9).tags == std::vector<std::string>{"y"});
}

TEST_CASE("hashtag block equals tf times idf") {
  const auto c = toy_corpus();
  const auto v = hashtag_vocabulary(c);
  const std::vector<std::string> users{"A", "B", "C", "D"};
  const Eigen::MatrixXd m = Eigen::MatrixXd(hashtag_block(c, users, v));
  Eigen::MatrixXd expected(4, 2);
  expected << 10 * 1.5108256237659907, 11 * 1.916290731874155, 1 * 1.5108256237659907, 0, 0, 0, 0, 0;
  CHECK((m - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(hashtag_block(c, users, v).nonZeros() == 3);
}

TEST_CASE("reshare block is binary over the most reshared posts") {
  const auto c = toy_corpus();
  CHECK(top_reshared_posts(c) == std::vector<std::string>{"p2", "p1", "p3"});
  CHECK(top_reshared_posts(c, 2) == std::vector<std::string>{"p2", "p1"});
  const std::vector<std::string> users{"A", "B", "C", "D"};
  const Eigen::MatrixXd m = Eigen::MatrixXd(reshare_block(c, users, top_reshared_posts(c)));
  Eigen::MatrixXd expected(4, 3);
  expected << 1, 1, 0, 1, 0, 1, 1, 0, 0, 0, 0, 0;
  CHECK(m == expected);
  for (Eigen::Index i = 0; i < m.size(); ++i) CHECK((m.data()[i] == 0.0 || m.data()[i] == 1.0));
}

TEST_CASE("user resharing only the top post has a single one in column zero") {
  auto c = toy_corpus();
  UserRecord e;
  e.user_id = "E";
  e.post_count = 1;
  e.reshared_post_ids = {"p2"};
  c.users["E"] = e;
  ++c.post_reshare_counts["p2"];
  const Eigen::MatrixXd m = Eigen::MatrixXd(reshare_block(c, {"E"}, top_reshared_posts(c)));
  CHECK(m(0, 0) == 1.0);
  CHECK(m.sum() == 1.0);
}

TEST_CASE("lens selections") {
  const auto all = LensSelection::all();
  REQUIRE(all.size() == 7);
  std::vector<std::string> names;
  for (const auto& s : all) names.push_back(s.name());
  CHECK(names == std::vector<std::string>{"use", "ht", "rt", "use+ht", "use+rt", "ht+rt", "use+ht+rt"});
  CHECK(LensSelection::parse("rt+use") == all[4]);
  CHECK_THROWS_AS(LensSelection::parse(""), Error);
  CHECK_THROWS_AS(LensSelection::parse("foo"), Error);
}

TEST_CASE("assembly concatenates blocks in canonical order") {
  const auto c = toy_corpus();
  EmbeddingFile e;
  e.encoder = "test";
  e.ids = {"A", "B", "C"};
  e.vectors = EmbeddingFile::Matrix::Constant(3, 4, 0.5f);
  const std::vector<std::string> users{"A", "B", "C", "D"};
  std::vector<std::string> warnings;
  set_warning_sink([&](const std::string& w) { warnings.push_back(w); });
  const auto fm = assemble(LensSelection::parse("use+ht+rt"), c, users, &e);
  set_warning_sink(nullptr);
  CHECK(fm.width() == 4 + 2 + 3);
  REQUIRE(fm.blocks.size() == 3);
  CHECK(fm.blocks[0].name == "use");
  CHECK(fm.blocks[1].name == "ht");
  CHECK(fm.blocks[2].name == "rt");
  CHECK(fm.lens_name() == "use+ht+rt");
  CHECK(warnings.size() == 2);  // one missing embedding, fewer than 1000 reshared posts
  const auto d = fm.dense();
  CHECK(d.row(3).head(4).isZero());
  CHECK(d(0, 0) == 0.5);
  Eigen::RowVectorXd r(fm.width());
  for (Eigen::Index i = 0; i < fm.rows(); ++i) {
    fm.row(i, r);
    CHECK(r == d.row(i));
  }
  const auto again = assemble(LensSelection::parse("use+ht+rt"), c, users, &e);
  CHECK(again.dense() == d);
  CHECK_THROWS_AS(assemble(LensSelection::parse("use"), c, users, nullptr), Error);
}

TEST_CASE("lexical block pads missing users with zero rows") {
  EmbeddingFile e;
  e.ids = {"a", "b"};
  e.vectors.resize(2, 4);
  e.vectors << 1, 2, 3, 4, 5, 6, 7, 8;
  const auto lb = lexical_block(e, {"b", "zz", "a"});
  CHECK(lb.block.rows() == 3);
  CHECK(lb.block.cols() == 4);
  CHECK(lb.missing == 1);
  CHECK(lb.block(0, 0) == 5);
  CHECK(lb.block.row(1).isZero());
}

TEST_CASE("embedding file round trips bit-exactly") {
  EmbeddingFile e;
  e.encoder = "enc";
  e.ids = {"u1", "u2"};
  e.vectors.resize(2, 3);
  e.vectors << 0.1f, -0.0f, 1e-40f, 3.5f, -7.25f, 1e30f;
  const auto bytes = encode_embeddings(e);
  const auto back = decode_embeddings(bytes);
  CHECK(back == e);
  CHECK(encode_embeddings(back) == bytes);
  CHECK(std::signbit(back.vectors(0, 1)));
  const auto path = temp("ideo_emb.tsv");
  write_embeddings_tsv(e, path);
  CHECK(read_embeddings_tsv(path) == e);
  CHECK(load_embeddings(path) == e);
  std::filesystem::remove(path);
}

TEST_CASE("embedding file matches the shared conformance vector") {
  const auto bytes = read_file(kData + "/embeddings_vector.bin");
  const auto desc = nlohmann::json::parse(read_file(kData + "/embeddings_vector.json"));
  const auto f = decode_embeddings(bytes);
  CHECK(f.encoder == desc["encoder"].get<std::string>());
  REQUIRE(f.size() == desc["rows"].size());
  CHECK(f.dim() == desc["dim"].get<int>());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& row = desc["rows"][i];
    CHECK(f.ids[i] == row["id"].get<std::string>());
    for (Eigen::Index j = 0; j < f.dim(); ++j) {
      std::uint32_t bits;
      const float v = f.vectors(static_cast<Eigen::Index>(i), j);
      std::memcpy(&bits, &v, 4);
      CHECK(bits == row["bits"][static_cast<std::size_t>(j)].get<std::uint32_t>());
    }
  }
  CHECK(encode_embeddings(f) == bytes);
}

TEST_CASE("malformed embedding files are rejected") {
  EmbeddingFile e;
  e.encoder = "x";
  e.ids = {"a", "a"};
  e.vectors = EmbeddingFile::Matrix::Zero(2, 2);
  CHECK_THROWS_AS(decode_embeddings(encode_embeddings(e)), Error);
  e.ids = {"a", "b"};
  auto bytes = encode_embeddings(e);
  CHECK_THROWS_AS(decode_embeddings(bytes.substr(0, bytes.size() - 1)), Error);
  CHECK_THROWS_AS(decode_embeddings(bytes + "x"), Error);
  bytes[0] = 'X';
  CHECK_THROWS_AS(decode_embeddings(bytes), Error);
}

TEST_CASE("mean word vectors") {
  WordVectors::Matrix m(2, 2);
  m << 1, 0, 0, 1;
  const WordVectors wv({"good", "bad"}, m);
  CorpusIndex c;
  UserRecord a;
  a.user_id = "a";
  a.post_count = 1;
  a.concatenated_text = "Good good BAD unknown";
  UserRecord b;
  b.user_id = "b";
  b.post_count = 1;
  b.concatenated_text = "nothing here";
  c.users = {{"a", a}, {"b", b}};
  std::size_t empty = 0;
  const auto e = mean_word_vector_embeddings(c, wv, &empty);
  CHECK(empty == 1);
  CHECK(e.vectors(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(e.vectors(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(e.vectors.row(1).isZero());
}

TEST_CASE("feature matrix persistence, selection and alignment") {
  const auto c = toy_corpus();
  const std::vector<std::string> users{"A", "B", "C", "D"};
  EmbeddingFile e;
  e.ids = users;
  e.vectors = EmbeddingFile::Matrix::Random(4, 3);
  const auto fm = assemble(LensSelection::parse("use+ht+rt"), c, users, &e);
  const auto path = temp("ideo_features.bin");
  save_features(fm, path);
  const auto back = load_features(path);
  CHECK(back.row_ids == fm.row_ids);
  CHECK(back.dense() == fm.dense());
  CHECK(back.lens_name() == fm.lens_name());
  std::filesystem::remove(path);

  const auto sel = fm.select_rows({2, 0});
  CHECK(sel.row_ids == std::vector<std::string>{"C", "A"});
  CHECK(sel.dense().row(1) == fm.dense().row(0));
  const auto al = align_rows(fm, {"D", "B"});
  CHECK(al.dense().row(1) == fm.dense().row(1));
  CHECK_THROWS_AS(align_rows(fm, {"nobody"}), Error);
}
