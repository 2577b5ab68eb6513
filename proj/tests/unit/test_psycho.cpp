#include <cmath>
#include <fstream>

#include "doctest.h"
#include "ideo/psycho.hpp"
#include "json.hpp"

using namespace ideo;

namespace {

nlohmann::json oracles() {
  std::ifstream in(std::string(IDEO_TEST_DATA) + "/psycho_oracles.json");
  return nlohmann::json::parse(in);
}

std::vector<double> doubles(const nlohmann::json& j) { return j.get<std::vector<double>>(); }

// Two-dimensional vectors set by hand; one virtue and one vice word per foundation.
WordVectors toy_vectors(double scale = 1.0) {
  const std::vector<std::pair<std::string, std::array<double, 2>>> v = {
      {"kind", {1.0, 0.2}},   {"cruel", {-0.8, 0.1}}, {"fair", {0.3, 1.0}},  {"cheat", {0.1, -0.9}},
      {"loyal", {0.7, 0.7}},  {"traitor", {-0.6, -0.5}}, {"obey", {-0.2, 0.9}}, {"rebel", {0.4, -0.3}},
      {"pure", {0.5, 0.1}},   {"filth", {-0.5, 0.6}}, {"dog", {0.25, -0.75}}, {"tree", {-0.4, -0.1}},
  };
  std::vector<std::string> words;
  WordVectors::Matrix m(static_cast<Eigen::Index>(v.size()), 2);
  for (std::size_t i = 0; i < v.size(); ++i) {
    words.push_back(v[i].first);
    m(static_cast<Eigen::Index>(i), 0) = scale * v[i].second[0];
    m(static_cast<Eigen::Index>(i), 1) = scale * v[i].second[1];
  }
  return WordVectors(words, m);
}

MoralDictionary toy_dictionary() {
  MoralDictionary d;
  const std::array<std::pair<const char*, const char*>, 5> poles = {
      {{"kind", "cruel"}, {"fair", "cheat"}, {"loyal", "traitor"}, {"obey", "rebel"}, {"pure", "filth"}}};
  for (std::size_t f = 0; f < 5; ++f) {
    d.virtue[f] = {poles[f].first, "unembedded"};
    d.vice[f] = {poles[f].second};
  }
  return d;
}

CorpusIndex emoji_corpus(const std::vector<std::tuple<std::string, Label, std::int64_t>>& users, const std::string& e,
                         GroupAssignment& groups) {
  CorpusIndex c;
  for (const auto& [u, g, n] : users) {
    UserRecord r;
    r.user_id = u;
    r.post_count = 1;
    if (n > 0) r.emoji_counts[e] = n;
    c.users[u] = r;
    groups[u] = g;
  }
  return c;
}

}  // namespace

TEST_CASE("foundations and the vice/virtue rule") {
  CHECK(parse_foundation("Care") == Foundation::Care);
  CHECK(parse_foundation("purity") == Foundation::Sanctity);
  CHECK_THROWS_AS(parse_foundation("liberty"), Error);
  CHECK(is_individualizing(Foundation::Fairness));
  CHECK_FALSE(is_individualizing(Foundation::Loyalty));

  auto a = vice_virtue(0.2, 0.5);
  CHECK(a.virtue == 0.5);
  CHECK(a.vice == 0.0);
  a = vice_virtue(-0.1, 0.3);
  CHECK(a.virtue == 0.0);
  CHECK(a.vice == 0.3);
  a = vice_virtue(0.0, 0.9);
  CHECK(a.virtue == 0.0);
  CHECK(a.vice == 0.0);
}

TEST_CASE("frameaxis matches a direct evaluation") {
  const auto wv = toy_vectors();
  const auto axes = build_axes(toy_dictionary(), wv);
  CHECK(axes.virtue_found[0] == 1);

  const std::vector<std::string> users = {"a", "b", "c", "d"};
  const std::vector<Counts> tokens = {
      {{"kind", 2}, {"dog", 1}, {"unknown", 5}},
      {{"cheat", 1}, {"tree", 3}, {"pure", 1}},
      {{"dog", 1}},
      {{"nothing", 4}},
  };
  const auto s = frameaxis_scores(users, tokens, axes, wv);
  REQUIRE(s.users == std::vector<std::string>{"a", "b", "c"});
  CHECK(s.excluded == 1);
  CHECK(s.embedded_tokens == std::vector<std::int64_t>{3, 5, 1});

  // Direct evaluation with scalar arithmetic.
  const auto vec = [&](const std::string& w) {
    const auto r = wv.row(*wv.index(w));
    return std::array<double, 2>{r(0), r(1)};
  };
  const std::array<std::pair<const char*, const char*>, 5> poles = {
      {{"kind", "cruel"}, {"fair", "cheat"}, {"loyal", "traitor"}, {"obey", "rebel"}, {"pure", "filth"}}};
  for (int f = 0; f < 5; ++f) {
    const auto v = vec(poles[static_cast<std::size_t>(f)].first), x = vec(poles[static_cast<std::size_t>(f)].second);
    const double ax = v[0] - x[0], ay = v[1] - x[1];
    const auto sim = [&](const std::string& w) {
      const auto t = vec(w);
      return (t[0] * ax + t[1] * ay) / (std::hypot(t[0], t[1]) * std::hypot(ax, ay));
    };
    const double ba = (2 * sim("kind") + sim("dog")) / 3;
    const double bb = (sim("cheat") + 3 * sim("tree") + sim("pure")) / 5;
    const double bc = sim("dog");
    const double corpus = (2 * sim("kind") + 2 * sim("dog") + sim("cheat") + 3 * sim("tree") + sim("pure")) / 9;
    const auto sq = [&](double x) { return (x - corpus) * (x - corpus); };
    const double ia = (2 * sq(sim("kind")) + sq(sim("dog"))) / 3;
    const double ib = (sq(sim("cheat")) + 3 * sq(sim("tree")) + sq(sim("pure"))) / 5;
    CHECK(std::abs(s.bias(0, f) - ba) < 1e-9);
    CHECK(std::abs(s.bias(1, f) - bb) < 1e-9);
    CHECK(std::abs(s.bias(2, f) - bc) < 1e-9);
    CHECK(std::abs(s.corpus_bias(f) - corpus) < 1e-9);
    CHECK(std::abs(s.intensity(0, f) - ia) < 1e-9);
    CHECK(std::abs(s.intensity(1, f) - ib) < 1e-9);
    CHECK(std::abs(s.intensity(2, f) - sq(bc)) < 1e-9);
  }
}

TEST_CASE("frameaxis invariants") {
  const std::vector<std::string> users = {"a", "b", "c"};
  const std::vector<Counts> tokens = {{{"kind", 2}, {"dog", 1}}, {{"tree", 3}, {"filth", 1}}, {{"obey", 4}}};
  const auto base = frameaxis_scores(users, tokens, build_axes(toy_dictionary(), toy_vectors()), toy_vectors());
  const auto scaled_wv = toy_vectors(3.7);
  const auto scaled = frameaxis_scores(users, tokens, build_axes(toy_dictionary(), scaled_wv), scaled_wv);
  CHECK((base.bias - scaled.bias).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((base.intensity - scaled.intensity).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(base.intensity.minCoeff() >= 0.0);

  // A lone user with one token type sits on the corpus bias: zero intensity.
  const auto one = frameaxis_scores(std::vector<std::string>{"x"}, std::vector<Counts>{{{"dog", 5}}}, build_axes(toy_dictionary(), toy_vectors()), toy_vectors());
  CHECK(one.intensity.cwiseAbs().maxCoeff() < 1e-15);

  auto bad = toy_dictionary();
  bad.vice[3] = {"unembedded"};
  CHECK_THROWS_AS(build_axes(bad, toy_vectors()), Error);
}

TEST_CASE("grievance rates") {
  GrievanceDictionary d;
  d.categories = {"fixation", "violence"};
  d.words = {{"kill", {1}}, {"obsessed", {0}}, {"fight", {0, 1}}};
  const auto g = grievance_scores({"a", "b", "c", "d"},
                                  {{{"kill", 2}, {"the", 5}, {"fight", 1}}, {{"nice", 3}}, {{"kill", 4}}, {}}, d);
  REQUIRE(g.users == std::vector<std::string>{"a", "b", "c"});
  CHECK(g.rate(0, 0) == doctest::Approx(1.0 / 8));
  CHECK(g.rate(0, 1) == doctest::Approx(3.0 / 8));
  CHECK(g.rate.row(1).isZero());
  CHECK(g.rate(2, 1) == 1.0);
}

TEST_CASE("signed KL against numpy histograms") {
  for (const auto& c : oracles()["signed_kl"]) {
    const auto g = doubles(c["group"]), n = doubles(c["neutral"]);
    std::vector<double> pooled(g);
    pooled.insert(pooled.end(), n.begin(), n.end());
    const auto edges = freedman_diaconis_edges(pooled);
    const auto expected = doubles(c["edges"]);
    REQUIRE(edges.size() == expected.size());
    for (std::size_t i = 0; i < edges.size(); ++i) CHECK(std::abs(edges[i] - expected[i]) < 1e-12);
    CHECK(histogram_counts(g, edges) == doubles(c["group_counts"]));
    CHECK(histogram_counts(n, edges) == doubles(c["neutral_counts"]));
    CHECK(std::abs(signed_kl(g, n) - c["signed_kl"].get<double>()) < 1e-12);
  }
}

TEST_CASE("signed KL rules") {
  Eigen::VectorXd p(3), q(3);
  p << 0.2, 0.5, 0.3;
  q << 0.1, 0.6, 0.3;
  CHECK(std::abs(kl_divergence(p, q) - (0.2 * std::log(2.0) + 0.5 * std::log(0.5 / 0.6))) < 1e-12);
  CHECK(kl_divergence(p, p) == 0.0);

  const auto counts = laplace_distribution({3, 0, 1});
  CHECK(counts(0) == doctest::Approx(4.0 / 7));
  CHECK(counts(1) == doctest::Approx(1.0 / 7));

  Rng rng(4);
  std::vector<double> a(300), b(300);
  for (auto& x : a) x = rng.normal();
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = a[i] + 0.8;
  CHECK(signed_kl(a, a) == 0.0);
  CHECK(signed_kl(b, a) > 0.0);
  CHECK(signed_kl(a, b) < 0.0);
  CHECK(signed_kl({0.1, 0.1}, {0.1}) == 0.0);
  CHECK_THROWS_AS(signed_kl({}, {1.0}), Error);
}

TEST_CASE("rank-sum test against scipy") {
  for (const auto& c : oracles()["mann_whitney"]) {
    const auto alt = c["alternative"] == "greater" ? Alternative::Greater
                     : c["alternative"] == "less"  ? Alternative::Less
                                                   : Alternative::TwoSided;
    const auto r = mann_whitney(doubles(c["a"]), doubles(c["b"]), alt, c["continuity"].get<bool>());
    CHECK(r.u == c["u"].get<double>());
    CHECK(std::abs(r.p - c["p"].get<double>()) < 1e-12);
  }
}

TEST_CASE("rank-sum symmetry") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> a(500), b(500);
    for (auto& x : a) x = std::round(rng.normal() * 4) / 4;
    for (auto& x : b) x = std::round((rng.normal() + 0.1) * 4) / 4;
    const auto ab = mann_whitney(a, b, Alternative::Greater, false);
    const auto ba = mann_whitney(b, a, Alternative::Greater, false);
    CHECK(std::abs(ab.p + ba.p - 1.0) < 1e-12);
    // With the continuity correction the two p-values overlap by at most the mass the
    // correction moves: Phi(0.5/sd) - Phi(-0.5/sd) < 0.5/sd * sqrt(2/pi).
    const auto abc = mann_whitney(a, b, Alternative::Greater, true);
    const auto bac = mann_whitney(b, a, Alternative::Greater, true);
    const double sd = std::sqrt(500.0 * 500.0 * 1001.0 / 12.0);
    CHECK(abc.p + bac.p - 1.0 >= 0.0);
    CHECK(abc.p + bac.p - 1.0 <= 0.5 / sd * std::sqrt(2.0 / M_PI) + 1e-12);
  }
}

TEST_CASE("Holm step-down") {
  const auto r = holm_reject({0.001, 0.04, 0.04, 0.04}, 0.05, 20);
  CHECK(r == std::vector<bool>{true, false, false, false});
  CHECK(holm_reject({0.01, 0.02}, 0.05) == std::vector<bool>{true, true});
  CHECK(holm_reject({0.03, 0.02}, 0.05) == std::vector<bool>{true, true});
  CHECK(holm_reject({0.04, 0.03}, 0.05) == std::vector<bool>{false, false});
  CHECK(holm_reject({0.2, 0.001}, 0.05, 2) == std::vector<bool>{false, true});

  Rng rng(6);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> p(20);
    for (auto& x : p) x = std::pow(rng.uniform(), 3);
    const auto adj = holm_reject(p, 0.05);
    for (std::size_t i = 0; i < p.size(); ++i)
      if (adj[i]) CHECK(p[i] <= 0.05);
  }
}

TEST_CASE("hypothesis table") {
  Rng rng(7);
  DatasetMoral ds;
  ds.name = "toy";
  const int per = 500;
  ds.scores.bias.resize(3 * per, kNumFoundations);
  ds.scores.intensity.resize(3 * per, kNumFoundations);
  for (int i = 0; i < 3 * per; ++i) {
    const std::string u = "u" + std::to_string(i);
    ds.scores.users.push_back(u);
    const Label g = i < per ? Label::Left : i < 2 * per ? Label::Right : Label::Neutral;
    ds.groups[u] = g;
    for (int f = 0; f < kNumFoundations; ++f) {
      ds.scores.bias(i, f) = rng.normal();
      ds.scores.intensity(i, f) = rng.normal();
    }
    // Planted 3 sigma shift: the left is higher on care bias.
    if (g == Label::Left) ds.scores.bias(i, 0) += 3.0;
  }
  const auto t = mft_hypothesis_table({ds});
  REQUIRE(t.tests.size() == 20);
  CHECK(t.wins(Foundation::Care, "toy") == 1);
  CHECK(t.testable(Foundation::Care, "toy") == 2);  // far-right absent
  CHECK(t.tests[0].win);
  CHECK(t.tests[0].left_higher);
  CHECK_FALSE(t.tests[1].testable);
  int wins = 0;
  for (auto f : kFoundations) wins += t.wins(f, "toy");
  CHECK(wins == 1);

  // Identical samples win nothing.
  DatasetMoral same = ds;
  for (int i = 0; i < per; ++i) {
    same.scores.bias.row(i + per) = same.scores.bias.row(i);
    same.scores.intensity.row(i + per) = same.scores.intensity.row(i);
  }
  const auto z = mft_hypothesis_table({same});
  for (const auto& h : z.tests) CHECK_FALSE(h.win);
}

TEST_CASE("planted shift detection power") {
  int detected = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(99, {static_cast<std::uint64_t>(t)}));
    std::vector<double> left(500), right(500);
    for (auto& x : left) x = rng.normal() + 3.0;
    for (auto& x : right) x = rng.normal();
    std::vector<double> p{mann_whitney(left, right, Alternative::Greater).p};
    detected += holm_reject(p, 0.05, 20)[0];
  }
  CHECK(detected >= 95);
}

TEST_CASE("CDS n-gram matching and prevalence") {
  const auto pats = make_cds_patterns({{"always", "overgeneralizing"},
                                       {"Everyone knows", "overgeneralizing"},
                                       {"all or nothing", "dichotomous"},
                                       {"the worst", "catastrophizing"}});
  CHECK(pats.max_n == 3);
  CHECK(pats.distortions == std::vector<std::string>{"catastrophizing", "dichotomous", "overgeneralizing"});
  CHECK(cds_matches("It is ALL or nothing, everyone knows", pats) == std::vector<bool>{false, true, true});
  CHECK(cds_matches("allways worst", pats) == std::vector<bool>{false, false, false});
  CHECK_THROWS_AS(make_cds_patterns({{"a b c d e f", "x"}}), Error);

  CorpusIndex c;
  GroupAssignment groups;
  UserRecord left;
  left.user_id = "l";
  for (int i = 0; i < 10; ++i) left.post_texts.push_back(i < 3 ? "this is the worst" : "fine day");
  UserRecord right;
  right.user_id = "r";
  right.post_texts = {"always", "always angry"};
  c.users = {{"l", left}, {"r", right}};
  groups = {{"l", Label::Left}, {"r", Label::Right}, {"ghost", Label::FarRight}};

  const auto prev = cds_prevalence(c, pats, groups, 1000, 3);
  REQUIRE(prev.size() == 8);
  CHECK(prev[0].group == Label::Left);
  CHECK(prev[0].distortion == "any");
  CHECK(prev[0].prevalence == doctest::Approx(0.3));
  double m = 0;
  for (double b : prev[0].bootstrap) m += b;
  CHECK(std::abs(m / 1000 - 0.3) < 0.05);
  const auto& r_over = prev[7];
  CHECK(r_over.group == Label::Right);
  CHECK(r_over.distortion == "overgeneralizing");
  CHECK(r_over.prevalence == 1.0);
  for (double b : r_over.bootstrap) CHECK(b == 1.0);
  CHECK(prev[5].prevalence == 0.0);  // right, dichotomous

  const auto again = cds_prevalence(c, pats, groups, 1000, 3);
  CHECK(again[0].bootstrap == prev[0].bootstrap);
}

TEST_CASE("bootstrap mean converges to the point prevalence") {
  CorpusIndex c;
  UserRecord u;
  u.user_id = "u";
  Rng rng(8);
  for (int i = 0; i < 400; ++i) u.post_texts.push_back(rng.bernoulli(0.37) ? "always" : "never");
  c.users["u"] = u;
  const auto pats = make_cds_patterns({{"always", "overgeneralizing"}});
  const auto p = cds_prevalence(c, pats, {{"u", Label::Left}}, 2000, 1);
  double m = 0;
  for (double b : p[0].bootstrap) m += b;
  CHECK(std::abs(m / 2000 - p[0].prevalence) < 0.01);
}

TEST_CASE("logistic IRLS against statsmodels") {
  const auto o = oracles()["logistic"];
  const auto x1 = doubles(o["x1"]), y = doubles(o["y"]);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(y.size()), 2);
  Eigen::VectorXd Y(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) {
    X(static_cast<Eigen::Index>(i), 0) = 1.0;
    X(static_cast<Eigen::Index>(i), 1) = x1[i];
    Y(static_cast<Eigen::Index>(i)) = y[i];
  }
  const auto fit = logistic_irls(X, Y);
  CHECK(fit.converged);
  const auto beta = doubles(o["beta"]), se = doubles(o["se"]);
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(fit.beta(k) - beta[static_cast<std::size_t>(k)]) < 1e-9);
    CHECK(std::abs(fit.se(k) - se[static_cast<std::size_t>(k)]) < 1e-7);
  }
}

TEST_CASE("emoji odds equal the saturated closed form") {
  const std::string e = "\xF0\x9F\x98\x82";
  std::vector<std::tuple<std::string, Label, std::int64_t>> users;
  for (int i = 0; i < 8; ++i) users.emplace_back("l" + std::to_string(i), Label::Left, i < 6 ? 1 : 0);  // 75%
  for (int i = 0; i < 6; ++i) users.emplace_back("n" + std::to_string(i), Label::Neutral, i < 3 ? 2 : 0);  // 50%
  for (int i = 0; i < 5; ++i) users.emplace_back("r" + std::to_string(i), Label::Right, i < 2 ? 1 : 0);  // 40%
  for (int i = 0; i < 4; ++i) users.emplace_back("f" + std::to_string(i), Label::FarRight, 3);             // all
  GroupAssignment groups;
  const auto corpus = emoji_corpus(users, e, groups);
  const auto odds = emoji_odds(corpus, groups, {e});
  REQUIRE(odds.size() == 4);
  CHECK(odds[0].group == Label::Left);
  CHECK(std::abs(odds[0].odds - 3.0) < 1e-10);
  CHECK(std::abs(odds[1].odds - 1.0) < 1e-10);
  CHECK(std::abs(odds[2].coefficient - std::log(0.4 / 0.6)) < 1e-10);
  CHECK(std::abs(odds[0].se - std::sqrt(1.0 / 6 + 1.0 / 2)) < 1e-9);
  CHECK(odds[0].ci_low < 3.0);
  CHECK(odds[0].ci_high > 3.0);
  CHECK(odds[3].censored);
  CHECK_FALSE(odds[0].censored);
}

TEST_CASE("zero-truncated Poisson against statsmodels") {
  const auto o = oracles()["truncated_poisson"];
  const auto x1 = doubles(o["x1"]), y = doubles(o["y"]);
  std::vector<std::pair<Label, std::int64_t>> counts;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(y.size()), 2);
  Eigen::VectorXd Y(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) {
    X(static_cast<Eigen::Index>(i), 0) = 1.0;
    X(static_cast<Eigen::Index>(i), 1) = x1[i];
    Y(static_cast<Eigen::Index>(i)) = y[i];
    counts.emplace_back(x1[i] > 0 ? Label::Right : Label::Neutral, static_cast<std::int64_t>(y[i]));
  }
  const auto fit = truncated_poisson_newton(X, Y);
  CHECK(fit.converged);
  const auto beta = doubles(o["beta"]), se = doubles(o["se"]);
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(fit.beta(k) - beta[static_cast<std::size_t>(k)]) < 1e-7);
    CHECK(std::abs(fit.se(k) - se[static_cast<std::size_t>(k)]) < 1e-5);
  }
  const auto h = hurdle_model(counts, Label::Neutral);
  REQUIRE(h.terms.size() == 2);
  CHECK(h.terms[0].reference);
  CHECK(std::abs(h.terms[0].count_coef - beta[0]) < 1e-7);
  CHECK(std::abs(h.terms[1].count_coef - beta[1]) < 1e-7);
  CHECK(h.terms[0].zero_censored);  // every user has a positive count
}

TEST_CASE("truncated Poisson recovers the rate") {
  Rng rng(10);
  std::vector<std::pair<Label, std::int64_t>> counts;
  while (counts.size() < 5000) {
    const auto c = static_cast<std::int64_t>(rng.poisson(2.0));
    if (c > 0) counts.emplace_back(Label::Neutral, c);
  }
  for (int i = 0; i < 3000; ++i) counts.emplace_back(Label::Neutral, 0);
  const auto h = hurdle_model(counts, Label::Neutral);
  CHECK(std::abs(std::exp(h.terms[0].count_coef) - 2.0) < 0.1);
  CHECK(std::abs(h.terms[0].zero_coef - std::log(5000.0 / 3000.0)) < 1e-9);
  CHECK_FALSE(h.degenerate);
}

TEST_CASE("hurdle boundaries and zero part") {
  std::vector<std::pair<Label, std::int64_t>> counts;
  for (int i = 0; i < 10; ++i) counts.emplace_back(Label::Neutral, i % 4);   // 0,1,2,3,...
  for (int i = 0; i < 10; ++i) counts.emplace_back(Label::Left, i < 4 ? 1 : 0);  // only ones
  const auto h = hurdle_model(counts, Label::Neutral);
  REQUIRE(h.terms.size() == 2);
  CHECK(h.degenerate);
  CHECK(h.terms[1].group == Label::Left);
  CHECK(h.terms[1].count_degenerate);
  CHECK(std::isnan(h.terms[1].count_coef));
  // Zero part: reference intercept is the neutral logit, the left term the logit difference.
  const double ln = std::log(7.0 / 3.0), ll = std::log(4.0 / 6.0);
  CHECK(std::abs(h.terms[0].zero_coef - ln) < 1e-9);
  CHECK(std::abs(h.terms[1].zero_coef - (ll - ln)) < 1e-9);
  CHECK_THROWS_AS(hurdle_model(counts, Label::FarRight), Error);
}

TEST_CASE("group assignment") {
  Predictions lr;
  lr.row_ids = {"a", "b", "c", "d"};
  lr.classes = {Label::Left, Label::Right};
  lr.proba.resize(4, 2);
  lr.proba << 0.9, 0.1, 0.45, 0.55, 0.2, 0.8, 0.3, 0.7;
  Predictions fr;
  fr.row_ids = {"c", "d"};
  fr.classes = {Label::Moderate, Label::FarRight};
  fr.proba.resize(2, 2);
  fr.proba << 0.4, 0.6, 0.9, 0.1;
  const auto g = assign_groups(lr, &fr);
  CHECK(g.at("a") == Label::Left);
  CHECK(g.at("b") == Label::Neutral);
  CHECK(g.at("c") == Label::FarRight);
  CHECK(g.at("d") == Label::Right);
  CHECK(assign_groups(lr, nullptr).at("c") == Label::Right);
}

TEST_CASE("dictionary loading and a full profile") {
  const auto dir = std::filesystem::temp_directory_path() / "ideo_psycho_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "mft.tsv",
             "word\tfoundation\tpole\nkind\tcare\tvirtue\ncruel\tcare\tvice\nfair\tfairness\tvirtue\ncheat\tfairness\t"
             "vice\nloyal\tloyalty\tvirtue\ntraitor\tloyalty\tvice\nobey\tauthority\tvirtue\nrebel\tauthority\tvice\n"
             "pure\tsanctity\tvirtue\nfilth\tsanctity\tvice\n");
  write_file(dir / "grievance.tsv", "word\tcategory\tweight\ncruel\tviolence\t0.9\ndog\tfixation\t0.5\n");
  write_file(dir / "cds.tsv", "ngram\tdistortion\nalways\tovergeneralizing\n");
  toy_vectors().save(dir / "vecs.txt");
  const auto res = load_psycho_resources(dir / "mft.tsv", dir / "grievance.tsv", dir / "cds.tsv", dir / "vecs.txt");
  CHECK(res.moral.virtue[0] == std::vector<std::string>{"kind"});
  CHECK(res.grievance.categories == std::vector<std::string>{"fixation", "violence"});
  CHECK(res.grievance.weights.at("cruel") == 0.9);

  CorpusBuilder b;
  Rng rng(12);
  const std::vector<std::string> words = {"kind", "cruel", "fair", "dog", "tree", "always", "pure", "filth"};
  for (int u = 0; u < 60; ++u) {
    for (int p = 0; p < 3; ++p) {
      Post post;
      post.user_id = "u" + std::to_string(u);
      post.post_id = post.user_id + "_" + std::to_string(p);
      for (int k = 0; k < 6; ++k) post.text += words[rng.below(words.size())] + " ";
      if (u % 3 == 0) post.text += "\xF0\x9F\x87\xA6\xF0\x9F\x87\xBA";
      if (u % 2 == 0) post.text += " \xF0\x9F\x98\x82";
      b.add(post);
    }
  }
  const auto corpus = b.finish();
  GroupAssignment groups;
  for (int u = 0; u < 60; ++u) {
    groups["u" + std::to_string(u)] = kProfileGroups[static_cast<std::size_t>(u % 4)];
  }
  ProfileOptions opt;
  opt.bootstrap = 20;
  const auto report = profile({{"toy", &corpus, groups}}, res, opt);
  REQUIRE(report.datasets.size() == 1);
  const auto& d = report.datasets[0];
  CHECK(d.moral.users.size() == 60);
  CHECK(d.moral_groups.size() == 4);
  CHECK(d.grievance.size() == 6);
  CHECK(d.cds.size() == 8);
  CHECK(d.hurdle.has_value());
  CHECK(report.hypotheses.tests.size() == 20);
  save_profile_report(report, dir / "out");
  for (const char* f : {"profile_report.json", "vice_virtue.csv", "grievance_signed_kl.csv", "cds_prevalence.csv",
                        "emoji_odds.csv", "hurdle.csv", "hypotheses.csv", "hypotheses_win_loss.csv"}) {
    CHECK(std::filesystem::exists(dir / "out" / f));
  }
  const auto j = nlohmann::json::parse(read_file(dir / "out" / "profile_report.json"));
  CHECK(j["hypotheses"]["win_loss"].size() == 5);
  std::filesystem::remove_all(dir);
}
