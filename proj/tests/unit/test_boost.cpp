#include <chrono>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "ideo/boost.hpp"
#include "ideo/metrics.hpp"

using namespace ideo;

namespace {

struct Blobs {
  Eigen::MatrixXd X;
  std::vector<int> y;
};

Blobs blobs(int n, int d, double sep, std::uint64_t seed) {
  Rng rng(seed);
  Blobs b{Eigen::MatrixXd(n, d), std::vector<int>(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i) {
    const int c = i % 2;
    b.y[static_cast<std::size_t>(i)] = c;
    for (int j = 0; j < d; ++j) b.X(i, j) = rng.normal() + (j == 0 ? (c ? sep : -sep) : 0.0);
  }
  return b;
}

std::vector<int> argmax_rows(const Eigen::MatrixXd& p) {
  std::vector<int> out(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i).maxCoeff(&out[static_cast<std::size_t>(i)]);
  return out;
}

double accuracy(const std::vector<int>& a, const std::vector<int>& b) {
  double hit = 0;
  for (std::size_t i = 0; i < a.size(); ++i) hit += a[i] == b[i];
  return hit / static_cast<double>(a.size());
}

BoostConfig stump_config() {
  BoostConfig c;
  c.n_estimators = 1;
  c.max_leaves = 2;
  c.min_samples_leaf = 1;
  c.min_child_hessian = 0.0;
  c.exact_splits = true;
  c.class_balance = false;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  BoostConfig c;
  CHECK_NOTHROW(c.validate());
  c.n_estimators = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = BoostConfig{};
  c.learning_rate = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.learning_rate = 1.0;
  CHECK_NOTHROW(c.validate());
  CHECK(BoostConfig::for_mode(Mode::LeftRight).n_estimators == 200);
  CHECK(BoostConfig::for_mode(Mode::FarRight).n_estimators == 100);
}

TEST_CASE("single stump equals exhaustive second-order split search") {
  Rng rng(4);
  const int n = 60;
  Eigen::MatrixXd X(n, 1);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = std::round(rng.uniform(0, 30));
    y[static_cast<std::size_t>(i)] = (X(i, 0) > 17) != rng.bernoulli(0.15);
  }
  const auto m = train(X, y, 2, stump_config());
  REQUIRE(m.functions.size() == 1);
  const auto& tree = m.functions[0].trees.at(0);
  REQUIRE(tree.nodes.size() == 3);

  // Oracle: gradients at the log-odds prior, every midpoint between distinct values.
  double pos = 0;
  for (int v : y) pos += v;
  const double f0 = std::log(pos / (n - pos));
  CHECK(m.functions[0].init_score == doctest::Approx(f0).epsilon(1e-14));
  const double p0 = 1 / (1 + std::exp(-f0));
  std::vector<double> vals(X.data(), X.data() + n);
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  double best_gain = 0, best_t = 0, best_l = 0, best_r = 0;
  for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
    const double t = 0.5 * (vals[k] + vals[k + 1]);
    double gl = 0, hl = 0, gr = 0, hr = 0;
    for (int i = 0; i < n; ++i) {
      const double g = p0 - y[static_cast<std::size_t>(i)], h = p0 * (1 - p0);
      if (X(i, 0) <= t) {
        gl += g;
        hl += h;
      } else {
        gr += g;
        hr += h;
      }
    }
    const double gain = gl * gl / hl + gr * gr / hr - (gl + gr) * (gl + gr) / (hl + hr);
    if (gain > best_gain) {
      best_gain = gain;
      best_t = t;
      best_l = -0.1 * gl / hl;
      best_r = -0.1 * gr / hr;
    }
  }
  CHECK(tree.nodes[0].feature == 0);
  CHECK(tree.nodes[0].threshold == best_t);
  CHECK(tree.nodes[static_cast<std::size_t>(tree.nodes[0].left)].value == doctest::Approx(best_l).epsilon(1e-12));
  CHECK(tree.nodes[static_cast<std::size_t>(tree.nodes[0].right)].value == doctest::Approx(best_r).epsilon(1e-12));
}

TEST_CASE("stump on a threshold dataset recovers the threshold and labels") {
  const int n = 40;
  Eigen::MatrixXd X(n, 1);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = i;
    y[static_cast<std::size_t>(i)] = i >= 13;
  }
  auto cfg = stump_config();
  cfg.class_balance = true;
  const auto m = train(X, y, 2, cfg);
  CHECK(m.functions[0].trees[0].nodes[0].threshold == 12.5);
  CHECK(argmax_rows(predict_proba(m, X)) == y);
}

TEST_CASE("separable blobs are learned") {
  const auto b = blobs(200, 2, 4.0, 1);
  const auto m = train(b.X, b.y, 2, BoostConfig{});
  CHECK(accuracy(argmax_rows(predict_proba(m, b.X)), b.y) >= 0.99);
}

TEST_CASE("three-class one-vs-rest") {
  Rng rng(8);
  const int n = 300;
  Eigen::MatrixXd X(n, 2);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    const int c = i % 3;
    y[static_cast<std::size_t>(i)] = c;
    X(i, 0) = rng.normal() + 5.0 * c;
    X(i, 1) = rng.normal();
  }
  BoostConfig cfg;
  cfg.n_estimators = 50;
  const auto m = train(X, y, 3, cfg);
  CHECK(m.functions.size() == 3);
  const auto p = predict_proba(m, X);
  CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-9);
  CHECK(accuracy(argmax_rows(p), y) > 0.97);
}

TEST_CASE("training is byte-deterministic") {
  const auto b = blobs(500, 5, 1.0, 3);
  BoostConfig cfg;
  cfg.n_estimators = 30;
  cfg.feature_fraction = 0.6;
  cfg.rng_seed = 77;
  const auto s1 = serialize_model(train(b.X, b.y, 2, cfg));
  set_worker_count(3);
  const auto s2 = serialize_model(train(b.X, b.y, 2, cfg));
  set_worker_count(1);
  const auto s3 = serialize_model(train(b.X, b.y, 2, cfg));
  CHECK(s1 == s2);
  CHECK(s1 == s3);
}

TEST_CASE("training loss is non-increasing") {
  const auto b = blobs(800, 6, 0.5, 5);
  BoostConfig cfg;
  cfg.n_estimators = 60;
  const auto m = train(b.X, b.y, 2, cfg);
  REQUIRE(m.training_loss.size() == 60);
  for (std::size_t t = 1; t < m.training_loss.size(); ++t) CHECK(m.training_loss[t] <= m.training_loss[t - 1] + 1e-12);
}

TEST_CASE("duplicated training set gives the same predictions") {
  const auto b = blobs(300, 4, 0.8, 6);
  Eigen::MatrixXd X2(600, 4);
  X2 << b.X, b.X;
  std::vector<int> y2 = b.y;
  y2.insert(y2.end(), b.y.begin(), b.y.end());
  BoostConfig cfg;
  cfg.n_estimators = 40;
  cfg.min_samples_leaf = 1;
  cfg.min_child_hessian = 0.0;
  const auto p1 = predict_proba(train(b.X, b.y, 2, cfg), b.X);
  const auto p2 = predict_proba(train(X2, y2, 2, cfg), b.X);
  CHECK((p1 - p2).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("feature permutation equivariance") {
  const auto b = blobs(400, 6, 0.7, 9);
  std::vector<Eigen::Index> perm{3, 0, 5, 1, 4, 2};
  Eigen::MatrixXd Xp(b.X.rows(), b.X.cols());
  for (Eigen::Index j = 0; j < 6; ++j) Xp.col(j) = b.X.col(perm[static_cast<std::size_t>(j)]);
  BoostConfig cfg;
  cfg.n_estimators = 40;
  const auto p1 = predict_proba(train(b.X, b.y, 2, cfg), b.X);
  const auto p2 = predict_proba(train(Xp, b.y, 2, cfg), Xp);
  CHECK((p1 - p2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("class balance reweights rare classes") {
  Rng rng(10);
  const int n = 1000;
  Eigen::MatrixXd X(n, 1);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = i < 100;
    X(i, 0) = rng.normal() + (i < 100 ? 1.0 : 0.0);
  }
  BoostConfig bal, unbal;
  bal.n_estimators = unbal.n_estimators = 20;
  unbal.class_balance = false;
  const auto mb = train(X, y, 2, bal), mu = train(X, y, 2, unbal);
  CHECK(mb.functions[0].init_score == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mu.functions[0].init_score == doctest::Approx(std::log(100.0 / 900.0)));
  CHECK(predict_proba(mb, X).col(1).mean() > predict_proba(mu, X).col(1).mean());
}

TEST_CASE("training preconditions") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(10, 2);
  CHECK_THROWS_AS(train(X, std::vector<int>(10, 1), 2, BoostConfig{}), Error);
  CHECK_THROWS_AS(train(X, std::vector<int>(9, 1), 2, BoostConfig{}), Error);
  X(0, 0) = std::nan("");
  std::vector<int> y(10, 0);
  y[1] = 1;
  CHECK_THROWS_AS(train(X, y, 2, BoostConfig{}), Error);
}

TEST_CASE("predictions: width checks, normalization and the symmetric boundary") {
  const auto b = blobs(200, 3, 1.0, 11);
  const auto m = train(b.X, b.y, 2, BoostConfig{});
  CHECK_THROWS_AS(predict_proba(m, Eigen::MatrixXd::Zero(2, 4)), Error);
  const auto p = predict_proba(m, Eigen::MatrixXd::Random(50, 3) * 10);
  CHECK(p.allFinite());
  CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-9);

  BoostModel sym;
  sym.classes = {Label::Left, Label::Right};
  sym.width = 1;
  sym.functions.resize(1);
  Tree t;
  t.nodes = {TreeNode{0, 0.0, 1, 2, 0.0}, TreeNode{-1, 0, -1, -1, -1.0}, TreeNode{-1, 0, -1, -1, 1.0}};
  sym.functions[0].trees.push_back(t);
  Eigen::RowVectorXd x(1);
  x << 0.0;
  const auto pb = sym.predict_row(x);
  CHECK(pb(0) == doctest::Approx(1 / (1 + std::exp(-1.0))).epsilon(1e-15));
  sym.functions[0].trees.clear();
  CHECK(sym.predict_row(x)(0) == 0.5);
  CHECK(sym.predict_row(x)(1) == 0.5);
}

TEST_CASE("feature-matrix training drops neutral seeds") {
  FeatureMatrix fm;
  const int n = 120;
  DenseBlock d(n, 2);
  Rng rng(12);
  SeedLabels seeds{Mode::LeftRight, "lr-mpp", {}, 0, false};
  for (int i = 0; i < n; ++i) {
    fm.row_ids.push_back("u" + std::to_string(i));
    const int c = i % 3;
    d(i, 0) = rng.normal() + 3.0 * c;
    d(i, 1) = rng.normal();
    if (i < 90) seeds.labels[fm.row_ids.back()] = c == 0 ? Label::Left : c == 1 ? Label::Neutral : Label::Right;
  }
  fm.blocks.push_back({"use", d, {}});
  BoostConfig cfg;
  cfg.n_estimators = 20;
  const auto m = train(fm, seeds, cfg);
  CHECK(m.seed_counts == std::vector<std::int64_t>{30, 30});
  CHECK(m.proxy_name == "lr-mpp");
  CHECK(m.lens_name == "use");
  const auto pr = predict_proba(m, fm);
  CHECK(pr.row_ids == fm.row_ids);
  CHECK(pr.proba.rows() == n);
  CHECK(pr.class_column(Label::Right) == 1);
  CHECK(pr.class_column(Label::FarRight) == -1);

  SeedLabels one{Mode::LeftRight, "x", {{"u0", Label::Left}, {"u3", Label::Left}}, 0, false};
  CHECK_THROWS_AS(train(fm, one, cfg), Error);
}

TEST_CASE("model serialization round trips") {
  const auto b = blobs(300, 4, 1.0, 13);
  BoostConfig cfg;
  cfg.n_estimators = 25;
  auto m = train(b.X, b.y, 2, cfg);
  m.proxy_name = "hashtags";
  m.classes = {Label::Left, Label::Right};
  const auto bytes = serialize_model(m);
  const auto back = deserialize_model(bytes);
  CHECK(serialize_model(back) == bytes);
  Rng rng(14);
  Eigen::MatrixXd R(1000, 4);
  for (Eigen::Index i = 0; i < R.size(); ++i) R.data()[i] = rng.normal() * 3;
  CHECK(predict_proba(m, R) == predict_proba(back, R));
  CHECK(back.proxy_name == "hashtags");
  CHECK(model_json(back).find("\"functions\"") != std::string::npos);
  CHECK_THROWS_AS(deserialize_model(bytes.substr(0, bytes.size() - 3)), Error);
  CHECK_THROWS_AS(deserialize_model("IDEOGBM2" + bytes.substr(8)), Error);
}

TEST_CASE("threshold calibration") {
  // Separated scores: any threshold in (0.3, 0.7] is optimal; the tie rule picks 0.5.
  Eigen::MatrixXd p(6, 2);
  p.col(1) << 0.1, 0.2, 0.3, 0.7, 0.8, 0.9;
  p.col(0) = 1 - p.col(1).array();
  const std::vector<int> y{0, 0, 0, 1, 1, 1};
  const auto c = calibrate_threshold(p, y);
  REQUIRE(c.thresholds.size() == 1);
  CHECK(c.thresholds[0] == 0.5);
  CHECK(c.validation_f1_macro == 1.0);

  // Gap above 0.5 only: the closest optimal threshold to 0.5 is 0.61.
  p.col(1) << 0.1, 0.2, 0.6, 0.7, 0.8, 0.9;
  p.col(0) = 1 - p.col(1).array();
  const auto c2 = calibrate_threshold(p, y);
  CHECK(c2.thresholds[0] == doctest::Approx(0.61));

  // All-one-class predictions still give a defined F1 (zero-division = 0).
  Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(6, 2, 0.5);
  const auto c3 = calibrate_threshold(flat, y);
  CHECK(c3.validation_f1_macro == doctest::Approx(1.0 / 3.0));

  Rng rng(15);
  Eigen::MatrixXd r(1000, 2);
  std::vector<int> ry(1000);
  for (int i = 0; i < 1000; ++i) {
    r(i, 1) = rng.uniform();
    r(i, 0) = 1 - r(i, 1);
    ry[static_cast<std::size_t>(i)] = rng.bernoulli(0.5);
  }
  const auto c4 = calibrate_threshold(r, ry);
  CHECK(std::abs(c4.validation_f1_macro - 0.5) < 0.05);
  CHECK(c4.thresholds[0] > 0.0);
  CHECK(c4.thresholds[0] < 1.0);
  CHECK_THROWS_AS(calibrate_threshold(Eigen::MatrixXd(0, 2), {}), Error);
}

TEST_CASE("multiclass calibration uses per-class offsets") {
  Eigen::MatrixXd p(3, 3);
  p << 0.5, 0.3, 0.2, 0.2, 0.5, 0.3, 0.3, 0.2, 0.5;
  const auto c = calibrate_threshold(p, {0, 1, 2});
  CHECK(c.thresholds.size() == 3);
  CHECK(c.validation_f1_macro == 1.0);
}

TEST_CASE("top confident users") {
  Predictions p;
  p.row_ids = {"a", "b", "c", "d"};
  p.classes = {Label::Left, Label::Right};
  p.proba.resize(4, 2);
  p.proba << 0.9, 0.1, 0.9, 0.1, 0.2, 0.8, 0.4, 0.6;
  const auto k1 = top_confident(p, 1);
  CHECK(k1[0] == std::vector<std::string>{"a"});
  CHECK(k1[1] == std::vector<std::string>{"c"});
  std::vector<std::string> warnings;
  set_warning_sink([&](const std::string& w) { warnings.push_back(w); });
  const auto k9 = top_confident(p, 9);
  set_warning_sink(nullptr);
  CHECK(k9[0].size() + k9[1].size() == 4);
  CHECK(warnings.size() == 2);
  CHECK_THROWS_AS(top_confident(p, 0), Error);
}

TEST_CASE("training speed on a wide matrix") {
  const auto b = blobs(10000, 600, 0.3, 16);
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = train(b.X, b.y, 2, BoostConfig{});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("10000 x 600 training took " << secs << " s");
  CHECK(m.functions[0].trees.size() == 200);
  CHECK(secs < 30.0);
}
