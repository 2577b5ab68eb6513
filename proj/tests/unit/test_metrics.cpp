#include <cmath>
#include <numeric>

#include "doctest.h"
#include "ideo/common.hpp"
#include "ideo/metrics.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace ideo;

TEST_CASE("binary AUC basics") {
  CHECK(roc_auc(std::vector<double>{1, 2, 3, 4}, std::vector<int>{0, 0, 1, 1}) == 1.0);
  CHECK(roc_auc(std::vector<double>{4, 3, 2, 1}, std::vector<int>{0, 0, 1, 1}) == 0.0);
  CHECK(roc_auc(std::vector<double>{1, 1, 1, 1}, std::vector<int>{0, 1, 0, 1}) == 0.5);
  Eigen::VectorXd s(4);
  s << 0.1, 0.4, 0.35, 0.8;
  Eigen::VectorXi y(4);
  y << 0, 0, 1, 1;
  CHECK(roc_auc(s, y) == 0.75);
  CHECK(roc_auc(s.array().exp().matrix(), y) == 0.75);
}

TEST_CASE("single-class labels are an undefined metric") {
  try {
    roc_auc(std::vector<double>{1, 2}, std::vector<int>{1, 1});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UndefinedMetric);
  }
  Eigen::MatrixXd s = Eigen::MatrixXd::Random(3, 3);
  Eigen::VectorXi y = Eigen::VectorXi::Constant(3, 2);
  CHECK_THROWS_AS(roc_auc_ovo(s, y), Error);
}

TEST_CASE("frozen reference cases") {
  const auto cases = nlohmann::json::parse(read_file(std::string(IDEO_TEST_DATA) + "/metric_cases.json"));
  for (const auto& c : cases) {
    const auto kind = c["kind"].get<std::string>();
    const auto labels = c["labels"].get<std::vector<int>>();
    if (kind == "binary") {
      const auto s = c["scores"].get<std::vector<double>>();
      CHECK(std::abs(roc_auc(s, labels) - c["auc"].get<double>()) < 1e-12);
      CHECK(std::abs(roc_auc(s, labels) - oracle::auc_pairs(s, labels)) < 1e-12);
    } else if (kind == "ovo") {
      const auto rows = c["scores"].get<std::vector<std::vector<double>>>();
      Eigen::MatrixXd s(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
      }
      const Eigen::VectorXi y = Eigen::Map<const Eigen::VectorXi>(labels.data(), static_cast<Eigen::Index>(labels.size()));
      CHECK(std::abs(roc_auc_ovo(s, y) - c["auc"].get<double>()) < 1e-12);
      CHECK(std::abs(roc_auc_ovo(s, y) - oracle::auc_ovo(rows, labels)) < 1e-12);
    } else {
      const auto pred = c["pred"].get<std::vector<int>>();
      CHECK(std::abs(precision_macro(pred, labels) - c["precision"].get<double>()) < 1e-12);
      CHECK(std::abs(recall_macro(pred, labels) - c["recall"].get<double>()) < 1e-12);
      CHECK(std::abs(f1_macro(pred, labels) - c["f1"].get<double>()) < 1e-12);
      const auto o = oracle::macro(pred, labels);
      CHECK(std::abs(f1_macro(pred, labels) - o.f1) < 1e-12);
    }
  }
}

TEST_CASE("perfect predictions and the 2x2 uniform confusion") {
  const std::vector<int> y{0, 1, 2, 1};
  CHECK(f1_macro(y, y) == 1.0);
  CHECK(precision_macro(y, y) == 1.0);
  CHECK(recall_macro(y, y) == 1.0);
  const std::vector<int> t{0, 0, 1, 1}, p{0, 1, 0, 1};
  CHECK(precision_macro(p, t) == 0.5);
  CHECK(recall_macro(p, t) == 0.5);
  CHECK(f1_macro(p, t) == 0.5);
}

TEST_CASE("random scores give AUC near one half") {
  Rng rng(1);
  std::vector<double> s(10000);
  std::vector<int> y(10000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = rng.uniform();
    y[i] = rng.bernoulli(0.5);
  }
  CHECK(std::abs(roc_auc(s, y) - 0.5) < 0.02);
}

TEST_CASE("metrics are invariant to joint shuffling and bounded") {
  Rng rng(2);
  std::vector<double> s(300);
  std::vector<int> y(300), p(300);
  for (std::size_t i = 0; i < s.size(); ++i) {
    y[i] = static_cast<int>(rng.below(3));
    s[i] = rng.normal() + y[i];
    p[i] = rng.bernoulli(0.7) ? y[i] : static_cast<int>(rng.below(3));
  }
  std::vector<int> bin(300);
  for (std::size_t i = 0; i < y.size(); ++i) bin[i] = y[i] == 2;
  const double auc = roc_auc(s, bin), f1 = f1_macro(p, y);
  std::vector<std::size_t> order(300);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());
  std::vector<double> s2;
  std::vector<int> y2, p2, b2;
  for (auto i : order) {
    s2.push_back(s[i]);
    y2.push_back(y[i]);
    p2.push_back(p[i]);
    b2.push_back(bin[i]);
  }
  CHECK(roc_auc(s2, b2) == auc);
  CHECK(f1_macro(p2, y2) == f1);
  for (double m : {auc, f1, precision_macro(p, y), recall_macro(p, y)}) {
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
  }
}
