#pragma once
// Gradient-boosted decision trees with logistic loss, leaf-wise growth and histogram
// split finding. Multiclass problems use one-vs-rest score functions.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ideo/lenses.hpp"
#include "ideo/proxies.hpp"

namespace ideo {

struct BoostConfig {
  int n_estimators = 200;
  double learning_rate = 0.1;
  int max_leaves = 31;
  int min_samples_leaf = 20;
  bool class_balance = true;
  std::uint64_t rng_seed = 0;
  /// Histogram resolution; ignored when exact_splits is set.
  int max_bins = 255;
  /// Every distinct feature value becomes a candidate threshold.
  bool exact_splits = false;
  double lambda_l2 = 0.0;
  double min_child_hessian = 1e-3;
  /// Fraction of features considered per tree, drawn with rng_seed.
  double feature_fraction = 1.0;

  void validate() const;
  /// Defaults per mode: 200 trees for left-right, 100 for far-right.
  static BoostConfig for_mode(Mode mode);
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // x <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;         // leaf output (already scaled by the learning rate)
};

struct Tree {
  std::vector<TreeNode> nodes;

  template <typename Row>
  double predict(const Row& x) const {
    std::int32_t i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
      const auto& n = nodes[static_cast<std::size_t>(i)];
      i = x(n.feature) <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
  }
  std::size_t n_leaves() const;
};

/// Additive score function for one class against the rest.
struct ScoreFunction {
  double init_score = 0.0;
  std::vector<Tree> trees;

  template <typename Row>
  double raw_score(const Row& x) const {
    double s = init_score;
    for (const auto& t : trees) s += t.predict(x);
    return s;
  }
};

struct BoostModel {
  Mode mode = Mode::LeftRight;
  std::vector<Label> classes;
  /// One score function for two classes (positive = classes[1]); one per class otherwise.
  std::vector<ScoreFunction> functions;
  Eigen::Index width = 0;
  BoostConfig config;
  std::string proxy_name;
  std::string lens_name;
  std::vector<std::int64_t> seed_counts;  // per class
  /// Weighted training logistic loss after each round (first score function).
  std::vector<double> training_loss;

  Eigen::Index n_classes() const {
    return functions.size() == 1 ? 2 : static_cast<Eigen::Index>(functions.size());
  }
  /// Class probabilities for one dense feature row; sums to 1.
  Eigen::VectorXd predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

/// Dense training problem: X (n x width), class index per row.
BoostModel train(const Eigen::Ref<const Eigen::MatrixXd>& X, const std::vector<int>& y, int n_classes,
                 const BoostConfig& config);

/// Trains on the seed users present in the matrix. Neutral labels are dropped.
BoostModel train(const FeatureMatrix& matrix, const SeedLabels& seeds, const BoostConfig& config);

struct Predictions {
  std::vector<std::string> row_ids;
  std::vector<Label> classes;
  Eigen::MatrixXd proba;  // rows x classes

  /// Column index of the label, or -1.
  Eigen::Index class_column(Label l) const;
};

Eigen::MatrixXd predict_proba(const BoostModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X);
Predictions predict_proba(const BoostModel& model, const FeatureMatrix& matrix);

struct Calibration {
  /// Binary: a single threshold on P(classes[1]). Multiclass: per-class thresholds,
  /// decision = argmax_k (p_k - t_k).
  std::vector<double> thresholds;
  double validation_f1_macro = 0.0;

  int decide(const Eigen::Ref<const Eigen::RowVectorXd>& proba) const;
};

/// Grid search over thresholds 0.01..0.99 maximizing F1-macro; ties go to the threshold
/// nearest 0.5.
Calibration calibrate_threshold(const Eigen::Ref<const Eigen::MatrixXd>& proba, const std::vector<int>& truth);
Calibration calibrate_threshold(const BoostModel& model, const FeatureMatrix& matrix, const SeedLabels& validation);

/// Up to k most probable users per class, each user listed at most once.
std::vector<std::vector<std::string>> top_confident(const Predictions& predictions, std::size_t k);

std::string serialize_model(const BoostModel& model);
BoostModel deserialize_model(std::string_view bytes);
void save_model(const BoostModel& model, const std::filesystem::path& path);
BoostModel load_model(const std::filesystem::path& path);
std::string model_json(const BoostModel& model);

}  // namespace ideo
