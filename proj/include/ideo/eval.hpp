#pragma once
// Evaluation protocols: stratified cross-validation, the ablation grid, cross-proxy and
// cross-dataset matrices, and the Hopkins clustering-tendency statistic.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ideo/boost.hpp"
#include "ideo/lenses.hpp"
#include "ideo/proxies.hpp"

namespace ideo {

struct CellMetrics {
  bool available = false;
  double roc_auc = 0.0;
  double f1_macro = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  std::size_t n_train = 0;
  std::size_t n_eval = 0;
  /// Folds that produced a score (a fold whose evaluation users hold one class is skipped).
  int folds_scored = 0;
  std::string note;
};

struct EvalCell {
  std::string row;  // train proxy / dataset / lens set
  std::string col;  // test proxy / dataset / proxy
  CellMetrics metrics;
};

struct EvalReport {
  std::string kind;  // ablation | cross-proxy | cross-dataset
  std::string mode;
  std::string lens;
  std::string row_axis;
  std::string col_axis;
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<EvalCell> cells;  // row-major, rows.size() * cols.size()
  int folds = 5;
  std::uint64_t fold_seed = 0;

  const CellMetrics& at(std::size_t r, std::size_t c) const { return cells.at(r * cols.size() + c).metrics; }
  /// rows x cols matrix of ROC-AUC values; unavailable cells are NaN.
  Eigen::MatrixXd auc_matrix() const;
};

std::string report_json(const EvalReport& report);
std::string report_csv(const EvalReport& report);
/// Heatmap of the ROC-AUC matrix laid out like the figures (train on y, test on x).
std::string report_svg(const EvalReport& report);
void save_report(const EvalReport& report, const std::filesystem::path& dir, const std::string& stem);

struct CvOptions {
  int folds = 5;
  std::uint64_t fold_seed = 0;
};

/// Fold id per item: each class is shuffled with the fold seed and dealt round-robin.
std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed);

/// Scores predictions for class indices of `mode`; argmax decisions unless a calibration is given.
CellMetrics score_predictions(const Eigen::MatrixXd& proba, const std::vector<int>& truth,
                              const Calibration* calibration = nullptr);

/// k-fold cross-validated metrics on one proxy's trainable seeds (metrics averaged over folds).
CellMetrics cross_validate(const FeatureMatrix& matrix, const SeedLabels& seeds, const BoostConfig& config,
                           const CvOptions& cv = {});

/// Train on `train` seeds and evaluate on users labeled by either proxy. The evaluation
/// union is split into stratified folds; each fold is scored by a model trained on the
/// train-proxy seeds outside it. Truth is the test-proxy label where present, otherwise the
/// train-proxy label. With train == test this reduces to cross_validate.
CellMetrics cross_proxy_cell(const FeatureMatrix& matrix, const SeedLabels& train, const SeedLabels& test,
                             const BoostConfig& config, const CvOptions& cv = {});

EvalReport cross_proxy_matrix(const FeatureMatrix& matrix, const std::vector<SeedLabels>& proxies,
                              const BoostConfig& config, const CvOptions& cv = {});

struct DatasetFeatures {
  std::string name;
  FeatureMatrix matrix;  // lexical lens only; widths must agree across datasets
  SeedLabels seeds;
};

/// Diagonal: cross-validation. Off-diagonal: train on every seed of the row dataset,
/// evaluate on every seed of the column dataset.
EvalReport cross_dataset_matrix(const std::vector<DatasetFeatures>& datasets, const BoostConfig& config,
                                const CvOptions& cv = {});

struct AblationInput {
  std::vector<LensSelection> lenses;        // rows
  std::vector<SeedLabels> proxies;          // columns
  GoldSplit gold;                           // calibration on validation, scores on test
};

/// Trains on each proxy for each lens set and scores against the gold test split with a
/// threshold calibrated on the gold validation split. `matrix_for` builds the feature
/// matrix for a lens selection over all users.
template <typename MatrixFor>
EvalReport ablation_grid(const AblationInput& input, MatrixFor&& matrix_for, const BoostConfig& config);

CellMetrics gold_cell(const FeatureMatrix& matrix, const SeedLabels& train, const GoldSplit& gold,
                      const BoostConfig& config);

struct HopkinsResult {
  /// sum(u) / (sum(u) + sum(w)); about 0.5 for uniform data, toward 1 for clustered data.
  double h = 0.0;
  /// 1 - h; the orientation where lower values mean more clusterable.
  double h_inverted = 0.0;
  std::size_t m = 0;
  int repetitions = 0;
};

/// Nearest-neighbour Hopkins statistic averaged over repetitions. m defaults to
/// min(100, n / 10) and requires n >= 2m.
HopkinsResult hopkins(const Eigen::Ref<const Eigen::MatrixXd>& X, std::optional<std::size_t> m = std::nullopt,
                      std::uint64_t seed = 0, int repetitions = 10);

// ---------------------------------------------------------------------------

template <typename MatrixFor>
EvalReport ablation_grid(const AblationInput& input, MatrixFor&& matrix_for, const BoostConfig& config) {
  EvalReport r;
  r.kind = "ablation";
  r.row_axis = "lenses";
  r.col_axis = "proxy";
  r.mode = std::string(mode_name(input.gold.test.mode));
  for (const auto& l : input.lenses) r.rows.push_back(l.name());
  for (const auto& p : input.proxies) r.cols.push_back(p.proxy_name);
  for (const auto& lens : input.lenses) {
    const FeatureMatrix m = matrix_for(lens);
    for (const auto& proxy : input.proxies) {
      r.cells.push_back({lens.name(), proxy.proxy_name, gold_cell(m, proxy, input.gold, config)});
    }
  }
  return r;
}

}  // namespace ideo
