#pragma once
// Ranking and classification metrics. Free functions accept any Eigen dense expression.

#include <Eigen/Dense>
#include <vector>

namespace ideo {

namespace detail {
double roc_auc_binary(const std::vector<double>& scores, const std::vector<int>& positive);
double roc_auc_ovo(const Eigen::MatrixXd& scores, const std::vector<int>& labels);

struct MacroScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};
MacroScores macro_scores(const std::vector<int>& predicted, const std::vector<int>& truth);

template <typename Derived>
std::vector<double> to_doubles(const Eigen::DenseBase<Derived>& v) {
  std::vector<double> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<double>(v(i));
  return out;
}

template <typename Derived>
std::vector<int> to_ints(const Eigen::DenseBase<Derived>& v) {
  std::vector<int> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<int>(v(i));
  return out;
}
}  // namespace detail

/// Binary ROC-AUC: normalized Mann-Whitney U with midranks for ties. `positive` holds
/// 0/1 labels. Throws UndefinedMetric when only one class is present.
template <typename DerivedS, typename DerivedL>
double roc_auc(const Eigen::DenseBase<DerivedS>& scores, const Eigen::DenseBase<DerivedL>& positive) {
  return detail::roc_auc_binary(detail::to_doubles(scores), detail::to_ints(positive));
}

/// Multiclass one-vs-one ROC-AUC: unweighted mean over class pairs (a, b) of
/// (AUC(a | a,b) + AUC(b | a,b)) / 2, where AUC(a | a,b) ranks column a over rows labeled
/// a or b. Only classes present in `labels` participate.
template <typename DerivedS, typename DerivedL>
double roc_auc_ovo(const Eigen::DenseBase<DerivedS>& scores, const Eigen::DenseBase<DerivedL>& labels) {
  return detail::roc_auc_ovo(scores.derived().template cast<double>(), detail::to_ints(labels));
}

/// Macro averages over the union of classes in truth and predictions; a class with no
/// predicted (or no true) members contributes 0 precision (or recall).
template <typename DerivedP, typename DerivedT>
double precision_macro(const Eigen::DenseBase<DerivedP>& predicted, const Eigen::DenseBase<DerivedT>& truth) {
  return detail::macro_scores(detail::to_ints(predicted), detail::to_ints(truth)).precision;
}

template <typename DerivedP, typename DerivedT>
double recall_macro(const Eigen::DenseBase<DerivedP>& predicted, const Eigen::DenseBase<DerivedT>& truth) {
  return detail::macro_scores(detail::to_ints(predicted), detail::to_ints(truth)).recall;
}

template <typename DerivedP, typename DerivedT>
double f1_macro(const Eigen::DenseBase<DerivedP>& predicted, const Eigen::DenseBase<DerivedT>& truth) {
  return detail::macro_scores(detail::to_ints(predicted), detail::to_ints(truth)).f1;
}

// std::vector conveniences.
inline double roc_auc(const std::vector<double>& scores, const std::vector<int>& positive) {
  return detail::roc_auc_binary(scores, positive);
}
inline double f1_macro(const std::vector<int>& predicted, const std::vector<int>& truth) {
  return detail::macro_scores(predicted, truth).f1;
}
inline double precision_macro(const std::vector<int>& predicted, const std::vector<int>& truth) {
  return detail::macro_scores(predicted, truth).precision;
}
inline double recall_macro(const std::vector<int>& predicted, const std::vector<int>& truth) {
  return detail::macro_scores(predicted, truth).recall;
}

}  // namespace ideo
