#include "ideo/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "ideo/common.hpp"

namespace ideo::detail {

double roc_auc_binary(const std::vector<double>& scores, const std::vector<int>& positive) {
  if (scores.size() != positive.size()) fail(ErrorKind::Shape, "roc_auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (positive[order[k]] != 0) {
        rank_sum += midrank;
        ++n_pos;
      }
    }
    i = j + 1;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) fail(ErrorKind::UndefinedMetric, "roc_auc: labels contain a single class");
  const double u = rank_sum - static_cast<double>(n_pos) * static_cast<double>(n_pos + 1) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double roc_auc_ovo(const Eigen::MatrixXd& scores, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(scores.rows()) != labels.size()) {
    fail(ErrorKind::Shape, "roc_auc_ovo: scores and labels differ in length");
  }
  std::set<int> present(labels.begin(), labels.end());
  if (present.size() < 2) fail(ErrorKind::UndefinedMetric, "roc_auc_ovo: labels contain a single class");
  for (int c : present) {
    if (c < 0 || c >= scores.cols()) fail(ErrorKind::Shape, "roc_auc_ovo: label outside score columns");
  }
  const std::vector<int> classes(present.begin(), present.end());
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < classes.size(); ++a) {
    for (std::size_t b = a + 1; b < classes.size(); ++b) {
      std::vector<double> sa, sb;
      std::vector<int> pa, pb;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != classes[a] && labels[i] != classes[b]) continue;
        const auto r = static_cast<Eigen::Index>(i);
        sa.push_back(scores(r, classes[a]));
        pa.push_back(labels[i] == classes[a]);
        sb.push_back(scores(r, classes[b]));
        pb.push_back(labels[i] == classes[b]);
      }
      total += 0.5 * (roc_auc_binary(sa, pa) + roc_auc_binary(sb, pb));
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

MacroScores macro_scores(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) fail(ErrorKind::Shape, "macro metrics: prediction and truth differ in length");
  std::set<int> classes(truth.begin(), truth.end());
  classes.insert(predicted.begin(), predicted.end());
  MacroScores out;
  if (classes.empty()) return out;
  for (int c : classes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool p = predicted[i] == c;
      const bool t = truth[i] == c;
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
    }
    const double prec = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double rec = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double f1 = prec + rec == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
    out.precision += prec;
    out.recall += rec;
    out.f1 += f1;
  }
  const double k = static_cast<double>(classes.size());
  out.precision /= k;
  out.recall /= k;
  out.f1 /= k;
  return out;
}

}  // namespace ideo::detail
