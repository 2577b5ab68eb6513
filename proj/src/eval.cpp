#include "ideo/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "ideo/common.hpp"
#include "ideo/metrics.hpp"
#include "json.hpp"

namespace ideo {

Eigen::MatrixXd EvalReport::auc_matrix() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& cell = at(r, c);
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          cell.available ? cell.roc_auc : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Output

std::string report_json(const EvalReport& report) {
  using nlohmann::json;
  json j;
  j["kind"] = report.kind;
  j["mode"] = report.mode;
  j["lens"] = report.lens;
  j["row_axis"] = report.row_axis;
  j["col_axis"] = report.col_axis;
  j["rows"] = report.rows;
  j["cols"] = report.cols;
  j["folds"] = report.folds;
  j["fold_seed"] = report.fold_seed;
  j["cells"] = json::array();
  for (const auto& c : report.cells) {
    json jc{{"row", c.row}, {"col", c.col}, {"available", c.metrics.available}};
    if (c.metrics.available) {
      jc["roc_auc"] = c.metrics.roc_auc;
      jc["f1_macro"] = c.metrics.f1_macro;
      jc["precision_macro"] = c.metrics.precision_macro;
      jc["recall_macro"] = c.metrics.recall_macro;
      jc["folds_scored"] = c.metrics.folds_scored;
    }
    jc["n_train"] = c.metrics.n_train;
    jc["n_eval"] = c.metrics.n_eval;
    if (!c.metrics.note.empty()) jc["note"] = c.metrics.note;
    j["cells"].push_back(jc);
  }
  return j.dump(2) + "\n";
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << report.row_axis << ',' << report.col_axis << ",roc_auc,f1_macro,precision_macro,recall_macro,n_train,n_eval\n";
  for (const auto& c : report.cells) {
    out << c.row << ',' << c.col << ',';
    if (c.metrics.available) {
      out << format_fixed(c.metrics.roc_auc, 4) << ',' << format_fixed(c.metrics.f1_macro, 4) << ','
          << format_fixed(c.metrics.precision_macro, 4) << ',' << format_fixed(c.metrics.recall_macro, 4);
    } else {
      out << ",,,";
    }
    out << ',' << c.metrics.n_train << ',' << c.metrics.n_eval << '\n';
  }
  return out.str();
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// White at AUC 0.5, dark blue at 1.0.
std::string auc_color(double v) {
  if (std::isnan(v)) return "#dddddd";
  const double t = std::clamp((v - 0.5) / 0.5, 0.0, 1.0);
  const auto mix = [&](int a, int b) { return static_cast<int>(std::lround(a + (b - a) * t)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", mix(255, 8), mix(255, 48), mix(255, 107));
  return buf;
}

}  // namespace

std::string report_svg(const EvalReport& report) {
  const int cell = 70, left = 170, top = 40, bottom = 110;
  const int w = left + cell * static_cast<int>(report.cols.size()) + 20;
  const int h = top + cell * static_cast<int>(report.rows.size()) + bottom;
  const auto m = report.auc_matrix();
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<text x=\"" << left << "\" y=\"20\">" << xml_escape(report.kind) << " ROC-AUC</text>\n";
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    const int y = top + cell * static_cast<int>(r);
    s << "<text x=\"" << left - 6 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"end\">"
      << xml_escape(report.rows[r]) << "</text>\n";
    for (std::size_t c = 0; c < report.cols.size(); ++c) {
      const int x = left + cell * static_cast<int>(c);
      const double v = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
        << auc_color(v) << "\" stroke=\"#ffffff\"/>\n";
      s << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"middle\" fill=\""
        << (!std::isnan(v) && v > 0.8 ? "#ffffff" : "#000000") << "\">" << (std::isnan(v) ? "n/a" : format_fixed(v, 3))
        << "</text>\n";
    }
  }
  const int yb = top + cell * static_cast<int>(report.rows.size()) + 12;
  for (std::size_t c = 0; c < report.cols.size(); ++c) {
    const int x = left + cell * static_cast<int>(c) + cell / 2;
    s << "<text transform=\"translate(" << x << "," << yb << ") rotate(40)\">" << xml_escape(report.cols[c])
      << "</text>\n";
  }
  s << "<text x=\"8\" y=\"" << top + 12 << "\" font-style=\"italic\">train: " << xml_escape(report.row_axis)
    << "</text>\n";
  s << "<text x=\"" << left << "\" y=\"" << h - 8 << "\" font-style=\"italic\">test: " << xml_escape(report.col_axis)
    << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

void save_report(const EvalReport& report, const std::filesystem::path& dir, const std::string& stem) {
  write_file(dir / (stem + ".json"), report_json(report));
  write_file(dir / (stem + ".csv"), report_csv(report));
  write_file(dir / (stem + ".svg"), report_svg(report));
}

// ---------------------------------------------------------------------------
// Cross-validation plumbing

std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed) {
  if (folds < 2) fail(ErrorKind::Config, "cross-validation needs at least 2 folds");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::vector<int> fold(labels.size(), 0);
  int offset = 0;
  for (auto& [c, idx] : by_class) {
    Rng rng(mix_seed(seed, {static_cast<std::uint64_t>(c) + 1}));
    rng.shuffle(idx.begin(), idx.end());
    // Continue the deal where the previous class stopped so fold sizes stay balanced.
    for (std::size_t k = 0; k < idx.size(); ++k) fold[idx[k]] = static_cast<int>((k + static_cast<std::size_t>(offset)) % static_cast<std::size_t>(folds));
    offset = static_cast<int>((static_cast<std::size_t>(offset) + idx.size()) % static_cast<std::size_t>(folds));
  }
  return fold;
}

CellMetrics score_predictions(const Eigen::MatrixXd& proba, const std::vector<int>& truth,
                              const Calibration* calibration) {
  CellMetrics m;
  m.n_eval = truth.size();
  std::set<int> present(truth.begin(), truth.end());
  if (present.size() < 2) {
    m.note = "evaluation users hold a single class";
    return m;
  }
  if (proba.cols() == 2) {
    std::vector<double> s(truth.size());
    std::vector<int> pos(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
      s[i] = proba(static_cast<Eigen::Index>(i), 1);
      pos[i] = truth[i] == 1;
    }
    m.roc_auc = roc_auc(s, pos);
  } else {
    m.roc_auc = detail::roc_auc_ovo(proba, truth);
  }
  std::vector<int> pred(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto row = proba.row(static_cast<Eigen::Index>(i));
    if (calibration) {
      pred[i] = calibration->decide(row);
    } else {
      Eigen::Index k;
      row.maxCoeff(&k);
      pred[i] = static_cast<int>(k);
    }
  }
  const auto macro = detail::macro_scores(pred, truth);
  m.f1_macro = macro.f1;
  m.precision_macro = macro.precision;
  m.recall_macro = macro.recall;
  m.available = true;
  m.folds_scored = 1;
  return m;
}

namespace {

std::unordered_map<std::string_view, Eigen::Index> row_index(const FeatureMatrix& m) {
  std::unordered_map<std::string_view, Eigen::Index> idx;
  idx.reserve(m.row_ids.size());
  for (std::size_t i = 0; i < m.row_ids.size(); ++i) idx.emplace(m.row_ids[i], static_cast<Eigen::Index>(i));
  return idx;
}

Eigen::MatrixXd gather(const FeatureMatrix& m, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), m.width());
  Eigen::RowVectorXd buf(m.width());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    m.row(rows[k], buf);
    X.row(static_cast<Eigen::Index>(k)) = buf;
  }
  return X;
}

/// Seed users present in the matrix with a trainable class, in user-id order.
struct LabeledRows {
  std::vector<std::string> users;
  std::vector<Eigen::Index> rows;
  std::vector<int> y;
};

LabeledRows labeled_rows(const SeedLabels& seeds,
                         const std::unordered_map<std::string_view, Eigen::Index>& idx) {
  LabeledRows out;
  for (const auto& [u, l] : seeds.labels) {
    auto c = class_index(seeds.mode, l);
    auto it = idx.find(u);
    if (!c || it == idx.end()) continue;
    out.users.push_back(u);
    out.rows.push_back(it->second);
    out.y.push_back(*c);
  }
  return out;
}

std::size_t distinct(const std::vector<int>& y) { return std::set<int>(y.begin(), y.end()).size(); }

void accumulate(CellMetrics& total, const CellMetrics& fold) {
  total.roc_auc += fold.roc_auc;
  total.f1_macro += fold.f1_macro;
  total.precision_macro += fold.precision_macro;
  total.recall_macro += fold.recall_macro;
  total.folds_scored += 1;
}

void finish_mean(CellMetrics& m) {
  if (m.folds_scored == 0) {
    if (m.note.empty()) m.note = "no fold could be scored";
    return;
  }
  const double k = m.folds_scored;
  m.roc_auc /= k;
  m.f1_macro /= k;
  m.precision_macro /= k;
  m.recall_macro /= k;
  m.available = true;
}

}  // namespace

CellMetrics cross_proxy_cell(const FeatureMatrix& matrix, const SeedLabels& train_seeds, const SeedLabels& test_seeds,
                             const BoostConfig& config, const CvOptions& cv) {
  if (train_seeds.mode != test_seeds.mode) fail(ErrorKind::Config, "cross-proxy cell mixes left-right and far-right proxies");
  const auto idx = row_index(matrix);
  const auto tr = labeled_rows(train_seeds, idx);
  const auto te = labeled_rows(test_seeds, idx);
  CellMetrics out;
  out.n_train = tr.users.size();
  if (distinct(tr.y) < 2) {
    out.note = "train proxy " + train_seeds.proxy_name + " has fewer than two seed classes";
    return out;
  }
  if (distinct(te.y) < 2) {
    out.note = "test proxy " + test_seeds.proxy_name + " has fewer than two seed classes";
    return out;
  }

  // Evaluation union: test-proxy label wins, otherwise the train-proxy label.
  std::map<std::string, std::pair<Eigen::Index, int>> truth;
  for (std::size_t i = 0; i < tr.users.size(); ++i) truth[tr.users[i]] = {tr.rows[i], tr.y[i]};
  for (std::size_t i = 0; i < te.users.size(); ++i) truth[te.users[i]] = {te.rows[i], te.y[i]};
  std::vector<std::string> users;
  std::vector<Eigen::Index> rows;
  std::vector<int> y;
  for (const auto& [u, ry] : truth) {
    users.push_back(u);
    rows.push_back(ry.first);
    y.push_back(ry.second);
  }
  out.n_eval = users.size();
  std::map<std::string_view, int> train_label;
  for (std::size_t i = 0; i < tr.users.size(); ++i) train_label.emplace(tr.users[i], tr.y[i]);

  const auto fold = stratified_folds(y, cv.folds, cv.fold_seed);
  const int k = static_cast<int>(mode_classes(train_seeds.mode).size());
  for (int f = 0; f < cv.folds; ++f) {
    std::vector<Eigen::Index> fit_rows, eval_rows;
    std::vector<int> fit_y, eval_y;
    for (std::size_t i = 0; i < users.size(); ++i) {
      if (fold[i] == f) {
        eval_rows.push_back(rows[i]);
        eval_y.push_back(y[i]);
      } else if (auto it = train_label.find(users[i]); it != train_label.end()) {
        fit_rows.push_back(rows[i]);
        fit_y.push_back(it->second);
      }
    }
    if (distinct(fit_y) < 2 || distinct(eval_y) < 2) continue;
    const auto model = train(gather(matrix, fit_rows), fit_y, k, config);
    const auto proba = predict_proba(model, gather(matrix, eval_rows));
    accumulate(out, score_predictions(proba, eval_y));
  }
  finish_mean(out);
  return out;
}

CellMetrics cross_validate(const FeatureMatrix& matrix, const SeedLabels& seeds, const BoostConfig& config,
                           const CvOptions& cv) {
  return cross_proxy_cell(matrix, seeds, seeds, config, cv);
}

EvalReport cross_proxy_matrix(const FeatureMatrix& matrix, const std::vector<SeedLabels>& proxies,
                              const BoostConfig& config, const CvOptions& cv) {
  if (proxies.size() < 2) fail(ErrorKind::Config, "cross-proxy evaluation needs at least two proxies");
  EvalReport r;
  r.kind = "cross-proxy";
  r.mode = std::string(mode_name(proxies.front().mode));
  r.lens = matrix.lens_name();
  r.row_axis = "train_proxy";
  r.col_axis = "test_proxy";
  r.folds = cv.folds;
  r.fold_seed = cv.fold_seed;
  for (const auto& p : proxies) {
    r.rows.push_back(p.proxy_name);
    r.cols.push_back(p.proxy_name);
  }
  for (const auto& a : proxies) {
    for (const auto& b : proxies) {
      r.cells.push_back({a.proxy_name, b.proxy_name, cross_proxy_cell(matrix, a, b, config, cv)});
    }
  }
  return r;
}

EvalReport cross_dataset_matrix(const std::vector<DatasetFeatures>& datasets, const BoostConfig& config,
                                const CvOptions& cv) {
  if (datasets.empty()) fail(ErrorKind::Config, "cross-dataset evaluation needs at least one dataset");
  for (const auto& d : datasets) {
    if (d.matrix.width() != datasets.front().matrix.width()) {
      fail(ErrorKind::Shape, "dataset " + d.name + " has feature width " + std::to_string(d.matrix.width()) +
                                 ", expected " + std::to_string(datasets.front().matrix.width()));
    }
  }
  EvalReport r;
  r.kind = "cross-dataset";
  r.mode = std::string(mode_name(datasets.front().seeds.mode));
  r.lens = datasets.front().matrix.lens_name();
  r.row_axis = "train_dataset";
  r.col_axis = "test_dataset";
  r.folds = cv.folds;
  r.fold_seed = cv.fold_seed;
  for (const auto& d : datasets) {
    r.rows.push_back(d.name);
    r.cols.push_back(d.name);
  }
  const int k = static_cast<int>(mode_classes(datasets.front().seeds.mode).size());
  for (std::size_t a = 0; a < datasets.size(); ++a) {
    std::optional<BoostModel> model;
    LabeledRows tr;
    for (std::size_t b = 0; b < datasets.size(); ++b) {
      CellMetrics cell;
      if (a == b) {
        cell = cross_validate(datasets[a].matrix, datasets[a].seeds, config, cv);
      } else {
        if (!model) {
          tr = labeled_rows(datasets[a].seeds, row_index(datasets[a].matrix));
          if (distinct(tr.y) >= 2) model = train(gather(datasets[a].matrix, tr.rows), tr.y, k, config);
        }
        const auto te = labeled_rows(datasets[b].seeds, row_index(datasets[b].matrix));
        if (!model) {
          cell.note = "train dataset has fewer than two seed classes";
        } else {
          cell = score_predictions(predict_proba(*model, gather(datasets[b].matrix, te.rows)), te.y);
        }
        cell.n_train = tr.users.size();
        cell.n_eval = te.users.size();
      }
      r.cells.push_back({datasets[a].name, datasets[b].name, cell});
    }
  }
  return r;
}

CellMetrics gold_cell(const FeatureMatrix& matrix, const SeedLabels& train_seeds, const GoldSplit& gold,
                      const BoostConfig& config) {
  const auto idx = row_index(matrix);
  const auto tr = labeled_rows(train_seeds, idx);
  CellMetrics out;
  out.n_train = tr.users.size();
  if (distinct(tr.y) < 2) {
    out.note = "proxy " + train_seeds.proxy_name + " has fewer than two seed classes";
    return out;
  }
  const int k = static_cast<int>(mode_classes(train_seeds.mode).size());
  const auto model = train(gather(matrix, tr.rows), tr.y, k, config);
  const auto val = labeled_rows(gold.validation, idx);
  const auto test = labeled_rows(gold.test, idx);
  std::optional<Calibration> cal;
  if (distinct(val.y) >= 2) cal = calibrate_threshold(predict_proba(model, gather(matrix, val.rows)), val.y);
  out = score_predictions(predict_proba(model, gather(matrix, test.rows)), test.y, cal ? &*cal : nullptr);
  out.n_train = tr.users.size();
  if (!cal) out.note = "validation split holds one class; argmax decisions";
  return out;
}

// ---------------------------------------------------------------------------
// Hopkins

namespace {

/// Nearest-neighbour distance from each query row to the data rows; `self[i]` (if >= 0)
/// names a data row to exclude for query i.
Eigen::VectorXd nearest_distances(const Eigen::MatrixXd& Q, const Eigen::Ref<const Eigen::MatrixXd>& X,
                                  const Eigen::VectorXd& x_norms, const std::vector<Eigen::Index>& self) {
  const Eigen::VectorXd q_norms = Q.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * (Q * X.transpose());
  d2.colwise() += q_norms;
  d2.rowwise() += x_norms.transpose();
  Eigen::VectorXd out(Q.rows());
  for (Eigen::Index i = 0; i < Q.rows(); ++i) {
    if (!self.empty()) d2(i, self[static_cast<std::size_t>(i)]) = std::numeric_limits<double>::infinity();
    out(i) = std::sqrt(std::max(0.0, d2.row(i).minCoeff()));
  }
  return out;
}

}  // namespace

HopkinsResult hopkins(const Eigen::Ref<const Eigen::MatrixXd>& X, std::optional<std::size_t> m_opt, std::uint64_t seed,
                      int repetitions) {
  const auto n = static_cast<std::size_t>(X.rows());
  const std::size_t m = m_opt ? *m_opt : std::min<std::size_t>(100, n / 10);
  if (m < 1 || n < 2 * m) {
    fail(ErrorKind::Config, "hopkins: need n >= 2m with m >= 1 (n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")");
  }
  if (repetitions < 1) fail(ErrorKind::Config, "hopkins: repetitions must be >= 1");
  if (!X.allFinite()) fail(ErrorKind::Shape, "hopkins: data contains non-finite values");
  const Eigen::RowVectorXd lo = X.colwise().minCoeff();
  const Eigen::RowVectorXd hi = X.colwise().maxCoeff();
  if ((hi - lo).maxCoeff() <= 0.0) fail(ErrorKind::UndefinedMetric, "hopkins: all rows are identical");
  const Eigen::VectorXd x_norms = X.rowwise().squaredNorm();

  double total = 0.0;
  for (int rep = 0; rep < repetitions; ++rep) {
    Rng rng(mix_seed(seed, {0x686f706b696e73ULL, static_cast<std::uint64_t>(rep)}));
    Eigen::MatrixXd U(static_cast<Eigen::Index>(m), X.cols());
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
      for (Eigen::Index j = 0; j < U.cols(); ++j) U(i, j) = rng.uniform(lo(j), hi(j));
    }
    // m distinct data rows by partial Fisher-Yates.
    std::vector<Eigen::Index> pool(n);
    std::iota(pool.begin(), pool.end(), Eigen::Index{0});
    for (std::size_t i = 0; i < m; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
    std::vector<Eigen::Index> picked(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
    Eigen::MatrixXd W(static_cast<Eigen::Index>(m), X.cols());
    for (std::size_t i = 0; i < m; ++i) W.row(static_cast<Eigen::Index>(i)) = X.row(picked[i]);

    const double su = nearest_distances(U, X, x_norms, {}).sum();
    const double sw = nearest_distances(W, X, x_norms, picked).sum();
    if (su + sw <= 0.0) fail(ErrorKind::UndefinedMetric, "hopkins: zero nearest-neighbour distances");
    total += su / (su + sw);
  }
  HopkinsResult r;
  r.h = total / repetitions;
  r.h_inverted = 1.0 - r.h;
  r.m = m;
  r.repetitions = repetitions;
  return r;
}

}  // namespace ideo
