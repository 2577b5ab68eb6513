#include "ideo/boost.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "ideo/common.hpp"
#include "ideo/metrics.hpp"
#include "json.hpp"

namespace ideo {

void BoostConfig::validate() const {
  if (n_estimators < 1) fail(ErrorKind::Config, "n_estimators must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) fail(ErrorKind::Config, "learning_rate must be in (0, 1]");
  if (max_leaves < 2) fail(ErrorKind::Config, "max_leaves must be >= 2");
  if (min_samples_leaf < 1) fail(ErrorKind::Config, "min_samples_leaf must be >= 1");
  if (max_bins < 2 || max_bins > 65535) fail(ErrorKind::Config, "max_bins must be in [2, 65535]");
  if (lambda_l2 < 0.0 || min_child_hessian < 0.0) fail(ErrorKind::Config, "regularization must be nonnegative");
  if (!(feature_fraction > 0.0 && feature_fraction <= 1.0)) fail(ErrorKind::Config, "feature_fraction must be in (0, 1]");
}

BoostConfig BoostConfig::for_mode(Mode mode) {
  BoostConfig c;
  c.n_estimators = mode == Mode::LeftRight ? 200 : 100;
  return c;
}

std::size_t Tree::n_leaves() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// ---------------------------------------------------------------------------
// Feature binning

struct BinnedData {
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::vector<std::uint16_t> bins;              // column-major: bins[f * n_rows + i]
  std::vector<std::vector<double>> uppers;      // per feature, bin b holds x <= uppers[b]
  std::vector<std::size_t> offset;              // histogram offset per feature
  std::size_t total_bins = 0;

  std::size_t n_bins(std::size_t f) const { return uppers[f].size() + 1; }
};

std::vector<double> bin_uppers(std::vector<double> values, std::size_t max_bins) {
  std::sort(values.begin(), values.end());
  std::vector<double> distinct;
  std::vector<std::size_t> counts;
  for (double v : values) {
    if (distinct.empty() || v != distinct.back()) {
      distinct.push_back(v);
      counts.push_back(1);
    } else {
      ++counts.back();
    }
  }
  std::vector<double> uppers;
  if (distinct.size() <= max_bins) {
    for (std::size_t k = 0; k + 1 < distinct.size(); ++k) uppers.push_back(0.5 * (distinct[k] + distinct[k + 1]));
    return uppers;
  }
  // Equal-frequency cuts by empirical cumulative fraction.
  const double total = static_cast<double>(values.size());
  std::size_t cum = 0;
  std::size_t made = 0;
  for (std::size_t k = 0; k + 1 < distinct.size() && made + 1 < max_bins; ++k) {
    cum += counts[k];
    const double target = static_cast<double>(made + 1) * total / static_cast<double>(max_bins);
    if (static_cast<double>(cum) >= target) {
      uppers.push_back(0.5 * (distinct[k] + distinct[k + 1]));
      ++made;
    }
  }
  return uppers;
}

BinnedData bin_features(const Eigen::Ref<const Eigen::MatrixXd>& X, const BoostConfig& config) {
  BinnedData data;
  data.n_rows = static_cast<std::size_t>(X.rows());
  data.n_features = static_cast<std::size_t>(X.cols());
  data.bins.resize(data.n_rows * data.n_features);
  data.uppers.resize(data.n_features);
  const std::size_t max_bins = config.exact_splits ? 65535 : static_cast<std::size_t>(config.max_bins);
  parallel_for(data.n_features, [&](std::size_t f) {
    const auto col = X.col(static_cast<Eigen::Index>(f));
    std::vector<double> values(col.data(), col.data() + col.size());
    data.uppers[f] = bin_uppers(values, max_bins);
    const auto& up = data.uppers[f];
    std::uint16_t* out = data.bins.data() + f * data.n_rows;
    for (std::size_t i = 0; i < data.n_rows; ++i) {
      out[i] = static_cast<std::uint16_t>(std::lower_bound(up.begin(), up.end(), col(static_cast<Eigen::Index>(i))) - up.begin());
    }
  });
  data.offset.resize(data.n_features);
  for (std::size_t f = 0; f < data.n_features; ++f) {
    data.offset[f] = data.total_bins;
    data.total_bins += data.n_bins(f);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Leaf-wise tree growth

struct HistBin {
  double g = 0.0;
  double h = 0.0;
  double c = 0.0;
};

struct Split {
  double gain = 0.0;
  std::int64_t feature = -1;
  std::size_t bin = 0;  // rows with bin <= this go left
  bool valid() const { return feature >= 0; }
};

struct Leaf {
  std::size_t begin = 0, end = 0;  // range in the row order array
  double g = 0.0, h = 0.0;
  std::vector<HistBin> hist;
  Split best;
  std::int32_t node = 0;
};

class TreeGrower {
 public:
  TreeGrower(const BinnedData& data, const BoostConfig& config, const std::vector<double>& grad,
             const std::vector<double>& hess)
      : data_(data), config_(config), grad_(grad), hess_(hess) {}

  /// Grows a tree over `features`, adding leaf outputs into `scores`.
  Tree grow(const std::vector<std::size_t>& features, std::vector<double>& scores) {
    features_ = &features;
    order_.resize(data_.n_rows);
    std::iota(order_.begin(), order_.end(), 0u);
    scratch_.resize(data_.n_rows);

    Tree tree;
    tree.nodes.emplace_back();
    std::vector<Leaf> leaves(1);
    Leaf& root = leaves[0];
    root.begin = 0;
    root.end = data_.n_rows;
    for (std::size_t i = 0; i < data_.n_rows; ++i) {
      root.g += grad_[i];
      root.h += hess_[i];
    }
    root.hist = build_histogram(root);
    root.best = find_split(root);

    while (static_cast<int>(leaves.size()) < config_.max_leaves) {
      std::size_t pick = leaves.size();
      for (std::size_t k = 0; k < leaves.size(); ++k) {
        if (!leaves[k].best.valid()) continue;
        if (pick == leaves.size() || leaves[k].best.gain > leaves[pick].best.gain) pick = k;
      }
      if (pick == leaves.size()) break;
      split_leaf(tree, leaves, pick);
    }

    for (auto& leaf : leaves) {
      if (!leaf.hist.empty()) pool_.push_back(std::move(leaf.hist));
      const double denom = leaf.h + config_.lambda_l2;
      const double value = denom > 0.0 ? -config_.learning_rate * leaf.g / denom : 0.0;
      tree.nodes[static_cast<std::size_t>(leaf.node)].value = value;
      for (std::size_t k = leaf.begin; k < leaf.end; ++k) scores[order_[k]] += value;
    }
    return tree;
  }

 private:
  std::vector<HistBin> acquire_histogram() {
    if (pool_.empty()) return std::vector<HistBin>(data_.total_bins);
    auto h = std::move(pool_.back());
    pool_.pop_back();
    std::fill(h.begin(), h.end(), HistBin{});
    return h;
  }

  std::vector<HistBin> build_histogram(const Leaf& leaf) {
    auto hist = acquire_histogram();
    // Gradients gathered in leaf order so the per-feature passes read them sequentially.
    const std::size_t m = leaf.end - leaf.begin;
    leaf_g_.resize(m);
    leaf_h_.resize(m);
    for (std::size_t p = 0; p < m; ++p) {
      leaf_g_[p] = grad_[order_[leaf.begin + p]];
      leaf_h_[p] = hess_[order_[leaf.begin + p]];
    }
    const auto& feats = *features_;
    const std::uint32_t* rows = order_.data() + leaf.begin;
    parallel_for(feats.size(), [&](std::size_t k) {
      const std::size_t f = feats[k];
      HistBin* base = hist.data() + data_.offset[f];
      const std::uint16_t* col = data_.bins.data() + f * data_.n_rows;
      for (std::size_t p = 0; p < m; ++p) {
        HistBin& b = base[col[rows[p]]];
        b.g += leaf_g_[p];
        b.h += leaf_h_[p];
        b.c += 1.0;
      }
    });
    return hist;
  }

  Split find_split(const Leaf& leaf) const {
    const auto& feats = *features_;
    const double count = static_cast<double>(leaf.end - leaf.begin);
    const double lambda = config_.lambda_l2;
    const double parent = leaf.h + lambda > 0.0 ? leaf.g * leaf.g / (leaf.h + lambda) : 0.0;
    const double min_leaf = static_cast<double>(config_.min_samples_leaf);
    std::vector<Split> per_feature(feats.size());
    parallel_for(feats.size(), [&](std::size_t k) {
      const std::size_t f = feats[k];
      const HistBin* base = leaf.hist.data() + data_.offset[f];
      const std::size_t nb = data_.n_bins(f);
      double gl = 0.0, hl = 0.0, cl = 0.0;
      Split best;
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        gl += base[b].g;
        hl += base[b].h;
        cl += base[b].c;
        const double cr = count - cl;
        if (cl < min_leaf) continue;
        if (cr < min_leaf) break;
        const double gr = leaf.g - gl;
        const double hr = leaf.h - hl;
        if (hl < config_.min_child_hessian || hr < config_.min_child_hessian) continue;
        const double gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent;
        if (gain > best.gain) {
          best.gain = gain;
          best.feature = static_cast<std::int64_t>(f);
          best.bin = b;
        }
      }
      per_feature[k] = best;
    });
    Split best;
    for (const auto& s : per_feature) {
      if (s.valid() && (!best.valid() || s.gain > best.gain)) best = s;
    }
    return best;
  }

  void split_leaf(Tree& tree, std::vector<Leaf>& leaves, std::size_t pick) {
    Leaf parent = std::move(leaves[pick]);
    const std::size_t f = static_cast<std::size_t>(parent.best.feature);
    const std::uint16_t* col = data_.bins.data() + f * data_.n_rows;
    // Stable partition keeps row order ascending within each child.
    std::size_t nl = 0, nr = 0;
    for (std::size_t p = parent.begin; p < parent.end; ++p) {
      const std::uint32_t r = order_[p];
      if (col[r] <= parent.best.bin) order_[parent.begin + nl++] = r;
      else scratch_[nr++] = r;
    }
    std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(nr),
              order_.begin() + static_cast<std::ptrdiff_t>(parent.begin + nl));

    Leaf left, right;
    left.begin = parent.begin;
    left.end = parent.begin + nl;
    right.begin = left.end;
    right.end = parent.end;
    for (std::size_t p = left.begin; p < left.end; ++p) {
      left.g += grad_[order_[p]];
      left.h += hess_[order_[p]];
    }
    right.g = parent.g - left.g;
    right.h = parent.h - left.h;

    Leaf& small = nl <= nr ? left : right;
    Leaf& large = nl <= nr ? right : left;
    small.hist = build_histogram(small);
    large.hist = std::move(parent.hist);
    for (std::size_t b = 0; b < large.hist.size(); ++b) {
      large.hist[b].g -= small.hist[b].g;
      large.hist[b].h -= small.hist[b].h;
      large.hist[b].c -= small.hist[b].c;
    }
    left.best = find_split(left);
    right.best = find_split(right);

    TreeNode& node = tree.nodes[static_cast<std::size_t>(parent.node)];
    node.feature = static_cast<std::int32_t>(f);
    node.threshold = data_.uppers[f][parent.best.bin];
    node.left = static_cast<std::int32_t>(tree.nodes.size());
    node.right = node.left + 1;
    left.node = node.left;
    right.node = node.right;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();

    leaves[pick] = std::move(left);
    leaves.push_back(std::move(right));
  }

  const BinnedData& data_;
  const BoostConfig& config_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  const std::vector<std::size_t>* features_ = nullptr;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> scratch_;
  std::vector<double> leaf_g_, leaf_h_;
  std::vector<std::vector<HistBin>> pool_;
};

double logistic_loss(const std::vector<double>& scores, const std::vector<double>& target,
                     const std::vector<double>& weight) {
  double loss = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double f = scores[i];
    // log(1 + e^f) - y f, computed stably
    const double softplus = f > 0 ? f + std::log1p(std::exp(-f)) : std::log1p(std::exp(f));
    loss += weight[i] * (softplus - target[i] * f);
    wsum += weight[i];
  }
  return loss / wsum;
}

ScoreFunction boost_binary(const BinnedData& data, const std::vector<double>& target, const std::vector<double>& weight,
                           const BoostConfig& config, std::uint64_t stream, std::vector<double>* loss_log) {
  const std::size_t n = data.n_rows;
  ScoreFunction fn;
  double pos = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pos += weight[i] * target[i];
    neg += weight[i] * (1.0 - target[i]);
  }
  fn.init_score = (pos > 0.0 && neg > 0.0) ? std::log(pos / neg) : 0.0;
  std::vector<double> scores(n, fn.init_score), grad(n), hess(n);
  std::vector<std::size_t> all_features(data.n_features);
  std::iota(all_features.begin(), all_features.end(), 0);
  Rng rng(mix_seed(config.rng_seed, {stream}));
  TreeGrower grower(data, config, grad, hess);
  for (int t = 0; t < config.n_estimators; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(scores[i]);
      grad[i] = weight[i] * (p - target[i]);
      hess[i] = weight[i] * p * (1.0 - p);
    }
    std::vector<std::size_t> features = all_features;
    if (config.feature_fraction < 1.0) {
      rng.shuffle(features.begin(), features.end());
      const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(config.feature_fraction * static_cast<double>(features.size()))));
      features.resize(keep);
      std::sort(features.begin(), features.end());
    }
    fn.trees.push_back(grower.grow(features, scores));
    if (loss_log) loss_log->push_back(logistic_loss(scores, target, weight));
  }
  return fn;
}

}  // namespace

// ---------------------------------------------------------------------------

Eigen::VectorXd BoostModel::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  const auto k = n_classes();
  Eigen::VectorXd p(k);
  if (functions.size() == 1) {
    const double p1 = sigmoid(functions[0].raw_score(x));
    p << 1.0 - p1, p1;
    return p;
  }
  for (Eigen::Index c = 0; c < k; ++c) p(c) = sigmoid(functions[static_cast<std::size_t>(c)].raw_score(x));
  return p / p.sum();
}

BoostModel train(const Eigen::Ref<const Eigen::MatrixXd>& X, const std::vector<int>& y, int n_classes,
                 const BoostConfig& config) {
  config.validate();
  if (static_cast<std::size_t>(X.rows()) != y.size()) fail(ErrorKind::Shape, "train: rows and labels differ in count");
  if (!X.allFinite()) fail(ErrorKind::Training, "train: feature matrix contains non-finite values");
  if (n_classes < 2) fail(ErrorKind::Training, "train: need at least two classes");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n_classes), 0);
  for (int c : y) {
    if (c < 0 || c >= n_classes) fail(ErrorKind::Training, "train: label outside class range");
    ++counts[static_cast<std::size_t>(c)];
  }
  const auto present = std::count_if(counts.begin(), counts.end(), [](std::int64_t c) { return c > 0; });
  if (present < 2) fail(ErrorKind::Training, "train: seeds contain a single class");

  const std::size_t n = y.size();
  std::vector<double> weight(n, 1.0);
  if (config.class_balance) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(y[i]);
      weight[i] = static_cast<double>(n) / (static_cast<double>(present) * static_cast<double>(counts[c]));
    }
  }

  const BinnedData data = bin_features(X, config);
  BoostModel model;
  model.width = X.cols();
  model.config = config;
  model.seed_counts = counts;
  if (n_classes == 2) {
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) target[i] = y[i] == 1 ? 1.0 : 0.0;
    model.functions.push_back(boost_binary(data, target, weight, config, 1, &model.training_loss));
  } else {
    for (int c = 0; c < n_classes; ++c) {
      std::vector<double> target(n);
      for (std::size_t i = 0; i < n; ++i) target[i] = y[i] == c ? 1.0 : 0.0;
      model.functions.push_back(boost_binary(data, target, weight, config, static_cast<std::uint64_t>(c) + 1,
                                             c == 0 ? &model.training_loss : nullptr));
    }
  }
  return model;
}

BoostModel train(const FeatureMatrix& matrix, const SeedLabels& seeds, const BoostConfig& config) {
  const auto classes = mode_classes(seeds.mode);
  std::vector<Eigen::Index> rows;
  std::vector<int> y;
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    auto it = seeds.labels.find(matrix.row_ids[static_cast<std::size_t>(i)]);
    if (it == seeds.labels.end()) continue;
    if (label_mode(it->second) != seeds.mode) fail(ErrorKind::Training, "seeds are not mode-pure");
    auto c = class_index(seeds.mode, it->second);
    if (!c) continue;  // Neutral
    rows.push_back(i);
    y.push_back(*c);
  }
  if (rows.empty()) fail(ErrorKind::Training, "no seed users have feature rows");
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), matrix.width());
  Eigen::RowVectorXd buf(matrix.width());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    matrix.row(rows[k], buf);
    X.row(static_cast<Eigen::Index>(k)) = buf;
  }
  BoostModel model = train(X, y, static_cast<int>(classes.size()), config);
  model.mode = seeds.mode;
  model.classes = classes;
  model.proxy_name = seeds.proxy_name;
  model.lens_name = matrix.lens_name();
  return model;
}

Eigen::Index Predictions::class_column(Label l) const {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == l) return static_cast<Eigen::Index>(i);
  }
  return -1;
}

Eigen::MatrixXd predict_proba(const BoostModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (X.cols() != model.width) {
    fail(ErrorKind::Shape, "predict: matrix width " + std::to_string(X.cols()) + " != model width " + std::to_string(model.width));
  }
  Eigen::MatrixXd out(X.rows(), model.n_classes());
  parallel_for(static_cast<std::size_t>(X.rows()), [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.row(r) = model.predict_row(X.row(r)).transpose();
  });
  return out;
}

Predictions predict_proba(const BoostModel& model, const FeatureMatrix& matrix) {
  if (matrix.width() != model.width) {
    fail(ErrorKind::Shape, "predict: matrix width " + std::to_string(matrix.width()) + " != model width " +
                               std::to_string(model.width));
  }
  Predictions p;
  p.row_ids = matrix.row_ids;
  p.classes = model.classes;
  p.proba.resize(matrix.rows(), model.n_classes());
  const std::size_t n = static_cast<std::size_t>(matrix.rows());
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(worker_count(), n));
  const std::size_t chunk = (n + workers - 1) / std::max<std::size_t>(workers, 1);
  parallel_for(workers, [&](std::size_t w) {
    Eigen::RowVectorXd x(model.width);
    const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    for (std::size_t i = lo; i < hi; ++i) {
      matrix.row(static_cast<Eigen::Index>(i), x);
      p.proba.row(static_cast<Eigen::Index>(i)) = model.predict_row(x).transpose();
    }
  });
  return p;
}

// ---------------------------------------------------------------------------

int Calibration::decide(const Eigen::Ref<const Eigen::RowVectorXd>& proba) const {
  if (thresholds.size() == 1) return proba(1) >= thresholds[0] ? 1 : 0;
  Eigen::Index best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < proba.size(); ++k) {
    const double v = proba(k) - thresholds[static_cast<std::size_t>(k)];
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  return static_cast<int>(best);
}

namespace {
double best_threshold(const std::vector<double>& score, const std::vector<int>& truth, double* best_f1) {
  double best_t = 0.5;
  double best = -1.0;
  std::vector<int> pred(score.size());
  for (int k = 1; k <= 99; ++k) {
    const double t = k / 100.0;
    for (std::size_t i = 0; i < score.size(); ++i) pred[i] = score[i] >= t ? 1 : 0;
    const double f = f1_macro(pred, truth);
    if (f > best || (f == best && std::abs(t - 0.5) < std::abs(best_t - 0.5))) {
      best = f;
      best_t = t;
    }
  }
  if (best_f1) *best_f1 = best;
  return best_t;
}
}  // namespace

Calibration calibrate_threshold(const Eigen::Ref<const Eigen::MatrixXd>& proba, const std::vector<int>& truth) {
  if (truth.empty()) fail(ErrorKind::UndefinedMetric, "calibration: validation set is empty");
  if (static_cast<std::size_t>(proba.rows()) != truth.size()) fail(ErrorKind::Shape, "calibration: size mismatch");
  Calibration cal;
  if (proba.cols() == 2) {
    std::vector<double> s(truth.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = proba(static_cast<Eigen::Index>(i), 1);
    cal.thresholds = {best_threshold(s, truth, &cal.validation_f1_macro)};
    return cal;
  }
  for (Eigen::Index k = 0; k < proba.cols(); ++k) {
    std::vector<double> s(truth.size());
    std::vector<int> t(truth.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = proba(static_cast<Eigen::Index>(i), k);
      t[i] = truth[i] == k ? 1 : 0;
    }
    cal.thresholds.push_back(best_threshold(s, t, nullptr));
  }
  std::vector<int> pred(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) pred[i] = cal.decide(proba.row(static_cast<Eigen::Index>(i)));
  cal.validation_f1_macro = f1_macro(pred, truth);
  return cal;
}

Calibration calibrate_threshold(const BoostModel& model, const FeatureMatrix& matrix, const SeedLabels& validation) {
  std::vector<std::string> ids;
  std::vector<int> truth;
  std::unordered_map<std::string_view, bool> present;
  for (const auto& id : matrix.row_ids) present.emplace(id, true);
  for (const auto& [u, l] : validation.labels) {
    auto c = class_index(model.mode, l);
    if (!c || !present.count(u)) continue;
    ids.push_back(u);
    truth.push_back(*c);
  }
  if (ids.empty()) fail(ErrorKind::UndefinedMetric, "calibration: no validation users have feature rows");
  const auto preds = predict_proba(model, align_rows(matrix, ids));
  return calibrate_threshold(preds.proba, truth);
}

std::vector<std::vector<std::string>> top_confident(const Predictions& predictions, std::size_t k) {
  if (k < 1) fail(ErrorKind::Config, "top_confident: k must be >= 1");
  const std::size_t n = predictions.row_ids.size();
  std::vector<std::vector<std::string>> out(predictions.classes.size());
  std::vector<char> taken(n, 0);
  for (std::size_t c = 0; c < predictions.classes.size(); ++c) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto col = static_cast<Eigen::Index>(c);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double pa = predictions.proba(static_cast<Eigen::Index>(a), col);
      const double pb = predictions.proba(static_cast<Eigen::Index>(b), col);
      if (pa != pb) return pa > pb;
      return predictions.row_ids[a] < predictions.row_ids[b];
    });
    for (std::size_t i : order) {
      if (out[c].size() >= k) break;
      if (taken[i]) continue;
      taken[i] = 1;
      out[c].push_back(predictions.row_ids[i]);
    }
    if (out[c].size() < k) {
      warn("top_confident: only " + std::to_string(out[c].size()) + " users available for class " +
           std::string(label_name(predictions.classes[c])));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// model.bin: "IDEOGBM1", u32 version, then fields in declaration order, little-endian.

namespace {

struct ByteWriter {
  std::string out;
  void u8(std::uint8_t v) { out.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out.append(s);
  }
};

struct ByteReader {
  std::string_view in;
  std::size_t pos = 0;
  void need(std::size_t n) {
    if (pos + n > in.size()) fail(ErrorKind::Format, "model: truncated");
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(in[pos++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u32();
    need(n);
    std::string s(in.substr(pos, n));
    pos += n;
    return s;
  }
};

constexpr std::string_view kModelMagic = "IDEOGBM1";
constexpr std::uint32_t kModelVersion = 1;

}  // namespace

std::string serialize_model(const BoostModel& model) {
  ByteWriter w;
  w.out.append(kModelMagic);
  w.u32(kModelVersion);
  w.u8(model.mode == Mode::LeftRight ? 0 : 1);
  w.u32(static_cast<std::uint32_t>(model.classes.size()));
  for (auto c : model.classes) w.u8(static_cast<std::uint8_t>(c));
  w.i64(model.width);
  const auto& c = model.config;
  w.i32(c.n_estimators);
  w.f64(c.learning_rate);
  w.i32(c.max_leaves);
  w.i32(c.min_samples_leaf);
  w.u8(c.class_balance ? 1 : 0);
  w.u64(c.rng_seed);
  w.i32(c.max_bins);
  w.u8(c.exact_splits ? 1 : 0);
  w.f64(c.lambda_l2);
  w.f64(c.min_child_hessian);
  w.f64(c.feature_fraction);
  w.str(model.proxy_name);
  w.str(model.lens_name);
  w.u32(static_cast<std::uint32_t>(model.seed_counts.size()));
  for (auto s : model.seed_counts) w.i64(s);
  w.u32(static_cast<std::uint32_t>(model.training_loss.size()));
  for (auto l : model.training_loss) w.f64(l);
  w.u32(static_cast<std::uint32_t>(model.functions.size()));
  for (const auto& fn : model.functions) {
    w.f64(fn.init_score);
    w.u32(static_cast<std::uint32_t>(fn.trees.size()));
    for (const auto& t : fn.trees) {
      w.u32(static_cast<std::uint32_t>(t.nodes.size()));
      for (const auto& n : t.nodes) {
        w.i32(n.feature);
        w.f64(n.threshold);
        w.i32(n.left);
        w.i32(n.right);
        w.f64(n.value);
      }
    }
  }
  return w.out;
}

BoostModel deserialize_model(std::string_view bytes) {
  ByteReader r{bytes};
  r.need(kModelMagic.size());
  if (bytes.substr(0, kModelMagic.size()) != kModelMagic) fail(ErrorKind::Format, "model: bad magic bytes");
  r.pos = kModelMagic.size();
  if (r.u32() != kModelVersion) fail(ErrorKind::Format, "model: unsupported version");
  BoostModel m;
  m.mode = r.u8() == 0 ? Mode::LeftRight : Mode::FarRight;
  const auto nc = r.u32();
  for (std::uint32_t i = 0; i < nc; ++i) m.classes.push_back(static_cast<Label>(r.u8()));
  m.width = r.i64();
  auto& c = m.config;
  c.n_estimators = r.i32();
  c.learning_rate = r.f64();
  c.max_leaves = r.i32();
  c.min_samples_leaf = r.i32();
  c.class_balance = r.u8() != 0;
  c.rng_seed = r.u64();
  c.max_bins = r.i32();
  c.exact_splits = r.u8() != 0;
  c.lambda_l2 = r.f64();
  c.min_child_hessian = r.f64();
  c.feature_fraction = r.f64();
  m.proxy_name = r.str();
  m.lens_name = r.str();
  const auto ns = r.u32();
  for (std::uint32_t i = 0; i < ns; ++i) m.seed_counts.push_back(r.i64());
  const auto nl = r.u32();
  for (std::uint32_t i = 0; i < nl; ++i) m.training_loss.push_back(r.f64());
  const auto nf = r.u32();
  for (std::uint32_t i = 0; i < nf; ++i) {
    ScoreFunction fn;
    fn.init_score = r.f64();
    const auto nt = r.u32();
    for (std::uint32_t t = 0; t < nt; ++t) {
      Tree tree;
      const auto nn = r.u32();
      for (std::uint32_t k = 0; k < nn; ++k) {
        TreeNode node;
        node.feature = r.i32();
        node.threshold = r.f64();
        node.left = r.i32();
        node.right = r.i32();
        node.value = r.f64();
        if (node.feature >= m.width || (node.feature >= 0 && (node.left < 0 || node.right < 0 ||
                                                              static_cast<std::uint32_t>(node.right) >= nn))) {
          fail(ErrorKind::Format, "model: tree node references invalid feature or child");
        }
        tree.nodes.push_back(node);
      }
      fn.trees.push_back(std::move(tree));
    }
    m.functions.push_back(std::move(fn));
  }
  if (r.pos != bytes.size()) fail(ErrorKind::Format, "model: trailing bytes");
  return m;
}

void save_model(const BoostModel& model, const std::filesystem::path& path) { write_file(path, serialize_model(model)); }
BoostModel load_model(const std::filesystem::path& path) { return deserialize_model(read_file(path)); }

std::string model_json(const BoostModel& model) {
  using nlohmann::json;
  json j;
  j["mode"] = mode_name(model.mode);
  for (auto c : model.classes) j["classes"].push_back(label_name(c));
  j["width"] = model.width;
  j["proxy"] = model.proxy_name;
  j["lenses"] = model.lens_name;
  j["seed_counts"] = model.seed_counts;
  const auto& c = model.config;
  j["config"] = {{"n_estimators", c.n_estimators}, {"learning_rate", c.learning_rate}, {"max_leaves", c.max_leaves},
                 {"min_samples_leaf", c.min_samples_leaf}, {"class_balance", c.class_balance},
                 {"rng_seed", c.rng_seed}, {"max_bins", c.max_bins}, {"exact_splits", c.exact_splits},
                 {"lambda_l2", c.lambda_l2}, {"min_child_hessian", c.min_child_hessian},
                 {"feature_fraction", c.feature_fraction}};
  j["training_loss"] = model.training_loss;
  for (const auto& fn : model.functions) {
    json jf;
    jf["init_score"] = fn.init_score;
    for (const auto& t : fn.trees) {
      json jt = json::array();
      for (const auto& n : t.nodes) {
        if (n.feature < 0) jt.push_back({{"leaf", n.value}});
        else jt.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
      }
      jf["trees"].push_back(jt);
    }
    j["functions"].push_back(jf);
  }
  return j.dump(2);
}

}  // namespace ideo
