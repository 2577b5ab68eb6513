#include "ideo/psycho.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "ideo/common.hpp"
#include "json.hpp"

namespace ideo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ975 = 1.959963984540054;

/// Rows of a tab-separated dictionary, with a recognized header row dropped.
std::vector<std::vector<std::string>> dictionary_rows(const std::filesystem::path& path, std::size_t min_fields,
                                                      std::string_view header_first) {
  auto table = read_table(path, '\t', false);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto& r = table.rows[i];
    if (i == 0 && !r.empty() && to_lower(r[0]) == header_first) continue;
    if (r.size() < min_fields) {
      fail(ErrorKind::Format, path.string() + ":" + std::to_string(table.line_numbers[i]) + ": expected " +
                                  std::to_string(min_fields) + " tab-separated fields");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? kNaN : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Linear-interpolation quantile of a sorted sample.
double quantile_sorted(const std::vector<double>& s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view foundation_name(Foundation f) {
  switch (f) {
    case Foundation::Care: return "care";
    case Foundation::Fairness: return "fairness";
    case Foundation::Loyalty: return "loyalty";
    case Foundation::Authority: return "authority";
    case Foundation::Sanctity: return "sanctity";
  }
  return "?";
}

Foundation parse_foundation(std::string_view s) {
  const auto l = to_lower(trim(s));
  for (auto f : kFoundations)
    if (l == foundation_name(f)) return f;
  if (l == "harm") return Foundation::Care;
  if (l == "purity" || l == "degradation") return Foundation::Sanctity;
  if (l == "ingroup" || l == "betrayal") return Foundation::Loyalty;
  if (l == "cheating") return Foundation::Fairness;
  if (l == "subversion") return Foundation::Authority;
  fail(ErrorKind::Format, "unknown moral foundation '" + std::string(s) + "'");
}

bool is_individualizing(Foundation f) { return f == Foundation::Care || f == Foundation::Fairness; }

GroupAssignment assign_groups(const Predictions& left_right, const Predictions* far_right,
                              const GroupOptions& options) {
  const auto right_col = left_right.class_column(Label::Right);
  if (right_col < 0) fail(ErrorKind::Config, "left-right predictions carry no Right column");
  std::map<std::string_view, double> fr;
  if (far_right) {
    const auto c = far_right->class_column(Label::FarRight);
    if (c < 0) fail(ErrorKind::Config, "far-right predictions carry no FarRight column");
    for (std::size_t i = 0; i < far_right->row_ids.size(); ++i)
      fr.emplace(far_right->row_ids[i], far_right->proba(static_cast<Eigen::Index>(i), c));
  }
  GroupAssignment out;
  for (std::size_t i = 0; i < left_right.row_ids.size(); ++i) {
    const auto& u = left_right.row_ids[i];
    if (auto it = fr.find(u); it != fr.end() && it->second >= options.far_right_threshold) {
      out[u] = Label::FarRight;
      continue;
    }
    const double p = left_right.proba(static_cast<Eigen::Index>(i), right_col);
    if (std::abs(p - 0.5) <= options.neutral_band) {
      out[u] = Label::Neutral;
    } else {
      out[u] = p > 0.5 ? Label::Right : Label::Left;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Moral foundations

MoralDictionary load_moral_dictionary(const std::filesystem::path& path) {
  MoralDictionary d;
  for (const auto& r : dictionary_rows(path, 3, "word")) {
    const auto f = static_cast<std::size_t>(parse_foundation(r[1]));
    const auto pole = to_lower(r[2]);
    const auto word = to_lower(r[0]);
    if (pole == "virtue") {
      d.virtue[f].push_back(word);
    } else if (pole == "vice") {
      d.vice[f].push_back(word);
    } else {
      fail(ErrorKind::Format, path.string() + ": pole must be virtue or vice, got '" + r[2] + "'");
    }
  }
  return d;
}

MoralAxes build_axes(const MoralDictionary& dictionary, const WordVectors& vectors) {
  MoralAxes out;
  out.axes.setZero(kNumFoundations, vectors.dim());
  for (int f = 0; f < kNumFoundations; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    const auto pole_mean = [&](const std::vector<std::string>& words, int& found) {
      Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(vectors.dim());
      for (const auto& w : words) {
        if (auto i = vectors.index(w)) {
          sum += vectors.row(*i);
          ++found;
        }
      }
      return Eigen::RowVectorXd(found ? Eigen::RowVectorXd(sum / found) : sum);
    };
    const Eigen::RowVectorXd virtue = pole_mean(dictionary.virtue[fi], out.virtue_found[fi]);
    const Eigen::RowVectorXd vice = pole_mean(dictionary.vice[fi], out.vice_found[fi]);
    const auto name = std::string(foundation_name(static_cast<Foundation>(f)));
    if (out.virtue_found[fi] == 0 || out.vice_found[fi] == 0) {
      fail(ErrorKind::Config, "moral axis " + name + " has no embedded " +
                                  (out.virtue_found[fi] == 0 ? "virtue" : "vice") + " word");
    }
    out.axes.row(f) = virtue - vice;
    if (!out.axes.row(f).allFinite() || out.axes.row(f).norm() == 0.0) {
      fail(ErrorKind::Config, "moral axis " + name + " is degenerate");
    }
  }
  return out;
}

std::vector<Counts> user_token_counts(const CorpusIndex& corpus, const std::vector<std::string>& users) {
  std::vector<Counts> out(users.size());
  parallel_for(users.size(), [&](std::size_t i) {
    const auto* rec = corpus.find(users[i]);
    if (!rec) return;
    for (auto& t : word_tokens(rec->concatenated_text)) ++out[i][t];
  });
  return out;
}

UserMoralScores frameaxis_scores(const std::vector<std::string>& users, const std::vector<Counts>& tokens,
                                 const MoralAxes& axes, const WordVectors& vectors) {
  if (users.size() != tokens.size()) fail(ErrorKind::Shape, "frameaxis: users and token counts differ in length");
  if (axes.axes.cols() != vectors.dim()) fail(ErrorKind::Shape, "frameaxis: axis and word-vector dimensions differ");

  // Cosine similarity of every distinct embedded token with each axis.
  std::unordered_map<std::string_view, FoundationRow> sim;
  {
    std::vector<std::string_view> vocab;
    std::set<std::string_view> seen;
    for (const auto& c : tokens)
      for (const auto& [w, n] : c)
        if (seen.insert(w).second) vocab.push_back(w);
    const Eigen::Matrix<double, kNumFoundations, 1> axis_norms = axes.axes.rowwise().norm();
    std::vector<std::optional<FoundationRow>> rows(vocab.size());
    parallel_for(vocab.size(), [&](std::size_t k) {
      const auto i = vectors.index(vocab[k]);
      if (!i) return;
      const auto v = vectors.row(*i);
      const double norm = v.norm();
      if (!(norm > 0.0)) return;
      FoundationRow s = (axes.axes * v.transpose()).transpose();
      s = s.cwiseQuotient(axis_norms.transpose()) / norm;
      rows[k] = s;
    });
    for (std::size_t k = 0; k < vocab.size(); ++k)
      if (rows[k]) sim.emplace(vocab[k], *rows[k]);
  }

  std::vector<FoundationRow> weighted(users.size(), FoundationRow::Zero());
  std::vector<std::int64_t> n_embedded(users.size(), 0);
  parallel_for(users.size(), [&](std::size_t u) {
    for (const auto& [w, n] : tokens[u]) {
      auto it = sim.find(w);
      if (it == sim.end()) continue;
      weighted[u] += static_cast<double>(n) * it->second;
      n_embedded[u] += n;
    }
  });

  UserMoralScores out;
  FoundationRow total = FoundationRow::Zero();
  std::int64_t total_n = 0;
  std::vector<std::size_t> kept;
  for (std::size_t u = 0; u < users.size(); ++u) {
    if (n_embedded[u] == 0) {
      ++out.excluded;
      continue;
    }
    kept.push_back(u);
    total += weighted[u];
    total_n += n_embedded[u];
  }
  if (total_n > 0) out.corpus_bias = total / static_cast<double>(total_n);

  const auto n = static_cast<Eigen::Index>(kept.size());
  out.bias.resize(n, kNumFoundations);
  out.intensity.resize(n, kNumFoundations);
  out.users.resize(kept.size());
  out.embedded_tokens.resize(kept.size());
  parallel_for(kept.size(), [&](std::size_t k) {
    const auto u = kept[k];
    const double nu = static_cast<double>(n_embedded[u]);
    FoundationRow second = FoundationRow::Zero();
    for (const auto& [w, c] : tokens[u]) {
      auto it = sim.find(w);
      if (it == sim.end()) continue;
      second += static_cast<double>(c) * (it->second - out.corpus_bias).array().square().matrix();
    }
    const auto r = static_cast<Eigen::Index>(k);
    out.bias.row(r) = weighted[u] / nu;
    out.intensity.row(r) = second / nu;
    out.users[k] = users[u];
    out.embedded_tokens[k] = n_embedded[u];
  });
  return out;
}

UserMoralScores frameaxis_scores(const CorpusIndex& corpus, const std::vector<std::string>& users,
                                 const MoralAxes& axes, const WordVectors& vectors) {
  return frameaxis_scores(users, user_token_counts(corpus, users), axes, vectors);
}

ViceVirtue vice_virtue(double bias, double intensity) {
  if (bias > 0.0) return {intensity, 0.0};
  if (bias < 0.0) return {0.0, intensity};
  return {};
}

// ---------------------------------------------------------------------------
// Grievance

GrievanceDictionary load_grievance_dictionary(const std::filesystem::path& path) {
  GrievanceDictionary d;
  std::vector<std::pair<std::string, std::string>> entries;
  std::set<std::string> cats;
  for (const auto& r : dictionary_rows(path, 2, "word")) {
    const auto word = to_lower(r[0]);
    const auto cat = to_lower(r[1]);
    entries.emplace_back(word, cat);
    cats.insert(cat);
    if (r.size() >= 3 && !r[2].empty()) d.weights[word] = parse_double(r[2], path.string() + ": weight");
  }
  d.categories.assign(cats.begin(), cats.end());
  for (const auto& [w, c] : entries) {
    const int idx = static_cast<int>(std::lower_bound(d.categories.begin(), d.categories.end(), c) - d.categories.begin());
    auto& v = d.words[w];
    if (std::find(v.begin(), v.end(), idx) == v.end()) v.push_back(idx);
  }
  return d;
}

GrievanceScores grievance_scores(const std::vector<std::string>& users, const std::vector<Counts>& tokens,
                                 const GrievanceDictionary& dictionary) {
  if (users.size() != tokens.size()) fail(ErrorKind::Shape, "grievance: users and token counts differ in length");
  GrievanceScores out;
  out.categories = dictionary.categories;
  const auto k = static_cast<Eigen::Index>(dictionary.categories.size());
  std::vector<std::size_t> kept;
  std::vector<std::int64_t> totals(users.size(), 0);
  for (std::size_t u = 0; u < users.size(); ++u) {
    for (const auto& [w, n] : tokens[u]) totals[u] += n;
    if (totals[u] > 0) kept.push_back(u);
  }
  out.rate.setZero(static_cast<Eigen::Index>(kept.size()), k);
  out.users.resize(kept.size());
  parallel_for(kept.size(), [&](std::size_t r) {
    const auto u = kept[r];
    out.users[r] = users[u];
    for (const auto& [w, n] : tokens[u]) {
      auto it = dictionary.words.find(w);
      if (it == dictionary.words.end()) continue;
      for (int c : it->second) out.rate(static_cast<Eigen::Index>(r), c) += static_cast<double>(n);
    }
    out.rate.row(static_cast<Eigen::Index>(r)) /= static_cast<double>(totals[u]);
  });
  return out;
}

std::vector<double> freedman_diaconis_edges(const std::vector<double>& sample) {
  if (sample.empty()) return {};
  std::vector<double> s(sample);
  std::sort(s.begin(), s.end());
  const double lo = s.front(), hi = s.back();
  if (!(hi > lo)) return {};
  const double n = static_cast<double>(s.size());
  const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
  double bins = 0;
  if (iqr > 0.0) {
    bins = std::ceil((hi - lo) / (2.0 * iqr * std::pow(n, -1.0 / 3.0)));
  } else {
    bins = std::ceil(std::log2(n) + 1.0);
  }
  // Heavy tails with a tiny IQR can ask for absurd bin counts.
  const auto k = static_cast<std::size_t>(std::clamp(bins, 1.0, 10000.0));
  std::vector<double> edges(k + 1);
  for (std::size_t i = 0; i <= k; ++i) edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k);
  edges.back() = hi;
  return edges;
}

std::vector<double> histogram_counts(const std::vector<double>& sample, const std::vector<double>& edges) {
  if (edges.size() < 2) fail(ErrorKind::Config, "histogram needs at least two edges");
  const std::size_t k = edges.size() - 1;
  const double lo = edges.front(), hi = edges.back();
  std::vector<double> counts(k, 0.0);
  for (double x : sample) {
    if (x < lo || x > hi) continue;
    auto i = static_cast<std::size_t>(std::min<double>(std::floor((x - lo) / (hi - lo) * static_cast<double>(k)),
                                                       static_cast<double>(k - 1)));
    // Floating point can land one bin off the true edge.
    if (i > 0 && x < edges[i]) --i;
    if (i + 1 < k && x >= edges[i + 1]) ++i;
    counts[i] += 1.0;
  }
  return counts;
}

Eigen::VectorXd laplace_distribution(const std::vector<double>& counts) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(counts.size()));
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0) + static_cast<double>(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p(static_cast<Eigen::Index>(i)) = (counts[i] + 1.0) / total;
  return p;
}

double kl_divergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) fail(ErrorKind::Shape, "kl_divergence: distributions differ in length");
  double d = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= 0.0) continue;
    if (q(i) <= 0.0) return std::numeric_limits<double>::infinity();
    d += p(i) * std::log(p(i) / q(i));
  }
  return d;
}

double signed_kl(const std::vector<double>& group, const std::vector<double>& neutral) {
  if (group.empty() || neutral.empty()) fail(ErrorKind::Config, "signed_kl: both samples must be nonempty");
  std::vector<double> pooled(group);
  pooled.insert(pooled.end(), neutral.begin(), neutral.end());
  const auto edges = freedman_diaconis_edges(pooled);
  if (edges.empty()) return 0.0;
  const double d = kl_divergence(laplace_distribution(histogram_counts(group, edges)),
                                 laplace_distribution(histogram_counts(neutral, edges)));
  const double diff = mean_of(group) - mean_of(neutral);
  return diff > 0.0 ? d : diff < 0.0 ? -d : 0.0;
}

// ---------------------------------------------------------------------------
// Rank tests

RankTest mann_whitney(const std::vector<double>& a, const std::vector<double>& b, Alternative alternative,
                      bool continuity) {
  if (a.empty() || b.empty()) fail(ErrorKind::Config, "mann_whitney: both samples must be nonempty");
  const std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;
  std::vector<std::pair<double, bool>> all;
  all.reserve(n);
  for (double x : a) all.emplace_back(x, true);
  for (double x : b) all.emplace_back(x, false);
  std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  double r1 = 0.0, ties = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && all[j].first == all[i].first) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    for (std::size_t k = i; k < j; ++k)
      if (all[k].second) r1 += rank;
    i = j;
  }
  const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2), dn = static_cast<double>(n);
  RankTest out;
  out.u = r1 - dn1 * (dn1 + 1.0) / 2.0;
  const double mu = dn1 * dn2 / 2.0;
  const double var = dn1 * dn2 / 12.0 * ((dn + 1.0) - ties / (dn * (dn - 1.0)));
  if (!(var > 0.0)) return out;
  const double sd = std::sqrt(var);
  const double cc = continuity ? 0.5 : 0.0;
  switch (alternative) {
    case Alternative::Greater:
      out.z = (out.u - mu - cc) / sd;
      out.p = 0.5 * std::erfc(out.z / std::sqrt(2.0));
      break;
    case Alternative::Less:
      out.z = (out.u - mu + cc) / sd;
      out.p = 0.5 * std::erfc(-out.z / std::sqrt(2.0));
      break;
    case Alternative::TwoSided:
      out.z = (std::abs(out.u - mu) - cc) / sd;
      out.p = std::min(1.0, std::erfc(out.z / std::sqrt(2.0)));
      break;
  }
  return out;
}

std::vector<bool> holm_reject(const std::vector<double>& p, double alpha, std::size_t family_size) {
  const std::size_t m = std::max(family_size, p.size());
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<bool> reject(p.size(), false);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (!(p[order[k]] <= alpha / static_cast<double>(m - k))) break;
    reject[order[k]] = true;
  }
  return reject;
}

int HypothesisTable::wins(Foundation f, const std::string& dataset) const {
  int w = 0;
  for (const auto& t : tests) w += t.dataset == dataset && t.foundation == f && t.win;
  return w;
}

int HypothesisTable::testable(Foundation f, const std::string& dataset) const {
  int w = 0;
  for (const auto& t : tests) w += t.dataset == dataset && t.foundation == f && t.testable;
  return w;
}

HypothesisTable mft_hypothesis_table(const std::vector<DatasetMoral>& datasets, double alpha, bool continuity) {
  HypothesisTable table;
  table.alpha = alpha;
  for (const auto& ds : datasets) {
    table.datasets.push_back(ds.name);
    // Per group, row indices into the score matrices.
    std::map<Label, std::vector<Eigen::Index>> rows;
    for (std::size_t i = 0; i < ds.scores.users.size(); ++i) {
      if (auto it = ds.groups.find(ds.scores.users[i]); it != ds.groups.end())
        rows[it->second].push_back(static_cast<Eigen::Index>(i));
    }
    const auto values = [&](Label g, MoralMeasure m, int f) {
      std::vector<double> v;
      const auto& M = m == MoralMeasure::Bias ? ds.scores.bias : ds.scores.intensity;
      for (auto r : rows[g]) v.push_back(M(r, f));
      return v;
    };
    const std::size_t first = table.tests.size();
    std::vector<double> p;
    std::vector<std::size_t> tested;
    for (auto f : kFoundations) {
      for (auto m : {MoralMeasure::Bias, MoralMeasure::Intensity}) {
        for (auto g : {Label::Right, Label::FarRight}) {
          HypothesisResult h;
          h.dataset = ds.name;
          h.foundation = f;
          h.measure = m;
          h.group = g;
          h.left_higher = is_individualizing(f);
          const auto left = values(Label::Left, m, static_cast<int>(f));
          const auto other = values(g, m, static_cast<int>(f));
          h.n_left = left.size();
          h.n_group = other.size();
          if (!left.empty() && !other.empty()) {
            const auto t = h.left_higher ? mann_whitney(left, other, Alternative::Greater, continuity)
                                         : mann_whitney(other, left, Alternative::Greater, continuity);
            h.testable = true;
            h.u = t.u;
            h.p = t.p;
            p.push_back(t.p);
            tested.push_back(table.tests.size());
          }
          table.tests.push_back(h);
        }
      }
    }
    const auto reject = holm_reject(p, alpha, table.tests.size() - first);
    for (std::size_t k = 0; k < tested.size(); ++k) table.tests[tested[k]].win = reject[k];
  }
  return table;
}

// ---------------------------------------------------------------------------
// Cognitive distortions

CdsPatterns make_cds_patterns(const std::vector<std::pair<std::string, std::string>>& ngram_distortion) {
  CdsPatterns p;
  std::set<std::string> names;
  for (const auto& [g, d] : ngram_distortion) names.insert(to_lower(trim(d)));
  p.distortions.assign(names.begin(), names.end());
  for (const auto& [g, d] : ngram_distortion) {
    const auto toks = word_tokens(to_lower(g));
    if (toks.empty() || toks.size() > 5) {
      fail(ErrorKind::Format, "CDS pattern '" + g + "' must have 1 to 5 tokens");
    }
    std::string key = toks[0];
    for (std::size_t i = 1; i < toks.size(); ++i) key += ' ' + toks[i];
    const int idx = static_cast<int>(
        std::lower_bound(p.distortions.begin(), p.distortions.end(), to_lower(trim(d))) - p.distortions.begin());
    auto& v = p.ngrams[key];
    if (std::find(v.begin(), v.end(), idx) == v.end()) v.push_back(idx);
    p.max_n = std::max(p.max_n, static_cast<int>(toks.size()));
  }
  return p;
}

CdsPatterns load_cds_patterns(const std::filesystem::path& path) {
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& r : dictionary_rows(path, 2, "ngram")) entries.emplace_back(r[0], r[1]);
  return make_cds_patterns(entries);
}

std::vector<bool> cds_matches(std::string_view text, const CdsPatterns& patterns) {
  std::vector<bool> hit(patterns.distortions.size(), false);
  const auto toks = word_tokens(text);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    std::string key;
    for (std::size_t n = 0; n < static_cast<std::size_t>(patterns.max_n) && i + n < toks.size(); ++n) {
      if (n) key += ' ';
      key += toks[i + n];
      if (auto it = patterns.ngrams.find(key); it != patterns.ngrams.end())
        for (int d : it->second) hit[static_cast<std::size_t>(d)] = true;
    }
  }
  return hit;
}

std::vector<CdsPrevalence> cds_prevalence(const CorpusIndex& corpus, const CdsPatterns& patterns,
                                          const GroupAssignment& groups, int bootstrap, std::uint64_t seed) {
  if (bootstrap < 1) fail(ErrorKind::Config, "cds_prevalence: bootstrap count must be >= 1");
  const std::size_t d = patterns.distortions.size();
  const std::size_t cols = d + 1;  // column 0 is "any"
  std::map<Label, std::vector<const UserRecord*>> members;
  for (const auto& [u, g] : groups)
    if (const auto* rec = corpus.find(u)) members[g].push_back(rec);

  std::vector<CdsPrevalence> out;
  for (auto g : kProfileGroups) {
    std::vector<const std::string*> posts;
    for (const auto* rec : members[g])
      for (const auto& t : rec->post_texts) posts.push_back(&t);
    if (posts.empty()) {
      warn("CDS prevalence: group " + std::string(label_name(g)) + " has no posts; skipped");
      continue;
    }
    const std::size_t n = posts.size();
    std::vector<std::uint8_t> flags(n * cols, 0);
    parallel_for(n, [&](std::size_t i) {
      const auto hit = cds_matches(*posts[i], patterns);
      bool any = false;
      for (std::size_t k = 0; k < d; ++k) {
        flags[i * cols + k + 1] = hit[k];
        any = any || hit[k];
      }
      flags[i * cols] = any;
    });
    std::vector<double> totals(cols, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < cols; ++k) totals[k] += flags[i * cols + k];

    const auto b = static_cast<std::size_t>(bootstrap);
    std::vector<double> reps(b * cols, 0.0);
    parallel_for(b, [&](std::size_t r) {
      Rng rng(mix_seed(seed, {0x636473ULL, static_cast<std::uint64_t>(g), r}));
      double* acc = &reps[r * cols];
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = rng.below(n);
        for (std::size_t k = 0; k < cols; ++k) acc[k] += flags[j * cols + k];
      }
      for (std::size_t k = 0; k < cols; ++k) acc[k] /= static_cast<double>(n);
    });
    for (std::size_t k = 0; k < cols; ++k) {
      CdsPrevalence p;
      p.group = g;
      p.distortion = k == 0 ? "any" : patterns.distortions[k - 1];
      p.posts = n;
      p.prevalence = totals[k] / static_cast<double>(n);
      p.bootstrap.resize(b);
      for (std::size_t r = 0; r < b; ++r) p.bootstrap[r] = reps[r * cols + k];
      out.push_back(std::move(p));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Regression models

LogisticFit logistic_irls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tol, int max_iterations) {
  if (X.rows() != y.size()) fail(ErrorKind::Shape, "logistic_irls: X and y differ in length");
  LogisticFit fit;
  fit.beta = Eigen::VectorXd::Zero(X.cols());
  Eigen::MatrixXd H(X.cols(), X.cols());
  for (;;) {
    const Eigen::ArrayXd mu = 1.0 / (1.0 + (-(X * fit.beta).array()).exp());
    const Eigen::VectorXd grad = X.transpose() * (y.array() - mu).matrix();
    const Eigen::VectorXd w = (mu * (1.0 - mu)).matrix();
    H.noalias() = X.transpose() * w.asDiagonal() * X;
    if (grad.norm() < tol) {
      fit.converged = true;
      break;
    }
    if (fit.iterations >= max_iterations) break;
    fit.beta += H.ldlt().solve(grad);
    ++fit.iterations;
    if (!fit.beta.allFinite()) break;
  }
  fit.se = H.ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols())).diagonal().cwiseSqrt();
  return fit;
}

namespace {

struct ZtpTerms {
  double loglik = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;  // negative Hessian
};

ZtpTerms ztp_terms(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  ZtpTerms t;
  const Eigen::VectorXd eta = X * beta;
  Eigen::VectorXd resid(y.size()), w(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double lam = std::exp(eta(i));
    const double one_minus = -std::expm1(-lam);  // 1 - e^-lam
    const double mean = lam / one_minus;
    t.loglik += y(i) * eta(i) - lam - std::log(one_minus) - std::lgamma(y(i) + 1.0);
    resid(i) = y(i) - mean;
    // Variance of the truncated count.
    w(i) = lam * (one_minus - lam * std::exp(-lam)) / (one_minus * one_minus);
  }
  t.grad = X.transpose() * resid;
  t.hess = X.transpose() * w.asDiagonal() * X;
  return t;
}

}  // namespace

PoissonFit truncated_poisson_newton(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tol,
                                    int max_iterations) {
  if (X.rows() != y.size()) fail(ErrorKind::Shape, "truncated_poisson_newton: X and y differ in length");
  if (y.size() == 0 || y.minCoeff() < 1.0) fail(ErrorKind::Config, "truncated Poisson needs counts >= 1");
  PoissonFit fit;
  fit.beta = Eigen::VectorXd::Zero(X.cols());
  auto t = ztp_terms(X, y, fit.beta);
  for (;;) {
    if (t.grad.norm() < tol) {
      fit.converged = true;
      break;
    }
    if (fit.iterations >= max_iterations) break;
    const Eigen::VectorXd step = t.hess.ldlt().solve(t.grad);
    double scale = 1.0;
    ZtpTerms next;
    for (int halving = 0; halving < 40; ++halving, scale /= 2.0) {
      next = ztp_terms(X, y, fit.beta + scale * step);
      if (next.loglik >= t.loglik - 1e-12 * std::abs(t.loglik)) break;
    }
    fit.beta += scale * step;
    t = std::move(next);
    ++fit.iterations;
  }
  fit.se = t.hess.ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols())).diagonal().cwiseSqrt();
  return fit;
}

namespace {

/// Groups in profile order with their users' counts of one emoji.
std::map<Label, std::vector<std::int64_t>> emoji_counts_by_group(const CorpusIndex& corpus,
                                                                 const GroupAssignment& groups,
                                                                 const std::string& emoji) {
  std::map<Label, std::vector<std::int64_t>> out;
  for (const auto& [u, g] : groups) {
    const auto* rec = corpus.find(u);
    if (!rec) continue;
    auto it = rec->emoji_counts.find(emoji);
    out[g].push_back(it == rec->emoji_counts.end() ? 0 : it->second);
  }
  return out;
}

}  // namespace

std::vector<OddsEstimate> emoji_odds(const CorpusIndex& corpus, const GroupAssignment& groups,
                                     const std::vector<std::string>& emoji) {
  std::vector<OddsEstimate> out;
  for (const auto& e : emoji) {
    const auto by_group = emoji_counts_by_group(corpus, groups, e);
    std::vector<OddsEstimate> rows;
    std::vector<Label> fitted;
    std::size_t n_fit = 0;
    for (auto g : kProfileGroups) {
      auto it = by_group.find(g);
      if (it == by_group.end() || it->second.empty()) continue;
      OddsEstimate o;
      o.emoji = e;
      o.group = g;
      o.users = it->second.size();
      o.present = static_cast<std::size_t>(std::count_if(it->second.begin(), it->second.end(),
                                                         [](std::int64_t c) { return c > 0; }));
      if (o.present == 0 || o.present == o.users) {
        o.censored = true;
        const double inf = std::numeric_limits<double>::infinity();
        o.coefficient = o.present == 0 ? -inf : inf;
        o.odds = o.present == 0 ? 0.0 : inf;
        o.se = o.ci_low = o.ci_high = kNaN;
      } else {
        fitted.push_back(g);
        n_fit += o.users;
      }
      rows.push_back(o);
    }
    if (!fitted.empty()) {
      Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_fit), static_cast<Eigen::Index>(fitted.size()));
      Eigen::VectorXd y(static_cast<Eigen::Index>(n_fit));
      Eigen::Index r = 0;
      for (std::size_t c = 0; c < fitted.size(); ++c) {
        for (auto count : by_group.at(fitted[c])) {
          X(r, static_cast<Eigen::Index>(c)) = 1.0;
          y(r++) = count > 0 ? 1.0 : 0.0;
        }
      }
      const auto fit = logistic_irls(X, y);
      if (!fit.converged) warn("emoji odds for " + e + " did not converge");
      for (auto& o : rows) {
        if (o.censored) continue;
        const auto c = static_cast<Eigen::Index>(std::find(fitted.begin(), fitted.end(), o.group) - fitted.begin());
        o.coefficient = fit.beta(c);
        o.se = fit.se(c);
        o.odds = std::exp(o.coefficient);
        o.ci_low = std::exp(o.coefficient - kZ975 * o.se);
        o.ci_high = std::exp(o.coefficient + kZ975 * o.se);
      }
    }
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

HurdleResult hurdle_model(const std::vector<std::pair<Label, std::int64_t>>& user_counts, Label reference,
                          const std::string& emoji) {
  HurdleResult res;
  res.emoji = emoji;
  res.reference = reference;
  std::map<Label, std::vector<std::int64_t>> by_group;
  for (const auto& [g, c] : user_counts) {
    if (c < 0) fail(ErrorKind::Config, "hurdle model: negative count");
    by_group[g].push_back(c);
  }
  if (by_group[reference].empty()) {
    fail(ErrorKind::Config, "hurdle model: reference group " + std::string(label_name(reference)) + " has no users");
  }
  std::vector<Label> order{reference};
  for (auto g : kProfileGroups)
    if (g != reference && by_group.count(g) && !by_group[g].empty()) order.push_back(g);
  for (const auto& [g, v] : by_group)
    if (!v.empty() && std::find(order.begin(), order.end(), g) == order.end()) order.push_back(g);

  for (auto g : order) {
    HurdleTerm t;
    t.group = g;
    t.reference = g == reference;
    const auto& v = by_group[g];
    t.users = v.size();
    std::set<std::int64_t> distinct;
    for (auto c : v) {
      if (c > 0) {
        ++t.positive;
        distinct.insert(c);
      }
    }
    t.zero_censored = t.positive == 0 || t.positive == t.users;
    t.count_degenerate = distinct.size() < 2;
    t.zero_coef = t.zero_se = t.count_coef = t.count_se = kNaN;
    res.terms.push_back(t);
  }

  // Design: intercept for the reference plus an indicator per other usable group.
  const auto fit_part = [&](auto usable, auto response, bool positive_only, auto&& fitter, auto&& store) {
    if (!usable(res.terms[0])) return false;
    std::vector<std::size_t> cols{0};
    for (std::size_t k = 1; k < res.terms.size(); ++k)
      if (usable(res.terms[k])) cols.push_back(k);
    std::vector<std::pair<std::size_t, double>> rows;  // (column term, y)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      for (auto cnt : by_group[res.terms[cols[c]].group]) {
        if (positive_only && cnt == 0) continue;
        rows.emplace_back(c, response(cnt));
      }
    }
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      X(static_cast<Eigen::Index>(i), 0) = 1.0;
      if (rows[i].first) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(rows[i].first)) = 1.0;
      y(static_cast<Eigen::Index>(i)) = rows[i].second;
    }
    const auto fit = fitter(X, y);
    for (std::size_t c = 0; c < cols.size(); ++c)
      store(res.terms[cols[c]], fit.beta(static_cast<Eigen::Index>(c)), fit.se(static_cast<Eigen::Index>(c)));
    return fit.converged;
  };

  const bool zero_ok = fit_part([](const HurdleTerm& t) { return !t.zero_censored; },
                                [](std::int64_t c) { return c > 0 ? 1.0 : 0.0; }, false,
                                [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y) { return logistic_irls(X, y); },
                                [](HurdleTerm& t, double b, double se) {
                                  t.zero_coef = b;
                                  t.zero_se = se;
                                });
  const bool count_ok = fit_part([](const HurdleTerm& t) { return !t.count_degenerate; },
                                 [](std::int64_t c) { return static_cast<double>(c); }, true,
                                 [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
                                   return truncated_poisson_newton(X, y);
                                 },
                                 [](HurdleTerm& t, double b, double se) {
                                   t.count_coef = b;
                                   t.count_se = se;
                                 });
  res.degenerate = !zero_ok || !count_ok;
  for (const auto& t : res.terms) res.degenerate = res.degenerate || t.count_degenerate;
  return res;
}

HurdleResult hurdle_model(const CorpusIndex& corpus, const GroupAssignment& groups, const std::string& emoji,
                          Label reference) {
  std::vector<std::pair<Label, std::int64_t>> counts;
  for (const auto& [g, v] : emoji_counts_by_group(corpus, groups, emoji))
    for (auto c : v) counts.emplace_back(g, c);
  return hurdle_model(counts, reference, emoji);
}

std::vector<std::string> top_emoji(const CorpusIndex& corpus, std::size_t k) {
  std::map<std::string, std::size_t> users;
  for (const auto& [u, rec] : corpus.users)
    for (const auto& [e, c] : rec.emoji_counts)
      if (c > 0) ++users[e];
  std::vector<std::pair<std::string, std::size_t>> v(users.begin(), users.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size() && i < k; ++i) out.push_back(v[i].first);
  return out;
}

std::optional<std::string> top_flag_emoji(const CorpusIndex& corpus) {
  // Regional indicators U+1F1E6..U+1F1FF encode as F0 9F 87 A6..BF.
  const auto is_flag = [](const std::string& e) {
    const auto b = [&](std::size_t i) { return static_cast<unsigned char>(e[i]); };
    return e.size() == 8 && b(0) == 0xF0 && b(1) == 0x9F && b(2) == 0x87 && b(3) >= 0xA6 && b(3) <= 0xBF;
  };
  for (const auto& e : top_emoji(corpus, std::numeric_limits<std::size_t>::max()))
    if (is_flag(e)) return e;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Profile report

PsychoResources load_psycho_resources(const std::filesystem::path& moral, const std::filesystem::path& grievance,
                                      const std::filesystem::path& cds, const std::filesystem::path& word_vectors) {
  PsychoResources r;
  r.moral = load_moral_dictionary(moral);
  r.grievance = load_grievance_dictionary(grievance);
  r.cds = load_cds_patterns(cds);
  r.vectors = WordVectors::load(word_vectors);
  return r;
}

DatasetProfile profile_dataset(const std::string& name, const CorpusIndex& corpus, const GroupAssignment& groups,
                               const PsychoResources& resources, const MoralAxes& axes,
                               const ProfileOptions& options) {
  DatasetProfile p;
  p.name = name;
  std::vector<std::string> users;
  GroupAssignment present;
  for (const auto& [u, g] : groups) {
    if (!corpus.find(u)) continue;
    users.push_back(u);
    present.emplace(u, g);
    ++p.group_sizes[g];
  }
  const auto tokens = user_token_counts(corpus, users);
  p.moral = frameaxis_scores(users, tokens, axes, resources.vectors);

  for (auto g : kProfileGroups) {
    GroupMoral gm;
    gm.group = g;
    for (std::size_t i = 0; i < p.moral.users.size(); ++i) {
      if (present.at(p.moral.users[i]) != g) continue;
      const auto r = static_cast<Eigen::Index>(i);
      ++gm.users;
      gm.bias_mean += p.moral.bias.row(r);
      gm.intensity_mean += p.moral.intensity.row(r);
      for (int f = 0; f < kNumFoundations; ++f) {
        const auto vv = vice_virtue(p.moral.bias(r, f), p.moral.intensity(r, f));
        gm.virtue_mean(f) += vv.virtue;
        gm.vice_mean(f) += vv.vice;
      }
    }
    if (gm.users == 0) continue;
    const double n = static_cast<double>(gm.users);
    gm.bias_mean /= n;
    gm.intensity_mean /= n;
    gm.virtue_mean /= n;
    gm.vice_mean /= n;
    p.moral_groups.push_back(gm);
  }

  const auto grievance = grievance_scores(users, tokens, resources.grievance);
  std::map<Label, std::vector<Eigen::Index>> grievance_rows;
  for (std::size_t i = 0; i < grievance.users.size(); ++i)
    grievance_rows[present.at(grievance.users[i])].push_back(static_cast<Eigen::Index>(i));
  if (grievance_rows[Label::Neutral].empty()) {
    warn("profile " + name + ": no neutral users; grievance divergences skipped");
  } else {
    const auto column = [&](Label g, Eigen::Index c) {
      std::vector<double> v;
      for (auto r : grievance_rows[g]) v.push_back(grievance.rate(r, c));
      return v;
    };
    for (auto g : {Label::Left, Label::Right, Label::FarRight}) {
      if (grievance_rows[g].empty()) continue;
      for (std::size_t c = 0; c < grievance.categories.size(); ++c) {
        const auto gv = column(g, static_cast<Eigen::Index>(c));
        const auto nv = column(Label::Neutral, static_cast<Eigen::Index>(c));
        p.grievance.push_back({g, grievance.categories[c], signed_kl(gv, nv), mean_of(gv), mean_of(nv)});
      }
    }
  }

  const std::uint64_t seed = mix_seed(options.seed, {hash_string(name)});
  p.cds = cds_prevalence(corpus, resources.cds, present, options.bootstrap, seed);
  const auto emoji = options.emoji.empty() ? top_emoji(corpus, options.top_emoji_count) : options.emoji;
  p.odds = emoji_odds(corpus, present, emoji);

  std::string flag = options.hurdle_emoji;
  if (flag.empty()) flag = top_flag_emoji(corpus).value_or("");
  if (flag.empty()) {
    warn("profile " + name + ": no flag emoji; hurdle model skipped");
  } else if (!p.group_sizes.count(options.hurdle_reference)) {
    warn("profile " + name + ": hurdle reference group " + std::string(label_name(options.hurdle_reference)) +
         " is empty; hurdle model skipped");
  } else {
    p.hurdle = hurdle_model(corpus, present, flag, options.hurdle_reference);
  }
  return p;
}

ProfileReport profile(const std::vector<ProfileInput>& datasets, const PsychoResources& resources,
                      const ProfileOptions& options) {
  const auto axes = build_axes(resources.moral, resources.vectors);
  ProfileReport report;
  std::vector<DatasetMoral> moral;
  for (const auto& d : datasets) {
    if (!d.corpus) fail(ErrorKind::Config, "profile: dataset " + d.name + " has no corpus");
    report.datasets.push_back(profile_dataset(d.name, *d.corpus, d.groups, resources, axes, options));
    moral.push_back({d.name, report.datasets.back().moral, d.groups});
  }
  report.hypotheses = mft_hypothesis_table(moral, options.alpha, options.continuity);
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using nlohmann::json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json foundation_row(const FoundationRow& r) {
  json j;
  for (auto f : kFoundations) j[std::string(foundation_name(f))] = num(r(static_cast<int>(f)));
  return j;
}

std::string csv_num(double v) { return std::isfinite(v) ? format_exact(v) : std::string(); }

std::string gname(Label g) { return std::string(label_name(g)); }

}  // namespace

std::string profile_report_json(const ProfileReport& report) {
  json root;
  root["datasets"] = json::array();
  for (const auto& d : report.datasets) {
    json jd;
    jd["name"] = d.name;
    for (const auto& [g, n] : d.group_sizes) jd["group_sizes"][gname(g)] = n;
    jd["moral"]["scored_users"] = d.moral.users.size();
    jd["moral"]["excluded_users"] = d.moral.excluded;
    jd["moral"]["corpus_bias"] = foundation_row(d.moral.corpus_bias);
    for (const auto& gm : d.moral_groups) {
      jd["moral"]["groups"].push_back({{"group", gname(gm.group)},
                                       {"users", gm.users},
                                       {"bias", foundation_row(gm.bias_mean)},
                                       {"intensity", foundation_row(gm.intensity_mean)},
                                       {"virtue", foundation_row(gm.virtue_mean)},
                                       {"vice", foundation_row(gm.vice_mean)}});
    }
    jd["grievance"] = json::array();
    for (const auto& g : d.grievance) {
      jd["grievance"].push_back({{"group", gname(g.group)},
                                 {"category", g.category},
                                 {"signed_kl", num(g.signed_kl)},
                                 {"group_mean", num(g.group_mean)},
                                 {"neutral_mean", num(g.neutral_mean)}});
    }
    jd["cds"] = json::array();
    for (const auto& c : d.cds) {
      json jb = json::array();
      for (double b : c.bootstrap) jb.push_back(b);
      jd["cds"].push_back({{"group", gname(c.group)},
                           {"distortion", c.distortion},
                           {"posts", c.posts},
                           {"prevalence", c.prevalence},
                           {"bootstrap", jb}});
    }
    jd["emoji_odds"] = json::array();
    for (const auto& o : d.odds) {
      jd["emoji_odds"].push_back({{"emoji", o.emoji},
                                  {"group", gname(o.group)},
                                  {"users", o.users},
                                  {"present", o.present},
                                  {"coefficient", num(o.coefficient)},
                                  {"se", num(o.se)},
                                  {"odds", num(o.odds)},
                                  {"ci_low", num(o.ci_low)},
                                  {"ci_high", num(o.ci_high)},
                                  {"censored", o.censored}});
    }
    if (d.hurdle) {
      json jh{{"emoji", d.hurdle->emoji}, {"reference", gname(d.hurdle->reference)}, {"degenerate", d.hurdle->degenerate}};
      for (const auto& t : d.hurdle->terms) {
        jh["terms"].push_back({{"group", gname(t.group)},
                               {"reference", t.reference},
                               {"users", t.users},
                               {"positive", t.positive},
                               {"zero_coef", num(t.zero_coef)},
                               {"zero_se", num(t.zero_se)},
                               {"zero_censored", t.zero_censored},
                               {"count_coef", num(t.count_coef)},
                               {"count_se", num(t.count_se)},
                               {"count_degenerate", t.count_degenerate}});
      }
      jd["hurdle"] = jh;
    }
    root["datasets"].push_back(jd);
  }
  const auto& h = report.hypotheses;
  root["hypotheses"]["alpha"] = h.alpha;
  root["hypotheses"]["tests"] = json::array();
  for (const auto& t : h.tests) {
    root["hypotheses"]["tests"].push_back({{"dataset", t.dataset},
                                           {"foundation", foundation_name(t.foundation)},
                                           {"measure", t.measure == MoralMeasure::Bias ? "bias" : "intensity"},
                                           {"group", gname(t.group)},
                                           {"left_higher", t.left_higher},
                                           {"testable", t.testable},
                                           {"n_left", t.n_left},
                                           {"n_group", t.n_group},
                                           {"u", t.u},
                                           {"p", t.p},
                                           {"win", t.win}});
  }
  for (auto f : kFoundations) {
    json row{{"foundation", foundation_name(f)}};
    for (const auto& ds : h.datasets) row[ds] = {{"wins", h.wins(f, ds)}, {"testable", h.testable(f, ds)}};
    root["hypotheses"]["win_loss"].push_back(row);
  }
  return root.dump(2) + "\n";
}

void save_profile_report(const ProfileReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "profile_report.json", profile_report_json(report));

  std::ostringstream vv, gk, cds, odds, hurdle, hyp, wl;
  vv << "dataset,group,foundation,users,bias_mean,intensity_mean,virtue_mean,vice_mean\n";
  gk << "dataset,group,category,signed_kl,group_mean,neutral_mean\n";
  cds << "dataset,group,distortion,posts,prevalence,boot_mean,boot_min,boot_q1,boot_median,boot_q3,boot_max\n";
  odds << "dataset,emoji,group,users,present,odds,ci_low,ci_high,censored\n";
  hurdle << "dataset,emoji,group,reference,part,coef,se,flagged\n";
  for (const auto& d : report.datasets) {
    for (const auto& gm : d.moral_groups) {
      for (auto f : kFoundations) {
        const int i = static_cast<int>(f);
        vv << d.name << ',' << gname(gm.group) << ',' << foundation_name(f) << ',' << gm.users << ','
           << csv_num(gm.bias_mean(i)) << ',' << csv_num(gm.intensity_mean(i)) << ',' << csv_num(gm.virtue_mean(i))
           << ',' << csv_num(gm.vice_mean(i)) << '\n';
      }
    }
    for (const auto& g : d.grievance) {
      gk << d.name << ',' << gname(g.group) << ',' << g.category << ',' << csv_num(g.signed_kl) << ','
         << csv_num(g.group_mean) << ',' << csv_num(g.neutral_mean) << '\n';
    }
    for (const auto& c : d.cds) {
      std::vector<double> s(c.bootstrap);
      std::sort(s.begin(), s.end());
      cds << d.name << ',' << gname(c.group) << ',' << c.distortion << ',' << c.posts << ',' << csv_num(c.prevalence)
          << ',' << csv_num(mean_of(s)) << ',' << csv_num(s.front()) << ',' << csv_num(quantile_sorted(s, 0.25)) << ','
          << csv_num(quantile_sorted(s, 0.5)) << ',' << csv_num(quantile_sorted(s, 0.75)) << ','
          << csv_num(s.back()) << '\n';
    }
    for (const auto& o : d.odds) {
      odds << d.name << ',' << o.emoji << ',' << gname(o.group) << ',' << o.users << ',' << o.present << ','
           << csv_num(o.odds) << ',' << csv_num(o.ci_low) << ',' << csv_num(o.ci_high) << ',' << (o.censored ? 1 : 0)
           << '\n';
    }
    if (d.hurdle) {
      for (const auto& t : d.hurdle->terms) {
        hurdle << d.name << ',' << d.hurdle->emoji << ',' << gname(t.group) << ',' << (t.reference ? 1 : 0)
               << ",zero," << csv_num(t.zero_coef) << ',' << csv_num(t.zero_se) << ',' << (t.zero_censored ? 1 : 0)
               << '\n';
        hurdle << d.name << ',' << d.hurdle->emoji << ',' << gname(t.group) << ',' << (t.reference ? 1 : 0)
               << ",count," << csv_num(t.count_coef) << ',' << csv_num(t.count_se) << ','
               << (t.count_degenerate ? 1 : 0) << '\n';
      }
    }
  }
  const auto& h = report.hypotheses;
  hyp << "dataset,foundation,measure,group,hypothesis,testable,n_left,n_group,u,p,win\n";
  for (const auto& t : h.tests) {
    hyp << t.dataset << ',' << foundation_name(t.foundation) << ','
        << (t.measure == MoralMeasure::Bias ? "bias" : "intensity") << ',' << gname(t.group) << ','
        << (t.left_higher ? "left>" : "left<") << gname(t.group) << ',' << (t.testable ? 1 : 0) << ',' << t.n_left
        << ',' << t.n_group << ',' << csv_num(t.u) << ',' << csv_num(t.p) << ',' << (t.win ? 1 : 0) << '\n';
  }
  wl << "foundation";
  for (const auto& ds : h.datasets) wl << ',' << ds;
  wl << '\n';
  for (auto f : kFoundations) {
    wl << foundation_name(f);
    for (const auto& ds : h.datasets) wl << ',' << h.wins(f, ds) << '/' << h.testable(f, ds);
    wl << '\n';
  }
  write_file(dir / "vice_virtue.csv", vv.str());
  write_file(dir / "grievance_signed_kl.csv", gk.str());
  write_file(dir / "cds_prevalence.csv", cds.str());
  write_file(dir / "emoji_odds.csv", odds.str());
  write_file(dir / "hurdle.csv", hurdle.str());
  write_file(dir / "hypotheses.csv", hyp.str());
  write_file(dir / "hypotheses_win_loss.csv", wl.str());
}

}  // namespace ideo
