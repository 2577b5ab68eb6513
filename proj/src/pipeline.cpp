#include "ideo/pipeline.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "ideo/common.hpp"
#include "ideo/mediaslant.hpp"
#include "json.hpp"

namespace ideo {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return 2;
    case ErrorKind::Format: return 3;
    case ErrorKind::CorpusQuality: return 4;
    case ErrorKind::Calibration: return 5;
    case ErrorKind::Proxy: return 6;
    case ErrorKind::Training: return 7;
    case ErrorKind::Shape: return 8;
    case ErrorKind::UndefinedMetric: return 9;
    case ErrorKind::Config: return 10;
  }
  return 1;
}

namespace {

void require_file(const fs::path& p, const std::string& what) {
  if (p.empty()) fail(ErrorKind::Config, what + " is not configured");
  if (!fs::exists(p)) fail(ErrorKind::Io, what + " not found: " + p.string());
}

void check_optional_file(const fs::path& p, const std::string& what) {
  if (!p.empty() && !fs::exists(p)) fail(ErrorKind::Io, what + " not found: " + p.string());
}

std::string dataset_name(const DatasetSpec& spec) {
  if (!spec.name.empty()) return spec.name;
  return spec.path.stem().string();
}

json cell_json(const CellMetrics& m) {
  json j{{"available", m.available}, {"n_train", m.n_train}, {"n_eval", m.n_eval}};
  if (m.available) {
    j["roc_auc"] = m.roc_auc;
    j["f1_macro"] = m.f1_macro;
    j["precision_macro"] = m.precision_macro;
    j["recall_macro"] = m.recall_macro;
    j["folds_scored"] = m.folds_scored;
  }
  if (!m.note.empty()) j["note"] = m.note;
  return j;
}

json label_counts(const std::map<Label, std::size_t>& counts) {
  json j = json::object();
  for (const auto& [l, n] : counts) j[std::string(label_name(l))] = n;
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Datasets, proxies, features

CorpusIndex load_dataset(const DatasetSpec& spec) {
  require_file(spec.path, "dataset");
  if (spec.format == "index") return load_corpus(spec.path);
  IngestOptions opt;
  opt.format = parse_input_format(spec.format);
  opt.exclude_quotes = spec.exclude_quotes;
  opt.dataset_id = dataset_name(spec);
  IngestStats stats;
  auto corpus = ingest_file(spec.path, opt, &stats);
  if (stats.malformed > 0) warn(spec.path.string() + ": " + std::to_string(stats.malformed) + " malformed lines skipped");
  return corpus;
}

std::vector<std::string> proxies_for(Mode mode) {
  if (mode == Mode::LeftRight)
    return {std::string(kProxyHashtags), std::string(kProxyPartyFollowers), std::string(kProxyPoliticianEndorsers),
            std::string(kProxyLeftRightMpp)};
  return {std::string(kProxyFarRightMpp), std::string(kProxyMbfcMpp)};
}

SeedLabels build_proxy(const std::string& name, const CorpusIndex& corpus, const ProxyInputs& in) {
  if (name == kProxyHashtags) {
    require_file(in.hashtag_codes, "hashtag codes");
    return hashtag_proxy(corpus, load_hashtag_codes(in.hashtag_codes));
  }
  if (name == kProxyPartyFollowers) {
    require_file(in.party_roster, "party roster");
    return party_follower_proxy(corpus, load_party_roster(in.party_roster));
  }
  if (name == kProxyPoliticianEndorsers) {
    require_file(in.politicians, "politician roster");
    return politician_endorser_proxy(corpus, load_politicians(in.politicians));
  }
  if (name == kProxyLeftRightMpp) {
    require_file(in.slants, "slant table");
    return mpp_left_right(corpus, load_slant_table(in.slants));
  }
  if (name == kProxyFarRightMpp) {
    require_file(in.slants, "slant table");
    return mpp_far_right(corpus, load_slant_table(in.slants), in.far_right_threshold);
  }
  if (name == kProxyMbfcMpp) {
    require_file(in.mbfc, "MBFC classes");
    return mbfc_far_right(corpus, load_mbfc(in.mbfc));
  }
  fail(ErrorKind::Config, "unknown proxy: " + name);
}

std::optional<EmbeddingFile> lexical_source(const DatasetSpec& spec, const CorpusIndex& corpus) {
  if (!spec.embeddings.empty()) {
    require_file(spec.embeddings, "embeddings");
    return load_embeddings(spec.embeddings);
  }
  if (!spec.word_vectors.empty()) {
    require_file(spec.word_vectors, "word vectors");
    std::size_t missing = 0;
    auto e = mean_word_vector_embeddings(corpus, WordVectors::load(spec.word_vectors), &missing);
    if (missing > 0) warn(std::to_string(missing) + " users have no token with a word vector; zero lexical rows");
    return e;
  }
  return std::nullopt;
}

FeatureMatrix build_features(const LensSelection& lenses, const CorpusIndex& corpus,
                             const std::optional<EmbeddingFile>& embeddings, const LensOptions& options) {
  if (lenses.empty()) fail(ErrorKind::Config, "lens selection is empty");
  if (lenses.use && !embeddings) fail(ErrorKind::Config, "lexical lens needs embeddings or word vectors");
  return assemble(lenses, corpus, corpus.user_ids(), embeddings ? &*embeddings : nullptr, options);
}

// ---------------------------------------------------------------------------
// Single pipeline

void PipelineConfig::validate() const {
  if (lenses.empty()) fail(ErrorKind::Config, "lens selection is empty");
  require_file(dataset.path, "dataset");
  check_optional_file(dataset.embeddings, "embeddings");
  check_optional_file(dataset.word_vectors, "word vectors");
  check_optional_file(dataset.gold, "gold labels");
  const auto& p = dataset.proxies;
  for (const auto& [file, what] : std::vector<std::pair<fs::path, std::string>>{
           {p.hashtag_codes, "hashtag codes"}, {p.party_roster, "party roster"}, {p.politicians, "politician roster"},
           {p.slants, "slant table"}, {p.mbfc, "MBFC classes"}})
    check_optional_file(file, what);
  const auto names = proxies_for(mode);
  if (std::find(names.begin(), names.end(), proxy) == names.end())
    fail(ErrorKind::Config, "proxy " + proxy + " does not label " + std::string(mode_name(mode)) + " users");
  if (cv_folds == 1 || cv_folds < 0) fail(ErrorKind::Config, "cv_folds must be 0 or at least 2");
  boost.validate();
}

std::vector<Label> argmax_decisions(const Predictions& p, const Calibration* calibration) {
  std::vector<Label> out(static_cast<std::size_t>(p.proba.rows()));
  for (Eigen::Index i = 0; i < p.proba.rows(); ++i) {
    Eigen::Index k = 0;
    if (calibration) k = calibration->decide(p.proba.row(i));
    else p.proba.row(i).maxCoeff(&k);
    out[static_cast<std::size_t>(i)] = p.classes[static_cast<std::size_t>(k)];
  }
  return out;
}

std::string predictions_tsv(const Predictions& p, const std::vector<Label>& decisions) {
  std::string s = "user_id\tlabel\tprobability\n";
  for (std::size_t i = 0; i < p.row_ids.size(); ++i) {
    const auto col = p.class_column(decisions[i]);
    s += p.row_ids[i] + "\t" + std::string(label_name(decisions[i])) + "\t" +
         format_fixed(p.proba(static_cast<Eigen::Index>(i), col), 6) + "\n";
  }
  return s;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  PipelineResult r;
  const auto corpus = load_dataset(config.dataset);
  r.seeds = build_proxy(config.proxy, corpus, config.dataset.proxies);
  const auto embeddings = config.lenses.use ? lexical_source(config.dataset, corpus) : std::nullopt;
  const auto fm = build_features(config.lenses, corpus, embeddings, config.lens_options);

  BoostConfig boost = config.boost;
  boost.rng_seed = config.seed;
  r.model = train(fm, r.seeds, boost);
  r.predictions = predict_proba(r.model, fm);

  if (!config.dataset.gold.empty()) {
    const auto split = split_gold(load_gold(config.dataset.gold, config.mode), config.seed);
    std::unordered_map<std::string, Eigen::Index> row;
    for (std::size_t i = 0; i < r.predictions.row_ids.size(); ++i)
      row.emplace(r.predictions.row_ids[i], static_cast<Eigen::Index>(i));
    const auto gather = [&](const SeedLabels& s, std::vector<int>& truth) {
      std::vector<Eigen::Index> rows;
      for (const auto& [u, l] : s.labels) {
        auto it = row.find(u);
        const auto k = class_index(config.mode, l);
        if (it == row.end() || !k) continue;
        rows.push_back(it->second);
        truth.push_back(*k);
      }
      Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), r.predictions.proba.cols());
      for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = r.predictions.proba.row(rows[i]);
      return out;
    };
    std::vector<int> val_truth, test_truth;
    const auto val = gather(split.validation, val_truth);
    const auto test = gather(split.test, test_truth);
    if (std::set<int>(val_truth.begin(), val_truth.end()).size() >= 2) r.calibration = calibrate_threshold(val, val_truth);
    else warn("gold validation split holds fewer than two classes; argmax decisions");
    if (std::set<int>(test_truth.begin(), test_truth.end()).size() >= 2) {
      r.gold = score_predictions(test, test_truth, r.calibration ? &*r.calibration : nullptr);
      r.gold->n_train = r.seeds.trainable().size();
    } else {
      warn("gold test split holds fewer than two classes; no gold metrics");
    }
  }
  if (config.cv_folds >= 2) r.cv = cross_validate(fm, r.seeds, boost, {config.cv_folds, config.seed});
  r.decisions = argmax_decisions(r.predictions, r.calibration ? &*r.calibration : nullptr);

  fs::create_directories(config.output);
  save_seeds(r.seeds, config.output / "seeds.tsv");
  save_model(r.model, config.output / "model.bin");
  write_file(config.output / "predictions.tsv", predictions_tsv(r.predictions, r.decisions));

  json m;
  m["dataset"] = corpus.dataset_id;
  m["mode"] = std::string(mode_name(config.mode));
  m["proxy"] = r.seeds.proxy_name;
  m["lenses"] = config.lenses.name();
  m["seed"] = config.seed;
  m["n_users"] = corpus.n_users();
  m["n_seeds"] = r.seeds.size();
  m["seed_coverage"] = r.seeds.coverage;
  m["seed_counts"] = label_counts(r.seeds.counts());
  m["feature_width"] = fm.width();
  std::map<Label, std::size_t> predicted;
  for (auto l : r.decisions) ++predicted[l];
  m["predicted_counts"] = label_counts(predicted);
  if (r.calibration) m["calibration"] = {{"thresholds", r.calibration->thresholds},
                                         {"validation_f1_macro", r.calibration->validation_f1_macro}};
  if (r.cv) m["cross_validation"] = cell_json(*r.cv);
  if (r.gold) m["gold"] = cell_json(*r.gold);
  write_file(config.output / "metrics.json", m.dump(2) + "\n");
  return r;
}

// ---------------------------------------------------------------------------
// Experiments

void ExperimentConfig::validate() const {
  static const std::set<std::string> known = {"ablation", "cross-proxy", "cross-dataset", "psychosocial"};
  for (const auto& k : kinds)
    if (!known.count(k)) fail(ErrorKind::Config, "unknown experiment kind: " + k);
  if (datasets.empty()) fail(ErrorKind::Config, "no datasets configured");
  std::set<std::string> names;
  for (const auto& d : datasets) {
    require_file(d.path, "dataset");
    if (!names.insert(dataset_name(d)).second) fail(ErrorKind::Config, "duplicate dataset name: " + dataset_name(d));
  }
  const auto allowed = proxies_for(mode);
  for (const auto& p : proxies)
    if (std::find(allowed.begin(), allowed.end(), p) == allowed.end())
      fail(ErrorKind::Config, "proxy " + p + " does not label " + std::string(mode_name(mode)) + " users");
  if (lenses.empty()) fail(ErrorKind::Config, "lens selection is empty");
  const auto wants = [&](const char* k) { return kinds.empty() || std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };
  if (wants("psychosocial")) {
    require_file(psycho.moral, "moral foundations dictionary");
    require_file(psycho.grievance, "grievance dictionary");
    require_file(psycho.cds, "CDS patterns");
    if (psycho.word_vectors.empty() && datasets.front().word_vectors.empty())
      fail(ErrorKind::Config, "psychosocial profiling needs word vectors");
  }
  boost.validate();
  far_right_boost.validate();
}

namespace {

struct Loaded {
  DatasetSpec spec;
  std::string name;
  CorpusIndex corpus;
  std::optional<EmbeddingFile> embeddings;
  bool embeddings_loaded = false;

  const std::optional<EmbeddingFile>& lexical() {
    if (!embeddings_loaded) {
      embeddings = lexical_source(spec, corpus);
      embeddings_loaded = true;
    }
    return embeddings;
  }
};

std::string groups_tsv(const GroupAssignment& groups) {
  std::string s = "user_id\tgroup\n";
  for (const auto& [u, l] : groups) s += u + "\t" + std::string(label_name(l)) + "\n";
  return s;
}

HopkinsResult lens_hopkins(const FeatureMatrix& fm, std::size_t rows, std::uint64_t seed) {
  std::vector<Eigen::Index> pick(static_cast<std::size_t>(fm.rows()));
  for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = static_cast<Eigen::Index>(i);
  if (pick.size() > rows) {
    Rng rng(seed);
    rng.shuffle(pick.begin(), pick.end());
    pick.resize(rows);
    std::sort(pick.begin(), pick.end());
  }
  return hopkins(fm.select_rows(pick).dense(), std::nullopt, seed);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto wants = [&](const char* k) {
    return config.kinds.empty() || std::find(config.kinds.begin(), config.kinds.end(), k) != config.kinds.end();
  };
  const auto proxy_names = config.proxies.empty() ? proxies_for(config.mode) : config.proxies;
  const auto ablation_lenses = config.ablation_lenses.empty() ? LensSelection::all() : config.ablation_lenses;
  BoostConfig boost = config.boost;
  boost.rng_seed = config.seed;
  CvOptions cv = config.cv;
  cv.fold_seed = config.seed;

  std::vector<Loaded> data;
  data.reserve(config.datasets.size());
  for (const auto& spec : config.datasets) data.push_back({spec, dataset_name(spec), load_dataset(spec), std::nullopt, false});

  ExperimentResult result;
  fs::create_directories(config.output);
  json index;
  index["mode"] = std::string(mode_name(config.mode));
  index["seed"] = config.seed;
  index["datasets"] = json::array();
  for (const auto& d : data) index["datasets"].push_back(d.name);

  const auto seeds_for = [&](Loaded& d) {
    std::vector<SeedLabels> out;
    for (const auto& p : proxy_names) out.push_back(build_proxy(p, d.corpus, d.spec.proxies));
    return out;
  };

  if (wants("ablation")) {
    json ab = json::object();
    for (auto& d : data) {
      if (d.spec.gold.empty()) {
        warn("dataset " + d.name + " has no gold labels; ablation skipped");
        continue;
      }
      AblationInput input;
      input.lenses = ablation_lenses;
      input.proxies = seeds_for(d);
      input.gold = split_gold(load_gold(d.spec.gold, config.mode), config.seed);
      auto report = ablation_grid(
          input,
          [&](const LensSelection& lens) {
            auto fm = build_features(lens, d.corpus, lens.use ? d.lexical() : std::nullopt, config.lens_options);
            if (config.hopkins_rows > 0)
              result.hopkins.emplace_back(d.name, lens.name(),
                                          lens_hopkins(fm, config.hopkins_rows, mix_seed(config.seed, {hash_string(lens.name())})));
            return fm;
          },
          boost);
      report.lens = d.name;
      save_report(report, config.output, "ablation_" + d.name);
      ab[d.name] = json::parse(report_json(report));
      result.ablation.emplace_back(d.name, std::move(report));
    }
    index["ablation"] = ab;
    if (!result.hopkins.empty()) {
      std::string csv = "dataset,lenses,hopkins,hopkins_inverted,m,repetitions\n";
      json hj = json::array();
      for (const auto& [ds, lens, h] : result.hopkins) {
        csv += ds + "," + lens + "," + format_fixed(h.h, 6) + "," + format_fixed(h.h_inverted, 6) + "," +
               std::to_string(h.m) + "," + std::to_string(h.repetitions) + "\n";
        hj.push_back({{"dataset", ds}, {"lenses", lens}, {"hopkins", h.h}, {"hopkins_inverted", h.h_inverted}, {"m", h.m}});
      }
      write_file(config.output / "hopkins.csv", csv);
      index["hopkins"] = hj;
    }
  }

  if (wants("cross-proxy")) {
    json cp = json::object();
    for (auto& d : data) {
      const auto fm = build_features(config.lenses, d.corpus, config.lenses.use ? d.lexical() : std::nullopt,
                                     config.lens_options);
      auto report = cross_proxy_matrix(fm, seeds_for(d), boost, cv);
      report.lens = config.lenses.name();
      save_report(report, config.output, "cross_proxy_" + d.name);
      cp[d.name] = json::parse(report_json(report));
      result.cross_proxy.emplace_back(d.name, std::move(report));
    }
    index["cross_proxy"] = cp;
  }

  if (wants("cross-dataset")) {
    if (data.size() < 2) {
      warn("cross-dataset needs at least two datasets; skipped");
    } else {
      std::vector<DatasetFeatures> feats;
      const auto lexical = LensSelection::parse("use");
      for (auto& d : data) {
        feats.push_back({d.name, build_features(lexical, d.corpus, d.lexical(), config.lens_options),
                         build_proxy(config.primary_proxy, d.corpus, d.spec.proxies)});
      }
      auto report = cross_dataset_matrix(feats, boost, cv);
      save_report(report, config.output, "cross_dataset");
      index["cross_dataset"] = json::parse(report_json(report));
      result.cross_dataset = std::move(report);
    }
  }

  if (wants("psychosocial")) {
    const fs::path wv = config.psycho.word_vectors.empty() ? config.datasets.front().word_vectors : config.psycho.word_vectors;
    const auto resources = load_psycho_resources(config.psycho.moral, config.psycho.grievance, config.psycho.cds, wv);
    std::vector<ProfileInput> inputs;
    const fs::path dir = config.output / "psychosocial";
    fs::create_directories(dir);
    BoostConfig fr_boost = config.far_right_boost;
    fr_boost.rng_seed = config.seed;
    for (auto& d : data) {
      const auto fm = build_features(config.lenses, d.corpus, config.lenses.use ? d.lexical() : std::nullopt,
                                     config.lens_options);
      const auto lr_seeds = build_proxy(config.primary_proxy, d.corpus, d.spec.proxies);
      const auto lr = predict_proba(train(fm, lr_seeds, boost), fm);
      std::optional<Predictions> fr;
      if (!config.far_right_proxy.empty()) {
        const auto fr_seeds = build_proxy(config.far_right_proxy, d.corpus, d.spec.proxies);
        fr = predict_proba(train(fm, fr_seeds, fr_boost), fm);
      }
      auto groups = assign_groups(lr, fr ? &*fr : nullptr, config.groups);
      write_file(dir / ("groups_" + d.name + ".tsv"), groups_tsv(groups));
      inputs.push_back({d.name, &d.corpus, std::move(groups)});
    }
    ProfileOptions opts = config.profile;
    opts.seed = config.seed;
    auto report = profile(inputs, resources, opts);
    save_profile_report(report, dir);
    index["psychosocial"] = json::parse(profile_report_json(report));
    result.profile = std::move(report);
  }

  write_file(config.output / "report.json", index.dump(2) + "\n");
  return result;
}

// ---------------------------------------------------------------------------
// Configuration files

namespace {

json parse_object(const std::string& text, const std::string& what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, what + ": " + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::Format, what + ": expected a JSON object");
  return j;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& what) {
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) fail(ErrorKind::Config, what + ": unknown key " + k);
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& what) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, what + ": bad value for " + key + ": " + e.what());
  }
}

void read_path(const json& j, const char* key, fs::path& out, const fs::path& base, const std::string& what) {
  if (!j.contains(key)) return;
  std::string s;
  read(j, key, s, what);
  out = s.empty() ? fs::path{} : (fs::path(s).is_absolute() ? fs::path(s) : base / s);
}

BoostConfig boost_from(const json& j, BoostConfig b) {
  const std::string what = "boost config";
  check_keys(j,
             {"n_estimators", "learning_rate", "max_leaves", "min_samples_leaf", "class_balance", "max_bins",
              "exact_splits", "lambda_l2", "min_child_hessian", "feature_fraction"},
             what);
  read(j, "n_estimators", b.n_estimators, what);
  read(j, "learning_rate", b.learning_rate, what);
  read(j, "max_leaves", b.max_leaves, what);
  read(j, "min_samples_leaf", b.min_samples_leaf, what);
  read(j, "class_balance", b.class_balance, what);
  read(j, "max_bins", b.max_bins, what);
  read(j, "exact_splits", b.exact_splits, what);
  read(j, "lambda_l2", b.lambda_l2, what);
  read(j, "min_child_hessian", b.min_child_hessian, what);
  read(j, "feature_fraction", b.feature_fraction, what);
  return b;
}

ProxyInputs proxies_from(const json& j, ProxyInputs p, const fs::path& base) {
  const std::string what = "proxy inputs";
  check_keys(j, {"hashtag_codes", "party_roster", "politicians", "slants", "mbfc", "far_right_threshold"}, what);
  read_path(j, "hashtag_codes", p.hashtag_codes, base, what);
  read_path(j, "party_roster", p.party_roster, base, what);
  read_path(j, "politicians", p.politicians, base, what);
  read_path(j, "slants", p.slants, base, what);
  read_path(j, "mbfc", p.mbfc, base, what);
  read(j, "far_right_threshold", p.far_right_threshold, what);
  return p;
}

DatasetSpec dataset_from(const json& j, DatasetSpec d, const fs::path& base, Mode mode) {
  const std::string what = "dataset";
  if (!j.is_object()) fail(ErrorKind::Config, "dataset entries must be objects");
  check_keys(j, {"name", "path", "format", "exclude_quotes", "proxies", "embeddings", "word_vectors", "gold", "synth_dir"},
             what);
  if (j.contains("synth_dir")) {
    fs::path dir;
    read_path(j, "synth_dir", dir, base, what);
    d = synth_dataset_spec(dir, j.value("name", dir.filename().string()), mode);
  }
  read(j, "name", d.name, what);
  read_path(j, "path", d.path, base, what);
  read(j, "format", d.format, what);
  read(j, "exclude_quotes", d.exclude_quotes, what);
  if (j.contains("proxies")) d.proxies = proxies_from(j.at("proxies"), d.proxies, base);
  read_path(j, "embeddings", d.embeddings, base, what);
  read_path(j, "word_vectors", d.word_vectors, base, what);
  read_path(j, "gold", d.gold, base, what);
  return d;
}

LensOptions lens_options_from(const json& j, LensOptions o) {
  const std::string what = "lens options";
  check_keys(j, {"min_hashtag_count", "top_reshared"}, what);
  read(j, "min_hashtag_count", o.min_hashtag_count, what);
  read(j, "top_reshared", o.top_reshared, what);
  return o;
}

Mode mode_from(const json& j, Mode m, const std::string& what) {
  if (!j.contains("mode")) return m;
  std::string s;
  read(j, "mode", s, what);
  return parse_mode(s);
}

LensSelection lenses_from(const json& j, const char* key, LensSelection l, const std::string& what) {
  if (!j.contains(key)) return l;
  std::string s;
  read(j, key, s, what);
  return LensSelection::parse(s);
}

}  // namespace

BoostConfig boost_config_from_json(const std::string& text, BoostConfig defaults) {
  return boost_from(parse_object(text, "boost config"), defaults);
}

DatasetSpec dataset_spec_from_json(const std::string& text, const fs::path& base_dir, Mode mode) {
  return dataset_from(parse_object(text, "dataset"), {}, base_dir, mode);
}

PipelineConfig pipeline_config_from_json(const std::string& text, const fs::path& base_dir, PipelineConfig c) {
  const std::string what = "pipeline config";
  const json j = parse_object(text, what);
  check_keys(j, {"dataset", "mode", "proxy", "lenses", "lens_options", "boost", "cv_folds", "output", "seed"}, what);
  const Mode before = c.mode;
  c.mode = mode_from(j, c.mode, what);
  if (j.contains("dataset")) c.dataset = dataset_from(j.at("dataset"), c.dataset, base_dir, c.mode);
  if (c.mode != before) {
    if (!j.contains("boost")) c.boost = BoostConfig::for_mode(c.mode);
    if (!j.contains("proxy")) c.proxy = c.mode == Mode::LeftRight ? std::string(kProxyLeftRightMpp) : std::string(kProxyFarRightMpp);
  }
  read(j, "proxy", c.proxy, what);
  c.lenses = lenses_from(j, "lenses", c.lenses, what);
  if (j.contains("lens_options")) c.lens_options = lens_options_from(j.at("lens_options"), c.lens_options);
  if (j.contains("boost")) c.boost = boost_from(j.at("boost"), c.boost);
  read(j, "cv_folds", c.cv_folds, what);
  read_path(j, "output", c.output, base_dir, what);
  read(j, "seed", c.seed, what);
  return c;
}

ExperimentConfig experiment_config_from_json(const std::string& text, const fs::path& base_dir, ExperimentConfig c) {
  const std::string what = "experiment config";
  const json j = parse_object(text, what);
  check_keys(j,
             {"kinds", "datasets", "mode", "proxies", "ablation_lenses", "lenses", "lens_options", "primary_proxy",
              "far_right_proxy", "boost", "far_right_boost", "folds", "neutral_band", "far_right_probability",
              "psycho", "bootstrap", "emoji", "top_emoji_count", "hurdle_emoji", "hurdle_reference", "alpha",
              "hopkins_rows", "output", "seed"},
             what);
  read(j, "kinds", c.kinds, what);
  c.mode = mode_from(j, c.mode, what);
  if (j.contains("datasets")) {
    if (!j.at("datasets").is_array()) fail(ErrorKind::Config, what + ": datasets must be an array");
    c.datasets.clear();
    for (const auto& d : j.at("datasets")) c.datasets.push_back(dataset_from(d, {}, base_dir, c.mode));
  }
  read(j, "proxies", c.proxies, what);
  if (j.contains("ablation_lenses")) {
    std::vector<std::string> names;
    read(j, "ablation_lenses", names, what);
    c.ablation_lenses.clear();
    for (const auto& n : names) c.ablation_lenses.push_back(LensSelection::parse(n));
  }
  c.lenses = lenses_from(j, "lenses", c.lenses, what);
  if (j.contains("lens_options")) c.lens_options = lens_options_from(j.at("lens_options"), c.lens_options);
  read(j, "primary_proxy", c.primary_proxy, what);
  read(j, "far_right_proxy", c.far_right_proxy, what);
  if (j.contains("boost")) c.boost = boost_from(j.at("boost"), c.boost);
  if (j.contains("far_right_boost")) c.far_right_boost = boost_from(j.at("far_right_boost"), c.far_right_boost);
  read(j, "folds", c.cv.folds, what);
  read(j, "neutral_band", c.groups.neutral_band, what);
  read(j, "far_right_probability", c.groups.far_right_threshold, what);
  if (j.contains("psycho")) {
    const auto& p = j.at("psycho");
    if (!p.is_object()) fail(ErrorKind::Config, what + ": psycho must be an object");
    check_keys(p, {"moral", "grievance", "cds", "word_vectors"}, "psycho paths");
    read_path(p, "moral", c.psycho.moral, base_dir, what);
    read_path(p, "grievance", c.psycho.grievance, base_dir, what);
    read_path(p, "cds", c.psycho.cds, base_dir, what);
    read_path(p, "word_vectors", c.psycho.word_vectors, base_dir, what);
  }
  read(j, "bootstrap", c.profile.bootstrap, what);
  read(j, "emoji", c.profile.emoji, what);
  read(j, "top_emoji_count", c.profile.top_emoji_count, what);
  read(j, "hurdle_emoji", c.profile.hurdle_emoji, what);
  if (j.contains("hurdle_reference")) {
    std::string s;
    read(j, "hurdle_reference", s, what);
    c.profile.hurdle_reference = parse_label(s);
  }
  read(j, "alpha", c.profile.alpha, what);
  read(j, "hopkins_rows", c.hopkins_rows, what);
  read_path(j, "output", c.output, base_dir, what);
  read(j, "seed", c.seed, what);
  return c;
}

DatasetSpec synth_dataset_spec(const fs::path& dir, const std::string& name, Mode mode) {
  DatasetSpec d;
  d.name = name;
  d.path = dir / "posts.jsonl";
  d.proxies.hashtag_codes = dir / "hashtag_codes.csv";
  d.proxies.party_roster = dir / "party_roster.csv";
  d.proxies.politicians = dir / "politicians.csv";
  d.proxies.slants = dir / "slants.tsv";
  d.proxies.mbfc = dir / "mbfc.csv";
  d.word_vectors = dir / "wordvecs.txt";
  d.gold = dir / (mode == Mode::LeftRight ? "gold_left_right.csv" : "gold.csv");
  return d;
}

PsychoPaths synth_psycho_paths(const fs::path& dir) {
  return {dir / "mft_dictionary.tsv", dir / "grievance.tsv", dir / "cds.tsv", dir / "wordvecs.txt"};
}

}  // namespace ideo
