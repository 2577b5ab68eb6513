#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ideo/boost.hpp"
#include "ideo/common.hpp"
#include "ideo/corpus.hpp"
#include "ideo/eval.hpp"
#include "ideo/lenses.hpp"
#include "ideo/mediaslant.hpp"
#include "ideo/pipeline.hpp"
#include "ideo/proxies.hpp"
#include "ideo/psycho.hpp"
#include "ideo/synth.hpp"
#include "json.hpp"

using namespace ideo;
namespace fs = std::filesystem;

namespace {

// Options shared by subcommands that touch a corpus and its proxy inputs.
struct DatasetArgs {
  std::string path;
  std::string format = "generic";
  std::string name;
  bool exclude_quotes = false;
  std::string hashtag_codes, party_roster, politicians, slants, mbfc;
  double far_right_threshold = 0.5;
  std::string embeddings, word_vectors, gold, synth_dir;

  void add(CLI::App* app, bool with_proxies = true) {
    app->add_option("--input", path, "posts (.jsonl) or a saved corpus index (with --format index)");
    app->add_option("--format", format, "generic | twitter | parler | index");
    app->add_option("--name", name, "dataset name");
    app->add_flag("--exclude-quotes", exclude_quotes, "do not count quote posts as reshares");
    app->add_option("--synth-dir", synth_dir, "directory written by `ideo synth`; fills every input path");
    app->add_option("--embeddings", embeddings, "embeddings.bin (or .tsv) for the lexical lens");
    app->add_option("--word-vectors", word_vectors, "text word vectors; lexical fallback");
    app->add_option("--gold", gold, "gold labels CSV (user_id,label)");
    if (!with_proxies) return;
    app->add_option("--hashtag-codes", hashtag_codes, "hashtag,code CSV");
    app->add_option("--party-roster", party_roster, "party,label,followers_file CSV");
    app->add_option("--politicians", politicians, "user_id,label CSV");
    app->add_option("--slants", slants, "slants.tsv");
    app->add_option("--mbfc", mbfc, "domain,class CSV");
    app->add_option("--far-right-threshold", far_right_threshold, "media lean above which a user is far-right");
  }

  // Applies only the options given on the command line on top of `d`.
  DatasetSpec apply(CLI::App* app, DatasetSpec d, Mode mode) const {
    const auto given = [&](const char* opt) { return app->get_option_no_throw(opt) && app->count(opt) > 0; };
    if (given("--synth-dir")) d = synth_dataset_spec(synth_dir, name.empty() ? fs::path(synth_dir).filename().string() : name, mode);
    if (given("--input")) d.path = path;
    if (given("--format")) d.format = format;
    if (given("--name")) d.name = name;
    if (given("--exclude-quotes")) d.exclude_quotes = exclude_quotes;
    if (given("--embeddings")) d.embeddings = embeddings;
    if (given("--word-vectors")) d.word_vectors = word_vectors;
    if (given("--gold")) d.gold = gold;
    if (given("--hashtag-codes")) d.proxies.hashtag_codes = hashtag_codes;
    if (given("--party-roster")) d.proxies.party_roster = party_roster;
    if (given("--politicians")) d.proxies.politicians = politicians;
    if (given("--slants")) d.proxies.slants = slants;
    if (given("--mbfc")) d.proxies.mbfc = mbfc;
    if (given("--far-right-threshold")) d.proxies.far_right_threshold = far_right_threshold;
    return d;
  }
};

struct BoostArgs {
  std::string config;
  int n_estimators = 0;
  double learning_rate = 0.0;
  int max_leaves = 0;
  int min_samples_leaf = 0;
  bool no_class_balance = false;

  void add(CLI::App* app) {
    app->add_option("--boost-config", config, "JSON file with learner settings");
    app->add_option("--n-estimators", n_estimators, "boosting rounds");
    app->add_option("--learning-rate", learning_rate, "shrinkage");
    app->add_option("--max-leaves", max_leaves, "leaves per tree");
    app->add_option("--min-samples-leaf", min_samples_leaf, "minimum rows per leaf");
    app->add_flag("--no-class-balance", no_class_balance, "disable inverse-frequency class weights");
  }

  BoostConfig apply(CLI::App* app, BoostConfig b) const {
    if (!config.empty()) b = boost_config_from_json(read_file(config), b);
    if (app->count("--n-estimators")) b.n_estimators = n_estimators;
    if (app->count("--learning-rate")) b.learning_rate = learning_rate;
    if (app->count("--max-leaves")) b.max_leaves = max_leaves;
    if (app->count("--min-samples-leaf")) b.min_samples_leaf = min_samples_leaf;
    if (no_class_balance) b.class_balance = false;
    return b;
  }
};

CorpusIndex open_corpus(const std::string& path, const std::string& format, const std::string& name, bool exclude_quotes) {
  DatasetSpec d;
  d.path = path;
  d.format = format;
  d.name = name;
  d.exclude_quotes = exclude_quotes;
  return load_dataset(d);
}

GroupAssignment load_groups(const fs::path& path) {
  const auto t = read_table(path, '\t');
  const auto u = t.column("user_id", path.string());
  const auto g = t.column("group", path.string());
  GroupAssignment out;
  for (const auto& row : t.rows) out[row.at(u)] = parse_label(row.at(g));
  return out;
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly supervised ideology detection for social media users"};
  app.require_subcommand(1);
  unsigned workers = 0;
  bool quiet = false;
  app.add_option("--workers", workers, "worker threads (default: IDEO_WORKERS or all cores)");
  app.add_flag("--quiet", quiet, "suppress warnings");

  // ingest ----------------------------------------------------------------------------
  auto* ingest_cmd = app.add_subcommand("ingest", "parse posts into a per-user corpus index");
  std::string in_path, in_format = "generic", in_name, in_out, in_texts;
  bool in_exclude_quotes = false;
  ingest_cmd->add_option("--input", in_path, "posts file (JSON lines)")->required();
  ingest_cmd->add_option("--format", in_format, "generic | twitter | parler");
  ingest_cmd->add_option("--name", in_name, "dataset id");
  ingest_cmd->add_flag("--exclude-quotes", in_exclude_quotes, "do not count quote posts as reshares");
  ingest_cmd->add_option("--output", in_out, "corpus index output")->required();
  ingest_cmd->add_option("--user-texts", in_texts, "also write user_id<TAB>text for the sentence encoder");

  // slants ----------------------------------------------------------------------------
  auto* slants_cmd = app.add_subcommand("slants", "calibrate publication slants from reader surveys");
  std::string sl_survey, sl_anchors, sl_pubmap, sl_out;
  slants_cmd->add_option("--survey", sl_survey, "survey CSV")->required();
  slants_cmd->add_option("--anchors", sl_anchors, "pub_id,rating CSV")->required();
  slants_cmd->add_option("--pubmap", sl_pubmap, "pub_id,domain CSV")->required();
  slants_cmd->add_option("--output", sl_out, "slants.tsv")->required();

  // seed ------------------------------------------------------------------------------
  auto* seed_cmd = app.add_subcommand("seed", "label seed users with an ideological proxy");
  DatasetArgs seed_data;
  std::string seed_proxy, seed_out;
  seed_data.add(seed_cmd);
  seed_cmd->add_option("--proxy", seed_proxy, "hashtags | party-followers | politician-endorsers | lr-mpp | fr-mpp | mbfc-mpp")
      ->required();
  seed_cmd->add_option("--output", seed_out, "seeds.tsv")->required();

  // features --------------------------------------------------------------------------
  auto* feat_cmd = app.add_subcommand("features", "build homophilic lens features");
  DatasetArgs feat_data;
  std::string feat_lenses = "use+rt", feat_out;
  LensOptions feat_opts;
  feat_data.add(feat_cmd, false);
  feat_cmd->add_option("--lenses", feat_lenses, "lens set, e.g. use+ht+rt");
  feat_cmd->add_option("--min-hashtag-count", feat_opts.min_hashtag_count, "hashtag vocabulary threshold");
  feat_cmd->add_option("--top-reshared", feat_opts.top_reshared, "reshare columns");
  feat_cmd->add_option("--output", feat_out, "feature matrix file")->required();

  // train -----------------------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "train the boosted-tree classifier on seed users");
  std::string tr_features, tr_seeds, tr_out;
  std::uint64_t tr_seed = 0;
  BoostArgs tr_boost;
  train_cmd->add_option("--features", tr_features, "feature matrix")->required();
  train_cmd->add_option("--seeds", tr_seeds, "seeds.tsv")->required();
  train_cmd->add_option("--seed", tr_seed, "random seed");
  train_cmd->add_option("--output", tr_out, "model.bin")->required();
  tr_boost.add(train_cmd);

  // predict ---------------------------------------------------------------------------
  auto* pred_cmd = app.add_subcommand("predict", "label every user with a trained model");
  std::string pr_model, pr_features, pr_gold, pr_out;
  std::uint64_t pr_seed = 0;
  pred_cmd->add_option("--model", pr_model, "model.bin")->required();
  pred_cmd->add_option("--features", pr_features, "feature matrix")->required();
  pred_cmd->add_option("--calibrate-gold", pr_gold, "gold CSV; its validation half tunes the decision threshold");
  pred_cmd->add_option("--seed", pr_seed, "gold split seed");
  pred_cmd->add_option("--output", pr_out, "predictions.tsv")->required();

  // eval ------------------------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "cross-validate seeds, or a cross-proxy matrix for several proxies");
  std::string ev_features, ev_out = "eval";
  std::vector<std::string> ev_seeds;
  int ev_folds = 5;
  std::uint64_t ev_seed = 0;
  bool ev_hopkins = false;
  BoostArgs ev_boost;
  eval_cmd->add_option("--features", ev_features, "feature matrix")->required();
  eval_cmd->add_option("--seeds", ev_seeds, "one or more seeds.tsv files")->required();
  eval_cmd->add_option("--folds", ev_folds, "cross-validation folds");
  eval_cmd->add_option("--seed", ev_seed, "random seed");
  eval_cmd->add_flag("--hopkins", ev_hopkins, "also report the Hopkins statistic of the features");
  eval_cmd->add_option("--output", ev_out, "report directory");
  ev_boost.add(eval_cmd);

  // profile ---------------------------------------------------------------------------
  auto* prof_cmd = app.add_subcommand("profile", "psychosocial profile of ideological groups");
  std::vector<std::string> pf_inputs;
  std::string pf_format = "generic", pf_moral, pf_grievance, pf_cds, pf_vectors, pf_out = "profile";
  ProfileOptions pf_opts;
  std::string pf_reference = "neutral";
  prof_cmd->add_option("--dataset", pf_inputs, "name=posts.jsonl:groups.tsv (repeatable)")->required();
  prof_cmd->add_option("--format", pf_format, "posts format");
  prof_cmd->add_option("--moral", pf_moral, "mft_dictionary.tsv")->required();
  prof_cmd->add_option("--grievance", pf_grievance, "grievance.tsv")->required();
  prof_cmd->add_option("--cds", pf_cds, "cds.tsv")->required();
  prof_cmd->add_option("--word-vectors", pf_vectors, "word vectors for the moral axes")->required();
  prof_cmd->add_option("--bootstrap", pf_opts.bootstrap, "bootstrap samples for CDS prevalence");
  prof_cmd->add_option("--seed", pf_opts.seed, "random seed");
  prof_cmd->add_option("--emoji", pf_opts.emoji, "emoji for the odds model (default: most used)");
  prof_cmd->add_option("--hurdle-emoji", pf_opts.hurdle_emoji, "emoji for the hurdle model (default: most used flag)");
  prof_cmd->add_option("--hurdle-reference", pf_reference, "reference group for the hurdle model");
  prof_cmd->add_option("--output", pf_out, "report directory");

  // synth -----------------------------------------------------------------------------
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus with planted ideologies");
  SynthConfig sy;
  std::string sy_config, sy_out;
  synth_cmd->add_option("--config", sy_config, "JSON generator settings");
  synth_cmd->add_option("--n-users", sy.n_users, "users");
  synth_cmd->add_option("--homophily", sy.homophily, "probability a reshare stays within the class");
  synth_cmd->add_option("--class-signal", sy.class_signal, "probability a draw uses the class distribution");
  synth_cmd->add_option("--share-fraction", sy.share_fraction, "share of users linking news domains");
  synth_cmd->add_option("--context-shift", sy.context_shift, "share of corpus-specific vocabulary");
  synth_cmd->add_option("--corpus-index", sy.corpus_index, "corpus index within a world");
  synth_cmd->add_option("--world-seed", sy.world_seed, "seed shared by corpora of one world");
  synth_cmd->add_option("--seed", sy.rng_seed, "corpus seed");
  synth_cmd->add_option("--dataset-id", sy.dataset_id, "dataset id and user id prefix");
  synth_cmd->add_option("--output", sy_out, "output directory")->required();

  // experiment ------------------------------------------------------------------------
  auto* exp_cmd = app.add_subcommand("experiment", "ablation, cross-proxy, cross-dataset and psychosocial reports");
  std::string ex_config, ex_out, ex_mode;
  std::vector<std::string> ex_kinds, ex_synth;
  std::uint64_t ex_seed = 0;
  BoostArgs ex_boost;
  exp_cmd->add_option("--config", ex_config, "JSON experiment config");
  exp_cmd->add_option("--kind", ex_kinds, "ablation | cross-proxy | cross-dataset | psychosocial (repeatable)");
  exp_cmd->add_option("--synth-dir", ex_synth, "synthetic dataset directories (repeatable)");
  exp_cmd->add_option("--mode", ex_mode, "left-right | far-right");
  exp_cmd->add_option("--seed", ex_seed, "random seed");
  exp_cmd->add_option("--output", ex_out, "report directory");
  ex_boost.add(exp_cmd);

  // run -------------------------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "full pipeline: seeds, model, predictions and metrics");
  std::string rn_config, rn_mode, rn_proxy, rn_lenses, rn_out;
  std::uint64_t rn_seed = 0;
  int rn_folds = 5;
  DatasetArgs rn_data;
  BoostArgs rn_boost;
  run_cmd->add_option("--config", rn_config, "JSON pipeline config");
  rn_data.add(run_cmd);
  run_cmd->add_option("--mode", rn_mode, "left-right | far-right");
  run_cmd->add_option("--proxy", rn_proxy, "seed proxy");
  run_cmd->add_option("--lenses", rn_lenses, "lens set, e.g. use+rt");
  run_cmd->add_option("--cv-folds", rn_folds, "seed cross-validation folds (0 to skip)");
  run_cmd->add_option("--seed", rn_seed, "random seed");
  run_cmd->add_option("--output", rn_out, "output directory");
  rn_boost.add(run_cmd);

  CLI11_PARSE(app, argc, argv);

  if (workers > 0) set_worker_count(workers);
  set_warning_sink([quiet](const std::string& m) {
    if (!quiet) std::cerr << "warning: " << m << "\n";
  });

  try {
    if (*ingest_cmd) {
      IngestOptions opt;
      opt.format = parse_input_format(in_format);
      opt.exclude_quotes = in_exclude_quotes;
      opt.dataset_id = in_name.empty() ? fs::path(in_path).stem().string() : in_name;
      IngestStats stats;
      const auto corpus = ingest_file(in_path, opt, &stats);
      save_corpus(corpus, in_out);
      if (!in_texts.empty()) write_user_texts(corpus, in_texts);
      print_json({{"users", corpus.n_users()}, {"posts", corpus.n_posts()}, {"lines", stats.lines},
                  {"malformed", stats.malformed}, {"duplicates", stats.duplicates}});
    } else if (*slants_cmd) {
      const auto table = build_table(load_survey(sl_survey), load_anchors(sl_anchors), load_pubmap(sl_pubmap));
      save_slant_table(table, sl_out);
      print_json({{"domains", table.size()}});
    } else if (*seed_cmd) {
      const auto d = seed_data.apply(seed_cmd, {}, Mode::LeftRight);
      const auto corpus = load_dataset(d);
      const auto seeds = build_proxy(seed_proxy, corpus, d.proxies);
      save_seeds(seeds, seed_out);
      nlohmann::json counts = nlohmann::json::object();
      for (const auto& [l, n] : seeds.counts()) counts[std::string(label_name(l))] = n;
      print_json({{"proxy", seeds.proxy_name}, {"seeds", seeds.size()}, {"coverage", seeds.coverage}, {"counts", counts}});
    } else if (*feat_cmd) {
      const auto d = feat_data.apply(feat_cmd, {}, Mode::LeftRight);
      const auto corpus = load_dataset(d);
      const auto lenses = LensSelection::parse(feat_lenses);
      const auto fm = build_features(lenses, corpus, lenses.use ? lexical_source(d, corpus) : std::nullopt, feat_opts);
      save_features(fm, feat_out);
      print_json({{"rows", fm.rows()}, {"width", fm.width()}, {"lenses", fm.lens_name()}});
    } else if (*train_cmd) {
      const auto fm = load_features(tr_features);
      const auto seeds = load_seeds(tr_seeds);
      auto boost = tr_boost.apply(train_cmd, BoostConfig::for_mode(seeds.mode));
      boost.rng_seed = tr_seed;
      const auto model = train(fm, seeds, boost);
      save_model(model, tr_out);
      print_json(nlohmann::json::parse(model_json(model)));
    } else if (*pred_cmd) {
      const auto model = load_model(pr_model);
      const auto fm = load_features(pr_features);
      const auto p = predict_proba(model, fm);
      std::optional<Calibration> cal;
      if (!pr_gold.empty()) {
        const auto split = split_gold(load_gold(pr_gold, model.mode), pr_seed);
        cal = calibrate_threshold(model, fm, split.validation);
      }
      write_file(pr_out, predictions_tsv(p, argmax_decisions(p, cal ? &*cal : nullptr)));
      print_json({{"users", p.row_ids.size()}});
    } else if (*eval_cmd) {
      const auto fm = load_features(ev_features);
      std::vector<SeedLabels> proxies;
      for (const auto& s : ev_seeds) proxies.push_back(load_seeds(s));
      auto boost = ev_boost.apply(eval_cmd, BoostConfig::for_mode(proxies.front().mode));
      boost.rng_seed = ev_seed;
      const CvOptions cv{ev_folds, ev_seed};
      fs::create_directories(ev_out);
      nlohmann::json out;
      if (proxies.size() == 1) {
        const auto m = cross_validate(fm, proxies.front(), boost, cv);
        out = {{"proxy", proxies.front().proxy_name}, {"available", m.available}, {"roc_auc", m.roc_auc},
               {"f1_macro", m.f1_macro}, {"precision_macro", m.precision_macro}, {"recall_macro", m.recall_macro},
               {"folds_scored", m.folds_scored}, {"n_train", m.n_train}};
        if (!m.note.empty()) out["note"] = m.note;
        write_file(fs::path(ev_out) / "cross_validation.json", out.dump(2) + "\n");
      } else {
        auto report = cross_proxy_matrix(fm, proxies, boost, cv);
        report.lens = fm.lens_name();
        save_report(report, ev_out, "cross_proxy");
        out = nlohmann::json::parse(report_json(report));
      }
      if (ev_hopkins) {
        const auto h = hopkins(fm.dense(), std::nullopt, ev_seed);
        out["hopkins"] = {{"h", h.h}, {"h_inverted", h.h_inverted}, {"m", h.m}};
      }
      print_json(out);
    } else if (*prof_cmd) {
      std::vector<CorpusIndex> corpora;
      std::vector<ProfileInput> inputs;
      corpora.reserve(pf_inputs.size());
      for (const auto& spec : pf_inputs) {
        const auto eq = spec.find('=');
        const auto colon = spec.rfind(':');
        if (eq == std::string::npos || colon == std::string::npos || colon < eq)
          fail(ErrorKind::Config, "--dataset expects name=posts:groups, got " + spec);
        const auto name = spec.substr(0, eq);
        corpora.push_back(open_corpus(spec.substr(eq + 1, colon - eq - 1), pf_format, name, false));
        inputs.push_back({name, &corpora.back(), load_groups(spec.substr(colon + 1))});
      }
      pf_opts.hurdle_reference = parse_label(pf_reference);
      const auto res = load_psycho_resources(pf_moral, pf_grievance, pf_cds, pf_vectors);
      const auto report = profile(inputs, res, pf_opts);
      save_profile_report(report, pf_out);
      nlohmann::json wins = nlohmann::json::object();
      for (const auto& ds : report.hypotheses.datasets)
        for (auto f : kFoundations)
          wins[ds][std::string(foundation_name(f))] = report.hypotheses.wins(f, ds);
      print_json({{"output", pf_out}, {"wins", wins}});
    } else if (*synth_cmd) {
      SynthConfig c = sy_config.empty() ? SynthConfig{} : synth_config_from_json(read_file(sy_config));
      // Flags given on the command line win over the file.
      for (const auto* o : synth_cmd->get_options()) {
        if (o->count() == 0) continue;
        const auto& n = o->get_name();
        if (n == "--n-users") c.n_users = sy.n_users;
        else if (n == "--homophily") c.homophily = sy.homophily;
        else if (n == "--class-signal") c.class_signal = sy.class_signal;
        else if (n == "--share-fraction") c.share_fraction = sy.share_fraction;
        else if (n == "--context-shift") c.context_shift = sy.context_shift;
        else if (n == "--corpus-index") c.corpus_index = sy.corpus_index;
        else if (n == "--world-seed") c.world_seed = sy.world_seed;
        else if (n == "--seed") c.rng_seed = sy.rng_seed;
        else if (n == "--dataset-id") c.dataset_id = sy.dataset_id;
      }
      const auto corpus = generate(c);
      write_synth(corpus, sy_out);
      print_json({{"users", corpus.truth.size()}, {"posts", corpus.posts.size()}, {"output", sy_out}});
    } else if (*exp_cmd) {
      ExperimentConfig c;
      if (!ex_config.empty()) c = experiment_config_from_json(read_file(ex_config), fs::path(ex_config).parent_path());
      if (!ex_mode.empty()) c.mode = parse_mode(ex_mode);
      if (!ex_kinds.empty()) c.kinds = ex_kinds;
      if (!ex_synth.empty()) {
        c.datasets.clear();
        for (const auto& d : ex_synth) c.datasets.push_back(synth_dataset_spec(d, fs::path(d).filename().string(), c.mode));
        if (c.psycho.moral.empty()) c.psycho = synth_psycho_paths(ex_synth.front());
      }
      if (exp_cmd->count("--seed")) c.seed = ex_seed;
      if (!ex_out.empty()) c.output = ex_out;
      c.boost = ex_boost.apply(exp_cmd, c.boost);
      const auto r = run_experiment(c);
      print_json({{"output", c.output.string()},
                  {"ablation", r.ablation.size()},
                  {"cross_proxy", r.cross_proxy.size()},
                  {"cross_dataset", r.cross_dataset.has_value()},
                  {"psychosocial", r.profile.has_value()}});
    } else if (*run_cmd) {
      PipelineConfig c;
      if (!rn_config.empty()) c = pipeline_config_from_json(read_file(rn_config), fs::path(rn_config).parent_path());
      if (!rn_mode.empty()) {
        const Mode m = parse_mode(rn_mode);
        if (m != c.mode) {
          c.mode = m;
          c.boost = BoostConfig::for_mode(m);
          if (rn_proxy.empty()) c.proxy = std::string(m == Mode::LeftRight ? kProxyLeftRightMpp : kProxyFarRightMpp);
        }
      }
      c.dataset = rn_data.apply(run_cmd, c.dataset, c.mode);
      if (!rn_proxy.empty()) c.proxy = rn_proxy;
      if (!rn_lenses.empty()) c.lenses = LensSelection::parse(rn_lenses);
      if (run_cmd->count("--cv-folds")) c.cv_folds = rn_folds;
      if (run_cmd->count("--seed")) c.seed = rn_seed;
      if (!rn_out.empty()) c.output = rn_out;
      c.boost = rn_boost.apply(run_cmd, c.boost);
      const auto r = run_pipeline(c);
      nlohmann::json out{{"output", c.output.string()}, {"users", r.predictions.row_ids.size()}, {"seeds", r.seeds.size()}};
      if (r.gold && r.gold->available) out["gold_roc_auc"] = r.gold->roc_auc;
      if (r.cv && r.cv->available) out["cv_roc_auc"] = r.cv->roc_auc;
      print_json(out);
    }
  } catch (const Error& e) {
    std::cerr << nlohmann::json{{"error", e.kind_name()}, {"message", e.what()}}.dump() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
