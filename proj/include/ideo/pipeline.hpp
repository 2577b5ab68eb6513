#pragma once
// End-to-end orchestration: one dataset through proxy, lenses, learner and evaluation, and
// the experiment runner that writes the comparison reports.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ideo/boost.hpp"
#include "ideo/corpus.hpp"
#include "ideo/eval.hpp"
#include "ideo/lenses.hpp"
#include "ideo/proxies.hpp"
#include "ideo/psycho.hpp"

namespace ideo {

/// Process exit code for an error kind; 0 is success, 1 an unexpected failure.
int exit_code(ErrorKind kind);

struct ProxyInputs {
  std::filesystem::path hashtag_codes;
  std::filesystem::path party_roster;
  std::filesystem::path politicians;
  std::filesystem::path slants;
  std::filesystem::path mbfc;
  double far_right_threshold = 0.5;
};

struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
  /// generic | twitter | parler, or "index" for a saved corpus index.
  std::string format = "generic";
  bool exclude_quotes = false;
  ProxyInputs proxies;
  /// Sentence-encoder output; the word-vector fallback is used when empty.
  std::filesystem::path embeddings;
  std::filesystem::path word_vectors;
  std::filesystem::path gold;
};

CorpusIndex load_dataset(const DatasetSpec& spec);

/// Proxy names: hashtags, party-followers, politician-endorsers, lr-mpp, fr-mpp, mbfc-mpp.
SeedLabels build_proxy(const std::string& name, const CorpusIndex& corpus, const ProxyInputs& inputs);
std::vector<std::string> proxies_for(Mode mode);

/// Lexical source for a dataset: embeddings file if given, otherwise mean word vectors.
/// nullopt when neither is configured.
std::optional<EmbeddingFile> lexical_source(const DatasetSpec& spec, const CorpusIndex& corpus);

FeatureMatrix build_features(const LensSelection& lenses, const CorpusIndex& corpus,
                             const std::optional<EmbeddingFile>& embeddings, const LensOptions& options);

struct PipelineConfig {
  DatasetSpec dataset;
  Mode mode = Mode::LeftRight;
  std::string proxy = "lr-mpp";
  LensSelection lenses = LensSelection::parse("use+rt");
  LensOptions lens_options;
  BoostConfig boost = BoostConfig::for_mode(Mode::LeftRight);
  /// Folds for the seed cross-validation in metrics.json; 0 skips it.
  int cv_folds = 5;
  std::filesystem::path output = "out";
  std::uint64_t seed = 0;

  /// Referenced files must exist (Io) and the lens selection must be nonempty (Config).
  void validate() const;
};

struct PipelineResult {
  SeedLabels seeds;
  BoostModel model;
  Predictions predictions;
  std::vector<Label> decisions;
  std::optional<Calibration> calibration;
  std::optional<CellMetrics> cv;
  std::optional<CellMetrics> gold;
};

/// Writes seeds.tsv, model.bin, predictions.tsv and metrics.json into config.output.
PipelineResult run_pipeline(const PipelineConfig& config);

/// user<TAB>label<TAB>probability, where probability is that of the predicted label.
std::string predictions_tsv(const Predictions& predictions, const std::vector<Label>& decisions);
std::vector<Label> argmax_decisions(const Predictions& predictions, const Calibration* calibration = nullptr);

struct PsychoPaths {
  std::filesystem::path moral;
  std::filesystem::path grievance;
  std::filesystem::path cds;
  /// Word vectors for the moral axes; the first dataset's word vectors when empty.
  std::filesystem::path word_vectors;
};

struct ExperimentConfig {
  /// ablation, cross-proxy, cross-dataset, psychosocial; empty runs all four.
  std::vector<std::string> kinds;
  std::vector<DatasetSpec> datasets;
  Mode mode = Mode::LeftRight;
  /// Proxies compared in the ablation and cross-proxy runs; empty means every proxy of the mode.
  std::vector<std::string> proxies;
  /// Ablation rows; empty means all seven lens sets.
  std::vector<LensSelection> ablation_lenses;
  /// Lens set for the cross-proxy matrix and the psychosocial labeling.
  LensSelection lenses = LensSelection::parse("use+rt");
  LensOptions lens_options;
  /// Proxy seeding the cross-dataset matrix and the left-right labeling for profiles.
  std::string primary_proxy = "lr-mpp";
  /// Far-right labeling for profiles; empty skips the far-right group.
  std::string far_right_proxy = "mbfc-mpp";
  BoostConfig boost = BoostConfig::for_mode(Mode::LeftRight);
  BoostConfig far_right_boost = BoostConfig::for_mode(Mode::FarRight);
  CvOptions cv;
  GroupOptions groups;
  PsychoPaths psycho;
  ProfileOptions profile;
  /// Rows sampled per lens set for the Hopkins statistic.
  std::size_t hopkins_rows = 2000;
  std::filesystem::path output = "experiments";
  std::uint64_t seed = 0;

  void validate() const;
};

struct ExperimentResult {
  std::vector<std::pair<std::string, EvalReport>> ablation;     // per dataset
  std::vector<std::pair<std::string, EvalReport>> cross_proxy;  // per dataset
  std::optional<EvalReport> cross_dataset;
  std::optional<ProfileReport> profile;
  /// (dataset, lens set) -> Hopkins statistic of the lens features.
  std::vector<std::tuple<std::string, std::string, HopkinsResult>> hopkins;
};

/// Runs the configured experiments and writes their reports plus an index report.json.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Configuration files: JSON objects whose keys mirror the struct fields. Relative paths are
// resolved against base_dir. Unknown keys raise Config errors.
PipelineConfig pipeline_config_from_json(const std::string& text, const std::filesystem::path& base_dir,
                                         PipelineConfig defaults = {});
ExperimentConfig experiment_config_from_json(const std::string& text, const std::filesystem::path& base_dir,
                                             ExperimentConfig defaults = {});
DatasetSpec dataset_spec_from_json(const std::string& text, const std::filesystem::path& base_dir,
                                   Mode mode = Mode::LeftRight);
BoostConfig boost_config_from_json(const std::string& text, BoostConfig defaults);

/// Standard dataset spec for a directory written by write_synth. Config entries may use
/// {"synth_dir": ...} as shorthand; the gold file follows the mode.
DatasetSpec synth_dataset_spec(const std::filesystem::path& dir, const std::string& name, Mode mode = Mode::LeftRight);
PsychoPaths synth_psycho_paths(const std::filesystem::path& dir);

}  // namespace ideo
