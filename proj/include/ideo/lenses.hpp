#pragma once
// Homophilic feature blocks (lexical embeddings, hashtag TF-IDF, reshare multi-hot) and
// their assembly into a row-aligned feature matrix.

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ideo/corpus.hpp"
#include "ideo/wordvec.hpp"

namespace ideo {

using DenseBlock = Eigen::MatrixXd;
using SparseBlock = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct FeatureBlock {
  std::string name;
  std::variant<DenseBlock, SparseBlock> data;
  /// Column labels (hashtag, post id, or embedding dimension).
  std::vector<std::string> columns;

  Eigen::Index rows() const;
  Eigen::Index cols() const;
  bool is_sparse() const { return std::holds_alternative<SparseBlock>(data); }
};

struct FeatureMatrix {
  std::vector<std::string> row_ids;
  std::vector<FeatureBlock> blocks;

  Eigen::Index rows() const { return static_cast<Eigen::Index>(row_ids.size()); }
  Eigen::Index width() const;
  /// Densified copy, mostly for tests and small matrices.
  Eigen::MatrixXd dense() const;
  /// Writes row i across all blocks into out (length width()).
  void row(Eigen::Index i, Eigen::Ref<Eigen::RowVectorXd> out) const;
  /// Rows selected by position, preserving block structure.
  FeatureMatrix select_rows(const std::vector<Eigen::Index>& rows) const;
  std::string lens_name() const;
};

// ---------------------------------------------------------------------------
// Embedding file: "IDEOEMB1", u32 n, u32 d, u32 name length + bytes, then n records of
// (u32 id length + bytes, d little-endian IEEE-754 binary32).

inline constexpr std::string_view kEmbeddingMagic = "IDEOEMB1";

struct EmbeddingFile {
  using Matrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  std::string encoder;
  std::vector<std::string> ids;
  Matrix vectors;

  Eigen::Index dim() const { return vectors.cols(); }
  std::size_t size() const { return ids.size(); }
  bool operator==(const EmbeddingFile& o) const {
    return encoder == o.encoder && ids == o.ids && vectors.rows() == o.vectors.rows() &&
           vectors.cols() == o.vectors.cols() && vectors == o.vectors;
  }
};

std::string encode_embeddings(const EmbeddingFile& file);
EmbeddingFile decode_embeddings(std::string_view bytes);
void write_embeddings(const EmbeddingFile& file, const std::filesystem::path& path);
EmbeddingFile read_embeddings(const std::filesystem::path& path);
/// Text fallback: "# encoder=<name>" header, then user_id<TAB>v1 v2 ... per line.
void write_embeddings_tsv(const EmbeddingFile& file, const std::filesystem::path& path);
EmbeddingFile read_embeddings_tsv(const std::filesystem::path& path);
/// Dispatches on extension (.tsv / .txt are text, everything else binary).
EmbeddingFile load_embeddings(const std::filesystem::path& path);

/// Mean pretrained word vector of each user's tokens; users without known tokens get the
/// zero vector. Stands in for the sentence encoder when no adapter output is available.
EmbeddingFile mean_word_vector_embeddings(const CorpusIndex& corpus, const WordVectors& vectors,
                                          std::size_t* users_without_tokens = nullptr);

// ---------------------------------------------------------------------------

struct LexicalResult {
  DenseBlock block;
  std::size_t missing = 0;
};

LexicalResult lexical_block(const EmbeddingFile& embeddings, const std::vector<std::string>& users);

struct HashtagVocabulary {
  std::vector<std::string> tags;   // lexicographic
  std::vector<double> idf;         // aligned with tags
  std::vector<std::int64_t> df;
};

/// Hashtags with at least min_count total corpus occurrences, with smoothed idf
/// ln((1 + N) / (1 + df)) + 1 over the corpus users.
HashtagVocabulary hashtag_vocabulary(const CorpusIndex& corpus, std::int64_t min_count = 10);
SparseBlock hashtag_block(const CorpusIndex& corpus, const std::vector<std::string>& users,
                          const HashtagVocabulary& vocab);

/// Top-k reshared posts by count, ties broken by post id.
std::vector<std::string> top_reshared_posts(const CorpusIndex& corpus, std::size_t k = 1000);
SparseBlock reshare_block(const CorpusIndex& corpus, const std::vector<std::string>& users,
                          const std::vector<std::string>& columns);

struct LensSelection {
  bool use = false;
  bool ht = false;
  bool rt = false;

  bool empty() const { return !use && !ht && !rt; }
  std::string name() const;
  static LensSelection parse(std::string_view s);
  /// The seven nonempty combinations in ablation order: use, ht, rt, use+ht, use+rt, ht+rt, use+ht+rt.
  static std::vector<LensSelection> all();
  bool operator==(const LensSelection&) const = default;
};

struct LensOptions {
  std::int64_t min_hashtag_count = 10;
  std::size_t top_reshared = 1000;
};

/// Blocks in canonical order use, ht, rt. The lexical lens needs embeddings.
FeatureMatrix assemble(const LensSelection& selection, const CorpusIndex& corpus,
                       const std::vector<std::string>& users, const EmbeddingFile* embeddings,
                       const LensOptions& options = {});

/// Reorders a feature matrix to the given row ids; unknown ids raise Shape errors.
FeatureMatrix align_rows(const FeatureMatrix& matrix, const std::vector<std::string>& ids);

void save_features(const FeatureMatrix& matrix, const std::filesystem::path& path);
FeatureMatrix load_features(const std::filesystem::path& path);

}  // namespace ideo
