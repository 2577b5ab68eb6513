#include "ideo/lenses.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include "ideo/common.hpp"

namespace ideo {

Eigen::Index FeatureBlock::rows() const {
  return std::visit([](const auto& m) { return static_cast<Eigen::Index>(m.rows()); }, data);
}

Eigen::Index FeatureBlock::cols() const {
  return std::visit([](const auto& m) { return static_cast<Eigen::Index>(m.cols()); }, data);
}

Eigen::Index FeatureMatrix::width() const {
  Eigen::Index w = 0;
  for (const auto& b : blocks) w += b.cols();
  return w;
}

Eigen::MatrixXd FeatureMatrix::dense() const {
  Eigen::MatrixXd out(rows(), width());
  Eigen::Index offset = 0;
  for (const auto& b : blocks) {
    if (b.is_sparse()) {
      out.middleCols(offset, b.cols()) = Eigen::MatrixXd(std::get<SparseBlock>(b.data));
    } else {
      out.middleCols(offset, b.cols()) = std::get<DenseBlock>(b.data);
    }
    offset += b.cols();
  }
  return out;
}

void FeatureMatrix::row(Eigen::Index i, Eigen::Ref<Eigen::RowVectorXd> out) const {
  Eigen::Index offset = 0;
  for (const auto& b : blocks) {
    if (b.is_sparse()) {
      out.segment(offset, b.cols()).setZero();
      for (SparseBlock::InnerIterator it(std::get<SparseBlock>(b.data), i); it; ++it) out(offset + it.col()) = it.value();
    } else {
      out.segment(offset, b.cols()) = std::get<DenseBlock>(b.data).row(i);
    }
    offset += b.cols();
  }
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<Eigen::Index>& rows) const {
  FeatureMatrix out;
  out.row_ids.reserve(rows.size());
  for (auto r : rows) out.row_ids.push_back(row_ids.at(static_cast<std::size_t>(r)));
  for (const auto& b : blocks) {
    FeatureBlock nb{b.name, {}, b.columns};
    if (b.is_sparse()) {
      const auto& src = std::get<SparseBlock>(b.data);
      std::vector<Eigen::Triplet<double>> trips;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (SparseBlock::InnerIterator it(src, rows[i]); it; ++it) {
          trips.emplace_back(static_cast<Eigen::Index>(i), it.col(), it.value());
        }
      }
      SparseBlock m(static_cast<Eigen::Index>(rows.size()), src.cols());
      m.setFromTriplets(trips.begin(), trips.end());
      nb.data = std::move(m);
    } else {
      const auto& src = std::get<DenseBlock>(b.data);
      DenseBlock m(static_cast<Eigen::Index>(rows.size()), src.cols());
      for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = src.row(rows[i]);
      nb.data = std::move(m);
    }
    out.blocks.push_back(std::move(nb));
  }
  return out;
}

std::string FeatureMatrix::lens_name() const {
  std::string s;
  for (const auto& b : blocks) {
    if (!s.empty()) s.push_back('+');
    s += b.name;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Little-endian byte packing

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }
void put_f64(std::string& out, double f) { put_u64(out, std::bit_cast<std::uint64_t>(f)); }

void put_str(std::string& out, std::string_view s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  Reader(std::string_view bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) fail(ErrorKind::Format, what_ + ": truncated at byte " + std::to_string(pos_));
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u32();
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view raw(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_embeddings(const EmbeddingFile& file) {
  if (static_cast<Eigen::Index>(file.ids.size()) != file.vectors.rows()) {
    fail(ErrorKind::Shape, "embedding ids and rows differ in count");
  }
  std::string out(kEmbeddingMagic);
  put_u32(out, static_cast<std::uint32_t>(file.ids.size()));
  put_u32(out, static_cast<std::uint32_t>(file.vectors.cols()));
  put_str(out, file.encoder);
  for (std::size_t i = 0; i < file.ids.size(); ++i) {
    put_str(out, file.ids[i]);
    for (Eigen::Index j = 0; j < file.vectors.cols(); ++j) put_f32(out, file.vectors(static_cast<Eigen::Index>(i), j));
  }
  return out;
}

EmbeddingFile decode_embeddings(std::string_view bytes) {
  Reader r(bytes, "embeddings");
  if (r.raw(kEmbeddingMagic.size()) != kEmbeddingMagic) fail(ErrorKind::Format, "embeddings: bad magic bytes");
  const auto n = r.u32();
  const auto d = r.u32();
  EmbeddingFile f;
  f.encoder = r.str();
  f.ids.reserve(n);
  f.vectors.resize(n, d);
  std::unordered_map<std::string, bool> seen;
  for (std::uint32_t i = 0; i < n; ++i) {
    f.ids.push_back(r.str());
    if (!seen.emplace(f.ids.back(), true).second) fail(ErrorKind::Format, "embeddings: duplicate id " + f.ids.back());
    for (std::uint32_t j = 0; j < d; ++j) {
      const float v = r.f32();
      if (!std::isfinite(v)) fail(ErrorKind::Format, "embeddings: non-finite value for " + f.ids.back());
      f.vectors(i, j) = v;
    }
  }
  if (!r.done()) fail(ErrorKind::Format, "embeddings: trailing bytes after last record");
  return f;
}

void write_embeddings(const EmbeddingFile& file, const std::filesystem::path& path) {
  write_file(path, encode_embeddings(file));
}

EmbeddingFile read_embeddings(const std::filesystem::path& path) { return decode_embeddings(read_file(path)); }

void write_embeddings_tsv(const EmbeddingFile& file, const std::filesystem::path& path) {
  std::string out = "# encoder=" + file.encoder + "\n";
  for (std::size_t i = 0; i < file.ids.size(); ++i) {
    out += file.ids[i];
    out.push_back('\t');
    for (Eigen::Index j = 0; j < file.vectors.cols(); ++j) {
      if (j > 0) out.push_back(' ');
      out += format_exact(static_cast<double>(file.vectors(static_cast<Eigen::Index>(i), j)));
    }
    out.push_back('\n');
  }
  write_file(path, out);
}

EmbeddingFile read_embeddings_tsv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  EmbeddingFile f;
  std::vector<float> values;
  Eigen::Index dim = -1;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.rfind("# encoder=", 0) == 0) f.encoder = std::string(line.substr(10));
      continue;
    }
    const auto tab = line.find('\t');
    const std::string ctx = path.string() + ":" + std::to_string(line_no);
    if (tab == std::string_view::npos) fail(ErrorKind::Format, ctx + ": expected user_id<TAB>values");
    f.ids.emplace_back(line.substr(0, tab));
    Eigen::Index d = 0;
    for (const auto& tok : split(line.substr(tab + 1), ' ')) {
      if (tok.empty()) continue;
      values.push_back(static_cast<float>(parse_double(tok, ctx)));
      ++d;
    }
    if (dim < 0) dim = d;
    if (d != dim) fail(ErrorKind::Format, ctx + ": dimension " + std::to_string(d) + " differs from " + std::to_string(dim));
  }
  f.vectors = Eigen::Map<EmbeddingFile::Matrix>(values.data(), static_cast<Eigen::Index>(f.ids.size()), std::max<Eigen::Index>(dim, 0));
  return f;
}

EmbeddingFile load_embeddings(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".tsv" || ext == ".txt") return read_embeddings_tsv(path);
  return read_embeddings(path);
}

EmbeddingFile mean_word_vector_embeddings(const CorpusIndex& corpus, const WordVectors& vectors,
                                          std::size_t* users_without_tokens) {
  EmbeddingFile f;
  f.encoder = "mean-word-vectors";
  f.ids = corpus.user_ids();
  f.vectors = EmbeddingFile::Matrix::Zero(static_cast<Eigen::Index>(f.ids.size()), vectors.dim());
  std::vector<char> empty(f.ids.size(), 0);
  parallel_for(f.ids.size(), [&](std::size_t i) {
    const auto& user = corpus.users.at(f.ids[i]);
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(vectors.dim());
    std::size_t n = 0;
    for (const auto& tok : word_tokens(user.concatenated_text)) {
      if (auto idx = vectors.index(tok)) {
        sum += vectors.row(*idx);
        ++n;
      }
    }
    if (n > 0) f.vectors.row(static_cast<Eigen::Index>(i)) = (sum / static_cast<double>(n)).cast<float>();
    else empty[i] = 1;
  });
  if (users_without_tokens) *users_without_tokens = static_cast<std::size_t>(std::count(empty.begin(), empty.end(), 1));
  return f;
}

// ---------------------------------------------------------------------------

LexicalResult lexical_block(const EmbeddingFile& embeddings, const std::vector<std::string>& users) {
  std::unordered_map<std::string_view, Eigen::Index> row_of;
  row_of.reserve(embeddings.ids.size());
  for (std::size_t i = 0; i < embeddings.ids.size(); ++i) row_of.emplace(embeddings.ids[i], static_cast<Eigen::Index>(i));
  LexicalResult out;
  out.block = DenseBlock::Zero(static_cast<Eigen::Index>(users.size()), embeddings.dim());
  for (std::size_t i = 0; i < users.size(); ++i) {
    auto it = row_of.find(users[i]);
    if (it == row_of.end()) {
      ++out.missing;
      continue;
    }
    out.block.row(static_cast<Eigen::Index>(i)) = embeddings.vectors.row(it->second).cast<double>();
  }
  return out;
}

HashtagVocabulary hashtag_vocabulary(const CorpusIndex& corpus, std::int64_t min_count) {
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> stats;  // tag -> (occurrences, df)
  for (const auto& [_, u] : corpus.users) {
    for (const auto& [tag, c] : u.hashtag_counts) {
      auto& s = stats[tag];
      s.first += c;
      s.second += 1;
    }
  }
  HashtagVocabulary v;
  const double n = static_cast<double>(corpus.n_users());
  for (const auto& [tag, s] : stats) {
    if (s.first < min_count) continue;
    v.tags.push_back(tag);
    v.df.push_back(s.second);
    v.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(s.second))) + 1.0);
  }
  return v;
}

SparseBlock hashtag_block(const CorpusIndex& corpus, const std::vector<std::string>& users,
                          const HashtagVocabulary& vocab) {
  std::unordered_map<std::string_view, Eigen::Index> col_of;
  for (std::size_t j = 0; j < vocab.tags.size(); ++j) col_of.emplace(vocab.tags[j], static_cast<Eigen::Index>(j));
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t i = 0; i < users.size(); ++i) {
    const auto* u = corpus.find(users[i]);
    if (!u) continue;
    for (const auto& [tag, c] : u->hashtag_counts) {
      auto it = col_of.find(tag);
      if (it == col_of.end()) continue;
      trips.emplace_back(static_cast<Eigen::Index>(i), it->second,
                         static_cast<double>(c) * vocab.idf[static_cast<std::size_t>(it->second)]);
    }
  }
  SparseBlock m(static_cast<Eigen::Index>(users.size()), static_cast<Eigen::Index>(vocab.tags.size()));
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

std::vector<std::string> top_reshared_posts(const CorpusIndex& corpus, std::size_t k) {
  std::vector<std::pair<std::int64_t, const std::string*>> ranked;
  ranked.reserve(corpus.post_reshare_counts.size());
  for (const auto& [post, c] : corpus.post_reshare_counts) ranked.emplace_back(c, &post);
  const std::size_t take = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end(),
                    [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : *a.second < *b.second; });
  std::vector<std::string> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(*ranked[i].second);
  return out;
}

SparseBlock reshare_block(const CorpusIndex& corpus, const std::vector<std::string>& users,
                          const std::vector<std::string>& columns) {
  std::unordered_map<std::string_view, Eigen::Index> col_of;
  for (std::size_t j = 0; j < columns.size(); ++j) col_of.emplace(columns[j], static_cast<Eigen::Index>(j));
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t i = 0; i < users.size(); ++i) {
    const auto* u = corpus.find(users[i]);
    if (!u) continue;
    for (const auto& post : u->reshared_post_ids) {
      if (auto it = col_of.find(post); it != col_of.end()) trips.emplace_back(static_cast<Eigen::Index>(i), it->second, 1.0);
    }
  }
  SparseBlock m(static_cast<Eigen::Index>(users.size()), static_cast<Eigen::Index>(columns.size()));
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

// ---------------------------------------------------------------------------

std::string LensSelection::name() const {
  std::string s;
  auto add = [&](bool on, const char* n) {
    if (!on) return;
    if (!s.empty()) s.push_back('+');
    s += n;
  };
  add(use, "use");
  add(ht, "ht");
  add(rt, "rt");
  return s;
}

LensSelection LensSelection::parse(std::string_view s) {
  LensSelection sel;
  for (const auto& part : split(s, '+')) {
    const auto p = to_lower(trim(part));
    if (p == "use" || p == "lexical") sel.use = true;
    else if (p == "ht" || p == "hashtag") sel.ht = true;
    else if (p == "rt" || p == "reshare") sel.rt = true;
    else fail(ErrorKind::Config, "unknown lens '" + p + "' (use|ht|rt joined by '+')");
  }
  if (sel.empty()) fail(ErrorKind::Config, "lens selection is empty");
  return sel;
}

std::vector<LensSelection> LensSelection::all() {
  return {{true, false, false}, {false, true, false}, {false, false, true}, {true, true, false},
          {true, false, true},  {false, true, true},  {true, true, true}};
}

FeatureMatrix assemble(const LensSelection& selection, const CorpusIndex& corpus,
                       const std::vector<std::string>& users, const EmbeddingFile* embeddings,
                       const LensOptions& options) {
  if (selection.empty()) fail(ErrorKind::Config, "lens selection is empty");
  FeatureMatrix fm;
  fm.row_ids = users;
  if (selection.use) {
    if (!embeddings) fail(ErrorKind::Config, "lexical lens requested without an embedding file");
    auto lex = lexical_block(*embeddings, users);
    if (lex.missing > 0) {
      warn(std::to_string(lex.missing) + " of " + std::to_string(users.size()) +
           " users have no embedding; zero vectors used");
    }
    FeatureBlock b{"use", std::move(lex.block), {}};
    for (Eigen::Index j = 0; j < embeddings->dim(); ++j) b.columns.push_back("use_" + std::to_string(j));
    fm.blocks.push_back(std::move(b));
  }
  if (selection.ht) {
    auto vocab = hashtag_vocabulary(corpus, options.min_hashtag_count);
    if (vocab.tags.empty()) warn("hashtag vocabulary is empty; hashtag block has width 0");
    FeatureBlock b{"ht", hashtag_block(corpus, users, vocab), vocab.tags};
    fm.blocks.push_back(std::move(b));
  }
  if (selection.rt) {
    auto cols = top_reshared_posts(corpus, options.top_reshared);
    if (cols.size() < options.top_reshared) {
      warn("only " + std::to_string(cols.size()) + " reshared posts; reshare block narrower than " +
           std::to_string(options.top_reshared));
    }
    FeatureBlock b{"rt", reshare_block(corpus, users, cols), cols};
    fm.blocks.push_back(std::move(b));
  }
  for (const auto& b : fm.blocks) {
    if (b.rows() != fm.rows()) fail(ErrorKind::Shape, "block " + b.name + " is not row-aligned");
  }
  return fm;
}

FeatureMatrix align_rows(const FeatureMatrix& matrix, const std::vector<std::string>& ids) {
  std::unordered_map<std::string_view, Eigen::Index> row_of;
  for (std::size_t i = 0; i < matrix.row_ids.size(); ++i) row_of.emplace(matrix.row_ids[i], static_cast<Eigen::Index>(i));
  std::vector<Eigen::Index> rows;
  rows.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = row_of.find(id);
    if (it == row_of.end()) fail(ErrorKind::Shape, "user " + id + " has no feature row");
    rows.push_back(it->second);
  }
  return matrix.select_rows(rows);
}

// ---------------------------------------------------------------------------
// features.bin: "IDEOFEA1", u32 rows, row ids, u32 blocks, then per block
// name, u8 kind (0 dense, 1 sparse), u32 cols, column labels, payload.

void save_features(const FeatureMatrix& matrix, const std::filesystem::path& path) {
  std::string out = "IDEOFEA1";
  put_u32(out, static_cast<std::uint32_t>(matrix.row_ids.size()));
  for (const auto& id : matrix.row_ids) put_str(out, id);
  put_u32(out, static_cast<std::uint32_t>(matrix.blocks.size()));
  for (const auto& b : matrix.blocks) {
    put_str(out, b.name);
    out.push_back(static_cast<char>(b.is_sparse() ? 1 : 0));
    put_u32(out, static_cast<std::uint32_t>(b.cols()));
    put_u32(out, static_cast<std::uint32_t>(b.columns.size()));
    for (const auto& c : b.columns) put_str(out, c);
    if (b.is_sparse()) {
      const auto& m = std::get<SparseBlock>(b.data);
      put_u64(out, static_cast<std::uint64_t>(m.nonZeros()));
      for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
        for (SparseBlock::InnerIterator it(m, r); it; ++it) {
          put_u32(out, static_cast<std::uint32_t>(it.row()));
          put_u32(out, static_cast<std::uint32_t>(it.col()));
          put_f64(out, it.value());
        }
      }
    } else {
      const auto& m = std::get<DenseBlock>(b.data);
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
      }
    }
  }
  write_file(path, out);
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  Reader r(bytes, path.string());
  if (r.raw(8) != "IDEOFEA1") fail(ErrorKind::Format, path.string() + ": bad magic bytes");
  FeatureMatrix fm;
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) fm.row_ids.push_back(r.str());
  const auto nb = r.u32();
  for (std::uint32_t k = 0; k < nb; ++k) {
    FeatureBlock b;
    b.name = r.str();
    const auto kind = static_cast<unsigned char>(r.raw(1)[0]);
    const auto cols = r.u32();
    const auto nlabels = r.u32();
    for (std::uint32_t c = 0; c < nlabels; ++c) b.columns.push_back(r.str());
    if (kind == 1) {
      const auto nnz = r.u64();
      std::vector<Eigen::Triplet<double>> trips;
      trips.reserve(nnz);
      for (std::uint64_t t = 0; t < nnz; ++t) {
        const auto row = r.u32();
        const auto col = r.u32();
        const double v = r.f64();
        if (row >= n || col >= cols) fail(ErrorKind::Format, path.string() + ": sparse entry out of range");
        trips.emplace_back(row, col, v);
      }
      SparseBlock m(n, cols);
      m.setFromTriplets(trips.begin(), trips.end());
      b.data = std::move(m);
    } else {
      DenseBlock m(n, cols);
      for (std::uint32_t row = 0; row < n; ++row) {
        for (std::uint32_t c = 0; c < cols; ++c) m(row, c) = r.f64();
      }
      b.data = std::move(m);
    }
    fm.blocks.push_back(std::move(b));
  }
  if (!r.done()) fail(ErrorKind::Format, path.string() + ": trailing bytes");
  return fm;
}

}  // namespace ideo
