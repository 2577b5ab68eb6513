#include "ideo/wordvec.hpp"

#include <cmath>
#include <fstream>

#include "ideo/common.hpp"

namespace ideo {

WordVectors::WordVectors(std::vector<std::string> words, Matrix vectors)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
  if (static_cast<Eigen::Index>(words_.size()) != vectors_.rows()) {
    fail(ErrorKind::Shape, "word list and vector rows differ in length");
  }
  if (!vectors_.allFinite()) fail(ErrorKind::Format, "word vectors contain non-finite values");
  lookup_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) lookup_.emplace(words_[i], static_cast<Eigen::Index>(i));
}

std::optional<Eigen::Index> WordVectors::index(std::string_view word) const {
  auto it = lookup_.find(std::string(word));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

WordVectors WordVectors::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open word vectors: " + path.string());
  std::vector<std::string> words;
  std::vector<double> values;
  Eigen::Index dim = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = trim(line);
    if (view.empty()) continue;
    auto fields = split(view, ' ');
    fields.erase(std::remove(fields.begin(), fields.end(), std::string()), fields.end());
    if (line_no == 1 && fields.size() == 2) {
      // word2vec-style "count dim" header.
      bool numeric = std::all_of(fields[0].begin(), fields[0].end(), ::isdigit) &&
                     std::all_of(fields[1].begin(), fields[1].end(), ::isdigit);
      if (numeric) continue;
    }
    const auto d = static_cast<Eigen::Index>(fields.size()) - 1;
    if (d < 1) fail(ErrorKind::Format, path.string() + ":" + std::to_string(line_no) + ": no vector values");
    if (dim < 0) dim = d;
    if (d != dim) {
      fail(ErrorKind::Format, path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                                  " values, found " + std::to_string(d));
    }
    const std::string ctx = path.string() + ":" + std::to_string(line_no);
    for (std::size_t k = 1; k < fields.size(); ++k) values.push_back(parse_double(fields[k], ctx));
    words.push_back(to_lower(fields[0]));
  }
  if (words.empty()) fail(ErrorKind::Format, path.string() + ": no word vectors");
  Matrix m = Eigen::Map<Matrix>(values.data(), static_cast<Eigen::Index>(words.size()), dim);
  return WordVectors(std::move(words), std::move(m));
}

void WordVectors::save(const std::filesystem::path& path) const {
  std::string out;
  out += std::to_string(words_.size()) + " " + std::to_string(vectors_.cols()) + "\n";
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out += words_[i];
    for (Eigen::Index j = 0; j < vectors_.cols(); ++j) {
      out.push_back(' ');
      out += format_exact(vectors_(static_cast<Eigen::Index>(i), j));
    }
    out.push_back('\n');
  }
  write_file(path, out);
}

}  // namespace ideo
