#pragma once
// Pretrained word vectors in the common text format ("word v1 ... vd" per line, with an
// optional "count dim" header line).

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ideo {

class WordVectors {
 public:
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  WordVectors() = default;
  WordVectors(std::vector<std::string> words, Matrix vectors);

  static WordVectors load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  Eigen::Index dim() const { return vectors_.cols(); }
  std::size_t size() const { return words_.size(); }
  std::optional<Eigen::Index> index(std::string_view word) const;
  Eigen::Ref<const Eigen::RowVectorXd> row(Eigen::Index i) const { return vectors_.row(i); }
  const std::vector<std::string>& words() const { return words_; }
  const Matrix& vectors() const { return vectors_; }

 private:
  std::vector<std::string> words_;
  Matrix vectors_;
  std::unordered_map<std::string, Eigen::Index> lookup_;
};

}  // namespace ideo
