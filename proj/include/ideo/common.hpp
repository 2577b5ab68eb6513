#pragma once
// Shared plumbing: error types, deterministic RNG, small text and CSV helpers.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ideo {

// Every error raised by the library derives from Error. The CLI maps kinds to exit codes.
enum class ErrorKind {
  Io,            // unreadable or missing file
  Format,        // malformed file contents
  CorpusQuality, // too many malformed records
  Calibration,   // slant calibration cell without anchor overlap
  Proxy,         // proxy inputs unusable
  Training,      // learner preconditions violated
  Shape,         // width / alignment mismatch
  UndefinedMetric,
  Config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  const char* kind_name() const noexcept;

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

/// Warnings are collected through a process-wide sink so the CLI can print them and
/// tests can inspect them. Default sink writes to stderr.
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

// ---------------------------------------------------------------------------
// Deterministic random numbers. The mt19937_64 engine is fully specified by the
// standard but std:: distributions are not, so sampling is done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t poisson(double lambda);
  /// Index drawn proportional to weights (nonnegative, not all zero).
  std::size_t categorical(const std::vector<double>& cumulative);

  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const auto j = below(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent stream seed from a base seed and a tag sequence.
std::uint64_t mix_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);
std::uint64_t hash_string(std::string_view s);

/// Cumulative sums for Rng::categorical.
std::vector<double> cumulative(const std::vector<double>& weights);

// ---------------------------------------------------------------------------
// Worker pool size used by the parallel loops. Reads IDEO_WORKERS once.
unsigned worker_count();
void set_worker_count(unsigned n);

/// Runs body(i) for i in [0, n) across worker_count() threads in contiguous chunks.
/// Bodies must only write to index-owned state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// ---------------------------------------------------------------------------
// Text helpers.
std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool starts_with_ci(std::string_view s, std::string_view prefix);

/// Lowercase word-boundary tokenization: maximal runs of ASCII alphanumerics,
/// '_' and '\''; every other byte separates tokens.
std::vector<std::string> word_tokens(std::string_view text);

/// Fixed-point formatting with the given number of decimals, "-0.000000" normalized to "0.000000".
std::string format_fixed(double value, int decimals);
/// Shortest round-trip representation.
std::string format_exact(double value);

// ---------------------------------------------------------------------------
// Minimal delimited-file reading. Fields are split on the delimiter; quoting is
// supported for CSV (double quotes, "" escape).
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  /// Column index by name; throws Format if missing.
  std::size_t column(std::string_view name, const std::string& source) const;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);
Table read_table(const std::filesystem::path& path, char delimiter, bool has_header = true);
std::vector<std::string> parse_delimited_line(std::string_view line, char delimiter);
double parse_double(std::string_view s, const std::string& context);
long long parse_int(std::string_view s, const std::string& context);

}  // namespace ideo
