#pragma once
// Publication slant table: reader-survey weighted leans, shift calibration against
// bias-rating anchors per (country, year) cell, and domain aggregation.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ideo {

struct SurveyRecord {
  std::string participant_id;
  std::string country;
  int year = 0;
  int self_lean = 0;  // in [-3, 3]
  std::vector<std::string> publications;
};

struct AnchorRating {
  std::string publication;
  double rating = 0.0;  // one of -1, -0.5, 0, 0.5, 1
};

using SlantMap = std::map<std::string, double>;
using SurveyCell = std::pair<std::string, int>;  // (country, year)

struct SlantTable {
  SlantMap slant;
  std::map<std::string, int> n_cells;
  /// Cells averaged per domain; not persisted in slants.tsv.
  std::map<std::string, std::set<SurveyCell>> provenance;

  std::size_t size() const { return slant.size(); }
  bool empty() const { return slant.empty(); }
  bool operator==(const SlantTable&) const = default;
};

/// Weighted mean lean per publication, each participant weighted by 1/|publications|.
SlantMap raw_slants(const std::vector<SurveyRecord>& records, const std::string& country, int year);

/// Closed-form shift minimizing the squared error against anchors over the overlap.
double calibration_shift(const SlantMap& scores, const std::vector<AnchorRating>& anchors,
                         const std::string& cell_name = "");
SlantMap calibrate(const SlantMap& scores, const std::vector<AnchorRating>& anchors,
                   const std::string& cell_name = "");

/// Sum of squared differences over overlapping publications after shifting scores by delta.
double shift_sse(const SlantMap& scores, const std::vector<AnchorRating>& anchors, double delta);

/// Calibrates every cell independently, averages publications over cells, then averages
/// publications sharing a domain. Publications without a domain mapping are skipped.
SlantTable build_table(const std::vector<SurveyRecord>& records, const std::vector<AnchorRating>& anchors,
                       const std::multimap<std::string, std::string>& pub_domains);

// File formats
std::vector<SurveyRecord> load_survey(const std::filesystem::path& path);
std::vector<AnchorRating> load_anchors(const std::filesystem::path& path);
std::multimap<std::string, std::string> load_pubmap(const std::filesystem::path& path);

/// domain<TAB>slant<TAB>n_cells with six decimals, domains sorted.
std::string format_slant_table(const SlantTable& table);
void save_slant_table(const SlantTable& table, const std::filesystem::path& path);
SlantTable load_slant_table(const std::filesystem::path& path);

}  // namespace ideo
