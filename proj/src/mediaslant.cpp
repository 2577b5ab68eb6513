#include "ideo/mediaslant.hpp"

#include <cmath>

#include "ideo/common.hpp"
#include "ideo/corpus.hpp"

namespace ideo {

SlantMap raw_slants(const std::vector<SurveyRecord>& records, const std::string& country, int year) {
  std::map<std::string, std::pair<double, double>> acc;  // pub -> (sum w*lean, sum w)
  for (const auto& r : records) {
    if (r.country != country || r.year != year || r.publications.empty()) continue;
    const double w = 1.0 / static_cast<double>(r.publications.size());
    for (const auto& pub : r.publications) {
      auto& [num, den] = acc[pub];
      num += w * r.self_lean;
      den += w;
    }
  }
  SlantMap out;
  for (const auto& [pub, nd] : acc) {
    if (nd.second > 0.0) out[pub] = nd.first / nd.second;
  }
  return out;
}

double calibration_shift(const SlantMap& scores, const std::vector<AnchorRating>& anchors,
                         const std::string& cell_name) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& a : anchors) {
    auto it = scores.find(a.publication);
    if (it == scores.end()) continue;
    sum += a.rating - it->second;
    ++n;
  }
  if (n == 0) {
    fail(ErrorKind::Calibration,
         "no publications overlap the anchor ratings" + (cell_name.empty() ? "" : " in cell " + cell_name));
  }
  return sum / static_cast<double>(n);
}

SlantMap calibrate(const SlantMap& scores, const std::vector<AnchorRating>& anchors, const std::string& cell_name) {
  const double delta = calibration_shift(scores, anchors, cell_name);
  SlantMap out;
  for (const auto& [pub, s] : scores) out[pub] = s + delta;
  return out;
}

double shift_sse(const SlantMap& scores, const std::vector<AnchorRating>& anchors, double delta) {
  double sse = 0.0;
  for (const auto& a : anchors) {
    auto it = scores.find(a.publication);
    if (it == scores.end()) continue;
    const double d = it->second + delta - a.rating;
    sse += d * d;
  }
  return sse;
}

SlantTable build_table(const std::vector<SurveyRecord>& records, const std::vector<AnchorRating>& anchors,
                       const std::multimap<std::string, std::string>& pub_domains) {
  std::set<SurveyCell> cells;
  for (const auto& r : records) cells.emplace(r.country, r.year);
  if (cells.empty()) fail(ErrorKind::Calibration, "survey contains no (country, year) cells");

  std::map<std::string, std::vector<double>> per_pub;
  std::map<std::string, std::set<SurveyCell>> pub_cells;
  for (const auto& cell : cells) {
    const auto raw = raw_slants(records, cell.first, cell.second);
    const auto calibrated = calibrate(raw, anchors, cell.first + "/" + std::to_string(cell.second));
    for (const auto& [pub, s] : calibrated) {
      per_pub[pub].push_back(s);
      pub_cells[pub].insert(cell);
    }
  }

  std::map<std::string, std::vector<double>> per_domain;
  SlantTable table;
  for (const auto& [pub, values] : per_pub) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    auto [lo, hi] = pub_domains.equal_range(pub);
    for (auto it = lo; it != hi; ++it) {
      per_domain[it->second].push_back(mean);
      table.provenance[it->second].insert(pub_cells[pub].begin(), pub_cells[pub].end());
    }
  }
  for (const auto& [domain, values] : per_domain) {
    double mean = 0.0;
    for (double v : values) mean += v;
    table.slant[domain] = mean / static_cast<double>(values.size());
    table.n_cells[domain] = static_cast<int>(table.provenance[domain].size());
  }
  return table;
}

// ---------------------------------------------------------------------------

std::vector<SurveyRecord> load_survey(const std::filesystem::path& path) {
  const auto t = read_table(path, ',');
  const std::string src = path.string();
  const auto c_id = t.column("participant_id", src);
  const auto c_country = t.column("country", src);
  const auto c_year = t.column("year", src);
  const auto c_lean = t.column("self_lean", src);
  const auto c_pubs = t.column("pub_ids", src);
  std::vector<SurveyRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string ctx = src + ":" + std::to_string(t.line_numbers[i]);
    if (row.size() < t.header.size()) fail(ErrorKind::Format, ctx + ": too few fields");
    SurveyRecord r;
    r.participant_id = row[c_id];
    r.country = row[c_country];
    r.year = static_cast<int>(parse_int(row[c_year], ctx));
    r.self_lean = static_cast<int>(parse_int(row[c_lean], ctx));
    if (r.self_lean < -3 || r.self_lean > 3) fail(ErrorKind::Format, ctx + ": self_lean outside [-3, 3]");
    for (auto& p : split(row[c_pubs], ';')) {
      auto s = std::string(trim(p));
      if (!s.empty()) r.publications.push_back(std::move(s));
    }
    if (r.publications.empty()) fail(ErrorKind::Format, ctx + ": participant lists no publications");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<AnchorRating> load_anchors(const std::filesystem::path& path) {
  const auto t = read_table(path, ',');
  const std::string src = path.string();
  const auto c_pub = t.column("pub_id", src);
  const auto c_rating = t.column("rating", src);
  std::vector<AnchorRating> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string ctx = src + ":" + std::to_string(t.line_numbers[i]);
    AnchorRating a{t.rows[i].at(c_pub), parse_double(t.rows[i].at(c_rating), ctx)};
    static constexpr double kAllowed[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    if (std::find(std::begin(kAllowed), std::end(kAllowed), a.rating) == std::end(kAllowed)) {
      fail(ErrorKind::Format, ctx + ": rating must be one of -1, -0.5, 0, 0.5, 1");
    }
    if (!seen.insert(a.publication).second) fail(ErrorKind::Format, ctx + ": duplicate rating for " + a.publication);
    out.push_back(std::move(a));
  }
  return out;
}

std::multimap<std::string, std::string> load_pubmap(const std::filesystem::path& path) {
  const auto t = read_table(path, ',');
  const std::string src = path.string();
  const auto c_pub = t.column("pub_id", src);
  const auto c_domain = t.column("domain", src);
  std::multimap<std::string, std::string> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    std::string domain = to_lower(t.rows[i].at(c_domain));
    // Accept bare hosts as well as URLs.
    auto reg = registrable_domain(domain.find("://") == std::string::npos ? "http://" + domain : domain);
    if (!reg) fail(ErrorKind::Format, src + ":" + std::to_string(t.line_numbers[i]) + ": bad domain '" + domain + "'");
    out.emplace(t.rows[i].at(c_pub), *reg);
  }
  return out;
}

std::string format_slant_table(const SlantTable& table) {
  std::string out = "domain\tslant\tn_cells\n";
  for (const auto& [domain, s] : table.slant) {
    auto it = table.n_cells.find(domain);
    out += domain + "\t" + format_fixed(s, 6) + "\t" + std::to_string(it == table.n_cells.end() ? 0 : it->second) +
           "\n";
  }
  return out;
}

void save_slant_table(const SlantTable& table, const std::filesystem::path& path) {
  write_file(path, format_slant_table(table));
}

SlantTable load_slant_table(const std::filesystem::path& path) {
  const auto t = read_table(path, '\t');
  const std::string src = path.string();
  const auto c_domain = t.column("domain", src);
  const auto c_slant = t.column("slant", src);
  std::optional<std::size_t> c_cells;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == "n_cells") c_cells = i;
  }
  SlantTable table;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string ctx = src + ":" + std::to_string(t.line_numbers[i]);
    const auto& row = t.rows[i];
    const std::string domain = to_lower(row.at(c_domain));
    table.slant[domain] = parse_double(row.at(c_slant), ctx);
    table.n_cells[domain] = c_cells ? static_cast<int>(parse_int(row.at(*c_cells), ctx)) : 1;
  }
  return table;
}

}  // namespace ideo
