#include "ideo/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace ideo {

using json = nlohmann::json;

std::int64_t CorpusIndex::n_posts() const {
  std::int64_t n = 0;
  for (const auto& [_, u] : users) n += u.post_count;
  return n;
}

std::vector<std::string> CorpusIndex::user_ids() const {
  std::vector<std::string> ids;
  ids.reserve(users.size());
  for (const auto& [id, _] : users) ids.push_back(id);
  return ids;
}

const UserRecord* CorpusIndex::find(std::string_view user_id) const {
  auto it = users.find(std::string(user_id));
  return it == users.end() ? nullptr : &it->second;
}

InputFormat parse_input_format(std::string_view name) {
  if (name == "generic") return InputFormat::Generic;
  if (name == "twitter") return InputFormat::Twitter;
  if (name == "parler") return InputFormat::Parler;
  fail(ErrorKind::Config, "unknown input format '" + std::string(name) + "' (generic|twitter|parler)");
}

// ---------------------------------------------------------------------------
// Text scanning

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::vector<std::string> sigil_words(std::string_view text, char sigil) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != sigil) continue;
    // A sigil glued to a preceding word character is not a tag (e.g. emails).
    if (i > 0 && is_word_byte(static_cast<unsigned char>(text[i - 1]))) continue;
    std::size_t j = i + 1;
    while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i + 1) out.push_back(to_lower(text.substr(i + 1, j - i - 1)));
    i = j - 1;
  }
  return out;
}

std::string normalize_tag(std::string_view tag) {
  tag = trim(tag);
  while (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
  return to_lower(tag);
}

}  // namespace

std::vector<std::string> hashtags_in_text(std::string_view text) { return sigil_words(text, '#'); }
std::vector<std::string> mentions_in_text(std::string_view text) { return sigil_words(text, '@'); }

std::string clean_text(std::string_view text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::string_view token = text.substr(i, j - i);
      std::string_view core = token;
      while (!core.empty() && std::string_view("\"'([{<").find(core.front()) != std::string_view::npos) {
        core.remove_prefix(1);
      }
      const bool drop = starts_with_ci(core, "http") || starts_with_ci(token, "http") ||
                        (!core.empty() && (core.front() == '#' || core.front() == '@'));
      if (!drop) {
        if (!out.empty()) out.push_back(' ');
        out.append(token);
      }
    }
    i = j;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Domains

namespace {

// ICANN multi-label public suffixes likely to appear in news links. Any single
// top-level label is itself a public suffix.
constexpr std::array<std::string_view, 72> kMultiLabelSuffixes = {
    "ac.jp",  "ac.nz",  "ac.uk",  "asn.au", "co.id",  "co.il",  "co.in",  "co.jp",  "co.kr",
    "co.nz",  "co.th",  "co.uk",  "co.za",  "com.ar", "com.au", "com.br", "com.cn", "com.co",
    "com.eg", "com.hk", "com.mx", "com.my", "com.ng", "com.pe", "com.ph", "com.pk", "com.sa",
    "com.sg", "com.tr", "com.tw", "com.ua", "com.vn", "edu.au", "edu.cn", "gc.ca",  "go.jp",
    "gov.au", "gov.cn", "gov.in", "gov.uk", "govt.nz", "id.au",  "ltd.uk", "me.uk",  "ne.jp",
    "net.au", "net.br", "net.cn", "net.in", "net.nz", "net.uk", "nhs.uk", "or.jp",  "org.au",
    "org.br", "org.cn", "org.in", "org.mx", "org.nz", "org.uk", "org.za", "plc.uk", "police.uk",
    "sch.uk", "gob.mx", "gob.ar", "nic.in", "ac.in",  "res.in", "gen.nz", "iwi.nz", "school.nz"};

bool is_multi_label_suffix(std::string_view s) {
  return std::find(kMultiLabelSuffixes.begin(), kMultiLabelSuffixes.end(), s) != kMultiLabelSuffixes.end();
}

bool valid_label(std::string_view label) {
  if (label.empty() || label.size() > 63) return false;
  if (label.front() == '-' || label.back() == '-') return false;
  return std::all_of(label.begin(), label.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
  });
}

}  // namespace

std::optional<std::string> registrable_domain(std::string_view url) {
  url = trim(url);
  const auto sep = url.find("://");
  if (sep == std::string_view::npos || sep == 0) return std::nullopt;
  const auto scheme = url.substr(0, sep);
  if (!std::isalpha(static_cast<unsigned char>(scheme.front()))) return std::nullopt;
  for (char c : scheme) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.')) return std::nullopt;
  }
  std::string_view rest = url.substr(sep + 3);
  rest = rest.substr(0, rest.find_first_of("/?#"));
  if (const auto at = rest.rfind('@'); at != std::string_view::npos) rest = rest.substr(at + 1);
  if (!rest.empty() && rest.front() == '[') return std::nullopt;  // IPv6 literal
  if (const auto colon = rest.find(':'); colon != std::string_view::npos) rest = rest.substr(0, colon);
  std::string host = to_lower(rest);
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (host.rfind("www.", 0) == 0) host.erase(0, 4);

  auto labels = split(host, '.');
  if (labels.size() < 2) return std::nullopt;
  for (const auto& l : labels) {
    if (!valid_label(l)) return std::nullopt;
  }
  // Reject dotted IPv4 addresses.
  if (std::all_of(host.begin(), host.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.'; })) {
    return std::nullopt;
  }
  if (std::isdigit(static_cast<unsigned char>(labels.back().front()))) return std::nullopt;

  const std::size_t n = labels.size();
  std::size_t suffix_labels = 1;
  if (is_multi_label_suffix(labels[n - 2] + "." + labels[n - 1])) suffix_labels = 2;
  if (n <= suffix_labels) return std::nullopt;
  std::string out;
  for (std::size_t i = n - suffix_labels - 1; i < n; ++i) {
    if (!out.empty()) out.push_back('.');
    out += labels[i];
  }
  return out;
}

std::vector<std::string> extract_domains(const std::vector<std::string>& urls, std::int64_t* dropped) {
  std::vector<std::string> out;
  for (const auto& u : urls) {
    if (auto d = registrable_domain(u)) {
      out.push_back(std::move(*d));
    } else if (dropped) {
      ++*dropped;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Emoji

namespace {

// Extended_Pictographic ranges from the Unicode emoji data files.
constexpr std::array<std::pair<char32_t, char32_t>, 78> kPictographic = {{
    {0x00A9, 0x00A9},   {0x00AE, 0x00AE},   {0x203C, 0x203C},   {0x2049, 0x2049},   {0x2122, 0x2122},
    {0x2139, 0x2139},   {0x2194, 0x2199},   {0x21A9, 0x21AA},   {0x231A, 0x231B},   {0x2328, 0x2328},
    {0x2388, 0x2388},   {0x23CF, 0x23CF},   {0x23E9, 0x23F3},   {0x23F8, 0x23FA},   {0x24C2, 0x24C2},
    {0x25AA, 0x25AB},   {0x25B6, 0x25B6},   {0x25C0, 0x25C0},   {0x25FB, 0x25FE},   {0x2600, 0x2605},
    {0x2607, 0x2612},   {0x2614, 0x2685},   {0x2690, 0x2705},   {0x2708, 0x2712},   {0x2714, 0x2714},
    {0x2716, 0x2716},   {0x271D, 0x271D},   {0x2721, 0x2721},   {0x2728, 0x2728},   {0x2733, 0x2734},
    {0x2744, 0x2744},   {0x2747, 0x2747},   {0x274C, 0x274C},   {0x274E, 0x274E},   {0x2753, 0x2755},
    {0x2757, 0x2757},   {0x2763, 0x2767},   {0x2795, 0x2797},   {0x27A1, 0x27A1},   {0x27B0, 0x27B0},
    {0x27BF, 0x27BF},   {0x2934, 0x2935},   {0x2B05, 0x2B07},   {0x2B1B, 0x2B1C},   {0x2B50, 0x2B50},
    {0x2B55, 0x2B55},   {0x3030, 0x3030},   {0x303D, 0x303D},   {0x3297, 0x3297},   {0x3299, 0x3299},
    {0x1F000, 0x1F0FF}, {0x1F10D, 0x1F10F}, {0x1F12F, 0x1F12F}, {0x1F16C, 0x1F171}, {0x1F17E, 0x1F17F},
    {0x1F18E, 0x1F18E}, {0x1F191, 0x1F19A}, {0x1F1AD, 0x1F1E5}, {0x1F201, 0x1F20F}, {0x1F21A, 0x1F21A},
    {0x1F22F, 0x1F22F}, {0x1F232, 0x1F23A}, {0x1F23C, 0x1F23F}, {0x1F249, 0x1F3FA}, {0x1F400, 0x1F53D},
    {0x1F546, 0x1F64F}, {0x1F680, 0x1F6FF}, {0x1F774, 0x1F77F}, {0x1F7D5, 0x1F7FF}, {0x1F80C, 0x1F80F},
    {0x1F848, 0x1F84F}, {0x1F85A, 0x1F85F}, {0x1F888, 0x1F88F}, {0x1F8AE, 0x1F8FF}, {0x1F90C, 0x1F93A},
    {0x1F93C, 0x1F945}, {0x1F947, 0x1FAFF}, {0x1FC00, 0x1FFFD},
}};

bool is_pictographic(char32_t cp) {
  auto it = std::upper_bound(kPictographic.begin(), kPictographic.end(), cp,
                             [](char32_t v, const auto& r) { return v < r.first; });
  if (it == kPictographic.begin()) return false;
  --it;
  return cp >= it->first && cp <= it->second;
}

bool is_regional_indicator(char32_t cp) { return cp >= 0x1F1E6 && cp <= 0x1F1FF; }
bool is_skin_tone(char32_t cp) { return cp >= 0x1F3FB && cp <= 0x1F3FF; }
bool is_tag(char32_t cp) { return cp >= 0xE0020 && cp <= 0xE007F; }
bool is_keycap_base(char32_t cp) { return cp == '#' || cp == '*' || (cp >= '0' && cp <= '9'); }

struct CodePoint {
  char32_t value;
  std::size_t offset;
  std::size_t length;
};

std::vector<CodePoint> decode_utf8(std::string_view s) {
  std::vector<CodePoint> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = c;
    if (c >= 0xF0 && c < 0xF8) {
      len = 4;
      cp = c & 0x07;
    } else if (c >= 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if (c >= 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if (c >= 0x80) {
      out.push_back({0xFFFD, i, 1});
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back({0xFFFD, i, 1});
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back({0xFFFD, i, 1});
      ++i;
      continue;
    }
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

}  // namespace

Counts extract_emoji(std::string_view text) {
  Counts out;
  const auto cps = decode_utf8(text);
  std::size_t i = 0;
  auto emit = [&](std::size_t first, std::size_t last) {
    const std::size_t begin = cps[first].offset;
    const std::size_t end = cps[last].offset + cps[last].length;
    ++out[std::string(text.substr(begin, end - begin))];
  };
  while (i < cps.size()) {
    const char32_t cp = cps[i].value;
    if (is_regional_indicator(cp)) {
      if (i + 1 < cps.size() && is_regional_indicator(cps[i + 1].value)) {
        emit(i, i + 1);
        i += 2;
      } else {
        emit(i, i);
        ++i;
      }
      continue;
    }
    if (is_keycap_base(cp)) {
      std::size_t j = i + 1;
      if (j < cps.size() && cps[j].value == 0xFE0F) ++j;
      if (j < cps.size() && cps[j].value == 0x20E3) {
        emit(i, j);
        i = j + 1;
        continue;
      }
      ++i;
      continue;
    }
    if (!is_pictographic(cp)) {
      ++i;
      continue;
    }
    std::size_t j = i;  // last code point of the cluster
    bool emoji_presentation = false;
    auto absorb_modifiers = [&] {
      while (j + 1 < cps.size()) {
        const char32_t next = cps[j + 1].value;
        if (next == 0xFE0F) {
          emoji_presentation = true;
          ++j;
        } else if (next == 0xFE0E || is_skin_tone(next) || is_tag(next) || next == 0x20E3) {
          ++j;
        } else {
          break;
        }
      }
    };
    absorb_modifiers();
    while (j + 2 < cps.size() && cps[j + 1].value == 0x200D && is_pictographic(cps[j + 2].value)) {
      j += 2;
      absorb_modifiers();
    }
    // Low code points such as (c) and arrows default to text presentation.
    if (cp >= 0x2300 || emoji_presentation) emit(i, j);
    i = j + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Record parsing

namespace {

std::optional<std::string> id_string(const json& v) {
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (s.empty()) return std::nullopt;
    return s;
  }
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  return std::nullopt;
}

const json* member(const json& obj, std::string_view key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

const json* path(const json& obj, std::initializer_list<std::string_view> keys) {
  const json* cur = &obj;
  for (auto k : keys) {
    cur = member(*cur, k);
    if (!cur) return nullptr;
  }
  return cur;
}

std::vector<std::string> string_list(const json& arr) {
  std::vector<std::string> out;
  if (!arr.is_array()) throw std::invalid_argument("expected array");
  for (const auto& v : arr) {
    if (!v.is_string()) throw std::invalid_argument("expected string element");
    out.push_back(v.get<std::string>());
  }
  return out;
}

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

// Accepts "YYYY-MM-DDTHH:MM:SS..." and the compact "YYYYMMDDHHMMSS".
std::optional<std::int64_t> parse_time(const std::string& s) {
  int y, mo, d, h, mi, sec;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d", &y, &mo, &d, &h, &mi, &sec) == 6 ||
      std::sscanf(s.c_str(), "%4d%2d%2d%2d%2d%2d", &y, &mo, &d, &h, &mi, &sec) == 6) {
    return days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 + h * 3600 +
           mi * 60 + sec;
  }
  return std::nullopt;
}

void fill_text_derived(Post& p, bool have_hashtags, bool have_mentions) {
  if (!have_hashtags) p.hashtags = hashtags_in_text(p.text);
  if (!have_mentions) p.mentions = mentions_in_text(p.text);
  for (auto& h : p.hashtags) h = normalize_tag(h);
  p.hashtags.erase(std::remove(p.hashtags.begin(), p.hashtags.end(), std::string()), p.hashtags.end());
}

Post parse_generic(const json& j) {
  Post p;
  p.post_id = id_string(j.at("post_id")).value();
  p.user_id = id_string(j.at("user_id")).value();
  if (auto t = member(j, "text")) p.text = t->get<std::string>();
  if (auto r = member(j, "reshare_of")) p.reshare_of = id_string(*r).value();
  if (auto r = member(j, "reshare_user_id")) p.reshare_user_id = id_string(*r).value();
  if (auto q = member(j, "is_quote")) p.is_quote = q->get<bool>();
  const json* tags = member(j, "hashtags");
  if (tags) p.hashtags = string_list(*tags);
  if (auto u = member(j, "urls")) p.urls = string_list(*u);
  const json* mentions = member(j, "mentions");
  if (mentions) p.mentions = string_list(*mentions);
  if (auto ts = member(j, "timestamp")) p.timestamp = ts->get<std::int64_t>();
  fill_text_derived(p, tags != nullptr, mentions != nullptr);
  return p;
}

// Twitter API v1.1 (id_str/user/entities) and v2 (author_id/referenced_tweets).
Post parse_twitter(const json& j) {
  Post p;
  if (member(j, "author_id")) {
    p.post_id = id_string(j.at("id")).value();
    p.user_id = id_string(j.at("author_id")).value();
    if (auto t = member(j, "text")) p.text = t->get<std::string>();
    if (auto refs = member(j, "referenced_tweets")) {
      for (const auto& r : *refs) {
        const auto type = r.value("type", std::string());
        if (type == "retweeted" || type == "quoted") {
          p.reshare_of = id_string(r.at("id")).value();
          p.is_quote = type == "quoted";
          if (type == "retweeted") break;
        }
      }
    }
    const json* tags = path(j, {"entities", "hashtags"});
    if (tags) {
      for (const auto& h : *tags) p.hashtags.push_back(h.value("tag", std::string()));
    }
    if (auto urls = path(j, {"entities", "urls"})) {
      for (const auto& u : *urls) p.urls.push_back(u.value("expanded_url", u.value("url", std::string())));
    }
    const json* mentions = path(j, {"entities", "mentions"});
    if (mentions) {
      for (const auto& m : *mentions) {
        if (auto id = member(m, "id")) p.mentions.push_back(id_string(*id).value());
        else p.mentions.push_back(to_lower(m.value("username", std::string())));
      }
    }
    if (auto ts = member(j, "created_at")) p.timestamp = parse_time(ts->get<std::string>());
    fill_text_derived(p, tags != nullptr, mentions != nullptr);
    return p;
  }
  const json* idv = member(j, "id_str");
  p.post_id = id_string(idv ? *idv : j.at("id")).value();
  const json& user = j.at("user");
  const json* uid = member(user, "id_str");
  p.user_id = id_string(uid ? *uid : user.at("id")).value();
  if (auto t = path(j, {"extended_tweet", "full_text"})) p.text = t->get<std::string>();
  else if (auto t2 = member(j, "full_text")) p.text = t2->get<std::string>();
  else if (auto t3 = member(j, "text")) p.text = t3->get<std::string>();
  if (auto rt = member(j, "retweeted_status")) {
    const json* rid = member(*rt, "id_str");
    p.reshare_of = id_string(rid ? *rid : rt->at("id")).value();
    if (auto ru = member(*rt, "user")) {
      const json* ruid = member(*ru, "id_str");
      if (auto v = id_string(ruid ? *ruid : ru->at("id"))) p.reshare_user_id = v;
    }
  } else if (auto q = member(j, "quoted_status_id_str")) {
    p.reshare_of = id_string(*q).value();
    p.is_quote = true;
    if (auto qu = path(j, {"quoted_status", "user", "id_str"})) p.reshare_user_id = id_string(*qu);
  }
  const json* entities = member(j, "entities");
  const json* tags = entities ? member(*entities, "hashtags") : nullptr;
  if (tags) {
    for (const auto& h : *tags) p.hashtags.push_back(h.value("text", std::string()));
  }
  if (entities) {
    if (auto urls = member(*entities, "urls")) {
      for (const auto& u : *urls) p.urls.push_back(u.value("expanded_url", u.value("url", std::string())));
    }
  }
  const json* mentions = entities ? member(*entities, "user_mentions") : nullptr;
  if (mentions) {
    for (const auto& m : *mentions) {
      const json* mid = member(m, "id_str");
      p.mentions.push_back(id_string(mid ? *mid : m.at("id")).value());
    }
  }
  if (auto ts = member(j, "timestamp_ms")) {
    const auto ms = ts->is_string() ? std::stoll(ts->get<std::string>()) : ts->get<std::int64_t>();
    p.timestamp = ms / 1000;
  }
  fill_text_derived(p, tags != nullptr, mentions != nullptr);
  return p;
}

// Parler dumps: id, creator, body, optional hashtags/urls|links, echo_of|parent, createdAt.
Post parse_parler(const json& j) {
  Post p;
  p.post_id = id_string(j.at("id")).value();
  const json* creator = member(j, "creator");
  p.user_id = id_string(creator ? *creator : j.at("username")).value();
  if (auto b = member(j, "body")) p.text = b->get<std::string>();
  if (auto e = member(j, "echo_of")) p.reshare_of = id_string(*e);
  else if (auto par = member(j, "parent")) {
    p.reshare_of = id_string(*par);
    p.is_quote = !p.text.empty();
  }
  const json* tags = member(j, "hashtags");
  if (tags) p.hashtags = string_list(*tags);
  const json* links = member(j, "urls");
  if (!links) links = member(j, "links");
  if (links) {
    for (const auto& l : *links) {
      if (l.is_string()) p.urls.push_back(l.get<std::string>());
      else if (l.is_object()) p.urls.push_back(l.value("long", l.value("url", std::string())));
    }
  }
  if (auto ts = member(j, "createdAt")) {
    p.timestamp = ts->is_string() ? parse_time(ts->get<std::string>()) : std::optional(ts->get<std::int64_t>());
  }
  fill_text_derived(p, tags != nullptr, false);
  return p;
}

}  // namespace

std::optional<Post> parse_post(std::string_view line, InputFormat format) {
  try {
    const json j = json::parse(line);
    if (!j.is_object()) return std::nullopt;
    Post p;
    switch (format) {
      case InputFormat::Generic: p = parse_generic(j); break;
      case InputFormat::Twitter: p = parse_twitter(j); break;
      case InputFormat::Parler: p = parse_parler(j); break;
    }
    if (p.post_id.empty() || p.user_id.empty()) return std::nullopt;
    if (p.reshare_of && (p.reshare_of->empty() || *p.reshare_of == p.post_id)) return std::nullopt;
    return p;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Aggregation

CorpusBuilder::CorpusBuilder(IngestOptions options) : options_(std::move(options)) {}

void CorpusBuilder::add_line(std::string_view line) {
  if (trim(line).empty()) return;
  ++stats_.lines;
  if (auto p = parse_post(line, options_.format)) {
    posts_.push_back(std::move(*p));
  } else {
    ++stats_.malformed;
  }
}

void CorpusBuilder::add(Post post) {
  ++stats_.lines;
  for (auto& h : post.hashtags) h = normalize_tag(h);
  post.hashtags.erase(std::remove(post.hashtags.begin(), post.hashtags.end(), std::string()),
                      post.hashtags.end());
  if (post.post_id.empty() || post.user_id.empty() ||
      (post.reshare_of && *post.reshare_of == post.post_id)) {
    ++stats_.malformed;
    return;
  }
  posts_.push_back(std::move(post));
}

void CorpusBuilder::merge(CorpusBuilder&& other) {
  stats_.lines += other.stats_.lines;
  stats_.malformed += other.stats_.malformed;
  posts_.insert(posts_.end(), std::make_move_iterator(other.posts_.begin()),
                std::make_move_iterator(other.posts_.end()));
  other.posts_.clear();
  other.stats_ = {};
}

CorpusIndex CorpusBuilder::finish() {
  if (stats_.lines > 0 &&
      static_cast<double>(stats_.malformed) > options_.max_malformed_fraction * static_cast<double>(stats_.lines)) {
    fail(ErrorKind::CorpusQuality, std::to_string(stats_.malformed) + " of " + std::to_string(stats_.lines) +
                                       " lines are malformed");
  }

  auto key = [](const Post& p) {
    return std::tie(p.post_id, p.user_id, p.text, p.reshare_of, p.timestamp, p.hashtags, p.urls);
  };
  std::sort(posts_.begin(), posts_.end(), [&](const Post& a, const Post& b) { return key(a) < key(b); });
  // Keep the first of each post_id under the total order above.
  std::vector<Post> unique;
  unique.reserve(posts_.size());
  for (auto& p : posts_) {
    if (!unique.empty() && unique.back().post_id == p.post_id) {
      ++stats_.duplicates;
      ++stats_.malformed;
      continue;
    }
    unique.push_back(std::move(p));
  }
  posts_.clear();

  std::unordered_map<std::string_view, std::string_view> author;
  author.reserve(unique.size());
  for (const auto& p : unique) author.emplace(p.post_id, p.user_id);

  std::vector<std::size_t> order(unique.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = unique[a];
    const auto& pb = unique[b];
    return std::forward_as_tuple(pa.user_id, pa.timestamp.value_or(0), pa.post_id) <
           std::forward_as_tuple(pb.user_id, pb.timestamp.value_or(0), pb.post_id);
  });

  CorpusIndex index;
  index.dataset_id = options_.dataset_id;
  UserRecord* current = nullptr;
  for (std::size_t idx : order) {
    const Post& p = unique[idx];
    if (!current || current->user_id != p.user_id) {
      current = &index.users[p.user_id];
      current->user_id = p.user_id;
    }
    UserRecord& u = *current;
    ++u.post_count;
    std::string cleaned = clean_text(p.text);
    if (u.post_count > 1) u.concatenated_text.push_back('\n');
    u.concatenated_text += cleaned;
    u.post_texts.push_back(std::move(cleaned));
    for (const auto& h : p.hashtags) ++u.hashtag_counts[h];
    for (auto& d : extract_domains(p.urls, &stats_.dropped_urls)) ++u.shared_domains[d];
    for (const auto& [e, c] : extract_emoji(p.text)) u.emoji_counts[e] += c;
    if (p.reshare_of && !(p.is_quote && options_.exclude_quotes)) {
      u.reshared_post_ids.insert(*p.reshare_of);
      ++index.post_reshare_counts[*p.reshare_of];
      if (p.reshare_user_id) {
        ++u.retweeted_user_ids[*p.reshare_user_id];
      } else if (auto it = author.find(*p.reshare_of); it != author.end()) {
        ++u.retweeted_user_ids[std::string(it->second)];
      }
    }
  }
  return index;
}

CorpusIndex ingest(std::istream& in, const IngestOptions& options, IngestStats* stats) {
  if (!in) fail(ErrorKind::Io, "unreadable post stream");
  CorpusBuilder builder(options);
  std::string line;
  while (std::getline(in, line)) builder.add_line(line);
  if (in.bad()) fail(ErrorKind::Io, "error while reading post stream");
  auto index = builder.finish();
  if (stats) *stats = builder.stats();
  return index;
}

CorpusIndex ingest_file(const std::filesystem::path& path, const IngestOptions& options, IngestStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open posts file: " + path.string());
  auto opts = options;
  if (opts.dataset_id.empty()) opts.dataset_id = path.stem().string();
  return ingest(in, opts, stats);
}

// ---------------------------------------------------------------------------
// Persistence

void write_user_texts(const CorpusIndex& corpus, const std::filesystem::path& path) {
  std::string out;
  for (const auto& [id, u] : corpus.users) {
    out += id;
    out.push_back('\t');
    for (char c : u.concatenated_text) out.push_back(c == '\n' || c == '\t' || c == '\r' ? ' ' : c);
    out.push_back('\n');
  }
  write_file(path, out);
}

void save_corpus(const CorpusIndex& corpus, const std::filesystem::path& path) {
  std::string out;
  json header = {{"dataset_id", corpus.dataset_id}, {"post_reshare_counts", corpus.post_reshare_counts}};
  out += header.dump() + "\n";
  for (const auto& [id, u] : corpus.users) {
    json j = {{"user_id", u.user_id},
              {"post_count", u.post_count},
              {"post_texts", u.post_texts},
              {"hashtag_counts", u.hashtag_counts},
              {"reshared_post_ids", u.reshared_post_ids},
              {"shared_domains", u.shared_domains},
              {"retweeted_user_ids", u.retweeted_user_ids},
              {"emoji_counts", u.emoji_counts}};
    out += j.dump() + "\n";
  }
  write_file(path, out);
}

CorpusIndex load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open corpus file: " + path.string());
  CorpusIndex index;
  std::string line;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      const json j = json::parse(line);
      if (line_no == 1) {
        index.dataset_id = j.at("dataset_id").get<std::string>();
        index.post_reshare_counts = j.at("post_reshare_counts").get<std::map<std::string, std::int64_t>>();
        continue;
      }
      UserRecord u;
      u.user_id = j.at("user_id").get<std::string>();
      u.post_count = j.at("post_count").get<std::int64_t>();
      u.post_texts = j.at("post_texts").get<std::vector<std::string>>();
      for (std::size_t i = 0; i < u.post_texts.size(); ++i) {
        if (i > 0) u.concatenated_text.push_back('\n');
        u.concatenated_text += u.post_texts[i];
      }
      u.hashtag_counts = j.at("hashtag_counts").get<Counts>();
      u.reshared_post_ids = j.at("reshared_post_ids").get<std::set<std::string>>();
      u.shared_domains = j.at("shared_domains").get<Counts>();
      u.retweeted_user_ids = j.at("retweeted_user_ids").get<Counts>();
      u.emoji_counts = j.at("emoji_counts").get<Counts>();
      index.users.emplace(u.user_id, std::move(u));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
  }
  return index;
}

}  // namespace ideo
