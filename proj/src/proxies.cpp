#include "ideo/proxies.hpp"

#include <algorithm>
#include <set>

#include "ideo/common.hpp"

namespace ideo {

std::string_view mode_name(Mode m) { return m == Mode::LeftRight ? "left-right" : "far-right"; }

Mode parse_mode(std::string_view s) {
  if (s == "left-right") return Mode::LeftRight;
  if (s == "far-right") return Mode::FarRight;
  fail(ErrorKind::Config, "unknown mode '" + std::string(s) + "' (left-right|far-right)");
}

std::string_view label_name(Label l) {
  switch (l) {
    case Label::Left: return "left";
    case Label::Neutral: return "neutral";
    case Label::Right: return "right";
    case Label::Moderate: return "moderate";
    case Label::FarRight: return "far-right";
  }
  return "?";
}

Label parse_label(std::string_view s) {
  const auto l = to_lower(trim(s));
  if (l == "left") return Label::Left;
  if (l == "neutral") return Label::Neutral;
  if (l == "right") return Label::Right;
  if (l == "moderate") return Label::Moderate;
  if (l == "far-right" || l == "farright" || l == "far_right") return Label::FarRight;
  fail(ErrorKind::Format, "unknown label '" + std::string(s) + "'");
}

Mode label_mode(Label l) {
  return (l == Label::Moderate || l == Label::FarRight) ? Mode::FarRight : Mode::LeftRight;
}

std::vector<Label> mode_classes(Mode m) {
  if (m == Mode::LeftRight) return {Label::Left, Label::Right};
  return {Label::Moderate, Label::FarRight};
}

std::optional<int> class_index(Mode m, Label l) {
  const auto classes = mode_classes(m);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == l) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::map<Label, std::size_t> SeedLabels::counts() const {
  std::map<Label, std::size_t> c;
  for (const auto& [_, l] : labels) ++c[l];
  return c;
}

SeedLabels SeedLabels::trainable() const {
  SeedLabels out = *this;
  out.labels.clear();
  for (const auto& [u, l] : labels) {
    if (class_index(mode, l)) out.labels.emplace(u, l);
  }
  return out;
}

void finalize_coverage(SeedLabels& seeds, std::size_t corpus_users) {
  for (const auto& [u, l] : seeds.labels) {
    if (label_mode(l) != seeds.mode) {
      fail(ErrorKind::Proxy, "label " + std::string(label_name(l)) + " for user " + u + " in " +
                                 std::string(mode_name(seeds.mode)) + " seeds");
    }
  }
  seeds.coverage = corpus_users == 0 ? 0.0 : static_cast<double>(seeds.labels.size()) / static_cast<double>(corpus_users);
}

Label sign_label(double lean) {
  if (lean < 0.0) return Label::Left;
  if (lean > 0.0) return Label::Right;
  return Label::Neutral;
}

std::optional<double> hashtag_lean(const UserRecord& user, const HashtagCodes& codes) {
  double sum = 0.0;
  std::int64_t n = 0;
  for (const auto& [tag, count] : user.hashtag_counts) {
    auto it = codes.find(tag);
    if (it == codes.end()) continue;
    sum += static_cast<double>(it->second) * static_cast<double>(count);
    n += count;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<double> media_lean(const UserRecord& user, const SlantTable& table) {
  double sum = 0.0;
  std::int64_t n = 0;
  for (const auto& [domain, count] : user.shared_domains) {
    auto it = table.slant.find(domain);
    if (it == table.slant.end()) continue;
    sum += it->second * static_cast<double>(count);
    n += count;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

SeedLabels hashtag_proxy(const CorpusIndex& corpus, const HashtagCodes& codes) {
  if (codes.empty()) fail(ErrorKind::Proxy, "hashtag codes are empty");
  SeedLabels s{Mode::LeftRight, std::string(kProxyHashtags), {}, 0.0, false};
  for (const auto& [id, u] : corpus.users) {
    if (auto lean = hashtag_lean(u, codes)) s.labels.emplace(id, sign_label(*lean));
  }
  finalize_coverage(s, corpus.n_users());
  return s;
}

SeedLabels party_follower_proxy(const CorpusIndex& corpus, const PartyRoster& roster) {
  if (roster.party_label.empty()) fail(ErrorKind::Proxy, "party roster is empty");
  std::map<std::string, std::set<std::string>> followed;  // user -> parties
  for (const auto& [party, users] : roster.followers) {
    if (!roster.party_label.count(party)) fail(ErrorKind::Proxy, "follower list for unknown party " + party);
    for (const auto& u : users) followed[u].insert(party);
  }
  SeedLabels s{Mode::LeftRight, std::string(kProxyPartyFollowers), {}, 0.0, false};
  for (const auto& [user, parties] : followed) {
    if (parties.size() != 1 || !corpus.find(user)) continue;
    s.labels.emplace(user, roster.party_label.at(*parties.begin()));
  }
  finalize_coverage(s, corpus.n_users());
  return s;
}

SeedLabels politician_endorser_proxy(const CorpusIndex& corpus, const PoliticianRoster& roster) {
  if (roster.empty()) fail(ErrorKind::Proxy, "politician roster is empty");
  SeedLabels s{Mode::LeftRight, std::string(kProxyPoliticianEndorsers), {}, 0.0, false};
  for (const auto& [id, u] : corpus.users) {
    std::int64_t left = 0, right = 0;
    for (const auto& [target, count] : u.retweeted_user_ids) {
      auto it = roster.find(target);
      if (it == roster.end()) continue;
      (it->second == Label::Left ? left : right) += count;
    }
    if (left > right) s.labels.emplace(id, Label::Left);
    else if (right > left) s.labels.emplace(id, Label::Right);
  }
  finalize_coverage(s, corpus.n_users());
  return s;
}

SeedLabels mpp_left_right(const CorpusIndex& corpus, const SlantTable& table) {
  if (table.empty()) fail(ErrorKind::Proxy, "slant table is empty");
  SeedLabels s{Mode::LeftRight, std::string(kProxyLeftRightMpp), {}, 0.0, false};
  for (const auto& [id, u] : corpus.users) {
    if (auto lean = media_lean(u, table)) s.labels.emplace(id, sign_label(*lean));
  }
  finalize_coverage(s, corpus.n_users());
  return s;
}

SeedLabels mpp_far_right(const CorpusIndex& corpus, const SlantTable& table, double threshold) {
  if (table.empty()) fail(ErrorKind::Proxy, "slant table is empty");
  SeedLabels s{Mode::FarRight, std::string(kProxyFarRightMpp), {}, 0.0, false};
  for (const auto& [id, u] : corpus.users) {
    if (auto lean = media_lean(u, table)) s.labels.emplace(id, *lean > threshold ? Label::FarRight : Label::Moderate);
  }
  finalize_coverage(s, corpus.n_users());
  return s;
}

SeedLabels mbfc_far_right(const CorpusIndex& corpus, const MbfcClasses& mbfc) {
  if (mbfc.empty()) fail(ErrorKind::Proxy, "MBFC class table is empty");
  SeedLabels s{Mode::FarRight, std::string(kProxyMbfcMpp), {}, 0.0, false};
  for (const auto& [id, u] : corpus.users) {
    bool any = false, right = false;
    for (const auto& [domain, _] : u.shared_domains) {
      auto it = mbfc.find(domain);
      if (it == mbfc.end()) continue;
      any = true;
      right = right || it->second == "right";
    }
    if (right) s.labels.emplace(id, Label::FarRight);
    else if (any) s.labels.emplace(id, Label::Moderate);
  }
  finalize_coverage(s, corpus.n_users());
  return s;
}

// ---------------------------------------------------------------------------

SeedLabels load_gold(const std::filesystem::path& path, Mode mode) {
  const auto t = read_table(path, ',');
  const std::string src = path.string();
  const auto c_user = t.column("user_id", src);
  const auto c_label = t.column("label", src);
  SeedLabels s{mode, "gold", {}, 0.0, true};
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string ctx = src + ":" + std::to_string(t.line_numbers[i]);
    const auto& row = t.rows[i];
    const std::string token = to_lower(row.at(c_label));
    if (token == "indeterminable" || token == "unknown") continue;
    Label l;
    try {
      l = parse_label(token);
    } catch (const Error&) {
      fail(ErrorKind::Format, ctx + ": unknown gold label '" + row.at(c_label) + "'");
    }
    if (mode == Mode::FarRight && (l == Label::Left || l == Label::Right)) l = Label::Moderate;
    if (label_mode(l) != mode) {
      warn(ctx + ": label '" + token + "' does not belong to " + std::string(mode_name(mode)) + " mode; row dropped");
      continue;
    }
    s.labels[row.at(c_user)] = l;
  }
  s.coverage = 1.0;
  return s;
}

GoldSplit split_gold(const SeedLabels& gold, std::uint64_t seed) {
  std::map<Label, std::vector<std::string>> by_class;
  for (const auto& [u, l] : gold.labels) by_class[l].push_back(u);
  GoldSplit out{gold, gold};
  out.validation.labels.clear();
  out.test.labels.clear();
  for (auto& [label, users] : by_class) {
    Rng rng(mix_seed(seed, {static_cast<std::uint64_t>(label)}));
    rng.shuffle(users.begin(), users.end());
    const std::size_t half = (users.size() + 1) / 2;
    for (std::size_t i = 0; i < users.size(); ++i) {
      (i < half ? out.validation : out.test).labels.emplace(users[i], label);
    }
  }
  return out;
}

HashtagCodes load_hashtag_codes(const std::filesystem::path& path) {
  const auto t = read_table(path, ',');
  const std::string src = path.string();
  const auto c_tag = t.column("hashtag", src);
  const auto c_code = t.column("code", src);
  HashtagCodes codes;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string ctx = src + ":" + std::to_string(t.line_numbers[i]);
    std::string tag = to_lower(t.rows[i].at(c_tag));
    while (!tag.empty() && tag.front() == '#') tag.erase(0, 1);
    const auto code = parse_int(t.rows[i].at(c_code), ctx);
    if (code < -1 || code > 1) fail(ErrorKind::Format, ctx + ": hashtag code must be -1, 0 or 1");
    codes[tag] = static_cast<int>(code);
  }
  return codes;
}

PartyRoster load_party_roster(const std::filesystem::path& path) {
  const auto t = read_table(path, ',');
  const std::string src = path.string();
  const auto c_party = t.column("party", src);
  const auto c_label = t.column("label", src);
  const auto c_file = t.column("followers_file", src);
  PartyRoster roster;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string ctx = src + ":" + std::to_string(t.line_numbers[i]);
    const auto& row = t.rows[i];
    const Label l = parse_label(row.at(c_label));
    if (l != Label::Left && l != Label::Right) fail(ErrorKind::Format, ctx + ": party label must be left or right");
    roster.party_label[row.at(c_party)] = l;
    const auto followers_path = path.parent_path() / row.at(c_file);
    const std::string text = read_file(followers_path);
    auto& list = roster.followers[row.at(c_party)];
    for (const auto& line : split(text, '\n')) {
      auto id = trim(line);
      if (!id.empty() && id.front() != '#') list.emplace_back(id);
    }
  }
  return roster;
}

PoliticianRoster load_politicians(const std::filesystem::path& path) {
  const auto t = read_table(path, ',');
  const std::string src = path.string();
  const auto c_user = t.column("user_id", src);
  const auto c_label = t.column("label", src);
  PoliticianRoster roster;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string token = to_lower(t.rows[i].at(c_label));
    if (token == "independent") continue;
    const Label l = parse_label(token);
    if (l != Label::Left && l != Label::Right) {
      fail(ErrorKind::Format, src + ":" + std::to_string(t.line_numbers[i]) + ": politician label must be left, right or independent");
    }
    roster[t.rows[i].at(c_user)] = l;
  }
  return roster;
}

MbfcClasses load_mbfc(const std::filesystem::path& path) {
  const auto t = read_table(path, ',');
  const std::string src = path.string();
  const auto c_domain = t.column("domain", src);
  const auto c_class = t.column("class", src);
  MbfcClasses out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    std::string domain = to_lower(t.rows[i].at(c_domain));
    if (auto reg = registrable_domain(domain.find("://") == std::string::npos ? "http://" + domain : domain)) {
      domain = *reg;
    }
    out[domain] = to_lower(t.rows[i].at(c_class));
  }
  return out;
}

void save_seeds(const SeedLabels& seeds, const std::filesystem::path& path) {
  std::string out = "user_id\tlabel\tproxy\n";
  for (const auto& [u, l] : seeds.labels) {
    out += u + "\t" + std::string(label_name(l)) + "\t" + seeds.proxy_name + "\n";
  }
  write_file(path, out);
}

SeedLabels load_seeds(const std::filesystem::path& path) {
  const auto t = read_table(path, '\t');
  const std::string src = path.string();
  const auto c_user = t.column("user_id", src);
  const auto c_label = t.column("label", src);
  const auto c_proxy = t.column("proxy", src);
  SeedLabels s;
  bool first = true;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const Label l = parse_label(row.at(c_label));
    if (first) {
      s.mode = label_mode(l);
      s.proxy_name = row.at(c_proxy);
      first = false;
    } else if (label_mode(l) != s.mode) {
      fail(ErrorKind::Format, src + ":" + std::to_string(t.line_numbers[i]) + ": seeds mix left-right and far-right labels");
    }
    s.labels[row.at(c_user)] = l;
  }
  s.gold = s.proxy_name == "gold";
  return s;
}

}  // namespace ideo
