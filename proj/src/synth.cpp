#include "ideo/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "ideo/common.hpp"
#include "json.hpp"

namespace ideo {

namespace {

// Dictionary vocabulary shared with the emitted mft / grievance / cds files.
const std::array<std::array<std::vector<std::string>, 2>, 5> kMoralWords = {{
    {{{"care", "protect", "compassion", "kindness", "nurture"}, {"harm", "hurt", "cruel", "suffer", "abuse"}}},
    {{{"fair", "equal", "justice", "rights", "honest"}, {"cheat", "unfair", "fraud", "bias", "rigged"}}},
    {{{"loyal", "nation", "patriot", "together", "solidarity"}, {"betray", "traitor", "disloyal", "enemy", "deserter"}}},
    {{{"law", "order", "respect", "tradition", "duty"}, {"chaos", "rebel", "defy", "riot", "disobey"}}},
    {{{"pure", "sacred", "holy", "clean", "faith"}, {"disgust", "filth", "sin", "dirty", "corrupt"}}},
}};

const std::vector<std::pair<std::string, std::string>> kGrievanceWords = {
    {"kill", "violence"},   {"attack", "violence"},   {"destroy", "violence"},  {"fight", "violence"},
    {"conspiracy", "paranoia"}, {"spy", "paranoia"}, {"watching", "paranoia"}, {"plot", "paranoia"},
    {"obsessed", "fixation"}, {"relentless", "fixation"}, {"grudge", "fixation"}, {"revenge", "fixation"},
    {"humiliate", "honour"}, {"shame", "honour"},      {"pride", "honour"},      {"insult", "honour"},
};

const std::vector<std::pair<std::string, std::string>> kCdsNgrams = {
    {"all or nothing", "dichotomous"},   {"black and white", "dichotomous"}, {"either you are", "dichotomous"},
    {"totally", "dichotomous"},          {"everyone knows", "overgeneralizing"}, {"no one ever", "overgeneralizing"},
    {"always happens", "overgeneralizing"}, {"the worst", "catastrophizing"}, {"end of the world", "catastrophizing"},
    {"i should have", "should statements"},
};

const std::vector<std::string> kEmoji = {
    "\xF0\x9F\x98\x82",                  // face with tears of joy
    "\xE2\x9D\xA4\xEF\xB8\x8F",          // red heart
    "\xF0\x9F\x94\xA5",                  // fire
    "\xF0\x9F\x99\x8F",                  // folded hands
    "\xF0\x9F\x98\xA1",                  // pouting face
    "\xF0\x9F\x87\xA6\xF0\x9F\x87\xBA",  // flag AU
    "\xF0\x9F\x87\xBA\xF0\x9F\x87\xB8",  // flag US
    "\xF0\x9F\x8C\x88",                  // rainbow
};

enum Cls : int { kLeft = 0, kNeutral = 1, kRight = 2, kFar = 3, kCommon = 4 };

Label cls_label(int c) {
  switch (c) {
    case kLeft: return Label::Left;
    case kNeutral: return Label::Neutral;
    case kRight: return Label::Right;
    default: return Label::FarRight;
  }
}

// Per-profile emoji weights; index kCommon is the class-free profile.
const std::array<std::vector<double>, 5> kEmojiWeights = {{
    {3, 3, 1, 1, 1, 0.3, 0.3, 3},
    {3, 2, 1, 1, 1, 1, 1, 1},
    {2, 1, 2, 2, 2, 2, 2, 0.3},
    {1, 0.5, 3, 2, 4, 6, 4, 0.1},
    {2.25, 1.6, 1.75, 1.5, 2, 2.3, 1.8, 1.1},
}};
const std::array<double, 5> kEmojiRate = {0.3, 0.25, 0.3, 0.45, 0.32};
const std::array<double, 5> kCdsRate = {0.10, 0.08, 0.12, 0.25, 0.13};
const std::array<double, 5> kGrievanceRate = {0.02, 0.02, 0.03, 0.07, 0.035};
const std::array<std::array<double, 5>, 5> kFoundationWeights = {{
    {0.35, 0.35, 0.1, 0.1, 0.1},
    {0.2, 0.2, 0.2, 0.2, 0.2},
    {0.1, 0.1, 0.25, 0.3, 0.25},
    {0.05, 0.05, 0.3, 0.3, 0.3},
    {0.2, 0.2, 0.2, 0.2, 0.2},
}};
constexpr double kMoralRate = 0.12;
// Class-free link sharing leans to centre outlets: left, centre, right, far-right.
const std::vector<double> kCommonDomainMix = cumulative({0.2, 0.5, 0.2, 0.1});
// Class-free hashtags: left, shared, right, far-right pools.
const std::vector<double> kCommonTagMix = cumulative({0.12, 0.7, 0.12, 0.06});
constexpr double kVirtueShare = 0.7;

std::string pool_word(char cls, int corpus, std::size_t i) {
  // corpus < 0 is the common pool shared by every corpus of the world.
  return corpus < 0 ? std::string(1, cls) + "w" + std::to_string(i)
                    : "c" + std::to_string(corpus) + std::string(1, cls) + "w" + std::to_string(i);
}

Eigen::VectorXd unit_direction(std::uint64_t seed, int dim) {
  Rng rng(seed);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.normal();
  return v.normalized();
}

struct World {
  std::vector<std::string> words;
  std::vector<Eigen::VectorXd> vectors;

  void add(const std::string& w, const Eigen::VectorXd& direction, double strength, double noise, std::uint64_t seed) {
    Rng rng(mix_seed(seed, {hash_string(w)}));
    Eigen::VectorXd v = strength * direction;
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += noise * rng.normal() / std::sqrt(static_cast<double>(v.size()));
    words.push_back(w);
    vectors.push_back(v);
  }
};

std::string fmt_label(Label l) { return std::string(label_name(l)); }

}  // namespace

void SynthConfig::validate() const {
  const auto check = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::Config, "synth: " + what);
  };
  check(n_users >= 10, "n_users must be at least 10");
  check(prior_left >= 0 && prior_neutral >= 0 && prior_right >= 0, "priors must be nonnegative");
  check(std::abs(prior_left + prior_neutral + prior_right - 1.0) < 1e-9, "priors must sum to 1");
  const auto unit = [&](double v, const char* name) { check(v >= 0.0 && v <= 1.0, std::string(name) + " must lie in [0, 1]"); };
  unit(far_right_fraction, "far_right_fraction");
  unit(class_signal, "class_signal");
  unit(homophily, "homophily");
  unit(share_fraction, "share_fraction");
  unit(context_shift, "context_shift");
  unit(party_follow_rate, "party_follow_rate");
  check(corpus_index >= 0, "corpus_index must be nonnegative");
  check(vocab_per_class > 0 && shared_vocab > 0, "vocabulary is empty");
  check(hashtags_per_class > 0 && shared_hashtags > 0, "hashtag vocabulary is empty");
  check(domains_per_class > 0, "domain list is empty");
  check(tokens_per_post > 0, "tokens_per_post must be positive");
  check(posts_per_user > 0 && reshares_per_user >= 0, "post rates must be positive");
  check(influencers_per_class > 0, "influencers_per_class must be positive");
  check(politicians_per_side <= influencers_per_class, "politicians are drawn from influencers");
  check(word_dim >= 2, "word_dim must be at least 2");
}

CorpusIndex SynthCorpus::index() const {
  IngestOptions opt;
  opt.dataset_id = config.dataset_id;
  CorpusBuilder b(opt);
  for (const auto& p : posts) b.add(p);
  return b.finish();
}

std::map<std::string, Label> left_right_truth(const std::map<std::string, Label>& truth) {
  std::map<std::string, Label> out;
  for (const auto& [u, l] : truth) {
    if (l == Label::Left) out.emplace(u, Label::Left);
    if (l == Label::Right || l == Label::FarRight) out.emplace(u, Label::Right);
  }
  return out;
}

SynthCorpus generate(const SynthConfig& cfg) {
  cfg.validate();
  SynthCorpus out;
  out.config = cfg;
  const int dim = cfg.word_dim;
  const std::uint64_t ws = cfg.world_seed;
  const int ci = cfg.corpus_index;

  // --- vocabulary and vectors -------------------------------------------------
  // Class pools: l (left), r (right), f (far-right); s is the shared pool.
  World world;
  const auto dir_left = unit_direction(mix_seed(ws, {1}), dim);
  const auto dir_far = unit_direction(mix_seed(ws, {2}), dim);
  const auto own_left = unit_direction(mix_seed(ws, {3, static_cast<std::uint64_t>(ci)}), dim);
  const auto own_far = unit_direction(mix_seed(ws, {4, static_cast<std::uint64_t>(ci)}), dim);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dim);
  const std::uint64_t vec_seed = mix_seed(ws, {5});
  for (std::size_t i = 0; i < cfg.vocab_per_class; ++i) {
    world.add(pool_word('l', -1, i), dir_left, 1.0, 1.0, vec_seed);
    world.add(pool_word('r', -1, i), -dir_left, 1.0, 1.0, vec_seed);
    world.add(pool_word('f', -1, i), Eigen::VectorXd(-dir_left + dir_far), 1.0, 1.0, vec_seed);
    if (cfg.context_shift > 0.0) {
      world.add(pool_word('l', ci, i), own_left, 1.0, 1.0, vec_seed);
      world.add(pool_word('r', ci, i), -own_left, 1.0, 1.0, vec_seed);
      world.add(pool_word('f', ci, i), Eigen::VectorXd(-own_left + own_far), 1.0, 1.0, vec_seed);
    }
  }
  for (std::size_t i = 0; i < cfg.shared_vocab; ++i) world.add(pool_word('s', -1, i), zero, 0.0, 1.0, vec_seed);
  for (int f = 0; f < 5; ++f) {
    const auto d = unit_direction(mix_seed(ws, {6, static_cast<std::uint64_t>(f)}), dim);
    for (const auto& w : kMoralWords[static_cast<std::size_t>(f)][0]) world.add(w, d, 1.0, 0.5, vec_seed);
    for (const auto& w : kMoralWords[static_cast<std::size_t>(f)][1]) world.add(w, Eigen::VectorXd(-d), 1.0, 0.5, vec_seed);
  }
  std::set<std::string> extra;
  for (const auto& [w, c] : kGrievanceWords) extra.insert(w);
  for (const auto& [g, d] : kCdsNgrams)
    for (const auto& t : word_tokens(g)) extra.insert(t);
  for (const auto& w : extra) world.add(w, zero, 0.0, 1.0, vec_seed);
  {
    WordVectors::Matrix m(static_cast<Eigen::Index>(world.words.size()), dim);
    for (std::size_t i = 0; i < world.words.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = world.vectors[i].transpose();
    out.word_vectors = WordVectors(world.words, m);
  }

  // --- domains and slants -----------------------------------------------------
  std::array<std::vector<std::string>, 4> domains;  // left, center, right, far-right
  {
    Rng rng(mix_seed(ws, {7}));
    const std::array<const char*, 4> stem = {"leftpost", "centrewire", "rightherald", "patriotdaily"};
    const std::array<std::pair<double, double>, 4> range = {{{-1.0, -0.15}, {-0.1, 0.1}, {0.15, 0.5}, {0.55, 1.0}}};
    const std::array<const char*, 4> mbfc = {"left", "center", "right-center", "right"};
    for (std::size_t k = 0; k < 4; ++k) {
      for (std::size_t i = 0; i < cfg.domains_per_class; ++i) {
        const std::string d = stem[k] + std::to_string(i) + ".com";
        domains[k].push_back(d);
        const double s = std::round(rng.uniform(range[k].first, range[k].second) * 1e6) / 1e6;
        out.slants.slant[d] = s;
        out.slants.n_cells[d] = 1;
        out.mbfc[d] = (k == 0 && i % 2) ? "left-center" : mbfc[k];
      }
    }
  }

  // --- hashtags -----------------------------------------------------------------
  std::array<std::vector<std::string>, 4> tags;  // left, shared, right, far-right
  {
    const std::array<const char*, 4> stem = {"progress", "news", "freedom", "reclaim"};
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t n = k == 1 ? cfg.shared_hashtags : cfg.hashtags_per_class;
      for (std::size_t i = 0; i < n; ++i) {
        // Corpus-specific hashtags under context shift.
        const std::string t = stem[k] + std::to_string(i) + (cfg.context_shift > 0.0 && k != 1 ? "c" + std::to_string(ci) : "");
        tags[k].push_back(t);
        if (i % 2 == 0) out.hashtag_codes[t] = k == 0 ? -1 : k == 1 ? 0 : 1;
      }
    }
  }

  // --- users --------------------------------------------------------------------
  Rng rng(mix_seed(cfg.rng_seed, {hash_string(cfg.dataset_id), static_cast<std::uint64_t>(ci)}));
  const auto priors = cumulative({cfg.prior_left, cfg.prior_neutral, cfg.prior_right});
  const std::size_t width = std::to_string(cfg.n_users).size();
  std::vector<std::string> ids(cfg.n_users);
  std::vector<int> cls(cfg.n_users);
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    std::string num = std::to_string(u);
    ids[u] = cfg.dataset_id + "_u" + std::string(width - num.size(), '0') + num;
    int c = static_cast<int>(rng.categorical(priors));
    if (c == 1) c = kNeutral;
    else if (c == 2) c = rng.bernoulli(cfg.far_right_fraction) ? kFar : kRight;
    cls[u] = c;
    out.truth[ids[u]] = cls_label(c);
  }

  const auto profile = [&](int c) { return rng.bernoulli(cfg.class_signal) ? c : static_cast<int>(kCommon); };
  const auto pick = [&](const std::vector<std::string>& v) -> const std::string& { return v[rng.below(v.size())]; };
  const auto class_word = [&](int c) {
    const bool own = cfg.context_shift > 0.0 && rng.bernoulli(cfg.context_shift);
    const int pool = own ? ci : -1;
    const auto i = rng.below(cfg.vocab_per_class);
    switch (c) {
      case kLeft: return pool_word('l', pool, i);
      case kRight: return pool_word('r', pool, i);
      case kFar: return rng.bernoulli(0.5) ? pool_word('f', pool, i) : pool_word('r', pool, i);
      default: return pool_word('s', -1, rng.below(cfg.shared_vocab));
    }
  };

  std::int64_t clock = 1600000000;
  std::size_t post_serial = 0;
  const auto new_post = [&](std::size_t u) {
    Post p;
    p.user_id = ids[u];
    p.post_id = cfg.dataset_id + "_p" + std::to_string(post_serial++);
    p.timestamp = clock;
    clock += 37;
    return p;
  };

  // Original posts.
  std::vector<std::vector<std::size_t>> user_posts(cfg.n_users);
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    const int c = cls[u];
    const auto n_posts = 1 + rng.poisson(cfg.posts_per_user - 1.0 > 0 ? cfg.posts_per_user - 1.0 : 0.0);
    for (std::uint64_t k = 0; k < n_posts; ++k) {
      Post p = new_post(u);
      const int pc = profile(c);  // post-level profile: moral, grievance, cds, emoji
      std::string text;
      for (int t = 0; t < cfg.tokens_per_post; ++t) {
        std::string w;
        const double r = rng.uniform();
        if (r < kMoralRate) {
          const auto f = rng.categorical(cumulative(std::vector<double>(kFoundationWeights[static_cast<std::size_t>(pc)].begin(),
                                                                      kFoundationWeights[static_cast<std::size_t>(pc)].end())));
          const int pole = rng.bernoulli(kVirtueShare) ? 0 : 1;
          w = pick(kMoralWords[f][static_cast<std::size_t>(pole)]);
        } else if (r < kMoralRate + kGrievanceRate[static_cast<std::size_t>(pc)]) {
          w = kGrievanceWords[rng.below(kGrievanceWords.size())].first;
        } else {
          w = class_word(profile(c) == kCommon ? static_cast<int>(kNeutral) : c);
        }
        if (!text.empty()) text += ' ';
        text += w;
      }
      if (rng.bernoulli(kCdsRate[static_cast<std::size_t>(pc)])) text += ' ' + kCdsNgrams[rng.below(kCdsNgrams.size())].first;
      const auto n_tags = rng.categorical(cumulative({0.5, 0.35, 0.15}));
      for (std::size_t h = 0; h < n_tags; ++h) {
        const int tc = profile(c);
        const auto& pool = tc == kLeft    ? tags[0]
                           : tc == kRight ? tags[2]
                           : tc == kFar   ? (rng.bernoulli(0.5) ? tags[3] : tags[2])
                                          : tags[rng.categorical(kCommonTagMix)];
        const auto& t = pick(pool);
        p.hashtags.push_back(t);
        text += " #" + t;
      }
      if (rng.bernoulli(kEmojiRate[static_cast<std::size_t>(pc)])) {
        const auto& wts = kEmojiWeights[static_cast<std::size_t>(pc)];
        text += ' ' + kEmoji[rng.categorical(cumulative(wts))];
      }
      p.text = text;
      user_posts[u].push_back(out.posts.size());
      out.posts.push_back(std::move(p));
    }
  }

  // Domain sharing: a subset of users attach news links to some of their posts.
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    if (!rng.bernoulli(cfg.share_fraction)) continue;
    const auto n_links = 1 + rng.poisson(1.5);
    for (std::uint64_t k = 0; k < n_links; ++k) {
      const int dc = profile(cls[u]);
      const std::vector<std::string>* pool = nullptr;
      switch (dc) {
        case kLeft: pool = &domains[0]; break;
        case kNeutral: pool = &domains[1]; break;
        case kRight: pool = &domains[2]; break;
        case kFar: pool = rng.bernoulli(0.6) ? &domains[3] : &domains[2]; break;
        default: pool = &domains[rng.categorical(kCommonDomainMix)]; break;
      }
      auto& post = out.posts[user_posts[u][rng.below(user_posts[u].size())]];
      post.urls.push_back("https://www." + pick(*pool) + "/story/" + std::to_string(rng.below(100000)));
    }
  }

  // Influencers: the first users of each class; their original posts are the reshare pool.
  std::array<std::vector<std::size_t>, 4> influencers;
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    auto& v = influencers[static_cast<std::size_t>(cls[u])];
    if (v.size() < cfg.influencers_per_class) v.push_back(u);
  }
  std::array<std::vector<std::size_t>, 4> pool_posts;
  std::vector<std::size_t> all_pool;
  for (std::size_t c = 0; c < 4; ++c) {
    for (auto u : influencers[c])
      for (auto p : user_posts[u]) pool_posts[c].push_back(p);
    all_pool.insert(all_pool.end(), pool_posts[c].begin(), pool_posts[c].end());
  }
  for (std::size_t side = 0; side < 2; ++side) {
    const auto& inf = influencers[side == 0 ? kLeft : kRight];
    for (std::size_t i = 0; i < cfg.politicians_per_side && i < inf.size(); ++i)
      out.politicians[ids[inf[i]]] = side == 0 ? Label::Left : Label::Right;
  }

  // Reshares.
  const std::size_t n_original = out.posts.size();
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    const auto n = rng.poisson(cfg.reshares_per_user);
    for (std::uint64_t k = 0; k < n; ++k) {
      const auto& own = pool_posts[static_cast<std::size_t>(cls[u])];
      const auto& pool = (rng.bernoulli(cfg.homophily) && !own.empty()) ? own : all_pool;
      if (pool.empty()) continue;
      // Skewed popularity: early pool posts are reshared more.
      const double x = rng.uniform();
      const auto idx = std::min(pool.size() - 1, static_cast<std::size_t>(x * x * static_cast<double>(pool.size())));
      const auto target = pool[idx];
      if (target >= n_original) continue;
      const Post& src = out.posts[target];
      if (src.user_id == ids[u]) continue;
      Post p = new_post(u);
      p.reshare_of = src.post_id;
      p.reshare_user_id = src.user_id;
      out.posts.push_back(std::move(p));
    }
  }

  // Party followers.
  out.parties.party_label = {{"party_left", Label::Left}, {"party_right", Label::Right}};
  out.parties.followers = {{"party_left", {}}, {"party_right", {}}};
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    if (!rng.bernoulli(cfg.party_follow_rate)) continue;
    const int pc = profile(cls[u]);
    std::string party;
    if (pc == kLeft) party = "party_left";
    else if (pc == kRight || pc == kFar) party = "party_right";
    else party = rng.bernoulli(0.5) ? "party_left" : "party_right";
    out.parties.followers[party].push_back(ids[u]);
  }

  // Survey readership consistent with the planted slants.
  {
    Rng srng(mix_seed(ws, {8}));
    std::vector<std::string> pubs;
    for (const auto& [d, s] : out.slants.slant) {
      const std::string pub = d.substr(0, d.find('.'));
      pubs.push_back(pub);
      out.pubmap.emplace(pub, d);
    }
    std::size_t pid = 0;
    for (int year : {2020, 2021}) {
      for (std::size_t i = 0; i < cfg.survey_participants; ++i) {
        SurveyRecord r;
        r.participant_id = "p" + std::to_string(pid++);
        r.country = "XX";
        r.year = year;
        r.self_lean = static_cast<int>(srng.below(7)) - 3;
        std::vector<double> w;
        for (const auto& [d, s] : out.slants.slant) w.push_back(std::exp(-2.0 * std::abs(3.0 * s - r.self_lean)));
        const auto cum = cumulative(w);
        std::set<std::string> chosen;
        while (chosen.size() < 3) chosen.insert(pubs[srng.categorical(cum)]);
        r.publications.assign(chosen.begin(), chosen.end());
        out.survey.push_back(std::move(r));
      }
    }
    for (std::size_t k = 0; k < 4; ++k) {
      for (std::size_t i = 0; i < 2 && i < domains[k].size(); ++i) {
        const auto& d = domains[k][i];
        const double rating = std::clamp(std::round(out.slants.slant.at(d) * 2.0) / 2.0, -1.0, 1.0);
        out.anchors.push_back({d.substr(0, d.find('.')), rating});
      }
    }
  }

  // Gold annotations on a random user sample.
  {
    std::vector<std::size_t> order(cfg.n_users);
    for (std::size_t u = 0; u < cfg.n_users; ++u) order[u] = u;
    rng.shuffle(order.begin(), order.end());
    for (std::size_t k = 0; k < order.size() && out.gold.size() < cfg.gold_size; ++k) {
      const auto u = order[k];
      if (cls[u] == kNeutral) continue;
      out.gold[ids[u]] = rng.bernoulli(0.05) ? "indeterminable" : fmt_label(cls_label(cls[u]));
    }
  }
  return out;
}

std::string post_json(const Post& p) {
  nlohmann::json j;
  j["post_id"] = p.post_id;
  j["user_id"] = p.user_id;
  j["text"] = p.text;
  if (p.timestamp) j["timestamp"] = *p.timestamp;
  if (!p.hashtags.empty()) j["hashtags"] = p.hashtags;
  if (!p.urls.empty()) j["urls"] = p.urls;
  if (!p.mentions.empty()) j["mentions"] = p.mentions;
  if (p.reshare_of) j["reshare_of"] = *p.reshare_of;
  if (p.reshare_user_id) j["reshare_user_id"] = *p.reshare_user_id;
  if (p.is_quote) j["is_quote"] = true;
  return j.dump();
}

void write_synth(const SynthCorpus& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::string s;
    for (const auto& p : c.posts) s += post_json(p) + "\n";
    write_file(dir / "posts.jsonl", s);
  }
  {
    std::string s = "user_id,label\n";
    for (const auto& [u, l] : c.truth) s += u + "," + fmt_label(l) + "\n";
    write_file(dir / "truth.csv", s);
  }
  {
    std::string s = "user_id,label\n", lr = "user_id,label\n";
    for (const auto& [u, l] : c.gold) {
      s += u + "," + l + "\n";
      lr += u + "," + (l == "far-right" ? std::string("right") : l) + "\n";
    }
    write_file(dir / "gold.csv", s);
    write_file(dir / "gold_left_right.csv", lr);
  }
  c.word_vectors.save(dir / "wordvecs.txt");
  save_slant_table(c.slants, dir / "slants.tsv");
  {
    std::string s = "participant_id,country,year,self_lean,pub_ids\n";
    for (const auto& r : c.survey) {
      s += r.participant_id + "," + r.country + "," + std::to_string(r.year) + "," + std::to_string(r.self_lean) + ",";
      for (std::size_t i = 0; i < r.publications.size(); ++i) s += (i ? ";" : "") + r.publications[i];
      s += "\n";
    }
    write_file(dir / "survey.csv", s);
    std::string a = "pub_id,rating\n";
    for (const auto& r : c.anchors) a += r.publication + "," + format_fixed(r.rating, 1) + "\n";
    write_file(dir / "anchors.csv", a);
    std::string m = "pub_id,domain\n";
    for (const auto& [p, d] : c.pubmap) m += p + "," + d + "\n";
    write_file(dir / "pubmap.csv", m);
  }
  {
    std::string s = "domain,class\n";
    for (const auto& [d, k] : c.mbfc) s += d + "," + k + "\n";
    write_file(dir / "mbfc.csv", s);
    std::string h = "hashtag,code\n";
    for (const auto& [t, k] : c.hashtag_codes) h += t + "," + std::to_string(k) + "\n";
    write_file(dir / "hashtag_codes.csv", h);
  }
  {
    std::string r = "party,label,followers_file\n";
    for (const auto& [party, label] : c.parties.party_label) {
      const std::string file = "followers_" + party + ".txt";
      r += party + "," + fmt_label(label) + "," + file + "\n";
      std::string f;
      auto it = c.parties.followers.find(party);
      if (it != c.parties.followers.end())
        for (const auto& u : it->second) f += u + "\n";
      write_file(dir / file, f);
    }
    write_file(dir / "party_roster.csv", r);
    std::string p = "user_id,label\n";
    for (const auto& [u, l] : c.politicians) p += u + "," + fmt_label(l) + "\n";
    write_file(dir / "politicians.csv", p);
  }
  {
    static const std::array<const char*, 5> names = {"care", "fairness", "loyalty", "authority", "sanctity"};
    std::string m = "word\tfoundation\tpole\n";
    for (std::size_t f = 0; f < 5; ++f)
      for (int pole = 0; pole < 2; ++pole)
        for (const auto& w : kMoralWords[f][static_cast<std::size_t>(pole)])
          m += w + "\t" + names[f] + "\t" + (pole == 0 ? "virtue" : "vice") + "\n";
    write_file(dir / "mft_dictionary.tsv", m);
    std::string g = "word\tcategory\tweight\n";
    for (const auto& [w, cat] : kGrievanceWords) g += w + "\t" + cat + "\t1.0\n";
    write_file(dir / "grievance.tsv", g);
    std::string d = "ngram\tdistortion\n";
    for (const auto& [n, k] : kCdsNgrams) d += n + "\t" + k + "\n";
    write_file(dir / "cds.tsv", d);
  }
}

SynthConfig synth_config_from_json(const std::string& text, SynthConfig c) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, std::string("synth config: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::Format, "synth config: expected a JSON object");
  std::set<std::string> seen;
  const auto get = [&](const char* key, auto& field) {
    seen.insert(key);
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Config, std::string("synth config: bad value for ") + key + ": " + e.what());
    }
  };
  get("n_users", c.n_users);
  get("prior_left", c.prior_left);
  get("prior_neutral", c.prior_neutral);
  get("prior_right", c.prior_right);
  get("far_right_fraction", c.far_right_fraction);
  get("class_signal", c.class_signal);
  get("homophily", c.homophily);
  get("share_fraction", c.share_fraction);
  get("context_shift", c.context_shift);
  get("corpus_index", c.corpus_index);
  get("vocab_per_class", c.vocab_per_class);
  get("shared_vocab", c.shared_vocab);
  get("hashtags_per_class", c.hashtags_per_class);
  get("shared_hashtags", c.shared_hashtags);
  get("domains_per_class", c.domains_per_class);
  get("posts_per_user", c.posts_per_user);
  get("reshares_per_user", c.reshares_per_user);
  get("tokens_per_post", c.tokens_per_post);
  get("influencers_per_class", c.influencers_per_class);
  get("politicians_per_side", c.politicians_per_side);
  get("party_follow_rate", c.party_follow_rate);
  get("gold_size", c.gold_size);
  get("word_dim", c.word_dim);
  get("survey_participants", c.survey_participants);
  get("world_seed", c.world_seed);
  get("rng_seed", c.rng_seed);
  get("dataset_id", c.dataset_id);
  for (const auto& [k, v] : j.items())
    if (!seen.count(k)) fail(ErrorKind::Config, "synth config: unknown key " + k);
  return c;
}

}  // namespace ideo
