// Writes a synthetic stand-in for the annotated debate corpus: four
// transcripts whose sentence, annotation and per-source counts equal the
// published ones, plus a small speech corpus for topic training and an
// embedding table covering the generated vocabulary.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "claimrank/corpus.hpp"
#include "claimrank/random.hpp"
#include "claimrank/textproc.hpp"

namespace fs = std::filesystem;
using claimrank::Rng;

namespace {

struct DebatePlan {
  std::string id;
  int sentences;
  int annotated;
  int annotations;
  std::string c1, c2;
  std::vector<std::string> moderators;
  std::map<std::string, std::string> full_names;
  std::array<int, 9> per_source;  // in Source order
};

// Source order: ABC, ChicagoTribune, CNN, FactCheck, NPR, PolitiFact,
// Guardian, NYT, WashingtonPost.
const std::vector<DebatePlan> kPlans = {
    {"1st", 1403, 218, 378, "Clinton", "Trump", {"Holt"},
     {{"Clinton", "Hillary Clinton"}, {"Trump", "Donald Trump"}, {"Holt", "Lester Holt"}},
     {35, 30, 46, 15, 99, 74, 27, 26, 26}},
    {"2nd", 1303, 235, 391, "Clinton", "Trump", {"Cooper", "Raddatz"},
     {{"Clinton", "Hillary Clinton"}, {"Trump", "Donald Trump"}, {"Cooper", "Anderson Cooper"},
      {"Raddatz", "Martha Raddatz"}},
     {50, 29, 30, 45, 92, 62, 39, 25, 19}},
    {"VP", 1425, 183, 428, "Kaine", "Pence", {"Quijano"},
     {{"Kaine", "Tim Kaine"}, {"Pence", "Mike Pence"}, {"Quijano", "Elaine Quijano"}},
     {29, 31, 37, 47, 91, 60, 54, 46, 33}},
    {"3rd", 1284, 244, 473, "Clinton", "Trump", {"Wallace"},
     {{"Clinton", "Hillary Clinton"}, {"Trump", "Donald Trump"}, {"Wallace", "Chris Wallace"}},
     {28, 38, 60, 60, 89, 57, 72, 52, 17}},
};

// Number of annotated sentences at exactly 1..9 sources.
constexpr std::array<int, 9> kLevelCounts = {492, 191, 100, 40, 26, 19, 5, 6, 1};

struct Theme {
  std::string name;
  std::vector<std::string> nouns;
  std::vector<std::string> places;
  std::vector<std::string> orgs;
  std::vector<std::string> policies;
};

const std::vector<Theme> kThemes = {
    {"economy", {"jobs", "workers", "factories", "wages", "companies", "manufacturing jobs", "small businesses"},
     {"China", "Mexico", "Michigan", "Ohio"}, {"the Federal Reserve", "Congress"},
     {"trade deal", "tax cut", "NAFTA agreement"}},
    {"security", {"soldiers", "veterans", "terrorists", "weapons", "troops", "refugees"},
     {"Iraq", "Syria", "Iran", "Russia", "Libya", "Aleppo"}, {"ISIS", "NATO", "the Pentagon"},
     {"Iran deal", "war in Iraq", "no-fly zone"}},
    {"immigration", {"immigrants", "families", "deportations", "border agents", "visas"},
     {"Mexico", "America", "Arizona"}, {"Congress", "the Senate"}, {"immigration reform", "border wall"}},
    {"health", {"patients", "premiums", "doctors", "hospitals", "insurance plans"},
     {"America", "Indiana", "Virginia"}, {"Congress", "the Supreme Court"},
     {"Affordable Care Act", "health care law"}},
    {"crime", {"police officers", "guns", "murders", "shootings", "neighborhoods"},
     {"Chicago", "New York", "Baltimore"}, {"the FBI", "the Supreme Court"},
     {"stop and frisk", "assault weapons ban"}},
    {"energy", {"coal miners", "oil", "energy jobs", "power plants", "pipelines"},
     {"West Virginia", "Pennsylvania", "Texas"}, {"the State Department", "Congress"},
     {"clean power plan", "Keystone pipeline"}},
    {"debt", {"dollars", "debt", "deficits", "spending", "taxpayers"},
     {"Washington", "America"}, {"Congress", "the Treasury"}, {"stimulus", "budget deal"}},
};

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(rng.below(v.size()))];
}

std::string pick(Rng& rng, std::initializer_list<const char*> v) {
  return *(v.begin() + rng.below(v.size()));
}

std::string number(Rng& rng) {
  switch (rng.below(4)) {
    case 0:
      return std::to_string(2 + rng.below(98));
    case 1:
      return std::to_string(1 + rng.below(9)) + "." + std::to_string(rng.below(10));
    case 2:
      return std::to_string(100 + rng.below(900));
    default:
      return std::to_string(1 + rng.below(9)) + "," + std::to_string(100 + rng.below(900));
  }
}

std::string year(Rng& rng) { return std::to_string(1990 + rng.below(27)); }

struct Speakers {
  std::string self;
  std::string opponent;       // label
  std::string opponent_name;  // first name or label
};

std::string claim_sentence(Rng& rng, const Theme& t, const Speakers& sp) {
  const std::string subj =
      rng.bernoulli(0.25) ? sp.opponent_name
                          : pick(rng, {"We", "They", "This administration", "Our country", "He", "She"});
  const std::string mag = pick(rng, {"million", "billion", "thousand", "trillion"});
  switch (rng.below(8)) {
    case 0:
      return subj + " " + pick(rng, {"lost", "created", "added", "cut", "shipped", "doubled"}) + " " +
             number(rng) + " " + mag + " " + pick(rng, t.nouns) + " " + pick(rng, {"since", "in"}) + " " +
             year(rng) + ".";
    case 1: {
      std::string org = pick(rng, t.orgs);
      org[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(org[0])));
      return org + " " + pick(rng, {"reported", "found", "said"}) + " that " + number(rng) + " percent of " +
             pick(rng, t.nouns) + " " + pick(rng, {"are", "were"}) + " " +
             pick(rng, {"unemployed", "uninsured", "poor", "illegal", "afraid"}) + ".";
    }
    case 2:
      return sp.opponent_name + " " + pick(rng, {"voted for", "supported", "opposed"}) + " the " +
             pick(rng, t.policies) + " in " + year(rng) + ".";
    case 3:
      return pick(rng, t.places) + " " + pick(rng, {"has", "had"}) + " the " +
             pick(rng, {"highest", "lowest"}) + " number of " + pick(rng, t.nouns) + " in " +
             std::to_string(10 + rng.below(60)) + " years.";
    case 4: {
      std::string org = pick(rng, t.orgs);
      return "In " + year(rng) + ", " + org + " " + pick(rng, {"approved", "rejected"}) + " " + number(rng) +
             " " + mag + " dollars for " + pick(rng, t.nouns) + ".";
    }
    case 5:
      return pick(rng, t.places) + " " + pick(rng, {"took", "stole"}) + " " + number(rng) + " " + mag + " " +
             pick(rng, t.nouns) + " from us.";
    case 6:
      return subj + " " + pick(rng, {"raised", "paid", "spent"}) + " " + number(rng) + " " + mag + " dollars " +
             pick(rng, {"in taxes", "on the foundation", "on the campaign"}) + ".";
    default:
      return "There " + pick(rng, {"are", "were"}) + " " + number(rng) + " " + mag + " " + pick(rng, t.nouns) +
             " in " + pick(rng, t.places) + " " + pick(rng, {"last year", "right now", "today"}) + ".";
  }
}

std::string other_sentence(Rng& rng, const Theme& t, const Speakers& sp) {
  switch (rng.below(12)) {
    case 0:
      return pick(rng, {"I think", "I believe", "Maybe", "Frankly, I think"}) + " " +
             pick(rng, {"we can do better", "that is wrong", "we need a strong leader",
                        "our country deserves better", "it is a disgrace", "this is a tremendous opportunity"}) +
             ".";
    case 1:
      return pick(rng, {"We will", "We are going to", "I will"}) + " " +
             pick(rng, {"bring back", "protect", "fight for", "take care of", "stand up for"}) + " our " +
             pick(rng, t.nouns) + ".";
    case 2:
      return sp.opponent_name + " " +
             pick(rng, {"is a disaster", "is very weak on", "has no plan for", "is wrong about",
                        "does not care about"}) +
             (rng.bernoulli(0.5) ? " " + pick(rng, t.nouns) : std::string()) + ".";
    case 3:
      return pick(rng, {"Thank you.", "Well, look.", "Believe me.", "Let me say this.", "That is not true.",
                        "Wrong.", "I never said that.", "No, no, no.", "Nobody has done more.",
                        "It is a disgrace.", "We have to do better.", "Good for you."});
    case 4:
      return "Our " + pick(rng, t.nouns) + " deserve " + pick(rng, {"a strong leader", "better", "respect"}) + ".";
    case 5:
      return "I hope we can work together on " + pick(rng, t.policies) + ".";
    case 6:
      return pick(rng, {"You know", "I know", "Everybody knows"}) + " " +
             pick(rng, {"what is happening", "what they are doing", "this is very important"}) + ".";
    case 7:
      return "We have to talk about " + pick(rng, t.nouns) + " and " + pick(rng, t.policies) + ".";
    case 8:
      return "I would " + pick(rng, {"never", "not", "really"}) + " " +
             pick(rng, {"do that", "support that", "allow that"}) + ".";
    case 9:
      return "Nothing " + pick(rng, {"is more important", "will change", "has been done"}) + " for our " +
             pick(rng, t.nouns) + ".";
    case 10:
      return "People " + pick(rng, {"are tired", "are afraid", "want change", "feel good"}) + ".";
    default:
      return "My plan will " + pick(rng, {"help", "protect", "support"}) + " " + pick(rng, t.nouns) + " in " +
             pick(rng, t.places) + ".";
  }
}

std::string moderator_sentence(Rng& rng, const Theme& t, const std::string& next_speaker) {
  switch (rng.below(8)) {
    case 0:
      return next_speaker + ", your two minutes begin now.";
    case 1:
      return "Thank you, " + next_speaker + ".";
    case 2:
      return next_speaker + ", would you like to respond?";
    case 3:
      return "Let me move on to " + t.name + ".";
    case 4:
      return "The next question is about " + pick(rng, t.nouns) + ".";
    case 5:
      return "We have to move on.";
    case 6:
      return "Please let " + next_speaker + " answer.";
    default:
      return next_speaker + ", you have one minute.";
  }
}

const std::vector<std::string> kOpeners = {"And", "But", "So", "In fact,", "However,", "Now,", "Also,",
                                           "Frankly,", "Then", "Because of that,"};

std::string with_opener(Rng& rng, const std::string& s) {
  // Names and "I" keep their capital.
  static const std::set<std::string> common = {
      "We",   "They", "There",  "This", "Our",    "My",  "People", "Nothing",    "He",  "She",
      "Maybe", "Thank", "Well,", "Believe", "Let", "That", "Wrong.", "No,", "Nobody", "It",
      "Good", "You",  "Everybody", "Frankly,", "In"};
  std::string body = s;
  if (common.count(body.substr(0, body.find(' '))))
    body[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(body[0])));
  return pick(rng, kOpeners) + " " + body;
}

bool has_negation(const std::string& s) {
  static const std::vector<std::string> cues = {" not ", "n't", "No,", " no ", "never", "Nothing", "Nobody",
                                                "Wrong."};
  const std::string padded = " " + s + " ";
  for (const auto& c : cues)
    if (padded.find(c) != std::string::npos) return true;
  return false;
}

struct GenSentence {
  std::string speaker;
  std::string text;
  bool claim = false;
  bool moderator = false;
  int seg_size = 0;
  int pos = 0;
  bool prev_negation = false;
  std::array<bool, 3> events{};
  double latent = 0.0;
  int level = 0;
  std::array<bool, 9> sources{};
};

std::vector<GenSentence> generate_debate(const DebatePlan& plan, Rng& rng) {
  std::vector<GenSentence> out;
  const std::vector<std::string> candidates = {plan.c1, plan.c2};
  auto first_name = [&](const std::string& label) {
    const auto& full = plan.full_names.at(label);
    return rng.bernoulli(0.5) ? full.substr(0, full.find(' ')) : label;
  };
  int turn = 0;
  std::string last_candidate = plan.c2;
  while (static_cast<int>(out.size()) < plan.sentences) {
    const Theme& theme = pick(rng, kThemes);
    // Moderator prompt, then one or more candidate turns.
    const std::string next = last_candidate == plan.c1 ? plan.c2 : plan.c1;
    std::vector<std::pair<std::string, int>> segs;
    segs.push_back({plan.moderators[static_cast<std::size_t>(turn) % plan.moderators.size()],
                    1 + static_cast<int>(rng.below(3))});
    std::string who = next;
    const int exchanges = 1 + static_cast<int>(rng.below(3));
    for (int e = 0; e < exchanges; ++e) {
      const int size = rng.bernoulli(0.3) ? 1 + static_cast<int>(rng.below(3)) : 3 + static_cast<int>(rng.below(14));
      segs.push_back({who, size});
      last_candidate = who;
      who = who == plan.c1 ? plan.c2 : plan.c1;
    }
    ++turn;
    for (std::size_t k = 0; k < segs.size(); ++k) {
      const auto& [speaker, size] = segs[k];
      const bool is_mod = std::find(plan.moderators.begin(), plan.moderators.end(), speaker) != plan.moderators.end();
      const std::string addressee = k + 1 < segs.size() ? segs[k + 1].first : pick(rng, candidates);
      Speakers sp;
      sp.self = speaker;
      sp.opponent = speaker == plan.c1 ? plan.c2 : plan.c1;
      for (int p = 0; p < size && static_cast<int>(out.size()) < plan.sentences; ++p) {
        GenSentence g;
        g.speaker = speaker;
        g.moderator = is_mod;
        g.seg_size = size;
        g.pos = p;
        g.prev_negation = p > 0 && has_negation(out.back().text);
        sp.opponent_name = first_name(sp.opponent);
        if (is_mod) {
          g.text = moderator_sentence(rng, theme, addressee);
        } else {
          const double p_claim = 0.22 + (size >= 6 ? 0.15 : 0.0) + (g.prev_negation ? 0.15 : 0.0);
          g.claim = rng.bernoulli(p_claim);
          g.text = g.claim ? claim_sentence(rng, theme, sp) : other_sentence(rng, theme, sp);
          if (p > 0 && rng.bernoulli(0.2)) g.text = with_opener(rng, g.text);
        }
        if (!is_mod) {
          g.events[0] = rng.bernoulli(g.claim ? 0.05 : 0.02);
          g.events[1] = rng.bernoulli(0.01);
        }
        g.events[2] = rng.bernoulli(0.01);
        // Part of the score is visible only through the context of the
        // sentence: its segment, its neighbours, the audience and the role.
        g.latent = 1.3 * g.claim + 0.9 * (size >= 6) + 0.7 * (p > 0 && p + 1 < size) +
                   0.9 * g.prev_negation + 0.8 * g.events[0] - 4.0 * is_mod + 0.9 * rng.normal();
        out.push_back(std::move(g));
      }
    }
  }
  // The last segment may have been cut short.
  const int n = static_cast<int>(out.size());
  int start = n - 1;
  while (start > 0 && out[static_cast<std::size_t>(start - 1)].speaker == out.back().speaker) --start;
  for (int i = start; i < n; ++i) out[static_cast<std::size_t>(i)].seg_size = n - start;
  return out;
}

void assign_levels(std::vector<std::vector<GenSentence>>& debates) {
  struct Ref {
    std::size_t d, i;
  };
  std::vector<Ref> annotated;
  for (std::size_t d = 0; d < debates.size(); ++d) {
    std::vector<std::size_t> idx(debates[d].size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return debates[d][a].latent > debates[d][b].latent; });
    for (int k = 0; k < kPlans[d].annotated; ++k) annotated.push_back({d, idx[static_cast<std::size_t>(k)]});
  }
  std::stable_sort(annotated.begin(), annotated.end(), [&](const Ref& a, const Ref& b) {
    return debates[a.d][a.i].latent > debates[b.d][b.i].latent;
  });
  std::vector<int> levels;
  for (int l = 9; l >= 1; --l)
    for (int c = 0; c < kLevelCounts[static_cast<std::size_t>(l - 1)]; ++c) levels.push_back(l);
  for (std::size_t k = 0; k < annotated.size(); ++k) debates[annotated[k].d][annotated[k].i].level = levels[k];

  // Swap levels across debates until every debate has its annotation total.
  auto sum_of = [&](std::size_t d) {
    int s = 0;
    for (const auto& g : debates[d]) s += g.level;
    return s;
  };
  for (int guard = 0; guard < 100000; ++guard) {
    std::vector<int> gap(debates.size());
    bool done = true;
    for (std::size_t d = 0; d < debates.size(); ++d) {
      gap[d] = sum_of(d) - kPlans[d].annotations;
      done = done && gap[d] == 0;
    }
    if (done) return;
    const auto hi = static_cast<std::size_t>(std::max_element(gap.begin(), gap.end()) - gap.begin());
    const auto lo = static_cast<std::size_t>(std::min_element(gap.begin(), gap.end()) - gap.begin());
    const int limit = std::min(gap[hi], -gap[lo]);
    // Largest admissible difference first, nearest latent scores among those.
    bool swapped = false;
    for (int diff = limit; diff >= 1 && !swapped; --diff) {
      double best = 1e300;
      GenSentence *a = nullptr, *b = nullptr;
      for (auto& x : debates[hi]) {
        if (x.level == 0) continue;
        for (auto& y : debates[lo]) {
          if (y.level == 0 || x.level - y.level != diff) continue;
          const double cost = std::abs(x.latent - y.latent);
          if (cost < best) {
            best = cost;
            a = &x;
            b = &y;
          }
        }
      }
      if (a) {
        std::swap(a->level, b->level);
        swapped = true;
      }
    }
    if (!swapped) throw std::runtime_error("cannot balance agreement levels across debates");
  }
  throw std::runtime_error("level balancing did not finish");
}

void assign_sources(std::vector<GenSentence>& debate, const DebatePlan& plan, Rng& rng) {
  std::array<int, 9> remaining = plan.per_source;
  std::vector<GenSentence*> order;
  for (auto& g : debate)
    if (g.level > 0) order.push_back(&g);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->level > b->level; });
  for (auto* g : order) {
    std::array<int, 9> idx;
    std::iota(idx.begin(), idx.end(), 0);
    // Random tie-break keeps sources from always sharing the same sentences.
    std::array<double, 9> jitter;
    for (auto& j : jitter) j = rng.uniform();
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      if (remaining[a] != remaining[b]) return remaining[a] > remaining[b];
      return jitter[a] < jitter[b];
    });
    for (int k = 0; k < g->level; ++k) {
      const int s = idx[static_cast<std::size_t>(k)];
      if (remaining[s] == 0) throw std::runtime_error("source capacities cannot be realized for " + plan.id);
      --remaining[s];
      g->sources[s] = true;
    }
  }
  for (int r : remaining)
    if (r != 0) throw std::runtime_error("source capacities left over for " + plan.id);
}

void write_outputs(const fs::path& dir, const std::vector<std::vector<GenSentence>>& debates) {
  std::ofstream meta(dir / "metadata.txt");
  meta << "# Synthetic debate metadata\n";
  std::string ids;
  for (const auto& p : kPlans) ids += (ids.empty() ? "" : ",") + p.id;
  meta << "debates=" << ids << "\n";
  for (const auto& p : kPlans) {
    meta << p.id << ".candidates=" << p.c1 << "," << p.c2 << "\n";
    std::string mods;
    for (const auto& m : p.moderators) mods += (mods.empty() ? "" : ",") + m;
    meta << p.id << ".moderators=" << mods << "\n";
    for (const auto& [label, full] : p.full_names) meta << p.id << ".name." << label << "=" << full << "\n";
  }

  std::ofstream tsv(dir / "transcript.tsv");
  tsv << "debate_id\tsentence_index\tspeaker\ttext";
  for (auto s : claimrank::kAllSources) tsv << '\t' << claimrank::source_name(s);
  tsv << "\tapplause\tlaugh\tcrosstalk\n";
  static const std::array<const char*, 3> kEventText = {"(APPLAUSE)", "(LAUGHTER)", "(CROSSTALK)"};
  for (std::size_t d = 0; d < debates.size(); ++d) {
    int index = 0;
    for (const auto& g : debates[d]) {
      tsv << kPlans[d].id << '\t' << index++ << '\t' << g.speaker << '\t' << g.text;
      for (bool s : g.sources) tsv << '\t' << (s ? 1 : 0);
      // Laughter and crosstalk go in the flag columns, applause as its own row.
      tsv << "\t0\t" << g.events[1] << '\t' << g.events[2] << '\n';
      if (g.events[0]) {
        tsv << kPlans[d].id << '\t' << index++ << "\tSYSTEM\t" << kEventText[0];
        for (int k = 0; k < 12; ++k) tsv << "\t0";
        tsv << '\n';
      }
    }
  }
}

void write_speeches(const fs::path& dir, Rng& rng, std::set<std::string>& vocab) {
  fs::create_directories(dir);
  const std::vector<std::string> speakers = {"Clinton", "Trump", "Kaine", "Pence"};
  for (int f = 0; f < 8; ++f) {
    std::ofstream out(dir / ("speech_" + std::to_string(f) + ".txt"));
    for (int para = 0; para < 60; ++para) {
      const Theme& t = pick(rng, kThemes);
      Speakers sp{pick(rng, speakers), pick(rng, speakers), pick(rng, speakers)};
      const int n = 4 + static_cast<int>(rng.below(5));
      for (int s = 0; s < n; ++s) {
        const std::string text = rng.bernoulli(0.5) ? claim_sentence(rng, t, sp) : other_sentence(rng, t, sp);
        for (const auto& tok : claimrank::tokenize(text))
          if (claimrank::is_word(tok)) vocab.insert(tok.normalized);
        out << text << (s + 1 < n ? " " : "\n\n");
      }
    }
  }
}

int theme_of(const std::string& word) {
  for (std::size_t t = 0; t < kThemes.size(); ++t) {
    const auto& th = kThemes[t];
    for (const auto* list : {&th.nouns, &th.places, &th.orgs, &th.policies})
      for (const auto& phrase : *list)
        for (const auto& tok : claimrank::tokenize(phrase))
          if (tok.normalized == word) return static_cast<int>(t);
  }
  return -1;
}

void write_embeddings(const fs::path& path, const std::set<std::string>& vocab, Rng& rng) {
  constexpr int kDim = 300;
  constexpr int kGeneric = 12;
  const int clusters = static_cast<int>(kThemes.size()) + kGeneric + 1;
  std::vector<std::vector<double>> centroid(static_cast<std::size_t>(clusters), std::vector<double>(kDim));
  for (auto& c : centroid)
    for (auto& x : c) x = rng.normal();
  std::ofstream out(path);
  out << vocab.size() << ' ' << kDim << '\n';
  for (const auto& w : vocab) {
    int cluster = theme_of(w);
    if (cluster < 0 && std::isdigit(static_cast<unsigned char>(w[0]))) cluster = clusters - 1;
    if (cluster < 0)
      cluster = static_cast<int>(kThemes.size()) +
                static_cast<int>(claimrank::derive_seed(0, w) % static_cast<std::uint64_t>(kGeneric));
    out << w;
    char buf[32];
    for (int k = 0; k < kDim; ++k) {
      std::snprintf(buf, sizeof buf, " %.5f", centroid[static_cast<std::size_t>(cluster)][static_cast<std::size_t>(k)] +
                                                  0.6 * rng.normal());
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic debate fixture"};
  std::string out_dir;
  std::uint64_t seed = 2016;
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--seed", seed, "random seed");
  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    Rng rng(claimrank::derive_seed(seed, "debates"));
    std::vector<std::vector<GenSentence>> debates;
    for (const auto& plan : kPlans) debates.push_back(generate_debate(plan, rng));
    assign_levels(debates);
    Rng src_rng(claimrank::derive_seed(seed, "sources"));
    for (std::size_t d = 0; d < debates.size(); ++d) assign_sources(debates[d], kPlans[d], src_rng);
    write_outputs(dir, debates);

    std::set<std::string> vocab;
    for (const auto& d : debates)
      for (const auto& g : d)
        for (const auto& tok : claimrank::tokenize(g.text))
          if (claimrank::is_word(tok)) vocab.insert(tok.normalized);
    Rng speech_rng(claimrank::derive_seed(seed, "speeches"));
    write_speeches(dir / "speeches", speech_rng, vocab);
    Rng emb_rng(claimrank::derive_seed(seed, "embeddings"));
    write_embeddings(dir / "embeddings.txt", vocab, emb_rng);
  } catch (const std::exception& e) {
    std::cerr << "make_fixture: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
