#pragma once

// Helpers for building small in-memory datasets.

#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "claimrank/corpus.hpp"
#include "claimrank/features.hpp"
#include "claimrank/random.hpp"

namespace testutil {

struct Row {
  std::string debate;
  std::string speaker;
  std::string text;
  std::vector<claimrank::Source> sources = {};
  bool applause = false;
};

inline std::string transcript_header() {
  std::string h = "debate_id\tsentence_index\tspeaker\ttext";
  for (auto s : claimrank::kAllSources) h += "\t" + std::string(claimrank::source_name(s));
  return h + "\tapplause\tlaugh\tcrosstalk\n";
}

inline std::string transcript(const std::vector<Row>& rows) {
  std::string out = transcript_header();
  std::map<std::string, int> next;
  for (const auto& r : rows) {
    out += r.debate + "\t" + std::to_string(next[r.debate]++) + "\t" + r.speaker + "\t" + r.text;
    for (auto s : claimrank::kAllSources) {
      bool on = false;
      for (auto t : r.sources) on = on || t == s;
      out += on ? "\t1" : "\t0";
    }
    out += r.applause ? "\t1\t0\t0\n" : "\t0\t0\t0\n";
  }
  return out;
}

// Debates "d1".."dN", each with candidates Clinton/Trump and moderator Holt.
inline claimrank::DatasetMetadata metadata(int debates) {
  std::ostringstream m;
  m << "debates=";
  for (int i = 1; i <= debates; ++i) m << (i > 1 ? "," : "") << "d" << i;
  m << '\n';
  for (int i = 1; i <= debates; ++i) {
    m << "d" << i << ".candidates=Clinton,Trump\n";
    m << "d" << i << ".moderators=Holt\n";
    m << "d" << i << ".name.Clinton=Hillary Clinton\n";
    m << "d" << i << ".name.Trump=Donald Trump\n";
  }
  std::istringstream in(m.str());
  return claimrank::parse_metadata(in);
}

inline claimrank::LabeledDataset dataset(const std::vector<Row>& rows, int debates) {
  std::istringstream in(transcript(rows));
  return claimrank::parse_dataset(in, metadata(debates));
}

inline std::string resource_dir() { return CLAIMRANK_TEST_RESOURCES; }

// Small vocabulary shared by the toy 300-topic model and 300-dim table.
inline const std::vector<std::string> kWords = {"tax", "jobs", "wall", "trade", "deal", "plan", "women", "war",
                                         "iraq", "isis", "money", "debt", "china", "mexico", "crime"};

inline std::shared_ptr<claimrank::TopicModel> toy_topics() {
  claimrank::Rng rng(21);
  claimrank::CountMatrix counts(300, static_cast<Eigen::Index>(kWords.size()));
  for (Eigen::Index k = 0; k < counts.rows(); ++k)
    for (Eigen::Index w = 0; w < counts.cols(); ++w) counts(k, w) = static_cast<std::int64_t>(rng.below(4));
  auto sorted = kWords;
  std::sort(sorted.begin(), sorted.end());
  return std::make_shared<claimrank::TopicModel>(claimrank::Vocabulary(sorted), 50.0 / 300, 0.01, counts);
}

inline std::shared_ptr<claimrank::EmbeddingTable> toy_embeddings() {
  claimrank::Rng rng(22);
  std::unordered_map<std::string, Eigen::Index> index;
  claimrank::EmbeddingTable::Matrix vectors(static_cast<Eigen::Index>(kWords.size()), 300);
  for (std::size_t i = 0; i < kWords.size(); ++i) {
    index[kWords[i]] = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < 300; ++j) vectors(static_cast<Eigen::Index>(i), j) = static_cast<float>(rng.normal());
  }
  return std::make_shared<claimrank::EmbeddingTable>(300, std::move(index), std::move(vectors));
}


inline claimrank::ResourceBundle full_resources(const claimrank::LabeledDataset* dataset = nullptr) {
  auto r = claimrank::ResourceBundle::load_directory(resource_dir());
  r.topics = toy_topics();
  r.embeddings = toy_embeddings();
  r.topic_sweeps = 10;
  if (dataset) r.add_participants(*dataset);
  return r;
}

// Random debates over a small vocabulary; every sentence is a word list.
inline claimrank::LabeledDataset random_dataset(std::uint64_t seed, int debates, int sentences_per_debate) {
  claimrank::Rng rng(seed);
  const char* speakers[] = {"Clinton", "Trump", "Holt"};
  std::vector<Row> rows;
  for (int d = 1; d <= debates; ++d)
    for (int i = 0; i < sentences_per_debate; ++i) {
      Row r{"d" + std::to_string(d), speakers[rng.below(rng.bernoulli(0.8) ? 2 : 3)], ""};
      const auto len = 1 + rng.below(8);
      for (std::uint64_t k = 0; k < len; ++k) r.text += (k ? " " : "") + kWords[rng.below(kWords.size())];
      if (rng.bernoulli(0.1)) r.text += " not";
      r.text += ".";
      if (rng.bernoulli(0.3)) r.sources.push_back(claimrank::Source::NPR);
      if (rng.bernoulli(0.15)) r.sources.push_back(claimrank::Source::PolitiFact);
      rows.push_back(r);
    }
  return dataset(rows, debates);
}

}  // namespace testutil
