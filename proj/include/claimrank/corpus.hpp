#pragma once

// Annotated debate transcripts: data model, TSV ingestion, folds and
// dataset statistics.

#include <array>
#include <bitset>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace claimrank {

// The nine fact-checking media. Ordinals are stable and used for
// serialization column order.
enum class Source : int {
  ABC = 0,
  ChicagoTribune,
  CNN,
  FactCheck,
  NPR,
  PolitiFact,
  Guardian,
  NYT,
  WashingtonPost,
};

inline constexpr std::size_t kNumSources = 9;
inline constexpr std::array<Source, kNumSources> kAllSources = {
    Source::ABC,       Source::ChicagoTribune, Source::CNN,
    Source::FactCheck, Source::NPR,            Source::PolitiFact,
    Source::Guardian,  Source::NYT,            Source::WashingtonPost};

std::string_view source_name(Source source);
std::optional<Source> parse_source(std::string_view name);

using SourceSet = std::bitset<kNumSources>;

enum class SystemEvent : int { Applause = 0, Laugh, Crosstalk };
inline constexpr std::size_t kNumEvents = 3;
using EventSet = std::bitset<kNumEvents>;

std::string_view event_name(SystemEvent event);

enum class Role : int { Candidate1 = 0, Candidate2, Moderator };

// Who may speak in a debate. Any other speaker is rejected at parse time.
struct Participants {
  std::string candidate1;
  std::string candidate2;
  std::vector<std::string> moderators;
  // Speaker label -> full name ("Clinton" -> "Hillary Clinton"). Optional.
  std::map<std::string, std::string> full_names;

  std::optional<Role> role_of(std::string_view speaker) const;
  bool is_moderator(std::string_view speaker) const {
    return role_of(speaker) == Role::Moderator;
  }
  // Empty for moderators.
  std::optional<std::string> opponent_of(std::string_view speaker) const;
  // Case-folded words that refer to a participant: the label plus the words
  // of the full name.
  std::vector<std::string> name_words(std::string_view speaker) const;
};

struct Sentence {
  int sentence_id = 0;  // unique within a dataset
  std::string debate_id;
  int segment_id = 0;  // index of the segment within its debate
  std::string speaker;
  std::string text;
  int index_in_segment = 0;
  int index_in_debate = 0;
  EventSet followed_by;
  SourceSet annotated_by;
};

// A maximal run of consecutive sentences by one speaker.
struct Segment {
  int segment_id = 0;
  std::string debate_id;
  std::string speaker;
  std::vector<int> sentences;  // index_in_debate of each member, in order
  int index_in_debate = 0;

  int size() const { return static_cast<int>(sentences.size()); }
};

struct Debate {
  std::string debate_id;
  Participants participants;
  std::vector<Sentence> sentences;
  std::vector<Segment> segments;

  const Segment& segment_of(const Sentence& s) const { return segments.at(s.segment_id); }
  const Segment* previous_segment(const Sentence& s) const;
  const Segment* next_segment(const Sentence& s) const;
};

struct LabelPolicy {
  enum class Kind { Union, SingleSource };
  Kind kind = Kind::Union;
  Source source = Source::ABC;  // only meaningful for SingleSource

  static LabelPolicy union_of_sources() { return {}; }
  static LabelPolicy single(Source s) { return {Kind::SingleSource, s}; }

  int label(const Sentence& s) const {
    return kind == Kind::Union ? static_cast<int>(s.annotated_by.any())
                               : static_cast<int>(s.annotated_by.test(static_cast<std::size_t>(source)));
  }
  std::string describe() const;
};

struct LabeledDataset {
  std::vector<Debate> debates;
  LabelPolicy policy;

  int label(const Sentence& s) const { return policy.label(s); }
  std::size_t sentence_count() const;
  const Debate& debate(std::string_view id) const;
};

// Per-debate participants plus debate order, read from a key=value file:
//
//   debates=1st,2nd,VP,3rd
//   1st.candidates=Clinton,Trump
//   1st.moderators=Holt
//   1st.name.Clinton=Hillary Clinton
struct DatasetMetadata {
  std::vector<std::string> order;
  std::map<std::string, Participants> participants;

  const Participants& of(std::string_view debate_id) const;
};

DatasetMetadata parse_metadata(std::istream& in, const std::string& file_name = {});
DatasetMetadata read_metadata_file(const std::string& path);
void write_metadata(std::ostream& out, const DatasetMetadata& meta);

// Fixed transcript columns. Header row is required.
inline constexpr std::array<std::string_view, 4> kLeadingColumns = {
    "debate_id", "sentence_index", "speaker", "text"};

// Speaker label of in-transcript system event rows such as "(APPLAUSE)".
// These rows set the event flag of the preceding sentence.
inline constexpr std::string_view kSystemSpeaker = "SYSTEM";

// Parses one debate. All records must carry the same debate_id.
Debate parse_transcript(std::istream& in, const Participants& participants,
                        const std::string& file_name = {});

// Parses a transcript holding any of the debates named in `meta`, returned
// in metadata order. Sentence ids are assigned consecutively across debates.
LabeledDataset parse_dataset(std::istream& in, const DatasetMetadata& meta,
                             const std::string& file_name = {});
LabeledDataset read_dataset(const std::string& transcript_path,
                            const std::string& metadata_path);

// Canonical TSV: header, one row per sentence in debate order, flags as 0/1.
void write_transcript(std::ostream& out, const LabeledDataset& dataset);
void write_transcript(std::ostream& out, const Debate& debate);

DatasetMetadata metadata_of(const LabeledDataset& dataset);

// Number of sentences selected by exactly n sources, n = 1..9, with the
// cumulative column (selected by at least n).
struct AgreementTable {
  std::array<std::size_t, kNumSources + 1> exactly{};   // index n; [0] unused
  std::array<std::size_t, kNumSources + 1> at_least{};  // index n; [0] unused
  std::size_t total_sentences = 0;
};

AgreementTable dataset_stats(const LabeledDataset& dataset);

// Annotation counts per medium and debate.
struct MediumTable {
  std::vector<std::string> debates;
  std::array<std::vector<std::size_t>, kNumSources> per_debate;
  std::array<std::size_t, kNumSources> total{};
  std::vector<std::size_t> annotations_per_debate;
  std::vector<std::size_t> annotated_sentences_per_debate;
  std::size_t total_annotations = 0;
  std::size_t total_annotated_sentences = 0;
};

MediumTable medium_counts(const LabeledDataset& dataset);

void print_agreement_table(std::ostream& out, const AgreementTable& table);
void print_medium_table(std::ostream& out, const MediumTable& table);

// Leave-one-debate-out split; indices refer to LabeledDataset::debates.
struct Fold {
  int index = 0;
  std::vector<std::size_t> train;
  std::size_t test = 0;
};

std::vector<Fold> split_folds(const LabeledDataset& dataset);

LabeledDataset project_labels(const LabeledDataset& dataset, Source source);

}  // namespace claimrank
