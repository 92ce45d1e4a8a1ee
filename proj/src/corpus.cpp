#include "claimrank/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "claimrank/errors.hpp"
#include "claimrank/strings.hpp"

namespace claimrank {

namespace {

constexpr std::array<std::string_view, kNumSources> kSourceNames = {
    "ABC", "ChicagoTribune", "CNN", "FactCheck", "NPR",
    "PolitiFact", "Guardian", "NYT", "WashingtonPost"};

constexpr std::array<std::string_view, kNumEvents> kEventNames = {"applause", "laugh",
                                                                  "crosstalk"};

std::optional<SystemEvent> parse_event_column(std::string_view name) {
  for (std::size_t i = 0; i < kNumEvents; ++i)
    if (kEventNames[i] == name) return static_cast<SystemEvent>(i);
  return std::nullopt;
}

// "(APPLAUSE)" and friends, as they appear in published transcripts.
std::optional<SystemEvent> parse_event_text(std::string_view text) {
  const std::string t = fold_case(trim(text));
  if (t == "(applause)" || t == "applause") return SystemEvent::Applause;
  if (t == "(laughter)" || t == "(laugh)" || t == "laughter" || t == "laugh")
    return SystemEvent::Laugh;
  if (t == "(crosstalk)" || t == "crosstalk" || t == "(cross-talk)") return SystemEvent::Crosstalk;
  return std::nullopt;
}

struct Record {
  std::size_t line = 0;
  std::string debate_id;
  long index = 0;
  std::string speaker;
  std::string text;
  SourceSet sources;
  EventSet events;
};

struct Schema {
  std::vector<std::optional<Source>> source_at;
  std::vector<std::optional<SystemEvent>> event_at;
  std::size_t columns = 0;
};

Schema parse_header(const std::string& line, const std::string& file) {
  const auto cols = split(line, '\t');
  if (cols.size() < kLeadingColumns.size())
    throw SchemaError(file + ": header has " + std::to_string(cols.size()) +
                      " columns, expected at least " + std::to_string(kLeadingColumns.size()));
  for (std::size_t i = 0; i < kLeadingColumns.size(); ++i)
    if (trim(cols[i]) != kLeadingColumns[i])
      throw SchemaError(file + ": header column " + std::to_string(i + 1) + " is '" + cols[i] +
                        "', expected '" + std::string(kLeadingColumns[i]) + "'");
  Schema schema;
  schema.columns = cols.size();
  schema.source_at.resize(cols.size());
  schema.event_at.resize(cols.size());
  SourceSet seen_sources;
  EventSet seen_events;
  for (std::size_t i = kLeadingColumns.size(); i < cols.size(); ++i) {
    const auto name = trim(cols[i]);
    if (auto s = parse_source(name)) {
      schema.source_at[i] = s;
      seen_sources.set(static_cast<std::size_t>(*s));
    } else if (auto e = parse_event_column(name)) {
      schema.event_at[i] = e;
      seen_events.set(static_cast<std::size_t>(*e));
    } else {
      throw SchemaError(file + ": unknown column '" + std::string(name) + "' in header");
    }
  }
  if (!seen_sources.all() || !seen_events.all())
    throw SchemaError(file + ": header must list all nine sources and the three event flags");
  return schema;
}

bool parse_flag(std::string_view s, bool& out) {
  s = trim(s);
  if (s == "0") {
    out = false;
    return true;
  }
  if (s == "1") {
    out = true;
    return true;
  }
  return false;
}

std::vector<Record> read_records(std::istream& in, const std::string& file) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<Schema> schema;
  std::vector<Record> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!schema) {
      if (trim(line).empty()) continue;
      schema = parse_header(line, file);
      continue;
    }
    if (trim(line).empty()) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != schema->columns)
      throw ParseError(file, line_no,
                       "expected " + std::to_string(schema->columns) + " fields, found " +
                           std::to_string(cols.size()));
    Record r;
    r.line = line_no;
    r.debate_id = std::string(trim(cols[0]));
    if (r.debate_id.empty()) throw ParseError(file, line_no, "empty debate_id");
    const auto idx = trim(cols[1]);
    auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), r.index);
    if (ec != std::errc() || ptr != idx.data() + idx.size() || r.index < 0)
      throw ParseError(file, line_no, "bad sentence_index '" + std::string(idx) + "'");
    r.speaker = std::string(trim(cols[2]));
    if (r.speaker.empty()) throw ParseError(file, line_no, "empty speaker field");
    r.text = std::string(trim(cols[3]));
    if (r.text.empty()) throw ParseError(file, line_no, "empty sentence text");
    for (std::size_t i = kLeadingColumns.size(); i < cols.size(); ++i) {
      bool flag = false;
      if (!parse_flag(cols[i], flag))
        throw ParseError(file, line_no, "flag column " + std::to_string(i + 1) +
                                            " must be 0 or 1, found '" + cols[i] + "'");
      if (schema->source_at[i])
        r.sources.set(static_cast<std::size_t>(*schema->source_at[i]), flag);
      else
        r.events.set(static_cast<std::size_t>(*schema->event_at[i]), flag);
    }
    records.push_back(std::move(r));
  }
  if (!schema) throw SchemaError(file + ": missing header row");
  return records;
}

Debate build_debate(std::vector<Record> records, const std::string& debate_id,
                    const Participants& participants, int first_sentence_id,
                    const std::string& file) {
  std::stable_sort(records.begin(), records.end(),
                   [](const Record& a, const Record& b) { return a.index < b.index; });
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].index == records[i - 1].index)
      throw ParseError(file, records[i].line,
                       "duplicate sentence_index " + std::to_string(records[i].index) +
                           " in debate " + debate_id);

  Debate debate;
  debate.debate_id = debate_id;
  debate.participants = participants;
  for (const auto& r : records) {
    if (r.speaker == kSystemSpeaker) {
      if (debate.sentences.empty())
        throw ParseError(file, r.line, "system event before the first sentence");
      auto& prev = debate.sentences.back();
      prev.followed_by |= r.events;
      if (auto e = parse_event_text(r.text)) prev.followed_by.set(static_cast<std::size_t>(*e));
      continue;
    }
    if (!participants.role_of(r.speaker))
      throw ParseError(file, r.line,
                       "speaker '" + r.speaker + "' is not a participant of debate " + debate_id);
    Sentence s;
    s.debate_id = debate_id;
    s.speaker = r.speaker;
    s.text = r.text;
    s.followed_by = r.events;
    s.annotated_by = r.sources;
    s.index_in_debate = static_cast<int>(debate.sentences.size());
    s.sentence_id = first_sentence_id + s.index_in_debate;
    debate.sentences.push_back(std::move(s));
  }

  for (auto& s : debate.sentences) {
    if (debate.segments.empty() || debate.segments.back().speaker != s.speaker) {
      Segment seg;
      seg.segment_id = static_cast<int>(debate.segments.size());
      seg.index_in_debate = seg.segment_id;
      seg.debate_id = debate_id;
      seg.speaker = s.speaker;
      debate.segments.push_back(std::move(seg));
    }
    auto& seg = debate.segments.back();
    s.segment_id = seg.segment_id;
    s.index_in_segment = seg.size();
    seg.sentences.push_back(s.index_in_debate);
  }
  return debate;
}

std::string flags_to_string(const Sentence& s) {
  std::string out;
  for (std::size_t i = 0; i < kNumSources; ++i) out += s.annotated_by.test(i) ? "\t1" : "\t0";
  for (std::size_t i = 0; i < kNumEvents; ++i) out += s.followed_by.test(i) ? "\t1" : "\t0";
  return out;
}

void write_header(std::ostream& out) {
  for (std::size_t i = 0; i < kLeadingColumns.size(); ++i) out << (i ? "\t" : "") << kLeadingColumns[i];
  for (auto name : kSourceNames) out << '\t' << name;
  for (auto name : kEventNames) out << '\t' << name;
  out << '\n';
}

void write_rows(std::ostream& out, const Debate& debate) {
  for (const auto& s : debate.sentences)
    out << debate.debate_id << '\t' << s.index_in_debate << '\t' << s.speaker << '\t' << s.text
        << flags_to_string(s) << '\n';
}

}  // namespace

std::string_view source_name(Source source) {
  return kSourceNames.at(static_cast<std::size_t>(source));
}

std::optional<Source> parse_source(std::string_view name) {
  for (std::size_t i = 0; i < kNumSources; ++i)
    if (kSourceNames[i] == name) return static_cast<Source>(i);
  return std::nullopt;
}

std::string_view event_name(SystemEvent event) {
  return kEventNames.at(static_cast<std::size_t>(event));
}

std::optional<Role> Participants::role_of(std::string_view speaker) const {
  if (speaker == candidate1) return Role::Candidate1;
  if (speaker == candidate2) return Role::Candidate2;
  if (std::find(moderators.begin(), moderators.end(), speaker) != moderators.end())
    return Role::Moderator;
  return std::nullopt;
}

std::optional<std::string> Participants::opponent_of(std::string_view speaker) const {
  if (speaker == candidate1) return candidate2;
  if (speaker == candidate2) return candidate1;
  return std::nullopt;
}

std::vector<std::string> Participants::name_words(std::string_view speaker) const {
  std::set<std::string> words{fold_case(speaker)};
  if (auto it = full_names.find(std::string(speaker)); it != full_names.end())
    for (const auto& w : split_ws(it->second)) words.insert(fold_case(w));
  return {words.begin(), words.end()};
}

const Segment* Debate::previous_segment(const Sentence& s) const {
  return s.segment_id > 0 ? &segments[s.segment_id - 1] : nullptr;
}

const Segment* Debate::next_segment(const Sentence& s) const {
  return s.segment_id + 1 < static_cast<int>(segments.size()) ? &segments[s.segment_id + 1]
                                                              : nullptr;
}

std::string LabelPolicy::describe() const {
  return kind == Kind::Union ? "union" : "source:" + std::string(source_name(source));
}

std::size_t LabeledDataset::sentence_count() const {
  std::size_t n = 0;
  for (const auto& d : debates) n += d.sentences.size();
  return n;
}

const Debate& LabeledDataset::debate(std::string_view id) const {
  for (const auto& d : debates)
    if (d.debate_id == id) return d;
  throw ConfigError("no debate '" + std::string(id) + "' in dataset");
}

const Participants& DatasetMetadata::of(std::string_view debate_id) const {
  auto it = participants.find(std::string(debate_id));
  if (it == participants.end())
    throw ConfigError("no metadata for debate '" + std::string(debate_id) + "'");
  return it->second;
}

DatasetMetadata parse_metadata(std::istream& in, const std::string& file_name) {
  DatasetMetadata meta;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(file_name, line_no, "expected key=value");
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (key == "debates") {
      for (const auto& d : split(value, ',')) {
        auto id = std::string(trim(d));
        if (!id.empty()) meta.order.push_back(id);
      }
      continue;
    }
    const auto dot = key.find('.');
    if (dot == std::string::npos)
      throw ParseError(file_name, line_no, "unknown metadata key '" + key + "'");
    const std::string debate = key.substr(0, dot);
    const std::string field = key.substr(dot + 1);
    auto& p = meta.participants[debate];
    if (field == "candidates") {
      const auto names = split(value, ',');
      if (names.size() != 2)
        throw ParseError(file_name, line_no, "a debate has exactly two candidates");
      p.candidate1 = std::string(trim(names[0]));
      p.candidate2 = std::string(trim(names[1]));
    } else if (field == "moderators") {
      for (const auto& m : split(value, ','))
        if (!trim(m).empty()) p.moderators.emplace_back(trim(m));
    } else if (field.rfind("name.", 0) == 0) {
      p.full_names[field.substr(5)] = value;
    } else {
      throw ParseError(file_name, line_no, "unknown metadata field '" + field + "'");
    }
  }
  if (meta.order.empty())
    for (const auto& [id, _] : meta.participants) meta.order.push_back(id);
  for (const auto& id : meta.order) {
    const auto it = meta.participants.find(id);
    if (it == meta.participants.end() || it->second.candidate1.empty())
      throw ConfigError(file_name + ": debate '" + id + "' has no candidates");
    if (it->second.moderators.empty())
      throw ConfigError(file_name + ": debate '" + id + "' has no moderators");
  }
  return meta;
}

DatasetMetadata read_metadata_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open metadata file " + path);
  return parse_metadata(in, path);
}

void write_metadata(std::ostream& out, const DatasetMetadata& meta) {
  out << "debates=" << join(meta.order, ",") << '\n';
  for (const auto& id : meta.order) {
    const auto& p = meta.of(id);
    out << id << ".candidates=" << p.candidate1 << ',' << p.candidate2 << '\n';
    out << id << ".moderators=" << join(p.moderators, ",") << '\n';
    for (const auto& [label, name] : p.full_names) out << id << ".name." << label << '=' << name << '\n';
  }
}

Debate parse_transcript(std::istream& in, const Participants& participants,
                        const std::string& file_name) {
  auto records = read_records(in, file_name);
  if (records.empty()) throw ParseError(file_name, 0, "transcript has no records");
  const std::string id = records.front().debate_id;
  for (const auto& r : records)
    if (r.debate_id != id)
      throw ParseError(file_name, r.line,
                       "record for debate '" + r.debate_id + "' in transcript of '" + id + "'");
  return build_debate(std::move(records), id, participants, 0, file_name);
}

LabeledDataset parse_dataset(std::istream& in, const DatasetMetadata& meta,
                             const std::string& file_name) {
  auto records = read_records(in, file_name);
  std::map<std::string, std::vector<Record>> by_debate;
  for (auto& r : records) {
    if (std::find(meta.order.begin(), meta.order.end(), r.debate_id) == meta.order.end())
      throw ParseError(file_name, r.line, "debate '" + r.debate_id + "' is not in the metadata");
    by_debate[r.debate_id].push_back(std::move(r));
  }
  LabeledDataset dataset;
  int next_id = 0;
  for (const auto& id : meta.order) {
    auto it = by_debate.find(id);
    if (it == by_debate.end()) continue;
    dataset.debates.push_back(build_debate(std::move(it->second), id, meta.of(id), next_id, file_name));
    next_id += static_cast<int>(dataset.debates.back().sentences.size());
  }
  if (dataset.debates.empty()) throw ParseError(file_name, 0, "transcript has no records");
  return dataset;
}

LabeledDataset read_dataset(const std::string& transcript_path, const std::string& metadata_path) {
  const auto meta = read_metadata_file(metadata_path);
  std::ifstream in(transcript_path);
  if (!in) throw ResourceError("cannot open transcript " + transcript_path);
  return parse_dataset(in, meta, transcript_path);
}

void write_transcript(std::ostream& out, const LabeledDataset& dataset) {
  write_header(out);
  for (const auto& d : dataset.debates) write_rows(out, d);
}

void write_transcript(std::ostream& out, const Debate& debate) {
  write_header(out);
  write_rows(out, debate);
}

DatasetMetadata metadata_of(const LabeledDataset& dataset) {
  DatasetMetadata meta;
  for (const auto& d : dataset.debates) {
    meta.order.push_back(d.debate_id);
    meta.participants[d.debate_id] = d.participants;
  }
  return meta;
}

AgreementTable dataset_stats(const LabeledDataset& dataset) {
  AgreementTable t;
  for (const auto& d : dataset.debates)
    for (const auto& s : d.sentences) {
      ++t.total_sentences;
      const auto n = s.annotated_by.count();
      if (n > 0) ++t.exactly[n];
    }
  std::size_t running = 0;
  for (std::size_t n = kNumSources; n >= 1; --n) {
    running += t.exactly[n];
    t.at_least[n] = running;
  }
  return t;
}

MediumTable medium_counts(const LabeledDataset& dataset) {
  MediumTable t;
  for (auto& v : t.per_debate) v.assign(dataset.debates.size(), 0);
  t.annotations_per_debate.assign(dataset.debates.size(), 0);
  t.annotated_sentences_per_debate.assign(dataset.debates.size(), 0);
  for (std::size_t d = 0; d < dataset.debates.size(); ++d) {
    t.debates.push_back(dataset.debates[d].debate_id);
    for (const auto& s : dataset.debates[d].sentences) {
      for (std::size_t k = 0; k < kNumSources; ++k)
        if (s.annotated_by.test(k)) {
          ++t.per_debate[k][d];
          ++t.total[k];
          ++t.annotations_per_debate[d];
          ++t.total_annotations;
        }
      if (s.annotated_by.any()) {
        ++t.annotated_sentences_per_debate[d];
        ++t.total_annotated_sentences;
      }
    }
  }
  return t;
}

void print_agreement_table(std::ostream& out, const AgreementTable& table) {
  out << "Agreement  Sentences  Cumulative\n";
  for (std::size_t n = kNumSources; n >= 1; --n)
    out << std::setw(9) << n << std::setw(11) << table.exactly[n] << std::setw(12)
        << table.at_least[n] << '\n';
  out << "Total number of sentences: " << table.total_sentences << '\n';
}

void print_medium_table(std::ostream& out, const MediumTable& table) {
  out << std::left << std::setw(16) << "Medium" << std::right;
  for (const auto& d : table.debates) out << std::setw(7) << d;
  out << std::setw(8) << "Total" << '\n';
  for (std::size_t k = 0; k < kNumSources; ++k) {
    out << std::left << std::setw(16) << kSourceNames[k] << std::right;
    for (auto c : table.per_debate[k]) out << std::setw(7) << c;
    out << std::setw(8) << table.total[k] << '\n';
  }
  out << std::left << std::setw(16) << "Annotations" << std::right;
  for (auto c : table.annotations_per_debate) out << std::setw(7) << c;
  out << std::setw(8) << table.total_annotations << '\n';
  out << std::left << std::setw(16) << "Annotated sent." << std::right;
  for (auto c : table.annotated_sentences_per_debate) out << std::setw(7) << c;
  out << std::setw(8) << table.total_annotated_sentences << '\n';
}

std::vector<Fold> split_folds(const LabeledDataset& dataset) {
  const auto n = dataset.debates.size();
  if (n < 2)
    throw ConfigError("cross-validation needs at least two debates, dataset has " +
                      std::to_string(n));
  std::vector<Fold> folds;
  for (std::size_t test = 0; test < n; ++test) {
    Fold f;
    f.index = static_cast<int>(test);
    f.test = test;
    for (std::size_t i = 0; i < n; ++i)
      if (i != test) f.train.push_back(i);
    folds.push_back(std::move(f));
  }
  return folds;
}

LabeledDataset project_labels(const LabeledDataset& dataset, Source source) {
  LabeledDataset out = dataset;
  out.policy = LabelPolicy::single(source);
  return out;
}

}  // namespace claimrank
