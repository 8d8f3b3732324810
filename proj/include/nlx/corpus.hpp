#pragma once

// OCR token streams, ground-truth alignments and the deduplicated vocabulary.
//
// Token TSV (UTF-8, tab separated, header required):
//   page_id  word_id  text  x0  y0  x1  y1  confidence
// confidence is a real in [0, 100]; an empty field or -1 (the OCR engine's
// "no score" marker) means absent. Confidence is carried but never used for
// ranking.
//
// Alignment TSV:
//   page_id  word_id  ocr_text  gold_text

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nlx {

struct Box {
  std::int32_t x0 = 0;
  std::int32_t y0 = 0;
  std::int32_t x1 = 0;
  std::int32_t y1 = 0;

  friend bool operator==(const Box&, const Box&) = default;
};

struct Candidate {
  std::string page_id;
  std::uint64_t word_id = 0;
  std::string text;
  Box box;
  std::optional<double> confidence;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct AlignmentRecord {
  std::string page_id;
  std::uint64_t word_id = 0;
  std::string ocr_text;
  std::string gold_text;

  friend bool operator==(const AlignmentRecord&, const AlignmentRecord&) = default;
};

// One occurrence of a vocabulary token.
struct Occurrence {
  std::string page_id;
  std::uint64_t word_id = 0;
  Box box;
  std::optional<double> confidence;

  friend bool operator==(const Occurrence&, const Occurrence&) = default;
};

struct LineError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

template <typename T>
struct ParseResult {
  std::vector<T> items;
  std::vector<LineError> errors;

  bool ok() const { return errors.empty(); }
};

inline constexpr const char* kTokenHeader = "page_id\tword_id\ttext\tx0\ty0\tx1\ty1\tconfidence";
inline constexpr const char* kAlignmentHeader = "page_id\tword_id\tocr_text\tgold_text";

// Malformed lines are skipped and reported with their line numbers. Throws
// Error(kIo) when the stream itself fails.
ParseResult<Candidate> parse_tokens(std::istream& in);
ParseResult<AlignmentRecord> parse_alignments(std::istream& in);

ParseResult<Candidate> read_tokens_file(const std::string& path);
ParseResult<AlignmentRecord> read_alignments_file(const std::string& path);

void write_tokens(std::ostream& out, const std::vector<Candidate>& candidates);
void write_alignments(std::ostream& out, const std::vector<AlignmentRecord>& records);
void write_line_errors(std::ostream& out, const std::vector<LineError>& errors);

// Alignment records that reference no candidate, or whose ocr_text differs
// from the candidate text. Empty when every record resolves.
std::vector<std::string> dangling_alignments(const std::vector<Candidate>& candidates,
                                             const std::vector<AlignmentRecord>& records);

// Tokens sorted bytewise (code point order for UTF-8) and deduplicated by
// exact equality; postings[i] lists the occurrences of tokens[i] in input order.
struct Vocabulary {
  std::vector<std::string> tokens;
  std::vector<std::vector<Occurrence>> postings;

  std::size_t size() const { return tokens.size(); }
  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

// Throws Error(kInvalidArgument) for an empty candidate list.
Vocabulary build_vocab(const std::vector<Candidate>& candidates);

}  // namespace nlx
