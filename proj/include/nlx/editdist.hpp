#pragma once

// Levenshtein distance over code points, its weighted variant, and the
// exhaustive edit-distance ranking baseline.
//
// Strings are compared code point by code point (no grapheme clustering, no
// normalization): "ß" vs "ss" costs 2. Transpositions are not a primitive.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nlx {

// Per-event edit costs. Unlisted events use the defaults; substituting a
// character for itself always costs 0. Costs describe the edits that turn the
// first argument of weighted_levenshtein into the second.
class CostTable {
 public:
  CostTable() = default;

  double substitution(char32_t from, char32_t to) const;
  double insertion(char32_t c) const;
  double deletion(char32_t c) const;

  // Throws Error(kInvalidArgument) for negative or non-finite costs and for a
  // nonzero self-substitution.
  void set_substitution(char32_t from, char32_t to, double cost);
  void set_insertion(char32_t c, double cost);
  void set_deletion(char32_t c, double cost);
  void set_defaults(double substitution, double insertion, double deletion);

  double default_substitution() const { return default_sub_; }
  double default_insertion() const { return default_ins_; }
  double default_deletion() const { return default_del_; }

  const std::map<std::pair<char32_t, char32_t>, double>& substitutions() const { return sub_; }
  const std::map<char32_t, double>& insertions() const { return ins_; }
  const std::map<char32_t, double>& deletions() const { return del_; }

  // Plain text, one event per line:
  //   default sub|ins|del <cost>
  //   sub <from> <to> <cost>
  //   ins <char> <cost>
  //   del <char> <cost>
  // Characters are written as U+XXXX.
  std::string to_text() const;
  static CostTable from_text(std::string_view text);

  friend bool operator==(const CostTable&, const CostTable&) = default;

 private:
  double default_sub_ = 1.0;
  double default_ins_ = 1.0;
  double default_del_ = 1.0;
  std::map<std::pair<char32_t, char32_t>, double> sub_;
  std::map<char32_t, double> ins_;
  std::map<char32_t, double> del_;
};

std::size_t levenshtein(std::u32string_view s, std::u32string_view t);
std::size_t levenshtein(std::string_view utf8_s, std::string_view utf8_t);

double weighted_levenshtein(std::u32string_view s, std::u32string_view t, const CostTable& costs);

enum class EditOp { kMatch, kSubstitute, kInsert, kDelete };

struct EditStep {
  EditOp op;
  char32_t from = 0;  // source character (match, substitute, delete)
  char32_t to = 0;    // target character (match, substitute, insert)
};

// A minimal unit-cost script turning s into t. Among optimal scripts the
// backtrace prefers diagonal steps, then deletions, then insertions.
std::vector<EditStep> edit_script(std::u32string_view s, std::u32string_view t);

struct EditHit {
  std::size_t index = 0;
  double distance = 0.0;
};

struct EditRanking {
  std::vector<EditHit> hits;  // ascending distance, ties by ascending index
  double seconds = 0.0;       // wall time of the scan and sort
};

// Exhaustive scan; top_n == 0 or top_n > |vocab| returns everything.
EditRanking rank_by_edit_distance(std::u32string_view query, std::span<const std::u32string> vocab,
                                  std::size_t top_n = 0);

// Weighted variant: scores weighted_levenshtein(candidate, query), i.e. the
// cost of turning the OCR reading into the query.
EditRanking rank_by_weighted_edit_distance(std::u32string_view query,
                                           std::span<const std::u32string> vocab,
                                           const CostTable& costs, std::size_t top_n = 0);

// Aligns each (ocr_text, gold_text) pair with edit_script(ocr, gold), counts
// substitution, insertion and deletion events, and maps each observed event
// to -log((count + 1) / (total + events + 1)); unobserved events get
// -log(1 / (total + events + 1)). All costs are then divided by the largest
// one so that unobserved events cost 1. Without any event the default table
// is returned. Throws Error(kInvalidArgument) for an empty list.
CostTable estimate_confusion_matrix(std::span<const std::pair<std::string, std::string>> pairs);

}  // namespace nlx
