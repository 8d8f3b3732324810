#include "nlx/editdist.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

#include "nlx/error.hpp"
#include "nlx/utf8.hpp"

namespace nlx {

namespace {

void check_cost(double cost) {
  if (!(cost >= 0.0) || !std::isfinite(cost)) {
    throw Error(ErrorCode::kInvalidArgument, "edit costs must be finite and >= 0");
  }
}

std::string code_point(char32_t c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(c));
  return buf;
}

char32_t parse_code_point(const std::string& s) {
  if (s.size() < 3 || s[0] != 'U' || s[1] != '+') {
    throw Error(ErrorCode::kParse, "cost table: bad code point '" + s + "'");
  }
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s.substr(2), &used, 16);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() - 2 || v > 0x10FFFF) {
    throw Error(ErrorCode::kParse, "cost table: bad code point '" + s + "'");
  }
  return static_cast<char32_t>(v);
}

// Two-row buffer reused per thread.
std::vector<std::uint32_t>& unit_rows(std::size_t width) {
  thread_local std::vector<std::uint32_t> rows;
  if (rows.size() < 2 * width) rows.resize(2 * width);
  return rows;
}

template <typename Dist, typename Fn>
EditRanking rank_impl(std::span<const std::u32string> vocab, std::size_t top_n, Fn&& distance) {
  const auto start = std::chrono::steady_clock::now();
  EditRanking ranking;
  ranking.hits.resize(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    ranking.hits[i] = {i, static_cast<double>(static_cast<Dist>(distance(vocab[i])))};
  }
  const auto better = [](const EditHit& a, const EditHit& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  if (top_n == 0 || top_n >= ranking.hits.size()) {
    std::sort(ranking.hits.begin(), ranking.hits.end(), better);
  } else {
    std::partial_sort(ranking.hits.begin(), ranking.hits.begin() + static_cast<std::ptrdiff_t>(top_n),
                      ranking.hits.end(), better);
    ranking.hits.resize(top_n);
  }
  ranking.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return ranking;
}

}  // namespace

double CostTable::substitution(char32_t from, char32_t to) const {
  if (from == to) return 0.0;
  const auto it = sub_.find({from, to});
  return it == sub_.end() ? default_sub_ : it->second;
}

double CostTable::insertion(char32_t c) const {
  const auto it = ins_.find(c);
  return it == ins_.end() ? default_ins_ : it->second;
}

double CostTable::deletion(char32_t c) const {
  const auto it = del_.find(c);
  return it == del_.end() ? default_del_ : it->second;
}

void CostTable::set_substitution(char32_t from, char32_t to, double cost) {
  check_cost(cost);
  if (from == to) {
    if (cost != 0.0) throw Error(ErrorCode::kInvalidArgument, "cost(c, c) must be 0");
    return;
  }
  sub_[{from, to}] = cost;
}

void CostTable::set_insertion(char32_t c, double cost) {
  check_cost(cost);
  ins_[c] = cost;
}

void CostTable::set_deletion(char32_t c, double cost) {
  check_cost(cost);
  del_[c] = cost;
}

void CostTable::set_defaults(double substitution, double insertion, double deletion) {
  check_cost(substitution);
  check_cost(insertion);
  check_cost(deletion);
  default_sub_ = substitution;
  default_ins_ = insertion;
  default_del_ = deletion;
}

std::string CostTable::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "default sub " << default_sub_ << "\ndefault ins " << default_ins_ << "\ndefault del "
      << default_del_ << '\n';
  for (const auto& [key, cost] : sub_) {
    out << "sub " << code_point(key.first) << ' ' << code_point(key.second) << ' ' << cost << '\n';
  }
  for (const auto& [c, cost] : ins_) out << "ins " << code_point(c) << ' ' << cost << '\n';
  for (const auto& [c, cost] : del_) out << "del " << code_point(c) << ' ' << cost << '\n';
  return out.str();
}

CostTable CostTable::from_text(std::string_view text) {
  CostTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string kind;
    fields >> kind;
    auto fail = [&] {
      return Error(ErrorCode::kParse, "cost table line " + std::to_string(number) + ": '" + line + "'");
    };
    if (kind == "default") {
      std::string which;
      double cost = 0.0;
      if (!(fields >> which >> cost)) throw fail();
      if (which == "sub") {
        table.set_defaults(cost, table.default_ins_, table.default_del_);
      } else if (which == "ins") {
        table.set_defaults(table.default_sub_, cost, table.default_del_);
      } else if (which == "del") {
        table.set_defaults(table.default_sub_, table.default_ins_, cost);
      } else {
        throw fail();
      }
    } else if (kind == "sub") {
      std::string a;
      std::string b;
      double cost = 0.0;
      if (!(fields >> a >> b >> cost)) throw fail();
      table.set_substitution(parse_code_point(a), parse_code_point(b), cost);
    } else if (kind == "ins" || kind == "del") {
      std::string a;
      double cost = 0.0;
      if (!(fields >> a >> cost)) throw fail();
      if (kind == "ins") {
        table.set_insertion(parse_code_point(a), cost);
      } else {
        table.set_deletion(parse_code_point(a), cost);
      }
    } else {
      throw fail();
    }
  }
  return table;
}

std::size_t levenshtein(std::u32string_view s, std::u32string_view t) {
  if (s.size() < t.size()) std::swap(s, t);
  const std::size_t width = t.size() + 1;
  auto& rows = unit_rows(width);
  std::uint32_t* prev = rows.data();
  std::uint32_t* cur = rows.data() + width;
  for (std::size_t j = 0; j < width; ++j) prev[j] = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= s.size(); ++i) {
    cur[0] = static_cast<std::uint32_t>(i);
    const char32_t si = s[i - 1];
    for (std::size_t j = 1; j < width; ++j) {
      const std::uint32_t diagonal = prev[j - 1] + (si == t[j - 1] ? 0U : 1U);
      cur[j] = std::min({diagonal, prev[j] + 1U, cur[j - 1] + 1U});
    }
    std::swap(prev, cur);
  }
  return prev[t.size()];
}

std::size_t levenshtein(std::string_view utf8_s, std::string_view utf8_t) {
  return levenshtein(decode_utf8(utf8_s), decode_utf8(utf8_t));
}

double weighted_levenshtein(std::u32string_view s, std::u32string_view t, const CostTable& costs) {
  const std::size_t width = t.size() + 1;
  std::vector<double> prev(width);
  std::vector<double> cur(width);
  prev[0] = 0.0;
  for (std::size_t j = 1; j < width; ++j) prev[j] = prev[j - 1] + costs.insertion(t[j - 1]);
  for (std::size_t i = 1; i <= s.size(); ++i) {
    const char32_t si = s[i - 1];
    cur[0] = prev[0] + costs.deletion(si);
    for (std::size_t j = 1; j < width; ++j) {
      cur[j] = std::min({prev[j - 1] + costs.substitution(si, t[j - 1]), prev[j] + costs.deletion(si),
                         cur[j - 1] + costs.insertion(t[j - 1])});
    }
    std::swap(prev, cur);
  }
  return prev[t.size()];
}

std::vector<EditStep> edit_script(std::u32string_view s, std::u32string_view t) {
  const std::size_t rows = s.size() + 1;
  const std::size_t cols = t.size() + 1;
  std::vector<std::uint32_t> table(rows * cols);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return table[i * cols + j]; };
  for (std::size_t i = 0; i < rows; ++i) at(i, 0) = static_cast<std::uint32_t>(i);
  for (std::size_t j = 0; j < cols; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i < rows; ++i) {
    for (std::size_t j = 1; j < cols; ++j) {
      at(i, j) = std::min({at(i - 1, j - 1) + (s[i - 1] == t[j - 1] ? 0U : 1U), at(i - 1, j) + 1U,
                           at(i, j - 1) + 1U});
    }
  }
  std::vector<EditStep> steps;
  std::size_t i = s.size();
  std::size_t j = t.size();
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (s[i - 1] == t[j - 1] ? 0U : 1U)) {
      steps.push_back({s[i - 1] == t[j - 1] ? EditOp::kMatch : EditOp::kSubstitute, s[i - 1], t[j - 1]});
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1U) {
      steps.push_back({EditOp::kDelete, s[i - 1], 0});
      --i;
    } else {
      steps.push_back({EditOp::kInsert, 0, t[j - 1]});
      --j;
    }
  }
  std::reverse(steps.begin(), steps.end());
  return steps;
}

EditRanking rank_by_edit_distance(std::u32string_view query, std::span<const std::u32string> vocab,
                                  std::size_t top_n) {
  return rank_impl<std::size_t>(vocab, top_n,
                                [&](const std::u32string& token) { return levenshtein(query, token); });
}

EditRanking rank_by_weighted_edit_distance(std::u32string_view query,
                                           std::span<const std::u32string> vocab,
                                           const CostTable& costs, std::size_t top_n) {
  return rank_impl<double>(vocab, top_n, [&](const std::u32string& token) {
    return weighted_levenshtein(token, query, costs);
  });
}

CostTable estimate_confusion_matrix(std::span<const std::pair<std::string, std::string>> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::kInvalidArgument, "confusion matrix needs at least one pair");
  std::map<std::pair<char32_t, char32_t>, std::size_t> subs;
  std::map<char32_t, std::size_t> ins;
  std::map<char32_t, std::size_t> dels;
  std::size_t total = 0;
  for (const auto& [ocr, gold] : pairs) {
    for (const auto& step : edit_script(decode_utf8(ocr), decode_utf8(gold))) {
      switch (step.op) {
        case EditOp::kMatch:
          continue;
        case EditOp::kSubstitute:
          ++subs[{step.from, step.to}];
          break;
        case EditOp::kInsert:
          ++ins[step.to];
          break;
        case EditOp::kDelete:
          ++dels[step.from];
          break;
      }
      ++total;
    }
  }
  CostTable table;
  if (total == 0) return table;
  const double events = static_cast<double>(subs.size() + ins.size() + dels.size());
  const double denom = static_cast<double>(total) + events + 1.0;
  const double unseen = -std::log(1.0 / denom);
  auto cost = [&](std::size_t count) {
    return -std::log((static_cast<double>(count) + 1.0) / denom) / unseen;
  };
  for (const auto& [key, count] : subs) table.set_substitution(key.first, key.second, cost(count));
  for (const auto& [c, count] : ins) table.set_insertion(c, cost(count));
  for (const auto& [c, count] : dels) table.set_deletion(c, cost(count));
  return table;
}

}  // namespace nlx
