#include "nlx/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string_view>
#include <utility>

#include "nlx/error.hpp"
#include "nlx/utf8.hpp"

namespace nlx {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

bool parse_double(std::string_view s, double& out) {
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty() && std::isfinite(out);
}

bool valid_text(std::string_view s, std::string& why) {
  if (s.empty()) {
    why = "empty text";
    return false;
  }
  try {
    decode_utf8(s);
  } catch (const Error& e) {
    why = e.what();
    return false;
  }
  return true;
}

// Reads lines, strips a trailing CR, checks the header, and hands each data
// line to parse_line(fields, line_number, errors).
template <typename T, typename Fn>
ParseResult<T> parse_tsv(std::istream& in, std::string_view header, std::size_t columns,
                         Fn&& parse_line) {
  ParseResult<T> result;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number == 1) {
      if (line != header) {
        result.errors.push_back({1, "expected header '" + std::string(header) + "'"});
      }
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != columns) {
      result.errors.push_back({number, "expected " + std::to_string(columns) + " fields, found " +
                                           std::to_string(fields.size())});
      continue;
    }
    parse_line(fields, number, result);
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read error on input stream");
  return result;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

ParseResult<Candidate> parse_tokens(std::istream& in) {
  std::set<std::pair<std::string, std::uint64_t>> seen;
  return parse_tsv<Candidate>(
      in, kTokenHeader, 8,
      [&](const std::vector<std::string_view>& f, std::size_t line, ParseResult<Candidate>& out) {
        auto fail = [&](const std::string& why) { out.errors.push_back({line, why}); };
        Candidate c;
        c.page_id = std::string(f[0]);
        if (c.page_id.empty()) return fail("empty page_id");
        if (!parse_int(f[1], c.word_id)) return fail("bad word_id '" + std::string(f[1]) + "'");
        std::string why;
        if (!valid_text(f[2], why)) return fail(why);
        c.text = std::string(f[2]);
        if (!parse_int(f[3], c.box.x0) || !parse_int(f[4], c.box.y0) ||
            !parse_int(f[5], c.box.x1) || !parse_int(f[6], c.box.y1)) {
          return fail("bad box coordinates");
        }
        if (c.box.x0 >= c.box.x1 || c.box.y0 >= c.box.y1) {
          return fail("box geometry: need x0 < x1 and y0 < y1");
        }
        if (!f[7].empty() && f[7] != "-1") {
          double conf = 0.0;
          if (!parse_double(f[7], conf) || conf < 0.0 || conf > 100.0) {
            return fail("confidence must be in [0, 100]");
          }
          c.confidence = conf;
        }
        if (!seen.emplace(c.page_id, c.word_id).second) {
          return fail("duplicate (page_id, word_id) = (" + c.page_id + ", " +
                      std::to_string(c.word_id) + ")");
        }
        out.items.push_back(std::move(c));
      });
}

ParseResult<AlignmentRecord> parse_alignments(std::istream& in) {
  return parse_tsv<AlignmentRecord>(
      in, kAlignmentHeader, 4,
      [](const std::vector<std::string_view>& f, std::size_t line,
         ParseResult<AlignmentRecord>& out) {
        auto fail = [&](const std::string& why) { out.errors.push_back({line, why}); };
        AlignmentRecord r;
        r.page_id = std::string(f[0]);
        if (r.page_id.empty()) return fail("empty page_id");
        if (!parse_int(f[1], r.word_id)) return fail("bad word_id '" + std::string(f[1]) + "'");
        std::string why;
        if (!valid_text(f[2], why)) return fail("ocr_text: " + why);
        if (!valid_text(f[3], why)) return fail("gold_text: " + why);
        r.ocr_text = std::string(f[2]);
        r.gold_text = std::string(f[3]);
        out.items.push_back(std::move(r));
      });
}

ParseResult<Candidate> read_tokens_file(const std::string& path) {
  auto in = open_input(path);
  return parse_tokens(in);
}

ParseResult<AlignmentRecord> read_alignments_file(const std::string& path) {
  auto in = open_input(path);
  return parse_alignments(in);
}

void write_tokens(std::ostream& out, const std::vector<Candidate>& candidates) {
  out << kTokenHeader << '\n';
  for (const auto& c : candidates) {
    out << c.page_id << '\t' << c.word_id << '\t' << c.text << '\t' << c.box.x0 << '\t'
        << c.box.y0 << '\t' << c.box.x1 << '\t' << c.box.y1 << '\t';
    if (c.confidence) {
      char buf[32];
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *c.confidence);
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

void write_alignments(std::ostream& out, const std::vector<AlignmentRecord>& records) {
  out << kAlignmentHeader << '\n';
  for (const auto& r : records) {
    out << r.page_id << '\t' << r.word_id << '\t' << r.ocr_text << '\t' << r.gold_text << '\n';
  }
}

void write_line_errors(std::ostream& out, const std::vector<LineError>& errors) {
  for (const auto& e : errors) out << "line " << e.line << ": " << e.message << '\n';
}

std::vector<std::string> dangling_alignments(const std::vector<Candidate>& candidates,
                                             const std::vector<AlignmentRecord>& records) {
  std::map<std::pair<std::string_view, std::uint64_t>, const Candidate*> by_id;
  for (const auto& c : candidates) by_id.emplace(std::pair{std::string_view(c.page_id), c.word_id}, &c);
  std::vector<std::string> dangling;
  for (const auto& r : records) {
    const auto it = by_id.find({r.page_id, r.word_id});
    const std::string id = "(" + r.page_id + ", " + std::to_string(r.word_id) + ")";
    if (it == by_id.end()) {
      dangling.push_back(id + ": no such token");
    } else if (it->second->text != r.ocr_text) {
      dangling.push_back(id + ": ocr_text '" + r.ocr_text + "' differs from token '" +
                         it->second->text + "'");
    }
  }
  return dangling;
}

Vocabulary build_vocab(const std::vector<Candidate>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "no candidates to index");
  std::map<std::string_view, std::vector<Occurrence>> grouped;
  for (const auto& c : candidates) {
    grouped[c.text].push_back({c.page_id, c.word_id, c.box, c.confidence});
  }
  Vocabulary vocab;
  vocab.tokens.reserve(grouped.size());
  vocab.postings.reserve(grouped.size());
  for (auto& [token, occurrences] : grouped) {
    vocab.tokens.emplace_back(token);
    vocab.postings.push_back(std::move(occurrences));
  }
  return vocab;
}

}  // namespace nlx
