#include "nlx/phoc.hpp"

#include <algorithm>
#include <bit>
#include <optional>
#include <sstream>

#include "nlx/error.hpp"
#include "nlx/utf8.hpp"

namespace nlx {

const std::u32string kDefaultCharset =
    U"ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    U"abcdefghijklmnopqrstuvwxyz"
    U"0123456789"
    U"ÄÖÜäöüß"
    U"ĄĆĘŁŃÓŚŹŻąćęłńóśźż"
    U".,;:!?-'\"";

namespace {

void check_position(std::size_t k, std::size_t n) {
  if (n == 0 || k >= n) {
    throw Error(ErrorCode::kDomain, "occupancy: position " + std::to_string(k) +
                                        " outside word of length " + std::to_string(n));
  }
}

// Overlap of character k (of n) with region r (of level), in units of 1/(n*level),
// is compared against half of the character width (level units).
bool in_region(std::int64_t k, std::int64_t n, std::int64_t r, std::int64_t level) {
  const std::int64_t lo = std::max(k * level, r * n);
  const std::int64_t hi = std::min((k + 1) * level, (r + 1) * n);
  return hi > lo && 2 * (hi - lo) >= level;
}

}  // namespace

Occupancy occupancy(std::size_t k, std::size_t n) {
  check_position(k, n);
  return {static_cast<std::int64_t>(k), static_cast<std::int64_t>(k + 1),
          static_cast<std::int64_t>(n)};
}

std::vector<std::size_t> assign_regions(std::size_t k, std::size_t n, std::size_t level) {
  check_position(k, n);
  if (level == 0) throw Error(ErrorCode::kDomain, "assign_regions: level must be positive");
  const auto sk = static_cast<std::int64_t>(k);
  const auto sn = static_cast<std::int64_t>(n);
  const auto sl = static_cast<std::int64_t>(level);
  // Only regions intersecting the character can qualify.
  const std::int64_t first = (sk * sl) / sn;
  const std::int64_t last = std::min(sl - 1, ((sk + 1) * sl - 1) / sn);
  std::vector<std::size_t> regions;
  for (std::int64_t r = first; r <= last; ++r) {
    if (in_region(sk, sn, r, sl)) regions.push_back(static_cast<std::size_t>(r));
  }
  return regions;
}

PhocConfig::PhocConfig(std::u32string charset, std::vector<int> levels, bool case_sensitive)
    : levels_(std::move(levels)), case_sensitive_(case_sensitive) {
  if (charset.empty()) throw Error(ErrorCode::kInvalidArgument, "PHOC charset is empty");
  if (levels_.empty()) throw Error(ErrorCode::kInvalidArgument, "PHOC levels are empty");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i] <= 0) throw Error(ErrorCode::kInvalidArgument, "PHOC levels must be positive");
    if (i > 0 && levels_[i] <= levels_[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "PHOC levels must be strictly increasing");
    }
  }
  for (char32_t c : charset) {
    const char32_t key = case_sensitive_ ? c : fold_case(c);
    if (lookup_.contains(key)) {
      if (case_sensitive_) {
        throw Error(ErrorCode::kInvalidArgument,
                    "PHOC charset has duplicate entry '" + encode_utf8(std::u32string(1, c)) + "'");
      }
      continue;
    }
    lookup_.emplace(key, static_cast<int>(charset_.size()));
    charset_.push_back(key);
  }
  std::size_t offset = 0;
  for (int level : levels_) {
    offsets_.push_back(offset);
    offset += static_cast<std::size_t>(level) * charset_.size();
  }
  dimension_ = offset;
}

PhocConfig PhocConfig::standard() { return PhocConfig(kDefaultCharset, {1, 2, 4, 8}, true); }

int PhocConfig::char_index(char32_t c) const {
  const auto it = lookup_.find(case_sensitive_ ? c : fold_case(c));
  return it == lookup_.end() ? -1 : it->second;
}

std::string PhocConfig::to_text() const {
  std::ostringstream out;
  out << "phoc-config 1\nlevels";
  for (int level : levels_) out << ' ' << level;
  out << "\ncase-sensitive " << (case_sensitive_ ? 1 : 0) << "\ncharset " << encode_utf8(charset_)
      << '\n';
  return out.str();
}

PhocConfig PhocConfig::from_text(std::string_view text) {
  auto fail = [](const std::string& why) -> Error {
    return Error(ErrorCode::kParse, "PHOC config: " + why);
  };
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  if (lines.size() < 4 || lines[0] != "phoc-config 1") throw fail("missing 'phoc-config 1' header");

  std::vector<int> levels;
  std::optional<bool> case_sensitive;
  std::optional<std::u32string> charset;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (line.empty()) continue;
    if (line.starts_with("levels ")) {
      std::istringstream in{std::string(line.substr(7))};
      int level = 0;
      while (in >> level) levels.push_back(level);
      if (!in.eof()) throw fail("bad level list");
    } else if (line == "case-sensitive 1" || line == "case-sensitive 0") {
      case_sensitive = line.back() == '1';
    } else if (line.starts_with("charset ")) {
      charset = decode_utf8(line.substr(8));
    } else {
      throw fail("unknown line '" + std::string(line) + "'");
    }
  }
  if (levels.empty() || !case_sensitive || !charset) throw fail("incomplete document");
  return PhocConfig(std::move(*charset), std::move(levels), *case_sensitive);
}

PhocVector::PhocVector(std::size_t dimension) : size_(dimension), words_((dimension + 63) / 64, 0) {}

std::size_t PhocVector::count() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::vector<std::uint8_t> PhocVector::pack() const {
  std::vector<std::uint8_t> bytes((size_ + 7) / 8, 0);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
  }
  return bytes;
}

PhocVector PhocVector::unpack(std::span<const std::uint8_t> bytes, std::size_t dimension) {
  if (bytes.size() != (dimension + 7) / 8) {
    throw Error(ErrorCode::kInvalidArgument, "packed PHOC row has wrong length");
  }
  PhocVector v(dimension);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    v.words_[i / 8] |= std::uint64_t{bytes[i]} << (8 * (i % 8));
  }
  // Padding bits beyond the dimension must be clear.
  if (dimension % 64 != 0 && !v.words_.empty() && (v.words_.back() >> (dimension % 64)) != 0) {
    throw Error(ErrorCode::kInvalidArgument, "packed PHOC row has padding bits set");
  }
  return v;
}

void PhocVector::to_reals(std::span<double> out) const {
  if (out.size() != size_) throw Error(ErrorCode::kInvalidArgument, "to_reals: size mismatch");
  for (std::size_t i = 0; i < size_; ++i) out[i] = test(i) ? 1.0 : 0.0;
}

bool encodable(std::u32string_view word, const PhocConfig& config) {
  return std::any_of(word.begin(), word.end(),
                     [&](char32_t c) { return config.char_index(c) >= 0; });
}

PhocVector encode(std::u32string_view word, const PhocConfig& config) {
  if (word.empty()) throw Error(ErrorCode::kEncoding, "cannot encode an empty word");
  if (!encodable(word, config)) {
    throw Error(ErrorCode::kEncoding,
                "word '" + encode_utf8(word) + "' has no characters in the PHOC charset");
  }
  PhocVector v(config.dimension());
  const std::size_t n = word.size();
  const std::size_t alphabet = config.charset().size();
  const auto& levels = config.levels();
  for (std::size_t k = 0; k < n; ++k) {
    const int c = config.char_index(word[k]);
    if (c < 0) continue;
    for (std::size_t li = 0; li < levels.size(); ++li) {
      const auto level = static_cast<std::size_t>(levels[li]);
      const std::size_t base = config.level_offset(li);
      for (std::size_t r : assign_regions(k, n, level)) {
        v.set(base + r * alphabet + static_cast<std::size_t>(c));
      }
    }
  }
  return v;
}

PhocVector encode(std::string_view utf8_word, const PhocConfig& config) {
  return encode(decode_utf8(utf8_word), config);
}

}  // namespace nlx
