#pragma once

// Pyramidal histogram of characters (PHOC).
//
// A word of n code points is split into l equal regions at every pyramid
// level l. Character k occupies [k/n, (k+1)/n]; it belongs to region r of
// level l when at least half of its own occupancy overlaps [r/l, (r+1)/l].
// An exact 50/50 split assigns the character to both regions. All interval
// arithmetic is done on integers scaled by n*l, so boundary cases are exact.
//
// Bit layout: level-major, then region within the level, then charset index.
// The bit for (level index i, region r, char c) is
//   level_offset(i) + r * |charset| + c.
//
// A character at position k of an n-letter word is assigned to some region of
// level l iff l <= 2n; deeper levels of very short words stay empty.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nlx {

// Closed interval [begin_num/den, end_num/den].
struct Occupancy {
  std::int64_t begin_num = 0;
  std::int64_t end_num = 0;
  std::int64_t den = 1;

  double begin() const { return static_cast<double>(begin_num) / static_cast<double>(den); }
  double end() const { return static_cast<double>(end_num) / static_cast<double>(den); }
};

// Normalized occupancy of position k in a word of length n.
// Throws Error(kDomain) unless 0 <= k < n.
Occupancy occupancy(std::size_t k, std::size_t n);

// Regions r in [0, level) whose overlap with occupancy(k, n) covers at least
// half of the character's width, in ascending order.
std::vector<std::size_t> assign_regions(std::size_t k, std::size_t n, std::size_t level);

// The 96-entry default character set: ASCII letters and digits, German and
// Polish letters with diacritics, and nine punctuation marks.
extern const std::u32string kDefaultCharset;

class PhocConfig {
 public:
  // Validates: charset non-empty and unique, levels positive and strictly
  // increasing. With case_sensitive = false the charset is case-folded and
  // duplicates created by folding are merged, keeping the first occurrence.
  PhocConfig(std::u32string charset, std::vector<int> levels, bool case_sensitive = true);

  // kDefaultCharset, levels {1, 2, 4, 8}, case-sensitive: 1440 bits.
  static PhocConfig standard();

  const std::u32string& charset() const noexcept { return charset_; }
  const std::vector<int>& levels() const noexcept { return levels_; }
  bool case_sensitive() const noexcept { return case_sensitive_; }

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t level_offset(std::size_t level_index) const { return offsets_.at(level_index); }

  // Charset index of c (folded first when case-insensitive), or -1.
  int char_index(char32_t c) const;

  // Small line-oriented text document:
  //   phoc-config 1
  //   levels 1 2 4 8
  //   case-sensitive 1
  //   charset <UTF-8 characters up to end of line>
  std::string to_text() const;
  static PhocConfig from_text(std::string_view text);

  friend bool operator==(const PhocConfig& a, const PhocConfig& b) {
    return a.charset_ == b.charset_ && a.levels_ == b.levels_ &&
           a.case_sensitive_ == b.case_sensitive_;
  }

 private:
  std::u32string charset_;
  std::vector<int> levels_;
  bool case_sensitive_;
  std::size_t dimension_ = 0;
  std::vector<std::size_t> offsets_;
  std::unordered_map<char32_t, int> lookup_;
};

// Fixed-length bit vector, packed into 64-bit words (bit i lives in word i/64
// at position i%64).
class PhocVector {
 public:
  PhocVector() = default;
  explicit PhocVector(std::size_t dimension);

  std::size_t size() const noexcept { return size_; }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  std::size_t count() const noexcept;
  bool none() const noexcept { return count() == 0; }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  // ceil(size/8) bytes, bit i in byte i/8 at position i%8 (LSB first).
  std::vector<std::uint8_t> pack() const;
  static PhocVector unpack(std::span<const std::uint8_t> bytes, std::size_t dimension);

  // Writes bits as 0.0 / 1.0; out.size() must equal size().
  void to_reals(std::span<double> out) const;

  friend bool operator==(const PhocVector&, const PhocVector&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

// Throws Error(kEncoding) for an empty word or one with no in-charset
// character. Out-of-charset characters count towards the word length.
PhocVector encode(std::u32string_view word, const PhocConfig& config);
PhocVector encode(std::string_view utf8_word, const PhocConfig& config);

// True when encode would succeed.
bool encodable(std::u32string_view word, const PhocConfig& config);

}  // namespace nlx
