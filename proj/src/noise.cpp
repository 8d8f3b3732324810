#include "nlx/noise.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>

#include "nlx/editdist.hpp"
#include "nlx/error.hpp"
#include "nlx/phoc.hpp"
#include "nlx/utf8.hpp"

namespace nlx {

namespace {

class Stream {
 public:
  explicit Stream(std::initializer_list<std::uint64_t> parts) {
    std::vector<std::uint32_t> words;
    for (auto p : parts) {
      words.push_back(static_cast<std::uint32_t>(p));
      words.push_back(static_cast<std::uint32_t>(p >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

char32_t draw_weighted(const std::vector<std::pair<char32_t, double>>& weights, Stream& rng) {
  double total = 0.0;
  for (const auto& [c, w] : weights) total += w;
  const double target = rng.uniform() * total;
  double acc = 0.0;
  for (const auto& [c, w] : weights) {
    acc += w;
    if (target < acc) return c;
  }
  return weights.back().first;
}

char32_t draw_insert(const NoiseChannel& ch, const std::u32string& alphabet, Stream& rng) {
  const auto it = ch.confusion.find(U'\0');
  if (it != ch.confusion.end()) return draw_weighted(it->second, rng);
  return alphabet[rng.below(alphabet.size())];
}

char32_t draw_substitute(char32_t c, const NoiseChannel& ch, const std::u32string& alphabet,
                         Stream& rng) {
  const auto it = ch.confusion.find(c);
  if (it != ch.confusion.end()) return draw_weighted(it->second, rng);
  const auto self = alphabet.find(c);
  if (self == std::u32string::npos) return alphabet[rng.below(alphabet.size())];
  if (alphabet.size() == 1) return c;
  // Uniform over the alphabet without c.
  std::size_t pick = rng.below(alphabet.size() - 1);
  if (pick >= self) ++pick;
  return alphabet[pick];
}

std::u32string corrupt_with(std::u32string_view word, const NoiseChannel& ch, Stream& rng) {
  const std::u32string& alphabet = ch.alphabet.empty() ? kDefaultCharset : ch.alphabet;
  std::u32string out;
  out.reserve(word.size() + 4);
  const double del_edge = ch.deletion;
  const double sub_edge = del_edge + ch.substitution;
  const double ins_edge = sub_edge + ch.insertion;
  for (char32_t c : word) {
    const double u = rng.uniform();
    if (u < del_edge) continue;
    if (u < sub_edge) {
      out.push_back(draw_substitute(c, ch, alphabet, rng));
    } else if (u < ins_edge) {
      out.push_back(c);
      out.push_back(draw_insert(ch, alphabet, rng));
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string page_name(std::size_t page) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "p%03zu", page + 1);
  return buf;
}

}  // namespace

void NoiseChannel::validate() const {
  for (double r : {substitution, deletion, insertion}) {
    if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "noise rates must be in [0, 1]");
  }
  if (substitution + deletion + insertion > 1.0 + 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "noise rates must sum to at most 1");
  }
  for (const auto& [c, weights] : confusion) {
    double total = 0.0;
    for (const auto& [to, w] : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw Error(ErrorCode::kInvalidArgument, "confusion weights must be finite and >= 0");
      }
      total += w;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::kInvalidArgument, "confusion weights must not all be 0");
  }
}

NoiseChannel noise_profile(std::string_view name, std::uint64_t seed) {
  NoiseChannel ch;
  ch.seed = seed;
  if (name == "none") {
    return ch;
  }
  if (name == "light") {
    ch.substitution = 0.10;
    ch.deletion = 0.025;
    ch.insertion = 0.025;
  } else if (name == "default") {
    ch.substitution = 0.27;
    ch.deletion = 0.07;
    ch.insertion = 0.07;
  } else if (name == "heavy") {
    ch.substitution = 0.40;
    ch.deletion = 0.10;
    ch.insertion = 0.10;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown noise profile '" + std::string(name) +
                                                 "' (expected none, light, default, heavy)");
  }
  return ch;
}

std::u32string corrupt(std::u32string_view word, const NoiseChannel& channel) {
  channel.validate();
  Stream rng({channel.seed});
  return corrupt_with(word, channel, rng);
}

std::string corrupt(std::string_view utf8_word, const NoiseChannel& channel) {
  return encode_utf8(corrupt(decode_utf8(utf8_word), channel));
}

std::vector<LexiconEntry> parse_lexicon(std::string_view text) {
  std::vector<LexiconEntry> entries;
  std::size_t number = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    auto fail = [&] {
      return Error(ErrorCode::kParse, "lexicon line " + std::to_string(number) + ": expected word<TAB>frequency");
    };
    if (tab == std::string_view::npos || tab == 0) throw fail();
    LexiconEntry e;
    e.word = std::string(line.substr(0, tab));
    const auto freq = line.substr(tab + 1);
    const auto [ptr, ec] = std::from_chars(freq.data(), freq.data() + freq.size(), e.frequency);
    if (ec != std::errc() || ptr != freq.data() + freq.size() || !(e.frequency > 0.0) ||
        !std::isfinite(e.frequency)) {
      throw fail();
    }
    try {
      decode_utf8(e.word);
    } catch (const Error&) {
      throw fail();
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

GeneratedCorpus generate_corpus(const std::vector<LexiconEntry>& lexicon, std::size_t pages,
                                std::size_t words_per_page, const NoiseChannel& channel) {
  if (lexicon.empty()) throw Error(ErrorCode::kInvalidArgument, "lexicon is empty");
  channel.validate();
  std::vector<double> cumulative;
  cumulative.reserve(lexicon.size());
  double total = 0.0;
  std::vector<std::u32string> words;
  words.reserve(lexicon.size());
  for (const auto& e : lexicon) {
    if (!(e.frequency > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lexicon frequencies must be positive");
    if (e.word.empty()) throw Error(ErrorCode::kInvalidArgument, "lexicon has an empty word");
    total += e.frequency;
    cumulative.push_back(total);
    words.push_back(decode_utf8(e.word));
  }

  constexpr std::size_t kColumns = 10;
  GeneratedCorpus corpus;
  corpus.tokens.reserve(pages * words_per_page);
  corpus.alignments.reserve(pages * words_per_page);
  for (std::size_t page = 0; page < pages; ++page) {
    const std::string page_id = page_name(page);
    for (std::size_t slot = 0; slot < words_per_page; ++slot) {
      Stream rng({channel.seed, page, slot});
      const double target = rng.uniform() * total;
      const auto pick = static_cast<std::size_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), target) - cumulative.begin());
      const std::u32string& gold = words[std::min(pick, words.size() - 1)];

      std::u32string ocr;
      for (int attempt = 0; attempt < 16 && ocr.empty(); ++attempt) {
        ocr = corrupt_with(gold, channel, rng);
      }
      if (ocr.empty()) ocr = gold;

      Candidate c;
      c.page_id = page_id;
      c.word_id = slot;
      c.text = encode_utf8(ocr);
      const auto row = static_cast<std::int32_t>(slot / kColumns);
      const auto col = static_cast<std::int32_t>(slot % kColumns);
      const auto width = static_cast<std::int32_t>(std::min<std::size_t>(170, 20 + 12 * ocr.size()));
      c.box = {50 + 180 * col, 60 + 40 * row, 50 + 180 * col + width, 60 + 40 * row + 30};
      const auto distance = static_cast<double>(levenshtein(gold, ocr));
      c.confidence = std::max(0.0, 96.0 - 12.0 * distance);
      corpus.alignments.push_back({page_id, slot, c.text, encode_utf8(gold)});
      corpus.tokens.push_back(std::move(c));
    }
  }
  return corpus;
}

}  // namespace nlx
