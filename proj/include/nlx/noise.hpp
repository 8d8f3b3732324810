#pragma once

// Synthetic OCR corruption channel and corpus generator.
//
// Each source character independently undergoes one of: deletion,
// substitution, or keep-then-insert, with the configured rates; otherwise it
// is kept. Replacement and inserted characters are drawn uniformly from the
// channel alphabet unless confusion weights are given. Randomness comes from
// std::mt19937_64 seeded through std::seed_seq, with raw engine output mapped
// to uniforms by hand so results do not depend on the standard library's
// distribution implementations.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlx/corpus.hpp"

namespace nlx {

struct NoiseChannel {
  double substitution = 0.0;
  double deletion = 0.0;
  double insertion = 0.0;
  std::u32string alphabet;  // empty selects kDefaultCharset
  // Optional weighted replacements per source character; the key U'\0' holds
  // weights for inserted characters.
  std::map<char32_t, std::vector<std::pair<char32_t, double>>> confusion;
  std::uint64_t seed = 0;

  // Throws Error(kInvalidArgument) unless every rate is in [0, 1], their sum
  // is <= 1, and confusion weights are non-negative with positive totals.
  void validate() const;
};

// Named channels: "none", "light", "default", "heavy". The default channel
// leaves roughly 60% of sampled lexicon words within edit distance 2 of their
// source. Throws Error(kInvalidArgument) for an unknown name.
NoiseChannel noise_profile(std::string_view name, std::uint64_t seed = 0);

// Deterministic in (word, channel including seed). May return an empty string.
std::u32string corrupt(std::u32string_view word, const NoiseChannel& channel);
std::string corrupt(std::string_view utf8_word, const NoiseChannel& channel);

struct LexiconEntry {
  std::string word;
  double frequency = 1.0;
};

// Built-in German lexicon with Zipf-style frequencies.
const std::vector<LexiconEntry>& default_lexicon();

// "word<TAB>frequency" per line; blank lines and lines starting with '#' are
// skipped. Throws Error(kParse) with the line number on malformed input.
std::vector<LexiconEntry> parse_lexicon(std::string_view text);

struct GeneratedCorpus {
  std::vector<Candidate> tokens;
  std::vector<AlignmentRecord> alignments;
};

// Pages "p001", "p002", ...; words sampled by frequency and corrupted with a
// per-token seed derived from (channel.seed, page, slot). A corruption that
// deletes everything is redrawn (up to 16 times) before falling back to the
// clean word, so every token text is non-empty. Boxes sit on a grid;
// confidence is a deterministic function of the edit distance.
GeneratedCorpus generate_corpus(const std::vector<LexiconEntry>& lexicon, std::size_t pages,
                                std::size_t words_per_page, const NoiseChannel& channel);

}  // namespace nlx
