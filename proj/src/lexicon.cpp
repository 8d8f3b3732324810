#include <cmath>

#include "nlx/noise.hpp"

namespace nlx {

namespace {

constexpr const char* kWords[] = {
#include "lexicon_words.inc"
};

}  // namespace

const std::vector<LexiconEntry>& default_lexicon() {
  static const std::vector<LexiconEntry> lexicon = [] {
    std::vector<LexiconEntry> out;
    std::size_t rank = 0;
    for (const char* w : kWords) {
      // Zipf-Mandelbrot weights: f(r) = 1e6 / (r + 10).
      out.push_back({w, std::round(1e6 / (static_cast<double>(rank) + 10.0))});
      ++rank;
    }
    return out;
  }();
  return lexicon;
}

}  // namespace nlx
