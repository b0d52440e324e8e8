#pragma once

// Words over the two-letter alphabet {+a, -b} with gcd(a, b) = 1, the "good"
// words among them (zero sum, no mishap factor), and exhaustive corpora of
// good words used as empirical ground truth by the discovery layer.
//
// A *mishap* is a contiguous factor consisting of a letter +a, then a segment
// summing to -a, then a letter -b; equivalently a zero-sum factor that starts
// with +a and is immediately followed by -b.

#include <cstdint>
#include <string>
#include <vector>

#include "lingram/errors.hpp"

namespace lingram {

struct AlphabetSpec {
  int a = 0;
  int b = 0;

  // Zero-sum words exist only at lengths that are multiples of a + b.
  int period() const { return a + b; }
  // Number of zero-sum words of length a + b: such a word has exactly b
  // letters +a and a letters -b, so C(a+b, b) arrangements.
  std::int64_t zero_sum_arrangements() const;
};

// Throws std::invalid_argument unless a >= 1, b >= 1 and gcd(a, b) = 1.
void validate_spec(const AlphabetSpec& spec);

// Letters are stored as the signed integers +a and -b.
using Word = std::vector<int>;

// "e" for the empty word, else comma-separated letters: "3,-2,-2".
std::string format_word(const Word& w);
Word parse_word(const std::string& text);

// True iff every letter is +spec.a or -spec.b.
bool letters_conform(const Word& w, const AlphabetSpec& spec);

std::int64_t sum_of(const Word& w);

bool is_mishap_free(const Word& w, const AlphabetSpec& spec);

// Good = zero sum and mishap-free. The empty word is good.
bool is_good(const Word& w, const AlphabetSpec& spec);

// Some nonempty contiguous factor other than the whole word sums to zero.
bool has_proper_zero_factor(const Word& w);

struct CorpusLimits {
  // Refuse enumerations where the raw search space 2^max_len exceeds this.
  std::int64_t enumeration_budget = std::int64_t{1} << 30;
};

// All good words of length <= max_len, stratified by length. Within each
// stratum words appear in lexicographic order with +a ordered before -b.
struct Corpus {
  AlphabetSpec spec;
  int max_len = 0;
  std::vector<std::vector<Word>> strata;  // strata[len]

  std::int64_t total_words() const;
};

Corpus generate_corpus(const AlphabetSpec& spec, int max_len,
                       const CorpusLimits& limits = {});

// { v : w1 . v . w2 is in the corpus }, ordered by (length, corpus order).
std::vector<Word> residual_middles(const Corpus& c, const Word& w1,
                                   const Word& w2);

// Count of good words of exactly the given length, by direct enumeration
// with pruning. Independent of the corpus (shares only the letter-level
// predicates); used as the oracle the grammar's series is checked against.
std::int64_t oracle_count(const AlphabetSpec& spec, int length,
                          const CorpusLimits& limits = {});

}  // namespace lingram
