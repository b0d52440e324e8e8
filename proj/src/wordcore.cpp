#include "lingram/wordcore.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace lingram {
namespace {

// Minimal number of letters needed to bring a running sum back to zero,
// for every sum reachable within max_len letters. Index shift: table[s + off].
struct ReachTable {
  std::vector<int> steps;
  std::int64_t off = 0;

  int at(std::int64_t sum) const {
    std::int64_t i = sum + off;
    if (i < 0 || i >= static_cast<std::int64_t>(steps.size())) return -1;
    return steps[i];
  }
};

ReachTable build_reach_table(const AlphabetSpec& spec, int max_len) {
  // Sums reachable in max_len letters lie in [-b*max_len, a*max_len]; pad by
  // one period so optimal return paths never fall off the table.
  std::int64_t lo = -static_cast<std::int64_t>(spec.b) * max_len - spec.period();
  std::int64_t hi = static_cast<std::int64_t>(spec.a) * max_len + spec.period();
  ReachTable t;
  t.off = -lo;
  t.steps.assign(hi - lo + 1, -1);
  // BFS from sum 0 along reversed moves: a state s reaches 0 in d+1 steps if
  // s + a or s - b reaches it in d.
  std::vector<std::int64_t> frontier{0};
  t.steps[t.off] = 0;
  int depth = 0;
  while (!frontier.empty() && depth <= max_len) {
    std::vector<std::int64_t> next;
    ++depth;
    for (std::int64_t s : frontier) {
      for (std::int64_t p : {s - spec.a, s + spec.b}) {
        std::int64_t i = p + t.off;
        if (i >= 0 && i < static_cast<std::int64_t>(t.steps.size()) &&
            t.steps[i] < 0) {
          t.steps[i] = depth;
          next.push_back(p);
        }
      }
    }
    frontier = std::move(next);
  }
  return t;
}

// True iff appending `letter` to w (not yet appended) completes a mishap
// ending at the new position.
bool extension_closes_mishap(const Word& w, int letter,
                             const AlphabetSpec& spec) {
  if (letter != -spec.b) return false;
  std::int64_t between = 0;
  for (auto i = static_cast<std::int64_t>(w.size()) - 1; i >= 0; --i) {
    if (w[i] == spec.a && between == -spec.a) return true;
    between += w[i];
  }
  return false;
}

void check_enumeration_budget(int max_len, const CorpusLimits& limits) {
  if (max_len < 0) throw std::invalid_argument("negative word length");
  if (max_len >= 62 || (std::int64_t{1} << max_len) > limits.enumeration_budget)
    throw ResourceLimitError("2^" + std::to_string(max_len) +
                             " words exceed the enumeration budget");
}

}  // namespace

std::int64_t AlphabetSpec::zero_sum_arrangements() const {
  std::int64_t n = period(), k = std::min(a, b), r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void validate_spec(const AlphabetSpec& spec) {
  if (spec.a < 1 || spec.b < 1)
    throw std::invalid_argument("alphabet parameters must be positive");
  if (std::gcd(spec.a, spec.b) != 1)
    throw std::invalid_argument("alphabet parameters must be coprime");
}

std::string format_word(const Word& w) {
  if (w.empty()) return "e";
  std::ostringstream out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out << ',';
    out << w[i];
  }
  return out.str();
}

Word parse_word(const std::string& text) {
  if (text == "e") return {};
  if (text.empty()) throw TextParseError("empty word field (use \"e\")");
  Word w;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string tok = text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      int v = std::stoi(tok, &used);
      if (used != tok.size() || tok.empty()) throw std::invalid_argument(tok);
      w.push_back(v);
    } catch (const std::exception&) {
      throw TextParseError("bad letter '" + tok + "' in word '" + text + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return w;
}

bool letters_conform(const Word& w, const AlphabetSpec& spec) {
  return std::all_of(w.begin(), w.end(), [&](int c) {
    return c == spec.a || c == -spec.b;
  });
}

std::int64_t sum_of(const Word& w) {
  return std::accumulate(w.begin(), w.end(), std::int64_t{0});
}

bool is_mishap_free(const Word& w, const AlphabetSpec& spec) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] != spec.a) continue;
    std::int64_t between = 0;
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      if (w[j] == -spec.b && between == -spec.a) return false;
      between += w[j];
    }
  }
  return true;
}

bool is_good(const Word& w, const AlphabetSpec& spec) {
  return sum_of(w) == 0 && is_mishap_free(w, spec);
}

bool has_proper_zero_factor(const Word& w) {
  // Factor (i, j] sums to zero iff prefix sums P[i] == P[j].
  std::vector<std::int64_t> prefix(w.size() + 1, 0);
  for (std::size_t i = 0; i < w.size(); ++i) prefix[i + 1] = prefix[i] + w[i];
  for (std::size_t i = 0; i <= w.size(); ++i)
    for (std::size_t j = i + 1; j <= w.size(); ++j)
      if (prefix[i] == prefix[j] && !(i == 0 && j == w.size())) return true;
  return false;
}

std::int64_t Corpus::total_words() const {
  std::int64_t n = 0;
  for (const auto& s : strata) n += static_cast<std::int64_t>(s.size());
  return n;
}

Corpus generate_corpus(const AlphabetSpec& spec, int max_len,
                       const CorpusLimits& limits) {
  validate_spec(spec);
  check_enumeration_budget(max_len, limits);
  Corpus c;
  c.spec = spec;
  c.max_len = max_len;
  c.strata.assign(max_len + 1, {});
  ReachTable reach = build_reach_table(spec, max_len);

  // DFS in letter order (+a first) emits each stratum lexicographically.
  Word w;
  std::int64_t sum = 0;
  auto grow = [&](auto&& self) -> void {
    if (sum == 0 && is_mishap_free(w, spec)) c.strata[w.size()].push_back(w);
    if (static_cast<int>(w.size()) == max_len) return;
    int remaining = max_len - static_cast<int>(w.size()) - 1;
    for (int letter : {spec.a, -spec.b}) {
      if (extension_closes_mishap(w, letter, spec)) continue;
      int need = reach.at(sum + letter);
      if (need < 0 || need > remaining) continue;
      w.push_back(letter);
      sum += letter;
      self(self);
      sum -= letter;
      w.pop_back();
    }
  };
  grow(grow);
  return c;
}

std::vector<Word> residual_middles(const Corpus& c, const Word& w1,
                                   const Word& w2) {
  std::vector<Word> middles;
  std::size_t ctx = w1.size() + w2.size();
  for (std::size_t len = ctx; len < c.strata.size(); ++len) {
    for (const Word& w : c.strata[len]) {
      if (!std::equal(w1.begin(), w1.end(), w.begin())) continue;
      if (!std::equal(w2.rbegin(), w2.rend(), w.rbegin())) continue;
      middles.emplace_back(w.begin() + w1.size(), w.end() - w2.size());
    }
  }
  return middles;
}

std::int64_t oracle_count(const AlphabetSpec& spec, int length,
                          const CorpusLimits& limits) {
  validate_spec(spec);
  check_enumeration_budget(length, limits);
  ReachTable reach = build_reach_table(spec, length);

  std::int64_t count = 0;
  Word w;
  std::int64_t sum = 0;
  auto grow = [&](auto&& self) -> void {
    if (static_cast<int>(w.size()) == length) {
      if (sum == 0) ++count;  // mishap-freeness held incrementally
      return;
    }
    int remaining = length - static_cast<int>(w.size()) - 1;
    for (int letter : {spec.a, -spec.b}) {
      if (extension_closes_mishap(w, letter, spec)) continue;
      int need = reach.at(sum + letter);
      if (need < 0 || need > remaining) continue;
      w.push_back(letter);
      sum += letter;
      self(self);
      sum -= letter;
      w.pop_back();
    }
  };
  grow(grow);
  return count;
}

}  // namespace lingram
