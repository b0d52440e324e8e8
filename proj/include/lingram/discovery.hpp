#pragma once

// Empirical discovery of a linear grammar for the good words: grow a binary
// family tree of contexts (w1, w2), where each vertex stands for the residual
// language { v : w1.v.w2 is good }. A vertex is split by appending a letter
// to w1 (head way) or prepending one to w2 (tail way); growth stops at
// vertices whose residual is empirically empty or empirically equal to that
// of an earlier, strictly shorter context (a clone). All decisions are taken
// against an exhaustive corpus of good words up to a fixed length, so the
// discovered tree is a conjecture until the prover certifies it.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lingram/wordcore.hpp"

namespace lingram {

using Context = std::pair<Word, Word>;

enum class Way { head, tail };
enum class VertexKind { undecided, internal, empty_leaf, clone_leaf };

struct Vertex {
  int id = -1;
  Word w1, w2;
  VertexKind kind = VertexKind::undecided;
  // internal
  Way way = Way::head;
  int left = -1, right = -1;  // left child appends/prepends +a, right -b
  bool singleton = false;     // w1.w2 itself is good
  // clone_leaf
  int target = -1;
  int delta_len = 0;  // context-length excess over the target; always > 0

  int context_len() const {
    return static_cast<int>(w1.size() + w2.size());
  }
  std::int64_t context_sum() const { return sum_of(w1) + sum_of(w2); }
};

struct GrammarTree {
  AlphabetSpec spec;
  int corpus_max_len = 0;
  std::vector<Vertex> vertices;

  bool finished() const;
  const Vertex& root() const { return vertices.at(0); }
};

struct DiscoveryLimits {
  int max_vertices = 10000;
  // Minimum truncation budget for residual comparisons; 0 means a + b.
  int min_compare_budget = 0;
};

// Thrown when discovery cannot finish: vertex cap hit, or a vertex's context
// grew so long that comparisons would fall below the minimum budget. The
// partial tree is attached for inspection; budget failures are worth retrying
// with a larger corpus, vertex-cap failures are not.
struct DiscoveryLimitError : Error {
  enum class Reason { vertex_limit, budget_floor };
  DiscoveryLimitError(const std::string& what, Reason r,
                      GrammarTree partial_tree)
      : Error(what), reason(r), partial(std::move(partial_tree)) {}
  Reason reason;
  GrammarTree partial;
};

// The two candidate splits of a context. first = +a child, second = -b child.
struct SplitPair {
  Context plus, minus;
};
SplitPair head_split(const Context& ctx, const AlphabetSpec& spec);
SplitPair tail_split(const Context& ctx, const AlphabetSpec& spec);

// Largest divisor of count whose prime factors all divide the number of
// zero-sum arrangements per period; 0 for count 0. Residual counts that are
// products of that base's primes hint that the split cleaves the language
// along its period structure.
std::int64_t congeniality_score(std::int64_t count, const AlphabetSpec& spec);

// Residual-middle sets agree for every middle length up to the common
// truncation budget max_len - max(context lengths). Throws
// BudgetTooSmallError when that budget is below min_budget (0 means a + b).
bool residuals_equal_empirically(const Corpus& c, const Context& ctx1,
                                 const Context& ctx2, int min_budget = 0);

// No middles at any length up to the truncation budget. Same budget rule.
bool is_empirically_empty(const Corpus& c, const Context& ctx,
                          int min_budget = 0);

// Breadth-first growth, deterministic: same inputs give the identical tree.
GrammarTree discover_grammar(const AlphabetSpec& spec, int corpus_max_len,
                             const DiscoveryLimits& limits = {});

// Text round-trip. Format: a header `ab <a> <b> corpus <max_len>`, then one
// line per vertex `id | w1 | w2 | kind | way | links | singleton` in id
// order, with words as in format_word, kind INT/EMP/CLO, way H/T/-, links
// "l,r" or target id or "-", singleton 0/1. Parsing validates all tree
// invariants and throws MalformedTreeError / TextParseError.
std::string format_grammar(const GrammarTree& tree);
GrammarTree parse_grammar(const std::string& text);

// Structural checks shared by parse_grammar and the prover's paternity
// re-check: exactly one root (e,e), consistent child contexts for the
// declared way, clone targets earlier and strictly shorter, delta_len and
// singleton fields truthful, contexts distinct, all kinds decided.
void validate_tree(const GrammarTree& tree);

}  // namespace lingram
