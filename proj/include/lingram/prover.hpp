#pragma once

// Rigorous certification of a discovered grammar tree. Every empty leaf and
// every clone leaf reduces to obligations of the form "u1 [A] u2 [B] u3 must
// always contain a mishap", where the u_i are fixed words and [A], [B] stand
// for arbitrary words of the stated sums. Obligations are discharged by a
// minimal-counterexample argument: brackets are expanded through the
// discrete-Rolle recurrence into meta-words over {+a, -b, [1], ..., [b-1]},
// and meta-words that force a mishap or force a proper zero-sum factor
// inside one bracket's filling are purged. If iterated expansion purges
// everything, no counterexample exists and the obligation is proved.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lingram/discovery.hpp"
#include "lingram/wordcore.hpp"

namespace lingram {

// Letters of fixed context carry region kContextRegion; letters descending
// from the obligation's j-th bracket carry region j. Zero-sum purging is only
// sound inside a single bracket's region, so the tag is load-bearing.
constexpr int kContextRegion = -1;

struct MetaLetter {
  enum class Kind { lit, bracket };
  Kind kind = Kind::lit;
  int value = 0;  // lit: the letter (+a or -b); bracket: the sum, never 0
  int region = kContextRegion;

  friend bool operator==(const MetaLetter& x, const MetaLetter& y) {
    return x.kind == y.kind && x.value == y.value && x.region == y.region;
  }
  friend bool operator<(const MetaLetter& x, const MetaLetter& y) {
    if (x.kind != y.kind) return x.kind < y.kind;
    if (x.value != y.value) return x.value < y.value;
    return x.region < y.region;
  }
};

inline MetaLetter meta_lit(int value, int region = kContextRegion) {
  return {MetaLetter::Kind::lit, value, region};
}
inline MetaLetter meta_bracket(int sum, int region = 0) {
  return {MetaLetter::Kind::bracket, sum, region};
}

struct MetaWord {
  std::vector<MetaLetter> letters;

  bool bracket_free() const;
  friend bool operator==(const MetaWord& x, const MetaWord& y) {
    return x.letters == y.letters;
  }
  friend bool operator<(const MetaWord& x, const MetaWord& y) {
    return x.letters < y.letters;
  }
};

// "e" for the empty meta-word, else comma-separated: "-2,[1],3,[1],-2".
std::string to_string(const MetaWord& mw);

// "u1 [A] u2 [B] u3 must always contain a mishap". Canonical form: exactly
// brackets.size() + 1 literal segments (segments may be empty words). A zero
// bracket stays in the pattern -- it stands for an arbitrary zero-sum chunk,
// not for the empty word -- and is only reduced to its empty filling inside
// the proof engine, where zero-factor removal preserves mishaps.
struct Obligation {
  std::vector<Word> literals;
  std::vector<int> brackets;

  friend bool operator==(const Obligation& x, const Obligation& y) {
    return x.literals == y.literals && x.brackets == y.brackets;
  }
  friend bool operator<(const Obligation& x, const Obligation& y) {
    if (x.literals != y.literals) return x.literals < y.literals;
    return x.brackets < y.brackets;
  }
};

// Validates the shape (one more literal segment than brackets).
Obligation canonical_obligation(std::vector<Word> literals,
                                std::vector<int> brackets);

// Segments separated by spaces, literals as format_word: "3 [-3] -2 [2] e".
std::string format_obligation(const Obligation& ob);

struct ProofOutcome {
  enum class Status { proved, disproved, inconclusive };
  Status status = Status::proved;
  int purges_used = 0;            // proved / inconclusive
  Word counterexample;            // disproved: see the per-op contract
  std::vector<MetaWord> survivors;  // inconclusive
};

// One application of the discrete-Rolle recurrence: every word of nonzero
// sum A factors uniquely as [i-a].(+a).[A-i] (A > 0, i = 1..a) or
// [b-i].(-b).[A+i] (A < 0, i = 1..b); zero brackets are omitted. Letters are
// emitted with region 0.
std::vector<MetaWord> word_recurrence_expand(int sum, const AlphabetSpec& spec);

// True iff some Lit(+a) ... Lit(-b) pair has the meta-letters strictly
// between them (bracket sums counting as their fixed sums) summing to -a:
// every instantiation then contains that mishap.
bool guaranteed_mishap(const MetaWord& mw, const AlphabetSpec& spec);

// True iff some nonempty proper run of meta-letters inside a single
// bracket's region sums to zero: every instantiation then has a proper
// zero-sum factor inside that filling, so it is never a minimal
// counterexample.
bool has_forced_zero_run(const MetaWord& mw);

struct ProverLimits {
  // Cap on bracket expansions while closing one sum into fundamental
  // brackets; exceeded means ClosureFailureError.
  std::int64_t max_expansion_steps = 1000000;
};

// Purged expansions of each needed sum over the meta-alphabet
// {+a, -b, [1..b-1]}: the surviving shapes of zero-proper-factor-free,
// mishap-free words of that sum. Memoized; deterministic order.
class ExpansionFamily {
 public:
  explicit ExpansionFamily(AlphabetSpec spec, ProverLimits limits = {});
  const std::vector<MetaWord>& for_sum(int sum);
  const AlphabetSpec& spec() const { return spec_; }

 private:
  AlphabetSpec spec_;
  ProverLimits limits_;
  std::map<int, std::vector<MetaWord>> memo_;
};

// The closed self-referential family for the fundamental sums 1..b-1 (empty
// for b = 1).
std::map<int, std::vector<MetaWord>> fundamental_expansions(
    const AlphabetSpec& spec, ProverLimits limits = {});

// Every way a mishap in bad_ctx1.v.bad_ctx2 can straddle a context boundary
// while v is internally mishap-free, as obligations on good_ctx: shapes
// [A'].(-b).[B'] (opening +a in bad_ctx1), [A'].(+a).[B'] (closing -b in
// bad_ctx2), and [A'] alone (both letters in context, emitted only when A'
// equals middle_sum). Canonicalized, deduplicated, sorted. Throws
// InherentContextMishapError when a bad context word contains a mishap by
// itself.
std::vector<Obligation> potential_mishap_obligations(const Context& good_ctx,
                                                     const Context& bad_ctx,
                                                     int middle_sum,
                                                     const AlphabetSpec& spec);

// Called with the survivor set after the initial expansion (round 0) and
// after each purge round.
using PurgeObserver =
    std::function<void(int round, const std::vector<MetaWord>& survivors)>;

// Expands the obligation's brackets down to fundamental ones (purging along
// the way; this initial elimination is round 0 and is not counted), then
// repeatedly substitutes the fundamental expansions and purges. Proved when
// nothing survives; Disproved when a bracket-free survivor is mishap-free
// (the counterexample is that full literal word); Inconclusive when
// max_purges rounds leave survivors.
ProofOutcome prove_obligation(const Obligation& ob, const AlphabetSpec& spec,
                              int max_purges,
                              const PurgeObserver& observer = {});

// The obligations a leaf generates, in the order they are proved: the single
// emptiness obligation w1.[-A].w2 for an empty leaf; for a clone leaf both
// directions of the straddling case analysis (leaf-as-bad first), or the two
// emptiness obligations when the context sums differ.
std::vector<Obligation> leaf_obligations(const GrammarTree& t,
                                         const Vertex& v);

// Disproved counterexamples from the leaf-level ops are the *middle* v with
// the leaf's context stripped: for an empty leaf w1.v.w2 is good; for a
// clone leaf v is good in exactly one of the two contexts.
ProofOutcome prove_empty_leaf(const GrammarTree& t, const Vertex& v,
                              int max_purges);
ProofOutcome prove_clone_leaf(const GrammarTree& t, const Vertex& v,
                              int max_purges);

struct LeafProof {
  int id = -1;
  VertexKind kind = VertexKind::undecided;
  ProofOutcome outcome;
};

struct ProofReport {
  enum class Verdict { good, bad, unknown };
  Verdict verdict = Verdict::unknown;
  std::vector<LeafProof> leaves;  // id order
  int max_purges_used = 0;
};

// Re-validates the tree structurally (paternity, singleton flags, clone
// shape), then proves every leaf. Verdict good iff all leaves Proved, bad if
// any leaf Disproved, unknown otherwise.
ProofReport prove_grammar(const GrammarTree& t, int max_purges = 3);

// One header line recording the purge-counting convention, one line per
// leaf `leaf <id> <EMP|CLO> <PROVED p=N|DISPROVED w=word|INCONCLUSIVE n=N>`,
// then `verdict true|false|unknown`.
std::string format_report(const ProofReport& report);

}  // namespace lingram
