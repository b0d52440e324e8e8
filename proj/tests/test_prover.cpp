#include <algorithm>
#include <array>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "lingram/discovery.hpp"
#include "lingram/prover.hpp"
#include "lingram/wordcore.hpp"

using namespace lingram;

namespace {

// Independent re-implementations used as oracles; they share nothing with
// the library beyond the letter encoding.

bool naive_mishap_free(const Word& w, int a, int b) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] != a) continue;
    long long between = 0;
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      if (w[j] == -b && between == -a) return false;
      between += w[j];
    }
  }
  return true;
}

bool zero_proper_factor_free(const Word& w) {
  const std::size_t n = w.size();
  std::vector<long long> pre(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) pre[i + 1] = pre[i] + w[i];
  for (std::size_t i = 0; i + 1 <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j) {
      if (i == 0 && j == n) continue;
      if (pre[i] == pre[j]) return false;
    }
  return true;
}

// All words over {+a, -b} of length <= max_len (bitmask enumeration).
template <typename Fn>
void enum_words(int a, int b, int max_len, Fn fn) {
  for (int len = 0; len <= max_len; ++len)
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      Word w(static_cast<std::size_t>(len));
      for (int i = 0; i < len; ++i) w[static_cast<std::size_t>(i)] =
          (mask >> i) & 1u ? -b : a;
      fn(w);
    }
}

long long word_sum(const Word& w) {
  long long s = 0;
  for (int x : w) s += x;
  return s;
}

// Does w fit the obligation's segment pattern (literals exact, brackets
// absorbing any chunk of their sum)?
bool matches_obligation(const Obligation& ob, const Word& w) {
  std::function<bool(std::size_t, std::size_t)> walk =
      [&](std::size_t seg, std::size_t pos) {
        const Word& lit = ob.literals[seg];
        if (pos + lit.size() > w.size()) return false;
        if (!std::equal(lit.begin(), lit.end(),
                        w.begin() + static_cast<std::ptrdiff_t>(pos)))
          return false;
        pos += lit.size();
        if (seg == ob.brackets.size()) return pos == w.size();
        long long chunk = 0;
        for (std::size_t end = pos; end <= w.size(); ++end) {
          if (chunk == ob.brackets[seg] && walk(seg + 1, end)) return true;
          if (end < w.size()) chunk += w[end];
        }
        return false;
      };
  return walk(0, 0);
}

// Exhaustive search for a mishap-free instantiation whose bracket fillings
// total at most fill_budget letters. Branches die as soon as the partial
// word already contains a mishap, since a mishap survives extension.
bool find_mishap_free_instantiation(const Obligation& ob,
                                    const AlphabetSpec& spec, int fill_budget,
                                    Word* found = nullptr) {
  Word cur;
  std::function<bool(std::size_t, int)> fill_segment;
  auto mishap_ending_at_back = [&]() {
    if (cur.empty() || cur.back() != -spec.b) return false;
    long long between = 0;
    for (std::size_t i = cur.size() - 1; i-- > 0;) {
      if (cur[i] == spec.a && between == -spec.a) return true;
      between += cur[i];
    }
    return false;
  };
  std::function<bool(const Word&, std::size_t, std::size_t, int)> push_lit =
      [&](const Word& lit, std::size_t at, std::size_t seg, int budget) {
        if (at == lit.size()) return fill_segment(seg, budget);
        cur.push_back(lit[at]);
        bool ok = !mishap_ending_at_back() && push_lit(lit, at + 1, seg, budget);
        cur.pop_back();
        return ok;
      };
  std::function<bool(long long, int, std::size_t, int)> fill_bracket =
      [&](long long rest, int len_left, std::size_t seg, int budget) {
        if (rest == 0) {
          // A longer filling of the same sum may also work, but any filling
          // reaching the target here is worth continuing with.
          if (push_lit(ob.literals[seg + 1], 0, seg + 1, budget)) return true;
        }
        if (len_left == 0) return false;
        // Feasibility: rest must be reachable with len_left letters.
        bool feasible = false;
        for (int na = 0; na <= len_left && !feasible; ++na) {
          long long need = static_cast<long long>(na) * spec.a - rest;
          if (need % spec.b == 0 && need / spec.b >= 0 &&
              need / spec.b <= len_left - na)
            feasible = true;
        }
        if (!feasible) return false;
        for (int letter : {spec.a, -spec.b}) {
          cur.push_back(letter);
          bool ok = !mishap_ending_at_back() &&
                    fill_bracket(rest - letter, len_left - 1, seg, budget - 1);
          cur.pop_back();
          if (ok) return true;
        }
        return false;
      };
  fill_segment = [&](std::size_t seg, int budget) {
    if (seg == ob.brackets.size()) {
      if (found) *found = cur;
      return true;
    }
    return fill_bracket(ob.brackets[seg], budget, seg, budget);
  };
  return push_lit(ob.literals[0], 0, 0, fill_budget);
}

// The split-sum pattern a meta-word stands for, with regions forgotten.
Obligation to_pattern(const MetaWord& mw) {
  std::vector<Word> lits{{}};
  std::vector<int> brs;
  for (const MetaLetter& l : mw.letters) {
    if (l.kind == MetaLetter::Kind::lit) {
      lits.back().push_back(l.value);
    } else {
      brs.push_back(l.value);
      lits.push_back({});
    }
  }
  return canonical_obligation(lits, brs);
}

// Shortest length of a word over {+a, -b} with the given sum.
int min_fill(int s, const AlphabetSpec& spec) {
  int best = 1 << 20;
  for (int na = 0; na <= std::abs(s) + spec.b; ++na) {
    int rem = na * spec.a - s;
    if (rem >= 0 && rem % spec.b == 0)
      best = std::min(best, na + rem / spec.b);
  }
  return best;
}

// The shortest words a meta-word can stand for (capped cartesian product).
std::vector<Word> min_instantiations(const MetaWord& mw,
                                     const AlphabetSpec& spec) {
  std::vector<Word> acc{{}};
  for (const MetaLetter& l : mw.letters) {
    if (l.kind == MetaLetter::Kind::lit) {
      for (Word& w : acc) w.push_back(l.value);
      continue;
    }
    std::vector<Word> fills;
    Word cur;
    std::function<void(int, int)> dfs = [&](int rest, int len_left) {
      if (len_left == 0) {
        if (rest == 0) fills.push_back(cur);
        return;
      }
      for (int letter : {spec.a, -spec.b}) {
        cur.push_back(letter);
        dfs(rest - letter, len_left - 1);
        cur.pop_back();
      }
    };
    dfs(l.value, min_fill(l.value, spec));
    std::vector<Word> next;
    for (const Word& base : acc)
      for (const Word& fill : fills) {
        if (next.size() >= 256) break;
        Word w = base;
        w.insert(w.end(), fill.begin(), fill.end());
        next.push_back(std::move(w));
      }
    acc = std::move(next);
  }
  return acc;
}

std::set<std::string> family_strings(ExpansionFamily& fam, int sum) {
  std::set<std::string> out;
  for (const MetaWord& mw : fam.for_sum(sum)) out.insert(to_string(mw));
  return out;
}

MetaWord mw_of(std::vector<MetaLetter> letters) {
  MetaWord mw;
  mw.letters = std::move(letters);
  return mw;
}

}  // namespace

TEST_CASE("the recurrence expands a sum into its letter-anchored branches") {
  AlphabetSpec spec{3, 2};
  auto strings = [&](int sum) {
    std::vector<std::string> out;
    for (const MetaWord& mw : word_recurrence_expand(sum, spec))
      out.push_back(to_string(mw));
    return out;
  };
  CHECK(strings(1) ==
        std::vector<std::string>{"[-2],3", "[-1],3,[-1]", "3,[-2]"});
  CHECK(strings(-1) == std::vector<std::string>{"[1],-2", "-2,[1]"});
  CHECK(strings(-2) == std::vector<std::string>{"[1],-2,[-1]", "-2"});
  CHECK_THROWS_AS(word_recurrence_expand(0, spec), std::invalid_argument);
}

TEST_CASE("the recurrence covers words and splits them at first crossing") {
  AlphabetSpec spec{3, 2};
  for (int a_sum = -5; a_sum <= 5; ++a_sum) {
    if (a_sum == 0) continue;
    std::vector<Obligation> shapes;            // split-sum pattern reading
    std::vector<std::array<int, 3>> branches;  // left sum, letter, right sum
    for (const MetaWord& mw : word_recurrence_expand(a_sum, spec)) {
      shapes.push_back(to_pattern(mw));
      std::array<int, 3> part{0, 0, 0};
      std::size_t at = 0;
      if (mw.letters[at].kind == MetaLetter::Kind::bracket)
        part[0] = mw.letters[at++].value;
      part[1] = mw.letters[at++].value;
      if (at < mw.letters.size()) part[2] = mw.letters[at].value;
      branches.push_back(part);
    }
    enum_words(3, 2, 14, [&](const Word& w) {
      // The branch patterns elide [0] chunks, which is exact precisely on
      // the zero-factor-free universe: a zero-sum chunk there is empty.
      if (word_sum(w) != a_sum || !zero_proper_factor_free(w)) return;
      bool covered = false;
      for (const Obligation& shape : shapes)
        if (matches_obligation(shape, w)) {
          covered = true;
          break;
        }
      CHECK(covered);
      // The factorization at the first prefix-sum crossing is unique: the
      // crossing letter and the two chunk sums name exactly one branch.
      std::size_t k = 0;
      long long run = 0;
      while (true) {
        run += w[k];
        if (a_sum > 0 ? run > 0 : run < 0) break;
        ++k;
      }
      CHECK(w[k] == (a_sum > 0 ? 3 : -2));
      const int left = static_cast<int>(run) - w[k];
      const int right = a_sum - static_cast<int>(run);
      int anchored = 0;
      for (const std::array<int, 3>& part : branches)
        if (part[0] == left && part[1] == w[k] && part[2] == right) ++anchored;
      CHECK(anchored == 1);
    });
  }
}

TEST_CASE("forced mishaps are detected through bracket sums") {
  AlphabetSpec spec{3, 2};
  CHECK(guaranteed_mishap(
      mw_of({meta_lit(3), meta_lit(-2), meta_lit(-2), meta_lit(3),
             meta_lit(-2), meta_lit(-2)}),
      spec));
  CHECK(guaranteed_mishap(
      mw_of({meta_lit(3), meta_bracket(-3, 0), meta_lit(-2)}), spec));
  CHECK_FALSE(guaranteed_mishap(
      mw_of({meta_lit(3), meta_bracket(-1, 0), meta_lit(-2)}), spec));
  // Brackets are never the mishap's endpoints, only part of the between-sum.
  CHECK_FALSE(guaranteed_mishap(
      mw_of({meta_bracket(3, 0), meta_bracket(-3, 1), meta_bracket(-2, 2)}),
      spec));
}

TEST_CASE("forced zero runs respect region boundaries") {
  // A proper zero-sum run inside one region block forces a deletable factor.
  CHECK(has_forced_zero_run(
      mw_of({meta_bracket(1, 0), meta_bracket(-1, 0), meta_bracket(2, 0)})));
  // The run covering a whole block is the originating bracket's own sum;
  // zero-sum brackets are handled at the obligation level, so the block-wide
  // pair is exempt rather than purged.
  CHECK_FALSE(
      has_forced_zero_run(mw_of({meta_bracket(1, 0), meta_bracket(-1, 0)})));
  CHECK_FALSE(
      has_forced_zero_run(mw_of({meta_bracket(1, 0), meta_bracket(-1, 1)})));
  // Context letters are never purged away.
  CHECK_FALSE(has_forced_zero_run(
      mw_of({meta_lit(3), meta_lit(-2), meta_lit(-1, kContextRegion)})));
  // A zero run may mix literals and brackets inside one region...
  CHECK(has_forced_zero_run(mw_of({meta_lit(3, 0), meta_lit(-2, 0),
                                   meta_bracket(-1, 0), meta_lit(3, 0)})));
  // ...but the run equal to the whole region is the bracket sum itself.
  CHECK_FALSE(
      has_forced_zero_run(mw_of({meta_bracket(2, 0), meta_lit(-2, 0)})));
  ExpansionFamily fam({3, 2});
  for (const MetaWord& mw : fam.for_sum(1)) CHECK_FALSE(has_forced_zero_run(mw));
}

TEST_CASE("the closed expansions reproduce the classical lemma sets") {
  ExpansionFamily fam({3, 2});
  CHECK(family_strings(fam, 1) ==
        std::set<std::string>{"-2,3", "-2,[1],3,[1],-2", "3,-2"});
  CHECK(family_strings(fam, -1) == std::set<std::string>{"-2,[1]", "[1],-2"});
  CHECK(family_strings(fam, -2) ==
        std::set<std::string>{"-2", "[1],-2,-2,[1]"});
  CHECK(family_strings(fam, 2) ==
        std::set<std::string>{"-2,3,[1]", "-2,[1],3", "3,-2,[1]", "3,[1],-2",
                              "[1],-2,3"});
  CHECK(family_strings(fam, 3) ==
        std::set<std::string>{"-2,3,-2,3,[1]", "-2,3,3,-2,[1]", "-2,3,3,[1],-2",
                              "-2,[1],3,[1]", "3", "[1],-2,3,[1]"});
  // Closure: nothing but fundamental brackets on any right-hand side.
  for (int sum : {1, -1, -2, 2, 3})
    for (const MetaWord& mw : fam.for_sum(sum))
      for (const MetaLetter& l : mw.letters)
        if (l.kind == MetaLetter::Kind::bracket) CHECK(l.value == 1);
  // The eager map covers exactly the fundamental sums.
  auto table = fundamental_expansions({3, 2});
  REQUIRE(table.size() == 1);
  CHECK(table.count(1) == 1);
  CHECK(fundamental_expansions({2, 1}).empty());
}

TEST_CASE("expansions cover every zero-factor-free mishap-free word") {
  AlphabetSpec spec{3, 2};
  ExpansionFamily fam(spec);
  auto restricted = [&](const Word& w) {
    return zero_proper_factor_free(w) && naive_mishap_free(w, 3, 2);
  };
  // Match with inner [1] slots filled by words of the same restricted class.
  auto matches_meta = [&](const MetaWord& mw, const Word& w) {
    std::function<bool(std::size_t, std::size_t)> walk =
        [&](std::size_t at, std::size_t pos) {
          if (at == mw.letters.size()) return pos == w.size();
          const MetaLetter& l = mw.letters[at];
          if (l.kind == MetaLetter::Kind::lit)
            return pos < w.size() && w[pos] == l.value &&
                   walk(at + 1, pos + 1);
          long long chunk = 0;
          for (std::size_t end = pos; end <= w.size(); ++end) {
            if (chunk == l.value) {
              Word sub(w.begin() + static_cast<std::ptrdiff_t>(pos),
                       w.begin() + static_cast<std::ptrdiff_t>(end));
              if (restricted(sub) && walk(at + 1, end)) return true;
            }
            if (end < w.size()) chunk += w[end];
          }
          return false;
        };
    return walk(0, 0);
  };
  for (int sum : {1, -1, -2, 2, 3}) {
    const std::vector<MetaWord>& family = fam.for_sum(sum);
    enum_words(3, 2, 14, [&](const Word& w) {
      if (word_sum(w) != sum || !restricted(w)) return;
      bool covered = false;
      for (const MetaWord& mw : family)
        if (matches_meta(mw, w)) {
          covered = true;
          break;
        }
      CHECK(covered);
    });
  }
}

TEST_CASE("removing a zero-sum factor never creates a mishap") {
  std::mt19937 rng(11);
  for (const auto& [a, b] :
       {std::pair{3, 2}, std::pair{1, 1}, std::pair{2, 1}}) {
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 400; ++trial) {
      Word w(14);
      for (int& x : w) x = coin(rng) ? a : -b;
      if (!naive_mishap_free(w, a, b)) continue;
      std::vector<long long> pre(w.size() + 1, 0);
      for (std::size_t i = 0; i < w.size(); ++i) pre[i + 1] = pre[i] + w[i];
      for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = i + 1; j <= w.size(); ++j) {
          if (pre[i] != pre[j]) continue;
          Word shorter(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i));
          shorter.insert(shorter.end(),
                         w.begin() + static_cast<std::ptrdiff_t>(j), w.end());
          CHECK(naive_mishap_free(shorter, a, b));
          CHECK(is_mishap_free(shorter, {a, b}));
        }
    }
  }
}

TEST_CASE("zero brackets stay in the pattern but prove via empty filling") {
  // As a pattern, [0] absorbs any zero-sum chunk; it is not the empty word.
  Obligation ob = canonical_obligation({{3}, {-2}}, {0});
  CHECK(ob.brackets == std::vector<int>{0});
  CHECK(format_obligation(ob) == "3 [0] -2");
  CHECK(matches_obligation(ob, Word{3, -2}));
  CHECK(matches_obligation(ob, Word{3, 3, -2, 3, -2, -2, -2}));
  CHECK_FALSE(matches_obligation(ob, Word{3, 3, -2}));
  CHECK(format_obligation(canonical_obligation({{3}, {-2}, {}}, {-3, 2})) ==
        "3 [-3] -2 [2] e");
  CHECK_THROWS_AS(canonical_obligation({{}}, {1}), std::invalid_argument);

  // Proving reduces [0] to its empty filling: sound because deleting a
  // zero-sum factor from a mishap-free word leaves it mishap-free, so a
  // mishap in the reduced word persists in every filling.
  AlphabetSpec spec{3, 2};
  auto out = prove_obligation(ob, spec, 3);
  REQUIRE(out.status == ProofOutcome::Status::disproved);
  CHECK(out.counterexample == Word{3, -2});
  auto forced =
      prove_obligation(canonical_obligation({{3, -2, -2, 3}, {-2, -2}}, {0}),
                       spec, 3);
  CHECK(forced.status == ProofOutcome::Status::proved);
  CHECK(forced.purges_used == 0);
}

TEST_CASE("potential mishaps enumerate the straddling shapes") {
  AlphabetSpec spec{3, 2};
  CHECK(potential_mishap_obligations({{}, {}}, {{}, {}}, -5, spec).empty());

  // One +a in the bad prefix: a single closing-letter shape.
  auto obs = potential_mishap_obligations({{3}, {}}, {{3}, {}}, -3, spec);
  REQUIRE(obs.size() == 1);
  CHECK(obs[0].literals == std::vector<Word>{{3}, {-2}, {}});
  CHECK(obs[0].brackets == std::vector<int>{-3, 2});

  // Both context letters present, middle sum inconsistent with case (iii).
  auto obs2 = potential_mishap_obligations({{3}, {-2}}, {{3}, {-2}}, -1, spec);
  REQUIRE(obs2.size() == 2);
  CHECK(obs2[0].literals == std::vector<Word>{{3}, {-2}, {-2}});
  CHECK(obs2[0].brackets == std::vector<int>{-3, 4});
  CHECK(obs2[1].literals == std::vector<Word>{{3}, {3}, {-2}});
  CHECK(obs2[1].brackets == std::vector<int>{-1, -3});

  // Consistent middle sum adds the bracket-only case-(iii) shape.
  auto obs3 = potential_mishap_obligations({{3}, {-2}}, {{3}, {-2}}, -3, spec);
  REQUIRE(obs3.size() == 3);
  bool has_iii = false;
  for (const Obligation& ob : obs3)
    if (ob.brackets == std::vector<int>{-3} &&
        ob.literals == std::vector<Word>{{3}, {-2}})
      has_iii = true;
  CHECK(has_iii);

  CHECK_THROWS_AS(potential_mishap_obligations(
                      {{}, {}}, {{3, -2, -2, 3, -2, -2}, {}}, 2, spec),
                  InherentContextMishapError);
}

TEST_CASE("emitted shapes cover every straddling mishap") {
  AlphabetSpec spec{3, 2};
  std::vector<Word> small;
  enum_words(3, 2, 2, [&](const Word& w) { small.push_back(w); });
  std::vector<std::pair<Word, Word>> contexts;
  for (const Word& w1 : small)
    for (const Word& w2 : small) contexts.emplace_back(w1, w2);
  // A deterministic sprinkle of longer contexts.
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> len(3, 4), coin(0, 1);
  for (int i = 0; i < 40; ++i) {
    Word w1(static_cast<std::size_t>(len(rng))), w2(static_cast<std::size_t>(len(rng)));
    for (int& x : w1) x = coin(rng) ? 3 : -2;
    for (int& x : w2) x = coin(rng) ? 3 : -2;
    contexts.emplace_back(w1, w2);
  }
  for (const auto& [w1, w2] : contexts) {
    if (!naive_mishap_free(w1, 3, 2) || !naive_mishap_free(w2, 3, 2)) continue;
    std::map<long long, std::vector<Obligation>> by_sum;
    enum_words(3, 2, 8, [&](const Word& v) {
      if (!naive_mishap_free(v, 3, 2)) return;
      Word full = w1;
      full.insert(full.end(), v.begin(), v.end());
      full.insert(full.end(), w2.begin(), w2.end());
      if (naive_mishap_free(full, 3, 2)) return;  // no straddling mishap
      const long long ms = word_sum(v);
      auto it = by_sum.find(ms);
      if (it == by_sum.end())
        it = by_sum
                 .emplace(ms, potential_mishap_obligations(
                                  {{}, {}}, {w1, w2}, static_cast<int>(ms),
                                  spec))
                 .first;
      bool covered = false;
      for (const Obligation& ob : it->second)
        if (matches_obligation(ob, v)) {
          covered = true;
          break;
        }
      CHECK(covered);
    });
  }
}

TEST_CASE("literal obligations settle immediately") {
  AlphabetSpec spec{3, 2};
  auto proved =
      prove_obligation(canonical_obligation({{3, -2, -2, 3, -2, -2}}, {}), spec, 3);
  CHECK(proved.status == ProofOutcome::Status::proved);
  CHECK(proved.purges_used == 0);

  auto disproved =
      prove_obligation(canonical_obligation({{3, -2, -2}}, {}), spec, 3);
  REQUIRE(disproved.status == ProofOutcome::Status::disproved);
  CHECK(disproved.counterexample == Word{3, -2, -2});

  CHECK_THROWS_AS(
      prove_obligation(canonical_obligation({{}}, {}), spec, -1),
      std::invalid_argument);
}

TEST_CASE("purge rounds expand fundamentals and find counterexamples") {
  AlphabetSpec spec{3, 2};
  Obligation sum_one = canonical_obligation({{}, {}}, {1});

  auto stuck = prove_obligation(sum_one, spec, 0);
  REQUIRE(stuck.status == ProofOutcome::Status::inconclusive);
  CHECK(stuck.purges_used == 0);
  REQUIRE(stuck.survivors.size() == 1);
  CHECK(to_string(stuck.survivors[0]) == "[1]");

  // One substitution reveals a two-letter mishap-free word of sum 1.
  std::vector<std::pair<int, std::size_t>> trace;
  auto out = prove_obligation(sum_one, spec, 3,
                              [&](int round, const std::vector<MetaWord>& s) {
                                trace.emplace_back(round, s.size());
                              });
  REQUIRE(out.status == ProofOutcome::Status::disproved);
  CHECK(word_sum(out.counterexample) == 1);
  CHECK(out.counterexample.size() == 2);
  CHECK(naive_mishap_free(out.counterexample, 3, 2));
  REQUIRE(trace.size() == 2);
  CHECK(trace[0].first == 0);
  CHECK(trace[1].first == 1);
}

TEST_CASE("survivor instantiations shrink monotonically across rounds") {
  GrammarTree t = discover_grammar({3, 2}, 20);
  Obligation slow;
  bool found = false;
  for (const Vertex& v : t.vertices) {
    if (found || (v.kind != VertexKind::empty_leaf &&
                  v.kind != VertexKind::clone_leaf))
      continue;
    for (const Obligation& ob : leaf_obligations(t, v)) {
      auto out = prove_obligation(ob, t.spec, 5);
      if (out.status == ProofOutcome::Status::proved && out.purges_used >= 2) {
        slow = ob;
        found = true;
        break;
      }
    }
  }
  REQUIRE(found);  // the full proof needs two purges somewhere
  auto r0 = prove_obligation(slow, t.spec, 0);
  auto r1 = prove_obligation(slow, t.spec, 1);
  REQUIRE(r0.status == ProofOutcome::Status::inconclusive);
  REQUIRE(r1.status == ProofOutcome::Status::inconclusive);
  CHECK(r0.purges_used == 0);
  CHECK(r1.purges_used == 1);
  // Words represented after a purge were already represented before it:
  // every shortest witness of a later survivor fits an earlier pattern.
  std::vector<Obligation> before;
  for (const MetaWord& mw : r0.survivors) before.push_back(to_pattern(mw));
  int witnesses = 0;
  for (const MetaWord& mw : r1.survivors)
    for (const Word& w : min_instantiations(mw, t.spec)) {
      bool represented = false;
      for (const Obligation& pat : before)
        if (matches_obligation(pat, w)) {
          represented = true;
          break;
        }
      CHECK(represented);
      ++witnesses;
    }
  CHECK(witnesses > 0);
}

TEST_CASE("proved obligations have no small mishap-free instantiation") {
  AlphabetSpec spec{3, 2};
  GrammarTree t = discover_grammar(spec, 20);
  int audited = 0;
  for (const Vertex& v : t.vertices) {
    if (audited >= 12) break;
    if (v.kind != VertexKind::empty_leaf && v.kind != VertexKind::clone_leaf)
      continue;
    for (const Obligation& ob : leaf_obligations(t, v)) {
      if (audited >= 12) break;
      auto out = prove_obligation(ob, spec, 3);
      if (out.status != ProofOutcome::Status::proved) continue;
      CHECK_FALSE(find_mishap_free_instantiation(ob, spec, 10));
      ++audited;
    }
  }
  CHECK(audited == 12);

  // And a disproof's witness is a real mishap-free instantiation.
  Word witness;
  Obligation open_ob = canonical_obligation({{-2}, {}}, {2});
  auto out = prove_obligation(open_ob, spec, 3);
  REQUIRE(out.status == ProofOutcome::Status::disproved);
  CHECK(naive_mishap_free(out.counterexample, 3, 2));
  CHECK(matches_obligation(open_ob, out.counterexample));
  CHECK(find_mishap_free_instantiation(open_ob, spec, 10, &witness));
  CHECK(naive_mishap_free(witness, 3, 2));
}

TEST_CASE("empty leaves of discovered trees are all provable") {
  GrammarTree t = discover_grammar({3, 2}, 20);
  int proved = 0;
  for (const Vertex& v : t.vertices) {
    if (v.kind != VertexKind::empty_leaf) continue;
    auto out = prove_empty_leaf(t, v, 3);
    CHECK(out.status == ProofOutcome::Status::proved);
    ++proved;
  }
  CHECK(proved > 0);
  CHECK_THROWS_AS(prove_empty_leaf(t, t.root(), 3), std::invalid_argument);
}

TEST_CASE("a fabricated empty leaf is disproved with a good middle") {
  GrammarTree t = discover_grammar({1, 1}, 12);
  GrammarTree bad = t;
  Vertex& v = bad.vertices[4];  // genuinely a clone of the root
  REQUIRE(v.kind == VertexKind::clone_leaf);
  v.kind = VertexKind::empty_leaf;
  v.target = -1;
  v.delta_len = 0;
  auto out = prove_empty_leaf(bad, v, 3);
  REQUIRE(out.status == ProofOutcome::Status::disproved);
  Word full = v.w1;
  full.insert(full.end(), out.counterexample.begin(), out.counterexample.end());
  full.insert(full.end(), v.w2.begin(), v.w2.end());
  CHECK(is_good(full, bad.spec));
}

TEST_CASE("clone leaves of discovered trees are all provable") {
  GrammarTree t = discover_grammar({3, 2}, 20);
  int proved = 0;
  for (const Vertex& v : t.vertices) {
    if (v.kind != VertexKind::clone_leaf) continue;
    auto out = prove_clone_leaf(t, v, 3);
    CHECK(out.status == ProofOutcome::Status::proved);
    CHECK(out.purges_used <= 3);
    ++proved;
  }
  CHECK(proved > 0);
}

TEST_CASE("a fabricated clone pairing distinct residuals is disproved") {
  GrammarTree t = discover_grammar({1, 1}, 12);
  GrammarTree bad = t;
  Vertex& v = bad.vertices[6];  // context (e | -1,-1): an empty residual
  REQUIRE(v.kind == VertexKind::empty_leaf);
  v.kind = VertexKind::clone_leaf;
  v.target = 0;  // the root's residual contains the empty word
  v.delta_len = 2;
  auto out = prove_clone_leaf(bad, v, 3);
  REQUIRE(out.status == ProofOutcome::Status::disproved);
  CHECK(out.counterexample == Word{});
  CHECK(is_good(out.counterexample, bad.spec));

  GrammarTree oob = t;
  oob.vertices[4].target = 99;
  CHECK_THROWS_AS(prove_clone_leaf(oob, oob.vertices[4], 3),
                  MalformedTreeError);
}

TEST_CASE("clones with mismatched context sums reduce to dual emptiness") {
  GrammarTree t;
  t.spec = {1, 1};
  t.corpus_max_len = 12;
  Vertex target;
  target.id = 0;
  target.kind = VertexKind::empty_leaf;
  target.w1 = {1};
  target.w2 = {-1, -1};  // sum -1, residual empty
  Vertex clone;
  clone.id = 1;
  clone.kind = VertexKind::clone_leaf;
  clone.target = 0;
  clone.delta_len = 1;
  clone.w1 = {1, 1};  // sum 2, residual also empty
  t.vertices = {target, clone};
  auto out = prove_clone_leaf(t, t.vertices[1], 3);
  CHECK(out.status == ProofOutcome::Status::proved);

  // Same mismatch, but one side is nonempty: the shared middle is only good
  // on that side.
  t.vertices[1].w1 = {1, -1};  // sum 0: the empty middle is good here
  auto out2 = prove_clone_leaf(t, t.vertices[1], 3);
  REQUIRE(out2.status == ProofOutcome::Status::disproved);
  CHECK(out2.counterexample == Word{});
}

TEST_CASE("a mishap inside a context falls back to an emptiness claim") {
  GrammarTree t;
  t.spec = {3, 2};
  t.corpus_max_len = 20;
  Vertex target;
  target.id = 0;
  target.kind = VertexKind::empty_leaf;
  target.w1 = {};
  target.w2 = {-2};  // sum -2, residual nonempty: 3,-2,3,-2 fits
  Vertex clone;
  clone.id = 1;
  clone.kind = VertexKind::clone_leaf;
  clone.target = 0;
  clone.delta_len = 5;
  clone.w1 = {3, -2, -2, 3, -2, -2};  // mishap inside; sum -2; residual empty
  clone.w2 = {};
  t.vertices = {target, clone};
  auto out = prove_clone_leaf(t, t.vertices[1], 3);
  REQUIRE(out.status == ProofOutcome::Status::disproved);
  CHECK_FALSE(is_good(out.counterexample, t.spec));  // not good on its own...
  Word on_good = out.counterexample;
  on_good.push_back(-2);
  CHECK(is_good(on_good, t.spec));  // ...but it is good on the target side
}

TEST_CASE("leaf obligations are exposed in proof order") {
  GrammarTree t = discover_grammar({3, 2}, 20);
  std::size_t clone_total = 0;
  for (const Vertex& v : t.vertices) {
    if (v.kind == VertexKind::empty_leaf)
      CHECK(leaf_obligations(t, v).size() == 1);
    // A clone whose contexts expose no straddle letters owes nothing.
    if (v.kind == VertexKind::clone_leaf)
      clone_total += leaf_obligations(t, v).size();
  }
  CHECK(clone_total > 0);
}

TEST_CASE("full certification works on the discovered grammars") {
  GrammarTree t32 = discover_grammar({3, 2}, 20);
  ProofReport rep = prove_grammar(t32, 3);
  CHECK(rep.verdict == ProofReport::Verdict::good);
  CHECK(rep.max_purges_used <= 3);  // the classical bound
  CHECK(rep.leaves.size() == 82);
  for (const LeafProof& lp : rep.leaves)
    CHECK(lp.outcome.status == ProofOutcome::Status::proved);

  for (int a : {1, 2, 3}) {
    GrammarTree t = discover_grammar({a, 1}, 4 * (a + 1));
    ProofReport r = prove_grammar(t, 3);
    CHECK(r.verdict == ProofReport::Verdict::good);
    CHECK(r.max_purges_used == 0);  // no fundamental brackets when b = 1
  }
}

TEST_CASE("corrupting one leaf flips the verdict to false") {
  GrammarTree t = discover_grammar({1, 1}, 12);
  GrammarTree bad = t;
  bad.vertices[6].kind = VertexKind::clone_leaf;
  bad.vertices[6].target = 0;
  bad.vertices[6].delta_len = 2;
  ProofReport rep = prove_grammar(bad, 3);
  CHECK(rep.verdict == ProofReport::Verdict::bad);
  bool flagged = false;
  for (const LeafProof& lp : rep.leaves)
    if (lp.id == 6) {
      flagged = lp.outcome.status == ProofOutcome::Status::disproved;
    } else {
      CHECK(lp.outcome.status == ProofOutcome::Status::proved);
    }
  CHECK(flagged);

  GrammarTree undecided = t;
  undecided.vertices[5].kind = VertexKind::undecided;
  CHECK_THROWS_AS(prove_grammar(undecided, 3), MalformedTreeError);
}

TEST_CASE("proof reports serialize to the fixed text form") {
  GrammarTree t = discover_grammar({1, 1}, 12);
  CHECK(format_report(prove_grammar(t, 3)) ==
        "convention purge-count=post-initialization-rounds\n"
        "leaf 3 EMP PROVED p=0\n"
        "leaf 4 CLO PROVED p=0\n"
        "leaf 5 CLO PROVED p=0\n"
        "leaf 6 EMP PROVED p=0\n"
        "verdict true\n");

  // Inconclusive and disproved lines.
  AlphabetSpec spec{3, 2};
  ProofReport rep;
  rep.verdict = ProofReport::Verdict::unknown;
  LeafProof lp;
  lp.id = 7;
  lp.kind = VertexKind::clone_leaf;
  lp.outcome = prove_obligation(canonical_obligation({{}, {}}, {1}), spec, 0);
  rep.leaves.push_back(lp);
  CHECK(format_report(rep) ==
        "convention purge-count=post-initialization-rounds\n"
        "leaf 7 CLO INCONCLUSIVE n=1\n"
        "verdict unknown\n");
}

TEST_CASE("meta-words and obligations print compactly") {
  CHECK(to_string(MetaWord{}) == "e");
  CHECK(to_string(mw_of({meta_lit(-2), meta_bracket(1, 0), meta_lit(3),
                         meta_bracket(1, 0), meta_lit(-2)})) ==
        "-2,[1],3,[1],-2");
}
