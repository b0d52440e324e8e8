#include "lingram/prover.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>

namespace lingram {

namespace {

std::int64_t suffix_sum(const Word& w, std::size_t from) {
  std::int64_t s = 0;
  for (std::size_t i = from; i < w.size(); ++i) s += w[i];
  return s;
}

std::int64_t prefix_sum(const Word& w, std::size_t upto) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < upto; ++i) s += w[i];
  return s;
}

Word concat(const Word& x, const Word& y) {
  Word out = x;
  out.insert(out.end(), y.begin(), y.end());
  return out;
}

bool is_fundamental(int sum, const AlphabetSpec& spec) {
  return sum >= 1 && sum <= spec.b - 1;
}

Word flatten(const MetaWord& mw) {
  Word out;
  out.reserve(mw.letters.size());
  for (const MetaLetter& l : mw.letters) out.push_back(l.value);
  return out;
}

bool purge(const MetaWord& mw, const AlphabetSpec& spec) {
  return guaranteed_mishap(mw, spec) || has_forced_zero_run(mw);
}

// Replace the bracket at pos by each replacement's letters, retagged with
// the bracket's region so zero-run purging keeps tracking the original
// bracket's filling.
MetaWord splice(const MetaWord& mw, std::size_t pos,
                const MetaWord& replacement) {
  const int region = mw.letters[pos].region;
  MetaWord out;
  out.letters.reserve(mw.letters.size() + replacement.letters.size() - 1);
  out.letters.insert(out.letters.end(), mw.letters.begin(),
                     mw.letters.begin() + static_cast<std::ptrdiff_t>(pos));
  for (MetaLetter l : replacement.letters) {
    l.region = region;
    out.letters.push_back(l);
  }
  out.letters.insert(out.letters.end(),
                     mw.letters.begin() + static_cast<std::ptrdiff_t>(pos) + 1,
                     mw.letters.end());
  return out;
}

int leftmost_nonfundamental(const MetaWord& mw, const AlphabetSpec& spec) {
  for (std::size_t i = 0; i < mw.letters.size(); ++i)
    if (mw.letters[i].kind == MetaLetter::Kind::bracket &&
        !is_fundamental(mw.letters[i].value, spec))
      return static_cast<int>(i);
  return -1;
}

using SurvivorSet = std::set<MetaWord>;

// Depth-first elimination of non-fundamental brackets, purging every
// produced meta-word immediately: a mishap or forced zero run persists under
// further expansion (replacements preserve the between-sums), so dropping a
// doomed branch early loses nothing. Always terminates: positive sums
// strictly decrease toward the fundamental range and negative sums strictly
// increase toward it, never re-creating a larger sum.
SurvivorSet expand_to_fundamental(MetaWord start, const AlphabetSpec& spec,
                                  std::int64_t* steps = nullptr,
                                  std::int64_t step_cap = -1) {
  SurvivorSet out;
  std::vector<MetaWord> stack;
  stack.push_back(std::move(start));
  while (!stack.empty()) {
    MetaWord mw = std::move(stack.back());
    stack.pop_back();
    if (purge(mw, spec)) continue;
    const int pos = leftmost_nonfundamental(mw, spec);
    if (pos < 0) {
      out.insert(std::move(mw));
      continue;
    }
    if (steps != nullptr) {
      ++*steps;
      if (step_cap >= 0 && *steps > step_cap)
        throw ClosureFailureError(
            "bracket expansion did not close within the step limit");
    }
    for (const MetaWord& branch :
         word_recurrence_expand(mw.letters[static_cast<std::size_t>(pos)].value,
                                spec))
      stack.push_back(splice(mw, static_cast<std::size_t>(pos), branch));
  }
  return out;
}

MetaWord initial_metaword(const Obligation& ob) {
  MetaWord mw;
  for (std::size_t j = 0;; ++j) {
    for (int letter : ob.literals[j])
      mw.letters.push_back(meta_lit(letter));
    if (j == ob.brackets.size()) break;
    // A zero bracket reduces to its empty filling: a mishap in the reduced
    // word persists in every filling, since deleting a zero-sum factor from
    // a mishap-free word leaves it mishap-free (contrapositive).
    if (ob.brackets[j] != 0)
      mw.letters.push_back(meta_bracket(ob.brackets[j], static_cast<int>(j)));
  }
  return mw;
}

// One purge round: substitute every fundamental bracket by each of its
// closed expansions (cartesian across the brackets), then purge.
SurvivorSet substitute_round(const SurvivorSet& survivors,
                             ExpansionFamily& family) {
  const AlphabetSpec& spec = family.spec();
  SurvivorSet next;
  for (const MetaWord& mw : survivors) {
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < mw.letters.size(); ++i)
      if (mw.letters[i].kind == MetaLetter::Kind::bracket)
        positions.push_back(i);
    std::vector<const std::vector<MetaWord>*> choices;
    bool dead_end = false;
    for (std::size_t pos : positions) {
      const std::vector<MetaWord>& exp = family.for_sum(mw.letters[pos].value);
      if (exp.empty()) dead_end = true;  // that sum has no surviving shape
      choices.push_back(&exp);
    }
    if (dead_end) continue;
    // Odometer over the per-bracket choices; a bracket-free survivor makes
    // a single pass and persists unchanged.
    std::vector<std::size_t> pick(positions.size(), 0);
    while (true) {
      MetaWord combo = mw;
      for (std::size_t k = positions.size(); k-- > 0;)
        combo = splice(combo, positions[k], (*choices[k])[pick[k]]);
      if (!purge(combo, spec)) next.insert(std::move(combo));
      std::size_t k = 0;
      for (; k < pick.size(); ++k) {
        if (++pick[k] < choices[k]->size()) break;
        pick[k] = 0;
      }
      if (k == pick.size()) break;
    }
  }
  return next;
}

ProofOutcome prove_obligation_impl(const Obligation& ob,
                                   ExpansionFamily& family, int max_purges,
                                   const PurgeObserver& observer) {
  const AlphabetSpec& spec = family.spec();
  SurvivorSet survivors = expand_to_fundamental(initial_metaword(ob), spec);
  for (int round = 0;; ++round) {
    if (observer)
      observer(round,
               std::vector<MetaWord>(survivors.begin(), survivors.end()));
    if (survivors.empty()) {
      ProofOutcome out;
      out.status = ProofOutcome::Status::proved;
      out.purges_used = round;
      return out;
    }
    for (const MetaWord& mw : survivors) {
      if (!mw.bracket_free()) continue;
      Word w = flatten(mw);
      if (!is_mishap_free(w, spec)) continue;  // defensive; purge catches it
      ProofOutcome out;
      out.status = ProofOutcome::Status::disproved;
      out.counterexample = std::move(w);
      return out;
    }
    if (round == max_purges) {
      ProofOutcome out;
      out.status = ProofOutcome::Status::inconclusive;
      out.purges_used = round;
      out.survivors.assign(survivors.begin(), survivors.end());
      return out;
    }
    survivors = substitute_round(survivors, family);
  }
}

Obligation emptiness_obligation(const Context& ctx, int middle_sum) {
  return canonical_obligation({ctx.first, ctx.second}, {middle_sum});
}

// One direction of a clone proof: the obligations live on good_ctx, and a
// disproving middle must be good there and bad on bad_ctx.
struct Direction {
  Context good, bad;
  std::vector<Obligation> obligations;
};

int checked_sum(const Vertex& v) { return static_cast<int>(v.context_sum()); }

std::vector<Direction> clone_directions(const GrammarTree& t, const Vertex& v) {
  if (v.kind != VertexKind::clone_leaf)
    throw std::invalid_argument("vertex is not a clone leaf");
  if (v.target < 0 || v.target >= static_cast<int>(t.vertices.size()))
    throw MalformedTreeError("clone target out of range");
  const Vertex& tv = t.vertices[static_cast<std::size_t>(v.target)];
  const Context cv{v.w1, v.w2};
  const Context ct{tv.w1, tv.w2};
  const int av = checked_sum(v);
  const int at = checked_sum(tv);
  std::vector<Direction> dirs;
  if (av != at) {
    // No middle can be good on both sides, so equality of the residuals is
    // exactly the emptiness of both.
    dirs.push_back({cv, ct, {emptiness_obligation(cv, -av)}});
    dirs.push_back({ct, cv, {emptiness_obligation(ct, -at)}});
    return dirs;
  }
  const int middle_sum = -av;
  for (const auto& [bad, good] :
       {std::pair{cv, ct}, std::pair{ct, cv}}) {
    Direction d{good, bad, {}};
    try {
      d.obligations =
          potential_mishap_obligations(good, bad, middle_sum, t.spec);
    } catch (const InherentContextMishapError&) {
      // That side is bad for every middle; the direction holds iff the good
      // side is bad for every middle too, i.e. its residual is empty.
      d.obligations = {emptiness_obligation(good, middle_sum)};
    }
    dirs.push_back(std::move(d));
  }
  return dirs;
}

// Counterexamples from prove_obligation are full instantiated words; the
// leaf-level outcome reports the middle with the good context stripped.
Word strip_context(const Word& full, const Context& ctx) {
  const std::size_t n1 = ctx.first.size();
  const std::size_t n2 = ctx.second.size();
  if (full.size() < n1 + n2 ||
      !std::equal(ctx.first.begin(), ctx.first.end(), full.begin()) ||
      !std::equal(ctx.second.begin(), ctx.second.end(),
                  full.end() - static_cast<std::ptrdiff_t>(n2)))
    throw MalformedTreeError("counterexample does not embed its context");
  return Word(full.begin() + static_cast<std::ptrdiff_t>(n1),
              full.end() - static_cast<std::ptrdiff_t>(n2));
}

Word wrap_context(const Context& ctx, const Word& middle) {
  return concat(concat(ctx.first, middle), ctx.second);
}

struct ProverCore {
  ExpansionFamily family;
  int max_purges;
  std::map<Obligation, ProofOutcome> cache;

  ProverCore(const AlphabetSpec& spec, int purges)
      : family(spec), max_purges(purges) {}

  const ProofOutcome& prove(const Obligation& ob) {
    auto it = cache.find(ob);
    if (it == cache.end())
      it = cache.emplace(ob, prove_obligation_impl(ob, family, max_purges, {}))
               .first;
    return it->second;
  }

  ProofOutcome empty_leaf(const GrammarTree& t, const Vertex& v) {
    if (v.kind != VertexKind::empty_leaf)
      throw std::invalid_argument("vertex is not an empty leaf");
    const Context ctx{v.w1, v.w2};
    ProofOutcome out = prove(emptiness_obligation(ctx, -checked_sum(v)));
    if (out.status == ProofOutcome::Status::disproved) {
      if (is_good(out.counterexample, t.spec)) {
        out.counterexample = strip_context(out.counterexample, ctx);
      } else {
        // The counterexample failed verification; never claim a disproof on
        // unverified evidence.
        out = ProofOutcome{};
        out.status = ProofOutcome::Status::inconclusive;
        out.purges_used = max_purges;
      }
    }
    return out;
  }

  ProofOutcome clone_leaf(const GrammarTree& t, const Vertex& v) {
    ProofOutcome agg;
    agg.status = ProofOutcome::Status::proved;
    bool stuck = false;
    for (const Direction& dir : clone_directions(t, v)) {
      for (const Obligation& ob : dir.obligations) {
        const ProofOutcome& r = prove(ob);
        switch (r.status) {
          case ProofOutcome::Status::proved:
            agg.purges_used = std::max(agg.purges_used, r.purges_used);
            break;
          case ProofOutcome::Status::disproved: {
            Word middle = strip_context(r.counterexample, dir.good);
            if (is_good(wrap_context(dir.good, middle), t.spec) &&
                !is_good(wrap_context(dir.bad, middle), t.spec)) {
              ProofOutcome out;
              out.status = ProofOutcome::Status::disproved;
              out.counterexample = std::move(middle);
              return out;
            }
            stuck = true;  // unverifiable disproof: report unknown, not false
            break;
          }
          case ProofOutcome::Status::inconclusive:
            stuck = true;
            agg.purges_used = std::max(agg.purges_used, r.purges_used);
            if (agg.survivors.empty()) agg.survivors = r.survivors;
            break;
        }
      }
    }
    if (stuck) agg.status = ProofOutcome::Status::inconclusive;
    return agg;
  }
};

}  // namespace

bool MetaWord::bracket_free() const {
  for (const MetaLetter& l : letters)
    if (l.kind == MetaLetter::Kind::bracket) return false;
  return true;
}

std::string to_string(const MetaWord& mw) {
  if (mw.letters.empty()) return "e";
  std::string out;
  for (const MetaLetter& l : mw.letters) {
    if (!out.empty()) out += ',';
    if (l.kind == MetaLetter::Kind::bracket)
      out += '[' + std::to_string(l.value) + ']';
    else
      out += std::to_string(l.value);
  }
  return out;
}

Obligation canonical_obligation(std::vector<Word> literals,
                                std::vector<int> brackets) {
  if (literals.size() != brackets.size() + 1)
    throw std::invalid_argument(
        "obligation needs exactly one more literal segment than brackets");
  // Zero brackets are kept: as a pattern, [0] stands for any zero-sum chunk,
  // not for the empty word. Only the proof engine may reduce it to the empty
  // filling, where removing a zero-sum factor is known to preserve mishaps.
  Obligation ob;
  ob.literals = std::move(literals);
  ob.brackets = std::move(brackets);
  return ob;
}

std::string format_obligation(const Obligation& ob) {
  std::string out = format_word(ob.literals.front());
  for (std::size_t j = 0; j < ob.brackets.size(); ++j) {
    out += " [" + std::to_string(ob.brackets[j]) + "] ";
    out += format_word(ob.literals[j + 1]);
  }
  return out;
}

std::vector<MetaWord> word_recurrence_expand(int sum,
                                             const AlphabetSpec& spec) {
  validate_spec(spec);
  if (sum == 0) throw std::invalid_argument("cannot expand a zero bracket");
  std::vector<MetaWord> out;
  auto push = [&](int left, int letter, int right) {
    MetaWord mw;
    if (left != 0) mw.letters.push_back(meta_bracket(left, 0));
    mw.letters.push_back(meta_lit(letter, 0));
    if (right != 0) mw.letters.push_back(meta_bracket(right, 0));
    out.push_back(std::move(mw));
  };
  if (sum > 0) {
    // The shortest prefix of positive sum ends in +a and sums to 1..a.
    for (int i = 1; i <= spec.a; ++i) push(i - spec.a, spec.a, sum - i);
  } else {
    for (int i = 1; i <= spec.b; ++i) push(spec.b - i, -spec.b, sum + i);
  }
  return out;
}

bool guaranteed_mishap(const MetaWord& mw, const AlphabetSpec& spec) {
  const std::size_t n = mw.letters.size();
  std::vector<std::int64_t> pre(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) pre[i + 1] = pre[i] + mw.letters[i].value;
  for (std::size_t i = 0; i < n; ++i) {
    if (mw.letters[i].kind != MetaLetter::Kind::lit ||
        mw.letters[i].value != spec.a)
      continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (mw.letters[j].kind != MetaLetter::Kind::lit ||
          mw.letters[j].value != -spec.b)
        continue;
      if (pre[j] - pre[i + 1] == -spec.a) return true;
    }
  }
  return false;
}

bool has_forced_zero_run(const MetaWord& mw) {
  const std::size_t n = mw.letters.size();
  std::size_t block = 0;
  while (block < n) {
    const int region = mw.letters[block].region;
    std::size_t end = block;
    while (end < n && mw.letters[end].region == region) ++end;
    if (region != kContextRegion) {
      const std::size_t len = end - block;
      // Partial sums over the block; a repeat means a zero-sum run. The run
      // equal to the whole region is exempt (it is the bracket sum itself).
      std::vector<std::int64_t> pre(len + 1, 0);
      for (std::size_t i = 0; i < len; ++i)
        pre[i + 1] = pre[i] + mw.letters[block + i].value;
      for (std::size_t i = 0; i + 1 <= len; ++i)
        for (std::size_t j = i + 1; j <= len; ++j) {
          if (i == 0 && j == len) continue;
          if (pre[i] == pre[j]) return true;
        }
    }
    block = end;
  }
  return false;
}

ExpansionFamily::ExpansionFamily(AlphabetSpec spec, ProverLimits limits)
    : spec_(spec), limits_(limits) {
  validate_spec(spec_);
}

const std::vector<MetaWord>& ExpansionFamily::for_sum(int sum) {
  auto it = memo_.find(sum);
  if (it != memo_.end()) return it->second;
  // Expand once unconditionally -- the self-referential shape of a
  // fundamental sum, not the bracket itself -- then close.
  std::int64_t steps = 0;
  SurvivorSet all;
  for (const MetaWord& branch : word_recurrence_expand(sum, spec_))
    all.merge(expand_to_fundamental(branch, spec_, &steps,
                                    limits_.max_expansion_steps));
  std::vector<MetaWord> out(all.begin(), all.end());
  return memo_.emplace(sum, std::move(out)).first->second;
}

std::map<int, std::vector<MetaWord>> fundamental_expansions(
    const AlphabetSpec& spec, ProverLimits limits) {
  ExpansionFamily family(spec, limits);
  std::map<int, std::vector<MetaWord>> out;
  for (int k = 1; k <= spec.b - 1; ++k) out.emplace(k, family.for_sum(k));
  return out;
}

std::vector<Obligation> potential_mishap_obligations(const Context& good_ctx,
                                                     const Context& bad_ctx,
                                                     int middle_sum,
                                                     const AlphabetSpec& spec) {
  validate_spec(spec);
  if (!is_mishap_free(bad_ctx.first, spec) ||
      !is_mishap_free(bad_ctx.second, spec))
    throw InherentContextMishapError(
        "context word contains a mishap by itself");
  std::set<Obligation> out;
  auto wrap = [&](std::vector<Word> lits, std::vector<int> brackets) {
    lits.front() = concat(good_ctx.first, lits.front());
    lits.back() = concat(lits.back(), good_ctx.second);
    out.insert(canonical_obligation(std::move(lits), std::move(brackets)));
  };
  // (i) opening +a in bad w1, closing -b inside the middle.
  for (std::size_t p = 0; p < bad_ctx.first.size(); ++p) {
    if (bad_ctx.first[p] != spec.a) continue;
    const int a1 =
        static_cast<int>(-spec.a - suffix_sum(bad_ctx.first, p + 1));
    const int b1 = middle_sum + spec.b - a1;
    wrap({{}, {-spec.b}, {}}, {a1, b1});
  }
  // (ii) opening +a inside the middle, closing -b in bad w2.
  for (std::size_t q = 0; q < bad_ctx.second.size(); ++q) {
    if (bad_ctx.second[q] != -spec.b) continue;
    const int b1 = static_cast<int>(-spec.a - prefix_sum(bad_ctx.second, q));
    const int a1 = middle_sum - spec.a - b1;
    wrap({{}, {spec.a}, {}}, {a1, b1});
  }
  // (iii) both mishap letters in context, the whole middle in between; only
  // consistent when the forced middle sum is the actual middle sum.
  for (std::size_t p = 0; p < bad_ctx.first.size(); ++p) {
    if (bad_ctx.first[p] != spec.a) continue;
    for (std::size_t q = 0; q < bad_ctx.second.size(); ++q) {
      if (bad_ctx.second[q] != -spec.b) continue;
      const std::int64_t forced = -spec.a - suffix_sum(bad_ctx.first, p + 1) -
                                  prefix_sum(bad_ctx.second, q);
      if (forced == middle_sum) wrap({{}, {}}, {middle_sum});
    }
  }
  return std::vector<Obligation>(out.begin(), out.end());
}

ProofOutcome prove_obligation(const Obligation& ob, const AlphabetSpec& spec,
                              int max_purges, const PurgeObserver& observer) {
  if (max_purges < 0) throw std::invalid_argument("max_purges must be >= 0");
  ExpansionFamily family(spec);
  return prove_obligation_impl(ob, family, max_purges, observer);
}

std::vector<Obligation> leaf_obligations(const GrammarTree& t,
                                         const Vertex& v) {
  if (v.kind == VertexKind::empty_leaf)
    return {emptiness_obligation({v.w1, v.w2}, -checked_sum(v))};
  std::vector<Obligation> out;
  for (const Direction& dir : clone_directions(t, v))
    out.insert(out.end(), dir.obligations.begin(), dir.obligations.end());
  return out;
}

ProofOutcome prove_empty_leaf(const GrammarTree& t, const Vertex& v,
                              int max_purges) {
  ProverCore core(t.spec, max_purges);
  return core.empty_leaf(t, v);
}

ProofOutcome prove_clone_leaf(const GrammarTree& t, const Vertex& v,
                              int max_purges) {
  ProverCore core(t.spec, max_purges);
  return core.clone_leaf(t, v);
}

ProofReport prove_grammar(const GrammarTree& t, int max_purges) {
  if (max_purges < 0) throw std::invalid_argument("max_purges must be >= 0");
  validate_tree(t);
  ProverCore core(t.spec, max_purges);
  ProofReport report;
  bool all_proved = true;
  bool any_disproved = false;
  for (const Vertex& v : t.vertices) {
    if (v.kind != VertexKind::empty_leaf && v.kind != VertexKind::clone_leaf)
      continue;
    LeafProof lp;
    lp.id = v.id;
    lp.kind = v.kind;
    lp.outcome = v.kind == VertexKind::empty_leaf ? core.empty_leaf(t, v)
                                                  : core.clone_leaf(t, v);
    all_proved &= lp.outcome.status == ProofOutcome::Status::proved;
    any_disproved |= lp.outcome.status == ProofOutcome::Status::disproved;
    report.max_purges_used =
        std::max(report.max_purges_used, lp.outcome.purges_used);
    report.leaves.push_back(std::move(lp));
  }
  report.verdict = all_proved      ? ProofReport::Verdict::good
                   : any_disproved ? ProofReport::Verdict::bad
                                   : ProofReport::Verdict::unknown;
  return report;
}

std::string format_report(const ProofReport& report) {
  std::string out = "convention purge-count=post-initialization-rounds\n";
  for (const LeafProof& lp : report.leaves) {
    out += "leaf " + std::to_string(lp.id) + ' ';
    out += lp.kind == VertexKind::empty_leaf ? "EMP" : "CLO";
    switch (lp.outcome.status) {
      case ProofOutcome::Status::proved:
        out += " PROVED p=" + std::to_string(lp.outcome.purges_used);
        break;
      case ProofOutcome::Status::disproved:
        out += " DISPROVED w=" + format_word(lp.outcome.counterexample);
        break;
      case ProofOutcome::Status::inconclusive:
        out += " INCONCLUSIVE n=" + std::to_string(lp.outcome.survivors.size());
        break;
    }
    out += '\n';
  }
  switch (report.verdict) {
    case ProofReport::Verdict::good:
      out += "verdict true\n";
      break;
    case ProofReport::Verdict::bad:
      out += "verdict false\n";
      break;
    case ProofReport::Verdict::unknown:
      out += "verdict unknown\n";
      break;
  }
  return out;
}

}  // namespace lingram
