#include "lingram/discovery.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace lingram {
namespace {

// Residual middles of one context, stratified by middle length up to the
// context's truncation budget, with per-length hashes so clone scans can
// reject mismatches cheaply.
struct ResidualTable {
  int budget = -1;
  std::vector<std::vector<Word>> by_len;
  std::vector<std::uint64_t> hash_by_len;
  std::vector<std::int64_t> count_by_len;

  std::int64_t total(int upto) const {
    std::int64_t n = 0;
    for (int l = 0; l <= upto; ++l) n += count_by_len[l];
    return n;
  }
  bool empty_upto(int upto) const { return total(upto) == 0; }
};

std::uint64_t hash_words(const std::vector<Word>& ws) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  for (const Word& w : ws) {
    mix(w.size());
    for (int c : w) mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
  }
  return h;
}

ResidualTable build_residual_table(const Corpus& c, const Context& ctx) {
  const auto& [w1, w2] = ctx;
  ResidualTable t;
  t.budget = c.max_len - static_cast<int>(w1.size() + w2.size());
  if (t.budget < 0) t.budget = -1;
  t.by_len.assign(t.budget + 1, {});
  for (const Word& v : residual_middles(c, w1, w2))
    t.by_len[v.size()].push_back(v);
  for (const auto& stratum : t.by_len) {
    t.hash_by_len.push_back(hash_words(stratum));
    t.count_by_len.push_back(static_cast<std::int64_t>(stratum.size()));
  }
  return t;
}

bool tables_equal_upto(const ResidualTable& t1, const ResidualTable& t2,
                       int upto) {
  for (int l = 0; l <= upto; ++l)
    if (t1.count_by_len[l] != t2.count_by_len[l] ||
        t1.hash_by_len[l] != t2.hash_by_len[l])
      return false;
  for (int l = 0; l <= upto; ++l)  // hashes matched; confirm for real
    if (t1.by_len[l] != t2.by_len[l]) return false;
  return true;
}

int effective_min_budget(int min_budget, const AlphabetSpec& spec) {
  return min_budget > 0 ? min_budget : spec.period();
}

class Discoverer {
 public:
  Discoverer(const AlphabetSpec& spec, int corpus_max_len,
             const DiscoveryLimits& limits)
      : corpus_(generate_corpus(spec, corpus_max_len)),
        limits_(limits),
        min_budget_(effective_min_budget(limits.min_compare_budget, spec)) {
    tree_.spec = spec;
    tree_.corpus_max_len = corpus_max_len;
  }

  GrammarTree run() {
    make_vertex({{}, {}});
    for (std::size_t next = 0; next < tree_.vertices.size(); ++next)
      classify(static_cast<int>(next));
    return std::move(tree_);
  }

 private:
  const ResidualTable& residuals(const Context& ctx) {
    auto it = cache_.find(ctx);
    if (it == cache_.end())
      it = cache_.emplace(ctx, build_residual_table(corpus_, ctx)).first;
    return it->second;
  }

  int make_vertex(const Context& ctx) {
    Vertex v;
    v.id = static_cast<int>(tree_.vertices.size());
    v.w1 = ctx.first;
    v.w2 = ctx.second;
    Word joined = v.w1;
    joined.insert(joined.end(), v.w2.begin(), v.w2.end());
    v.singleton = is_good(joined, tree_.spec);
    tree_.vertices.push_back(std::move(v));
    return tree_.vertices.back().id;
  }

  [[noreturn]] void give_up(const std::string& why,
                            DiscoveryLimitError::Reason reason) {
    throw DiscoveryLimitError(why, reason, tree_);
  }

  void classify(int id) {
    const Context ctx{tree_.vertices[id].w1, tree_.vertices[id].w2};
    const int ctx_len = tree_.vertices[id].context_len();
    const int budget = corpus_.max_len - ctx_len;
    if (budget < min_budget_)
      give_up("vertex " + std::to_string(id) + " context length " +
                  std::to_string(ctx_len) + " leaves budget " +
                  std::to_string(budget) + " below minimum " +
                  std::to_string(min_budget_),
              DiscoveryLimitError::Reason::budget_floor);

    const ResidualTable& table = residuals(ctx);
    if (table.empty_upto(budget)) {
      tree_.vertices[id].kind = VertexKind::empty_leaf;
      return;
    }

    // First earlier vertex with a strictly shorter context and the same
    // residual middles within this vertex's budget is the clone target.
    for (int t = 0; t < id; ++t) {
      const Vertex& cand = tree_.vertices[t];
      if (cand.context_len() >= ctx_len) continue;
      if (tables_equal_upto(table, residuals({cand.w1, cand.w2}), budget)) {
        Vertex& v = tree_.vertices[id];
        v.kind = VertexKind::clone_leaf;
        v.target = t;
        v.delta_len = ctx_len - cand.context_len();
        return;
      }
    }

    // Internal: pick the way whose children's residual counts look most like
    // products of the period structure; head wins ties.  Two refinements of
    // the raw smooth-part product matter in practice:
    //  - counts are taken at the deepest stratum the corpus can see, because
    //    middle lengths sit in one residue class mod the period and summing
    //    strata masks divisibility (clean towers c, 10c, 100c total a repunit
    //    multiple, coprime to 10);
    //  - an empirically empty child is infinitely congenial — gcd(0, m^k)
    //    is m^k, unbounded — so ways are ranked first by how many children
    //    are empty within budget, then by the smooth-part product.
    SplitPair head = head_split(ctx, tree_.spec);
    SplitPair tail = tail_split(ctx, tree_.spec);
    const int child_budget = budget - 1;
    const int frontier =
        child_budget - (child_budget + ctx_len + 1) % tree_.spec.period();
    using PairScore = std::pair<int, std::int64_t>;  // (empty children, product)
    auto pair_score = [&](const SplitPair& split) {
      PairScore s{0, 1};
      for (const Context& child : {split.plus, split.minus}) {
        const ResidualTable& table = residuals(child);
        if (table.empty_upto(child_budget)) {
          ++s.first;
          continue;
        }
        std::int64_t at_frontier =
            frontier < 0 ? 0 : table.count_by_len[frontier];
        if (at_frontier > 0)
          s.second *= congeniality_score(at_frontier, tree_.spec);
      }
      return s;
    };
    Way way =
        pair_score(head) >= pair_score(tail) ? Way::head : Way::tail;

    if (static_cast<int>(tree_.vertices.size()) + 2 > limits_.max_vertices)
      give_up("vertex limit " + std::to_string(limits_.max_vertices) +
                  " reached",
              DiscoveryLimitError::Reason::vertex_limit);
    const SplitPair& chosen = way == Way::head ? head : tail;
    int left = make_vertex(chosen.plus);
    int right = make_vertex(chosen.minus);
    Vertex& v = tree_.vertices[id];
    v.kind = VertexKind::internal;
    v.way = way;
    v.left = left;
    v.right = right;
  }

  Corpus corpus_;
  DiscoveryLimits limits_;
  int min_budget_;
  GrammarTree tree_;
  std::map<Context, ResidualTable> cache_;
};

const char* kind_tag(VertexKind k) {
  switch (k) {
    case VertexKind::internal: return "INT";
    case VertexKind::empty_leaf: return "EMP";
    case VertexKind::clone_leaf: return "CLO";
    default: return "UND";
  }
}

}  // namespace

bool GrammarTree::finished() const {
  return !vertices.empty() &&
         std::all_of(vertices.begin(), vertices.end(), [](const Vertex& v) {
           return v.kind != VertexKind::undecided;
         });
}

SplitPair head_split(const Context& ctx, const AlphabetSpec& spec) {
  SplitPair s{ctx, ctx};
  s.plus.first.push_back(spec.a);
  s.minus.first.push_back(-spec.b);
  return s;
}

SplitPair tail_split(const Context& ctx, const AlphabetSpec& spec) {
  SplitPair s{ctx, ctx};
  s.plus.second.insert(s.plus.second.begin(), spec.a);
  s.minus.second.insert(s.minus.second.begin(), -spec.b);
  return s;
}

std::int64_t congeniality_score(std::int64_t count, const AlphabetSpec& spec) {
  if (count < 0) throw std::invalid_argument("negative residual count");
  if (count == 0) return 0;
  std::int64_t base = spec.zero_sum_arrangements();
  std::int64_t score = 1;
  for (std::int64_t p = 2; p * p <= base; ++p) {
    if (base % p != 0) continue;
    while (base % p == 0) base /= p;
    while (count % p == 0) {
      count /= p;
      score *= p;
    }
  }
  if (base > 1)
    while (count % base == 0) {
      count /= base;
      score *= base;
    }
  return score;
}

bool residuals_equal_empirically(const Corpus& c, const Context& ctx1,
                                 const Context& ctx2, int min_budget) {
  int len1 = static_cast<int>(ctx1.first.size() + ctx1.second.size());
  int len2 = static_cast<int>(ctx2.first.size() + ctx2.second.size());
  int budget = c.max_len - std::max(len1, len2);
  if (budget < effective_min_budget(min_budget, c.spec))
    throw BudgetTooSmallError("common truncation budget " +
                              std::to_string(budget) + " is below minimum");
  return tables_equal_upto(build_residual_table(c, ctx1),
                           build_residual_table(c, ctx2), budget);
}

bool is_empirically_empty(const Corpus& c, const Context& ctx,
                          int min_budget) {
  int len = static_cast<int>(ctx.first.size() + ctx.second.size());
  int budget = c.max_len - len;
  if (budget < effective_min_budget(min_budget, c.spec))
    throw BudgetTooSmallError("truncation budget " + std::to_string(budget) +
                              " is below minimum");
  return build_residual_table(c, ctx).empty_upto(budget);
}

GrammarTree discover_grammar(const AlphabetSpec& spec, int corpus_max_len,
                             const DiscoveryLimits& limits) {
  validate_spec(spec);
  return Discoverer(spec, corpus_max_len, limits).run();
}

std::string format_grammar(const GrammarTree& tree) {
  std::ostringstream out;
  out << "ab " << tree.spec.a << ' ' << tree.spec.b << " corpus "
      << tree.corpus_max_len << '\n';
  for (const Vertex& v : tree.vertices) {
    out << v.id << " | " << format_word(v.w1) << " | " << format_word(v.w2)
        << " | " << kind_tag(v.kind) << " | ";
    if (v.kind == VertexKind::internal)
      out << (v.way == Way::head ? 'H' : 'T') << " | " << v.left << ','
          << v.right;
    else if (v.kind == VertexKind::clone_leaf)
      out << "- | " << v.target;
    else
      out << "- | -";
    out << " | " << (v.singleton ? 1 : 0) << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t sep = line.find(" | ", pos);
    if (sep == std::string::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, sep - pos));
    pos = sep + 3;
  }
}

int parse_int(const std::string& tok, int line_no) {
  try {
    std::size_t used = 0;
    int v = std::stoi(tok, &used);
    if (used != tok.size() || tok.empty()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw TextParseError("bad integer '" + tok + "'", line_no);
  }
}

}  // namespace

GrammarTree parse_grammar(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  GrammarTree tree;

  if (!std::getline(in, line)) throw TextParseError("empty grammar text");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::istringstream hdr(line);
    std::string ab, corpus;
    if (!(hdr >> ab >> tree.spec.a >> tree.spec.b >> corpus >>
          tree.corpus_max_len) ||
        ab != "ab" || corpus != "corpus")
      throw TextParseError("bad header '" + line + "'", line_no);
    std::string rest;
    if (hdr >> rest) throw TextParseError("trailing header tokens", line_no);
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != 7)
      throw TextParseError("expected 7 fields, got " +
                               std::to_string(fields.size()),
                           line_no);
    Vertex v;
    v.id = parse_int(fields[0], line_no);
    v.w1 = parse_word(fields[1]);
    v.w2 = parse_word(fields[2]);
    const std::string& kind = fields[3];
    const std::string& way = fields[4];
    const std::string& links = fields[5];
    if (kind == "INT") {
      v.kind = VertexKind::internal;
      if (way == "H")
        v.way = Way::head;
      else if (way == "T")
        v.way = Way::tail;
      else
        throw TextParseError("internal vertex needs way H or T", line_no);
      std::size_t comma = links.find(',');
      if (comma == std::string::npos)
        throw TextParseError("internal vertex needs 'left,right'", line_no);
      v.left = parse_int(links.substr(0, comma), line_no);
      v.right = parse_int(links.substr(comma + 1), line_no);
    } else if (kind == "EMP") {
      v.kind = VertexKind::empty_leaf;
      if (way != "-" || links != "-")
        throw TextParseError("empty leaf takes '- | -'", line_no);
    } else if (kind == "CLO") {
      v.kind = VertexKind::clone_leaf;
      if (way != "-")
        throw TextParseError("clone leaf takes way '-'", line_no);
      v.target = parse_int(links, line_no);
    } else {
      throw TextParseError("unknown kind '" + kind + "'", line_no);
    }
    const std::string& single = fields[6];
    if (single != "0" && single != "1")
      throw TextParseError("singleton flag must be 0 or 1", line_no);
    v.singleton = single == "1";
    tree.vertices.push_back(std::move(v));
  }

  for (Vertex& v : tree.vertices)
    if (v.kind == VertexKind::clone_leaf) {
      if (v.target < 0 || v.target >= static_cast<int>(tree.vertices.size()))
        throw MalformedTreeError("clone target out of range");
      v.delta_len = v.context_len() - tree.vertices[v.target].context_len();
    }

  validate_tree(tree);
  return tree;
}

void validate_tree(const GrammarTree& tree) {
  validate_spec(tree.spec);
  if (tree.corpus_max_len < 0)
    throw MalformedTreeError("negative corpus length");
  const auto n = static_cast<int>(tree.vertices.size());
  if (n == 0) throw MalformedTreeError("tree has no vertices");
  std::set<Context> contexts;
  std::vector<int> parents(n, -1);

  for (int i = 0; i < n; ++i) {
    const Vertex& v = tree.vertices[i];
    if (v.id != i) throw MalformedTreeError("vertex ids must be 0..n-1 in order");
    if (!letters_conform(v.w1, tree.spec) || !letters_conform(v.w2, tree.spec))
      throw MalformedTreeError("vertex " + std::to_string(i) +
                               " has letters outside the alphabet");
    if (!contexts.insert({v.w1, v.w2}).second)
      throw MalformedTreeError("duplicate context at vertex " +
                               std::to_string(i));
    Word joined = v.w1;
    joined.insert(joined.end(), v.w2.begin(), v.w2.end());
    if (v.singleton != is_good(joined, tree.spec))
      throw MalformedTreeError("vertex " + std::to_string(i) +
                               " singleton flag is untruthful");

    switch (v.kind) {
      case VertexKind::undecided:
        throw MalformedTreeError("vertex " + std::to_string(i) +
                                 " is undecided");
      case VertexKind::internal: {
        for (int child : {v.left, v.right}) {
          if (child < 0 || child >= n || child == i)
            throw MalformedTreeError("vertex " + std::to_string(i) +
                                     " has invalid child links");
          if (parents[child] != -1)
            throw MalformedTreeError("vertex " + std::to_string(child) +
                                     " has two parents");
          parents[child] = i;
        }
        SplitPair split = v.way == Way::head
                              ? head_split({v.w1, v.w2}, tree.spec)
                              : tail_split({v.w1, v.w2}, tree.spec);
        const Vertex& l = tree.vertices[v.left];
        const Vertex& r = tree.vertices[v.right];
        if (Context{l.w1, l.w2} != split.plus ||
            Context{r.w1, r.w2} != split.minus)
          throw MalformedTreeError("children of vertex " + std::to_string(i) +
                                   " do not match its declared way");
        break;
      }
      case VertexKind::empty_leaf:
        break;
      case VertexKind::clone_leaf: {
        if (v.target < 0 || v.target >= i)
          throw MalformedTreeError("clone target of vertex " +
                                   std::to_string(i) +
                                   " must be an earlier vertex");
        const Vertex& t = tree.vertices[v.target];
        if (t.context_len() >= v.context_len())
          throw MalformedTreeError("clone target of vertex " +
                                   std::to_string(i) +
                                   " must have a strictly shorter context");
        if (v.delta_len != v.context_len() - t.context_len() ||
            v.delta_len <= 0)
          throw MalformedTreeError("clone delta of vertex " +
                                   std::to_string(i) + " is wrong");
        break;
      }
    }
  }

  if (!tree.vertices[0].w1.empty() || !tree.vertices[0].w2.empty())
    throw MalformedTreeError("vertex 0 must have the empty context");
  if (parents[0] != -1) throw MalformedTreeError("the root has a parent");
  for (int i = 1; i < n; ++i)
    if (parents[i] == -1)
      throw MalformedTreeError("vertex " + std::to_string(i) +
                               " is not any internal vertex's child");
  // parents[i] < i fails only for hand-written files; walk up to be sure.
  for (int i = 1; i < n; ++i) {
    int hops = 0, at = i;
    while (at != 0 && ++hops <= n) at = parents[at];
    if (at != 0)
      throw MalformedTreeError("vertex " + std::to_string(i) +
                               " is caught in a parent cycle");
  }
}

}  // namespace lingram
