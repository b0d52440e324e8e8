// Command-line front end: replay the whole discover/prove/solve session for
// any coprime alphabet, or run the individual stages and the conjecture
// checker in batch mode. All output is deterministic for a given config.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lingram/pipeline.hpp"

using nlohmann::ordered_json;
using namespace lingram;

namespace {

// Exit statuses: the contract every subcommand keeps.
constexpr int kOk = 0;         // verified, and any cross-check passed
constexpr int kDisproved = 1;  // a claim was positively refuted
constexpr int kStuck = 2;      // inconclusive, or a resource limit
constexpr int kUsage = 3;      // bad flags, bad files

struct Config {
  int a = 1;
  int b = 1;
  int corpus_max_len = 0;  // 0 = default 4(a+b)
  int max_purges = 3;
  int max_vertices = 10000;
  int series_order = 20;
  int n_max = 3;
  std::string grammar_file;
  std::string verbosity = "terse";
  std::string format = "text";

  AlphabetSpec spec() const { return {a, b}; }
  bool verbose() const { return verbosity != "terse"; }
  bool very_verbose() const { return verbosity == "very-verbose"; }
  bool structured() const { return format == "structured"; }
};

std::string join_series(const std::vector<mpq_class>& coeffs) {
  std::string out;
  for (const mpq_class& c : coeffs) {
    if (!out.empty()) out += ',';
    out += c.get_str();
  }
  return out;
}

const char* verdict_name(ProofReport::Verdict v) {
  switch (v) {
    case ProofReport::Verdict::good:
      return "true";
    case ProofReport::Verdict::bad:
      return "false";
    default:
      return "unknown";
  }
}

// --- structured-output mirrors of the text formats ---

ordered_json grammar_json(const GrammarTree& t) {
  ordered_json vertices = ordered_json::array();
  for (const Vertex& v : t.vertices) {
    ordered_json jv;
    jv["id"] = v.id;
    jv["w1"] = format_word(v.w1);
    jv["w2"] = format_word(v.w2);
    switch (v.kind) {
      case VertexKind::internal:
        jv["kind"] = "INT";
        jv["way"] = v.way == Way::head ? "H" : "T";
        jv["left"] = v.left;
        jv["right"] = v.right;
        break;
      case VertexKind::empty_leaf:
        jv["kind"] = "EMP";
        break;
      case VertexKind::clone_leaf:
        jv["kind"] = "CLO";
        jv["target"] = v.target;
        jv["delta_len"] = v.delta_len;
        break;
      default:
        jv["kind"] = "UNDECIDED";
        break;
    }
    jv["singleton"] = v.singleton;
    vertices.push_back(std::move(jv));
  }
  ordered_json jt;
  jt["a"] = t.spec.a;
  jt["b"] = t.spec.b;
  jt["corpus_max_len"] = t.corpus_max_len;
  jt["vertices"] = std::move(vertices);
  return jt;
}

ordered_json report_json(const ProofReport& rep) {
  ordered_json leaves = ordered_json::array();
  for (const LeafProof& lp : rep.leaves) {
    ordered_json jl;
    jl["id"] = lp.id;
    jl["kind"] = lp.kind == VertexKind::empty_leaf ? "EMP" : "CLO";
    switch (lp.outcome.status) {
      case ProofOutcome::Status::proved:
        jl["status"] = "PROVED";
        jl["purges"] = lp.outcome.purges_used;
        break;
      case ProofOutcome::Status::disproved:
        jl["status"] = "DISPROVED";
        jl["counterexample"] = format_word(lp.outcome.counterexample);
        break;
      case ProofOutcome::Status::inconclusive:
        jl["status"] = "INCONCLUSIVE";
        jl["survivors"] = lp.outcome.survivors.size();
        break;
    }
    leaves.push_back(std::move(jl));
  }
  ordered_json jr;
  jr["convention"] = "purge-count=post-initialization-rounds";
  jr["leaves"] = std::move(leaves);
  jr["verdict"] = verdict_name(rep.verdict);
  jr["max_purges_used"] = rep.max_purges_used;
  return jr;
}

ordered_json series_json(const std::vector<mpq_class>& coeffs) {
  ordered_json arr = ordered_json::array();
  for (const mpq_class& c : coeffs) arr.push_back(c.get_str());
  return arr;
}

// --- grammar file plumbing ---

bool write_grammar_file(const std::string& path, const GrammarTree& t) {
  std::ofstream out(path);
  if (!out) return false;
  out << format_grammar(t);
  return static_cast<bool>(out);
}

GrammarTree read_grammar_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grammar file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grammar(buf.str());
}

// Obtain the working tree: read the named file when one is given, otherwise
// discover afresh from the command-line spec.
GrammarTree obtain_tree(const Config& cfg, int* retries) {
  if (!cfg.grammar_file.empty()) return read_grammar_file(cfg.grammar_file);
  DiscoveryLimits limits;
  limits.max_vertices = cfg.max_vertices;
  return discover_with_retries(cfg.spec(), cfg.corpus_max_len, limits,
                               retries);
}

// Purge-by-purge survivor trace for one obligation (very-verbose mode).
void dump_obligation(std::ostream& os, const Obligation& ob,
                     const AlphabetSpec& spec, int max_purges, int leaf_id) {
  os << "leaf " << leaf_id << " obligation " << format_obligation(ob) << "\n";
  prove_obligation(ob, spec, max_purges,
                   [&](int round, const std::vector<MetaWord>& survivors) {
                     os << "purge " << round << " survivors "
                        << survivors.size() << "\n";
                     for (const MetaWord& mw : survivors)
                       os << "  " << to_string(mw) << "\n";
                   });
}

void dump_all_obligations(std::ostream& os, const GrammarTree& t,
                          int max_purges) {
  for (const Vertex& v : t.vertices) {
    if (v.kind != VertexKind::empty_leaf && v.kind != VertexKind::clone_leaf)
      continue;
    for (const Obligation& ob : leaf_obligations(t, v))
      dump_obligation(os, ob, t.spec, max_purges, v.id);
  }
}

int oracle_mismatch(const std::vector<mpq_class>& series,
                    const std::vector<mpq_class>& oracle) {
  for (std::size_t n = 0; n < series.size(); ++n)
    if (series[n] != oracle[n]) return static_cast<int>(n);
  return -1;
}

// --- subcommands ---

int cmd_pipeline(const Config& cfg) {
  PipelineResult res;
  try {
    PipelineOptions opts;
    opts.spec = cfg.spec();
    opts.corpus_max_len = cfg.corpus_max_len;
    opts.max_purges = cfg.max_purges;
    opts.max_vertices = cfg.max_vertices;
    opts.series_order = cfg.series_order;
    res = run_pipeline(opts);
  } catch (const DiscoveryLimitError& e) {
    std::cerr << "discovery stopped: " << e.what() << "; partial tree has "
              << e.partial.vertices.size() << " vertices\n";
    return kStuck;
  }
  if (!cfg.grammar_file.empty() &&
      !write_grammar_file(cfg.grammar_file, res.tree)) {
    std::cerr << "cannot write grammar file: " << cfg.grammar_file << "\n";
    return kUsage;
  }
  const std::vector<mpq_class> oracle =
      oracle_series(cfg.spec(), cfg.series_order);
  const int bad_at = oracle_mismatch(res.series, oracle);

  if (cfg.structured()) {
    ordered_json doc;
    doc["spec"] = ordered_json{{"a", cfg.a}, {"b", cfg.b}};
    doc["corpus_max_len"] = res.corpus_max_len;
    doc["discovery_retries"] = res.discovery_retries;
    doc["grammar"] = grammar_json(res.tree);
    doc["report"] = report_json(res.report);
    doc["gf"] = to_string(res.gf);
    doc["series"] = series_json(res.series);
    doc["oracle_check"] = bad_at < 0;
    doc["verdict"] = verdict_name(res.report.verdict);
    std::cout << doc.dump(2) << "\n";
  } else {
    if (cfg.very_verbose())
      dump_all_obligations(std::cout, res.tree, cfg.max_purges);
    std::cout << "gf " << to_string(res.gf) << "\n";
    std::cout << "series " << join_series(res.series) << "\n";
    if (bad_at < 0)
      std::cout << "oracle-check ok\n";
    else
      std::cout << "oracle-check mismatch at length " << bad_at << "\n";
    if (cfg.verbose())
      std::cout << format_report(res.report);
    else
      std::cout << "verdict " << verdict_name(res.report.verdict) << "\n";
  }
  if (res.report.verdict == ProofReport::Verdict::bad) return kDisproved;
  if (res.report.verdict != ProofReport::Verdict::good || bad_at >= 0)
    return kStuck;
  return kOk;
}

int cmd_discover(const Config& cfg) {
  GrammarTree tree;
  int retries = 0;
  try {
    DiscoveryLimits limits;
    limits.max_vertices = cfg.max_vertices;
    tree = discover_with_retries(cfg.spec(), cfg.corpus_max_len, limits,
                                 &retries);
  } catch (const DiscoveryLimitError& e) {
    std::cerr << "discovery stopped: " << e.what() << "; partial tree has "
              << e.partial.vertices.size() << " vertices\n";
    return kStuck;
  }
  if (!cfg.grammar_file.empty()) {
    if (!write_grammar_file(cfg.grammar_file, tree)) {
      std::cerr << "cannot write grammar file: " << cfg.grammar_file << "\n";
      return kUsage;
    }
  }
  if (cfg.structured())
    std::cout << grammar_json(tree).dump(2) << "\n";
  else if (cfg.grammar_file.empty())
    std::cout << format_grammar(tree);
  else
    std::cout << "grammar written to " << cfg.grammar_file << "\n";
  return kOk;
}

int cmd_prove(const Config& cfg) {
  GrammarTree tree = obtain_tree(cfg, nullptr);
  ProofReport rep = prove_grammar(tree, cfg.max_purges);
  if (cfg.structured()) {
    std::cout << report_json(rep).dump(2) << "\n";
  } else {
    if (cfg.very_verbose())
      dump_all_obligations(std::cout, tree, cfg.max_purges);
    std::cout << format_report(rep);
  }
  if (rep.verdict == ProofReport::Verdict::bad) return kDisproved;
  if (rep.verdict != ProofReport::Verdict::good) return kStuck;
  return kOk;
}

int cmd_gf(const Config& cfg) {
  GrammarTree tree = obtain_tree(cfg, nullptr);
  RationalFunction gf = solve_gf_system(build_gf_system(tree)).at(0);
  std::vector<mpq_class> series = series_coefficients(gf, cfg.series_order);
  std::vector<mpq_class> oracle = oracle_series(tree.spec, cfg.series_order);
  const int bad_at = oracle_mismatch(series, oracle);
  if (cfg.structured()) {
    ordered_json doc;
    doc["gf"] = to_string(gf);
    doc["series"] = series_json(series);
    doc["oracle_check"] = bad_at < 0;
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "gf " << to_string(gf) << "\n";
    std::cout << "series " << join_series(series) << "\n";
    if (bad_at < 0)
      std::cout << "oracle-check ok\n";
    else
      std::cout << "oracle-check mismatch at length " << bad_at << "\n";
  }
  return bad_at < 0 ? kOk : kStuck;
}

int cmd_count(const Config& cfg) {
  std::vector<mpq_class> oracle = oracle_series(cfg.spec(), cfg.series_order);
  if (cfg.structured()) {
    ordered_json doc;
    doc["counts"] = series_json(oracle);
    std::cout << doc.dump(2) << "\n";
  } else {
    for (std::size_t n = 0; n < oracle.size(); ++n)
      std::cout << "length " << n << " count " << oracle[n].get_str() << "\n";
  }
  return kOk;
}

int cmd_conjecture(const Config& cfg) {
  const AlphabetSpec spec = cfg.spec();
  mpz_class m;
  mpz_bin_uiui(m.get_mpz_t(), static_cast<unsigned long>(cfg.a + cfg.b),
               static_cast<unsigned long>(cfg.a));
  bool all_equal = true;
  ordered_json rows = ordered_json::array();
  mpz_class expected = 1;
  for (int n = 0; n <= cfg.n_max; ++n) {
    const int length = n * static_cast<int>(spec.period());
    const long long count = oracle_count(spec, length);
    const bool equal = mpz_class(static_cast<long>(count)) == expected;
    all_equal = all_equal && equal;
    if (cfg.structured()) {
      ordered_json row;
      row["n"] = n;
      row["length"] = length;
      row["count"] = std::to_string(count);
      row["expected"] = expected.get_str();
      row["equal"] = equal;
      rows.push_back(std::move(row));
    } else {
      std::cout << "n " << n << " length " << length << " count " << count
                << " expected " << expected.get_str() << " equal "
                << (equal ? "yes" : "no") << "\n";
    }
    expected *= m;
  }
  if (cfg.structured()) {
    ordered_json doc;
    doc["binomial"] = m.get_str();
    doc["rows"] = std::move(rows);
    doc["all_equal"] = all_equal;
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "conjecture " << (all_equal ? "consistent" : "refuted")
              << " up to n " << cfg.n_max << " (no proof either way)\n";
  }
  return all_equal ? kOk : kDisproved;
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{
      "Discover, certify, and count with linear grammars for mishap-free "
      "zero-sum words"};
  app.fallthrough();
  app.add_option("--a", cfg.a, "positive letter value");
  app.add_option("--b", cfg.b, "negative letter magnitude");
  app.add_option("--corpus-max-len", cfg.corpus_max_len,
                 "discovery corpus length bound (default: four periods)");
  app.add_option("--max-purges", cfg.max_purges, "purge rounds per obligation");
  app.add_option("--max-vertices", cfg.max_vertices, "discovery vertex cap");
  app.add_option("--series-order", cfg.series_order,
                 "series/count length bound");
  app.add_option("--grammar-file", cfg.grammar_file,
                 "grammar artifact to write (pipeline, discover) or read "
                 "(prove, gf)");
  app.add_option("--verbosity", cfg.verbosity, "terse|verbose|very-verbose")
      ->check(CLI::IsMember({"terse", "verbose", "very-verbose"}));
  app.add_option("--format", cfg.format, "text|structured")
      ->check(CLI::IsMember({"text", "structured"}));

  CLI::App* pipeline = app.add_subcommand("pipeline", "full session (default)");
  CLI::App* discover = app.add_subcommand("discover", "discovery stage only");
  CLI::App* prove = app.add_subcommand("prove", "certify a grammar");
  CLI::App* gf = app.add_subcommand("gf", "weight-enumerator and series");
  CLI::App* count = app.add_subcommand("count", "brute-force counts by length");
  CLI::App* conjecture = app.add_subcommand(
      "conjecture", "compare counts with the binomial-power guess");
  conjecture->add_option("--n-max", cfg.n_max, "largest multiple of the period");
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;  // help exits 0, real parse errors are usage
  }

  if (cfg.a < 1 || cfg.b < 1 || std::gcd(cfg.a, cfg.b) != 1) {
    std::cerr << "letters must be positive with gcd(a, b) = 1\n";
    return kUsage;
  }
  if (cfg.max_purges < 0 || cfg.max_vertices < 1 || cfg.series_order < 0 ||
      cfg.corpus_max_len < 0 || cfg.n_max < 0) {
    std::cerr << "limits must be positive\n";
    return kUsage;
  }

  try {
    if (discover->parsed()) return cmd_discover(cfg);
    if (prove->parsed()) return cmd_prove(cfg);
    if (gf->parsed()) return cmd_gf(cfg);
    if (count->parsed()) return cmd_count(cfg);
    if (conjecture->parsed()) return cmd_conjecture(cfg);
    (void)pipeline;
    return cmd_pipeline(cfg);
  } catch (const DiscoveryLimitError& e) {
    std::cerr << "discovery stopped: " << e.what() << "\n";
    return kStuck;
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kStuck;
  } catch (const TextParseError& e) {
    std::cerr << "grammar file parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const MalformedTreeError& e) {
    std::cerr << "malformed grammar: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStuck;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
